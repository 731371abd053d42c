use amrpbs::benchmarks::*;
use amrpbs::problem::*;
use amrpbs::surrogate::*;

fn main() {
    // Which model does CV pick on three-hump LHS data, and how wild is it?
    let p = problem_by_name("three-hump").unwrap();
    for seed in [0u64, 1, 2, 3, 4] {
        let pts = lhs_sample(p.space(), 20, seed).unwrap();
        let ys: Vec<f64> = pts.iter().map(|q| three_hump(q)).collect();
        let data = SampleSet::from_pairs(pts, ys).unwrap();
        let winner = select_model(&data, &default_candidates()).unwrap();
        // Scan the surrogate for fantasy minima.
        let mut min_pred = f64::INFINITY;
        for i in 0..=100 {
            for j in 0..=100 {
                let x = [-5.0 + 10.0 * i as f64 / 100.0, -5.0 + 10.0 * j as f64 / 100.0];
                min_pred = min_pred.min(winner.predict(&x));
            }
        }
        let data_min = data.responses().iter().cloned().fold(f64::INFINITY, f64::min);
        println!("seed {seed}: winner {:?}/{:?} | surrogate min {min_pred:.1} | data min {data_min:.2}",
                 winner.kind(), winner.family());
        // Compare against pure kriging.
        let krig = train(SurrogateKind::Kriging, &KernelSpec::auto(KernelFamily::Gaussian), &data).unwrap();
        let mut kmin = f64::INFINITY;
        for i in 0..=100 {
            for j in 0..=100 {
                let x = [-5.0 + 10.0 * i as f64 / 100.0, -5.0 + 10.0 * j as f64 / 100.0];
                kmin = kmin.min(krig.predict(&x));
            }
        }
        println!("          kriging-gaussian min {kmin:.1} (scales {:?})", &krig.scales()[..1]);
    }
}
