use amrpbs::benchmarks::*;
use std::time::Instant;

fn main() {
    // One Branin pair at Table-I settings.
    let p = problem_by_name("branin").unwrap();
    let t0 = Instant::now();
    let amr = run_amr_benchmark(&p, 20, 30, 30, 3, 0).unwrap();
    let t1 = Instant::now();
    let bego = run_bego(&p, 20, 30, 0).unwrap();
    let t2 = Instant::now();
    println!("branin: amr {:?} (rae {:.4}) | bego {:?} (rae {:.4})", t1 - t0, amr.rae, t2 - t1, bego.rae);

    // One Hartmann6 pair at Table-I settings.
    let p = problem_by_name("hartmann6").unwrap();
    let t0 = Instant::now();
    let amr = run_amr_benchmark(&p, 60, 90, 30, 3, 0).unwrap();
    let t1 = Instant::now();
    let bego = run_bego(&p, 60, 90, 0).unwrap();
    let t2 = Instant::now();
    println!("hartmann6: amr {:?} (rae {:.4}) | bego {:?} (rae {:.4})", t1 - t0, amr.rae, t2 - t1, bego.rae);

    // One experiment-2-style run (budget 210, n_pop 60).
    let t0 = Instant::now();
    let table = experiment2(&[60], 210, 1, 0).unwrap();
    println!("exp2 n0=60 single run {:?} (rae {:.4})", t0.elapsed(), table[0].1);
    let t0 = Instant::now();
    let table = experiment2(&[180], 210, 1, 0).unwrap();
    println!("exp2 n0=180 single run {:?} (rae {:.4})", t0.elapsed(), table[0].1);
}
