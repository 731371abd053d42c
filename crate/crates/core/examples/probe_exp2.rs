use amrpbs::benchmarks::*;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let table = experiment2(&[60, 180], 210, 10, 0).unwrap();
    for (n0, med, results) in &table {
        let raes: Vec<String> = results.iter().map(|r| format!("{:.4}", r.rae)).collect();
        println!("n0={n0}: median {med:.5} [{}]", raes.join(", "));
    }
    println!("elapsed {:?}", t0.elapsed());
}
