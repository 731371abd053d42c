use amrpbs::benchmarks::*;
use std::time::Instant;

fn main() {
    for (n0, seed) in [(60usize, 0u64), (180, 0), (60, 1), (180, 1)] {
        let t0 = Instant::now();
        let table = experiment2(&[n0], 210, 1, seed).unwrap();
        println!("n0={n0} seed={seed}: rae {:.4} in {:?}", table[0].1, t0.elapsed());
    }
}
