use amrpbs::benchmarks::*;
use std::time::Instant;

fn main() {
    let spec = BenchmarkSpec::table_row("branin").unwrap();
    let t0 = Instant::now();
    let rows = experiment1(&[spec], None).unwrap();
    let r = &rows[0];
    println!("branin 40 seeds in {:?}", t0.elapsed());
    println!("amr median {:.4} max {:.4} | bego median {:.4} max {:.4} | wins {}/{}",
        r.amr_median, r.amr_max, r.bego_median, r.bego_max, r.amr_wins, r.n_runs);
    for (a, b) in r.results.iter().take(10) {
        println!("  seed {}: amr {:.4} bego {:.4}", a.seed, a.rae, b.rae);
    }
}
