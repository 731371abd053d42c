use amrpbs::benchmarks::*;
use std::time::Instant;

fn main() {
    let names: Vec<String> = std::env::args().skip(1).collect();
    for name in names {
        let spec = BenchmarkSpec::table_row(&name).unwrap();
        let t0 = Instant::now();
        let rows = experiment1(&[spec], None).unwrap();
        let r = &rows[0];
        println!("{name} ({} seeds) in {:?}", r.n_runs, t0.elapsed());
        println!("  amr median {:.4} max {:.4} | bego median {:.4} max {:.4} | wins {}/{}",
            r.amr_median, r.amr_max, r.bego_median, r.bego_max, r.amr_wins, r.n_runs);
    }
}
