use amrpbs::benchmarks::*;
use amrpbs::optimizer::*;

fn main() {
    let p = problem_by_name("three-hump").unwrap();
    for seed in [0u64, 1, 2, 3] {
        let mut cfg = RunConfig::new(20, 30, seed);
        cfg.n_pop = 30;
        cfg.amr.tau = 3;
        let trace = run_amr_pbs(&p, &cfg).unwrap();
        println!("--- seed {seed}: {} iters, {} checks, {} events, evals {}",
            trace.iterations.len(), trace.checks.len(), trace.events.len(), trace.evals_used);
        for e in &trace.events {
            let pts: Vec<String> = e.points.iter().map(|q| format!("({:.2},{:.2})->{:.3}", q[0], q[1], three_hump(q))).collect();
            println!("  event t={} g={} eps={:.5} {}", e.iteration, e.batch_size, e.epsilon_target, pts.join(" "));
        }
        let f = trace.final_result.as_ref().unwrap();
        println!("  final ({:.3},{:.3}) surr {:.4} true {:?} | best_obs {:.4}",
            f.point[0], f.point[1], f.surrogate_value, f.true_value.map(|v| format!("{v:.4}")),
            trace.best_observed.as_ref().unwrap().1);
    }
}
