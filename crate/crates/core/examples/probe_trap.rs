use amrpbs::benchmarks::*;
use amrpbs::optimizer::*;
use amrpbs::amr::AmrConfig;

fn main() {
    let p = problem_by_name("hartmann6").unwrap();
    for seed in [0u64, 4] {
        let mut cfg = RunConfig::new(60, 210, seed);
        cfg.n_pop = 60;
        cfg.max_iter = 100;
        cfg.amr = AmrConfig::new(0.3, 2);
        let trace = run_amr_pbs(&p, &cfg).unwrap();
        println!("--- seed {seed}: {} iters, {} checks, {} events, evals {}",
            trace.iterations.len(), trace.checks.len(), trace.events.len(), trace.evals_used);
        for e in &trace.events {
            let best_in_batch = e.points.iter().map(|q| hartmann6(q)).fold(f64::INFINITY, f64::min);
            println!("  event t={} gamma={} eps={:.4} best_true_in_batch {:.4}",
                e.iteration, e.batch_size, e.epsilon_target, best_in_batch);
        }
        let f = trace.final_result.as_ref().unwrap();
        println!("  final surr {:.4} true {:?} best_obs {:.4}",
            f.surrogate_value, f.true_value.map(|v| format!("{v:.4}")),
            trace.best_observed.as_ref().unwrap().1);
    }
}
