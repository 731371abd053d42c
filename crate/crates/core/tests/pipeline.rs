//! Library-level integration runs: the constrained mock problem and the
//! canonical benchmark setup.

use amrpbs::amr::AmrConfig;
use amrpbs::benchmarks::{problem_by_name, run_bego};
use amrpbs::optimizer::{run_amr_pbs, RunConfig};

#[test]
fn constrained_mock_run_returns_feasible_optimum() {
    let problem = problem_by_name("riblet-mock").unwrap();
    let mut cfg = RunConfig::new(12, 18, 3);
    cfg.n_pop = 12;
    cfg.max_iter = 30;
    cfg.penalty_weight = 1e4;
    let trace = run_amr_pbs(&problem, &cfg).unwrap();
    let result = trace.final_result.as_ref().unwrap();
    assert!(
        problem.max_violation(&result.point) <= 1e-3,
        "returned optimum violates a constraint: {:?}",
        result.point
    );
    assert!(problem.space().contains(&result.point));
    // The unconstrained bowl center is infeasible, so the penalty must have
    // steered the swarm away from it.
    assert!(problem.max_violation(&[0.25, 3.0, 0.2]) > 0.0);
}

#[test]
fn branin_canonical_run_refines_and_beats_baseline_on_this_seed() {
    let problem = problem_by_name("branin").unwrap();
    let seed = 4;
    let mut cfg = RunConfig::new(20, 30, seed);
    cfg.n_pop = 30;
    cfg.amr = AmrConfig::new(0.3, 3);
    let trace = run_amr_pbs(&problem, &cfg).unwrap();
    assert!(
        !trace.events.is_empty(),
        "canonical Branin run should refine at least once"
    );
    assert!(trace.evals_used <= cfg.budget);

    let f_star = problem.known_optimum().unwrap().1;
    let amr_best = trace.best_observed.as_ref().unwrap().1;
    let bego = run_bego(&problem, 20, 30, seed).unwrap();
    // Not guaranteed for every seed (the acceptance suite checks the medians
    // over 40); this particular seed is a stable regression anchor.
    assert!(
        (amr_best - f_star).abs() < (bego.final_value - f_star).abs(),
        "amr {amr_best} vs bego {} (f* = {f_star})",
        bego.final_value
    );
}
