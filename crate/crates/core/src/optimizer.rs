//! The outer loop: PSO over the current surrogate, periodic refinement
//! checks, and refinement events (batch sizing, batch placement, true
//! evaluations, retraining, re-selection).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::amr::{
    amr_test, desired_fidelity, relative_improvement, AmrConfig, ImprovementDistribution,
};
use crate::batch::select_batch_with_values;
use crate::pemf::{compute_batch_size, estimate_error_distribution, ErrorModel, PemfError};
use crate::problem::{lhs_sample, update_sampling_range, Problem, SampleSet, SamplingRange};
use crate::pso::{init_swarm, pso_step};
use crate::surrogate::{default_candidates, select_model, TrainedSurrogate};
use crate::trace::{
    AmrCheckRecord, FinalResult, IterationRecord, RefinementEvent, RunTrace,
};

/// Resampling depth of the error estimation; kept fixed so one refinement
/// costs O(levels·repeats) cheap retrainings.
const PEMF_LEVELS: usize = 5;
const PEMF_REPEATS: usize = 10;

/// Window of the function-tolerance stopping rule.
pub const STOP_WINDOW: usize = 5;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("run aborted: {cause}")]
    Aborted { cause: String, trace: Box<RunTrace> },
}

/// Settings of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Initial LHS sample count N₀.
    pub n_initial: usize,
    /// Total true-evaluation budget N_f.
    pub budget: usize,
    pub n_pop: usize,
    pub max_iter: usize,
    /// Relative function tolerance δ_F of the stopping rule.
    pub delta_f: f64,
    pub amr: AmrConfig,
    pub seed: u64,
    /// Static quadratic penalty weight for constrained problems.
    pub penalty_weight: f64,
}

impl RunConfig {
    pub fn new(n_initial: usize, budget: usize, seed: u64) -> Self {
        Self {
            n_initial,
            budget,
            n_pop: 30,
            max_iter: 100,
            delta_f: 1e-4,
            amr: AmrConfig::new(0.3, 3),
            seed,
            penalty_weight: 1e3,
        }
    }

    pub fn validate(&self, dims: usize) -> Result<(), RunError> {
        let fail = |msg: String| Err(RunError::Config(msg));
        if self.budget < self.n_initial {
            return fail(format!(
                "budget ({}) must cover the initial sample size ({})",
                self.budget, self.n_initial
            ));
        }
        if self.n_pop < 2 {
            return fail(format!("population size must be at least 2, got {}", self.n_pop));
        }
        if self.max_iter < 1 {
            return fail("max_iter must be at least 1".into());
        }
        if !(self.delta_f > 0.0) {
            return fail(format!("delta_f must be positive, got {}", self.delta_f));
        }
        if self.penalty_weight < 0.0 {
            return fail(format!(
                "penalty weight must be nonnegative, got {}",
                self.penalty_weight
            ));
        }
        let min_initial = (2 * (dims + 1)).max(PEMF_LEVELS + dims + 2);
        if self.n_initial < min_initial {
            return fail(format!(
                "n_initial must be at least {min_initial} for {dims}-dimensional problems \
                 (model selection and error estimation need data), got {}",
                self.n_initial
            ));
        }
        self.amr.validate().map_err(RunError::Config)
    }
}

/// True when the run should stop: the relative change of the global best
/// over the last `window` consecutive iteration pairs is below `delta_f`,
/// the iteration cap is reached, or the true-evaluation budget is spent.
pub fn stopping_check(trace: &RunTrace, delta_f: f64, window: usize) -> bool {
    if let Some(last) = trace.iterations.last() {
        if last.iteration >= trace.max_iter {
            return true;
        }
    }
    if trace.budget > 0 && trace.evals_used >= trace.budget {
        return true;
    }
    let n = trace.iterations.len();
    if n < window + 1 {
        return false;
    }
    let tail = &trace.iterations[n - (window + 1)..];
    let max_change = tail
        .windows(2)
        .map(|w| {
            let prev = w[0].global_best;
            let now = w[1].global_best;
            (now - prev).abs() / now.abs().max(1e-12)
        })
        .fold(0.0, f64::max);
    max_change < delta_f
}

/// Run the full adaptive-refinement optimization and return its trace.
///
/// The trace is fully deterministic given the problem, config and seed; the
/// initial design is seeded with `cfg.seed` itself so baselines sharing the
/// seed start from the identical design.
pub fn run_amr_pbs(problem: &Problem, cfg: &RunConfig) -> Result<RunTrace, RunError> {
    cfg.validate(problem.space().dims())?;
    let mut trace = RunTrace {
        budget: cfg.budget,
        max_iter: cfg.max_iter,
        ..Default::default()
    };
    match run_inner(problem, cfg, &mut trace) {
        Ok(()) => Ok(trace),
        Err(cause) => Err(RunError::Aborted {
            cause,
            trace: Box::new(trace),
        }),
    }
}

fn run_inner(problem: &Problem, cfg: &RunConfig, trace: &mut RunTrace) -> Result<(), String> {
    let space = problem.space();
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pso_rng = ChaCha8Rng::seed_from_u64(master.random());

    // Step 1: initial design, truth evaluations, model selection.
    let initial_points =
        lhs_sample(space, cfg.n_initial, cfg.seed).map_err(|e| e.to_string())?;
    let initial_responses = problem
        .eval_batch(&initial_points)
        .map_err(|e| format!("initial evaluation failed: {e}"))?;
    let mut samples = SampleSet::new();
    for (p, y) in initial_points.into_iter().zip(initial_responses) {
        samples.push(p, y).map_err(|e| e.to_string())?;
    }
    trace.evals_used = samples.len();
    assert!(trace.evals_used <= cfg.budget, "budget overrun at startup");

    let candidates = default_candidates();
    let mut surrogate =
        select_model(&samples, &candidates).map_err(|e| format!("model selection failed: {e}"))?;
    let mut error_model = refresh_error_model(&samples, &surrogate, master.random())?;

    let mut swarm = init_swarm(
        space,
        cfg.n_pop,
        |x| surrogate.predict(x) + problem.constraint_penalty(x, cfg.penalty_weight),
        &mut pso_rng,
    );
    push_iteration(trace, &swarm, &error_model, false);

    // Improvements are tracked on personal-best fitness: per particle it is
    // monotone under a fixed surrogate, so its decay measures search
    // progress rather than swarm churn.
    let mut last_check_fitness: Vec<f64> = swarm.personal_best_values().to_vec();
    let mut q_prev_check: Option<f64> = None;
    let mut iters_since_check = 0usize;
    let mut stall_cooldown = 0usize;

    // Steps 2-5: PSO with periodic refinement checks.
    while swarm.iteration() < cfg.max_iter {
        pso_step(
            &mut swarm,
            |x| surrogate.predict(x) + problem.constraint_penalty(x, cfg.penalty_weight),
            space,
            &mut pso_rng,
        );
        iters_since_check += 1;
        stall_cooldown = stall_cooldown.saturating_sub(1);

        let mut refined = false;
        if iters_since_check == cfg.amr.tau {
            iters_since_check = 0;
            let deltas: Vec<f64> = swarm
                .personal_best_values()
                .iter()
                .zip(&last_check_fitness)
                .map(|(now, prev)| relative_improvement(*now, *prev))
                .collect();
            refined = run_check(
                problem,
                cfg,
                trace,
                &deltas,
                false,
                &candidates,
                &mut samples,
                &mut surrogate,
                &mut error_model,
                &mut swarm,
                &mut master,
                &mut q_prev_check,
            )?;
            last_check_fitness = swarm.personal_best_values().to_vec();
        }

        push_iteration(trace, &swarm, &error_model, refined);
        if stopping_check(trace, cfg.delta_f, STOP_WINDOW) {
            let budget_or_iters_spent = swarm.iteration() >= cfg.max_iter
                || (cfg.budget > 0 && trace.evals_used >= cfg.budget);
            if budget_or_iters_spent {
                break;
            }
            // The function-tolerance branch fired while refinable budget
            // remains: a stalled search with residual model error refines
            // instead of terminating (the improvement pool at a stall is
            // all zeros).
            if error_model.is_none() || cfg.budget - trace.evals_used < 2 {
                break;
            }
            // At most one check per iteration, and a grace window after
            // each stall refinement; a persistent stall retries later.
            if stall_cooldown > 0 || iters_since_check == 0 {
                continue;
            }
            iters_since_check = 0;
            stall_cooldown = STOP_WINDOW;
            let deltas = vec![0.0; swarm.len()];
            let stall_refined = run_check(
                problem,
                cfg,
                trace,
                &deltas,
                true,
                &candidates,
                &mut samples,
                &mut surrogate,
                &mut error_model,
                &mut swarm,
                &mut master,
                &mut q_prev_check,
            )?;
            last_check_fitness = swarm.personal_best_values().to_vec();
            if stall_refined {
                if let Some(last) = trace.iterations.last_mut() {
                    last.refined = true;
                    last.samples_used = trace.evals_used;
                    last.global_best = swarm.global_best().1;
                }
            } else {
                break;
            }
        }
    }

    // Final optimum, with one confirming true evaluation when affordable.
    let (point, _) = swarm.global_best();
    let point = point.to_vec();
    let surrogate_value = surrogate.predict(&point);
    let true_value = if let Some(i) = samples.find_duplicate(&point) {
        Some(samples.responses()[i])
    } else if trace.evals_used < cfg.budget {
        let y = problem
            .eval(&point)
            .map_err(|e| format!("confirming evaluation failed: {e}"))?;
        trace.evals_used += 1;
        assert!(trace.evals_used <= cfg.budget, "true-evaluation budget exceeded");
        samples.push(point.clone(), y).map_err(|e| e.to_string())?;
        Some(y)
    } else {
        None
    };
    trace.final_result = Some(FinalResult {
        point,
        surrogate_value,
        true_value,
    });
    trace.best_observed = best_observed(&samples);
    trace.final_surrogate = Some(surrogate.to_text());
    Ok(())
}

/// One refinement check: build the improvement distribution, run the
/// hypothesis test, and on refine (with at least two evaluations left, one
/// being reserved for the final confirmation) size, place, evaluate and
/// absorb an infill batch. Returns whether a refinement happened.
#[allow(clippy::too_many_arguments)]
fn run_check(
    problem: &Problem,
    cfg: &RunConfig,
    trace: &mut RunTrace,
    deltas: &[f64],
    stalled: bool,
    candidates: &[(crate::surrogate::SurrogateKind, crate::surrogate::KernelSpec)],
    samples: &mut SampleSet,
    surrogate: &mut TrainedSurrogate,
    error_model: &mut Option<ErrorModel>,
    swarm: &mut crate::pso::SwarmState,
    master: &mut ChaCha8Rng,
    q_prev_check: &mut Option<f64>,
) -> Result<bool, String> {
    let space = problem.space();
    let improvements = ImprovementDistribution::from_samples(deltas);
    let mut refined = false;
    match error_model.clone() {
        Some(em) => {
            let mut decision = amr_test(&em, &improvements, &cfg.amr);
            let q_now = decision.q_improve;
            let remaining = cfg.budget - trace.evals_used;
            if decision.refine && remaining >= 2 {
                let epsilon_target = desired_fidelity(
                    q_now,
                    q_prev_check.unwrap_or(q_now),
                    em.modal_error_at_full(),
                );
                decision.epsilon_target = Some(epsilon_target);
                // One evaluation stays reserved for the final confirmation;
                // of the rest, at most half goes into a single batch so
                // later checks can still correct a misled surrogate. Stall
                // batches are exploratory and cap harder: many small
                // refitted rounds probe further than one monolithic batch.
                let usable = if stalled {
                    (remaining - 1).div_ceil(2).min(16)
                } else {
                    (remaining - 1).div_ceil(2)
                };
                let gamma = match compute_batch_size(
                    em.fit(),
                    samples.len(),
                    epsilon_target,
                    usable,
                ) {
                    Ok(g) => g,
                    Err(PemfError::NonDecreasingError { .. }) => 1,
                    Err(e) => return Err(format!("batch sizing failed: {e}")),
                };
                // Small batches go entirely where the swarm searches (the
                // population range, clipped to the design space), correcting
                // a misleading surrogate on the spot. A batch large enough
                // to afford it spends half over the union of population and
                // samples instead, buying global model fidelity and an
                // escape route from deceptive basins. At a stall the swarm
                // has converged and confirmed the model locally, so the
                // whole batch goes to the union range.
                let mut pop_range =
                    update_sampling_range(space, swarm.positions(), &SampleSet::new())
                        .map_err(|e| e.to_string())?;
                if pop_range.is_degenerate() {
                    pop_range = SamplingRange::full(space);
                }
                let union_range = update_sampling_range(space, swarm.positions(), samples)
                    .map_err(|e| e.to_string())?;
                let gamma_pop = if gamma < 16 {
                    gamma
                } else if stalled {
                    0
                } else {
                    gamma.div_ceil(2)
                };
                let (mut points, mut acquisition_values) = if gamma_pop > 0 {
                    select_batch_with_values(samples, &pop_range, gamma_pop, master.random())
                        .map_err(|e| format!("batch selection failed: {e}"))?
                } else {
                    (Vec::new(), Vec::new())
                };
                if gamma > gamma_pop {
                    let (global_points, global_values) = select_batch_with_values(
                        samples,
                        &union_range,
                        gamma - gamma_pop,
                        master.random(),
                    )
                    .map_err(|e| format!("batch selection failed: {e}"))?;
                    // The two sub-batches were penalized independently;
                    // drop any global point that collides with a corrective
                    // one.
                    for (p, v) in global_points.into_iter().zip(global_values) {
                        let clear = points
                            .iter()
                            .all(|q| crate::linalg::euclidean(p.as_slice(), q) >= 1e-9);
                        if clear {
                            points.push(p);
                            acquisition_values.push(v);
                        }
                    }
                }
                let responses = problem
                    .eval_batch(&points)
                    .map_err(|e| format!("infill evaluation failed: {e}"))?;
                trace.evals_used += points.len();
                assert!(
                    trace.evals_used <= cfg.budget,
                    "true-evaluation budget exceeded"
                );
                for (p, y) in points.iter().zip(&responses) {
                    samples.push(p.clone(), *y).map_err(|e| e.to_string())?;
                }
                *surrogate = select_model(samples, candidates)
                    .map_err(|e| format!("model re-selection failed: {e}"))?;
                *error_model = refresh_error_model(samples, surrogate, master.random())?;
                swarm.recompute_bests(|x| {
                    surrogate.predict(x) + problem.constraint_penalty(x, cfg.penalty_weight)
                });
                trace.events.push(RefinementEvent {
                    iteration: swarm.iteration(),
                    batch_size: points.len(),
                    epsilon_target,
                    points,
                    acquisition_values,
                });
                refined = true;
            }
            trace.checks.push(AmrCheckRecord {
                iteration: swarm.iteration(),
                q_error: decision.q_error,
                q_improve: decision.q_improve,
                refine: decision.refine,
                epsilon_target: decision.epsilon_target,
                modal_error: em.modal_error_at_full(),
                vesd: Some((em.fit().a, em.fit().b, em.fit().vesd_type)),
            });
            *q_prev_check = Some(q_now);
        }
        None => {
            // The error estimate collapsed: the surrogate explains the data
            // to rounding noise, so refinement cannot help.
            let q_improve = if improvements.is_degenerate() {
                improvements.points()[0]
            } else {
                improvements.quantile(1.0 - cfg.amr.p_cr)
            };
            trace.checks.push(AmrCheckRecord {
                iteration: swarm.iteration(),
                q_error: 0.0,
                q_improve,
                refine: false,
                epsilon_target: None,
                modal_error: 0.0,
                vesd: None,
            });
            *q_prev_check = Some(q_improve);
        }
    }
    Ok(refined)
}

fn best_observed(samples: &SampleSet) -> Option<(Vec<f64>, f64)> {
    samples
        .responses()
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite responses"))
        .map(|(i, y)| (samples.points()[i].clone(), *y))
}

fn refresh_error_model(
    samples: &SampleSet,
    surrogate: &TrainedSurrogate,
    seed: u64,
) -> Result<Option<ErrorModel>, String> {
    match estimate_error_distribution(
        samples,
        |sub| surrogate.refit(sub),
        PEMF_LEVELS,
        PEMF_REPEATS,
        seed,
    ) {
        Ok(em) => Ok(Some(em)),
        Err(PemfError::DegenerateError { .. }) => Ok(None),
        Err(e) => Err(format!("error estimation failed: {e}")),
    }
}

fn push_iteration(
    trace: &mut RunTrace,
    swarm: &crate::pso::SwarmState,
    error_model: &Option<ErrorModel>,
    refined: bool,
) {
    trace.iterations.push(IterationRecord {
        iteration: swarm.iteration(),
        global_best: swarm.global_best().1,
        modal_error: error_model
            .as_ref()
            .map_or(0.0, |em| em.modal_error_at_full()),
        refined,
        samples_used: trace.evals_used,
    });
}
