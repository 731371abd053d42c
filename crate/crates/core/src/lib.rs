//! Surrogate-based global optimization with adaptive model refinement and
//! penalized batch Bayesian sampling (AMR-PBS).
//!
//! The crate wires together five pieces:
//!
//! * [`problem`] — design spaces, objectives (analytic or external subprocess
//!   evaluators), constraint penalization, and Latin hypercube sampling.
//! * [`surrogate`] — RBF and Kriging surrogates with cross-validated model
//!   selection, prediction, posterior variance, and posterior-mean gradients.
//! * [`pemf`] — resampling-based estimation of the surrogate error
//!   distribution, the error-vs-sample-density regression, and its inversion
//!   into infill batch sizes.
//! * [`amr`] — the refinement hypothesis test comparing an error quantile
//!   against a fitness-improvement quantile, plus the desired-fidelity update.
//! * [`batch`] — greedy batch selection maximizing expected improvement with
//!   local penalization.
//!
//! [`optimizer::run_amr_pbs`] runs the full outer loop (PSO over the surrogate
//! with periodic refinement events); [`benchmarks`] provides analytic test
//! functions, a sequential-EI baseline, and the comparison harnesses.

pub mod amr;
pub mod batch;
pub mod benchmarks;
pub mod linalg;
pub mod optimizer;
pub mod pemf;
pub mod problem;
pub mod pso;
pub mod stats;
pub mod surrogate;
pub mod trace;

pub use amr::{AmrConfig, ImprovementDistribution, RefinementDecision};
pub use batch::select_batch;
pub use optimizer::{run_amr_pbs, RunConfig, RunError};
pub use pemf::{ErrorModel, LognormalError, VesdFit, VesdType};
pub use problem::{DesignSpace, Problem, SampleSet, SamplingRange};
pub use surrogate::{KernelFamily, KernelSpec, SurrogateKind, TrainedSurrogate};
pub use trace::RunTrace;
