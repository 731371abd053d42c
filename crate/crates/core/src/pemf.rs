//! Estimation of the surrogate error distribution from resampled sub-model
//! training, the variation-of-error-with-sample-density (VESD) regression,
//! and its inversion into infill batch sizes.

use rand::seq::index::sample as index_sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::problem::SampleSet;
use crate::stats::norm_icdf;
use crate::surrogate::{Predictor, SurrogateError};

/// Held-out errors below this are indistinguishable from rounding noise and
/// count as zero.
const ZERO_ERROR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PemfError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "degenerate error distribution: level with {size} training samples \
         produced fewer than 3 positive held-out errors"
    )]
    DegenerateError { size: usize },
    #[error("error regression is non-decreasing (b = {b}); refinement cannot help")]
    NonDecreasingError { b: f64 },
    #[error("sub-model training failed: {0}")]
    Training(#[from] SurrogateError),
}

/// Log-normal error distribution ℙ(μ, σ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalError {
    pub mu: f64,
    pub sigma: f64,
}

impl LognormalError {
    /// Modal value exp(μ − σ²).
    pub fn modal(&self) -> f64 {
        (self.mu - self.sigma * self.sigma).exp()
    }

    /// p-quantile exp(μ + σ Φ⁻¹(p)).
    pub fn quantile(&self, p: f64) -> f64 {
        (self.mu + self.sigma * norm_icdf(p)).exp()
    }

    /// CDF Φ((ln x − μ)/σ).
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            crate::stats::norm_cdf((x.ln() - self.mu) / self.sigma)
        }
    }
}

/// Modal error of a log-normal distribution.
pub fn modal_error(dist: &LognormalError) -> f64 {
    dist.modal()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VesdType {
    /// ε(n) = a·exp(b·n)
    Type1,
    /// ε(n) = a·n^b
    Type2,
}

impl std::fmt::Display for VesdType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VesdType::Type1 => write!(f, "type1"),
            VesdType::Type2 => write!(f, "type2"),
        }
    }
}

/// Fitted error-vs-sample-count regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesdFit {
    pub vesd_type: VesdType,
    pub a: f64,
    pub b: f64,
    /// Sum of squared log-residuals of the kept fit.
    pub residual: f64,
}

impl VesdFit {
    pub fn eval(&self, n: f64) -> f64 {
        match self.vesd_type {
            VesdType::Type1 => self.a * (self.b * n).exp(),
            VesdType::Type2 => self.a * n.powf(self.b),
        }
    }
}

/// Error distribution per training size plus the regression through their
/// modes.
#[derive(Debug, Clone)]
pub struct ErrorModel {
    per_size_errors: Vec<(usize, LognormalError)>,
    fit: VesdFit,
    modal_error_at_full: f64,
    full_size: usize,
}

impl ErrorModel {
    /// Assemble an error model from already-known parts, e.g. when replaying
    /// a trace. Validates the structural invariants.
    pub fn from_parts(
        per_size_errors: Vec<(usize, LognormalError)>,
        fit: VesdFit,
        full_size: usize,
    ) -> Result<Self, PemfError> {
        if per_size_errors.is_empty() {
            return Err(PemfError::InvalidArgument(
                "need at least one per-size error distribution".into(),
            ));
        }
        if !per_size_errors.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(PemfError::InvalidArgument(
                "per-size errors must be sorted by strictly increasing size".into(),
            ));
        }
        Ok(Self {
            modal_error_at_full: fit.eval(full_size as f64),
            per_size_errors,
            fit,
            full_size,
        })
    }

    pub fn per_size_errors(&self) -> &[(usize, LognormalError)] {
        &self.per_size_errors
    }

    pub fn fit(&self) -> &VesdFit {
        &self.fit
    }

    pub fn modal_error_at_full(&self) -> f64 {
        self.modal_error_at_full
    }

    pub fn full_size(&self) -> usize {
        self.full_size
    }

    /// The error distribution extrapolated to the full sample size: spread
    /// taken from the highest-fidelity level, mode from the regression.
    pub fn full_size_distribution(&self) -> LognormalError {
        let sigma = self
            .per_size_errors
            .last()
            .map(|(_, d)| d.sigma)
            .expect("at least one level");
        LognormalError {
            mu: self.modal_error_at_full.ln() + sigma * sigma,
            sigma,
        }
    }
}

/// Train `repeats` sub-models per training size, pool the relative held-out
/// errors per size, fit a log-normal to each pool, regress the modes against
/// the size (both VESD types, lower log-residual kept), and extrapolate the
/// modal error to the full sample count.
///
/// Deterministic given `seed`: the subsets are drawn up front and sub-model
/// trainings only fan out afterwards.
pub fn estimate_error_distribution<F, M>(
    data: &SampleSet,
    trainer: F,
    levels: usize,
    repeats: usize,
    seed: u64,
) -> Result<ErrorModel, PemfError>
where
    F: Fn(&SampleSet) -> Result<M, SurrogateError> + Sync,
    M: Predictor + Send,
{
    let n_full = data.len();
    let dims = data.dims();
    if levels < 3 || repeats < 3 {
        return Err(PemfError::InvalidArgument(format!(
            "need at least 3 levels and 3 repeats, got {levels} and {repeats}"
        )));
    }
    if n_full < levels + dims + 2 {
        return Err(PemfError::InvalidArgument(format!(
            "need at least levels + dims + 2 = {} samples, got {n_full}",
            levels + dims + 2
        )));
    }

    // Training sizes from 50% of the data up to N-3, deduplicated.
    let mut sizes: Vec<usize> = Vec::new();
    for k in 1..=levels {
        let frac = 0.5 + 0.5 * (k - 1) as f64 / levels as f64;
        let nk = ((n_full as f64 * frac).round() as usize)
            .min(n_full - 3)
            .max(dims + 1);
        if sizes.last() != Some(&nk) {
            sizes.push(nk);
        }
    }
    if sizes.len() < 2 {
        return Err(PemfError::InvalidArgument(format!(
            "only {} distinct training sizes available from {n_full} samples",
            sizes.len()
        )));
    }

    // Draw every subset first so the parallel trainings cannot perturb the
    // random stream.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tasks: Vec<(usize, Vec<usize>)> = Vec::with_capacity(sizes.len() * repeats);
    for &nk in &sizes {
        for _ in 0..repeats {
            let chosen = index_sample(&mut rng, n_full, nk).into_vec();
            tasks.push((nk, chosen));
        }
    }

    let results: Vec<Result<Vec<f64>, SurrogateError>> = tasks
        .par_iter()
        .map(|(_, chosen)| {
            let train_set = data.subset(chosen);
            let model = trainer(&train_set)?;
            let mut errs = Vec::with_capacity(n_full - chosen.len());
            for i in 0..n_full {
                if chosen.contains(&i) {
                    continue;
                }
                let y = data.responses()[i];
                let pred = model.predict(&data.points()[i]);
                errs.push((pred - y).abs() / y.abs().max(1e-8));
            }
            Ok(errs)
        })
        .collect();

    let mut per_size_errors = Vec::with_capacity(sizes.len());
    for (level_idx, &nk) in sizes.iter().enumerate() {
        let mut pool = Vec::new();
        let mut trained = 0usize;
        let mut last_err: Option<&SurrogateError> = None;
        for r in 0..repeats {
            match &results[level_idx * repeats + r] {
                Ok(errs) => {
                    trained += 1;
                    pool.extend_from_slice(errs);
                }
                Err(e) => last_err = Some(e),
            }
        }
        if trained == 0 {
            return Err(PemfError::InvalidArgument(format!(
                "every sub-model at size {nk} failed training: {}",
                last_err.map_or_else(|| "unknown".into(), |e| e.to_string())
            )));
        }
        let dist = fit_lognormal(&pool).ok_or(PemfError::DegenerateError { size: nk })?;
        per_size_errors.push((nk, dist));
    }

    let fit = fit_vesd(&per_size_errors);
    let modal_error_at_full = fit.eval(n_full as f64);
    Ok(ErrorModel {
        per_size_errors,
        fit,
        modal_error_at_full,
        full_size: n_full,
    })
}

/// Log-moment matching on the positive errors; `None` when fewer than 3
/// positive errors remain.
fn fit_lognormal(errors: &[f64]) -> Option<LognormalError> {
    let logs: Vec<f64> = errors
        .iter()
        .filter(|e| **e > ZERO_ERROR)
        .map(|e| e.ln())
        .collect();
    if logs.len() < 3 {
        return None;
    }
    let n = logs.len() as f64;
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / n;
    Some(LognormalError {
        mu,
        sigma: var.sqrt().max(1e-12),
    })
}

/// Least squares on (n, ln ε_mod) for both VESD forms; the lower-residual
/// fit wins, type 1 on ties.
fn fit_vesd(levels: &[(usize, LognormalError)]) -> VesdFit {
    let xs_t1: Vec<f64> = levels.iter().map(|(n, _)| *n as f64).collect();
    let xs_t2: Vec<f64> = levels.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = levels.iter().map(|(_, d)| d.modal().ln()).collect();
    let (a1, b1, r1) = linear_fit(&xs_t1, &ys);
    let (a2, b2, r2) = linear_fit(&xs_t2, &ys);
    if r1 <= r2 {
        VesdFit {
            vesd_type: VesdType::Type1,
            a: a1.exp(),
            b: b1,
            residual: r1,
        }
    } else {
        VesdFit {
            vesd_type: VesdType::Type2,
            a: a2.exp(),
            b: b2,
            residual: r2,
        }
    }
}

/// Ordinary least squares y = c + b x; returns (c, b, ssr).
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c = my - b * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (c + b * x)).powi(2))
        .sum();
    (c, b, ssr)
}

/// Invert the VESD regression: the batch size needed to bring the modal
/// error down to `epsilon_target`, clamped to [1, budget_remaining].
pub fn compute_batch_size(
    fit: &VesdFit,
    n_current: usize,
    epsilon_target: f64,
    budget_remaining: usize,
) -> Result<usize, PemfError> {
    if !(epsilon_target > 0.0) {
        return Err(PemfError::InvalidArgument(format!(
            "target error must be positive, got {epsilon_target}"
        )));
    }
    if budget_remaining == 0 {
        return Err(PemfError::InvalidArgument(
            "budget_remaining must be at least 1".into(),
        ));
    }
    if fit.b >= 0.0 {
        return Err(PemfError::NonDecreasingError { b: fit.b });
    }
    let ratio = (epsilon_target.ln() - fit.a.ln()) / fit.b;
    let n_star = match fit.vesd_type {
        VesdType::Type1 => ratio,
        VesdType::Type2 => ratio.exp(),
    };
    // Ceil with a hair of slack so exact solutions do not round up.
    let target_total = (n_star - 1e-9).ceil();
    let raw = target_total - n_current as f64;
    let clamped = if raw < 1.0 {
        1
    } else if raw >= budget_remaining as f64 {
        budget_remaining
    } else {
        raw as usize
    };
    Ok(clamped)
}
