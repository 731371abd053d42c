//! Ordinary-kriging-style Gaussian process: constant trend, squared
//! exponential correlation, nugget on the covariance diagonal.
//!
//! Covariance: K = σ²(R + η I) with R_ij = exp(-½ Σ_d ((x_i-x_j)_d/ℓ_d)²);
//! the nugget is relative to the process variance, so its conditioning
//! effect does not depend on the response scale.
//! For a fixed correlation matrix the trend μ and process variance σ² have
//! closed-form generalized-least-squares estimates, so the length scale is
//! the only parameter searched; it is chosen on a log-spaced grid of
//! multipliers of the per-dimension data range by maximizing the concentrated
//! log marginal likelihood.

use super::{
    closest_pair, data_ranges, KernelSpec, KrigingParts, LengthScale, SurrogateError,
    SurrogateKind, TrainedSurrogate,
};
use crate::linalg::Cholesky;
use crate::problem::SampleSet;

/// Grid of relative length scales: 25 log-spaced multipliers of the
/// per-dimension data range spanning [1e-2, 1e+1].
const GRID_POINTS: usize = 25;
const GRID_LO: f64 = 1e-2;
const GRID_HI: f64 = 1e+1;

/// Relative jitter floor keeping the correlation matrix factorizable even
/// with a zero nugget.
const JITTER_FLOOR: f64 = 1e-12;

fn correlation(a: &[f64], b: &[f64], scales: &[f64]) -> f64 {
    let q: f64 = a
        .iter()
        .zip(b)
        .zip(scales)
        .map(|((x, y), s)| ((x - y) / s).powi(2))
        .sum();
    (-0.5 * q).exp()
}

struct GlsFit {
    trend_mean: f64,
    process_variance: f64,
    log_likelihood: f64,
}

/// Factor R + δI and profile out μ and σ².
fn gls_fit(data: &SampleSet, scales: &[f64], delta: f64) -> Option<GlsFit> {
    let n = data.len();
    let pts = data.points();
    let y = data.responses();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = correlation(&pts[i], &pts[j], scales);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
        a[i * n + i] += delta;
    }
    let chol = Cholesky::factor(&a, n).ok()?;
    let ones = vec![1.0; n];
    let ai_y = chol.solve(y);
    let ai_1 = chol.solve(&ones);
    let denom: f64 = ai_1.iter().sum();
    if denom <= 0.0 || !denom.is_finite() {
        return None;
    }
    let mu: f64 = ai_y.iter().sum::<f64>() / denom;
    let mut sigma2 = 0.0;
    for i in 0..n {
        sigma2 += (y[i] - mu) * (ai_y[i] - mu * ai_1[i]);
    }
    sigma2 = (sigma2 / n as f64).max(1e-300);
    let log_likelihood = -0.5
        * (n as f64 * sigma2.ln()
            + chol.log_det()
            + n as f64 * (1.0 + (2.0 * std::f64::consts::PI).ln()));
    if !log_likelihood.is_finite() {
        return None;
    }
    Some(GlsFit {
        trend_mean: mu,
        process_variance: sigma2,
        log_likelihood,
    })
}

fn candidate_scale_grid(data: &SampleSet) -> Vec<Vec<f64>> {
    let ranges = data_ranges(data);
    (0..GRID_POINTS)
        .map(|i| {
            let t = i as f64 / (GRID_POINTS - 1) as f64;
            let c = GRID_LO * (GRID_HI / GRID_LO).powf(t);
            ranges.iter().map(|r| c * r).collect()
        })
        .collect()
}

pub(super) fn train_kriging(
    spec: &KernelSpec,
    data: &SampleSet,
) -> Result<TrainedSurrogate, SurrogateError> {
    let candidates = match &spec.length_scale {
        LengthScale::Auto => candidate_scale_grid(data),
        LengthScale::Iso(l) => vec![vec![*l; data.dims()]],
        LengthScale::PerDim(ls) => vec![ls.clone()],
    };

    let y = data.responses();
    let delta = spec.regularization.max(JITTER_FLOOR);

    let mut best: Option<(Vec<f64>, GlsFit)> = None;
    for scales in candidates {
        if let Some(fit) = gls_fit(data, &scales, delta) {
            let better = match &best {
                None => true,
                Some((_, b)) => fit.log_likelihood > b.log_likelihood,
            };
            if better {
                best = Some((scales, fit));
            }
        }
    }
    let (scales, fit) = best.ok_or_else(|| {
        let scales = data_ranges(data);
        let (i, j, dist) = closest_pair(data, &scales);
        SurrogateError::IllConditioned {
            i,
            j,
            dist,
            nugget: spec.regularization,
        }
    })?;

    let sigma2 = fit.process_variance;
    let nugget_abs = sigma2 * delta;
    let parts = build_parts(data, &scales, fit.trend_mean, sigma2, nugget_abs)?;
    let centered: Vec<f64> = y.iter().map(|v| v - fit.trend_mean).collect();
    let weights = parts.chol.solve(&centered);

    Ok(TrainedSurrogate::new(
        SurrogateKind::Kriging,
        spec.family,
        scales,
        spec.regularization,
        data.clone(),
        weights,
        Some(parts),
    ))
}

/// Factor K = σ² R + η I.
fn build_parts(
    data: &SampleSet,
    scales: &[f64],
    trend_mean: f64,
    process_variance: f64,
    nugget_abs: f64,
) -> Result<KrigingParts, SurrogateError> {
    let n = data.len();
    let pts = data.points();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = process_variance * correlation(&pts[i], &pts[j], scales);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
        k[i * n + i] += nugget_abs;
    }
    let chol = Cholesky::factor(&k, n).map_err(|_| {
        let (i, j, dist) = closest_pair(data, scales);
        SurrogateError::IllConditioned {
            i,
            j,
            dist,
            nugget: nugget_abs,
        }
    })?;
    Ok(KrigingParts {
        trend_mean,
        process_variance,
        chol,
    })
}

/// Reconstruct the covariance factorization from checkpointed parameters.
pub(super) fn rebuild_parts(
    data: &SampleSet,
    scales: &[f64],
    regularization: f64,
    trend_mean: f64,
    process_variance: f64,
) -> Result<KrigingParts, SurrogateError> {
    let nugget_abs = process_variance * regularization.max(JITTER_FLOOR);
    build_parts(data, scales, trend_mean, process_variance, nugget_abs)
}

pub(super) fn predict(model: &TrainedSurrogate, x: &[f64]) -> f64 {
    let parts = model.kriging_parts().expect("kriging parts");
    let mut acc = 0.0;
    for (p, w) in model.training.points().iter().zip(&model.weights) {
        acc += w * correlation(x, p, &model.scales);
    }
    parts.trend_mean + parts.process_variance * acc
}

pub(super) fn posterior_variance(
    model: &TrainedSurrogate,
    parts: &KrigingParts,
    x: &[f64],
) -> f64 {
    let pts = model.training.points();
    let k: Vec<f64> = pts
        .iter()
        .map(|p| parts.process_variance * correlation(x, p, &model.scales))
        .collect();
    let ki_k = parts.chol.solve(&k);
    let reduction: f64 = k.iter().zip(&ki_k).map(|(a, b)| a * b).sum();
    (parts.process_variance - reduction).max(0.0)
}

pub(super) fn mean_gradient(model: &TrainedSurrogate, x: &[f64]) -> Vec<f64> {
    let parts = model.kriging_parts().expect("kriging parts");
    let dims = x.len();
    let mut grad = vec![0.0; dims];
    for (p, w) in model.training.points().iter().zip(&model.weights) {
        let c = parts.process_variance * correlation(x, p, &model.scales);
        for d in 0..dims {
            grad[d] += w * c * (-(x[d] - p[d]) / (model.scales[d] * model.scales[d]));
        }
    }
    grad
}
