//! The adaptive-refinement metric: per-particle relative fitness
//! improvements, their kernel density estimate, and the quantile hypothesis
//! test deciding whether the surrogate must be refined.

use crate::pemf::{ErrorModel, LognormalError};
use crate::stats::norm_cdf;

/// Fitness values at or below this magnitude are treated as zero in the
/// relative-improvement formula.
const ZERO_FITNESS: f64 = 1e-12;

/// |(f_now − f_prev)/f_now| when f_now ≠ 0, else |f_now − f_prev|.
pub fn relative_improvement(f_now: f64, f_prev: f64) -> f64 {
    if f_now.abs() < ZERO_FITNESS {
        (f_now - f_prev).abs()
    } else {
        ((f_now - f_prev) / f_now).abs()
    }
}

/// Per-particle improvements recorded at one check, index = particle
/// identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementRecord {
    pub iteration: usize,
    pub deltas: Vec<f64>,
}

/// Gaussian KDE over pooled improvement values, with Silverman bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementDistribution {
    points: Vec<f64>,
    bandwidth: f64,
    degenerate: bool,
}

impl ImprovementDistribution {
    pub fn from_samples(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "KDE needs at least one value");
        let n = values.len() as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite improvements"));
        let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
        // A pool whose spread is at rounding-noise level carries no shape.
        let degenerate = max - min <= 1e-12 * max.abs().max(min.abs()).max(1.0);
        if degenerate {
            return Self {
                points: values.to_vec(),
                bandwidth: 1e-12,
                degenerate,
            };
        }
        let mean = values.iter().sum::<f64>() / n;
        let std =
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let q = |p: f64| -> f64 {
            let idx = (p * (sorted.len() - 1) as f64).round() as usize;
            sorted[idx]
        };
        let iqr = q(0.75) - q(0.25);
        let spread = if iqr > 0.0 {
            std.min(iqr / 1.34)
        } else {
            std
        };
        Self {
            points: values.to_vec(),
            bandwidth: 0.9 * spread * n.powf(-0.2),
            degenerate,
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// All-identical pools carry no spread; the quantile collapses to the
    /// shared value.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Smoothed CDF: mean of Φ((x − x_i)/h).
    pub fn cdf(&self, x: f64) -> f64 {
        self.points
            .iter()
            .map(|xi| norm_cdf((x - xi) / self.bandwidth))
            .sum::<f64>()
            / self.points.len() as f64
    }

    /// inf{x : p ≤ CDF(x)} by bisection to 1e-10 of the bracketing range.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!(p > 0.0 && p < 1.0, "quantile level must lie in (0,1)");
        if self.degenerate {
            return self.points[0];
        }
        let min = self.points.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = self
            .points
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut lo = min - 10.0 * self.bandwidth;
        let mut hi = max + 10.0 * self.bandwidth;
        while self.cdf(lo) > p {
            lo -= 10.0 * self.bandwidth;
        }
        while self.cdf(hi) < p {
            hi += 10.0 * self.bandwidth;
        }
        let tol = (hi - lo) * 1e-10;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break; // float resolution reached
            }
            if self.cdf(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Configuration of the refinement test.
#[derive(Debug, Clone, PartialEq)]
pub struct AmrConfig {
    /// Critical probability (indicator of conservativeness), in (0,1).
    pub p_cr: f64,
    /// Check period in iterations.
    pub tau: usize,
    /// Optional acceptable error level; when set, the critical probability
    /// is derived from the current error distribution at each check.
    pub eta: Option<f64>,
}

impl AmrConfig {
    pub fn new(p_cr: f64, tau: usize) -> Self {
        Self {
            p_cr,
            tau,
            eta: None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.p_cr > 0.0 && self.p_cr < 1.0) {
            return Err(format!(
                "p_cr must lie strictly inside (0,1), got {}",
                self.p_cr
            ));
        }
        if self.tau < 1 {
            return Err("tau must be at least 1".into());
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0) {
                return Err(format!("eta must be positive, got {eta}"));
            }
        }
        Ok(())
    }
}

/// Outcome of one refinement check.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementDecision {
    pub refine: bool,
    /// 𝒬 of the error distribution at p_cr.
    pub q_error: f64,
    /// 𝒬 of the improvement distribution at 1 − p_cr.
    pub q_improve: f64,
    /// Desired fidelity ε*, filled in by the caller once computed.
    pub epsilon_target: Option<f64>,
}

/// Probability that the model error is below `eta` under the current error
/// distribution; a user-facing way to choose p_cr.
pub fn critical_probability_for_eta(dist: &LognormalError, eta: f64) -> f64 {
    dist.cdf(eta).clamp(1e-6, 1.0 - 1e-6)
}

/// The refinement hypothesis test: refine exactly when the error quantile at
/// p_cr is at least the improvement quantile at 1 − p_cr.
pub fn amr_test(
    error_model: &ErrorModel,
    improvements: &ImprovementDistribution,
    cfg: &AmrConfig,
) -> RefinementDecision {
    let error_dist = error_model.full_size_distribution();
    let p_cr = match cfg.eta {
        Some(eta) => critical_probability_for_eta(&error_dist, eta),
        None => cfg.p_cr,
    };
    let q_error = error_dist.quantile(p_cr);
    let q_improve = if improvements.is_degenerate() {
        improvements.points()[0]
    } else {
        improvements.quantile(1.0 - p_cr)
    };
    // A stalled search (all improvements zero) with residual model error
    // always refines.
    let refine = q_error >= q_improve;
    RefinementDecision {
        refine,
        q_error,
        q_improve,
        epsilon_target: None,
    }
}

/// Desired fidelity for the next refinement: the error target tightens in
/// proportion to how much the improvement quantile shifted between checks,
/// ε* = min(q_prev/q_now, q_now/q_prev)·ε_current, with the multiplier
/// clamped to [0.25, 0.95] so the target always tightens and never
/// collapses. Collapsed improvements (q_now ≈ 0) tighten maximally.
pub fn desired_fidelity(q_now: f64, q_prev: f64, epsilon_current: f64) -> f64 {
    assert!(epsilon_current > 0.0, "current error must be positive");
    let multiplier = if q_now <= 1e-12 || q_prev <= 1e-12 {
        0.25
    } else {
        (q_prev / q_now).min(q_now / q_prev).clamp(0.25, 0.95)
    };
    multiplier * epsilon_current
}
