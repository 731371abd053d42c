//! Radial-basis-function interpolation with a constant tail.
//!
//! The constant term makes the interpolant reproduce constant data exactly
//! and keeps the multiquadric/cubic systems (conditionally positive definite
//! kernels) solvable.

use super::{
    closest_pair, data_ranges, KernelFamily, KernelSpec, LengthScale, SurrogateError,
    SurrogateKind, TrainedSurrogate,
};
use crate::linalg::Lu;
use crate::problem::SampleSet;

fn basis(family: KernelFamily, r: f64) -> f64 {
    match family {
        KernelFamily::Gaussian => (-r * r).exp(),
        KernelFamily::Multiquadric => (1.0 + r * r).sqrt(),
        KernelFamily::Cubic => r * r * r,
    }
}

fn scaled_distance(a: &[f64], b: &[f64], scales: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(scales)
        .map(|((x, y), s)| ((x - y) / s).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Resolve the kernel's length scales against the data. `Auto` normalizes
/// each dimension by its data range and then scales by the mean pairwise
/// distance, so typical scaled distances land near 1.
pub(super) fn resolve_scales(spec: &KernelSpec, data: &SampleSet) -> Vec<f64> {
    let dims = data.dims();
    match &spec.length_scale {
        LengthScale::Iso(l) => vec![*l; dims],
        LengthScale::PerDim(ls) => ls.clone(),
        LengthScale::Auto => {
            let ranges = data_ranges(data);
            let pts = data.points();
            let mut sum = 0.0;
            let mut count = 0usize;
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    sum += scaled_distance(&pts[i], &pts[j], &ranges);
                    count += 1;
                }
            }
            let mean = if count > 0 { sum / count as f64 } else { 1.0 };
            // Half the mean pairwise distance: broad enough to connect
            // neighbours, local enough to keep the interpolant from ringing
            // across the domain.
            let c = if mean > 1e-12 { 0.5 * mean } else { 1.0 };
            ranges.into_iter().map(|r| c * r).collect()
        }
    }
}

/// Solve the augmented interpolation system
/// `[Φ + ηI, 1; 1ᵀ, 0] [w; c] = [y; 0]`.
/// The last weight is the constant term.
pub(super) fn train_rbf(
    spec: &KernelSpec,
    data: &SampleSet,
) -> Result<TrainedSurrogate, SurrogateError> {
    let n = data.len();
    let m = n + 1;
    let scales = resolve_scales(spec, data);
    let pts = data.points();
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..=i {
            let v = basis(spec.family, scaled_distance(&pts[i], &pts[j], &scales));
            a[i * m + j] = v;
            a[j * m + i] = v;
        }
        a[i * m + i] += spec.regularization;
        a[i * m + n] = 1.0;
        a[n * m + i] = 1.0;
    }
    let lu = Lu::factor(&a, m, 1e-13).map_err(|_| {
        let (i, j, dist) = closest_pair(data, &scales);
        SurrogateError::IllConditioned {
            i,
            j,
            dist,
            nugget: spec.regularization,
        }
    })?;
    let mut rhs = data.responses().to_vec();
    rhs.push(0.0);
    let weights = lu.solve(&rhs);
    Ok(TrainedSurrogate::new(
        SurrogateKind::Rbf,
        spec.family,
        scales,
        spec.regularization,
        data.clone(),
        weights,
        None,
    ))
}

pub(super) fn predict(model: &TrainedSurrogate, x: &[f64]) -> f64 {
    let n = model.training.len();
    model
        .training
        .points()
        .iter()
        .zip(&model.weights[..n])
        .map(|(p, w)| w * basis(model.family, scaled_distance(x, p, &model.scales)))
        .sum::<f64>()
        + model.weights[n]
}
