//! Small dense solvers for the surrogate kernel systems.
//!
//! Sample counts stay in the low hundreds, so plain row-major factorizations
//! are all that is needed.

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Vec<f64>,
    n: usize,
}

impl Cholesky {
    /// Factor a row-major symmetric matrix. Returns the row index at which a
    /// non-positive pivot was encountered if the matrix is not numerically
    /// positive definite.
    pub fn factor(a: &[f64], n: usize) -> Result<Self, usize> {
        assert_eq!(a.len(), n * n, "matrix size mismatch");
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(i);
                    }
                    l[i * n + j] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Self { l, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = b.to_vec();
        // Forward: L y = b
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.l[i * n + k] * x[k];
            }
            x[i] /= self.l[i * n + i];
        }
        // Backward: L^T x = y
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.l[k * n + i] * x[k];
            }
            x[i] /= self.l[i * n + i];
        }
        x
    }

    /// ln det A = 2 Σ ln L_ii.
    pub fn log_det(&self) -> f64 {
        (0..self.n)
            .map(|i| self.l[i * self.n + i].ln())
            .sum::<f64>()
            * 2.0
    }
}

/// LU factorization with partial pivoting, for kernel matrices that are
/// invertible but not positive definite (multiquadric, cubic).
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Vec<f64>,
    perm: Vec<usize>,
    n: usize,
}

impl Lu {
    /// Factor a row-major matrix. Returns the elimination step at which the
    /// pivot fell below `pivot_tol` in magnitude.
    pub fn factor(a: &[f64], n: usize, pivot_tol: f64) -> Result<Self, usize> {
        assert_eq!(a.len(), n * n, "matrix size mismatch");
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_val = lu[col * n + col].abs();
            for r in (col + 1)..n {
                let v = lu[r * n + col].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = r;
                }
            }
            if pivot_val <= pivot_tol || !pivot_val.is_finite() {
                return Err(col);
            }
            if pivot_row != col {
                for c in 0..n {
                    lu.swap(col * n + c, pivot_row * n + c);
                }
                perm.swap(col, pivot_row);
            }
            let p = lu[col * n + col];
            for r in (col + 1)..n {
                let f = lu[r * n + col] / p;
                lu[r * n + col] = f;
                for c in (col + 1)..n {
                    lu[r * n + c] -= f * lu[col * n + c];
                }
            }
        }
        Ok(Self { lu, perm, n })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[i * n + k] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.lu[i * n + k] * x[k];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        // A = [[4,2],[2,3]], b = [2, 5] -> x = [-0.5, 2]
        let a = [4.0, 2.0, 2.0, 3.0];
        let ch = Cholesky::factor(&a, 2).unwrap();
        let x = ch.solve(&[2.0, 5.0]);
        assert!((x[0] + 0.5).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
        assert!((ch.log_det() - 8.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = [1.0, 2.0, 2.0, 1.0]; // eigenvalues 3, -1
        assert_eq!(Cholesky::factor(&a, 2).unwrap_err(), 1);
    }

    #[test]
    fn lu_solves_indefinite_system() {
        // Indefinite but invertible.
        let a = [0.0, 2.0, 1.0, 3.0, 0.0, 4.0, 0.0, 1.0, 0.0];
        let lu = Lu::factor(&a, 3, 1e-14).unwrap();
        let b = [8.0, 23.0, 2.0];
        let x = lu.solve(&b);
        // Residual check.
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-10, "row {i}: {r} vs {}", b[i]);
        }
    }

    #[test]
    fn lu_reports_singular_column() {
        let a = [1.0, 2.0, 2.0, 4.0]; // rank 1
        assert!(Lu::factor(&a, 2, 1e-12).is_err());
    }

    #[test]
    fn cholesky_random_spd_roundtrip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 4, 9] {
            // Build SPD as M^T M + I.
            let m: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>() - 0.5).collect();
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = if i == j { 1.0 } else { 0.0 };
                    for k in 0..n {
                        s += m[k * n + i] * m[k * n + j];
                    }
                    a[i * n + j] = s;
                }
            }
            let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let x = Cholesky::factor(&a, n).unwrap().solve(&b);
            for i in 0..n {
                let r: f64 = (0..n).map(|j| a[i * n + j] * x[j]).sum();
                assert!((r - b[i]).abs() < 1e-9);
            }
        }
    }
}
