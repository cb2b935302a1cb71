//! Small dense linear algebra: Cholesky solves, symmetric eigendecomposition,
//! and covariance estimation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    factor: Vec<f64>,
}

impl Cholesky {
    /// Factor a symmetric positive definite matrix given as a row-major square matrix.
    pub fn new(a: &Matrix) -> Result<Self> {
        let d = a.rows();
        if a.cols() != d {
            return Err(Error::Dimension {
                what: "square matrix",
                expected: d,
                actual: a.cols(),
            });
        }
        let mut l = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let mut sum = a.get(i, j);
                for k in 0..j {
                    sum -= l[i * d + k] * l[j * d + k];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(Error::Numeric(alloc::format!(
                            "matrix is not positive definite (pivot {} at index {})",
                            sum,
                            i
                        )));
                    }
                    l[i * d + j] = math::sqrt(sum);
                } else {
                    l[i * d + j] = sum / l[j * d + j];
                }
            }
        }
        Ok(Cholesky { dim: d, factor: l })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Natural log of the determinant of the factored matrix.
    pub fn log_det(&self) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for i in 0..d {
            s += math::ln(self.factor[i * d + i]);
        }
        2.0 * s
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim;
        if b.len() != d {
            return Err(Error::Dimension {
                what: "rhs length",
                expected: d,
                actual: b.len(),
            });
        }
        let l = &self.factor;
        let mut y = vec![0.0; d];
        for i in 0..d {
            let mut s = b[i];
            for k in 0..i {
                s -= l[i * d + k] * y[k];
            }
            y[i] = s / l[i * d + i];
        }
        let mut x = vec![0.0; d];
        for i in (0..d).rev() {
            let mut s = y[i];
            for k in (i + 1)..d {
                s -= l[k * d + i] * x[k];
            }
            x[i] = s / l[i * d + i];
        }
        Ok(x)
    }

    /// Quadratic form v^T A^{-1} v without forming the inverse.
    pub fn quad_form_inv(&self, v: &[f64]) -> Result<f64> {
        let d = self.dim;
        if v.len() != d {
            return Err(Error::Dimension {
                what: "vector length",
                expected: d,
                actual: v.len(),
            });
        }
        let l = &self.factor;
        let mut y = vec![0.0; d];
        for i in 0..d {
            let mut s = v[i];
            for k in 0..i {
                s -= l[i * d + k] * y[k];
            }
            y[i] = s / l[i * d + i];
        }
        Ok(y.iter().map(|t| t * t).sum())
    }
}

/// Eigendecomposition of a symmetric matrix via the cyclic Jacobi method.
///
/// Returns eigenvalues in descending order with matching eigenvectors as
/// columns of the returned matrix.
pub fn sym_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let d = a.rows();
    if a.cols() != d {
        return Err(Error::Dimension {
            what: "square matrix",
            expected: d,
            actual: a.cols(),
        });
    }
    let mut m = a.clone();
    let mut v = Matrix::zeros(d, d);
    for i in 0..d {
        v.set(i, i, 1.0);
    }
    if d <= 1 {
        let vals = if d == 1 { vec![m.get(0, 0)] } else { vec![] };
        return Ok((vals, v));
    }
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                off += m.get(i, j) * m.get(i, j);
            }
        }
        let scale: f64 = (0..d).map(|i| m.get(i, i).abs()).sum::<f64>().max(1e-300);
        if math::sqrt(off) <= 1e-14 * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + math::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..d {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..d {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        m.get(j, j)
            .partial_cmp(&m.get(i, i))
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let vals: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vecs = Matrix::zeros(d, d);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..d {
            vecs.set(r, new_c, v.get(r, old_c));
        }
    }
    Ok((vals, vecs))
}

/// Sample mean of the rows.
pub fn row_mean(x: &Matrix) -> Vec<f64> {
    x.col_means()
}

/// Covariance of the rows around `mean`, normalized by `n - 1` (or `n` when
/// `denominator_n` is set).
pub fn covariance(x: &Matrix, mean: &[f64], denominator_n: bool) -> Result<Matrix> {
    let n = x.rows();
    let d = x.cols();
    if mean.len() != d {
        return Err(Error::Dimension {
            what: "mean length",
            expected: d,
            actual: mean.len(),
        });
    }
    let denom = if denominator_n {
        n as f64
    } else {
        (n as f64) - 1.0
    };
    if denom <= 0.0 {
        return Err(Error::Numeric(alloc::format!(
            "covariance needs more rows (got {})",
            n
        )));
    }
    let mut cov = Matrix::zeros(d, d);
    let mut centered = vec![0.0; d];
    for row in x.iter_rows() {
        for (c, (v, m)) in row.iter().zip(mean).enumerate() {
            centered[c] = v - m;
        }
        for i in 0..d {
            let ci = centered[i];
            for j in i..d {
                let add = ci * centered[j];
                cov.set(i, j, cov.get(i, j) + add);
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov.get(i, j) / denom;
            cov.set(i, j, v);
            cov.set(j, i, v);
        }
    }
    Ok(cov)
}

/// Add `eps * trace(A)/d` to the diagonal, returning the ridge actually added.
pub fn ridge_in_place(a: &mut Matrix, eps: f64) -> f64 {
    let d = a.rows();
    if d == 0 {
        return 0.0;
    }
    let trace: f64 = (0..d).map(|i| a.get(i, i)).sum();
    let mut ridge = eps * trace / d as f64;
    if !(ridge > 0.0) {
        ridge = eps;
    }
    for i in 0..d {
        a.set(i, i, a.get(i, i) + ridge);
    }
    ridge
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cholesky_solves_known_system() {
        // A = [[4,2],[2,3]], b = [2,1] -> x = [0.5, 0]
        let a = Matrix::from_vec(2, 2, vec![4.0, 2.0, 2.0, 3.0]).unwrap();
        let ch = Cholesky::new(&a).unwrap();
        let x = ch.solve(&[2.0, 1.0]).unwrap();
        assert!(approx(x[0], 0.5, 1e-12));
        assert!(approx(x[1], 0.0, 1e-12));
        // det A = 8
        assert!(approx(ch.log_det(), math::ln(8.0), 1e-12));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_vec(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(Cholesky::new(&a).is_err());
    }

    #[test]
    fn quad_form_matches_solve() {
        let a = Matrix::from_vec(3, 3, vec![5.0, 1.0, 0.5, 1.0, 4.0, 0.2, 0.5, 0.2, 3.0]).unwrap();
        let ch = Cholesky::new(&a).unwrap();
        let v = [1.0, -2.0, 0.3];
        let x = ch.solve(&v).unwrap();
        let direct: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert!(approx(ch.quad_form_inv(&v).unwrap(), direct, 1e-12));
    }

    #[test]
    fn jacobi_recovers_spectrum() {
        // Symmetric matrix with known eigenvalues 6, 3, 1 is harder to build by
        // hand; instead verify A v = lambda v on a random-ish fixed matrix.
        let a = Matrix::from_vec(
            3,
            3,
            vec![2.0, -1.0, 0.3, -1.0, 2.5, 0.7, 0.3, 0.7, 1.8],
        )
        .unwrap();
        let (vals, vecs) = sym_eigen(&a).unwrap();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        for c in 0..3 {
            for r in 0..3 {
                let av: f64 = (0..3).map(|k| a.get(r, k) * vecs.get(k, c)).sum();
                assert!(approx(av, vals[c] * vecs.get(r, c), 1e-9));
            }
        }
        // Eigenvalue sum equals the trace.
        let trace = a.get(0, 0) + a.get(1, 1) + a.get(2, 2);
        assert!(approx(vals.iter().sum::<f64>(), trace, 1e-10));
    }

    #[test]
    fn covariance_matches_hand_computation() {
        // Rows (0,0), (2,2): mean (1,1), sample cov [[2,2],[2,2]].
        let x = Matrix::from_vec(2, 2, vec![0.0, 0.0, 2.0, 2.0]).unwrap();
        let mean = row_mean(&x);
        let cov = covariance(&x, &mean, false).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(approx(cov.get(i, j), 2.0, 1e-12));
            }
        }
        let cov_n = covariance(&x, &mean, true).unwrap();
        assert!(approx(cov_n.get(0, 0), 1.0, 1e-12));
    }
}
