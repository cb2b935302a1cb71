//! L2-regularized logistic regression trained with L-BFGS.
//!
//! The objective is `(1/n) * sum log-loss + (lambda/2) * ||w||^2` with an
//! unpenalized intercept. The solver is deterministic full-batch L-BFGS
//! (memory 10) with Armijo backtracking, stopping at gradient max-norm 1e-6
//! or 500 iterations.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::make_fold_plan;
use crate::error::{argument, Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::rng::rng_from_seed;
use crate::PROB_CLIP;

const GRAD_TOL: f64 = 1e-6;
const MAX_ITER: usize = 500;
const LBFGS_MEMORY: usize = 10;

/// A trained binary logistic model.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
}

impl LogisticModel {
    pub fn input_dim(&self) -> usize {
        self.weights.len()
    }

    /// Probability of the positive class, clipped away from 0 and 1.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::Dimension {
                what: "input length",
                expected: self.weights.len(),
                actual: x.len(),
            });
        }
        let z: f64 = self
            .weights
            .iter()
            .zip(x)
            .fold(self.intercept, |acc, (w, v)| acc + w * v);
        Ok(clip_prob(math::sigmoid(z)))
    }
}

#[inline]
pub(crate) fn clip_prob(p: f64) -> f64 {
    p.clamp(PROB_CLIP, 1.0 - PROB_CLIP)
}

/// Objective of the regularized log-loss at `theta = [w; b]`: mean negative
/// log-likelihood plus `lambda/2` times the squared weight norm (intercept
/// unpenalized). Fills `grad` with the analytic gradient when given.
pub fn objective(x: &Matrix, y: &[u8], lambda: f64, theta: &[f64], grad: Option<&mut [f64]>) -> f64 {
    let n = x.rows();
    let k = x.cols();
    let (w, b) = (&theta[..k], theta[k]);
    let inv_n = 1.0 / n as f64;
    let mut loss = 0.0;
    let mut grad = grad;
    if let Some(g) = grad.as_deref_mut() {
        g.fill(0.0);
    }
    for (row, &yi) in x.iter_rows().zip(y) {
        let z: f64 = w.iter().zip(row).fold(b, |acc, (wj, xj)| acc + wj * xj);
        let yi = yi as f64;
        loss += math::softplus(z) - yi * z;
        if let Some(g) = grad.as_deref_mut() {
            let resid = (math::sigmoid(z) - yi) * inv_n;
            for (gj, xj) in g[..k].iter_mut().zip(row) {
                *gj += resid * xj;
            }
            g[k] += resid;
        }
    }
    loss *= inv_n;
    let penalty: f64 = w.iter().map(|wj| wj * wj).sum::<f64>() * 0.5 * lambda;
    if let Some(g) = grad.as_deref_mut() {
        for (gj, wj) in g[..k].iter_mut().zip(w) {
            *gj += lambda * wj;
        }
    }
    loss + penalty
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &t| m.max(math::abs(t)))
}

/// Constant model used when the training labels are single-class: zero
/// weights and an intercept hitting the Laplace-smoothed positive rate
/// `(pos + 1) / (n + 2)`.
fn constant_model(k: usize, pos: usize, n: usize, lambda: f64) -> LogisticModel {
    let p = (pos as f64 + 1.0) / (n as f64 + 2.0);
    LogisticModel {
        weights: vec![0.0; k],
        intercept: math::ln(p / (1.0 - p)),
        lambda,
    }
}

/// Train a logistic model, returning the per-iteration objective trace along
/// with it. The trace is strictly for diagnostics and tests.
pub fn train_logistic_traced(
    x: &Matrix,
    y: &[u8],
    lambda: f64,
) -> Result<(LogisticModel, Vec<f64>)> {
    let n = x.rows();
    let k = x.cols();
    if n == 0 {
        return Err(argument("need at least one training instance"));
    }
    if y.len() != n {
        return Err(Error::Dimension {
            what: "target length",
            expected: n,
            actual: y.len(),
        });
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(argument("lambda must be a nonnegative finite value"));
    }
    if !x.all_finite() {
        return Err(argument("training features contain non-finite values"));
    }
    let pos = y.iter().filter(|&&b| b == 1).count();
    if pos == 0 || pos == n {
        return Ok((constant_model(k, pos, n, lambda), Vec::new()));
    }

    let dim = k + 1;
    let mut theta = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    let mut f = objective(x, y, lambda, &theta, Some(&mut grad));
    if !f.is_finite() {
        return Err(Error::Numeric(alloc::format!(
            "logistic objective is non-finite at the origin (value {})",
            f
        )));
    }
    let mut trace = vec![f];
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();

    for _ in 0..MAX_ITER {
        if max_norm(&grad) <= GRAD_TOL {
            break;
        }
        // Two-loop recursion for the L-BFGS direction.
        let mut dir: Vec<f64> = grad.iter().map(|g| -g).collect();
        let pairs = s_hist.len();
        let mut alpha = vec![0.0; pairs];
        for i in (0..pairs).rev() {
            let rho = 1.0 / dot(&y_hist[i], &s_hist[i]);
            alpha[i] = rho * dot(&s_hist[i], &dir);
            axpy(&mut dir, -alpha[i], &y_hist[i]);
        }
        if pairs > 0 {
            let last = pairs - 1;
            let gamma = dot(&s_hist[last], &y_hist[last]) / dot(&y_hist[last], &y_hist[last]);
            if gamma.is_finite() && gamma > 0.0 {
                for t in dir.iter_mut() {
                    *t *= gamma;
                }
            }
        }
        for i in 0..pairs {
            let rho = 1.0 / dot(&y_hist[i], &s_hist[i]);
            let beta = rho * dot(&y_hist[i], &dir);
            axpy(&mut dir, alpha[i] - beta, &s_hist[i]);
        }
        let mut slope = dot(&grad, &dir);
        if !(slope < 0.0) {
            dir = grad.iter().map(|g| -g).collect();
            slope = dot(&grad, &dir);
        }

        // Armijo backtracking from a unit step.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = theta
                .iter()
                .zip(&dir)
                .map(|(t, d)| t + step * d)
                .collect();
            let f_trial = objective(x, y, lambda, &trial, None);
            if f_trial.is_finite() && f_trial <= f + 1e-4 * step * slope {
                accepted = Some((trial, f_trial));
                break;
            }
            step *= 0.5;
        }
        let Some((theta_new, f_new)) = accepted else {
            break;
        };
        let mut grad_new = vec![0.0; dim];
        let f_check = objective(x, y, lambda, &theta_new, Some(&mut grad_new));
        if !f_check.is_finite() || grad_new.iter().any(|g| !g.is_finite()) {
            return Err(Error::Numeric(alloc::format!(
                "logistic solver produced a non-finite state (objective {})",
                f_check
            )));
        }
        let s: Vec<f64> = theta_new.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = grad_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-12 * norm2(&s) * norm2(&yv) {
            if s_hist.len() == LBFGS_MEMORY {
                s_hist.remove(0);
                y_hist.remove(0);
            }
            s_hist.push(s);
            y_hist.push(yv);
        }
        theta = theta_new;
        grad = grad_new;
        f = f_new;
        trace.push(f);
    }

    let model = LogisticModel {
        weights: theta[..k].to_vec(),
        intercept: theta[k],
        lambda,
    };
    if model.weights.iter().any(|w| !w.is_finite()) || !model.intercept.is_finite() {
        return Err(Error::Numeric(alloc::format!(
            "logistic solver returned non-finite parameters (intercept {})",
            model.intercept
        )));
    }
    Ok((model, trace))
}

/// Train a logistic model; see [`train_logistic_traced`] for the solver.
pub fn train_logistic(x: &Matrix, y: &[u8], lambda: f64) -> Result<LogisticModel> {
    train_logistic_traced(x, y, lambda).map(|(m, _)| m)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(dst: &mut [f64], a: f64, src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += a * s;
    }
}

#[inline]
fn norm2(v: &[f64]) -> f64 {
    math::sqrt(dot(v, v))
}

/// Pick the grid value maximizing mean validation log-likelihood under
/// k-fold cross-validation. Ties break toward the larger lambda; data sets
/// with fewer than 10 rows skip the search and return 1.0.
pub fn select_lambda(
    x: &Matrix,
    y: &[u8],
    grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(argument("lambda grid must be nonempty"));
    }
    let n = x.rows();
    if n < 10 {
        return Ok(1.0);
    }
    let folds = folds.min(n).max(2);
    let mut rng = rng_from_seed(seed);
    let plan = make_fold_plan(n, folds, &mut rng)?;
    let mut best: Option<(f64, f64)> = None;
    for &lambda in grid {
        if lambda < 0.0 {
            return Err(argument("lambda grid values must be nonnegative"));
        }
        let mut fold_scores = Vec::with_capacity(folds);
        for f in 0..plan.n_folds() {
            let train_idx = plan.train_indices(f);
            let test_idx = plan.test_indices(f);
            let x_tr = x.select_rows(&train_idx);
            let y_tr: Vec<u8> = train_idx.iter().map(|&i| y[i]).collect();
            let model = train_logistic(&x_tr, &y_tr, lambda)?;
            let mut ll = 0.0;
            for &i in test_idx {
                let p = model.predict_proba(x.row(i))?;
                ll += if y[i] == 1 {
                    math::ln(p)
                } else {
                    math::ln(1.0 - p)
                };
            }
            fold_scores.push(ll / test_idx.len() as f64);
        }
        let score = fold_scores.iter().sum::<f64>() / fold_scores.len() as f64;
        best = match best {
            None => Some((score, lambda)),
            Some((bs, bl)) if score > bs || (score == bs && lambda > bl) => {
                Some((score, lambda))
            }
            other => other,
        };
    }
    Ok(best.expect("nonempty grid").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn toy_separable() -> (Matrix, Vec<u8>) {
        // One feature; positives sit right of 0, negatives left.
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut rng = rng_from_seed(31);
        for _ in 0..60 {
            let x: f64 = rng.random_range(-2.0..2.0);
            rows.push(vec![x]);
            labels.push(u8::from(x + 0.3 * rng.random_range(-1.0..1.0) > 0.0));
        }
        (Matrix::from_rows(&rows).unwrap(), labels)
    }

    #[test]
    fn predict_closed_forms() {
        let m = LogisticModel {
            weights: vec![0.0, 0.0],
            intercept: 0.0,
            lambda: 0.1,
        };
        assert_eq!(m.predict_proba(&[3.0, -1.0]).unwrap(), 0.5);
        let m = LogisticModel {
            weights: vec![1.0],
            intercept: 0.0,
            lambda: 0.0,
        };
        let p = m.predict_proba(&[math::ln(3.0)]).unwrap();
        assert!((p - 0.75).abs() < 1e-12);
    }

    #[test]
    fn predict_rejects_bad_dim() {
        let m = LogisticModel {
            weights: vec![1.0, 2.0],
            intercept: 0.0,
            lambda: 0.0,
        };
        assert!(m.predict_proba(&[1.0]).is_err());
    }

    #[test]
    fn sigmoid_symmetry_in_predictions() {
        let m = LogisticModel {
            weights: vec![0.7, -1.3],
            intercept: 0.4,
            lambda: 0.0,
        };
        let neg = LogisticModel {
            weights: vec![-0.7, 1.3],
            intercept: -0.4,
            lambda: 0.0,
        };
        let x = [0.2, 1.5];
        let p = m.predict_proba(&x).unwrap();
        let q = neg.predict_proba(&x).unwrap();
        assert!((p - (1.0 - q)).abs() < 1e-12);
    }

    #[test]
    fn single_class_yields_smoothed_constant() {
        let x = Matrix::from_vec(4, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let m = train_logistic(&x, &[1, 1, 1, 1], 0.5).unwrap();
        assert!(m.weights.iter().all(|&w| w == 0.0));
        let p = m.predict_proba(&[10.0]).unwrap();
        assert!((p - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn heavy_penalty_pins_weights_to_zero() {
        let (x, y) = toy_separable();
        let m = train_logistic(&x, &y, 1e6).unwrap();
        assert!(max_norm(&m.weights) <= 1e-3);
        let rate = y.iter().filter(|&&b| b == 1).count() as f64 / y.len() as f64;
        let p = m.predict_proba(&[0.0]).unwrap();
        assert!((p - rate).abs() <= 1e-3);
    }

    #[test]
    fn objective_trace_is_monotone_and_gradient_small() {
        let (x, y) = toy_separable();
        let (m, trace) = train_logistic_traced(&x, &y, 0.05).unwrap();
        assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        let theta: Vec<f64> = m
            .weights
            .iter()
            .copied()
            .chain(core::iter::once(m.intercept))
            .collect();
        let mut g = vec![0.0; theta.len()];
        objective(&x, &y, 0.05, &theta, Some(&mut g));
        assert!(max_norm(&g) <= 1e-5);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (x, y) = toy_separable();
        let mut rng = rng_from_seed(77);
        for _ in 0..10 {
            let theta: Vec<f64> = (0..2).map(|_| rng.random_range(-1.5..1.5)).collect();
            let mut g = vec![0.0; 2];
            objective(&x, &y, 0.3, &theta, Some(&mut g));
            for j in 0..2 {
                let h = 1e-6;
                let mut tp = theta.clone();
                tp[j] += h;
                let mut tm = theta.clone();
                tm[j] -= h;
                let fd = (objective(&x, &y, 0.3, &tp, None)
                    - objective(&x, &y, 0.3, &tm, None))
                    / (2.0 * h);
                let denom = g[j].abs().max(1.0);
                assert!(
                    (g[j] - fd).abs() / denom <= 1e-5,
                    "component {}: analytic {} vs fd {}",
                    j,
                    g[j],
                    fd
                );
            }
        }
    }

    #[test]
    fn lambda_selection_tie_prefers_larger() {
        // 12 constant-feature rows make every lambda give the identical
        // constant model, so all grid scores tie exactly.
        let x = Matrix::zeros(12, 1);
        let y = vec![1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0];
        let picked = select_lambda(&x, &y, &[0.01, 10.0, 0.1], 3, 5).unwrap();
        assert_eq!(picked, 10.0);
    }

    #[test]
    fn lambda_selection_single_element_grid() {
        let (x, y) = toy_separable();
        assert_eq!(select_lambda(&x, &y, &[0.25], 4, 1).unwrap(), 0.25);
    }

    #[test]
    fn small_n_falls_back_to_unit_lambda() {
        let x = Matrix::zeros(5, 1);
        let y = vec![1, 0, 1, 0, 1];
        assert_eq!(select_lambda(&x, &y, &[0.01, 0.1], 5, 1).unwrap(), 1.0);
    }
}
