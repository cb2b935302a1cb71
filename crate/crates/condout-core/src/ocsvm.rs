//! One-class SVM with an RBF kernel, trained by sequential minimal
//! optimization on the dual.
//!
//! The dual minimizes `0.5 * a' K a` subject to `0 <= a_i <= 1/(nu*N)` and
//! `sum a = 1`. Each iteration picks the maximal KKT-violating pair and takes
//! the exact line-minimizing step inside the box, so the objective never
//! increases. Training stops when the violation falls to 1e-3 or errors out
//! at 100*N updates.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{argument, Error, Result};
use crate::math;
use crate::matrix::Matrix;

const KKT_TOL: f64 = 1e-3;
const CACHE_LIMIT: usize = 8192;

/// Trained one-class SVM: the support points with their dual weights, the
/// offset, and the kernel parameters.
#[derive(Debug, Clone)]
pub struct OcsvmModel {
    support_points: Matrix,
    alphas: Vec<f64>,
    offset: f64,
    gamma: f64,
    nu: f64,
}

impl OcsvmModel {
    pub fn n_support(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn support_points(&self) -> &Matrix {
        &self.support_points
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

#[inline]
fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    math::exp(-gamma * s)
}

/// Bandwidth from the median heuristic: `1/(2 m^2)` for `m` the median
/// pairwise distance over a strided sample of at most 1000 points. Falls
/// back to 1.0 when the sample carries no spread.
pub fn median_heuristic_gamma(points: &Matrix) -> f64 {
    let n = points.rows();
    if n < 2 {
        return 1.0;
    }
    let stride = n.div_ceil(1000);
    let sample: Vec<usize> = (0..n).step_by(stride).collect();
    let mut dists = Vec::with_capacity(sample.len() * (sample.len() - 1) / 2);
    for (i, &a) in sample.iter().enumerate() {
        for &b in &sample[i + 1..] {
            let mut s = 0.0;
            for (x, y) in points.row(a).iter().zip(points.row(b)) {
                let d = x - y;
                s += d * d;
            }
            dists.push(math::sqrt(s));
        }
    }
    if dists.is_empty() {
        return 1.0;
    }
    dists.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mid = dists.len() / 2;
    let med = if dists.len() % 2 == 1 {
        dists[mid]
    } else {
        0.5 * (dists[mid - 1] + dists[mid])
    };
    if med > 0.0 {
        1.0 / (2.0 * med * med)
    } else {
        1.0
    }
}

/// Kernel access, cached as a full Gram matrix when the point count permits.
enum Gram<'a> {
    Cached(Vec<f64>, usize),
    Lazy(&'a Matrix, f64),
}

impl Gram<'_> {
    fn column(&self, j: usize, out: &mut [f64]) {
        match self {
            Gram::Cached(k, n) => out.copy_from_slice(&k[j * n..(j + 1) * n]),
            Gram::Lazy(points, gamma) => {
                let pj = points.row(j);
                for (i, v) in out.iter_mut().enumerate() {
                    *v = rbf(points.row(i), pj, *gamma);
                }
            }
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        match self {
            Gram::Cached(k, n) => k[j * n + i],
            Gram::Lazy(points, gamma) => rbf(points.row(i), points.row(j), *gamma),
        }
    }
}

/// Train a one-class SVM, also returning the dual objective after every
/// update (diagnostics and tests only).
pub fn train_ocsvm_traced(
    points: &Matrix,
    nu: f64,
    gamma: f64,
) -> Result<(OcsvmModel, Vec<f64>)> {
    let n = points.rows();
    if n < 2 {
        return Err(argument("need at least two training points"));
    }
    if !(0.0 < nu && nu <= 1.0) {
        return Err(argument("nu must lie in (0, 1]"));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(argument("gamma must be positive and finite"));
    }
    let c = 1.0 / (nu * n as f64);

    let gram = if n <= CACHE_LIMIT {
        let mut k = vec![0.0; n * n];
        for j in 0..n {
            let pj = points.row(j);
            for i in j..n {
                let v = rbf(points.row(i), pj, gamma);
                k[j * n + i] = v;
                k[i * n + j] = v;
            }
        }
        Gram::Cached(k, n)
    } else {
        Gram::Lazy(points, gamma)
    };

    // Standard feasible start: fill the box from the front.
    let mut alpha = vec![0.0; n];
    let full = (nu * n as f64) as usize;
    for a in alpha.iter_mut().take(full.min(n)) {
        *a = c;
    }
    let assigned = c * full.min(n) as f64;
    if full < n && assigned < 1.0 {
        alpha[full] = 1.0 - assigned;
    }

    // Gradient g = K alpha.
    let mut g = vec![0.0; n];
    let mut col = vec![0.0; n];
    for (j, &aj) in alpha.iter().enumerate() {
        if aj == 0.0 {
            continue;
        }
        gram.column(j, &mut col);
        for (gi, kv) in g.iter_mut().zip(&col) {
            *gi += aj * kv;
        }
    }

    let cap = 100 * n;
    let mut trace = Vec::new();
    let mut col_j = vec![0.0; n];
    let mut converged = false;
    for _ in 0..cap {
        // Maximal violating pair: raise the coordinate with the smallest
        // gradient, lower the one with the largest.
        let mut up: Option<usize> = None;
        let mut down: Option<usize> = None;
        for i in 0..n {
            if alpha[i] < c && up.is_none_or(|u| g[i] < g[u]) {
                up = Some(i);
            }
            if alpha[i] > 0.0 && down.is_none_or(|d| g[i] > g[d]) {
                down = Some(i);
            }
        }
        let (Some(i), Some(j)) = (up, down) else {
            break;
        };
        let violation = g[j] - g[i];
        if violation <= KKT_TOL {
            converged = true;
            break;
        }
        // RBF diagonal entries are 1, so eta = K_ii + K_jj - 2 K_ij.
        let eta = 2.0 - 2.0 * gram.at(i, j);
        let room = (c - alpha[i]).min(alpha[j]);
        let delta = if eta > 1e-15 {
            (violation / eta).min(room)
        } else {
            room
        };
        alpha[i] += delta;
        alpha[j] -= delta;
        gram.column(i, &mut col);
        gram.column(j, &mut col_j);
        for ((gi, ki), kj) in g.iter_mut().zip(&col).zip(&col_j) {
            *gi += delta * (ki - kj);
        }
        // Objective via the gradient identity 0.5 a'Ka = 0.5 a'g.
        trace.push(0.5 * alpha.iter().zip(&g).map(|(a, gi)| a * gi).sum::<f64>());
    }
    if !converged {
        // Re-check: the cap may land exactly on a solved state.
        let mut worst_up = f64::INFINITY;
        let mut worst_down = f64::NEG_INFINITY;
        for i in 0..n {
            if alpha[i] < c {
                worst_up = worst_up.min(g[i]);
            }
            if alpha[i] > 0.0 {
                worst_down = worst_down.max(g[i]);
            }
        }
        let violation = worst_down - worst_up;
        if violation > KKT_TOL {
            return Err(Error::Convergence {
                message: alloc::format!(
                    "one-class SVM stopped after {} updates above tolerance",
                    cap
                ),
                violation,
            });
        }
    }

    // Offset from margin support vectors; midpoint fallback when none are
    // strictly inside the box.
    let mut margin_sum = 0.0;
    let mut margin_count = 0usize;
    for i in 0..n {
        if alpha[i] > 0.0 && alpha[i] < c {
            margin_sum += g[i];
            margin_count += 1;
        }
    }
    let offset = if margin_count > 0 {
        margin_sum / margin_count as f64
    } else {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            if alpha[i] < c {
                lo = lo.min(g[i]);
            }
            if alpha[i] > 0.0 {
                hi = hi.max(g[i]);
            }
        }
        0.5 * (lo + hi)
    };

    let sv_idx: Vec<usize> = (0..n).filter(|&i| alpha[i] > 0.0).collect();
    let model = OcsvmModel {
        support_points: points.select_rows(&sv_idx),
        alphas: sv_idx.iter().map(|&i| alpha[i]).collect(),
        offset,
        gamma,
        nu,
    };
    Ok((model, trace))
}

/// Train a one-class SVM; see [`train_ocsvm_traced`].
pub fn train_ocsvm(points: &Matrix, nu: f64, gamma: f64) -> Result<OcsvmModel> {
    train_ocsvm_traced(points, nu, gamma).map(|(m, _)| m)
}

/// Decision value `sum_j a_j K(sv_j, point) - offset`; positive on the
/// normal side.
pub fn ocsvm_decision(model: &OcsvmModel, point: &[f64]) -> Result<f64> {
    if point.len() != model.support_points.cols() {
        return Err(Error::Dimension {
            what: "point length",
            expected: model.support_points.cols(),
            actual: point.len(),
        });
    }
    let mut s = 0.0;
    for (sv, &a) in model.support_points.iter_rows().zip(&model.alphas) {
        s += a * rbf(sv, point, model.gamma);
    }
    Ok(s - model.offset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn blob(n: usize, d: usize, seed: u64) -> Matrix {
        let mut rng = rng_from_seed(seed);
        let mut m = Matrix::zeros(n, d);
        for r in 0..n {
            for c in 0..d {
                m.set(r, c, rng.random_range(-1.0..1.0));
            }
        }
        m
    }

    fn kkt_stats(points: &Matrix, model: &OcsvmModel, nu: f64) -> (f64, f64) {
        let n = points.rows();
        let c = 1.0 / (nu * n as f64);
        let mut sum = 0.0;
        let mut worst_margin: f64 = 0.0;
        for (a, sv) in model.alphas().iter().zip(model.support_points().iter_rows()) {
            assert!(*a >= 0.0 && *a <= c + 1e-12);
            sum += a;
            if *a > 1e-9 && *a < c - 1e-9 {
                let dec = ocsvm_decision(model, sv).unwrap();
                worst_margin = worst_margin.max(dec.abs());
            }
        }
        (sum, worst_margin)
    }

    #[test]
    fn kkt_holds_at_solution() {
        let points = blob(80, 3, 51);
        let model = train_ocsvm(&points, 0.2, 0.7).unwrap();
        let (sum, worst_margin) = kkt_stats(&points, &model, 0.2);
        assert!((sum - 1.0).abs() <= 1e-8);
        assert!(worst_margin <= 2e-3, "margin SV decision {}", worst_margin);
    }

    #[test]
    fn nu_property_bounds_errors_and_svs() {
        for seed in 0..5 {
            let n = 100;
            let nu = 0.25;
            let points = blob(n, 2, 100 + seed);
            let model = train_ocsvm(&points, nu, 1.2).unwrap();
            let mut negatives = 0usize;
            for r in 0..n {
                // Points within solver tolerance of the boundary are
                // ambiguous, so only decisive negatives count as errors.
                if ocsvm_decision(&model, points.row(r)).unwrap() < -KKT_TOL {
                    negatives += 1;
                }
            }
            let frac_neg = negatives as f64 / n as f64;
            let frac_sv = model.n_support() as f64 / n as f64;
            assert!(frac_neg <= nu + 2.0 / n as f64, "seed {}: {}", seed, frac_neg);
            assert!(frac_sv >= nu - 2.0 / n as f64, "seed {}: {}", seed, frac_sv);
        }
    }

    #[test]
    fn objective_trace_never_increases() {
        let points = blob(60, 2, 9);
        let (_, trace) = train_ocsvm_traced(&points, 0.3, 0.8).unwrap();
        assert!(!trace.is_empty());
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn single_support_vector_closed_form() {
        let model = OcsvmModel {
            support_points: Matrix::from_vec(1, 2, alloc::vec![0.5, -0.5]).unwrap(),
            alphas: alloc::vec![1.0],
            offset: 0.3,
            gamma: 1.0,
            nu: 0.5,
        };
        let dec = ocsvm_decision(&model, &[0.5, -0.5]).unwrap();
        assert!((dec - (1.0 - 0.3)).abs() < 1e-15);
    }

    #[test]
    fn far_point_decision_approaches_negated_offset() {
        let points = blob(40, 2, 13);
        let model = train_ocsvm(&points, 0.1, 50.0).unwrap();
        let dec = ocsvm_decision(&model, &[500.0, -500.0]).unwrap();
        assert!((dec + model.offset()).abs() < 1e-12);
    }

    #[test]
    fn duplicated_points_still_converge() {
        let mut points = blob(30, 2, 21);
        for r in 15..30 {
            let (a, b) = (points.get(0, 0), points.get(0, 1));
            points.set(r, 0, a);
            points.set(r, 1, b);
        }
        let model = train_ocsvm(&points, 0.4, 1.0).unwrap();
        let (sum, _) = kkt_stats(&points, &model, 0.4);
        assert!((sum - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn rejects_bad_params() {
        let points = blob(10, 2, 3);
        assert!(train_ocsvm(&points, 0.0, 1.0).is_err());
        assert!(train_ocsvm(&points, 1.5, 1.0).is_err());
        assert!(train_ocsvm(&points, 0.5, 0.0).is_err());
        assert!(train_ocsvm(&Matrix::zeros(1, 2), 0.5, 1.0).is_err());
    }

    #[test]
    fn median_gamma_positive_and_duplicate_safe() {
        let points = blob(50, 3, 61);
        let g = median_heuristic_gamma(&points);
        assert!(g > 0.0 && g.is_finite());
        let dup = Matrix::zeros(20, 3);
        assert_eq!(median_heuristic_gamma(&dup), 1.0);
    }
}
