//! FAST-MCD robust location and scatter, plus the robust squared Mahalanobis
//! distance.
//!
//! The estimator searches for the h-point subset whose classical covariance
//! has minimal determinant: random (d+1)-point starts are expanded to h
//! points, concentrated for two steps, and the best candidates are refined
//! until the determinant stops moving. The returned scatter is rescaled by
//! the chi-square consistency factor and ridge-stabilized.
//!
//! Distances are evaluated through a spectral pseudo-inverse of the
//! consistency-scaled scatter: eigendirections whose variance is zero
//! relative to the spectrum (rank deficiency from duplicated rows, constant
//! columns) contribute nothing rather than exploding against the ridge.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;

use crate::error::{argument, Error, Result};
use crate::linalg::{covariance, ridge_in_place, sym_eigen, Cholesky};
use crate::math;
use crate::matrix::Matrix;
use crate::rng::rng_from_seed;
use crate::special::{chi2_cdf, chi2_quantile};

const RIDGE_EPS: f64 = 1e-8;
const DET_TOL: f64 = 1e-12;
const PINV_RTOL: f64 = 1e-12;
const REFINE_CANDIDATES: usize = 10;
const MAX_REFINE_STEPS: usize = 100;

/// Robust location/scatter estimate over an h-point support.
#[derive(Debug, Clone)]
pub struct RobustEstimate {
    location: Vec<f64>,
    scatter: Matrix,
    support: Vec<usize>,
    log_det: f64,
    eig_vectors: Matrix,
    inv_eigenvalues: Vec<f64>,
}

impl RobustEstimate {
    /// Build an estimate from explicit parts; the scatter must be symmetric
    /// (within 1e-10) with strictly positive eigenvalues. The distance
    /// pseudo-inverse is taken from the given scatter's spectrum.
    pub fn from_parts(
        location: Vec<f64>,
        scatter: Matrix,
        support: Vec<usize>,
        log_det: f64,
    ) -> Result<RobustEstimate> {
        let d = location.len();
        if scatter.rows() != d || scatter.cols() != d {
            return Err(Error::Dimension {
                what: "scatter side",
                expected: d,
                actual: scatter.rows(),
            });
        }
        let mut scale: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                scale = scale.max(math::abs(scatter.get(i, j)));
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if math::abs(scatter.get(i, j) - scatter.get(j, i)) > 1e-10 * scale.max(1.0) {
                    return Err(argument("scatter is not symmetric"));
                }
            }
        }
        let (vals, vecs) = sym_eigen(&scatter)?;
        if vals.last().is_some_and(|&v| v <= 0.0) {
            return Err(argument("scatter must be positive definite"));
        }
        let inv = spectral_inverse(&vals);
        Ok(RobustEstimate {
            location,
            scatter,
            support,
            log_det,
            eig_vectors: vecs,
            inv_eigenvalues: inv,
        })
    }

    pub fn location(&self) -> &[f64] {
        &self.location
    }

    pub fn scatter(&self) -> &Matrix {
        &self.scatter
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Determinant of the raw covariance of the support subset (before the
    /// consistency factor and ridge), as minimized by the search.
    pub fn determinant(&self) -> f64 {
        math::exp(self.log_det)
    }

    /// Natural log of [`determinant`](Self::determinant); `-inf` when the
    /// support covariance is singular.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Replace the distance center, e.g. with the plain sample mean.
    pub fn set_location(&mut self, location: Vec<f64>) -> Result<()> {
        if location.len() != self.location.len() {
            return Err(Error::Dimension {
                what: "location length",
                expected: self.location.len(),
                actual: location.len(),
            });
        }
        self.location = location;
        Ok(())
    }

    fn dim(&self) -> usize {
        self.location.len()
    }
}

/// Reciprocal eigenvalues with small ones (relative to the largest) dropped.
fn spectral_inverse(vals: &[f64]) -> Vec<f64> {
    let lambda_max = vals.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = PINV_RTOL * lambda_max;
    vals.iter()
        .map(|&v| if v > cutoff && v > 0.0 { 1.0 / v } else { 0.0 })
        .collect()
}

/// Default support size `floor((n + d + 1) / 2)`.
pub fn default_h(n: usize, d: usize) -> usize {
    (n + d + 1) / 2
}

/// Squared robust Mahalanobis distance of `point` from the estimate.
pub fn robust_distance_sq(est: &RobustEstimate, point: &[f64]) -> Result<f64> {
    let d = est.dim();
    if point.len() != d {
        return Err(Error::Dimension {
            what: "point length",
            expected: d,
            actual: point.len(),
        });
    }
    let mut total = 0.0;
    for c in 0..d {
        let inv = est.inv_eigenvalues[c];
        if inv == 0.0 {
            continue;
        }
        let mut proj = 0.0;
        for r in 0..d {
            proj += (point[r] - est.location[r]) * est.eig_vectors.get(r, c);
        }
        total += proj * proj * inv;
    }
    Ok(total)
}

/// Mean and sample covariance (h-1 denominator) of the rows in `subset`.
fn subset_stats(points: &Matrix, subset: &[usize]) -> Result<(Vec<f64>, Matrix)> {
    let sub = points.select_rows(subset);
    let mean = sub.col_means();
    let denominator_n = subset.len() < 2;
    let cov = covariance(&sub, &mean, denominator_n)?;
    Ok((mean, cov))
}

/// Cholesky of the subset covariance plus the shared comparison ridge.
fn subset_model(points: &Matrix, subset: &[usize], ridge: f64) -> Result<(Vec<f64>, Cholesky)> {
    let (mean, mut cov) = subset_stats(points, subset)?;
    let d = cov.rows();
    for i in 0..d {
        cov.set(i, i, cov.get(i, i) + ridge);
    }
    let chol = Cholesky::new(&cov)?;
    Ok((mean, chol))
}

/// Indices of the `h` smallest squared distances, ties broken by index,
/// returned in ascending index order.
fn smallest_h(dists: &[f64], h: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dists.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        dists[a]
            .partial_cmp(&dists[b])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut subset = order[..h].to_vec();
    subset.sort_unstable();
    subset
}

fn all_distances(points: &Matrix, mean: &[f64], chol: &Cholesky) -> Result<Vec<f64>> {
    let mut dists = Vec::with_capacity(points.rows());
    let mut diff = vec![0.0; points.cols()];
    for row in points.iter_rows() {
        for (d, (v, m)) in diff.iter_mut().zip(row.iter().zip(mean)) {
            *d = v - m;
        }
        dists.push(chol.quad_form_inv(&diff)?);
    }
    Ok(dists)
}

/// One concentration step: re-select the `h` points closest to the current
/// subset's estimate. Returns the new subset and the current subset's
/// ridged log-determinant.
pub(crate) fn c_step(
    points: &Matrix,
    subset: &[usize],
    h: usize,
    ridge: f64,
) -> Result<(Vec<usize>, f64)> {
    let (mean, chol) = subset_model(points, subset, ridge)?;
    let dists = all_distances(points, &mean, &chol)?;
    Ok((smallest_h(&dists, h), chol.log_det()))
}

fn refine_to_convergence(
    points: &Matrix,
    start: Vec<usize>,
    h: usize,
    ridge: f64,
) -> Result<(Vec<usize>, f64)> {
    let mut subset = start;
    let (mut mean, mut chol) = subset_model(points, &subset, ridge)?;
    let mut ld = chol.log_det();
    for _ in 0..MAX_REFINE_STEPS {
        let dists = all_distances(points, &mean, &chol)?;
        let next = smallest_h(&dists, h);
        if next == subset {
            break;
        }
        let (mean2, chol2) = subset_model(points, &next, ridge)?;
        let ld2 = chol2.log_det();
        if ld2 > ld - DET_TOL {
            break;
        }
        subset = next;
        mean = mean2;
        chol = chol2;
        ld = ld2;
    }
    Ok((subset, ld))
}

fn rows_all_identical(points: &Matrix) -> bool {
    let first = points.row(0);
    points.iter_rows().all(|r| r == first)
}

/// Consistency factor making the trimmed scatter unbiased under normality.
fn consistency_factor(h: usize, n: usize, d: usize) -> Result<f64> {
    if h == n {
        return Ok(1.0);
    }
    let alpha = h as f64 / n as f64;
    let q = chi2_quantile(alpha, d as f64)?;
    let denom = chi2_cdf(q, d as f64 + 2.0)?;
    if denom <= 0.0 {
        return Err(Error::Numeric(alloc::format!(
            "consistency factor denominator vanished (h={}, n={}, d={})",
            h,
            n,
            d
        )));
    }
    Ok(alpha / denom)
}

/// Log-determinant of the raw subset covariance via its spectrum; `-inf`
/// when singular.
fn raw_log_det(cov: &Matrix) -> Result<f64> {
    let (vals, _) = sym_eigen(cov)?;
    let mut ld = 0.0;
    for &v in &vals {
        ld += math::ln(v.max(0.0));
    }
    Ok(ld)
}

fn finalize(
    points: &Matrix,
    subset: Vec<usize>,
    h: usize,
    n: usize,
) -> Result<RobustEstimate> {
    let d = points.cols();
    let (location, raw_cov) = subset_stats(points, &subset)?;
    let log_det = raw_log_det(&raw_cov)?;
    let factor = consistency_factor(h, n, d)?;
    let mut scatter = raw_cov.clone();
    for i in 0..d {
        for j in 0..d {
            scatter.set(i, j, raw_cov.get(i, j) * factor);
        }
    }
    let (vals, vecs) = sym_eigen(&scatter)?;
    ridge_in_place(&mut scatter, RIDGE_EPS);
    let (vals, vecs) = if vals.first().copied().unwrap_or(0.0) > 0.0 {
        (vals, vecs)
    } else {
        sym_eigen(&scatter)?
    };
    let inv = spectral_inverse(&vals);
    Ok(RobustEstimate {
        location,
        scatter,
        support: subset,
        log_det,
        eig_vectors: vecs,
        inv_eigenvalues: inv,
    })
}

/// Minimum covariance determinant estimate over `n_starts` random starts.
pub fn fast_mcd(points: &Matrix, h: usize, n_starts: usize, seed: u64) -> Result<RobustEstimate> {
    let n = points.rows();
    let d = points.cols();
    if n <= d {
        return Err(argument(alloc::format!(
            "need more points than dimensions (n={}, d={})",
            n,
            d
        )));
    }
    if h < default_h(n, d) || h > n {
        return Err(argument(alloc::format!(
            "support size {} outside [{}, {}]",
            h,
            default_h(n, d),
            n
        )));
    }
    if !points.all_finite() {
        return Err(argument("points contain non-finite values"));
    }

    if rows_all_identical(points) {
        let location = points.row(0).to_vec();
        let mut scatter = Matrix::zeros(d, d);
        ridge_in_place(&mut scatter, RIDGE_EPS);
        let (vals, vecs) = sym_eigen(&scatter)?;
        let inv = spectral_inverse(&vals);
        return Ok(RobustEstimate {
            location,
            scatter,
            support: (0..h).collect(),
            log_det: f64::NEG_INFINITY,
            eig_vectors: vecs,
            inv_eigenvalues: inv,
        });
    }

    let full_mean = points.col_means();
    let full_cov = covariance(points, &full_mean, false)?;
    let trace: f64 = (0..d).map(|i| full_cov.get(i, i)).sum();
    let ridge = (RIDGE_EPS * trace / d as f64).max(f64::MIN_POSITIVE);

    if h == n {
        return finalize(points, (0..n).collect(), h, n);
    }
    if n_starts == 0 {
        return Err(argument("need at least one start"));
    }

    let mut rng = rng_from_seed(seed);
    let mut candidates: Vec<(f64, Vec<usize>)> = Vec::with_capacity(n_starts);
    for _ in 0..n_starts {
        let mut seed_subset: Vec<usize> = index::sample(&mut rng, n, d + 1).into_iter().collect();
        seed_subset.sort_unstable();
        let (mean, chol) = subset_model(points, &seed_subset, ridge)?;
        let dists = all_distances(points, &mean, &chol)?;
        let mut subset = smallest_h(&dists, h);
        for _ in 0..2 {
            let (next, _) = c_step(points, &subset, h, ridge)?;
            subset = next;
        }
        let (_, chol) = subset_model(points, &subset, ridge)?;
        candidates.push((chol.log_det(), subset));
    }
    candidates.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| a.1.cmp(&b.1))
    });
    candidates.dedup_by(|a, b| a.1 == b.1);
    candidates.truncate(REFINE_CANDIDATES);

    let mut best: Option<(f64, Vec<usize>)> = None;
    for (_, subset) in candidates {
        let (refined, ld) = refine_to_convergence(points, subset, h, ridge)?;
        best = match best {
            None => Some((ld, refined)),
            Some((bld, bsub)) => {
                if ld < bld || (ld == bld && refined < bsub) {
                    Some((ld, refined))
                } else {
                    Some((bld, bsub))
                }
            }
        };
    }
    let (_, winner) = best.expect("at least one candidate");
    finalize(points, winner, h, n)
}
