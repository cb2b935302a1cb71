//! The five conditional outlier scores on the per-label probability space,
//! the three joint-space baselines, and percentile-rank conversion. All
//! scores share one orientation: higher = more outlying.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::dbr::{pseudo_likelihood, DbrModel, RhoMatrix, Standardizer};
use crate::error::{argument, Error, Result};
use crate::lof::lof_scores;
use crate::math;
use crate::matrix::Matrix;
use crate::mcd::{default_h, fast_mcd, robust_distance_sq};
use crate::ocsvm::{median_heuristic_gamma, ocsvm_decision, train_ocsvm};

/// Norm order for the deviation-norm score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormOrder {
    L1,
    L2,
    LInf,
}

impl NormOrder {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormOrder::L1 => "1",
            NormOrder::L2 => "2",
            NormOrder::LInf => "inf",
        }
    }

    pub fn parse(s: &str) -> Result<NormOrder> {
        match s {
            "1" => Ok(NormOrder::L1),
            "2" => Ok(NormOrder::L2),
            "inf" | "Inf" | "INF" => Ok(NormOrder::LInf),
            other => Err(argument(alloc::format!(
                "unsupported norm order {:?} (use 1, 2, or inf)",
                other
            ))),
        }
    }
}

/// Scoring method tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Comp,
    Rd,
    Lr(NormOrder),
    Lof,
    Ocsvm,
    BaseRd,
    BaseLof,
    BaseOcsvm,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Comp => "ComP",
            Method::Rd => "RD",
            Method::Lr(NormOrder::L1) => "L1",
            Method::Lr(NormOrder::L2) => "L2",
            Method::Lr(NormOrder::LInf) => "Linf",
            Method::Lof => "LOF",
            Method::Ocsvm => "OCSVM",
            Method::BaseRd => "base-RD",
            Method::BaseLof => "base-LOF",
            Method::BaseOcsvm => "base-OCSVM",
        }
    }

    pub fn is_baseline(&self) -> bool {
        matches!(self, Method::BaseRd | Method::BaseLof | Method::BaseOcsvm)
    }
}

/// Parameters a score was computed with, for reporting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreParams {
    pub r: Option<NormOrder>,
    pub k: Option<usize>,
    pub nu: Option<f64>,
    pub gamma: Option<f64>,
}

/// Per-instance outlier scores for one method.
#[derive(Debug, Clone)]
pub struct ScoreVector {
    pub method: Method,
    pub values: Vec<f64>,
    pub params: ScoreParams,
    /// Degradation notices, e.g. the robust-distance fallback.
    pub note: Option<String>,
}

impl ScoreVector {
    fn new(method: Method, values: Vec<f64>, params: ScoreParams) -> Result<ScoreVector> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(alloc::format!(
                "{} produced non-finite scores",
                method.name()
            )));
        }
        Ok(ScoreVector {
            method,
            values,
            params,
            note: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Percentile ranks in (0, 1); ties share the average rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedScores {
    pub ranks: Vec<f64>,
}

/// Robust-distance scorer settings.
#[derive(Debug, Clone)]
pub struct RdConfig {
    /// Support size; `None` means `floor((n + d + 1) / 2)`.
    pub h: Option<usize>,
    pub n_starts: usize,
    pub seed: u64,
    /// Center distances on the plain mean instead of the robust location.
    pub use_plain_mean: bool,
}

impl Default for RdConfig {
    fn default() -> Self {
        RdConfig {
            h: None,
            n_starts: 500,
            seed: 0,
            use_plain_mean: false,
        }
    }
}

/// Joint-space baseline settings.
#[derive(Debug, Clone)]
pub struct JointParams {
    /// Standardize the feature block (labels always stay raw).
    pub standardize: bool,
    pub rd: RdConfig,
    pub k: usize,
    pub nu: f64,
    pub gamma: Option<f64>,
}

impl Default for JointParams {
    fn default() -> Self {
        JointParams {
            standardize: true,
            rd: RdConfig::default(),
            k: 30,
            nu: 0.01,
            gamma: None,
        }
    }
}

/// Joint-space baseline method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointMethod {
    Rd,
    Lof,
    Ocsvm,
}

/// One minus the pseudo-likelihood of each instance.
pub fn score_comp(model: &DbrModel, ds: &Dataset) -> Result<ScoreVector> {
    let mut values = Vec::with_capacity(ds.n_instances());
    for r in 0..ds.n_instances() {
        let pl = pseudo_likelihood(model, ds.features().row(r), ds.labels().row(r))?;
        values.push(1.0 - pl);
    }
    ScoreVector::new(Method::Comp, values, ScoreParams::default())
}

fn rd_over_matrix(points: &Matrix, cfg: &RdConfig, method: Method) -> Result<ScoreVector> {
    let n = points.rows();
    let d = points.cols();
    if n > d {
        let h = cfg.h.unwrap_or_else(|| default_h(n, d));
        let mut est = fast_mcd(points, h, cfg.n_starts, cfg.seed)?;
        if cfg.use_plain_mean {
            est.set_location(points.col_means())?;
        }
        let mut values = Vec::with_capacity(n);
        for row in points.iter_rows() {
            values.push(robust_distance_sq(&est, row)?);
        }
        return ScoreVector::new(method, values, ScoreParams::default());
    }
    // Too few rows for a covariance fit: fall back to a diagonal distance
    // with per-dimension median and median absolute deviation.
    let mut medians = Vec::with_capacity(d);
    let mut scales = Vec::with_capacity(d);
    for c in 0..d {
        let mut col: Vec<f64> = (0..n).map(|r| points.get(r, c)).collect();
        let med = median_in_place(&mut col);
        let mut dev: Vec<f64> = (0..n).map(|r| math::abs(points.get(r, c) - med)).collect();
        let mad = median_in_place(&mut dev);
        medians.push(med);
        scales.push((mad * 1.4826).max(1e-12));
    }
    let mut values = Vec::with_capacity(n);
    for row in points.iter_rows() {
        let mut s = 0.0;
        for ((v, m), sc) in row.iter().zip(&medians).zip(&scales) {
            let z = (v - m) / sc;
            s += z * z;
        }
        values.push(s);
    }
    let mut sv = ScoreVector::new(method, values, ScoreParams::default())?;
    sv.note = Some(String::from(
        "diagonal median/MAD fallback: too few rows for a covariance fit",
    ));
    Ok(sv)
}

fn median_in_place(v: &mut [f64]) -> f64 {
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Squared robust Mahalanobis distance of each row from a minimum-determinant
/// estimate fitted on the same rows (transductive).
pub fn score_rd(rhos: &RhoMatrix, cfg: &RdConfig) -> Result<ScoreVector> {
    rd_over_matrix(rhos.values(), cfg, Method::Rd)
}

/// L_r norm of the per-label deviations (1 - rho).
pub fn score_lr(rhos: &RhoMatrix, r: NormOrder) -> Result<ScoreVector> {
    let mut values = Vec::with_capacity(rhos.rows());
    for i in 0..rhos.rows() {
        let row = rhos.row(i);
        let v = match r {
            NormOrder::L1 => row.iter().map(|&p| 1.0 - p).sum(),
            NormOrder::L2 => math::sqrt(row.iter().map(|&p| (1.0 - p) * (1.0 - p)).sum()),
            NormOrder::LInf => row.iter().map(|&p| 1.0 - p).fold(0.0, f64::max),
        };
        values.push(v);
    }
    let mut sv = ScoreVector::new(Method::Lr(r), values, ScoreParams::default())?;
    sv.params.r = Some(r);
    Ok(sv)
}

/// Local outlier factor over the probability rows (transductive).
pub fn score_lof(rhos: &RhoMatrix, k: usize) -> Result<ScoreVector> {
    let values = lof_scores(rhos.values(), k)?;
    let mut sv = ScoreVector::new(Method::Lof, values, ScoreParams::default())?;
    sv.params.k = Some(k);
    Ok(sv)
}

/// Negated one-class SVM decision on test rows; the model trains on
/// probability rows from held-out training data.
pub fn score_ocsvm(
    train_rhos: &RhoMatrix,
    test_rhos: &RhoMatrix,
    nu: f64,
    gamma: Option<f64>,
) -> Result<ScoreVector> {
    if train_rhos.cols() != test_rhos.cols() {
        return Err(Error::Dimension {
            what: "probability columns",
            expected: train_rhos.cols(),
            actual: test_rhos.cols(),
        });
    }
    let gamma = gamma.unwrap_or_else(|| median_heuristic_gamma(train_rhos.values()));
    let model = train_ocsvm(train_rhos.values(), nu, gamma)?;
    let mut values = Vec::with_capacity(test_rhos.rows());
    for i in 0..test_rhos.rows() {
        values.push(-ocsvm_decision(&model, test_rhos.row(i))?);
    }
    let mut sv = ScoreVector::new(Method::Ocsvm, values, ScoreParams::default())?;
    sv.params.nu = Some(nu);
    sv.params.gamma = Some(gamma);
    Ok(sv)
}

/// Feature-standardized concatenation [x ; y] of a dataset's rows.
fn joint_matrix(ds: &Dataset, standardizer: Option<&Standardizer>) -> Matrix {
    let m = ds.n_features();
    let d = ds.n_labels();
    let mut out = Matrix::zeros(ds.n_instances(), m + d);
    for r in 0..ds.n_instances() {
        let x = ds.features().row(r);
        let y = ds.labels().row(r);
        let dst = out.row_mut(r);
        match standardizer {
            Some(s) => dst[..m].copy_from_slice(&s.transform_row(x)),
            None => dst[..m].copy_from_slice(x),
        }
        for (slot, &b) in dst[m..].iter_mut().zip(y) {
            *slot = b as f64;
        }
    }
    out
}

/// Unconditional baselines on concatenated feature-label vectors: robust
/// distance and LOF run transductively on the test concatenations, the
/// one-class SVM trains on the training concatenations. Features are
/// standardized (labels stay raw) unless disabled; the transductive scorers
/// use test statistics and the SVM uses training statistics.
pub fn baseline_joint_scores(
    train: &Dataset,
    test: &Dataset,
    method: JointMethod,
    params: &JointParams,
) -> Result<ScoreVector> {
    if train.n_features() != test.n_features() || train.n_labels() != test.n_labels() {
        return Err(argument("train and test shapes differ"));
    }
    match method {
        JointMethod::Rd => {
            let std = params
                .standardize
                .then(|| Standardizer::fit(test.features()));
            let points = joint_matrix(test, std.as_ref());
            rd_over_matrix(&points, &params.rd, Method::BaseRd)
        }
        JointMethod::Lof => {
            let std = params
                .standardize
                .then(|| Standardizer::fit(test.features()));
            let points = joint_matrix(test, std.as_ref());
            let values = lof_scores(&points, params.k)?;
            let mut sv = ScoreVector::new(Method::BaseLof, values, ScoreParams::default())?;
            sv.params.k = Some(params.k);
            Ok(sv)
        }
        JointMethod::Ocsvm => {
            let std = params
                .standardize
                .then(|| Standardizer::fit(train.features()));
            let train_points = joint_matrix(train, std.as_ref());
            let test_points = joint_matrix(test, std.as_ref());
            let gamma = params
                .gamma
                .unwrap_or_else(|| median_heuristic_gamma(&train_points));
            let model = train_ocsvm(&train_points, params.nu, gamma)?;
            let mut values = Vec::with_capacity(test_points.rows());
            for r in 0..test_points.rows() {
                values.push(-ocsvm_decision(&model, test_points.row(r))?);
            }
            let mut sv = ScoreVector::new(Method::BaseOcsvm, values, ScoreParams::default())?;
            sv.params.nu = Some(params.nu);
            sv.params.gamma = Some(gamma);
            Ok(sv)
        }
    }
}

/// Convert raw scores to percentile ranks `(average tie rank - 0.5) / n`.
pub fn percentile_rank(sv: &ScoreVector) -> RankedScores {
    RankedScores {
        ranks: percentile_rank_values(&sv.values),
    }
}

pub(crate) fn percentile_rank_values(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut ranks = alloc::vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // 1-based positions i+1 ..= j+1 share the average rank.
        let avg = (i + j + 2) as f64 / 2.0;
        let rank = (avg - 0.5) / n as f64;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbr::{compute_rho, train_dbr, LambdaPolicy, Structure};
    use crate::logistic::LogisticModel;
    use crate::matrix::BitMatrix;
    use alloc::vec;
    use rand::Rng;

    fn constant_model(d: usize, m: usize) -> DbrModel {
        DbrModel {
            structure: Structure::Br,
            standardizer: Standardizer::identity(m),
            label_order: (0..d).collect(),
            cpds: vec![
                LogisticModel {
                    weights: vec![0.0; m],
                    intercept: 0.0,
                    lambda: 0.0,
                };
                d
            ],
            feature_dim: m,
        }
    }

    fn rho_from(values: Matrix) -> RhoMatrix {
        RhoMatrix::new(values).unwrap()
    }

    #[test]
    fn comp_is_one_minus_pseudo_likelihood() {
        let model = constant_model(2, 1);
        let ds = Dataset::new(
            Matrix::zeros(3, 1),
            BitMatrix::from_vec(3, 2, vec![0, 0, 1, 0, 1, 1]).unwrap(),
            vec![],
            vec![],
        )
        .unwrap();
        let sv = score_comp(&model, &ds).unwrap();
        for &v in &sv.values {
            assert!((v - 0.75).abs() < 1e-15);
        }
    }

    #[test]
    fn comp_ordering_mirrors_pseudo_likelihood() {
        let mut rng = crate::rng::rng_from_seed(3);
        let mut x = Matrix::zeros(20, 2);
        let mut y = BitMatrix::zeros(20, 2);
        for r in 0..20 {
            x.set(r, 0, rng.random_range(-1.0..1.0));
            x.set(r, 1, rng.random_range(-1.0..1.0));
            y.set(r, 0, u8::from(x.get(r, 0) > 0.0));
            y.set(r, 1, u8::from(rng.random_range(0.0..1.0) > 0.6));
        }
        let ds = Dataset::new(x, y, vec![], vec![]).unwrap();
        let model = train_dbr(&ds, Structure::Dbr, &LambdaPolicy::Fixed(1.0), 0).unwrap();
        let sv = score_comp(&model, &ds).unwrap();
        for r in 0..20 {
            let pl =
                pseudo_likelihood(&model, ds.features().row(r), ds.labels().row(r)).unwrap();
            assert!((sv.values[r] - (1.0 - pl)).abs() < 1e-15);
        }
    }

    #[test]
    fn rd_identical_rows_score_zero() {
        let mut values = Matrix::zeros(12, 2);
        for r in 0..12 {
            values.set(r, 0, 0.9);
            values.set(r, 1, 0.8);
        }
        let rhos = rho_from(values);
        let sv = score_rd(&rhos, &RdConfig::default()).unwrap();
        assert!(sv.values.iter().all(|&v| v <= 1e-6));
    }

    #[test]
    fn rd_flags_far_row_as_maximal() {
        let mut rng = crate::rng::rng_from_seed(8);
        let mut values = Matrix::zeros(40, 2);
        for r in 0..40 {
            values.set(r, 0, 0.9 + rng.random_range(-0.02..0.02));
            values.set(r, 1, 0.85 + rng.random_range(-0.02..0.02));
        }
        values.set(39, 0, 0.05);
        values.set(39, 1, 0.1);
        let sv = score_rd(&rho_from(values), &RdConfig::default()).unwrap();
        let max = sv.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(sv.values[39], max);
        assert!(sv.note.is_none());
    }

    #[test]
    fn rd_row_permutation_permutes_scores() {
        let mut rng = crate::rng::rng_from_seed(12);
        let mut values = Matrix::zeros(30, 2);
        for r in 0..30 {
            values.set(r, 0, 0.8 + rng.random_range(-0.1..0.1));
            values.set(r, 1, 0.7 + rng.random_range(-0.1..0.1));
        }
        let cfg = RdConfig {
            n_starts: 300,
            ..RdConfig::default()
        };
        let a = score_rd(&rho_from(values.clone()), &cfg).unwrap();
        let perm: Vec<usize> = (0..30).rev().collect();
        let b = score_rd(&rho_from(values.select_rows(&perm)), &cfg).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            assert!(
                (a.values[p] - b.values[i]).abs() <= 1e-9 * a.values[p].max(1.0),
                "row {}: {} vs {}",
                p,
                a.values[p],
                b.values[i]
            );
        }
    }

    #[test]
    fn rd_small_sample_uses_mad_fallback() {
        let values = Matrix::from_vec(
            3,
            5,
            vec![
                0.9, 0.8, 0.7, 0.9, 0.8, 0.9, 0.8, 0.7, 0.9, 0.8, 0.2, 0.8, 0.7, 0.9, 0.8,
            ],
        )
        .unwrap();
        let sv = score_rd(&rho_from(values), &RdConfig::default()).unwrap();
        assert!(sv.note.is_some());
        assert!(sv.values[2] > sv.values[0]);
    }

    #[test]
    fn lr_norm_closed_forms() {
        let rhos = rho_from(Matrix::from_vec(1, 2, vec![0.2, 0.9]).unwrap());
        assert!(
            (score_lr(&rhos, NormOrder::LInf).unwrap().values[0] - 0.8).abs() < 1e-15
        );
        assert!((score_lr(&rhos, NormOrder::L1).unwrap().values[0] - 0.9).abs() < 1e-15);
        let l2 = score_lr(&rhos, NormOrder::L2).unwrap().values[0];
        assert!((l2 - math::sqrt(0.8 * 0.8 + 0.1 * 0.1)).abs() < 1e-15);
    }

    #[test]
    fn lr_near_certain_rows() {
        let eps = crate::PROB_CLIP;
        let d = 4;
        let mut values = Matrix::zeros(1, d);
        for c in 0..d {
            values.set(0, c, 1.0 - eps);
        }
        let rhos = rho_from(values);
        let unit = 1.0 - (1.0 - eps);
        let l1 = score_lr(&rhos, NormOrder::L1).unwrap().values[0];
        let l2 = score_lr(&rhos, NormOrder::L2).unwrap().values[0];
        let li = score_lr(&rhos, NormOrder::LInf).unwrap().values[0];
        assert!((l1 - unit * 4.0).abs() < 1e-18);
        assert!((l2 - unit * 2.0).abs() < 1e-18);
        assert!((li - unit).abs() < 1e-18);
    }

    #[test]
    fn linf_is_coordinatewise_monotone() {
        let base = rho_from(Matrix::from_vec(1, 3, vec![0.5, 0.6, 0.7]).unwrap());
        let bumped = rho_from(Matrix::from_vec(1, 3, vec![0.5, 0.4, 0.7]).unwrap());
        let a = score_lr(&base, NormOrder::LInf).unwrap().values[0];
        let b = score_lr(&bumped, NormOrder::LInf).unwrap().values[0];
        assert!(b >= a);
    }

    #[test]
    fn lof_score_delegates() {
        let mut rng = crate::rng::rng_from_seed(15);
        let mut values = Matrix::zeros(25, 3);
        for r in 0..25 {
            for c in 0..3 {
                values.set(r, c, rng.random_range(0.3..0.9));
            }
        }
        let sv = score_lof(&rho_from(values.clone()), 4).unwrap();
        let direct = lof_scores(&values, 4).unwrap();
        assert_eq!(sv.values, direct);
        assert_eq!(sv.params.k, Some(4));
    }

    #[test]
    fn ocsvm_score_is_negated_decision() {
        let mut rng = crate::rng::rng_from_seed(18);
        let mut tr = Matrix::zeros(40, 2);
        for r in 0..40 {
            tr.set(r, 0, rng.random_range(0.6..0.9));
            tr.set(r, 1, rng.random_range(0.6..0.9));
        }
        let te = tr.select_rows(&(0..10).collect::<Vec<_>>());
        let train = rho_from(tr.clone());
        let test = rho_from(te.clone());
        let sv = score_ocsvm(&train, &test, 0.1, Some(1.5)).unwrap();
        let model = train_ocsvm(&tr, 0.1, 1.5).unwrap();
        for r in 0..10 {
            let dec = ocsvm_decision(&model, te.row(r)).unwrap();
            assert!((sv.values[r] + dec).abs() < 1e-15);
        }
    }

    fn random_dataset(n: usize, m: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = crate::rng::rng_from_seed(seed);
        let mut x = Matrix::zeros(n, m);
        let mut y = BitMatrix::zeros(n, d);
        for r in 0..n {
            for c in 0..m {
                x.set(r, c, rng.random_range(-2.0..2.0));
            }
            for c in 0..d {
                y.set(r, c, u8::from(rng.random_range(0.0..1.0) > 0.7));
            }
        }
        Dataset::new(x, y, vec![], vec![]).unwrap()
    }

    #[test]
    fn joint_lof_equals_direct_lof_on_concatenation() {
        let train = random_dataset(20, 2, 2, 21);
        let test = random_dataset(35, 2, 2, 22);
        let params = JointParams {
            k: 5,
            ..JointParams::default()
        };
        let sv = baseline_joint_scores(&train, &test, JointMethod::Lof, &params).unwrap();
        let std = Standardizer::fit(test.features());
        let concat = joint_matrix(&test, Some(&std));
        assert_eq!(sv.values, lof_scores(&concat, 5).unwrap());
    }

    #[test]
    fn joint_scores_without_labels_use_features_alone() {
        let train = random_dataset(20, 3, 0, 25);
        let test = random_dataset(30, 3, 0, 26);
        let params = JointParams {
            k: 4,
            ..JointParams::default()
        };
        let sv = baseline_joint_scores(&train, &test, JointMethod::Lof, &params).unwrap();
        let std = Standardizer::fit(test.features());
        let feats = std.transform(test.features());
        assert_eq!(sv.values, lof_scores(&feats, 4).unwrap());
    }

    #[test]
    fn percentile_rank_examples() {
        let sv = ScoreVector::new(
            Method::Lof,
            vec![3.0, 1.0, 2.0],
            ScoreParams::default(),
        )
        .unwrap();
        let ranks = percentile_rank(&sv).ranks;
        assert_eq!(ranks, vec![2.5 / 3.0, 0.5 / 3.0, 1.5 / 3.0]);

        let flat = ScoreVector::new(
            Method::Lof,
            vec![7.0; 5],
            ScoreParams::default(),
        )
        .unwrap();
        assert!(percentile_rank(&flat).ranks.iter().all(|&r| r == 0.5));
    }

    #[test]
    fn percentile_rank_invariant_under_monotone_transform() {
        let mut rng = crate::rng::rng_from_seed(33);
        let values: Vec<f64> = (0..50).map(|_| rng.random_range(-4.0..4.0)).collect();
        let transformed: Vec<f64> = values.iter().map(|&v| math::exp(0.5 * v) + 3.0).collect();
        let a = percentile_rank_values(&values);
        let b = percentile_rank_values(&transformed);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn single_label_comp_and_linf_order_identically() {
        let ds = random_dataset(30, 2, 1, 27);
        let model = train_dbr(&ds, Structure::Dbr, &LambdaPolicy::Fixed(1.0), 0).unwrap();
        let comp = score_comp(&model, &ds).unwrap();
        let rho = compute_rho(&model, &ds).unwrap();
        let linf = score_lr(&rho, NormOrder::LInf).unwrap();
        let rank_a = percentile_rank_values(&comp.values);
        let rank_b = percentile_rank_values(&linf.values);
        for (x, y) in rank_a.iter().zip(&rank_b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
