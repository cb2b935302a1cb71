//! Detection-quality metrics (ROC and precision-recall areas) and the
//! statistical comparison machinery: paired t-tests and the Friedman test
//! with Holm's step-down procedure against the best-ranked method.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{argument, Error, Result};
use crate::math;
use crate::scoring::percentile_rank_values;
use crate::special::{chi2_sf, normal_sf, t_two_sided_p};

/// Average 1-based ranks of `values`, ties shared.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Area under the ROC curve as the exact Mann-Whitney statistic
/// `P(score_pos > score_neg) + 0.5 P(tie)`.
pub fn roc_auc(scores: &[f64], truth: &[u8]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::Dimension {
            what: "truth length",
            expected: scores.len(),
            actual: truth.len(),
        });
    }
    let pos = truth.iter().filter(|&&t| t == 1).count();
    let neg = truth.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedMetric(alloc::format!(
            "ROC AUC needs both classes (positives: {}, negatives: {})",
            pos,
            neg
        )));
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks
        .iter()
        .zip(truth)
        .filter(|(_, &t)| t == 1)
        .map(|(r, _)| r)
        .sum();
    let p = pos as f64;
    let n = neg as f64;
    // Symmetric form: negating the scores negates the correction term
    // exactly, so auc(s) + auc(-s) = 1 without rounding slack.
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Ok(0.5 + (u - p * n / 2.0) / (p * n))
}

/// Area under the precision-recall curve with step-wise interpolation over
/// descending score thresholds; tied scores collapse into one threshold.
pub fn pr_auc(scores: &[f64], truth: &[u8]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::Dimension {
            what: "truth length",
            expected: scores.len(),
            actual: truth.len(),
        });
    }
    let total_pos = truth.iter().filter(|&&t| t == 1).count();
    if total_pos == 0 {
        return Err(Error::UndefinedMetric(String::from(
            "PR AUC needs at least one positive",
        )));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut prev_recall = 0.0;
    let mut area = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        for &idx in &order[i..=j] {
            if truth[idx] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        let recall = tp as f64 / total_pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    Ok(area)
}

/// Paired t-test outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

/// Two-sided paired t-test on per-fold differences `a - b`.
pub fn paired_ttest(a: &[f64], b: &[f64], alpha: f64) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            what: "paired sample length",
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(argument("paired t-test needs at least 2 pairs"));
    }
    let n = a.len() as f64;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
    let sd = math::sqrt(var);
    if sd == 0.0 {
        if mean == 0.0 {
            return Ok(TTest {
                t: 0.0,
                p: 1.0,
                significant: false,
            });
        }
        // Constant nonzero difference: unbounded evidence.
        return Ok(TTest {
            t: if mean > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            p: 0.0,
            significant: true,
        });
    }
    let t = mean / (sd / math::sqrt(n));
    let p = t_two_sided_p(t, n - 1.0)?;
    Ok(TTest {
        t,
        p,
        significant: p <= alpha,
    })
}

/// One Holm step-down comparison against the best-ranked method.
#[derive(Debug, Clone, PartialEq)]
pub struct HolmEntry {
    pub method: usize,
    pub z: f64,
    pub p: f64,
    /// Step-down threshold this p-value was held against.
    pub threshold: f64,
    pub significant: bool,
}

/// Friedman test outcome with Holm post-hoc comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanReport {
    /// Mean rank per method (rank 1 = best, i.e. highest score).
    pub mean_ranks: Vec<f64>,
    pub chi_square: f64,
    pub p_value: f64,
    /// Index of the best-ranked method.
    pub best: usize,
    pub holm: Vec<HolmEntry>,
}

/// Friedman test over a methods-by-datasets score matrix, then Holm's
/// step-down procedure comparing every method against the best-ranked one.
pub fn friedman_holm(scores: &[Vec<f64>], alpha: f64) -> Result<FriedmanReport> {
    let k = scores.len();
    if k < 2 {
        return Err(argument("need at least 2 methods"));
    }
    let n = scores[0].len();
    if n < 2 {
        return Err(argument("need at least 2 datasets"));
    }
    if scores.iter().any(|row| row.len() != n) {
        return Err(argument("methods have unequal dataset counts"));
    }

    let mut rank_sums = vec![0.0; k];
    for j in 0..n {
        let column: Vec<f64> = (0..k).map(|i| -scores[i][j]).collect();
        // Ranks ascend with -score, so rank 1 lands on the highest score.
        let ranks = average_ranks(&column);
        for (sum, r) in rank_sums.iter_mut().zip(&ranks) {
            *sum += r;
        }
    }
    let mean_ranks: Vec<f64> = rank_sums.iter().map(|s| s / n as f64).collect();

    let kf = k as f64;
    let nf = n as f64;
    let sum_sq: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let chi_square =
        (12.0 * nf / (kf * (kf + 1.0))) * (sum_sq - kf * (kf + 1.0) * (kf + 1.0) / 4.0);
    let chi_square = chi_square.max(0.0);
    let p_value = chi2_sf(chi_square, kf - 1.0)?;

    let best = mean_ranks
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(core::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let se = math::sqrt(kf * (kf + 1.0) / (6.0 * nf));
    let mut entries: Vec<HolmEntry> = (0..k)
        .filter(|&i| i != best)
        .map(|i| {
            let z = (mean_ranks[i] - mean_ranks[best]) / se;
            HolmEntry {
                method: i,
                z,
                p: 2.0 * normal_sf(math::abs(z)),
                threshold: 0.0,
                significant: false,
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        a.p.partial_cmp(&b.p)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.method.cmp(&b.method))
    });
    let m = entries.len();
    let mut still_rejecting = true;
    for (i, e) in entries.iter_mut().enumerate() {
        e.threshold = alpha / (m - i) as f64;
        e.significant = still_rejecting && e.p <= e.threshold;
        if !e.significant {
            still_rejecting = false;
        }
    }
    Ok(FriedmanReport {
        mean_ranks,
        chi_square,
        p_value,
        best,
        holm: entries,
    })
}

/// Spearman rank correlation.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            what: "sample length",
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(argument("need at least 2 pairs"));
    }
    let ra = percentile_rank_values(a);
    let rb = percentile_rank_values(b);
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::UndefinedMetric(String::from(
            "rank correlation undefined for constant input",
        )));
    }
    Ok(cov / math::sqrt(va * vb))
}

/// Sample mean and standard deviation (n-1 denominator; 0 for singletons).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, math::sqrt(var))
}

/// Aggregated per-method, per-fold results with the pairwise t-test matrix.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub methods: Vec<String>,
    /// AUC per method per fold; `None` marks a fold where the metric was
    /// undefined (for example, an injection drew no outliers).
    pub auc_folds: Vec<Vec<Option<f64>>>,
    pub pr_folds: Vec<Vec<Option<f64>>>,
    pub auc_mean: Vec<f64>,
    pub auc_std: Vec<f64>,
    pub pr_mean: Vec<f64>,
    pub pr_std: Vec<f64>,
    /// `ttest_significant[i][j]`: methods i and j differ on AUC folds.
    pub ttest_significant: Vec<Vec<bool>>,
    pub ttest_t: Vec<Vec<f64>>,
    pub notes: Vec<String>,
}

impl EvalReport {
    /// Aggregate fold-level metrics. Every method must carry the same fold
    /// count; missing (undefined) cells are skipped in means and force the
    /// t-test against that method to be skipped for those folds.
    pub fn from_folds(
        methods: Vec<String>,
        auc_folds: Vec<Vec<Option<f64>>>,
        pr_folds: Vec<Vec<Option<f64>>>,
        alpha: f64,
    ) -> Result<EvalReport> {
        let k = methods.len();
        if auc_folds.len() != k || pr_folds.len() != k {
            return Err(argument("per-method fold lists do not match methods"));
        }
        let folds = auc_folds.first().map(|f| f.len()).unwrap_or(0);
        if auc_folds.iter().any(|f| f.len() != folds)
            || pr_folds.iter().any(|f| f.len() != folds)
        {
            return Err(argument("methods have unequal fold counts"));
        }
        for row in auc_folds.iter().chain(pr_folds.iter()) {
            for v in row.iter().flatten() {
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::Numeric(alloc::format!(
                        "metric value {} outside [0, 1]",
                        v
                    )));
                }
            }
        }
        let summarize = |rows: &Vec<Vec<Option<f64>>>| -> (Vec<f64>, Vec<f64>) {
            let mut means = Vec::with_capacity(k);
            let mut stds = Vec::with_capacity(k);
            for row in rows {
                let present: Vec<f64> = row.iter().flatten().copied().collect();
                let (m, s) = mean_std(&present);
                means.push(m);
                stds.push(s);
            }
            (means, stds)
        };
        let (auc_mean, auc_std) = summarize(&auc_folds);
        let (pr_mean, pr_std) = summarize(&pr_folds);

        let mut ttest_significant = vec![vec![false; k]; k];
        let mut ttest_t = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in (i + 1)..k {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for f in 0..folds {
                    if let (Some(x), Some(y)) = (auc_folds[i][f], auc_folds[j][f]) {
                        a.push(x);
                        b.push(y);
                    }
                }
                if a.len() >= 2 {
                    let tt = paired_ttest(&a, &b, alpha)?;
                    ttest_significant[i][j] = tt.significant;
                    ttest_significant[j][i] = tt.significant;
                    ttest_t[i][j] = tt.t;
                    ttest_t[j][i] = -tt.t;
                }
            }
        }
        Ok(EvalReport {
            methods,
            auc_folds,
            pr_folds,
            auc_mean,
            auc_std,
            pr_mean,
            pr_std,
            ttest_significant,
            ttest_t,
            notes: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn roc_trivial_cases() {
        let auc = roc_auc(&[0.1, 0.2, 0.8, 0.9], &[0, 0, 1, 1]).unwrap();
        assert_eq!(auc, 1.0);
        let auc = roc_auc(&[0.5; 6], &[0, 1, 0, 1, 0, 1]).unwrap();
        assert_eq!(auc, 0.5);
        assert!(roc_auc(&[0.1, 0.2], &[1, 1]).is_err());
    }

    fn pair_counting_auc(scores: &[f64], truth: &[u8]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &si) in scores.iter().enumerate() {
            if truth[i] != 1 {
                continue;
            }
            for (j, &sj) in scores.iter().enumerate() {
                if truth[j] != 0 {
                    continue;
                }
                pairs += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn roc_matches_pair_counting() {
        let mut rng = crate::rng::rng_from_seed(71);
        for _ in 0..5 {
            let n = 60;
            let scores: Vec<f64> = (0..n)
                .map(|_| (rng.random_range(0..20) as f64) / 10.0)
                .collect();
            let truth: Vec<u8> = (0..n).map(|_| rng.random_range(0..2) as u8).collect();
            if truth.iter().all(|&t| t == truth[0]) {
                continue;
            }
            let a = roc_auc(&scores, &truth).unwrap();
            let b = pair_counting_auc(&scores, &truth);
            assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn roc_negation_sums_to_one_exactly() {
        let mut rng = crate::rng::rng_from_seed(72);
        let scores: Vec<f64> = (0..31).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut truth: Vec<u8> = (0..31).map(|_| rng.random_range(0..2) as u8).collect();
        truth[0] = 1;
        truth[1] = 0;
        let a = roc_auc(&scores, &truth).unwrap();
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let b = roc_auc(&neg, &truth).unwrap();
        assert_eq!(a + b, 1.0);
    }

    #[test]
    fn roc_invariant_under_monotone_transform() {
        let scores = [0.3, -0.2, 1.4, 0.0, 0.7];
        let truth = [1, 0, 1, 0, 0];
        let a = roc_auc(&scores, &truth).unwrap();
        let squashed: Vec<f64> = scores.iter().map(|&s| math::exp(s)).collect();
        let b = roc_auc(&squashed, &truth).unwrap();
        assert_eq!(a, b);
    }

    fn threshold_enumeration_pr(scores: &[f64], truth: &[u8]) -> f64 {
        let total_pos = truth.iter().filter(|&&t| t == 1).count() as f64;
        let mut thresholds: Vec<f64> = scores.to_vec();
        thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
        thresholds.dedup();
        let mut prev_recall = 0.0;
        let mut area = 0.0;
        for t in thresholds {
            let mut tp = 0.0;
            let mut fp = 0.0;
            for (s, &y) in scores.iter().zip(truth) {
                if *s >= t {
                    if y == 1 {
                        tp += 1.0;
                    } else {
                        fp += 1.0;
                    }
                }
            }
            let recall = tp / total_pos;
            let precision = tp / (tp + fp);
            area += (recall - prev_recall) * precision;
            prev_recall = recall;
        }
        area
    }

    #[test]
    fn pr_trivial_and_oracle_cases() {
        assert_eq!(
            pr_auc(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0]).unwrap(),
            1.0
        );
        let flat = pr_auc(&[0.5; 8], &[1, 0, 0, 1, 0, 0, 0, 0]).unwrap();
        assert_eq!(flat, 2.0 / 8.0);
        assert!(pr_auc(&[0.1, 0.2], &[0, 0]).is_err());

        let mut rng = crate::rng::rng_from_seed(73);
        for _ in 0..10 {
            let n = 30;
            let scores: Vec<f64> = (0..n)
                .map(|_| (rng.random_range(0..12) as f64) / 4.0)
                .collect();
            let mut truth: Vec<u8> = (0..n).map(|_| rng.random_range(0..2) as u8).collect();
            truth[0] = 1;
            let a = pr_auc(&scores, &truth).unwrap();
            let b = threshold_enumeration_pr(&scores, &truth);
            assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn ttest_textbook_and_degenerate_cases() {
        let a: Vec<f64> = (1..=10).map(|v| v as f64).collect();
        let b = vec![0.0; 10];
        let tt = paired_ttest(&a, &b, 0.05).unwrap();
        assert!((tt.t - 5.744562646538029).abs() < 1e-6);
        assert!(tt.significant);

        let same = paired_ttest(&a, &a, 0.05).unwrap();
        assert_eq!(same.t, 0.0);
        assert!(!same.significant);

        let swapped = paired_ttest(&b, &a, 0.05).unwrap();
        assert_eq!(swapped.t, -tt.t);
    }

    #[test]
    fn friedman_dominance_and_tie_patterns() {
        // Strict dominance: method 0 best on all 4 datasets, method 2 worst.
        let scores = vec![
            vec![0.9, 0.8, 0.95, 0.85],
            vec![0.7, 0.6, 0.75, 0.65],
            vec![0.1, 0.2, 0.15, 0.25],
        ];
        let rep = friedman_holm(&scores, 0.05).unwrap();
        assert_eq!(rep.mean_ranks, vec![1.0, 2.0, 3.0]);
        assert_eq!(rep.best, 0);

        // All methods identical: uniform ranks, nothing significant.
        let flat = vec![vec![0.5; 3]; 4];
        let rep = friedman_holm(&flat, 0.05).unwrap();
        assert!(rep.mean_ranks.iter().all(|&r| r == 2.5));
        assert_eq!(rep.chi_square, 0.0);
        assert!(rep.holm.iter().all(|e| !e.significant));
    }

    #[test]
    fn friedman_eight_method_rank_extremes() {
        // 8 methods x 6 datasets; method 0 always best, method 7 always worst.
        let mut scores = Vec::new();
        for m in 0..8 {
            scores.push((0..6).map(|d| 1.0 - 0.1 * m as f64 + 0.001 * d as f64).collect());
        }
        let rep = friedman_holm(&scores, 0.05).unwrap();
        assert_eq!(rep.mean_ranks[0], 1.0);
        assert_eq!(rep.mean_ranks[7], 8.0);
        let worst = rep.holm.iter().find(|e| e.method == 7).unwrap();
        assert!(worst.significant);
    }

    #[test]
    fn spearman_signs() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman(&a, &[2.0, 3.0, 9.0, 11.0]).unwrap(), 1.0);
        assert_eq!(spearman(&a, &[5.0, 4.0, 3.0, 1.0]).unwrap(), -1.0);
        assert!(spearman(&a, &[1.0; 4]).is_err());
    }

    #[test]
    fn report_aggregates_and_flags() {
        let methods = vec![String::from("A"), String::from("B")];
        let auc = vec![
            vec![Some(0.9), Some(0.92), Some(0.88), Some(0.91)],
            vec![Some(0.6), Some(0.62), Some(0.58), Some(0.61)],
        ];
        let pr = auc.clone();
        let rep = EvalReport::from_folds(methods, auc, pr, 0.05).unwrap();
        assert!((rep.auc_mean[0] - 0.9025).abs() < 1e-12);
        assert!(rep.ttest_significant[0][1]);
        assert_eq!(rep.ttest_t[0][1], -rep.ttest_t[1][0]);
    }

    #[test]
    fn report_rejects_out_of_range_metric() {
        let methods = vec![String::from("A")];
        let auc = vec![vec![Some(1.2)]];
        assert!(EvalReport::from_folds(methods, auc.clone(), auc, 0.05).is_err());
    }
}
