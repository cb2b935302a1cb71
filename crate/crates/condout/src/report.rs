//! Human-readable run reports and plot-ready CSV outputs.

use std::path::Path;

use condout_core::dataset::Dataset;
use condout_core::eval::EvalReport;

use crate::error::{AppError, AppResult};

/// Key-value dataset summary block (the usual corpus statistics).
pub fn stats_block(ds: &Dataset) -> String {
    format!(
        "name={}\ninstances={}\nfeatures={}\nlabels={}\nlabel_cardinality={:.3}\ndistinct_label_sets={}\n",
        if ds.name().is_empty() { "unnamed" } else { ds.name() },
        ds.n_instances(),
        ds.n_features(),
        ds.n_labels(),
        ds.label_cardinality(),
        ds.distinct_label_sets()
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Auc,
    AucPr,
}

impl MetricKind {
    fn label(&self) -> &'static str {
        match self {
            MetricKind::Auc => "AUC",
            MetricKind::AucPr => "AUC-PR",
        }
    }

    fn means<'a>(&self, report: &'a EvalReport) -> (&'a [f64], &'a [f64]) {
        match self {
            MetricKind::Auc => (&report.auc_mean, &report.auc_std),
            MetricKind::AucPr => (&report.pr_mean, &report.pr_std),
        }
    }
}

/// Fixed-width mean (std) table with markers: `*` best mean, `=` not
/// significantly different from the best by the paired t-test.
pub fn metric_table(report: &EvalReport, metric: MetricKind) -> String {
    let (means, stds) = metric.means(report);
    let best = best_index(means);
    let name_width = report
        .methods
        .iter()
        .map(|m| m.len())
        .max()
        .unwrap_or(6)
        .max(6);

    let mut out = format!("{:<width$}  {:>7} {:>9}  flag\n", "method", metric.label(), "(std)", width = name_width);
    for (i, name) in report.methods.iter().enumerate() {
        let flag = match best {
            Some(b) if b == i => "*",
            Some(b) if !report.ttest_significant[b][i] => "=",
            _ => "",
        };
        if means[i].is_nan() {
            out.push_str(&format!("{:<width$}  {:>7} {:>9}  {}\n", name, "-", "-", flag, width = name_width));
        } else {
            out.push_str(&format!(
                "{:<width$}  {:>7.3} {:>9}  {}\n",
                name,
                means[i],
                format!("({:.3})", stds[i]),
                flag,
                width = name_width
            ));
        }
    }
    out.push_str("\n* best mean; = not significantly different from best (paired t-test, alpha 0.05)\n");
    out.push_str("post-hoc convention: Holm step-down, one-vs-best\n");
    out
}

fn best_index(means: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, m) in means.iter().enumerate() {
        if m.is_nan() {
            continue;
        }
        if best.map(|b| *m > means[b]).unwrap_or(true) {
            best = Some(i);
        }
    }
    best
}

/// Grouped-bar data: one row per method with mean and std of both metrics.
pub fn write_method_bars(path: impl AsRef<Path>, report: &EvalReport) -> AppResult<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| AppError::Data { path: path.into(), message: e.to_string() })?;
    writer
        .write_record(["method", "mean_auc", "std_auc", "mean_auc_pr", "std_auc_pr"])
        .map_err(|e| AppError::Data { path: path.into(), message: e.to_string() })?;
    for (i, name) in report.methods.iter().enumerate() {
        writer
            .write_record([
                name.clone(),
                fmt_opt(report.auc_mean[i]),
                fmt_opt(report.auc_std[i]),
                fmt_opt(report.pr_mean[i]),
                fmt_opt(report.pr_std[i]),
            ])
            .map_err(|e| AppError::Data { path: path.into(), message: e.to_string() })?;
    }
    writer.flush().map_err(|e| AppError::io(path, e))
}

/// Line-plot data for the dimension sweep: p against mean AUC-PR per method.
pub fn write_sweep_curve(path: impl AsRef<Path>, per_p: &[(usize, EvalReport)]) -> AppResult<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| AppError::Data { path: path.into(), message: e.to_string() })?;
    writer
        .write_record(["p", "method", "mean_auc_pr", "std_auc_pr"])
        .map_err(|e| AppError::Data { path: path.into(), message: e.to_string() })?;
    for (p, report) in per_p {
        for (i, name) in report.methods.iter().enumerate() {
            writer
                .write_record([
                    p.to_string(),
                    name.clone(),
                    fmt_opt(report.pr_mean[i]),
                    fmt_opt(report.pr_std[i]),
                ])
                .map_err(|e| AppError::Data { path: path.into(), message: e.to_string() })?;
        }
    }
    writer.flush().map_err(|e| AppError::io(path, e))
}

fn fmt_opt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{}", v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_report() -> EvalReport {
        EvalReport::from_folds(
            vec!["A".into(), "B".into()],
            vec![
                vec![Some(0.9), Some(0.95), Some(0.92)],
                vec![Some(0.5), Some(0.55), Some(0.52)],
            ],
            vec![
                vec![Some(0.8), Some(0.85), Some(0.82)],
                vec![Some(0.3), Some(0.35), Some(0.32)],
            ],
            0.05,
        )
        .unwrap()
    }

    #[test]
    fn table_marks_best() {
        let text = metric_table(&toy_report(), MetricKind::Auc);
        let line_a = text.lines().find(|l| l.starts_with('A')).unwrap();
        assert!(line_a.contains('*'), "{}", text);
        assert!(text.contains("0.923"));
    }

    #[test]
    fn csv_outputs_have_expected_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let report = toy_report();

        let bars = dir.path().join("bars.csv");
        write_method_bars(&bars, &report).unwrap();
        let text = std::fs::read_to_string(&bars).unwrap();
        assert_eq!(text.lines().count(), 3);

        let curve = dir.path().join("curve.csv");
        write_sweep_curve(&curve, &[(1, report.clone()), (3, report)]).unwrap();
        let text = std::fs::read_to_string(&curve).unwrap();
        assert_eq!(text.lines().count(), 1 + 2 * 2);
        assert!(text.lines().nth(1).unwrap().starts_with("1,A,"));
    }
}
