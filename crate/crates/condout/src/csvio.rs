//! CSV dataset loading/saving and the tabular outputs of a run: score
//! tables and injection audits. Same column convention as ARFF: features
//! first, the last `d` columns are labels.

use std::path::Path;

use condout_core::dataset::Dataset;
use condout_core::inject::InjectionReport;
use condout_core::matrix::{BitMatrix, Matrix};
use condout_core::scoring::ScoreVector;

use crate::error::{AppError, AppResult};

/// Load a header-first CSV whose last `label_count` columns are labels.
pub fn load_csv(path: impl AsRef<Path>, label_count: usize) -> AppResult<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let width = header.len();
    if label_count < 1 || label_count >= width {
        return Err(AppError::config(format!(
            "label count {} must be in 1..{} for {} columns",
            label_count, width, width
        )));
    }
    let m = width - label_count;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0usize;
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != width {
            return Err(AppError::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected {} columns, got {}", width, record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| AppError::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected a number in column '{}', got '{}'", header[j], cell),
            })?;
            if j < m {
                features.push(v);
            } else if v == 0.0 || v == 1.0 {
                labels.push(v as u8);
            } else {
                return Err(AppError::Data {
                    path: path.to_path_buf(),
                    message: format!(
                        "line {}: label column '{}' has non-binary value {}",
                        line, header[j], v
                    ),
                });
            }
        }
        n += 1;
    }
    if n == 0 {
        return Err(AppError::Data {
            path: path.to_path_buf(),
            message: "no data rows".into(),
        });
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ds = Dataset::new(
        Matrix::from_vec(n, m, features)?,
        BitMatrix::from_vec(n, label_count, labels)?,
        header[..m].to_vec(),
        header[m..].to_vec(),
    )?;
    Ok(ds.with_name(&stem))
}

/// Write a dataset as CSV with a header row.
pub fn save_csv(path: impl AsRef<Path>, ds: &Dataset) -> AppResult<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<&str> = ds
        .feature_names()
        .iter()
        .chain(ds.label_names())
        .map(|s| s.as_str())
        .collect();
    writer.write_record(&header).map_err(|e| csv_error(path, e))?;
    for r in 0..ds.n_instances() {
        let mut row: Vec<String> = ds.features().row(r).iter().map(|v| format!("{}", v)).collect();
        row.extend(ds.labels().row(r).iter().map(|b| b.to_string()));
        writer.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| AppError::io(path, e))
}

/// Write a score table: instance id, per-method raw score and percentile
/// rank, and the ground-truth outlier flag.
pub fn write_score_table(
    path: impl AsRef<Path>,
    ids: &[usize],
    truth: &[u8],
    scores: &[(ScoreVector, Vec<f64>)],
) -> AppResult<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header = vec!["instance".to_string()];
    for (sv, _) in scores {
        header.push(format!("score_{}", sv.method.name()));
        header.push(format!("rank_{}", sv.method.name()));
    }
    header.push("outlier".to_string());
    writer.write_record(&header).map_err(|e| csv_error(path, e))?;
    for (i, (&id, &t)) in ids.iter().zip(truth).enumerate() {
        let mut row = vec![id.to_string()];
        for (sv, ranks) in scores {
            row.push(format!("{}", sv.values[i]));
            row.push(format!("{}", ranks[i]));
        }
        row.push(t.to_string());
        writer.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| AppError::io(path, e))
}

/// One score table row as read back from disk.
pub struct ScoreTable {
    pub methods: Vec<String>,
    /// Per-method raw scores, method-major.
    pub scores: Vec<Vec<f64>>,
    pub truth: Vec<u8>,
}

/// Read back a table written by [`write_score_table`].
pub fn read_score_table(path: impl AsRef<Path>) -> AppResult<ScoreTable> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let score_cols: Vec<(usize, String)> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.strip_prefix("score_").map(|m| (i, m.to_string())))
        .collect();
    let outlier_col = header.iter().position(|h| h == "outlier").ok_or_else(|| {
        AppError::Data {
            path: path.to_path_buf(),
            message: "score table lacks an 'outlier' column".into(),
        }
    })?;
    let mut table = ScoreTable {
        methods: score_cols.iter().map(|(_, m)| m.clone()).collect(),
        scores: vec![Vec::new(); score_cols.len()],
        truth: Vec::new(),
    };
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        for (k, (col, _)) in score_cols.iter().enumerate() {
            let v: f64 = record[*col].parse().map_err(|_| AppError::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: format!("bad score value '{}'", &record[*col]),
            })?;
            table.scores[k].push(v);
        }
        let t: u8 = record[outlier_col].parse().map_err(|_| AppError::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            message: format!("bad outlier flag '{}'", &record[outlier_col]),
        })?;
        table.truth.push(t);
    }
    Ok(table)
}

/// Write the injection audit: one row per flipped cell with old/new bits.
///
/// `clean` must be the labels BEFORE injection.
pub fn write_injection_audit(
    path: impl AsRef<Path>,
    report: &InjectionReport,
    clean: &BitMatrix,
) -> AppResult<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    writer
        .write_record(["instance", "label", "old", "new"])
        .map_err(|e| csv_error(path, e))?;
    for &(i, j) in &report.flipped_cells {
        let old = clean.get(i, j);
        writer
            .write_record([
                i.to_string(),
                j.to_string(),
                old.to_string(),
                (1 - old).to_string(),
            ])
            .map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| AppError::io(path, e))
}

/// Instance ids listed in an injection audit, deduplicated.
pub fn read_audit_instances(path: impl AsRef<Path>) -> AppResult<Vec<usize>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut ids = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let id: usize = record
            .get(0)
            .unwrap_or("")
            .parse()
            .map_err(|_| AppError::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: format!("bad instance id '{}'", record.get(0).unwrap_or("")),
            })?;
        ids.push(id);
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

fn csv_error(path: &Path, e: csv::Error) -> AppError {
    match e.kind() {
        csv::ErrorKind::Io(_) => {
            if let csv::ErrorKind::Io(io) = e.into_kind() {
                AppError::io(path, io)
            } else {
                unreachable!()
            }
        }
        _ => AppError::Data {
            path: path.to_path_buf(),
            message: e.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use condout_core::scoring::{percentile_rank, Method, ScoreParams};

    fn toy() -> Dataset {
        Dataset::new(
            Matrix::from_vec(3, 2, vec![0.5, -1.0, 2.0, 3.5, -0.25, 4.0]).unwrap(),
            BitMatrix::from_vec(3, 2, vec![1, 0, 0, 1, 1, 1]).unwrap(),
            vec![],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn dataset_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("toy.csv");
        let ds = toy();
        save_csv(&file, &ds).unwrap();
        let back = load_csv(&file, 2).unwrap();
        assert_eq!(back.name(), "toy");
        for r in 0..3 {
            assert_eq!(back.features().row(r), ds.features().row(r));
            assert_eq!(back.labels().row(r), ds.labels().row(r));
        }
    }

    #[test]
    fn bad_label_value_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("bad.csv");
        std::fs::write(&file, "a,b,y\n1,2,0\n3,4,2\n").unwrap();
        assert!(matches!(load_csv(&file, 1), Err(AppError::Data { .. })));
    }

    #[test]
    fn score_table_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("scores.csv");
        let sv = ScoreVector {
            method: Method::Lof,
            values: vec![1.25, 0.5, 3.0],
            params: ScoreParams::default(),
            note: None,
        };
        let ranks = percentile_rank(&sv).ranks;
        write_score_table(&file, &[0, 1, 2], &[0, 0, 1], &[(sv.clone(), ranks)]).unwrap();
        let table = read_score_table(&file).unwrap();
        assert_eq!(table.methods, vec!["LOF".to_string()]);
        assert_eq!(table.scores[0], sv.values);
        assert_eq!(table.truth, vec![0, 0, 1]);
    }

    #[test]
    fn audit_records_flips() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("audit.csv");
        let ds = toy();
        let (_, report) =
            condout_core::inject::inject_variable_noise(&ds, 0.5, 9).unwrap();
        write_injection_audit(&file, &report, ds.labels()).unwrap();
        let text = std::fs::read_to_string(&file).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "instance,label,old,new");
        assert_eq!(text.lines().count(), 1 + report.flipped_cells.len());
        for line in lines {
            let cells: Vec<&str> = line.split(',').collect();
            let old: u8 = cells[2].parse().unwrap();
            let new: u8 = cells[3].parse().unwrap();
            assert_eq!(old, 1 - new);
        }
    }
}
