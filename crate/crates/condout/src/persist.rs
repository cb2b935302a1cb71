//! Versioned text serialization of trained models.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! loaded model reproduces probabilities bit-for-bit.

use std::fs;
use std::path::Path;

use condout_core::dbr::{DbrModel, Standardizer, Structure};
use condout_core::logistic::LogisticModel;

use crate::error::{AppError, AppResult};

const MAGIC: &str = "condout-model";
const VERSION: u32 = 1;

pub fn save_model(path: impl AsRef<Path>, model: &DbrModel) -> AppResult<()> {
    let path = path.as_ref();
    fs::write(path, to_string(model)).map_err(|e| AppError::io(path, e))
}

pub fn to_string(model: &DbrModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", MAGIC, VERSION));
    out.push_str(&format!("structure {}\n", model.structure.as_str()));
    out.push_str(&format!("feature_dim {}\n", model.feature_dim));
    out.push_str(&format!("labels {}\n", model.cpds.len()));
    out.push_str(&format!("label_order {}\n", join_usize(&model.label_order)));
    out.push_str(&format!("mean {}\n", join_f64(&model.standardizer.mean)));
    out.push_str(&format!("scale {}\n", join_f64(&model.standardizer.scale)));
    for (i, cpd) in model.cpds.iter().enumerate() {
        out.push_str(&format!("cpd {}\n", i));
        out.push_str(&format!("lambda {}\n", cpd.lambda));
        out.push_str(&format!("intercept {}\n", cpd.intercept));
        out.push_str(&format!("weights {}\n", join_f64(&cpd.weights)));
    }
    out.push_str("end\n");
    out
}

pub fn load_model(path: impl AsRef<Path>) -> AppResult<DbrModel> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    from_str(path, &content)
}

struct Cursor<'a> {
    path: &'a Path,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Cursor<'a> {
    /// Next line split as (line number, keyword, rest).
    fn expect(&mut self, keyword: &str) -> AppResult<(usize, &'a str)> {
        let (idx, line) = self.lines.next().ok_or_else(|| AppError::Parse {
            path: self.path.to_path_buf(),
            line: 0,
            message: format!("unexpected end of file, expected '{}'", keyword),
        })?;
        let line_no = idx + 1;
        let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
        if head != keyword {
            return Err(AppError::Parse {
                path: self.path.to_path_buf(),
                line: line_no,
                message: format!("expected '{}', found '{}'", keyword, head),
            });
        }
        Ok((line_no, rest.trim()))
    }
}

fn bad(path: &Path, line: usize, message: impl Into<String>) -> AppError {
    AppError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn from_str(path: &Path, content: &str) -> AppResult<DbrModel> {
    let mut cur = Cursor {
        path,
        lines: content.lines().enumerate(),
    };
    let (line, version) = cur.expect(MAGIC)?;
    let version: u32 = version
        .parse()
        .map_err(|_| bad(path, line, format!("bad version '{}'", version)))?;
    if version != VERSION {
        return Err(bad(path, line, format!("unsupported model version {}", version)));
    }
    let (line, structure) = cur.expect("structure")?;
    let structure = match structure {
        "DBR" => Structure::Dbr,
        "BR" => Structure::Br,
        other => return Err(bad(path, line, format!("unknown structure '{}'", other))),
    };
    let (line, fd) = cur.expect("feature_dim")?;
    let feature_dim: usize = fd
        .parse()
        .map_err(|_| bad(path, line, format!("bad feature_dim '{}'", fd)))?;
    let (line, labels) = cur.expect("labels")?;
    let d: usize = labels
        .parse()
        .map_err(|_| bad(path, line, format!("bad label count '{}'", labels)))?;
    let (line, order) = cur.expect("label_order")?;
    let label_order = parse_usizes(path, line, order)?;
    if label_order.len() != d {
        return Err(bad(path, line, format!("label_order needs {} entries", d)));
    }
    let (line, mean) = cur.expect("mean")?;
    let mean = parse_f64s(path, line, mean)?;
    let (line, scale) = cur.expect("scale")?;
    let scale = parse_f64s(path, line, scale)?;
    if mean.len() != feature_dim || scale.len() != feature_dim {
        return Err(bad(path, line, "standardizer length differs from feature_dim"));
    }
    let expected_dim = match structure {
        Structure::Dbr => feature_dim + d - 1,
        Structure::Br => feature_dim,
    };
    let mut cpds = Vec::with_capacity(d);
    for i in 0..d {
        let (line, idx) = cur.expect("cpd")?;
        if idx.parse::<usize>().ok() != Some(i) {
            return Err(bad(path, line, format!("expected cpd {}, found '{}'", i, idx)));
        }
        let (line, lambda) = cur.expect("lambda")?;
        let lambda: f64 = lambda
            .parse()
            .map_err(|_| bad(path, line, format!("bad lambda '{}'", lambda)))?;
        let (line, intercept) = cur.expect("intercept")?;
        let intercept: f64 = intercept
            .parse()
            .map_err(|_| bad(path, line, format!("bad intercept '{}'", intercept)))?;
        let (line, weights) = cur.expect("weights")?;
        let weights = parse_f64s(path, line, weights)?;
        if weights.len() != expected_dim {
            return Err(bad(
                path,
                line,
                format!("cpd {} needs {} weights, found {}", i, expected_dim, weights.len()),
            ));
        }
        cpds.push(LogisticModel {
            weights,
            intercept,
            lambda,
        });
    }
    cur.expect("end")?;
    Ok(DbrModel {
        structure,
        standardizer: Standardizer { mean, scale },
        label_order,
        cpds,
        feature_dim,
    })
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{}", v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_usize(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_f64s(path: &Path, line: usize, text: &str) -> AppResult<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| bad(path, line, format!("bad number '{}'", t)))
        })
        .collect()
}

fn parse_usizes(path: &Path, line: usize, text: &str) -> AppResult<Vec<usize>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| bad(path, line, format!("bad index '{}'", t)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use condout_core::dataset::Dataset;
    use condout_core::dbr::{compute_rho, train_dbr, LambdaPolicy};
    use condout_core::matrix::{BitMatrix, Matrix};
    use condout_core::rng::rng_from_seed;
    use rand::Rng;

    fn trained() -> (DbrModel, Dataset) {
        let mut rng = rng_from_seed(5);
        let n = 40;
        let m = 3;
        let d = 2;
        let x: Vec<f64> = (0..n * m).map(|_| rng.random_range(-2.0..2.0)).collect();
        let x = Matrix::from_vec(n, m, x).unwrap();
        let y: Vec<u8> = (0..n)
            .flat_map(|r| {
                let a = u8::from(x.get(r, 0) > 0.0);
                let b = u8::from(x.get(r, 1) + x.get(r, 2) > 0.5);
                [a, b]
            })
            .collect();
        let ds = Dataset::new(x, BitMatrix::from_vec(n, d, y).unwrap(), vec![], vec![]).unwrap();
        let model = train_dbr(&ds, Structure::Dbr, &LambdaPolicy::Fixed(0.05), 11).unwrap();
        (model, ds)
    }

    #[test]
    fn round_trip_reproduces_probabilities_bitwise() {
        let (model, ds) = trained();
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("model.txt");
        save_model(&file, &model).unwrap();
        let loaded = load_model(&file).unwrap();

        assert_eq!(loaded.structure, model.structure);
        assert_eq!(loaded.label_order, model.label_order);
        assert_eq!(loaded.feature_dim, model.feature_dim);
        let a = compute_rho(&model, &ds).unwrap();
        let b = compute_rho(&loaded, &ds).unwrap();
        for r in 0..ds.n_instances() {
            for c in 0..ds.n_labels() {
                assert_eq!(a.get(r, c).to_bits(), b.get(r, c).to_bits());
            }
        }
    }

    #[test]
    fn save_load_is_textually_stable() {
        let (model, _) = trained();
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("model.txt");
        save_model(&file, &model).unwrap();
        let text1 = std::fs::read_to_string(&file).unwrap();
        let loaded = load_model(&file).unwrap();
        save_model(&file, &loaded).unwrap();
        let text2 = std::fs::read_to_string(&file).unwrap();
        assert_eq!(text1, text2);
    }

    #[test]
    fn rejects_corrupt_files() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("model.txt");

        std::fs::write(&file, "condout-model 99\n").unwrap();
        assert!(matches!(load_model(&file), Err(AppError::Parse { line: 1, .. })));

        std::fs::write(&file, "condout-model 1\nstructure TREE\n").unwrap();
        assert!(matches!(load_model(&file), Err(AppError::Parse { line: 2, .. })));

        let (model, _) = trained();
        let mut text = to_string(&model);
        text = text.replace("end\n", "");
        let path = dir.path().join("truncated.txt");
        std::fs::write(&path, text).unwrap();
        assert!(load_model(&path).is_err());
    }
}
