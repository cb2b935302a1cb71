//! ARFF reader and writer for multi-label datasets.
//!
//! Labels are the last `d` attributes by convention; `d` always comes from
//! the caller. Dense and sparse (`{index value, ...}`) data rows are both
//! accepted. Feature attributes must be numeric (or the binary nominal
//! `{0,1}`, which is coerced); anything else is rejected. Sparse rows treat
//! unmentioned attributes as 0.

use std::fs;
use std::path::Path;

use condout_core::dataset::Dataset;
use condout_core::matrix::{BitMatrix, Matrix};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AttrKind {
    Numeric,
    BinaryNominal,
}

struct Header {
    relation: String,
    names: Vec<String>,
    kinds: Vec<AttrKind>,
    data_line: usize,
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> AppError {
    AppError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    if s.len() >= 2
        && ((s.starts_with('\'') && s.ends_with('\'')) || (s.starts_with('"') && s.ends_with('"')))
    {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

/// Attribute name plus remaining type text, honoring quoted names.
fn split_attribute(rest: &str) -> Option<(&str, &str)> {
    let rest = rest.trim();
    if rest.starts_with('\'') || rest.starts_with('"') {
        let quote = rest.chars().next().unwrap();
        let end = rest[1..].find(quote)? + 1;
        Some((&rest[..=end], rest[end + 1..].trim_start()))
    } else {
        let cut = rest.find(char::is_whitespace)?;
        Some((&rest[..cut], rest[cut..].trim_start()))
    }
}

fn parse_kind(path: &Path, line: usize, type_text: &str) -> AppResult<AttrKind> {
    let t = type_text.trim();
    let lower = t.to_ascii_lowercase();
    if lower == "numeric" || lower == "real" || lower == "integer" {
        return Ok(AttrKind::Numeric);
    }
    if t.starts_with('{') && t.ends_with('}') {
        let values: Vec<&str> = t[1..t.len() - 1]
            .split(',')
            .map(|v| unquote(v.trim()))
            .collect();
        if !values.is_empty() && values.iter().all(|v| *v == "0" || *v == "1") {
            return Ok(AttrKind::BinaryNominal);
        }
        return Err(parse_err(
            path,
            line,
            format!("nominal attribute {{{}}} is not binary 0/1", t[1..t.len() - 1].trim()),
        ));
    }
    Err(parse_err(path, line, format!("unsupported attribute type '{}'", t)))
}

fn parse_header(path: &Path, lines: &[(usize, &str)]) -> AppResult<Header> {
    let mut relation = String::new();
    let mut names = Vec::new();
    let mut kinds = Vec::new();
    for (idx, (line_no, text)) in lines.iter().enumerate() {
        let lower = text.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            relation = unquote(text[9..].trim()).to_string();
        } else if lower.starts_with("@attribute") {
            let rest = &text[10..];
            let (name, type_text) = split_attribute(rest)
                .ok_or_else(|| parse_err(path, *line_no, "attribute line needs a name and a type"))?;
            names.push(unquote(name).to_string());
            kinds.push(parse_kind(path, *line_no, type_text)?);
        } else if lower.starts_with("@data") {
            if names.is_empty() {
                return Err(parse_err(path, *line_no, "data section with zero attributes"));
            }
            return Ok(Header {
                relation,
                names,
                kinds,
                data_line: idx + 1,
            });
        } else {
            return Err(parse_err(
                path,
                *line_no,
                format!("unexpected line in header: '{}'", text),
            ));
        }
    }
    let last = lines.last().map(|(n, _)| *n).unwrap_or(0);
    Err(parse_err(path, last, "missing @data section"))
}

fn parse_value(path: &Path, line: usize, text: &str) -> AppResult<f64> {
    let t = unquote(text);
    if t == "?" {
        return Err(parse_err(path, line, "missing values ('?') are not supported"));
    }
    t.parse::<f64>()
        .map_err(|_| parse_err(path, line, format!("expected a number, got '{}'", t)))
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(path, line, format!("non-finite value '{}'", t)))
            }
        })
}

fn parse_dense_row(path: &Path, line: usize, text: &str, width: usize) -> AppResult<Vec<f64>> {
    let cells: Vec<&str> = text.split(',').collect();
    if cells.len() != width {
        return Err(parse_err(
            path,
            line,
            format!("expected {} values, got {}", width, cells.len()),
        ));
    }
    cells
        .iter()
        .map(|c| parse_value(path, line, c.trim()))
        .collect()
}

fn parse_sparse_row(path: &Path, line: usize, text: &str, width: usize) -> AppResult<Vec<f64>> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| parse_err(path, line, "sparse row must be wrapped in { }"))?;
    let mut row = vec![0.0; width];
    for pair in inner.split(',') {
        let pair = pair.trim();
        if pair.is_empty() {
            continue;
        }
        let cut = pair
            .find(char::is_whitespace)
            .ok_or_else(|| parse_err(path, line, format!("sparse entry '{}' needs 'index value'", pair)))?;
        let index: usize = pair[..cut]
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad sparse index '{}'", &pair[..cut])))?;
        if index >= width {
            return Err(parse_err(
                path,
                line,
                format!("sparse index {} outside 0..{}", index, width),
            ));
        }
        row[index] = parse_value(path, line, pair[cut..].trim())?;
    }
    Ok(row)
}

/// Load an ARFF file whose last `label_count` attributes are the labels.
pub fn load_arff(path: impl AsRef<Path>, label_count: usize) -> AppResult<Dataset> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    from_str(path, &content, label_count)
}

/// Parse ARFF text; `path` is used only for error reporting.
pub fn from_str(path: &Path, content: &str, label_count: usize) -> AppResult<Dataset> {
    let lines: Vec<(usize, &str)> = content
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
        .collect();
    if lines.is_empty() {
        return Err(parse_err(path, 1, "empty file"));
    }
    let header = parse_header(path, &lines)?;
    let width = header.names.len();
    if label_count < 1 || label_count >= width {
        return Err(AppError::config(format!(
            "label count {} must be in 1..{} for {} attributes",
            label_count, width, width
        )));
    }
    let m = width - label_count;
    let mut features = Vec::with_capacity(lines.len().saturating_sub(header.data_line) * m);
    let mut labels = Vec::new();
    let mut n = 0usize;
    for (line_no, text) in &lines[header.data_line..] {
        let row = if text.starts_with('{') {
            parse_sparse_row(path, *line_no, text, width)?
        } else {
            parse_dense_row(path, *line_no, text, width)?
        };
        let binary_violation = row.iter().enumerate().find(|(j, v)| {
            (*j >= m || header.kinds[*j] == AttrKind::BinaryNominal) && **v != 0.0 && **v != 1.0
        });
        if let Some((j, v)) = binary_violation {
            return Err(AppError::Data {
                path: path.to_path_buf(),
                message: format!(
                    "line {}: binary attribute '{}' has non-binary value {}",
                    line_no, header.names[j], v
                ),
            });
        }
        labels.extend(row[m..].iter().map(|v| *v as u8));
        features.extend_from_slice(&row[..m]);
        n += 1;
    }
    if n == 0 {
        return Err(parse_err(path, lines.last().unwrap().0, "no data rows"));
    }
    let ds = Dataset::new(
        Matrix::from_vec(n, m, features)?,
        BitMatrix::from_vec(n, label_count, labels)?,
        header.names[..m].iter().map(|s| s.to_string()).collect(),
        header.names[m..].iter().map(|s| s.to_string()).collect(),
    )?;
    Ok(ds.with_name(&header.relation))
}

/// Write a dataset as dense ARFF (features numeric, labels `{0,1}`).
pub fn save_arff(path: impl AsRef<Path>, ds: &Dataset) -> AppResult<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let name = if ds.name().is_empty() { "dataset" } else { ds.name() };
    out.push_str(&format!("@relation {}\n\n", quote_if_needed(name)));
    for name in ds.feature_names() {
        out.push_str(&format!("@attribute {} numeric\n", quote_if_needed(name)));
    }
    for name in ds.label_names() {
        out.push_str(&format!("@attribute {} {{0,1}}\n", quote_if_needed(name)));
    }
    out.push_str("\n@data\n");
    for r in 0..ds.n_instances() {
        let mut cells: Vec<String> = ds.features().row(r).iter().map(|v| format!("{}", v)).collect();
        cells.extend(ds.labels().row(r).iter().map(|b| format!("{}", b)));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| AppError::io(path, e))
}

fn quote_if_needed(name: &str) -> String {
    if name.contains(char::is_whitespace) || name.contains(',') {
        format!("'{}'", name)
    } else if name.is_empty() {
        "unnamed".to_string()
    } else {
        name.to_string()
    }
}
