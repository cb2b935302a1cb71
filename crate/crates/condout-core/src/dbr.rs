//! Dependent Binary Relevance model: one conditional probability model per
//! label, each regressing its label on the features plus all sibling labels
//! (or on the features alone for the plain binary-relevance variant), the
//! per-label probability transform of observed bits, and the
//! pseudo-likelihood product.

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{argument, Error, Result};
use crate::logistic::{select_lambda, train_logistic, LogisticModel};
use crate::math;
use crate::matrix::Matrix;
use crate::rng::derive_seed;
use crate::PROB_CLIP;

/// Dependency structure of the per-label models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    /// Label i conditions on the features and every other label.
    Dbr,
    /// Label i conditions on the features only.
    Br,
}

impl Structure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Structure::Dbr => "DBR",
            Structure::Br => "BR",
        }
    }
}

/// How the per-label L2 strength is chosen.
#[derive(Debug, Clone)]
pub enum LambdaPolicy {
    Fixed(f64),
    CrossValidated { grid: Vec<f64>, folds: usize },
}

/// Shift/scale transform fitted on training features and reused verbatim at
/// test time. Columns with zero variance keep scale 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Standardizer {
        let n = x.rows().max(1) as f64;
        let mean = x.col_means();
        let mut var = alloc::vec![0.0; x.cols()];
        for row in x.iter_rows() {
            for (v, (xv, m)) in var.iter_mut().zip(row.iter().zip(&mean)) {
                let c = xv - m;
                *v += c * c;
            }
        }
        let scale = var
            .iter()
            .map(|&v| {
                let s = math::sqrt(v / n);
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    /// Identity transform for `dim` columns.
    pub fn identity(dim: usize) -> Standardizer {
        Standardizer {
            mean: alloc::vec![0.0; dim],
            scale: alloc::vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn transform(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for r in 0..out.rows() {
            let row = out.row_mut(r);
            for (v, (m, s)) in row.iter_mut().zip(self.mean.iter().zip(&self.scale)) {
                *v = (*v - m) / s;
            }
        }
        out
    }
}

/// Trained per-label model set.
#[derive(Debug, Clone)]
pub struct DbrModel {
    pub structure: Structure,
    pub standardizer: Standardizer,
    /// Order in which sibling labels enter each model's input block.
    pub label_order: Vec<usize>,
    pub cpds: Vec<LogisticModel>,
    pub feature_dim: usize,
}

impl DbrModel {
    pub fn n_labels(&self) -> usize {
        self.cpds.len()
    }

    fn sibling_dim(&self) -> usize {
        match self.structure {
            Structure::Dbr => self.n_labels() - 1,
            Structure::Br => 0,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.feature_dim + self.sibling_dim()
    }

    /// Input vector for the CPD of label `i`: standardized features followed
    /// (under DBR) by the sibling bits in `label_order` with slot `i` removed.
    fn assemble_input(&self, x_std: &[f64], y: &[u8], i: usize) -> Vec<f64> {
        let mut input = Vec::with_capacity(self.input_dim());
        input.extend_from_slice(x_std);
        if self.structure == Structure::Dbr {
            for &j in &self.label_order {
                if j != i {
                    input.push(y[j] as f64);
                }
            }
        }
        input
    }

    /// Probability the CPD of label `i` assigns to `y_i = 1` given the raw
    /// feature row and the sibling bits.
    pub fn cpd_proba(&self, i: usize, x: &[f64], y: &[u8]) -> Result<f64> {
        if i >= self.n_labels() {
            return Err(argument("label index out of range"));
        }
        if x.len() != self.feature_dim {
            return Err(Error::Dimension {
                what: "feature length",
                expected: self.feature_dim,
                actual: x.len(),
            });
        }
        if y.len() != self.n_labels() {
            return Err(Error::Dimension {
                what: "label length",
                expected: self.n_labels(),
                actual: y.len(),
            });
        }
        let x_std = self.standardizer.transform_row(x);
        self.cpds[i].predict_proba(&self.assemble_input(&x_std, y, i))
    }

    /// Total trained parameter count, intercepts included.
    pub fn n_parameters(&self) -> usize {
        self.cpds.iter().map(|c| c.input_dim() + 1).sum()
    }
}

/// Per-instance, per-label probabilities of the observed bits, clipped away
/// from 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoMatrix {
    values: Matrix,
}

impl RhoMatrix {
    pub fn new(values: Matrix) -> Result<RhoMatrix> {
        let ok = values
            .data()
            .iter()
            .all(|&v| (PROB_CLIP..=1.0 - PROB_CLIP).contains(&v));
        if !ok {
            return Err(argument("rho entries must lie inside the clip interval"));
        }
        Ok(RhoMatrix { values })
    }

    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values.get(r, c)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        self.values.row(r)
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }
}

/// Train one model per label on `train`.
///
/// Sibling bits enter raw; features are standardized with training
/// statistics. Each label's L2 strength comes from `lambda_policy`, with
/// cross-validation seeded per label so the label set's layout does not
/// couple the searches.
pub fn train_dbr(
    train: &Dataset,
    structure: Structure,
    lambda_policy: &LambdaPolicy,
    seed: u64,
) -> Result<DbrModel> {
    let d = train.n_labels();
    if d < 1 {
        return Err(argument("training data has no labels"));
    }
    if train.n_instances() == 0 {
        return Err(argument("training data has no instances"));
    }
    let m = train.n_features();
    let standardizer = Standardizer::fit(train.features());
    let x_std = standardizer.transform(train.features());
    let label_order: Vec<usize> = (0..d).collect();

    let sibling_dim = match structure {
        Structure::Dbr => d - 1,
        Structure::Br => 0,
    };
    let mut cpds = Vec::with_capacity(d);
    for i in 0..d {
        let mut rows = Matrix::zeros(train.n_instances(), m + sibling_dim);
        let mut target = Vec::with_capacity(train.n_instances());
        for r in 0..train.n_instances() {
            let y_row = train.labels().row(r);
            let dst = rows.row_mut(r);
            dst[..m].copy_from_slice(x_std.row(r));
            if structure == Structure::Dbr {
                let mut c = m;
                for &j in &label_order {
                    if j != i {
                        dst[c] = y_row[j] as f64;
                        c += 1;
                    }
                }
            }
            target.push(y_row[i]);
        }
        let lambda = match lambda_policy {
            LambdaPolicy::Fixed(v) => {
                if *v < 0.0 {
                    return Err(argument("fixed lambda must be nonnegative"));
                }
                *v
            }
            LambdaPolicy::CrossValidated { grid, folds } => {
                select_lambda(&rows, &target, grid, *folds, derive_seed(seed, i as u64))?
            }
        };
        cpds.push(train_logistic(&rows, &target, lambda)?);
    }
    Ok(DbrModel {
        structure,
        standardizer,
        label_order,
        cpds,
        feature_dim: m,
    })
}

/// Probability each model assigns to the observed bit of its label, per
/// instance: the model's positive-class probability when the bit is 1, its
/// complement when the bit is 0.
pub fn compute_rho(model: &DbrModel, ds: &Dataset) -> Result<RhoMatrix> {
    if ds.n_features() != model.feature_dim {
        return Err(Error::Dimension {
            what: "feature columns",
            expected: model.feature_dim,
            actual: ds.n_features(),
        });
    }
    if ds.n_labels() != model.n_labels() {
        return Err(Error::Dimension {
            what: "label columns",
            expected: model.n_labels(),
            actual: ds.n_labels(),
        });
    }
    let d = model.n_labels();
    let mut values = Matrix::zeros(ds.n_instances(), d);
    for r in 0..ds.n_instances() {
        let x_std = model.standardizer.transform_row(ds.features().row(r));
        let y_row = ds.labels().row(r);
        for i in 0..d {
            let input = model.assemble_input(&x_std, y_row, i);
            let p = model.cpds[i].predict_proba(&input)?;
            let rho = if y_row[i] == 1 { p } else { 1.0 - p };
            values.set(r, i, rho.clamp(PROB_CLIP, 1.0 - PROB_CLIP));
        }
    }
    RhoMatrix::new(values)
}

/// Product of the observed-bit probabilities for a single instance.
pub fn pseudo_likelihood(model: &DbrModel, x: &[f64], y: &[u8]) -> Result<f64> {
    if x.len() != model.feature_dim {
        return Err(Error::Dimension {
            what: "feature length",
            expected: model.feature_dim,
            actual: x.len(),
        });
    }
    if y.len() != model.n_labels() {
        return Err(Error::Dimension {
            what: "label length",
            expected: model.n_labels(),
            actual: y.len(),
        });
    }
    let x_std = model.standardizer.transform_row(x);
    let mut prod = 1.0;
    for i in 0..model.n_labels() {
        let p = model.cpds[i].predict_proba(&model.assemble_input(&x_std, y, i))?;
        let rho = if y[i] == 1 { p } else { 1.0 - p };
        prod *= rho.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
    }
    Ok(prod)
}
