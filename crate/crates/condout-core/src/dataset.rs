//! Multi-label dataset container, summary statistics, and resampling plans.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::error::{argument, validation, Error, Result};
use crate::matrix::{BitMatrix, Matrix};

/// A multi-label dataset: continuous feature rows paired with binary label rows.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Matrix,
    labels: BitMatrix,
    feature_names: Vec<String>,
    label_names: Vec<String>,
    name: String,
}

impl Dataset {
    /// Validates shapes and cell values and wraps the parts into a dataset.
    ///
    /// Feature values must be finite. Name lists may be empty, in which case
    /// positional names `x0..` / `y0..` are generated.
    pub fn new(
        features: Matrix,
        labels: BitMatrix,
        feature_names: Vec<String>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        if features.rows() != labels.rows() {
            return Err(Error::Dimension {
                what: "label rows",
                expected: features.rows(),
                actual: labels.rows(),
            });
        }
        if !features.all_finite() {
            return Err(validation("features contain non-finite values"));
        }
        let feature_names = if feature_names.is_empty() {
            (0..features.cols())
                .map(|i| alloc::format!("x{}", i))
                .collect()
        } else if feature_names.len() == features.cols() {
            feature_names
        } else {
            return Err(Error::Dimension {
                what: "feature names",
                expected: features.cols(),
                actual: feature_names.len(),
            });
        };
        let label_names = if label_names.is_empty() {
            (0..labels.cols())
                .map(|i| alloc::format!("y{}", i))
                .collect()
        } else if label_names.len() == labels.cols() {
            label_names
        } else {
            return Err(Error::Dimension {
                what: "label names",
                expected: labels.cols(),
                actual: label_names.len(),
            });
        };
        Ok(Dataset {
            features,
            labels,
            feature_names,
            label_names,
            name: String::new(),
        })
    }

    pub fn with_name(mut self, name: &str) -> Dataset {
        self.name = String::from(name);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_instances(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_labels(&self) -> usize {
        self.labels.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &BitMatrix {
        &self.labels
    }

    pub fn labels_mut(&mut self) -> &mut BitMatrix {
        &mut self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    /// Mean number of positive labels per instance.
    pub fn label_cardinality(&self) -> f64 {
        if self.n_instances() == 0 {
            return 0.0;
        }
        let total: usize = self
            .labels
            .iter_rows()
            .map(|r| r.iter().filter(|&&b| b == 1).count())
            .sum();
        total as f64 / self.n_instances() as f64
    }

    /// Number of distinct label rows.
    pub fn distinct_label_sets(&self) -> usize {
        let mut rows: Vec<&[u8]> = self.labels.iter_rows().collect();
        rows.sort_unstable();
        rows.dedup();
        rows.len()
    }

    /// New dataset from the given row indices (duplicates allowed).
    pub fn select(&self, indices: &[usize]) -> Result<Dataset> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n_instances()) {
            return Err(argument(alloc::format!(
                "row index {} out of range for {} instances",
                bad,
                self.n_instances()
            )));
        }
        Ok(Dataset {
            features: self.features.select_rows(indices),
            labels: self.labels.select_rows(indices),
            feature_names: self.feature_names.clone(),
            label_names: self.label_names.clone(),
            name: self.name.clone(),
        })
    }
}

/// A cross-validation plan: a shuffled partition of `0..n` into `folds` blocks.
#[derive(Debug, Clone)]
pub struct FoldPlan {
    n: usize,
    folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn n_folds(&self) -> usize {
        self.folds.len()
    }

    pub fn n_instances(&self) -> usize {
        self.n
    }

    /// Indices held out in fold `f`.
    pub fn test_indices(&self, f: usize) -> &[usize] {
        &self.folds[f]
    }

    /// Complement of fold `f`, in ascending order.
    pub fn train_indices(&self, f: usize) -> Vec<usize> {
        let mut in_test = alloc::vec![false; self.n];
        for &i in &self.folds[f] {
            in_test[i] = true;
        }
        (0..self.n).filter(|&i| !in_test[i]).collect()
    }
}

/// Shuffle `0..n` and cut it into `folds` nearly equal blocks.
///
/// The first `n % folds` blocks receive one extra index. Every index lands in
/// exactly one block.
pub fn make_fold_plan(n: usize, folds: usize, rng: &mut ChaCha12Rng) -> Result<FoldPlan> {
    if folds < 2 {
        return Err(argument("need at least 2 folds"));
    }
    if n < folds {
        return Err(argument(alloc::format!(
            "cannot split {} instances into {} folds",
            n,
            folds
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let base = n / folds;
    let extra = n % folds;
    let mut blocks = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        blocks.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(FoldPlan { n, folds: blocks })
}

/// One independent fold plan per repeat, each from a seed derived off `seed`.
pub fn make_repeated_folds(
    n: usize,
    folds: usize,
    repeats: usize,
    seed: u64,
) -> Result<Vec<FoldPlan>> {
    if repeats < 1 {
        return Err(argument("need at least 1 repeat"));
    }
    (0..repeats)
        .map(|r| {
            let mut rng = crate::rng::rng_from_seed(crate::rng::derive_seed(seed, r as u64));
            make_fold_plan(n, folds, &mut rng)
        })
        .collect()
}

/// Draw `target` row indices from `0..n` with replacement.
pub fn bootstrap_sample(n: usize, target: usize, rng: &mut ChaCha12Rng) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(argument("cannot bootstrap from an empty set"));
    }
    Ok((0..target).map(|_| rng.random_range(0..n)).collect())
}

/// Shuffle `indices` and split them into two disjoint halves.
///
/// The first half receives the extra element when the count is odd.
pub fn split_half(indices: &[usize], rng: &mut ChaCha12Rng) -> (Vec<usize>, Vec<usize>) {
    let mut order = indices.to_vec();
    order.shuffle(rng);
    let cut = order.len().div_ceil(2);
    let second = order.split_off(cut);
    (order, second)
}
