//! Synthetic outlier injection with exact ground truth.
//!
//! Two protocols perturb the label matrix of a dataset:
//!
//! * variable-level noise flips a fixed fraction of all label cells, chosen
//!   uniformly without replacement;
//! * instance-level noise picks a fixed fraction of instances and flips `p`
//!   label dimensions in each.
//!
//! Features are never touched. Each call returns the perturbed dataset plus a
//! report carrying the flipped cells and the per-instance outlier mask.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;

use crate::dataset::Dataset;
use crate::error::{argument, Result};
use crate::math;
use crate::rng::rng_from_seed;

/// Which perturbation protocol produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    VariableLevel,
    InstanceLevel,
}

impl Protocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::VariableLevel => "variable-level",
            Protocol::InstanceLevel => "instance-level",
        }
    }
}

/// Ground-truth record of an injection run.
#[derive(Debug, Clone)]
pub struct InjectionReport {
    /// Flipped (instance, label) cells, ascending, no duplicates.
    pub flipped_cells: Vec<(usize, usize)>,
    /// 1 where the instance had at least one flip.
    pub outlier_mask: Vec<u8>,
    pub protocol: Protocol,
    /// Cell rate (variable-level) or instance rate (instance-level).
    pub rate: f64,
    /// Flipped dimensions per outlier instance; 1 for variable-level runs
    /// where flips land on single cells.
    pub p: usize,
    pub seed: u64,
}

impl InjectionReport {
    pub fn n_outliers(&self) -> usize {
        self.outlier_mask.iter().filter(|&&b| b == 1).count()
    }
}

fn mask_from_cells(n: usize, cells: &[(usize, usize)]) -> Vec<u8> {
    let mut mask = vec![0u8; n];
    for &(i, _) in cells {
        mask[i] = 1;
    }
    mask
}

fn apply_flips(ds: &Dataset, cells: &[(usize, usize)]) -> Dataset {
    let mut out = ds.clone();
    for &(i, j) in cells {
        out.labels_mut().flip(i, j);
    }
    out
}

/// Flip `round(rate * n * d)` distinct label cells chosen uniformly at random.
///
/// An instance counts as an outlier when any of its cells flipped, so the
/// outlier fraction is at most `rate * d`.
pub fn inject_variable_noise(
    ds: &Dataset,
    rate: f64,
    seed: u64,
) -> Result<(Dataset, InjectionReport)> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(argument("rate must be in [0, 1]"));
    }
    let n = ds.n_instances();
    let d = ds.n_labels();
    let total = n * d;
    let count = math::round(rate * total as f64) as usize;
    let mut rng = rng_from_seed(seed);
    let mut cells: Vec<(usize, usize)> = if total == 0 {
        Vec::new()
    } else {
        index::sample(&mut rng, total, count)
            .into_iter()
            .map(|c| (c / d, c % d))
            .collect()
    };
    cells.sort_unstable();
    let report = InjectionReport {
        outlier_mask: mask_from_cells(n, &cells),
        flipped_cells: cells,
        protocol: Protocol::VariableLevel,
        rate,
        p: 1,
        seed,
    };
    Ok((apply_flips(ds, &report.flipped_cells), report))
}

/// Flip `p` distinct label dimensions in each of `round(instance_rate * n)`
/// instances chosen uniformly without replacement.
pub fn inject_instance_noise(
    ds: &Dataset,
    instance_rate: f64,
    p: usize,
    seed: u64,
) -> Result<(Dataset, InjectionReport)> {
    if !(0.0..=1.0).contains(&instance_rate) {
        return Err(argument("instance_rate must be in [0, 1]"));
    }
    let d = ds.n_labels();
    if p < 1 || p > d {
        return Err(argument(alloc::format!(
            "p must be in 1..={} (got {})",
            d,
            p
        )));
    }
    let n = ds.n_instances();
    let count = math::round(instance_rate * n as f64) as usize;
    let mut rng = rng_from_seed(seed);
    let mut chosen: Vec<usize> = if n == 0 {
        Vec::new()
    } else {
        index::sample(&mut rng, n, count).into_iter().collect()
    };
    chosen.sort_unstable();
    let mut cells = Vec::with_capacity(count * p);
    for &i in &chosen {
        let mut dims: Vec<usize> = index::sample(&mut rng, d, p).into_iter().collect();
        dims.sort_unstable();
        for j in dims {
            cells.push((i, j));
        }
    }
    let report = InjectionReport {
        outlier_mask: mask_from_cells(n, &cells),
        flipped_cells: cells,
        protocol: Protocol::InstanceLevel,
        rate: instance_rate,
        p,
        seed,
    };
    Ok((apply_flips(ds, &report.flipped_cells), report))
}
