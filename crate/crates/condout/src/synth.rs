//! Deterministic synthetic multi-label datasets.
//!
//! Instances are drawn from weighted clusters. Each cluster owns a small
//! label set; each label owns a few dedicated feature dimensions that shift
//! by `signal` when the label is on, and every dimension carries Gaussian
//! noise. Labels are therefore rare, co-occur through clusters, and are
//! linearly predictable from the features, which is the structure the
//! detector relies on. Cluster offsets on a few extra dimensions give the
//! feature space its own grouping independent of the labels.

use condout_core::dataset::Dataset;
use condout_core::matrix::{BitMatrix, Matrix};
use condout_core::rng::{derive_seed, rng_from_seed};
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub name: String,
    pub n: usize,
    /// Feature dimensions; must hold `signal_dims` per label plus offsets.
    pub m: usize,
    pub d: usize,
    pub clusters: usize,
    /// Dedicated feature dimensions per label.
    pub signal_dims: usize,
    /// Mean shift applied to a label's dimensions when the label is on.
    pub signal: f64,
    /// Per-dimension Gaussian noise level.
    pub noise: f64,
    /// Chance of adding a second (and third) label to a cluster prototype.
    pub extra_label_prob: f64,
    /// Per-cell chance an instance deviates from its cluster prototype.
    pub label_flip: f64,
}

impl SynthSpec {
    /// Sparse, almost noise-free labels over many feature dimensions.
    pub fn genbase_like() -> SynthSpec {
        SynthSpec {
            name: "genbase-like".into(),
            n: 662,
            m: 260,
            d: 27,
            clusters: 32,
            signal_dims: 5,
            signal: 3.0,
            noise: 0.25,
            extra_label_prob: 0.3,
            label_flip: 0.0,
        }
    }

    /// More labels and clusters, same near-deterministic regime.
    pub fn medical_like() -> SynthSpec {
        SynthSpec {
            name: "medical-like".into(),
            n: 978,
            m: 280,
            d: 45,
            clusters: 94,
            signal_dims: 5,
            signal: 3.0,
            noise: 0.25,
            extra_label_prob: 0.25,
            label_flip: 0.0,
        }
    }

    /// Noisier, denser labels for the outlying-dimension sweep.
    pub fn sweep_like() -> SynthSpec {
        SynthSpec {
            name: "sweep-synth".into(),
            n: 2000,
            m: 60,
            d: 30,
            clusters: 40,
            signal_dims: 2,
            signal: 1.2,
            noise: 0.9,
            extra_label_prob: 0.6,
            label_flip: 0.02,
        }
    }

    pub fn by_name(name: &str) -> Option<SynthSpec> {
        match name {
            "genbase-like" => Some(SynthSpec::genbase_like()),
            "medical-like" => Some(SynthSpec::medical_like()),
            "sweep-synth" => Some(SynthSpec::sweep_like()),
            _ => None,
        }
    }
}

pub fn make_synthetic(spec: &SynthSpec, seed: u64) -> AppResult<Dataset> {
    if spec.n < 1 || spec.d < 1 || spec.clusters < 1 {
        return Err(AppError::config("synthetic sizes must be positive"));
    }
    if spec.m < spec.d * spec.signal_dims {
        return Err(AppError::config(format!(
            "{} features cannot hold {} signal dimensions for {} labels",
            spec.m,
            spec.signal_dims * spec.d,
            spec.d
        )));
    }
    let mut rng = rng_from_seed(derive_seed(seed, 0x5d));

    // Label j owns dimensions [j*s, (j+1)*s); the rest are noise/offset dims.
    let s = spec.signal_dims;

    // Cluster prototypes: primary labels cover every label round-robin, so no
    // label has zero prevalence; extras make labels co-occur.
    let mut prototypes: Vec<Vec<usize>> = Vec::with_capacity(spec.clusters);
    for c in 0..spec.clusters {
        let mut labels = vec![c % spec.d];
        let mut extra_p = spec.extra_label_prob;
        while rng.random_range(0.0..1.0) < extra_p && labels.len() < spec.d {
            loop {
                let cand = rng.random_range(0..spec.d);
                if !labels.contains(&cand) {
                    labels.push(cand);
                    break;
                }
            }
            extra_p *= 0.5;
        }
        prototypes.push(labels);
    }

    // Cluster feature offsets on dimensions outside every signal block.
    let free_dims = spec.m - spec.d * s;
    let mut offsets: Vec<Vec<(usize, f64)>> = Vec::with_capacity(spec.clusters);
    for _ in 0..spec.clusters {
        let count = free_dims.min(3);
        let dims = if count > 0 {
            index::sample(&mut rng, free_dims, count).into_vec()
        } else {
            Vec::new()
        };
        offsets.push(
            dims.into_iter()
                .map(|dim| {
                    let shift: f64 = StandardNormal.sample(&mut rng);
                    (spec.d * s + dim, 1.5 * shift)
                })
                .collect(),
        );
    }

    // Gently decaying cluster weights: dominant configurations plus a tail.
    let weights: Vec<f64> = (0..spec.clusters)
        .map(|c| 1.0 / (1.0 + c as f64 / 4.0))
        .collect();
    let total: f64 = weights.iter().sum();
    let cumulative: Vec<f64> = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w / total;
            Some(*acc)
        })
        .collect();

    let mut features = Vec::with_capacity(spec.n * spec.m);
    let mut labels = Vec::with_capacity(spec.n * spec.d);
    for _ in 0..spec.n {
        let u: f64 = rng.random_range(0.0..1.0);
        let cluster = cumulative.iter().position(|&c| u <= c).unwrap_or(spec.clusters - 1);

        let mut row_labels = vec![0u8; spec.d];
        for &j in &prototypes[cluster] {
            row_labels[j] = 1;
        }
        if spec.label_flip > 0.0 {
            for bit in row_labels.iter_mut() {
                if rng.random_range(0.0..1.0) < spec.label_flip {
                    *bit = 1 - *bit;
                }
            }
        }

        let mut row = vec![0.0f64; spec.m];
        for (j, &bit) in row_labels.iter().enumerate() {
            if bit == 1 {
                for k in 0..s {
                    row[j * s + k] += spec.signal;
                }
            }
        }
        for &(dim, shift) in &offsets[cluster] {
            row[dim] += shift;
        }
        for v in row.iter_mut() {
            let noise: f64 = StandardNormal.sample(&mut rng);
            *v += spec.noise * noise;
        }
        features.extend_from_slice(&row);
        labels.extend_from_slice(&row_labels);
    }

    let ds = Dataset::new(
        Matrix::from_vec(spec.n, spec.m, features)?,
        BitMatrix::from_vec(spec.n, spec.d, labels)?,
        vec![],
        vec![],
    )?;
    Ok(ds.with_name(&spec.name))
}
