//! Local outlier factor with exact k-nearest-neighbor search.
//!
//! Neighborhoods include every point at the k-distance (ties), reachability
//! distance is `max(kdist(o), dist(p, o))`, and a point's local reachability
//! density is the inverse mean reachability to its neighbors. Duplicate
//! degeneracy (k-distance zero) caps the density at 1e12; a ratio of two
//! capped densities counts as 1. Neighbor sums run in ascending index order
//! so independent reimplementations can match bit for bit.

use alloc::vec::Vec;

use crate::error::argument;
use crate::math;
use crate::matrix::Matrix;
use crate::Result;

pub(crate) const DENSITY_CAP: f64 = 1e12;

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    math::sqrt(s)
}

/// LOF score per row; higher = more outlying.
pub fn lof_scores(points: &Matrix, k: usize) -> Result<Vec<f64>> {
    let n = points.rows();
    if k < 1 {
        return Err(argument("k must be at least 1"));
    }
    if n <= k {
        return Err(argument(alloc::format!(
            "need more than k={} points (got {}); lower k",
            k,
            n
        )));
    }

    // Neighborhoods: all points within the k-distance, ascending by index.
    let mut neighbors: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut kdist = Vec::with_capacity(n);
    for p in 0..n {
        let mut dists: Vec<(f64, usize)> = (0..n)
            .filter(|&o| o != p)
            .map(|o| (euclidean(points.row(p), points.row(o)), o))
            .collect();
        dists.sort_unstable_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.1.cmp(&b.1))
        });
        let kd = dists[k - 1].0;
        let mut nbrs: Vec<(usize, f64)> = dists
            .iter()
            .take_while(|(d, _)| *d <= kd)
            .map(|&(d, o)| (o, d))
            .collect();
        nbrs.sort_unstable_by_key(|&(o, _)| o);
        neighbors.push(nbrs);
        kdist.push(kd);
    }

    let mut lrd = Vec::with_capacity(n);
    for p in 0..n {
        if kdist[p] == 0.0 {
            lrd.push(DENSITY_CAP);
            continue;
        }
        let mut sum = 0.0;
        for &(o, d) in &neighbors[p] {
            sum += kdist[o].max(d);
        }
        let mean = sum / neighbors[p].len() as f64;
        if mean <= 0.0 {
            lrd.push(DENSITY_CAP);
        } else {
            lrd.push(1.0 / mean);
        }
    }

    let mut lof = Vec::with_capacity(n);
    for p in 0..n {
        let mut sum = 0.0;
        for &(o, _) in &neighbors[p] {
            let ratio = if lrd[o] == DENSITY_CAP && lrd[p] == DENSITY_CAP {
                1.0
            } else {
                lrd[o] / lrd[p]
            };
            sum += ratio;
        }
        lof.push(sum / neighbors[p].len() as f64);
    }
    Ok(lof)
}
