//! Exact k-cycle counting and the cycle-based `(d̂, λ̂)` estimators.
//!
//! `d̂ = 2m/n` and, for `dλ² > 1` and small odd `k`,
//! `λ̂ = sign(s)|s|^{1/k}/d̂` with `s = 2k C_k - d̂^k`, where `C_k` is the
//! number of simple k-cycles. The signed root keeps `λ < 0` recoverable;
//! even `k` only identifies `|λ|` and is exposed separately.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sbm::SparseGraph;
use crate::theory::SbmParams;

/// Largest cycle length accepted by default; the search cost grows like
/// `n · d^{k-1}`.
pub const DEFAULT_MAX_K: usize = 9;

/// Cycle-count summary for one graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleCounts {
    pub k: usize,
    pub c_k: u64,
    pub d_hat: f64,
}

/// Mean-degree estimator `d̂ = (1/n) Σ deg(u) = 2m/n`.
pub fn degree_estimate(g: &SparseGraph) -> f64 {
    if g.node_count() == 0 {
        return 0.0;
    }
    2.0 * g.edge_count() as f64 / g.node_count() as f64
}

/// Exact number of simple cycles of length exactly `k` (each cycle counted
/// once, not per rooted orientation).
pub fn count_cycles(g: &SparseGraph, k: usize) -> Result<u64> {
    count_cycles_capped(g, k, DEFAULT_MAX_K)
}

/// [`count_cycles`] with a caller-chosen `k` cap.
pub fn count_cycles_capped(g: &SparseGraph, k: usize, max_k: usize) -> Result<u64> {
    if k < 3 || k > max_k {
        return Err(Error::InvalidParams(format!(
            "cycle length k must satisfy 3 <= k <= {max_k}, got {k}"
        )));
    }
    let n = g.node_count();
    // Each cycle is counted at its minimum vertex, walking toward the
    // smaller second endpoint, so every cycle is seen exactly once. The
    // reduction over roots is an integer sum: deterministic regardless of
    // thread count.
    let total: u64 = (0..n)
        .into_par_iter()
        .map_init(|| vec![false; n], |on_path, root| count_rooted(g, root, k, on_path))
        .sum();
    Ok(total)
}

/// Counts k-cycles whose minimum vertex is `root`, one orientation only.
fn count_rooted(g: &SparseGraph, root: usize, k: usize, on_path: &mut [bool]) -> u64 {
    let mut count = 0u64;
    on_path[root] = true;
    // stack entry: (node, neighbor cursor, first-step node)
    let mut path: Vec<usize> = vec![root];
    let mut cursors: Vec<usize> = vec![0];
    while let Some(&u) = path.last() {
        let depth = path.len() - 1;
        let cur = cursors.last_mut().expect("cursor per frame");
        let neigh = g.neighbors(u);
        if *cur >= neigh.len() {
            path.pop();
            cursors.pop();
            on_path[u] = false;
            if u == root {
                break;
            }
            continue;
        }
        let v = neigh[*cur] as usize;
        *cur += 1;
        if v <= root || on_path[v] {
            continue;
        }
        if depth + 1 == k - 1 {
            // v is the last vertex: close the cycle once per orientation by
            // requiring the first step to be the smaller endpoint.
            if path[1] < v && g.neighbors(v).binary_search(&(root as u32)).is_ok() {
                count += 1;
            }
            continue;
        }
        on_path[v] = true;
        path.push(v);
        cursors.push(0);
    }
    on_path[root] = false;
    count
}

/// `λ̂ = sign(s)|s|^{1/k}/d̂` from the counts of one graph, `k` odd.
pub fn lambda_estimate(g: &SparseGraph, k: usize) -> Result<f64> {
    if k % 2 == 0 {
        return Err(Error::InvalidParams(format!(
            "lambda_estimate needs odd k (signed k-th root), got {k}; \
             use lambda_magnitude_estimate for even k"
        )));
    }
    let d_hat = degree_estimate(g);
    if d_hat == 0.0 {
        return Err(Error::DegenerateGraph("lambda estimate needs d_hat > 0".into()));
    }
    let c_k = count_cycles(g, k)?;
    Ok(lambda_from_counts(c_k as f64, d_hat, k))
}

/// Even-k variant returning `|λ̂|` (the sign is not identified).
pub fn lambda_magnitude_estimate(g: &SparseGraph, k: usize) -> Result<f64> {
    if k % 2 != 0 {
        return lambda_estimate(g, k).map(f64::abs);
    }
    let d_hat = degree_estimate(g);
    if d_hat == 0.0 {
        return Err(Error::DegenerateGraph("lambda estimate needs d_hat > 0".into()));
    }
    let c_k = count_cycles(g, k)?;
    let s = 2.0 * k as f64 * c_k as f64 - d_hat.powi(k as i32);
    Ok(if s <= 0.0 { 0.0 } else { s.powf(1.0 / k as f64) / d_hat })
}

/// The algebraic inversion `(2k C_k - d̂^k) -> λ̂` with a signed k-th root.
pub fn lambda_from_counts(c_k: f64, d_hat: f64, k: usize) -> f64 {
    let s = 2.0 * k as f64 * c_k - d_hat.powi(k as i32);
    s.signum() * s.abs().powf(1.0 / k as f64) / d_hat
}

/// Leading order of `E[C_k]`: `d^k (1 + λ^k) / (2k)`.
pub fn expected_cycles(params: &SbmParams, k: usize) -> f64 {
    let d = params.d();
    let l = params.lambda();
    d.powi(k as i32) * (1.0 + l.powi(k as i32)) / (2.0 * k as f64)
}

/// Full estimator bundle for one graph.
pub fn cycle_stats(g: &SparseGraph, k: usize) -> Result<CycleCounts> {
    Ok(CycleCounts { k, c_k: count_cycles(g, k)?, d_hat: degree_estimate(g) })
}
