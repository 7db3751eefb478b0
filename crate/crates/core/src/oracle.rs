//! Brute-force references used by the test suites and the `dev` CLI
//! namespace.
//!
//! Nothing here shares code with the production paths it checks: cycle
//! counts come from enumerating rooted oriented walks, partition sums from
//! a direct 2^n scan, and the variational constant from grid minimization.
//! Obviousness over speed.

use crate::error::{Error, Result};
use crate::sbm::SparseGraph;

/// Size caps keeping every oracle call at seconds of work.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Dense-enumeration bound for [`brute_cycles`].
    pub max_cycle_nodes: usize,
    /// Edge-count bound admitting larger sparse graphs to [`brute_cycles`].
    pub max_cycle_edges: usize,
    /// Node bound for the 2^n scan of [`brute_log_partition`].
    pub max_partition_nodes: usize,
    /// Grid resolution per axis for [`grid_min_objective`].
    pub grid_resolution: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_cycle_nodes: 12,
            max_cycle_edges: 600,
            max_partition_nodes: 20,
            grid_resolution: 2001,
        }
    }
}

/// Counts simple k-cycles by enumerating all closed simple rooted oriented
/// walks of length k (full DFS from every start node) and dividing by 2k.
pub fn brute_cycles(g: &SparseGraph, k: usize, cfg: &OracleConfig) -> Result<u64> {
    if k < 3 {
        return Err(Error::InvalidParams(format!("cycle length must be >= 3, got {k}")));
    }
    if g.node_count() > cfg.max_cycle_nodes && g.edge_count() > cfg.max_cycle_edges {
        return Err(Error::Capacity(format!(
            "brute_cycles limited to n <= {} or m <= {} (got n={}, m={})",
            cfg.max_cycle_nodes,
            cfg.max_cycle_edges,
            g.node_count(),
            g.edge_count()
        )));
    }
    let n = g.node_count();
    let mut on_path = vec![false; n];
    let mut walks: u64 = 0;
    for start in 0..n {
        walks += closed_walks_from(g, start, start, k, &mut on_path);
    }
    debug_assert_eq!(walks % (2 * k as u64), 0);
    Ok(walks / (2 * k as u64))
}

fn closed_walks_from(
    g: &SparseGraph,
    start: usize,
    u: usize,
    remaining: usize,
    on_path: &mut [bool],
) -> u64 {
    if remaining == 1 {
        return g.neighbors(u).iter().any(|&v| v as usize == start) as u64;
    }
    on_path[u] = true;
    let mut total = 0;
    for &v in g.neighbors(u) {
        let v = v as usize;
        if !on_path[v] && v != start {
            total += closed_walks_from(g, start, v, remaining - 1, on_path);
        }
    }
    on_path[u] = false;
    total
}

/// Log partition function by direct summation over all 2^n spin vectors,
/// recomputing the monochromatic-edge count from the edge list each time.
pub fn brute_log_partition(g: &SparseGraph, beta: f64, cfg: &OracleConfig) -> Result<f64> {
    let n = g.node_count();
    if n > cfg.max_partition_nodes {
        return Err(Error::Capacity(format!(
            "brute_log_partition limited to n <= {} (got n={n})",
            cfg.max_partition_nodes
        )));
    }
    // Scale by exp(beta * j_min) to keep the sum representable at any beta.
    let mut energies = Vec::with_capacity(1usize << n);
    for mask in 0u64..(1u64 << n) {
        let mut j = 0u64;
        for &(u, v) in g.edges() {
            if (mask >> u) & 1 == (mask >> v) & 1 {
                j += 1;
            }
        }
        energies.push(j);
    }
    let j_min = *energies.iter().min().expect("at least one state");
    let mut sum = 0.0f64;
    for j in energies {
        sum += (-beta * (j - j_min) as f64).exp();
    }
    Ok(sum.ln() - beta * j_min as f64)
}

/// Result of grid minimization of the variational objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMin {
    pub value: f64,
    pub x: f64,
    pub y: f64,
}

/// The objective `f(x,y) = rλ(x-y)² + (x+ry-(1+r)/2)² + (1+r)²/4` whose
/// infimum over the unit square defines `C(r,λ)`.
pub fn objective(r: f64, lambda: f64, x: f64, y: f64) -> f64 {
    let a = x - y;
    let b = x + r * y - (1.0 + r) / 2.0;
    r * lambda * a * a + b * b + (1.0 + r) * (1.0 + r) / 4.0
}

/// Minimizes the objective over `[0,1]²` on a uniform grid, then refines
/// from the best grid point with a shrinking pattern search.
///
/// Ties are broken by scan order (x-major, then y), so the reported argmin
/// is deterministic.
pub fn grid_min_objective(r: f64, lambda: f64, cfg: &OracleConfig) -> Result<GridMin> {
    if lambda >= 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "grid oracle is defined for lambda < 0, got {lambda}"
        )));
    }
    if r < 1.0 {
        return Err(Error::InvalidParams(format!("r must be >= 1, got {r}")));
    }
    let res = cfg.grid_resolution.max(2);
    let step = 1.0 / (res - 1) as f64;
    let mut best = GridMin { value: f64::INFINITY, x: 0.0, y: 0.0 };
    for i in 0..res {
        let x = i as f64 * step;
        for j in 0..res {
            let y = j as f64 * step;
            let v = objective(r, lambda, x, y);
            if v < best.value {
                best = GridMin { value: v, x, y };
            }
        }
    }
    // Pattern-search refinement: halve the step until it is negligible.
    let mut h = step;
    while h > 1e-12 {
        let mut improved = false;
        for (dx, dy) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)]
        {
            let x = (best.x + dx).clamp(0.0, 1.0);
            let y = (best.y + dy).clamp(0.0, 1.0);
            let v = objective(r, lambda, x, y);
            if v < best.value {
                best = GridMin { value: v, x, y };
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbm::SparseGraph;

    fn graph(n: usize, edges: &[(u32, u32)]) -> SparseGraph {
        SparseGraph::from_edges(n, edges.to_vec()).unwrap()
    }

    #[test]
    fn brute_cycles_small_graphs() {
        let triangle = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(brute_cycles(&triangle, 3, &OracleConfig::default()).unwrap(), 1);

        let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(brute_cycles(&k4, 3, &OracleConfig::default()).unwrap(), 4);

        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        assert_eq!(brute_cycles(&c5, 5, &OracleConfig::default()).unwrap(), 1);
        assert_eq!(brute_cycles(&c5, 3, &OracleConfig::default()).unwrap(), 0);
        assert_eq!(brute_cycles(&c5, 4, &OracleConfig::default()).unwrap(), 0);
    }

    #[test]
    fn brute_partition_small_graphs() {
        let cfg = OracleConfig::default();
        let empty = graph(4, &[]);
        assert!((brute_log_partition(&empty, 0.7, &cfg).unwrap() - 4.0 * 2.0f64.ln()).abs() < 1e-12);

        let edge = graph(2, &[(0, 1)]);
        let beta = 0.3;
        let want = (2.0 + 2.0 * (-beta as f64).exp()).ln();
        assert!((brute_log_partition(&edge, beta, &cfg).unwrap() - want).abs() < 1e-12);

        // path on 3 nodes at beta=0.5: 2 states with J=2, 2 with J=1, 4 with J=0
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let b = 0.5f64;
        let want = (2.0 * (-2.0 * b).exp() + 4.0 * (-b).exp() + 2.0).ln();
        assert!((brute_log_partition(&p3, b, &cfg).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn brute_partition_caps_size() {
        let g = graph(21, &[]);
        assert!(brute_log_partition(&g, 0.1, &OracleConfig::default()).is_err());
    }

    #[test]
    fn grid_min_matches_hand_value() {
        let m = grid_min_objective(1.0, -0.5, &OracleConfig::default()).unwrap();
        assert!((m.value - 0.5).abs() < 1e-9);
        assert!(m.x.abs() < 1e-6);
        assert!((m.y - 1.0).abs() < 1e-6);
        // strictly below the trivial (1+r)^2/4 level
        assert!(m.value < 1.0);
    }
}
