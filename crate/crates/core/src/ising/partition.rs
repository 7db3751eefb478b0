//! Exact log partition function by full enumeration.

use crate::error::{Error, Result};
use crate::sbm::SparseGraph;
use crate::theory::LN_2;

/// Enumeration bound for [`exact_log_partition`].
pub const EXACT_PARTITION_MAX_NODES: usize = 26;

/// `Z(β, G) = ln Σ_σ e^{-βJ(σ;G)}` over all 2^n spin vectors.
///
/// States are visited in Gray-code order with incremental energy updates;
/// the sum is taken over the energy histogram in log-sum-exp form, so any
/// `β ≥ 0` is safe from underflow.
pub fn exact_log_partition(g: &SparseGraph, beta: f64) -> Result<f64> {
    let n = g.node_count();
    if n > EXACT_PARTITION_MAX_NODES {
        return Err(Error::Capacity(format!(
            "exact enumeration is limited to n <= {EXACT_PARTITION_MAX_NODES} (got n = {n}); \
             use thermodynamic integration instead"
        )));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Domain(format!("beta must be finite and >= 0, got {beta}")));
    }
    if beta == 0.0 {
        return Ok(n as f64 * LN_2);
    }

    let m = g.edge_count();
    let mut histogram = vec![0u64; m + 1];

    // All-zero state: every edge monochromatic.
    let mut mask: u64 = 0;
    let mut j = m as i64;
    histogram[m] += 1;
    for state in 1u64..(1u64 << n) {
        let u = state.trailing_zeros() as usize;
        // Flipping u changes J by (neighbors equal to the NEW spin) minus
        // (neighbors equal to the OLD spin), evaluated before the flip.
        let old = (mask >> u) & 1;
        let mut same = 0i64;
        for &v in g.neighbors(u) {
            same += (((mask >> v) & 1) == old) as i64;
        }
        let delta = g.degree(u) as i64 - 2 * same;
        mask ^= 1 << u;
        j += delta;
        histogram[j as usize] += 1;
    }

    let j_min = histogram
        .iter()
        .position(|&c| c > 0)
        .expect("at least one state") as f64;
    let mut sum = 0.0f64;
    for (j, &count) in histogram.iter().enumerate() {
        if count > 0 {
            sum += count as f64 * (-beta * (j as f64 - j_min)).exp();
        }
    }
    Ok(sum.ln() - beta * j_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_log_partition, OracleConfig};
    use rand::Rng;

    fn graph(n: usize, edges: &[(u32, u32)]) -> SparseGraph {
        SparseGraph::from_edges(n, edges.to_vec()).unwrap()
    }

    #[test]
    fn empty_graph_is_n_ln2() {
        let g = graph(7, &[]);
        for &beta in &[0.0, 0.4, 2.0] {
            assert!((exact_log_partition(&g, beta).unwrap() - 7.0 * LN_2).abs() < 1e-12);
        }
        assert_eq!(exact_log_partition(&g, 0.0).unwrap(), 7.0 * LN_2);
    }

    #[test]
    fn single_edge_closed_form() {
        let g = graph(2, &[(0, 1)]);
        for &beta in &[0.1, 1.0, 5.0] {
            let want = (2.0 + 2.0 * (-beta as f64).exp()).ln();
            assert!((exact_log_partition(&g, beta).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_at_beta_one() {
        let g = graph(3, &[(0, 1), (0, 2), (1, 2)]);
        // 2 states with J=3, 6 states with J=1
        let want = (2.0 * (-3.0f64).exp() + 6.0 * (-1.0f64).exp()).ln();
        assert!((exact_log_partition(&g, 1.0).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.8358832973270902).abs() < 1e-12);
    }

    #[test]
    fn capacity_and_domain_errors() {
        let g = graph(27, &[]);
        assert!(matches!(exact_log_partition(&g, 0.5), Err(Error::Capacity(_))));
        let g = graph(3, &[]);
        assert!(exact_log_partition(&g, -0.1).is_err());
    }

    #[test]
    fn matches_brute_oracle_on_random_graphs() {
        let cfg = OracleConfig::default();
        let mut rng = crate::rng::chain_rng(11);
        for trial in 0..10 {
            let n = rng.random_range(4..=10);
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in (u + 1)..n as u32 {
                    if rng.random::<f64>() < 0.4 {
                        edges.push((u, v));
                    }
                }
            }
            let g = SparseGraph::from_edges(n, edges).unwrap();
            for &beta in &[0.05, 0.3, 1.7] {
                let a = exact_log_partition(&g, beta).unwrap();
                let b = brute_log_partition(&g, beta, &cfg).unwrap();
                assert!((a - b).abs() < 1e-10, "trial {trial}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn nonincreasing_and_convex_in_beta() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (0, 3)]);
        let betas: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let zs: Vec<f64> = betas.iter().map(|&b| exact_log_partition(&g, b).unwrap()).collect();
        for w in zs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        for w in zs.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-9, "convexity violated");
        }
    }
}
