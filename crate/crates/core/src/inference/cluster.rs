//! Parameter-free Gibbs clustering: sample `σ ~ IS(1/√d̂, G)`, take the
//! majority spin `l'`, and label `τ(u) = I(σ(u) = l')`.

use serde::{Deserialize, Serialize};

use crate::cycles::degree_estimate;
use crate::error::{Error, Result};
use crate::ising::{gibbs_sample, order_parameters, SpinInit};
use crate::sbm::SparseGraph;

/// Clustering output plus evaluation statistics when ground truth is
/// available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    /// Estimated labels: `τ(u) = 1` iff `σ(u) = l'`.
    pub tau: Vec<u8>,
    /// The majority spin (ties resolve to 1).
    pub l_prime: u8,
    pub d_hat: f64,
    pub beta: f64,
    /// Agreement with ground truth, maximized over the label swap.
    pub overlap: Option<f64>,
    /// Order parameter `x(σ)` of the sampled configuration.
    pub x_sigma: Option<f64>,
    /// Order parameter `y(σ)`.
    pub y_sigma: Option<f64>,
    /// `|σ⁻¹(l') ∩ M₀| / |M₀|`.
    pub m0_fraction: Option<f64>,
    /// `|σ⁻¹(l') ∩ M₁| / |M₁|`.
    pub m1_fraction: Option<f64>,
}

/// Runs the clustering algorithm at the estimator temperature
/// `β = 1/√d̂`.
pub fn cluster(g: &SparseGraph, sweeps: usize, seed: u64) -> Result<ClusterResult> {
    let d_hat = degree_estimate(g);
    if d_hat == 0.0 {
        return Err(Error::DegenerateGraph("clustering needs d_hat > 0".into()));
    }
    cluster_with_beta(g, 1.0 / d_hat.sqrt(), sweeps, seed)
}

/// [`cluster`] with an explicit temperature (exploration flag).
pub fn cluster_with_beta(
    g: &SparseGraph,
    beta: f64,
    sweeps: usize,
    seed: u64,
) -> Result<ClusterResult> {
    if g.node_count() == 0 {
        return Err(Error::DegenerateGraph("empty graph".into()));
    }
    let d_hat = degree_estimate(g);
    let sigma = gibbs_sample(g, beta, sweeps, seed, SpinInit::Uniform)?;
    let n = g.node_count();
    let ones: usize = sigma.spins().iter().map(|&s| s as usize).sum();
    let l_prime: u8 = if 2 * ones >= n { 1 } else { 0 };
    let tau: Vec<u8> = sigma.spins().iter().map(|&s| (s == l_prime) as u8).collect();

    let (mut overlap, mut x_sigma, mut y_sigma, mut m0_fraction, mut m1_fraction) =
        (None, None, None, None, None);
    if let Some(labels) = g.labels() {
        let agree =
            tau.iter().zip(labels).filter(|(&t, &l)| t == l).count() as f64 / n as f64;
        overlap = Some(agree.max(1.0 - agree));

        if let Ok(op) = order_parameters(g, sigma.spins()) {
            x_sigma = Some(op.x);
            y_sigma = Some(op.y);
        }
        let m0 = labels.iter().filter(|&&l| l == 0).count();
        let m1 = n - m0;
        if m0 > 0 && m1 > 0 {
            let in0 = sigma
                .spins()
                .iter()
                .zip(labels)
                .filter(|(&s, &l)| s == l_prime && l == 0)
                .count();
            let in1 = sigma
                .spins()
                .iter()
                .zip(labels)
                .filter(|(&s, &l)| s == l_prime && l == 1)
                .count();
            m0_fraction = Some(in0 as f64 / m0 as f64);
            m1_fraction = Some(in1 as f64 / m1 as f64);
        }
    }

    Ok(ClusterResult {
        tau,
        l_prime,
        d_hat,
        beta,
        overlap,
        x_sigma,
        y_sigma,
        m0_fraction,
        m1_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::exact_log_partition;
    use crate::sbm::{sample_sbm, SparseGraph};
    use crate::theory::SbmParams;

    /// Complete bipartite K_{5,5}: the two ground states of the
    /// antiferromagnet are exactly the two communities.
    fn k55() -> SparseGraph {
        let mut edges = Vec::new();
        for u in 0..5u32 {
            for v in 5..10u32 {
                edges.push((u, v));
            }
        }
        SparseGraph::from_edges(10, edges)
            .unwrap()
            .with_labels(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1])
            .unwrap()
    }

    /// Exact E[overlap] under IS(beta, G) by enumerating all 2^n states.
    fn exact_expected_overlap(g: &SparseGraph, beta: f64) -> f64 {
        let labels = g.labels().unwrap();
        let n = g.node_count();
        let z = exact_log_partition(g, beta).unwrap();
        let mut acc = 0.0;
        for mask in 0u32..(1 << n) {
            let j = g
                .edges()
                .iter()
                .filter(|&&(u, v)| (mask >> u) & 1 == (mask >> v) & 1)
                .count() as f64;
            let ones = mask.count_ones() as usize;
            let l_prime = (2 * ones >= n) as u32;
            let agree = (0..n)
                .filter(|&u| (((mask >> u) & 1 == l_prime) as u8) == labels[u])
                .count() as f64
                / n as f64;
            acc += agree.max(1.0 - agree) * (-beta * j - z).exp();
        }
        acc
    }

    #[test]
    fn bipartite_ground_states_separate_communities() {
        let g = k55();
        let beta = 2.0;
        // oracle: the measure at this beta concentrates near the two
        // zero-energy states, which follow the communities exactly
        let exact = exact_expected_overlap(&g, beta);
        assert!(exact > 0.95, "exact E[overlap] = {exact}");

        let runs = 40;
        let mut mean = 0.0;
        for s in 0..runs {
            let res = cluster_with_beta(&g, beta, 300, 500 + s).unwrap();
            mean += res.overlap.unwrap();
        }
        mean /= runs as f64;
        assert!((mean - exact).abs() < 0.05, "gibbs mean {mean} vs exact {exact}");
    }

    /// Two disjoint K_5 cliques: the antiferromagnetic ground states
    /// BISECT each clique, so the sampled labeling is uninformative about
    /// the cliques; enumeration confirms overlap stays near 1/2.
    #[test]
    fn disjoint_cliques_are_not_separated() {
        let mut edges = Vec::new();
        for base in [0u32, 5] {
            for i in 0..5 {
                for j in (i + 1)..5 {
                    edges.push((base + i, base + j));
                }
            }
        }
        let g = SparseGraph::from_edges(10, edges)
            .unwrap()
            .with_labels(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1])
            .unwrap();
        let beta = 1.0 / degree_estimate(&g).sqrt();
        let exact = exact_expected_overlap(&g, beta);
        assert!(exact < 0.65, "exact E[overlap] = {exact}");
        let runs = 40;
        let mut mean = 0.0;
        for s in 0..runs {
            let res = cluster(&g, 300, 900 + s).unwrap();
            mean += res.overlap.unwrap();
        }
        mean /= runs as f64;
        assert!((mean - exact).abs() < 0.05, "gibbs mean {mean} vs exact {exact}");
    }

    #[test]
    fn er_graph_overlap_is_baseline() {
        // lambda = 0: labels carry no signal, overlap hovers at the
        // max-of-two-proportions baseline slightly above 1/2
        let params = SbmParams::new(8.0, 0.0, 1.0, 500).unwrap();
        let mut mean = 0.0;
        let runs = 20;
        for s in 0..runs {
            let g = sample_sbm(&params, 2000 + s).unwrap();
            let res = cluster(&g, 120, s).unwrap();
            mean += res.overlap.unwrap();
        }
        mean /= runs as f64;
        assert!(mean < 0.60, "mean overlap {mean} should sit near 1/2");
        assert!(mean >= 0.5);
    }

    #[test]
    fn tau_is_indicator_of_majority_spin() {
        let g = k55();
        let res = cluster(&g, 50, 3).unwrap();
        let ones = res.tau.iter().filter(|&&t| t == 1).count();
        assert!(2 * ones >= res.tau.len(), "majority set must hold tau = 1");
        assert!(res.overlap.unwrap() >= 0.5);
    }

    #[test]
    fn degenerate_graph_rejected() {
        let g = SparseGraph::from_edges(4, vec![]).unwrap();
        assert!(matches!(cluster(&g, 10, 0), Err(Error::DegenerateGraph(_))));
    }
}
