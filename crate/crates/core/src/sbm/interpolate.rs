//! The coupled graphs `G̃`, `G'₀`, `G'₁` used to compare free energies at
//! ratios `r` and `r + δ`.
//!
//! `G̃` is an SBM on communities `N₀`, `N₁` with `|N₀|` shrunk by
//! `⌊δn/(1+r)²⌋`. `G'₀` attaches that many new nodes with community-0
//! probabilities; `G'₁` attaches them with community-1 probabilities and
//! then rewires `⌊d|λ|δn/(2(1+r)²)⌋` edges from `N₀-N₀` into absent
//! `N₁-N₁` pairs. New nodes are never connected to each other.
//!
//! All bracketed quantities are floors; the community boundary
//! `⌊n/(1+r)⌋` is floored with the remainder going to `N₁`. Uniform
//! deletions are sequential without replacement (equivalently, a uniform
//! subset), matching the per-step description.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Distribution;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::rng::{chain_rng, derive_seed};
use crate::sbm::sample::sample_block;
use crate::sbm::SparseGraph;
use crate::theory::SbmParams;

/// The three coupled graphs plus construction bookkeeping.
#[derive(Debug, Clone)]
pub struct InterpolationBundle {
    /// The common base graph on `N₀ ∪ N₁`.
    pub g_tilde: SparseGraph,
    /// Base plus new nodes attached with community-0 probabilities.
    pub g0_prime: SparseGraph,
    /// Base plus new nodes attached with community-1 probabilities, then
    /// rewired.
    pub g1_prime: SparseGraph,
    /// Interpolation step δ.
    pub delta: f64,
    /// `(|N₀|, |N₁|, |N_Δ|)`.
    pub sizes: (usize, usize, usize),
    /// `⌊d|λ|δn/(2(1+r)²)⌋` edges deleted and added in the rewire phase.
    pub rewire_count: usize,
}

impl InterpolationBundle {
    /// Index range of `N₀` (shared by all three graphs).
    pub fn n0_range(&self) -> std::ops::Range<usize> {
        0..self.sizes.0
    }

    /// Index range of `N₁`.
    pub fn n1_range(&self) -> std::ops::Range<usize> {
        self.sizes.0..self.sizes.0 + self.sizes.1
    }

    /// Index range of the new nodes in `G'₀`/`G'₁`.
    pub fn delta_range(&self) -> std::ops::Range<usize> {
        let old = self.sizes.0 + self.sizes.1;
        old..old + self.sizes.2
    }
}

/// The deterministic size arithmetic of the construction:
/// `(|N₀|, |N₁|, |N_Δ|)` and the rewire count.
pub fn interpolation_plan(
    params: &SbmParams,
    delta: f64,
) -> Result<((usize, usize, usize), usize)> {
    if params.lambda() >= 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "interpolation construction requires lambda < 0, got {}",
            params.lambda()
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParams(format!("delta must be > 0, got {delta}")));
    }
    let n = params.n();
    let r = params.r();
    let nf = n as f64;
    let rp1_sq = (1.0 + r) * (1.0 + r);

    let size_delta = (delta * nf / rp1_sq).floor() as usize;
    if size_delta < 1 {
        return Err(Error::Precondition(format!(
            "delta too small: floor(delta*n/(1+r)^2) = 0 (delta={delta}, n={n}, r={r})"
        )));
    }
    let boundary = (nf / (1.0 + r)).floor() as usize;
    if boundary <= size_delta {
        return Err(Error::Precondition(format!(
            "delta too large: community N0 would be empty (boundary={boundary}, new={size_delta})"
        )));
    }
    let n0 = boundary - size_delta;
    let n1 = n - size_delta - n0;
    let rewire_count =
        (params.d() * params.lambda().abs() * delta * nf / (2.0 * rp1_sq)).floor() as usize;
    Ok(((n0, n1, size_delta), rewire_count))
}

/// Samples one interpolation bundle. Deterministic given `seed`.
pub fn sample_interpolation(
    params: &SbmParams,
    delta: f64,
    seed: u64,
) -> Result<InterpolationBundle> {
    let ((n0, n1, size_delta), rewire_count) = interpolation_plan(params, delta)?;
    let n = params.n();
    let old_n = n0 + n1;

    let q = params.edge_prob();
    for row in &q {
        for &p in row {
            if p > 1.0 {
                return Err(Error::InvalidParams(format!(
                    "edge probability alpha/n = {p} exceeds 1; n too small for d"
                )));
            }
        }
    }

    let members0: Vec<u32> = (0..n0 as u32).collect();
    let members1: Vec<u32> = (n0 as u32..old_n as u32).collect();
    let news: Vec<u32> = (old_n as u32..n as u32).collect();

    // Base graph on the old nodes, block probabilities of the definition
    // (denominators stay at the full n).
    let mut base_edges = Vec::new();
    {
        let mut rng = chain_rng(derive_seed(seed, 0));
        sample_block(&members0, &members0, true, q[0][0], &mut rng, &mut base_edges)?;
        sample_block(&members0, &members1, false, q[0][1], &mut rng, &mut base_edges)?;
        sample_block(&members1, &members1, true, q[1][1], &mut rng, &mut base_edges)?;
    }
    let mut tilde_labels = vec![0u8; old_n];
    tilde_labels[n0..].fill(1);
    let g_tilde = SparseGraph::from_edges(old_n, base_edges.clone())?.with_labels(tilde_labels)?;

    // G'0: attach each new node to the old communities with the
    // community-0 probabilities.
    let mut g0_edges = base_edges.clone();
    {
        let mut rng = chain_rng(derive_seed(seed, 1));
        for &k in &news {
            attach_node(k, &members0, q[0][0], &mut rng, &mut g0_edges);
            attach_node(k, &members1, q[0][1], &mut rng, &mut g0_edges);
        }
    }
    let mut labels0 = vec![0u8; n];
    labels0[n0..old_n].fill(1);
    let g0_prime = SparseGraph::from_edges(n, g0_edges)?.with_labels(labels0)?;

    // G'1: attach with the community-1 probabilities, then rewire.
    let mut g1_edges = base_edges;
    {
        let mut rng = chain_rng(derive_seed(seed, 2));
        for &k in &news {
            attach_node(k, &members0, q[0][1], &mut rng, &mut g1_edges);
            attach_node(k, &members1, q[1][1], &mut rng, &mut g1_edges);
        }
    }
    let pre_rewire_count = g1_edges.len();

    {
        let mut rng = chain_rng(derive_seed(seed, 3));
        // Delete rewire_count uniformly random N0-N0 edges.
        let mut inner0: Vec<usize> = g1_edges
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| (u as usize) < n0 && (v as usize) < n0)
            .map(|(i, _)| i)
            .collect();
        if inner0.len() < rewire_count {
            return Err(Error::RewireShortfall {
                needed: rewire_count,
                available: inner0.len(),
            });
        }
        let (doomed, _) = inner0.partial_shuffle(&mut rng, rewire_count);
        let doomed: HashSet<usize> = doomed.iter().copied().collect();
        let mut kept = Vec::with_capacity(g1_edges.len() - rewire_count);
        for (i, e) in g1_edges.into_iter().enumerate() {
            if !doomed.contains(&i) {
                kept.push(e);
            }
        }
        g1_edges = kept;

        // Add rewire_count uniformly random absent N1-N1 pairs.
        let mut present: HashSet<(u32, u32)> = g1_edges.iter().copied().collect();
        let mut added = 0usize;
        let span = n1 as u32;
        if n1 < 2 && rewire_count > 0 {
            return Err(Error::Precondition("N1 too small to absorb rewired edges".into()));
        }
        while added < rewire_count {
            let a = n0 as u32 + rng.random_range(0..span);
            let b = n0 as u32 + rng.random_range(0..span);
            if a == b {
                continue;
            }
            let pair = (a.min(b), a.max(b));
            if present.insert(pair) {
                g1_edges.push(pair);
                added += 1;
            }
        }
    }
    debug_assert_eq!(g1_edges.len(), pre_rewire_count);

    let mut labels1 = vec![0u8; n];
    labels1[n0..].fill(1);
    let g1_prime = SparseGraph::from_edges(n, g1_edges)?.with_labels(labels1)?;

    Ok(InterpolationBundle {
        g_tilde,
        g0_prime,
        g1_prime,
        delta,
        sizes: (n0, n1, size_delta),
        rewire_count,
    })
}

/// Connects `k` to a binomial number of distinct targets in `block`.
fn attach_node(
    k: u32,
    block: &[u32],
    p: f64,
    rng: &mut impl Rng,
    edges: &mut Vec<(u32, u32)>,
) {
    if block.is_empty() || p <= 0.0 {
        return;
    }
    // Per-target independent Bernoulli; block sizes here are O(n), so draw
    // the count and then distinct targets.
    let count = rand_distr::Binomial::new(block.len() as u64, p)
        .expect("validated probability")
        .sample(rng);
    let mut chosen = HashSet::with_capacity(count as usize);
    while (chosen.len() as u64) < count {
        let t = block[rng.random_range(0..block.len())];
        if chosen.insert(t) {
            edges.push((t.min(k), t.max(k)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Construction-friendly point: alpha_00 = 20 * 0.4 = 8 > 0 leaves
    /// plenty of N0-N0 edges for the rewire phase.
    fn params() -> SbmParams {
        SbmParams::new(20.0, -0.3, 2.0, 10_000).unwrap()
    }

    #[test]
    fn printed_arithmetic_at_example_point() {
        // d=20, lambda=-0.5, r=2, n=10000, delta=0.09. At this boundary
        // point alpha_00 = 0, so only the size arithmetic is checkable;
        // the construction itself necessarily reports a rewire shortfall.
        let p = SbmParams::new(20.0, -0.5, 2.0, 10_000).unwrap();
        let ((n0, n1, nd), rewires) = interpolation_plan(&p, 0.09).unwrap();
        // floor(0.09 * 10000 / 9) = 100 new nodes
        assert_eq!(nd, 100);
        // floor(20 * 0.5 * 0.09 * 10000 / 18) = 500 rewires
        assert_eq!(rewires, 500);
        // |N0| = floor(10000/3) - 100
        assert_eq!(n0, 3333 - 100);
        assert_eq!(n0 + n1 + nd, 10_000);
        assert!(matches!(
            sample_interpolation(&p, 0.09, 7),
            Err(Error::RewireShortfall { needed: 500, available: 0 })
        ));
    }

    #[test]
    fn full_construction_shapes() {
        let b = sample_interpolation(&params(), 0.09, 7).unwrap();
        assert_eq!(b.sizes.2, 100);
        // floor(20 * 0.3 * 0.09 * 10000 / 18) = 300 rewires
        assert_eq!(b.rewire_count, 300);
        assert_eq!(b.sizes.0 + b.sizes.1 + b.sizes.2, 10_000);
        assert_eq!(b.g_tilde.node_count(), 9_900);
        assert_eq!(b.g0_prime.node_count(), 10_000);
        assert_eq!(b.g1_prime.node_count(), 10_000);
        assert_eq!(b.delta_range(), 9_900..10_000);
    }

    #[test]
    fn no_edges_between_new_nodes() {
        let b = sample_interpolation(&params(), 0.09, 3).unwrap();
        let delta = b.delta_range();
        for g in [&b.g0_prime, &b.g1_prime] {
            for &(u, v) in g.edges() {
                assert!(
                    !(delta.contains(&(u as usize)) && delta.contains(&(v as usize))),
                    "new-new edge ({u}, {v})"
                );
            }
        }
    }

    #[test]
    fn base_edges_survive_in_g0() {
        let b = sample_interpolation(&params(), 0.09, 11).unwrap();
        let g0: std::collections::HashSet<_> = b.g0_prime.edges().iter().copied().collect();
        for e in b.g_tilde.edges() {
            assert!(g0.contains(e));
        }
    }

    #[test]
    fn rewire_conserves_edge_count_and_moves_blocks() {
        let p = params();
        let b = sample_interpolation(&p, 0.09, 19).unwrap();
        let n0 = b.sizes.0;
        let count_inner = |g: &SparseGraph, lo: usize, hi: usize| {
            g.edges()
                .iter()
                .filter(|&&(u, v)| {
                    (lo..hi).contains(&(u as usize)) && (lo..hi).contains(&(v as usize))
                })
                .count()
        };
        // Reconstruct the pre-rewire graph by replaying the attachment step:
        // instead, check block bookkeeping directly against g_tilde plus
        // attachments. N0-N0 edges of G'1 all come from the base graph, so
        // base_inner0 - rewire_count must remain.
        let base_inner0 = count_inner(&b.g_tilde, 0, n0);
        assert_eq!(count_inner(&b.g1_prime, 0, n0), base_inner0 - b.rewire_count);
        let n1_hi = n0 + b.sizes.1;
        let base_inner1 = count_inner(&b.g_tilde, n0, n1_hi);
        assert_eq!(count_inner(&b.g1_prime, n0, n1_hi), base_inner1 + b.rewire_count);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = sample_interpolation(&params(), 0.09, 5).unwrap();
        let b = sample_interpolation(&params(), 0.09, 5).unwrap();
        assert_eq!(a.g_tilde, b.g_tilde);
        assert_eq!(a.g0_prime, b.g0_prime);
        assert_eq!(a.g1_prime, b.g1_prime);
    }

    #[test]
    fn tiny_delta_is_a_construction_error() {
        let err = sample_interpolation(&params(), 1e-5, 1).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn rewire_shortfall_fails_loudly() {
        // Nearly no N0-N0 edges (1 + r*lambda = 0.01) but a large rewire
        // demand.
        let p = SbmParams::new(10.0, -0.99, 1.0, 200).unwrap();
        let err = sample_interpolation(&p, 0.5, 2).unwrap_err();
        assert!(matches!(err, Error::RewireShortfall { .. }), "got {err:?}");
    }

    #[test]
    fn rejects_nonnegative_lambda() {
        let p = SbmParams::new(5.0, 0.0, 1.0, 1000).unwrap();
        assert!(sample_interpolation(&p, 0.1, 1).is_err());
    }
}
