//! Seeded SBM sampling.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::rng::chain_rng;
use crate::sbm::SparseGraph;
use crate::theory::SbmParams;

/// Samples `G ~ SBM(d, λ, r, n)` with ground-truth labels attached.
///
/// Labels are i.i.d. with `P(label = 0) = 1/(1+r)`; each pair `{u, v}` is
/// then an edge independently with probability `α_{σu σv}/n`. The pair set
/// is never materialized: per block pair the edge count is drawn from the
/// matching binomial and that many distinct pairs are placed uniformly.
/// Deterministic given `seed`.
pub fn sample_sbm(params: &SbmParams, seed: u64) -> Result<SparseGraph> {
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
    let n = params.n();
    let mut rng = chain_rng(seed);

    let pi0 = params.pi0();
    let labels: Vec<u8> = (0..n).map(|_| if rng.random::<f64>() < pi0 { 0 } else { 1 }).collect();
    let mut members: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
    for (u, &l) in labels.iter().enumerate() {
        members[l as usize].push(u as u32);
    }

    let mut edges = Vec::new();
    for (a, b) in [(0usize, 0usize), (0, 1), (1, 1)] {
        sample_block(&members[a], &members[b], a == b, q[a][b], &mut rng, &mut edges)?;
    }

    SparseGraph::from_edges(n, edges)?.with_labels(labels)
}

/// Draws a `Binomial(#pairs, p)` edge count for one block pair, then that
/// many distinct pairs uniformly (rejection on duplicates).
pub(crate) fn sample_block(
    left: &[u32],
    right: &[u32],
    within: bool,
    p: f64,
    rng: &mut impl Rng,
    edges: &mut Vec<(u32, u32)>,
) -> Result<()> {
    let pairs: u64 = if within {
        let s = left.len() as u64;
        s * s.saturating_sub(1) / 2
    } else {
        left.len() as u64 * right.len() as u64
    };
    if pairs == 0 || p <= 0.0 {
        return Ok(());
    }
    let count = Binomial::new(pairs, p)
        .map_err(|e| Error::InvalidParams(format!("binomial({pairs}, {p}): {e}")))?
        .sample(rng);
    let mut chosen: HashSet<(u32, u32)> = HashSet::with_capacity(count as usize);
    while (chosen.len() as u64) < count {
        let (u, v) = if within {
            let i = rng.random_range(0..left.len());
            let j = rng.random_range(0..left.len());
            if i == j {
                continue;
            }
            (left[i.min(j)], left[i.max(j)])
        } else {
            let u = left[rng.random_range(0..left.len())];
            let v = right[rng.random_range(0..right.len())];
            (u.min(v), u.max(v))
        };
        if chosen.insert((u, v)) {
            edges.push((u, v));
        }
    }
    Ok(())
}
