//! Immutable undirected simple graph with adjacency lists.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};

/// An undirected simple graph, immutable after construction.
///
/// Edges are stored both as a sorted `(u, v)` list with `u < v` and as
/// CSR-style adjacency (sorted neighbor slices), so iteration order is
/// fixed everywhere. Storage is `O(n + m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseGraph {
    n: usize,
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
    edges: Vec<(u32, u32)>,
    labels: Option<Vec<u8>>,
}

impl SparseGraph {
    /// Builds a graph from an edge list. Endpoint order within a pair is
    /// normalized; self-loops, duplicates and out-of-range endpoints are
    /// rejected.
    pub fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        let mut seen = HashSet::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidParams(format!("self-loop at node {a}")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if v as usize >= n {
                return Err(Error::InvalidParams(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidParams(format!("duplicate edge ({u}, {v})")));
            }
            normalized.push((u, v));
        }
        normalized.sort_unstable();

        let mut degrees = vec![0usize; n];
        for &(u, v) in &normalized {
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for d in &degrees {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets.clone();
        let mut adjacency = vec![0u32; acc];
        for &(u, v) in &normalized {
            adjacency[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            adjacency[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for u in 0..n {
            adjacency[offsets[u]..offsets[u + 1]].sort_unstable();
        }

        Ok(Self { n, offsets, adjacency, edges: normalized, labels: None })
    }

    /// Attaches ground-truth community labels (one of `{0, 1}` per node).
    pub fn with_labels(mut self, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidParams(format!(
                "label count {} does not match n = {}",
                labels.len(),
                self.n
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidParams(format!("labels must be 0 or 1, got {bad}")));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adjacency[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Edge list sorted by `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    /// Node indices of each community, from the labels.
    pub fn communities(&self) -> Option<(Vec<u32>, Vec<u32>)> {
        let labels = self.labels.as_ref()?;
        let mut c0 = Vec::new();
        let mut c1 = Vec::new();
        for (u, &l) in labels.iter().enumerate() {
            if l == 0 {
                c0.push(u as u32);
            } else {
                c1.push(u as u32);
            }
        }
        Some((c0, c1))
    }
}
