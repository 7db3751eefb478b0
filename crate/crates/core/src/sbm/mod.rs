//! Graph representation, SBM sampling, and the interpolation constructions
//! comparing ratios `r` and `r + δ`.

mod graph;
mod interpolate;
mod io;
mod sample;

pub use graph::SparseGraph;
pub use interpolate::{sample_interpolation, InterpolationBundle};
pub use io::{read_graph, read_labels, write_graph, write_labels};
pub use sample::sample_sbm;

pub use crate::theory::SbmParams;
