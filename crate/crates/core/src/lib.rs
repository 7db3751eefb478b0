//! Parameter estimation and clustering on sparse two-community stochastic
//! block models, built around the Ising-model log partition function.
//!
//! The pipeline: generate `SBM(d, λ, r, n)` graphs ([`sbm`]), estimate
//! `(d, λ)` by counting short cycles ([`cycles`]), estimate the community
//! ratio `r` by inverting a Monte-Carlo free-energy curve ([`inference`]),
//! and cluster by sampling the antiferromagnetic Ising measure at
//! `β = 1/√d̂` ([`ising`]). The closed-form constants backing all of this
//! live in [`theory`]; brute-force references used by the test suites live
//! in [`oracle`].

pub mod cycles;
pub mod error;
pub mod inference;
pub mod ising;
pub mod oracle;
pub mod rng;
pub mod sbm;
pub mod theory;

pub use error::{Error, Result};
pub use sbm::SparseGraph;
pub use theory::SbmParams;
