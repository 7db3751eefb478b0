//! The r-estimator by free-energy-curve inversion and the Gibbs clustering
//! algorithm.

mod cluster;
mod curve;
mod estimate;

pub use cluster::{cluster, cluster_with_beta, ClusterResult};
pub use curve::{build_curve, CurveConfig, CurvePoint, FreeEnergyCurve};
pub use estimate::{
    estimate_r, estimate_r_from_value, CiMethod, RHatEstimate,
};
