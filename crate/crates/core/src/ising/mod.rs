//! The Ising model `IS(β, G)` with weight `e^{-βJ(σ;G)}`, where `J` counts
//! monochromatic edges: energy, exact log partition function on small
//! graphs, heat-bath Gibbs sampling, thermodynamic-integration free-energy
//! estimation, and the `x(σ)/y(σ)` order parameters.

mod gibbs;
mod partition;
mod spin;
mod ti;

pub use gibbs::{gibbs_sample, GibbsChain, SpinInit};
pub use partition::{exact_log_partition, EXACT_PARTITION_MAX_NODES};
pub use spin::{energy, order_parameters, OrderParameters, SpinConfig};
pub use ti::{
    free_energy_exact, free_energy_ti, free_energy_ti_detailed, FeMethod, FreeEnergyEstimate,
    TiConfig, TiDiagnostics,
};
