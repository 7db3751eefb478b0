//! Free-energy estimation by thermodynamic integration.
//!
//! `(1/n) Z(β, G) = ln 2 - (1/n) ∫₀^β E_{IS(t,G)}[J] dt`, using
//! `dZ/dβ = -E[J]` and `Z(0) = n ln 2`. The integrand is estimated by
//! Gibbs chains warm-started along an increasing temperature grid and the
//! integral by the trapezoid rule; at `t = 0` the exact value `m/2` is
//! used.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::gibbs::{GibbsChain, SpinInit};
use crate::ising::partition::exact_log_partition;
use crate::rng::derive_seed;
use crate::sbm::SparseGraph;
use crate::theory::LN_2;

/// Chain and grid settings for one integration run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TiConfig {
    /// Uniform temperature grid points on `[0, β]`, endpoints included.
    pub grid_points: usize,
    /// Sweeps averaged at each grid point.
    pub sweeps_per_point: usize,
    /// Extra sweeps discarded at the first sampled point.
    pub burn_in: usize,
    /// Independent chains; the standard error comes from their spread.
    pub chains: usize,
}

impl Default for TiConfig {
    fn default() -> Self {
        Self { grid_points: 32, sweeps_per_point: 200, burn_in: 100, chains: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeMethod {
    Exact,
    ThermoIntegration,
}

/// A free-energy density estimate `(1/n) Z(β, G)` with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyEstimate {
    pub value: f64,
    pub std_err: f64,
    pub method: FeMethod,
    pub beta: f64,
    /// Sweeps per grid point (0 for the exact method).
    pub sweeps: usize,
    /// Temperature grid size (0 for the exact method).
    pub integration_points: usize,
    /// Set when independent chains disagree beyond 5σ.
    pub low_confidence: bool,
}

/// Per-grid-point diagnostics of one integration run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiDiagnostics {
    /// The temperature grid.
    pub grid: Vec<f64>,
    /// Across-chain mean of `E[J]` at each grid point.
    pub mean_energy: Vec<f64>,
    /// Free-energy value from each chain's own integral.
    pub per_chain_values: Vec<f64>,
    /// Trapezoid discretization bound folded into `std_err`.
    pub discretization: f64,
}

impl TiDiagnostics {
    /// Partial estimates `(1/n)Z(t_j)` along the grid; nonincreasing since
    /// the integrand is nonnegative.
    pub fn partial_values(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.len());
        let mut acc = 0.0;
        out.push(LN_2);
        for w in self.grid.windows(2).zip(self.mean_energy.windows(2)) {
            let (ts, es) = w;
            acc += (ts[1] - ts[0]) * (es[0] + es[1]) / 2.0;
            out.push(LN_2 - acc / n as f64);
        }
        out
    }
}

/// Exact free-energy density via [`exact_log_partition`] (n ≤ 26).
pub fn free_energy_exact(g: &SparseGraph, beta: f64) -> Result<FreeEnergyEstimate> {
    let z = exact_log_partition(g, beta)?;
    Ok(FreeEnergyEstimate {
        value: z / g.node_count() as f64,
        std_err: 0.0,
        method: FeMethod::Exact,
        beta,
        sweeps: 0,
        integration_points: 0,
        low_confidence: false,
    })
}

/// Thermodynamic-integration estimate of `(1/n) Z(β, G)`.
///
/// Deterministic given `(seed, cfg.chains)`: every chain derives its own
/// stream and the reduction is ordered.
pub fn free_energy_ti(
    g: &SparseGraph,
    beta: f64,
    cfg: &TiConfig,
    seed: u64,
) -> Result<FreeEnergyEstimate> {
    free_energy_ti_detailed(g, beta, cfg, seed).map(|(est, _)| est)
}

/// [`free_energy_ti`] plus per-point diagnostics.
pub fn free_energy_ti_detailed(
    g: &SparseGraph,
    beta: f64,
    cfg: &TiConfig,
    seed: u64,
) -> Result<(FreeEnergyEstimate, TiDiagnostics)> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Domain(format!("beta must be finite and >= 0, got {beta}")));
    }
    if cfg.chains == 0 || cfg.sweeps_per_point == 0 || cfg.grid_points < 2 {
        return Err(Error::InvalidParams(
            "TI needs chains >= 1, sweeps_per_point >= 1, grid_points >= 2".into(),
        ));
    }
    let n = g.node_count() as f64;
    let k = cfg.grid_points;
    let grid: Vec<f64> = (0..k).map(|j| beta * j as f64 / (k - 1) as f64).collect();

    if beta == 0.0 {
        let est = FreeEnergyEstimate {
            value: LN_2,
            std_err: 0.0,
            method: FeMethod::ThermoIntegration,
            beta,
            sweeps: cfg.sweeps_per_point,
            integration_points: k,
            low_confidence: false,
        };
        let diag = TiDiagnostics {
            grid,
            mean_energy: vec![g.edge_count() as f64 / 2.0; k],
            per_chain_values: vec![LN_2; cfg.chains],
            discretization: 0.0,
        };
        return Ok((est, diag));
    }

    // Each chain walks the grid once, warm-starting between points.
    let chain_runs: Vec<Result<ChainRun>> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| run_chain(g, &grid, cfg, derive_seed(seed, c as u64)))
        .collect();
    let mut runs = Vec::with_capacity(cfg.chains);
    for r in chain_runs {
        runs.push(r?);
    }

    let per_chain_values: Vec<f64> =
        runs.iter().map(|run| LN_2 - trapezoid(&grid, &run.energy_means) / n).collect();
    let value = per_chain_values.iter().sum::<f64>() / cfg.chains as f64;

    let mean_energy: Vec<f64> = (0..k)
        .map(|j| runs.iter().map(|r| r.energy_means[j]).sum::<f64>() / cfg.chains as f64)
        .collect();

    // Monte-Carlo error: across-chain spread when possible, batch means
    // within the single chain otherwise.
    let mc_var = if cfg.chains >= 2 {
        let var = per_chain_values
            .iter()
            .map(|v| (v - value) * (v - value))
            .sum::<f64>()
            / (cfg.chains as f64 - 1.0);
        var / cfg.chains as f64
    } else {
        // Var(I) = sum_j w_j^2 Var(mean_j), trapezoid weights w_j.
        let h = grid[1] - grid[0];
        let run = &runs[0];
        let mut var_i = 0.0;
        for (j, &v) in run.batch_variances.iter().enumerate() {
            let w = if j == 0 || j == k - 1 { h / 2.0 } else { h };
            var_i += w * w * v;
        }
        var_i / (n * n)
    };

    // Trapezoid truncation estimated from second differences of the
    // integrand: sum over intervals of h^3 |f''| / 12.
    let h = grid[1] - grid[0];
    let disc: f64 = (1..k.saturating_sub(1))
        .map(|j| (mean_energy[j + 1] - 2.0 * mean_energy[j] + mean_energy[j - 1]).abs())
        .sum::<f64>()
        * h
        / 12.0
        / n;

    let std_err = (mc_var + disc * disc).sqrt();

    let low_confidence = if cfg.chains >= 2 {
        let sd = (mc_var * cfg.chains as f64).sqrt();
        let spread = per_chain_values.iter().cloned().fold(f64::MIN, f64::max)
            - per_chain_values.iter().cloned().fold(f64::MAX, f64::min);
        sd > 0.0 && spread > 5.0 * std::f64::consts::SQRT_2 * sd
    } else {
        false
    };

    let est = FreeEnergyEstimate {
        value,
        std_err,
        method: FeMethod::ThermoIntegration,
        beta,
        sweeps: cfg.sweeps_per_point,
        integration_points: k,
        low_confidence,
    };
    let diag = TiDiagnostics {
        grid,
        mean_energy,
        per_chain_values,
        discretization: disc,
    };
    Ok((est, diag))
}

struct ChainRun {
    energy_means: Vec<f64>,
    batch_variances: Vec<f64>,
}

fn run_chain(g: &SparseGraph, grid: &[f64], cfg: &TiConfig, seed: u64) -> Result<ChainRun> {
    let mut chain = GibbsChain::new(g, grid[0], seed, SpinInit::Uniform)?;
    let mut energy_means = Vec::with_capacity(grid.len());
    let mut batch_variances = Vec::with_capacity(grid.len());
    // Uniform initialization is an exact sample at t = 0; the integrand
    // there is m/2 analytically.
    energy_means.push(g.edge_count() as f64 / 2.0);
    batch_variances.push(0.0);

    let batches = cfg.sweeps_per_point.min(10).max(1);
    let mut samples = Vec::with_capacity(cfg.sweeps_per_point);
    for (j, &t) in grid.iter().enumerate().skip(1) {
        chain.set_beta(t)?;
        if j == 1 {
            chain.run(cfg.burn_in);
        }
        samples.clear();
        for _ in 0..cfg.sweeps_per_point {
            chain.sweep();
            samples.push(chain.energy() as f64);
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        energy_means.push(mean);

        // batch means estimate of Var(mean) for the single-chain case
        let per = samples.len() / batches;
        if per >= 1 && batches >= 2 {
            let bm: Vec<f64> = (0..batches)
                .map(|b| samples[b * per..(b + 1) * per].iter().sum::<f64>() / per as f64)
                .collect();
            let bmean = bm.iter().sum::<f64>() / batches as f64;
            let bvar =
                bm.iter().map(|v| (v - bmean) * (v - bmean)).sum::<f64>() / (batches as f64 - 1.0);
            batch_variances.push(bvar / batches as f64);
        } else {
            batch_variances.push(0.0);
        }
    }
    Ok(ChainRun { energy_means, batch_variances })
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbm::{sample_sbm, SparseGraph};
    use crate::theory::SbmParams;

    fn ring(n: usize) -> SparseGraph {
        let edges: Vec<(u32, u32)> =
            (0..n as u32).map(|u| (u.min((u + 1) % n as u32), u.max((u + 1) % n as u32))).collect();
        SparseGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn beta_zero_is_exact_ln2() {
        let g = ring(12);
        let est = free_energy_ti(&g, 0.0, &TiConfig::default(), 1).unwrap();
        assert_eq!(est.value, LN_2);
        assert_eq!(est.std_err, 0.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = ring(16);
        let cfg = TiConfig { grid_points: 8, sweeps_per_point: 40, burn_in: 20, chains: 2 };
        let a = free_energy_ti(&g, 0.6, &cfg, 5).unwrap();
        let b = free_energy_ti(&g, 0.6, &cfg, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bounds_hold_by_construction() {
        let g = ring(14);
        let cfg = TiConfig { grid_points: 12, sweeps_per_point: 60, burn_in: 30, chains: 2 };
        for &beta in &[0.2, 0.7, 1.5] {
            let est = free_energy_ti(&g, beta, &cfg, 9).unwrap();
            assert!(est.value <= LN_2 + 1e-12);
            let floor = LN_2 - beta * g.edge_count() as f64 / g.node_count() as f64;
            assert!(est.value >= floor - 1e-12);
        }
    }

    #[test]
    fn partial_values_nonincreasing() {
        let g = ring(14);
        let cfg = TiConfig { grid_points: 10, sweeps_per_point: 50, burn_in: 25, chains: 2 };
        let (_, diag) = free_energy_ti_detailed(&g, 1.0, &cfg, 3).unwrap();
        let partial = diag.partial_values(14);
        assert_eq!(partial.len(), 10);
        for w in partial.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn agrees_with_exact_on_small_graphs() {
        let cfg = TiConfig { grid_points: 24, sweeps_per_point: 300, burn_in: 150, chains: 4 };
        let mut checked = 0;
        for seed in 0..6u64 {
            let params = SbmParams::new(3.0, -0.5, 1.5, 16).unwrap();
            let g = sample_sbm(&params, 700 + seed).unwrap();
            for &beta in &[0.3, 1.0] {
                let exact = free_energy_exact(&g, beta).unwrap();
                let ti = free_energy_ti(&g, beta, &cfg, 31 + seed).unwrap();
                let tol = (3.0 * ti.std_err).max(0.01);
                assert!(
                    (ti.value - exact.value).abs() <= tol,
                    "seed {seed} beta {beta}: |{} - {}| > {tol}",
                    ti.value,
                    exact.value
                );
                checked += 1;
            }
        }
        assert_eq!(checked, 12);
    }

    #[test]
    fn config_validation() {
        let g = ring(6);
        let bad = TiConfig { grid_points: 1, ..TiConfig::default() };
        assert!(free_energy_ti(&g, 0.5, &bad, 1).is_err());
        let bad = TiConfig { chains: 0, ..TiConfig::default() };
        assert!(free_energy_ti(&g, 0.5, &bad, 1).is_err());
        assert!(free_energy_ti(&g, -0.5, &TiConfig::default(), 1).is_err());
    }
}
