//! Monte-Carlo free-energy curves over the community ratio r.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{free_energy_ti, TiConfig};
use crate::rng::{derive_seed, derive_seed2};
use crate::sbm::sample_sbm;
use crate::theory::SbmParams;

/// One sampled point of the curve `r ↦ E[(1/n) Z(β, G)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub r: f64,
    pub free_energy: f64,
    pub std_err: f64,
    pub n_graphs: usize,
}

/// The sampled curve with its `(d, λ, β, n)` context.
///
/// The raw means are expected (not asserted) to decrease in r; the
/// inversion step fits a monotone envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyCurve {
    pub points: Vec<CurvePoint>,
    pub d: f64,
    pub lambda: f64,
    pub beta: f64,
    pub n: usize,
}

impl FreeEnergyCurve {
    /// Indices whose standard error exceeds half the free-energy gap to a
    /// neighboring point; inversion around them is unreliable.
    pub fn unreliable_points(&self) -> Vec<usize> {
        let pts = &self.points;
        (0..pts.len())
            .filter(|&i| {
                let mut min_gap = f64::INFINITY;
                if i > 0 {
                    min_gap = min_gap.min((pts[i].free_energy - pts[i - 1].free_energy).abs());
                }
                if i + 1 < pts.len() {
                    min_gap = min_gap.min((pts[i].free_energy - pts[i + 1].free_energy).abs());
                }
                min_gap.is_finite() && pts[i].std_err > min_gap / 2.0
            })
            .collect()
    }
}

/// Settings for [`build_curve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub r_grid: Vec<f64>,
    pub graphs_per_point: usize,
    pub ti: TiConfig,
}

/// Builds the curve by sampling `graphs_per_point` graphs per grid ratio
/// and averaging their TI free energies. Deterministic given `seed`; the
/// `(point, graph)` work items are independent and reduced in index order.
pub fn build_curve(
    d: f64,
    lambda: f64,
    beta: Option<f64>,
    n: usize,
    cfg: &CurveConfig,
    seed: u64,
) -> Result<FreeEnergyCurve> {
    if lambda >= 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "curve inversion requires lambda < 0, got {lambda}"
        )));
    }
    if cfg.r_grid.is_empty() {
        return Err(Error::InvalidParams("r grid must be nonempty".into()));
    }
    if cfg.graphs_per_point == 0 {
        return Err(Error::InvalidParams("graphs_per_point must be >= 1".into()));
    }
    for w in cfg.r_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Precondition(format!(
                "r grid must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    // validate every grid ratio up front
    for &r in &cfg.r_grid {
        SbmParams::new(d, lambda, r, n)?;
    }
    let beta = beta.unwrap_or_else(|| 1.0 / d.sqrt());

    let graph_stream = derive_seed(seed, 1);
    let ti_stream = derive_seed(seed, 2);
    let g_per = cfg.graphs_per_point;
    let tasks: Vec<(usize, usize)> =
        (0..cfg.r_grid.len()).flat_map(|p| (0..g_per).map(move |g| (p, g))).collect();
    let values: Vec<Result<f64>> = tasks
        .par_iter()
        .map(|&(p, rep)| {
            let params = SbmParams::new(d, lambda, cfg.r_grid[p], n)?;
            let graph = sample_sbm(&params, derive_seed2(graph_stream, p as u64, rep as u64))?;
            let est = free_energy_ti(
                &graph,
                beta,
                &cfg.ti,
                derive_seed2(ti_stream, p as u64, rep as u64),
            )?;
            Ok(est.value)
        })
        .collect();

    let mut by_point: Vec<Vec<f64>> = vec![Vec::with_capacity(g_per); cfg.r_grid.len()];
    for (task, value) in tasks.iter().zip(values) {
        by_point[task.0].push(value?);
    }

    let points = cfg
        .r_grid
        .iter()
        .zip(by_point)
        .map(|(&r, vals)| {
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let std_err = if vals.len() >= 2 {
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (vals.len() as f64 - 1.0);
                (var / vals.len() as f64).sqrt()
            } else {
                0.0
            };
            CurvePoint { r, free_energy: mean, std_err, n_graphs: vals.len() }
        })
        .collect();

    Ok(FreeEnergyCurve { points, d, lambda, beta, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::LN_2;

    fn tiny_ti() -> TiConfig {
        TiConfig { grid_points: 6, sweeps_per_point: 30, burn_in: 15, chains: 2 }
    }

    #[test]
    fn single_point_grid() {
        let cfg = CurveConfig { r_grid: vec![1.5], graphs_per_point: 2, ti: tiny_ti() };
        let curve = build_curve(6.0, -0.4, None, 80, &cfg, 3).unwrap();
        assert_eq!(curve.points.len(), 1);
        assert_eq!(curve.points[0].n_graphs, 2);
        assert!((curve.beta - 1.0 / 6.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn values_bounded_by_ln2() {
        let cfg = CurveConfig { r_grid: vec![1.0, 1.5, 2.0], graphs_per_point: 2, ti: tiny_ti() };
        let curve = build_curve(6.0, -0.4, Some(0.3), 80, &cfg, 4).unwrap();
        for p in &curve.points {
            assert!(p.free_energy <= LN_2 + 1e-12);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = CurveConfig { r_grid: vec![1.0, 2.0], graphs_per_point: 2, ti: tiny_ti() };
        let a = build_curve(6.0, -0.4, None, 60, &cfg, 11).unwrap();
        let b = build_curve(6.0, -0.4, None, 60, &cfg, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_validation() {
        let cfg = CurveConfig { r_grid: vec![2.0, 1.0], graphs_per_point: 1, ti: tiny_ti() };
        assert!(build_curve(6.0, -0.4, None, 60, &cfg, 1).is_err());
        // r = 3 infeasible at lambda = -0.4
        let cfg = CurveConfig { r_grid: vec![1.0, 3.0], graphs_per_point: 1, ti: tiny_ti() };
        assert!(build_curve(6.0, -0.4, None, 60, &cfg, 1).is_err());
        let cfg = CurveConfig { r_grid: vec![1.0], graphs_per_point: 1, ti: tiny_ti() };
        assert!(build_curve(6.0, 0.1, None, 60, &cfg, 1).is_err());
    }

    #[test]
    fn unreliable_point_flagging() {
        let curve = FreeEnergyCurve {
            points: vec![
                CurvePoint { r: 1.0, free_energy: 0.5, std_err: 0.001, n_graphs: 4 },
                CurvePoint { r: 2.0, free_energy: 0.49, std_err: 0.02, n_graphs: 4 },
                CurvePoint { r: 3.0, free_energy: 0.45, std_err: 0.001, n_graphs: 4 },
            ],
            d: 5.0,
            lambda: -0.3,
            beta: 0.4,
            n: 100,
        };
        assert_eq!(curve.unreliable_points(), vec![1]);
    }
}
