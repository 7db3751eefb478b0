//! Inversion of a free-energy curve at an observed value.
//!
//! The raw curve is noisy, so a monotone-decreasing envelope is fitted
//! first (weighted pool-adjacent-violators), then inverted piecewise
//! linearly. Confidence intervals propagate the observed and curve errors
//! through the local slope (delta method), with a bootstrap alternative
//! for small curves.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::curve::FreeEnergyCurve;
use crate::ising::{free_energy_ti, TiConfig};
use crate::rng::chain_rng;
use crate::sbm::SparseGraph;

/// Confidence-interval construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CiMethod {
    /// Propagate errors through the local interpolant slope.
    DeltaMethod,
    /// Resample curve points and the observed value.
    Bootstrap { replicates: usize, seed: u64 },
}

/// The inverted estimate with its 95% confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RHatEstimate {
    pub r_hat: f64,
    pub ci: (f64, f64),
    pub observed: f64,
    pub observed_std_err: f64,
    pub warnings: Vec<String>,
}

/// Computes the observed graph's free energy with the curve's own `β` and
/// the given TI configuration, then inverts the curve at it.
///
/// The observed graph's `(1/n)Z` fluctuates around the model expectation
/// (the `O_p(1/√n)` term), so its standard error is widened by the
/// graph-to-graph spread implied by the curve points before the interval
/// is formed; the TI error alone would badly understate the uncertainty.
pub fn estimate_r(
    curve: &FreeEnergyCurve,
    observed_graph: &SparseGraph,
    ti: &TiConfig,
    seed: u64,
) -> Result<RHatEstimate> {
    let est = free_energy_ti(observed_graph, curve.beta, ti, seed)?;
    let first = estimate_r_from_value(curve, est.value, est.std_err)?;
    let mut out = match per_graph_sd(curve, first.r_hat) {
        Some(sigma_g) => {
            let se = (est.std_err * est.std_err + sigma_g * sigma_g).sqrt();
            estimate_r_from_value(curve, est.value, se)?
        }
        None => {
            let mut e = first;
            e.warnings.push(
                "curve points carry no replicate spread; CI reflects TI noise only".into(),
            );
            e
        }
    };
    if observed_graph.node_count() != curve.n {
        out.warnings.push(format!(
            "observed graph has n = {} but the curve was built at n = {}",
            observed_graph.node_count(),
            curve.n
        ));
    }
    Ok(out)
}

/// Per-graph free-energy spread near `r0`, reconstructed from the curve's
/// standard errors (`sd = se √n_graphs`).
fn per_graph_sd(curve: &FreeEnergyCurve, r0: f64) -> Option<f64> {
    let usable: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.n_graphs >= 2 && p.std_err > 0.0)
        .map(|p| (p.r, p.std_err * (p.n_graphs as f64).sqrt()))
        .collect();
    if usable.is_empty() {
        return None;
    }
    let (rs, sds): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
    Some(interp_se(&rs, &sds, r0))
}

/// Inverts the curve at a known observed value (delta-method CI).
pub fn estimate_r_from_value(
    curve: &FreeEnergyCurve,
    observed: f64,
    observed_std_err: f64,
) -> Result<RHatEstimate> {
    estimate_r_from_value_with(curve, observed, observed_std_err, CiMethod::DeltaMethod)
}

/// Inverts the curve at a known observed value with a chosen CI method.
pub fn estimate_r_from_value_with(
    curve: &FreeEnergyCurve,
    observed: f64,
    observed_std_err: f64,
    method: CiMethod,
) -> Result<RHatEstimate> {
    validate_curve(curve)?;
    let rs: Vec<f64> = curve.points.iter().map(|p| p.r).collect();
    let means: Vec<f64> = curve.points.iter().map(|p| p.free_energy).collect();
    let ses: Vec<f64> = curve.points.iter().map(|p| p.std_err).collect();

    let mut warnings = Vec::new();
    for j in 0..means.len() - 1 {
        let noise = 2.0 * (ses[j] * ses[j] + ses[j + 1] * ses[j + 1]).sqrt();
        if means[j + 1] > means[j] + noise {
            warnings.push(format!(
                "curve is non-monotone beyond noise between r = {} and r = {}",
                rs[j],
                rs[j + 1]
            ));
        }
    }

    let fitted = isotonic_decreasing(&means, &weights_from(&ses));
    let r_hat = invert_fitted(&rs, &fitted, observed)?;

    let ci = match method {
        CiMethod::DeltaMethod => {
            let slope = local_slope(&rs, &fitted, r_hat);
            if let Some(slope) = slope {
                let se_curve = interp_se(&rs, &ses, r_hat);
                let half = 1.96
                    * (observed_std_err * observed_std_err + se_curve * se_curve).sqrt()
                    / slope.abs();
                (r_hat - half, r_hat + half)
            } else {
                warnings.push("curve is flat around the solution; CI spans the grid".into());
                (rs[0], *rs.last().expect("nonempty"))
            }
        }
        CiMethod::Bootstrap { replicates, seed } => {
            if replicates < 2 {
                return Err(Error::InvalidParams("bootstrap needs >= 2 replicates".into()));
            }
            let mut rng = chain_rng(seed);
            let unit = Normal::new(0.0, 1.0).expect("valid normal");
            let mut draws = Vec::with_capacity(replicates);
            let weights = weights_from(&ses);
            for _ in 0..replicates {
                let noisy: Vec<f64> = means
                    .iter()
                    .zip(&ses)
                    .map(|(&m, &s)| m + s * unit.sample(&mut rng))
                    .collect();
                let obs = observed + observed_std_err * unit.sample(&mut rng);
                let fit = isotonic_decreasing(&noisy, &weights);
                let r = match invert_fitted(&rs, &fit, obs) {
                    Ok(r) => r,
                    // clamp out-of-range resamples to the nearest endpoint
                    Err(Error::Extrapolation { nearest_r, .. }) => nearest_r,
                    Err(e) => return Err(e),
                };
                draws.push(r);
            }
            draws.sort_by(|a, b| a.total_cmp(b));
            let lo = draws[((replicates as f64 * 0.025) as usize).min(replicates - 1)];
            let hi = draws[((replicates as f64 * 0.975) as usize).min(replicates - 1)];
            (lo, hi)
        }
    };

    Ok(RHatEstimate { r_hat, ci, observed, observed_std_err, warnings })
}

fn validate_curve(curve: &FreeEnergyCurve) -> Result<()> {
    if curve.points.len() < 3 {
        return Err(Error::Precondition(format!(
            "curve inversion needs >= 3 points, got {}",
            curve.points.len()
        )));
    }
    for w in curve.points.windows(2) {
        if w[1].r <= w[0].r {
            return Err(Error::Precondition(format!(
                "curve r values must be strictly increasing, got {} then {}",
                w[0].r, w[1].r
            )));
        }
    }
    Ok(())
}

fn weights_from(ses: &[f64]) -> Vec<f64> {
    ses.iter().map(|&s| 1.0 / (s * s).max(1e-18)).collect()
}

/// Weighted pool-adjacent-violators fit, nonincreasing.
fn isotonic_decreasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    // fit the negated sequence as nondecreasing
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((w, w * -v, 1));
        while blocks.len() >= 2 {
            let b = blocks[blocks.len() - 1];
            let a = blocks[blocks.len() - 2];
            if a.1 / a.0 > b.1 / b.0 {
                blocks.truncate(blocks.len() - 2);
                blocks.push((a.0 + b.0, a.1 + b.1, a.2 + b.2));
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (w, wv, count) in blocks {
        let mean = -(wv / w);
        out.extend(std::iter::repeat(mean).take(count));
    }
    out
}

/// Abscissa where the piecewise-linear nonincreasing interpolant through
/// `(rs, fitted)` equals `v`; midpoints of flat runs matching `v` exactly.
fn invert_fitted(rs: &[f64], fitted: &[f64], v: f64) -> Result<f64> {
    let f_max = fitted[0];
    let f_min = *fitted.last().expect("nonempty");
    if v > f_max {
        return Err(Error::Extrapolation {
            observed: v,
            lo: f_min,
            hi: f_max,
            nearest_r: rs[0],
        });
    }
    if v < f_min {
        return Err(Error::Extrapolation {
            observed: v,
            lo: f_min,
            hi: f_max,
            nearest_r: *rs.last().expect("nonempty"),
        });
    }
    // last index still above (or at) v, first index already below (or at) v
    let a = (0..fitted.len()).rev().find(|&i| fitted[i] >= v).expect("v <= f_max");
    let b = (0..fitted.len()).find(|&i| fitted[i] <= v).expect("v >= f_min");
    if b > a {
        // strict crossing inside segment (a, b) = (a, a+1)
        let t = (fitted[a] - v) / (fitted[a] - fitted[b]);
        Ok(rs[a] + t * (rs[b] - rs[a]))
    } else {
        // flat run [b..=a] equal to v
        Ok(0.5 * (rs[b] + rs[a]))
    }
}

/// Slope of the fitted interpolant near `r0`, `None` when the whole fit
/// is flat.
fn local_slope(rs: &[f64], fitted: &[f64], r0: f64) -> Option<f64> {
    for j in 0..rs.len() - 1 {
        if rs[j] <= r0 && r0 <= rs[j + 1] {
            let s = (fitted[j + 1] - fitted[j]) / (rs[j + 1] - rs[j]);
            if s != 0.0 {
                return Some(s);
            }
        }
    }
    // inside a pooled run: fall back to the nearest non-flat segment
    let mut best: Option<(f64, f64)> = None;
    for j in 0..rs.len() - 1 {
        let s = (fitted[j + 1] - fitted[j]) / (rs[j + 1] - rs[j]);
        if s != 0.0 {
            let dist = (0.5 * (rs[j] + rs[j + 1]) - r0).abs();
            if best.is_none_or(|(d, _)| dist < d) {
                best = Some((dist, s));
            }
        }
    }
    best.map(|(_, s)| s)
}

fn interp_se(rs: &[f64], ses: &[f64], r0: f64) -> f64 {
    if r0 <= rs[0] {
        return ses[0];
    }
    if r0 >= *rs.last().expect("nonempty") {
        return *ses.last().expect("nonempty");
    }
    for j in 0..rs.len() - 1 {
        if rs[j] <= r0 && r0 <= rs[j + 1] {
            let t = (r0 - rs[j]) / (rs[j + 1] - rs[j]);
            return ses[j] + t * (ses[j + 1] - ses[j]);
        }
    }
    ses[ses.len() - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::curve::CurvePoint;

    fn curve(points: Vec<(f64, f64, f64)>) -> FreeEnergyCurve {
        FreeEnergyCurve {
            points: points
                .into_iter()
                .map(|(r, f, s)| CurvePoint { r, free_energy: f, std_err: s, n_graphs: 8 })
                .collect(),
            d: 50.0,
            lambda: -0.2,
            beta: 0.14,
            n: 1000,
        }
    }

    fn clean_curve() -> FreeEnergyCurve {
        curve(vec![
            (1.0, 0.60, 0.004),
            (2.0, 0.55, 0.004),
            (3.0, 0.51, 0.004),
            (4.0, 0.48, 0.004),
        ])
    }

    #[test]
    fn observed_at_point_mean_returns_that_r() {
        let est = estimate_r_from_value(&clean_curve(), 0.51, 0.002).unwrap();
        assert!((est.r_hat - 3.0).abs() < 1e-12);
        assert!(est.ci.0 < 3.0 && 3.0 < est.ci.1);
        assert!(est.warnings.is_empty());
    }

    #[test]
    fn interpolates_between_points() {
        let est = estimate_r_from_value(&clean_curve(), 0.53, 0.002).unwrap();
        assert!((est.r_hat - 2.5).abs() < 1e-12);
    }

    #[test]
    fn shift_equivariance() {
        let base = estimate_r_from_value(&clean_curve(), 0.53, 0.002).unwrap();
        let mut shifted = clean_curve();
        for p in &mut shifted.points {
            p.free_energy += 0.37;
        }
        let est = estimate_r_from_value(&shifted, 0.53 + 0.37, 0.002).unwrap();
        assert!((est.r_hat - base.r_hat).abs() < 1e-12);
        assert!((est.ci.0 - base.ci.0).abs() < 1e-9);
        assert!((est.ci.1 - base.ci.1).abs() < 1e-9);
    }

    #[test]
    fn reversed_curve_is_a_precondition_error() {
        let c = curve(vec![(3.0, 0.5, 0.01), (2.0, 0.55, 0.01), (1.0, 0.6, 0.01)]);
        assert!(matches!(
            estimate_r_from_value(&c, 0.55, 0.01),
            Err(Error::Precondition(_))
        ));
        let c = curve(vec![(1.0, 0.5, 0.01), (2.0, 0.45, 0.01)]);
        assert!(estimate_r_from_value(&c, 0.47, 0.01).is_err());
    }

    #[test]
    fn extrapolation_reports_nearest_endpoint() {
        match estimate_r_from_value(&clean_curve(), 0.70, 0.002) {
            Err(Error::Extrapolation { nearest_r, .. }) => assert_eq!(nearest_r, 1.0),
            other => panic!("expected extrapolation, got {other:?}"),
        }
        match estimate_r_from_value(&clean_curve(), 0.40, 0.002) {
            Err(Error::Extrapolation { nearest_r, .. }) => assert_eq!(nearest_r, 4.0),
            other => panic!("expected extrapolation, got {other:?}"),
        }
    }

    #[test]
    fn noisy_bump_is_pooled_and_warned() {
        // the middle point violates monotonicity beyond its noise
        let c = curve(vec![
            (1.0, 0.60, 0.001),
            (2.0, 0.50, 0.001),
            (3.0, 0.56, 0.001),
            (4.0, 0.45, 0.001),
        ]);
        let est = estimate_r_from_value(&c, 0.53, 0.001).unwrap();
        assert!(!est.warnings.is_empty());
        // pooled block mean of 0.50/0.56 is 0.53: the flat run spans [2, 3]
        assert!((est.r_hat - 2.5).abs() < 1e-9);
    }

    #[test]
    fn bootstrap_ci_contains_point_estimate() {
        let est = estimate_r_from_value_with(
            &clean_curve(),
            0.53,
            0.003,
            CiMethod::Bootstrap { replicates: 400, seed: 9 },
        )
        .unwrap();
        assert!(est.ci.0 <= est.r_hat && est.r_hat <= est.ci.1);
        assert!(est.ci.0 >= 1.0 && est.ci.1 <= 4.0);
    }

    #[test]
    fn isotonic_fit_is_nonincreasing_and_preserves_clean_input() {
        let vals = vec![0.6, 0.5, 0.4];
        let w = vec![1.0, 1.0, 1.0];
        assert_eq!(isotonic_decreasing(&vals, &w), vals);
        let vals = vec![0.4, 0.5, 0.3];
        let fit = isotonic_decreasing(&vals, &w);
        for pair in fit.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-15);
        }
        assert!((fit[0] - 0.45).abs() < 1e-12);
        assert!((fit[1] - 0.45).abs() < 1e-12);
    }
}
