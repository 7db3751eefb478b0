//! Closed-form constants of the two-community model and the Condition-1
//! feasibility checker.
//!
//! Everything here is a deterministic pure function of `(d, λ, r, β)`.
//! Natural logarithms throughout: the partition function pairs `log` with
//! `e^{-β}`, so `log 2` is read as `ln 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ln 2`, the free-energy density of the infinite-temperature spin system.
pub const LN_2: f64 = std::f64::consts::LN_2;

/// Upper end of g's finite range on [0, 1]: `g(1) = 2 ln 2 - 1`.
pub const G_MAX: f64 = 2.0 * LN_2 - 1.0;

/// The `(d, λ, r, n)` parameterization of the equal-mean-degree
/// two-community stochastic block model, with derived views.
///
/// Community probabilities are `π₀ = 1/(1+r)`, `π₁ = r/(1+r)`; connection
/// intensities are `α₀₀ = d(1+rλ)`, `α₀₁ = α₁₀ = d(1-λ)`,
/// `α₁₁ = d(1+λ/r)`, and pair `{u,v}` is an edge with probability
/// `α_{σu σv}/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbmParams {
    d: f64,
    lambda: f64,
    r: f64,
    n: usize,
}

impl SbmParams {
    /// Validates the model invariants: `r ≥ 1`, `1 + rλ ≥ 0`,
    /// `1 + λ/r ≥ 0`, `1 - λ ≥ 0`, `d ≥ 0`, `n ≥ 1`.
    ///
    /// `d = 0` is admitted as a degenerate edgeless model.
    pub fn new(d: f64, lambda: f64, r: f64, n: usize) -> Result<Self> {
        if !d.is_finite() || d < 0.0 {
            return Err(Error::InvalidParams(format!("d must be finite and >= 0, got {d}")));
        }
        if !r.is_finite() || r < 1.0 {
            return Err(Error::InvalidParams(format!("r must be >= 1, got {r}")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParams("lambda must be finite".into()));
        }
        if 1.0 + r * lambda < 0.0 {
            return Err(Error::InvalidParams(format!(
                "1 + r*lambda must be >= 0 (alpha_00 >= 0), got {}",
                1.0 + r * lambda
            )));
        }
        if 1.0 + lambda / r < 0.0 {
            return Err(Error::InvalidParams(format!(
                "1 + lambda/r must be >= 0 (alpha_11 >= 0), got {}",
                1.0 + lambda / r
            )));
        }
        if 1.0 - lambda < 0.0 {
            return Err(Error::InvalidParams(format!(
                "lambda must be <= 1 (alpha_01 >= 0), got {lambda}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParams("n must be >= 1".into()));
        }
        Ok(Self { d, lambda, r, n })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability of community 0: `1/(1+r)`.
    pub fn pi0(&self) -> f64 {
        1.0 / (1.0 + self.r)
    }

    /// Probability of community 1: `r/(1+r)`.
    pub fn pi1(&self) -> f64 {
        self.r / (1.0 + self.r)
    }

    /// Connection intensity matrix `α`, indexed by community pair.
    pub fn alpha(&self) -> [[f64; 2]; 2] {
        let (d, l, r) = (self.d, self.lambda, self.r);
        let a01 = d * (1.0 - l);
        [[d * (1.0 + r * l), a01], [a01, d * (1.0 + l / r)]]
    }

    /// Edge probabilities `q_ab = α_ab / n`.
    pub fn edge_prob(&self) -> [[f64; 2]; 2] {
        let mut q = self.alpha();
        for row in q.iter_mut() {
            for p in row.iter_mut() {
                *p /= self.n as f64;
            }
        }
        q
    }

    /// The community transition matrix `P = [[p00, p01], [p10, p11]]`
    /// with `p_ab = π_b α_ab / d`; a Markov kernel with second
    /// eigenvalue λ.
    pub fn transition_matrix(&self) -> [[f64; 2]; 2] {
        let a = self.alpha();
        let (p0, p1) = (self.pi0(), self.pi1());
        [
            [p0 * a[0][0] / self.d, p1 * a[0][1] / self.d],
            [p0 * a[1][0] / self.d, p1 * a[1][1] / self.d],
        ]
    }

    /// Same model, different size.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.d, self.lambda, self.r, n)
    }

    /// Same model, different ratio.
    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(self.d, self.lambda, r, self.n)
    }
}

/// Large-deviation rate `g(z) = min{ z-(1-z)ln(1-z), (1+z)ln(1+z)-z }`
/// on `[0,1]`, `+∞` for `z > 1`.
///
/// `g(1)` is defined as `2 ln 2 - 1`, the continuous limit of the branch
/// that attains the minimum, so that [`g_inverse`] has a closed domain.
pub fn g(z: f64) -> Result<f64> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::Domain(format!("g requires z >= 0, got {z}")));
    }
    if z > 1.0 {
        return Ok(f64::INFINITY);
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == 1.0 {
        return Ok(G_MAX);
    }
    let lower = z - (1.0 - z) * (1.0 - z).ln();
    let upper = (1.0 + z) * (1.0 + z).ln() - z;
    Ok(lower.min(upper))
}

/// Inverse of [`g`] on `[0, 2 ln 2 - 1]`, by bisection.
///
/// Returns `z` with `|g(z) - v| <= 1e-12`; g is strictly increasing on
/// `[0, 1]`, so the root is unique.
pub fn g_inverse(v: f64) -> Result<f64> {
    if !v.is_finite() || v < 0.0 || v > G_MAX {
        return Err(Error::Domain(format!(
            "g_inverse requires 0 <= v <= 2 ln 2 - 1 = {G_MAX}, got {v}"
        )));
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn require_negative_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "closed forms are proven only for lambda < 0, got {lambda}"
        )));
    }
    Ok(())
}

fn check_r_lambda(r: f64, lambda: f64) -> Result<()> {
    require_negative_lambda(lambda)?;
    if r < 1.0 {
        return Err(Error::InvalidParams(format!("r must be >= 1, got {r}")));
    }
    if 1.0 + r * lambda < 0.0 {
        return Err(Error::InvalidParams(format!(
            "1 + r*lambda must be >= 0, got {}",
            1.0 + r * lambda
        )));
    }
    Ok(())
}

/// Closed form of `C(r, λ)`, the infimum over `[0,1]²` of
/// `rλ(x-y)² + (x+ry-(1+r)/2)² + (1+r)²/4`:
/// `(r²+2rλ+1)/2` for `r ≤ 1-2λ`, else `(r+2λ)(1+r)²/(4(r+λ))`.
pub fn c_r_lambda(r: f64, lambda: f64) -> Result<f64> {
    check_r_lambda(r, lambda)?;
    if r <= 1.0 - 2.0 * lambda {
        Ok((r * r + 2.0 * r * lambda + 1.0) / 2.0)
    } else {
        Ok((r + 2.0 * lambda) * (1.0 + r) * (1.0 + r) / (4.0 * (r + lambda)))
    }
}

/// Optimal `y* = min{ (r+1)/(2(r+λ)), 1 }`; equals 1 iff `r ≤ 1-2λ`.
///
/// Needs only `λ < 0`, `r ≥ 1` and `r + λ > 0`; the optimizer exists even
/// where `1 + rλ < 0` puts the point outside the sampleable model.
pub fn y_star(r: f64, lambda: f64) -> Result<f64> {
    require_negative_lambda(lambda)?;
    if r < 1.0 {
        return Err(Error::InvalidParams(format!("r must be >= 1, got {r}")));
    }
    if r + lambda <= 0.0 {
        return Err(Error::Domain(format!(
            "y_star requires r + lambda > 0, got {}",
            r + lambda
        )));
    }
    Ok(((r + 1.0) / (2.0 * (r + lambda))).min(1.0))
}

/// Optimal `x* = 0`.
pub fn x_star() -> f64 {
    0.0
}

/// Per-item truth values of Condition 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition1Flags {
    /// `0 < β ≤ 1`.
    pub item1: bool,
    /// `(r+1)²(2ln2/(βd) + 2ε₀) < (1+r)²/4 - C(r,λ)`.
    pub item2a: bool,
    /// `ϵ₁ < y* - (r+1)/(2r)`.
    pub item2b: bool,
    /// `(r+1)²(2ln2/(βd) + 2ε₀) ≤ (r²+rλ) min{r-2rλ-1, -λ(1+r)²/(r+λ)}² / (8r²(1-λ)²)`.
    pub item2c: bool,
    /// `d > (9/2) · 4ln2 (1+r)² / C(r,λ)`.
    pub item2d: bool,
}

impl Condition1Flags {
    pub fn all(&self) -> bool {
        self.item1 && self.item2a && self.item2b && self.item2c && self.item2d
    }
}

/// Every closed-form constant for one `(d, λ, r, β)` point.
///
/// `varepsilon0`, `eps0`, `eps1` and `c_d_r_lambda_beta` are `None` when
/// `4 ln 2 (1+r)²/(d C(r,λ))` falls outside g's range, in which case the
/// deviation bounds do not exist (this always coincides with a Condition-1
/// failure: item 2d holding implies the value is well inside the range).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub d: f64,
    pub lambda: f64,
    pub r: f64,
    pub beta: f64,
    pub c_r_lambda: f64,
    pub y_star: f64,
    pub x_star: f64,
    /// `ε₀ = g⁻¹(4 ln 2 (1+r)²/(d C(r,λ)))`.
    pub varepsilon0: Option<f64>,
    /// `ϵ₀`, the x-deviation bound.
    pub eps0: Option<f64>,
    /// `ϵ₁`, the y-deviation bound.
    pub eps1: Option<f64>,
    /// The derivative bound `C(d, r, λ, β)`.
    pub c_d_r_lambda_beta: Option<f64>,
    pub condition1: Condition1Flags,
}

/// Evaluates every constant and Condition-1 item at `(params, β)`.
///
/// Infeasibility is reported through the flags rather than errors; only
/// `λ ≥ 0` (where none of the closed forms apply) is rejected.
pub fn theory_report(params: &SbmParams, beta: f64) -> Result<TheoryReport> {
    let (d, lambda, r) = (params.d(), params.lambda(), params.r());
    require_negative_lambda(lambda)?;
    if !beta.is_finite() {
        return Err(Error::Domain("beta must be finite".into()));
    }

    let c = c_r_lambda(r, lambda)?;
    let ys = y_star(r, lambda)?;
    let rp1_sq = (1.0 + r) * (1.0 + r);

    let item1 = beta > 0.0 && beta <= 1.0;
    let item2d = d > 4.5 * 4.0 * LN_2 * rp1_sq / c;

    // min{ r - 2rλ - 1, -λ(1+r)²/(r+λ) }: both entries are > 0 for λ < 0,
    // r ≥ 1 (strictly inside the feasible region).
    let dev_denom = (r - 2.0 * r * lambda - 1.0).min(-lambda * rp1_sq / (r + lambda));

    let v = 4.0 * LN_2 * rp1_sq / (d * c);
    let defined = beta > 0.0 && v.is_finite() && (0.0..=G_MAX).contains(&v);

    let (varepsilon0, eps0, eps1, c_d, item2a, item2b, item2c);
    if defined {
        let e0 = g_inverse(v)?;
        // S = 2 ln 2/(βd) + 2 ε₀, the recurring deviation budget.
        let s = 2.0 * LN_2 / (beta * d) + 2.0 * e0;
        let ep0 = 2.0 * rp1_sq * s / dev_denom;
        let den1 = (2.0 * (r * r + r * lambda) * ys - r * r - r).abs();
        let t1 = if den1 > 0.0 { rp1_sq * s / den1 } else { f64::INFINITY };
        let t2 = (2.0 * rp1_sq * s / (r * r + r * lambda)).sqrt();
        let ep1 = t1.min(t2);

        item2a = rp1_sq * s < rp1_sq / 4.0 - c;
        item2b = ep1 < ys - (r + 1.0) / (2.0 * r);
        item2c = rp1_sq * s
            <= (r * r + r * lambda) * dev_denom * dev_denom
                / (8.0 * r * r * (1.0 - lambda) * (1.0 - lambda));

        let gap = ((r - 1.0) * (1.0 - lambda) / (1.0 + r))
            .min(lambda.abs() * rp1_sq / (4.0 * (r + lambda)));
        let cd = -beta * d / rp1_sq
            * (gap - (2.0 * beta + LN_2 / (beta * d) + 12.0 * ep0.max(ep1)));

        varepsilon0 = Some(e0);
        eps0 = Some(ep0);
        eps1 = Some(ep1);
        c_d = Some(cd);
    } else {
        varepsilon0 = None;
        eps0 = None;
        eps1 = None;
        c_d = None;
        item2a = false;
        item2b = false;
        item2c = false;
    }

    Ok(TheoryReport {
        d,
        lambda,
        r,
        beta,
        c_r_lambda: c,
        y_star: ys,
        x_star: x_star(),
        varepsilon0,
        eps0,
        eps1,
        c_d_r_lambda_beta: c_d,
        condition1: Condition1Flags {
            item1,
            item2a,
            item2b,
            item2c,
            item2d,
        },
    })
}
