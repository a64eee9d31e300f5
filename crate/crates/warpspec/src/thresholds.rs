//! Closed-form spectral thresholds: λ₁, y₁, β, the resolvent-window bound, and
//! the exponential decay rate η₁ with its constants c₀, c₆, c₇.
//!
//! All functions are pure arithmetic in the hypothesis constants; hatted
//! values are ĉ = (n−1)c throughout.

use crate::conditions::HypothesisConstants;
use crate::{Error, Result};

fn hat(n: usize, v: f64) -> f64 {
    (n as f64 - 1.0) * v
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(msg()))
    }
}

fn validate_dim(n: usize) -> Result<()> {
    require(n >= 2, || format!("dimension n must be >= 2, got {n}"))
}

/// y₁ = min{(2γ + â − b̂)/2, 2(A₀ − a) − b̂}; needs γ > (â+b̂)/2 and the gap 2(A₀−a) > â+b̂.
pub fn y1(gamma: f64, a: f64, b: f64, a0: f64, n: usize) -> Result<f64> {
    validate_dim(n)?;
    let (ah, bh) = (hat(n, a), hat(n, b));
    require(gamma > 0.5 * (ah + bh), || {
        format!("y1 needs gamma > (a_hat+b_hat)/2 = {}, got {gamma}", 0.5 * (ah + bh))
    })?;
    require(2.0 * (a0 - a) > ah + bh, || {
        format!(
            "gap violated: 2(A0-a) = {} <= a_hat+b_hat = {}",
            2.0 * (a0 - a),
            ah + bh
        )
    })?;
    Ok((0.5 * (2.0 * gamma + ah - bh)).min(2.0 * (a0 - a) - bh))
}

/// λ₁ = max{K̂₃²/((y₁−â)(2γ−b̂−y₁)), ((4b̂₁+B̂₀²)/(8(2(A₀−a)−â−b̂)))²}.
#[allow(clippy::too_many_arguments)]
pub fn lambda1(
    gamma: f64,
    a: f64,
    b: f64,
    a0: f64,
    b0: f64,
    k3: f64,
    b1: f64,
    n: usize,
) -> Result<f64> {
    let y = y1(gamma, a, b, a0, n)?;
    let (ah, bh) = (hat(n, a), hat(n, b));
    require(y > ah && 2.0 * gamma - bh > y, || {
        format!("lambda1 needs a_hat < y1 < 2*gamma - b_hat, got y1 = {y}")
    })?;
    let k3h = hat(n, k3);
    let term_k3 = k3h * k3h / ((y - ah) * (2.0 * gamma - bh - y));
    Ok(term_k3.max(star8_rhs(a, b, a0, b0, b1, n)?))
}

/// β = ¼·(b̂₁/(2(θ−a) − â − b̂))², the critical weight exponent of a power-law end.
pub fn beta(theta: f64, a: f64, b: f64, b1: f64, n: usize) -> Result<f64> {
    validate_dim(n)?;
    let denom = 2.0 * (theta - a) - (hat(n, a) + hat(n, b));
    require(denom > 0.0, || {
        format!("beta needs 2(theta-a) > a_hat+b_hat, got margin {denom}")
    })?;
    let q = hat(n, b1) / denom;
    Ok(0.25 * q * q)
}

/// ((4b̂₁ + B̂₀²)/(8(2(A₀−a) − â − b̂)))², the lower edge of the excluded energy window.
pub fn star8_rhs(a: f64, b: f64, a0: f64, b0: f64, b1: f64, n: usize) -> Result<f64> {
    validate_dim(n)?;
    let c7 = 2.0 * (a0 - a) - hat(n, a) - hat(n, b);
    require(c7 > 0.0, || {
        format!("gap violated: 2(A0-a) - a_hat - b_hat = {c7} <= 0")
    })?;
    let b0h = hat(n, b0);
    let q = (4.0 * hat(n, b1) + b0h * b0h) / (8.0 * c7);
    Ok(q * q)
}

// Branch shared by eta1 and ThresholdBundle::eta1; the c0 > 0 branch uses the
// rationalized root 2c7λ/(c6+√(c6²+4c7c0λ)), which equals (−c6+√…)/(2c0) and
// tends to c7λ/c6 as c0 → 0.
fn eta1_branch(c0: f64, c6: f64, c7: f64, lambda: f64) -> Result<f64> {
    require(lambda > 0.0, || format!("eta1 needs lambda > 0, got {lambda}"))?;
    require(c6 > 0.0, || format!("eta1 needs c6 > 0, got {c6}"))?;
    if c0 > 0.0 {
        Ok(2.0 * c7 * lambda / (c6 + (c6 * c6 + 4.0 * c7 * c0 * lambda).sqrt()))
    } else {
        Ok(c7 * lambda / c6)
    }
}

/// Exponential decay rate η₁(λ) with c₀ = 2 − A₀ + (n+1)a + b̂, c₆ = b̂₁ + B̂₀²/8, c₇ = 2(A₀−a) − â − b̂.
pub fn eta1(lambda: f64, a: f64, b: f64, a0: f64, b0: f64, b1: f64, n: usize) -> Result<f64> {
    let (c0, c6, c7) = eta1_constants(a, b, a0, b0, b1, n)?;
    eta1_branch(c0, c6, c7, lambda)
}

fn eta1_constants(a: f64, b: f64, a0: f64, b0: f64, b1: f64, n: usize) -> Result<(f64, f64, f64)> {
    validate_dim(n)?;
    let (ah, bh) = (hat(n, a), hat(n, b));
    let c7 = 2.0 * (a0 - a) - ah - bh;
    require(c7 > 0.0, || {
        format!("gap violated: 2(A0-a) - a_hat - b_hat = {c7} <= 0")
    })?;
    let c0 = 2.0 - a0 + (n as f64 + 1.0) * a + bh;
    let b0h = hat(n, b0);
    let c6 = hat(n, b1) + b0h * b0h / 8.0;
    Ok((c0, c6, c7))
}

/// Every threshold of one constants bundle, with η₁ exposed as a method of λ.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdBundle {
    pub lambda1: f64,
    pub y1: f64,
    /// Present only when the bundle carries a power-law exponent θ.
    pub beta: Option<f64>,
    pub star8_rhs: f64,
    pub c0: f64,
    pub c6: f64,
    pub c7: f64,
}

impl ThresholdBundle {
    pub fn from_constants(c: &HypothesisConstants) -> Result<Self> {
        let y = y1(c.gamma, c.a, c.b, c.a0, c.n)?;
        let l1 = lambda1(c.gamma, c.a, c.b, c.a0, c.b0, c.k3, c.b1, c.n)?;
        let s8 = star8_rhs(c.a, c.b, c.a0, c.b0, c.b1, c.n)?;
        let beta_val = match c.theta {
            Some(theta) => Some(beta(theta, c.a, c.b, c.b1, c.n)?),
            None => None,
        };
        let (c0, c6, c7) = eta1_constants(c.a, c.b, c.a0, c.b0, c.b1, c.n)?;
        Ok(Self {
            lambda1: l1,
            y1: y,
            beta: beta_val,
            star8_rhs: s8,
            c0,
            c6,
            c7,
        })
    }

    /// η₁ evaluated at λ from the stored c₀, c₆, c₇.
    pub fn eta1(&self, lambda: f64) -> Result<f64> {
        eta1_branch(self.c0, self.c6, self.c7, lambda)
    }
}
