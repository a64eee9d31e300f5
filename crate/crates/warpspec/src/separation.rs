//! Reduction of the Laplacian on a warped end to half-line Schrödinger
//! operators, one per cross-section mode, plus the weighted boundary-integral
//! identity used to cross-check the reduction.
//!
//! After the substitution w = h^{(n−1)/2}·u each mode solves −w″ + q_i w = λw
//! on [x0, X] with flat measure dx; the geometric eigenfunction is recovered
//! by [`geometric_solution`].

use std::sync::Arc;

use crate::geometry::{interior_knots, EndGeometry};
use crate::quad;
use crate::{Error, Result};

// Spacing of the tabulated log h grid used when h evaluations are quadrature-backed.
const LOG_H_TABLE_DX: f64 = 0.01;
// Quadrature tolerance for the boundary-integral identity.
const IDENTITY_QUAD_TOL: f64 = 1e-11;

/// One cross-section eigenvalue λ_l = l(l+n−2) of the unit round sphere with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEigenvalue {
    pub level: usize,
    pub lambda: f64,
    pub multiplicity: u64,
}

// Exact C(n, k) in u128; errors only if the count overflows 128 bits.
fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul((n - k + i) as u128)
            .ok_or_else(|| Error::Parameter(format!("binomial({n}, {k}) overflows")))?;
        debug_assert_eq!(acc % i as u128, 0);
        acc /= i as u128;
    }
    Ok(acc)
}

/// Ascending eigenvalues λ_l = l(l+n−2), l = 0..l_max, of the unit (n−1)-sphere with multiplicities.
pub fn sphere_spectrum(n: usize, l_max: usize) -> Result<Vec<ModeEigenvalue>> {
    if n < 2 {
        return Err(Error::Parameter(format!("dimension n must be >= 2, got {n}")));
    }
    let d = (n - 1) as u64;
    (0..=l_max)
        .map(|level| {
            let l = level as u64;
            // dim of degree-l spherical harmonics on S^{d}: C(l+d, l) − C(l+d−2, l−2)
            let lead = binomial(l + d, l)?;
            let sub = if l >= 2 { binomial(l + d - 2, l - 2)? } else { 0 };
            let multiplicity = u64::try_from(lead - sub)
                .map_err(|_| Error::Parameter(format!("multiplicity at l = {l} overflows u64")))?;
            Ok(ModeEigenvalue {
                level,
                lambda: (l * (l + (n as u64) - 2)) as f64,
                multiplicity,
            })
        })
        .collect()
}

/// Just the eigenvalues of [`sphere_spectrum`], ready for [`EndGeometry::new`].
pub fn sphere_eigenvalues(n: usize, l_max: usize) -> Result<Vec<f64>> {
    Ok(sphere_spectrum(n, l_max)?.into_iter().map(|m| m.lambda).collect())
}

// Cubic-Hermite table of log h on a uniform grid, with A = (log h)′ as the slope data.
struct LogWarpTable {
    x0: f64,
    dx: f64,
    log_h: Vec<f64>,
    slope: Vec<f64>,
}

impl LogWarpTable {
    fn build(end: &EndGeometry, x0: f64, x_max: f64) -> Result<Self> {
        let steps = (((x_max - x0) / LOG_H_TABLE_DX).ceil() as usize).max(1);
        let dx = (x_max - x0) / steps as f64;
        let mut log_h = Vec::with_capacity(steps + 1);
        let mut slope = Vec::with_capacity(steps + 1);
        let anchor = end.profile.eval(x0)?;
        log_h.push(anchor.h.ln());
        slope.push(anchor.a);
        for j in 0..steps {
            let (lo, hi) = (x0 + j as f64 * dx, x0 + (j + 1) as f64 * dx);
            let a_lo = slope[j];
            let a_mid = end.profile.eval_rates(0.5 * (lo + hi))?.a;
            let a_hi = end.profile.eval_rates(hi)?.a;
            log_h.push(log_h[j] + dx / 6.0 * (a_lo + 4.0 * a_mid + a_hi));
            slope.push(a_hi);
        }
        Ok(Self {
            x0,
            dx,
            log_h,
            slope,
        })
    }

    fn eval(&self, x: f64) -> f64 {
        let last = self.log_h.len() - 1;
        let j = (((x - self.x0) / self.dx).floor() as usize).min(last.saturating_sub(1));
        let t = ((x - self.x0) / self.dx - j as f64).clamp(0.0, 1.0);
        let (f0, f1) = (self.log_h[j], self.log_h[j + 1]);
        let (d0, d1) = (self.dx * self.slope[j], self.dx * self.slope[j + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * d1
    }
}

enum Potential {
    Warped {
        end: EndGeometry,
        log_h: Option<LogWarpTable>,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Half-line operator −d²/dx² + q_i(x) on [x0, x_max] for one cross-section mode.
pub struct RadialOperator {
    potential: Potential,
    pub mode_index: usize,
    /// Cross-section eigenvalue λ_i entering the potential as λ_i/h².
    pub lambda_mode: f64,
    pub n: usize,
    pub x0: f64,
    pub x_max: f64,
}

impl RadialOperator {
    /// Potential q_i(x) = (n−1)(n−3)/4·A² − (n−1)/2·K + λ_i/h²; x is clamped to the domain.
    pub fn q(&self, x: f64) -> f64 {
        let x = x.clamp(self.x0, self.x_max);
        match &self.potential {
            Potential::Custom(f) => f(x),
            Potential::Warped { end, log_h } => {
                let nf = self.n as f64;
                let s = end
                    .profile
                    .eval_rates(x)
                    .expect("operator domain validated at construction");
                let base = 0.25 * (nf - 1.0) * (nf - 3.0) * s.a * s.a - 0.5 * (nf - 1.0) * s.k;
                if self.lambda_mode == 0.0 {
                    base
                } else {
                    let h2 = match log_h {
                        Some(table) => (2.0 * table.eval(x)).exp(),
                        None => {
                            let h = end
                                .profile
                                .eval(x)
                                .expect("operator domain validated at construction")
                                .h;
                            h * h
                        }
                    };
                    base + self.lambda_mode / h2
                }
            }
        }
    }

    /// Operator with an explicitly supplied potential (no cross-section; n is recorded as 1).
    pub fn from_potential(
        q: impl Fn(f64) -> f64 + Send + Sync + 'static,
        x0: f64,
        x_max: f64,
    ) -> Result<Self> {
        if !(x_max > x0) || !x0.is_finite() || !x_max.is_finite() {
            return Err(Error::Window(format!(
                "operator domain needs x0 < x_max, got [{x0}, {x_max}]"
            )));
        }
        Ok(Self {
            potential: Potential::Custom(Arc::new(q)),
            mode_index: 0,
            lambda_mode: 0.0,
            n: 1,
            x0,
            x_max,
        })
    }
}

/// Builds the mode-i operator of an end, truncated at x_max.
pub fn build_radial_operator(end: &EndGeometry, i: usize, x_max: f64) -> Result<RadialOperator> {
    let lambda_mode = *end.cross_eigenvalues.get(i).ok_or_else(|| {
        Error::Parameter(format!(
            "mode index {i} out of range: the end carries {} cross-section eigenvalues",
            end.cross_eigenvalues.len()
        ))
    })?;
    let x0 = end.r0;
    if !(x_max > x0) || !x_max.is_finite() {
        return Err(Error::Window(format!(
            "truncation must satisfy x_max > r0 = {x0}, got {x_max}"
        )));
    }
    if let Some(r_max) = end.profile.r_max() {
        if x_max > r_max {
            return Err(Error::Domain(format!(
                "truncation {x_max} exceeds the sampled profile end {r_max}"
            )));
        }
        // sampled splines can dip between knots; require h > 0 on a dense grid
        let steps = (((x_max - x0) * 64.0).ceil() as usize).max(64);
        for j in 0..=steps {
            let r = x0 + (x_max - x0) * j as f64 / steps as f64;
            let h = end.profile.eval(r)?.h;
            if !(h > 0.0) {
                return Err(Error::Domain(format!("profile is not positive at r = {r}")));
            }
        }
    }
    let log_h = if lambda_mode != 0.0 && end.profile.h_quadrature_backed() {
        Some(LogWarpTable::build(end, x0, x_max)?)
    } else {
        None
    };
    Ok(RadialOperator {
        potential: Potential::Warped {
            end: end.clone(),
            log_h,
        },
        mode_index: i,
        lambda_mode,
        n: end.n,
        x0,
        x_max,
    })
}

/// Modes whose potential offset stays inside the scanned energy range:
/// keep i while λ_i/h(x0)² ≤ λ_top + sup|q₀|.
pub fn retained_modes(end: &EndGeometry, lambda_top: f64, x_max: f64) -> Result<Vec<usize>> {
    if !(lambda_top > 0.0) {
        return Err(Error::Parameter(format!(
            "retained_modes needs lambda_top > 0, got {lambda_top}"
        )));
    }
    let q0 = build_radial_operator(end, 0, x_max)?;
    let steps = (((x_max - end.r0) * 8.0).ceil() as usize).max(64);
    let mut sup_q0: f64 = 0.0;
    for j in 0..=steps {
        let x = end.r0 + (x_max - end.r0) * j as f64 / steps as f64;
        sup_q0 = sup_q0.max(q0.q(x).abs());
    }
    let h0 = end.profile.eval(end.r0)?.h;
    let cutoff = lambda_top + sup_q0;
    Ok(end
        .cross_eigenvalues
        .iter()
        .enumerate()
        .take_while(|(_, &lam)| lam / (h0 * h0) <= cutoff)
        .map(|(i, _)| i)
        .collect())
}

/// Geometric eigenfunction u = w/h^{(n−1)/2} recovered from a flat-measure solution sampled on xs.
pub fn geometric_solution(end: &EndGeometry, xs: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if xs.len() != w.len() {
        return Err(Error::Parameter(
            "geometric_solution needs xs and w of equal length".into(),
        ));
    }
    let half = 0.5 * (end.n as f64 - 1.0);
    xs.iter()
        .zip(w)
        .map(|(&x, &wv)| Ok(wv / end.profile.eval(x)?.h.powf(half)))
        .collect()
}

/// Radial test function v(r) = (c₀ + c₁r + …)·r^power·e^{rate·r}.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub coeffs: Vec<f64>,
    pub power: f64,
    pub rate: f64,
}

impl TestFunction {
    pub fn new(coeffs: &[f64], power: f64, rate: f64) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter(
                "test function needs at least one finite coefficient".into(),
            ));
        }
        if !power.is_finite() || !rate.is_finite() {
            return Err(Error::Parameter(format!(
                "test function needs finite power and rate, got {power}, {rate}"
            )));
        }
        Ok(Self {
            coeffs: coeffs.to_vec(),
            power,
            rate,
        })
    }

    /// v(r) = 1/r.
    pub fn reciprocal() -> Self {
        Self {
            coeffs: vec![1.0],
            power: -1.0,
            rate: 0.0,
        }
    }

    /// (v, v′) at r > 0.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &c in self.coeffs.iter().rev() {
            dp = dp * r + p;
            p = p * r + c;
        }
        let outer = r.powf(self.power) * (self.rate * r).exp();
        let v = p * outer;
        let dv = (dp + p * (self.power / r + self.rate)) * outer;
        (v, dv)
    }
}

/// Both sides of the weighted boundary identity and their normalized mismatch.
#[derive(Debug, Clone, Copy)]
pub struct IdentityReport {
    pub beta: f64,
    pub s: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs| / (|lhs| + |rhs| + 1).
    pub residual: f64,
}

/// Checks r^β h^{n−1} v² at t minus at s against ∫ r^β h^{n−1}{(Δr + β/r)v² + 2vv′} dr.
pub fn check_boundary_identity(
    end: &EndGeometry,
    beta: f64,
    v: &TestFunction,
    s: f64,
    t: f64,
) -> Result<IdentityReport> {
    if !(s < t) || s < end.r0 {
        return Err(Error::Window(format!(
            "identity interval needs r0 <= s < t, got [{s}, {t}] with r0 = {}",
            end.r0
        )));
    }
    if let Some(r_max) = end.profile.r_max() {
        if t > r_max {
            return Err(Error::Domain(format!(
                "identity endpoint {t} exceeds the sampled profile end {r_max}"
            )));
        }
    }
    if !beta.is_finite() {
        return Err(Error::Parameter(format!("beta must be finite, got {beta}")));
    }
    let nm1 = end.n as f64 - 1.0;
    let side = |r: f64| -> Result<f64> {
        let h = end.profile.eval(r)?.h;
        let (vv, _) = v.eval(r);
        Ok(r.powf(beta) * h.powf(nm1) * vv * vv)
    };
    let lhs = side(t)? - side(s)?;
    let integrand = |r: f64| -> f64 {
        let sample = end.profile.eval(r).expect("interval validated");
        let (vv, dv) = v.eval(r);
        r.powf(beta)
            * sample.h.powf(nm1)
            * ((nm1 * sample.a + beta / r) * vv * vv + 2.0 * vv * dv)
    };
    let breaks = interior_knots(&end.profile, s, t);
    let rhs = quad::integrate_with_breaks(&integrand, s, t, IDENTITY_QUAD_TOL, &breaks)?;
    let residual = (lhs - rhs).abs() / (lhs.abs() + rhs.abs() + 1.0);
    Ok(IdentityReport {
        beta,
        s,
        t,
        lhs,
        rhs,
        residual,
    })
}
