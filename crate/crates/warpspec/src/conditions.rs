//! Window checks of the hypotheses placed on a warped end, and tightest-constant fitting.
//!
//! Each check reports a signed worst margin in scaled units (both sides of the
//! inequality multiplied by r, √r, or r² so margins are O(1) across the
//! window); margin ≥ 0 iff the condition holds on the whole grid. Asymptotic
//! "tends to zero" clauses are operationalized as dyadic-octave envelope
//! regression: sups per octave must be nonincreasing with a fitted decay
//! exponent at or above a floor.

use crate::fit;
use crate::geometry::{EndGeometry, WarpingProfile};
use crate::{Error, Result};

/// Default grid density for window checks, in points per unit radius.
pub const DEFAULT_GRID_PER_UNIT: f64 = 64.0;
/// Default minimum fitted decay exponent for envelope "tends to zero" clauses.
pub const DEFAULT_DECAY_EXPONENT_MIN: f64 = 0.1;
// Sampling density inside each dyadic octave of an envelope check.
const SAMPLES_PER_OCTAVE: usize = 8192;
// Worst margins in (−snap, 0) are reported as exactly 0 (grid-roundoff guard).
const MARGIN_SNAP: f64 = 1e-12;

/// The constants bundle (a, b, A₀, B₀, b₁, K₃, γ, optional θ); hatted values ĉ = (n−1)c are derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisConstants {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub a0: f64,
    pub b0: f64,
    pub b1: f64,
    pub k3: f64,
    pub gamma: f64,
    pub theta: Option<f64>,
}

impl HypothesisConstants {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        a: f64,
        b: f64,
        a0: f64,
        b0: f64,
        b1: f64,
        k3: f64,
        gamma: f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("dimension n must be >= 2, got {n}")));
        }
        for (name, v) in [("a", a), ("b", b), ("A0", a0), ("B0", b0), ("b1", b1), ("K3", k3)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Parameter(format!(
                    "constant {name} must be positive and finite, got {v}"
                )));
            }
        }
        if !gamma.is_finite() {
            return Err(Error::Parameter(format!("gamma must be finite, got {gamma}")));
        }
        Ok(Self {
            n,
            a,
            b,
            a0,
            b0,
            b1,
            k3,
            gamma,
            theta: None,
        })
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::Parameter(format!(
                "theta must be positive and finite, got {theta}"
            )));
        }
        self.theta = Some(theta);
        Ok(self)
    }

    fn hat(&self, v: f64) -> f64 {
        (self.n as f64 - 1.0) * v
    }

    pub fn a_hat(&self) -> f64 {
        self.hat(self.a)
    }

    pub fn b_hat(&self) -> f64 {
        self.hat(self.b)
    }

    pub fn b0_hat(&self) -> f64 {
        self.hat(self.b0)
    }

    pub fn b1_hat(&self) -> f64 {
        self.hat(self.b1)
    }

    pub fn k3_hat(&self) -> f64 {
        self.hat(self.k3)
    }
}

/// Closed radial window [lo, hi] with 0 < lo < hi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
            return Err(Error::Window(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Uniform inclusive grid with at least `per_unit` points per unit radius (min 33 points).
    pub fn grid(&self, per_unit: f64) -> Vec<f64> {
        let n = (((self.hi - self.lo) * per_unit).ceil() as usize).max(32);
        (0..=n)
            .map(|i| self.lo + (self.hi - self.lo) * (i as f64 / n as f64))
            .collect()
    }
}

/// One checked inequality: pass iff worst_margin ≥ 0; argmin_r is where the margin is attained.
#[derive(Debug, Clone)]
pub struct ConditionEntry {
    pub name: String,
    pub window: Window,
    pub pass: bool,
    pub worst_margin: f64,
    pub argmin_r: f64,
}

impl ConditionEntry {
    fn from_margin(name: &str, window: Window, margin: f64, argmin_r: f64, snap_scale: f64) -> Self {
        let snapped = if margin < 0.0 && margin > -MARGIN_SNAP * snap_scale.max(1.0) {
            0.0
        } else {
            margin
        };
        Self {
            name: name.to_string(),
            window,
            pass: snapped >= 0.0,
            worst_margin: snapped,
            argmin_r,
        }
    }
}

/// All condition entries of a run plus the constants fitted on the same window.
#[derive(Debug, Clone, Default)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
    pub fitted: Option<HypothesisConstants>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    /// CSV with header `condition,window_lo,window_hi,pass,worst_margin,argmin_r`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("condition,window_lo,window_hi,pass,worst_margin,argmin_r\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.name, e.window.lo, e.window.hi, e.pass, e.worst_margin, e.argmin_r
            ));
        }
        out
    }
}

// Scans `margin` over the window grid, keeping the minimum and where it occurs.
fn scan_min(
    name: &str,
    window: Window,
    grid: &[f64],
    snap_scale: f64,
    mut margin: impl FnMut(f64) -> Result<f64>,
) -> Result<ConditionEntry> {
    let mut worst = f64::INFINITY;
    let mut arg = window.lo;
    for &r in grid {
        let m = margin(r)?;
        if m < worst {
            worst = m;
            arg = r;
        }
    }
    Ok(ConditionEntry::from_margin(name, window, worst, arg, snap_scale))
}

fn check_window(end: &EndGeometry, window: Window) -> Result<()> {
    if window.lo < end.r0 {
        return Err(Error::Window(format!(
            "window starts at {} but the end starts at r0 = {}",
            window.lo, end.r0
        )));
    }
    if let Some(r_max) = end.profile.r_max() {
        if window.hi > r_max {
            return Err(Error::Window(format!(
                "window ends at {} but the sampled profile ends at {r_max}",
                window.hi
            )));
        }
    }
    Ok(())
}

/// Hessian band f′/f − a/r ≤ A_h(r) ≤ f′/f + b/r against a reference rate; margins ×r.
pub fn check_hessian_band(
    end: &EndGeometry,
    reference: &WarpingProfile,
    a: f64,
    b: f64,
    window: Window,
) -> Result<Vec<ConditionEntry>> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Parameter(format!(
            "band widths must be positive, got a = {a}, b = {b}"
        )));
    }
    check_window(end, window)?;
    let grid = window.grid(DEFAULT_GRID_PER_UNIT);
    let lower = scan_min("hessian_lower", window, &grid, a, |r| {
        let ah = end.profile.eval_rates(r)?.a;
        let fr = reference.eval_rates(r)?.a;
        Ok(r * (ah - fr) + a)
    })?;
    let upper = scan_min("hessian_upper", window, &grid, b, |r| {
        let ah = end.profile.eval_rates(r)?.a;
        let fr = reference.eval_rates(r)?.a;
        Ok(b - r * (ah - fr))
    })?;
    Ok(vec![lower, upper])
}

/// Rate bounds A₀/r ≤ A_h(r) ≤ B₀/√r; lower margin ×r, upper margin ×√r.
pub fn check_a_bounds(
    end: &EndGeometry,
    a0: f64,
    b0: f64,
    window: Window,
) -> Result<Vec<ConditionEntry>> {
    if !(a0 > 0.0) || !(b0 > 0.0) {
        return Err(Error::Parameter(format!(
            "rate bounds must be positive, got A0 = {a0}, B0 = {b0}"
        )));
    }
    check_window(end, window)?;
    let grid = window.grid(DEFAULT_GRID_PER_UNIT);
    let lower = scan_min("rate_lower", window, &grid, a0, |r| {
        Ok(r * end.profile.eval_rates(r)?.a - a0)
    })?;
    let upper = scan_min("rate_upper", window, &grid, b0, |r| {
        Ok(b0 - r.sqrt() * end.profile.eval_rates(r)?.a)
    })?;
    Ok(vec![lower, upper])
}

/// Gap inequality 2(A₀ − a) > â + b̂.
pub fn check_gap(c: &HypothesisConstants) -> bool {
    gap_margin(c) > 0.0
}

/// Signed gap 2(A₀ − a) − â − b̂.
pub fn gap_margin(c: &HypothesisConstants) -> f64 {
    2.0 * (c.a0 - c.a) - c.a_hat() - c.b_hat()
}

/// Derivative bound |r·Â′(r)| ≤ K̂₃ in hatted units.
pub fn check_k3(end: &EndGeometry, k3: f64, window: Window) -> Result<ConditionEntry> {
    if !(k3 > 0.0) {
        return Err(Error::Parameter(format!("K3 must be positive, got {k3}")));
    }
    check_window(end, window)?;
    let c = end.n as f64 - 1.0;
    let grid = window.grid(DEFAULT_GRID_PER_UNIT);
    scan_min("derivative_bound", window, &grid, c * k3, |r| {
        Ok(c * k3 - (r * c * end.profile.eval_rates(r)?.a_prime).abs())
    })
}

/// Ricci lower bound Ric(∇r,∇r) = (n−1)K_h ≥ −b̂₁/r; margin ×r.
pub fn check_ricci(end: &EndGeometry, b1: f64, window: Window) -> Result<ConditionEntry> {
    if !(b1 > 0.0) {
        return Err(Error::Parameter(format!("b1 must be positive, got {b1}")));
    }
    check_window(end, window)?;
    let c = end.n as f64 - 1.0;
    let grid = window.grid(DEFAULT_GRID_PER_UNIT);
    scan_min("ricci_lower", window, &grid, c * b1, |r| {
        Ok(c * (r * end.profile.eval_rates(r)?.k + b1))
    })
}

/// Curvature band −ε(r)/r ≤ K_h ≤ a(1−a)/r²: pointwise upper bound (×r²) plus a decaying-envelope lower clause.
pub fn check_curvature_band(
    end: &EndGeometry,
    a: f64,
    eps_window_fit: f64,
    window: Window,
) -> Result<Vec<ConditionEntry>> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Parameter(format!(
            "curvature band exponent needs 0 < a < 1, got {a}"
        )));
    }
    check_window(end, window)?;
    let bound = a * (1.0 - a);
    let grid = window.grid(DEFAULT_GRID_PER_UNIT);
    let upper = scan_min("curvature_upper", window, &grid, bound, |r| {
        Ok(bound - r * r * end.profile.eval_rates(r)?.k)
    })?;
    let profile = &end.profile;
    let env = fit::octave_envelope(
        &|r| profile.eval_rates(r).map(|s| r * (-s.k).max(0.0)).unwrap_or(f64::NAN),
        window.lo,
        window.hi,
        SAMPLES_PER_OCTAVE,
    )?;
    let lower = envelope_entry("curvature_decay", window, &env, eps_window_fit);
    Ok(vec![upper, lower])
}

fn envelope_entry(
    name: &str,
    window: Window,
    env: &fit::OctaveEnvelope,
    min_exponent: f64,
) -> ConditionEntry {
    let pass = env.decays(min_exponent);
    let (margin, argmin) = if env.negligible {
        (1.0, window.lo)
    } else {
        // argmin = center of the octave holding the largest sup
        let (j, _) = env
            .sups
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
        let margin = if env.nonincreasing {
            env.exponent - min_exponent
        } else {
            // increasing envelope: report the exponent shortfall as a failure margin
            (env.exponent - min_exponent).min(-f64::MIN_POSITIVE)
        };
        (margin, env.centers[j])
    };
    ConditionEntry {
        name: name.to_string(),
        window,
        pass,
        worst_margin: if pass { margin.max(0.0) } else { margin.min(-f64::MIN_POSITIVE) },
        argmin_r: argmin,
    }
}

/// One clause of the short/long-range split with its fitted decay exponent.
#[derive(Debug, Clone)]
pub struct AgmonClause {
    pub name: &'static str,
    pub pass: bool,
    pub exponent: f64,
    pub fit_r2: f64,
    pub negligible: bool,
}

/// Result of [`agmon_split`]: all three clauses must pass for eigenvalue absence.
#[derive(Debug, Clone)]
pub struct AgmonReport {
    pub clauses: Vec<AgmonClause>,
}

impl AgmonReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }
}

/// Splits a sampled potential q = V₁ + V₂ (V₂ = mode term) and checks x·V₁ → 0, V₂ → 0, x·V₂′ → 0.
pub fn agmon_split(
    x: &[f64],
    q: &[f64],
    mode_term: &[f64],
    min_exponent: f64,
) -> Result<AgmonReport> {
    if x.len() != q.len() || x.len() != mode_term.len() {
        return Err(Error::Parameter(
            "agmon_split needs x, q, mode_term of equal length".into(),
        ));
    }
    if x.len() < 16 {
        return Err(Error::Window("agmon_split needs at least 16 samples".into()));
    }
    let n = x.len();
    let v1_scaled: Vec<f64> = (0..n).map(|i| (x[i] * (q[i] - mode_term[i])).abs()).collect();
    let v2: Vec<f64> = mode_term.iter().map(|v| v.abs()).collect();
    // centered slope of V₂ on the (possibly nonuniform) grid; one-sided at the ends
    let v2_slope: Vec<f64> = (0..n)
        .map(|i| {
            let (lo, hi) = match i {
                0 => (0, 1),
                i if i == n - 1 => (n - 2, n - 1),
                i => (i - 1, i + 1),
            };
            (x[i] * (mode_term[hi] - mode_term[lo]) / (x[hi] - x[lo])).abs()
        })
        .collect();
    let clause = |name: &'static str, vals: &[f64]| -> Result<AgmonClause> {
        let env = fit::octave_envelope_from_samples(x, vals)?;
        Ok(AgmonClause {
            name,
            pass: env.decays(min_exponent),
            exponent: env.exponent,
            fit_r2: env.r2,
            negligible: env.negligible,
        })
    };
    Ok(AgmonReport {
        clauses: vec![
            clause("agmon_short_range", &v1_scaled)?,
            clause("agmon_mode_term", &v2)?,
            clause("agmon_mode_slope", &v2_slope)?,
        ],
    })
}

// Floor applied to fitted band widths so the constants stay strictly positive.
const FIT_FLOOR: f64 = 1e-12;

/// Tightest constants on the window: band widths a*, b* around the reference rate,
/// A₀* = inf r·A, B₀* = sup √r·A, b₁* = sup r·max(0, −K), K₃* = sup r·|A′|, γ = 1.
pub fn fit_constants(
    end: &EndGeometry,
    window: Window,
    reference: &WarpingProfile,
) -> Result<HypothesisConstants> {
    check_window(end, window)?;
    let grid = window.grid(DEFAULT_GRID_PER_UNIT);
    let mut a = FIT_FLOOR;
    let mut b = FIT_FLOOR;
    let mut a0 = f64::INFINITY;
    let mut b0 = FIT_FLOOR;
    let mut b1 = FIT_FLOOR;
    let mut k3 = FIT_FLOOR;
    for &r in &grid {
        let s = end.profile.eval_rates(r)?;
        let fr = reference.eval_rates(r)?.a;
        let band = r * (s.a - fr);
        a = a.max(-band);
        b = b.max(band);
        a0 = a0.min(r * s.a);
        b0 = b0.max(r.sqrt() * s.a);
        b1 = b1.max(r * (-s.k).max(0.0));
        k3 = k3.max(r * s.a_prime.abs());
    }
    if !(a0 > 0.0) {
        return Err(Error::Unsatisfiable(format!(
            "inf r·A = {a0} on [{}, {}]: no positive A0 exists",
            window.lo, window.hi
        )));
    }
    HypothesisConstants::new(end.n, a, b, a0, b0, b1, k3, 1.0)
}

/// Inputs for [`check_all`]: one end, one reference rate, one constants bundle, one window.
pub struct CheckInputs<'a> {
    pub end: &'a EndGeometry,
    pub reference: &'a WarpingProfile,
    pub constants: &'a HypothesisConstants,
    pub window: Window,
    /// Minimum fitted decay exponent for the envelope clauses.
    pub decay_exponent_min: f64,
    /// Mode index for the split-potential clauses; None skips them.
    pub agmon_mode: Option<usize>,
}

/// Runs every window check against the bundle and fits constants on the same window.
pub fn check_all(inputs: &CheckInputs) -> Result<ConditionReport> {
    let CheckInputs {
        end,
        reference,
        constants: c,
        window,
        decay_exponent_min,
        agmon_mode,
    } = inputs;
    let window = *window;
    let mut entries = Vec::new();
    entries.extend(check_hessian_band(end, reference, c.a, c.b, window)?);
    entries.extend(check_a_bounds(end, c.a0, c.b0, window)?);
    entries.push(ConditionEntry::from_margin(
        "gap",
        window,
        gap_margin(c),
        window.lo,
        c.a0.max(1.0),
    ));
    entries.push(check_k3(end, c.k3, window)?);
    entries.push(check_ricci(end, c.b1, window)?);
    if c.a < 1.0 {
        entries.extend(check_curvature_band(end, c.a, *decay_exponent_min, window)?);
    }
    if let Some(mode) = agmon_mode {
        if let Some(&lam) = end.cross_eigenvalues.get(*mode) {
            let grid = window.grid(DEFAULT_GRID_PER_UNIT);
            let nf = end.n as f64;
            let coeff_a2 = (nf - 1.0) * (nf - 3.0) / 4.0;
            let coeff_k = (nf - 1.0) / 2.0;
            let mut q = Vec::with_capacity(grid.len());
            let mut v2 = Vec::with_capacity(grid.len());
            for &r in &grid {
                let s = end.profile.eval(r)?;
                let mode_term = lam / (s.h * s.h);
                q.push(coeff_a2 * s.a * s.a - coeff_k * s.k + mode_term);
                v2.push(mode_term);
            }
            let agmon = agmon_split(&grid, &q, &v2, *decay_exponent_min)?;
            for cl in agmon.clauses {
                entries.push(ConditionEntry {
                    name: cl.name.to_string(),
                    window,
                    pass: cl.pass,
                    worst_margin: if cl.negligible {
                        1.0
                    } else {
                        cl.exponent - decay_exponent_min
                    },
                    argmin_r: window.lo,
                });
            }
        }
    }
    let fitted = fit_constants(end, window, reference).ok();
    Ok(ConditionReport { entries, fitted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{EndGeometry, WarpingProfile};
    use approx::assert_relative_eq;

    fn end_with(profile: WarpingProfile, n: usize) -> EndGeometry {
        let r0 = profile.r_min().max(1.0);
        EndGeometry::new(n, r0, profile, vec![0.0, 1.0]).unwrap()
    }

    // Table of h = exp(4·r^{1/4}), whose rate is exactly r^{-3/4}; cancels the
    // oscillatory profile's drift so the band width is the sine amplitude alone.
    fn quarter_power_reference(r_hi: f64) -> WarpingProfile {
        let step = 0.05;
        let count = ((r_hi - 1.0) / step).ceil() as usize;
        let pts: Vec<(f64, f64)> = (0..=count)
            .map(|i| {
                let r = 1.0 + step * i as f64;
                (r, (4.0 * r.powf(0.25)).exp())
            })
            .collect();
        WarpingProfile::sampled(&pts).unwrap()
    }

    #[test]
    fn hessian_band_tight_profile_has_constant_margins() {
        let end = end_with(WarpingProfile::power_law(0.7).unwrap(), 2);
        let reference = WarpingProfile::power_law(0.7).unwrap();
        let window = Window::new(2.0, 50.0).unwrap();
        let entries = check_hessian_band(&end, &reference, 0.25, 0.4, window).unwrap();
        assert!(entries.iter().all(|e| e.pass));
        assert_relative_eq!(entries[0].worst_margin, 0.25, max_relative = 1e-12);
        assert_relative_eq!(entries[1].worst_margin, 0.4, max_relative = 1e-12);
    }

    #[test]
    fn hessian_band_detects_rate_mismatch() {
        // A_h − f′/f = −1/r: scaled lower margin a − 1 < 0 for a = 0.5
        let end = end_with(WarpingProfile::power_law(1.0).unwrap(), 2);
        let reference = WarpingProfile::power_law(2.0).unwrap();
        let window = Window::new(1.0, 20.0).unwrap();
        let entries = check_hessian_band(&end, &reference, 0.5, 0.5, window).unwrap();
        assert!(!entries[0].pass);
        assert_relative_eq!(entries[0].worst_margin, -0.5, max_relative = 1e-12);
        assert!(entries[1].pass);
    }

    #[test]
    fn oscillatory_band_width_is_the_amplitude() {
        // r(A − f) = k·sin(2r) once the reference cancels the r^{-α} drift
        let end = end_with(WarpingProfile::oscillatory_exp(0.75, 2.0).unwrap(), 2);
        let reference = quarter_power_reference(120.0);
        let window = Window::new(2.0, 100.0).unwrap();
        let wide = check_hessian_band(&end, &reference, 2.2, 2.2, window).unwrap();
        assert!(wide.iter().all(|e| e.pass));
        let tight = check_hessian_band(&end, &reference, 1.8, 1.8, window).unwrap();
        assert!(tight.iter().all(|e| !e.pass));
        assert!(tight.iter().all(|e| e.worst_margin < -0.1));
    }

    #[test]
    fn rate_bounds_power_law() {
        let end = end_with(WarpingProfile::power_law(0.5).unwrap(), 2);
        let window = Window::new(1.0, 30.0).unwrap();
        let entries = check_a_bounds(&end, 0.5, 0.5, window).unwrap();
        assert!(entries[0].pass);
        assert_relative_eq!(entries[0].worst_margin, 0.0, epsilon = 1e-12);
        assert!(entries[1].pass);
    }

    #[test]
    fn rate_upper_bound_fails_for_exponential_growth() {
        // A ≡ 1 for h = e^r ≈ sampled exp table; √r·A grows past any B0
        let pts: Vec<(f64, f64)> = (0..=400).map(|i| {
            let r = 1.0 + i as f64 * 0.1;
            (r, r.exp())
        }).collect();
        let end = end_with(WarpingProfile::sampled(&pts).unwrap(), 2);
        let window = Window::new(1.0, 40.0).unwrap();
        let entries = check_a_bounds(&end, 0.5, 2.0, window).unwrap();
        assert!(!entries[1].pass);
    }

    #[test]
    fn gap_examples() {
        let c = HypothesisConstants::new(2, 0.05, 0.05, 1.0, 0.1, 0.1, 0.1, 1.0).unwrap();
        assert!(check_gap(&c));
        assert_relative_eq!(gap_margin(&c), 1.8, max_relative = 1e-12);
        let c5 = HypothesisConstants::new(5, 0.1, 0.2, 2.0, 0.1, 0.1, 0.1, 1.0).unwrap();
        assert!(check_gap(&c5));
        assert_relative_eq!(gap_margin(&c5), 3.8 - 1.2, max_relative = 1e-12);
        let eq = HypothesisConstants::new(2, 1.0, 0.05, 1.0, 0.1, 0.1, 0.1, 1.0).unwrap();
        assert!(!check_gap(&eq));
    }

    #[test]
    fn derivative_bound_power_law() {
        // |r·Â′| = (n−1)θ/r ≤ (n−1)K3 holds from r_lo once K3 ≥ θ/r_lo
        let end = end_with(WarpingProfile::power_law(0.8).unwrap(), 3);
        let window = Window::new(2.0, 64.0).unwrap();
        let entry = check_k3(&end, 0.4, window).unwrap();
        assert!(entry.pass);
        assert_relative_eq!(entry.worst_margin, 2.0 * (0.4 - 0.4), epsilon = 1e-12);
        assert_relative_eq!(entry.argmin_r, 2.0, max_relative = 1e-12);
        let tight = check_k3(&end, 0.3, window).unwrap();
        assert!(!tight.pass);
    }

    #[test]
    fn oscillatory_derivative_sup_is_twice_k_hatted() {
        let end = end_with(WarpingProfile::oscillatory_exp(0.75, 3.0).unwrap(), 2);
        let window = Window::new(16.0, 360.0).unwrap();
        let entry = check_k3(&end, 6.5, window).unwrap();
        assert!(entry.pass);
        // sup r|A′| ≈ 2|k| = 6; margin ≈ 6.5 − 6
        assert!(entry.worst_margin < 0.55 && entry.worst_margin > 0.3);
    }

    #[test]
    fn ricci_flat_profile_passes() {
        let end = end_with(WarpingProfile::power_law(1.0).unwrap(), 3);
        let window = Window::new(1.0, 10.0).unwrap();
        let entry = check_ricci(&end, 0.5, window).unwrap();
        assert!(entry.pass);
        assert_relative_eq!(entry.worst_margin, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn ricci_needs_oscillation_amplitude() {
        let end = end_with(WarpingProfile::oscillatory_exp(0.75, 2.0).unwrap(), 2);
        let window = Window::new(8.0, 256.0).unwrap();
        // sup r·max(0, −K) ≈ 2|k| = 4
        assert!(check_ricci(&end, 4.5, window).unwrap().pass);
        assert!(!check_ricci(&end, 3.0, window).unwrap().pass);
    }

    #[test]
    fn curvature_band_power_law_is_tight() {
        let end = end_with(WarpingProfile::power_law(0.6).unwrap(), 2);
        let window = Window::new(1.0, 16.0).unwrap();
        let entries = check_curvature_band(&end, 0.6, 0.1, window).unwrap();
        assert!(entries[0].pass);
        assert_relative_eq!(entries[0].worst_margin, 0.0, epsilon = 1e-12);
        assert!(entries[1].pass, "K > 0 means the lower envelope is trivial");
        assert_relative_eq!(entries[1].worst_margin, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn curvature_lower_clause_fails_on_critical_oscillation() {
        let end = end_with(WarpingProfile::oscillatory_exp(0.75, 2.0).unwrap(), 2);
        let window = Window::new(4.0, 1024.0).unwrap();
        let entries = check_curvature_band(&end, 0.5, 0.1, window).unwrap();
        let lower = &entries[1];
        assert!(!lower.pass, "r·|K| ≈ 2|k| does not tend to 0");
    }

    #[test]
    fn agmon_split_flat_case_passes() {
        // n=3, h=r: V₁ ≡ 0 and V₂ = λ/r²
        let xs: Vec<f64> = (0..=4096).map(|i| 1.0 + i as f64 * (15.0 / 4096.0)).collect();
        let v2: Vec<f64> = xs.iter().map(|&x| 2.0 / (x * x)).collect();
        let q = v2.clone();
        let report = agmon_split(&xs, &q, &v2, 0.1).unwrap();
        assert!(report.all_pass());
        assert!(report.clauses[0].negligible);
        assert_relative_eq!(report.clauses[1].exponent, 2.0, max_relative = 0.05);
        assert_relative_eq!(report.clauses[2].exponent, 2.0, max_relative = 0.05);
    }

    #[test]
    fn agmon_split_sub_unit_power_law_passes() {
        // h = r^{0.6}, n = 2: V₁ = O(1/r²), V₂ = λ·r^{−1.2}
        let end = end_with(WarpingProfile::power_law(0.6).unwrap(), 2);
        let window = Window::new(1.0, 64.0).unwrap();
        let grid = window.grid(64.0);
        let mut q = Vec::new();
        let mut v2 = Vec::new();
        for &r in &grid {
            let s = end.profile.eval(r).unwrap();
            let m = 1.0 / (s.h * s.h);
            q.push(-0.25 * s.a * s.a + 0.5 * s.k + m);
            v2.push(m);
        }
        let report = agmon_split(&grid, &q, &v2, 0.1).unwrap();
        assert!(report.all_pass());
        assert_relative_eq!(report.clauses[1].exponent, 1.2, max_relative = 0.05);
    }

    #[test]
    fn agmon_split_critical_oscillation_fails_short_range() {
        let end = end_with(WarpingProfile::oscillatory_exp(0.75, 2.0).unwrap(), 2);
        let window = Window::new(2.0, 512.0).unwrap();
        let grid = window.grid(64.0);
        let mut q = Vec::new();
        let mut v2 = Vec::new();
        for &r in &grid {
            let s = end.profile.eval(r).unwrap();
            let m = 1.0 / (s.h * s.h);
            q.push(-0.25 * s.a * s.a + 0.5 * s.k + m);
            v2.push(m);
        }
        let report = agmon_split(&grid, &q, &v2, 0.1).unwrap();
        assert!(!report.clauses[0].pass, "x·V₁ keeps the k cos(2x) amplitude");
        assert!(report.clauses[1].pass);
    }

    #[test]
    fn agmon_exponents_stable_under_grid_doubling() {
        let end = end_with(WarpingProfile::power_law(0.6).unwrap(), 2);
        let window = Window::new(1.0, 64.0).unwrap();
        let run = |per_unit: f64| {
            let grid = window.grid(per_unit);
            let mut q = Vec::new();
            let mut v2 = Vec::new();
            for &r in &grid {
                let s = end.profile.eval(r).unwrap();
                let m = 1.0 / (s.h * s.h);
                q.push(-0.25 * s.a * s.a + 0.5 * s.k + m);
                v2.push(m);
            }
            agmon_split(&grid, &q, &v2, 0.1).unwrap()
        };
        let r1 = run(64.0);
        let r2 = run(128.0);
        for (c1, c2) in r1.clauses.iter().zip(&r2.clauses) {
            assert_eq!(c1.pass, c2.pass);
            if !c1.negligible && !c2.negligible {
                assert_relative_eq!(c1.exponent, c2.exponent, max_relative = 0.05);
            }
        }
    }

    #[test]
    fn fitted_constants_power_law_closed_forms() {
        let end = end_with(WarpingProfile::power_law(0.5).unwrap(), 2);
        let reference = WarpingProfile::power_law(0.5).unwrap();
        let window = Window::new(2.0, 50.0).unwrap();
        let c = fit_constants(&end, window, &reference).unwrap();
        assert_relative_eq!(c.a, 1e-12, max_relative = 1e-6);
        assert_relative_eq!(c.b, 1e-12, max_relative = 1e-6);
        assert_relative_eq!(c.a0, 0.5, max_relative = 1e-12);
        assert_relative_eq!(c.k3, 0.5 / 2.0, max_relative = 1e-9);
        assert_relative_eq!(c.b0, 0.5 / 2.0f64.sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn fitted_constants_oscillatory_amplitudes() {
        let end = end_with(WarpingProfile::oscillatory_exp(0.75, 2.0).unwrap(), 2);
        let reference = quarter_power_reference(620.0);
        let window = Window::new(16.0, 600.0).unwrap();
        let c = fit_constants(&end, window, &reference).unwrap();
        // band width ≈ sup|k sin(2r)| = 2, curvature amplitude ≈ 2|k| = 4
        assert_relative_eq!(c.a, 2.0, max_relative = 0.15);
        assert_relative_eq!(c.b, 2.0, max_relative = 0.15);
        assert_relative_eq!(c.b1, 4.0, max_relative = 0.1);
        assert_relative_eq!(c.k3, 4.0, max_relative = 0.1);
    }

    #[test]
    fn fitted_constants_pass_their_own_checks() {
        let end = end_with(WarpingProfile::oscillatory_exp(0.75, 2.0).unwrap(), 2);
        let reference = quarter_power_reference(220.0);
        let window = Window::new(16.0, 200.0).unwrap();
        let c = fit_constants(&end, window, &reference).unwrap();
        let band = check_hessian_band(&end, &reference, c.a, c.b, window).unwrap();
        assert!(band.iter().all(|e| e.pass && e.worst_margin >= 0.0));
        let bounds = check_a_bounds(&end, c.a0, c.b0, window).unwrap();
        assert!(bounds.iter().all(|e| e.pass && e.worst_margin >= 0.0));
        assert!(check_k3(&end, c.k3, window).unwrap().pass);
        assert!(check_ricci(&end, c.b1, window).unwrap().pass);
    }

    #[test]
    fn unsatisfiable_when_rate_dips_negative() {
        // k sin(2r)/r with |k| > 1 pushes r·A below zero near r where sin(2r) = −1
        let end = end_with(WarpingProfile::oscillatory_exp(0.75, 6.0).unwrap(), 2);
        let reference = WarpingProfile::power_law(0.25).unwrap();
        let window = Window::new(2.0, 200.0).unwrap();
        assert!(matches!(
            fit_constants(&end, window, &reference),
            Err(Error::Unsatisfiable(_))
        ));
    }

    #[test]
    fn margin_monotone_in_constants() {
        use rand::Rng;
        let mut rng = rand_chacha();
        let end = end_with(WarpingProfile::oscillatory_exp(0.75, 2.0).unwrap(), 2);
        let window = Window::new(4.0, 120.0).unwrap();
        for _ in 0..50 {
            let k3_lo: f64 = rng.gen_range(0.5..6.0);
            let k3_hi = k3_lo + rng.gen_range(0.1..2.0);
            let m_lo = check_k3(&end, k3_lo, window).unwrap().worst_margin;
            let m_hi = check_k3(&end, k3_hi, window).unwrap().worst_margin;
            assert!(m_hi >= m_lo);
            let b1_lo: f64 = rng.gen_range(0.5..6.0);
            let b1_hi = b1_lo + rng.gen_range(0.1..2.0);
            let r_lo = check_ricci(&end, b1_lo, window).unwrap().worst_margin;
            let r_hi = check_ricci(&end, b1_hi, window).unwrap().worst_margin;
            assert!(r_hi >= r_lo);
        }
    }

    fn rand_chacha() -> impl rand::Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn report_csv_shape() {
        let end = end_with(WarpingProfile::power_law(0.5).unwrap(), 2);
        let reference = WarpingProfile::power_law(0.5).unwrap();
        let constants = HypothesisConstants::new(2, 0.1, 0.1, 0.5, 0.5, 0.5, 0.5, 1.0).unwrap();
        let report = check_all(&CheckInputs {
            end: &end,
            reference: &reference,
            constants: &constants,
            window: Window::new(1.0, 24.0).unwrap(),
            decay_exponent_min: 0.1,
            agmon_mode: Some(1),
        })
        .unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "condition,window_lo,window_hi,pass,worst_margin,argmin_r"
        );
        let names: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(
            names,
            vec![
                "hessian_lower",
                "hessian_upper",
                "rate_lower",
                "rate_upper",
                "gap",
                "derivative_bound",
                "ricci_lower",
                "curvature_upper",
                "curvature_decay",
                "agmon_short_range",
                "agmon_mode_term",
                "agmon_mode_slope"
            ]
        );
        assert!(report.fitted.is_some());
    }
}
