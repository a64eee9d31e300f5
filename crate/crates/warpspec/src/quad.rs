//! Adaptive Simpson quadrature.

use crate::{Error, Result};

const MAX_DEPTH: u32 = 48;

// Simpson estimate over [a, b] given endpoint and midpoint values.
fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    // 15 = 2^4 - 1, the Richardson factor for Simpson's rule
    if delta.abs() <= 15.0 * eps || (b - a).abs() < f64::EPSILON * (a.abs() + b.abs()) {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Integration {
            x: m,
            message: format!("adaptive quadrature stalled (depth {MAX_DEPTH})"),
        });
    }
    let l = adapt(f, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1)?;
    let r = adapt(f, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1)?;
    Ok(l + r)
}

/// ∫_a^b f dx by adaptive Simpson with relative tolerance `tol`; a > b allowed (sign flips).
pub(crate) fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return Ok(-integrate(f, b, a, tol)?);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, a, b);
    // eps is absolute; scale by a first-pass magnitude estimate so tol acts relatively
    let scale = whole.abs().max((b - a) * fm.abs()).max(1e-300);
    adapt(f, a, b, fa, fm, fb, whole, tol * scale, 0)
}

/// ∫_a^b f dx split at the interior `breaks` (sorted); each piece integrated adaptively.
pub(crate) fn integrate_with_breaks(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    breaks: &[f64],
) -> Result<f64> {
    if b < a {
        return Ok(-integrate_with_breaks(f, b, a, tol, breaks)?);
    }
    let mut total = 0.0;
    let mut lo = a;
    for &c in breaks {
        if c > lo && c < b {
            total += integrate(f, lo, c, tol)?;
            lo = c;
        }
    }
    total += integrate(f, lo, b, tol)?;
    Ok(total)
}
