//! Least-squares fits, envelope extraction, and bracketed maximization.

use crate::{Error, Result};

/// Ordinary least-squares line through (x, y) samples with its coefficient of determination.
#[derive(Debug, Clone, Copy)]
pub struct LinFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares y ≈ slope·x + intercept; r² = 1 − SS_res/SS_tot.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinFit> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = syy - slope * sxy;
    let r2 = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Some(LinFit { slope, intercept, r2 })
}

/// Strict interior local maxima of `ys`, returned as (x, y) pairs.
pub(crate) fn local_maxima(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..ys.len().saturating_sub(1) {
        if ys[i] > ys[i - 1] && ys[i] > ys[i + 1] {
            out.push((xs[i], ys[i]));
        }
    }
    out
}

// Floor below which an envelope is treated as identically zero.
pub(crate) const NEGLIGIBLE_SUP: f64 = 1e-13;
// Relative slack allowed on the octave-to-octave decrease test.
const DECREASE_SLACK: f64 = 0.05;

/// Per-octave sup of |f| on [lo·2^j, lo·2^{j+1}] with a log-log decay fit.
#[derive(Debug, Clone)]
pub(crate) struct OctaveEnvelope {
    pub centers: Vec<f64>,
    pub sups: Vec<f64>,
    /// Fitted decay exponent p in sup ~ r^{−p} (positive = decaying).
    pub exponent: f64,
    pub r2: f64,
    /// All octave sups at or below the zero floor.
    pub negligible: bool,
    /// Octave sups nonincreasing up to 5% relative slack.
    pub nonincreasing: bool,
}

/// Dyadic envelope of |f| over [lo, hi]; needs ≥ 3 full octaves.
pub(crate) fn octave_envelope(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    samples_per_octave: usize,
) -> Result<OctaveEnvelope> {
    let octaves = count_octaves(lo, hi)?;
    let m = samples_per_octave.max(16);
    let mut centers = Vec::with_capacity(octaves);
    let mut sups = Vec::with_capacity(octaves);
    for j in 0..octaves {
        let a = lo * (2.0f64).powi(j as i32);
        let b = 2.0 * a;
        let mut sup = 0.0f64;
        for i in 0..=m {
            let x = a + (b - a) * (i as f64 / m as f64);
            sup = sup.max(f(x).abs());
        }
        centers.push((a * b).sqrt());
        sups.push(sup);
    }
    Ok(finish_envelope(centers, sups))
}

/// Dyadic envelope of already-sampled |values| on an increasing grid; needs ≥ 3 full octaves.
pub(crate) fn octave_envelope_from_samples(xs: &[f64], values: &[f64]) -> Result<OctaveEnvelope> {
    if xs.len() != values.len() || xs.len() < 8 {
        return Err(Error::Window("envelope needs a sampled grid of >= 8 points".into()));
    }
    let lo = xs[0];
    let hi = *xs.last().unwrap();
    let octaves = count_octaves(lo, hi)?;
    let mut centers = Vec::with_capacity(octaves);
    let mut sups = vec![0.0f64; octaves];
    for j in 0..octaves {
        let a = lo * (2.0f64).powi(j as i32);
        centers.push((a * (2.0 * a)).sqrt());
    }
    for (&x, &v) in xs.iter().zip(values) {
        let j = (x / lo).log2().floor() as isize;
        if (0..octaves as isize).contains(&j) {
            let j = j as usize;
            sups[j] = sups[j].max(v.abs());
        }
    }
    Ok(finish_envelope(centers, sups))
}

fn count_octaves(lo: f64, hi: f64) -> Result<usize> {
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::Window(format!("bad envelope window [{lo}, {hi}]")));
    }
    // tiny slack so [a, 8a] counts its third octave despite rounding
    let octaves = ((hi / lo).log2() + 1e-9).floor() as usize;
    if octaves < 3 {
        return Err(Error::Window(format!(
            "envelope window [{lo}, {hi}] spans {octaves} octaves, need >= 3"
        )));
    }
    Ok(octaves)
}

fn finish_envelope(centers: Vec<f64>, sups: Vec<f64>) -> OctaveEnvelope {
    let negligible = sups.iter().all(|&s| s <= NEGLIGIBLE_SUP);
    let mut nonincreasing = true;
    for j in 1..sups.len() {
        if sups[j] > sups[j - 1] * (1.0 + DECREASE_SLACK) + NEGLIGIBLE_SUP {
            nonincreasing = false;
        }
    }
    let (exponent, r2) = if negligible {
        (f64::INFINITY, 1.0)
    } else {
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        for (c, s) in centers.iter().zip(&sups) {
            if *s > NEGLIGIBLE_SUP {
                lx.push(c.ln());
                ly.push(s.ln());
            }
        }
        match linear_fit(&lx, &ly) {
            Some(fit) => (-fit.slope, fit.r2),
            None => (0.0, 0.0),
        }
    };
    OctaveEnvelope {
        centers,
        sups,
        exponent,
        r2,
        negligible,
        nonincreasing,
    }
}

impl OctaveEnvelope {
    /// Envelope certifiably tends to 0: zero to the floor, or nonincreasing with exponent ≥ min_exponent.
    pub fn decays(&self, min_exponent: f64) -> bool {
        self.negligible || (self.nonincreasing && self.exponent >= min_exponent)
    }
}

/// Golden-section maximization of f on [lo, hi]; returns (argmax, max).
pub(crate) fn golden_max(f: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
