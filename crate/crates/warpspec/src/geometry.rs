//! Warping profiles h(r) and the radial quantities they induce.

use std::path::Path;
use std::sync::{Arc, RwLock};

use crate::{quad, Error, Result};

// Relative tolerance for the log h quadrature of oscillatory profiles.
const LOG_H_TOL: f64 = 1e-12;

/// Point values of a profile: h > 0, A = h′/h, K = −h″/h, A′ = dA/dr; always K = −(A′ + A²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub h: f64,
    pub a: f64,
    pub k: f64,
    pub a_prime: f64,
}

/// Rate quantities A, K, A′ alone — skips the h quadrature of integral-defined profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSample {
    pub a: f64,
    pub k: f64,
    pub a_prime: f64,
}

#[derive(Clone)]
enum Kind {
    PowerLaw { theta: f64 },
    OscillatoryExp { alpha: f64, k: f64, log_h: Arc<Checkpoints> },
    Sampled(Arc<Spline>),
}

/// A radial warping profile h(r) defined for r ≥ r_min (sampled profiles: up to their last knot).
#[derive(Clone)]
pub struct WarpingProfile {
    kind: Kind,
    r_min: f64,
}

impl WarpingProfile {
    /// h(r) = r^θ, so A = θ/r and K = θ(1−θ)/r².
    pub fn power_law(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::Parameter(format!(
                "power-law exponent must be positive and finite, got {theta}"
            )));
        }
        Ok(Self {
            kind: Kind::PowerLaw { theta },
            r_min: 1e-12,
        })
    }

    /// Profile with A(r) = r^{−α} + k·sin(2r)/r and h(1) = 1; h is recovered by quadrature of A.
    pub fn oscillatory_exp(alpha: f64, k: f64) -> Result<Self> {
        if !(alpha > 0.5 && alpha < 1.0) {
            return Err(Error::Parameter(format!(
                "oscillatory profile needs 0.5 < alpha < 1, got {alpha}"
            )));
        }
        if !(k.abs() > 1.0) || !k.is_finite() {
            return Err(Error::Parameter(format!(
                "oscillatory profile needs |k| > 1, got {k}"
            )));
        }
        Ok(Self {
            kind: Kind::OscillatoryExp {
                alpha,
                k,
                log_h: Arc::new(Checkpoints::new(alpha, k)),
            },
            r_min: 1.0,
        })
    }

    /// C² natural-spline interpolant through strictly increasing (r, h) samples with h > 0.
    pub fn sampled(points: &[(f64, f64)]) -> Result<Self> {
        let spline = Spline::new(points)?;
        let r_min = spline.xs[0];
        Ok(Self {
            kind: Kind::Sampled(Arc::new(spline)),
            r_min,
        })
    }

    /// Reads a two-column CSV `r,h` (header required, strictly increasing r).
    pub fn sampled_from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "r,h" => {}
            other => {
                return Err(Error::Config(format!(
                    "profile file {}: expected header 'r,h', got {:?}",
                    path.display(),
                    other.unwrap_or("")
                )))
            }
        }
        let mut points = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let (r, h) = match (cols.next(), cols.next(), cols.next()) {
                (Some(r), Some(h), None) => (r.trim(), h.trim()),
                _ => {
                    return Err(Error::Config(format!(
                        "profile file {}:{}: expected two columns",
                        path.display(),
                        idx + 2
                    )))
                }
            };
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::Config(format!(
                        "profile file {}:{}: bad number {s:?}",
                        path.display(),
                        idx + 2
                    ))
                })
            };
            points.push((parse(r)?, parse(h)?));
        }
        Self::sampled(&points)
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    /// Upper end of the domain; None when the profile extends to infinity.
    pub fn r_max(&self) -> Option<f64> {
        match &self.kind {
            Kind::Sampled(s) => Some(*s.xs.last().unwrap()),
            _ => None,
        }
    }

    /// True when the profile is defined in closed form out to arbitrarily large r.
    pub fn extends_to_infinity(&self) -> bool {
        self.r_max().is_none()
    }

    // True when each h evaluation runs a quadrature (callers may want to tabulate).
    pub(crate) fn h_quadrature_backed(&self) -> bool {
        matches!(self.kind, Kind::OscillatoryExp { .. })
    }

    /// Evaluates (h, A, K, A′) at r.
    pub fn eval(&self, r: f64) -> Result<ProfileSample> {
        let rates = self.eval_rates(r)?;
        let h = match &self.kind {
            Kind::PowerLaw { theta } => r.powf(*theta),
            Kind::OscillatoryExp { log_h, .. } => log_h.log_h(r)?.exp(),
            Kind::Sampled(sp) => sp.eval(r)?.0,
        };
        Ok(ProfileSample {
            h,
            a: rates.a,
            k: rates.k,
            a_prime: rates.a_prime,
        })
    }

    /// Evaluates (A, K, A′) at r without recovering h.
    pub fn eval_rates(&self, r: f64) -> Result<RateSample> {
        if r < self.r_min {
            return Err(Error::Domain(format!(
                "r = {r} below the profile domain start {}",
                self.r_min
            )));
        }
        match &self.kind {
            Kind::PowerLaw { theta } => {
                let t = *theta;
                Ok(RateSample {
                    a: t / r,
                    k: t * (1.0 - t) / (r * r),
                    a_prime: -t / (r * r),
                })
            }
            Kind::OscillatoryExp { alpha, k, .. } => {
                let al = *alpha;
                let kk = *k;
                let s2 = (2.0 * r).sin();
                let c2 = (2.0 * r).cos();
                let a = r.powf(-al) + kk * s2 / r;
                let a_prime = -al * r.powf(-al - 1.0) + 2.0 * kk * c2 / r - kk * s2 / (r * r);
                Ok(RateSample {
                    a,
                    k: -(a_prime + a * a),
                    a_prime,
                })
            }
            Kind::Sampled(sp) => {
                let (h, h1, h2) = sp.eval(r)?;
                if h <= 0.0 {
                    return Err(Error::Domain(format!(
                        "evaluation: interpolated h = {h} <= 0 at r = {r}"
                    )));
                }
                let a = h1 / h;
                let k = -h2 / h;
                Ok(RateSample {
                    a,
                    k,
                    a_prime: -k - a * a,
                })
            }
        }
    }
}

// Unit-spaced log h(1+j) checkpoints, lazily extended; readers see a consistent table.
struct Checkpoints {
    alpha: f64,
    k: f64,
    table: RwLock<Vec<f64>>,
}

impl Checkpoints {
    fn new(alpha: f64, k: f64) -> Self {
        Self {
            alpha,
            k,
            table: RwLock::new(vec![0.0]),
        }
    }

    fn integrand(&self) -> impl Fn(f64) -> f64 {
        let (al, kk) = (self.alpha, self.k);
        move |x: f64| x.powf(-al) + kk * (2.0 * x).sin() / x
    }

    // log h(r) = table[j] + ∫_{1+j}^r A for j = floor(r − 1)
    fn log_h(&self, r: f64) -> Result<f64> {
        let j = (r - 1.0).floor().max(0.0) as usize;
        self.ensure(j)?;
        let base = self.table.read().unwrap()[j];
        let a = self.integrand();
        Ok(base + quad::integrate(&a, 1.0 + j as f64, r, LOG_H_TOL)?)
    }

    fn ensure(&self, j: usize) -> Result<()> {
        if self.table.read().unwrap().len() > j {
            return Ok(());
        }
        let a = self.integrand();
        let mut t = self.table.write().unwrap();
        while t.len() <= j {
            let i = t.len();
            let inc = quad::integrate(&a, i as f64, i as f64 + 1.0, LOG_H_TOL)?;
            let prev = t[i - 1];
            t.push(prev + inc);
        }
        Ok(())
    }
}

// Natural cubic spline through (xs, ys); m holds second derivatives at the knots.
struct Spline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::Parameter(format!(
                "sampled profile needs at least 4 points, got {}",
                points.len()
            )));
        }
        let n = points.len();
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        for i in 1..n {
            if !(xs[i] > xs[i - 1]) {
                return Err(Error::Parameter(format!(
                    "sampled profile radii must be strictly increasing (r[{}] = {} after {})",
                    i,
                    xs[i],
                    xs[i - 1]
                )));
            }
        }
        if let Some(&(r, h)) = points.iter().find(|&&(_, h)| !(h > 0.0)) {
            return Err(Error::Parameter(format!(
                "sampled profile needs h > 0 at every knot, got h = {h} at r = {r}"
            )));
        }
        // Thomas algorithm for the natural-spline tridiagonal system
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        for i in 1..n - 1 {
            let hl = xs[i] - xs[i - 1];
            let hr = xs[i + 1] - xs[i];
            sub[i] = hl;
            diag[i] = 2.0 * (hl + hr);
            sup[i] = hr;
            rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / hr - (ys[i] - ys[i - 1]) / hl);
        }
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Ok(Self { xs, ys, m })
    }

    fn eval(&self, r: f64) -> Result<(f64, f64, f64)> {
        let n = self.xs.len();
        if r > self.xs[n - 1] {
            return Err(Error::Domain(format!(
                "r = {r} beyond the sampled profile end {}",
                self.xs[n - 1]
            )));
        }
        let i = match self.xs.partition_point(|&x| x <= r) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let d = x1 - x0;
        let u = x1 - r;
        let t = r - x0;
        let v = m0 * u * u * u / (6.0 * d)
            + m1 * t * t * t / (6.0 * d)
            + (y0 / d - m0 * d / 6.0) * u
            + (y1 / d - m1 * d / 6.0) * t;
        let v1 = -m0 * u * u / (2.0 * d) + m1 * t * t / (2.0 * d) + (y1 - y0) / d
            - (m1 - m0) * d / 6.0;
        let v2 = (m0 * u + m1 * t) / d;
        Ok((v, v1, v2))
    }

    fn knots(&self) -> &[f64] {
        &self.xs
    }
}

/// Interior spline knots of a sampled profile inside (lo, hi), for quadrature breakpoints.
pub(crate) fn interior_knots(profile: &WarpingProfile, lo: f64, hi: f64) -> Vec<f64> {
    match &profile.kind {
        Kind::Sampled(s) => s
            .knots()
            .iter()
            .copied()
            .filter(|&x| x > lo && x < hi)
            .collect(),
        _ => Vec::new(),
    }
}

/// A warped end dr² + h(r)² g_S: dimension n ≥ 2, start radius r0, cross-section spectrum 0 = λ_0 ≤ λ_1 ≤ ….
#[derive(Clone)]
pub struct EndGeometry {
    pub n: usize,
    pub r0: f64,
    pub profile: WarpingProfile,
    pub cross_eigenvalues: Vec<f64>,
}

impl EndGeometry {
    pub fn new(
        n: usize,
        r0: f64,
        profile: WarpingProfile,
        cross_eigenvalues: Vec<f64>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("dimension n must be >= 2, got {n}")));
        }
        if !(r0 > 0.0) || r0 < profile.r_min() {
            return Err(Error::Parameter(format!(
                "start radius r0 = {r0} must be positive and >= the profile domain start {}",
                profile.r_min()
            )));
        }
        if cross_eigenvalues.first() != Some(&0.0) {
            return Err(Error::Parameter(
                "cross-section spectrum must start with lambda_0 = 0".into(),
            ));
        }
        for w in cross_eigenvalues.windows(2) {
            if !(w[1] >= w[0]) {
                return Err(Error::Parameter(
                    "cross-section eigenvalues must be ascending".into(),
                ));
            }
        }
        Ok(Self {
            n,
            r0,
            profile,
            cross_eigenvalues,
        })
    }

    /// Hessian coefficient A_h(r) (so ∇dr = A_h·g̃) and radial Ricci curvature (n−1)K_h(r).
    pub fn hessian_and_ricci(&self, r: f64) -> Result<(f64, f64)> {
        self.require_in_domain(r)?;
        let s = self.profile.eval(r)?;
        Ok((s.a, (self.n as f64 - 1.0) * s.k))
    }

    /// Laplacian of the distance function, Δr = (n−1)A_h(r).
    pub fn laplacian_r(&self, r: f64) -> Result<f64> {
        self.require_in_domain(r)?;
        let s = self.profile.eval(r)?;
        Ok((self.n as f64 - 1.0) * s.a)
    }

    /// Relative defect of −d(Δr)/dr = |∇dr|² + Ric(∇r,∇r) at r.
    pub fn radial_identity_residual(&self, r: f64) -> Result<f64> {
        self.require_in_domain(r)?;
        let s = self.profile.eval(r)?;
        let c = self.n as f64 - 1.0;
        let lhs = -c * s.a_prime;
        let rhs = c * s.a * s.a + c * s.k;
        Ok((lhs - rhs).abs() / (lhs.abs() + rhs.abs() + f64::MIN_POSITIVE))
    }

    fn require_in_domain(&self, r: f64) -> Result<()> {
        if r < self.r0 {
            return Err(Error::Domain(format!(
                "r = {r} below the end start r0 = {}",
                self.r0
            )));
        }
        Ok(())
    }
}
