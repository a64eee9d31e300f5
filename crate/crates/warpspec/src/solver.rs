//! Shooting classification of trial spectral parameters for half-line
//! operators −w″ + q(x)w = λw.
//!
//! Trajectories are integrated in modified Prüfer form w = R sinφ,
//! w′ = ωR cosφ with the frequency ω frozen per output stride at
//! √max(|λ − q̄|, ε_f) (q̄ a local mean of q), remapping (R, φ) exactly at each
//! frequency change. A trial λ is an L² eigenvalue candidate when the log-log
//! amplitude envelope of the regular solution carries a slope of magnitude
//! above the half-line square-integrability threshold 1/2.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::fit;
use crate::geometry::EndGeometry;
use crate::separation::{build_radial_operator, RadialOperator};
use crate::{Error, Result};

/// Boundary condition imposed at x0: w = 0, w′ = 0, or w′ = c·w.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Robin(f64),
}

/// Integrator controls; `out_stride = 0` picks the stride from λ automatically.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub out_stride: f64,
    /// Floor ε_f for the squared Prüfer frequency.
    pub freq_floor: f64,
    pub boundary: BoundaryCondition,
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            out_stride: 0.0,
            freq_floor: 1e-4,
            boundary: BoundaryCondition::Dirichlet,
            max_steps: 20_000_000,
        }
    }
}

/// Classification thresholds; tool constants, not spectral data.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    /// Candidate needs envelope exponent > 1/2 + margin.
    pub exponent_margin: f64,
    /// Oscillatory needs |envelope slope| within this band of zero.
    pub oscillatory_band: f64,
    /// Oscillatory also needs at least this last-quarter mass share.
    pub tail_mass_min: f64,
    /// Candidate needs at least this envelope-fit R².
    pub fit_r2_min: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            exponent_margin: 0.1,
            oscillatory_band: 0.1,
            tail_mass_min: 0.15,
            fit_r2_min: 0.9,
        }
    }
}

/// Solution of one shooting run on the uniform output grid.
#[derive(Debug, Clone)]
pub struct ShootingTrajectory {
    pub lambda: f64,
    pub xs: Vec<f64>,
    /// ln R(x_j); stored in logs so forbidden-region growth cannot overflow.
    pub log_amplitude: Vec<f64>,
    /// Unwrapped phase φ(x_j); zeros of w are the multiples of π.
    pub phase: Vec<f64>,
    /// Frozen frequency of the stride starting at x_j.
    pub omega: Vec<f64>,
    pub boundary: BoundaryCondition,
    /// X·(w(X)² + w′(X)²), logged for flux inspection.
    pub boundary_flux: f64,
}

impl ShootingTrajectory {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn amplitude(&self, j: usize) -> f64 {
        self.log_amplitude[j].exp()
    }

    pub fn w(&self, j: usize) -> f64 {
        self.amplitude(j) * self.phase[j].sin()
    }

    pub fn w_prime(&self, j: usize) -> f64 {
        self.omega[j] * self.amplitude(j) * self.phase[j].cos()
    }

    pub fn w_samples(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.w(j)).collect()
    }

    pub fn terminal_phase(&self) -> f64 {
        *self.phase.last().expect("trajectory is never empty")
    }

    /// Log-log fit of the amplitude envelope over the second half of the domain.
    pub fn envelope_fit(&self) -> Option<fit::LinFit> {
        let mid = 0.5 * (self.xs[0] + self.xs[self.len() - 1]);
        let start = self.xs.partition_point(|&x| x < mid);
        let lx: Vec<f64> = self.xs[start..].iter().map(|x| x.ln()).collect();
        fit::linear_fit(&lx, &self.log_amplitude[start..])
    }

    /// Mean amplitude over the last quarter of the domain.
    pub fn tail_mean_amplitude(&self) -> f64 {
        let start = self.quarter_start();
        let n = (self.len() - start) as f64;
        self.log_amplitude[start..].iter().map(|l| l.exp()).sum::<f64>() / n
    }

    /// Trapezoid ∫w² over the last quarter divided by the integral over the whole domain.
    pub fn tail_mass_ratio(&self) -> f64 {
        let start = self.quarter_start();
        let w2: Vec<f64> = (0..self.len()).map(|j| self.w(j) * self.w(j)).collect();
        let trapezoid = |lo: usize| -> f64 {
            (lo..self.len() - 1)
                .map(|j| 0.5 * (w2[j] + w2[j + 1]) * (self.xs[j + 1] - self.xs[j]))
                .sum()
        };
        let total: f64 = trapezoid(0);
        if total > 0.0 {
            trapezoid(start) / total
        } else {
            0.0
        }
    }

    fn quarter_start(&self) -> usize {
        let q3 = self.xs[0] + 0.75 * (self.xs[self.len() - 1] - self.xs[0]);
        self.xs.partition_point(|&x| x < q3).min(self.len() - 2)
    }

    /// Max of |−w″ + (q−λ)w| over dyadic interior checkpoints, scaled by max|w|;
    /// w″ by the 5-point stencil on the output grid.
    pub fn reinsertion_residual(&self, op: &RadialOperator) -> f64 {
        let n = self.len();
        if n < 8 {
            return f64::NAN;
        }
        let w: Vec<f64> = self.w_samples();
        let dx = self.xs[1] - self.xs[0];
        let w_max = w.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for sixteenth in 1..16 {
            let j = ((sixteenth as f64 / 16.0) * (n - 1) as f64).round() as usize;
            let j = j.clamp(2, n - 3);
            let d2 = (-w[j - 2] + 16.0 * w[j - 1] - 30.0 * w[j] + 16.0 * w[j + 1] - w[j + 2])
                / (12.0 * dx * dx);
            let residual = (-d2 + (op.q(self.xs[j]) - self.lambda) * w[j]).abs();
            worst = worst.max(residual);
        }
        worst / w_max
    }

    /// CSV with header `x,w,w_prime,R,phi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,w,w_prime,R,phi\n");
        for j in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.xs[j],
                self.w(j),
                self.w_prime(j),
                self.amplitude(j),
                self.phase[j]
            ));
        }
        out
    }
}

// Fifth-order Dormand–Prince pair on the two-component Prüfer state.
struct Stepper {
    rel: f64,
    abs: f64,
    max_steps: usize,
    steps: usize,
    h: f64,
}

impl Stepper {
    fn advance(
        &mut self,
        f: &impl Fn(f64, [f64; 2]) -> [f64; 2],
        mut x: f64,
        x_end: f64,
        y: &mut [f64; 2],
    ) -> Result<()> {
        while x < x_end {
            let mut h = self.h.min(x_end - x);
            let boundary_limited = h < self.h;
            let mut rejected = false;
            loop {
                self.steps += 1;
                if self.steps > self.max_steps {
                    return Err(Error::Integration {
                        x,
                        message: format!("step budget {} exhausted", self.max_steps),
                    });
                }
                if h < 1e-14 * (1.0 + x.abs()) {
                    return Err(Error::Integration {
                        x,
                        message: "step size underflow".into(),
                    });
                }
                let k1 = f(x, *y);
                let k2 = f(x + h / 5.0, add(y, &[(h / 5.0, &k1)]));
                let k3 = f(
                    x + 3.0 * h / 10.0,
                    add(y, &[(3.0 * h / 40.0, &k1), (9.0 * h / 40.0, &k2)]),
                );
                let k4 = f(
                    x + 4.0 * h / 5.0,
                    add(
                        y,
                        &[
                            (44.0 * h / 45.0, &k1),
                            (-56.0 * h / 15.0, &k2),
                            (32.0 * h / 9.0, &k3),
                        ],
                    ),
                );
                let k5 = f(
                    x + 8.0 * h / 9.0,
                    add(
                        y,
                        &[
                            (19372.0 * h / 6561.0, &k1),
                            (-25360.0 * h / 2187.0, &k2),
                            (64448.0 * h / 6561.0, &k3),
                            (-212.0 * h / 729.0, &k4),
                        ],
                    ),
                );
                let k6 = f(
                    x + h,
                    add(
                        y,
                        &[
                            (9017.0 * h / 3168.0, &k1),
                            (-355.0 * h / 33.0, &k2),
                            (46732.0 * h / 5247.0, &k3),
                            (49.0 * h / 176.0, &k4),
                            (-5103.0 * h / 18656.0, &k5),
                        ],
                    ),
                );
                let y5 = add(
                    y,
                    &[
                        (35.0 * h / 384.0, &k1),
                        (500.0 * h / 1113.0, &k3),
                        (125.0 * h / 192.0, &k4),
                        (-2187.0 * h / 6784.0, &k5),
                        (11.0 * h / 84.0, &k6),
                    ],
                );
                let k7 = f(x + h, y5);
                let y4 = add(
                    y,
                    &[
                        (5179.0 * h / 57600.0, &k1),
                        (7571.0 * h / 16695.0, &k3),
                        (393.0 * h / 640.0, &k4),
                        (-92097.0 * h / 339200.0, &k5),
                        (187.0 * h / 2100.0, &k6),
                        (h / 40.0, &k7),
                    ],
                );
                let mut err_norm: f64 = 0.0;
                for i in 0..2 {
                    let scale = self.abs + self.rel * y[i].abs().max(y5[i].abs());
                    err_norm = err_norm.max((y5[i] - y4[i]).abs() / scale);
                }
                if err_norm <= 1.0 {
                    x += h;
                    // Snap to the interval end once the remainder is below rounding scale,
                    // so leftover ulps never drive h under the underflow guard.
                    if x_end - x < 1e-13 * (1.0 + x.abs()) {
                        x = x_end;
                    }
                    *y = y5;
                    let grow = if err_norm > 0.0 {
                        (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                    } else {
                        5.0
                    };
                    // A step clamped to the interval end says nothing about accuracy,
                    // so it must not shrink the controller's stored step.
                    if boundary_limited && !rejected {
                        self.h = self.h.max(h * grow);
                    } else {
                        self.h = h * grow;
                    }
                    break;
                }
                rejected = true;
                h *= (0.9 * err_norm.powf(-0.2)).clamp(0.2, 0.9);
            }
        }
        Ok(())
    }
}

fn add(y: &[f64; 2], terms: &[(f64, &[f64; 2])]) -> [f64; 2] {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += c * k[0];
        out[1] += c * k[1];
    }
    out
}

// Mean of q over 9 points of [x−π/2, x+π/2] clamped to the domain; averages
// out period-π potential oscillations when picking the frozen frequency.
fn local_mean_q(op: &RadialOperator, x: f64) -> f64 {
    let lo = (x - 0.5 * PI).max(op.x0);
    let hi = (x + 0.5 * PI).min(op.x_max);
    (0..9).map(|i| op.q(lo + (hi - lo) * i as f64 / 8.0)).sum::<f64>() / 9.0
}

fn auto_stride(lambda: f64) -> f64 {
    let omega_nominal = lambda.abs().max(1.0).sqrt();
    (0.08 / omega_nominal.powf(1.5)).min(0.05)
}

/// Integrates the Prüfer system for one trial λ across [x0, x_max].
pub fn integrate(
    op: &RadialOperator,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<ShootingTrajectory> {
    if !lambda.is_finite() {
        return Err(Error::Parameter(format!("lambda must be finite, got {lambda}")));
    }
    if !(opts.out_stride >= 0.0) || !(opts.freq_floor > 0.0) {
        return Err(Error::Parameter(
            "solver options need out_stride >= 0 and freq_floor > 0".into(),
        ));
    }
    let stride = if opts.out_stride > 0.0 {
        opts.out_stride
    } else {
        auto_stride(lambda)
    };
    let span = op.x_max - op.x0;
    let n = ((span / stride).ceil() as usize).max(8);
    let dx = span / n as f64;
    let mut xs = Vec::with_capacity(n + 1);
    let mut log_amplitude = Vec::with_capacity(n + 1);
    let mut phase = Vec::with_capacity(n + 1);
    let mut omega_out = Vec::with_capacity(n + 1);

    let mut omega = (lambda - local_mean_q(op, op.x0)).abs().max(opts.freq_floor).sqrt();
    let mut y = [
        match opts.boundary {
            BoundaryCondition::Dirichlet => 0.0,
            BoundaryCondition::Neumann => 0.5 * PI,
            BoundaryCondition::Robin(c) => omega.atan2(c),
        },
        0.0,
    ];
    xs.push(op.x0);
    phase.push(y[0]);
    log_amplitude.push(y[1]);
    omega_out.push(omega);

    let mut stepper = Stepper {
        rel: opts.rel_tol,
        abs: opts.abs_tol,
        max_steps: opts.max_steps,
        steps: 0,
        h: (dx / 4.0).min(1e-3),
    };
    for j in 0..n {
        let x_lo = op.x0 + j as f64 * dx;
        let x_hi = if j + 1 == n { op.x_max } else { op.x0 + (j + 1) as f64 * dx };
        if j > 0 {
            let fresh = (lambda - local_mean_q(op, x_lo)).abs().max(opts.freq_floor).sqrt();
            if fresh != omega {
                let rho = omega / fresh;
                let (s, c) = y[0].sin_cos();
                let raw = s.atan2(rho * c);
                y[0] = raw + 2.0 * PI * ((y[0] - raw) / (2.0 * PI)).round();
                y[1] += 0.5 * (s * s + rho * rho * c * c).ln();
                omega = fresh;
                *omega_out.last_mut().unwrap() = omega;
                *phase.last_mut().unwrap() = y[0];
                *log_amplitude.last_mut().unwrap() = y[1];
            }
        }
        let w = omega;
        let rhs = |x: f64, y: [f64; 2]| -> [f64; 2] {
            let (s, c) = y[0].sin_cos();
            let delta = lambda - op.q(x);
            [w * c * c + delta / w * s * s, (w - delta / w) * s * c]
        };
        stepper.advance(&rhs, x_lo, x_hi, &mut y)?;
        xs.push(x_hi);
        phase.push(y[0]);
        log_amplitude.push(y[1]);
        omega_out.push(omega);
    }

    let (s, c) = y[0].sin_cos();
    let amp = y[1].exp();
    let (w_end, wp_end) = (amp * s, omega * amp * c);
    Ok(ShootingTrajectory {
        lambda,
        xs,
        log_amplitude,
        phase,
        omega: omega_out,
        boundary: opts.boundary,
        boundary_flux: op.x_max * (w_end * w_end + wp_end * wp_end),
    })
}

/// Verdict for one trial λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    L2Candidate,
    Oscillatory,
    Inconclusive,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::L2Candidate => "L2_candidate",
            Classification::Oscillatory => "oscillatory",
            Classification::Inconclusive => "inconclusive",
        })
    }
}

impl std::str::FromStr for Classification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L2_candidate" => Ok(Classification::L2Candidate),
            "oscillatory" => Ok(Classification::Oscillatory),
            "inconclusive" => Ok(Classification::Inconclusive),
            other => Err(Error::Parameter(format!("unknown classification {other:?}"))),
        }
    }
}

/// Metrics and verdict for one (mode, λ) scan cell.
#[derive(Debug, Clone, Copy)]
pub struct EigenScanResult {
    pub mode_index: usize,
    pub lambda_trial: f64,
    pub classification: Classification,
    pub tail_mass_ratio: f64,
    /// |slope| of the log-log amplitude envelope over the last half.
    pub envelope_exponent: f64,
    pub fit_r2: f64,
    pub boundary_flux: f64,
    /// Bracket handedness for a follow-up refinement, when flagged a candidate.
    pub refinement: Option<(f64, f64)>,
}

/// Classifies one trial λ with default options.
pub fn classify(op: &RadialOperator, lambda: f64) -> Result<EigenScanResult> {
    classify_with(op, lambda, &ClassifyOptions::default(), &SolverOptions::default())
}

/// Classifies one trial λ; needs the domain to cover ≥ 50 oscillation periods at λ.
pub fn classify_with(
    op: &RadialOperator,
    lambda: f64,
    copts: &ClassifyOptions,
    sopts: &SolverOptions,
) -> Result<EigenScanResult> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!(
            "classification needs lambda > 0, got {lambda}"
        )));
    }
    let periods = (op.x_max - op.x0) * lambda.sqrt() / (2.0 * PI);
    if periods < 50.0 * 0.99 {
        return Err(Error::Window(format!(
            "domain holds {periods:.1} oscillation periods at lambda = {lambda}; need 50"
        )));
    }
    let trajectory = integrate(op, lambda, sopts)?;
    let fit = trajectory.envelope_fit();
    let (slope, r2) = fit.map_or((0.0, 0.0), |f| (f.slope, f.r2));
    let exponent = slope.abs();
    let tail_mass = trajectory.tail_mass_ratio();
    let classification = if exponent > 0.5 + copts.exponent_margin && r2 >= copts.fit_r2_min {
        Classification::L2Candidate
    } else if exponent <= copts.oscillatory_band && tail_mass >= copts.tail_mass_min {
        Classification::Oscillatory
    } else {
        Classification::Inconclusive
    };
    Ok(EigenScanResult {
        mode_index: op.mode_index,
        lambda_trial: lambda,
        classification,
        tail_mass_ratio: tail_mass,
        envelope_exponent: exponent,
        fit_r2: r2,
        boundary_flux: trajectory.boundary_flux,
        refinement: None,
    })
}

/// Evenly spaced trial values lo, lo+step, … up to hi (inclusive within rounding).
pub fn lambda_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && step > 0.0) {
        return Err(Error::Parameter(format!(
            "spectral grid needs 0 < lo < hi and step > 0, got {lo}:{hi}:{step}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| lo + step * i as f64).collect())
}

/// Truncation radius giving every λ ≥ lambda_min at least 50 oscillation periods.
pub fn default_truncation(x0: f64, lambda_min: f64) -> Result<f64> {
    if !(lambda_min > 0.0) {
        return Err(Error::Parameter(format!(
            "truncation rule needs lambda_min > 0, got {lambda_min}"
        )));
    }
    Ok(x0 + (50.0 * 2.0 * PI / lambda_min.sqrt()).max(200.0))
}

/// Classifies every (mode, λ) cell; rows come back mode-major with λ ascending.
pub fn scan_modes(
    end: &EndGeometry,
    modes: &[usize],
    x_max: f64,
    lambdas: &[f64],
    copts: &ClassifyOptions,
    sopts: &SolverOptions,
) -> Result<Vec<EigenScanResult>> {
    let mut rows = Vec::with_capacity(modes.len() * lambdas.len());
    for &index in modes {
        let op = build_radial_operator(end, index, x_max)?;
        let mode_rows = lambdas
            .par_iter()
            .map(|&lambda| classify_with(&op, lambda, copts, sopts))
            .collect::<Result<Vec<_>>>()?;
        rows.extend(mode_rows);
    }
    Ok(rows)
}

/// Location and sharpness of a refined resonance.
#[derive(Debug, Clone, Copy)]
pub struct Refinement {
    pub lambda_star: f64,
    /// Peak tail amplitude over the off-peak tail amplitude at ±(hi−lo)/10.
    pub contrast: f64,
}

/// Refines a flagged candidate inside [lambda_lo, lambda_hi] with default options.
pub fn refine_candidate(op: &RadialOperator, lambda_lo: f64, lambda_hi: f64) -> Result<Refinement> {
    refine_candidate_with(op, lambda_lo, lambda_hi, &SolverOptions::default())
}

/// Maximizes the tail mean amplitude T(λ) over the bracket; resonances are sharp interior peaks.
pub fn refine_candidate_with(
    op: &RadialOperator,
    lambda_lo: f64,
    lambda_hi: f64,
    sopts: &SolverOptions,
) -> Result<Refinement> {
    if !(lambda_lo < lambda_hi) || !(lambda_lo > 0.0) {
        return Err(Error::Parameter(format!(
            "refinement bracket needs 0 < lo < hi, got [{lambda_lo}, {lambda_hi}]"
        )));
    }
    let tail = |lambda: f64| -> Result<f64> {
        Ok(integrate(op, lambda, sopts)?.tail_mean_amplitude())
    };
    const PRESCAN: usize = 41;
    let grid: Vec<f64> = (0..PRESCAN)
        .map(|i| lambda_lo + (lambda_hi - lambda_lo) * i as f64 / (PRESCAN - 1) as f64)
        .collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&l| tail(l))
        .collect::<Result<Vec<f64>>>()?;
    let peak = values
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (i, &v)| {
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        })
        .0;
    if peak == 0 || peak == PRESCAN - 1 {
        return Err(Error::Bracket(format!(
            "tail amplitude peaks at the bracket edge lambda = {}",
            grid[peak]
        )));
    }
    let mut failure: Option<Error> = None;
    let mut objective = |lambda: f64| -> f64 {
        match tail(lambda) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    };
    let xtol = ((lambda_hi - lambda_lo) * 1e-6).max(1e-9);
    let (lambda_star, t_star) =
        fit::golden_max(&mut objective, grid[peak - 1], grid[peak + 1], xtol);
    if let Some(e) = failure {
        return Err(e);
    }
    let delta = (lambda_hi - lambda_lo) / 10.0;
    let left = tail((lambda_star - delta).max(lambda_lo))?;
    let right = tail((lambda_star + delta).min(lambda_hi))?;
    let contrast = t_star / left.max(right);
    if !(contrast > 1.05) {
        return Err(Error::Bracket(format!(
            "tail amplitude is flat over the bracket (contrast {contrast:.3})"
        )));
    }
    Ok(Refinement {
        lambda_star,
        contrast,
    })
}

/// Decay law fitted by [`estimate_decay`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    Power,
    Exponential,
}

/// Fitted decay rate: values ~ x^{−rate} (power) or ~ e^{−rate·x} (exponential).
#[derive(Debug, Clone, Copy)]
pub struct DecayEstimate {
    pub model: DecayModel,
    pub rate: f64,
    pub r2: f64,
}

/// Fits the envelope of |values| against the chosen decay law; needs fit R² ≥ 0.8.
pub fn estimate_decay(xs: &[f64], values: &[f64], model: DecayModel) -> Result<DecayEstimate> {
    if xs.len() != values.len() || xs.len() < 8 {
        return Err(Error::Parameter(
            "decay estimation needs matching xs/values with at least 8 samples".into(),
        ));
    }
    let magnitudes: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let mut envelope = fit::local_maxima(xs, &magnitudes);
    if envelope.len() < 5 {
        envelope = xs.iter().copied().zip(magnitudes).collect();
    }
    let pairs: Vec<(f64, f64)> = envelope
        .into_iter()
        .filter(|&(_, v)| v > 1e-300)
        .map(|(x, v)| {
            let abscissa = match model {
                DecayModel::Power => x.ln(),
                DecayModel::Exponential => x,
            };
            (abscissa, v.ln())
        })
        .collect();
    if pairs.len() < 5 {
        return Err(Error::Estimation("too few envelope points above zero".into()));
    }
    let (ax, ay): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let fit = fit::linear_fit(&ax, &ay)
        .ok_or_else(|| Error::Estimation("degenerate envelope abscissa".into()))?;
    if fit.r2 < 0.8 {
        return Err(Error::Estimation(format!(
            "envelope fit R² = {:.3} is below 0.8",
            fit.r2
        )));
    }
    Ok(DecayEstimate {
        model,
        rate: -fit.slope,
        r2: fit.r2,
    })
}

/// First `count` Dirichlet eigenvalues of the truncated interval by terminal-phase bisection.
pub fn dirichlet_interval_eigenvalues(op: &RadialOperator, count: usize) -> Result<Vec<f64>> {
    dirichlet_interval_eigenvalues_with(op, count, &SolverOptions::default())
}

/// As [`dirichlet_interval_eigenvalues`]; the boundary in `opts` is overridden to Dirichlet.
pub fn dirichlet_interval_eigenvalues_with(
    op: &RadialOperator,
    count: usize,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let opts = SolverOptions {
        boundary: BoundaryCondition::Dirichlet,
        ..*opts
    };
    let terminal = |lambda: f64| -> Result<f64> { Ok(integrate(op, lambda, &opts)?.terminal_phase()) };
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let target = (k + 1) as f64 * PI;
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..64 {
            if terminal(lo)? < target {
                break;
            }
            lo = 2.0 * lo - 1.0;
        }
        for _ in 0..64 {
            if terminal(hi)? >= target {
                break;
            }
            hi = 2.0 * hi + 1.0;
        }
        if terminal(lo)? >= target || terminal(hi)? < target {
            return Err(Error::Bracket(format!(
                "could not bracket Dirichlet eigenvalue {k} (terminal phase target {target})"
            )));
        }
        for _ in 0..100 {
            if hi - lo < 1e-12 * hi.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if terminal(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}
