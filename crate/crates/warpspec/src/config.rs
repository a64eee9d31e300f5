//! Line-oriented run configuration: `section.key = value`, `#` comments, unknown keys rejected.

use std::path::Path;

use crate::conditions::{HypothesisConstants, Window, DEFAULT_GRID_PER_UNIT};
use crate::counterexample::PipelineOptions;
use crate::geometry::{EndGeometry, WarpingProfile};
use crate::separation::{sphere_eigenvalues, TestFunction};
use crate::solver::{BoundaryCondition, ClassifyOptions, SolverOptions};
use crate::{Error, Result};

/// Geometry of the end: dimension, inner radius, and how many cross-sectional levels to carry.
#[derive(Debug, Clone)]
pub struct EndSection {
    pub n: usize,
    pub r0: f64,
    pub modes: usize,
}

/// Which warping profile to build and its parameters.
#[derive(Debug, Clone)]
pub struct ProfileSection {
    pub kind: String,
    pub theta: f64,
    pub alpha: f64,
    pub k: f64,
    pub file: String,
}

/// Hypothesis constants for condition checks and thresholds.
#[derive(Debug, Clone)]
pub struct ConstantsSection {
    pub a: f64,
    pub b: f64,
    pub a0: f64,
    pub b0: f64,
    pub b1: f64,
    pub k3: f64,
    pub gamma: f64,
    pub theta: Option<f64>,
    /// Spectral parameter at which eta1 is reported.
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct WindowSection {
    pub lo: f64,
    pub hi: f64,
}

/// Trial-eigenvalue grid and truncation for the scan.
#[derive(Debug, Clone)]
pub struct ScanSection {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub lambda_step: f64,
    /// Number of cross-sectional modes to scan (indices 0..modes).
    pub modes: usize,
    /// Truncation radius; 0 selects the 50-period rule at lambda_lo.
    pub x_max: f64,
    /// "dirichlet", "neumann", or "robin:<c>".
    pub boundary: String,
}

#[derive(Debug, Clone)]
pub struct CounterexampleSection {
    pub alpha: f64,
    pub k: f64,
}

/// Boundary identity check: weight exponent, interval, test function, and random draws.
#[derive(Debug, Clone)]
pub struct IdentitySection {
    pub beta: f64,
    pub s: f64,
    pub t: f64,
    pub v_power: f64,
    pub v_rate: f64,
    pub v_coeffs: Vec<f64>,
    pub draws: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ToleranceSection {
    pub grid_per_unit: f64,
    pub ode_rel: f64,
    pub ode_abs: f64,
    pub freq_floor: f64,
    pub out_stride: f64,
    pub exponent_margin: f64,
    pub oscillatory_band: f64,
    pub tail_mass_min: f64,
    pub fit_r2_min: f64,
    pub identity_residual: f64,
    pub decay_exponent_min: f64,
}

/// Full typed configuration with defaults for every key.
#[derive(Debug, Clone)]
pub struct Config {
    pub end: EndSection,
    pub profile: ProfileSection,
    pub reference: ProfileSection,
    pub constants: ConstantsSection,
    pub window: WindowSection,
    pub scan: ScanSection,
    pub counterexample: CounterexampleSection,
    pub identity: IdentitySection,
    pub tolerances: ToleranceSection,
}

impl Default for Config {
    fn default() -> Self {
        let reference = ProfileSection {
            kind: "power_law".into(),
            theta: 1.0,
            alpha: 0.75,
            k: 6.0,
            file: String::new(),
        };
        Self {
            end: EndSection { n: 3, r0: 1.0, modes: 8 },
            profile: reference.clone(),
            reference,
            constants: ConstantsSection {
                a: 0.1,
                b: 0.1,
                a0: 1.0,
                b0: 1.0,
                b1: 0.1,
                k3: 1.0,
                gamma: 1.0,
                theta: None,
                lambda: 1.0,
            },
            window: WindowSection { lo: 2.0, hi: 200.0 },
            scan: ScanSection {
                lambda_lo: 0.1,
                lambda_hi: 4.0,
                lambda_step: 0.1,
                modes: 4,
                x_max: 0.0,
                boundary: "dirichlet".into(),
            },
            counterexample: CounterexampleSection { alpha: 0.75, k: 6.0 },
            identity: IdentitySection {
                beta: 1.0,
                s: 2.0,
                t: 8.0,
                v_power: -1.0,
                v_rate: 0.0,
                v_coeffs: vec![1.0],
                draws: 0,
                seed: 7,
            },
            tolerances: ToleranceSection {
                grid_per_unit: DEFAULT_GRID_PER_UNIT,
                ode_rel: 1e-11,
                ode_abs: 1e-13,
                freq_floor: 1e-4,
                out_stride: 0.0,
                exponent_margin: 0.1,
                oscillatory_band: 0.1,
                tail_mass_min: 0.15,
                fit_r2_min: 0.9,
                identity_residual: 1e-8,
                decay_exponent_min: 0.1,
            },
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key '{key}': expected a number, got '{value}'")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key '{key}': expected a count, got '{value}'")))
}

fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key '{key}': expected an integer, got '{value}'")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    let items: Vec<f64> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("key '{key}': expected a nonempty list")));
    }
    Ok(items)
}

impl Config {
    /// Parses `section.key = value` lines; `#` lines and blanks are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected 'section.key = value', got '{line}'",
                    number + 1
                )));
            };
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Reads and parses a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key; unknown keys are hard errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "end.n" => self.end.n = parse_usize(key, value)?,
            "end.r0" => self.end.r0 = parse_f64(key, value)?,
            "end.modes" => self.end.modes = parse_usize(key, value)?,
            "profile.kind" => self.profile.kind = value.to_string(),
            "profile.theta" => self.profile.theta = parse_f64(key, value)?,
            "profile.alpha" => self.profile.alpha = parse_f64(key, value)?,
            "profile.k" => self.profile.k = parse_f64(key, value)?,
            "profile.file" => self.profile.file = value.to_string(),
            "reference.kind" => self.reference.kind = value.to_string(),
            "reference.theta" => self.reference.theta = parse_f64(key, value)?,
            "reference.alpha" => self.reference.alpha = parse_f64(key, value)?,
            "reference.k" => self.reference.k = parse_f64(key, value)?,
            "reference.file" => self.reference.file = value.to_string(),
            "constants.a" => self.constants.a = parse_f64(key, value)?,
            "constants.b" => self.constants.b = parse_f64(key, value)?,
            "constants.a0" => self.constants.a0 = parse_f64(key, value)?,
            "constants.b0" => self.constants.b0 = parse_f64(key, value)?,
            "constants.b1" => self.constants.b1 = parse_f64(key, value)?,
            "constants.k3" => self.constants.k3 = parse_f64(key, value)?,
            "constants.gamma" => self.constants.gamma = parse_f64(key, value)?,
            "constants.theta" => self.constants.theta = Some(parse_f64(key, value)?),
            "constants.lambda" => self.constants.lambda = parse_f64(key, value)?,
            "window.lo" => self.window.lo = parse_f64(key, value)?,
            "window.hi" => self.window.hi = parse_f64(key, value)?,
            "scan.lambda_lo" => self.scan.lambda_lo = parse_f64(key, value)?,
            "scan.lambda_hi" => self.scan.lambda_hi = parse_f64(key, value)?,
            "scan.lambda_step" => self.scan.lambda_step = parse_f64(key, value)?,
            "scan.modes" => self.scan.modes = parse_usize(key, value)?,
            "scan.x_max" => self.scan.x_max = parse_f64(key, value)?,
            "scan.boundary" => self.scan.boundary = value.to_string(),
            "counterexample.alpha" => self.counterexample.alpha = parse_f64(key, value)?,
            "counterexample.k" => self.counterexample.k = parse_f64(key, value)?,
            "identity.beta" => self.identity.beta = parse_f64(key, value)?,
            "identity.s" => self.identity.s = parse_f64(key, value)?,
            "identity.t" => self.identity.t = parse_f64(key, value)?,
            "identity.v_power" => self.identity.v_power = parse_f64(key, value)?,
            "identity.v_rate" => self.identity.v_rate = parse_f64(key, value)?,
            "identity.v_coeffs" => self.identity.v_coeffs = parse_list(key, value)?,
            "identity.draws" => self.identity.draws = parse_usize(key, value)?,
            "identity.seed" => self.identity.seed = parse_u64(key, value)?,
            "tolerances.grid_per_unit" => self.tolerances.grid_per_unit = parse_f64(key, value)?,
            "tolerances.ode_rel" => self.tolerances.ode_rel = parse_f64(key, value)?,
            "tolerances.ode_abs" => self.tolerances.ode_abs = parse_f64(key, value)?,
            "tolerances.freq_floor" => self.tolerances.freq_floor = parse_f64(key, value)?,
            "tolerances.out_stride" => self.tolerances.out_stride = parse_f64(key, value)?,
            "tolerances.exponent_margin" => {
                self.tolerances.exponent_margin = parse_f64(key, value)?
            }
            "tolerances.oscillatory_band" => {
                self.tolerances.oscillatory_band = parse_f64(key, value)?
            }
            "tolerances.tail_mass_min" => self.tolerances.tail_mass_min = parse_f64(key, value)?,
            "tolerances.fit_r2_min" => self.tolerances.fit_r2_min = parse_f64(key, value)?,
            "tolerances.identity_residual" => {
                self.tolerances.identity_residual = parse_f64(key, value)?
            }
            "tolerances.decay_exponent_min" => {
                self.tolerances.decay_exponent_min = parse_f64(key, value)?
            }
            _ => return Err(Error::Config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Builds the configured end geometry with its cross-sectional spectrum.
    pub fn end_geometry(&self) -> Result<EndGeometry> {
        let profile = build_profile(&self.profile)?;
        let cross = sphere_eigenvalues(self.end.n, self.end.modes)?;
        EndGeometry::new(self.end.n, self.end.r0, profile, cross)
    }

    /// Builds the reference profile for the rate-comparison checks.
    pub fn reference_profile(&self) -> Result<WarpingProfile> {
        build_profile(&self.reference)
    }

    pub fn hypothesis_constants(&self) -> Result<HypothesisConstants> {
        let c = &self.constants;
        let constants =
            HypothesisConstants::new(self.end.n, c.a, c.b, c.a0, c.b0, c.b1, c.k3, c.gamma)?;
        match c.theta {
            Some(theta) => constants.with_theta(theta),
            None => Ok(constants),
        }
    }

    pub fn check_window(&self) -> Result<Window> {
        Window::new(self.window.lo, self.window.hi)
    }

    pub fn solver_options(&self) -> Result<SolverOptions> {
        let boundary = parse_boundary(&self.scan.boundary)?;
        Ok(SolverOptions {
            rel_tol: self.tolerances.ode_rel,
            abs_tol: self.tolerances.ode_abs,
            out_stride: self.tolerances.out_stride,
            freq_floor: self.tolerances.freq_floor,
            boundary,
            ..SolverOptions::default()
        })
    }

    pub fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions {
            exponent_margin: self.tolerances.exponent_margin,
            oscillatory_band: self.tolerances.oscillatory_band,
            tail_mass_min: self.tolerances.tail_mass_min,
            fit_r2_min: self.tolerances.fit_r2_min,
        }
    }

    pub fn pipeline_options(&self) -> Result<PipelineOptions> {
        Ok(PipelineOptions {
            lambda_lo: self.scan.lambda_lo,
            lambda_hi: self.scan.lambda_hi,
            lambda_step: self.scan.lambda_step,
            window: self.check_window()?,
            x_max: self.scan.x_max,
            max_level: self.end.modes,
            classify: self.classify_options(),
            solver: self.solver_options()?,
        })
    }

    /// Test function for the boundary identity (default 1/r).
    pub fn identity_test_function(&self) -> Result<TestFunction> {
        TestFunction::new(&self.identity.v_coeffs, self.identity.v_power, self.identity.v_rate)
    }
}

fn build_profile(section: &ProfileSection) -> Result<WarpingProfile> {
    match section.kind.as_str() {
        "power_law" => WarpingProfile::power_law(section.theta),
        "oscillatory" => WarpingProfile::oscillatory_exp(section.alpha, section.k),
        "sampled" => {
            if section.file.is_empty() {
                return Err(Error::Config(
                    "sampled profile needs profile.file or reference.file".into(),
                ));
            }
            WarpingProfile::sampled_from_csv(Path::new(&section.file))
        }
        other => Err(Error::Config(format!(
            "unknown profile kind '{other}' (expected power_law, oscillatory, or sampled)"
        ))),
    }
}

fn parse_boundary(text: &str) -> Result<BoundaryCondition> {
    match text {
        "dirichlet" => Ok(BoundaryCondition::Dirichlet),
        "neumann" => Ok(BoundaryCondition::Neumann),
        other => match other.strip_prefix("robin:") {
            Some(c) => Ok(BoundaryCondition::Robin(parse_f64("scan.boundary", c.trim())?)),
            None => Err(Error::Config(format!(
                "unknown boundary '{other}' (expected dirichlet, neumann, or robin:<c>)"
            ))),
        },
    }
}
