//! Subcommand drivers: each one runs a capability and writes CSV reports plus verdict.txt.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditions::{self, CheckInputs};
use crate::config::Config;
use crate::counterexample;
use crate::separation::{build_radial_operator, check_boundary_identity, IdentityReport};
use crate::solver::{self, Classification};
use crate::thresholds::ThresholdBundle;
use crate::{Error, Result};

/// The five capabilities exposed to scripts and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Check,
    Thresholds,
    Scan,
    Counterexample,
    Identity,
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Subcommand::Check => "check",
            Subcommand::Thresholds => "thresholds",
            Subcommand::Scan => "scan",
            Subcommand::Counterexample => "counterexample",
            Subcommand::Identity => "identity",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "check" => Ok(Subcommand::Check),
            "thresholds" => Ok(Subcommand::Thresholds),
            "scan" => Ok(Subcommand::Scan),
            "counterexample" => Ok(Subcommand::Counterexample),
            "identity" => Ok(Subcommand::Identity),
            other => Err(Error::Config(format!("unknown subcommand '{other}'"))),
        }
    }
}

/// What a subcommand produced: the process exit code and the verdict line.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub verdict: String,
}

/// Runs one subcommand, writing its reports into out_dir.
pub fn run(config: &Config, subcommand: Subcommand, out_dir: &Path) -> Result<RunOutcome> {
    fs::create_dir_all(out_dir)?;
    let outcome = match subcommand {
        Subcommand::Check => run_check(config, out_dir)?,
        Subcommand::Thresholds => run_thresholds(config, out_dir)?,
        Subcommand::Scan => run_scan(config, out_dir)?,
        Subcommand::Counterexample => run_counterexample(config, out_dir)?,
        Subcommand::Identity => run_identity(config, out_dir)?,
    };
    fs::write(out_dir.join("verdict.txt"), format!("{}\n", outcome.verdict))?;
    Ok(outcome)
}

fn run_check(config: &Config, out_dir: &Path) -> Result<RunOutcome> {
    let end = config.end_geometry()?;
    let reference = config.reference_profile()?;
    let constants = config.hypothesis_constants()?;
    let window = config.check_window()?;
    let report = conditions::check_all(&CheckInputs {
        end: &end,
        reference: &reference,
        constants: &constants,
        window,
        decay_exponent_min: config.tolerances.decay_exponent_min,
        agmon_mode: None,
    })?;
    fs::write(out_dir.join("conditions.csv"), report.to_csv())?;
    let mut fitted = String::from("a,b,a0,b0,b1,k3,gamma\n");
    if let Some(c) = report.fitted {
        fitted.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.a, c.b, c.a0, c.b0, c.b1, c.k3, c.gamma
        ));
    }
    fs::write(out_dir.join("fitted.csv"), fitted)?;
    let outcome = if report.all_pass() {
        RunOutcome {
            exit_code: 0,
            verdict: format!(
                "PASS: all {} conditions hold on [{}, {}]",
                report.entries.len(),
                window.lo,
                window.hi
            ),
        }
    } else {
        let failing: Vec<&str> = report
            .entries
            .iter()
            .filter(|e| !e.pass)
            .map(|e| e.name.as_str())
            .collect();
        RunOutcome {
            exit_code: 1,
            verdict: format!("FAIL: conditions violated: {}", failing.join(", ")),
        }
    };
    Ok(outcome)
}

fn run_thresholds(config: &Config, out_dir: &Path) -> Result<RunOutcome> {
    let constants = config.hypothesis_constants()?;
    let bundle = ThresholdBundle::from_constants(&constants)?;
    let eta = bundle.eta1(config.constants.lambda)?;
    let beta = bundle.beta.map(|b| b.to_string()).unwrap_or_default();
    let csv = format!(
        "lambda1,y1,beta,star8,eta1\n{},{},{},{},{}\n",
        bundle.lambda1, bundle.y1, beta, bundle.star8_rhs, eta
    );
    fs::write(out_dir.join("thresholds.csv"), csv)?;
    Ok(RunOutcome {
        exit_code: 0,
        verdict: format!(
            "PASS: lambda1 = {}, eta1({}) = {}",
            bundle.lambda1, config.constants.lambda, eta
        ),
    })
}

fn run_scan(config: &Config, out_dir: &Path) -> Result<RunOutcome> {
    let end = config.end_geometry()?;
    let sopts = config.solver_options()?;
    let copts = config.classify_options();
    let grid = solver::lambda_grid(
        config.scan.lambda_lo,
        config.scan.lambda_hi,
        config.scan.lambda_step,
    )?;
    let x_max = if config.scan.x_max > 0.0 {
        config.scan.x_max
    } else {
        solver::default_truncation(end.r0, config.scan.lambda_lo)?
    };
    let modes: Vec<usize> = (0..config.scan.modes).collect();
    let rows = solver::scan_modes(&end, &modes, x_max, &grid, &copts, &sopts)?;

    let mut csv =
        String::from("mode,lambda,classification,tail_mass_ratio,envelope_exponent,fit_r2\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.mode_index,
            row.lambda_trial,
            row.classification,
            row.tail_mass_ratio,
            row.envelope_exponent,
            row.fit_r2
        ));
    }
    fs::write(out_dir.join("scan.csv"), csv)?;

    // One column of the reduced potential per scanned mode, on a fixed 512-interval grid.
    let operators = modes
        .iter()
        .map(|&i| build_radial_operator(&end, i, x_max))
        .collect::<Result<Vec<_>>>()?;
    let mut potential = String::from("x");
    for &i in &modes {
        potential.push_str(&format!(",q{i}"));
    }
    potential.push('\n');
    for j in 0..=512usize {
        let x = end.r0 + (x_max - end.r0) * j as f64 / 512.0;
        potential.push_str(&format!("{x}"));
        for op in &operators {
            potential.push_str(&format!(",{}", op.q(x)));
        }
        potential.push('\n');
    }
    fs::write(out_dir.join("potential.csv"), potential)?;

    let candidates = rows
        .iter()
        .filter(|r| r.classification == Classification::L2Candidate)
        .count();
    let inconclusive = rows
        .iter()
        .filter(|r| r.classification == Classification::Inconclusive)
        .count();
    Ok(RunOutcome {
        exit_code: 0,
        verdict: format!(
            "OK: {} rows, {} candidates, {} inconclusive",
            rows.len(),
            candidates,
            inconclusive
        ),
    })
}

fn run_counterexample(config: &Config, out_dir: &Path) -> Result<RunOutcome> {
    let opts = config.pipeline_options()?;
    let report = counterexample::run(
        config.counterexample.alpha,
        config.counterexample.k,
        config.end.n,
        &opts,
    )?;
    fs::write(out_dir.join("report.csv"), report.to_csv())?;
    Ok(RunOutcome {
        exit_code: if report.pass { 0 } else { 1 },
        verdict: report.verdict(),
    })
}

fn run_identity(config: &Config, out_dir: &Path) -> Result<RunOutcome> {
    let end = config.end_geometry()?;
    let v = config.identity_test_function()?;
    let id = &config.identity;
    let mut reports: Vec<(String, IdentityReport)> = vec![(
        "configured".into(),
        check_boundary_identity(&end, id.beta, &v, id.s, id.t)?,
    )];
    // Reproducible extra draws: beta in [-2, 3], [s, t] inside [1.5, 8] with gap >= 1/2.
    let mut rng = ChaCha8Rng::seed_from_u64(id.seed);
    for draw in 0..id.draws {
        let beta = -2.0 + 5.0 * rng.gen::<f64>();
        let s = 1.5 + 5.0 * rng.gen::<f64>();
        let t = s + 0.5 + (8.0 - s - 0.5) * rng.gen::<f64>();
        reports.push((
            format!("draw_{draw}"),
            check_boundary_identity(&end, beta, &v, s, t)?,
        ));
    }
    let mut csv = String::from("check,beta,s,t,lhs,rhs,residual\n");
    for (name, r) in &reports {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            name, r.beta, r.s, r.t, r.lhs, r.rhs, r.residual
        ));
    }
    fs::write(out_dir.join("identity.csv"), csv)?;
    let worst = reports.iter().map(|(_, r)| r.residual).fold(0.0f64, f64::max);
    let tol = config.tolerances.identity_residual;
    let outcome = if worst <= tol {
        RunOutcome {
            exit_code: 0,
            verdict: format!("PASS: max residual = {} over {} checks", worst, reports.len()),
        }
    } else {
        RunOutcome {
            exit_code: 1,
            verdict: format!("FAIL: max residual = {worst} exceeds {tol}"),
        }
    };
    Ok(outcome)
}
