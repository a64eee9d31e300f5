//! Acceptance gate: each test pins one advertised behaviour of the crate with
//! an explicit tolerance and prints a single `ACCEPT <name>: PASS` line on
//! success (visible with `--nocapture`).

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use warpspec::conditions::{
    check_a_bounds, check_hessian_band, check_k3, check_ricci, gap_margin, HypothesisConstants,
    Window,
};
use warpspec::counterexample::{run, PipelineOptions};
use warpspec::geometry::{EndGeometry, WarpingProfile};
use warpspec::separation::{
    check_boundary_identity, sphere_eigenvalues, RadialOperator, TestFunction,
};
use warpspec::solver::{
    classify, default_truncation, dirichlet_interval_eigenvalues, estimate_decay, integrate,
    lambda_grid, refine_candidate, scan_modes, Classification, ClassifyOptions, DecayModel,
    SolverOptions,
};
use warpspec::thresholds::{beta, eta1, lambda1};

const EIGENVALUE_ABS_TOL: f64 = 1e-6;
const TAIL_MASS_MIN: f64 = 0.15;
const RESONANCE_LOCATION_TOL: f64 = 0.02;
const ENVELOPE_EXPONENT_REL: f64 = 0.15;
const CONTRAST_MIN: f64 = 20.0;
const PIPELINE_LOCATION_TOL: f64 = 0.05;
const PIPELINE_EXPONENT_ABS_TOL: f64 = 0.1;
const PIPELINE_BUDGET_SECS: f64 = 300.0;
const LAMBDA1_FLOOR: f64 = 1e-10;
const ETA1_CONTINUITY_REL: f64 = 1e-4;
const IDENTITY_RESIDUAL_MAX: f64 = 1e-8;
const EXPONENTIAL_RATE_REL: f64 = 0.01;
const POWER_RATE_REL: f64 = 0.05;

#[test]
fn free_operator_eigenvalues() {
    let op = RadialOperator::from_potential(|_| 0.0, 0.0, PI).unwrap();
    let eigenvalues = dirichlet_interval_eigenvalues(&op, 4).unwrap();
    for (k, lambda) in eigenvalues.iter().enumerate() {
        let exact = ((k + 1) * (k + 1)) as f64;
        assert!(
            (lambda - exact).abs() <= EIGENVALUE_ABS_TOL,
            "eigenvalue {k}: {lambda} vs {exact}"
        );
    }
    println!("ACCEPT free_operator_eigenvalues: PASS");
}

#[test]
fn euclidean_scan_finds_no_candidates() {
    let end = EndGeometry::new(
        3,
        1.0,
        WarpingProfile::power_law(1.0).unwrap(),
        sphere_eigenvalues(3, 3).unwrap(),
    )
    .unwrap();
    let grid = lambda_grid(0.1, 4.0, 0.05).unwrap();
    let x_max = default_truncation(end.r0, 0.1).unwrap();
    let scan = scan_modes(
        &end,
        &[0, 1, 2, 3],
        x_max,
        &grid,
        &ClassifyOptions::default(),
        &SolverOptions::default(),
    )
    .unwrap();
    assert_eq!(scan.len(), 4 * grid.len());
    for row in &scan {
        assert_eq!(
            row.classification,
            Classification::Oscillatory,
            "mode {} lambda {}",
            row.mode_index,
            row.lambda_trial
        );
        assert!(
            row.tail_mass_ratio >= TAIL_MASS_MIN,
            "mode {} lambda {}: tail mass {}",
            row.mode_index,
            row.lambda_trial,
            row.tail_mass_ratio
        );
    }
    println!("ACCEPT euclidean_scan_finds_no_candidates: PASS");
}

#[test]
fn resonant_potential_bound_state() {
    let resonance_at = |x_max: f64| {
        let op = RadialOperator::from_potential(|x| -8.0 * (2.0 * x).sin() / x, 1.0, x_max).unwrap();
        let refinement = refine_candidate(&op, 0.8, 1.2).unwrap();
        let at_peak = classify(&op, refinement.lambda_star).unwrap();
        (refinement, at_peak)
    };

    let (refinement, at_peak) = resonance_at(640.0);
    assert!(
        (refinement.lambda_star - 1.0).abs() <= RESONANCE_LOCATION_TOL,
        "lambda* = {}",
        refinement.lambda_star
    );
    assert!(refinement.contrast >= CONTRAST_MIN, "contrast = {}", refinement.contrast);
    assert!(
        (at_peak.envelope_exponent - 2.0).abs() <= 2.0 * ENVELOPE_EXPONENT_REL,
        "envelope exponent = {}",
        at_peak.envelope_exponent
    );

    // Doubling the truncation must reproduce the same resonance.
    let (doubled, at_peak_doubled) = resonance_at(1280.0);
    assert!(
        (doubled.lambda_star - 1.0).abs() <= RESONANCE_LOCATION_TOL,
        "lambda* at doubled domain = {}",
        doubled.lambda_star
    );
    assert!(doubled.contrast >= CONTRAST_MIN);
    assert!((at_peak_doubled.envelope_exponent - 2.0).abs() <= 2.0 * ENVELOPE_EXPONENT_REL);
    assert!(
        (doubled.lambda_star - refinement.lambda_star).abs() <= 0.01,
        "resonance moved from {} to {}",
        refinement.lambda_star,
        doubled.lambda_star
    );
    println!("ACCEPT resonant_potential_bound_state: PASS");
}

#[test]
fn oscillatory_end_pipeline() {
    let started = Instant::now();
    let report = run(0.75, 6.0, 2, &PipelineOptions::default()).unwrap();
    let elapsed = started.elapsed().as_secs_f64();

    assert!(report.detectable);
    assert_eq!(report.clusters.len(), 1, "clusters: {:?}", report.clusters);
    let cluster = &report.clusters[0];
    assert!(
        (cluster.lambda - 1.0).abs() <= PIPELINE_LOCATION_TOL,
        "cluster at lambda = {}",
        cluster.lambda
    );
    assert!(
        (report.gradient_decay.exponent - 0.75).abs() <= PIPELINE_EXPONENT_ABS_TOL,
        "rate decay exponent = {}",
        report.gradient_decay.exponent
    );
    let (band_lo, band_hi) = report.curvature_scale_band;
    assert!((band_lo - 9.6).abs() < 1e-12 && (band_hi - 14.4).abs() < 1e-12);
    assert!(
        report.curvature_scale_sup >= band_lo && report.curvature_scale_sup <= band_hi,
        "sup r|K| = {}",
        report.curvature_scale_sup
    );
    let lambda1_fitted = report.lambda1_fitted.expect("constants must fit");
    assert!(
        lambda1_fitted > 1.0,
        "fitted lambda1 = {lambda1_fitted} fails to clear the candidate"
    );
    assert!(report.exclusion_clear);
    assert!(report.pass, "verdict: {}", report.verdict());
    assert!(
        elapsed <= PIPELINE_BUDGET_SECS,
        "pipeline took {elapsed:.1} s"
    );
    println!("ACCEPT oscillatory_end_pipeline: PASS");
}

#[test]
fn threshold_limits() {
    // lambda1 falls strictly to zero as the perturbation constants shrink.
    let mut previous = f64::INFINITY;
    let mut last = f64::INFINITY;
    for m in 0..=20 {
        let s = 0.1 / f64::powi(2.0, m);
        let l1 = lambda1(1.0, 0.1, 0.1, 1.0, s, s, s, 3).unwrap();
        assert!(l1 < previous, "lambda1 not strictly decreasing at m = {m}");
        previous = l1;
        last = l1;
    }
    assert!(last < LAMBDA1_FLOOR, "lambda1 tail = {last}");

    // beta vanishes identically with b1.
    assert_eq!(beta(1.0, 0.1, 0.1, 0.0, 2).unwrap(), 0.0);

    // eta1 is continuous through the branch point c0 = 0 (c0 = 2.6 - A0 here);
    // the branch mismatch scales like c7·|c0|·lambda/c6², so the tolerance
    // pins lambda·|c0| at moderate energies.
    for lambda in [1e-3, 0.1, 1.0, 5.0] {
        let left = eta1(lambda, 0.1, 0.1, 2.6 + 1e-6, 1.0, 0.1, 3).unwrap();
        let right = eta1(lambda, 0.1, 0.1, 2.6 - 1e-6, 1.0, 0.1, 3).unwrap();
        let rel = (left - right).abs() / right.abs();
        assert!(rel <= ETA1_CONTINUITY_REL, "lambda {lambda}: jump {rel}");
    }
    println!("ACCEPT threshold_limits: PASS");
}

#[test]
fn beta_exact_rational_value() {
    // 1/4 · (b1_hat / (2(θ-a) - a_hat - b_hat))² = (0.05/1.6)² = 2^-10, all dyadic.
    let value = beta(1.0, 0.1, 0.1, 0.1, 2).unwrap();
    assert_eq!(value, 0.0009765625);
    println!("ACCEPT beta_exact_rational_value: PASS");
}

#[test]
fn boundary_identity_residuals() {
    // Closed form: h = r, n = 2, β = 0, v = 1/r gives both sides = 1/t - 1/s.
    let end = EndGeometry::new(
        2,
        0.5,
        WarpingProfile::power_law(1.0).unwrap(),
        vec![0.0, 1.0],
    )
    .unwrap();
    let report =
        check_boundary_identity(&end, 0.0, &TestFunction::reciprocal(), 1.0, 2.0).unwrap();
    assert!((report.lhs + 0.5).abs() <= 1e-12, "lhs = {}", report.lhs);
    assert!((report.rhs + 0.5).abs() <= 1e-12, "rhs = {}", report.rhs);
    assert!(report.residual <= IDENTITY_RESIDUAL_MAX);

    // 100 randomized (profile, β, v, window) draws.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for draw in 0..100 {
        let profile = match draw % 3 {
            0 => WarpingProfile::power_law(0.3 + 2.0 * rng.gen::<f64>()).unwrap(),
            1 => {
                let alpha = 0.55 + 0.4 * rng.gen::<f64>();
                let k = (1.5 + 4.5 * rng.gen::<f64>()) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
                WarpingProfile::oscillatory_exp(alpha, k).unwrap()
            }
            _ => {
                let theta = 0.5 + 1.5 * rng.gen::<f64>();
                let table: Vec<(f64, f64)> = (0..=800)
                    .map(|i| {
                        let r = 0.5 + i as f64 * 0.025;
                        (r, r.powf(theta))
                    })
                    .collect();
                WarpingProfile::sampled(&table).unwrap()
            }
        };
        let n = 2 + (rng.gen::<u32>() % 2) as usize;
        let r0 = profile.r_min().max(0.5);
        let end = EndGeometry::new(n, r0, profile, vec![0.0, 1.0]).unwrap();
        let beta_draw = -2.0 + 4.0 * rng.gen::<f64>();
        let s = r0 + 0.5 + 2.0 * rng.gen::<f64>();
        let t = s + 0.5 + 6.0 * rng.gen::<f64>();
        let coeffs: Vec<f64> = (0..=(rng.gen::<u32>() % 3) as usize)
            .map(|_| 0.3 + 1.2 * rng.gen::<f64>())
            .collect();
        let power = -1.5 + 2.0 * rng.gen::<f64>();
        let rate = -0.3 + 0.4 * rng.gen::<f64>();
        let v = TestFunction::new(&coeffs, power, rate).unwrap();

        // Rescale v so the boundary terms stay O(1); the identity is quadratic
        // in v, so this cannot mask a defect.
        let boundary_size = |r: f64| {
            let sample = end.profile.eval(r).unwrap();
            let (vv, _) = v.eval(r);
            (r.powf(beta_draw) * sample.h.powf(n as f64 - 1.0) * vv * vv).abs()
        };
        let magnitude = boundary_size(s).max(boundary_size(t)).max(1e-30);
        let scaled: Vec<f64> = coeffs.iter().map(|c| c / magnitude.sqrt()).collect();
        let v = TestFunction::new(&scaled, power, rate).unwrap();

        let report = check_boundary_identity(&end, beta_draw, &v, s, t).unwrap();
        assert!(
            report.residual <= IDENTITY_RESIDUAL_MAX,
            "draw {draw}: residual {} on [{s}, {t}] with beta {beta_draw}",
            report.residual
        );
    }
    println!("ACCEPT boundary_identity_residuals: PASS");
}

#[test]
fn radial_identity_residuals() {
    let table: Vec<(f64, f64)> = (0..=840)
        .map(|i| {
            let r = 1.0 + i as f64 * 0.25;
            (r, r * r)
        })
        .collect();
    let profiles = [
        WarpingProfile::power_law(0.5).unwrap(),
        WarpingProfile::power_law(1.0).unwrap(),
        WarpingProfile::power_law(3.0).unwrap(),
        WarpingProfile::oscillatory_exp(0.75, 6.0).unwrap(),
        WarpingProfile::oscillatory_exp(0.6, -3.0).unwrap(),
        WarpingProfile::sampled(&table).unwrap(),
    ];
    for (i, profile) in profiles.into_iter().enumerate() {
        let end = EndGeometry::new(3, 2.0, profile, vec![0.0, 2.0]).unwrap();
        for j in 0..=1980 {
            let r = 2.0 + j as f64 * 0.1;
            let residual = end.radial_identity_residual(r).unwrap();
            assert!(
                residual <= IDENTITY_RESIDUAL_MAX,
                "profile {i} at r = {r}: residual {residual}"
            );
        }
    }
    println!("ACCEPT radial_identity_residuals: PASS");
}

#[test]
fn phase_and_margin_monotonicity() {
    // Terminal Prüfer phase grows with lambda on a fixed operator.
    let op = RadialOperator::from_potential(|x| -8.0 * (2.0 * x).sin() / x, 1.0, 640.0).unwrap();
    let opts = SolverOptions::default();
    let mut previous = f64::NEG_INFINITY;
    for i in 0..=15 {
        let lambda = 0.25 + 0.25 * i as f64;
        let phase = integrate(&op, lambda, &opts).unwrap().terminal_phase();
        assert!(phase > previous, "phase fell at lambda = {lambda}");
        previous = phase;
    }

    // Loosening any single constant never lowers its checker's margin.
    let end = EndGeometry::new(
        2,
        1.0,
        WarpingProfile::oscillatory_exp(0.7, 2.0).unwrap(),
        vec![0.0, 1.0],
    )
    .unwrap();
    let reference = WarpingProfile::power_law(1.0).unwrap();
    let window = Window::new(2.0, 80.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let a = 0.05 + 2.0 * rng.gen::<f64>();
        let b = 0.05 + 2.0 * rng.gen::<f64>();
        let a0 = 0.05 + 1.5 * rng.gen::<f64>();
        let b0 = 0.05 + 1.5 * rng.gen::<f64>();
        let b1 = 0.05 + 4.0 * rng.gen::<f64>();
        let k3 = 0.05 + 4.0 * rng.gen::<f64>();
        let ease = 1.0 + rng.gen::<f64>();

        let band = check_hessian_band(&end, &reference, a, b, window).unwrap();
        let eased = check_hessian_band(&end, &reference, a * ease, b * ease, window).unwrap();
        assert!(eased[0].worst_margin >= band[0].worst_margin);
        assert!(eased[1].worst_margin >= band[1].worst_margin);

        let bounds = check_a_bounds(&end, a0, b0, window).unwrap();
        let eased = check_a_bounds(&end, a0 / ease, b0 * ease, window).unwrap();
        assert!(eased[0].worst_margin >= bounds[0].worst_margin);
        assert!(eased[1].worst_margin >= bounds[1].worst_margin);

        let derivative = check_k3(&end, k3, window).unwrap();
        let eased = check_k3(&end, k3 * ease, window).unwrap();
        assert!(eased.worst_margin >= derivative.worst_margin);

        let ricci = check_ricci(&end, b1, window).unwrap();
        let eased = check_ricci(&end, b1 * ease, window).unwrap();
        assert!(eased.worst_margin >= ricci.worst_margin);

        let tight = HypothesisConstants::new(2, a, b, a0, b0, b1, k3, 1.0).unwrap();
        let loose = HypothesisConstants::new(2, a / ease, b / ease, a0 * ease, b0, b1, k3, 1.0)
            .unwrap();
        assert!(gap_margin(&loose) >= gap_margin(&tight));
    }
    println!("ACCEPT phase_and_margin_monotonicity: PASS");
}

#[test]
fn decay_rate_recovery() {
    let xs: Vec<f64> = (0..=1900).map(|i| 1.0 + i as f64 * 0.01).collect();
    let exponential: Vec<f64> = xs.iter().map(|&x| (-0.7 * x).exp()).collect();
    let est = estimate_decay(&xs, &exponential, DecayModel::Exponential).unwrap();
    assert!(
        (est.rate - 0.7).abs() <= 0.7 * EXPONENTIAL_RATE_REL,
        "exponential rate = {}",
        est.rate
    );

    let xs: Vec<f64> = (0..=19900).map(|i| 1.0 + i as f64 * 0.01).collect();
    let power: Vec<f64> = xs.iter().map(|&x| x.powi(-2) * x.sin()).collect();
    let est = estimate_decay(&xs, &power, DecayModel::Power).unwrap();
    assert!(
        (est.rate - 2.0).abs() <= 2.0 * POWER_RATE_REL,
        "power rate = {}",
        est.rate
    );
    println!("ACCEPT decay_rate_recovery: PASS");
}
