//! Checks a warped end against a constants bundle: band widths around a
//! reference rate, upper/lower rate bounds, the gap inequality, curvature
//! bounds, and the short/long-range split of the radial potential.

use warpspec::conditions::{check_all, fit_constants, CheckInputs, HypothesisConstants, Window};
use warpspec::geometry::{EndGeometry, WarpingProfile};
use warpspec::separation::sphere_eigenvalues;

fn main() -> anyhow::Result<()> {
    // Euclidean end, checked against its own rate: every band has width zero.
    let end = EndGeometry::new(3, 1.0, WarpingProfile::power_law(1.0)?, sphere_eigenvalues(3, 8)?)?;
    let reference = WarpingProfile::power_law(1.0)?;
    let constants = HypothesisConstants::new(3, 0.1, 0.1, 1.0, 1.0, 0.1, 1.0, 1.0)?;
    let window = Window::new(2.0, 200.0)?;

    let report = check_all(&CheckInputs {
        end: &end,
        reference: &reference,
        constants: &constants,
        window,
        decay_exponent_min: 0.1,
        agmon_mode: Some(1),
    })?;

    println!("h = r on [{}, {}]", window.lo, window.hi);
    println!("{:>24} {:>6} {:>12} {:>10}", "check", "pass", "margin", "argmin r");
    for e in &report.entries {
        println!(
            "{:>24} {:>6} {:>12.4e} {:>10.2}",
            e.name, e.pass, e.worst_margin, e.argmin_r
        );
    }
    println!("all pass: {}\n", report.all_pass());

    // The fitted constants are the tightest ones the window supports.
    if let Some(f) = &report.fitted {
        println!(
            "fitted: a = {:.3e}, b = {:.3e}, A0 = {:.3}, B0 = {:.3}, b1 = {:.3e}, K3 = {:.3e}",
            f.a, f.b, f.a0, f.b0, f.b1, f.k3
        );
    }

    // An oscillatory end needs wide bands; fit them from the geometry itself.
    let profile = WarpingProfile::oscillatory_exp(0.75, 2.0)?;
    let end = EndGeometry::new(2, 1.0, profile.clone(), sphere_eigenvalues(2, 8)?)?;
    let window = Window::new(16.0, 200.0)?;
    let fitted = fit_constants(&end, window, &profile)?;
    println!(
        "\noscillatory end, self-referenced fit on [{}, {}]:",
        window.lo, window.hi
    );
    println!(
        "  a = {:.3e}, b = {:.3e}, A0 = {:.4}, B0 = {:.3}, b1 = {:.3}, K3 = {:.3}",
        fitted.a, fitted.b, fitted.a0, fitted.b0, fitted.b1, fitted.k3
    );
    let report = check_all(&CheckInputs {
        end: &end,
        reference: &profile,
        constants: &fitted,
        window,
        decay_exponent_min: 0.1,
        agmon_mode: None,
    })?;
    println!("  all checks pass: {}", report.all_pass());
    // The curvature band must fail here: K oscillates at the scale 2|k|/r,
    // far outside a(1-a)/r² for any small a. That violation is exactly what
    // leaves room for an embedded eigenvalue on this end.
    for e in report.entries.iter().filter(|e| !e.pass) {
        println!(
            "  violated: {} (margin {:.3} at r = {:.1})",
            e.name, e.worst_margin, e.argmin_r
        );
    }

    Ok(())
}
