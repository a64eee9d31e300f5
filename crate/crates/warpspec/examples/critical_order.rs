//! Runs the full search pipeline on the borderline profile
//! A(r) = r^{-3/4} + k sin(2r)/r, where curvature decays at the critical
//! order 1/r and a strong enough oscillation traps a bound state at λ = 1.

use warpspec::counterexample::{run, PipelineOptions};

fn main() -> anyhow::Result<()> {
    // A narrow λ window around the resonance keeps this demonstration quick;
    // widening it to (0, 4] reproduces the same unique cluster.
    let opts = PipelineOptions {
        lambda_lo: 0.6,
        lambda_hi: 1.6,
        lambda_step: 0.1,
        ..Default::default()
    };

    let report = run(0.75, 6.0, 2, &opts)?;

    println!("profile: A = r^{{-3/4}} + 6 sin(2r)/r, n = 2");
    println!(
        "  oscillation amplitude (n-1)|k|/4 = {:.2} (detectable: {})",
        (report.n as f64 - 1.0) * report.k.abs() / 4.0,
        report.detectable
    );
    println!(
        "  rate decay exponent = {:.4} over [{:.0}, {:.0}] (pass: {})",
        report.gradient_decay.exponent,
        report.gradient_decay.fit_lo,
        report.gradient_decay.fit_hi,
        report.gradient_decay.pass
    );
    println!(
        "  sup r|K| = {:.2}, expected band [{:.2}, {:.2}] (pass: {})",
        report.curvature_scale_sup,
        report.curvature_scale_band.0,
        report.curvature_scale_band.1,
        report.curvature_scale_pass
    );
    println!(
        "  scanned modes {:?} out to x = {:.1}",
        report.scanned_modes, report.x_max
    );

    for cluster in &report.clusters {
        println!("\n  candidate cluster at lambda = {:.4}:", cluster.lambda);
        for c in &cluster.members {
            println!(
                "    mode {}: lambda* = {:.5}, contrast = {:.1}, envelope = {:.3}",
                c.mode_index, c.lambda_star, c.contrast, c.envelope_exponent
            );
        }
    }

    if let (Some(l1), Some((lo, hi))) = (report.lambda1_fitted, report.fit_window) {
        println!(
            "\n  fitted threshold lambda1 = {:.2} from [{:.0}, {:.0}]: candidates below it: {}",
            l1, lo, hi, report.exclusion_clear
        );
    }

    println!("\n{}", report.verdict());
    Ok(())
}
