//! Two uses of the shooting solver: interval eigenvalues by phase counting,
//! and a (mode, λ) grid scan over a warped end with per-cell classification.

use std::f64::consts::PI;

use warpspec::geometry::{EndGeometry, WarpingProfile};
use warpspec::separation::{sphere_eigenvalues, RadialOperator};
use warpspec::solver::{
    default_truncation, dirichlet_interval_eigenvalues, lambda_grid, scan_modes, Classification,
    ClassifyOptions, SolverOptions,
};

fn main() -> anyhow::Result<()> {
    // Dirichlet eigenvalues of -w'' = λw on [0, π] are (k+1)^2.
    let free = RadialOperator::from_potential(|_| 0.0, 0.0, PI)?;
    println!("free operator on [0, pi]:");
    println!("{:>4} {:>16} {:>12}", "k", "computed", "exact");
    for (k, lambda) in dirichlet_interval_eigenvalues(&free, 4)?.iter().enumerate() {
        let exact = ((k + 1) * (k + 1)) as f64;
        println!("{k:>4} {lambda:>16.10} {exact:>12.1}");
    }
    println!();

    // Scan a Euclidean end: every cell should come back oscillatory.
    let end = EndGeometry::new(3, 1.0, WarpingProfile::power_law(1.0)?, sphere_eigenvalues(3, 8)?)?;
    let grid = lambda_grid(0.1, 4.0, 0.1)?;
    let modes = [0, 1, 2, 3];
    // Classification needs 50 oscillation periods at the slowest lambda.
    let x_max = default_truncation(end.r0, 0.1)?;
    let scan = scan_modes(
        &end,
        &modes,
        x_max,
        &grid,
        &ClassifyOptions::default(),
        &SolverOptions::default(),
    )?;

    let mut counts = [0usize; 3];
    let mut min_tail = f64::INFINITY;
    for row in &scan {
        counts[match row.classification {
            Classification::L2Candidate => 0,
            Classification::Oscillatory => 1,
            Classification::Inconclusive => 2,
        }] += 1;
        min_tail = min_tail.min(row.tail_mass_ratio);
    }
    println!(
        "h = r, n = 3, modes 0..=3, {} cells on lambda in [0.1, 4]:",
        scan.len()
    );
    println!(
        "  candidates = {}, oscillatory = {}, inconclusive = {}",
        counts[0], counts[1], counts[2]
    );
    println!("  smallest tail mass ratio = {min_tail:.4} (uniform spread stays near 0.25)");

    Ok(())
}
