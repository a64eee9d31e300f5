//! Evaluates the spectral thresholds drawn from a constants bundle: the
//! eigenvalue-free ceiling λ₁, the exponent window endpoint y₁, the critical
//! coupling β, and the weight rate η₁(λ) on both sides of its branch point.

use warpspec::conditions::HypothesisConstants;
use warpspec::thresholds::{beta, eta1, lambda1, ThresholdBundle};

fn main() -> anyhow::Result<()> {
    let c = HypothesisConstants::new(3, 0.1, 0.1, 1.0, 1.0, 0.1, 0.1, 1.0)?;
    let bundle = ThresholdBundle::from_constants(&c)?;
    println!("constants: a = b = b1 = K3 = 0.1, A0 = B0 = 1, gamma = 1, n = 3");
    println!("  lambda1 = {:.6e}", bundle.lambda1);
    println!("  y1      = {:.6}", bundle.y1);
    println!("  star8   = {:.6}", bundle.star8_rhs);
    println!();

    // lambda1 shrinks to zero with the perturbation constants (K3, b1, B0).
    println!("{:>4} {:>14} {:>14}", "m", "scale 1/2^m", "lambda1");
    for m in [0, 2, 4, 8, 12, 16, 20] {
        let s = 0.1 / f64::powi(2.0, m);
        let l1 = lambda1(1.0, 0.1, 0.1, 1.0, s, s, s, 3)?;
        println!("{m:>4} {s:>14.6e} {l1:>14.6e}");
    }
    println!();

    // beta vanishes with b1 and grows quadratically in it.
    println!("{:>10} {:>14}", "b1", "beta");
    for b1 in [0.0, 0.05, 0.1, 0.2, 0.4] {
        println!("{b1:>10.2} {:>14.8e}", beta(1.0, 0.1, 0.1, b1, 2)?);
    }
    println!();

    // eta1 is continuous through the sign change of c0 = 2 - A0 + (n+1)a + b_hat,
    // which these two columns straddle (c0 = 0 at A0 = 2.6 here).
    println!("{:>10} {:>16} {:>16}", "lambda", "eta1 (A0 = 1)", "eta1 (A0 = 5)");
    for lambda in [1e-6, 1e-3, 0.1, 1.0, 10.0] {
        let tight = eta1(lambda, 0.1, 0.1, 1.0, 1.0, 0.1, 3)?;
        let wide = eta1(lambda, 0.1, 0.1, 5.0, 1.0, 0.1, 3)?;
        println!("{lambda:>10.0e} {tight:>16.8e} {wide:>16.8e}");
    }

    Ok(())
}
