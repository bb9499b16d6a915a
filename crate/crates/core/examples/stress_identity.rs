//! Convergence of the projected stress-identity defect for smooth periodic
//! fields, with and without the `|grad phi|^4` term.
//!
//! Usage: `cargo run --release --example stress_identity`

use lc_emulsion::grid::Grid2D;
use lc_emulsion::verify::{stress_convergence, stress_identity_residual, trig_test_fields};
use lc_emulsion::{PhysParams, Result};

fn main() -> Result<()> {
    for gamma in [0.0, 0.05] {
        let p = PhysParams {
            gamma,
            ..PhysParams::drop_benchmark()
        };
        println!("gamma = {gamma}");
        for n in [32, 64, 128, 256] {
            let (phi, d) = trig_test_fields(Grid2D::unit_square(n)?);
            let r = stress_identity_residual(&phi, &d, &p)?;
            println!(
                "  n = {n:4}: |P(defect)| = {:.4e}  (|defect| = {:.4e})",
                r.measured, r.tolerance
            );
        }
        let order = stress_convergence(&p, &[64, 128, 256])?;
        println!("  observed order {:.3}", order.measured);
    }
    Ok(())
}
