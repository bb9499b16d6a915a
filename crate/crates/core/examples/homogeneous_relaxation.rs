//! Relaxation of a spatially homogeneous polarization against the closed
//! form `r(t)`, and the observed time-convergence order of the theta scheme.
//!
//! Usage: `cargo run --release --example homogeneous_relaxation`

use lc_emulsion::verify::{convergence_order, HomogeneousProblem};
use lc_emulsion::Result;

fn main() -> Result<()> {
    let problem = HomogeneousProblem::benchmark(0.5);
    let traj = problem.simulate(1e-2)?;
    println!("{:>6} {:>12} {:>12}", "t", "simulated", "exact");
    for &(t, r) in &traj {
        println!("{t:6.3} {r:12.8} {:12.8}", problem.exact(t));
    }
    println!("Lp envelope excess {:.3e}", problem.envelope_excess(1e-3)?);

    let dts = [4e-3, 2e-3, 1e-3, 5e-4];
    for theta in [0.5, 1.0] {
        let r = convergence_order(&HomogeneousProblem::benchmark(theta), &dts)?;
        println!("theta {theta}: slope {:.4} ({})", r.measured, r.details);
    }
    Ok(())
}
