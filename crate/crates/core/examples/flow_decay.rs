//! Properties of the momentum step: a single shear mode decays by the
//! implicit viscous factor, projected fields are solenoidal and the mean
//! velocity is carried over.
//!
//! Usage: `cargo run --release --example flow_decay`

use std::f64::consts::PI;

use lc_emulsion::flow::{FlowSolver, FlowState};
use lc_emulsion::grid::{divergence, Grid2D, ScalarField, VectorField2};
use lc_emulsion::{NumParams, PhysParams, Result};

fn main() -> Result<()> {
    let g = Grid2D::unit_square(64)?;
    let p = PhysParams::drop_benchmark();
    let np = NumParams {
        dt: 1e-3,
        ..NumParams::default()
    };
    let solver = FlowSolver::new(g);
    let phi = ScalarField::zeros(g);
    let zero = VectorField2::zeros(g);

    // Shear mode u = (sin 2 pi k y, 0) against the discrete Laplacian symbol.
    for k in [1.0, 3.0, 8.0] {
        let u0 = VectorField2::from_fn(g, |_, y| ((2.0 * PI * k * y).sin(), 0.0));
        let lam = 4.0 / (g.hy() * g.hy()) * (PI * k * g.hy()).sin().powi(2);
        let factor = 1.0 / (1.0 + p.nu_star * lam * np.dt);
        let mut flow = FlowState::new(u0.clone());
        let mut worst: f64 = 0.0;
        for step in 1..=20 {
            flow = solver.momentum_step(&flow, &phi, &zero, &p, &np)?;
            worst = worst.max((&flow.u - &u0.scale(factor.powi(step))).max_magnitude());
        }
        println!("mode k = {k}: factor {factor:.10}, worst deviation over 20 steps {worst:.2e}");
    }

    // A rough field with a mean, forced by a non-solenoidal body force.
    let u0 = VectorField2::from_fn(g, |x, y| {
        (
            0.3 + (2.0 * PI * x).sin() * y,
            (4.0 * PI * y).cos() - 0.1 + x * x,
        )
    });
    let force = VectorField2::from_fn(g, |x, y| ((2.0 * PI * (x + y)).sin(), x * y));
    let mut flow = FlowState::new(u0);
    let m0 = flow.u.mean();
    let mut max_div: f64 = 0.0;
    for _ in 0..1000 {
        flow = solver.momentum_step(&flow, &phi, &force, &p, &np)?;
        max_div = max_div.max(divergence(&flow.u).max_abs());
    }
    let m1 = flow.u.mean();
    println!("max |div u| over 1000 steps {max_div:.2e}");
    println!("mean drift ({:.2e}, {:.2e})", m1.0 - m0.0, m1.1 - m0.1);
    Ok(())
}
