//! Equilibria with a small `|grad phi|^4` regularisation approach the
//! unregularised one as gamma -> 0.
//!
//! Usage: `cargo run --release --example gamma_limit [n] [dt]`

use lc_emulsion::io::RunConfig;
use lc_emulsion::{run_to_equilibrium, State};

fn main() -> lc_emulsion::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map_or(48, |s| s.parse().expect("grid size"));
    let dt: f64 = args.get(2).map_or(1e-3, |s| s.parse().expect("time step"));

    let mut cfg = RunConfig::drop_benchmark();
    cfg.grid.nx = n;
    cfg.grid.ny = n;
    cfg.numerics.dt = dt;
    cfg.numerics.energy_rate_tol = 1e-10;
    cfg.numerics.max_steps = 20_000;

    let relax = |s: State, gamma: f64| -> lc_emulsion::Result<State> {
        let mut p = cfg.physics.clone();
        p.gamma = gamma;
        let r = run_to_equilibrium(s, &p, &cfg.numerics, &mut ())?;
        println!(
            "gamma {gamma:8.1e}  steps {:6}  ({})  E = {:.10e}",
            r.steps, r.stop_reason, r.final_energy
        );
        Ok(r.final_state)
    };

    let base = relax(cfg.initial_state()?, 0.0)?;
    let mut prev = f64::INFINITY;
    for gamma in [1e-2, 1e-3, 1e-4] {
        let s = relax(base.clone(), gamma)?;
        let dist = s.phi.zip_map(&base.phi, |a, b| a - b).l2_norm();
        println!(
            "  |phi_gamma - phi_0|_2 = {dist:.6e}{}",
            if dist < prev {
                ""
            } else {
                "  (not decreasing)"
            }
        );
        prev = dist;
    }
    Ok(())
}
