//! Relaxation of a polymer drop in a polarized liquid-crystal matrix on a
//! 128 x 128 grid, run until the relative energy change per step drops
//! below the configured tolerance.
//!
//! Usage: `cargo run --release --example drop_benchmark [out_dir] [max_steps]`

use lc_emulsion::io::{RunConfig, RunOutput};
use lc_emulsion::{run_to_equilibrium, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let out_dir = args.next().unwrap_or_else(|| "out/drop_benchmark".into());
    let mut cfg = RunConfig::drop_benchmark();
    if let Some(n) = args.next() {
        cfg.numerics.max_steps = n.parse().expect("max_steps must be an integer");
    }
    let initial = cfg.initial_state()?;
    let mut out = RunOutput::create(&out_dir, cfg.snapshot_every())?;
    out.progress_every = 100;
    let start = std::time::Instant::now();
    let summary = run_to_equilibrium(initial, &cfg.physics, &cfg.numerics, &mut out)?;
    out.finish(&summary.final_state)?;

    let s = &summary.final_state;
    let outer = s
        .phi
        .values()
        .iter()
        .zip(s.d.magnitude().values())
        .filter(|(phi, _)| **phi > 0.9)
        .map(|(_, m)| *m)
        .fold(0.0, f64::max);
    println!(
        "steps            {} ({})",
        summary.steps, summary.stop_reason
    );
    println!(
        "energy           {:.10e} -> {:.10e}",
        summary.initial_energy, summary.final_energy
    );
    println!(
        "max energy rise  {:.3e}",
        summary.max_relative_energy_increase
    );
    println!("max mass drift   {:.3e}", summary.max_mass_drift);
    println!("max |d| (run)    {:.6}", summary.max_abs_d);
    println!("max |d| (phi>.9) {:.6}", outer);
    println!(
        "aspect ratio     {:.6}",
        lc_emulsion::analysis::aspect_ratio(&s.phi, 0.5)
    );
    println!("newton iters     {}", summary.total_newton_iters);
    println!("wall time        {:.1} s", start.elapsed().as_secs_f64());
    println!("output           {out_dir}");
    Ok(())
}
