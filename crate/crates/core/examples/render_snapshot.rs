//! Writes a snapshot of a partially relaxed drop, reads it back and renders
//! every scalar field as a PPM image.
//!
//! Usage: `cargo run --release --example render_snapshot [out_dir]`

use lc_emulsion::io::{
    field_by_name, read_snapshot, render_field_image, write_snapshot, Palette, RunConfig,
};
use lc_emulsion::{Result, Stepper};

fn main() -> Result<()> {
    let dir = std::path::PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "out/render".into()),
    );
    std::fs::create_dir_all(&dir).map_err(|e| lc_emulsion::SimError::io(&dir, e))?;

    let mut cfg = RunConfig::drop_benchmark();
    cfg.grid.nx = 64;
    cfg.grid.ny = 64;
    let mut state = cfg.initial_state()?;
    let mut stepper = Stepper::new(*state.grid(), &cfg.physics, &cfg.numerics)?;
    for _ in 0..300 {
        state = stepper.step(&state, None)?.new_state;
    }
    let path = dir.join("state.bin");
    write_snapshot(&state, &path)?;
    let back = read_snapshot(&path)?;
    assert_eq!(back, state, "snapshot round trip");

    for name in ["phi", "mu", "d_x", "d_y", "d_mag", "h_mag"] {
        let out = dir.join(format!("{name}.ppm"));
        render_field_image(&field_by_name(&back, name)?, &out, Palette::default())?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
