//! Compares the variational derivatives `mu` and `h` with finite
//! differences of the discrete energy on seeded random states.
//!
//! Usage: `cargo run --release --example gradient_check [seeds]`

use lc_emulsion::grid::Grid2D;
use lc_emulsion::verify::{gradient_check, random_smooth_state};
use lc_emulsion::{PhysParams, Result};

fn main() -> Result<()> {
    let seeds: u64 = std::env::args()
        .nth(1)
        .map_or(5, |s| s.parse().expect("seed count"));
    let g = Grid2D::unit_square(32)?;
    for p in [
        PhysParams {
            gamma: 1e-3,
            ..PhysParams::drop_benchmark()
        },
        PhysParams::fh_landscape_example(),
    ] {
        println!("potential {:?}", p.potential);
        let mut worst: f64 = 0.0;
        for seed in 0..seeds {
            let state = random_smooth_state(g, &p, seed)?;
            let (mu, h) = gradient_check(&state, &p, 1000 + seed)?;
            println!(
                "  seed {seed}: mu rel err {:.2e}, h rel err {:.2e}",
                mu.measured, h.measured
            );
            worst = worst.max(mu.measured).max(h.measured);
        }
        println!("  worst {worst:.2e}");
    }
    Ok(())
}
