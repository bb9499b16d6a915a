//! Stationary points of the homogeneous energy landscape `g(s, w)` for the
//! Flory-Huggins example and the quartic drop parameters.
//!
//! Usage: `cargo run --release --example energy_landscape`

use lc_emulsion::energy::{energy_lower_bound_e0, find_landscape_minima, PhysParams, Region};
use lc_emulsion::Result;

fn report(label: &str, p: &PhysParams, region: &Region) -> Result<()> {
    println!(
        "{label}: s in [{}, {}], w in [{}, {}]",
        region.s_min, region.s_max, region.w_min, region.w_max
    );
    for q in find_landscape_minima(p, region)? {
        let tag = if q.on_boundary { " (boundary)" } else { "" };
        println!(
            "  {:<8?} s = {:+.7}  w = {:.7}  g = {:+.9}{tag}",
            q.kind, q.s, q.w, q.value
        );
    }
    let lb = energy_lower_bound_e0(p, region)?;
    println!("  E0 = {:.9} at ({:.7}, {:.7})", lb.e0, lb.s, lb.w);
    Ok(())
}

fn main() -> Result<()> {
    let fh = PhysParams::fh_landscape_example();
    report("Flory-Huggins", &fh, &Region::default_for(&fh))?;
    // The symmetric minima satisfy s = tanh(2.25 s); bisect it independently.
    let (mut lo, mut hi) = (0.5f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid - (2.25 * mid).tanh() < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    println!(
        "  root of s = tanh(2.25 s): {:.7}, sqrt = {:.7}",
        lo,
        lo.sqrt()
    );

    let quartic = PhysParams::drop_benchmark();
    report(
        "quartic, s <= 1",
        &quartic,
        &Region::new(0.0, 1.0, 0.0, 1.5)?,
    )?;
    report(
        "quartic, unrestricted",
        &quartic,
        &Region::default_for(&quartic),
    )?;
    Ok(())
}
