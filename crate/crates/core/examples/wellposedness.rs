//! Well-posedness condition for the drop benchmark: estimated interpolation
//! constants, both branches of the condition and the critical constant.
//!
//! Usage: `cargo run --release --example wellposedness`

use lc_emulsion::analysis::{
    check_wellposedness, critical_c_gn, d_infinity_bound, estimate_gn_constant,
    estimate_lady_constant,
};
use lc_emulsion::energy::{energy_lower_bound_e0, Region};
use lc_emulsion::io::RunConfig;
use lc_emulsion::{free_energy, PhysParams, Result};

fn main() -> Result<()> {
    let cfg = RunConfig::drop_benchmark();
    let state = cfg.initial_state()?;
    let p = &cfg.physics;
    let g = *state.grid();
    let e_tot0 = free_energy(&state, p)?.e_total;
    let d_inf = d_infinity_bound(state.d.max_magnitude(), p.phi_cr);
    let e0 = energy_lower_bound_e0(p, &Region::default_for(p))?.e0;
    let c_gn = estimate_gn_constant(&g);
    let c_lady = estimate_lady_constant(&g);
    print!(
        "{}",
        check_wellposedness(p, e_tot0, d_inf, c_gn, c_lady, e0, g.measure())?
    );

    // Branch A flips where the constant reaches the critical value.
    let crit = critical_c_gn(p, d_inf);
    for c in [0.9 * crit, 0.999 * crit, 1.001 * crit] {
        let r = check_wellposedness(p, e_tot0, d_inf, c, c_lady, e0, g.measure())?;
        println!(
            "c_gn = {c:.6}: branch A {}",
            if r.holds_a { "holds" } else { "fails" }
        );
    }
    let free = PhysParams {
        beta: 0.0,
        ..p.clone()
    };
    let e_free = free_energy(&state, &free)?.e_total;
    let r = check_wellposedness(&free, e_free, d_inf, 1e3, 1e3, e0, g.measure())?;
    println!("beta = 0: branch A {}, branch B {}", r.holds_a, r.holds_b);
    Ok(())
}
