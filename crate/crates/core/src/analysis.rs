//! A-priori bounds, the parameter condition for global well-posedness, and
//! numerical estimates of the interpolation constants it involves.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::energy::PhysParams;
use crate::error::{Result, SimError};
use crate::grid::{integrate, Grid2D, ScalarField};
use crate::spectral::Spectral;
use crate::state::State;

/// `D_inf = max(|d_0|_inf, sqrt(1 - phi_cr))`, the uniform bound on `|d|`.
pub fn d_infinity_bound(d0_max: f64, phi_cr: f64) -> f64 {
    d0_max.max((1.0 - phi_cr).sqrt())
}

/// Bound on `|d(t)|_p^p`:
/// `|d_0|_p^p e^{-2 alpha (1 - phi_cr) t} + (1 - phi_cr)^{p/2} |Omega| (1 - e^{-2 alpha (1 - phi_cr) t})`.
pub fn lp_decay_envelope(d0_lp_p: f64, p: f64, alpha: f64, phi_cr: f64, area: f64, t: f64) -> f64 {
    let decay = (-2.0 * alpha * (1.0 - phi_cr) * t).exp();
    d0_lp_p * decay + (1.0 - phi_cr).powf(0.5 * p) * area * (1.0 - decay)
}

/// Verdict of the well-posedness condition in its two variants.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub n: usize,
    pub min_eps_kappa: f64,
    pub d_inf: f64,
    pub e0: f64,
    pub c_gn: f64,
    pub c_lady: f64,
    /// `3^{3/4} beta C^2 D_inf^{3/2}`.
    pub branch_a_threshold: f64,
    /// `3^{3/4} beta C~^2 D_inf (E_tot(0) - |Omega| E0)^{1/2} / (eps kappa)^{1/4}`.
    pub branch_b_threshold: f64,
    pub holds_a: bool,
    pub holds_b: bool,
    pub e_tot0: f64,
    pub area: f64,
    /// Largest `C_Omega` for which branch A still holds.
    pub c_gn_critical: f64,
}

impl ConditionReport {
    pub const CSV_HEADER: &'static str = "n,min_eps_kappa,d_inf,e0,c_gn,c_lady,branch_a_threshold,branch_b_threshold,holds_a,holds_b,e_tot0,area,c_gn_critical";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{:e},{:e},{:e}",
            self.n,
            self.min_eps_kappa,
            self.d_inf,
            self.e0,
            self.c_gn,
            self.c_lady,
            self.branch_a_threshold,
            self.branch_b_threshold,
            self.holds_a,
            self.holds_b,
            self.e_tot0,
            self.area,
            self.c_gn_critical
        )
    }
}

impl std::fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: [(&str, String); 12] = [
            ("dimension", self.n.to_string()),
            ("min(eps, kappa)", format!("{:.6e}", self.min_eps_kappa)),
            ("D_inf", format!("{:.6}", self.d_inf)),
            ("E0", format!("{:.6}", self.e0)),
            ("|Omega|", format!("{:.6}", self.area)),
            ("E_tot(0)", format!("{:.6e}", self.e_tot0)),
            ("C_Omega (GN)", format!("{:.6}", self.c_gn)),
            ("C~_Omega (Ladyzhenskaya)", format!("{:.6}", self.c_lady)),
            (
                "branch A threshold",
                format!(
                    "{:.6e}  -> {}",
                    self.branch_a_threshold,
                    verdict(self.holds_a)
                ),
            ),
            (
                "branch B threshold",
                format!(
                    "{:.6e}  -> {}",
                    self.branch_b_threshold,
                    verdict(self.holds_b)
                ),
            ),
            (
                "critical C_Omega (branch A)",
                format!("{:.6}", self.c_gn_critical),
            ),
            ("note", "|Omega| replaces (2 pi)^n in the condition".into()),
        ];
        for (k, v) in rows {
            writeln!(f, "{k:<28} {v}")?;
        }
        Ok(())
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

const THREE_POW_3_4: f64 = 2.279_507_056_954_777_6;

/// `C_Omega` at which branch A flips: `sqrt(min(eps, kappa) / (3^{3/4} beta D_inf^{3/2}))`.
pub fn critical_c_gn(p: &PhysParams, d_inf: f64) -> f64 {
    if p.beta == 0.0 || d_inf == 0.0 {
        return f64::INFINITY;
    }
    (p.eps.min(p.kappa) / (THREE_POW_3_4 * p.beta * d_inf.powf(1.5))).sqrt()
}

/// Evaluates both branches of the condition. The domain measure `area`
/// takes the place of `(2 pi)^n`.
pub fn check_wellposedness(
    p: &PhysParams,
    e_tot0: f64,
    d_inf: f64,
    c_gn: f64,
    c_lady: f64,
    e0: f64,
    area: f64,
) -> Result<ConditionReport> {
    for (name, v) in [
        ("d_inf", d_inf),
        ("c_gn", c_gn),
        ("c_lady", c_lady),
        ("area", area),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(SimError::InvalidParameter(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    let bound = area * e0;
    if e_tot0 < bound {
        return Err(SimError::EnergyBelowBound { e_tot0, bound });
    }
    let m = p.eps.min(p.kappa);
    let a = THREE_POW_3_4 * p.beta * c_gn * c_gn * d_inf.powf(1.5);
    let b = THREE_POW_3_4 * p.beta * c_lady * c_lady * d_inf * (e_tot0 - bound).sqrt()
        / (p.eps * p.kappa).powf(0.25);
    Ok(ConditionReport {
        n: 2,
        min_eps_kappa: m,
        d_inf,
        e0,
        c_gn,
        c_lady,
        branch_a_threshold: a,
        branch_b_threshold: b,
        holds_a: m > a,
        holds_b: m > b,
        e_tot0,
        area,
        c_gn_critical: critical_c_gn(p, d_inf),
    })
}

/// Settings of the interpolation-constant estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOptions {
    pub seed: u64,
    /// Number of random starting fields.
    pub samples: usize,
    /// Largest mode index per direction of the random fields.
    pub max_mode: usize,
    /// Hill-climbing iterations per sample.
    pub ascent_iters: usize,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            seed: 7,
            samples: 16,
            max_mode: 3,
            ascent_iters: 40,
        }
    }
}

/// Trigonometric polynomial `c0 + sum_m Re(c_m e^{i k_m . x})` over modes
/// `(p, q)` from a half-plane, so that it is real.
#[derive(Debug, Clone)]
struct TrigField {
    c0: f64,
    coef: Vec<Complex64>,
}

struct NormEvaluator {
    modes: Vec<(i64, i64)>,
    kx: Vec<f64>,
    ky: Vec<f64>,
    sp: Spectral,
    area: f64,
}

#[derive(Debug, Clone, Copy)]
struct Norms {
    l2: f64,
    l4: f64,
    linf: f64,
    h1: f64,
    h2: f64,
    w14: f64,
}

impl NormEvaluator {
    fn new(grid: &Grid2D, max_mode: usize) -> Self {
        let k = max_mode as i64;
        let mut modes = Vec::new();
        for q in 0..=k {
            for p in -k..=k {
                if q > 0 || p > 0 {
                    modes.push((p, q));
                }
            }
        }
        let kx = modes
            .iter()
            .map(|&(p, _)| 2.0 * PI * p as f64 / grid.lx())
            .collect();
        let ky = modes
            .iter()
            .map(|&(_, q)| 2.0 * PI * q as f64 / grid.ly())
            .collect();
        // Evaluate on a grid fine enough that quadrature of |grad f|^4 is exact
        // and the maximum is resolved.
        let m = (16 * max_mode.max(1)).next_power_of_two().max(64);
        let fine =
            Grid2D::with_origin(m, m, grid.lx(), grid.ly(), grid.origin().0, grid.origin().1)
                .expect("valid grid");
        NormEvaluator {
            modes,
            kx,
            ky,
            sp: Spectral::new(fine),
            area: grid.measure(),
        }
    }

    fn norms(&self, f: &TrigField) -> Norms {
        let g = *self.sp.grid();
        let (nx, ny) = (g.nx() as i64, g.ny() as i64);
        let n = g.len();
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        let nf = n as f64;
        a[0] = Complex64::new(f.c0 * nf, 0.0);
        let (mut s1, mut s2, mut s4) = (f.c0 * f.c0, 0.0, 0.0);
        for (m, &(p, q)) in self.modes.iter().enumerate() {
            let c = f.coef[m];
            let (kx, ky) = (self.kx[m], self.ky[m]);
            let k2 = kx * kx + ky * ky;
            s1 += 0.5 * c.norm_sqr();
            s2 += 0.5 * k2 * c.norm_sqr();
            s4 += 0.5 * k2 * k2 * c.norm_sqr();
            let i_pos = (q.rem_euclid(ny) * nx + p.rem_euclid(nx)) as usize;
            let i_neg = ((-q).rem_euclid(ny) * nx + (-p).rem_euclid(nx)) as usize;
            let half = 0.5 * nf * c;
            // a carries f + i f_x, b carries f_y.
            let dx = Complex64::i() * kx;
            let dy = Complex64::i() * ky;
            a[i_pos] += half + Complex64::i() * (dx * half);
            a[i_neg] += half.conj() + Complex64::i() * (dx * half).conj();
            b[i_pos] += dy * half;
            b[i_neg] += (dy * half).conj();
        }
        self.sp.inverse(&mut a);
        self.sp.inverse(&mut b);
        let (mut q4, mut g4, mut linf) = (0.0, 0.0, 0.0f64);
        for k in 0..n {
            let v = a[k].re;
            let g2 = a[k].im * a[k].im + b[k].re * b[k].re;
            q4 += v.powi(4);
            g4 += g2 * g2;
            linf = linf.max(v.abs());
        }
        let cell = self.area / nf;
        let l4 = (q4 * cell).powf(0.25);
        Norms {
            l2: (self.area * s1).sqrt(),
            l4,
            linf,
            h1: (self.area * (s1 + s2)).sqrt(),
            h2: (self.area * (s1 + s2 + s4)).sqrt(),
            w14: ((q4 + g4) * cell).powf(0.25),
        }
    }
}

fn gn_ratio(n: &Norms) -> f64 {
    let den = (n.linf * n.h2).sqrt();
    if den > 0.0 {
        n.w14 / den
    } else {
        0.0
    }
}

fn lady_ratio(n: &Norms) -> f64 {
    let den = (n.l2 * n.h1).sqrt();
    if den > 0.0 {
        n.l4 / den
    } else {
        0.0
    }
}

fn estimate(grid: &Grid2D, opts: &EstimatorOptions, ratio: fn(&Norms) -> f64) -> f64 {
    let ev = NormEvaluator::new(grid, opts.max_mode);
    let nm = ev.modes.len();
    let zero = Complex64::new(0.0, 0.0);
    // Deterministic part of the family: the constant and the lowest modes.
    let mut best = ratio(&ev.norms(&TrigField {
        c0: 1.0,
        coef: vec![zero; nm],
    }));
    for (m, &(p, q)) in ev.modes.iter().enumerate() {
        if p.abs() + q <= 1 {
            let mut coef = vec![zero; nm];
            coef[m] = Complex64::new(0.0, -1.0);
            best = best.max(ratio(&ev.norms(&TrigField { c0: 0.0, coef })));
        }
    }
    for s in 0..opts.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(s as u64));
        let mut f = TrigField {
            c0: rng.gen_range(-1.0..1.0),
            coef: (0..nm)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        };
        let mut val = ratio(&ev.norms(&f));
        let mut step = 0.3;
        for _ in 0..opts.ascent_iters {
            let mut trial = f.clone();
            trial.c0 += step * rng.gen_range(-1.0..1.0);
            for c in trial.coef.iter_mut() {
                *c += Complex64::new(
                    step * rng.gen_range(-1.0..1.0),
                    step * rng.gen_range(-1.0..1.0),
                );
            }
            let v = ratio(&ev.norms(&trial));
            if v > val {
                f = trial;
                val = v;
            } else {
                step *= 0.9;
            }
        }
        best = best.max(val);
    }
    best
}

/// Lower estimate of the best constant in
/// `|f|_{W^{1,4}} <= C |f|_inf^{1/2} |f|_{H^2}^{1/2}` on the grid's periodic
/// domain, by maximizing the ratio over random trigonometric polynomials.
/// Norms: `|f|_{W^{1,4}}^4 = |f|_4^4 + ||grad f||_4^4`,
/// `|f|_{H^2}^2 = |f|_2^2 + |grad f|_2^2 + |D^2 f|_2^2`.
pub fn estimate_gn_constant(grid: &Grid2D) -> f64 {
    estimate_gn_constant_with(grid, &EstimatorOptions::default())
}

pub fn estimate_gn_constant_with(grid: &Grid2D, opts: &EstimatorOptions) -> f64 {
    estimate(grid, opts, gn_ratio)
}

/// Lower estimate of the best constant in
/// `|f|_4 <= C |f|_2^{1/2} |f|_{H^1}^{1/2}` (see [`estimate_gn_constant`]).
pub fn estimate_lady_constant(grid: &Grid2D) -> f64 {
    estimate_lady_constant_with(grid, &EstimatorOptions::default())
}

pub fn estimate_lady_constant_with(grid: &Grid2D, opts: &EstimatorOptions) -> f64 {
    estimate(grid, opts, lady_ratio)
}

/// Bound monitors for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsMonitor {
    pub max_abs_d: f64,
    pub mass: f64,
    /// `max|d| > D_inf + d_tol`.
    pub d_violation: bool,
    /// `|mass - mass0| > mass_tol`.
    pub mass_violation: bool,
}

/// Absolute tolerance on `max|d|` above `D_inf`.
pub const D_INF_TOLERANCE: f64 = 0.01;

pub fn monitor_bounds(
    state: &State,
    report: &ConditionReport,
    mass0: f64,
    mass_tol: f64,
) -> BoundsMonitor {
    let max_abs_d = state.d.max_magnitude();
    let mass = integrate(&state.phi);
    BoundsMonitor {
        max_abs_d,
        mass,
        d_violation: max_abs_d > report.d_inf + D_INF_TOLERANCE,
        mass_violation: (mass - mass0).abs() > mass_tol,
    }
}

/// Bounding box `(x_min, x_max, y_min, y_max)` of the `level` contour of
/// `f`, from linear interpolation along grid lines. Crossings through the
/// periodic seam are ignored. `None` when the level is never crossed.
pub fn level_set_extent(f: &ScalarField, level: f64) -> Option<(f64, f64, f64, f64)> {
    let g = *f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut bb = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    let mut add = |x: f64, y: f64| {
        bb = (bb.0.min(x), bb.1.max(x), bb.2.min(y), bb.3.max(y));
    };
    let v = |i: usize, j: usize| f.values()[j * nx + i] - level;
    for j in 0..ny {
        for i in 0..nx {
            let a = v(i, j);
            if i + 1 < nx {
                let b = v(i + 1, j);
                if (a <= 0.0) != (b <= 0.0) {
                    add(g.x(i) + g.hx() * a / (a - b), g.y(j));
                }
            }
            if j + 1 < ny {
                let b = v(i, j + 1);
                if (a <= 0.0) != (b <= 0.0) {
                    add(g.x(i), g.y(j) + g.hy() * a / (a - b));
                }
            }
        }
    }
    bb.0.is_finite().then_some(bb)
}

/// `y`-extent over `x`-extent of the `level` contour (`NaN` when absent).
pub fn aspect_ratio(f: &ScalarField, level: f64) -> f64 {
    match level_set_extent(f, level) {
        Some((x0, x1, y0, y1)) if x1 > x0 => (y1 - y0) / (x1 - x0),
        _ => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> Grid2D {
        Grid2D::new(32, 32, 2.0 * PI, 2.0 * PI).unwrap()
    }

    #[test]
    fn d_inf_examples() {
        assert_eq!(d_infinity_bound(0.95, 0.5), 0.95);
        assert!((d_infinity_bound(0.3, 0.5) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(d_infinity_bound(0.0, 0.0), 1.0);
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(lp_decay_envelope(3.61, 2.0, 10.0, 0.5, 4.0, 0.0), 3.61);
        let v = lp_decay_envelope(0.9025 * 4.0, 2.0, 10.0, 0.5, 4.0, 0.1);
        assert!((v - 2.592_286).abs() < 1e-6, "{v}");
        let inf = lp_decay_envelope(3.61, 4.0, 10.0, 0.5, 4.0, 1e3);
        assert!((inf - 0.25 * 4.0).abs() < 1e-12);
    }

    #[test]
    fn branch_a_flips_at_critical_constant() {
        let p = PhysParams {
            eps: 0.1,
            kappa: 0.1,
            beta: 1.0,
            ..PhysParams::drop_benchmark()
        };
        let c = critical_c_gn(&p, 0.95);
        assert!((c - 0.217_664).abs() < 1e-6, "{c}");
        let below = check_wellposedness(&p, 1.0, 0.95, c * (1.0 - 1e-9), 1.0, 0.0, 4.0).unwrap();
        let above = check_wellposedness(&p, 1.0, 0.95, c * (1.0 + 1e-9), 1.0, 0.0, 4.0).unwrap();
        assert!(below.holds_a && !above.holds_a);
    }

    #[test]
    fn zero_anchoring_always_holds() {
        let p = PhysParams {
            beta: 0.0,
            ..PhysParams::drop_benchmark()
        };
        let r = check_wellposedness(&p, 10.0, 0.95, 50.0, 50.0, -0.78125, 4.0).unwrap();
        assert!(r.holds_a && r.holds_b);
    }

    #[test]
    fn energy_below_bound_is_an_error() {
        let p = PhysParams::drop_benchmark();
        let e = check_wellposedness(&p, -4.0, 0.95, 0.2, 1.0, -0.78125, 4.0);
        assert!(matches!(e, Err(SimError::EnergyBelowBound { .. })));
    }

    #[test]
    fn constant_and_single_mode_ratios_are_bounds() {
        let g = torus();
        let ev = NormEvaluator::new(&g, 2);
        let one = ev.norms(&TrigField {
            c0: 1.0,
            coef: vec![Complex64::new(0.0, 0.0); ev.modes.len()],
        });
        assert!((gn_ratio(&one) - 1.0).abs() < 1e-12);
        let area = g.measure();
        assert!((lady_ratio(&one) - area.powf(-0.25)).abs() < 1e-12);

        // sin(x): |f|_4^4 = 3/8 |Omega|, |f'|_4^4 = 3/8 |Omega|, |f|_2^2 = |Omega|/2.
        let idx = ev.modes.iter().position(|&m| m == (1, 0)).unwrap();
        let mut coef = vec![Complex64::new(0.0, 0.0); ev.modes.len()];
        coef[idx] = Complex64::new(0.0, -1.0);
        let s = ev.norms(&TrigField { c0: 0.0, coef });
        let expect_gn = (0.75f64 * 2.0 / 3.0).powf(0.25);
        assert!((gn_ratio(&s) - expect_gn).abs() < 1e-10);
        let expect_lady =
            (0.375f64).powf(0.25) / (0.5f64.sqrt() * 1.0f64.sqrt()).sqrt() * area.powf(-0.25);
        assert!((lady_ratio(&s) - expect_lady).abs() < 1e-10);

        let gn = estimate_gn_constant_with(
            &g,
            &EstimatorOptions {
                samples: 4,
                ascent_iters: 10,
                ..Default::default()
            },
        );
        assert!(gn >= 1.0 - 1e-12 && gn >= expect_gn - 1e-12);
        let la = estimate_lady_constant_with(
            &g,
            &EstimatorOptions {
                samples: 4,
                ascent_iters: 10,
                ..Default::default()
            },
        );
        assert!(la >= expect_lady - 1e-12 && la >= area.powf(-0.25) - 1e-12);
    }

    #[test]
    fn enlarging_the_family_never_decreases_the_estimate() {
        let g = torus();
        let small = EstimatorOptions {
            samples: 2,
            ascent_iters: 8,
            ..Default::default()
        };
        let large = EstimatorOptions {
            samples: 5,
            ..small.clone()
        };
        assert!(estimate_gn_constant_with(&g, &large) >= estimate_gn_constant_with(&g, &small));
        assert!(estimate_lady_constant_with(&g, &large) >= estimate_lady_constant_with(&g, &small));
    }
    #[test]
    fn ellipse_aspect_ratio() {
        let g = Grid2D::unit_square(128).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (x / 0.4).powi(2) + (y / 0.6).powi(2));
        let r = aspect_ratio(&f, 1.0);
        assert!((r - 1.5).abs() < 1e-3, "{r}");
        assert!(aspect_ratio(&ScalarField::constant(g, 0.0), 1.0).is_nan());
    }
}
