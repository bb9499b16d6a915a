//! The homogeneous energy landscape `g(s, w)`, where `s` plays the role of
//! `phi` and `w` of `|d|`, and its stationary points.

use super::potential::{flory_huggins_closed, quartic, quartic_deriv, quartic_second};
use super::{PhysParams, Potential};
use crate::error::{Result, SimError};

/// Axis-aligned box in the `(s, w)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub s_min: f64,
    pub s_max: f64,
    pub w_min: f64,
    pub w_max: f64,
}

impl Region {
    pub fn new(s_min: f64, s_max: f64, w_min: f64, w_max: f64) -> Result<Self> {
        if !(s_min < s_max && w_min < w_max && w_min >= 0.0)
            || ![s_min, s_max, w_min, w_max].iter().all(|v| v.is_finite())
        {
            return Err(SimError::InvalidParameter(format!(
                "invalid landscape region s in [{s_min}, {s_max}], w in [{w_min}, {w_max}]"
            )));
        }
        Ok(Region {
            s_min,
            s_max,
            w_min,
            w_max,
        })
    }

    /// Default region for the potential: `[-1, 1] x [0, 1.5]` for
    /// Flory-Huggins and `[-0.5, 1.5] x [0, 1.5]` for the quartic.
    pub fn default_for(p: &PhysParams) -> Self {
        match p.potential {
            Potential::FloryHuggins => Region {
                s_min: -1.0,
                s_max: 1.0,
                w_min: 0.0,
                w_max: 1.5,
            },
            Potential::Quartic => Region {
                s_min: -0.5,
                s_max: 1.5,
                w_min: 0.0,
                w_max: 1.5,
            },
        }
    }

    fn contains(&self, s: f64, w: f64, tol: f64) -> bool {
        s >= self.s_min - tol
            && s <= self.s_max + tol
            && w >= self.w_min - tol
            && w <= self.w_max + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryKind {
    Minimum,
    Saddle,
    Maximum,
}

/// A stationary point of `g` restricted to a region. Points with
/// `on_boundary` are constrained minima where the free gradient vanishes only
/// along the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoint {
    pub s: f64,
    pub w: f64,
    pub value: f64,
    pub kind: StationaryKind,
    pub on_boundary: bool,
    /// Norm of the (projected) gradient after polishing.
    pub grad_norm: f64,
    /// Eigenvalues of the Hessian, ascending.
    pub hessian_eigs: [f64; 2],
}

fn check_fh_domain(s: f64, w: f64) -> Result<()> {
    if !(s.abs() <= 1.0) || !(w >= 0.0) {
        return Err(SimError::PotentialDomain { value: s });
    }
    Ok(())
}

fn coupling(s: f64, w: f64, p: &PhysParams) -> f64 {
    let w2 = w * w;
    -0.5 * p.alpha * (s - p.phi_cr) * w2 + 0.25 * p.alpha * w2 * w2
}

/// `g(s, w) = Psi(s)/eps - alpha/2 (s - phi_cr) w^2 + alpha/4 w^4` on `[-1, 1] x [0, inf)`.
pub fn g_value(s: f64, w: f64, p: &PhysParams) -> Result<f64> {
    check_fh_domain(s, w)?;
    Ok(flory_huggins_closed(s, p.theta_fh, p.theta0_fh) / p.eps + coupling(s, w, p))
}

/// `g~(s, w)` with the quartic `s^2 (1-s)^2 / eps` in place of `Psi/eps`.
pub fn g_tilde_value(s: f64, w: f64, p: &PhysParams) -> f64 {
    quartic(s, p.eps) + coupling(s, w, p)
}

/// `g` or `g~` according to `p.potential`.
pub fn landscape_value(s: f64, w: f64, p: &PhysParams) -> Result<f64> {
    match p.potential {
        Potential::FloryHuggins => g_value(s, w, p),
        Potential::Quartic => Ok(g_tilde_value(s, w, p)),
    }
}

/// Gradient and Hessian `(g_s, g_w, g_ss, g_sw, g_ww)`. For Flory-Huggins the
/// point must satisfy `|s| < 1`.
fn derivs(s: f64, w: f64, p: &PhysParams) -> Option<[f64; 5]> {
    let (b1, b2) = match p.potential {
        Potential::FloryHuggins => {
            if !(s.abs() < 1.0) {
                return None;
            }
            let b1 = (0.5 * p.theta_fh * ((1.0 + s) / (1.0 - s)).ln() - p.theta0_fh * s) / p.eps;
            let b2 = (p.theta_fh / (1.0 - s * s) - p.theta0_fh) / p.eps;
            (b1, b2)
        }
        Potential::Quartic => (quartic_deriv(s, p.eps), quartic_second(s, p.eps)),
    };
    let a = p.alpha;
    Some([
        b1 - 0.5 * a * w * w,
        -a * (s - p.phi_cr) * w + a * w * w * w,
        b2,
        -a * w,
        -a * (s - p.phi_cr) + 3.0 * a * w * w,
    ])
}

fn sym_eigs(a: f64, b: f64, c: f64) -> [f64; 2] {
    let m = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    [m - r, m + r]
}

/// Samples of the landscape on an `ns x nw` node lattice spanning the region.
/// Flory-Huggins end points use the finite closed-interval values.
pub fn sample(
    p: &PhysParams,
    region: &Region,
    ns: usize,
    nw: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    let (ns, nw) = (ns.max(2), nw.max(2));
    let mut out = Vec::with_capacity(ns * nw);
    for j in 0..nw {
        let w = region.w_min + (region.w_max - region.w_min) * j as f64 / (nw - 1) as f64;
        for i in 0..ns {
            let s = region.s_min + (region.s_max - region.s_min) * i as f64 / (ns - 1) as f64;
            out.push((s, w, landscape_value(s, w, p)?));
        }
    }
    Ok(out)
}

const SCAN: usize = 512;
const GRAD_TOL: f64 = 1e-12;

/// Stationary points of `g` (or `g~`) in the region: dense scan followed by
/// Newton polishing. Interior saddles and maxima are reported alongside
/// minima; minima on the region boundary are found by a projected Newton
/// iteration. An empty list is a valid answer.
pub fn find_landscape_minima(p: &PhysParams, region: &Region) -> Result<Vec<StationaryPoint>> {
    let mut region = *region;
    if p.potential == Potential::FloryHuggins {
        region.s_min = region.s_min.max(-1.0);
        region.s_max = region.s_max.min(1.0);
        if region.s_min >= region.s_max {
            return Err(SimError::InvalidParameter(
                "region misses the Flory-Huggins domain [-1, 1]".into(),
            ));
        }
    }
    let samples = sample(p, &region, SCAN, SCAN)?;
    let at = |i: usize, j: usize| samples[j * SCAN + i];
    let ds = (region.s_max - region.s_min) / (SCAN - 1) as f64;
    let dw = (region.w_max - region.w_min) / (SCAN - 1) as f64;

    let grad2: Vec<f64> = samples
        .iter()
        .map(|&(s, w, _)| derivs(s, w, p).map_or(f64::INFINITY, |d| d[0] * d[0] + d[1] * d[1]))
        .collect();

    let mut found: Vec<StationaryPoint> = Vec::new();
    for j in 0..SCAN {
        for i in 0..SCAN {
            let v = at(i, j).2;
            let g2 = grad2[j * SCAN + i];
            let (mut is_vmin, mut is_gmin) = (true, g2.is_finite());
            for (di, dj) in [
                (-1i64, -1i64),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ] {
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                if ii < 0 || jj < 0 || ii >= SCAN as i64 || jj >= SCAN as i64 {
                    continue;
                }
                let k = jj as usize * SCAN + ii as usize;
                if samples[k].2 < v {
                    is_vmin = false;
                }
                if grad2[k] < g2 {
                    is_gmin = false;
                }
            }
            let (s0, w0, _) = at(i, j);
            if is_vmin {
                if let Some(pt) = polish_minimum(p, &region, s0, w0) {
                    push_unique(&mut found, pt);
                }
            }
            // Near-zero gradient cells seed the search for saddles and maxima.
            if is_gmin && i > 0 && j > 0 && i + 1 < SCAN && j + 1 < SCAN {
                if let Some(pt) = polish_stationary(p, &region, s0, w0, ds.max(dw)) {
                    push_unique(&mut found, pt);
                }
            }
        }
    }
    found.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(found)
}

fn push_unique(found: &mut Vec<StationaryPoint>, pt: StationaryPoint) {
    if let Some(old) = found
        .iter_mut()
        .find(|q| (q.s - pt.s).hypot(q.w - pt.w) < 1e-7)
    {
        if pt.grad_norm < old.grad_norm {
            *old = pt;
        }
    } else {
        found.push(pt);
    }
}

fn classify(
    s: f64,
    w: f64,
    value: f64,
    grad_norm: f64,
    h: [f64; 3],
    on_boundary: bool,
) -> StationaryPoint {
    let eigs = sym_eigs(h[0], h[1], h[2]);
    let kind = if on_boundary || eigs[0] >= -1e-8 {
        StationaryKind::Minimum
    } else if eigs[1] <= 1e-8 {
        StationaryKind::Maximum
    } else {
        StationaryKind::Saddle
    };
    StationaryPoint {
        s,
        w,
        value,
        kind,
        on_boundary,
        grad_norm,
        hessian_eigs: eigs,
    }
}

/// Full Newton on `grad g = 0`; the result must stay within a few scan cells
/// of the seed and inside the region.
fn polish_stationary(
    p: &PhysParams,
    region: &Region,
    s0: f64,
    w0: f64,
    cell: f64,
) -> Option<StationaryPoint> {
    let (mut s, mut w) = (s0, w0);
    for _ in 0..100 {
        let d = derivs(s, w, p)?;
        let gn = d[0].hypot(d[1]);
        if gn < GRAD_TOL {
            break;
        }
        let det = d[2] * d[4] - d[3] * d[3];
        if det.abs() < 1e-300 {
            return None;
        }
        let step_s = (d[4] * d[0] - d[3] * d[1]) / det;
        let step_w = (d[2] * d[1] - d[3] * d[0]) / det;
        s -= step_s;
        w -= step_w;
        if (s - s0).hypot(w - w0) > 8.0 * cell {
            return None;
        }
    }
    let d = derivs(s, w, p)?;
    let gn = d[0].hypot(d[1]);
    // A w < 0 point is the mirror image of (s, -w).
    let w = w.abs();
    if gn > 1e-9 || !region.contains(s, w, 1e-12) {
        return None;
    }
    Some(classify(
        s,
        w,
        landscape_value(s, w, p).ok()?,
        gn,
        [d[2], d[3], d[4]],
        false,
    ))
}

/// Projected Newton descent inside the box, starting from a scan minimum.
fn polish_minimum(p: &PhysParams, region: &Region, s0: f64, w0: f64) -> Option<StationaryPoint> {
    let lo = [region.s_min, region.w_min];
    let hi = [region.s_max, region.w_max];
    // Flory-Huggins gradients blow up at s = +-1; start slightly inside.
    let pull = if p.potential == Potential::FloryHuggins {
        1e-9
    } else {
        0.0
    };
    let mut x = [s0.clamp(lo[0] + pull, hi[0] - pull), w0];
    let value = |x: &[f64; 2]| landscape_value(x[0], x[1], p).ok();
    let mut f = value(&x)?;
    let mut free = [true; 2];
    let mut pg = f64::INFINITY;
    for _ in 0..200 {
        let d = derivs(x[0], x[1], p)?;
        let grad = [d[0], d[1]];
        for k in 0..2 {
            let at_lo = x[k] <= lo[k] && grad[k] > 0.0;
            let at_hi = x[k] >= hi[k] && grad[k] < 0.0;
            free[k] = !(at_lo || at_hi);
        }
        pg = (0..2)
            .filter(|&k| free[k])
            .map(|k| grad[k] * grad[k])
            .sum::<f64>()
            .sqrt();
        if pg < GRAD_TOL {
            break;
        }
        let mut step = [0.0; 2];
        let h = [[d[2], d[3]], [d[3], d[4]]];
        match free {
            [true, true] => {
                // Newton with the Hessian shifted to be positive definite;
                // flat directions then take no step unless they have slope.
                let eigs = sym_eigs(h[0][0], h[0][1], h[1][1]);
                let shift = (-eigs[0]).max(0.0) + 1e-8 * (1.0 + eigs[1].abs());
                let (a, b, c) = (h[0][0] + shift, h[0][1], h[1][1] + shift);
                let det = a * c - b * b;
                step[0] = -(c * grad[0] - b * grad[1]) / det;
                step[1] = -(a * grad[1] - b * grad[0]) / det;
            }
            [true, false] | [false, true] => {
                let k = if free[0] { 0 } else { 1 };
                step[k] = if h[k][k] > 0.0 {
                    -grad[k] / h[k][k]
                } else {
                    -grad[k] * 1e-3
                };
            }
            [false, false] => break,
        }
        // Backtracking on the clamped step.
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let mut y = [x[0] + t * step[0], x[1] + t * step[1]];
            for k in 0..2 {
                y[k] = y[k].clamp(
                    lo[k] + if k == 0 { pull } else { 0.0 },
                    hi[k] - if k == 0 { pull } else { 0.0 },
                );
            }
            if let Some(fy) = value(&y) {
                if fy <= f {
                    x = y;
                    f = fy;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if pg > 1e-9 {
        return None;
    }
    let d = derivs(x[0], x[1], p)?;
    let on_boundary = !(free[0] && free[1]);
    Some(classify(x[0], x[1], f, pg, [d[2], d[3], d[4]], on_boundary))
}

/// Location and value of the landscape minimum over a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub e0: f64,
    pub s: f64,
    pub w: f64,
}

/// `E0 = min g` over the region.
pub fn energy_lower_bound_e0(p: &PhysParams, region: &Region) -> Result<LowerBound> {
    let pts = find_landscape_minima(p, region)?;
    let best = pts
        .iter()
        .filter(|q| q.kind == StationaryKind::Minimum)
        .min_by(|a, b| a.value.total_cmp(&b.value));
    if let Some(q) = best {
        return Ok(LowerBound {
            e0: q.value,
            s: q.s,
            w: q.w,
        });
    }
    // Fall back to the scan minimum.
    sample(p, region, SCAN, SCAN)?
        .into_iter()
        .min_by(|a, b| a.2.total_cmp(&b.2))
        .map(|(s, w, e0)| LowerBound { e0, s, w })
        .ok_or_else(|| SimError::InvalidParameter("empty region".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_zero_collapses_to_potential() {
        let p = PhysParams::fh_landscape_example();
        for s in [-0.9, -0.2, 0.0, 0.4, 0.99] {
            let psi = flory_huggins_closed(s, p.theta_fh, p.theta0_fh) / p.eps;
            assert_eq!(g_value(s, 0.0, &p).unwrap(), psi);
        }
        assert_eq!(g_value(0.0, 0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn g_tilde_at_benchmark_minimum() {
        let p = PhysParams::drop_benchmark();
        assert!((g_tilde_value(1.0, 0.5f64.sqrt(), &p) + 0.625).abs() < 1e-14);
    }

    #[test]
    fn g_rejects_out_of_domain() {
        let p = PhysParams::fh_landscape_example();
        assert!(g_value(1.01, 0.3, &p).is_err());
        assert!(g_value(0.5, -0.1, &p).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for p in [
            PhysParams::fh_landscape_example(),
            PhysParams::drop_benchmark(),
        ] {
            let (s, w) = (0.37, 0.61);
            let h = 1e-6;
            let d = derivs(s, w, &p).unwrap();
            let f = |s, w| landscape_value(s, w, &p).unwrap();
            assert!((d[0] - (f(s + h, w) - f(s - h, w)) / (2.0 * h)).abs() < 1e-6);
            assert!((d[1] - (f(s, w + h) - f(s, w - h)) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn without_alpha_minima_sit_on_the_w_axis() {
        let p = PhysParams {
            alpha: 0.0,
            ..PhysParams::fh_landscape_example()
        };
        let pts = find_landscape_minima(&p, &Region::default_for(&p)).unwrap();
        let minima: Vec<_> = pts
            .iter()
            .filter(|q| q.kind == StationaryKind::Minimum)
            .collect();
        assert!(!minima.is_empty());
        // With alpha = 0 g is flat in w; every minimizer has w-derivative 0
        // and value equal to the w = 0 value.
        for m in minima {
            assert!((m.value - g_value(m.s, 0.0, &p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn quartic_without_couplings_has_zero_lower_bound() {
        let p = PhysParams {
            alpha: 0.0,
            beta: 0.0,
            ..PhysParams::drop_benchmark()
        };
        let lb = energy_lower_bound_e0(&p, &Region::new(-0.5, 1.5, 0.0, 1.0).unwrap()).unwrap();
        assert!(lb.e0.abs() < 1e-14);
    }
}
