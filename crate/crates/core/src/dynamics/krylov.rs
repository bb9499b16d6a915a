//! Restarted, right-preconditioned GMRES.

use crate::error::Result;
use crate::grid::dot;

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Solves `A x = b` from `x = 0` until `|b - A x| <= tol` (Euclidean).
/// `apply` computes `A v`, `precond` applies `M^{-1}` with `A M^{-1}` the
/// operator seen by the Arnoldi process. Returns the iteration count and
/// whether the tolerance was met.
pub(crate) fn gmres(
    mut apply: impl FnMut(&[f64], &mut [f64]) -> Result<()>,
    mut precond: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    restart: usize,
    max_iters: usize,
) -> Result<(usize, bool)> {
    let n = b.len();
    x.iter_mut().for_each(|v| *v = 0.0);
    let mut r = b.to_vec();
    let mut beta = norm(&r);
    let mut total = 0;
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    while total < max_iters {
        if beta <= tol {
            return Ok((total, true));
        }
        let m = restart.min(max_iters - total);
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|ri| ri / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for j in 0..m {
            precond(&v[j], &mut z);
            apply(&z, &mut w)?;
            // Modified Gram-Schmidt.
            for (i, vi) in v.iter().enumerate() {
                let hij = dot(&w, vi);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(vi) {
                    *wk -= hij * vk;
                }
            }
            let hn = norm(&w);
            h[j + 1][j] = hn;
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let den = h[j][j].hypot(h[j + 1][j]);
            let (c, s) = if den == 0.0 {
                (1.0, 0.0)
            } else {
                (h[j][j] / den, h[j + 1][j] / den)
            };
            cs[j] = c;
            sn[j] = s;
            h[j][j] = den;
            h[j + 1][j] = 0.0;
            g[j + 1] = -s * g[j];
            g[j] *= c;
            k_used = j + 1;
            total += 1;
            if g[j + 1].abs() <= tol || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|wk| wk / hn).collect());
        }
        // Back substitution for the Krylov coefficients.
        let k = k_used;
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for l in i + 1..k {
                s -= h[i][l] * y[l];
            }
            y[i] = if h[i][i] != 0.0 { s / h[i][i] } else { 0.0 };
        }
        let mut comb = vec![0.0; n];
        for (yi, vi) in y.iter().zip(&v) {
            for (c, vk) in comb.iter_mut().zip(vi) {
                *c += yi * vk;
            }
        }
        precond(&comb, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
        // True residual for the restart.
        apply(x, &mut w)?;
        for i in 0..n {
            r[i] = b[i] - w[i];
        }
        beta = norm(&r);
    }
    Ok((total, beta <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_nonsymmetric_system() {
        // Tridiagonal with an advective skew part.
        let n = 50;
        let apply = |v: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { v[i - 1] } else { 0.0 };
                let r = if i + 1 < n { v[i + 1] } else { 0.0 };
                out[i] = 4.0 * v[i] - 1.5 * l - 0.5 * r;
            }
            Ok(())
        };
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut x = vec![0.0; n];
        let (iters, converged) = gmres(
            apply,
            |v, z| z.copy_from_slice(v),
            &b,
            &mut x,
            1e-12,
            10,
            500,
        )
        .unwrap();
        assert!(converged, "{iters}");
        let mut ax = vec![0.0; n];
        apply(&x, &mut ax).unwrap();
        let err: f64 = ax
            .iter()
            .zip(&b)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-11);
    }

    #[test]
    fn exact_preconditioner_converges_in_one_iteration() {
        let d: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let b = vec![1.0; 20];
        let mut x = vec![0.0; 20];
        let (iters, _) = gmres(
            |v, out| {
                for i in 0..20 {
                    out[i] = d[i] * v[i];
                }
                Ok(())
            },
            |v, z| {
                for i in 0..20 {
                    z[i] = v[i] / d[i];
                }
            },
            &b,
            &mut x,
            1e-13,
            30,
            30,
        )
        .unwrap();
        assert_eq!(iters, 1);
        assert!((x[4] - 0.2).abs() < 1e-14);
    }
}
