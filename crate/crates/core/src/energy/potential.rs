//! Mixing potentials. `bulk_*` return the density that enters the free
//! energy directly: `Psi(s)/eps` for Flory-Huggins, `f(s)` for the quartic.

use super::{PhysParams, Potential};
use crate::error::{Result, SimError};

/// `x ln x` extended continuously by 0 at the origin.
fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Flory-Huggins `Psi(s)`. Requires `|s| < 1`.
pub fn flory_huggins(s: f64, theta: f64, theta0: f64) -> Result<f64> {
    if !(s.abs() < 1.0) {
        return Err(SimError::PotentialDomain { value: s });
    }
    Ok(flory_huggins_closed(s, theta, theta0))
}

/// `Psi` on the closed interval `[-1, 1]`, using `0 ln 0 = 0` at the ends.
pub(crate) fn flory_huggins_closed(s: f64, theta: f64, theta0: f64) -> f64 {
    0.5 * theta * (xlnx(1.0 + s) + xlnx(1.0 - s)) - 0.5 * theta0 * s * s
}

pub fn flory_huggins_deriv(s: f64, theta: f64, theta0: f64) -> Result<f64> {
    if !(s.abs() < 1.0) {
        return Err(SimError::PotentialDomain { value: s });
    }
    Ok(0.5 * theta * ((1.0 + s) / (1.0 - s)).ln() - theta0 * s)
}

/// Second derivative of the convex part `F(s) = Theta/2 [(1+s)ln(1+s) + (1-s)ln(1-s)]`.
pub fn flory_huggins_convex_second(s: f64, theta: f64) -> f64 {
    theta / (1.0 - s * s)
}

/// Quartic `f(s) = s^2 (1-s)^2 / eps`.
pub fn quartic(s: f64, eps: f64) -> f64 {
    let t = s * (1.0 - s);
    t * t / eps
}

pub fn quartic_deriv(s: f64, eps: f64) -> f64 {
    2.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / eps
}

pub fn quartic_second(s: f64, eps: f64) -> f64 {
    (2.0 - 12.0 * s + 12.0 * s * s) / eps
}

/// Potential value `Psi(s)` or `f(s)` according to the selector.
pub fn potential_value(s: f64, p: &PhysParams) -> Result<f64> {
    match p.potential {
        Potential::FloryHuggins => flory_huggins(s, p.theta_fh, p.theta0_fh),
        Potential::Quartic => Ok(quartic(s, p.eps)),
    }
}

pub fn potential_deriv(s: f64, p: &PhysParams) -> Result<f64> {
    match p.potential {
        Potential::FloryHuggins => flory_huggins_deriv(s, p.theta_fh, p.theta0_fh),
        Potential::Quartic => Ok(quartic_deriv(s, p.eps)),
    }
}

/// Energy density of mixing without the gradient term.
#[inline]
pub fn bulk(s: f64, p: &PhysParams) -> Result<f64> {
    match p.potential {
        Potential::FloryHuggins => Ok(flory_huggins(s, p.theta_fh, p.theta0_fh)? / p.eps),
        Potential::Quartic => Ok(quartic(s, p.eps)),
    }
}

#[inline]
pub fn bulk_deriv(s: f64, p: &PhysParams) -> Result<f64> {
    match p.potential {
        Potential::FloryHuggins => Ok(flory_huggins_deriv(s, p.theta_fh, p.theta0_fh)? / p.eps),
        Potential::Quartic => Ok(quartic_deriv(s, p.eps)),
    }
}

/// Second derivative of the bulk density; `None` outside the FH domain.
pub fn bulk_second(s: f64, p: &PhysParams) -> Option<f64> {
    match p.potential {
        Potential::FloryHuggins => (s.abs() < 1.0)
            .then(|| (flory_huggins_convex_second(s, p.theta_fh) - p.theta0_fh) / p.eps),
        Potential::Quartic => Some(quartic_second(s, p.eps)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn flory_huggins_is_symmetric_about_zero() {
        assert_eq!(flory_huggins(0.0, 1.5, 3.0).unwrap(), 0.0);
        assert_eq!(flory_huggins_deriv(0.0, 1.5, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn flory_huggins_endpoint_limit_is_finite() {
        let (theta, theta0) = (1.5, 3.0);
        let expected = theta * 2f64.ln() - 0.5 * theta0;
        assert!((flory_huggins_closed(1.0, theta, theta0) - expected).abs() < 1e-14);
        let near = flory_huggins(1.0 - 1e-12, theta, theta0).unwrap();
        assert!((near - expected).abs() < 1e-9);
    }

    #[test]
    fn flory_huggins_rejects_physical_range_violation() {
        assert!(matches!(
            flory_huggins(1.0, 1.5, 3.0),
            Err(SimError::PotentialDomain { .. })
        ));
        assert!(flory_huggins_deriv(-1.2, 1.5, 3.0).is_err());
        assert!(flory_huggins(f64::NAN, 1.5, 3.0).is_err());
    }

    #[test]
    fn quartic_values() {
        assert!((quartic(0.5, 0.1) - 0.625).abs() < 1e-15);
        assert_eq!(quartic(0.0, 0.1), 0.0);
        assert_eq!(quartic(1.0, 0.1), 0.0);
    }

    proptest! {
        #[test]
        fn convex_part_has_nonnegative_curvature(s in -0.999f64..0.999, theta in 0.0f64..5.0) {
            prop_assert!(flory_huggins_convex_second(s, theta) >= 0.0);
        }

        #[test]
        fn derivatives_match_central_differences(s in -0.9f64..0.9) {
            let p = PhysParams::fh_landscape_example();
            let q = PhysParams::drop_benchmark();
            let h = 1e-6;
            for p in [&p, &q] {
                let fd = (bulk(s + h, p).unwrap() - bulk(s - h, p).unwrap()) / (2.0 * h);
                let an = bulk_deriv(s, p).unwrap();
                prop_assert!((fd - an).abs() < 1e-6 * (1.0 + an.abs()));
                let fd2 = (bulk_deriv(s + h, p).unwrap() - bulk_deriv(s - h, p).unwrap()) / (2.0 * h);
                let an2 = bulk_second(s, p).unwrap();
                prop_assert!((fd2 - an2).abs() < 1e-5 * (1.0 + an2.abs()));
            }
        }
    }
}
