use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Homogeneous mixing density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    /// Logarithmic Flory-Huggins potential with minima near `+-s_CH`,
    /// entering the energy as `Psi(phi)/eps`.
    FloryHuggins,
    /// Polynomial double well `s^2 (1-s)^2 / eps` with minima at 0 and 1.
    Quartic,
}

/// Discrete form of the anchoring contribution to the chemical potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchoringForm {
    /// `-beta div((grad phi . d) d)`, the exact variational derivative of
    /// `beta/2 |grad phi . d|^2`.
    Tensorial,
    /// `-beta div(|d|^2 grad phi)`, the isotropic variant of the published
    /// discrete scheme. Not a gradient of any energy.
    IsotropicDiscrete,
}

/// Physical parameters of the emulsion model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysParams {
    /// Interface width.
    #[serde(alias = "epsilon")]
    pub eps: f64,
    /// Polarization well depth.
    pub alpha: f64,
    /// Anchoring strength.
    pub beta: f64,
    /// Frank elastic constant.
    pub kappa: f64,
    /// Coefficient of the `|grad phi|^4 / 4` regularisation.
    #[serde(default)]
    pub gamma: f64,
    /// Viscous Cahn-Hilliard coefficient.
    #[serde(default)]
    pub delta: f64,
    pub phi_cr: f64,
    /// Flory-Huggins temperature `Theta`.
    #[serde(default = "default_theta")]
    pub theta_fh: f64,
    /// Flory-Huggins critical temperature `Theta_0`.
    #[serde(default = "default_theta0")]
    pub theta0_fh: f64,
    pub potential: Potential,
    #[serde(default = "default_anchoring")]
    pub anchoring_form: AnchoringForm,
    /// Lower viscosity bound `nu_*`.
    #[serde(default = "default_nu")]
    pub nu_star: f64,
    /// Upper viscosity bound `nu^*`.
    #[serde(default = "default_nu")]
    pub nu_star_upper: f64,
}

fn default_theta() -> f64 {
    1.5
}
fn default_theta0() -> f64 {
    3.0
}
fn default_anchoring() -> AnchoringForm {
    AnchoringForm::Tensorial
}
fn default_nu() -> f64 {
    1.0
}

impl PhysParams {
    /// Parameters of the polymer-drop benchmark: eps = 0.1, alpha = 10,
    /// beta = 1, kappa = 0.1, phi_cr = 1/2 with the quartic potential.
    pub fn drop_benchmark() -> Self {
        PhysParams {
            eps: 0.1,
            alpha: 10.0,
            beta: 1.0,
            kappa: 0.1,
            gamma: 0.0,
            delta: 0.0,
            phi_cr: 0.5,
            theta_fh: default_theta(),
            theta0_fh: default_theta0(),
            potential: Potential::Quartic,
            anchoring_form: AnchoringForm::Tensorial,
            nu_star: 1.0,
            nu_star_upper: 1.0,
        }
    }

    /// Flory-Huggins landscape example: eps = 0.05, alpha = 15, Theta = 1.5,
    /// Theta_0 = 3, phi_cr = 0.
    pub fn fh_landscape_example() -> Self {
        PhysParams {
            eps: 0.05,
            alpha: 15.0,
            beta: 1.0,
            kappa: 0.1,
            phi_cr: 0.0,
            theta_fh: 1.5,
            theta0_fh: 3.0,
            potential: Potential::FloryHuggins,
            ..Self::drop_benchmark()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SimError::InvalidParameter(msg));
        let all = [
            self.eps,
            self.alpha,
            self.beta,
            self.kappa,
            self.gamma,
            self.delta,
            self.phi_cr,
            self.theta_fh,
            self.theta0_fh,
            self.nu_star,
            self.nu_star_upper,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if self.eps <= 0.0 {
            return bad(format!("eps must be > 0, got {}", self.eps));
        }
        if self.kappa <= 0.0 {
            return bad(format!("kappa must be > 0, got {}", self.kappa));
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ] {
            if v < 0.0 {
                return bad(format!("{name} must be >= 0, got {v}"));
            }
        }
        if !(self.phi_cr > -1.0 && self.phi_cr < 1.0) {
            return bad(format!("phi_cr must lie in (-1, 1), got {}", self.phi_cr));
        }
        if !(0.0 <= self.theta_fh && self.theta_fh < self.theta0_fh) {
            return bad(format!(
                "need 0 <= Theta < Theta_0, got Theta = {}, Theta_0 = {}",
                self.theta_fh, self.theta0_fh
            ));
        }
        if !(0.0 < self.nu_star && self.nu_star <= self.nu_star_upper) {
            return bad(format!(
                "need 0 < nu_* <= nu^*, got {} and {}",
                self.nu_star, self.nu_star_upper
            ));
        }
        Ok(())
    }

    /// Concentration-dependent viscosity, linear between `nu_*` (phi <= 0)
    /// and `nu^*` (phi >= 1). Lipschitz and bounded by construction.
    pub fn viscosity(&self, s: f64) -> f64 {
        self.nu_star + (self.nu_star_upper - self.nu_star) * s.clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        PhysParams::drop_benchmark().validate().unwrap();
        PhysParams::fh_landscape_example().validate().unwrap();
    }

    #[test]
    fn invariants_are_enforced() {
        let base = PhysParams::drop_benchmark();
        for broken in [
            PhysParams {
                eps: -1.0,
                ..base.clone()
            },
            PhysParams {
                kappa: 0.0,
                ..base.clone()
            },
            PhysParams {
                phi_cr: 1.0,
                ..base.clone()
            },
            PhysParams {
                theta_fh: 3.0,
                theta0_fh: 3.0,
                ..base.clone()
            },
            PhysParams {
                nu_star: 2.0,
                nu_star_upper: 1.0,
                ..base.clone()
            },
            PhysParams {
                beta: f64::NAN,
                ..base.clone()
            },
        ] {
            assert!(broken.validate().is_err(), "{broken:?}");
        }
    }

    #[test]
    fn viscosity_stays_within_bounds() {
        let p = PhysParams {
            nu_star: 0.5,
            nu_star_upper: 2.0,
            ..PhysParams::drop_benchmark()
        };
        for s in [-3.0, -0.1, 0.0, 0.3, 1.0, 7.0] {
            let nu = p.viscosity(s);
            assert!((0.5..=2.0).contains(&nu));
        }
    }
}
