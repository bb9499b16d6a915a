//! TOML run configuration.
//!
//! ```toml
//! [grid]
//! nx = 128
//! ny = 128
//! lx = 2.0
//! ly = 2.0
//!
//! [physics]
//! eps = 0.1
//! alpha = 10.0
//! beta = 1.0
//! kappa = 0.1
//! phi_cr = 0.5
//! potential = "quartic"
//!
//! [numerics]
//! dt = 1e-4
//! theta = 0.5
//!
//! [initial]
//! preset = "drop_benchmark"
//!
//! [output]
//! dir = "out"
//!
//! [flow]
//! enabled = false
//! ```
//!
//! Unknown keys anywhere are errors. `grid`, `physics`, `numerics` and
//! `initial` are required; `output` and `flow` are optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::image::Palette;
use super::snapshot::read_snapshot;
use crate::dynamics::NumParams;
use crate::energy::PhysParams;
use crate::error::{Result, SimError};
use crate::flow::FlowState;
use crate::grid::{Grid2D, ScalarField, VectorField2};
use crate::state::State;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    /// Lower-left corner; defaults to centring the box on the origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<f64>,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid2D> {
        let x0 = self.x0.unwrap_or(-0.5 * self.lx);
        let y0 = self.y0.unwrap_or(-0.5 * self.ly);
        Grid2D::with_origin(self.nx, self.ny, self.lx, self.ly, x0, y0)
    }
}

/// Initial `(mu, h)`: zero, or the variational derivatives of the initial
/// fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxInit {
    Zero,
    Derived,
}

fn default_radius() -> f64 {
    0.5
}
fn default_width() -> f64 {
    0.01
}
fn default_d0() -> [f64; 2] {
    [0.0, 0.95]
}
fn default_one() -> f64 {
    1.0
}
fn aux_zero() -> AuxInit {
    AuxInit::Zero
}
fn aux_derived() -> AuxInit {
    AuxInit::Derived
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// `phi_0 = 1/2 + 1/2 tanh((r - radius)/width)`: a polymer drop
    /// (`phi = 0`) in a liquid-crystal matrix (`phi = 1`) with uniform `d_0`.
    DropBenchmark {
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default = "default_d0")]
        d0: [f64; 2],
        #[serde(default = "aux_zero")]
        aux: AuxInit,
    },
    /// Constant `phi` and `d`.
    Homogeneous {
        #[serde(default = "default_one")]
        phi: f64,
        #[serde(default = "default_d0")]
        d0: [f64; 2],
        #[serde(default = "aux_derived")]
        aux: AuxInit,
    },
    /// Restart from a snapshot file, relative paths resolved against the
    /// configuration file.
    FromSnapshot { path: PathBuf },
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_images() -> Vec<String> {
    vec!["phi".into(), "d_mag".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Overrides `numerics.snapshot_every` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<usize>,
    /// Fields rendered from the final state: `phi`, `mu`, `d_x`, `d_y`,
    /// `d_mag`, `h_mag`, `u_mag`, `p_star`.
    #[serde(default = "default_images")]
    pub images: Vec<String>,
    #[serde(default)]
    pub palette: Palette,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_dir(),
            snapshot_every: None,
            images: default_images(),
            palette: Palette::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    #[serde(default)]
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub physics: PhysParams,
    pub numerics: NumParams,
    pub initial: InitialConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub flow: FlowConfig,
    /// Directory of the file the configuration came from.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

const REQUIRED_SECTIONS: [&str; 4] = ["grid", "physics", "numerics", "initial"];

impl RunConfig {
    /// The polymer-drop benchmark on a 128 x 128 grid over `[-1, 1]^2`.
    pub fn drop_benchmark() -> Self {
        RunConfig {
            grid: GridConfig {
                nx: 128,
                ny: 128,
                lx: 2.0,
                ly: 2.0,
                x0: None,
                y0: None,
            },
            physics: PhysParams::drop_benchmark(),
            numerics: NumParams::default(),
            initial: InitialConfig::DropBenchmark {
                radius: default_radius(),
                width: default_width(),
                d0: default_d0(),
                aux: AuxInit::Zero,
            },
            output: OutputConfig::default(),
            flow: FlowConfig::default(),
            base_dir: PathBuf::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        self.physics.validate()?;
        self.numerics.validate()?;
        match &self.initial {
            InitialConfig::DropBenchmark {
                radius, width, d0, ..
            } => {
                if !(*radius > 0.0 && *width > 0.0) || !d0.iter().all(|v| v.is_finite()) {
                    return Err(SimError::Config(
                        "drop_benchmark needs radius > 0, width > 0 and finite d0".into(),
                    ));
                }
            }
            InitialConfig::Homogeneous { phi, d0, .. } => {
                if !phi.is_finite() || !d0.iter().all(|v| v.is_finite()) {
                    return Err(SimError::Config(
                        "homogeneous preset needs finite phi and d0".into(),
                    ));
                }
            }
            InitialConfig::FromSnapshot { path } => {
                let p = self.resolve(path);
                if !p.is_file() {
                    return Err(SimError::Config(format!(
                        "snapshot {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        for name in &self.output.images {
            if !IMAGE_FIELDS.contains(&name.as_str()) {
                return Err(SimError::Config(format!(
                    "unknown image field '{name}' (one of {})",
                    IMAGE_FIELDS.join(", ")
                )));
            }
            if !self.flow.enabled && (name == "u_mag" || name == "p_star") {
                return Err(SimError::Config(format!(
                    "image field '{name}' needs flow.enabled = true"
                )));
            }
        }
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn snapshot_every(&self) -> usize {
        self.output
            .snapshot_every
            .unwrap_or(self.numerics.snapshot_every)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Builds the initial state described by the `initial` and `flow`
    /// sections.
    pub fn initial_state(&self) -> Result<State> {
        let g = self.grid.build()?;
        let p = &self.physics;
        let mut state = match &self.initial {
            InitialConfig::DropBenchmark {
                radius,
                width,
                d0,
                aux,
            } => {
                let phi = ScalarField::from_fn(g, |x, y| {
                    0.5 + 0.5 * ((x.hypot(y) - radius) / width).tanh()
                });
                let d = VectorField2::constant(g, d0[0], d0[1]);
                with_aux(State::new(0.0, phi, d)?, *aux, p)?
            }
            InitialConfig::Homogeneous { phi, d0, aux } => {
                let s = State::new(
                    0.0,
                    ScalarField::constant(g, *phi),
                    VectorField2::constant(g, d0[0], d0[1]),
                )?;
                with_aux(s, *aux, p)?
            }
            InitialConfig::FromSnapshot { path } => {
                let s = read_snapshot(self.resolve(path))?;
                if s.grid() != &g {
                    return Err(SimError::Config(format!(
                        "snapshot grid {:?} differs from the configured grid {:?}",
                        s.grid(),
                        g
                    )));
                }
                s
            }
        };
        if self.flow.enabled && state.flow.is_none() {
            state.flow = Some(FlowState::at_rest(g));
        } else if !self.flow.enabled {
            state.flow = None;
        }
        Ok(state)
    }
}

fn with_aux(s: State, aux: AuxInit, p: &PhysParams) -> Result<State> {
    match aux {
        AuxInit::Zero => Ok(s),
        AuxInit::Derived => s.with_derived(p),
    }
}

/// Field names accepted in `output.images`.
pub const IMAGE_FIELDS: [&str; 8] = [
    "phi", "mu", "d_x", "d_y", "d_mag", "h_mag", "u_mag", "p_star",
];

/// Parses and validates configuration text; relative paths are resolved
/// against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| SimError::Config(e.to_string()))?;
    let missing: Vec<&str> = REQUIRED_SECTIONS
        .iter()
        .copied()
        .filter(|s| !table.contains_key(*s))
        .collect();
    if !missing.is_empty() {
        return Err(SimError::Config(format!(
            "missing sections: {}",
            missing.join(", ")
        )));
    }
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
    cfg.base_dir = base_dir.to_path_buf();
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config(&text, &base).map_err(|e| match e {
        SimError::Config(msg) => SimError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
