//! Heat-map output as binary PPM (P6).
//!
//! Values are mapped linearly from `[min, max]` to `[0, 1]` (a constant field
//! maps to 0) and then through the palette. The first image row is the
//! largest `y`, so images appear with `y` pointing up.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::grid::ScalarField;
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    /// Black to white.
    Grayscale,
    /// Dark blue, teal, green, yellow: piecewise-linear through five anchors
    /// sampled from the viridis map.
    #[default]
    Viridis,
    /// Blue, white, red.
    Diverging,
}

impl std::str::FromStr for Palette {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grayscale" | "gray" => Ok(Palette::Grayscale),
            "viridis" => Ok(Palette::Viridis),
            "diverging" => Ok(Palette::Diverging),
            _ => Err(SimError::Config(format!(
                "unknown palette '{s}' (grayscale, viridis, diverging)"
            ))),
        }
    }
}

const VIRIDIS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];
const DIVERGING: [[f64; 3]; 3] = [
    [59.0, 76.0, 192.0],
    [240.0, 240.0, 240.0],
    [180.0, 4.0, 38.0],
];

fn lerp_anchors(anchors: &[[f64; 3]], s: f64) -> [u8; 3] {
    let m = anchors.len() - 1;
    let pos = s * m as f64;
    let i = (pos.floor() as usize).min(m - 1);
    let f = pos - i as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (anchors[i][c] + f * (anchors[i + 1][c] - anchors[i][c]))
            .round()
            .clamp(0.0, 255.0) as u8;
    }
    out
}

impl Palette {
    /// Colour for a normalized value `s` in `[0, 1]`.
    pub fn color(self, s: f64) -> [u8; 3] {
        let s = if s.is_finite() {
            s.clamp(0.0, 1.0)
        } else {
            0.0
        };
        match self {
            Palette::Grayscale => {
                let v = (255.0 * s).round() as u8;
                [v, v, v]
            }
            Palette::Viridis => lerp_anchors(&VIRIDIS, s),
            Palette::Diverging => lerp_anchors(&DIVERGING, s),
        }
    }
}

/// PPM bytes of a field, one pixel per grid node.
pub fn encode_ppm(field: &ScalarField, palette: Palette) -> Vec<u8> {
    let g = field.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let (lo, hi) = (field.min(), field.max());
    let span = hi - lo;
    let mut out = format!("P6\n{nx} {ny}\n255\n").into_bytes();
    out.reserve(3 * nx * ny);
    for j in (0..ny).rev() {
        for i in 0..nx {
            let v = field.values()[j * nx + i];
            let s = if span > 0.0 { (v - lo) / span } else { 0.0 };
            out.extend_from_slice(&palette.color(s));
        }
    }
    out
}

pub fn render_field_image(
    field: &ScalarField,
    path: impl AsRef<Path>,
    palette: Palette,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_ppm(field, palette)).map_err(|e| SimError::io(path, e))
}

/// Scalar field of a state by name: `phi`, `mu`, `d_x`, `d_y`, `d_mag`,
/// `h_mag`, and for states with flow `u_mag` and `p_star`.
pub fn field_by_name(state: &State, name: &str) -> Result<ScalarField> {
    let flow = || {
        state
            .flow
            .as_ref()
            .ok_or_else(|| SimError::Config(format!("field '{name}' needs a state with flow")))
    };
    Ok(match name {
        "phi" => state.phi.clone(),
        "mu" => state.mu.clone(),
        "d_x" => state.d.component_x(),
        "d_y" => state.d.component_y(),
        "d_mag" => state.d.magnitude(),
        "h_mag" => state.h.magnitude(),
        "u_mag" => flow()?.u.magnitude(),
        "p_star" => flow()?.p_star.clone(),
        _ => {
            return Err(SimError::Config(format!(
                "unknown field '{name}' (one of {})",
                super::config::IMAGE_FIELDS.join(", ")
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    #[test]
    fn constant_field_is_one_colour() {
        let f = ScalarField::constant(Grid2D::unit_square(8).unwrap(), 3.0);
        let bytes = encode_ppm(&f, Palette::Viridis);
        let header = b"P6\n8 8\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let px = &bytes[header.len()..];
        assert_eq!(px.len(), 3 * 64);
        assert!(px.chunks(3).all(|c| c == [68, 1, 84]));
    }

    #[test]
    fn palette_end_points() {
        assert_eq!(Palette::Grayscale.color(0.0), [0, 0, 0]);
        assert_eq!(Palette::Grayscale.color(1.0), [255, 255, 255]);
        assert_eq!(Palette::Viridis.color(1.0), [253, 231, 37]);
        assert_eq!(Palette::Diverging.color(0.5), [240, 240, 240]);
    }

    #[test]
    fn top_row_is_largest_y() {
        let g = Grid2D::unit_square(8).unwrap();
        let f = ScalarField::from_fn(g, |_, y| y);
        let bytes = encode_ppm(&f, Palette::Grayscale);
        let px = &bytes[b"P6\n8 8\n255\n".len()..];
        assert!(px[0] > px[px.len() - 1]);
    }
}
