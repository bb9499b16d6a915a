//! Binary field snapshots: one UTF-8 header line followed by the fields as
//! row-major little-endian binary64, in header order, components
//! consecutively.

use std::fs;
use std::path::Path;

use crate::error::{Result, SimError};
use crate::flow::FlowState;
use crate::grid::{Grid2D, ScalarField, VectorField2};
use crate::state::State;

pub const SNAPSHOT_MAGIC: &str = "LCEM-SNAPSHOT";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub version: u32,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub x0: f64,
    pub y0: f64,
    pub t: f64,
    /// Field names with their component counts.
    pub fields: Vec<(String, usize)>,
}

impl SnapshotHeader {
    fn to_line(&self) -> String {
        let fields: Vec<String> = self
            .fields
            .iter()
            .map(|(n, c)| format!("{n}:{c}"))
            .collect();
        format!(
            "{SNAPSHOT_MAGIC} {} nx={} ny={} lx={:e} ly={:e} x0={:e} y0={:e} t={:e} fields={}\n",
            self.version,
            self.nx,
            self.ny,
            self.lx,
            self.ly,
            self.x0,
            self.y0,
            self.t,
            fields.join(",")
        )
    }

    fn parse(line: &str) -> std::result::Result<Self, String> {
        let mut parts = line.split_whitespace();
        if parts.next() != Some(SNAPSHOT_MAGIC) {
            return Err("missing snapshot magic".into());
        }
        let version: u32 = parts
            .next()
            .ok_or("missing version")?
            .parse()
            .map_err(|e| format!("version: {e}"))?;
        if version != SNAPSHOT_VERSION {
            return Err(format!("unsupported snapshot version {version}"));
        }
        let mut h = SnapshotHeader {
            version,
            nx: 0,
            ny: 0,
            lx: 0.0,
            ly: 0.0,
            x0: 0.0,
            y0: 0.0,
            t: 0.0,
            fields: vec![],
        };
        let mut seen = Vec::new();
        for kv in parts {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| format!("malformed entry '{kv}'"))?;
            let num = |v: &str| v.parse::<f64>().map_err(|e| format!("{k}: {e}"));
            match k {
                "nx" => h.nx = v.parse().map_err(|e| format!("nx: {e}"))?,
                "ny" => h.ny = v.parse().map_err(|e| format!("ny: {e}"))?,
                "lx" => h.lx = num(v)?,
                "ly" => h.ly = num(v)?,
                "x0" => h.x0 = num(v)?,
                "y0" => h.y0 = num(v)?,
                "t" => h.t = num(v)?,
                "fields" => {
                    for f in v.split(',') {
                        let (name, c) = f
                            .split_once(':')
                            .ok_or_else(|| format!("malformed field '{f}'"))?;
                        let c: usize = c.parse().map_err(|e| format!("field {name}: {e}"))?;
                        if !(1..=2).contains(&c) {
                            return Err(format!("field {name} has {c} components"));
                        }
                        h.fields.push((name.to_string(), c));
                    }
                }
                _ => return Err(format!("unknown header key '{k}'")),
            }
            seen.push(k.to_string());
        }
        for req in ["nx", "ny", "lx", "ly", "x0", "y0", "t", "fields"] {
            if !seen.iter().any(|s| s == req) {
                return Err(format!("header lacks '{req}'"));
            }
        }
        Ok(h)
    }

    pub fn payload_len(&self) -> usize {
        self.fields.iter().map(|(_, c)| c).sum::<usize>() * self.nx * self.ny * 8
    }
}

/// Writes `phi, d, mu, h` and, with flow, `u, p_star`.
pub fn write_snapshot(state: &State, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let g = state.grid();
    let mut fields = vec![("phi", 1), ("d", 2), ("mu", 1), ("h", 2)];
    if state.flow.is_some() {
        fields.extend([("u", 2), ("p_star", 1)]);
    }
    let header = SnapshotHeader {
        version: SNAPSHOT_VERSION,
        nx: g.nx(),
        ny: g.ny(),
        lx: g.lx(),
        ly: g.ly(),
        x0: g.origin().0,
        y0: g.origin().1,
        t: state.t,
        fields: fields.iter().map(|(n, c)| (n.to_string(), *c)).collect(),
    };
    let mut buf = header.to_line().into_bytes();
    buf.reserve(header.payload_len());
    let mut put = |v: &[f64]| {
        for x in v {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    };
    put(state.phi.values());
    put(state.d.xs());
    put(state.d.ys());
    put(state.mu.values());
    put(state.h.xs());
    put(state.h.ys());
    if let Some(f) = &state.flow {
        put(f.u.xs());
        put(f.u.ys());
        put(f.p_star.values());
    }
    fs::write(path, buf).map_err(|e| SimError::io(path, e))
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<State> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| SimError::io(path, e))?;
    let fmt = |msg: String| SimError::Format {
        path: path.to_path_buf(),
        msg,
    };
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| fmt("no header line".into()))?;
    let line = std::str::from_utf8(&bytes[..nl]).map_err(|_| fmt("header is not UTF-8".into()))?;
    let header = SnapshotHeader::parse(line).map_err(fmt)?;
    let payload = &bytes[nl + 1..];
    if payload.len() != header.payload_len() {
        return Err(fmt(format!(
            "payload has {} bytes, header implies {}",
            payload.len(),
            header.payload_len()
        )));
    }
    let grid = Grid2D::with_origin(
        header.nx, header.ny, header.lx, header.ly, header.x0, header.y0,
    )?;
    let n = grid.len();
    let mut chunks = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    let mut take = || -> Vec<f64> { chunks.by_ref().take(n).collect() };
    let mut scalars = std::collections::HashMap::new();
    let mut vectors = std::collections::HashMap::new();
    for (name, c) in &header.fields {
        if *c == 1 {
            scalars.insert(name.as_str(), ScalarField::from_vec(grid, take())?);
        } else {
            let x = take();
            let y = take();
            vectors.insert(
                name.as_str(),
                VectorField2::from_components(
                    ScalarField::from_vec(grid, x)?,
                    ScalarField::from_vec(grid, y)?,
                )?,
            );
        }
    }
    let phi = scalars
        .remove("phi")
        .ok_or_else(|| fmt("snapshot lacks phi".into()))?;
    let d = vectors
        .remove("d")
        .ok_or_else(|| fmt("snapshot lacks d".into()))?;
    let mut state = State::new(header.t, phi, d)?;
    if let Some(mu) = scalars.remove("mu") {
        state.mu = mu;
    }
    if let Some(h) = vectors.remove("h") {
        state.h = h;
    }
    if let Some(u) = vectors.remove("u") {
        let p_star = scalars
            .remove("p_star")
            .unwrap_or_else(|| ScalarField::zeros(grid));
        state.flow = Some(FlowState { u, p_star });
    }
    state.check_finite()?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        let h = SnapshotHeader {
            version: 1,
            nx: 16,
            ny: 8,
            lx: 2.0,
            ly: 0.1 + 0.2,
            x0: -1.0,
            y0: -0.15,
            t: 1.0 / 3.0,
            fields: vec![("phi".into(), 1), ("d".into(), 2)],
        };
        let line = h.to_line();
        assert_eq!(SnapshotHeader::parse(line.trim_end()).unwrap(), h);
    }

    #[test]
    fn bad_headers_are_rejected() {
        assert!(SnapshotHeader::parse("NOPE 1 nx=8").is_err());
        assert!(SnapshotHeader::parse("LCEM-SNAPSHOT 2 nx=8").is_err());
        assert!(SnapshotHeader::parse("LCEM-SNAPSHOT 1 nx=8 ny=8").is_err());
    }
}
