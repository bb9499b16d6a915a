//! Run configuration, field snapshots, diagnostics CSV and image output.

mod config;
mod diagnostics;
mod image;
mod snapshot;

pub use config::{
    load_config, parse_config, AuxInit, FlowConfig, GridConfig, InitialConfig, OutputConfig,
    RunConfig, IMAGE_FIELDS,
};
pub use diagnostics::{
    append_diagnostics, DiagnosticsRow, DiagnosticsWriter, RunOutput, DIAGNOSTICS_HEADER,
};
pub use image::{encode_ppm, field_by_name, render_field_image, Palette};
pub use snapshot::{
    read_snapshot, write_snapshot, SnapshotHeader, SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
};
