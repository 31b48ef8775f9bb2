//! Mesh files: STL (binary and ASCII, read and write), binary PLY with vertex
//! colors and VRML97 with vertex colors (write only).

mod ply;
mod stl;
mod wrl;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::mesh::MeshError;

pub use ply::{ply_bytes, write_ply};
pub use stl::{parse_stl, read_stl, stl_bytes, write_stl, StlDocument, StlFacet, StlFormat};
pub use wrl::{write_wrl, wrl_text};

/// Tool name and version written into file headers.
pub const GENERATOR: &str = concat!("mathsculpt ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum MeshIoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("mesh has no triangles")]
    Empty,
    #[error("{0} export needs per-vertex colors")]
    MissingColors(&'static str),
    #[error("malformed STL at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },
    #[error("truncated binary STL: header promises {expected} bytes, file has {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

impl MeshIoError {
    /// True for errors about file contents rather than file access.
    pub fn is_format_error(&self) -> bool {
        !matches!(self, MeshIoError::Io { .. })
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), MeshIoError> {
    fs::write(path, bytes).map_err(|source| MeshIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_file(path: &Path) -> Result<Vec<u8>, MeshIoError> {
    fs::read(path).map_err(|source| MeshIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// C's `%.9g` for a value that came from an `f32`.
pub(crate) fn fmt_g9(x: f64) -> String {
    const P: i32 = 9;
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // the exponent after rounding to P significant digits decides the style
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
