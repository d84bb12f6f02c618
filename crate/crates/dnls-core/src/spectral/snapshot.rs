//! Binary field snapshots.
//!
//! Layout (little endian): magic `DNLS`, version u32, modes u32, period f64,
//! then `modes` pairs (re, im) of f64 coefficients in storage order.

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;

use super::field::FieldState;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::io::write_atomic;

pub const MAGIC: &[u8; 4] = b"DNLS";
pub const VERSION: u32 = 1;

pub fn encode(q: &FieldState) -> Vec<u8> {
    let g = q.grid();
    let mut out = Vec::with_capacity(20 + 16 * g.modes());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.modes() as u32).to_le_bytes());
    out.extend_from_slice(&g.period().to_le_bytes());
    for c in q.coefficients() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<FieldState> {
    if bytes.len() < 20 || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing DNLS header".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let modes = u32_at(8) as usize;
    let period = f64_at(12);
    let grid = Grid::new(modes, period)?;
    if bytes.len() != 20 + 16 * modes {
        return Err(Error::Format(format!(
            "expected {} bytes, found {}",
            20 + 16 * modes,
            bytes.len()
        )));
    }
    let coeffs = (0..modes)
        .map(|i| Complex64::new(f64_at(20 + 16 * i), f64_at(28 + 16 * i)))
        .collect();
    FieldState::from_coefficients(grid, coeffs)
}

pub fn write_snapshot(path: &Path, q: &FieldState) -> Result<()> {
    write_atomic(path, &encode(q))
}

pub fn read_snapshot(path: &Path) -> Result<FieldState> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    decode(&buf)
}
