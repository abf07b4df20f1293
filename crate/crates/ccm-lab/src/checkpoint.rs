//! Binary checkpoints.
//!
//! ```text
//! offset  size  field
//! 0       8     magic "CCMCKPT\0"
//! 8       4     format version (u32)
//! 12      8     basis scale σ (f64)
//! 20      8     mode count K (u64)
//! 28      8     sample count M (u64)
//! 36      8     time t (f64)
//! 44      16K   coefficients, (re, im) f64 pairs
//! 44+16K  4     CRC32 of all preceding bytes (u32)
//! ```
//! All numbers little-endian.

use std::path::Path;

use ccm::hardy::{Grid, HardyField};
use ccm::C;

use crate::error::{LabError, Result};

pub const MAGIC: &[u8; 8] = b"CCMCKPT\0";
pub const VERSION: u32 = 1;
const HEADER: usize = 44;

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub t: f64,
    pub field: HardyField<f64>,
}

pub fn encode(t: f64, u: &HardyField<f64>) -> Vec<u8> {
    let k = u.modes();
    let mut buf = Vec::with_capacity(HEADER + 16 * k + 4);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&u.grid().sigma().to_le_bytes());
    buf.extend_from_slice(&(k as u64).to_le_bytes());
    buf.extend_from_slice(&(u.grid().samples() as u64).to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    for z in u.coefficients() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    buf
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

fn u64_at(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint> {
    if bytes.len() < HEADER + 4 {
        return Err(LabError::Checkpoint(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(LabError::Checkpoint("bad magic".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(LabError::Checksum { stored, computed });
    }
    let version = u32::from_le_bytes(body[8..12].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(LabError::Checkpoint(format!("unsupported version {version}")));
    }
    let sigma = f64_at(body, 12);
    let k = u64_at(body, 20) as usize;
    let m = u64_at(body, 28) as usize;
    let t = f64_at(body, 36);
    if body.len() != HEADER + 16 * k {
        return Err(LabError::Checkpoint(format!("{k} modes need {} bytes, found {}", HEADER + 16 * k, body.len())));
    }
    let coef = (0..k).map(|n| C::new(f64_at(body, HEADER + 16 * n), f64_at(body, HEADER + 16 * n + 8))).collect();
    let grid = Grid::with_samples(sigma, k, m)?;
    Ok(Checkpoint { t, field: HardyField::new(grid, coef)? })
}

pub fn write(path: &Path, t: f64, u: &HardyField<f64>) -> Result<()> {
    std::fs::write(path, encode(t, u)).map_err(|e| LabError::io(path, e))
}

pub fn read(path: &Path) -> Result<Checkpoint> {
    let bytes = std::fs::read(path).map_err(|e| LabError::io(path, e))?;
    decode(&bytes)
}
