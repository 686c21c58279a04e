//! Binary dump of a meeting-time table.
//!
//! Layout, all little-endian: `n: u64`, `tolerance: f64`, `residual: f64`,
//! then the strict upper triangle (`i < j`) in row-major order as `f64`.

use std::path::Path;

use super::MeetingTimes;
use crate::error::{Error, Result};

const HEADER_LEN: usize = 24;

pub fn encode_tau_dump(mt: &MeetingTimes) -> Vec<u8> {
    let n = mt.n();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * n * n.saturating_sub(1) / 2);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&mt.tolerance.to_le_bytes());
    out.extend_from_slice(&mt.solver_residual.to_le_bytes());
    for i in 0..n {
        for j in i + 1..n {
            out.extend_from_slice(&mt.get(i, j).to_le_bytes());
        }
    }
    out
}

fn f64_at(bytes: &[u8], offset: usize) -> f64 {
    let mut b = [0u8; 8];
    b.copy_from_slice(&bytes[offset..offset + 8]);
    f64::from_le_bytes(b)
}

pub fn decode_tau_dump(bytes: &[u8]) -> Result<MeetingTimes> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Dump(format!(
            "{} bytes is shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    let mut nb = [0u8; 8];
    nb.copy_from_slice(&bytes[..8]);
    let n = u64::from_le_bytes(nb);
    let tolerance = f64_at(bytes, 8);
    let residual = f64_at(bytes, 16);
    if n == 0 {
        return Err(Error::Dump("node count is zero".into()));
    }
    let body = bytes.len() - HEADER_LEN;
    let expected = n
        .checked_mul(n - 1)
        .map(|v| v / 2)
        .and_then(|pairs| pairs.checked_mul(8));
    if expected != Some(body as u64) {
        return Err(Error::Dump(format!(
            "body has {body} bytes, expected {} for n = {n}",
            expected.map_or_else(|| "overflow".to_string(), |e| e.to_string())
        )));
    }
    if !(tolerance.is_finite() && tolerance >= 0.0 && residual.is_finite() && residual >= 0.0) {
        return Err(Error::Dump(
            "tolerance and residual must be finite and >= 0".into(),
        ));
    }
    let n = n as usize;
    let mut tau = vec![0.0; n * n];
    let mut offset = HEADER_LEN;
    for i in 0..n {
        for j in i + 1..n {
            let v = f64_at(bytes, offset);
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Dump(format!(
                    "entry ({i}, {j}) = {v} is not a finite non-negative time"
                )));
            }
            tau[i * n + j] = v;
            tau[j * n + i] = v;
            offset += 8;
        }
    }
    Ok(MeetingTimes::from_parts(n, tau, tolerance, residual))
}

pub fn write_tau_dump(mt: &MeetingTimes, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_tau_dump(mt)).map_err(|e| Error::io(path, e))
}

pub fn read_tau_dump(path: impl AsRef<Path>) -> Result<MeetingTimes> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_tau_dump(&bytes)
}
