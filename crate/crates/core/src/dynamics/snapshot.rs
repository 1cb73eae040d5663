//! Binary snapshot layout, all little-endian:
//! `dim: u32, n: u32, ell: f64, time: f64`, then `re, im` as `f64` pairs per point.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::DynamicsError;
use crate::spectral::{Field, Grid};

pub fn write_snapshot(mut w: impl Write, f: &Field, t: f64) -> Result<(), DynamicsError> {
    let g = f.grid();
    let mut buf = Vec::with_capacity(24 + 16 * g.len());
    buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(g.n() as u32).to_le_bytes());
    buf.extend_from_slice(&g.ell().to_le_bytes());
    buf.extend_from_slice(&t.to_le_bytes());
    for z in f.values() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads one snapshot, honouring the point budget of the environment.
pub fn read_snapshot(mut r: impl Read) -> Result<(Field, f64), DynamicsError> {
    let mut head = [0u8; 24];
    r.read_exact(&mut head)?;
    let word = |i: usize| u32::from_le_bytes(head[i..i + 4].try_into().unwrap());
    let double = |i: usize| f64::from_le_bytes(head[i..i + 8].try_into().unwrap());
    let grid = Grid::from_env(word(0) as usize, word(4) as usize, double(8))?;
    let t = double(16);
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != 16 * grid.len() {
        return Err(DynamicsError::Snapshot(format!(
            "expected {} payload bytes, found {}",
            16 * grid.len(),
            payload.len()
        )));
    }
    let values = payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok((Field::new(grid, values)?, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = Grid::new(2, 8, 3.5).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new(x[0], -x[1])).unwrap();
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &f, 0.25).unwrap();
        assert_eq!(bytes.len(), 24 + 16 * 64);
        assert_eq!(&bytes[..4], &2u32.to_le_bytes());
        let (back, t) = read_snapshot(bytes.as_slice()).unwrap();
        assert_eq!(back, f);
        assert_eq!(t, 0.25);
        assert!(read_snapshot(&bytes[..bytes.len() - 8]).is_err());
    }
}
