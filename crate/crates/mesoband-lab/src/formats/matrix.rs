//! Binary storage of sampled matrices.
//!
//! Little-endian layout:
//!
//! | field | type |
//! |---|---|
//! | magic `BNDM` | 4 bytes |
//! | version (1) | u16 |
//! | d | u32 |
//! | L, W | u64, u64 |
//! | β | u8 |
//! | seed | u64 |
//! | profile (0 step, 1 custom) | u8 |
//! | K, offsets per row | u64 |
//! | K × (d × i64 offset, f64 weight) | |
//! | N × K × (f64 re, f64 im), `H_{x, x + o_k}` | |

use crate::error::{LabError, Result};
use mesoband::ensemble::{BandMatrix, Beta};
use mesoband::lattice::{BandProfile, CustomProfile, TorusGeometry};
use mesoband::Complex64;
use std::io::{Read, Write};

pub const MAGIC: &[u8; 4] = b"BNDM";
const VERSION: u16 = 1;

pub fn write_matrix<W: Write>(h: &BandMatrix, mut out: W) -> Result<()> {
    let g = h.geometry();
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(g.dim() as u32).to_le_bytes())?;
    out.write_all(&(g.side() as u64).to_le_bytes())?;
    out.write_all(&(g.width() as u64).to_le_bytes())?;
    out.write_all(&[h.beta().index()])?;
    out.write_all(&h.seed().to_le_bytes())?;
    out.write_all(&[u8::from(!g.is_step())])?;
    out.write_all(&(g.band_len() as u64).to_le_bytes())?;
    for k in 0..g.band_len() {
        for c in g.band_offset(k) {
            out.write_all(&c.to_le_bytes())?;
        }
        out.write_all(&g.band_weight(k).to_le_bytes())?;
    }
    for v in h.band_values() {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

fn take<const B: usize, R: Read>(r: &mut R) -> Result<[u8; B]> {
    let mut b = [0u8; B];
    r.read_exact(&mut b).map_err(|e| LabError::format("matrix file", e.to_string()))?;
    Ok(b)
}

fn small(v: u64, what: &str) -> Result<usize> {
    usize::try_from(v)
        .ok()
        .filter(|&x| x < 1 << 40)
        .ok_or_else(|| LabError::format("matrix file", format!("{what} = {v} out of range")))
}

/// Reads a matrix, re-validating geometry, entry moduli and Hermiticity.
pub fn read_matrix<R: Read>(mut r: R) -> Result<BandMatrix> {
    if &take::<4, _>(&mut r)? != MAGIC {
        return Err(LabError::format("matrix file", "bad magic"));
    }
    let version = u16::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(LabError::format("matrix file", format!("unsupported version {version}")));
    }
    let d = u32::from_le_bytes(take(&mut r)?) as usize;
    let l = small(u64::from_le_bytes(take(&mut r)?), "L")?;
    let w = small(u64::from_le_bytes(take(&mut r)?), "W")?;
    let beta = Beta::from_index(take::<1, _>(&mut r)?[0])?;
    let seed = u64::from_le_bytes(take(&mut r)?);
    let custom = match take::<1, _>(&mut r)?[0] {
        0 => false,
        1 => true,
        f => return Err(LabError::format("matrix file", format!("unknown profile flag {f}"))),
    };
    let k_len = small(u64::from_le_bytes(take(&mut r)?), "K")?;
    let mut entries = Vec::with_capacity(k_len.min(1 << 20));
    for _ in 0..k_len {
        let mut o = Vec::with_capacity(d);
        for _ in 0..d {
            o.push(i64::from_le_bytes(take(&mut r)?));
        }
        entries.push((o, f64::from_le_bytes(take(&mut r)?)));
    }
    let profile =
        if custom { BandProfile::Custom(CustomProfile::new(d, entries.clone())?) } else { BandProfile::Step };
    let g = TorusGeometry::new(d, l, w, profile)?;
    let same = g.band_len() == k_len
        && entries.iter().enumerate().all(|(k, (o, v))| g.band_offset(k) == o.as_slice() && g.band_weight(k) == *v);
    if !same {
        return Err(LabError::format("matrix file", "band offsets disagree with the declared profile"));
    }
    let mut values = Vec::with_capacity(g.sites() * k_len);
    for _ in 0..g.sites() * k_len {
        let re = f64::from_le_bytes(take(&mut r)?);
        let im = f64::from_le_bytes(take(&mut r)?);
        values.push(Complex64::new(re, im));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(LabError::format("matrix file", "trailing bytes"));
    }
    Ok(BandMatrix::from_band_values(&g, beta, seed, values)?)
}
