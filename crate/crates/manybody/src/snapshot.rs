//! Binary snapshots: a 32-byte little-endian header followed by complex f64 pairs.
//!
//! Header: magic `HUSI`, version u16, d u16, M u32, N u32, time f64, hbar f64.
//! States use version 1. Phase-space fields reuse the layout with version
//! `0x0100 | k`, `M` holding the q-count and `N` the p-count. The box length is
//! not stored; readers supply it.

use std::io::{Read, Write};
use std::path::Path;

use husimi_grid::GridSpec;
use num_complex::Complex64;

use crate::{ManyBodyError, ManyBodyState};

pub const MAGIC: &[u8; 4] = b"HUSI";
pub const STATE_VERSION: u16 = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Header {
    pub version: u16,
    pub d: u16,
    pub m: u32,
    pub n: u32,
    pub time: f64,
    pub hbar: f64,
}

pub fn write(w: &mut impl Write, h: &Header, data: &[Complex64]) -> Result<(), ManyBodyError> {
    w.write_all(MAGIC)?;
    w.write_all(&h.version.to_le_bytes())?;
    w.write_all(&h.d.to_le_bytes())?;
    w.write_all(&h.m.to_le_bytes())?;
    w.write_all(&h.n.to_le_bytes())?;
    w.write_all(&h.time.to_le_bytes())?;
    w.write_all(&h.hbar.to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * data.len());
    for z in data {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read(r: &mut impl Read) -> Result<(Header, Vec<Complex64>), ManyBodyError> {
    let mut head = [0u8; 32];
    r.read_exact(&mut head)?;
    if &head[0..4] != MAGIC {
        return Err(ManyBodyError::Snapshot("bad magic".into()));
    }
    let u16_at = |i: usize| u16::from_le_bytes([head[i], head[i + 1]]);
    let u32_at = |i: usize| u32::from_le_bytes(head[i..i + 4].try_into().unwrap());
    let f64_at = |i: usize| f64::from_le_bytes(head[i..i + 8].try_into().unwrap());
    let h = Header {
        version: u16_at(4),
        d: u16_at(6),
        m: u32_at(8),
        n: u32_at(12),
        time: f64_at(16),
        hbar: f64_at(24),
    };
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if rest.len() % 16 != 0 {
        return Err(ManyBodyError::Snapshot(format!(
            "payload of {} bytes is not a whole number of complex values",
            rest.len()
        )));
    }
    let data = rest
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Ok((h, data))
}

impl ManyBodyState {
    pub fn header(&self) -> Header {
        Header {
            version: STATE_VERSION,
            d: self.grid.d as u16,
            m: self.grid.m as u32,
            n: self.grid.n as u32,
            time: self.time,
            hbar: self.grid.hbar,
        }
    }

    pub fn write_snapshot(&self, path: &Path) -> Result<(), ManyBodyError> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        write(&mut f, &self.header(), &self.amps)?;
        f.flush()?;
        Ok(())
    }

    /// Reads a state snapshot; `l` is the box length, which the format does not carry.
    pub fn read_snapshot(path: &Path, l: f64) -> Result<Self, ManyBodyError> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        let (h, data) = read(&mut f)?;
        if h.version != STATE_VERSION {
            return Err(ManyBodyError::Snapshot(format!(
                "version {:#06x} is not a state",
                h.version
            )));
        }
        let grid = GridSpec::with_budget(
            h.d as usize,
            h.m as usize,
            l,
            h.hbar,
            h.n as usize,
            u128::MAX,
        )?;
        ManyBodyState::new(grid, data, h.time)
    }
}
