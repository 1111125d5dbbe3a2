//! Binary field snapshots (`.epfs`).
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic   b"EPFS"
//! version u32 (currently 1)
//! n1, n2, n3  u32
//! l3      f64
//! ncomp   u32
//! values  f64 * (n1*n2*n3*ncomp), i3 slowest, then i2, then i1,
//!         component innermost
//! ```
//!
//! Values are written bit-for-bit, so write/read round-trips are exact.

use crate::error::{Result, SolverError};
use crate::grid::{ScalarField, SlabGrid};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"EPFS";
pub const VERSION: u32 = 1;

/// Write any number of components that share one grid.
pub fn write_snapshot(path: &Path, grid: SlabGrid, comps: &[&ScalarField]) -> Result<()> {
    for c in comps {
        if c.grid != grid {
            return Err(SolverError::GridMismatch(c.grid, grid));
        }
    }
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for n in [grid.n1, grid.n2, grid.n3] {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    w.write_all(&grid.l3.to_le_bytes())?;
    w.write_all(&(comps.len() as u32).to_le_bytes())?;
    for i3 in 0..grid.n3 {
        for i2 in 0..grid.n2 {
            for i1 in 0..grid.n1 {
                for c in comps {
                    w.write_all(&c.at(i1, i2, i3).to_le_bytes())?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a snapshot back; returns the grid and the component fields.
pub fn read_snapshot(path: &Path) -> Result<(SlabGrid, Vec<ScalarField>)> {
    let file = std::fs::File::open(path)?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SolverError::Snapshot(format!(
            "bad magic {:?}, expected {:?}",
            magic, MAGIC
        )));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(SolverError::Snapshot(format!(
            "unsupported version {version}, expected {VERSION}"
        )));
    }
    let n1 = read_u32(&mut r)? as usize;
    let n2 = read_u32(&mut r)? as usize;
    let n3 = read_u32(&mut r)? as usize;
    let l3 = read_f64(&mut r)?;
    let grid = SlabGrid::new(n1, n2, n3, l3)
        .map_err(|e| SolverError::Snapshot(format!("invalid header grid: {e}")))?;
    let ncomp = read_u32(&mut r)? as usize;

    let mut comps = vec![ScalarField::zeros(grid); ncomp];
    for i3 in 0..n3 {
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                for comp in comps.iter_mut() {
                    *comp.at_mut(i1, i2, i3) = read_f64(&mut r)?;
                }
            }
        }
    }
    // trailing bytes indicate a corrupt or mis-sized file
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(SolverError::Snapshot("trailing bytes after payload".into()));
    }
    Ok((grid, comps))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let grid = SlabGrid::new(3, 4, 6, 1.7).unwrap();
        // values with awkward bit patterns, including signed zero and subnormals
        let a = ScalarField::from_fn(grid, |x1, x2, x3| {
            if x1 == 0.0 && x2 == 0.0 {
                -0.0
            } else {
                (x1 * 1.0e308).sin() * 1.0e-310 + x3 / 3.0 + x2
            }
        });
        let b = ScalarField::from_fn(grid, |x1, _, x3| (x1 - 0.5) * (x3 * 7.31).tan());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.epfs");
        write_snapshot(&path, grid, &[&a, &b]).unwrap();
        let (g2, comps) = read_snapshot(&path).unwrap();
        assert_eq!(g2, grid);
        assert_eq!(comps.len(), 2);
        for (orig, read) in [(&a, &comps[0]), (&b, &comps[1])] {
            for (x, y) in orig.data().iter().zip(read.data()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.epfs");
        std::fs::write(&path, b"NOPE0123456789").unwrap();
        match read_snapshot(&path) {
            Err(SolverError::Snapshot(msg)) => assert!(msg.contains("magic")),
            other => panic!("expected Snapshot error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_truncation() {
        let grid = SlabGrid::new(2, 2, 5, 1.0).unwrap();
        let f = ScalarField::constant(grid, 1.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.epfs");
        write_snapshot(&path, grid, &[&f]).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(read_snapshot(&path).is_err());
    }
}
