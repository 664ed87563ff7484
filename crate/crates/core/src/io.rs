//! File formats: the `RBFK` raw matrix format and plain CSV matrices.
//!
//! `RBFK` layout, all little-endian:
//!
//! | offset | size | content                 |
//! |--------|------|-------------------------|
//! | 0      | 4    | magic `b"RBFK"`         |
//! | 4      | 4    | version (u32, = 1)      |
//! | 8      | 4    | rows (u32)              |
//! | 12     | 4    | cols (u32)              |
//! | 16     | 8·rows·cols | f64 entries, row-major |

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub const MAGIC: [u8; 4] = *b"RBFK";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 16;

pub fn write_binary<W: Write>(m: &DenseMatrix, mut w: W) -> Result<()> {
    let rows = u32::try_from(m.nrows()).map_err(|_| Error::Format("row count exceeds u32".into()))?;
    let cols = u32::try_from(m.ncols()).map_err(|_| Error::Format("column count exceeds u32".into()))?;
    w.write_all(&MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&rows.to_le_bytes())?;
    w.write_all(&cols.to_le_bytes())?;
    let mut buf = Vec::with_capacity(m.as_slice().len() * 8);
    for v in m.as_slice() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<DenseMatrix> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header).map_err(|_| Error::Format("truncated RBFK header".into()))?;
    if header[0..4] != MAGIC {
        return Err(Error::Format("bad magic, expected RBFK".into()));
    }
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
    let version = word(4);
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported RBFK version {version}")));
    }
    let (rows, cols) = (word(8) as usize, word(12) as usize);
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != rows * cols * 8 {
        return Err(Error::Format(format!(
            "RBFK body has {} bytes, header promises {rows} x {cols}",
            body.len()
        )));
    }
    let data = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    DenseMatrix::from_vec(rows, cols, data)
}

/// Writes `m` as CSV with a header row `{prefix}0,{prefix}1,...`.
/// Values use the shortest representation that round-trips.
pub fn write_csv<W: Write>(m: &DenseMatrix, prefix: &str, mut w: W) -> Result<()> {
    let header: Vec<String> = (0..m.ncols()).map(|j| format!("{prefix}{j}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Reads a numeric CSV matrix. Lines starting with `#` are skipped, as is a
/// first row that does not parse as numbers (a header).
pub fn read_csv<R: BufRead>(r: R) -> Result<DenseMatrix> {
    let mut data = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if rows == 0 && cols.is_none() => {
                cols = Some(line.split(',').count());
                continue;
            }
            Err(e) => return Err(Error::Format(format!("line {}: {e}", lineno + 1))),
        };
        match cols {
            Some(c) if c != values.len() => {
                return Err(Error::Format(format!(
                    "line {}: expected {c} columns, found {}",
                    lineno + 1,
                    values.len()
                )))
            }
            _ => cols = Some(values.len()),
        }
        data.extend(values);
        rows += 1;
    }
    DenseMatrix::from_vec(rows, cols.unwrap_or(0), data)
}
