//! Binary container and CSV export for grid fields.
//!
//! Container layout, all little-endian: `d: u64`, `n: u64`, `L: f64`, then `n^d` values
//! as `f64` in row-major order.

use std::io::{Read, Write};

use super::{Grid, GridField};
use crate::error::{Error, Result};

pub fn write_field(field: &GridField, mut out: impl Write) -> Result<()> {
    let g = field.grid();
    let mut buf = Vec::with_capacity(24 + 8 * g.len());
    buf.extend_from_slice(&(g.dim() as u64).to_le_bytes());
    buf.extend_from_slice(&(g.n() as u64).to_le_bytes());
    buf.extend_from_slice(&g.length().to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_field(mut input: impl Read) -> Result<GridField> {
    let mut head = [0u8; 24];
    input
        .read_exact(&mut head)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    let word = |i: usize| <[u8; 8]>::try_from(&head[8 * i..8 * i + 8]).unwrap();
    let dim = u64::from_le_bytes(word(0));
    let n = u64::from_le_bytes(word(1));
    let length = f64::from_le_bytes(word(2));
    if dim > 2 || n > (1 << 26) {
        return Err(Error::Format(format!("implausible header d={dim} n={n}")));
    }
    let grid = Grid::new(dim as usize, n as usize, length).map_err(|e| Error::Format(e.to_string()))?;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != 8 * grid.len() {
        return Err(Error::Format(format!(
            "expected {} value bytes, found {}",
            8 * grid.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridField::new(grid, values).map_err(|e| Error::Format(e.to_string()))
}

/// CSV `x,value` of a one-dimensional slice: the whole field in 1-d, or the line through
/// row `row` (fixed first coordinate) in 2-d.
pub fn write_csv_slice(field: &GridField, row: usize, mut out: impl Write) -> Result<()> {
    let g = field.grid();
    if row >= g.n() {
        return Err(Error::InvalidParameter(format!("row {row} outside 0..{}", g.n())));
    }
    let mut text = String::from("x,value\n");
    let offset = if g.dim() == 1 { 0 } else { row * g.n() };
    for i in 0..g.n() {
        text.push_str(&format!("{},{}\n", g.coordinate(i), field.values()[offset + i]));
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn container_roundtrip() {
        let g = Grid::new(2, 8, 3.5).unwrap();
        let f = GridField::from_fn(g, |x| x[0] - 2.0 * x[1]);
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 24 + 8 * 64);
        assert_eq!(&buf[..8], &2u64.to_le_bytes());
        let back = read_field(&buf[..]).unwrap();
        assert_eq!(back.grid(), f.grid());
        assert_eq!(back.values(), f.values());
        assert!(read_field(&buf[..100]).is_err());
    }

    #[test]
    fn csv_slice_has_header_and_rows() {
        let g = Grid::new(1, 4, 4.0).unwrap();
        let f = GridField::from_fn(g, |x| x[0]);
        let mut buf = Vec::new();
        write_csv_slice(&f, 0, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "x,value\n-2,-2\n-1,-1\n0,0\n1,1\n");
    }
}
