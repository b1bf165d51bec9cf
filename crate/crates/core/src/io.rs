//! Field serialization.
//!
//! CSV layout: four `key,value` header rows (`dimension`, `half_length`, `points`, `boundary`),
//! a `re,im` column row, then one sample per row in row-major order.
//!
//! Binary layout (little endian): magic `DSPF`, `u32` version, `u32` dimension, `u32` boundary
//! (0 periodic, 1 Dirichlet), `u64` points, `f64` half-length, then `re, im` `f64` pairs.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Boundary, Grid};

const MAGIC: &[u8; 4] = b"DSPF";
const VERSION: u32 = 1;

pub fn write_csv(f: &Field, mut w: impl Write) -> Result<()> {
    let g = f.grid();
    writeln!(w, "dimension,{}", g.dimension())?;
    writeln!(w, "half_length,{:e}", g.half_length())?;
    writeln!(w, "points,{}", g.points())?;
    writeln!(w, "boundary,{}", g.boundary().tag())?;
    writeln!(w, "re,im")?;
    for v in f.values() {
        writeln!(w, "{:e},{:e}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_csv(r: impl Read) -> Result<Field> {
    let mut lines = BufReader::new(r).lines();
    let mut header = |key: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| Error::Format(format!("missing header `{key}`")))??;
        let (k, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("bad header row `{line}`")))?;
        if k.trim() != key {
            return Err(Error::Format(format!("expected header `{key}`, found `{k}`")));
        }
        Ok(v.trim().to_string())
    };
    let dimension: usize = parse(&header("dimension")?)?;
    let half_length: f64 = parse(&header("half_length")?)?;
    let points: usize = parse(&header("points")?)?;
    let tag = header("boundary")?;
    let boundary = Boundary::from_tag(&tag).ok_or_else(|| Error::Format(format!("unknown boundary `{tag}`")))?;
    let grid = Grid::new(dimension, half_length, points, boundary)?;
    match lines.next() {
        Some(Ok(l)) if l.trim() == "re,im" => {}
        _ => return Err(Error::Format("missing `re,im` column row".into())),
    }
    let mut values = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("bad sample row `{line}`")))?;
        values.push(Complex64::new(parse(re)?, parse(im)?));
    }
    Field::new(grid, values)
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Format(format!("cannot parse `{s}`")))
}

pub fn write_binary(f: &Field, mut w: impl Write) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.dimension() as u32).to_le_bytes())?;
    let b: u32 = match g.boundary() {
        Boundary::Periodic => 0,
        Boundary::DirichletRectangle => 1,
    };
    w.write_all(&b.to_le_bytes())?;
    w.write_all(&(g.points() as u64).to_le_bytes())?;
    w.write_all(&g.half_length().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * f.len());
    for v in f.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary(mut r: impl Read) -> Result<Field> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut u4 = [0u8; 4];
    let mut u8b = [0u8; 8];
    r.read_exact(&mut u4)?;
    let version = u32::from_le_bytes(u4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    r.read_exact(&mut u4)?;
    let dimension = u32::from_le_bytes(u4) as usize;
    r.read_exact(&mut u4)?;
    let boundary = match u32::from_le_bytes(u4) {
        0 => Boundary::Periodic,
        1 => Boundary::DirichletRectangle,
        b => return Err(Error::Format(format!("unknown boundary code {b}"))),
    };
    r.read_exact(&mut u8b)?;
    let points = u64::from_le_bytes(u8b) as usize;
    r.read_exact(&mut u8b)?;
    let half_length = f64::from_le_bytes(u8b);
    let grid = Grid::new(dimension, half_length, points, boundary)?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 16 * grid.len() {
        return Err(Error::SampleCount {
            expected: grid.len(),
            got: bytes.len() / 16,
        });
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Field::new(grid, values)
}

/// Chooses the format from the extension: `.csv` or anything else for binary.
pub fn load(path: &Path) -> Result<Field> {
    let file = std::fs::File::open(path)?;
    if is_csv(path) {
        read_csv(file)
    } else {
        read_binary(BufReader::new(file))
    }
}

/// Serializes into memory with the format chosen by extension.
pub fn to_bytes(f: &Field, path: &Path) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    if is_csv(path) {
        write_csv(f, &mut out)?;
    } else {
        write_binary(f, &mut out)?;
    }
    Ok(out)
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}
