//! Field snapshot files: a short ASCII header followed by raw little-endian
//! f64 samples, one block per component.
//!
//! ```text
//! machlimit-field 1
//! name rho
//! time 0.5
//! dim 2
//! n 128
//! L 48
//! components 1
//! dtype f64-le
//!
//! <raw bytes>
//! ```

use super::{FieldError, Grid, ScalarField, VectorField};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub struct Snapshot {
    pub name: String,
    pub time: f64,
    pub grid: Grid,
    pub components: Vec<Vec<f64>>,
}

fn write_snapshot_inner(
    path: &Path,
    name: &str,
    time: f64,
    grid: Grid,
    comps: &[&[f64]],
) -> Result<(), FieldError> {
    let io_err = |e: std::io::Error| FieldError::Io(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    write!(
        w,
        "machlimit-field 1\nname {}\ntime {:e}\ndim {}\nn {}\nL {:e}\ncomponents {}\ndtype f64-le\n\n",
        name,
        time,
        grid.dim(),
        grid.n(),
        grid.len(),
        comps.len()
    )
    .map_err(io_err)?;
    for comp in comps {
        for v in *comp {
            w.write_all(&v.to_le_bytes()).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

pub fn write_scalar_snapshot(
    path: impl AsRef<Path>,
    name: &str,
    time: f64,
    field: &ScalarField,
) -> Result<(), FieldError> {
    write_snapshot_inner(path.as_ref(), name, time, field.grid(), &[field.samples()])
}

pub fn write_vector_snapshot(
    path: impl AsRef<Path>,
    name: &str,
    time: f64,
    field: &VectorField,
) -> Result<(), FieldError> {
    let comps: Vec<&[f64]> = field.components().iter().map(|c| c.samples()).collect();
    write_snapshot_inner(path.as_ref(), name, time, field.grid(), &comps)
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot, FieldError> {
    let path = path.as_ref();
    let io_err = |e: std::io::Error| FieldError::Io(format!("{}: {e}", path.display()));
    let mut r = BufReader::new(File::open(path).map_err(io_err)?);
    let mut raw = Vec::new();
    r.read_to_end(&mut raw).map_err(io_err)?;

    let header_end = raw
        .windows(2)
        .position(|w| w == b"\n\n")
        .ok_or_else(|| FieldError::Io(format!("{}: missing header terminator", path.display())))?;
    let header = std::str::from_utf8(&raw[..header_end])
        .map_err(|_| FieldError::Io(format!("{}: non-utf8 header", path.display())))?;
    let body = &raw[header_end + 2..];

    let mut name = String::new();
    let mut time = 0.0;
    let (mut dim, mut n, mut len, mut ncomp) = (0usize, 0usize, 0.0f64, 1usize);
    for line in header.lines() {
        let mut it = line.splitn(2, ' ');
        let key = it.next().unwrap_or("");
        let val = it.next().unwrap_or("").trim();
        let parse_err = || FieldError::Io(format!("{}: bad header line `{line}`", path.display()));
        match key {
            "machlimit-field" => {}
            "name" => name = val.to_string(),
            "time" => time = val.parse().map_err(|_| parse_err())?,
            "dim" => dim = val.parse().map_err(|_| parse_err())?,
            "n" => n = val.parse().map_err(|_| parse_err())?,
            "L" => len = val.parse().map_err(|_| parse_err())?,
            "components" => ncomp = val.parse().map_err(|_| parse_err())?,
            "dtype" => {
                if val != "f64-le" {
                    return Err(FieldError::Io(format!(
                        "{}: unsupported dtype {val}",
                        path.display()
                    )));
                }
            }
            _ => return Err(parse_err()),
        }
    }
    let grid = Grid::new(dim, n, len)?;
    let points = grid.points();
    if body.len() != ncomp * points * 8 {
        return Err(FieldError::Io(format!(
            "{}: payload size {} != {} components x {points} points x 8",
            path.display(),
            body.len(),
            ncomp
        )));
    }
    let mut components = Vec::with_capacity(ncomp);
    for c in 0..ncomp {
        let mut data = Vec::with_capacity(points);
        for i in 0..points {
            let off = (c * points + i) * 8;
            let bytes: [u8; 8] = body[off..off + 8].try_into().unwrap();
            data.push(f64::from_le_bytes(bytes));
        }
        components.push(data);
    }
    Ok(Snapshot {
        name,
        time,
        grid,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_snapshot_roundtrip_is_bit_exact() {
        let dir = std::env::temp_dir().join("machlimit-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rho.field");
        let g = Grid::new(2, 16, 3.5).unwrap();
        let f = ScalarField::from_fn(g, |x| (x[0] * 1.7).sin() + x[1]);
        write_scalar_snapshot(&path, "rho", 0.25, &f).unwrap();
        let snap = read_snapshot(&path).unwrap();
        assert_eq!(snap.name, "rho");
        assert_eq!(snap.time, 0.25);
        assert_eq!(snap.grid, g);
        assert_eq!(snap.components.len(), 1);
        assert_eq!(snap.components[0], f.samples());
    }

    #[test]
    fn vector_snapshot_roundtrip() {
        let dir = std::env::temp_dir().join("machlimit-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("u.field");
        let g = Grid::new(2, 16, 1.0).unwrap();
        let u = VectorField::from_fn(g, |x| [x[0], -x[1], 0.0]);
        write_vector_snapshot(&path, "u", 1.5, &u).unwrap();
        let snap = read_snapshot(&path).unwrap();
        assert_eq!(snap.components.len(), 2);
        assert_eq!(snap.components[0], u.comp(0).samples());
        assert_eq!(snap.components[1], u.comp(1).samples());
    }
}
