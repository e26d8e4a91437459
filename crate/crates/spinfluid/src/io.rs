//! Field snapshot files and CSV helpers.
//!
//! A snapshot is a flat little-endian f64 array (`.bin`, row-major, planar
//! component layout) plus a plain-text sidecar header (`.hdr`) carrying the
//! grid geometry, field name, component count, and time stamp.

use crate::error::{Error, Result};
use crate::field::{ComplexField, ScalarField, VectorField3};
use crate::grid::Grid;
use num_complex::Complex64;
use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub dim: usize,
    pub sizes: Vec<usize>,
    pub lengths: Vec<f64>,
    pub field: String,
    pub components: usize,
    pub time: f64,
}

impl SnapshotHeader {
    fn render(&self) -> String {
        let sizes = self
            .sizes
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        let lengths = self
            .lengths
            .iter()
            .map(|l| format!("{l:.17e}"))
            .collect::<Vec<_>>()
            .join(" ");
        format!(
            "dim = {}\nsizes = {}\nlengths = {}\nfield = {}\ncomponents = {}\ntime = {:.17e}\nlayout = planar row-major little-endian f64\n",
            self.dim, sizes, lengths, self.field, self.components, self.time
        )
    }

    fn parse(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut sizes = None;
        let mut lengths = None;
        let mut field = None;
        let mut components = None;
        let mut time = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::SnapshotFormat(format!("bad header line: {line}")))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "dim" => dim = Some(parse_num::<usize>(key, value)?),
                "sizes" => sizes = Some(parse_list::<usize>(key, value)?),
                "lengths" => lengths = Some(parse_list::<f64>(key, value)?),
                "field" => field = Some(value.to_string()),
                "components" => components = Some(parse_num::<usize>(key, value)?),
                "time" => time = Some(parse_num::<f64>(key, value)?),
                "layout" => {}
                other => {
                    return Err(Error::SnapshotFormat(format!("unknown header key: {other}")))
                }
            }
        }
        let missing = |k: &str| Error::SnapshotFormat(format!("missing header key: {k}"));
        Ok(SnapshotHeader {
            dim: dim.ok_or_else(|| missing("dim"))?,
            sizes: sizes.ok_or_else(|| missing("sizes"))?,
            lengths: lengths.ok_or_else(|| missing("lengths"))?,
            field: field.ok_or_else(|| missing("field"))?,
            components: components.ok_or_else(|| missing("components"))?,
            time: time.ok_or_else(|| missing("time"))?,
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(&self.sizes, &self.lengths)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::SnapshotFormat(format!("cannot parse {key} = {value}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split_whitespace()
        .map(|tok| parse_num::<T>(key, tok))
        .collect()
}

/// Write planar component data. `base` is the path without extension;
/// `<base>.bin` and `<base>.hdr` are produced.
pub fn write_snapshot(
    base: &Path,
    grid: &Grid,
    field: &str,
    components: &[&[f64]],
    time: f64,
) -> Result<()> {
    let header = SnapshotHeader {
        dim: grid.dim(),
        sizes: grid.sizes().to_vec(),
        lengths: grid.lengths().to_vec(),
        field: field.to_string(),
        components: components.len(),
        time,
    };
    for comp in components {
        if comp.len() != grid.len() {
            return Err(Error::SnapshotFormat(format!(
                "component length {} does not match grid ({})",
                comp.len(),
                grid.len()
            )));
        }
    }
    fs::write(base.with_extension("hdr"), header.render())?;
    let mut bytes = Vec::with_capacity(8 * grid.len() * components.len());
    for comp in components {
        for v in *comp {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut f = fs::File::create(base.with_extension("bin"))?;
    f.write_all(&bytes)?;
    Ok(())
}

pub fn write_scalar(base: &Path, f: &ScalarField, name: &str, time: f64) -> Result<()> {
    write_snapshot(base, &f.grid, name, &[&f.data], time)
}

pub fn write_vector(base: &Path, v: &VectorField3, name: &str, time: f64) -> Result<()> {
    write_snapshot(
        base,
        &v.grid,
        name,
        &[&v.comps[0], &v.comps[1], &v.comps[2]],
        time,
    )
}

/// Complex field stored as two planar components (re, im).
pub fn write_complex(base: &Path, f: &ComplexField, name: &str, time: f64) -> Result<()> {
    let re: Vec<f64> = f.data.iter().map(|z| z.re).collect();
    let im: Vec<f64> = f.data.iter().map(|z| z.im).collect();
    write_snapshot(base, &f.grid, name, &[&re, &im], time)
}

/// Read a snapshot back; returns the header and planar components.
pub fn read_snapshot(base: &Path) -> Result<(SnapshotHeader, Vec<Vec<f64>>)> {
    let header = SnapshotHeader::parse(&fs::read_to_string(base.with_extension("hdr"))?)?;
    let bytes = fs::read(base.with_extension("bin"))?;
    let npts: usize = header.sizes.iter().product();
    let expected = npts * header.components * 8;
    if bytes.len() != expected {
        return Err(Error::SnapshotFormat(format!(
            "binary payload is {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let mut comps = Vec::with_capacity(header.components);
    for c in 0..header.components {
        let mut data = Vec::with_capacity(npts);
        for i in 0..npts {
            let off = (c * npts + i) * 8;
            let mut buf = [0u8; 8];
            buf.copy_from_slice(&bytes[off..off + 8]);
            data.push(f64::from_le_bytes(buf));
        }
        comps.push(data);
    }
    Ok((header, comps))
}

pub fn read_scalar(base: &Path) -> Result<(ScalarField, SnapshotHeader)> {
    let (header, mut comps) = read_snapshot(base)?;
    if header.components != 1 {
        return Err(Error::SnapshotFormat(format!(
            "expected 1 component, found {}",
            header.components
        )));
    }
    let grid = header.grid()?;
    Ok((
        ScalarField {
            grid,
            data: comps.pop().unwrap(),
        },
        header,
    ))
}

pub fn read_vector(base: &Path) -> Result<(VectorField3, SnapshotHeader)> {
    let (header, comps) = read_snapshot(base)?;
    if header.components != 3 {
        return Err(Error::SnapshotFormat(format!(
            "expected 3 components, found {}",
            header.components
        )));
    }
    let grid = header.grid()?;
    let mut it = comps.into_iter();
    Ok((
        VectorField3 {
            grid,
            comps: [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()],
        },
        header,
    ))
}

pub fn read_complex(base: &Path) -> Result<(ComplexField, SnapshotHeader)> {
    let (header, comps) = read_snapshot(base)?;
    if header.components != 2 {
        return Err(Error::SnapshotFormat(format!(
            "expected 2 components (re, im), found {}",
            header.components
        )));
    }
    let grid = header.grid()?;
    let data = comps[0]
        .iter()
        .zip(&comps[1])
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect();
    Ok((ComplexField { grid, data }, header))
}

/// Minimal CSV writer with a fixed header row.
pub struct CsvWriter {
    file: fs::File,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut file = fs::File::create(path)?;
        writeln!(file, "{}", header.join(","))?;
        Ok(CsvWriter { file })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        let line = values
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(self.file, "{line}")?;
        Ok(())
    }

    pub fn row_mixed(&mut self, label: &str, values: &[f64], trailer: Option<&str>) -> Result<()> {
        let mut parts = vec![label.to_string()];
        parts.extend(values.iter().map(|v| format!("{v:.16e}")));
        if let Some(t) = trailer {
            parts.push(t.to_string());
        }
        writeln!(self.file, "{}", parts.join(","))?;
        Ok(())
    }
}
