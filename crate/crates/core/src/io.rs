//! JSON header plus sample sidecar for sections and kernels.
//!
//! The header names the sidecar file. Binary sidecars hold little-endian
//! `f64` pairs `(re, im)` in row-major order; CSV sidecars hold one `re,im`
//! row per sample with shortest round-trip formatting. Both are bit-exact.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Planck;
use crate::quantizer::OperatorKernel;
use crate::states::{GridSection, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SidecarFormat {
    Binary,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub kind: String,
    pub half_width: f64,
    pub n: usize,
    pub hbar: f64,
    pub rows: usize,
    pub cols: usize,
    /// Documents the flattening; kernels are indexed `(u1, u0)`.
    pub index_order: String,
    pub format: SidecarFormat,
    pub sidecar: String,
}

fn sidecar_path(header_path: &Path, format: SidecarFormat) -> PathBuf {
    header_path.with_extension(match format {
        SidecarFormat::Binary => "bin",
        SidecarFormat::Csv => "csv",
    })
}

fn write_samples(path: &Path, values: &[Complex64], format: SidecarFormat) -> Result<()> {
    match format {
        SidecarFormat::Binary => {
            let mut buf = Vec::with_capacity(values.len() * 16);
            for v in values {
                buf.extend_from_slice(&v.re.to_le_bytes());
                buf.extend_from_slice(&v.im.to_le_bytes());
            }
            fs::write(path, buf)?;
        }
        SidecarFormat::Csv => {
            let mut s = String::from("re,im\n");
            for v in values {
                s.push_str(&format!("{:?},{:?}\n", v.re, v.im));
            }
            fs::write(path, s)?;
        }
    }
    Ok(())
}

fn read_samples(path: &Path, count: usize, format: SidecarFormat) -> Result<Vec<Complex64>> {
    let out: Vec<Complex64> = match format {
        SidecarFormat::Binary => {
            let buf = fs::read(path)?;
            if buf.len() != count * 16 {
                return Err(Error::Format(format!("expected {} bytes, found {}", count * 16, buf.len())));
            }
            buf.chunks_exact(16)
                .map(|c| {
                    let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                    let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                    Complex64::new(re, im)
                })
                .collect()
        }
        SidecarFormat::Csv => {
            let text = fs::read_to_string(path)?;
            let mut lines = text.lines();
            if lines.next() != Some("re,im") {
                return Err(Error::Format("missing re,im header".into()));
            }
            lines
                .map(|l| {
                    let (a, b) = l.split_once(',').ok_or_else(|| Error::Format(format!("bad row {l:?}")))?;
                    let re = a.parse::<f64>().map_err(|e| Error::Format(e.to_string()))?;
                    let im = b.parse::<f64>().map_err(|e| Error::Format(e.to_string()))?;
                    Ok(Complex64::new(re, im))
                })
                .collect::<Result<_>>()?
        }
    };
    if out.len() != count {
        return Err(Error::Format(format!("expected {count} samples, found {}", out.len())));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn write(
    path: &Path,
    kind: &str,
    spec: GridSpec,
    hbar: Planck,
    rows: usize,
    cols: usize,
    order: &str,
    values: &[Complex64],
    format: SidecarFormat,
) -> Result<()> {
    let side = sidecar_path(path, format);
    let header = Header {
        kind: kind.into(),
        half_width: spec.half_width,
        n: spec.n,
        hbar: hbar.get(),
        rows,
        cols,
        index_order: order.into(),
        format,
        sidecar: side.file_name().and_then(|s| s.to_str()).unwrap_or_default().into(),
    };
    write_samples(&side, values, format)?;
    fs::write(path, serde_json::to_string_pretty(&header)?)?;
    Ok(())
}

fn read(path: &Path, kind: &str) -> Result<(Header, GridSpec, Planck, Vec<Complex64>)> {
    let header: Header = serde_json::from_str(&fs::read_to_string(path)?)?;
    if header.kind != kind {
        return Err(Error::Format(format!("expected kind {kind}, found {}", header.kind)));
    }
    let spec = GridSpec::new(header.half_width, header.n)?;
    let hbar = Planck::new(header.hbar)?;
    let side = path.parent().unwrap_or(Path::new(".")).join(&header.sidecar);
    let values = read_samples(&side, header.rows * header.cols, header.format)?;
    Ok((header, spec, hbar, values))
}

pub fn write_section(path: &Path, s: &GridSection, format: SidecarFormat) -> Result<()> {
    let n = s.spec().n;
    write(path, "grid_section", s.spec(), s.hbar(), n, n, "row-major (p index, q index)", s.values(), format)
}

pub fn read_section(path: &Path) -> Result<GridSection> {
    let (_, spec, hbar, values) = read(path, "grid_section")?;
    GridSection::new(spec, hbar, values)
}

pub fn write_kernel(path: &Path, k: &OperatorKernel, format: SidecarFormat) -> Result<()> {
    let m = k.spec.n * k.spec.n;
    let values: Vec<Complex64> = (0..m * m).map(|i| k.values[(i / m, i % m)]).collect();
    write(
        path,
        "operator_kernel",
        k.spec,
        k.hbar,
        m,
        m,
        "row-major (u1, u0), each flattened (p index, q index)",
        &values,
        format,
    )
}

pub fn read_kernel(path: &Path) -> Result<OperatorKernel> {
    let (h, spec, hbar, values) = read(path, "operator_kernel")?;
    Ok(OperatorKernel { spec, hbar, values: DMatrix::from_row_slice(h.rows, h.cols, &values) })
}
