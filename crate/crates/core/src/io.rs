//! Little-endian binary field container, CSV samples and trajectory checkpoints.
//!
//! Container layout: 8-byte magic `LANSFLD1`, then `u32` dimension, points per
//! axis and component count, `f64` box length and dealias fraction, then for
//! every component the coefficients in flat order as `(re, im)` pairs of `f64`.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Provenance, Trajectory};
use crate::error::{Error, Result};
use crate::field::{Field, PhysicalField, ScalarField, SpectralVectorField};
use crate::grid::TorusGrid;
use crate::spectral::lp_norm;

const MAGIC: &[u8; 8] = b"LANSFLD1";

pub fn write_field<F: Field, W: Write>(out: &mut W, field: &F) -> Result<()> {
    let g = field.grid();
    out.write_all(MAGIC)?;
    out.write_all(&(g.dim() as u32).to_le_bytes())?;
    out.write_all(&(g.points_per_axis() as u32).to_le_bytes())?;
    out.write_all(&(field.component_count() as u32).to_le_bytes())?;
    out.write_all(&g.box_length().to_le_bytes())?;
    out.write_all(&g.dealias_fraction().to_le_bytes())?;
    for c in 0..field.component_count() {
        for v in field.coeffs(c) {
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Grid and raw coefficient arrays of a container.
pub fn read_components<R: Read>(input: &mut R) -> Result<(TorusGrid, Vec<Vec<Complex64>>)> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let dim = read_u32(input)? as usize;
    let points = read_u32(input)? as usize;
    let count = read_u32(input)? as usize;
    let grid = TorusGrid::new(dim, points)
        .and_then(|g| g.with_box_length(read_f64(input)?))
        .and_then(|g| g.with_dealias_fraction(read_f64(input)?))
        .map_err(|e| Error::Format(e.to_string()))?;
    if count == 0 || count > dim * dim {
        return Err(Error::Format(format!("implausible component count {count}")));
    }
    let mut comps = Vec::with_capacity(count);
    for _ in 0..count {
        let mut v = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = read_f64(input)?;
            let im = read_f64(input)?;
            v.push(Complex64::new(re, im));
        }
        comps.push(v);
    }
    Ok((grid, comps))
}

pub fn read_vector_field<R: Read>(input: &mut R) -> Result<SpectralVectorField> {
    let (grid, comps) = read_components(input)?;
    if comps.len() != grid.dim() {
        return Err(Error::Format(format!("expected {} components, found {}", grid.dim(), comps.len())));
    }
    let comps = comps.into_iter().map(|c| ScalarField::from_coeffs(grid, c)).collect::<Result<Vec<_>>>()?;
    SpectralVectorField::from_components(comps)
}

pub fn read_scalar_field<R: Read>(input: &mut R) -> Result<ScalarField> {
    let (grid, mut comps) = read_components(input)?;
    if comps.len() != 1 {
        return Err(Error::Format(format!("expected 1 component, found {}", comps.len())));
    }
    ScalarField::from_coeffs(grid, comps.pop().unwrap())
}

pub fn save_field<F: Field>(path: &Path, field: &F) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field(&mut w, field)?;
    w.flush()?;
    Ok(())
}

pub fn load_vector_field(path: &Path) -> Result<SpectralVectorField> {
    read_vector_field(&mut BufReader::new(File::open(path)?))
}

/// Physical samples as CSV with coordinates: `x1,..,xn,u1,..,un`.
pub fn write_physical_csv<W: Write>(out: &mut W, field: &PhysicalField) -> Result<()> {
    let grid = field.grid();
    let n = grid.dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.extend((1..=field.components().len()).map(|i| format!("u{i}")));
    writeln!(out, "{}", header.join(","))?;
    for flat in 0..grid.len() {
        let x = grid.position(flat);
        let mut row: Vec<String> = x.iter().take(n).map(|v| format!("{v:.17e}")).collect();
        row.extend(field.at(flat).iter().map(|v| format!("{v:.17e}")));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// JSON manifest stored next to the states of a checkpointed trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointManifest {
    pub provenance: Provenance,
    pub times: Vec<f64>,
    pub files: Vec<String>,
    /// `‖u(t)‖_{L²}` per stored state.
    pub l2_norms: Vec<f64>,
    pub run_hash: Option<String>,
}

pub fn save_trajectory(dir: &Path, traj: &Trajectory, run_hash: Option<&str>) -> Result<CheckpointManifest> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(traj.len());
    let mut norms = Vec::with_capacity(traj.len());
    for (i, s) in traj.states().iter().enumerate() {
        let name = format!("state_{i:05}.lfld");
        save_field(&dir.join(&name), s)?;
        files.push(name);
        norms.push(lp_norm(s, 2.0)?);
    }
    let manifest = CheckpointManifest {
        provenance: traj.provenance().clone(),
        times: traj.times().to_vec(),
        files,
        l2_norms: norms,
        run_hash: run_hash.map(str::to_string),
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

pub fn load_trajectory(dir: &Path) -> Result<Trajectory> {
    let manifest: CheckpointManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    if manifest.files.len() != manifest.times.len() {
        return Err(Error::Format("manifest lists a different number of files and times".into()));
    }
    let states = manifest.files.iter().map(|f| load_vector_field(&dir.join(f))).collect::<Result<Vec<_>>>()?;
    Trajectory::new(manifest.times, states, manifest.provenance)
}
