//! Serialization of results into stable on-disk formats.
//!
//! Everything the command-line tool writes is produced here so that the
//! formats stay consistent and testable:
//!
//! * decay-rate tables as CSV (`L, gamma_lindblad, gamma_povm`),
//! * moment time series as CSV (`t, L, k, re, im`),
//! * trajectory-ensemble series as CSV (`t, L, k, re_mean, im_mean, stderr`),
//!   optionally extended with analytic reference columns and a 5-standard-error
//!   deviation flag,
//! * phase-space grids as CSV (`theta, phi, value`),
//! * spectral coefficients, state snapshots, and the tensor-operator basis as
//!   JSON documents,
//! * equirectangular heatmaps as plain-text PPM (P3) images.
//!
//! Floating-point numbers are written in Rust's shortest round-trip form, so
//! re-reading a file recovers the original bits and fixed-seed runs produce
//! byte-identical output.  State snapshots round-trip: [`read_snapshot_json`]
//! accepts exactly what [`write_snapshot_json`] emits, storing the spin as an
//! exact string (`"1/2"`, `"3"`) and the matrix as row-major `[re, im]` pairs
//! with the `m = J` row first.
//!
//! The heatmap color map is diverging with a fixed anchor: value 0 renders
//! white, positive values shade linearly toward blue `(33, 102, 172)`, and
//! negative values toward red `(178, 24, 43)`, saturating at `±vmax`.

use std::io::{self, Read, Write};
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::DecayRateTable;
use crate::halfint::HalfInt;
use crate::harmonics::PhasePoint;
use crate::linalg::C64;
use crate::phasespace::QuasiDist;
use crate::su2::{DensityMatrix, MomentVector, Su2Error, TensorBasis};
use crate::unravel::TrajectoryEnsemble;

/// Errors from writing or reading exported files.
#[derive(Debug, Error)]
pub enum ExportError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad snapshot: {0}")]
    BadSnapshot(String),
    #[error("rejected state: {0}")]
    Su2(#[from] Su2Error),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
}

/// Writes a decay-rate table as `L, gamma_lindblad, gamma_povm` CSV.
pub fn write_rates_csv(table: &DecayRateTable, out: &mut impl Write) -> Result<(), ExportError> {
    writeln!(out, "L,gamma_lindblad,gamma_povm")?;
    for (l, lind, povm) in table.rows() {
        writeln!(out, "{l},{lind},{povm}")?;
    }
    Ok(())
}

/// Writes a moment time series as `t, L, k, re, im` CSV, one row per moment
/// per time, moments ordered by `(L, k)`.
pub fn write_moments_csv(
    series: &[(f64, MomentVector)],
    out: &mut impl Write,
) -> Result<(), ExportError> {
    writeln!(out, "t,L,k,re,im")?;
    for (t, m) in series {
        for (l, k, v) in m.iter() {
            writeln!(out, "{t},{l},{k},{},{}", v.re, v.im)?;
        }
    }
    Ok(())
}

/// Writes ensemble mean moments as `t, L, k, re_mean, im_mean, stderr` CSV.
pub fn write_ensemble_csv(
    ens: &TrajectoryEnsemble,
    out: &mut impl Write,
) -> Result<(), ExportError> {
    writeln!(out, "t,L,k,re_mean,im_mean,stderr")?;
    for (rec, t) in ens.times().iter().enumerate() {
        for (l, k, v) in ens.mean_moments(rec).iter() {
            writeln!(out, "{t},{l},{k},{},{},{}", v.re, v.im, ens.stderr(rec, l, k))?;
        }
    }
    Ok(())
}

/// Absolute allowance added to the five-standard-error deviation flag.
/// Exactly conserved moments pick up a common-mode rounding drift of about
/// one part in 10¹⁶ per kick, which their cross-trajectory standard error
/// cannot see; deviations below this floor are double-precision noise, never
/// statistics.
pub const DEVIATION_FLOOR: f64 = 1e-12;

/// Like [`write_ensemble_csv`] but with reference columns appended:
/// `re_ref, im_ref, deviation, flag`, where `deviation = |mean − ref|`
/// and `flag` is `FAIL` when the deviation exceeds five standard errors
/// plus [`DEVIATION_FLOOR`], `pass` otherwise.  `refs` must hold one
/// expected moment vector per recorded time.
pub fn write_ensemble_comparison_csv(
    ens: &TrajectoryEnsemble,
    refs: &[MomentVector],
    out: &mut impl Write,
) -> Result<(), ExportError> {
    if refs.len() != ens.n_records() {
        return Err(ExportError::LengthMismatch {
            expected: ens.n_records(),
            actual: refs.len(),
        });
    }
    writeln!(out, "t,L,k,re_mean,im_mean,stderr,re_ref,im_ref,deviation,flag")?;
    for (rec, t) in ens.times().iter().enumerate() {
        for (l, k, v) in ens.mean_moments(rec).iter() {
            let se = ens.stderr(rec, l, k);
            let r = refs[rec].get(l, k);
            let dev = (v - r).norm();
            let flag = if dev > 5.0 * se + DEVIATION_FLOOR { "FAIL" } else { "pass" };
            writeln!(
                out,
                "{t},{l},{k},{},{},{se},{},{},{dev},{flag}",
                v.re, v.im, r.re, r.im
            )?;
        }
    }
    Ok(())
}

/// Writes phase-space samples as `theta, phi, value` CSV.
pub fn write_grid_csv(
    points: &[PhasePoint],
    values: &[f64],
    out: &mut impl Write,
) -> Result<(), ExportError> {
    if points.len() != values.len() {
        return Err(ExportError::LengthMismatch {
            expected: points.len(),
            actual: values.len(),
        });
    }
    writeln!(out, "theta,phi,value")?;
    for (p, v) in points.iter().zip(values) {
        writeln!(out, "{},{},{v}", p.theta, p.phi)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CoeffRow {
    #[serde(rename = "L")]
    l: u32,
    k: i32,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct SpectralDoc {
    sigma: f64,
    t: f64,
    coeffs: Vec<CoeffRow>,
}

/// Writes a distribution's spectral coefficients as JSON:
/// `{"sigma": s, "t": t, "coeffs": [{"L":…, "k":…, "re":…, "im":…}, …]}`.
pub fn write_spectral_json(
    dist: &QuasiDist,
    t: f64,
    out: &mut impl Write,
) -> Result<(), ExportError> {
    let doc = SpectralDoc {
        sigma: dist.sigma().value(),
        t,
        coeffs: dist
            .coefficients()
            .iter()
            .map(|(l, k, v)| CoeffRow { l, k, re: v.re, im: v.im })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct SnapshotDoc {
    #[serde(rename = "J")]
    j: String,
    /// Row-major, `m = J` row first; entries are `[re, im]`.
    matrix: Vec<Vec<[f64; 2]>>,
}

/// Writes a state snapshot as JSON: `{"J": "1", "matrix": [[[re,im], …], …]}`,
/// row-major with the `m = J` row first and the spin as an exact string.
pub fn write_snapshot_json(rho: &DensityMatrix, out: &mut impl Write) -> Result<(), ExportError> {
    let mat = rho.matrix();
    let doc = SnapshotDoc {
        j: rho.j().to_string(),
        matrix: (0..mat.nrows())
            .map(|r| (0..mat.ncols()).map(|c| [mat[(r, c)].re, mat[(r, c)].im]).collect())
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

/// Reads a state snapshot written by [`write_snapshot_json`], validating the
/// spin label, the matrix shape, Hermiticity, unit trace, and positivity.
pub fn read_snapshot_json(input: &mut impl Read) -> Result<DensityMatrix, ExportError> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let doc: SnapshotDoc = serde_json::from_str(&text)?;
    let j = HalfInt::from_str(&doc.j)
        .map_err(|e| ExportError::BadSnapshot(format!("bad spin label: {e}")))?;
    let d = j.dim();
    if doc.matrix.len() != d || doc.matrix.iter().any(|row| row.len() != d) {
        return Err(ExportError::BadSnapshot(format!(
            "matrix for J = {j} must be {d}×{d}"
        )));
    }
    let mat = Array2::from_shape_fn((d, d), |(r, c)| {
        C64::new(doc.matrix[r][c][0], doc.matrix[r][c][1])
    });
    Ok(DensityMatrix::new(j, mat)?)
}

#[derive(Serialize)]
struct TensorRow {
    #[serde(rename = "J")]
    j: String,
    #[serde(rename = "L")]
    l: u32,
    k: i32,
    /// Row-major flattened matrix; entries are `[re, im]`.
    matrix: Vec<[f64; 2]>,
}

/// Dumps the full tensor-operator basis as a JSON array of
/// `{"J": "1", "L": 2, "k": -1, "matrix": [[re,im], …]}` entries with
/// row-major flattened matrices, ordered by `(L, k)`.
pub fn write_tensor_table_json(
    basis: &TensorBasis,
    out: &mut impl Write,
) -> Result<(), ExportError> {
    let label = basis.j().to_string();
    let rows: Vec<TensorRow> = basis
        .iter()
        .map(|(l, k, t)| TensorRow {
            j: label.clone(),
            l,
            k,
            matrix: t.iter().map(|v| [v.re, v.im]).collect(),
        })
        .collect();
    serde_json::to_writer_pretty(&mut *out, &rows)?;
    writeln!(out)?;
    Ok(())
}

/// Renders a `n_theta × n_phi` value grid (row 0 = θ = 0) as a plain-text
/// PPM (P3) image with the diverging color map described in the module
/// documentation.  `vmax` fixes the saturation value; `None` uses the grid's
/// own max-abs value (an all-zero grid renders all white).
pub fn write_ppm(
    values: &Array2<f64>,
    vmax: Option<f64>,
    out: &mut impl Write,
) -> Result<(), ExportError> {
    let scale = match vmax {
        Some(v) => v.abs(),
        None => values.iter().fold(0.0f64, |a, v| a.max(v.abs())),
    };
    writeln!(out, "P3")?;
    writeln!(out, "{} {}", values.ncols(), values.nrows())?;
    writeln!(out, "255")?;
    const BLUE: [f64; 3] = [33.0, 102.0, 172.0];
    const RED: [f64; 3] = [178.0, 24.0, 43.0];
    for row in values.rows() {
        let mut line = String::new();
        for (idx, &v) in row.iter().enumerate() {
            let s = if scale > 0.0 { (v.abs() / scale).min(1.0) } else { 0.0 };
            let end = if v >= 0.0 { BLUE } else { RED };
            if idx > 0 {
                line.push_str("  ");
            }
            for channel in end {
                let byte = (255.0 + (channel - 255.0) * s).round() as u8;
                line.push_str(&format!("{byte} "));
            }
        }
        writeln!(out, "{}", line.trim_end())?;
    }
    Ok(())
}
