//! CSV and JSON artifacts.
//!
//! Multi-series files use a long layout with a leading `series` column so
//! that overlays of several solvers share one file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{ErrorTable, LinearFit, Residual};
use crate::error::{Error, Result};
use crate::fv::Field;
use crate::grid::CrackedGrid;
use crate::trajectory::{InterfaceRecord, Profile1d, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub series: String,
    pub t: f64,
    pub x: f64,
    pub u: f64,
    /// `u / max u` over the profile (0 when the profile vanishes).
    pub u_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassRow {
    pub series: String,
    pub t: f64,
    #[serde(rename = "M")]
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub series: String,
    pub t: f64,
    pub x: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRow {
    pub series: String,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceRow {
    pub t: f64,
    #[serde(rename = "F")]
    pub flux: f64,
    pub u0minus: f64,
    pub u0plus: f64,
    pub dxu0minus: f64,
    pub dxu0plus: f64,
    pub iters: usize,
    pub last_ratio: f64,
}

impl From<&InterfaceRecord> for InterfaceRow {
    fn from(r: &InterfaceRecord) -> Self {
        Self {
            t: r.t,
            flux: r.flux,
            u0minus: r.u_minus,
            u0plus: r.u_plus,
            dxu0minus: r.dx_minus,
            dxu0plus: r.dx_plus,
            iters: r.iterations,
            last_ratio: r.last_ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub series: String,
    pub t: f64,
    pub jump_u: f64,
    pub jump_flux: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRowCsv {
    pub epsilon: f64,
    pub nx: usize,
    pub ny: usize,
    pub err: f64,
    pub err_minus: Option<f64>,
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads every row; a missing file or a file without data rows is a
/// [`Error::MissingArtifact`].
pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    if !path.is_file() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    if rows.is_empty() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    Ok(rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    if !path.is_file() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn profile_rows(series: &str, profiles: &[Profile1d]) -> Vec<ProfileRow> {
    profiles
        .iter()
        .flat_map(|p| {
            let max = p.max();
            let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
            p.x.iter().zip(&p.u).map(move |(&x, &u)| ProfileRow {
                series: series.to_string(),
                t: p.time,
                x,
                u,
                u_norm: u * scale,
            })
        })
        .collect()
}

pub fn mass_rows(series: &str, t: &Trajectory) -> Vec<MassRow> {
    t.times
        .iter()
        .zip(&t.mass)
        .map(|(&t, &m)| MassRow {
            series: series.to_string(),
            t,
            mass: m,
        })
        .collect()
}

pub fn probe_rows(series: &str, t: &Trajectory) -> Vec<ProbeRow> {
    t.times
        .iter()
        .zip(&t.probes)
        .flat_map(|(&time, values)| {
            t.probe_x.iter().zip(values).map(move |(&x, &u)| ProbeRow {
                series: series.to_string(),
                t: time,
                x,
                u,
            })
        })
        .collect()
}

pub fn snapshot_rows(series: &str, grid: &CrackedGrid, snapshots: &[Field]) -> Vec<SnapshotRow> {
    snapshots
        .iter()
        .flat_map(|f| {
            f.values.iter().enumerate().map(move |(k, &u)| {
                let (x, y) = grid.center(k);
                SnapshotRow {
                    series: series.to_string(),
                    t: f.time,
                    x,
                    y,
                    u,
                }
            })
        })
        .collect()
}

pub fn interface_rows(t: &Trajectory) -> Vec<InterfaceRow> {
    t.interface.iter().map(InterfaceRow::from).collect()
}

pub fn residual_rows(series: &str, residuals: &[Residual]) -> Vec<ResidualRow> {
    residuals
        .iter()
        .map(|r| ResidualRow {
            series: series.to_string(),
            t: r.t,
            jump_u: r.jump_u,
            jump_flux: r.jump_flux,
        })
        .collect()
}

pub fn error_rows(table: &ErrorTable) -> Vec<ErrorRowCsv> {
    table
        .rows
        .iter()
        .map(|r| ErrorRowCsv {
            epsilon: r.epsilon,
            nx: r.nx,
            ny: r.ny,
            err: r.err,
            err_minus: r.err_minus,
        })
        .collect()
}

/// Contents of `fit.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitJson {
    pub slope: f64,
    pub intercept: f64,
    pub regime: Vec<f64>,
}

impl From<&LinearFit> for FitJson {
    fn from(f: &LinearFit) -> Self {
        Self {
            slope: f.slope,
            intercept: f.intercept,
            regime: f.regime.clone(),
        }
    }
}
