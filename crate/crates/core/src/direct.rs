//! Time marching of the exact model on one periodic crack cell.
//!
//! Boundary data (outward `∂_n u`, i.e. influx densities):
//! `0` on `x = 1`, `1` on the material part of `x = -1`, `(alpha-beta) eps/2`
//! (or `f_alpha(x) eps` in profile mode) on the crack walls, and `beta/alpha`
//! (or `0` in profile mode) on the crack bottom. The total influx per period
//! cell is `eps`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fv::{BoundaryData, FaceCondition, Field, FluxSpec, StepSystem, DEFAULT_RTOL};
use crate::grid::{CrackedGrid, FaceTag};
use crate::params::{ParamSet, WallFlux};
use crate::trajectory::{schedule, Profile1d, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    Uniform { value: f64 },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Uniform { value: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectRunConfig {
    pub params: ParamSet,
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_times: Vec<f64>,
    pub probe_x: Vec<f64>,
    #[serde(default)]
    pub initial: InitialCondition,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
}

fn default_rtol() -> f64 {
    DEFAULT_RTOL
}

impl DirectRunConfig {
    /// Defaults: `dt = 1e-3`, snapshot at `t_end`, probe at `x = 0.5`, `u0 = 0`.
    pub fn new(params: ParamSet, nx: usize, ny: usize, t_end: f64) -> Self {
        Self {
            params,
            nx,
            ny,
            dt: 1e-3,
            t_end,
            snapshot_times: vec![t_end],
            probe_x: vec![0.5],
            initial: InitialCondition::default(),
            rtol: DEFAULT_RTOL,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) {
            return Err(Error::OutOfRange {
                name: "t_end",
                value: self.t_end,
                expected: "t_end > 0",
            });
        }
        if !(self.dt > 0.0) {
            return Err(Error::OutOfRange {
                name: "dt",
                value: self.dt,
                expected: "dt > 0",
            });
        }
        if let Some(&t) = self
            .snapshot_times
            .iter()
            .find(|&&t| !(0.0..=self.t_end + 1e-12).contains(&t))
        {
            return Err(Error::OutOfRange {
                name: "snapshot_times",
                value: t,
                expected: "within [0, t_end]",
            });
        }
        Ok(())
    }
}

/// Boundary data of the exact model for `params`.
pub fn cracked_boundary_data(params: &ParamSet) -> BoundaryData {
    let (alpha, beta, eps) = (params.alpha(), params.beta(), params.epsilon());
    let (wall, bottom) = match params.wall_flux() {
        WallFlux::Constant => (
            FluxSpec::Uniform((alpha - beta) * eps / 2.0),
            if alpha > 0.0 { beta / alpha } else { 0.0 },
        ),
        WallFlux::Profile { profile } => (
            FluxSpec::Profile {
                profile: profile.clone(),
                scale: eps,
            },
            0.0,
        ),
    };
    BoundaryData::new()
        .flux(FaceTag::Gamma0, 0.0)
        .flux(FaceTag::Gamma1, 1.0)
        .with(FaceTag::GammaAlpha, FaceCondition::Flux(wall))
        .flux(FaceTag::GammaBeta, bottom)
}

/// Output of [`run_direct`].
#[derive(Debug, Clone)]
pub struct DirectRun {
    pub config: DirectRunConfig,
    pub grid: CrackedGrid,
    pub trajectory: Trajectory,
    /// Full fields at the snapshot times (same order as `trajectory.profiles`).
    pub snapshots: Vec<Field>,
    pub final_field: Field,
    pub max_solver_iterations: usize,
    pub max_solver_residual: f64,
}

/// y-average of each column, in increasing x.
pub fn column_average(grid: &CrackedGrid, field: &Field) -> Profile1d {
    let mut x = Vec::with_capacity(grid.nx());
    let mut u = Vec::with_capacity(grid.nx());
    for i in 0..grid.nx() {
        let (s, c) = grid
            .column(i)
            .fold((0.0, 0usize), |(s, c), k| (s + field.values[k], c + 1));
        if c > 0 {
            x.push(grid.x_center(i));
            u.push(s / c as f64);
        }
    }
    Profile1d { time: field.time, x, u }
}

/// `max_y u - min_y u` per column, in increasing x.
pub fn column_spread(grid: &CrackedGrid, field: &Field) -> Vec<(f64, f64)> {
    (0..grid.nx())
        .map(|i| {
            let (lo, hi) = grid.column(i).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| {
                (lo.min(field.values[k]), hi.max(field.values[k]))
            });
            (grid.x_center(i), hi - lo)
        })
        .collect()
}

/// `Σ u hx hy` over active cells.
pub fn total_mass(grid: &CrackedGrid, field: &Field) -> f64 {
    field.values.iter().sum::<f64>() * grid.cell_area()
}

fn probe_values(profile: &Profile1d, probe_x: &[f64]) -> Vec<f64> {
    probe_x
        .iter()
        .map(|&x| profile.interpolate(x).unwrap_or(f64::NAN))
        .collect()
}

pub fn run_direct(config: &DirectRunConfig) -> Result<DirectRun> {
    config.validate()?;
    let grid = CrackedGrid::new(&config.params, config.nx, config.ny)?;
    let bc = cracked_boundary_data(&config.params);
    let system = StepSystem::assemble(&grid, config.dt, &bc)?.with_rtol(config.rtol);

    let InitialCondition::Uniform { value } = config.initial;
    let mut field = Field::uniform(grid.active_count(), value, 0.0);
    let (steps, snaps) = schedule(config.dt, config.t_end, &config.snapshot_times);

    let mut traj = Trajectory {
        alpha: config.params.alpha(),
        beta: config.params.beta(),
        probe_x: config.probe_x.clone(),
        ..Default::default()
    };
    let mut snapshots = Vec::new();
    let mut record = |k: usize, field: &Field, traj: &mut Trajectory| {
        let avg = column_average(&grid, field);
        traj.times.push(field.time);
        traj.mass.push(total_mass(&grid, field));
        traj.probes.push(probe_values(&avg, &config.probe_x));
        if snaps.binary_search(&k).is_ok() {
            traj.profiles.push(avg);
            snapshots.push(field.clone());
        }
    };
    record(0, &field, &mut traj);

    let mut max_iter = 0;
    let mut max_res: f64 = 0.0;
    for k in 1..=steps {
        let (next, stats) = system.step_with_stats(&field, &bc, None)?;
        if let Some(s) = stats {
            max_iter = max_iter.max(s.iterations);
            max_res = max_res.max(s.relative_residual);
        }
        field = Field {
            time: k as f64 * config.dt,
            ..next
        };
        record(k, &field, &mut traj);
    }

    Ok(DirectRun {
        config: config.clone(),
        grid,
        trajectory: traj,
        snapshots,
        final_field: field,
        max_solver_iterations: max_iter,
        max_solver_residual: max_res,
    })
}
