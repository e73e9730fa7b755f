//! Time series recorded by every solver.

use serde::{Deserialize, Serialize};

/// A 1-D profile `u(x)` at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile1d {
    pub time: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

impl Profile1d {
    /// Piecewise-linear interpolation restricted to nodes selected by `keep`,
    /// clamped to the end values outside the kept range.
    pub fn interpolate_where(&self, x: f64, keep: impl Fn(f64) -> bool) -> Option<f64> {
        let nodes: Vec<(f64, f64)> = self
            .x
            .iter()
            .zip(&self.u)
            .filter(|(xi, _)| keep(**xi))
            .map(|(a, b)| (*a, *b))
            .collect();
        interpolate(&nodes, x)
    }

    pub fn interpolate(&self, x: f64) -> Option<f64> {
        self.interpolate_where(x, |_| true)
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Linear interpolation on sorted `(x, u)` nodes; constant beyond the ends.
pub fn interpolate(nodes: &[(f64, f64)], x: f64) -> Option<f64> {
    let first = nodes.first()?;
    let last = nodes.last()?;
    if x <= first.0 {
        return Some(first.1);
    }
    if x >= last.0 {
        return Some(last.1);
    }
    let k = nodes.partition_point(|n| n.0 <= x) - 1;
    let (x0, u0) = nodes[k];
    let (x1, u1) = nodes[k + 1];
    Some(u0 + (x - x0) / (x1 - x0) * (u1 - u0))
}

/// Interface diagnostics at `x = 0` for one time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceRecord {
    pub t: f64,
    /// Neumann datum `∂_n u` imposed on the right subdomain at `x = 0`.
    pub flux: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    pub dx_minus: f64,
    pub dx_plus: f64,
    pub iterations: usize,
    /// Last `|G^{n+1}| / |G^n|`, NaN when fewer than two differences exist.
    pub last_ratio: f64,
}

/// Recorded output of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub alpha: f64,
    pub beta: f64,
    /// Recorded instants, starting at the initial time.
    pub times: Vec<f64>,
    /// `∫ u` at each recorded instant.
    pub mass: Vec<f64>,
    pub probe_x: Vec<f64>,
    /// `probes[k][p]`: value at `probe_x[p]` and `times[k]`.
    pub probes: Vec<Vec<f64>>,
    /// Profiles at the requested snapshot times.
    pub profiles: Vec<Profile1d>,
    /// One record per time step (homogenized solvers only).
    pub interface: Vec<InterfaceRecord>,
}

impl Trajectory {
    pub fn final_profile(&self) -> Option<&Profile1d> {
        self.profiles.last()
    }

    pub fn profile_at(&self, t: f64) -> Option<&Profile1d> {
        self.profiles.iter().find(|p| (p.time - t).abs() < 1e-9)
    }

    /// Probe series for probe `p` as `(t, u)`.
    pub fn probe_series(&self, p: usize) -> Vec<(f64, f64)> {
        self.times.iter().zip(&self.probes).map(|(t, v)| (*t, v[p])).collect()
    }
}

/// `(t, ∫u)` pairs.
pub fn mass_series(trajectory: &Trajectory) -> Vec<(f64, f64)> {
    trajectory
        .times
        .iter()
        .copied()
        .zip(trajectory.mass.iter().copied())
        .collect()
}

/// Step count and snapshot step indices for a run of length `t_end`.
pub(crate) fn schedule(dt: f64, t_end: f64, snapshot_times: &[f64]) -> (usize, Vec<usize>) {
    let steps = (t_end / dt).round().max(1.0) as usize;
    let mut snaps: Vec<usize> = snapshot_times
        .iter()
        .map(|t| ((t / dt).round() as usize).min(steps))
        .collect();
    snaps.sort_unstable();
    snaps.dedup();
    (steps, snaps)
}
