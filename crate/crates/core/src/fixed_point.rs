//! Homogenized two-domain model solved by Dirichlet–Neumann iteration.
//!
//! On `(-1, 0)`: `∂_t u - u'' = alpha - beta`, `∂_n u = 1 - alpha` at `x = -1`.
//! On `(0, 1)`:  `∂_t u - u'' = 0`, `∂_n u = 0` at `x = 1`.
//! At `x = 0`:   `u(0-) = (1 - alpha) u(0+)`, `∂_x u(0-) = ∂_x u(0+) + beta`.
//!
//! Within each backward-Euler step the interface flux `F` is iterated:
//! solve the right subdomain with `∂_n u = F` at `x = 0`, take
//! `g = (1 - alpha) u(0+)`, solve the left subdomain with `u = g`, and set
//! `F <- beta - ∂_x u(0-)`. On mirrored grids the map `F -> F'` is affine with
//! slope exactly `-(1 - alpha)`, so the plain iteration contracts by
//! `1 - alpha` per sweep and the closed-form extrapolation
//! `F* = F + (F' - F) / (2 - alpha)` lands on the fixed point in one step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fv::{face_flux_dirichlet, face_trace, BoundaryData, Field, StepSystem};
use crate::grid::{BoundaryFace, FaceTag, IntervalGrid, Layout};
use crate::params::ParamSet;
use crate::trajectory::{schedule, InterfaceRecord, Profile1d, Trajectory};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;
pub const FLUX_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub accelerate: bool,
    pub flux_floor: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            accelerate: false,
            flux_floor: FLUX_FLOOR,
        }
    }
}

/// Fields on `(-1, 0)` and `(0, 1)` at a common time.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdomainPair {
    pub minus: Field,
    pub plus: Field,
}

impl SubdomainPair {
    pub fn time(&self) -> f64 {
        self.plus.time
    }
}

/// Interface iteration diagnostics for one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceState {
    /// Converged Neumann datum for the right subdomain.
    pub flux: f64,
    /// Dirichlet datum for the left subdomain, `(1 - alpha) u(0+)`.
    pub g: f64,
    /// `u(0+)` from the right subdomain.
    pub trace_plus: f64,
    /// `∂_x u(0-)` from the left subdomain.
    pub dx_minus: f64,
    /// Successive flux values `F^0, F^1, ...` evaluated this step.
    pub iterates: Vec<f64>,
    /// `|G^{n+1}| / |G^n|` with `G^n = F^{n+1} - F^n`.
    pub ratios: Vec<f64>,
    /// Signed counterparts of `ratios`.
    pub signed_ratios: Vec<f64>,
    /// Number of sweeps (right solve + left solve) performed.
    pub iterations: usize,
    pub accelerated: bool,
}

impl InterfaceState {
    pub fn last_ratio(&self) -> f64 {
        self.ratios.last().copied().unwrap_or(f64::NAN)
    }
}

/// Data of the left subdomain problem, separated so that variants (zeroed
/// data for difference problems) can be solved with the same operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinusData {
    /// `∂_n u` at `x = -1`.
    pub boundary_flux: f64,
    /// Volumetric source.
    pub source: f64,
}

/// Assembled operators for both subdomains at a fixed time step.
#[derive(Debug, Clone)]
pub struct FixedPointSolver {
    params: ParamSet,
    dt: f64,
    minus_grid: IntervalGrid,
    plus_grid: IntervalGrid,
    minus_system: StepSystem,
    plus_system: StepSystem,
    minus_face: BoundaryFace,
    plus_face: BoundaryFace,
}

fn plus_bc(flux: f64) -> BoundaryData {
    BoundaryData::new().flux(FaceTag::Left, flux).flux(FaceTag::Right, 0.0)
}

fn minus_bc(boundary_flux: f64, g: f64) -> BoundaryData {
    BoundaryData::new()
        .flux(FaceTag::Left, boundary_flux)
        .dirichlet(FaceTag::Right, g)
}

/// Result of one sweep `F -> F'`.
struct Sweep {
    plus: Field,
    minus: Field,
    trace_plus: f64,
    g: f64,
    dx_minus: f64,
    next_flux: f64,
}

impl FixedPointSolver {
    pub fn new(params: &ParamSet, n_minus: usize, n_plus: usize, dt: f64) -> Result<Self> {
        let minus_grid = IntervalGrid::new(-1.0, 0.0, n_minus, Layout::CellCentered)?;
        let plus_grid = IntervalGrid::new(0.0, 1.0, n_plus, Layout::CellCentered)?;
        let minus_system = StepSystem::assemble(&minus_grid, dt, &minus_bc(0.0, 0.0))?;
        let plus_system = StepSystem::assemble(&plus_grid, dt, &plus_bc(0.0))?;
        let minus_face = minus_grid.end_face(FaceTag::Right)?;
        let plus_face = plus_grid.end_face(FaceTag::Left)?;
        Ok(Self {
            params: params.clone(),
            dt,
            minus_grid,
            plus_grid,
            minus_system,
            plus_system,
            minus_face,
            plus_face,
        })
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn minus_grid(&self) -> &IntervalGrid {
        &self.minus_grid
    }

    pub fn plus_grid(&self) -> &IntervalGrid {
        &self.plus_grid
    }

    pub fn zero_pair(&self) -> SubdomainPair {
        SubdomainPair {
            minus: Field::uniform(self.minus_grid.n(), 0.0, 0.0),
            plus: Field::uniform(self.plus_grid.n(), 0.0, 0.0),
        }
    }

    pub fn model_minus_data(&self) -> MinusData {
        MinusData {
            boundary_flux: 1.0 - self.params.alpha(),
            source: self.params.alpha() - self.params.beta(),
        }
    }

    /// One step on `(0, 1)` with `∂_n u = flux` at `x = 0`.
    pub fn step_plus(&self, prev_plus: &Field, flux: f64) -> Result<Field> {
        if !flux.is_finite() {
            return Err(Error::NaNDetected("interface flux"));
        }
        self.plus_system.step(prev_plus, &plus_bc(flux), None)
    }

    /// One step on `(-1, 0)` with the model data and `u = g` at `x = 0`.
    pub fn step_minus(&self, prev_minus: &Field, g: f64) -> Result<Field> {
        self.step_minus_with(prev_minus, g, self.model_minus_data())
    }

    pub fn step_minus_with(&self, prev_minus: &Field, g: f64, data: MinusData) -> Result<Field> {
        if !g.is_finite() {
            return Err(Error::NaNDetected("interface trace"));
        }
        let source = vec![data.source; self.minus_grid.n()];
        self.minus_system
            .step(prev_minus, &minus_bc(data.boundary_flux, g), Some(&source))
    }

    /// `u(0+)` of a right-subdomain field carrying `∂_n u = flux` at `x = 0`.
    pub fn trace_plus(&self, plus: &Field, flux: f64) -> f64 {
        face_trace(plus, &self.plus_face, flux)
    }

    /// `∂_x u(0-)` of a left-subdomain field with `u(0) = g`.
    pub fn dx_minus(&self, minus: &Field, g: f64) -> f64 {
        face_flux_dirichlet(minus, &self.minus_face, g).expect("x-normal face")
    }

    fn sweep(&self, pair: &SubdomainPair, flux: f64) -> Result<Sweep> {
        let alpha = self.params.alpha();
        let plus = self.step_plus(&pair.plus, flux)?;
        let trace_plus = self.trace_plus(&plus, flux);
        let g = (1.0 - alpha) * trace_plus;
        let minus = self.step_minus(&pair.minus, g)?;
        let dx_minus = self.dx_minus(&minus, g);
        Ok(Sweep {
            plus,
            minus,
            trace_plus,
            g,
            dx_minus,
            next_flux: self.params.beta() - dx_minus,
        })
    }

    /// Advances `pair` by one step, iterating the interface flux from
    /// `flux_init` until `|F^{n+1} - F^n| <= tol * max(|F^n|, floor)`.
    ///
    /// With `alpha = 0` the plain map has slope `-1` and never contracts, so
    /// extrapolation is always used there.
    pub fn coupled_step(
        &self,
        pair: &SubdomainPair,
        flux_init: f64,
        opts: &FixedPointOptions,
    ) -> Result<(SubdomainPair, InterfaceState)> {
        if !(opts.tol > 0.0) {
            return Err(Error::OutOfRange {
                name: "tol",
                value: opts.tol,
                expected: "tol > 0",
            });
        }
        let alpha = self.params.alpha();
        let accelerate = opts.accelerate || alpha == 0.0;
        let mut flux = flux_init;
        let mut iterates = vec![flux];
        let mut ratios = Vec::new();
        let mut signed = Vec::new();
        let mut prev_diff: Option<f64> = None;

        for it in 1..=opts.max_iter {
            let s = self.sweep(pair, flux)?;
            let diff = s.next_flux - flux;
            iterates.push(s.next_flux);
            if let Some(p) = prev_diff {
                if p != 0.0 {
                    ratios.push((diff / p).abs());
                    signed.push(diff / p);
                }
            }
            if diff.abs() <= opts.tol * flux.abs().max(opts.flux_floor) {
                let state = InterfaceState {
                    flux,
                    g: s.g,
                    trace_plus: s.trace_plus,
                    dx_minus: s.dx_minus,
                    iterates,
                    ratios,
                    signed_ratios: signed,
                    iterations: it,
                    accelerated: accelerate,
                };
                let mut minus = s.minus;
                let mut plus = s.plus;
                let t = pair.time() + self.dt;
                minus.time = t;
                plus.time = t;
                return Ok((SubdomainPair { minus, plus }, state));
            }
            prev_diff = Some(diff);
            flux = if accelerate {
                flux + diff / (2.0 - alpha)
            } else {
                s.next_flux
            };
        }
        Err(Error::NoConvergence {
            iterations: opts.max_iter,
            last_ratio: ratios.last().copied().unwrap_or(f64::NAN),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointConfig {
    pub params: ParamSet,
    /// Cells on each subdomain (mirrored grids).
    pub n_per_unit: usize,
    pub dt: f64,
    pub t_end: f64,
    pub options: FixedPointOptions,
    /// Start each step's iteration from the previous converged flux.
    pub warm_start: bool,
    pub snapshot_times: Vec<f64>,
    pub probe_x: Vec<f64>,
}

impl FixedPointConfig {
    pub fn new(params: ParamSet, n_per_unit: usize, t_end: f64) -> Self {
        Self {
            params,
            n_per_unit,
            dt: 1e-3,
            t_end,
            options: FixedPointOptions::default(),
            warm_start: true,
            snapshot_times: vec![t_end],
            probe_x: vec![0.5],
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointRun {
    pub config: FixedPointConfig,
    pub trajectory: Trajectory,
    pub final_pair: SubdomainPair,
    /// Per-step interface diagnostics.
    pub states: Vec<InterfaceState>,
    pub minus_grid: IntervalGrid,
    pub plus_grid: IntervalGrid,
}

/// Concatenated profile over `(-1, 0) ∪ (0, 1)` (cell centers).
pub fn concat_profile(minus_grid: &IntervalGrid, plus_grid: &IntervalGrid, pair: &SubdomainPair) -> Profile1d {
    let mut x = minus_grid.nodes();
    x.extend(plus_grid.nodes());
    let mut u = pair.minus.values.clone();
    u.extend_from_slice(&pair.plus.values);
    Profile1d {
        time: pair.time(),
        x,
        u,
    }
}

/// Probe by interpolation on the side of `x = 0` that contains the probe.
pub fn side_probe(profile: &Profile1d, x: f64) -> f64 {
    let v = if x < 0.0 {
        profile.interpolate_where(x, |xi| xi < 0.0)
    } else {
        profile.interpolate_where(x, |xi| xi > 0.0)
    };
    v.unwrap_or(f64::NAN)
}

pub fn run_fixed_point(config: &FixedPointConfig) -> Result<FixedPointRun> {
    if !(config.t_end > 0.0) {
        return Err(Error::OutOfRange {
            name: "t_end",
            value: config.t_end,
            expected: "t_end > 0",
        });
    }
    let solver = FixedPointSolver::new(&config.params, config.n_per_unit, config.n_per_unit, config.dt)?;
    let (steps, snaps) = schedule(config.dt, config.t_end, &config.snapshot_times);
    let h = solver.minus_grid().h();
    let mut pair = solver.zero_pair();
    let mut traj = Trajectory {
        alpha: config.params.alpha(),
        beta: config.params.beta(),
        probe_x: config.probe_x.clone(),
        ..Default::default()
    };
    let record = |k: usize, pair: &SubdomainPair, traj: &mut Trajectory| {
        let prof = concat_profile(solver.minus_grid(), solver.plus_grid(), pair);
        traj.times.push(pair.time());
        traj.mass
            .push(h * (pair.minus.values.iter().sum::<f64>() + pair.plus.values.iter().sum::<f64>()));
        traj.probes
            .push(config.probe_x.iter().map(|&x| side_probe(&prof, x)).collect());
        if snaps.binary_search(&k).is_ok() {
            traj.profiles.push(prof);
        }
    };
    record(0, &pair, &mut traj);

    let mut states = Vec::with_capacity(steps);
    let mut flux = 0.0;
    for k in 1..=steps {
        let init = if config.warm_start { flux } else { 0.0 };
        let (mut next, state) = solver.coupled_step(&pair, init, &config.options)?;
        let t = k as f64 * config.dt;
        next.minus.time = t;
        next.plus.time = t;
        flux = state.flux;
        traj.interface.push(InterfaceRecord {
            t,
            flux: state.flux,
            u_minus: state.g,
            u_plus: state.trace_plus,
            dx_minus: state.dx_minus,
            dx_plus: -state.flux,
            iterations: state.iterations,
            last_ratio: state.last_ratio(),
        });
        states.push(state);
        pair = next;
        record(k, &pair, &mut traj);
    }

    Ok(FixedPointRun {
        config: config.clone(),
        trajectory: traj,
        final_pair: pair,
        states,
        minus_grid: solver.minus_grid().clone(),
        plus_grid: solver.plus_grid().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solver(alpha: f64, beta: f64, n: usize, dt: f64) -> FixedPointSolver {
        FixedPointSolver::new(&ParamSet::constant(alpha, beta, 1.0).unwrap(), n, n, dt).unwrap()
    }

    #[test]
    fn plus_step_keeps_constants() {
        let s = solver(0.1, 0.0, 8, 0.1);
        let u = s.step_plus(&Field::uniform(8, 1.5, 0.0), 0.0).unwrap();
        assert!(u.values.iter().all(|v| (v - 1.5).abs() < 1e-14));
    }

    #[test]
    fn plus_step_gains_dt_times_flux() {
        let s = solver(0.1, 0.0, 10, 0.01);
        let u = s.step_plus(&Field::uniform(10, 0.0, 0.0), 1.0).unwrap();
        let m: f64 = u.values.iter().sum::<f64>() * 0.1;
        assert!((m - 0.01).abs() < 1e-15);
    }

    #[test]
    fn plus_two_cell_hand_solve() {
        // (0,1), h = 1/2, dt = 1, influx 1 at x = 0:
        // [2.5, -2; -2, 2.5] u = [1, 0]
        let s = solver(0.1, 0.0, 2, 1.0);
        let u = s.step_plus(&Field::uniform(2, 0.0, 0.0), 1.0).unwrap();
        assert!((u.values[0] - 2.5 / 2.25).abs() < 1e-14);
        assert!((u.values[1] - 2.0 / 2.25).abs() < 1e-14);
    }

    #[test]
    fn minus_two_cell_hand_solve() {
        // (-1,0), h = 1/2, dt = 1, alpha = 0.1, beta = 0: influx 0.9 at x = -1,
        // source 0.1, Dirichlet g = 1 at x = 0 (coefficient 2/h = 4).
        // row 0: (0.5 + 2) u0 - 2 u1 = 0.9 + 0.05
        // row 1: -2 u0 + (0.5 + 2 + 4) u1 = 0.05 + 4
        // det = 2.5*6.5 - 4 = 12.25
        let s = solver(0.1, 0.0, 2, 1.0);
        let u = s.step_minus(&Field::uniform(2, 0.0, 0.0), 1.0).unwrap();
        let u0 = (0.95 * 6.5 + 2.0 * 4.05) / 12.25;
        let u1 = (2.5 * 4.05 + 2.0 * 0.95) / 12.25;
        assert!((u.values[0] - u0).abs() < 1e-14);
        assert!((u.values[1] - u1).abs() < 1e-14);
    }

    #[test]
    fn minus_step_balances_mass_with_interface_flux() {
        let s = solver(0.0, 0.0, 20, 0.01);
        let prev = Field::uniform(20, 0.0, 0.0);
        let u = s.step_minus(&prev, 0.0).unwrap();
        let gain: f64 = u.values.iter().sum::<f64>() * 0.05;
        // influx 1 at x = -1, outflow through x = 0 is -∂_x u(0-)
        let out = s.dx_minus(&u, 0.0);
        assert!((gain - 0.01 * (1.0 + out)).abs() < 1e-14);
    }

    #[test]
    fn minus_step_stationary_with_zero_data() {
        let s = solver(0.3, 0.0, 10, 0.01);
        let prev = Field::uniform(10, 0.7, 0.0);
        let zero = MinusData {
            boundary_flux: 0.0,
            source: 0.0,
        };
        let u = s.step_minus_with(&prev, 0.7, zero).unwrap();
        assert!(u.values.iter().all(|v| (v - 0.7).abs() < 1e-13));
    }

    #[test]
    fn contraction_ratio_is_one_minus_alpha() {
        let s = solver(0.1, 0.0, 50, 1e-3);
        let pair = s.zero_pair();
        let opts = FixedPointOptions::default();
        let (_, st) = s.coupled_step(&pair, 0.0, &opts).unwrap();
        let f = st.flux.abs();
        let iters = &st.iterates;
        let mut checked = 0;
        for n in 0..iters.len() - 2 {
            let g0 = iters[n + 1] - iters[n];
            let g1 = iters[n + 2] - iters[n + 1];
            if g1.abs() > 1e-5 * f {
                assert!((g1 / g0 + 0.9).abs() < 1e-8 * 0.9, "n = {n}: {}", g1 / g0);
                checked += 1;
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn acceleration_matches_plain_iteration() {
        let s = solver(0.1, 0.0, 50, 1e-3);
        let mut pair = s.zero_pair();
        for _ in 0..3 {
            pair = s.coupled_step(&pair, 0.0, &FixedPointOptions::default()).unwrap().0;
        }
        let plain = s.coupled_step(&pair, 0.0, &FixedPointOptions::default()).unwrap().1;
        let fast = s
            .coupled_step(
                &pair,
                0.0,
                &FixedPointOptions {
                    accelerate: true,
                    ..Default::default()
                },
            )
            .unwrap()
            .1;
        assert!((plain.flux - fast.flux).abs() <= 1e-8 * plain.flux.abs());
        assert!(fast.iterations <= 3, "{}", fast.iterations);
    }

    #[test]
    fn cap_reports_no_convergence() {
        let s = solver(0.1, 0.0, 20, 1e-3);
        let opts = FixedPointOptions {
            max_iter: 5,
            ..Default::default()
        };
        let err = s.coupled_step(&s.zero_pair(), 0.0, &opts).unwrap_err();
        match err {
            Error::NoConvergence { iterations, last_ratio } => {
                assert_eq!(iterations, 5);
                assert!((last_ratio - 0.9).abs() < 1e-8);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn converged_step_satisfies_transmission_conditions() {
        let s = solver(0.3, 0.1, 40, 1e-3);
        let opts = FixedPointOptions::default();
        let (_, st) = s.coupled_step(&s.zero_pair(), 0.0, &opts).unwrap();
        let jump_u = st.g - 0.7 * st.trace_plus;
        let jump_flux = st.dx_minus - (-st.flux) - 0.1;
        let scale = st.trace_plus.abs().max(1.0);
        assert!(jump_u.abs() <= 10.0 * opts.tol * scale);
        assert!(jump_flux.abs() <= 10.0 * opts.tol * scale);
    }

    #[test]
    fn run_conserves_energy_at_unit_rate() {
        let mut c = FixedPointConfig::new(ParamSet::constant(0.3, 0.1, 1.0).unwrap(), 40, 0.05);
        c.dt = 1e-3;
        let run = run_fixed_point(&c).unwrap();
        let t = &run.trajectory;
        for k in 1..t.times.len() {
            let rate = (t.mass[k] - t.mass[k - 1]) / (t.times[k] - t.times[k - 1]);
            assert!((rate - 1.0).abs() < 1e-8, "step {k}: {rate}");
        }
    }
}
