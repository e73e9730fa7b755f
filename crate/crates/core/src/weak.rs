//! Single-domain P1 finite elements on `(-1, 1)` for the homogenized model.
//!
//! Three formulations share the assembly:
//!
//! * `FullWeak`: for every P1 test function `v`,
//!   `∫ ∂_t u v + ∫ u' v' - (1-alpha) v(-1) - beta v(0)
//!    - (alpha/delta) ∫_0^delta u v' - (alpha-beta) ∫_{-1}^0 v = 0`,
//!   i.e. the interface dipole regularized over `(0, delta)`. The dipole term
//!   is kept implicit, giving a nonsymmetric tridiagonal system.
//! * `ApproxSmallAlpha`: source `alpha 1_{x<0}`, no interface terms.
//! * `ProfileVariant`: source `2 f_alpha(x) 1_{x<0}`, no interface terms.
//!
//! Testing with `v = 1` gives `d/dt ∫u = 1` exactly in all three cases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{IntervalGrid, Layout};
use crate::linalg::Tridiag;
use crate::params::{ParamSet, WallProfile};
use crate::trajectory::{schedule, InterfaceRecord, Profile1d, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakModel {
    FullWeak,
    ApproxSmallAlpha,
    ProfileVariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakRunConfig {
    pub params: ParamSet,
    /// Elements on `(-1, 1)`; must be even.
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Dirac window width; `None` means `2h`.
    pub delta: Option<f64>,
    pub model: WeakModel,
    pub snapshot_times: Vec<f64>,
    pub probe_x: Vec<f64>,
}

impl WeakRunConfig {
    pub fn new(params: ParamSet, n: usize, t_end: f64, model: WeakModel) -> Self {
        Self {
            params,
            n,
            dt: 1e-3,
            t_end,
            delta: None,
            model,
            snapshot_times: vec![t_end],
            probe_x: vec![0.5],
        }
    }
}

#[derive(Debug, Clone)]
pub struct WeakRun {
    pub config: WeakRunConfig,
    pub grid: IntervalGrid,
    /// Resolved Dirac window (0 for models without one).
    pub delta: f64,
    pub trajectory: Trajectory,
    pub final_values: Vec<f64>,
}

fn check_delta(delta: f64, h: f64) -> Result<()> {
    let k = delta / h;
    if (k - k.round()).abs() > 1e-9 {
        return Err(Error::DeltaMisaligned {
            delta,
            h,
            reason: "delta must be a multiple of h",
        });
    }
    if k.round() < 1.0 {
        return Err(Error::DeltaMisaligned {
            delta,
            h,
            reason: "delta must be at least h",
        });
    }
    if delta > 0.25 + 1e-12 {
        return Err(Error::DeltaMisaligned {
            delta,
            h,
            reason: "delta must not exceed 0.25",
        });
    }
    Ok(())
}

struct Assembly {
    matrix: Tridiag,
    mass: Tridiag,
    load: Vec<f64>,
    /// Vertex index of `x = 0`.
    zero: usize,
    /// Vertex index of `x = delta` (equals `zero` without a window).
    window_end: usize,
}

fn assemble(config: &WeakRunConfig, grid: &IntervalGrid, delta: f64, profile: Option<&WallProfile>) -> Assembly {
    let n = grid.n();
    let h = grid.h();
    let dt = config.dt;
    let alpha = config.params.alpha();
    let beta = config.params.beta();
    let zero = grid.vertex_index(0.0).expect("x = 0 is a vertex");
    let window = if config.model == WeakModel::FullWeak {
        (delta / h).round() as usize
    } else {
        0
    };

    let mut mass = Tridiag::zeros(n + 1);
    let mut matrix = Tridiag::zeros(n + 1);
    let mut load = vec![0.0; n + 1];
    for e in 0..n {
        let (l, r) = (e, e + 1);
        for (a, b, m) in [(l, l, 2.0), (l, r, 1.0), (r, l, 1.0), (r, r, 2.0)] {
            mass.add(a, b, m * h / 6.0);
        }
        for (a, b, k) in [(l, l, 1.0), (l, r, -1.0), (r, l, -1.0), (r, r, 1.0)] {
            matrix.add(a, b, k / h);
        }
        // dipole: -(alpha/delta) ∫_e phi_j phi_i', with ∫_e phi_j = h/2
        if e >= zero && e < zero + window {
            let c = alpha / delta * 0.5;
            for j in [l, r] {
                matrix.add(l, j, c);
                matrix.add(r, j, -c);
            }
        }
        let (xl, xr) = (grid.a() + l as f64 * h, grid.a() + r as f64 * h);
        if xr <= 0.0 {
            // ∫_e s phi_i for the volumetric source on x < 0
            match config.model {
                WeakModel::FullWeak => {
                    load[l] += (alpha - beta) * h / 2.0;
                    load[r] += (alpha - beta) * h / 2.0;
                }
                WeakModel::ApproxSmallAlpha => {
                    load[l] += alpha * h / 2.0;
                    load[r] += alpha * h / 2.0;
                }
                WeakModel::ProfileVariant => {
                    let f = profile.expect("profile variant has a profile");
                    let m0 = f.integral(xl, xr);
                    let m1 = f.first_moment(xl, xr);
                    // phi_l = (xr - x)/h, phi_r = (x - xl)/h
                    load[l] += 2.0 * (xr * m0 - m1) / h;
                    load[r] += 2.0 * (m1 - xl * m0) / h;
                }
            }
        }
    }
    load[0] += 1.0 - alpha;
    if config.model == WeakModel::FullWeak {
        load[zero] += beta;
    }
    for i in 0..=n {
        for j in i.saturating_sub(1)..=(i + 1).min(n) {
            matrix.add(i, j, mass.get(i, j) / dt);
        }
    }
    Assembly {
        matrix,
        mass,
        load,
        zero,
        window_end: zero + window,
    }
}

fn interface_record(t: f64, u: &[f64], asm: &Assembly, h: f64) -> InterfaceRecord {
    let (z, w) = (asm.zero, asm.window_end);
    InterfaceRecord {
        t,
        flux: (u[w] - u[w + 1]) / h,
        u_minus: u[z],
        u_plus: u[w],
        dx_minus: (u[z] - u[z - 1]) / h,
        dx_plus: (u[w + 1] - u[w]) / h,
        iterations: 1,
        last_ratio: f64::NAN,
    }
}

fn run_model(config: &WeakRunConfig) -> Result<WeakRun> {
    if config.n % 2 != 0 {
        return Err(Error::OddCellCount {
            a: -1.0,
            b: 1.0,
            n: config.n,
        });
    }
    if !(config.dt > 0.0) || !(config.t_end > 0.0) {
        return Err(Error::OutOfRange {
            name: "dt/t_end",
            value: config.dt.min(config.t_end),
            expected: "> 0",
        });
    }
    let grid = IntervalGrid::new(-1.0, 1.0, config.n, Layout::VertexP1)?;
    let h = grid.h();
    let alpha = config.params.alpha();
    let beta = config.params.beta();

    let mut profile = None;
    let delta = match config.model {
        WeakModel::FullWeak => {
            let d = config.delta.unwrap_or(2.0 * h);
            check_delta(d, h)?;
            d
        }
        WeakModel::ApproxSmallAlpha => {
            if beta != 0.0 {
                return Err(Error::InconsistentMode(format!(
                    "small-alpha approximation needs beta = 0, got {beta}"
                )));
            }
            0.0
        }
        WeakModel::ProfileVariant => {
            let p = config
                .params
                .profile()
                .ok_or_else(|| Error::InconsistentMode("profile variant needs a wall-flux profile".into()))?;
            let integral = p.integral(-1.0, 0.0);
            if (integral - alpha / 2.0).abs() > crate::params::PROFILE_MASS_TOL {
                return Err(Error::ProfileMassMismatch {
                    integral,
                    expected: alpha / 2.0,
                });
            }
            if p.eval(0.0).abs() > 1e-12 {
                return Err(Error::InconsistentMode(format!(
                    "profile variant needs f_alpha(0) = 0, got {}",
                    p.eval(0.0)
                )));
            }
            profile = Some(p.clone());
            0.0
        }
    };

    let asm = assemble(config, &grid, delta, profile.as_ref());
    let nodes = grid.nodes();
    let (steps, snaps) = schedule(config.dt, config.t_end, &config.snapshot_times);
    let mut u = vec![0.0; grid.dof_count()];
    let mut traj = Trajectory {
        alpha,
        beta,
        probe_x: config.probe_x.clone(),
        ..Default::default()
    };
    // ∫ u_h = Σ_i u_i ∫ phi_i
    let weights: Vec<f64> = (0..=grid.n())
        .map(|i| if i == 0 || i == grid.n() { h / 2.0 } else { h })
        .collect();
    let record = |k: usize, t: f64, u: &[f64], traj: &mut Trajectory| {
        let prof = Profile1d {
            time: t,
            x: nodes.clone(),
            u: u.to_vec(),
        };
        traj.times.push(t);
        traj.mass.push(u.iter().zip(&weights).map(|(a, b)| a * b).sum());
        traj.probes.push(
            config
                .probe_x
                .iter()
                .map(|&x| prof.interpolate(x).unwrap_or(f64::NAN))
                .collect(),
        );
        if snaps.binary_search(&k).is_ok() {
            traj.profiles.push(prof);
        }
    };
    record(0, 0.0, &u, &mut traj);

    for k in 1..=steps {
        let t = k as f64 * config.dt;
        let mut rhs = asm.mass.matvec(&u);
        for (r, l) in rhs.iter_mut().zip(&asm.load) {
            *r = *r / config.dt + l;
        }
        u = asm.matrix.solve(&rhs)?;
        traj.interface.push(interface_record(t, &u, &asm, h));
        record(k, t, &u, &mut traj);
    }

    Ok(WeakRun {
        config: config.clone(),
        grid,
        delta,
        trajectory: traj,
        final_values: u,
    })
}

fn require(config: &WeakRunConfig, model: WeakModel) -> Result<()> {
    if config.model != model {
        return Err(Error::InconsistentMode(format!(
            "expected model {model:?}, got {:?}",
            config.model
        )));
    }
    Ok(())
}

/// Full weak formulation with the regularized interface dipole.
pub fn run_weak(config: &WeakRunConfig) -> Result<WeakRun> {
    require(config, WeakModel::FullWeak)?;
    run_model(config)
}

/// Small-alpha approximation: continuous `u` and `u'` at `x = 0`.
pub fn run_approx(config: &WeakRunConfig) -> Result<WeakRun> {
    require(config, WeakModel::ApproxSmallAlpha)?;
    run_model(config)
}

/// Profile wall-flux variant with source `2 f_alpha(x)` on `x < 0`.
pub fn run_profile_variant(config: &WeakRunConfig) -> Result<WeakRun> {
    require(config, WeakModel::ProfileVariant)?;
    run_model(config)
}

/// Dispatches on `config.model`.
pub fn run(config: &WeakRunConfig) -> Result<WeakRun> {
    run_model(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::WallFlux;

    fn cfg(alpha: f64, beta: f64, model: WeakModel) -> WeakRunConfig {
        let params = match model {
            WeakModel::ProfileVariant => ParamSet::new(
                alpha,
                0.0,
                1.0,
                WallFlux::Profile {
                    profile: WallProfile::linear(alpha),
                },
            )
            .unwrap(),
            _ => ParamSet::constant(alpha, beta, 1.0).unwrap(),
        };
        let mut c = WeakRunConfig::new(params, 80, 0.1, model);
        c.dt = 1e-3;
        c
    }

    fn max_rate_error(t: &Trajectory) -> f64 {
        (1..t.times.len())
            .map(|k| ((t.mass[k] - t.mass[k - 1]) / (t.times[k] - t.times[k - 1]) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn all_models_have_unit_energy_rate() {
        for c in [
            cfg(0.3, 0.1, WeakModel::FullWeak),
            cfg(0.6, 0.0, WeakModel::FullWeak),
            cfg(0.1, 0.0, WeakModel::ApproxSmallAlpha),
            cfg(0.1, 0.0, WeakModel::ProfileVariant),
        ] {
            let run = run(&c).unwrap();
            assert!(max_rate_error(&run.trajectory) < 1e-9, "{:?}", c.model);
        }
    }

    #[test]
    fn zero_alpha_models_coincide() {
        let a = run(&cfg(0.0, 0.0, WeakModel::FullWeak)).unwrap();
        let b = run(&cfg(0.0, 0.0, WeakModel::ApproxSmallAlpha)).unwrap();
        for (x, y) in a.final_values.iter().zip(&b.final_values) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn delta_validation() {
        let mut c = cfg(0.1, 0.0, WeakModel::FullWeak);
        c.delta = Some(0.0375); // 1.5 h
        assert!(matches!(run_weak(&c), Err(Error::DeltaMisaligned { .. })));
        c.delta = Some(0.5);
        assert!(matches!(run_weak(&c), Err(Error::DeltaMisaligned { .. })));
        c.delta = Some(0.0);
        assert!(matches!(run_weak(&c), Err(Error::DeltaMisaligned { .. })));
        c.delta = Some(0.1);
        assert!(run_weak(&c).is_ok());
    }

    #[test]
    fn wrong_model_rejected() {
        let c = cfg(0.1, 0.0, WeakModel::FullWeak);
        assert!(run_approx(&c).is_err());
        assert!(run_profile_variant(&c).is_err());
        let c = cfg(0.3, 0.1, WeakModel::ApproxSmallAlpha);
        assert!(run_approx(&c).is_err());
    }

    #[test]
    fn profile_variant_needs_profile() {
        let mut c = cfg(0.1, 0.0, WeakModel::ProfileVariant);
        c.params = ParamSet::constant(0.1, 0.0, 1.0).unwrap();
        assert!(matches!(run_profile_variant(&c), Err(Error::InconsistentMode(_))));
    }

    #[test]
    fn profile_load_sums_to_alpha() {
        let c = cfg(0.4, 0.0, WeakModel::ProfileVariant);
        let grid = IntervalGrid::new(-1.0, 1.0, c.n, Layout::VertexP1).unwrap();
        let asm = assemble(&c, &grid, 0.0, c.params.profile());
        let total: f64 = asm.load.iter().sum();
        assert!((total - (1.0 - 0.4) - 0.4).abs() < 1e-14);
    }

    #[test]
    fn dipole_columns_sum_to_zero() {
        let c = cfg(0.6, 0.0, WeakModel::FullWeak);
        let grid = IntervalGrid::new(-1.0, 1.0, c.n, Layout::VertexP1).unwrap();
        let asm = assemble(&c, &grid, 2.0 * grid.h(), None);
        for j in 0..=c.n {
            let col: f64 = (0..=c.n)
                .map(|i| asm.matrix.get(i, j) - asm.mass.get(i, j) / c.dt)
                .sum();
            assert!(col.abs() < 1e-10, "column {j}: {col}");
        }
    }
}
