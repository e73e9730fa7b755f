//! Metrics and oracles: the period-convergence error, projections between
//! the homogenized and cracked domains, energy audits, transmission
//! residuals and the long-time drift profile.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::direct::{run_direct, DirectRunConfig};
use crate::error::{Error, Result};
use crate::fixed_point::{run_fixed_point, FixedPointConfig, FixedPointOptions};
use crate::fv::Field;
use crate::grid::CrackedGrid;
use crate::params::ParamSet;
use crate::trajectory::{interpolate, Profile1d, Trajectory};

/// Active cells of `grid` with `x > 0`, in active-cell order.
pub fn plus_cells(grid: &CrackedGrid) -> Vec<usize> {
    grid.cells()
        .iter()
        .enumerate()
        .filter(|(_, &(i, _))| grid.x_center(i) > 0.0)
        .map(|(k, _)| k)
        .collect()
}

fn side_nodes(profile: &Profile1d, plus: bool) -> Vec<(f64, f64)> {
    profile
        .x
        .iter()
        .zip(&profile.u)
        .filter(|(x, _)| if plus { **x > 0.0 } else { **x < 0.0 })
        .map(|(a, b)| (*a, *b))
        .collect()
}

fn check_domain(profile: &Profile1d) -> Result<()> {
    if profile.x.len() != profile.u.len() {
        return Err(Error::DomainMismatch(format!(
            "profile has {} abscissae and {} values",
            profile.x.len(),
            profile.u.len()
        )));
    }
    if let Some(x) = profile.x.iter().find(|x| !(-1.0 - 1e-12..=1.0 + 1e-12).contains(*x)) {
        return Err(Error::DomainMismatch(format!("node x = {x} outside [-1, 1]")));
    }
    if !profile.x.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::DomainMismatch("profile abscissae not increasing".into()));
    }
    Ok(())
}

/// Piecewise-linear interpolation of the homogenized profile at the
/// x-centers of the active cells with `x > 0`, replicated over `y`.
/// Values are ordered as [`plus_cells`].
pub fn project_homog_to_cracked(profile: &Profile1d, grid: &CrackedGrid) -> Result<Field> {
    check_domain(profile)?;
    let nodes = side_nodes(profile, true);
    if nodes.is_empty() {
        return Err(Error::DomainMismatch("profile has no nodes in (0, 1)".into()));
    }
    let values = plus_cells(grid)
        .into_iter()
        .map(|k| interpolate(&nodes, grid.center(k).0).expect("nonempty"))
        .collect();
    Ok(Field {
        values,
        time: profile.time,
    })
}

/// Relative errors between a direct field and a homogenized profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonError {
    /// Relative L² error on the cells with `x > 0`.
    pub err: f64,
    /// Relative L² error on the cells with `x < 0` against `u/(1-alpha)`.
    pub err_minus: Option<f64>,
}

fn relative_l2(pairs: impl Iterator<Item = (f64, f64)>) -> Result<f64> {
    let (num, den) = pairs.fold((0.0, 0.0), |(n, d), (a, b)| (n + (a - b) * (a - b), d + a * a));
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok((num / den).sqrt())
}

/// `‖project(u_homog) - u_direct‖ / ‖u_direct‖` over the active cells with
/// `x > 0`; with `with_minus`, also the material part of `x < 0` against
/// `u_homog / (1 - alpha)`.
pub fn epsilon_error(direct: &Field, grid: &CrackedGrid, homog: &Profile1d, with_minus: bool) -> Result<EpsilonError> {
    if direct.len() != grid.active_count() {
        return Err(Error::DomainMismatch(format!(
            "direct field has {} values for {} active cells",
            direct.len(),
            grid.active_count()
        )));
    }
    let projected = project_homog_to_cracked(homog, grid)?;
    let cells = plus_cells(grid);
    let err = relative_l2(
        cells
            .iter()
            .zip(&projected.values)
            .map(|(&k, &p)| (direct.values[k], p)),
    )?;
    let err_minus = if with_minus {
        let nodes = side_nodes(homog, false);
        if nodes.is_empty() {
            return Err(Error::DomainMismatch("profile has no nodes in (-1, 0)".into()));
        }
        let scale = 1.0 / (1.0 - grid.alpha());
        let pairs = grid.cells().iter().enumerate().filter_map(|(k, &(i, _))| {
            let x = grid.x_center(i);
            (x < 0.0).then(|| (direct.values[k], scale * interpolate(&nodes, x).expect("nonempty")))
        });
        Some(relative_l2(pairs)?)
    } else {
        None
    };
    Ok(EpsilonError { err, err_minus })
}

/// Relative L² distance `‖a - b‖ / ‖b‖` on the nodes of `a` with
/// `|x| > cutoff`, interpolating `b` on the same side of `x = 0`.
pub fn relative_distance(a: &Profile1d, b: &Profile1d, cutoff: f64) -> Result<f64> {
    let left = side_nodes(b, false);
    let right = side_nodes(b, true);
    let pairs = a.x.iter().zip(&a.u).filter(|(x, _)| x.abs() > cutoff).map(|(&x, &ua)| {
        let nodes = if x < 0.0 { &left } else { &right };
        (interpolate(nodes, x).unwrap_or(f64::NAN), ua)
    });
    relative_l2(pairs)
}

/// Direct y-average rescaled to the period average with the notch counted
/// as zero: values at `x < 0` are multiplied by `1 - alpha`. This is the
/// quantity the homogenized solution approximates on both sides.
pub fn period_average(material_average: &Profile1d, alpha: f64) -> Profile1d {
    let u = material_average
        .x
        .iter()
        .zip(&material_average.u)
        .map(|(&x, &u)| if x < 0.0 { (1.0 - alpha) * u } else { u })
        .collect();
    Profile1d {
        time: material_average.time,
        x: material_average.x.clone(),
        u,
    }
}

/// Long-time shape of the homogenized solution for `beta = 0` and `u0 = 0`:
/// `u(x, t) ≈ rate(x) t + w(x)` with `rate = c_plus` on `(0, 1)` and
/// `c_minus = (1 - alpha) c_plus` on `(-1, 0)`, `c_plus + c_minus = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftProfile {
    pub alpha: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    /// `w(0+)`.
    pub constant: f64,
}

impl DriftProfile {
    /// `w` on `(0, 1)`.
    pub fn w_plus(&self, x: f64) -> f64 {
        self.c_plus * (0.5 * x * x - x) + self.constant
    }

    /// `w` on `(-1, 0)`.
    pub fn w_minus(&self, x: f64) -> f64 {
        0.5 * (self.c_minus - self.alpha) * x * x - self.c_plus * x + (1.0 - self.alpha) * self.constant
    }

    pub fn dw_plus(&self, x: f64) -> f64 {
        self.c_plus * (x - 1.0)
    }

    pub fn dw_minus(&self, x: f64) -> f64 {
        (self.c_minus - self.alpha) * x - self.c_plus
    }

    /// `w(x)`, with `x = 0` read from the right.
    pub fn w(&self, x: f64) -> f64 {
        if x < 0.0 {
            self.w_minus(x)
        } else {
            self.w_plus(x)
        }
    }

    pub fn rate(&self, x: f64) -> f64 {
        if x < 0.0 {
            self.c_minus
        } else {
            self.c_plus
        }
    }

    /// `rate(x) t + w(x)`.
    pub fn long_time(&self, x: f64, t: f64) -> f64 {
        self.rate(x) * t + self.w(x)
    }

    /// `∫_{-1}^{1} w` by composite Simpson (exact for the quadratics).
    pub fn integral(&self) -> f64 {
        let n = 64;
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| {
            let h = (b - a) / n as f64;
            (0..n)
                .map(|k| {
                    let l = a + k as f64 * h;
                    h / 6.0 * (f(l) + 4.0 * f(l + 0.5 * h) + f(l + h))
                })
                .sum::<f64>()
        };
        simpson(&|x| self.w_minus(x), -1.0, 0.0) + simpson(&|x| self.w_plus(x), 0.0, 1.0)
    }

    /// Largest violation among: zero mean, value scaling at `x = 0`, flux
    /// continuity at `x = 0`, boundary fluxes at `x = ±1`, and the two
    /// drift equations.
    pub fn self_check(&self) -> f64 {
        let a = self.alpha;
        [
            self.integral(),
            self.w_minus(0.0) - (1.0 - a) * self.w_plus(0.0),
            self.dw_minus(0.0) - self.dw_plus(0.0),
            self.dw_plus(1.0),
            -self.dw_minus(-1.0) - (1.0 - a),
            self.c_minus - (1.0 - a) * self.c_plus,
            self.c_minus + self.c_plus - 1.0,
        ]
        .iter()
        .fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

/// Tolerance of the self-checks run by [`drift_profile`].
pub const DRIFT_CHECK_TOL: f64 = 1e-12;

pub fn drift_profile(alpha: f64, beta: f64) -> Result<DriftProfile> {
    if beta != 0.0 {
        return Err(Error::BetaUnsupported(beta));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "0 <= alpha < 1",
        });
    }
    let c_plus = 1.0 / (2.0 - alpha);
    let profile = DriftProfile {
        alpha,
        c_plus,
        c_minus: (1.0 - alpha) * c_plus,
        constant: -(1.0 - alpha) / (6.0 * (2.0 - alpha)),
    };
    let violation = profile.self_check();
    assert!(
        violation <= DRIFT_CHECK_TOL,
        "drift profile self-check failed: {violation:e}"
    );
    Ok(profile)
}

/// One row of [`transmission_residuals`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub t: f64,
    pub jump_u: f64,
    pub jump_flux: f64,
}

/// `u(0-) - (1-alpha) u(0+)` and `∂_x u(0-) - ∂_x u(0+) - beta` per step.
pub fn transmission_residuals(trajectory: &Trajectory) -> Vec<Residual> {
    let (a, b) = (trajectory.alpha, trajectory.beta);
    trajectory
        .interface
        .iter()
        .map(|r| Residual {
            t: r.t,
            jump_u: r.u_minus - (1.0 - a) * r.u_plus,
            jump_flux: r.dx_minus - r.dx_plus - b,
        })
        .collect()
}

/// `max_k |(M_k - M_{k-1}) / (t_k - t_{k-1}) - expected_rate|`.
pub fn energy_audit(trajectory: &Trajectory, expected_rate: f64) -> f64 {
    trajectory
        .times
        .windows(2)
        .zip(trajectory.mass.windows(2))
        .map(|(t, m)| ((m[1] - m[0]) / (t[1] - t[0]) - expected_rate).abs())
        .fold(0.0, f64::max)
}

/// Smallest even `ny` with `alpha ny / 2` integral.
pub fn alignment_modulus(alpha: f64) -> Result<usize> {
    (1..=100_000)
        .map(|k| 2 * k)
        .find(|&ny| {
            let half = alpha * ny as f64 / 2.0;
            (half - half.round()).abs() <= 1e-9
        })
        .ok_or_else(|| Error::Alignment(format!("no aligned ny found for alpha = {alpha}")))
}

/// Smallest multiple of the alignment modulus with `hy = eps / ny <= hx`.
pub fn policy_ny(alpha: f64, epsilon: f64, nx: usize) -> Result<usize> {
    let m = alignment_modulus(alpha)?;
    let hx = 2.0 / nx as f64;
    let k = ((epsilon / hx) / m as f64 - 1e-9).ceil().max(1.0) as usize;
    Ok(k * m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub epsilon: f64,
    pub nx: usize,
    pub ny: usize,
    pub err: f64,
    pub err_minus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub alpha: f64,
    pub beta: f64,
    pub t1: f64,
    pub dt: f64,
    /// Sorted by decreasing epsilon.
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.err).collect()
    }

    /// `err_k / err_{k+1}` for consecutive rows.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[0].err / w[1].err).collect()
    }
}

/// Least-squares line `err ≈ slope eps + intercept` over the pre-floor rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Epsilons used by the fit.
    pub regime: Vec<f64>,
}

/// Rows whose error exceeds three times the smallest error.
pub fn pre_floor_regime(table: &ErrorTable) -> Vec<ErrorRow> {
    let min = table.rows.iter().map(|r| r.err).fold(f64::INFINITY, f64::min);
    table.rows.iter().copied().filter(|r| r.err > 3.0 * min).collect()
}

pub fn fit_line(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            got: points.len(),
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Fits the pre-floor regime, or every row when that regime has fewer than
/// two points.
pub fn fit_table(table: &ErrorTable) -> Result<LinearFit> {
    let mut rows = pre_floor_regime(table);
    if rows.len() < 2 {
        rows = table.rows.clone();
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.epsilon, r.err)).collect();
    let (slope, intercept) = fit_line(&points)?;
    Ok(LinearFit {
        slope,
        intercept,
        regime: rows.iter().map(|r| r.epsilon).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Epsilon of `params` is ignored.
    pub params: ParamSet,
    /// x-cells of the direct grid; the homogenized grids use `nx / 2` cells
    /// per unit so that both share `hx`.
    pub nx: usize,
    pub dt: f64,
    pub t1: f64,
    pub with_minus: bool,
    pub fixed_point: FixedPointOptions,
}

impl SweepConfig {
    pub fn new(params: ParamSet, nx: usize, t1: f64) -> Self {
        Self {
            params,
            nx,
            dt: 1e-3,
            t1,
            with_minus: false,
            fixed_point: FixedPointOptions::default(),
        }
    }
}

/// Runs the homogenized solver once and the direct solver for every epsilon
/// (concurrently), then fits the errors.
pub fn sweep_epsilon(config: &SweepConfig, eps_list: &[f64]) -> Result<(ErrorTable, LinearFit)> {
    if eps_list.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: eps_list.len(),
        });
    }
    let mut eps = eps_list.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::config("epsilons", "duplicate epsilon values"));
    }

    let mut fp = FixedPointConfig::new(config.params.clone(), config.nx / 2, config.t1);
    fp.dt = config.dt;
    fp.options = config.fixed_point;
    let homog = run_fixed_point(&fp)?;
    let profile = homog.trajectory.final_profile().expect("final snapshot").clone();

    let rows: Vec<Result<ErrorRow>> = eps
        .par_iter()
        .map(|&e| {
            let params = config.params.with_epsilon(e)?;
            let ny = policy_ny(params.alpha(), e, config.nx)?;
            let mut dc = DirectRunConfig::new(params, config.nx, ny, config.t1);
            dc.dt = config.dt;
            let run = run_direct(&dc)?;
            let ee = epsilon_error(&run.final_field, &run.grid, &profile, config.with_minus)?;
            Ok(ErrorRow {
                epsilon: e,
                nx: config.nx,
                ny,
                err: ee.err,
                err_minus: ee.err_minus,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let table = ErrorTable {
        alpha: config.params.alpha(),
        beta: config.params.beta(),
        t1: config.t1,
        dt: config.dt,
        rows,
    };
    let fit = fit_table(&table)?;
    Ok((table, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(alpha: f64, eps: f64, nx: usize, ny: usize) -> CrackedGrid {
        CrackedGrid::new(&ParamSet::constant(alpha, 0.0, eps).unwrap(), nx, ny).unwrap()
    }

    fn line(n: usize, f: impl Fn(f64) -> f64) -> Profile1d {
        let h = 2.0 / n as f64;
        let x: Vec<f64> = (0..n).map(|i| -1.0 + (i as f64 + 0.5) * h).collect();
        let u = x.iter().map(|&x| f(x)).collect();
        Profile1d { time: 0.5, x, u }
    }

    #[test]
    fn projection_of_constant_is_constant() {
        let g = grid(0.1, 0.2, 20, 20);
        let f = project_homog_to_cracked(&line(10, |_| 3.0), &g).unwrap();
        assert_eq!(f.len(), plus_cells(&g).len());
        assert!(f.values.iter().all(|&v| v == 3.0));
    }

    #[test]
    fn projection_reproduces_linear_on_matching_grid() {
        let g = grid(0.1, 0.2, 20, 20);
        let f = project_homog_to_cracked(&line(20, |x| x), &g).unwrap();
        for (k, v) in plus_cells(&g).into_iter().zip(&f.values) {
            assert!((g.center(k).0 - v).abs() < 1e-15);
        }
    }

    #[test]
    fn coarse_projection_stays_between_nodes() {
        let g = grid(0.1, 0.2, 80, 20);
        let p = line(8, |x| (3.0 * x).sin());
        let f = project_homog_to_cracked(&p, &g).unwrap();
        for (k, v) in plus_cells(&g).into_iter().zip(&f.values) {
            let x = g.center(k).0;
            let near =
                p.x.iter()
                    .zip(&p.u)
                    .filter(|(xi, _)| (*xi - x).abs() <= 0.25)
                    .map(|(_, u)| *u);
            let (lo, hi) = near.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), u| (l.min(u), h.max(u)));
            assert!(*v >= lo - 1e-15 && *v <= hi + 1e-15);
        }
    }

    #[test]
    fn projection_rejects_foreign_domain() {
        let g = grid(0.1, 0.2, 20, 20);
        let p = Profile1d {
            time: 0.0,
            x: vec![1.5, 2.0],
            u: vec![0.0, 0.0],
        };
        assert!(matches!(
            project_homog_to_cracked(&p, &g),
            Err(Error::DomainMismatch(_))
        ));
        let p = Profile1d {
            time: 0.0,
            x: vec![-0.5, -0.25],
            u: vec![0.0, 0.0],
        };
        assert!(matches!(
            project_homog_to_cracked(&p, &g),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn self_comparison_has_zero_error() {
        let g = grid(0.1, 0.2, 20, 20);
        let p = line(20, |x| 1.0 + x * x);
        let proj = project_homog_to_cracked(&p, &g).unwrap();
        let mut direct = Field::uniform(g.active_count(), 0.0, 0.5);
        for (k, v) in plus_cells(&g).into_iter().zip(&proj.values) {
            direct.values[k] = *v;
        }
        for (k, &(i, _)) in g.cells().iter().enumerate() {
            let x = g.x_center(i);
            if x < 0.0 {
                direct.values[k] = p.interpolate(x).unwrap() / 0.9;
            }
        }
        let e = epsilon_error(&direct, &g, &p, true).unwrap();
        assert_eq!(e.err, 0.0);
        assert!(e.err_minus.unwrap() < 1e-15);
    }

    #[test]
    fn zero_field_has_zero_denominator() {
        let g = grid(0.1, 0.2, 20, 20);
        let direct = Field::uniform(g.active_count(), 0.0, 0.0);
        let p = line(20, |_| 0.0);
        assert!(matches!(
            epsilon_error(&direct, &g, &p, false),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn drift_profile_at_zero_alpha() {
        let d = drift_profile(0.0, 0.0).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.4, 1.0] {
            assert!((d.w(x) - (x * x / 4.0 - x / 2.0 - 1.0 / 12.0)).abs() < 1e-15);
        }
        assert!((d.w_minus(0.0) - d.w_plus(0.0)).abs() < 1e-15);
    }

    #[test]
    fn drift_profile_constants() {
        let d = drift_profile(0.1, 0.0).unwrap();
        assert!((d.constant + 0.9 / 11.4).abs() < 1e-15);
        assert!((d.w_minus(0.0) - 0.9 * d.constant).abs() < 1e-15);
        assert!((d.w_minus(0.0) + 0.0710526).abs() < 1e-7);
        for a in [0.0, 0.1, 0.3, 0.6, 0.9] {
            assert!(drift_profile(a, 0.0).unwrap().self_check() < 1e-14);
        }
        assert!(matches!(drift_profile(0.3, 0.1), Err(Error::BetaUnsupported(_))));
    }

    #[test]
    fn drift_profile_solves_the_drift_problem() {
        // second differences of w equal rate minus the source on each side
        let d = drift_profile(0.6, 0.0).unwrap();
        let h = 1e-3;
        for x in [-0.7, -0.2] {
            let w2 = (d.w(x + h) - 2.0 * d.w(x) + d.w(x - h)) / (h * h);
            assert!((w2 - (d.c_minus - 0.6)).abs() < 1e-6);
        }
        for x in [0.2, 0.7] {
            let w2 = (d.w(x + h) - 2.0 * d.w(x) + d.w(x - h)) / (h * h);
            assert!((w2 - d.c_plus).abs() < 1e-6);
        }
    }

    #[test]
    fn energy_audit_flags_wrong_rate() {
        let t = Trajectory {
            times: vec![0.0, 0.1, 0.2],
            mass: vec![0.0, 0.02, 0.04],
            ..Default::default()
        };
        assert!(energy_audit(&t, 0.2) < 1e-15);
        assert!((energy_audit(&t, 1.0) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn ny_policy() {
        assert_eq!(alignment_modulus(0.1).unwrap(), 20);
        assert_eq!(alignment_modulus(0.0).unwrap(), 2);
        assert_eq!(alignment_modulus(0.6).unwrap(), 10);
        assert_eq!(policy_ny(0.1, 0.4, 80).unwrap(), 20);
        assert_eq!(policy_ny(0.1, 0.4, 160).unwrap(), 40);
        assert_eq!(policy_ny(0.1, 1.0, 80).unwrap(), 40);
        assert_eq!(policy_ny(0.0, 0.05, 40).unwrap(), 2);
    }

    #[test]
    fn fit_recovers_line() {
        let (s, i) = fit_line(&[(0.1, 0.3), (0.2, 0.5), (0.4, 0.9)]).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && (i - 0.1).abs() < 1e-12);
        assert!(fit_line(&[(0.1, 0.3)]).is_err());
    }

    #[test]
    fn regime_excludes_floor() {
        let row = |epsilon, err| ErrorRow {
            epsilon,
            nx: 10,
            ny: 20,
            err,
            err_minus: None,
        };
        let table = ErrorTable {
            alpha: 0.1,
            beta: 0.0,
            t1: 0.5,
            dt: 1e-3,
            rows: vec![
                row(0.4, 0.4),
                row(0.2, 0.2),
                row(0.1, 0.1),
                row(0.05, 0.06),
                row(0.02, 0.05),
            ],
        };
        let fit = fit_table(&table).unwrap();
        assert_eq!(fit.regime, vec![0.4, 0.2]);
        assert!((fit.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_needs_three_points() {
        let c = SweepConfig::new(ParamSet::constant(0.1, 0.0, 1.0).unwrap(), 20, 0.05);
        assert!(matches!(
            sweep_epsilon(&c, &[0.4, 0.2]),
            Err(Error::InsufficientPoints { .. })
        ));
    }
}
