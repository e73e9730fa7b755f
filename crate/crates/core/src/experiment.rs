//! Experiment configuration, presets and orchestration behind the CLI.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{
    energy_audit, period_average, policy_ny, relative_distance, sweep_epsilon, transmission_residuals, SweepConfig,
};
use crate::direct::{run_direct, DirectRun, DirectRunConfig};
use crate::error::{Error, Result};
use crate::fixed_point::{
    run_fixed_point, FixedPointConfig, FixedPointOptions, FixedPointRun, DEFAULT_MAX_ITER, DEFAULT_TOL, FLUX_FLOOR,
};
use crate::io::{
    error_rows, interface_rows, mass_rows, probe_rows, profile_rows, residual_rows, snapshot_rows, write_json,
    write_rows, FitJson, MassRow, ProbeRow, ProfileRow, ResidualRow, SnapshotRow,
};
use crate::params::{ParamSet, WallFlux, WallProfile};
use crate::plot::emit_plots;
use crate::weak::{run as run_weak_model, WeakModel, WeakRun, WeakRunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Direct,
    FixedPoint,
    Weak,
    Approx,
    ProfileVariant,
    Compare,
    Sweep,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| Error::config("mode", format!("unknown mode `{s}`")))
    }
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Direct => "direct",
            Mode::FixedPoint => "fixed_point",
            Mode::Weak => "weak",
            Mode::Approx => "approx",
            Mode::ProfileVariant => "profile_variant",
            Mode::Compare => "compare",
            Mode::Sweep => "sweep",
        }
    }
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// Period list for `sweep`; for `direct`, runs every listed period.
    pub epsilons: Vec<f64>,
    /// Wall-flux profile; enables profile mode for `direct`.
    pub profile: Option<WallProfile>,
    /// x-cells of the direct grid on `(-1, 1)`.
    pub nx: usize,
    /// y-cells of the direct grid; `None` picks the smallest aligned count
    /// with `hy <= hx`.
    pub ny: Option<usize>,
    /// Cells (fixed point) or elements (weak) per unit length; `None` means
    /// `nx / 2`.
    pub n1d: Option<usize>,
    pub dt: f64,
    pub t_end: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Dirac window of the weak model; `None` means two elements.
    pub delta: Option<f64>,
    pub accelerate: bool,
    /// Empty means `[t_end]`.
    pub snapshot_times: Vec<f64>,
    pub probe_x: Vec<f64>,
    /// Also report the error on the material part of `x < 0`.
    pub with_minus: bool,
    pub plots: bool,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::FixedPoint,
            alpha: 0.1,
            beta: 0.0,
            epsilon: 0.2,
            epsilons: Vec::new(),
            profile: None,
            nx: 160,
            ny: None,
            n1d: None,
            dt: 1e-3,
            t_end: 0.5,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            delta: None,
            accelerate: false,
            snapshot_times: Vec::new(),
            probe_x: vec![0.5],
            with_minus: false,
            plots: true,
            out: PathBuf::from("out"),
        }
    }
}

/// Parses a JSON config; errors name the offending key when possible.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let key = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.contains("field"))
            .unwrap_or("config")
            .to_string();
        Error::config(key, msg)
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Names of the built-in presets.
pub const PRESETS: [&str; 4] = ["fig3", "fig4", "fig5", "fig6"];

/// Built-in experiment recipes.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let base = ExperimentConfig {
        alpha: 0.1,
        beta: 0.0,
        t_end: 0.5,
        dt: 1e-3,
        ..Default::default()
    };
    let c = match name {
        // direct fields for shrinking periods
        "fig3" => ExperimentConfig {
            mode: Mode::Direct,
            epsilons: vec![1.0, 0.5, 0.2, 0.02],
            nx: 160,
            out: "out/fig3".into(),
            ..base
        },
        "fig4" => ExperimentConfig {
            mode: Mode::Compare,
            epsilon: 0.02,
            nx: 200,
            out: "out/fig4".into(),
            ..base
        },
        "fig5" => ExperimentConfig {
            mode: Mode::Compare,
            alpha: 0.6,
            epsilon: 0.02,
            nx: 200,
            out: "out/fig5".into(),
            ..base
        },
        "fig6" => ExperimentConfig {
            mode: Mode::Sweep,
            epsilons: vec![0.4, 0.2, 0.1, 0.05],
            nx: 320,
            out: "out/fig6".into(),
            ..base
        },
        _ => {
            return Err(Error::config(
                "preset",
                format!("unknown preset `{name}` (known: {})", PRESETS.join(", ")),
            ))
        }
    };
    Ok(c)
}

impl ExperimentConfig {
    fn params(&self, epsilon: f64) -> Result<ParamSet> {
        match &self.profile {
            Some(p) => ParamSet::new(self.alpha, self.beta, epsilon, WallFlux::Profile { profile: p.clone() }),
            None => ParamSet::constant(self.alpha, self.beta, epsilon),
        }
    }

    /// Fills derived defaults and checks mode requirements.
    pub fn resolve(mut self) -> Result<Self> {
        if self.nx == 0 || self.nx % 2 != 0 {
            return Err(Error::config(
                "nx",
                format!("nx = {} must be positive and even", self.nx),
            ));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config("dt", "dt must be positive"));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::config("t_end", "t_end must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::config("tol", "tol must be positive"));
        }
        if self.n1d.is_none() {
            self.n1d = Some(self.nx / 2);
        }
        if self.n1d == Some(0) {
            return Err(Error::config("n1d", "n1d must be positive"));
        }
        if self.snapshot_times.is_empty() {
            self.snapshot_times = vec![self.t_end];
        }
        if self.mode == Mode::ProfileVariant && self.profile.is_none() {
            self.profile = Some(WallProfile::linear(self.alpha));
        }
        if self.mode == Mode::Sweep && self.epsilons.len() < 3 {
            return Err(Error::config("epsilons", "sweep needs at least three periods"));
        }
        if self.mode == Mode::Sweep && self.profile.is_some() {
            return Err(Error::config("profile", "sweep supports the constant wall flux only"));
        }
        if self.ny.is_none() && matches!(self.mode, Mode::Direct | Mode::Compare) && self.direct_epsilons().len() == 1 {
            self.ny = Some(policy_ny(self.alpha, self.epsilon, self.nx)?);
        }
        self.params(self.epsilon)?;
        Ok(self)
    }

    fn direct_epsilons(&self) -> Vec<f64> {
        if self.mode == Mode::Direct && !self.epsilons.is_empty() {
            self.epsilons.clone()
        } else {
            vec![self.epsilon]
        }
    }

    fn fp_options(&self) -> FixedPointOptions {
        FixedPointOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            accelerate: self.accelerate,
            flux_floor: FLUX_FLOOR,
        }
    }

    fn n1d(&self) -> usize {
        self.n1d.unwrap_or(self.nx / 2)
    }
}

fn direct(config: &ExperimentConfig, epsilon: f64) -> Result<DirectRun> {
    let params = config.params(epsilon)?;
    let ny = match (config.ny, config.direct_epsilons().len()) {
        (Some(ny), 1) => ny,
        _ => policy_ny(config.alpha, epsilon, config.nx)?,
    };
    let mut c = DirectRunConfig::new(params, config.nx, ny, config.t_end);
    c.dt = config.dt;
    c.snapshot_times = config.snapshot_times.clone();
    c.probe_x = config.probe_x.clone();
    run_direct(&c)
}

fn fixed_point(config: &ExperimentConfig) -> Result<FixedPointRun> {
    let mut c = FixedPointConfig::new(
        ParamSet::constant(config.alpha, config.beta, 1.0)?,
        config.n1d(),
        config.t_end,
    );
    c.dt = config.dt;
    c.options = config.fp_options();
    c.snapshot_times = config.snapshot_times.clone();
    c.probe_x = config.probe_x.clone();
    run_fixed_point(&c)
}

fn weak(config: &ExperimentConfig, model: WeakModel) -> Result<WeakRun> {
    let params = match model {
        WeakModel::ProfileVariant => config.params(1.0)?,
        _ => ParamSet::constant(config.alpha, config.beta, 1.0)?,
    };
    let mut c = WeakRunConfig::new(params, 2 * config.n1d(), config.t_end, model);
    c.dt = config.dt;
    c.delta = config.delta;
    c.snapshot_times = config.snapshot_times.clone();
    c.probe_x = config.probe_x.clone();
    run_weak_model(&c)
}

/// Accumulates the long-layout CSVs of one experiment.
#[derive(Default)]
struct Artifacts {
    profiles: Vec<ProfileRow>,
    mass: Vec<MassRow>,
    probes: Vec<ProbeRow>,
    snapshots: Vec<SnapshotRow>,
    residuals: Vec<ResidualRow>,
}

impl Artifacts {
    fn write(&self, out: &Path) -> Result<()> {
        if !self.profiles.is_empty() {
            write_rows(&out.join("profile.csv"), &self.profiles)?;
        }
        if !self.mass.is_empty() {
            write_rows(&out.join("mass.csv"), &self.mass)?;
        }
        if !self.probes.is_empty() {
            write_rows(&out.join("probe.csv"), &self.probes)?;
        }
        if !self.snapshots.is_empty() {
            write_rows(&out.join("snapshots.csv"), &self.snapshots)?;
        }
        if !self.residuals.is_empty() {
            write_rows(&out.join("residuals.csv"), &self.residuals)?;
        }
        Ok(())
    }
}

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |m, v| m.max(v.abs()))
}

fn add_direct(a: &mut Artifacts, series: &str, run: &DirectRun) -> Value {
    a.profiles.extend(profile_rows(series, &run.trajectory.profiles));
    a.mass.extend(mass_rows(series, &run.trajectory));
    a.probes.extend(probe_rows(series, &run.trajectory));
    a.snapshots.extend(snapshot_rows(series, &run.grid, &run.snapshots));
    json!({
        "series": series,
        "epsilon": run.config.params.epsilon(),
        "nx": run.grid.nx(),
        "ny": run.grid.ny(),
        "grid": run.grid.summary(),
        "energy_deviation": energy_audit(&run.trajectory, run.config.params.epsilon()),
        "max_solver_iterations": run.max_solver_iterations,
        "max_solver_residual": run.max_solver_residual,
        "min_u": run.final_field.min(),
    })
}

fn add_homog(
    a: &mut Artifacts,
    out: &Path,
    series: &str,
    traj: &crate::trajectory::Trajectory,
    interface_file: &str,
) -> Result<Value> {
    a.profiles.extend(profile_rows(series, &traj.profiles));
    a.mass.extend(mass_rows(series, traj));
    a.probes.extend(probe_rows(series, traj));
    let res = transmission_residuals(traj);
    a.residuals.extend(residual_rows(series, &res));
    write_rows(&out.join(interface_file), &interface_rows(traj))?;
    Ok(json!({
        "series": series,
        "energy_deviation": energy_audit(traj, 1.0),
        "max_jump_u": max_abs(res.iter().map(|r| r.jump_u)),
        "max_jump_flux": max_abs(res.iter().map(|r| r.jump_flux)),
        "max_iterations": traj.interface.iter().map(|r| r.iterations).max().unwrap_or(0),
    }))
}

fn weak_summary(run: &WeakRun, mut v: Value) -> Value {
    v["dirac_delta"] = json!(run.delta);
    v["model"] = json!(run.config.model);
    v["elements"] = json!(run.grid.n());
    v
}

/// Runs `config`, writes every artifact into `config.out`, and returns the
/// run summary (also written as `run_summary.json`).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Value> {
    let config = config.clone().resolve()?;
    let out = config.out.clone();
    std::fs::create_dir_all(&out)?;
    let mut a = Artifacts::default();
    let mut runs = Vec::new();
    let mut extra = json!({});

    match config.mode {
        Mode::Direct => {
            let eps = config.direct_epsilons();
            for &e in &eps {
                let run = direct(&config, e)?;
                let series = if eps.len() == 1 {
                    "direct".to_string()
                } else {
                    format!("direct eps={e}")
                };
                runs.push(add_direct(&mut a, &series, &run));
            }
        }
        Mode::FixedPoint => {
            let run = fixed_point(&config)?;
            runs.push(add_homog(
                &mut a,
                &out,
                "fixed_point",
                &run.trajectory,
                "interface.csv",
            )?);
        }
        Mode::Weak | Mode::Approx | Mode::ProfileVariant => {
            let model = match config.mode {
                Mode::Weak => WeakModel::FullWeak,
                Mode::Approx => WeakModel::ApproxSmallAlpha,
                _ => WeakModel::ProfileVariant,
            };
            let run = weak(&config, model)?;
            let v = add_homog(&mut a, &out, config.mode.name(), &run.trajectory, "interface.csv")?;
            runs.push(weak_summary(&run, v));
        }
        Mode::Compare => {
            let d = direct(&config, config.epsilon)?;
            let fp = fixed_point(&config)?;
            let w = weak(&config, WeakModel::FullWeak)?;
            runs.push(add_direct(&mut a, "direct", &d));
            runs.push(add_homog(
                &mut a,
                &out,
                "fixed_point",
                &fp.trajectory,
                "interface_fixed_point.csv",
            )?);
            let v = add_homog(&mut a, &out, "weak", &w.trajectory, "interface_weak.csv")?;
            runs.push(weak_summary(&w, v));
            let averaged: Vec<_> = d
                .trajectory
                .profiles
                .iter()
                .map(|p| period_average(p, config.alpha))
                .collect();
            a.profiles.extend(profile_rows("direct_period_avg", &averaged));
            let (pd, pf, pw) = (
                averaged.last().expect("snapshot"),
                fp.trajectory.final_profile().expect("snapshot"),
                w.trajectory.final_profile().expect("snapshot"),
            );
            extra = json!({
                "distance_cutoff": 0.1,
                "fixed_point_vs_direct": relative_distance(pf, pd, 0.1)?,
                "weak_vs_direct": relative_distance(pw, pd, 0.1)?,
                "weak_vs_fixed_point": relative_distance(pw, pf, 0.1)?,
            });
        }
        Mode::Sweep => {
            let mut sc = SweepConfig::new(config.params(1.0)?, config.nx, config.t_end);
            sc.dt = config.dt;
            sc.with_minus = config.with_minus;
            sc.fixed_point = config.fp_options();
            let (table, fit) = sweep_epsilon(&sc, &config.epsilons)?;
            write_rows(&out.join("err_table.csv"), &error_rows(&table))?;
            write_json(&out.join("fit.json"), &FitJson::from(&fit))?;
            extra = json!({ "table": table, "fit": fit });
        }
    }
    a.write(&out)?;

    let summary = json!({
        "config": config,
        "runs": runs,
        "comparison": extra,
    });
    write_json(&out.join("run_summary.json"), &summary)?;
    if config.plots {
        emit_plots(&out)?;
    }
    Ok(summary)
}
