//! Standalone SVG line plots built from the CSV artifacts of a run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::{read_json, read_rows, ErrorRowCsv, FitJson, MassRow, ProbeRow, ProfileRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 180.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw markers instead of a polyline.
    pub markers: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let pts = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = pts.fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.0), b.max(p.0), c.min(p.1), d.max(p.1)),
    );
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 <= 0.0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    (x0, x1, y0 - pad, y1 + pad)
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-3 && v.abs() < 1e4) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LinePlot {
    pub fn to_svg(&self) -> String {
        let (x0, x1, y0, y1) = bounds(&self.series);
        let pw = WIDTH - MARGIN_L - MARGIN_R;
        let ph = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_T + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            MARGIN_L + pw / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for k in 0..=5 {
            let fx = x0 + (x1 - x0) * k as f64 / 5.0;
            let fy = y0 + (y1 - y0) * k as f64 / 5.0;
            let (px, py) = (sx(fx), sy(fy));
            let _ = writeln!(
                s,
                r##"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="#ccc"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"##,
                MARGIN_T,
                MARGIN_T + ph,
                MARGIN_T + ph + 16.0,
                fmt_tick(fx)
            );
            let _ = writeln!(
                s,
                r##"<line x1="{MARGIN_L}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#ccc"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
                MARGIN_L + pw,
                MARGIN_L - 6.0,
                py + 4.0,
                fmt_tick(fy)
            );
        }
        let _ = writeln!(
            s,
            r#"<text class="x-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            MARGIN_L + pw / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text class="y-label" x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
            MARGIN_T + ph / 2.0,
            MARGIN_T + ph / 2.0,
            escape(&self.y_label)
        );
        for (k, series) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let pts: Vec<String> = series
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            if series.markers {
                for p in &pts {
                    let (cx, cy) = p.split_once(',').expect("pair");
                    let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3.5" fill="{color}"/>"#);
                }
            } else {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    pts.join(" ")
                );
            }
            let ly = MARGIN_T + 14.0 + 18.0 * k as f64;
            let lx = MARGIN_L + pw + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn grouped<K: Ord, R>(
    rows: Vec<R>,
    key: impl Fn(&R) -> K,
    point: impl Fn(&R) -> (f64, f64),
) -> BTreeMap<K, Vec<(f64, f64)>> {
    let mut map: BTreeMap<K, Vec<(f64, f64)>> = BTreeMap::new();
    for r in &rows {
        map.entry(key(r)).or_default().push(point(r));
    }
    map
}

fn time_key(t: f64) -> i64 {
    (t * 1e9).round() as i64
}

pub fn profile_plot(path: &Path) -> Result<LinePlot> {
    let rows: Vec<ProfileRow> = read_rows(path)?;
    let groups = grouped(rows, |r| (r.series.clone(), time_key(r.t)), |r| (r.x, r.u));
    Ok(LinePlot {
        title: "Spatial profiles".into(),
        x_label: "x".into(),
        y_label: "u".into(),
        series: groups
            .into_iter()
            .map(|((name, t), points)| Series {
                label: format!("{name} t={}", fmt_tick(t as f64 * 1e-9)),
                points,
                markers: false,
            })
            .collect(),
    })
}

pub fn probe_plot(path: &Path) -> Result<LinePlot> {
    let rows: Vec<ProbeRow> = read_rows(path)?;
    let groups = grouped(rows, |r| (r.series.clone(), time_key(r.x)), |r| (r.t, r.u));
    Ok(LinePlot {
        title: "Probe time series".into(),
        x_label: "t".into(),
        y_label: "u".into(),
        series: groups
            .into_iter()
            .map(|((name, x), points)| Series {
                label: format!("{name} x={}", fmt_tick(x as f64 * 1e-9)),
                points,
                markers: false,
            })
            .collect(),
    })
}

pub fn mass_plot(path: &Path) -> Result<LinePlot> {
    let rows: Vec<MassRow> = read_rows(path)?;
    let groups = grouped(rows, |r| r.series.clone(), |r| (r.t, r.mass));
    Ok(LinePlot {
        title: "Total heat".into(),
        x_label: "t".into(),
        y_label: "M".into(),
        series: groups
            .into_iter()
            .map(|(label, points)| Series {
                label,
                points,
                markers: false,
            })
            .collect(),
    })
}

/// Error versus epsilon on linear axes with the fitted line.
pub fn error_plot(table: &Path, fit: &Path) -> Result<LinePlot> {
    let rows: Vec<ErrorRowCsv> = read_rows(table)?;
    let fit: FitJson = read_json(fit)?;
    let mut pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.epsilon, r.err)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let e_max = pts.last().map_or(1.0, |p| p.0);
    let line = vec![(0.0, fit.intercept), (e_max, fit.intercept + fit.slope * e_max)];
    Ok(LinePlot {
        title: "Homogenization error".into(),
        x_label: "epsilon".into(),
        y_label: "err".into(),
        series: vec![
            Series {
                label: "err".into(),
                points: pts,
                markers: true,
            },
            Series {
                label: format!("fit slope={}", fmt_tick(fit.slope)),
                points: line,
                markers: false,
            },
        ],
    })
}

/// Writes one SVG per plottable artifact found in `run_dir`.
pub fn emit_plots(run_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut emit = |name: &str, plot: LinePlot| -> Result<()> {
        let path = run_dir.join(name);
        fs::write(&path, plot.to_svg())?;
        out.push(path);
        Ok(())
    };
    let csv = |name: &str| run_dir.join(name);
    if csv("profile.csv").exists() {
        emit("profile.svg", profile_plot(&csv("profile.csv"))?)?;
    }
    if csv("probe.csv").exists() {
        emit("probe.svg", probe_plot(&csv("probe.csv"))?)?;
    }
    if csv("mass.csv").exists() {
        emit("mass.svg", mass_plot(&csv("mass.csv"))?)?;
    }
    if csv("err_table.csv").exists() {
        emit("err_vs_eps.svg", error_plot(&csv("err_table.csv"), &csv("fit.json"))?)?;
    }
    if out.is_empty() {
        return Err(Error::MissingArtifact(run_dir.to_path_buf()));
    }
    Ok(out)
}
