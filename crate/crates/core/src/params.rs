//! Model parameters: crack width fraction, bottom-flux fraction, period, and
//! the wall-flux mode applied on the crack walls.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the wall-profile mass check `∫_{-1}^{0} f = alpha/2`.
pub const PROFILE_MASS_TOL: f64 = 1e-12;

/// Spatial profile `f_alpha(x)` of the flux density imposed on the crack walls.
///
/// The wall flux in the cracked cell is `f_alpha(x) * epsilon`; the
/// homogenized model sees it as a volume source on `x < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WallProfile {
    /// `f(x) = -alpha * x`.
    Linear { alpha: f64 },
    /// Piecewise-linear interpolant through `(xs[i], values[i])`, constant
    /// beyond the end nodes.
    Tabulated { xs: Vec<f64>, values: Vec<f64> },
}

impl WallProfile {
    pub fn linear(alpha: f64) -> Self {
        WallProfile::Linear { alpha }
    }

    pub fn tabulated(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != values.len() {
            return Err(Error::InconsistentMode(format!(
                "tabulated profile needs matching xs/values with at least 2 nodes, got {} and {}",
                xs.len(),
                values.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InconsistentMode(
                "tabulated profile abscissae must be strictly increasing".into(),
            ));
        }
        if xs.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NaNDetected("tabulated profile"));
        }
        if xs[0] > -1.0 || *xs.last().unwrap() < 0.0 {
            return Err(Error::InconsistentMode("tabulated profile must cover [-1, 0]".into()));
        }
        Ok(WallProfile::Tabulated { xs, values })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            WallProfile::Linear { alpha } => -alpha * x,
            WallProfile::Tabulated { xs, values } => {
                let n = xs.len();
                if x <= xs[0] {
                    return values[0];
                }
                if x >= xs[n - 1] {
                    return values[n - 1];
                }
                let k = xs.partition_point(|&xi| xi <= x) - 1;
                let t = (x - xs[k]) / (xs[k + 1] - xs[k]);
                values[k] + t * (values[k + 1] - values[k])
            }
        }
    }

    /// Breakpoints of the profile strictly inside `(a, b)`, with `a` and `b`
    /// prepended/appended. On each sub-interval the profile is affine.
    fn pieces(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        if let WallProfile::Tabulated { xs, .. } = self {
            pts.extend(xs.iter().copied().filter(|&x| x > a && x < b));
        }
        pts.push(b);
        pts
    }

    /// `∫_a^b f(x) dx`, exact (trapezoid on each affine piece).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let pts = self.pieces(a, b);
        pts.windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (self.eval(w[0]) + self.eval(w[1])))
            .sum()
    }

    /// `∫_a^b f(x) x dx`, exact (Simpson on each affine piece).
    pub fn first_moment(&self, a: f64, b: f64) -> f64 {
        let pts = self.pieces(a, b);
        pts.windows(2)
            .map(|w| {
                let (l, r) = (w[0], w[1]);
                let m = 0.5 * (l + r);
                (r - l) / 6.0 * (self.eval(l) * l + 4.0 * self.eval(m) * m + self.eval(r) * r)
            })
            .sum()
    }
}

/// How the crack walls are heated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WallFlux {
    /// Uniform wall flux `(alpha - beta) * epsilon / 2`.
    Constant,
    /// Wall flux `f_alpha(x) * epsilon`; requires `beta = 0`.
    Profile { profile: WallProfile },
}

/// Validated model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    alpha: f64,
    beta: f64,
    epsilon: f64,
    wall_flux: WallFlux,
}

impl ParamSet {
    /// Validates raw inputs:
    /// `0 <= alpha < 1`, `0 <= beta < alpha` (or `beta = 0` when `alpha = 0`),
    /// `epsilon > 0`, and for profile mode `beta = 0` with
    /// `∫_{-1}^{0} f_alpha = alpha/2`.
    pub fn new(alpha: f64, beta: f64, epsilon: f64, wall_flux: WallFlux) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                expected: "0 <= alpha < 1",
            });
        }
        let beta_ok = if alpha == 0.0 {
            beta == 0.0
        } else {
            (0.0..alpha).contains(&beta)
        };
        if !beta_ok {
            return Err(Error::OutOfRange {
                name: "beta",
                value: beta,
                expected: "0 <= beta < alpha, or beta = 0 when alpha = 0",
            });
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::OutOfRange {
                name: "epsilon",
                value: epsilon,
                expected: "epsilon > 0",
            });
        }
        if let WallFlux::Profile { profile } = &wall_flux {
            if beta != 0.0 {
                return Err(Error::InconsistentMode(format!(
                    "profile wall flux requires beta = 0, got {beta}"
                )));
            }
            let integral = profile.integral(-1.0, 0.0);
            let expected = 0.5 * alpha;
            if (integral - expected).abs() > PROFILE_MASS_TOL {
                return Err(Error::ProfileMassMismatch { integral, expected });
            }
        }
        Ok(Self {
            alpha,
            beta,
            epsilon,
            wall_flux,
        })
    }

    pub fn constant(alpha: f64, beta: f64, epsilon: f64) -> Result<Self> {
        Self::new(alpha, beta, epsilon, WallFlux::Constant)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn wall_flux(&self) -> &WallFlux {
        &self.wall_flux
    }

    pub fn profile(&self) -> Option<&WallProfile> {
        match &self.wall_flux {
            WallFlux::Profile { profile } => Some(profile),
            WallFlux::Constant => None,
        }
    }

    /// Same model with a different period.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, epsilon, self.wall_flux.clone())
    }
}
