//! Error envelopes `f` for residuals `r(n) = O(f(n))`, their primitives
//! `F(x) = int_1^x f`, the tails `int_n^inf F(x)/x^2 dx`, and fitting them to
//! observed residuals.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ui};

use crate::error::{Error, Result};
use crate::normalization::least_squares;
use crate::quadrature::adaptive_simpson;

const QUAD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EnvelopeFamily {
    /// `f(x) = x^-beta`.
    Power { beta: f64 },
    /// `f(x) = ln(x)^a / x`.
    LogPower { a: f64 },
    /// `f(x) = (1 + ln x)^-(2 + epsilon)`.
    InverseLog { epsilon: f64 },
}

impl EnvelopeFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Power { .. } => "power",
            Self::LogPower { .. } => "log_power",
            Self::InverseLog { .. } => "inverse_log",
        }
    }
}

/// `c f(x)` for one family, validated so that `int_1^inf F/x^2` converges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEnvelope {
    #[serde(flatten)]
    pub family: EnvelopeFamily,
    pub c: f64,
}

/// `(e^z - 1)/z`, continuous at 0.
fn exprel(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.exp_m1() / z
    }
}

impl ErrorEnvelope {
    pub fn new(family: EnvelopeFamily, c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("envelope constant must be finite and >= 0, got {c}")));
        }
        let ok = match family {
            EnvelopeFamily::Power { beta } => beta > 0.0 && beta.is_finite(),
            EnvelopeFamily::LogPower { a } => a > -1.0 && a.is_finite(),
            EnvelopeFamily::InverseLog { epsilon } => epsilon > -1.0 && epsilon.is_finite(),
        };
        if !ok {
            return Err(Error::DivergentEnvelope(format!(
                "{family:?}: int_1^inf F(x)/x^2 dx diverges or f does not decay"
            )));
        }
        Ok(Self { family, c })
    }

    /// Whether the envelope is integrable against `dx/x`, which the small-alpha
    /// Meissel expansion needs.
    pub fn supports_j0(&self) -> bool {
        match self.family {
            EnvelopeFamily::Power { .. } => true,
            EnvelopeFamily::LogPower { .. } => true,
            EnvelopeFamily::InverseLog { epsilon } => epsilon > 0.0,
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        self.c * self.unit_f(x)
    }

    fn unit_f(&self, x: f64) -> f64 {
        match self.family {
            EnvelopeFamily::Power { beta } => x.powf(-beta),
            EnvelopeFamily::LogPower { a } => x.ln().powf(a) / x,
            EnvelopeFamily::InverseLog { epsilon } => (1.0 + x.ln()).powf(-2.0 - epsilon),
        }
    }

    /// `F(x) = int_1^x f(t) dt`.
    pub fn big_f(&self, x: f64) -> f64 {
        if self.c == 0.0 || x <= 1.0 {
            return 0.0;
        }
        let lx = x.ln();
        let unit = match self.family {
            EnvelopeFamily::Power { beta } => lx * exprel((1.0 - beta) * lx),
            EnvelopeFamily::LogPower { a } => lx.powf(a + 1.0) / (a + 1.0),
            EnvelopeFamily::InverseLog { epsilon } => {
                let g = |u: f64| u.exp() * (1.0 + u).powf(-2.0 - epsilon);
                adaptive_simpson(&g, 0.0, lx, QUAD_TOL)
            }
        };
        self.c * unit
    }

    /// `int_n^inf F(x)/x^2 dx = F(n)/n + int_n^inf f(x)/x dx`.
    pub fn tail(&self, n: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        self.big_f(n) / n + self.log_tail(n)
    }

    /// `int_n^inf f(x)/x dx`.
    pub fn log_tail(&self, n: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let ln = n.ln();
        let rest = match self.family {
            EnvelopeFamily::Power { beta } => n.powf(-beta) / beta,
            EnvelopeFamily::LogPower { a } => {
                if ln <= 0.0 {
                    gamma(a + 1.0)
                } else {
                    gamma_ui(a + 1.0, ln)
                }
            }
            EnvelopeFamily::InverseLog { epsilon } => 1.0 / ((1.0 + epsilon) * (1.0 + ln).powf(1.0 + epsilon)),
        };
        self.c * rest
    }
}

impl ErrorEnvelope {
    /// `int_n^inf f(x) x^(-alpha-1) dx` for `alpha >= 0`; for the inverse-log
    /// family with `alpha > 0` this is the bound `f(n) n^(-alpha) / alpha`.
    pub fn mellin_tail(&self, n: f64, alpha: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        if alpha == 0.0 {
            return self.log_tail(n);
        }
        let ln = n.ln().max(0.0);
        match self.family {
            EnvelopeFamily::Power { beta } => self.c * (-(beta + alpha) * ln).exp() / (beta + alpha),
            EnvelopeFamily::LogPower { a } => {
                // u = ln x turns the integral into int u^a e^(-(1+alpha) u) du
                let rate = 1.0 + alpha;
                let upper = if ln == 0.0 { gamma(a + 1.0) } else { gamma_ui(a + 1.0, rate * ln) };
                self.c * upper / rate.powf(a + 1.0)
            }
            EnvelopeFamily::InverseLog { .. } => self.f(n) * (-alpha * ln).exp() / alpha,
        }
    }
}

/// `(F(n), int_n^inf F/x^2)` for `n >= 1`.
pub fn error_envelope(env: &ErrorEnvelope, n: f64) -> Result<(f64, f64)> {
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::Domain(format!("envelope evaluated at n = {n}, need n >= 1")));
    }
    let env = ErrorEnvelope::new(env.family, env.c)?;
    Ok((env.big_f(n), env.tail(n)))
}

/// One family fitted to a residual window.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyFit {
    pub envelope: ErrorEnvelope,
    /// `c F(n_max)`, the selection score.
    pub score: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualFit {
    pub fits: Vec<FamilyFit>,
    pub best: ErrorEnvelope,
    pub window: (usize, usize),
}

/// Minimum number of degrees in a fitting window.
pub const MIN_FIT_ENTRIES: usize = 16;

/// Default window: the top three quarters of the degrees.
pub fn default_window(n_max: usize) -> (usize, usize) {
    ((n_max / 4).max(2), n_max)
}

/// Fits each family's shape parameter by log-linear regression against `|r|`
/// and takes `c` as the smallest constant with `|r(n)| <= c f(n)` on the
/// window. `r[n]` is the residual at degree `n`.
pub fn fit_residual_model(r: &[f64], window: (usize, usize)) -> Result<ResidualFit> {
    let (lo, hi) = window;
    if lo < 2 || hi >= r.len() || hi < lo || hi - lo + 1 < MIN_FIT_ENTRIES {
        return Err(Error::InsufficientData(format!(
            "residual fit needs at least {MIN_FIT_ENTRIES} degrees >= 2 in the window, got {lo}..={hi}"
        )));
    }
    let degrees: Vec<usize> = (lo..=hi).collect();
    let abs: Vec<f64> = degrees.iter().map(|&n| r[n].abs()).collect();
    if abs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("residuals must be finite".into()));
    }
    let score = |env: &ErrorEnvelope| env.big_f(hi as f64);
    if abs.iter().all(|&x| x == 0.0) {
        let fits: Vec<FamilyFit> = [
            EnvelopeFamily::Power { beta: 2.0 },
            EnvelopeFamily::LogPower { a: 0.0 },
            EnvelopeFamily::InverseLog { epsilon: 1.0 },
        ]
        .into_iter()
        .map(|family| {
            let envelope = ErrorEnvelope { family, c: 0.0 };
            FamilyFit { envelope, score: 0.0 }
        })
        .collect();
        let best = fits[0].envelope;
        return Ok(ResidualFit { fits, best, window });
    }
    let quarter = (abs.len() / 4).max(1);
    let head: f64 = abs[..quarter].iter().sum();
    let tail: f64 = abs[abs.len() - quarter..].iter().sum();
    if tail >= head {
        return Err(Error::NoDecay);
    }
    let nonzero: Vec<(f64, f64)> = degrees
        .iter()
        .zip(&abs)
        .filter(|(_, a)| **a > 0.0)
        .map(|(&n, &a)| (n as f64, a))
        .collect();
    let slope_of = |x: &dyn Fn(f64) -> f64, y: &dyn Fn(f64, f64) -> f64| {
        let pts: Vec<(f64, f64)> = nonzero.iter().map(|&(n, a)| (x(n), y(n, a))).collect();
        least_squares(&pts).0
    };
    let shapes = [
        EnvelopeFamily::Power {
            beta: -slope_of(&|n| n.ln(), &|_, a| a.ln()),
        },
        EnvelopeFamily::LogPower {
            a: slope_of(&|n| n.ln().ln(), &|n, a| (a * n).ln()),
        },
        EnvelopeFamily::InverseLog {
            epsilon: -slope_of(&|n| (1.0 + n.ln()).ln(), &|_, a| a.ln()) - 2.0,
        },
    ];
    let mut fits = Vec::new();
    for family in shapes {
        let Ok(unit) = ErrorEnvelope::new(family, 1.0) else {
            continue;
        };
        let c = degrees
            .iter()
            .zip(&abs)
            .map(|(&n, &a)| a / unit.unit_f(n as f64))
            .fold(0.0, f64::max);
        let envelope = ErrorEnvelope { family, c };
        fits.push(FamilyFit {
            score: score(&envelope),
            envelope,
        });
    }
    let mut best: Option<&FamilyFit> = None;
    for fit in &fits {
        // earlier families win near-ties
        if best.is_none_or(|b| fit.score < b.score * (1.0 - 1e-9)) {
            best = Some(fit);
        }
    }
    let best = best.ok_or(Error::NoDecay)?.envelope;
    Ok(ResidualFit { fits, best, window })
}
