//! Meissel-type series `sum P(k)/(q^k k^alpha)` and the integral
//! `J(alpha) = int_1^inf s(x) x^(-alpha-1) dx` of the deviation
//! `s(x) = S(x) - ln x - C_1`.
//!
//! `s` is a step function minus `ln x`, so `J` is integrated exactly on each
//! unit interval. Quadrature appears only as a cross-check.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::json::Num;
use crate::mertens::envelope::{fit_residual_model, ErrorEnvelope};
use crate::mertens::sums::MertensTables;
use crate::normalization::NormalizedSemigroup;
use crate::quadrature::adaptive_simpson;
use crate::real::{format_real, to_f64, Precision, Real};

const GUARD_BITS: usize = 32;

/// `ln n` for `n = 0..=max` (entry 0 is a placeholder zero).
#[derive(Clone, Debug)]
pub struct LnTable {
    ln: Vec<Real>,
}

impl LnTable {
    pub fn new(max: usize, prec: Precision) -> Self {
        let ln = (0..=max)
            .map(|n| if n < 2 { prec.zero() } else { prec.int(n as i64).ln() })
            .collect();
        Self { ln }
    }

    pub fn get(&self, n: usize) -> &Real {
        &self.ln[n]
    }

    pub fn max(&self) -> usize {
        self.ln.len() - 1
    }

    /// `n^(-alpha)` for `n = 0..=max` (entry 0 unused).
    fn powers(&self, alpha: &Real, prec: Precision) -> Vec<Real> {
        self.ln
            .iter()
            .map(|l| if *l == Real::ZERO { prec.one() } else { (-(alpha * l)).exp() })
            .collect()
    }
}

/// `s(x) = steps[floor(x)] + log_coeff ln x` on `[1, len)`.
#[derive(Clone, Debug)]
pub struct StepIntegrand {
    /// Indexed by the interval's left end; entry 0 is unused.
    pub steps: Vec<Real>,
    pub log_coeff: Real,
}

/// `int_1^hi s(x) x^(-alpha-1) dx`, summed over unit intervals in ascending order.
pub fn piecewise_integral(
    integrand: &StepIntegrand,
    alpha: &Real,
    hi: usize,
    logs: &LnTable,
    prec: Precision,
) -> Result<Real> {
    if *alpha < Real::ZERO {
        return Err(Error::Domain("alpha must be >= 0".into()));
    }
    if hi < 1 || hi > integrand.steps.len() || hi > logs.max() {
        return Err(Error::InvalidInput(format!("integration limit {hi} outside the tabulated range")));
    }
    let work = prec.widen(GUARD_BITS);
    let alpha = work.lift(alpha);
    let lc = work.lift(&integrand.log_coeff);
    let has_log = lc != Real::ZERO;
    let mut sum = work.zero();
    if alpha == Real::ZERO {
        for n in 1..hi {
            let (l0, l1) = (work.lift(logs.get(n)), work.lift(logs.get(n + 1)));
            let mut piece = work.lift(&integrand.steps[n]) * (&l1 - &l0);
            if has_log {
                piece += &lc * (&l1 * &l1 - &l0 * &l0) / work.int(2);
            }
            sum += piece;
        }
        return Ok(prec.lift(&sum));
    }
    let pw = logs.powers(&alpha, work);
    let inv_a = work.one() / &alpha;
    let inv_a2 = &inv_a * &inv_a;
    // antiderivative of ln x * x^(-alpha-1) is -x^(-alpha) (ln x/alpha + 1/alpha^2)
    let log_anti = |n: usize| -(&pw[n] * (work.lift(logs.get(n)) * &inv_a + &inv_a2));
    for n in 1..hi {
        let mut piece = work.lift(&integrand.steps[n]) * (&pw[n] - &pw[n + 1]) * &inv_a;
        if has_log {
            piece += &lc * (log_anti(n + 1) - log_anti(n));
        }
        sum += piece;
    }
    Ok(prec.lift(&sum))
}

/// Bound on `sup_{x >= X} |s(x)|` for `X` beyond the data.
#[derive(Clone, Debug, Serialize)]
pub struct SupModel {
    /// Envelope fitted to interval suprema of `|s|`; `None` when the fit failed.
    pub envelope: Option<ErrorEnvelope>,
    /// Largest interval supremum over the top decile, used without an envelope.
    pub empirical_sup: f64,
}

impl SupModel {
    pub fn sup_beyond(&self, x: f64) -> f64 {
        match &self.envelope {
            Some(env) => env.f(x),
            None => self.empirical_sup,
        }
    }

    pub fn is_empirical(&self) -> bool {
        self.envelope.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct JValue {
    pub value: Real,
    pub tail_bound: f64,
    /// True when the tail bound uses the top-decile supremum instead of a
    /// fitted envelope.
    pub empirical: bool,
}

#[derive(Clone, Debug)]
pub struct SeriesValue {
    /// `sum_{k<=K} P(k)/(q^k k^alpha)`.
    pub raw: Real,
    /// `raw + K^(-alpha)/alpha - s(K) K^(-alpha)` when the correction applies.
    pub corrected: Real,
    /// `sup_{x>=K} |s(x)| K^(-alpha)`; infinite when no correction applies.
    pub tail_bound: f64,
    /// False for degenerate instances, whose `S` has no logarithmic growth.
    pub correction_applicable: bool,
}

/// Everything needed to evaluate `s`, `J` and the series for one instance.
#[derive(Clone, Debug)]
pub struct MeisselContext {
    precision: Precision,
    /// `S(n)` for `n = 0..=n_max`.
    mertens: Vec<Real>,
    weights: Vec<Real>,
    c_1: Real,
    logs: LnTable,
    degenerate: bool,
    sup: SupModel,
}

impl MeisselContext {
    /// `c_1` should come from the constants, not from a fit of `S(n) - ln n`.
    pub fn new(norm: &NormalizedSemigroup, tables: &MertensTables, c_1: &Real) -> Result<Self> {
        let prec = norm.precision();
        let n_max = norm.n_max();
        if n_max < 2 {
            return Err(Error::InsufficientData("Meissel sums need n_max >= 2".into()));
        }
        let work = prec.widen(GUARD_BITS);
        let logs = LnTable::new(n_max + 1, work);
        let degenerate = norm.weights().iter().all(|w| *w == Real::ZERO);
        let mut ctx = Self {
            precision: prec,
            mertens: tables.mertens.clone(),
            weights: norm.weights().to_vec(),
            c_1: prec.lift(c_1),
            logs,
            degenerate,
            sup: SupModel {
                envelope: None,
                empirical_sup: f64::INFINITY,
            },
        };
        ctx.sup = ctx.fit_sup_model();
        Ok(ctx)
    }

    pub fn n_max(&self) -> usize {
        self.mertens.len() - 1
    }

    pub fn c_1(&self) -> &Real {
        &self.c_1
    }

    pub fn sup_model(&self) -> &SupModel {
        &self.sup
    }

    /// `max |s|` on `[n, n+1)`; `s` is monotone there, so the ends suffice.
    fn interval_sup(&self, n: usize) -> f64 {
        let base = &self.mertens[n] - &self.c_1;
        let left = to_f64(&(&base - self.logs.get(n))).abs();
        let right = to_f64(&(&base - self.logs.get(n + 1))).abs();
        left.max(right)
    }

    fn fit_sup_model(&self) -> SupModel {
        let n = self.n_max();
        let sups: Vec<f64> = (0..n).map(|m| if m == 0 { 0.0 } else { self.interval_sup(m) }).collect();
        let decile = n - (n / 10).max(1);
        let empirical_sup = sups[decile.max(1)..].iter().cloned().fold(0.0, f64::max);
        let window = ((n / 2).max(2), n - 1);
        let envelope = if window.1 >= window.0 + 15 {
            fit_residual_model(&sups, window).ok().map(|f| f.best)
        } else {
            None
        };
        SupModel {
            envelope,
            empirical_sup,
        }
    }

    /// `s(x) = S(floor x) - ln x - C_1` for `1 <= x < n_max + 1`.
    pub fn s_deviation(&self, x: &Real) -> Result<Real> {
        let prec = self.precision;
        if *x < prec.one() {
            return Err(Error::Domain("s(x) needs x >= 1".into()));
        }
        let floor = x.floor();
        let n: usize = usize::try_from(floor.to_int().value())
            .map_err(|_| Error::InvalidInput("x too large".into()))?;
        if n > self.n_max() {
            return Err(Error::InvalidInput(format!("S is tabulated only up to {}", self.n_max())));
        }
        Ok(&self.mertens[n] - prec.lift(x).ln() - &self.c_1)
    }

    fn integrand(&self) -> StepIntegrand {
        let prec = self.precision;
        StepIntegrand {
            steps: self.mertens.iter().map(|s| s - &self.c_1).collect(),
            log_coeff: -prec.one(),
        }
    }

    /// `J(alpha)` truncated at `N`, with a bound on `int_N^inf`.
    pub fn j_integral(&self, alpha: &Real, n: usize) -> Result<JValue> {
        let prec = self.precision;
        if n < 2 || n > self.n_max() {
            return Err(Error::InvalidInput(format!("J needs 2 <= N <= {}", self.n_max())));
        }
        let value = piecewise_integral(&self.integrand(), alpha, n, &self.logs, prec)?;
        let a = to_f64(alpha);
        let nf = n as f64;
        let (tail_bound, empirical) = match (&self.sup.envelope, a > 0.0) {
            (Some(env), _) => (env.mellin_tail(nf, a), false),
            (None, true) => (self.sup.empirical_sup * nf.powf(-a) / a, true),
            (None, false) => {
                return Err(Error::TailUnbounded(
                    "no decay estimate for s beyond N, so J(0) has no tail bound".into(),
                ))
            }
        };
        Ok(JValue {
            value,
            tail_bound,
            empirical,
        })
    }

    /// Truncated series with the partial-summation tail correction.
    pub fn meissel_series(&self, alpha: &Real, k: usize) -> Result<SeriesValue> {
        let prec = self.precision;
        if *alpha <= Real::ZERO {
            return Err(Error::Domain("the series needs alpha > 0".into()));
        }
        if k < 1 || k > self.n_max() {
            return Err(Error::InsufficientData(format!(
                "K = {k} exceeds the {} available degrees",
                self.n_max()
            )));
        }
        let work = prec.widen(GUARD_BITS);
        let alpha_w = work.lift(alpha);
        let mut raw = work.zero();
        for j in 1..=k {
            let w = &self.weights[j - 1];
            if *w != Real::ZERO {
                raw += work.lift(w) * (-(&alpha_w * self.logs.get(j))).exp();
            }
        }
        let raw = prec.lift(&raw);
        if self.degenerate {
            return Ok(SeriesValue {
                corrected: raw.clone(),
                raw,
                tail_bound: f64::INFINITY,
                correction_applicable: false,
            });
        }
        let k_pow = (-(&alpha_w * self.logs.get(k))).exp();
        let s_k = work.lift(&self.mertens[k]) - self.logs.get(k) - work.lift(&self.c_1);
        let correction = &k_pow / &alpha_w - &s_k * &k_pow;
        let corrected = prec.lift(&(work.lift(&raw) + correction));
        let tail_bound = self.sup.sup_beyond(k as f64) * to_f64(&k_pow);
        Ok(SeriesValue {
            raw,
            corrected,
            tail_bound,
            correction_applicable: true,
        })
    }

    /// `sum_{k<=n} P(k)/(q^k k^alpha) - S(n) n^(-alpha) - alpha int_1^n S(x) x^(-alpha-1) dx`.
    pub fn abel_identity_residual(&self, alpha: &Real, n: usize) -> Result<Real> {
        let prec = self.precision;
        if *alpha <= Real::ZERO {
            return Err(Error::Domain("the Abel identity needs alpha > 0".into()));
        }
        let series = self.meissel_series(alpha, n)?.raw;
        let s_only = StepIntegrand {
            steps: self.mertens.clone(),
            log_coeff: prec.zero(),
        };
        let integral = piecewise_integral(&s_only, alpha, n, &self.logs, prec)?;
        let n_pow = (-(prec.lift(alpha) * self.logs.get(n))).exp();
        Ok(series - &self.mertens[n] * n_pow - prec.lift(alpha) * integral)
    }

    /// Full evaluation at one `alpha`.
    pub fn evaluate(&self, alpha: &Real, k: usize, n: usize) -> Result<MeisselEvaluation> {
        let prec = self.precision;
        if *alpha <= Real::ZERO {
            return Err(Error::Domain("the 1/alpha form needs alpha > 0; use j_integral at 0".into()));
        }
        if k < 2 || n < 2 {
            return Err(Error::InvalidInput("K and N must be >= 2".into()));
        }
        let series = self.meissel_series(alpha, k)?;
        let j = self.j_integral(alpha, n)?;
        let alpha_p = prec.lift(alpha);
        let rhs = prec.one() / &alpha_p + &self.c_1 + &alpha_p * &j.value;
        let identity_residual = &series.corrected - rhs;
        let abel_residual = self.abel_identity_residual(alpha, n)?;
        Ok(MeisselEvaluation {
            alpha: alpha_p,
            series_value: series.corrected,
            series_tail_bound: series.tail_bound,
            j_value: j.value,
            j_tail_bound: j.tail_bound,
            identity_residual,
            abel_residual,
            k,
            n,
            correction_applicable: series.correction_applicable,
            empirical_tail: j.empirical || self.sup.is_empirical(),
        })
    }

    /// Scan over a decreasing grid in `(0, 1]`, against `J(0)`.
    pub fn alpha_scan(&self, grid: &[Real], k: usize, n: usize) -> Result<AlphaScan> {
        if grid.is_empty() {
            return Err(Error::InvalidInput("empty alpha grid".into()));
        }
        let prec = self.precision;
        for (i, a) in grid.iter().enumerate() {
            if *a <= Real::ZERO || *a > prec.one() {
                return Err(Error::InvalidInput(format!("alpha {} outside (0, 1]", to_f64(a))));
            }
            if i > 0 && *a >= grid[i - 1] {
                return Err(Error::InvalidInput("alpha grid must be strictly decreasing".into()));
            }
        }
        let j0 = self.j_integral(&prec.zero(), n)?;
        let mut rows = Vec::with_capacity(grid.len());
        let mut max_deviation = 0.0f64;
        for alpha in grid {
            let eval = self.evaluate(alpha, k, n)?;
            let d = &eval.series_value - prec.one() / alpha - &self.c_1;
            let d_over_alpha = d / alpha;
            max_deviation = max_deviation.max(to_f64(&(&d_over_alpha - &j0.value)).abs());
            rows.push(ScanRow { eval, d_over_alpha });
        }
        Ok(AlphaScan {
            rows,
            j0,
            max_deviation,
        })
    }

    /// Blind quadrature of `s(x) x^(-alpha-1)` in `f64`, one adaptive Simpson
    /// run per unit interval, for cross-checking [`Self::j_integral`].
    pub fn j_integral_quadrature(&self, alpha: f64, n: usize) -> f64 {
        let c1 = to_f64(&self.c_1);
        (1..n)
            .map(|m| {
                let s_m = to_f64(&self.mertens[m]) - c1;
                let f = |x: f64| (s_m - x.ln()) * x.powf(-alpha - 1.0);
                adaptive_simpson(&f, m as f64, (m + 1) as f64, 1e-13)
            })
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct MeisselEvaluation {
    pub alpha: Real,
    pub series_value: Real,
    pub series_tail_bound: f64,
    pub j_value: Real,
    pub j_tail_bound: f64,
    /// `corrected series - (1/alpha + C_1 + alpha J(alpha))`.
    pub identity_residual: Real,
    /// Residual of the exact finite-`n` summation-by-parts identity at `n = N`.
    pub abel_residual: Real,
    pub k: usize,
    pub n: usize,
    pub correction_applicable: bool,
    pub empirical_tail: bool,
}

impl MeisselEvaluation {
    /// `alpha J_tail + series_tail`, the bound the identity residual should respect.
    pub fn combined_bound(&self) -> f64 {
        to_f64(&self.alpha) * self.j_tail_bound + self.series_tail_bound
    }

    pub fn to_json(&self, digits: usize) -> EvaluationJson {
        EvaluationJson {
            alpha: Num::real(&self.alpha, digits),
            series_value: Num::real(&self.series_value, digits),
            series_tail_bound: self.series_tail_bound.is_finite().then_some(self.series_tail_bound),
            j_value: Num::real(&self.j_value, digits),
            j_tail_bound: self.j_tail_bound,
            identity_residual: Num::real(&self.identity_residual, digits),
            abel_residual: Num::real(&self.abel_residual, digits),
            k: self.k,
            n: self.n,
            correction_applicable: self.correction_applicable,
            empirical_tail: self.empirical_tail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvaluationJson {
    pub alpha: Num,
    pub series_value: Num,
    pub series_tail_bound: Option<f64>,
    #[serde(rename = "J_value")]
    pub j_value: Num,
    #[serde(rename = "J_tail_bound")]
    pub j_tail_bound: f64,
    pub identity_residual: Num,
    pub abel_residual: Num,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub correction_applicable: bool,
    pub empirical_tail: bool,
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub eval: MeisselEvaluation,
    /// `(corrected series - 1/alpha - C_1) / alpha`.
    pub d_over_alpha: Real,
}

#[derive(Clone, Debug)]
pub struct AlphaScan {
    pub rows: Vec<ScanRow>,
    pub j0: JValue,
    /// `max |D(alpha)/alpha - J(0)|` over the grid.
    pub max_deviation: f64,
}

impl AlphaScan {
    pub fn write_csv<W: Write>(&self, writer: W, digits: usize) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["alpha", "series", "tail_bound", "J", "identity_residual", "D_over_alpha"])?;
        for row in &self.rows {
            let e = &row.eval;
            csv.write_record([
                format_real(&e.alpha, digits),
                format_real(&e.series_value, digits),
                format_bound(e.series_tail_bound),
                format_real(&e.j_value, digits),
                format_real(&e.identity_residual, digits),
                format_real(&row.d_over_alpha, digits),
            ])?;
        }
        csv.flush()?;
        Ok(())
    }
}

fn format_bound(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        "inf".to_string()
    }
}
