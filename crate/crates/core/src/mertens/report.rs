//! The verification report: every constant, one pass/fail check per
//! asymptotic statement, windowed diagnostics and convergence series.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalog::{Instance, SemigroupSpec};
use crate::error::{Error, Result};
use crate::json::{Num, ValueBound};
use crate::normalization::{estimate_a, residuals, AMethod, AxiomAEstimate, NormalizedSemigroup};
use crate::real::{format_real, to_f64, Bounded, Precision};

use super::constants::{constants_report, lemma3_lhs_normalized, ConstantsReport};
use super::envelope::{default_window, fit_residual_model, ErrorEnvelope, ResidualFit};
use super::sums::MertensTables;

pub const SCHEMA_VERSION: u32 = 1;

/// Smallest `n_max` accepted by [`zhang_report`].
pub const MIN_REPORT_DEGREE: usize = 64;

/// Per-check tolerances, keyed by check name.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    /// Names with their defaults. `tail` caps the tail bounds of `C_M`, `C_3`.
    pub const DEFAULTS: [(&'static str, f64); 11] = [
        ("c_m_consistency", 1e-3),
        ("cesaro_deviation", 1e-6),
        ("envelope", 1e-6),
        ("i_integral", 5e-3),
        ("lambda_bounded", 0.5),
        ("lemma3", 1e-6),
        ("mertens_product", 5e-3),
        ("mertens_sum", 2e-3),
        ("nondegenerate", 1e-9),
        ("prime_power_sum", 2e-3),
        ("tail", 1e-8),
    ];

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.0.contains_key(name) {
            return Err(Error::InvalidInput(format!(
                "unknown tolerance {name:?}; known: {}",
                self.0.keys().cloned().collect::<Vec<_>>().join(", ")
            )));
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidInput(format!("tolerance {name} must be positive, got {value}")));
        }
        self.0.insert(name.to_string(), value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(Self::DEFAULTS.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub statistic: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, statistic: f64, tolerances: &Tolerances) -> Self {
        let tolerance = tolerances.get(name);
        Check {
            name: name.to_string(),
            statistic: statistic.is_finite().then_some(statistic),
            tolerance,
            pass: statistic <= tolerance,
        }
    }

    fn failed(name: &str, tolerances: &Tolerances) -> Self {
        Check {
            name: name.to_string(),
            statistic: None,
            tolerance: tolerances.get(name),
            pass: false,
        }
    }
}

/// `|Lambda(n) - n - const|` against `c F(n)` over a window.
#[derive(Clone, Debug, Serialize)]
pub struct Containment {
    /// Median of `Lambda(n) - n` over the top half of the window.
    pub constant: f64,
    /// `max (|Lambda(n) - n - const| - c F(n))`.
    pub max_excess: f64,
    /// Degree at which the excess is largest.
    pub worst_degree: usize,
}

pub fn envelope_containment(
    tables: &MertensTables,
    envelope: &ErrorEnvelope,
    window: (usize, usize),
    prec: Precision,
) -> Result<Containment> {
    let (lo, hi) = window;
    if lo < 1 || hi > tables.n_max() || hi <= lo {
        return Err(Error::InvalidInput(format!("bad containment window {lo}..={hi}")));
    }
    let deviation = |n: usize| to_f64(&(&tables.lambda_sum[n] - prec.int(n as i64)));
    let mut top: Vec<f64> = ((lo + hi).div_ceil(2)..=hi).map(deviation).collect();
    top.sort_by(f64::total_cmp);
    let constant = top[top.len() / 2];
    let mut max_excess = f64::NEG_INFINITY;
    let mut worst_degree = lo;
    for n in lo..=hi {
        let excess = (deviation(n) - constant).abs() - envelope.big_f(n as f64);
        if excess > max_excess || excess.is_nan() {
            max_excess = excess;
            worst_degree = n;
        }
    }
    Ok(Containment {
        constant,
        max_excess,
        worst_degree,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub degenerate: bool,
    pub q: Num,
    pub n_max: usize,
    pub a_method: Option<AMethod>,
    pub max_lambda: f64,
    /// `max lambda` over the top quarter divided by that over `[n/4, n/2]`, minus 1.
    pub lambda_trend: f64,
    /// `c` in `P(k) <= c q^k / k` on the top half of the data.
    pub majorant: f64,
    /// `sum |r(n)|` over the available degrees.
    pub abs_residual_sum: Option<f64>,
    /// `sum_n max_{n<=k<=n_max} |r(k)|`, a finite-window statistic only.
    pub sup_tail_residual_sum: Option<f64>,
    pub envelope: Option<ResidualFit>,
    pub containment: Option<Containment>,
    pub all_pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsJson {
    pub gamma: ValueBound,
    #[serde(rename = "A")]
    pub a: Option<ValueBound>,
    #[serde(rename = "C_M")]
    pub c_m: ValueBound,
    #[serde(rename = "C_1")]
    pub c_1: Option<ValueBound>,
    #[serde(rename = "C_2")]
    pub c_2: Option<ValueBound>,
    #[serde(rename = "C_3")]
    pub c_3: ValueBound,
    #[serde(rename = "I_integral")]
    pub i_integral: Option<ValueBound>,
}

impl ConstantsJson {
    pub fn new(c: &ConstantsReport, digits: usize) -> Self {
        let vb = |b: &Bounded| ValueBound::new(b, digits);
        Self {
            gamma: vb(&c.gamma),
            a: c.a.as_ref().map(vb),
            c_m: vb(&c.c_m),
            c_1: c.c_1.as_ref().map(vb),
            c_2: c.c_2.as_ref().map(vb),
            c_3: vb(&c.c_3),
            i_integral: c.i_integral.as_ref().map(vb),
        }
    }
}

/// Standalone constants document.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsDocument {
    pub schema_version: u32,
    pub spec: SemigroupSpec,
    pub precision_bits: usize,
    pub degenerate: bool,
    pub majorant: f64,
    pub constants: ConstantsJson,
}

impl ConstantsDocument {
    pub fn new(spec: &SemigroupSpec, report: &ConstantsReport, prec: Precision, digits: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            spec: spec.clone(),
            precision_bits: prec.bits(),
            degenerate: report.degenerate,
            majorant: report.majorant,
            constants: ConstantsJson::new(report, digits),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZhangReport {
    pub schema_version: u32,
    pub spec: SemigroupSpec,
    pub precision_bits: usize,
    pub constants: ConstantsJson,
    pub checks: Vec<Check>,
    pub diagnostics: Diagnostics,
    pub series: BTreeMap<String, String>,
}

impl ZhangReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `A` for the report: exact when the construction fixes it, otherwise the
/// tail average, falling back to the `H`-ladder.
pub fn report_a(instance: &Instance, norm: &NormalizedSemigroup) -> Result<AxiomAEstimate> {
    if let Some(a) = &instance.known_a {
        return estimate_a(norm, AMethod::ExactKnown, Some(a));
    }
    estimate_a(norm, AMethod::TailAverage, None).or_else(|_| estimate_a(norm, AMethod::HEvaluation, None))
}

/// Full verification report for `instance` at its spec's `n_max`.
pub fn zhang_report(instance: &Instance, tolerances: &Tolerances, prec: Precision, digits: usize) -> Result<ZhangReport> {
    let n = instance.n_max();
    if n < MIN_REPORT_DEGREE {
        return Err(Error::InvalidInput(format!(
            "verification needs n_max >= {MIN_REPORT_DEGREE}, got {n}"
        )));
    }
    let norm = NormalizedSemigroup::from_instance(instance, prec)?;
    let tables = MertensTables::new(&norm);
    let degenerate = instance.is_degenerate();
    let a = if degenerate { None } else { Some(report_a(instance, &norm)?) };
    let constants = constants_report(&norm, &tables, a.as_ref(), tolerances.get("tail"))?;

    let lambda: Vec<f64> = norm.lambda().iter().map(to_f64).collect();
    let window_max = |lo: usize, hi: usize| lambda[lo.max(1) - 1..hi].iter().cloned().map(f64::abs).fold(0.0, f64::max);
    let max_lambda = window_max(1, n);
    let early = window_max(n / 4, n / 2);
    let lambda_trend = if early > 0.0 { window_max(3 * n / 4, n) / early - 1.0 } else { 0.0 };

    let mut checks = Vec::new();
    let mut diagnostics = Diagnostics {
        degenerate,
        q: Num::real(norm.q(), digits),
        n_max: n,
        a_method: constants.a_method,
        max_lambda,
        lambda_trend,
        majorant: constants.majorant,
        abs_residual_sum: None,
        sup_tail_residual_sum: None,
        envelope: None,
        containment: None,
        all_pass: false,
    };
    let mut series = BTreeMap::new();

    if degenerate {
        // S(n) stays bounded: no logarithmic growth to compare against.
        let growth = to_f64(&(&tables.mertens[n] - &tables.mertens[n / 2]));
        let mut check = Check::at_most("nondegenerate", -growth, tolerances);
        check.pass = growth > tolerances.get("nondegenerate");
        checks.push(check);
    } else {
        let c = &constants;
        let (c_1, c_2) = (c.c_1.as_ref().expect("non-degenerate"), c.c_2.as_ref().expect("non-degenerate"));
        let a_val = &c.a.as_ref().expect("non-degenerate").value;
        let ln_n = prec.int(n as i64).ln();
        let c3 = &c.c_3.value;

        checks.push(Check::at_most("lambda_bounded", lambda_trend, tolerances));
        let cesaro = to_f64(&(&tables.lambda_sum[n] - prec.int(n as i64) + c3)).abs();
        checks.push(Check::at_most("cesaro_deviation", cesaro, tolerances));
        let lemma3 = lemma3_lhs_normalized(&norm, n).map(|l| to_f64(&(l - prec.int(n as i64) + c3)).abs());
        checks.push(match lemma3 {
            Ok(stat) => Check::at_most("lemma3", stat, tolerances),
            Err(_) => Check::failed("lemma3", tolerances),
        });
        let s_dev = to_f64(&(&tables.mertens[n] - &ln_n - &c_1.value)).abs();
        checks.push(Check::at_most("mertens_sum", s_dev, tolerances));
        let product = tables.mertens_product(n)?;
        checks.push(Check::at_most(
            "mertens_product",
            to_f64(&(&product.n_product - &c_2.value)).abs(),
            tolerances,
        ));
        let gamma = &c.gamma.value;
        let pp = to_f64(&(&tables.prime_power[n] - &ln_n - gamma - a_val.clone().ln())).abs();
        checks.push(Check::at_most("prime_power_sum", pp, tolerances));
        let cm_gap = to_f64(&(&tables.prime_power[n] - &tables.mertens[n] - &c.c_m.value)).abs();
        checks.push(Check::at_most("c_m_consistency", cm_gap, tolerances));
        let i = c.i_integral.as_ref().expect("non-degenerate");
        let i_gap = to_f64(&(&i.value + prec.one() - &c_1.value)).abs();
        checks.push(Check::at_most("i_integral", i_gap, tolerances));

        let r = residuals(norm.g_norm(), a_val)?;
        let r: Vec<f64> = r.iter().map(to_f64).collect();
        diagnostics.abs_residual_sum = Some(r[1..].iter().map(|x| x.abs()).sum());
        let mut running = 0.0f64;
        let mut sup_sum = 0.0;
        for x in r[1..].iter().rev() {
            running = running.max(x.abs());
            sup_sum += running;
        }
        diagnostics.sup_tail_residual_sum = Some(sup_sum);
        let window = default_window(n);
        match fit_residual_model(&r, window) {
            Ok(fit) => {
                let containment = envelope_containment(&tables, &fit.best, window, prec)?;
                checks.push(Check::at_most("envelope", containment.max_excess, tolerances));
                diagnostics.envelope = Some(fit);
                diagnostics.containment = Some(containment);
            }
            Err(_) => checks.push(Check::failed("envelope", tolerances)),
        }

        let mut csv = String::from("n,cesaro_deviation,s,n_product,prime_power_minus_log\n");
        let mut degrees: Vec<usize> = (0..).map(|k| 1usize << k).take_while(|&d| d < n).collect();
        degrees.push(n);
        for d in degrees {
            let ln_d = prec.int(d as i64).ln();
            let cd = &tables.lambda_sum[d] - prec.int(d as i64) + c3;
            let s = &tables.mertens[d] - &ln_d - &c_1.value;
            let np = tables.mertens_product(d)?.n_product;
            let ppl = &tables.prime_power[d] - &ln_d;
            csv.push_str(&format!(
                "{d},{},{},{},{}\n",
                format_real(&cd, digits),
                format_real(&s, digits),
                format_real(&np, digits),
                format_real(&ppl, digits)
            ));
        }
        series.insert("convergence".to_string(), csv);
    }
    diagnostics.all_pass = checks.iter().all(|c| c.pass);
    Ok(ZhangReport {
        schema_version: SCHEMA_VERSION,
        spec: instance.spec.clone(),
        precision_bits: prec.bits(),
        constants: ConstantsJson::new(&constants, digits),
        checks,
        diagnostics,
        series,
    })
}
