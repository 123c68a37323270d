//! Normalized quantities derived from exact counts: the growth base `q`,
//! `lambda_n = n P(n)/q^n`, `g(n) = G(n)/q^n`, the axiom-A constant `A` with
//! residuals `r(n) = g(n) - A`, and `H(y) = (1 - q y) Z(y)`.

use std::io::Write;

use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;
use serde::{Deserialize, Serialize};

use crate::catalog::{Instance, InstanceCounts};
use crate::error::{Error, Result};
use crate::real::{format_real, to_f64, Precision, Real};
use crate::semigroup::{zeta_truncated, ElementCounts, GeneratorCounts};

/// Integral value of `x`, if it is a non-negative integer that fits `u64`.
pub fn as_integer(x: &Real) -> Option<u64> {
    let floor = x.floor();
    if &floor != x {
        return None;
    }
    let int: IBig = floor.to_int().value();
    u64::try_from(int).ok()
}

/// Exact data retained when `q` is integral and the counts are strict.
#[derive(Clone, Debug)]
pub struct ExactData {
    pub q: u64,
    pub p: GeneratorCounts,
    pub g: ElementCounts,
    /// `q^k` for `k = 0..=n_max`.
    pub q_powers: Vec<UBig>,
}

/// Normalized view of a semigroup at a fixed working precision.
#[derive(Clone, Debug)]
pub struct NormalizedSemigroup {
    precision: Precision,
    q: Real,
    exact: Option<ExactData>,
    weights: Vec<Real>,
    lambda: Vec<Real>,
    g_norm: Vec<Real>,
    inv_q_powers: Vec<Real>,
}

impl NormalizedSemigroup {
    /// Exact-rational path: every entry is an exact rational rounded once.
    pub fn from_exact(p: &GeneratorCounts, g: &ElementCounts, q: u64, prec: Precision) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidInput(format!("q must be >= 2, got {q}")));
        }
        let n_max = p.n_max().min(g.n_max());
        let base = UBig::from(q);
        let mut q_powers = Vec::with_capacity(n_max + 1);
        let mut power = UBig::ONE;
        for _ in 0..=n_max {
            q_powers.push(power.clone());
            power *= &base;
        }
        let weights = (1..=n_max)
            .map(|k| prec.ratio(&IBig::from(p.get(k).clone()), &q_powers[k]))
            .collect();
        let lambda = (1..=n_max)
            .map(|k| prec.ratio(&IBig::from(UBig::from(k) * p.get(k)), &q_powers[k]))
            .collect();
        let g_norm = (0..=n_max)
            .map(|n| prec.ratio(&IBig::from(g.get(n).clone()), &q_powers[n]))
            .collect();
        let inv_q_powers = q_powers.iter().map(|qk| prec.ratio(&IBig::ONE, qk)).collect();
        Ok(Self {
            precision: prec,
            q: prec.int(q as i64),
            exact: Some(ExactData {
                q,
                p: p.truncate(n_max)?,
                g: ElementCounts::new(g.values()[..=n_max].to_vec())?,
                q_powers,
            }),
            weights,
            lambda,
            g_norm,
            inv_q_powers,
        })
    }

    /// Strict counts with a real (estimated) base; `q^k` by repeated squaring
    /// of the rounded base.
    pub fn with_real_q(p: &GeneratorCounts, g: &ElementCounts, q: &Real, prec: Precision) -> Result<Self> {
        if let Some(qi) = as_integer(q) {
            if qi >= 2 {
                return Self::from_exact(p, g, qi, prec);
            }
        }
        check_base(q)?;
        let n_max = p.n_max().min(g.n_max());
        let q = prec.lift(q);
        let q_pow: Vec<Real> = (0..=n_max).map(|k| prec.powi(&q, k)).collect();
        let weights = (1..=n_max).map(|k| prec.uint(p.get(k)) / &q_pow[k]).collect();
        let lambda = (1..=n_max)
            .map(|k| prec.uint(&(UBig::from(k) * p.get(k))) / &q_pow[k])
            .collect();
        let g_norm = (0..=n_max).map(|n| prec.uint(g.get(n)) / &q_pow[n]).collect();
        let inv_q_powers = q_pow.iter().map(|x| prec.one() / x).collect();
        Ok(Self {
            precision: prec,
            q,
            exact: None,
            weights,
            lambda,
            g_norm,
            inv_q_powers,
        })
    }

    /// Analysis-mode data given directly by `lambda` and `g`.
    pub fn from_normalized(q: &Real, lambda: Vec<Real>, g_norm: Vec<Real>, prec: Precision) -> Result<Self> {
        check_base(q)?;
        if g_norm.len() != lambda.len() + 1 {
            return Err(Error::InvalidInput("g_norm must have one more entry than lambda".into()));
        }
        let q = prec.lift(q);
        let inv_q = prec.one() / &q;
        let mut inv_q_powers = Vec::with_capacity(g_norm.len());
        let mut power = prec.one();
        for _ in 0..g_norm.len() {
            inv_q_powers.push(power.clone());
            power *= &inv_q;
        }
        let weights = lambda
            .iter()
            .enumerate()
            .map(|(i, l)| l / prec.int(i as i64 + 1))
            .collect();
        Ok(Self {
            precision: prec,
            q,
            exact: None,
            weights,
            lambda,
            g_norm,
            inv_q_powers,
        })
    }

    /// Uses the instance's known base, or estimates it from `G`.
    pub fn from_instance(instance: &Instance, prec: Precision) -> Result<Self> {
        match &instance.counts {
            InstanceCounts::Exact { p, g } => match instance.known_q {
                Some(q) => Self::from_exact(p, g, q, prec),
                None => {
                    let est = estimate_q(g, prec)?;
                    Self::with_real_q(p, g, &est.q, prec)
                }
            },
            InstanceCounts::Analysis(a) => {
                Self::from_normalized(&a.q, a.lambda.clone(), a.g_norm.clone(), prec)
            }
        }
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn q(&self) -> &Real {
        &self.q
    }

    pub fn n_max(&self) -> usize {
        self.lambda.len()
    }

    pub fn exact(&self) -> Option<&ExactData> {
        self.exact.as_ref()
    }

    /// `P(k)/q^k` for `k = 1..=n_max` (index `k - 1`).
    pub fn weights(&self) -> &[Real] {
        &self.weights
    }

    /// `lambda_k` for `k = 1..=n_max` (index `k - 1`).
    pub fn lambda(&self) -> &[Real] {
        &self.lambda
    }

    /// `G(n)/q^n` for `n = 0..=n_max`.
    pub fn g_norm(&self) -> &[Real] {
        &self.g_norm
    }

    /// `q^(-k)` for `k = 0..=n_max`.
    pub fn inv_q_powers(&self) -> &[Real] {
        &self.inv_q_powers
    }

    /// Restriction to degrees `<= n_max`.
    pub fn truncated(&self, n_max: usize) -> Result<Self> {
        if n_max == 0 || n_max > self.n_max() {
            return Err(Error::InvalidInput(format!(
                "cannot truncate to {n_max}, have {}",
                self.n_max()
            )));
        }
        let exact = match &self.exact {
            Some(e) => Some(ExactData {
                q: e.q,
                p: e.p.truncate(n_max)?,
                g: ElementCounts::new(e.g.values()[..=n_max].to_vec())?,
                q_powers: e.q_powers[..=n_max].to_vec(),
            }),
            None => None,
        };
        Ok(Self {
            precision: self.precision,
            q: self.q.clone(),
            exact,
            weights: self.weights[..n_max].to_vec(),
            lambda: self.lambda[..n_max].to_vec(),
            g_norm: self.g_norm[..=n_max].to_vec(),
            inv_q_powers: self.inv_q_powers[..=n_max].to_vec(),
        })
    }
}

fn check_base(q: &Real) -> Result<()> {
    if to_f64(q) <= 1.0 {
        return Err(Error::Domain(format!("q must exceed 1, got {}", to_f64(q))));
    }
    Ok(())
}

/// `lambda_n = n P(n)/q^n`; exact rationals rounded once when `q` is integral.
pub fn lambda_sequence(p: &GeneratorCounts, q: &Real, prec: Precision) -> Result<Vec<Real>> {
    check_base(q)?;
    if let Some(qi) = as_integer(q) {
        let base = UBig::from(qi);
        let mut power = UBig::ONE;
        return Ok((1..=p.n_max())
            .map(|k| {
                power *= &base;
                prec.ratio(&IBig::from(UBig::from(k) * p.get(k)), &power)
            })
            .collect());
    }
    let q = prec.lift(q);
    Ok((1..=p.n_max())
        .map(|k| prec.uint(&(UBig::from(k) * p.get(k))) / prec.powi(&q, k))
        .collect())
}

/// `r(n) = g(n) - A` for `n = 0..=n_max`.
pub fn residuals(g_norm: &[Real], a: &Real) -> Result<Vec<Real>> {
    if *a <= Real::ZERO {
        return Err(Error::InvalidInput("A must be positive".into()));
    }
    Ok(g_norm.iter().map(|g| g - a).collect())
}

/// Growth-base estimate with its independent cross-check.
#[derive(Clone, Debug)]
pub struct QEstimate {
    pub q: Real,
    /// Richardson-extrapolated limit of `G(n+1)/G(n)`.
    pub ratio_estimate: f64,
    /// `G(n_max)^(1/n_max)`.
    pub root_estimate: f64,
    /// `|ratio - root| / ratio`.
    pub discrepancy: f64,
}

/// Relative disagreement between ratio and root estimates that rejects the input.
pub const Q_DISCREPANCY_LIMIT: f64 = 0.10;

/// Estimates `q = 1/rho` from coefficient growth.
///
/// The ratio sequence `R(n) = G(n+1)/G(n)` is extrapolated to `n = infinity`
/// by quadratic interpolation in `1/n` through `n`, `n/2` and `n/4`
/// (`n = n_max - 1`); the n-th root `G(n_max)^(1/n_max)` is the cross-check.
pub fn estimate_q(g: &ElementCounts, prec: Precision) -> Result<QEstimate> {
    let n_max = g.n_max();
    if n_max < 8 {
        return Err(Error::InsufficientData(format!("estimate_q needs n_max >= 8, got {n_max}")));
    }
    let top = n_max - 1;
    let points = [top, top / 2, top / 4];
    let mut ratios = Vec::with_capacity(3);
    for &n in &points {
        if *g.get(n) == UBig::ZERO || *g.get(n + 1) == UBig::ZERO {
            return Err(Error::NonGeometricGrowth { ratio: f64::NAN, root: f64::NAN });
        }
        ratios.push(prec.ratio(&IBig::from(g.get(n + 1).clone()), g.get(n)));
    }
    let h: Vec<Real> = points.iter().map(|&n| prec.one() / prec.int(n as i64)).collect();
    let mut q = prec.zero();
    for i in 0..3 {
        let mut weight = prec.one();
        for j in 0..3 {
            if i != j {
                weight = weight * &h[j] / (&h[j] - &h[i]);
            }
        }
        q += weight * &ratios[i];
    }
    let ratio_estimate = to_f64(&q);
    let root = (prec.uint(g.get(n_max)).ln() / prec.int(n_max as i64)).exp();
    let root_estimate = to_f64(&root);
    let discrepancy = (ratio_estimate - root_estimate).abs() / ratio_estimate.abs();
    if !(discrepancy <= Q_DISCREPANCY_LIMIT) || ratio_estimate <= 1.0 + 1e-9 {
        return Err(Error::NonGeometricGrowth {
            ratio: ratio_estimate,
            root: root_estimate,
        });
    }
    if let Some(qi) = nearest_integer_within(&q, prec) {
        q = prec.int(qi as i64);
    }
    Ok(QEstimate {
        q,
        ratio_estimate,
        root_estimate,
        discrepancy,
    })
}

/// Snaps estimates that agree with an integer to a few ulps.
fn nearest_integer_within(q: &Real, prec: Precision) -> Option<u64> {
    let rounded = q.round();
    let diff = to_f64(&(q - &rounded)).abs();
    (diff <= 64.0 * prec.ulp() * to_f64(q)).then(|| as_integer(&rounded)).flatten()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AMethod {
    TailAverage,
    HEvaluation,
    ExactKnown,
}

/// Estimate of `A` in `G(n)/q^n = A + r(n)`.
#[derive(Clone, Debug)]
pub struct AxiomAEstimate {
    pub a: Real,
    pub method: AMethod,
    /// Empirical error bound for `a` (model-conditional for the fitted methods).
    pub bound: f64,
    /// `max |r(n)|` over the window.
    pub residual_norm: f64,
    pub window: (usize, usize),
}

/// Estimates `A`; `known` supplies the value for [`AMethod::ExactKnown`].
pub fn estimate_a(norm: &NormalizedSemigroup, method: AMethod, known: Option<&RBig>) -> Result<AxiomAEstimate> {
    let prec = norm.precision();
    let n_max = norm.n_max();
    let est = match method {
        AMethod::ExactKnown => {
            let a = known.ok_or_else(|| Error::InvalidInput("no exactly known A for this instance".into()))?;
            let a = prec.rational(a);
            let lo = (3 * n_max / 4).max(1);
            AxiomAEstimate {
                residual_norm: max_abs_diff(&norm.g_norm()[lo..], &a),
                bound: prec.ulp() * to_f64(&a),
                a,
                method,
                window: (lo, n_max),
            }
        }
        AMethod::TailAverage => tail_average(norm.g_norm(), prec)?,
        AMethod::HEvaluation => h_ladder(norm)?,
    };
    if est.a <= Real::ZERO || to_f64(&est.a) <= est.bound {
        return Err(Error::NoConvergence(format!(
            "estimated A = {} is not separated from 0 (bound {})",
            to_f64(&est.a),
            est.bound
        )));
    }
    Ok(est)
}

fn max_abs_diff(values: &[Real], a: &Real) -> f64 {
    values.iter().map(|g| to_f64(&(g - a)).abs()).fold(0.0, f64::max)
}

/// Mean of `g` over the top quartile, after removing a fitted `c n^(-beta)`
/// residual whose exponent comes from the decay of successive differences.
fn tail_average(g: &[Real], prec: Precision) -> Result<AxiomAEstimate> {
    let n_max = g.len() - 1;
    let lo = (3 * n_max / 4).max(1);
    if n_max - lo < 4 {
        return Err(Error::InsufficientData("tail_average needs at least 5 degrees in the window".into()));
    }
    let (a, fit_residual) = fit_power_tail(g, lo, n_max, prec)?;
    let (a_half, _) = fit_power_tail(g, (lo + n_max) / 2, n_max, prec).unwrap_or((a.clone(), 0.0));
    let stability = to_f64(&(&a - &a_half)).abs();
    let bound = fit_residual + stability + 8.0 * prec.ulp() * to_f64(&a).abs();
    Ok(AxiomAEstimate {
        residual_norm: max_abs_diff(&g[lo..], &a),
        bound,
        a,
        method: AMethod::TailAverage,
        window: (lo, n_max),
    })
}

/// Least-squares fit of `g(n) = A + c n^(-beta)` on `lo..=hi`; returns `A` and
/// the largest fit residual.
fn fit_power_tail(g: &[Real], lo: usize, hi: usize, prec: Precision) -> Result<(Real, f64)> {
    let reference = g[hi].clone();
    let scale = to_f64(&reference).abs().max(f64::MIN_POSITIVE);
    let diffs: Vec<(f64, f64)> = (lo..hi)
        .map(|n| (n as f64, to_f64(&(&g[n] - &g[n + 1]))))
        .collect();
    let negligible = 16.0 * prec.ulp() * scale;
    if diffs.iter().all(|(_, d)| d.abs() <= negligible) {
        let count = (hi - lo + 1) as i64;
        let mean = g[lo..=hi].iter().fold(prec.zero(), |acc, x| acc + x) / prec.int(count);
        let spread = max_abs_diff(&g[lo..=hi], &mean);
        return Ok((mean, spread));
    }
    let quarter = (diffs.len() / 4).max(1);
    let head: f64 = diffs[..quarter].iter().map(|(_, d)| d.abs()).sum::<f64>();
    let tail: f64 = diffs[diffs.len() - quarter..].iter().map(|(_, d)| d.abs()).sum::<f64>();
    if tail >= head {
        return Err(Error::NoConvergence("normalized counts show no decay toward a limit".into()));
    }
    let pts: Vec<(f64, f64)> = diffs
        .iter()
        .filter(|(_, d)| d.abs() > negligible)
        .map(|&(n, d)| (n.ln(), d.abs().ln()))
        .collect();
    let (slope, _) = least_squares(&pts);
    let beta = -slope - 1.0;
    if !(beta > 0.0) {
        return Err(Error::NoConvergence(format!("residual decay exponent {beta} is not positive")));
    }
    let xs: Vec<(f64, f64)> = (lo..=hi)
        .map(|n| ((n as f64).powf(-beta), to_f64(&(&g[n] - &reference))))
        .collect();
    let (c, intercept) = least_squares(&xs);
    let fit_residual = xs
        .iter()
        .map(|(x, y)| (y - intercept - c * x).abs())
        .fold(0.0, f64::max);
    Ok((reference + prec.from_f64(intercept), fit_residual))
}

/// Ordinary least squares `y = slope x + intercept`.
pub(crate) fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    if points.len() < 2 {
        return (0.0, points.first().map_or(0.0, |p| p.1));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (0.0, my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `H` evaluated in normalized form `(1 - t) sum g(n) t^n` with `t = q y`,
/// plus the geometric tail `g(N) t^(N+1)`.
fn normalized_h(g: &[Real], t: &Real, prec: Precision) -> (Real, Real) {
    let n = g.len() - 1;
    let mut sum = prec.zero();
    let mut power = prec.one();
    for gn in g {
        sum += gn * &power;
        power *= t;
    }
    let one_minus = prec.one() - t;
    let tail = &g[n] * &power;
    (&one_minus * sum + &tail, tail)
}

/// Richardson extrapolation of `H(1/q - h/q)` to `h = 0` over a four-step ladder.
fn h_ladder(norm: &NormalizedSemigroup) -> Result<AxiomAEstimate> {
    let prec = norm.precision();
    let g = norm.g_norm();
    let n = g.len() - 1;
    if n < 8 {
        return Err(Error::InsufficientData("h_evaluation needs n_max >= 8".into()));
    }
    let h_min = (40.0 / n as f64).clamp(1e-4, 0.1);
    let hs: Vec<f64> = (0..4).map(|i| h_min * f64::from(1u32 << (3 - i))).collect();
    let mut values = Vec::with_capacity(4);
    let mut tails = Vec::with_capacity(4);
    for &h in &hs {
        let t = prec.one() - prec.from_f64(h);
        let (value, tail) = normalized_h(g, &t, prec);
        values.push(value);
        tails.push(to_f64(&tail).abs());
    }
    let extrapolate = |idx: &[usize]| {
        let mut acc = prec.zero();
        for &i in idx {
            let mut w = prec.one();
            for &j in idx {
                if i != j {
                    let hj = prec.from_f64(hs[j]);
                    w = w * &hj / (&hj - prec.from_f64(hs[i]));
                }
            }
            acc += w * &values[i];
        }
        acc
    };
    let a = extrapolate(&[0, 1, 2, 3]);
    let a3 = extrapolate(&[1, 2, 3]);
    let variation = if to_f64(&g[n]) != 0.0 {
        to_f64(&(&g[n] - &g[n / 2])).abs() / to_f64(&g[n]).abs()
    } else {
        1.0
    };
    let tail_err = tails.iter().cloned().fold(0.0, f64::max) * variation.min(1.0) * 8.0;
    let bound = to_f64(&(&a - &a3)).abs() + tail_err + 64.0 * prec.ulp() * to_f64(&a).abs();
    let lo = (3 * n / 4).max(1);
    Ok(AxiomAEstimate {
        residual_norm: max_abs_diff(&g[lo..], &a),
        bound,
        a,
        method: AMethod::HEvaluation,
        window: (lo, n),
    })
}

/// `H(y) = (1 - q y) Z_N(y)` with its geometric tail correction.
#[derive(Clone, Debug)]
pub struct HValue {
    /// `(1 - q y) (Z_N(y) + tail estimate)`.
    pub value: Real,
    /// `(1 - q y) Z_N(y)` without the tail.
    pub truncated: Real,
    /// Magnitude of the tail contribution; the error of `value` is bounded by
    /// it only under the geometric growth assumption behind the estimate.
    pub remainder_bound: f64,
}

pub fn h_eval(g: &ElementCounts, q: &Real, y: &Real, n: usize, prec: Precision) -> Result<HValue> {
    let qy = prec.lift(q) * prec.lift(y);
    if *y <= Real::ZERO || to_f64(&qy) >= 1.0 {
        return Err(Error::Domain(format!(
            "h_eval needs 0 < y < 1/q, got q y = {}",
            to_f64(&qy)
        )));
    }
    let z = zeta_truncated(g, y, n, prec)?;
    let factor = prec.one() - &qy;
    let truncated = &factor * &z.value;
    // tail under the growth rate q itself: G(N) y^N (q y)/(1 - q y)
    let last = prec.uint(g.get(n)) * prec.powi(&prec.lift(y), n);
    let tail = &last * &qy / &factor;
    let value = &factor * (&z.value + &tail);
    Ok(HValue {
        remainder_bound: to_f64(&(&factor * &tail)).abs(),
        value,
        truncated,
    })
}

/// Writes the `n,P,G,lambda,g_norm,r` table.
pub fn write_normalized_table<W: Write>(
    writer: W,
    norm: &NormalizedSemigroup,
    residual: Option<&[Real]>,
    digits: usize,
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["n", "P", "G", "lambda", "g_norm", "r"])?;
    let prec = norm.precision();
    for n in 0..=norm.n_max() {
        let (p, g) = match norm.exact() {
            Some(e) => (
                if n == 0 { String::new() } else { e.p.get(n).to_string() },
                e.g.get(n).to_string(),
            ),
            None => {
                let qn = prec.powi(norm.q(), n);
                let g = format_real(&(&norm.g_norm()[n] * &qn), digits);
                let p = if n == 0 {
                    String::new()
                } else {
                    format_real(&(&norm.lambda()[n - 1] * &qn / prec.int(n as i64)), digits)
                };
                (p, g)
            }
        };
        let lambda = if n == 0 { String::new() } else { format_real(&norm.lambda()[n - 1], digits) };
        let r = residual.map(|r| format_real(&r[n], digits)).unwrap_or_default();
        csv.write_record([n.to_string(), p, g, lambda, format_real(&norm.g_norm()[n], digits), r])?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{count_elements, poly_generator_counts};

    fn poly2(n_max: usize) -> NormalizedSemigroup {
        let p = poly_generator_counts(2, n_max).unwrap();
        let g = ElementCounts::geometric(&UBig::from(2u8), n_max).unwrap();
        NormalizedSemigroup::from_exact(&p, &g, 2, Precision::DEFAULT).unwrap()
    }

    #[test]
    fn q_of_geometric_counts() {
        let g = ElementCounts::geometric(&UBig::from(2u8), 40).unwrap();
        let est = estimate_q(&g, Precision::DEFAULT).unwrap();
        assert_eq!(as_integer(&est.q), Some(2));
        assert!(est.discrepancy < 1e-12);
    }

    #[test]
    fn q_of_polynomial_times_geometric() {
        let values: Vec<UBig> = (0..=64u32).map(|n| UBig::from(n + 1) << n as usize).collect();
        let g = ElementCounts::new(values).unwrap();
        let est = estimate_q(&g, Precision::DEFAULT).unwrap();
        assert!((est.ratio_estimate - 2.0).abs() < 1e-2, "{}", est.ratio_estimate);
    }

    #[test]
    fn q_rejects_unit_growth() {
        let g = ElementCounts::from_u64(&[1; 20]).unwrap();
        assert!(matches!(estimate_q(&g, Precision::DEFAULT), Err(Error::NonGeometricGrowth { .. })));
        let short = ElementCounts::from_u64(&[1, 2, 4]).unwrap();
        assert!(matches!(estimate_q(&short, Precision::DEFAULT), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn q_of_perturbed_counts_is_at_least_one() {
        let p = GeneratorCounts::from_u64(&[1, 0, 3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3, 2, 3]).unwrap();
        let g = count_elements(&p);
        match estimate_q(&g, Precision::DEFAULT) {
            Ok(est) => assert!(to_f64(&est.q) >= 1.0),
            Err(Error::NonGeometricGrowth { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn lambda_examples() {
        let p = poly_generator_counts(2, 5).unwrap();
        let lambda = lambda_sequence(&p, &Precision::DEFAULT.int(2), Precision::DEFAULT).unwrap();
        let expected = [1.0, 0.5, 0.75, 0.75, 0.9375];
        for (l, e) in lambda.iter().zip(expected) {
            assert_eq!(to_f64(l), e);
        }
        let zero = GeneratorCounts::zero(4).unwrap();
        assert!(lambda_sequence(&zero, &Precision::DEFAULT.int(3), Precision::DEFAULT)
            .unwrap()
            .iter()
            .all(|l| *l == Real::ZERO));
        let real_q = Precision::DEFAULT.parse("2.5").unwrap();
        let l = lambda_sequence(&p, &real_q, Precision::DEFAULT).unwrap();
        assert!((to_f64(&l[0]) - 0.8).abs() < 1e-30);
    }

    #[test]
    fn prefix_stability() {
        let small = poly2(20);
        let large = poly2(60);
        assert_eq!(small.lambda(), &large.lambda()[..20]);
        assert_eq!(small.g_norm(), &large.g_norm()[..=20]);
        assert_eq!(large.truncated(20).unwrap().lambda(), small.lambda());
    }

    #[test]
    fn poly_residuals_vanish() {
        let norm = poly2(50);
        assert!(norm.g_norm().iter().all(|g| *g == Precision::DEFAULT.one()));
        let r = residuals(norm.g_norm(), &Precision::DEFAULT.one()).unwrap();
        assert!(r.iter().all(|x| *x == Real::ZERO));
        let r2 = residuals(norm.g_norm(), &Precision::DEFAULT.int(2)).unwrap();
        assert!(r2.iter().all(|x| to_f64(x) == -1.0));
        assert!(residuals(norm.g_norm(), &Precision::DEFAULT.zero()).is_err());
    }

    #[test]
    fn residuals_of_prescribed_counts() {
        let prec = Precision::DEFAULT;
        let g: Vec<Real> = std::iter::once(prec.one())
            .chain((1..=30).map(|n| prec.one() + prec.one() / prec.int(n * n)))
            .collect();
        let r = residuals(&g, &prec.one()).unwrap();
        for n in 1..=30i64 {
            assert!((to_f64(&r[n as usize]) - 1.0 / (n * n) as f64).abs() < 1e-30);
        }
    }

    #[test]
    fn a_for_poly_instances() {
        let norm = poly2(64);
        let exact = estimate_a(&norm, AMethod::ExactKnown, Some(&RBig::ONE)).unwrap();
        assert_eq!(exact.a, Precision::DEFAULT.one());
        let tail = estimate_a(&norm, AMethod::TailAverage, None).unwrap();
        assert_eq!(tail.a, Precision::DEFAULT.one());
        let h = estimate_a(&norm, AMethod::HEvaluation, None).unwrap();
        assert!((to_f64(&h.a) - 1.0).abs() <= h.bound + tail.bound + 1e-30);
        assert!(estimate_a(&norm, AMethod::ExactKnown, None).is_err());
    }

    #[test]
    fn a_with_decaying_residual() {
        // G(n) = round(2^n (3 + 1/n^2)), read as real counts
        let prec = Precision::DEFAULT;
        let n_max = 64usize;
        let mut g = vec![prec.one()];
        for n in 1..=n_max {
            let exact = RBig::from(UBig::ONE << n) * (RBig::from(3) + RBig::from_parts(1.into(), UBig::from(n * n)));
            let rounded = IBig::from(exact.round());
            g.push(prec.ratio(&rounded, &(UBig::ONE << n)));
        }
        let lambda = crate::semigroup::lambda_from_normalized(&prec.int(2), &g, prec);
        let norm = NormalizedSemigroup::from_normalized(&prec.int(2), lambda, g, prec).unwrap();
        let est = estimate_a(&norm, AMethod::TailAverage, None).unwrap();
        assert!((to_f64(&est.a) - 3.0).abs() < 1e-3, "{}", to_f64(&est.a));
    }

    #[test]
    fn a_rejects_vanishing_counts() {
        let p = GeneratorCounts::from_u64(&[1; 32]).unwrap();
        let g = ElementCounts::from_u64(&[1; 33]).unwrap();
        let norm = NormalizedSemigroup::from_exact(&p.truncate(32).unwrap(), &g, 2, Precision::DEFAULT).unwrap();
        assert!(matches!(
            estimate_a(&norm, AMethod::TailAverage, None),
            Err(Error::NoConvergence(_))
        ));
    }

    #[test]
    fn h_eval_examples() {
        let prec = Precision::DEFAULT;
        let g = ElementCounts::geometric(&UBig::from(2u8), 2000).unwrap();
        let q = prec.int(2);
        let h = h_eval(&g, &q, &prec.parse("0.4").unwrap(), 200, prec).unwrap();
        assert!((to_f64(&h.value) - 1.0).abs() < 1e-10);
        let h = h_eval(&g, &q, &prec.parse("0.499").unwrap(), 2000, prec).unwrap();
        assert!((to_f64(&h.value) - 1.0).abs() < 1e-6);
        assert!(h.remainder_bound > 1e-3);
        assert!(matches!(
            h_eval(&g, &q, &prec.parse("0.5").unwrap(), 100, prec),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn table_export() {
        let norm = poly2(4);
        let r = residuals(norm.g_norm(), &Precision::DEFAULT.one()).unwrap();
        let mut buf = Vec::new();
        write_normalized_table(&mut buf, &norm, Some(&r), 25).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,P,G,lambda,g_norm,r");
        assert_eq!(lines[1], "0,,1,,1,0");
        assert_eq!(lines[3], "2,1,4,0.5,1,0");
        assert_eq!(lines.len(), 6);
    }
}
