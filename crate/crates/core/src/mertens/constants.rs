//! The constants `C_M`, `C_3`, `C_1`, `C_2` and the integral `I`, each with a
//! bound.
//!
//! Tail bounds for `C_M` and `C_3` assume the Chebyshev-type majorant
//! `P(k) <= c q^k / k` for `k > n_max`, with `c` the largest `lambda_k` over
//! the top half of the data. They are conditional on that majorant.

use dashu_int::{IBig, UBig};

use crate::error::{Error, Result};
use crate::normalization::{AMethod, AxiomAEstimate, NormalizedSemigroup};
use crate::real::{to_f64, Bounded, Precision, Real};
use crate::semigroup::{ElementCounts, GeneratorCounts};

use super::gamma::euler_gamma;
use super::sums::MertensTables;

/// Empirical `c` with `lambda_k <= c` over the top half of the available degrees.
pub fn chebyshev_majorant(norm: &NormalizedSemigroup) -> f64 {
    let n = norm.n_max();
    norm.lambda()[n / 2..]
        .iter()
        .map(|l| to_f64(l).abs())
        .fold(0.0, f64::max)
}

/// `ln(q^-(k+1) / ((1 - q^-(k+1)) (1 - 1/q)))`, the log of a geometric tail sum.
fn log_geometric_tail(q: f64, k: usize) -> f64 {
    let lu = -((k + 1) as f64) * q.ln();
    lu - (-lu.exp()).ln_1p() - (-1.0 / q).ln_1p()
}

/// `sum_{k>K} P(k)(-ln(1-u_k) - u_k)` under the majorant, using
/// `-ln(1-u) - u <= u^2 / (2(1-u))`.
pub fn c_m_tail_bound(c: f64, q: f64, k: usize) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    (c.ln() - (2.0 * (k + 1) as f64).ln() + log_geometric_tail(q, k)).exp()
}

/// `sum_{k>K} lambda_k u_k/(1-u_k)` under the majorant.
pub fn c_3_tail_bound(c: f64, q: f64, k: usize) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    (c.ln() + log_geometric_tail(q, k)).exp()
}

fn summation_error(value: &Real, terms: usize, prec: Precision) -> f64 {
    (terms as f64 + 1.0) * prec.ulp() * to_f64(value).abs()
}

/// `C_M = sum P(k)(-ln(1 - q^-k) - q^-k)`.
pub fn c_m(norm: &NormalizedSemigroup, tables: &MertensTables, tol: f64) -> Result<Bounded> {
    check_tol(tol)?;
    let n = norm.n_max();
    let tail = c_m_tail_bound(chebyshev_majorant(norm), to_f64(norm.q()), n);
    if !(tail <= tol) {
        return Err(Error::InsufficientData(format!(
            "C_M tail bound {tail:e} at n_max = {n} exceeds tolerance {tol:e}"
        )));
    }
    let value = tables.cm_partial[n].clone();
    let bound = tail + summation_error(&value, n, norm.precision());
    Ok(Bounded::new(value, bound))
}

/// `C_3 = sum k P(k) / (q^k (q^k - 1))`.
pub fn c_3(norm: &NormalizedSemigroup, tol: f64) -> Result<Bounded> {
    check_tol(tol)?;
    let prec = norm.precision();
    let n = norm.n_max();
    let tail = c_3_tail_bound(chebyshev_majorant(norm), to_f64(norm.q()), n);
    if !(tail <= tol) {
        return Err(Error::InsufficientData(format!(
            "C_3 tail bound {tail:e} at n_max = {n} exceeds tolerance {tol:e}"
        )));
    }
    let mut value = prec.zero();
    match norm.exact() {
        Some(e) => {
            for k in 1..=n {
                let pk = e.p.get(k);
                if *pk != UBig::ZERO {
                    let qk = &e.q_powers[k];
                    let den = qk * (qk - UBig::ONE);
                    value += prec.ratio(&IBig::from(UBig::from(k) * pk), &den);
                }
            }
        }
        None => {
            for k in 1..=n {
                let u = &norm.inv_q_powers()[k];
                value += &norm.lambda()[k - 1] * u / (prec.one() - u);
            }
        }
    }
    let bound = tail + summation_error(&value, n, prec);
    Ok(Bounded::new(value, bound))
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// `C_1 = gamma + ln A - C_M`.
pub fn c_1(a: &Bounded, c_m: &Bounded, gamma: &Real, prec: Precision) -> Result<Bounded> {
    check_a(a)?;
    let value = gamma + a.value.clone().ln() - &c_m.value;
    let bound = c_m.bound + a.bound / to_f64(&a.value) + 4.0 * prec.ulp();
    Ok(Bounded::new(value, bound))
}

/// `C_2 = 1 / (A e^gamma)`.
pub fn c_2(a: &Bounded, gamma: &Real, prec: Precision) -> Result<Bounded> {
    check_a(a)?;
    let value = prec.one() / (&a.value * gamma.clone().exp());
    let v = to_f64(&value);
    let bound = v * (a.bound / to_f64(&a.value)) + 4.0 * prec.ulp() * v;
    Ok(Bounded::new(value, bound))
}

fn check_a(a: &Bounded) -> Result<()> {
    if a.value <= Real::ZERO {
        return Err(Error::Domain("A must be positive".into()));
    }
    Ok(())
}

/// `sum_{k=1}^n k P(k) G(n-k) / G(n)`, an exact rational rounded once.
pub fn lemma3_lhs(p: &GeneratorCounts, g: &ElementCounts, n: usize, prec: Precision) -> Result<Real> {
    if n > g.n_max() || n > p.n_max() {
        return Err(Error::InvalidInput(format!("n = {n} exceeds available degrees")));
    }
    let den = g.get(n);
    if *den == UBig::ZERO {
        return Err(Error::ZeroDenominator { degree: n });
    }
    let mut num = UBig::ZERO;
    for k in 1..=n {
        let pk = p.get(k);
        if *pk != UBig::ZERO {
            num += UBig::from(k) * pk * g.get(n - k);
        }
    }
    Ok(prec.ratio(&IBig::from(num), den))
}

/// The same sum in normalized form, `sum lambda_k g(n-k) / g(n)`.
pub fn lemma3_lhs_normalized(norm: &NormalizedSemigroup, n: usize) -> Result<Real> {
    if let Some(e) = norm.exact() {
        return lemma3_lhs(&e.p, &e.g, n, norm.precision());
    }
    if n == 0 || n > norm.n_max() {
        return Err(Error::InvalidInput(format!("n = {n} outside 1..={}", norm.n_max())));
    }
    let g = norm.g_norm();
    if g[n] == Real::ZERO {
        return Err(Error::ZeroDenominator { degree: n });
    }
    let mut sum = norm.precision().zero();
    for k in 1..=n {
        sum += &norm.lambda()[k - 1] * &g[n - k];
    }
    Ok(sum / &g[n])
}

/// `I_N = int_1^N (Lambda(t) - t)/t^2 dt`, integrated exactly on each unit
/// interval: `sum_{n<N} Lambda(n)/(n(n+1)) - ln N`.
///
/// The bound is the truncation estimate `sup |Lambda(t) - t| / N`, with the
/// supremum taken over the top decile of the data (empirical).
pub fn i_integral(tables: &MertensTables, n: usize, prec: Precision) -> Result<Bounded> {
    if n < 2 || n > tables.n_max() {
        return Err(Error::InvalidInput(format!("I integral needs 2 <= N <= {}", tables.n_max())));
    }
    let mut sum = prec.zero();
    for m in 1..n {
        let mm = prec.int(m as i64);
        sum += &tables.lambda_sum[m] / (&mm * (&mm + prec.one()));
    }
    let value = sum - prec.int(n as i64).ln();
    let lo = n - (n / 10).max(1);
    let sup = (lo..=n)
        .map(|m| {
            let d = to_f64(&(&tables.lambda_sum[m] - prec.int(m as i64)));
            d.abs().max((d - 1.0).abs())
        })
        .fold(0.0, f64::max);
    let bound = sup / n as f64 + summation_error(&value, n, prec);
    Ok(Bounded::new(value, bound))
}

/// All constants for one instance.
#[derive(Clone, Debug)]
pub struct ConstantsReport {
    pub gamma: Bounded,
    pub a: Option<Bounded>,
    pub a_method: Option<AMethod>,
    pub c_m: Bounded,
    pub c_1: Option<Bounded>,
    pub c_2: Option<Bounded>,
    pub c_3: Bounded,
    /// `I_N` at `N = n_max`; absent for degenerate instances, where it diverges.
    pub i_integral: Option<Bounded>,
    /// `c` in the majorant `P(k) <= c q^k / k` behind the tail bounds.
    pub majorant: f64,
    pub degenerate: bool,
}

/// Constants with tail bounds at most `tol`. `a` is `None` for degenerate
/// instances, whose normalized counts have no positive limit.
pub fn constants_report(
    norm: &NormalizedSemigroup,
    tables: &MertensTables,
    a: Option<&AxiomAEstimate>,
    tol: f64,
) -> Result<ConstantsReport> {
    let prec = norm.precision();
    let gamma = euler_gamma(Precision::new(prec.bits().max(64))?)?;
    let gamma = Bounded::new(prec.lift(&gamma), prec.ulp());
    let degenerate = norm.lambda().iter().all(|l| *l == Real::ZERO);
    let c_m = c_m(norm, tables, tol)?;
    let c_3 = c_3(norm, tol)?;
    let a_bounded = a.map(|est| Bounded::new(est.a.clone(), est.bound));
    let (c_1, c_2, i_integral) = match (&a_bounded, degenerate) {
        (Some(a), false) => (
            Some(c_1(a, &c_m, &gamma.value, prec)?),
            Some(c_2(a, &gamma.value, prec)?),
            Some(i_integral(tables, norm.n_max(), prec)?),
        ),
        _ => (None, None, None),
    };
    Ok(ConstantsReport {
        gamma,
        a_method: a.map(|est| est.method),
        a: a_bounded,
        c_m,
        c_1,
        c_2,
        c_3,
        i_integral,
        majorant: chebyshev_majorant(norm),
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::poly_generator_counts;

    fn poly(q: u64, n_max: usize) -> NormalizedSemigroup {
        let p = poly_generator_counts(q, n_max).unwrap();
        let g = ElementCounts::geometric(&UBig::from(q), n_max).unwrap();
        NormalizedSemigroup::from_exact(&p, &g, q, Precision::DEFAULT).unwrap()
    }

    fn single(pk: u64, n_max: usize) -> NormalizedSemigroup {
        let mut values = vec![0u64; n_max];
        values[0] = pk;
        let p = GeneratorCounts::from_u64(&values).unwrap();
        let g = crate::semigroup::count_elements(&p);
        NormalizedSemigroup::from_exact(&p, &g, 2, Precision::DEFAULT).unwrap()
    }

    #[test]
    fn c_m_values() {
        let norm = poly(2, 200);
        let t = MertensTables::new(&norm);
        let cm = c_m(&norm, &t, 1e-6).unwrap();
        assert!((to_f64(&cm.value) - 0.4522339865862763).abs() < 1e-15);
        assert!(cm.bound <= 1e-6);
        let one = single(1, 40);
        let cm1 = c_m(&one, &MertensTables::new(&one), 1e-6).unwrap();
        assert!((to_f64(&cm1.value) - (2f64.ln() - 0.5)).abs() < 1e-15);
        let zero = single(0, 40);
        assert_eq!(c_m(&zero, &MertensTables::new(&zero), 1e-6).unwrap().value, Real::ZERO);
        let short = poly(2, 8);
        assert!(matches!(
            c_m(&short, &MertensTables::new(&short), 1e-6),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn c_3_values() {
        let c3 = c_3(&poly(2, 100), 1e-5).unwrap();
        assert!((to_f64(&c3.value) - 1.3827144554023963).abs() < 1e-15);
        assert!(c3.bound < 1e-8);
        assert_eq!(to_f64(&c_3(&single(2, 40), 1e-5).unwrap().value), 1.0);
        assert_eq!(c_3(&single(0, 40), 1e-5).unwrap().value, Real::ZERO);
    }

    #[test]
    fn c_1_and_c_2() {
        let prec = Precision::DEFAULT;
        let gamma = euler_gamma(prec).unwrap();
        let one = Bounded::exact(prec.one());
        let cm = Bounded::exact(prec.parse("0.4522339865862763").unwrap());
        let c1 = c_1(&one, &cm, &gamma, prec).unwrap();
        assert!((to_f64(&c1.value) - 0.1249816783152565).abs() < 1e-15);
        let c2 = c_2(&one, &gamma, prec).unwrap();
        assert!((to_f64(&c2.value) - 0.5614594835668852).abs() < 1e-15);
        let e = Bounded::exact(prec.one().exp());
        let c1e = c_1(&e, &Bounded::exact(gamma.clone()), &gamma, prec).unwrap();
        assert!((to_f64(&c1e.value) - 1.0).abs() < 1e-36);
        assert!(c_2(&Bounded::exact(prec.zero()), &gamma, prec).is_err());
    }

    #[test]
    fn lemma3_values() {
        let prec = Precision::DEFAULT;
        let p = poly_generator_counts(2, 100).unwrap();
        let g = ElementCounts::geometric(&UBig::from(2u8), 100).unwrap();
        assert_eq!(to_f64(&lemma3_lhs(&p, &g, 10, prec).unwrap()), 8.654296875);
        let c3 = c_3(&poly(2, 100), 1e-8).unwrap();
        let l100 = lemma3_lhs(&p, &g, 100, prec).unwrap();
        assert!(to_f64(&(l100 - prec.int(100) + &c3.value)).abs() < 1e-6);
        let holes = ElementCounts::from_u64(&[1, 0, 1]).unwrap();
        let p2 = GeneratorCounts::from_u64(&[0, 1]).unwrap();
        assert!(matches!(lemma3_lhs(&p2, &holes, 1, prec), Err(Error::ZeroDenominator { degree: 1 })));
    }

    #[test]
    fn i_integral_matches_c_1() {
        let norm = poly(2, 2000);
        let t = MertensTables::new(&norm);
        let i = i_integral(&t, 2000, Precision::DEFAULT).unwrap();
        let gap = to_f64(&i.value) + 1.0 - 0.1249816783152565;
        assert!(gap.abs() < 5e-3, "{gap}");
        assert!(gap.abs() <= i.bound);
    }

    #[test]
    fn report_relations_hold() {
        let norm = poly(2, 300);
        let t = MertensTables::new(&norm);
        let a = crate::normalization::estimate_a(&norm, AMethod::ExactKnown, Some(&dashu_ratio::RBig::ONE)).unwrap();
        let r = constants_report(&norm, &t, Some(&a), 1e-8).unwrap();
        let (c1, c2) = (r.c_1.unwrap(), r.c_2.unwrap());
        assert_eq!(c1.value, &r.gamma.value + r.a.as_ref().unwrap().value.clone().ln() - &r.c_m.value);
        let e_minus_gamma = (-r.gamma.value.clone()).exp();
        assert!(to_f64(&(c2.value - e_minus_gamma)).abs() < 1e-36);
        assert!(to_f64(&r.c_m.value) >= 0.0 && to_f64(&r.c_3.value) >= 0.0);
        assert!(!r.degenerate);
    }
}
