//! Exact generator and element counts of an additive arithmetical semigroup.
//!
//! A semigroup is described by `P(k)`, the number of generators of degree
//! `k`, and `G(n)`, the number of elements of degree `n`. The two are linked
//! by the degree identity
//!
//! ```text
//! n G(n) = sum_{k >= 1} k P(k) sum_{j >= 1} G(n - j k),    G(0) = 1, G(m < 0) = 0,
//! ```
//!
//! which is solved forward for `G` ([`count_elements`]) and backward for `P`
//! ([`recover_generators`]) in exact integer arithmetic.

use dashu_int::{IBig, UBig};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::real::{to_f64, Precision, Real};

/// Inner convolution sums above this degree are split across the rayon pool.
const PARALLEL_DEGREE: usize = 384;

/// Exact generator counts `P(1..=n_max)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorCounts {
    values: Vec<UBig>,
}

impl GeneratorCounts {
    pub fn new(values: Vec<UBig>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("generator counts need n_max >= 1".into()));
        }
        Ok(Self { values })
    }

    pub fn from_u64(values: &[u64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| UBig::from(v)).collect())
    }

    /// Rejects negative entries with [`Error::NotASemigroup`].
    pub fn from_signed(values: Vec<IBig>) -> Result<Self> {
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                UBig::try_from(v.clone()).map_err(|_| Error::NotASemigroup {
                    degree: i + 1,
                    reason: format!("negative generator count {v}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    /// All-zero counts: the semigroup consisting of the identity alone.
    pub fn zero(n_max: usize) -> Result<Self> {
        Self::new(vec![UBig::ZERO; n_max])
    }

    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    /// `P(degree)`; degrees outside `1..=n_max` count as zero.
    pub fn get(&self, degree: usize) -> &UBig {
        static ZERO: UBig = UBig::ZERO;
        if degree == 0 || degree > self.values.len() {
            &ZERO
        } else {
            &self.values[degree - 1]
        }
    }

    /// `P(1), ..., P(n_max)`.
    pub fn values(&self) -> &[UBig] {
        &self.values
    }

    pub fn total(&self) -> UBig {
        self.values.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == UBig::ZERO)
    }

    pub fn truncate(&self, n_max: usize) -> Result<Self> {
        Self::new(self.values[..n_max.min(self.values.len())].to_vec())
    }
}

/// Exact element counts `G(0..=n_max)` with `G(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementCounts {
    values: Vec<UBig>,
}

impl ElementCounts {
    pub fn new(values: Vec<UBig>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput("element counts need n_max >= 1".into()));
        }
        if values[0] != UBig::ONE {
            return Err(Error::NotASemigroup {
                degree: 0,
                reason: format!("G(0) must be 1 (the identity), got {}", values[0]),
            });
        }
        Ok(Self { values })
    }

    pub fn from_u64(values: &[u64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| UBig::from(v)).collect())
    }

    pub fn from_signed(values: Vec<IBig>) -> Result<Self> {
        let values = values
            .into_iter()
            .enumerate()
            .map(|(n, v)| {
                UBig::try_from(v.clone()).map_err(|_| Error::NotASemigroup {
                    degree: n,
                    reason: format!("negative element count {v}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    /// `G(n) = q^n`, the monic polynomials of degree `n` over a field of `q` elements.
    pub fn geometric(q: &UBig, n_max: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(n_max + 1);
        let mut power = UBig::ONE;
        for _ in 0..=n_max {
            values.push(power.clone());
            power *= q;
        }
        Self::new(values)
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `G(n)`; degrees above `n_max` are not available and panic.
    pub fn get(&self, n: usize) -> &UBig {
        &self.values[n]
    }

    /// `G(0), ..., G(n_max)`.
    pub fn values(&self) -> &[UBig] {
        &self.values
    }

    /// Copy with one entry replaced; used to exercise tamper detection.
    pub fn with_entry(&self, n: usize, value: UBig) -> Self {
        let mut values = self.values.clone();
        values[n] = value;
        Self { values }
    }
}

/// Möbius function by trial factorization.
pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::InvalidInput("mobius is undefined at 0".into()));
    }
    let mut n = n;
    let mut sign = 1i8;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        d += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// `mu[n]` for `0 <= n <= limit` (entry 0 unused), by a linear sieve.
pub fn mobius_table(limit: usize) -> Vec<i8> {
    let mut mu = vec![1i8; limit + 1];
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    if limit >= 1 {
        mu[0] = 0;
    }
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let m = i * p;
            if m > limit {
                break;
            }
            composite[m] = true;
            if i % p == 0 {
                mu[m] = 0;
                break;
            }
            mu[m] = -mu[i];
        }
    }
    mu
}

/// Irreducible monic polynomials over a field of `q` elements, by degree:
/// `P(n) = (1/n) sum_{d | n} mu(n/d) q^d`.
pub fn poly_generator_counts(q: u64, n_max: usize) -> Result<GeneratorCounts> {
    if q < 2 {
        return Err(Error::InvalidInput(format!("field size q must be >= 2, got {q}")));
    }
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be >= 1".into()));
    }
    let mu = mobius_table(n_max);
    let base = IBig::from(q);
    let mut sums = vec![IBig::ZERO; n_max + 1];
    let mut power = IBig::ONE;
    for d in 1..=n_max {
        power *= &base;
        for n in (d..=n_max).step_by(d) {
            match mu[n / d] {
                1 => sums[n] += &power,
                -1 => sums[n] -= &power,
                _ => {}
            }
        }
    }
    let mut values = Vec::with_capacity(n_max);
    for (n, sum) in sums.into_iter().enumerate().skip(1) {
        let (quot, rem) = (&sum / IBig::from(n), &sum % IBig::from(n));
        if rem != IBig::ZERO || quot < IBig::ZERO {
            return Err(Error::InternalConsistency(format!(
                "necklace sum at degree {n} is {sum}, not a non-negative multiple of {n}"
            )));
        }
        values.push(UBig::try_from(quot).expect("checked non-negative"));
    }
    GeneratorCounts::new(values)
}

/// `a(m) = sum_{d | m} d P(d)` for `m = 0..=n_max` (entry 0 is zero).
pub(crate) fn divisor_weighted(p: &GeneratorCounts, n_max: usize) -> Vec<UBig> {
    let mut a = vec![UBig::ZERO; n_max + 1];
    for d in 1..=n_max.min(p.n_max()) {
        let weighted = UBig::from(d) * p.get(d);
        if weighted == UBig::ZERO {
            continue;
        }
        for m in (d..=n_max).step_by(d) {
            a[m] += &weighted;
        }
    }
    a
}

fn convolve_at(a: &[UBig], g: &[UBig], n: usize) -> UBig {
    if n >= PARALLEL_DEGREE {
        (1..=n)
            .into_par_iter()
            .map(|m| &a[m] * &g[n - m])
            .reduce(|| UBig::ZERO, |x, y| x + y)
    } else {
        (1..=n).map(|m| &a[m] * &g[n - m]).sum()
    }
}

/// Element counts of the free commutative monoid on `P`, i.e. the
/// coefficients of `prod_k (1 - y^k)^(-P(k))` up to degree `n_max`.
pub fn count_elements(p: &GeneratorCounts) -> ElementCounts {
    let n_max = p.n_max();
    let a = divisor_weighted(p, n_max);
    let mut g: Vec<UBig> = Vec::with_capacity(n_max + 1);
    g.push(UBig::ONE);
    for n in 1..=n_max {
        let sum = convolve_at(&a, &g, n);
        let divisor = UBig::from(n);
        let (quot, rem) = (&sum / &divisor, &sum % &divisor);
        assert!(
            rem == UBig::ZERO,
            "degree identity sum at {n} not divisible by {n}"
        );
        g.push(quot);
    }
    ElementCounts { values: g }
}

/// Inverts [`count_elements`] degree by degree.
///
/// Fails with [`Error::NotASemigroup`] when some recovered `P(n)` is negative
/// or non-integral.
pub fn recover_generators(g: &ElementCounts) -> Result<GeneratorCounts> {
    let n_max = g.n_max();
    let gv: Vec<IBig> = g.values.iter().cloned().map(IBig::from).collect();
    let mut a = vec![IBig::ZERO; n_max + 1];
    // dp[n] = sum_{d | n} d P(d) over proper divisors found so far
    let mut divisor_part = vec![IBig::ZERO; n_max + 1];
    let mut values = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut an = IBig::from(n) * &gv[n];
        for m in 1..n {
            an -= &a[m] * &gv[n - m];
        }
        a[n] = an;
        let np = &a[n] - &divisor_part[n];
        let (pn, rem) = (&np / IBig::from(n), &np % IBig::from(n));
        if rem != IBig::ZERO {
            return Err(Error::NotASemigroup {
                degree: n,
                reason: format!("recovered n P(n) = {np} is not divisible by {n}"),
            });
        }
        if pn < IBig::ZERO {
            return Err(Error::NotASemigroup {
                degree: n,
                reason: format!("recovered P({n}) = {pn} is negative"),
            });
        }
        let weighted = IBig::from(n) * &pn;
        for m in (2 * n..=n_max).step_by(n) {
            divisor_part[m] += &weighted;
        }
        values.push(UBig::try_from(pn).expect("checked non-negative"));
    }
    GeneratorCounts::new(values)
}

/// Largest `n_max` admitted by [`brute_force_elements`].
pub const BRUTE_FORCE_MAX_DEGREE: usize = 16;
/// Largest total number of generators admitted by [`brute_force_elements`].
pub const BRUTE_FORCE_MAX_GENERATORS: u64 = 64;

/// Counts multisets of generators of total degree `n <= n_max` by direct
/// recursion over the individual generators, independent of the degree
/// identity.
pub fn brute_force_elements(p: &GeneratorCounts, n_max: usize) -> Result<ElementCounts> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be >= 1".into()));
    }
    if n_max > BRUTE_FORCE_MAX_DEGREE {
        return Err(Error::ResourceGuard(format!(
            "n_max = {n_max} exceeds the oracle limit {BRUTE_FORCE_MAX_DEGREE}"
        )));
    }
    let mut degrees = Vec::new();
    for k in 1..=n_max.min(p.n_max()) {
        let count = p.get(k);
        if *count > UBig::from(BRUTE_FORCE_MAX_GENERATORS) {
            return Err(guard_error());
        }
        let count: u64 = count.try_into().expect("small count");
        degrees.extend(std::iter::repeat_n(k, count as usize));
        if degrees.len() as u64 > BRUTE_FORCE_MAX_GENERATORS {
            return Err(guard_error());
        }
    }
    // memo[i][r]: multisets drawn from generators i.. with total degree r
    let mut memo: Vec<Vec<Option<u128>>> = vec![vec![None; n_max + 1]; degrees.len() + 1];
    fn count(degrees: &[usize], i: usize, r: usize, memo: &mut [Vec<Option<u128>>]) -> u128 {
        if i == degrees.len() {
            return u128::from(r == 0);
        }
        if let Some(v) = memo[i][r] {
            return v;
        }
        let mut total = 0u128;
        let mut used = 0;
        while used <= r {
            total += count(degrees, i + 1, r - used, memo);
            used += degrees[i];
        }
        memo[i][r] = Some(total);
        total
    }
    let values = (0..=n_max)
        .map(|n| UBig::from(count(&degrees, 0, n, &mut memo)))
        .collect();
    ElementCounts::new(values)
}

fn guard_error() -> Error {
    Error::ResourceGuard(format!(
        "more than {BRUTE_FORCE_MAX_GENERATORS} generators below the oracle degree limit"
    ))
}

/// Checks `n G(n) = sum_k k P(k) sum_{j >= 1} G(n - jk)` as an exact integer
/// identity, evaluated term by term.
pub fn exact_degree_identity_check(p: &GeneratorCounts, g: &ElementCounts, n: usize) -> bool {
    assert!(n <= g.n_max(), "degree {n} beyond the element counts");
    let lhs = UBig::from(n) * g.get(n);
    let mut rhs = UBig::ZERO;
    for k in 1..=n {
        let pk = p.get(k);
        if *pk == UBig::ZERO {
            continue;
        }
        let inner: UBig = (1..=n / k).map(|j| g.get(n - j * k)).sum();
        rhs += UBig::from(k) * pk * inner;
    }
    lhs == rhs
}

/// Truncated generating function `Z_N(y) = sum_{n <= N} G(n) y^n`.
#[derive(Clone, Debug)]
pub struct ZetaValue {
    pub value: Real,
    /// Geometric estimate of the omitted tail `sum_{n > N} G(n) y^n`,
    /// assuming `G(n+1) <= growth * G(n)` beyond `N`.
    pub tail_estimate: Option<Real>,
    /// Growth rate used for the tail: the largest of the last few ratios `G(n+1)/G(n)`.
    pub growth: f64,
    /// Set when `|y| * growth >= 1`; no tail estimate is available then.
    pub divergence_warning: bool,
}

pub fn zeta_truncated(g: &ElementCounts, y: &Real, n: usize, prec: Precision) -> Result<ZetaValue> {
    if n == 0 || n > g.n_max() {
        return Err(Error::InvalidInput(format!(
            "truncation degree {n} outside 1..={}",
            g.n_max()
        )));
    }
    let y = prec.lift(y);
    let y_abs = to_f64(&y).abs();
    if y_abs >= 1.0 {
        return Err(Error::Domain(format!("|y| = {y_abs} must be < 1")));
    }
    let mut value = prec.zero();
    let mut power = prec.one();
    let mut last_term = prec.one();
    for k in 0..=n {
        last_term = prec.uint(g.get(k)) * &power;
        value += &last_term;
        power *= &y;
    }
    let growth = (n.saturating_sub(8)..n)
        .filter(|&k| *g.get(k) != UBig::ZERO)
        .map(|k| to_f64(&(prec.uint(g.get(k + 1)) / prec.uint(g.get(k)))))
        .fold(0.0f64, f64::max);
    let growth = if growth == 0.0 && *g.get(n) != UBig::ZERO { 1.0 } else { growth };
    let ratio = y_abs * growth;
    let divergence_warning = ratio >= 1.0;
    let tail_estimate = if divergence_warning {
        None
    } else {
        let t = prec.from_f64(y_abs) * prec.from_f64(growth);
        let abs_last = if last_term < prec.zero() { -last_term } else { last_term };
        Some(abs_last * &t / (prec.one() - &t))
    };
    Ok(ZetaValue {
        value,
        tail_estimate,
        growth,
        divergence_warning,
    })
}

/// Normalized analysis-mode inversion: given `g(n) = G(n)/q^n` (with
/// `g(0) = 1`), returns `lambda_n = n P(n)/q^n` for `n = 1..=n_max`.
///
/// Works with `b(n) = a(n)/q^n`, which satisfies `n g(n) = sum_m b(m) g(n-m)`,
/// then Möbius-inverts `b(n) = sum_{d | n} lambda_d q^(d-n)`.
pub fn lambda_from_normalized(q: &Real, g_norm: &[Real], prec: Precision) -> Vec<Real> {
    let n_max = g_norm.len().saturating_sub(1);
    let mut b = vec![prec.zero(); n_max + 1];
    for n in 1..=n_max {
        let mut bn = prec.int(n as i64) * &g_norm[n];
        for m in 1..n {
            bn -= &b[m] * &g_norm[n - m];
        }
        b[n] = bn;
    }
    mobius_invert_b(q, &b, prec)
}

/// Normalized analysis-mode forward transform: `g(n)` from `lambda_n`.
pub fn normalized_from_lambda(q: &Real, lambda: &[Real], prec: Precision) -> Vec<Real> {
    let n_max = lambda.len();
    let q = prec.lift(q);
    let inv_q = prec.one() / &q;
    let inv_powers = powers(&inv_q, n_max, prec);
    let mut b = vec![prec.zero(); n_max + 1];
    for d in 1..=n_max {
        for m in (d..=n_max).step_by(d) {
            b[m] += &lambda[d - 1] * &inv_powers[m - d];
        }
    }
    let mut g = vec![prec.one()];
    for n in 1..=n_max {
        let mut sum = prec.zero();
        for m in 1..=n {
            sum += &b[m] * &g[n - m];
        }
        g.push(sum / prec.int(n as i64));
    }
    g
}

fn mobius_invert_b(q: &Real, b: &[Real], prec: Precision) -> Vec<Real> {
    let n_max = b.len() - 1;
    let mu = mobius_table(n_max);
    let q = prec.lift(q);
    let inv_q = prec.one() / &q;
    let inv_powers = powers(&inv_q, n_max, prec);
    let mut lambda = vec![prec.zero(); n_max];
    for d in 1..=n_max {
        for n in (d..=n_max).step_by(d) {
            // lambda_n = sum_{d | n} mu(n/d) b(d) q^(d-n)
            match mu[n / d] {
                1 => lambda[n - 1] += &b[d] * &inv_powers[n - d],
                -1 => lambda[n - 1] -= &b[d] * &inv_powers[n - d],
                _ => {}
            }
        }
    }
    lambda
}

fn powers(x: &Real, n: usize, prec: Precision) -> Vec<Real> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = prec.one();
    for _ in 0..=n {
        out.push(p.clone());
        p *= x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(values: &[u64]) -> Vec<UBig> {
        values.iter().map(|&v| UBig::from(v)).collect()
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
        assert!(mobius(0).is_err());
        let table = mobius_table(200);
        for n in 1..=200u64 {
            assert_eq!(table[n as usize], mobius(n).unwrap(), "n = {n}");
        }
    }

    /// Exhaustive irreducibility test over F_q: a monic polynomial of degree n
    /// is irreducible iff it is not a product of two monic polynomials of
    /// positive degree.
    fn irreducible_counts_by_enumeration(q: u64, n_max: usize) -> Vec<u64> {
        fn mul(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
            let mut out = vec![0; a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    out[i + j] = (out[i + j] + x * y) % q;
                }
            }
            out
        }
        fn monic(q: u64, deg: usize) -> Vec<Vec<u64>> {
            let mut all = vec![vec![1u64]];
            for _ in 0..deg {
                all = all
                    .into_iter()
                    .flat_map(|tail| {
                        (0..q).map(move |c| {
                            let mut v = vec![c];
                            v.extend_from_slice(&tail);
                            v
                        })
                    })
                    .collect();
            }
            all
        }
        let mut reducible = std::collections::HashSet::new();
        for d1 in 1..n_max {
            for d2 in d1..=n_max - d1 {
                for a in monic(q, d1) {
                    for b in monic(q, d2) {
                        reducible.insert(mul(&a, &b, q));
                    }
                }
            }
        }
        (1..=n_max)
            .map(|n| monic(q, n).into_iter().filter(|f| !reducible.contains(f)).count() as u64)
            .collect()
    }

    #[test]
    fn necklace_counts_match_enumeration() {
        let p = poly_generator_counts(2, 4).unwrap();
        assert_eq!(p.values(), u(&[2, 1, 2, 3]).as_slice());
        assert_eq!(irreducible_counts_by_enumeration(2, 6), {
            let p = poly_generator_counts(2, 6).unwrap();
            p.values().iter().map(|v| u64::try_from(v).unwrap()).collect::<Vec<_>>()
        });
        let p3 = poly_generator_counts(3, 3).unwrap();
        assert_eq!(*p3.get(2), UBig::from(3u8));
        assert_eq!(
            irreducible_counts_by_enumeration(3, 3),
            vec![3, 3, 8]
        );
    }

    #[test]
    fn necklace_degree_twelve() {
        // brute divisor sum: (4096 - 64 - 16 + 4) / 12
        let p = poly_generator_counts(2, 12).unwrap();
        assert_eq!(*p.get(12), UBig::from(335u32));
        assert_eq!((4096 - 64 - 16 + 4) / 12, 335);
    }

    #[test]
    fn poly_counts_reject_small_q() {
        assert!(poly_generator_counts(1, 4).is_err());
        assert!(poly_generator_counts(2, 0).is_err());
    }

    #[test]
    fn count_elements_examples() {
        let g = count_elements(&poly_generator_counts(2, 8).unwrap());
        assert_eq!(g.values(), u(&[1, 2, 4, 8, 16, 32, 64, 128, 256]).as_slice());

        let one = GeneratorCounts::from_u64(&[1, 0, 0, 0, 0, 0]).unwrap();
        assert!(count_elements(&one).values().iter().all(|v| *v == UBig::ONE));

        let two = GeneratorCounts::from_u64(&[2, 0, 0, 0, 0, 0, 0]).unwrap();
        let g = count_elements(&two);
        for n in 0..=7 {
            assert_eq!(*g.get(n), UBig::from(n as u64 + 1));
        }
    }

    #[test]
    fn recover_examples() {
        let g = ElementCounts::from_u64(&[1, 2, 4, 8, 16]).unwrap();
        assert_eq!(recover_generators(&g).unwrap().values(), u(&[2, 1, 2, 3]).as_slice());

        let ones = ElementCounts::from_u64(&[1; 10]).unwrap();
        let p = recover_generators(&ones).unwrap();
        assert_eq!(*p.get(1), UBig::ONE);
        assert!((2..=9).all(|k| *p.get(k) == UBig::ZERO));

        let bad = ElementCounts::from_u64(&[1, 1, 0]).unwrap();
        match recover_generators(&bad) {
            Err(Error::NotASemigroup { degree: 2, .. }) => {}
            other => panic!("expected NotASemigroup at degree 2, got {other:?}"),
        }
    }

    #[test]
    fn recovery_rejects_too_few_squares() {
        // P(1) = 2 already yields three elements of degree 2
        let g = ElementCounts::from_u64(&[1, 2, 2]).unwrap();
        assert!(matches!(
            recover_generators(&g),
            Err(Error::NotASemigroup { degree: 2, .. })
        ));
    }

    #[test]
    fn element_counts_require_identity() {
        assert!(ElementCounts::from_u64(&[2, 1]).is_err());
        assert!(ElementCounts::from_u64(&[1]).is_err());
        assert!(ElementCounts::from_signed(vec![IBig::ONE, IBig::from(-1)]).is_err());
        assert!(GeneratorCounts::from_signed(vec![IBig::from(-3)]).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let two = GeneratorCounts::from_u64(&[2]).unwrap();
        assert_eq!(*brute_force_elements(&two, 3).unwrap().get(3), UBig::from(4u8));

        let p = GeneratorCounts::from_u64(&[2, 1, 2]).unwrap();
        let brute = brute_force_elements(&p, 3).unwrap();
        assert_eq!(*brute.get(3), UBig::from(8u8));
        assert_eq!(brute, count_elements(&p));

        let zero = GeneratorCounts::zero(5).unwrap();
        let g = brute_force_elements(&zero, 5).unwrap();
        assert_eq!(g.values(), u(&[1, 0, 0, 0, 0, 0]).as_slice());
    }

    #[test]
    fn brute_force_guards() {
        let p = GeneratorCounts::from_u64(&[1]).unwrap();
        assert!(matches!(brute_force_elements(&p, 17), Err(Error::ResourceGuard(_))));
        let many = GeneratorCounts::from_u64(&[40, 30]).unwrap();
        assert!(matches!(brute_force_elements(&many, 4), Err(Error::ResourceGuard(_))));
    }

    #[test]
    fn degree_identity_examples() {
        let p = poly_generator_counts(2, 3).unwrap();
        let g = ElementCounts::geometric(&UBig::from(2u8), 3).unwrap();
        // 3*8 = 2*(4+2+1) + 2*2 + 6*1
        assert_eq!(3 * 8, 2 * (4 + 2 + 1) + 2 * 2 + 6);
        assert!(exact_degree_identity_check(&p, &g, 3));

        let p = GeneratorCounts::from_u64(&[3, 1, 0, 4, 2, 0, 1]).unwrap();
        let g = count_elements(&p);
        assert!((1..=7).all(|n| exact_degree_identity_check(&p, &g, n)));
        let tampered = g.with_entry(5, g.get(5) + UBig::ONE);
        assert!(!exact_degree_identity_check(&p, &tampered, 5));
    }

    #[test]
    fn zeta_examples() {
        let prec = Precision::DEFAULT;
        let g2 = ElementCounts::geometric(&UBig::from(2u8), 200).unwrap();
        let z = zeta_truncated(&g2, &prec.parse("0.25").unwrap(), 200, prec).unwrap();
        assert!((to_f64(&z.value) - 2.0).abs() < 1e-30);
        assert!(!z.divergence_warning);

        let ones = ElementCounts::from_u64(&[1; 21]).unwrap();
        let z = zeta_truncated(&ones, &prec.parse("0.5").unwrap(), 20, prec).unwrap();
        assert!((to_f64(&z.value) - (2.0 - 0.5f64.powi(20))).abs() < 1e-15);
        let tail = to_f64(z.tail_estimate.as_ref().unwrap());
        assert!((tail - 0.5f64.powi(20)).abs() < 1e-15);

        let z = zeta_truncated(&g2, &prec.parse("0.5").unwrap(), 100, prec).unwrap();
        assert!(z.divergence_warning);
        assert!(z.tail_estimate.is_none());

        assert!(zeta_truncated(&g2, &prec.one(), 10, prec).is_err());
    }

    #[test]
    fn normalized_transforms_match_exact() {
        let prec = Precision::DEFAULT;
        let p = GeneratorCounts::from_u64(&[3, 1, 4, 1, 5, 9, 2, 6]).unwrap();
        let g = count_elements(&p);
        let q = prec.int(3);
        let g_norm: Vec<Real> = (0..=8)
            .map(|n| prec.uint(g.get(n)) / prec.int(3i64.pow(n as u32)))
            .collect();
        let lambda = lambda_from_normalized(&q, &g_norm, prec);
        for k in 1..=8 {
            let exact = k as f64 * u64::try_from(p.get(k)).unwrap() as f64 / 3f64.powi(k as i32);
            assert!((to_f64(&lambda[k - 1]) - exact).abs() < 1e-25, "k = {k}");
        }
        let back = normalized_from_lambda(&q, &lambda, prec);
        for n in 0..=8 {
            assert!((to_f64(&back[n]) - to_f64(&g_norm[n])).abs() < 1e-25);
        }
    }
}
