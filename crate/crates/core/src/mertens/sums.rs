//! Prefix sums over degrees: `Lambda(n) = sum lambda_k`, the Mertens sum
//! `S(n) = sum P(k)/q^k`, the prime-power sum, and the Mertens product in
//! log space.

use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;

use crate::error::{Error, Result};
use crate::normalization::NormalizedSemigroup;
use crate::real::{Precision, Real};
use crate::semigroup::{divisor_weighted, GeneratorCounts};

const GUARD_BITS: usize = 16;

/// A partial sum of `lambda_k` and its deviation from `n`.
#[derive(Clone, Debug)]
pub struct PartialSum {
    pub sum: Real,
    pub deviation: Real,
}

/// `sum_{k<=n} lambda_k` in ascending order; `lambda[k-1] = lambda_k`.
pub fn lambda_partial_sum(lambda: &[Real], n: usize, prec: Precision) -> Result<PartialSum> {
    if n > lambda.len() {
        return Err(Error::InvalidInput(format!("n = {n} exceeds {} available terms", lambda.len())));
    }
    let sum = lambda[..n].iter().fold(prec.zero(), |acc, l| acc + l);
    let deviation = &sum - prec.int(n as i64);
    Ok(PartialSum { sum, deviation })
}

/// `ln(1 - u) = -u (1 + L(u))`; returns `L(u) = sum_{m>=2} u^(m-1)/m` for `0 <= u <= 1/2`.
pub fn log_correction(u: &Real, prec: Precision) -> Real {
    let u = prec.lift(u);
    let mut acc = prec.zero();
    let mut power = u.clone();
    let cutoff = prec.from_f64(prec.ulp() / 4.0);
    for m in 2u64.. {
        let term = &power / prec.int(m as i64);
        if term == Real::ZERO {
            break;
        }
        acc += &term;
        if term <= &acc * &cutoff {
            break;
        }
        power *= &u;
    }
    acc
}

/// `sum_{(d, j): j d <= n} P(d) q^(-j d) / j` as an exact rational, summed over
/// degrees `d` and multiplicities `j` directly.
pub fn prime_power_sum_exact(p: &GeneratorCounts, q: u64, n: usize) -> Result<RBig> {
    if n > p.n_max() {
        return Err(Error::InvalidInput(format!("n = {n} exceeds n_max = {}", p.n_max())));
    }
    let base = UBig::from(q);
    let mut sum = RBig::ZERO;
    for d in 1..=n {
        let pd = p.get(d);
        if *pd == UBig::ZERO {
            continue;
        }
        let step = base.pow(d);
        let mut power = step.clone();
        for j in 1..=n / d {
            sum += RBig::from_parts(IBig::from(pd.clone()), &power * UBig::from(j));
            power *= &step;
        }
    }
    Ok(sum)
}

/// Natural log, exp and reciprocal forms of `prod_{k<=n} (1 - q^-k)^P(k)`.
#[derive(Clone, Debug)]
pub struct ProductValue {
    pub log_product: Real,
    pub product: Real,
    /// `n * product`, which tends to `C_2`.
    pub n_product: Real,
    /// `1 / (n * product)`, which tends to `A e^gamma`.
    pub reciprocal: Real,
}

/// Prefix tables indexed by degree `n = 0..=n_max`.
#[derive(Clone, Debug)]
pub struct MertensTables {
    precision: Precision,
    /// `Lambda(n) = sum_{k<=n} lambda_k`.
    pub lambda_sum: Vec<Real>,
    /// `S(n) = sum_{k<=n} P(k)/q^k`.
    pub mertens: Vec<Real>,
    /// Prime-power sum truncated at total degree `n`.
    pub prime_power: Vec<Real>,
    /// `sum_{k<=n} P(k) (-ln(1 - q^-k) - q^-k)`, the partial `C_M`.
    pub cm_partial: Vec<Real>,
}

impl MertensTables {
    pub fn new(norm: &NormalizedSemigroup) -> Self {
        let prec = norm.precision();
        let n_max = norm.n_max();
        let (lambda_sum, mertens, prime_power) = match norm.exact() {
            Some(e) => {
                // M_n = q M_{n-1} + c_n makes sum_{k<=n} c_k/q^k = M_n/q^n exactly.
                let q = UBig::from(e.q);
                let mut lam = UBig::ZERO;
                let mut mer = UBig::ZERO;
                let mut lambda_sum = vec![prec.zero()];
                let mut mertens = vec![prec.zero()];
                for n in 1..=n_max {
                    lam = &lam * &q + UBig::from(n) * e.p.get(n);
                    mer = &mer * &q + e.p.get(n);
                    lambda_sum.push(prec.ratio(&IBig::from(lam.clone()), &e.q_powers[n]));
                    mertens.push(prec.ratio(&IBig::from(mer.clone()), &e.q_powers[n]));
                }
                let a = divisor_weighted(&e.p, n_max);
                let mut prime_power = vec![prec.zero()];
                let mut acc = prec.zero();
                for m in 1..=n_max {
                    acc += prec.ratio(&IBig::from(a[m].clone()), &(UBig::from(m) * &e.q_powers[m]));
                    prime_power.push(acc.clone());
                }
                (lambda_sum, mertens, prime_power)
            }
            None => {
                let cumulative = |terms: &[Real]| {
                    let mut out = Vec::with_capacity(terms.len() + 1);
                    let mut acc = prec.zero();
                    out.push(acc.clone());
                    for t in terms {
                        acc += t;
                        out.push(acc.clone());
                    }
                    out
                };
                let lambda_sum = cumulative(norm.lambda());
                let mertens = cumulative(norm.weights());
                // a(m)/q^m = sum_{d | m} lambda_d q^(d - m)
                let inv = norm.inv_q_powers();
                let mut increments = vec![prec.zero(); n_max];
                for d in 1..=n_max {
                    let ld = &norm.lambda()[d - 1];
                    for m in (d..=n_max).step_by(d) {
                        increments[m - 1] += ld * &inv[m - d];
                    }
                }
                for (m, inc) in increments.iter_mut().enumerate() {
                    *inc = &*inc / prec.int(m as i64 + 1);
                }
                (lambda_sum, mertens, cumulative(&increments))
            }
        };
        let work = prec.widen(GUARD_BITS);
        let mut cm_partial = Vec::with_capacity(n_max + 1);
        let mut acc = work.zero();
        cm_partial.push(prec.zero());
        for k in 1..=n_max {
            let w = &norm.weights()[k - 1];
            if *w != Real::ZERO {
                acc += work.lift(w) * log_correction(&norm.inv_q_powers()[k], work);
            }
            cm_partial.push(prec.lift(&acc));
        }
        Self {
            precision: prec,
            lambda_sum,
            mertens,
            prime_power,
            cm_partial,
        }
    }

    pub fn n_max(&self) -> usize {
        self.mertens.len() - 1
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            return Err(Error::InvalidInput(format!("n = {n} exceeds n_max = {}", self.n_max())));
        }
        Ok(())
    }

    pub fn lambda_partial_sum(&self, n: usize) -> Result<PartialSum> {
        self.check(n)?;
        let sum = self.lambda_sum[n].clone();
        let deviation = &sum - self.precision.int(n as i64);
        Ok(PartialSum { sum, deviation })
    }

    pub fn mertens_sum(&self, n: usize) -> Result<Real> {
        self.check(n)?;
        Ok(self.mertens[n].clone())
    }

    pub fn prime_power_sum(&self, n: usize) -> Result<Real> {
        self.check(n)?;
        Ok(self.prime_power[n].clone())
    }

    /// `ln prod = -(S(n) + partial C_M(n))`, exactly as the two tables hold them.
    pub fn mertens_product(&self, n: usize) -> Result<ProductValue> {
        self.check(n)?;
        let prec = self.precision;
        let log_product = -(&self.mertens[n] + &self.cm_partial[n]);
        let product = log_product.clone().exp();
        let n_product = &product * prec.int(n.max(1) as i64);
        let reciprocal = prec.one() / &n_product;
        Ok(ProductValue {
            log_product,
            product,
            n_product,
            reciprocal,
        })
    }
}
