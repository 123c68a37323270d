//! Euler's constant by the Brent–McMillan Bessel-function series.

use dashu_int::IBig;

use crate::error::{Error, Result};
use crate::real::{Precision, Real};

const GUARD_BITS: usize = 64;

/// Euler's constant at `prec`, which must carry at least 64 bits.
///
/// With `n ~ p ln 2 / 4`, `U/V` with `U = sum A_k`, `V = sum B_k`,
/// `B_k = (n^k/k!)^2`, `A_k = B_k (H_k - ln n)` differs from gamma by
/// about `pi e^(-4n)`.
pub fn euler_gamma(prec: Precision) -> Result<Real> {
    if prec.bits() < 64 {
        return Err(Error::InvalidInput(format!(
            "euler_gamma needs at least 64 bits, got {}",
            prec.bits()
        )));
    }
    let work = prec.widen(GUARD_BITS);
    let n = (prec.bits() as f64 * std::f64::consts::LN_2 / 4.0).ceil() as u64 + 2;
    let terms = (3.6 * n as f64).ceil() as u64 + 16;
    let n2 = work.int(IBig::from(n) * IBig::from(n));
    let mut a = -work.int(n as i64).ln();
    let mut b = work.one();
    let mut u = a.clone();
    let mut v = b.clone();
    for k in 1..=terms {
        let kr = work.int(k as i64);
        b = &b * &n2 / (&kr * &kr);
        a = (&a * &n2 / &kr + &b) / &kr;
        u += &a;
        v += &b;
    }
    Ok(prec.lift(&(u / v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::to_f64;
    use dashu_ratio::RBig;

    /// `H_n - ln n - 1/(2n) + sum B_2k/(2k n^2k)`, Bernoulli terms to B_20.
    fn euler_maclaurin(n: u64, prec: Precision) -> Real {
        let bernoulli: [(i64, u64); 10] = [
            (1, 6),
            (-1, 30),
            (1, 42),
            (-1, 30),
            (5, 66),
            (-691, 2730),
            (7, 6),
            (-3617, 510),
            (43867, 798),
            (-174611, 330),
        ];
        let mut harmonic = RBig::ZERO;
        for k in 1..=n {
            harmonic += RBig::from_parts(1.into(), k.into());
        }
        let mut correction = -RBig::from_parts(1.into(), (2 * n).into());
        let n2 = RBig::from(n * n);
        let mut power = n2.clone();
        for (i, (num, den)) in bernoulli.iter().enumerate() {
            let k = 2 * (i as u64 + 1);
            correction += RBig::from_parts((*num).into(), (den * k).into()) / &power;
            power *= &n2;
        }
        prec.rational(&(harmonic + correction)) - prec.int(n as i64).ln()
    }

    #[test]
    fn matches_limit_oracle() {
        let prec = Precision::new(192).unwrap();
        let gamma = euler_gamma(prec).unwrap();
        let oracle = euler_maclaurin(1000, prec);
        let diff = to_f64(&(gamma - oracle)).abs();
        assert!(diff < 1e-30, "{diff:e}");
    }

    #[test]
    fn leading_digits_and_refinement() {
        let g128 = euler_gamma(Precision::DEFAULT).unwrap();
        let text = crate::real::format_real(&g128, 19);
        assert!(text.starts_with("0.577215664901532860"), "{text}");
        let g64 = euler_gamma(Precision::new(64).unwrap()).unwrap();
        assert!(to_f64(&(g64 - &g128)).abs() < 1e-18);
        let g = to_f64(&g128);
        assert!(g > 0.577 && g < 0.578);
        assert!(euler_gamma(Precision::new(32).unwrap()).is_err());
    }

    #[test]
    fn high_precision_is_consistent() {
        let hi = euler_gamma(Precision::new(1024).unwrap()).unwrap();
        let lo = euler_gamma(Precision::new(256).unwrap()).unwrap();
        assert!(to_f64(&(hi - lo)).abs() < 1e-75);
    }
}
