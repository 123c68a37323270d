//! Working-precision reals.
//!
//! Every analysis quantity is a binary float with a fixed significand size
//! (default 128 bits). Values that come from exact integer data are formed as
//! exact rationals and rounded once at the working precision.

use std::fmt;
use std::str::FromStr;

use dashu_float::round::mode::HalfEven;
use dashu_float::{Context, FBig};
use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary float used for all analysis quantities.
pub type Real = FBig<HalfEven>;

/// Working significand size in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Precision(usize);

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

impl Precision {
    pub const DEFAULT: Precision = Precision(128);
    pub const MIN_BITS: usize = 24;
    pub const MAX_BITS: usize = 1 << 16;

    pub fn new(bits: usize) -> Result<Self> {
        if !(Self::MIN_BITS..=Self::MAX_BITS).contains(&bits) {
            return Err(Error::InvalidInput(format!(
                "precision must lie in [{}, {}] bits, got {bits}",
                Self::MIN_BITS,
                Self::MAX_BITS
            )));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> usize {
        self.0
    }

    /// The same precision widened by `extra` guard bits.
    pub fn widen(self, extra: usize) -> Precision {
        Precision(self.0 + extra)
    }

    pub fn context(self) -> Context<HalfEven> {
        Context::new(self.0)
    }

    /// Relative size of one unit in the last place, 2^(1-bits).
    pub fn ulp(self) -> f64 {
        2f64.powi(1 - self.0 as i32)
    }

    pub fn zero(self) -> Real {
        Real::ZERO.with_precision(self.0).value()
    }

    pub fn one(self) -> Real {
        Real::ONE.with_precision(self.0).value()
    }

    /// Re-rounds `x` to this precision.
    pub fn lift(self, x: &Real) -> Real {
        x.clone().with_precision(self.0).value()
    }

    pub fn int(self, n: impl Into<IBig>) -> Real {
        Real::from(n.into()).with_precision(self.0).value()
    }

    pub fn uint(self, n: &UBig) -> Real {
        Real::from(IBig::from(n.clone())).with_precision(self.0).value()
    }

    /// `num / den` rounded once.
    pub fn ratio(self, num: &IBig, den: &UBig) -> Real {
        assert!(*den != UBig::ZERO, "ratio with zero denominator");
        let n = Real::from(num.clone());
        let d = Real::from(IBig::from(den.clone()));
        self.context()
            .div(n.repr(), d.repr())
            .expect("division by non-zero exact operand")
            .value()
    }

    pub fn rational(self, r: &RBig) -> Real {
        self.ratio(r.numerator(), r.denominator())
    }

    /// Exact binary value of a finite `f64`, at this precision.
    pub fn from_f64(self, x: f64) -> Real {
        Real::try_from(x)
            .expect("finite f64")
            .with_precision(self.0)
            .value()
    }

    pub fn parse(self, text: &str) -> Result<Real> {
        Ok(self.rational(&parse_rational(text)?))
    }

    /// `x^a` for `x > 0`, evaluated as `exp(a ln x)`.
    pub fn powf(self, x: &Real, a: &Real) -> Real {
        let x = self.lift(x);
        (self.lift(a) * x.ln()).exp()
    }

    /// `x^n` by exact repeated squaring of the (already rounded) base.
    pub fn powi(self, x: &Real, n: usize) -> Real {
        self.lift(x).powi(IBig::from(n))
    }
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

/// A real value with an absolute error bound.
#[derive(Clone, Debug)]
pub struct Bounded {
    pub value: Real,
    pub bound: f64,
}

impl Bounded {
    pub fn new(value: Real, bound: f64) -> Self {
        Self { value, bound }
    }

    pub fn exact(value: Real) -> Self {
        Self { value, bound: 0.0 }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.value)
    }
}

/// Parses an exact rational from `a`, `a.b`, `a.be±k`, or `a/b`.
pub fn parse_rational(text: &str) -> Result<RBig> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a number: {text:?}"));
    if text.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = text.split_once('/') {
        let num = IBig::from_str(num.trim()).map_err(|_| bad())?;
        let den = UBig::from_str(den.trim()).map_err(|_| bad())?;
        if den == UBig::ZERO {
            return Err(bad());
        }
        return Ok(RBig::from_parts(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (
            &text[..pos],
            text[pos + 1..].parse::<i64>().map_err(|_| bad())?,
        ),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numerator = IBig::from(UBig::from_str(&all_digits).map_err(|_| bad())?);
    if negative {
        numerator = -numerator;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = UBig::from(10u8);
    if scale >= 0 {
        numerator *= IBig::from(ten.pow(scale as usize));
        Ok(RBig::from(numerator))
    } else {
        Ok(RBig::from_parts(numerator, ten.pow((-scale) as usize)))
    }
}

/// Decimal rendering with `digits` significant digits.
///
/// Plain notation for decimal exponents in [-7, 21), scientific otherwise;
/// either form is a valid JSON number.
pub fn format_real(x: &Real, digits: usize) -> String {
    let digits = digits.max(1);
    let decimal = x.to_decimal().value().with_precision(digits).value();
    let repr = decimal.repr();
    let mut significand = repr.significand().clone();
    let mut exponent = repr.exponent() as i64;
    if significand == IBig::ZERO {
        return "0".to_string();
    }
    let ten = IBig::from(10);
    while (&significand % &ten) == IBig::ZERO {
        significand /= &ten;
        exponent += 1;
    }
    let negative = significand < IBig::ZERO;
    let body = if negative {
        (-significand).to_string()
    } else {
        significand.to_string()
    };
    let len = body.len() as i64;
    let adjusted = exponent + len - 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-7..21).contains(&adjusted) {
        if exponent >= 0 {
            out.push_str(&body);
            out.extend(std::iter::repeat_n('0', exponent as usize));
        } else if len > -exponent {
            let split = (len + exponent) as usize;
            out.push_str(&body[..split]);
            out.push('.');
            out.push_str(&body[split..]);
        } else {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exponent - len) as usize));
            out.push_str(&body);
        }
    } else {
        out.push_str(&body[..1]);
        if len > 1 {
            out.push('.');
            out.push_str(&body[1..]);
        }
        out.push('e');
        out.push_str(&adjusted.to_string());
    }
    out
}
