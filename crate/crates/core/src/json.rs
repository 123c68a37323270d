//! JSON helpers: reals are emitted as bare JSON numbers with a fixed number of
//! significant digits, so reports are byte-deterministic.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::real::{format_real, Bounded, Real};

/// A decimal JSON number kept verbatim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Num(String);

impl Num {
    pub fn real(x: &Real, digits: usize) -> Self {
        Num(format_real(x, digits))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(self.0.clone()).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

/// `{value, bound}` pair.
#[derive(Clone, Debug, Serialize)]
pub struct ValueBound {
    pub value: Num,
    pub bound: Option<f64>,
}

impl ValueBound {
    pub fn new(b: &Bounded, digits: usize) -> Self {
        Self {
            value: Num::real(&b.value, digits),
            bound: b.bound.is_finite().then_some(b.bound),
        }
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types serialize");
    out.push('\n');
    out
}
