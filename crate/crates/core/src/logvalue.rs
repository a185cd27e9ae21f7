//! Nonnegative reals carried by their natural logarithm, and a compensated
//! accumulator that stays exact for integer-valued sums in the ordinary
//! floating range and rescales itself only when a term would overflow.

use std::fmt;
use std::ops::{Div, Mul};

/// A nonnegative real stored as `ln(value)`; zero is `ln = -inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogValue {
    ln: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogValue = LogValue { ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan(), "NaN logarithm");
        LogValue { ln }
    }

    /// Panics in debug builds on negative or NaN input.
    pub fn from_value(v: f64) -> Self {
        debug_assert!(v >= 0.0, "LogValue::from_value({v})");
        LogValue { ln: v.ln() }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// The linear value; `inf` when it exceeds the floating range.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn powf(self, e: f64) -> Self {
        if self.is_zero() {
            return if e == 0.0 { Self::ONE } else { Self::ZERO };
        }
        LogValue { ln: self.ln * e }
    }

    /// `log(exp(a) + exp(b))` without leaving the log domain.
    pub fn add(self, other: Self) -> Self {
        let (hi, lo) = if self.ln >= other.ln {
            (self.ln, other.ln)
        } else {
            (other.ln, self.ln)
        };
        if lo == f64::NEG_INFINITY {
            return LogValue { ln: hi };
        }
        LogValue {
            ln: hi + (lo - hi).exp().ln_1p(),
        }
    }

    /// `self / other` as a plain ratio, computed from the logarithms.
    pub fn ratio(self, other: Self) -> f64 {
        (self.ln - other.ln).exp()
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            return LogValue::ZERO;
        }
        LogValue {
            ln: self.ln + rhs.ln,
        }
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        if self.is_zero() {
            return LogValue::ZERO;
        }
        LogValue {
            ln: self.ln - rhs.ln,
        }
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

// Terms up to e^LN_HEADROOM are added without rescaling.
const LN_HEADROOM: f64 = 600.0;

/// Neumaier-compensated sum of nonnegative terms, held as
/// `exp(scale) * (sum + comp)`.
#[derive(Clone, Debug)]
pub struct LogSum {
    scale: f64,
    sum: f64,
    comp: f64,
    terms: u64,
}

impl Default for LogSum {
    fn default() -> Self {
        LogSum {
            scale: 0.0,
            sum: 0.0,
            comp: 0.0,
            terms: 0,
        }
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    pub fn add_value(&mut self, v: f64) {
        debug_assert!(v >= 0.0 && !v.is_nan(), "LogSum::add_value({v})");
        if v == 0.0 {
            self.terms += 1;
            return;
        }
        if v.is_finite() && self.scale == 0.0 {
            self.push_scaled(v);
        } else {
            self.add_ln(v.ln());
            return;
        }
        self.terms += 1;
    }

    pub fn add_ln(&mut self, ln: f64) {
        self.terms += 1;
        if ln == f64::NEG_INFINITY {
            return;
        }
        if ln > self.scale + LN_HEADROOM {
            let new_scale = ln - LN_HEADROOM;
            let shrink = (self.scale - new_scale).exp();
            self.sum *= shrink;
            self.comp *= shrink;
            self.scale = new_scale;
        }
        self.push_scaled((ln - self.scale).exp());
    }

    pub fn add_log_value(&mut self, v: LogValue) {
        self.add_ln(v.ln());
    }

    fn push_scaled(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> LogValue {
        let s = self.sum + self.comp;
        if s <= 0.0 {
            return LogValue::ZERO;
        }
        LogValue::from_ln(self.scale + s.ln())
    }
}
