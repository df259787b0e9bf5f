//! Exact fixed-point weights.
//!
//! Similarity weights are read as decimals with at most nine fractional
//! digits and stored as an integer count of `10^-9` units. Every objective in
//! this crate is a sum of weights multiplied by leaf counts, so all of them
//! stay exact in this representation and theorem-style inequalities such as
//! `R(X) >= OPT / 2` can be compared without tolerances (compare `2 * R(X)`
//! against `OPT`).

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub, SubAssign};
use std::str::FromStr;

/// Number of fractional decimal digits kept exactly.
pub const FRACTION_DIGITS: u32 = 9;
const SCALE: i128 = 1_000_000_000;

/// A nonnegative (for inputs) exact decimal quantity.
///
/// The same type carries edge weights and objective values (weight times a
/// leaf count), which keeps revenue, cost and bound comparisons exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(i128);

impl Weight {
    pub const ZERO: Weight = Weight(0);

    /// Weight equal to the integer `v`.
    pub fn from_int(v: i64) -> Self {
        Weight(v as i128 * SCALE)
    }

    /// Weight from a raw count of `10^-9` units.
    pub fn from_nanos(nanos: i128) -> Self {
        Weight(nanos)
    }

    pub fn nanos(self) -> i128 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    /// Multiplies by an integer factor (typically a leaf count).
    pub fn times(self, k: i64) -> Self {
        Weight(self.0 * k as i128)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    /// `self / other` as a float; `None` when `other` is zero.
    pub fn ratio(self, other: Weight) -> Option<f64> {
        if other.0 == 0 {
            None
        } else {
            Some(self.0 as f64 / other.0 as f64)
        }
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        self.0 += rhs.0;
    }
}

impl Sub for Weight {
    type Output = Weight;
    fn sub(self, rhs: Weight) -> Weight {
        Weight(self.0 - rhs.0)
    }
}

impl SubAssign for Weight {
    fn sub_assign(&mut self, rhs: Weight) {
        self.0 -= rhs.0;
    }
}

impl Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Weight> for Weight {
    fn sum<I: Iterator<Item = &'a Weight>>(iter: I) -> Weight {
        iter.copied().sum()
    }
}

impl fmt::Display for Weight {
    /// Shortest exact decimal: `3`, `0.5`, `-1.25`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let int = abs / SCALE as u128;
        let frac = abs % SCALE as u128;
        if frac == 0 {
            write!(f, "{sign}{int}")
        } else {
            let digits = format!("{frac:09}");
            write!(f, "{sign}{int}.{}", digits.trim_end_matches('0'))
        }
    }
}

/// Reasons a decimal weight literal is rejected.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WeightParseError {
    #[error("empty weight")]
    Empty,
    #[error("invalid decimal `{0}`")]
    Invalid(String),
    #[error("more than {FRACTION_DIGITS} fractional digits in `{0}`")]
    TooPrecise(String),
    #[error("weight `{0}` out of range")]
    Overflow(String),
}

impl FromStr for Weight {
    type Err = WeightParseError;

    /// Parses `[-+]?digits[.digits]`. The sign is accepted so that callers
    /// can report negative weights as a contract violation rather than a
    /// syntax error.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(WeightParseError::Empty);
        }
        let (negative, body) = match s.as_bytes()[0] {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((a, b)) => (a, b),
            None => (body, ""),
        };
        let all_digits = |p: &str| p.bytes().all(|c| c.is_ascii_digit());
        if (int_part.is_empty() && frac_part.is_empty())
            || !all_digits(int_part)
            || !all_digits(frac_part)
            || (body.contains('.') && frac_part.is_empty())
        {
            return Err(WeightParseError::Invalid(s.to_string()));
        }
        if frac_part.len() > FRACTION_DIGITS as usize {
            return Err(WeightParseError::TooPrecise(s.to_string()));
        }
        let overflow = || WeightParseError::Overflow(s.to_string());
        let int: i128 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| overflow())?
        };
        let mut frac: i128 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| overflow())?
        };
        for _ in frac_part.len()..FRACTION_DIGITS as usize {
            frac *= 10;
        }
        let nanos = int
            .checked_mul(SCALE)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(overflow)?;
        Ok(Weight(if negative { -nanos } else { nanos }))
    }
}
