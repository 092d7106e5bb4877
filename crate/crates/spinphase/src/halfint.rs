//! Exact half-integer arithmetic.
//!
//! Spin magnitudes and magnetic quantum numbers live on the lattice `ℤ/2`.
//! Storing the doubled value as an integer keeps every comparison and parity
//! check exact; nothing here ever touches floating point except the final
//! [`HalfInt::value`] conversion.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

/// Error raised when text does not denote an exact half-integer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not an exact half-integer: {0:?} (accepted forms: \"2\", \"-1\", \"3/2\", \"-5/2\")")]
pub struct ParseHalfIntError(pub String);

/// An exact half-integer `n/2`, stored as the doubled value `n`.
///
/// Used for spin magnitudes `J` (non-negative) and projections `m` (signed).
/// `PartialOrd`/`Ord` follow the numeric order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    two: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { two: 0 };
    pub const HALF: HalfInt = HalfInt { two: 1 };
    pub const ONE: HalfInt = HalfInt { two: 2 };

    /// Builds from the doubled value: `from_doubled(3)` is `3/2`.
    pub const fn from_doubled(two: i32) -> Self {
        HalfInt { two }
    }

    /// Builds from a whole integer.
    pub const fn from_int(n: i32) -> Self {
        HalfInt { two: 2 * n }
    }

    /// The doubled value `2x`, always an exact integer.
    pub const fn doubled(self) -> i32 {
        self.two
    }

    /// Numeric value as `f64` (exact: halves are representable).
    pub fn value(self) -> f64 {
        f64::from(self.two) / 2.0
    }

    /// Whether the value is a whole integer rather than an odd half.
    pub const fn is_integer(self) -> bool {
        self.two % 2 == 0
    }

    /// Whether the value can serve as a spin magnitude (`x ≥ 0`).
    pub const fn is_valid_spin(self) -> bool {
        self.two >= 0
    }

    /// Hilbert-space dimension `2x + 1` for a spin magnitude.
    ///
    /// # Panics
    /// If the value is negative.
    pub fn dim(self) -> usize {
        assert!(self.is_valid_spin(), "dimension of a negative half-integer");
        self.two as usize + 1
    }

    /// Whether `m` is an admissible projection for spin `self`:
    /// `|m| ≤ J` and `J - m` integer.
    pub fn admits_projection(self, m: HalfInt) -> bool {
        m.two.abs() <= self.two && (self.two - m.two) % 2 == 0
    }

    /// Projection value of basis row `index` when rows are ordered
    /// `m = J, J-1, …, -J` (row 0 is the highest weight).
    pub fn projection_at(self, index: usize) -> HalfInt {
        debug_assert!(index < self.dim());
        HalfInt::from_doubled(self.two - 2 * index as i32)
    }

    /// Basis row index of projection `m` under the same ordering.
    pub fn index_of(self, m: HalfInt) -> usize {
        debug_assert!(self.admits_projection(m));
        ((self.two - m.two) / 2) as usize
    }

    pub fn abs(self) -> HalfInt {
        HalfInt { two: self.two.abs() }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { two: self.two + rhs.two }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { two: self.two - rhs.two }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { two: -self.two }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two % 2 == 0 {
            write!(f, "{}", self.two / 2)
        } else {
            write!(f, "{}/2", self.two)
        }
    }
}

impl FromStr for HalfInt {
    type Err = ParseHalfIntError;

    /// Accepts only exact forms: an integer (`"2"`, `"-1"`) or explicit
    /// halves (`"3/2"`, `"-5/2"`).  Floats are rejected on purpose so that a
    /// config file can never silently round a spin label.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ParseHalfIntError(s.to_string());
        if let Some(num) = t.strip_suffix("/2") {
            let n: i32 = num.trim().parse().map_err(|_| err())?;
            Ok(HalfInt::from_doubled(n))
        } else {
            let n: i32 = t.parse().map_err(|_| err())?;
            Ok(HalfInt::from_int(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubled_roundtrip_and_value() {
        let j = HalfInt::from_doubled(3);
        assert_eq!(j.doubled(), 3);
        assert_eq!(j.value(), 1.5);
        assert!(!j.is_integer());
        assert_eq!(j.dim(), 4);
        assert_eq!(HalfInt::from_int(2).dim(), 5);
    }

    #[test]
    fn projection_ordering_is_descending() {
        let j = HalfInt::from_doubled(3); // J = 3/2
        let ms: Vec<i32> = (0..j.dim()).map(|i| j.projection_at(i).doubled()).collect();
        assert_eq!(ms, vec![3, 1, -1, -3]);
        for i in 0..j.dim() {
            assert_eq!(j.index_of(j.projection_at(i)), i);
        }
    }

    #[test]
    fn projection_admissibility() {
        let j = HalfInt::from_int(1);
        assert!(j.admits_projection(HalfInt::from_int(-1)));
        assert!(!j.admits_projection(HalfInt::from_int(2)));
        // parity mismatch: m = 1/2 for integer J
        assert!(!j.admits_projection(HalfInt::from_doubled(1)));
    }

    #[test]
    fn parses_exact_strings_only() {
        assert_eq!("1/2".parse::<HalfInt>().unwrap(), HalfInt::HALF);
        assert_eq!("-3/2".parse::<HalfInt>().unwrap(), HalfInt::from_doubled(-3));
        assert_eq!("4".parse::<HalfInt>().unwrap(), HalfInt::from_int(4));
        assert_eq!(" 2 ".parse::<HalfInt>().unwrap(), HalfInt::ONE + HalfInt::ONE);
        assert!("0.5".parse::<HalfInt>().is_err());
        assert!("3/4".parse::<HalfInt>().is_err());
        assert!("".parse::<HalfInt>().is_err());
        assert!("j".parse::<HalfInt>().is_err());
    }

    #[test]
    fn display_matches_parse() {
        for two in -7..=7 {
            let x = HalfInt::from_doubled(two);
            assert_eq!(x.to_string().parse::<HalfInt>().unwrap(), x);
        }
        assert_eq!(HalfInt::from_doubled(5).to_string(), "5/2");
        assert_eq!(HalfInt::from_int(-3).to_string(), "-3");
    }

    #[test]
    fn arithmetic() {
        let a = HalfInt::from_doubled(3);
        let b = HalfInt::HALF;
        assert_eq!(a + b, HalfInt::from_int(2));
        assert_eq!(a - b, HalfInt::ONE);
        assert_eq!((-a).doubled(), -3);
        assert_eq!(a.abs(), a);
        assert_eq!((-a).abs(), a);
    }
}
