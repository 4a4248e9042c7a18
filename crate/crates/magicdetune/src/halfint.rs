//! Half-integer angular momentum values.
//!
//! Angular momentum quantum numbers are integers or half-odd-integers. To
//! keep arithmetic exact they are stored as twice their value, so `F = 3/2`
//! is `HalfInt { twice: 3 }`. All comparisons, sums and differences are then
//! ordinary integer operations and parity checks are exact.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// An exact integer or half-odd-integer, stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    /// Zero.
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    /// One.
    pub const ONE: HalfInt = HalfInt { twice: 2 };
    /// One half.
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    /// Three halves.
    pub const THREE_HALVES: HalfInt = HalfInt { twice: 3 };

    /// Builds a value from twice its magnitude, so `from_twice(3)` is `3/2`.
    pub const fn from_twice(twice: i32) -> HalfInt {
        HalfInt { twice }
    }

    /// Builds an integer value.
    pub const fn from_int(n: i32) -> HalfInt {
        HalfInt { twice: 2 * n }
    }

    /// Twice the stored value.
    pub const fn twice(self) -> i32 {
        self.twice
    }

    /// True when the value is a whole integer.
    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// The integer value, if the value is a whole integer.
    pub const fn as_integer(self) -> Option<i32> {
        if self.twice % 2 == 0 {
            Some(self.twice / 2)
        } else {
            None
        }
    }

    /// Absolute value.
    pub const fn abs(self) -> HalfInt {
        HalfInt { twice: self.twice.abs() }
    }

    /// The value as a floating-point number.
    pub fn to_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    /// True when `self` and `other` differ by an integer, which is the
    /// compatibility condition for a projection quantum number `m` of a
    /// momentum `j`.
    pub const fn same_parity(self, other: HalfInt) -> bool {
        (self.twice - other.twice) % 2 == 0
    }

    /// Checks that `self` is a valid angular momentum magnitude: nonnegative.
    pub fn require_momentum(self, name: &str) -> Result<()> {
        if self.twice < 0 {
            return Err(Error::InvalidArgument(format!(
                "{name} = {self} must be nonnegative"
            )));
        }
        Ok(())
    }

    /// Checks that `m` is a valid projection of the momentum `self`: the two
    /// must differ by an integer. Projections with `|m| > j` are left to the
    /// selection rules, which send them to an exact zero.
    pub fn require_projection(self, m: HalfInt, name: &str) -> Result<()> {
        if !self.same_parity(m) {
            return Err(Error::InvalidArgument(format!(
                "{name} = {m} is not an integer away from its momentum {self}"
            )));
        }
        Ok(())
    }

    /// Whether three momenta can couple: |a-b| <= c <= a+b with a+b+c an
    /// integer.
    pub const fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
        let (a, b, c) = (a.twice, b.twice, c.twice);
        let lo = if a > b { a - b } else { b - a };
        c >= lo && c <= a + b && (a + b + c) % 2 == 0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + rhs.twice }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - rhs.twice }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HalfInt({self})")
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Parses `"2"`, `"-1"`, `"3/2"` or `"-5/2"`.
    fn from_str(s: &str) -> Result<HalfInt> {
        let s = s.trim();
        let parse_i32 = |t: &str| {
            t.parse::<i32>().map_err(|_| {
                Error::InvalidArgument(format!("cannot parse `{s}` as a half-integer"))
            })
        };
        if let Some((num, den)) = s.split_once('/') {
            if den.trim() != "2" {
                return Err(Error::InvalidArgument(format!(
                    "cannot parse `{s}` as a half-integer: denominator must be 2"
                )));
            }
            Ok(HalfInt::from_twice(parse_i32(num.trim())?))
        } else {
            Ok(HalfInt::from_int(parse_i32(s)?))
        }
    }
}
