//! Exact Wigner 3-j and 6-j symbols.
//!
//! A Wigner symbol is generally irrational, but its square is rational. Every
//! symbol is therefore represented as a sign together with an exact rational
//! square ([`CouplingValue`]), evaluated with big-integer arithmetic from the
//! Racah single-sum formulas. Products, rescalings and phase flips stay exact;
//! a floating-point amplitude is extracted only at the very end.
//!
//! Selection-rule failures (triangle violations, `m1 + m2 + m3 != 0`,
//! `|m| > j`) are not errors: they return an exact zero. Errors are reserved
//! for arguments that are malformed regardless of selection rules, such as a
//! negative momentum or a projection that is not an integer away from its
//! momentum.

use std::ops::Mul;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::halfint::HalfInt;

/// Largest supported `2j` for any argument. The factorial table is sized for
/// this bound at first use.
pub const MAX_TWO_J: i32 = 200;

// fact(k+1) in the 6-j sum is the largest factorial reached; with all four
// triangle sums bounded by 2*MAX_TWO_J the index stays below this.
const FACTORIAL_TABLE_LEN: usize = 2 * MAX_TWO_J as usize + 3;

fn factorials() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(FACTORIAL_TABLE_LEN);
        table.push(BigInt::one());
        for n in 1..FACTORIAL_TABLE_LEN {
            let next = table.last().unwrap() * BigInt::from(n);
            table.push(next);
        }
        table
    })
}

fn fact(n: i32) -> &'static BigInt {
    debug_assert!(n >= 0, "factorial of negative argument");
    &factorials()[n as usize]
}

/// A signed square root of a rational number: `sign * sqrt(square)`.
///
/// This is the exact value type for Wigner symbols and for products of
/// dipole matrix elements built from them. The invariant `square >= 0` holds
/// always, and `sign == 0` if and only if `square == 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingValue {
    sign: i8,
    square: BigRational,
}

impl CouplingValue {
    /// The exact zero.
    pub fn zero() -> CouplingValue {
        CouplingValue { sign: 0, square: BigRational::zero() }
    }

    fn new(sign: i8, square: BigRational) -> CouplingValue {
        debug_assert!(!square.is_negative());
        if square.is_zero() {
            CouplingValue::zero()
        } else {
            CouplingValue { sign, square }
        }
    }

    /// `-1`, `0` or `+1`.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// The exact square of the value. Nonnegative.
    pub fn square(&self) -> &BigRational {
        &self.square
    }

    /// The exact square carrying the sign of the value itself, which for a
    /// squared symbol appearing linearly in a formula is the natural weight.
    pub fn signed_square(&self) -> BigRational {
        match self.sign {
            0 => BigRational::zero(),
            1 => self.square.clone(),
            _ => -self.square.clone(),
        }
    }

    /// True when the value is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Flips the sign when `k` is odd: multiplication by `(-1)^k`.
    pub fn with_phase(&self, k: i32) -> CouplingValue {
        if k.rem_euclid(2) == 1 {
            CouplingValue::new(-self.sign, self.square.clone())
        } else {
            self.clone()
        }
    }

    /// Multiplies the value by `sqrt(n)` for a nonnegative rational `n`.
    pub fn scaled_by_sqrt(&self, n: &BigRational) -> CouplingValue {
        assert!(!n.is_negative(), "scaled_by_sqrt takes a nonnegative factor");
        CouplingValue::new(self.sign, &self.square * n)
    }

    /// Multiplies the value by the rational `r`, which may be negative.
    pub fn scaled_by_rational(&self, r: &BigRational) -> CouplingValue {
        let sign = match r.is_negative() {
            true => -self.sign,
            false if r.is_zero() => 0,
            false => self.sign,
        };
        CouplingValue::new(sign, &self.square * (r * r))
    }

    /// The value as a floating-point number.
    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * big_ratio_to_f64(&self.square).sqrt()
    }
}

impl Mul<&CouplingValue> for &CouplingValue {
    type Output = CouplingValue;

    fn mul(self, rhs: &CouplingValue) -> CouplingValue {
        CouplingValue::new(self.sign * rhs.sign, &self.square * &rhs.square)
    }
}

/// Converts a big rational to `f64` without overflowing on huge numerators or
/// denominators, by shifting both into range first. Accurate to well below
/// one part in 1e18.
pub(crate) fn big_ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.numer().is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    let shift = num.bits() as i64 - den.bits() as i64 - 80;
    let quotient = if shift >= 0 {
        (num >> shift as u64) / den
    } else {
        (num << (-shift) as u64) / den
    };
    let value = quotient.to_f64().unwrap_or(f64::MAX) * (shift as f64).exp2();
    if negative {
        -value
    } else {
        value
    }
}

fn check_momentum(twice: i32, name: &str) -> Result<()> {
    if twice < 0 {
        return Err(Error::InvalidArgument(format!(
            "momentum {name} is negative (2{name} = {twice})"
        )));
    }
    if twice > MAX_TWO_J {
        return Err(Error::UnsupportedCase(format!(
            "momentum {name} exceeds the supported maximum 2j = {MAX_TWO_J}"
        )));
    }
    Ok(())
}

fn triangle_ok(a2: i32, b2: i32, c2: i32) -> bool {
    a2 + b2 >= c2 && (a2 - b2).abs() <= c2 && (a2 + b2 + c2) % 2 == 0
}

/// Squared triangle coefficient, exact.
fn delta_sq(a2: i32, b2: i32, c2: i32) -> BigRational {
    BigRational::new(
        fact((a2 + b2 - c2) / 2) * fact((a2 - b2 + c2) / 2) * fact((-a2 + b2 + c2) / 2),
        fact((a2 + b2 + c2) / 2 + 1).clone(),
    )
}

/// The Wigner 3-j symbol `(j1 j2 j3; m1 m2 m3)` as an exact signed square.
///
/// Returns an error for a negative or oversized momentum, or for a projection
/// that is not an integer away from its momentum. Any selection-rule failure,
/// including `|m| > j`, yields `Ok` with an exact zero.
pub fn wigner_3j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<CouplingValue> {
    let (j12, j22, j32) = (j1.twice(), j2.twice(), j3.twice());
    let (m12, m22, m32) = (m1.twice(), m2.twice(), m3.twice());
    for (twice, name) in [(j12, "j1"), (j22, "j2"), (j32, "j3")] {
        check_momentum(twice, name)?;
    }
    for (j, m, name) in [(j1, m1, "m1"), (j2, m2, "m2"), (j3, m3, "m3")] {
        j.require_projection(m, name)?;
    }

    if m12 + m22 + m32 != 0 || !triangle_ok(j12, j22, j32) {
        return Ok(CouplingValue::zero());
    }
    if m12.abs() > j12 || m22.abs() > j22 || m32.abs() > j32 {
        return Ok(CouplingValue::zero());
    }

    let kmin = [0, (j22 - j32 - m12) / 2, (j12 - j32 + m22) / 2]
        .into_iter()
        .max()
        .unwrap();
    let kmax = [(j12 + j22 - j32) / 2, (j12 - m12) / 2, (j22 + m22) / 2]
        .into_iter()
        .min()
        .unwrap();
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = fact(k)
            * fact((j12 + j22 - j32) / 2 - k)
            * fact((j12 - m12) / 2 - k)
            * fact((j22 + m22) / 2 - k)
            * fact((j32 - j22 + m12) / 2 + k)
            * fact((j32 - j12 - m22) / 2 + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Ok(CouplingValue::zero());
    }

    let norm = fact((j12 + m12) / 2)
        * fact((j12 - m12) / 2)
        * fact((j22 + m22) / 2)
        * fact((j22 - m22) / 2)
        * fact((j32 + m32) / 2)
        * fact((j32 - m32) / 2);
    let phase = if ((j12 - j22 - m32) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
    let sign = phase * if sum.is_positive() { 1i8 } else { -1i8 };
    let square = delta_sq(j12, j22, j32) * norm * &sum * &sum;
    Ok(CouplingValue::new(sign, square))
}

/// The Wigner 6-j symbol `{a b c; d e f}` as an exact signed square.
///
/// Returns an error for a negative or oversized momentum. Triangle failures
/// in any of the four coupled triads yield `Ok` with an exact zero.
pub fn wigner_6j(
    a: HalfInt,
    b: HalfInt,
    c: HalfInt,
    d: HalfInt,
    e: HalfInt,
    f: HalfInt,
) -> Result<CouplingValue> {
    let (a2, b2, c2) = (a.twice(), b.twice(), c.twice());
    let (d2, e2, f2) = (d.twice(), e.twice(), f.twice());
    for (twice, name) in [(a2, "a"), (b2, "b"), (c2, "c"), (d2, "d"), (e2, "e"), (f2, "f")] {
        check_momentum(twice, name)?;
    }

    let triads = [(a2, b2, c2), (a2, e2, f2), (d2, b2, f2), (d2, e2, c2)];
    if triads.iter().any(|&(x, y, z)| !triangle_ok(x, y, z)) {
        return Ok(CouplingValue::zero());
    }

    let kmin = triads.iter().map(|&(x, y, z)| (x + y + z) / 2).max().unwrap();
    let kmax = [
        (a2 + b2 + d2 + e2) / 2,
        (b2 + c2 + e2 + f2) / 2,
        (a2 + c2 + d2 + f2) / 2,
    ]
    .into_iter()
    .min()
    .unwrap();
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = fact(k - (a2 + b2 + c2) / 2)
            * fact(k - (a2 + e2 + f2) / 2)
            * fact(k - (d2 + b2 + f2) / 2)
            * fact(k - (d2 + e2 + c2) / 2)
            * fact((a2 + b2 + d2 + e2) / 2 - k)
            * fact((b2 + c2 + e2 + f2) / 2 - k)
            * fact((a2 + c2 + d2 + f2) / 2 - k);
        let term = BigRational::new(fact(k + 1).clone(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Ok(CouplingValue::zero());
    }

    let sign = if sum.is_positive() { 1i8 } else { -1i8 };
    let square = delta_sq(a2, b2, c2)
        * delta_sq(a2, e2, f2)
        * delta_sq(d2, b2, f2)
        * delta_sq(d2, e2, c2)
        * &sum
        * &sum;
    Ok(CouplingValue::new(sign, square))
}
