//! Exactness checks for the coupling-symbol layer: closed-form equality for
//! every argument pattern the scattering sums use, and orthogonality of the
//! projection symbols carried out entirely in exact arithmetic.

mod common;

use common::{closed_sixj_d1, closed_sixj_d2, closed_threej};
use magicdetune::{wigner_3j, wigner_6j, HalfInt};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;

fn h(twice: i64) -> HalfInt {
    HalfInt::from_twice(twice as i32)
}

#[test]
fn projection_symbols_match_their_closed_forms() {
    let mut checked = 0usize;
    for f2 in 0..=16i64 {
        for l in [1i64, 0, -1] {
            let fp2 = f2 + 2 * l;
            if fp2 < 0 {
                continue;
            }
            for m2 in (-f2..=f2).step_by(2) {
                for q in [1i64, 0, -1] {
                    let value =
                        wigner_3j(h(f2), h(2), h(fp2), h(m2), h(2 * q), h(-m2 - 2 * q)).unwrap();
                    let (sign, square) = closed_threej(f2, l, m2, q);
                    assert_eq!(
                        value.sign(),
                        sign,
                        "sign mismatch at 2F = {f2}, l = {l}, 2m = {m2}, q = {q}"
                    );
                    assert_eq!(
                        value.square(),
                        &square,
                        "square mismatch at 2F = {f2}, l = {l}, 2m = {m2}, q = {q}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 600);
}

#[test]
fn recoupling_symbols_match_their_closed_forms() {
    let mut checked = 0usize;
    for f2 in 0..=16i64 {
        for i2 in [f2 - 1, f2 + 1] {
            if i2 < 0 {
                continue;
            }
            for l in [1i64, 0, -1] {
                let fp2 = f2 + 2 * l;
                if fp2 < 0 {
                    continue;
                }
                for (jp2, closed) in [(3i64, closed_sixj_d2(f2, i2, l)), (1, closed_sixj_d1(f2, i2, l))]
                {
                    let value = wigner_6j(h(1), h(jp2), h(2), h(fp2), h(f2), h(i2)).unwrap();
                    let (sign, square) = closed;
                    assert_eq!(
                        value.sign(),
                        sign,
                        "sign mismatch at 2J' = {jp2}, 2F = {f2}, 2I = {i2}, l = {l}"
                    );
                    assert_eq!(
                        value.square(),
                        &square,
                        "square mismatch at 2J' = {jp2}, 2F = {f2}, 2I = {i2}, l = {l}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 150);
}

/// Splits `sign * sqrt(square)` into an exact rational coefficient and a
/// small squarefree radical kernel, so sums of such terms can be tested for
/// exact cancellation. The radicand's prime content comes from factorials of
/// small integers, so trial division by small primes must leave a perfect
/// square behind.
fn radical_parts(sign: i8, square: &BigRational) -> (BigInt, BigRational) {
    if sign == 0 {
        return (BigInt::one(), BigRational::zero());
    }
    let mut radicand = square.numer() * square.denom();
    assert!(radicand.is_positive());
    let mut root = BigInt::one();
    let mut kernel = BigInt::one();
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let prime = BigInt::from(p);
        let mut count = 0u32;
        while (&radicand % &prime).is_zero() {
            radicand /= &prime;
            count += 1;
        }
        root *= prime.pow(count / 2);
        if count % 2 == 1 {
            kernel *= prime;
        }
    }
    let residual_root = radicand.sqrt();
    assert_eq!(
        &residual_root * &residual_root,
        radicand,
        "radicand residual is not a perfect square"
    );
    root *= residual_root;
    let coefficient = BigRational::new(BigInt::from(sign) * root, square.denom().clone());
    (kernel, coefficient)
}

/// Accumulates `sign * sqrt(square)` terms exactly, keyed by radical kernel.
fn accumulate(sums: &mut HashMap<BigInt, BigRational>, sign: i8, square: &BigRational) {
    if sign == 0 {
        return;
    }
    let (kernel, coefficient) = radical_parts(sign, square);
    *sums.entry(kernel).or_insert_with(BigRational::zero) += coefficient;
}

#[test]
fn projection_orthogonality_is_exact_for_small_momenta() {
    for j12 in 0..=8i64 {
        for j22 in 0..=8i64 {
            for j32 in ((j12 - j22).abs()..=j12 + j22).step_by(2) {
                for m32 in (-j32..=j32).step_by(2) {
                    let mut total = BigRational::zero();
                    for m12 in (-j12..=j12).step_by(2) {
                        let m22 = -m32 - m12;
                        if m22.abs() > j22 {
                            continue;
                        }
                        let value =
                            wigner_3j(h(j12), h(j22), h(j32), h(m12), h(m22), h(m32)).unwrap();
                        total += BigRational::from_integer((j32 + 1).into()) * value.square();
                    }
                    assert!(
                        total.is_one(),
                        "normalization failed at 2j = ({j12}, {j22}, {j32}), 2m3 = {m32}: {total}"
                    );
                }
            }
        }
    }
}

#[test]
fn cross_momentum_orthogonality_cancels_exactly() {
    for j12 in 0..=8i64 {
        for j22 in 0..=8i64 {
            let lo = (j12 - j22).abs();
            let hi = j12 + j22;
            for j32 in (lo..=hi).step_by(2) {
                for j32b in (j32 + 2..=hi).step_by(2) {
                    for m32 in (-j32..=j32).step_by(2) {
                        if m32.abs() > j32b {
                            continue;
                        }
                        let mut sums: HashMap<BigInt, BigRational> = HashMap::new();
                        for m12 in (-j12..=j12).step_by(2) {
                            let m22 = -m32 - m12;
                            if m22.abs() > j22 {
                                continue;
                            }
                            let first =
                                wigner_3j(h(j12), h(j22), h(j32), h(m12), h(m22), h(m32)).unwrap();
                            let second =
                                wigner_3j(h(j12), h(j22), h(j32b), h(m12), h(m22), h(m32)).unwrap();
                            let product = &first * &second;
                            accumulate(&mut sums, product.sign(), product.square());
                        }
                        for (kernel, coefficient) in &sums {
                            assert!(
                                coefficient.is_zero(),
                                "cross term sqrt({kernel}) survives at 2j = \
                                 ({j12}, {j22}, {j32} vs {j32b}), 2m3 = {m32}: {coefficient}"
                            );
                        }
                    }
                }
            }
        }
    }
}
