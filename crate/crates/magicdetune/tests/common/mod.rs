//! Shared oracles for the integration suite.
//!
//! Everything here is computed from closed-form coupling expressions and
//! explicit sums over intermediate states, deliberately bypassing the
//! library's Racah-sum machinery so the two routes stay independent. All
//! angular momenta travel in twice-value notation (`f2 = 2F`, `m2 = 2m`) to
//! keep the arithmetic in integers until the final square root.

#![allow(dead_code)]

use magicdetune::{builtin_registry, AtomRecord, HalfInt};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub fn ratio(n: i128, d: i128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> BigRational {
    BigRational::zero()
}

/// Looks one record up in the built-in registry, panicking with a clear
/// message when the test asks for something that is not there.
pub fn record(species: &str, f2: i32) -> &'static AtomRecord {
    builtin_registry()
        .find(species, HalfInt::from_twice(f2))
        .unwrap_or_else(|e| panic!("registry lookup {species} 2F={f2}: {e}"))
}

/// A synthetic three-line record for oracle work that does not depend on
/// measured splittings.
pub fn synthetic_record(
    species: &str,
    i2: i32,
    f2: i32,
    jp2: i32,
    zeta_plus: f64,
    zeta_minus: f64,
) -> AtomRecord {
    let rec = AtomRecord {
        species: species.to_string(),
        nuclear_spin: HalfInt::from_twice(i2),
        ground_j: HalfInt::from_twice(1),
        excited_j: HalfInt::from_twice(jp2),
        f: HalfInt::from_twice(f2),
        zeta_plus,
        zeta_minus,
        b_over_a: 0.0,
        source: "synthetic".to_string(),
    };
    rec.validate().unwrap_or_else(|e| panic!("synthetic record invalid: {e}"));
    rec
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        return true;
    }
    (a - b).abs() <= tol * scale
}

fn triangle_ok(a2: i64, b2: i64, c2: i64) -> bool {
    a2 >= 0 && b2 >= 0 && c2 >= 0 && c2 >= (a2 - b2).abs() && c2 <= a2 + b2 && (a2 + b2 + c2) % 2 == 0
}

/// Closed form of the recoupling symbol `{1/2 3/2 1; F+l F I}` that carries
/// a three-line record's manifold strengths. Returns the exact pair
/// `(sign, square)`, the zero pair when the arguments do not couple.
pub fn closed_sixj_d2(f2: i64, i2: i64, l: i64) -> (i8, BigRational) {
    let fp2 = f2 + 2 * l;
    if !triangle_ok(1, i2, f2) || !triangle_ok(3, i2, fp2) || !triangle_ok(f2, 2, fp2) {
        return (0, zero());
    }
    let square = match (l, i2 - f2) {
        (1, -1) => ratio(1, (4 * (f2 + 1)) as i128),
        (1, 1) => ratio((f2 + 4) as i128, (12 * (f2 + 2) * (f2 + 1)) as i128),
        (0, -1) => ratio((f2 - 1) as i128, (6 * f2 * (f2 + 1)) as i128),
        (0, 1) => ratio((f2 + 3) as i128, (6 * (f2 + 2) * (f2 + 1)) as i128),
        (-1, -1) => ratio((f2 - 2) as i128, (12 * f2 * (f2 + 1)) as i128),
        (-1, 1) => ratio(1, (4 * (f2 + 1)) as i128),
        _ => panic!("closed_sixj_d2 covers I = F +/- 1/2 only, got 2I = {i2}, 2F = {f2}"),
    };
    if square.is_zero() {
        return (0, zero());
    }
    let exponent = if l == 0 { (f2 + i2 - 1) / 2 } else { (f2 + i2 + 1) / 2 };
    (if exponent.rem_euclid(2) == 0 { 1 } else { -1 }, square)
}

/// Closed form of `{1/2 1/2 1; F+l F I}`, the two-manifold analogue.
pub fn closed_sixj_d1(f2: i64, i2: i64, l: i64) -> (i8, BigRational) {
    let fp2 = f2 + 2 * l;
    if !triangle_ok(1, i2, f2) || !triangle_ok(1, i2, fp2) || !triangle_ok(f2, 2, fp2) {
        return (0, zero());
    }
    let (square, exponent) = match (l, i2 - f2) {
        (1, _) => (ratio(1, (3 * (f2 + 2)) as i128), f2),
        (-1, _) => (ratio(1, (3 * f2) as i128), f2),
        (0, -1) => (ratio((f2 + 2) as i128, (6 * f2 * (f2 + 1)) as i128), f2 + 1),
        (0, 1) => (ratio(f2 as i128, (6 * (f2 + 2) * (f2 + 1)) as i128), f2 + 1),
        _ => panic!("closed_sixj_d1 covers I = F +/- 1/2 only, got 2I = {i2}, 2F = {f2}"),
    };
    if square.is_zero() {
        return (0, zero());
    }
    (if exponent.rem_euclid(2) == 0 { 1 } else { -1 }, square)
}

/// Closed form of the projection symbol `(F 1 F+l; m q -m-q)` as the exact
/// pair `(sign, square)`; the zero pair outside the coupling domain.
pub fn closed_threej(f2: i64, l: i64, m2: i64, q: i64) -> (i8, BigRational) {
    let fp2 = f2 + 2 * l;
    let mp2 = m2 + 2 * q;
    if !triangle_ok(f2, 2, fp2) || m2.abs() > f2 || mp2.abs() > fp2 {
        return (0, zero());
    }
    let base = (f2 + m2) / 2;
    let (square, exponent) = match (l, q) {
        (1, 1) => (
            ratio(
                ((f2 + m2 + 2) * (f2 + m2 + 4)) as i128,
                (4 * (f2 + 2) * (f2 + 1) * (f2 + 3)) as i128,
            ),
            base,
        ),
        (1, -1) => (
            ratio(
                ((f2 - m2 + 2) * (f2 - m2 + 4)) as i128,
                (4 * (f2 + 2) * (f2 + 1) * (f2 + 3)) as i128,
            ),
            base,
        ),
        (1, 0) => (
            ratio(
                ((f2 - m2 + 2) * (f2 + m2 + 2)) as i128,
                (2 * (f2 + 2) * (f2 + 1) * (f2 + 3)) as i128,
            ),
            base + 1,
        ),
        (0, 1) => (
            ratio(((f2 - m2) * (f2 + m2 + 2)) as i128, (2 * f2 * (f2 + 2) * (f2 + 1)) as i128),
            base + 1,
        ),
        (0, -1) => (
            ratio(((f2 + m2) * (f2 - m2 + 2)) as i128, (2 * f2 * (f2 + 2) * (f2 + 1)) as i128),
            base,
        ),
        (0, 0) => (
            ratio((m2 * m2) as i128, (f2 * (f2 + 2) * (f2 + 1)) as i128),
            base + 1 + i64::from(m2 < 0),
        ),
        (-1, 1) => (
            ratio(
                ((f2 - m2) * (f2 - m2 - 2)) as i128,
                (4 * f2 * (f2 - 1) * (f2 + 1)) as i128,
            ),
            base,
        ),
        (-1, -1) => (
            ratio(
                ((f2 + m2) * (f2 + m2 - 2)) as i128,
                (4 * f2 * (f2 - 1) * (f2 + 1)) as i128,
            ),
            base,
        ),
        (-1, 0) => (
            ratio(((f2 - m2) * (f2 + m2)) as i128, (2 * f2 * (f2 - 1) * (f2 + 1)) as i128),
            base,
        ),
        _ => panic!("closed_threej takes l, q in -1..=1, got l = {l}, q = {q}"),
    };
    if square.is_zero() {
        return (0, zero());
    }
    (if exponent.rem_euclid(2) == 0 { 1 } else { -1 }, square)
}

/// Nonnegative rational to float with the same shift-and-divide rounding the
/// library uses, so element values agree to the last bit and comparisons are
/// not polluted by conversion ulps.
fn big_to_f64(value: &BigRational) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    let num = value.numer().magnitude();
    let den = value.denom().magnitude();
    let shift = num.bits() as i64 - den.bits() as i64 - 80;
    let quotient =
        if shift >= 0 { (num >> shift as u64) / den } else { (num << (-shift) as u64) / den };
    quotient.to_f64().unwrap_or(f64::MAX) * (shift as f64).exp2()
}

/// A record reduced to the numbers the brute-force oracles need.
#[derive(Clone, Copy, Debug)]
pub struct OracleAtom {
    pub f2: i64,
    pub i2: i64,
    /// 0 for a two-manifold (J' = 1/2) line, 1 for three manifolds.
    pub jp2: i64,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
}

impl OracleAtom {
    pub fn from_record(record: &AtomRecord) -> OracleAtom {
        OracleAtom {
            f2: i64::from(record.f.twice()),
            i2: i64::from(record.nuclear_spin.twice()),
            jp2: i64::from(record.excited_j.twice()),
            zeta_plus: record.zeta_plus,
            zeta_minus: record.zeta_minus,
        }
    }

    pub fn zeta(&self, l: i64) -> f64 {
        match l {
            1 => self.zeta_plus,
            0 => 0.0,
            -1 => self.zeta_minus,
            _ => panic!("zeta index out of range"),
        }
    }

    /// The transition element `|F, m> -> |F+l, m+q>` assembled from the
    /// closed forms: `(-1)^(m-F) sqrt(2F'+1) * sixj * threej`.
    pub fn element(&self, l: i64, q: i64, m2: i64) -> f64 {
        let (s6, sq6) = match self.jp2 {
            3 => closed_sixj_d2(self.f2, self.i2, l),
            1 => closed_sixj_d1(self.f2, self.i2, l),
            _ => panic!("oracle covers excited J' in {{1/2, 3/2}}"),
        };
        let (s3, sq3) = closed_threej(self.f2, l, m2, q);
        if s6 == 0 || s3 == 0 {
            return 0.0;
        }
        let phase = if ((m2 - self.f2) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let weight = ratio((self.f2 + 2 * l + 1) as i128, 1);
        let square = weight * sq6 * sq3;
        phase * f64::from(s6) * f64::from(s3) * big_to_f64(&square).sqrt()
    }
}

/// Brute-force scattering amplitude `m -> n` with emitted polarization
/// `q_out`, summed explicitly over every intermediate state `|F+l, m'>`.
/// The drive enters with weights `cos(theta)` on sigma+ and `sin(theta)` on
/// sigma-.
pub fn oracle_tensor_entry(
    atom: &OracleAtom,
    n2: i64,
    m2: i64,
    q_out: i64,
    theta: f64,
    delta: f64,
) -> f64 {
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let mut total = 0.0;
    let mut drive = 0.0;
    for (q_in, weight) in [(1i64, cos_t), (-1, sin_t)] {
        let intermediate = m2 + 2 * q_in;
        if intermediate != n2 + 2 * q_out || intermediate.abs() > atom.f2 + 2 {
            continue;
        }
        drive = weight;
        for l in [1i64, 0, -1] {
            let fp2 = atom.f2 + 2 * l;
            if fp2 < 0 {
                continue;
            }
            let inverse = 1.0 / (delta + atom.zeta(l));
            let absorb = atom.element(l, q_in, m2);
            let emit = atom.element(l, q_out, n2);
            total += absorb * emit * inverse;
        }
    }
    -drive * total
}

/// Brute-force light shift of `|F, m>`: the squared drive amplitude into
/// each intermediate state, weighted by its inverse detuning.
pub fn oracle_stark_shift(atom: &OracleAtom, m2: i64, theta: f64, delta: f64, intensity: f64) -> f64 {
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let (cos2, sin2) = (cos_t * cos_t, sin_t * sin_t);
    let mut total = 0.0;
    for l in [1i64, 0, -1] {
        let inverse = 1.0 / (delta + atom.zeta(l));
        let r = atom.element(l, 1, m2);
        let s = atom.element(l, -1, m2);
        total += (cos2 * r * r + sin2 * s * s) * inverse;
    }
    intensity * (2.0 * total)
}

/// Brute-force effective cavity coefficients for one state, in the same
/// order the library reports them: `(u_a, u_b, omega, omega_tilde, h,
/// eta_plus_ray, eta_minus_ray, eta_raman)`.
pub fn oracle_cavity_row(
    atom: &OracleAtom,
    m2: i64,
    theta: f64,
    delta: f64,
    g: f64,
    omega_rabi: f64,
) -> (f64, f64, f64, f64, f64, f64, f64, f64) {
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let mut sum_rr = 0.0;
    let mut sum_ss = 0.0;
    let mut sum_rs = 0.0;
    for l in [1i64, 0, -1] {
        let inv = 1.0 / (delta + atom.zeta(l));
        let r = atom.element(l, 1, m2);
        let s = atom.element(l, -1, m2);
        sum_rr += r * r * inv;
        sum_ss += s * s * inv;
        if (m2 + 4).abs() <= atom.f2 {
            sum_rs += r * atom.element(l, -1, m2 + 4) * inv;
        }
    }
    let g2 = g * g;
    let omega2 = omega_rabi * omega_rabi;
    (
        g2 * sum_rr,
        g2 * sum_ss,
        omega2 * (cos_t * cos_t * sum_rr + sin_t * sin_t * sum_ss) / 4.0,
        omega2 * cos_t * sin_t * sum_rs / 4.0,
        g2 * sum_rs,
        g * omega_rabi * cos_t * sum_rr / 2.0,
        g * omega_rabi * sin_t * sum_ss / 2.0,
        g * omega_rabi * sum_rs / 2.0,
    )
}
