//! Closed-form solvers for the state-insensitive detunings of one record:
//! the ellipticity-preserving pair delta_perp, the equal-amplitude root
//! delta_parallel, the stretched-state Raman zero delta_pi, the two-manifold
//! variants for lines with `J' = J`, the existence classification, and the
//! coincidence of all three roots when the splittings follow the interval
//! rule of a pure magnetic-dipole hyperfine interaction.
//!
//! Each condition is a weighted sum of manifold strengths divided by the
//! per-manifold detunings `delta + zeta_l`. Clearing denominators over the
//! manifolds that actually couple turns it into a polynomial of degree at
//! most two whose coefficients are assembled here in exact rational
//! arithmetic; floats appear only when a root is extracted. All detunings
//! and splittings are in 2π·MHz.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::atomic_data::{zeta_from_dipole_constant, AtomRecord, HyperfineConstants};
use crate::dipole::record_table;
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::wigner::{big_ratio_to_f64, wigner_6j};

/// Relative agreement required of the three solvers in the dipole limit.
const COINCIDENCE_TOLERANCE: f64 = 1e-9;

/// The two detuning conditions that reduce to polynomials over the manifold
/// structure. The Raman zero has its own two-manifold closed form and never
/// needs the generic assembly.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
enum Condition {
    /// The drive's polarization ellipse is scattered unchanged by every
    /// Zeeman state.
    Perpendicular,
    /// Every Zeeman state scatters with the same amplitude.
    Parallel,
}

/// Integer weight multiplying the strength of manifold `F + l` in the given
/// condition, for a ground manifold with `2F = two_f`.
fn signed_weight(condition: Condition, l: i32, two_f: i64) -> BigInt {
    let f2 = two_f;
    let weight = match (condition, l) {
        (Condition::Perpendicular, 1) => f2 * (f2 + 3),
        (Condition::Perpendicular, 0) => -2 * (f2 + 1),
        (Condition::Perpendicular, -1) => (1 - f2) * (f2 + 2),
        (Condition::Parallel, 1) => f2,
        (Condition::Parallel, 0) => -2 * (f2 + 1),
        (Condition::Parallel, -1) => f2 + 2,
        _ => panic!("manifold offset must be -1, 0 or +1"),
    };
    BigInt::from(weight)
}

/// One coupled manifold with everything the polynomial assembly needs.
struct LineData {
    l: i32,
    strength: BigRational,
    zeta: BigRational,
}

/// The coupled manifolds of a record, lifted to exact rationals. Validates
/// the record first so every splitting is finite.
fn line_data(record: &AtomRecord) -> Result<Vec<LineData>> {
    record.validate()?;
    let table = record_table(record)?;
    Ok(table
        .lines()
        .iter()
        .map(|line| LineData {
            l: line.l,
            strength: line.strength().clone(),
            zeta: BigRational::from_float(record.zeta(line.l))
                .expect("validated splittings are finite"),
        })
        .collect())
}

/// Multiplies a polynomial (coefficients indexed by power) by `(x + shift)`.
fn poly_mul_linear(poly: &[BigRational], shift: &BigRational) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); poly.len() + 1];
    for (power, coeff) in poly.iter().enumerate() {
        out[power] += coeff * shift;
        out[power + 1] += coeff;
    }
    out
}

/// Assembles the condition as a polynomial over the coupled manifolds:
/// each manifold contributes its signed weighted strength times the product
/// of the other manifolds' `(delta + zeta)` factors. Manifolds that do not
/// couple contribute nothing, not even a pole factor, so a dead line can
/// never introduce a spurious root.
fn condition_polynomial(
    lines: &[LineData],
    condition: Condition,
    two_f: i64,
) -> Vec<BigRational> {
    let mut poly = vec![BigRational::zero(); lines.len()];
    for (idx, line) in lines.iter().enumerate() {
        let weight = BigRational::from_integer(signed_weight(condition, line.l, two_f));
        let mut term = vec![weight * &line.strength];
        for (other_idx, other) in lines.iter().enumerate() {
            if other_idx != idx {
                term = poly_mul_linear(&term, &other.zeta);
            }
        }
        for (power, coeff) in term.into_iter().enumerate() {
            poly[power] += coeff;
        }
    }
    poly
}

/// Real-root structure of an assembled condition polynomial.
enum RootClass {
    /// Degree two with nonnegative discriminant; `lower <= upper`, equal on
    /// a double root.
    TwoReal { lower: f64, upper: f64 },
    /// Degree one after exact-zero leading coefficients are trimmed.
    SingleLinear { root: f64 },
    /// Degree two with negative discriminant.
    NoRealRoot,
    /// A nonzero constant: the condition holds nowhere.
    NoSolution,
    /// The zero polynomial: the condition holds everywhere.
    Degenerate,
}

/// Classifies and extracts the real roots of a polynomial of degree at most
/// two. The discriminant sign is decided in exact arithmetic; the float
/// extraction uses the cancellation-stable quotient form.
fn classify_roots(poly: &[BigRational]) -> RootClass {
    let mut coeffs: Vec<&BigRational> = poly.iter().collect();
    while coeffs.len() > 1 && coeffs.last().expect("nonempty").is_zero() {
        coeffs.pop();
    }
    match coeffs.len() {
        3 => {
            let (c0, c1, c2) = (coeffs[0], coeffs[1], coeffs[2]);
            let disc = c1 * c1 - BigRational::from_integer(BigInt::from(4)) * (c2 * c0);
            if disc.is_negative() {
                return RootClass::NoRealRoot;
            }
            if disc.is_zero() {
                let root = big_ratio_to_f64(
                    &(-(c1 / (BigRational::from_integer(BigInt::from(2)) * c2))),
                );
                return RootClass::TwoReal { lower: root, upper: root };
            }
            let a = big_ratio_to_f64(c2);
            let b = big_ratio_to_f64(c1);
            let c = big_ratio_to_f64(c0);
            let sqrt_disc = big_ratio_to_f64(&disc).sqrt();
            let q = if b >= 0.0 {
                -(b + sqrt_disc) / 2.0
            } else {
                -(b - sqrt_disc) / 2.0
            };
            let (r1, r2) = (q / a, c / q);
            RootClass::TwoReal { lower: r1.min(r2), upper: r1.max(r2) }
        }
        2 => {
            let root = big_ratio_to_f64(&(-(coeffs[0] / coeffs[1])));
            RootClass::SingleLinear { root }
        }
        1 if coeffs[0].is_zero() => RootClass::Degenerate,
        1 => RootClass::NoSolution,
        0 => RootClass::Degenerate,
        _ => unreachable!("conditions over three manifolds are at most quadratic"),
    }
}

/// Float view of the assembled ellipticity condition
/// `a·delta² + b·delta + c`; `a` is zero when fewer than three manifolds
/// couple and the condition is linear.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

fn float_view(poly: &[BigRational]) -> QuadraticCoefficients {
    let coeff = |power: usize| poly.get(power).map_or(0.0, big_ratio_to_f64);
    QuadraticCoefficients { a: coeff(2), b: coeff(1), c: coeff(0) }
}

/// Real roots of the ellipticity-preserving condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerpRoots {
    /// The generic three-manifold case: both roots, sorted ascending.
    Pair { lower: f64, upper: f64 },
    /// The condition degenerated to a linear equation (two coupled
    /// manifolds, or an exactly vanishing leading coefficient).
    DegenerateLinear { root: f64 },
    /// The quadratic has a negative discriminant.
    NoRealRoot,
}

/// Output of [`solve_delta_perp`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerpendicularSolution {
    pub roots: PerpRoots,
    /// The root closest to the equal-amplitude detuning, when that
    /// detuning exists.
    pub delta_perp_nearest: Option<f64>,
    /// The assembled condition polynomial, for reporting.
    pub quadratic: QuadraticCoefficients,
}

/// Root structure of the equal-amplitude condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParallelSolution {
    /// The generic single root: the quadratic coefficient vanishes
    /// identically for this manifold structure.
    Single(f64),
    /// The quadratic coefficient does not vanish, so the condition keeps
    /// two roots; both are reported, sorted ascending, rather than
    /// pretending one of them is preferred.
    QuadraticPair { lower: f64, upper: f64 },
}

/// Solves the ellipticity-preserving condition for a record.
///
/// The two roots are real for every three-manifold record whose splittings
/// have opposite signs; they are reported sorted ascending together with
/// the one closest to the equal-amplitude root.
pub fn solve_delta_perp(record: &AtomRecord) -> Result<PerpendicularSolution> {
    let lines = line_data(record)?;
    let poly = condition_polynomial(&lines, Condition::Perpendicular, i64::from(record.f.twice()));
    let quadratic = float_view(&poly);
    let roots = match classify_roots(&poly) {
        RootClass::TwoReal { lower, upper } => PerpRoots::Pair { lower, upper },
        RootClass::SingleLinear { root } => PerpRoots::DegenerateLinear { root },
        RootClass::NoRealRoot => PerpRoots::NoRealRoot,
        RootClass::NoSolution | RootClass::Degenerate => {
            return Err(Error::UnsupportedCase(format!(
                "{} couples too few manifolds for an ellipticity condition",
                record.label()
            )));
        }
    };
    let parallel = solve_delta_parallel(record);
    let delta_perp_nearest = match (&roots, parallel) {
        (PerpRoots::Pair { lower, upper }, Ok(ParallelSolution::Single(par))) => {
            Some(if (lower - par).abs() <= (upper - par).abs() { *lower } else { *upper })
        }
        (PerpRoots::DegenerateLinear { root }, Ok(ParallelSolution::Single(_))) => Some(*root),
        _ => None,
    };
    Ok(PerpendicularSolution { roots, delta_perp_nearest, quadratic })
}

/// Solves the equal-amplitude condition for a record.
///
/// For records scattering through three manifolds on a `J -> J+1` line with
/// the single-root structure (see [`magic_exists`]) this returns
/// [`ParallelSolution::Single`]. Structures that keep a genuine quadratic
/// get both roots back. Two-manifold structures whose linear coefficient
/// vanishes identically (every `J' = J` line, and `I = 1/2` records) have
/// no equal-amplitude detuning at all and are refused.
pub fn solve_delta_parallel(record: &AtomRecord) -> Result<ParallelSolution> {
    let lines = line_data(record)?;
    let poly = condition_polynomial(&lines, Condition::Parallel, i64::from(record.f.twice()));
    match classify_roots(&poly) {
        RootClass::SingleLinear { root } => Ok(ParallelSolution::Single(root)),
        RootClass::TwoReal { lower, upper } => Ok(ParallelSolution::QuadraticPair { lower, upper }),
        RootClass::NoRealRoot => Err(Error::UnsupportedCase(format!(
            "the amplitude condition for {} has no real root",
            record.label()
        ))),
        RootClass::NoSolution => Err(Error::UnsupportedCase(format!(
            "the amplitude condition for {} degenerates and has no root",
            record.label()
        ))),
        RootClass::Degenerate => Err(Error::UnsupportedCase(format!(
            "the amplitude condition for {} vanishes identically",
            record.label()
        ))),
    }
}

/// Solves the stretched-state Raman zero
/// `delta_pi = zeta_plus * Q / (P - Q)`, where `P` and `Q` are the
/// strengths of the `F+1` and `F` manifolds.
///
/// The scattering path `|F, F> -> |F', F+1>` interferes through exactly
/// those two manifolds, so both must couple.
pub fn solve_delta_pi(record: &AtomRecord) -> Result<f64> {
    let lines = line_data(record)?;
    let find = |l: i32| lines.iter().find(|line| line.l == l);
    let (plus, zero) = match (find(1), find(0)) {
        (Some(plus), Some(zero)) => (plus, zero),
        _ => {
            return Err(Error::UnsupportedCase(format!(
                "{} does not couple both manifolds of the stretched Raman path",
                record.label()
            )));
        }
    };
    let denom = &plus.strength - &zero.strength;
    if denom.is_zero() {
        return Err(Error::UnsupportedCase(format!(
            "the stretched Raman zero for {} is singular (equal manifold strengths)",
            record.label()
        )));
    }
    Ok(big_ratio_to_f64(&(&plus.zeta * &zero.strength / denom)))
}

/// Detunings of a two-manifold `J' = J` record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct D1Detunings {
    /// Root of the ellipticity-preserving condition.
    pub delta_perp: f64,
    /// The closed-form equal-amplitude detuning for this structure. The
    /// exact amplitude condition has no root here (its linear coefficient
    /// vanishes identically); this is the standard approximate root, and
    /// it never coincides with `delta_perp`.
    pub delta_parallel: f64,
}

/// Solves the two-manifold variants for a `J' = J` line.
///
/// The record must couple exactly the manifolds `{F, F+1}` (the lower
/// hyperfine level, `F = I - J`) or `{F-1, F}` (the upper one,
/// `F = I + J`); anything else is refused.
pub fn solve_d1(record: &AtomRecord) -> Result<D1Detunings> {
    if record.excited_j != record.ground_j {
        return Err(Error::InvalidArgument(format!(
            "two-manifold solver needs J' = J, got J = {} and J' = {}",
            record.ground_j, record.excited_j
        )));
    }
    let lines = line_data(record)?;
    let ls: Vec<i32> = lines.iter().map(|line| line.l).collect();
    let f2 = i64::from(record.f.twice());
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));

    // The printed single-root amplitude formulas, keyed by which pair of
    // manifolds couples.
    let delta_parallel = match ls.as_slice() {
        [1, 0] => {
            let (p, q) = (&lines[0], &lines[1]);
            let denominator = int(f2) * &p.strength - int(f2 + 1) * &q.strength;
            if denominator.is_zero() {
                return Err(Error::UnsupportedCase(format!(
                    "the amplitude formula for {} is singular",
                    record.label()
                )));
            }
            big_ratio_to_f64(&(&p.zeta * (int(2 * (f2 + 1)) * &q.strength) / denominator))
        }
        [0, -1] => {
            let (q, r) = (&lines[0], &lines[1]);
            let denominator = int(f2 + 2) * &r.strength - int(f2 + 1) * &q.strength;
            if denominator.is_zero() {
                return Err(Error::UnsupportedCase(format!(
                    "the amplitude formula for {} is singular",
                    record.label()
                )));
            }
            big_ratio_to_f64(&(&r.zeta * (int(2 * (f2 + 1)) * &q.strength) / denominator))
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "two-manifold solver needs manifolds {{F, F+1}} or {{F-1, F}}, \
                 but {} couples {} of them",
                record.label(),
                ls.len()
            )));
        }
    };

    let poly = condition_polynomial(&lines, Condition::Perpendicular, f2);
    let delta_perp = match classify_roots(&poly) {
        RootClass::SingleLinear { root } => root,
        _ => {
            return Err(Error::UnsupportedCase(format!(
                "the ellipticity condition for {} has no single root",
                record.label()
            )));
        }
    };
    Ok(D1Detunings { delta_perp, delta_parallel })
}

/// Outcome of the existence classification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagicExistence {
    /// Whether the quadratic coefficient of the amplitude condition
    /// vanishes exactly, leaving the single root a magic detuning needs.
    pub exists: bool,
    /// Float value of that exact coefficient; zero exactly when `exists`.
    pub residual: f64,
}

/// Classifies whether a `J -> J+1` line supports a single-root amplitude
/// condition, by exact evaluation of the quadratic coefficient
/// `2F·P - (4F+2)·Q + (2F+2)·R` over the manifold strengths.
///
/// Manifolds that do not couple contribute zero, so for `F = 0` the test is
/// trivially true. Lines with `J' != J+1` are refused; the classification
/// for them follows a different route.
pub fn magic_exists(j: HalfInt, jp: HalfInt, f: HalfInt, i: HalfInt) -> Result<MagicExistence> {
    j.require_momentum("J")?;
    jp.require_momentum("J'")?;
    f.require_momentum("F")?;
    i.require_momentum("I")?;
    if jp != j + HalfInt::ONE {
        return Err(Error::UnsupportedCase(format!(
            "existence classification covers J' = J + 1 lines only, got J = {j}, J' = {jp}"
        )));
    }
    if !HalfInt::triangle(i, j, f) {
        return Err(Error::InvalidArgument(format!(
            "F = {f} is not a coupling of I = {i} and J = {j}"
        )));
    }
    let f2 = i64::from(f.twice());
    let mut coefficient = BigRational::zero();
    for l in [1, 0, -1] {
        let fp = f + HalfInt::from_int(l);
        if fp.twice() < 0 {
            continue;
        }
        let sixj = wigner_6j(j, jp, HalfInt::ONE, fp, f, i)?;
        coefficient +=
            BigRational::from_integer(signed_weight(Condition::Parallel, l, f2)) * sixj.square();
    }
    Ok(MagicExistence {
        exists: coefficient.is_zero(),
        residual: big_ratio_to_f64(&coefficient),
    })
}

/// Detunings of a record whose splittings follow the magnetic-dipole
/// interval rule exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DipoleLimitDetunings {
    /// The root shared by all three conditions,
    /// `-A·(F+1)·Q / (P - Q)` with `P` and `Q` the strengths of the `F+1`
    /// and `F` manifolds.
    pub common_root: f64,
    /// The other ellipticity root, shared by nothing. Absent when the
    /// ellipticity condition is linear.
    pub discarded_perp_root: Option<f64>,
}

fn relative_gap(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

/// Builds a synthetic record with interval-rule splittings
/// `zeta_plus = -A(F+1)`, `zeta_minus = A·F`, solves all three conditions,
/// and checks that they agree on the closed-form common root.
///
/// The line must pass [`magic_exists`]; disagreement between the solvers
/// beyond one part in 10⁹ is reported as an internal-consistency error
/// since it can only mean a defect in this crate.
pub fn dipole_limit_detunings(
    a_hfs: f64,
    f: HalfInt,
    i: HalfInt,
    j: HalfInt,
    jp: HalfInt,
) -> Result<DipoleLimitDetunings> {
    let existence = magic_exists(j, jp, f, i)?;
    if !existence.exists {
        return Err(Error::UnsupportedCase(format!(
            "no single-root amplitude structure for J = {j}, J' = {jp}, F = {f}, I = {i} \
             (coefficient residual {})",
            existence.residual
        )));
    }
    let constants = HyperfineConstants { a_hfs, b_hfs: None };
    let (zeta_plus, zeta_minus) = zeta_from_dipole_constant(constants, f)?;
    let record = AtomRecord {
        species: "dipole-limit".to_string(),
        nuclear_spin: i,
        ground_j: j,
        excited_j: jp,
        f,
        zeta_plus,
        zeta_minus,
        b_over_a: 0.0,
        source: "synthetic".to_string(),
    };

    let lines = line_data(&record)?;
    let find = |l: i32| lines.iter().find(|line| line.l == l);
    let (plus, zero) = match (find(1), find(0)) {
        (Some(plus), Some(zero)) => (plus, zero),
        _ => {
            return Err(Error::UnsupportedCase(format!(
                "{} does not couple the manifolds the common root interferes through",
                record.label()
            )));
        }
    };
    let denom = &plus.strength - &zero.strength;
    if denom.is_zero() {
        return Err(Error::UnsupportedCase(format!(
            "the common-root formula for {} is singular",
            record.label()
        )));
    }
    let f_plus_one = BigRational::new(BigInt::from(f.twice() + 2), BigInt::from(2));
    let scale = BigRational::from_float(a_hfs).expect("validated constant is finite");
    let common_root = big_ratio_to_f64(&(-(scale * f_plus_one * &zero.strength / denom)));

    let parallel = match solve_delta_parallel(&record)? {
        ParallelSolution::Single(root) => root,
        ParallelSolution::QuadraticPair { .. } => {
            return Err(Error::InternalConsistency(format!(
                "amplitude condition kept two roots for {} despite an exactly zero \
                 quadratic coefficient",
                record.label()
            )));
        }
    };
    let pi = solve_delta_pi(&record)?;
    let perp = solve_delta_perp(&record)?;
    let (matched, discarded_perp_root) = match perp.roots {
        PerpRoots::Pair { lower, upper } => {
            if (lower - common_root).abs() <= (upper - common_root).abs() {
                (lower, Some(upper))
            } else {
                (upper, Some(lower))
            }
        }
        PerpRoots::DegenerateLinear { root } => (root, None),
        PerpRoots::NoRealRoot => {
            return Err(Error::InternalConsistency(format!(
                "ellipticity condition lost its real roots for {}",
                record.label()
            )));
        }
    };

    for (name, value) in [("ellipticity", matched), ("amplitude", parallel), ("Raman", pi)] {
        if relative_gap(value, common_root) > COINCIDENCE_TOLERANCE {
            return Err(Error::InternalConsistency(format!(
                "{name} root {value} misses the common root {common_root} for {}",
                record.label()
            )));
        }
    }
    Ok(DipoleLimitDetunings { common_root, discarded_perp_root })
}

/// Every detuning of one record, as reported by the CLI and the scans.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetuningSet {
    /// Ellipticity-preserving pair, sorted ascending.
    pub delta_perp: (f64, f64),
    /// Equal-amplitude root.
    pub delta_parallel: f64,
    /// Stretched-state Raman zero.
    pub delta_pi: f64,
    /// The member of `delta_perp` closest to `delta_parallel`.
    pub delta_perp_nearest: f64,
    /// The assembled ellipticity condition.
    pub quadratic: QuadraticCoefficients,
}

/// Solves all three conditions for one record.
///
/// This is the three-manifold entry point: records whose ellipticity
/// condition loses a root, or whose amplitude condition has anything but a
/// single root, are refused with the reason.
pub fn solve_detunings(record: &AtomRecord) -> Result<DetuningSet> {
    let perp = solve_delta_perp(record)?;
    let (lower, upper) = match perp.roots {
        PerpRoots::Pair { lower, upper } => (lower, upper),
        PerpRoots::DegenerateLinear { .. } => {
            return Err(Error::UnsupportedCase(format!(
                "{} couples two manifolds; the two-manifold solver applies instead",
                record.label()
            )));
        }
        PerpRoots::NoRealRoot => {
            return Err(Error::UnsupportedCase(format!(
                "the ellipticity condition for {} has no real root",
                record.label()
            )));
        }
    };
    let delta_parallel = match solve_delta_parallel(record)? {
        ParallelSolution::Single(root) => root,
        ParallelSolution::QuadraticPair { .. } => {
            return Err(Error::UnsupportedCase(format!(
                "the amplitude condition for {} keeps two roots; no single \
                 equal-amplitude detuning exists",
                record.label()
            )));
        }
    };
    let delta_pi = solve_delta_pi(record)?;
    let delta_perp_nearest = if (lower - delta_parallel).abs() <= (upper - delta_parallel).abs() {
        lower
    } else {
        upper
    };
    Ok(DetuningSet {
        delta_perp: (lower, upper),
        delta_parallel,
        delta_pi,
        delta_perp_nearest,
        quadratic: perp.quadratic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_data::builtin_registry;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn record(species: &str, f: i32) -> &'static AtomRecord {
        builtin_registry().find(species, HalfInt::from_int(f)).expect("builtin record")
    }

    fn synthetic(
        nuclear_spin: HalfInt,
        ground_j: HalfInt,
        excited_j: HalfInt,
        f: HalfInt,
        zeta_plus: f64,
        zeta_minus: f64,
    ) -> AtomRecord {
        AtomRecord {
            species: "test".to_string(),
            nuclear_spin,
            ground_j,
            excited_j,
            f,
            zeta_plus,
            zeta_minus,
            b_over_a: 0.0,
            source: "synthetic".to_string(),
        }
    }

    #[test]
    fn rb87_f1_ellipticity_quadratic_and_roots() {
        let solution = solve_delta_perp(record("87Rb", 1)).unwrap();
        // Hand-assembled from the exact manifold strengths 1/24, 5/72, 1/12
        // and the splittings -156.9, 72.2.
        assert_relative_eq!(solution.quadratic.a, -1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(solution.quadratic.b, 117.675, max_relative = 1e-12);
        assert_relative_eq!(solution.quadratic.c, 4720.075, max_relative = 1e-12);
        let PerpRoots::Pair { lower, upper } = solution.roots else {
            panic!("three-manifold record must give a pair, got {:?}", solution.roots);
        };
        assert_abs_diff_eq!(lower, -36.3651, epsilon = 1e-3);
        assert_abs_diff_eq!(upper, 389.3901, epsilon = 1e-3);
        assert_eq!(solution.delta_perp_nearest, Some(upper));
    }

    #[test]
    fn rb87_f1_amplitude_and_raman_roots() {
        let parallel = solve_delta_parallel(record("87Rb", 1)).unwrap();
        let ParallelSolution::Single(root) = parallel else {
            panic!("expected the single-root structure, got {parallel:?}");
        };
        assert_abs_diff_eq!(root, 429.4237, epsilon = 1e-3);
        // zeta_plus * (5/72) / (1/24 - 5/72) reduces to -zeta_plus * 5/2.
        let pi = solve_delta_pi(record("87Rb", 1)).unwrap();
        assert_relative_eq!(pi, 392.25, max_relative = 1e-12);
    }

    #[test]
    fn raman_zeros_match_tabulated_values() {
        assert_abs_diff_eq!(solve_delta_pi(record("7Li", 1)).unwrap(), -15.0, epsilon = 0.05);
        // For F = I + 1/2 on this structure Q/(P-Q) = 1, so delta_pi is
        // exactly zeta_plus.
        assert_relative_eq!(
            solve_delta_pi(record("87Rb", 2)).unwrap(),
            record("87Rb", 2).zeta_plus,
            max_relative = 1e-14
        );
        assert_abs_diff_eq!(solve_delta_pi(record("133Cs", 3)).unwrap(), 452.9025, epsilon = 1e-3);
    }

    #[test]
    fn every_builtin_record_solves_cleanly() {
        for rec in builtin_registry().records() {
            let set = solve_detunings(rec)
                .unwrap_or_else(|err| panic!("{} failed: {err}", rec.label()));
            let (lower, upper) = set.delta_perp;
            assert!(lower < upper, "{}: roots out of order", rec.label());
            assert!(set.quadratic.a != 0.0, "{}: quadratic degenerated", rec.label());
            assert!(
                set.delta_perp_nearest == lower || set.delta_perp_nearest == upper,
                "{}: nearest root is not a root",
                rec.label()
            );
            for root in [lower, upper] {
                let p = set.quadratic;
                let value = (p.a * root + p.b) * root + p.c;
                let scale = (p.a * root * root).abs() + (p.b * root).abs() + p.c.abs();
                assert!(
                    value.abs() <= 1e-10 * scale,
                    "{}: residual {} at root {}",
                    rec.label(),
                    value / scale,
                    root
                );
            }
            assert!(set.delta_pi.is_finite() && set.delta_pi != 0.0);
        }
    }

    #[test]
    fn two_manifold_record_degenerates_to_linear() {
        // I = 1/2 kills the F-1 manifold: the ellipticity condition turns
        // linear with root -25, and the amplitude condition loses its
        // linear coefficient exactly, leaving no root.
        let rec = synthetic(
            HalfInt::HALF,
            HalfInt::HALF,
            HalfInt::THREE_HALVES,
            HalfInt::ONE,
            -100.0,
            50.0,
        );
        let perp = solve_delta_perp(&rec).unwrap();
        assert_eq!(perp.roots, PerpRoots::DegenerateLinear { root: -25.0 });
        assert_eq!(perp.quadratic.a, 0.0);
        assert_eq!(perp.delta_perp_nearest, None);
        assert!(matches!(solve_delta_parallel(&rec), Err(Error::UnsupportedCase(_))));
        assert!(matches!(solve_detunings(&rec), Err(Error::UnsupportedCase(_))));
    }

    #[test]
    fn same_sign_splittings_can_lose_both_roots() {
        // For F = 1, I = 3/2 the discriminant is (9/16)z+^2 - (5/9)z+z-,
        // negative when z- > (81/80)z+ > 0.
        let rec = synthetic(
            HalfInt::THREE_HALVES,
            HalfInt::HALF,
            HalfInt::THREE_HALVES,
            HalfInt::ONE,
            1.0,
            2.0,
        );
        let perp = solve_delta_perp(&rec).unwrap();
        assert_eq!(perp.roots, PerpRoots::NoRealRoot);
        assert_eq!(perp.delta_perp_nearest, None);
        assert!(matches!(solve_detunings(&rec), Err(Error::UnsupportedCase(_))));
    }

    #[test]
    fn two_manifold_solver_reproduces_hand_values() {
        // F = I - 1/2 pattern: strengths 1/12 and 1/36 give delta_perp =
        // zeta_plus/4 and delta_parallel = 2*zeta_plus.
        let lower = synthetic(
            HalfInt::THREE_HALVES,
            HalfInt::HALF,
            HalfInt::HALF,
            HalfInt::ONE,
            100.0,
            -50.0,
        );
        let d1 = solve_d1(&lower).unwrap();
        assert_relative_eq!(d1.delta_perp, 25.0, max_relative = 1e-14);
        assert_relative_eq!(d1.delta_parallel, 200.0, max_relative = 1e-14);

        // F = I + 1/2 pattern: strengths 1/20 and 1/12 give delta_perp =
        // -zeta_minus/4 and delta_parallel = 2*zeta_minus.
        let upper = synthetic(
            HalfInt::THREE_HALVES,
            HalfInt::HALF,
            HalfInt::HALF,
            HalfInt::from_int(2),
            -40.0,
            80.0,
        );
        let d1 = solve_d1(&upper).unwrap();
        assert_relative_eq!(d1.delta_perp, -20.0, max_relative = 1e-14);
        assert_relative_eq!(d1.delta_parallel, 160.0, max_relative = 1e-14);
        assert!(d1.delta_perp != d1.delta_parallel);
    }

    #[test]
    fn two_manifold_solver_rejects_wrong_structures() {
        // A three-manifold record.
        assert!(matches!(solve_d1(record("87Rb", 1)), Err(Error::InvalidArgument(_))));
        // J' = J but three manifolds couple.
        let rec = synthetic(
            HalfInt::ONE,
            HalfInt::ONE,
            HalfInt::ONE,
            HalfInt::ONE,
            60.0,
            -45.0,
        );
        assert!(matches!(solve_d1(&rec), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn existence_classification_matches_known_cases() {
        for f in 1..=4 {
            for branch in [-1, 1] {
                let i = HalfInt::from_twice(2 * f + branch);
                let result =
                    magic_exists(HalfInt::HALF, HalfInt::THREE_HALVES, HalfInt::from_int(f), i)
                        .unwrap();
                assert!(result.exists, "F = {f}, I = {i} must classify as magic");
                assert_eq!(result.residual, 0.0);
            }
        }
        let high =
            magic_exists(HalfInt::from_int(2), HalfInt::from_int(3), HalfInt::from_int(5), HalfInt::from_int(4))
                .unwrap();
        assert!(high.exists);
        assert_eq!(high.residual, 0.0);

        let absent =
            magic_exists(HalfInt::ONE, HalfInt::from_int(2), HalfInt::from_int(3), HalfInt::from_int(2))
                .unwrap();
        assert!(!absent.exists);
        // The exact coefficient for this structure is 4/75.
        assert_relative_eq!(absent.residual, 4.0 / 75.0, max_relative = 1e-14);
    }

    #[test]
    fn existence_classification_rejects_bad_lines() {
        assert!(matches!(
            magic_exists(HalfInt::HALF, HalfInt::HALF, HalfInt::ONE, HalfInt::THREE_HALVES),
            Err(Error::UnsupportedCase(_))
        ));
        assert!(matches!(
            magic_exists(HalfInt::HALF, HalfInt::THREE_HALVES, HalfInt::from_int(3), HalfInt::THREE_HALVES),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn dipole_limit_roots_coincide() {
        let result = dipole_limit_detunings(
            1000.0,
            HalfInt::ONE,
            HalfInt::THREE_HALVES,
            HalfInt::HALF,
            HalfInt::THREE_HALVES,
        )
        .unwrap();
        assert_relative_eq!(result.common_root, 5000.0, max_relative = 1e-12);
        assert_relative_eq!(result.discarded_perp_root.unwrap(), -500.0, max_relative = 1e-9);

        let negative = dipole_limit_detunings(
            -100.0,
            HalfInt::ONE,
            HalfInt::THREE_HALVES,
            HalfInt::HALF,
            HalfInt::THREE_HALVES,
        )
        .unwrap();
        assert_relative_eq!(negative.common_root, -500.0, max_relative = 1e-12);
        assert_relative_eq!(negative.discarded_perp_root.unwrap(), 50.0, max_relative = 1e-9);
    }

    #[test]
    fn dipole_limit_scales_linearly() {
        let base = dipole_limit_detunings(
            7.0,
            HalfInt::from_int(2),
            HalfInt::from_twice(5),
            HalfInt::HALF,
            HalfInt::THREE_HALVES,
        )
        .unwrap();
        let doubled = dipole_limit_detunings(
            14.0,
            HalfInt::from_int(2),
            HalfInt::from_twice(5),
            HalfInt::HALF,
            HalfInt::THREE_HALVES,
        )
        .unwrap();
        assert_eq!(doubled.common_root, 2.0 * base.common_root);
    }

    #[test]
    fn dipole_limit_refuses_degenerate_spin() {
        // I = 1/2 passes the existence test but the amplitude condition
        // degenerates, so no common root can be certified.
        let result = dipole_limit_detunings(
            1000.0,
            HalfInt::ONE,
            HalfInt::HALF,
            HalfInt::HALF,
            HalfInt::THREE_HALVES,
        );
        assert!(matches!(result, Err(Error::UnsupportedCase(_))));
        assert!(matches!(
            dipole_limit_detunings(
                1000.0,
                HalfInt::from_int(3),
                HalfInt::from_int(2),
                HalfInt::ONE,
                HalfInt::from_int(2)
            ),
            Err(Error::UnsupportedCase(_))
        ));
    }
}
