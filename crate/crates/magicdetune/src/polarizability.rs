//! The generalized polarizability tensor for one record and drive, the
//! scale-free residuals of the three state-independence conditions, and the
//! scalar figure of merit measuring how far the tensor sits from its ideal
//! state-independent form.
//!
//! The drive is an elliptical field `cos(theta)·e+ + sin(theta)·e-` whose
//! ellipse anchors the output basis: the parallel output is the drive's own
//! polarization, the perpendicular output its orthogonal partner in the
//! transverse plane, and pi the axial component. A tensor entry
//! `alpha[n, m, mu]` is the amplitude for scattering into output `mu` while
//! the atom moves from Zeeman state `m` to `n`, summed over the coupled
//! excited manifolds at their respective detunings `delta + zeta_l`. Entries
//! are in reduced dipole units per 2π·MHz and are real away from the poles.

use std::f64::consts::FRAC_PI_2;

use crate::atomic_data::AtomRecord;
use crate::dipole::record_table;
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::wigner::big_ratio_to_f64;

/// Default half-width of the window around each resonance inside which
/// evaluations are refused, in 2π·MHz. Small enough to keep the lithium
/// detunings, which sit within a few linewidths of resonance, computable.
pub const DEFAULT_POLE_EXCLUSION: f64 = 1e-6;

/// Drops trigonometric rounding dust so pure circular drives produce exact
/// structural zeros.
pub(crate) fn drive_weights(theta: f64) -> (f64, f64) {
    let snap = |value: f64| if value.abs() < 1e-12 { 0.0 } else { value };
    (snap(theta.cos()), snap(theta.sin()))
}

/// The Zeeman state whose diagonal entry normalizes scale-free quantities:
/// `m = 0` for integer `F`, `m = 1/2` for half-integer `F`.
pub(crate) fn normalizer_state(f: HalfInt) -> HalfInt {
    HalfInt::from_twice(f.twice() % 2)
}

/// Refuses detunings within `exclusion` of any coupled resonance.
pub(crate) fn check_poles(record: &AtomRecord, delta: f64, exclusion: f64) -> Result<()> {
    let table = record_table(record)?;
    for line in table.lines() {
        let resonance = -record.zeta(line.l);
        if (delta - resonance).abs() <= exclusion {
            return Err(Error::PoleProximity { resonance });
        }
    }
    Ok(())
}

/// Ellipticity angle and detuning of the drive field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveConfig {
    theta: f64,
    delta: f64,
    pole_exclusion: f64,
}

impl DriveConfig {
    /// A drive with ellipticity `theta` (π/4 is linear, 0 and π/2 are the
    /// two circular polarizations) at detuning `delta` from the `F' = F`
    /// line, in 2π·MHz, using the default pole-exclusion radius.
    pub fn new(theta: f64, delta: f64) -> Result<DriveConfig> {
        if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidArgument(format!(
                "ellipticity angle must lie in [0, pi/2], got {theta}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "detuning must be finite, got {delta}"
            )));
        }
        Ok(DriveConfig { theta, delta, pole_exclusion: DEFAULT_POLE_EXCLUSION })
    }

    /// Replaces the pole-exclusion radius (2π·MHz, strictly positive).
    pub fn with_pole_exclusion(mut self, radius: f64) -> Result<DriveConfig> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "pole-exclusion radius must be positive, got {radius}"
            )));
        }
        self.pole_exclusion = radius;
        Ok(self)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn pole_exclusion(&self) -> f64 {
        self.pole_exclusion
    }
}

/// Output polarization index of a tensor entry. `Plus`, `Minus` and `Pi`
/// are the spherical components; `Parallel` and `Perpendicular` are their
/// rotation into the basis anchored to the drive ellipse.
#[derive(Clone, Copy, Debug, Eq, Hash, PartialEq)]
pub enum OutputPolarization {
    Plus,
    Minus,
    Pi,
    Parallel,
    Perpendicular,
}

/// Per-initial-state scattering sums over the coupled manifolds, each
/// weighted by the inverse detuning of its line.
#[derive(Clone, Copy, Debug, Default)]
struct ChannelSums {
    /// sigma+ in, sigma+ out, state unchanged.
    rr: f64,
    /// sigma- in, sigma- out, state unchanged.
    ss: f64,
    /// sigma+ in, sigma- out, state raised by two.
    rs_up: f64,
    /// sigma- in, sigma+ out, state lowered by two.
    rs_down: f64,
    /// sigma+ in, pi out, state raised by one.
    rt_up: f64,
    /// sigma- in, pi out, state lowered by one.
    st_down: f64,
}

/// The generalized polarizability of one record under one drive.
#[derive(Clone, Debug)]
pub struct PolarizabilityTensor {
    two_f: i32,
    theta: f64,
    delta: f64,
    cos_t: f64,
    sin_t: f64,
    rows: Vec<ChannelSums>,
}

impl PolarizabilityTensor {
    pub fn f(&self) -> HalfInt {
        HalfInt::from_twice(self.two_f)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Ground-state projections `-F ..= F`.
    pub fn m_values(&self) -> impl Iterator<Item = HalfInt> + '_ {
        (-self.two_f..=self.two_f).step_by(2).map(HalfInt::from_twice)
    }

    /// Whether `m` is a state of this manifold.
    pub fn holds(&self, m: HalfInt) -> bool {
        m.twice().abs() <= self.two_f && (m.twice() - self.two_f) % 2 == 0
    }

    /// The state normalizing scale-free quantities built from this tensor.
    pub fn reference_state(&self) -> HalfInt {
        normalizer_state(self.f())
    }

    /// The diagonal parallel entry of the reference state, failing when it
    /// is too small to divide by.
    pub fn reference_entry(&self) -> Result<f64> {
        let m0 = self.reference_state();
        let value = self.entry(m0, m0, OutputPolarization::Parallel);
        if value.is_normal() {
            Ok(value)
        } else {
            Err(Error::VanishingNormalizer(format!(
                "diagonal entry of m = {m0} is {value} at detuning {}",
                self.delta
            )))
        }
    }

    fn sums(&self, m: HalfInt) -> &ChannelSums {
        assert!(self.holds(m), "m = {m} is not a state of this manifold");
        &self.rows[((m.twice() + self.two_f) / 2) as usize]
    }

    /// The amplitude for scattering into output `mu` while the atom moves
    /// from `m` to `n`. The initial state must belong to the manifold; a
    /// final state outside it gives zero.
    pub fn entry(&self, n: HalfInt, m: HalfInt, mu: OutputPolarization) -> f64 {
        let sums = self.sums(m);
        if !self.holds(n) {
            return 0.0;
        }
        let step = (n.twice() - m.twice()) / 2;
        match mu {
            OutputPolarization::Plus => match step {
                0 => -self.cos_t * sums.rr,
                -2 => -self.sin_t * sums.rs_down,
                _ => 0.0,
            },
            OutputPolarization::Minus => match step {
                0 => -self.sin_t * sums.ss,
                2 => -self.cos_t * sums.rs_up,
                _ => 0.0,
            },
            OutputPolarization::Pi => match step {
                1 => -self.cos_t * sums.rt_up,
                -1 => -self.sin_t * sums.st_down,
                _ => 0.0,
            },
            OutputPolarization::Parallel => {
                self.cos_t * self.entry(n, m, OutputPolarization::Plus)
                    + self.sin_t * self.entry(n, m, OutputPolarization::Minus)
            }
            OutputPolarization::Perpendicular => {
                self.sin_t * self.entry(n, m, OutputPolarization::Plus)
                    - self.cos_t * self.entry(n, m, OutputPolarization::Minus)
            }
        }
    }
}

/// Builds the full tensor for one record under one drive.
pub fn generalized_polarizability(
    record: &AtomRecord,
    drive: DriveConfig,
) -> Result<PolarizabilityTensor> {
    record.validate()?;
    check_poles(record, drive.delta, drive.pole_exclusion)?;
    let table = record_table(record)?;
    let inverse: Vec<f64> = table
        .lines()
        .iter()
        .map(|line| 1.0 / (drive.delta + record.zeta(line.l)))
        .collect();
    let (cos_t, sin_t) = drive_weights(drive.theta);

    let two = HalfInt::from_int(2);
    let rows = table
        .m_values()
        .map(|m| {
            let own = table.elements(m);
            let mut sums = ChannelSums::default();
            for (idx, weight) in inverse.iter().enumerate() {
                let triple = own[idx];
                sums.rr += triple.r * triple.r * weight;
                sums.ss += triple.s * triple.s * weight;
                if table.holds(m + two) {
                    sums.rs_up += triple.r * table.elements(m + two)[idx].s * weight;
                }
                if table.holds(m - two) {
                    sums.rs_down += triple.s * table.elements(m - two)[idx].r * weight;
                }
                if table.holds(m + HalfInt::ONE) {
                    sums.rt_up += triple.r * table.elements(m + HalfInt::ONE)[idx].t * weight;
                }
                if table.holds(m - HalfInt::ONE) {
                    sums.st_down += triple.s * table.elements(m - HalfInt::ONE)[idx].t * weight;
                }
            }
            sums
        })
        .collect();

    Ok(PolarizabilityTensor {
        two_f: record.f.twice(),
        theta: drive.theta,
        delta: drive.delta,
        cos_t,
        sin_t,
        rows,
    })
}

/// Scale-free residuals of the three state-independence conditions at one
/// detuning, each normalized by the total scattering weight
/// `sum of strength / |delta + zeta|` over the coupled manifolds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionResiduals {
    /// Slope in `m` of the handedness imbalance; zero exactly when the
    /// scattered ellipticity matches the drive for every state.
    pub perp_residual: f64,
    /// Quadratic-in-`m` coefficient of the summed scattering amplitude;
    /// zero exactly when every state scatters with equal amplitude.
    pub parallel_residual: f64,
    /// Largest circular two-photon amplitude over the `m -> m+2` channels.
    pub raman_circ_residual: f64,
    /// The stretched-path interference scalar whose zero closes the pi
    /// two-photon channel.
    pub raman_pi_scalar_residual: f64,
}

/// Evaluates the three condition residuals for one record at one detuning.
/// A single-state manifold (`F = 0`) has no state dependence to measure and
/// returns all zeros.
pub fn condition_residuals(record: &AtomRecord, delta: f64) -> Result<ConditionResiduals> {
    record.validate()?;
    check_poles(record, delta, DEFAULT_POLE_EXCLUSION)?;
    let table = record_table(record)?;
    let zeros = ConditionResiduals {
        perp_residual: 0.0,
        parallel_residual: 0.0,
        raman_circ_residual: 0.0,
        raman_pi_scalar_residual: 0.0,
    };
    if record.f.twice() == 0 {
        return Ok(zeros);
    }

    let inverse: Vec<f64> = table
        .lines()
        .iter()
        .map(|line| 1.0 / (delta + record.zeta(line.l)))
        .collect();
    let normalizer: f64 = table
        .lines()
        .iter()
        .zip(&inverse)
        .map(|(line, weight)| big_ratio_to_f64(line.strength()) * weight.abs())
        .sum();

    // D(m) is odd and linear in m; S(m) is even and quadratic.
    let channel = |m: HalfInt| {
        let own = table.elements(m);
        let mut difference = 0.0;
        let mut total = 0.0;
        for (idx, weight) in inverse.iter().enumerate() {
            let (r2, s2) = (own[idx].r * own[idx].r, own[idx].s * own[idx].s);
            difference += (r2 - s2) * weight;
            total += (r2 + s2) * weight;
        }
        (difference, total)
    };

    let f_value = record.f.to_f64();
    let (difference_top, total_top) = channel(record.f);
    let perp_residual = difference_top / f_value / normalizer;

    let m0 = normalizer_state(record.f);
    let parallel_residual = if m0 == record.f {
        0.0
    } else {
        let (_, total_ref) = channel(m0);
        let span = f_value * f_value - m0.to_f64() * m0.to_f64();
        (total_top - total_ref) / span / normalizer
    };

    let two = HalfInt::from_int(2);
    let mut largest_circular: f64 = 0.0;
    for m in table.m_values() {
        if !table.holds(m + two) {
            continue;
        }
        let own = table.elements(m);
        let partner = table.elements(m + two);
        let mut amplitude = 0.0;
        for (idx, weight) in inverse.iter().enumerate() {
            amplitude += own[idx].r * partner[idx].s * weight;
        }
        largest_circular = largest_circular.max(amplitude.abs());
    }
    let raman_circ_residual = largest_circular / normalizer;

    let raman_pi_scalar_residual = match (table.line(1), table.line(0)) {
        (Some(plus), Some(center)) => {
            let p = big_ratio_to_f64(plus.strength());
            let q = big_ratio_to_f64(center.strength());
            let scale = f_value * (4.0 * f_value + 2.0);
            scale * (q / delta - p / (delta + record.zeta(1))) / normalizer
        }
        _ => 0.0,
    };

    Ok(ConditionResiduals {
        perp_residual,
        parallel_residual,
        raman_circ_residual,
        raman_pi_scalar_residual,
    })
}

/// The scalar state-dependence measure split by scattering class. `total`
/// is the sum of the four classes: the squared normalized deviations of
/// every tensor entry from the ideal diagonal, state-independent,
/// parallel-only form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagicDistanceComponents {
    pub total: f64,
    /// Rayleigh entries leaking into the perpendicular output.
    pub perp_rayleigh: f64,
    /// Spread of the diagonal parallel entries across states.
    pub par_rayleigh: f64,
    /// Two-photon `m -> m±2` channels, both outputs.
    pub raman_circ: f64,
    /// Two-photon `m -> m±1` channels into the pi output.
    pub raman_pi: f64,
}

/// Evaluates the state-dependence measure and its class decomposition.
pub fn magic_distance_components(
    record: &AtomRecord,
    theta: f64,
    delta: f64,
) -> Result<MagicDistanceComponents> {
    let drive = DriveConfig::new(theta, delta)?;
    let tensor = generalized_polarizability(record, drive)?;
    let reference = tensor.reference_entry()?;
    let mut components = MagicDistanceComponents {
        total: 0.0,
        perp_rayleigh: 0.0,
        par_rayleigh: 0.0,
        raman_circ: 0.0,
        raman_pi: 0.0,
    };
    use OutputPolarization::{Parallel, Perpendicular, Pi};
    for m in tensor.m_values() {
        let parallel = tensor.entry(m, m, Parallel);
        components.par_rayleigh += ((parallel - reference) / reference).powi(2);
        components.perp_rayleigh += (tensor.entry(m, m, Perpendicular) / reference).powi(2);
        for step in [2, -2] {
            let n = m + HalfInt::from_int(step);
            if tensor.holds(n) {
                let along = tensor.entry(n, m, Parallel) / reference;
                let across = tensor.entry(n, m, Perpendicular) / reference;
                components.raman_circ += along * along + across * across;
            }
        }
        for step in [1, -1] {
            let n = m + HalfInt::from_int(step);
            if tensor.holds(n) {
                components.raman_pi += (tensor.entry(n, m, Pi) / reference).powi(2);
            }
        }
    }
    components.total = components.par_rayleigh
        + components.perp_rayleigh
        + components.raman_circ
        + components.raman_pi;
    Ok(components)
}

/// The scalar state-dependence measure `M(F, delta)`.
pub fn magic_distance(record: &AtomRecord, theta: f64, delta: f64) -> Result<f64> {
    Ok(magic_distance_components(record, theta, delta)?.total)
}
