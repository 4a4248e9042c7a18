//! ac Stark shifts of the ground Zeeman states under the elliptical drive,
//! and their decomposition into scalar, vector and tensor parts.
//!
//! Energies are in reduced units (squared reduced dipole element times field
//! intensity per 2π·MHz, with hbar = 1). Every claim exposed here concerns
//! the m dependence of the shift, which is invariant under that unit choice.

use crate::atomic_data::AtomRecord;
use crate::dipole::record_table;
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::polarizability::{check_poles, drive_weights, normalizer_state, DriveConfig, DEFAULT_POLE_EXCLUSION};

/// The shift of one Zeeman state at one drive intensity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarkShift {
    pub m: HalfInt,
    /// Energy in reduced units; real and linear in the intensity.
    pub energy: f64,
    /// The squared field amplitude the shift was evaluated at.
    pub intensity: f64,
}

/// Coefficients of the exact quadratic `c0 + c1 m + c2 m^2` reproducing the
/// per-unit-intensity shift of every state in the manifold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarkDecomposition {
    /// State-independent part `c0`.
    pub scalar: f64,
    /// Coefficient `c1` of `m`; carries the drive's circular imbalance.
    pub vector_coeff: f64,
    /// Coefficient `c2` of `m^2`.
    pub tensor_coeff: f64,
}

fn shift_profile(record: &AtomRecord, theta: f64, delta: f64) -> Result<Vec<(HalfInt, f64)>> {
    record.validate()?;
    DriveConfig::new(theta, delta)?;
    check_poles(record, delta, DEFAULT_POLE_EXCLUSION)?;
    let table = record_table(record)?;
    let inverse: Vec<f64> = table
        .lines()
        .iter()
        .map(|line| 1.0 / (delta + record.zeta(line.l)))
        .collect();
    let (cos_t, sin_t) = drive_weights(theta);
    let (cos2, sin2) = (cos_t * cos_t, sin_t * sin_t);
    Ok(table
        .m_values()
        .map(|m| {
            let row = table.elements(m);
            let mut sum = 0.0;
            for (idx, weight) in inverse.iter().enumerate() {
                sum += (cos2 * row[idx].r * row[idx].r + sin2 * row[idx].s * row[idx].s) * weight;
            }
            (m, 2.0 * sum)
        })
        .collect())
}

/// The ac Stark shift of `|F, m>` at drive intensity `intensity`.
pub fn ac_stark_shift(
    record: &AtomRecord,
    m: HalfInt,
    theta: f64,
    delta: f64,
    intensity: f64,
) -> Result<f64> {
    if !intensity.is_finite() || intensity < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "intensity must be nonnegative, got {intensity}"
        )));
    }
    let profile = shift_profile(record, theta, delta)?;
    profile
        .iter()
        .find(|(state, _)| *state == m)
        .map(|(_, unit)| unit * intensity)
        .ok_or_else(|| {
            Error::InvalidArgument(format!("m = {m} is not a state of the F = {} manifold", record.f))
        })
}

/// The shifts of every state in the manifold at one drive intensity.
pub fn stark_shifts(
    record: &AtomRecord,
    theta: f64,
    delta: f64,
    intensity: f64,
) -> Result<Vec<StarkShift>> {
    if !intensity.is_finite() || intensity < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "intensity must be nonnegative, got {intensity}"
        )));
    }
    Ok(shift_profile(record, theta, delta)?
        .into_iter()
        .map(|(m, unit)| StarkShift { m, energy: unit * intensity, intensity })
        .collect())
}

/// Fits the per-unit-intensity shift profile to `c0 + c1 m + c2 m^2`.
///
/// The shift is an exact quadratic in `m`, so three states determine the
/// coefficients and the remaining states are used as a consistency check;
/// any fit residual above 1e-12 of the profile scale is reported as an
/// internal error rather than returned as data.
pub fn stark_decompose(record: &AtomRecord, theta: f64, delta: f64) -> Result<StarkDecomposition> {
    let profile = shift_profile(record, theta, delta)?;
    let lookup = |m: HalfInt| {
        profile
            .iter()
            .find(|(state, _)| *state == m)
            .map(|(_, unit)| *unit)
            .expect("profile covers the manifold")
    };
    let f = record.f;
    let f_value = f.to_f64();

    let (scalar, vector_coeff, tensor_coeff) = if f.twice() == 0 {
        (lookup(f), 0.0, 0.0)
    } else if f.twice() == 1 {
        let (up, down) = (lookup(f), lookup(-f));
        ((up + down) / 2.0, up - down, 0.0)
    } else {
        let (up, down) = (lookup(f), lookup(-f));
        let m0 = normalizer_state(f);
        let center = lookup(m0);
        let odd = (up - down) / (2.0 * f_value);
        let even = (up + down) / 2.0;
        if m0 == HalfInt::ZERO {
            (center, odd, (even - center) / (f_value * f_value))
        } else {
            // Half-integer manifold: the reference state sits at m = 1/2.
            let c2 = (even - center + odd / 2.0) / (f_value * f_value - 0.25);
            (center - odd / 2.0 - c2 / 4.0, odd, c2)
        }
    };

    let scale = profile.iter().map(|(_, unit)| unit.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for (m, unit) in &profile {
        let m_value = m.to_f64();
        let fitted = scalar + vector_coeff * m_value + tensor_coeff * m_value * m_value;
        if (unit - fitted).abs() > 1e-12 * scale {
            return Err(Error::InternalConsistency(format!(
                "shift profile of {} deviates from its quadratic at m = {m} by {:e}",
                record.label(),
                unit - fitted
            )));
        }
    }
    Ok(StarkDecomposition { scalar, vector_coeff, tensor_coeff })
}
