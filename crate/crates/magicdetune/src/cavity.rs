//! Effective cavity-QED coefficients after adiabatic elimination of the
//! excited manifolds, their reduction to the drive-anchored basis, and the
//! closed-form steady state of the driven, damped cavity mode.
//!
//! The model is a two-mode cavity (one per circular polarization) coupled to
//! atoms driven by the elliptical field. Eliminating the excited states at
//! detuning `delta` leaves per-state dispersive shifts, cross-mode coupling,
//! drive-induced cavity scattering, and two-photon terms, each a sum over
//! the coupled manifolds weighted by the inverse line detunings. All
//! frequencies are in 2π·MHz with dipole factors in reduced units.

use crate::atomic_data::AtomRecord;
use crate::dipole::record_table;
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::polarizability::{check_poles, drive_weights, DEFAULT_POLE_EXCLUSION};
use std::f64::consts::FRAC_PI_2;

/// Drive, cavity and atom-placement parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CavityConfig {
    /// Single-atom cavity coupling in 2π·MHz.
    pub g: f64,
    /// Drive Rabi frequency in 2π·MHz.
    pub omega_rabi: f64,
    /// Cavity linewidth in 2π·MHz; must be positive.
    pub kappa: f64,
    /// Drive-cavity detuning in 2π·MHz.
    pub delta_c: f64,
    /// Drive ellipticity angle in `[0, pi/2]`.
    pub theta: f64,
    /// Standing-wave phases `phi_j`, one per atom, giving `g_j = g sin(phi_j)`.
    pub couplings: Vec<f64>,
}

impl CavityConfig {
    fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("g", self.g),
            ("omega_rabi", self.omega_rabi),
            ("kappa", self.kappa),
            ("delta_c", self.delta_c),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite, got {value}")));
            }
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cavity linewidth must be positive, got {}",
                self.kappa
            )));
        }
        if !self.theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return Err(Error::InvalidArgument(format!(
                "ellipticity angle must lie in [0, pi/2], got {}",
                self.theta
            )));
        }
        if self.couplings.iter().any(|phi| !phi.is_finite()) {
            return Err(Error::InvalidArgument("atom phases must be finite".into()));
        }
        Ok(())
    }
}

/// The eliminated-Hamiltonian coefficients for one Zeeman state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityCoefficients {
    pub m: HalfInt,
    /// Dispersive shift of the sigma+ cavity mode.
    pub u_a: f64,
    /// Dispersive shift of the sigma- cavity mode.
    pub u_b: f64,
    /// Drive-induced level shift.
    pub omega: f64,
    /// Two-photon drive-drive coupling taking `m` to `m+2`.
    pub omega_tilde: f64,
    /// Two-photon cavity-cavity coupling taking `m` to `m+2`.
    pub h: f64,
    /// Rayleigh scattering of the drive into the sigma+ mode.
    pub eta_plus_ray: f64,
    /// Rayleigh scattering of the drive into the sigma- mode.
    pub eta_minus_ray: f64,
    /// Raman scattering of the drive into the cavity, taking `m` to `m+2`.
    pub eta_raman: f64,
}

/// Coefficients for every state of the manifold, with a validity note when
/// the drive is too strong for the elimination to be trustworthy.
#[derive(Clone, Debug)]
pub struct EffectiveCavityParams {
    pub rows: Vec<CavityCoefficients>,
    /// Set when `omega_rabi` exceeds a tenth of the smallest line detuning.
    pub validity_warning: Option<String>,
}

impl EffectiveCavityParams {
    /// The coefficients of one state.
    pub fn row(&self, m: HalfInt) -> Option<&CavityCoefficients> {
        self.rows.iter().find(|row| row.m == m)
    }
}

/// Computes the eliminated-Hamiltonian coefficients for every state.
pub fn effective_params(
    record: &AtomRecord,
    cfg: &CavityConfig,
    delta: f64,
) -> Result<EffectiveCavityParams> {
    record.validate()?;
    cfg.validate()?;
    if !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("detuning must be finite, got {delta}")));
    }
    check_poles(record, delta, DEFAULT_POLE_EXCLUSION)?;
    let table = record_table(record)?;
    let inverse: Vec<f64> = table
        .lines()
        .iter()
        .map(|line| 1.0 / (delta + record.zeta(line.l)))
        .collect();
    let (cos_t, sin_t) = drive_weights(cfg.theta);
    let g2 = cfg.g * cfg.g;
    let omega2 = cfg.omega_rabi * cfg.omega_rabi;
    let g_omega = cfg.g * cfg.omega_rabi;
    let two = HalfInt::from_int(2);

    let rows = table
        .m_values()
        .map(|m| {
            let own = table.elements(m);
            let mut sum_rr = 0.0;
            let mut sum_ss = 0.0;
            let mut sum_rs = 0.0;
            for (idx, weight) in inverse.iter().enumerate() {
                sum_rr += own[idx].r * own[idx].r * weight;
                sum_ss += own[idx].s * own[idx].s * weight;
                if table.holds(m + two) {
                    sum_rs += own[idx].r * table.elements(m + two)[idx].s * weight;
                }
            }
            CavityCoefficients {
                m,
                u_a: g2 * sum_rr,
                u_b: g2 * sum_ss,
                omega: omega2 * (cos_t * cos_t * sum_rr + sin_t * sin_t * sum_ss) / 4.0,
                omega_tilde: omega2 * cos_t * sin_t * sum_rs / 4.0,
                h: g2 * sum_rs,
                eta_plus_ray: g_omega * cos_t * sum_rr / 2.0,
                eta_minus_ray: g_omega * sin_t * sum_ss / 2.0,
                eta_raman: g_omega * sum_rs / 2.0,
            }
        })
        .collect();

    let smallest_line_detuning = inverse
        .iter()
        .map(|weight| 1.0 / weight.abs())
        .fold(f64::INFINITY, f64::min);
    let validity_warning = (cfg.omega_rabi.abs() > 0.1 * smallest_line_detuning).then(|| {
        format!(
            "drive Rabi frequency {} exceeds a tenth of the smallest line detuning {:.3}; \
             the adiabatic elimination is marginal",
            cfg.omega_rabi, smallest_line_detuning
        )
    });

    Ok(EffectiveCavityParams { rows, validity_warning })
}

/// One state's coefficients rotated into the drive-anchored mode basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParallelBasisRow {
    pub m: HalfInt,
    /// Dispersive shift of the parallel mode.
    pub u_par: f64,
    /// Dispersive shift of the perpendicular mode.
    pub u_perp: f64,
    /// Drive scattering rate into the parallel mode.
    pub eta_par: f64,
}

/// The drive-anchored reduction and its residual state dependence.
#[derive(Clone, Debug)]
pub struct ParallelBasisParams {
    pub rows: Vec<ParallelBasisRow>,
    /// Largest relative deviation of `u_par` or `eta_par` from its
    /// m-averaged value; vanishes at a magic detuning.
    pub m_spread: f64,
}

/// Rotates the per-state coefficients into the basis aligned with the drive
/// ellipse and measures how state-dependent the result still is.
pub fn parallel_basis_params(params: &EffectiveCavityParams, theta: f64) -> ParallelBasisParams {
    let (cos_t, sin_t) = drive_weights(theta);
    let (cos2, sin2) = (cos_t * cos_t, sin_t * sin_t);
    let rows: Vec<ParallelBasisRow> = params
        .rows
        .iter()
        .map(|row| ParallelBasisRow {
            m: row.m,
            u_par: cos2 * row.u_a + sin2 * row.u_b,
            u_perp: sin2 * row.u_a + cos2 * row.u_b,
            eta_par: cos_t * row.eta_plus_ray + sin_t * row.eta_minus_ray,
        })
        .collect();

    let spread = |values: &[f64]| {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let scale = mean.abs().max(f64::MIN_POSITIVE);
        values.iter().map(|v| (v - mean).abs() / scale).fold(0.0, f64::max)
    };
    let u_values: Vec<f64> = rows.iter().map(|row| row.u_par).collect();
    let eta_values: Vec<f64> = rows.iter().map(|row| row.eta_par).collect();
    let m_spread = spread(&u_values).max(spread(&eta_values));

    ParallelBasisParams { rows, m_spread }
}

/// Steady state of the driven, damped parallel mode with many atoms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyState {
    /// Collective drive amplitude `eta_par · sum_j sin(phi_j)`.
    pub drive_sum: f64,
    /// Collective dispersive shift `u_par · sum_j sin²(phi_j)`.
    pub shift_sum: f64,
    /// Intracavity photon number of the displaced steady state.
    pub photon_number: f64,
}

/// Closes the driven-damped mode equations for `N` identical atoms at the
/// phases in `cfg.couplings`, all sharing the same m-independent `u_par`
/// and `eta_par`.
pub fn multi_atom_steady_state(
    cfg: &CavityConfig,
    u_par: f64,
    eta_par: f64,
) -> Result<SteadyState> {
    cfg.validate()?;
    let drive_sum: f64 = eta_par * cfg.couplings.iter().map(|phi| phi.sin()).sum::<f64>();
    let shift_sum: f64 =
        u_par * cfg.couplings.iter().map(|phi| phi.sin() * phi.sin()).sum::<f64>();
    let detuned = cfg.delta_c + shift_sum;
    let photon_number = drive_sum * drive_sum / (detuned * detuned + cfg.kappa * cfg.kappa);
    Ok(SteadyState { drive_sum, shift_sum, photon_number })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_data::builtin_registry;
    use crate::detunings::{dipole_limit_detunings, solve_detunings};
    use crate::dipole::{dipole_element, DipoleKind};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn record(species: &str, f: i32) -> &'static AtomRecord {
        builtin_registry().find(species, HalfInt::from_int(f)).expect("builtin record")
    }

    fn config(theta: f64) -> CavityConfig {
        CavityConfig {
            g: 1.0,
            omega_rabi: 1.0,
            kappa: 0.5,
            delta_c: 0.0,
            theta,
            couplings: vec![FRAC_PI_2],
        }
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let mut cfg = config(FRAC_PI_4);
        cfg.kappa = 0.0;
        assert!(matches!(
            multi_atom_steady_state(&cfg, 1.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        let mut cfg = config(FRAC_PI_4);
        cfg.theta = 2.0;
        assert!(effective_params(record("87Rb", 1), &cfg, 391.2).is_err());
    }

    #[test]
    fn dispersive_shift_matches_direct_line_sum() {
        let rec = record("87Rb", 1);
        let delta = 391.2;
        let cfg = config(FRAC_PI_4);
        let params = effective_params(rec, &cfg, delta).unwrap();
        for row in &params.rows {
            let mut expected = 0.0;
            for l in [1, 0, -1] {
                let fp = rec.f + HalfInt::from_int(l);
                let r = dipole_element(
                    DipoleKind::SigmaPlus,
                    row.m,
                    rec.f,
                    fp,
                    rec.nuclear_spin,
                    rec.ground_j,
                    rec.excited_j,
                )
                .unwrap();
                expected += cfg.g * cfg.g * r * r / (delta + rec.zeta(l));
            }
            assert_relative_eq!(row.u_a, expected, max_relative = 1e-13, epsilon = 1e-18);
        }
        assert!(params.validity_warning.is_none());
    }

    #[test]
    fn strong_drives_carry_a_validity_warning() {
        let rec = record("87Rb", 1);
        let mut cfg = config(FRAC_PI_4);
        cfg.omega_rabi = 100.0;
        let params = effective_params(rec, &cfg, 391.2).unwrap();
        assert!(params.validity_warning.is_some());
    }

    #[test]
    fn pure_circular_drive_scatters_into_one_mode() {
        let rec = record("133Cs", 3);
        let params = effective_params(rec, &config(0.0), 452.99).unwrap();
        for row in &params.rows {
            assert_eq!(row.eta_minus_ray, 0.0);
            assert!(row.eta_plus_ray != 0.0);
            assert_eq!(row.omega_tilde, 0.0);
        }
    }

    #[test]
    fn handedness_swap_mirrors_the_coefficients() {
        let rec = record("87Rb", 2);
        let delta = -300.0;
        let theta = 0.35;
        let direct = effective_params(rec, &config(theta), delta).unwrap();
        let swapped = effective_params(rec, &config(FRAC_PI_2 - theta), delta).unwrap();
        for row in &direct.rows {
            let mirror = swapped.row(-row.m).unwrap();
            assert_relative_eq!(row.u_a, mirror.u_b, max_relative = 1e-12, epsilon = 1e-18);
            assert_relative_eq!(row.u_b, mirror.u_a, max_relative = 1e-12, epsilon = 1e-18);
            assert_relative_eq!(
                row.eta_plus_ray,
                mirror.eta_minus_ray,
                max_relative = 1e-12,
                epsilon = 1e-18
            );
            assert_relative_eq!(
                row.eta_minus_ray,
                mirror.eta_plus_ray,
                max_relative = 1e-12,
                epsilon = 1e-18
            );
        }
    }

    #[test]
    fn two_photon_terms_share_one_structure_and_die_at_the_amplitude_root() {
        let rec = record("87Rb", 1);
        let cfg = config(0.6);
        let params = effective_params(rec, &cfg, 350.0).unwrap();
        let expected_ratio = cfg.g * cfg.g
            / (cfg.omega_rabi * cfg.omega_rabi * cfg.theta.cos() * cfg.theta.sin() / 4.0);
        for row in &params.rows {
            if row.omega_tilde != 0.0 {
                assert_relative_eq!(row.h / row.omega_tilde, expected_ratio, max_relative = 1e-12);
            }
        }
        let set = solve_detunings(rec).unwrap();
        let at_root = effective_params(rec, &cfg, set.delta_parallel).unwrap();
        for row in &at_root.rows {
            let scale = row.u_a.abs() + row.u_b.abs();
            assert!(row.h.abs() <= 1e-10 * scale, "h = {} at m = {}", row.h, row.m);
            assert!(row.omega_tilde.abs() <= 1e-10 * scale);
            assert!(row.eta_raman.abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn dipole_limit_root_reduces_to_a_plain_driven_cavity() {
        let a_hfs = 600.0;
        let f = HalfInt::ONE;
        let i = HalfInt::from_twice(3);
        let limit =
            dipole_limit_detunings(a_hfs, f, i, HalfInt::HALF, HalfInt::from_twice(3)).unwrap();
        let rec = AtomRecord {
            species: "dipole-limit".into(),
            nuclear_spin: i,
            ground_j: HalfInt::HALF,
            excited_j: HalfInt::from_twice(3),
            f,
            zeta_plus: -2.0 * a_hfs,
            zeta_minus: a_hfs,
            b_over_a: 0.0,
            source: "synthetic".into(),
        };
        let cfg = config(FRAC_PI_4);
        let params = effective_params(&rec, &cfg, limit.common_root).unwrap();
        for row in &params.rows {
            if row.m + HalfInt::from_int(2) <= rec.f {
                assert!(row.eta_raman.abs() < 1e-9 * row.eta_plus_ray.abs());
            }
        }
        let reduced = parallel_basis_params(&params, cfg.theta);
        assert!(reduced.m_spread < 1e-9, "spread {}", reduced.m_spread);
    }

    #[test]
    fn cesium_reduction_is_nearly_state_independent_at_its_optimum() {
        let rec = record("133Cs", 3);
        let cfg = config(FRAC_PI_4);
        let params = effective_params(rec, &cfg, 452.99).unwrap();
        let reduced = parallel_basis_params(&params, cfg.theta);
        assert!(reduced.m_spread <= 1e-3, "spread {}", reduced.m_spread);
        // The two-mode split keeps the total: u_par + u_perp = u_a + u_b.
        for (row, source) in reduced.rows.iter().zip(&params.rows) {
            assert_relative_eq!(
                row.u_par + row.u_perp,
                source.u_a + source.u_b,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn photon_number_scales_as_atom_number_squared() {
        let base = multi_atom_steady_state(&config(FRAC_PI_4), 2.0, 0.7).unwrap();
        for n in [2usize, 4, 8, 16] {
            let mut cfg = config(FRAC_PI_4);
            cfg.couplings = vec![FRAC_PI_2; n];
            // Hold the effective detuning fixed while the collective shift
            // grows with n.
            cfg.delta_c = base.shift_sum + cfg.delta_c - 2.0 * n as f64;
            let state = multi_atom_steady_state(&cfg, 2.0, 0.7).unwrap();
            assert_relative_eq!(
                state.photon_number,
                (n * n) as f64 * base.photon_number,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn alternating_phases_cancel_in_pairs() {
        let phases = |n: usize| {
            (0..n)
                .map(|j| if j % 2 == 0 { FRAC_PI_2 } else { -FRAC_PI_2 })
                .collect::<Vec<f64>>()
        };
        let mut cfg = config(FRAC_PI_4);
        cfg.couplings = phases(6);
        let even = multi_atom_steady_state(&cfg, 2.0, 0.7).unwrap();
        assert_eq!(even.drive_sum, 0.0);
        assert_eq!(even.photon_number, 0.0);

        cfg.couplings = phases(7);
        let odd = multi_atom_steady_state(&cfg, 2.0, 0.7).unwrap();
        let lone = multi_atom_steady_state(&config(FRAC_PI_4), 2.0, 0.7).unwrap();
        assert_relative_eq!(odd.drive_sum, lone.drive_sum, max_relative = 1e-15);
    }
}
