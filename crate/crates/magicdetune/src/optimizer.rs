//! One-dimensional minimization of the state-dependence measure over the
//! detuning, plus the dense component scans behind it.
//!
//! The measure has poles at every coupled resonance and kinks where single
//! components bottom out, so the search is a bracketed grid scan followed by
//! golden-section refinement rather than anything derivative-based. The
//! bracket is the hull of the closed-form condition detunings expanded by
//! half its width on each side: every candidate the conditions single out is
//! inside, and a measure that only falls toward the bracket edges is
//! reported as having no interior minimum instead of being chased along the
//! axis.

use crate::atomic_data::AtomRecord;
use crate::detunings::solve_detunings;
use crate::dipole::record_table;
use crate::error::{Error, Result};
use crate::polarizability::{magic_distance, magic_distance_components, MagicDistanceComponents};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;

/// Grid density of the bracketing scan, in samples per 2π·MHz.
const SAMPLES_PER_MHZ: f64 = 20.0;

/// Smallest number of grid points regardless of bracket width.
const MIN_GRID_POINTS: usize = 2000;

/// Width of the final golden-section interval, in 2π·MHz.
const REFINE_TOLERANCE: f64 = 1e-3;

/// Outcome classification of [`optimize_detuning`].
#[derive(Clone, Copy, Debug, Eq, Hash, PartialEq)]
pub enum OptimizerStatus {
    /// The measure has a local minimum strictly inside the bracket.
    InteriorMinimum,
    /// The measure falls monotonically toward both bracket edges; no
    /// optimized detuning is reported.
    NoInteriorMinimum,
}

/// Result of minimizing the state-dependence measure for one record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizationResult {
    /// The optimized detuning, absent when no interior minimum exists.
    pub delta_opt: Option<f64>,
    /// The measure at `delta_opt`.
    pub m_value: Option<f64>,
    /// The searched interval.
    pub bracket: (f64, f64),
    pub status: OptimizerStatus,
}

/// One sampled point of a detuning scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSample {
    pub delta: f64,
    pub components: MagicDistanceComponents,
}

/// A dense scan of the state-dependence measure and its class breakdown.
#[derive(Clone, Debug)]
pub struct MagicScan {
    pub theta: f64,
    pub samples: Vec<ScanSample>,
}

impl MagicScan {
    /// The sample with the smallest total measure.
    pub fn minimum(&self) -> Option<&ScanSample> {
        self.samples
            .iter()
            .min_by(|a, b| a.components.total.total_cmp(&b.components.total))
    }

    /// The sample minimizing one component picked by `key`.
    pub fn minimum_by(&self, key: impl Fn(&MagicDistanceComponents) -> f64) -> Option<&ScanSample> {
        self.samples
            .iter()
            .min_by(|a, b| key(&a.components).total_cmp(&key(&b.components)))
    }

    /// Serializes the scan, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta_MHz,total,perp_rayleigh,par_rayleigh,raman_circ,raman_pi\n");
        for sample in &self.samples {
            let c = &sample.components;
            writeln!(
                out,
                "{:.6},{:e},{:e},{:e},{:e},{:e}",
                sample.delta, c.total, c.perp_rayleigh, c.par_rayleigh, c.raman_circ, c.raman_pi
            )
            .expect("string write");
        }
        out
    }
}

/// Index of the smallest finite value, or none when every value is masked.
fn grid_argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, &value) in values.iter().enumerate() {
        if value.is_finite() && best.is_none_or(|(_, b)| value < b) {
            best = Some((idx, value));
        }
    }
    best.map(|(idx, _)| idx)
}

/// Golden-section minimization on `[a, b]`, returning the best point seen
/// anywhere during the shrink, seeded with `(seed_x, seed_value)`.
fn golden_section(
    mut a: f64,
    mut b: f64,
    seed: (f64, f64),
    f: impl Fn(f64) -> f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut best = seed;
    let probe = |x: f64, best: &mut (f64, f64)| {
        let value = f(x);
        if value < best.1 {
            *best = (x, value);
        }
        value
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = probe(c, &mut best);
    let mut fd = probe(d, &mut best);
    while b - a > REFINE_TOLERANCE {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = probe(c, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = probe(d, &mut best);
        }
    }
    best
}

/// The search interval: the hull of the four condition detunings, expanded
/// by half its width on each side.
fn search_bracket(record: &AtomRecord) -> Result<(f64, f64)> {
    let set = solve_detunings(record)?;
    let candidates = [set.delta_perp.0, set.delta_perp.1, set.delta_parallel, set.delta_pi];
    let lo = candidates.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = hi - lo;
    Ok((lo - 0.5 * width, hi + 0.5 * width))
}

/// Minimizes the state-dependence measure over the detuning at a fixed
/// drive ellipticity.
///
/// The bracket hull is scanned on a grid dense enough to separate the
/// condition detunings, samples falling inside a pole window are masked,
/// and the surviving minimum is refined by golden section when it lies
/// strictly inside the bracket. A measure that only decreases toward the
/// edges yields [`OptimizerStatus::NoInteriorMinimum`] with no detuning.
pub fn optimize_detuning(record: &AtomRecord, theta: f64) -> Result<OptimizationResult> {
    record.validate()?;
    if !record.magic_capable() {
        return Err(Error::UnsupportedCase(format!(
            "{} has nuclear spin {} and cannot support a state-insensitive detuning",
            record.label(),
            record.nuclear_spin
        )));
    }
    let (lo, hi) = search_bracket(record)?;
    let width = hi - lo;
    let n = MIN_GRID_POINTS.max((width * SAMPLES_PER_MHZ).ceil() as usize);
    let step = width / (n - 1) as f64;

    let poles: Vec<f64> = record_table(record)?
        .lines()
        .iter()
        .map(|line| -record.zeta(line.l))
        .collect();
    let masked = |x: f64| poles.iter().any(|p| (x - p).abs() <= 0.51 * step);
    let evaluate = |x: f64| {
        if masked(x) {
            f64::INFINITY
        } else {
            magic_distance(record, theta, x).unwrap_or(f64::INFINITY)
        }
    };

    let xs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    let values: Vec<f64> = xs.iter().map(|&x| evaluate(x)).collect();
    let best = grid_argmin(&values).ok_or_else(|| {
        Error::UnsupportedCase(format!(
            "every sample of [{lo}, {hi}] is masked by a resonance for {}",
            record.label()
        ))
    })?;

    if best == 0 || best == n - 1 {
        return Ok(OptimizationResult {
            delta_opt: None,
            m_value: None,
            bracket: (lo, hi),
            status: OptimizerStatus::NoInteriorMinimum,
        });
    }

    let (delta_opt, m_value) = golden_section(
        xs[best - 1],
        xs[best + 1],
        (xs[best], values[best]),
        evaluate,
    );
    Ok(OptimizationResult {
        delta_opt: Some(delta_opt),
        m_value: Some(m_value),
        bracket: (lo, hi),
        status: OptimizerStatus::InteriorMinimum,
    })
}

/// Samples the measure and its component breakdown on a uniform grid over
/// `[lo, hi]`. Samples landing inside the pole-exclusion window of a
/// resonance are dropped.
pub fn scan_magic_distance(
    record: &AtomRecord,
    theta: f64,
    lo: f64,
    hi: f64,
    n_points: usize,
) -> Result<MagicScan> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "scan range [{lo}, {hi}] is empty or not finite"
        )));
    }
    if n_points < 2 {
        return Err(Error::InvalidArgument(format!(
            "a scan needs at least 2 points, got {n_points}"
        )));
    }
    record.validate()?;
    let step = (hi - lo) / (n_points - 1) as f64;
    let mut samples = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let delta = lo + step * i as f64;
        match magic_distance_components(record, theta, delta) {
            Ok(components) => samples.push(ScanSample { delta, components }),
            Err(Error::PoleProximity { .. }) => continue,
            Err(other) => return Err(other),
        }
    }
    Ok(MagicScan { theta, samples })
}

/// Result of probing the optimized detuning across drive ellipticities.
#[derive(Clone, Debug)]
pub struct PolarizationSensitivity {
    /// Largest `|delta_opt(theta) - delta_opt(pi/4)|` over the grid.
    pub spread: f64,
    /// The optimized detuning at each probed angle.
    pub per_theta: Vec<(f64, f64)>,
    /// Whether the detuning varies monotonically or with a single extremum
    /// across the angle grid.
    pub smooth: bool,
}

/// Optimizes at five drive ellipticities spanning circular to circular and
/// reports how far the optimized detuning moves.
pub fn polarization_sensitivity(record: &AtomRecord) -> Result<PolarizationSensitivity> {
    let thetas = [0.0, PI / 8.0, FRAC_PI_4, 3.0 * PI / 8.0, FRAC_PI_2];
    let mut per_theta = Vec::with_capacity(thetas.len());
    for theta in thetas {
        let result = optimize_detuning(record, theta)?;
        let delta = result.delta_opt.ok_or_else(|| {
            Error::UnsupportedCase(format!(
                "{} has no interior optimum at ellipticity {theta}",
                record.label()
            ))
        })?;
        per_theta.push((theta, delta));
    }
    let reference = per_theta[2].1;
    let spread = per_theta
        .iter()
        .map(|(_, delta)| (delta - reference).abs())
        .fold(0.0, f64::max);

    let mut direction_changes = 0;
    let mut last_sign = 0i8;
    for pair in per_theta.windows(2) {
        let diff = pair[1].1 - pair[0].1;
        let sign = if diff > 0.0 {
            1
        } else if diff < 0.0 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                direction_changes += 1;
            }
            last_sign = sign;
        }
    }
    Ok(PolarizationSensitivity { spread, per_theta, smooth: direction_changes <= 1 })
}
