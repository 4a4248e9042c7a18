//! Command-line front end. All frequencies on the command line and in the
//! reports are in 2π·MHz, matching the reference tables.
//!
//! Exit codes: 0 success, 1 a recomputed table disagrees with its stored
//! reference values, 2 usage or input errors, 3 unknown species or manifold,
//! 4 a record the requested operation cannot support.

use crate::atomic_data::{
    builtin_registry, known_non_magic_species, published_table, AtomRecord, PublishedRow,
    Registry, TableKind,
};
use crate::cavity::{effective_params, multi_atom_steady_state, parallel_basis_params, CavityConfig};
use crate::detunings::solve_detunings;
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::optimizer::{optimize_detuning, scan_magic_distance, OptimizerStatus};
use crate::polarizability::condition_residuals;
use crate::stark::{stark_decompose, stark_shifts};
use clap::{Parser, Subcommand, ValueEnum};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "magicdetune",
    version,
    about = "State-insensitive detunings for light scattering from Zeeman states",
    long_about = "Computes the detunings at which light scattering decouples from the Zeeman \
                  state: the closed-form ellipticity, amplitude and pi-Raman conditions, the \
                  optimized compromise between them, ac Stark shifts and effective cavity \
                  parameters. All frequencies are in 2π·MHz."
)]
struct Cli {
    /// Extra atom records merged over the built-in registry.
    #[arg(long, global = true, value_name = "FILE")]
    atoms: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every record in the registry.
    Atoms,
    /// Solve the closed-form detuning conditions for one record.
    Detunings {
        species: String,
        /// Ground hyperfine manifold, e.g. `2` or `7/2`.
        f: String,
    },
    /// Minimize the state-dependence measure over the detuning.
    Optimize {
        species: String,
        f: String,
        /// Drive ellipticity angle in radians.
        #[arg(long, default_value_t = FRAC_PI_4)]
        theta: f64,
    },
    /// Recompute a reference table and compare it cell by cell.
    Table {
        which: WhichTable,
        /// Also write the recomputed rows to a CSV file.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Sample the measure and its components over a detuning window.
    Scan {
        species: String,
        f: String,
        #[arg(allow_negative_numbers = true)]
        lo: f64,
        #[arg(allow_negative_numbers = true)]
        hi: f64,
        n: usize,
        #[arg(long, default_value_t = FRAC_PI_4)]
        theta: f64,
        /// Write the samples to a CSV file instead of stdout.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Per-state ac Stark shifts and their quadratic decomposition.
    Stark {
        species: String,
        f: String,
        #[arg(allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, default_value_t = FRAC_PI_4)]
        theta: f64,
        /// Squared drive field amplitude in reduced units.
        #[arg(long, default_value_t = 1.0)]
        intensity: f64,
    },
    /// Effective cavity coefficients and the multi-atom steady state.
    Cavity {
        species: String,
        f: String,
        /// Detuning in 2π·MHz; defaults to the optimized detuning.
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        /// Single-atom cavity coupling in 2π·MHz.
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        /// Drive Rabi frequency in 2π·MHz.
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Cavity linewidth in 2π·MHz.
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        /// Drive-cavity detuning in 2π·MHz.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        delta_c: f64,
        #[arg(long, default_value_t = FRAC_PI_4)]
        theta: f64,
        /// Comma-separated standing-wave phases, one per atom.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "in_phase")]
        phases: Option<Vec<f64>>,
        /// Place N atoms at antinodes (phase pi/2 each).
        #[arg(long, value_name = "N")]
        in_phase: Option<usize>,
        /// Choose the drive-cavity detuning that cancels the collective
        /// dispersive shift.
        #[arg(long)]
        compensate_shift: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichTable {
    /// The neutral-alkali reference table.
    Alkali,
    /// The alkaline-earth-ion reference table.
    Ions,
}

impl From<WhichTable> for TableKind {
    fn from(which: WhichTable) -> TableKind {
        match which {
            WhichTable::Alkali => TableKind::Alkali,
            WhichTable::Ions => TableKind::Ions,
        }
    }
}

/// One recomputed table row, detunings in 2π·MHz. The ellipticity pair is
/// ordered by increasing magnitude, the convention the reference tables use.
#[derive(Clone, Debug)]
pub struct ReportRow {
    pub species: String,
    pub f: HalfInt,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
    pub b_over_a: f64,
    pub delta_perp_1: f64,
    pub delta_perp_2: f64,
    pub delta_parallel: f64,
    pub delta_pi: f64,
    pub delta_opt: Option<f64>,
    pub m_value: Option<f64>,
}

pub const REPORT_CSV_HEADER: &str =
    "species,F,zeta_plus,zeta_minus,b_over_a,delta_perp_1,delta_perp_2,delta_parallel,delta_pi,delta_opt,m_value";

impl ReportRow {
    pub fn compute(record: &AtomRecord) -> Result<ReportRow> {
        let set = solve_detunings(record)?;
        let optimum = optimize_detuning(record, FRAC_PI_4)?;
        let (first, second) = if set.delta_perp.0.abs() <= set.delta_perp.1.abs() {
            (set.delta_perp.0, set.delta_perp.1)
        } else {
            (set.delta_perp.1, set.delta_perp.0)
        };
        Ok(ReportRow {
            species: record.species.clone(),
            f: record.f,
            zeta_plus: record.zeta_plus,
            zeta_minus: record.zeta_minus,
            b_over_a: record.b_over_a,
            delta_perp_1: first,
            delta_perp_2: second,
            delta_parallel: set.delta_parallel,
            delta_pi: set.delta_pi,
            delta_opt: optimum.delta_opt,
            m_value: optimum.m_value,
        })
    }

    pub fn to_csv_line(&self) -> String {
        let opt = self.delta_opt.map_or("N/A".into(), |v| format!("{v:.4}"));
        let m = self.m_value.map_or("N/A".into(), |v| format!("{v:.4e}"));
        format!(
            "{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{},{}",
            self.species,
            self.f,
            self.zeta_plus,
            self.zeta_minus,
            self.b_over_a,
            self.delta_perp_1,
            self.delta_perp_2,
            self.delta_parallel,
            self.delta_pi,
            opt,
            m
        )
    }
}

/// Compares one recomputed row against its stored reference values and
/// lists every disagreeing cell. Detunings use the table's printed
/// precision as tolerance, the measure 15% relative; the two ellipticity
/// cells are matched to the recomputed roots by proximity.
pub fn row_failures(computed: &ReportRow, published: &PublishedRow) -> Vec<String> {
    let tolerance = published.detuning_tolerance();
    let mut failures = Vec::new();
    let mut check = |label: &str, value: f64, reference: f64| {
        if (value - reference).abs() > tolerance {
            failures.push(format!(
                "{} {} {label}: computed {value:.4}, published {reference}",
                computed.species, computed.f
            ));
        }
    };

    let direct = (computed.delta_perp_1 - published.delta_perp_1).abs()
        + (computed.delta_perp_2 - published.delta_perp_2).abs();
    let crossed = (computed.delta_perp_1 - published.delta_perp_2).abs()
        + (computed.delta_perp_2 - published.delta_perp_1).abs();
    if direct <= crossed {
        check("delta_perp_1", computed.delta_perp_1, published.delta_perp_1);
        check("delta_perp_2", computed.delta_perp_2, published.delta_perp_2);
    } else {
        check("delta_perp_1", computed.delta_perp_1, published.delta_perp_2);
        check("delta_perp_2", computed.delta_perp_2, published.delta_perp_1);
    }
    check("delta_parallel", computed.delta_parallel, published.delta_parallel);
    check("delta_pi", computed.delta_pi, published.delta_pi);

    match (computed.delta_opt, published.delta_opt) {
        (Some(value), Some(reference)) => check("delta_opt", value, reference),
        (None, Some(reference)) => failures.push(format!(
            "{} {} delta_opt: no interior minimum found, published {reference}",
            computed.species, computed.f
        )),
        (Some(value), None) => failures.push(format!(
            "{} {} delta_opt: found {value:.4}, published no interior minimum",
            computed.species, computed.f
        )),
        (None, None) => {}
    }
    match (computed.m_value, published.m_value) {
        (Some(value), Some(reference)) => {
            if (value - reference).abs() > 0.15 * reference.abs() {
                failures.push(format!(
                    "{} {} m_value: computed {value:.3e}, published {reference:.3e}",
                    computed.species, computed.f
                ));
            }
        }
        (None, Some(reference)) => failures.push(format!(
            "{} {} m_value: none computed, published {reference:.3e}",
            computed.species, computed.f
        )),
        (Some(value), None) => failures.push(format!(
            "{} {} m_value: computed {value:.3e}, published none",
            computed.species, computed.f
        )),
        (None, None) => {}
    }
    failures
}

fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::NotFound(_) => 3,
        Error::UnsupportedCase(_) => 4,
        _ => 2,
    }
}

fn load_registry(extra: Option<&PathBuf>) -> Result<Registry> {
    let mut registry = Registry::new(builtin_registry().records().to_vec())?;
    if let Some(path) = extra {
        let loaded = Registry::load_path(path)?;
        registry.extend_from(loaded.records().to_vec())?;
    }
    Ok(registry)
}

fn parse_f(text: &str) -> Result<HalfInt> {
    text.parse::<HalfInt>()
        .map_err(|e| Error::InvalidArgument(format!("invalid F `{text}`: {e}")))
}

fn find_record<'r>(registry: &'r Registry, species: &str, f: &str) -> Result<&'r AtomRecord> {
    let f = parse_f(f)?;
    if registry.records().iter().all(|r| r.species != species) {
        if let Some((_, reason)) = known_non_magic_species().iter().find(|(s, _)| *s == species) {
            return Err(Error::UnsupportedCase(format!("{species}: {reason}")));
        }
    }
    registry.find(species, f)
}

/// Detunings are printed at the reference tables' precision: two decimals
/// for the cesium rows, one otherwise.
fn fmt_detuning(species: &str, value: f64) -> String {
    if species == "133Cs" {
        format!("{value:.2}")
    } else {
        format!("{value:.1}")
    }
}

/// Parses `args` (including the program name) and runs the selected
/// command, writing reports to `out` and failures to `err`; returns the
/// process exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(parse_error) => {
            return if parse_error.exit_code() == 0 {
                let _ = write!(out, "{}", parse_error.render());
                0
            } else {
                let _ = write!(err, "{}", parse_error.render());
                2
            };
        }
    };
    let registry = match load_registry(cli.atoms.as_ref()) {
        Ok(registry) => registry,
        Err(error) => {
            let _ = writeln!(err, "error: {error}");
            return 2;
        }
    };
    let outcome = match &cli.command {
        Command::Atoms => cmd_atoms(&registry, out),
        Command::Detunings { species, f } => cmd_detunings(&registry, species, f, out),
        Command::Optimize { species, f, theta } => cmd_optimize(&registry, species, f, *theta, out),
        Command::Table { which, csv } => {
            return match cmd_table((*which).into(), csv.as_ref(), out, err) {
                Ok(code) => code,
                Err(error) => {
                    let _ = writeln!(err, "error: {error}");
                    exit_code_for(&error)
                }
            };
        }
        Command::Scan { species, f, lo, hi, n, theta, csv } => {
            cmd_scan(&registry, species, f, *lo, *hi, *n, *theta, csv.as_ref(), out)
        }
        Command::Stark { species, f, delta, theta, intensity } => {
            cmd_stark(&registry, species, f, *delta, *theta, *intensity, out)
        }
        Command::Cavity {
            species,
            f,
            delta,
            g,
            omega,
            kappa,
            delta_c,
            theta,
            phases,
            in_phase,
            compensate_shift,
        } => {
            let cfg = CavityConfig {
                g: *g,
                omega_rabi: *omega,
                kappa: *kappa,
                delta_c: *delta_c,
                theta: *theta,
                couplings: match (phases, in_phase) {
                    (Some(list), _) => list.clone(),
                    (None, Some(n)) => vec![FRAC_PI_2; *n],
                    (None, None) => vec![FRAC_PI_2],
                },
            };
            cmd_cavity(&registry, species, f, *delta, cfg, *compensate_shift, out)
        }
    };
    match outcome {
        Ok(()) => 0,
        Err(error) => {
            let _ = writeln!(err, "error: {error}");
            exit_code_for(&error)
        }
    }
}

fn cmd_atoms(registry: &Registry, out: &mut dyn Write) -> Result<()> {
    writeln!(
        out,
        "{:<8} {:>4} {:>10} {:>10} {:>8}  {}",
        "species", "F", "zeta+", "zeta-", "B/A", "source"
    )?;
    for record in registry.records() {
        writeln!(
            out,
            "{:<8} {:>4} {:>10.1} {:>10.1} {:>8.3}  {}",
            record.species,
            record.f.to_string(),
            record.zeta_plus,
            record.zeta_minus,
            record.b_over_a,
            record.source
        )?;
    }
    writeln!(out, "{} records", registry.len())?;
    Ok(())
}

fn cmd_detunings(
    registry: &Registry,
    species: &str,
    f: &str,
    out: &mut dyn Write,
) -> Result<()> {
    let record = find_record(registry, species, f)?;
    if !record.magic_capable() {
        return Err(Error::UnsupportedCase(format!(
            "{}: nuclear spin {} is below 1, so the equal-amplitude condition has no \
             solution and no state-insensitive detuning exists",
            record.label(),
            record.nuclear_spin
        )));
    }
    let set = solve_detunings(record)?;
    writeln!(out, "{} (zeta+ = {}, zeta- = {})", record.label(), record.zeta_plus, record.zeta_minus)?;
    let s = &record.species;
    writeln!(
        out,
        "  delta_perp     {} , {}   (ellipticity-preserving pair)",
        fmt_detuning(s, set.delta_perp.0),
        fmt_detuning(s, set.delta_perp.1)
    )?;
    writeln!(out, "  delta_parallel {}   (equal-amplitude root)", fmt_detuning(s, set.delta_parallel))?;
    writeln!(out, "  delta_pi       {}   (pi-Raman scalar zero)", fmt_detuning(s, set.delta_pi))?;
    for (label, delta) in [
        ("delta_perp_1", set.delta_perp.0),
        ("delta_perp_2", set.delta_perp.1),
        ("delta_parallel", set.delta_parallel),
        ("delta_pi", set.delta_pi),
    ] {
        let residuals = condition_residuals(record, delta)?;
        writeln!(
            out,
            "  residuals at {label:<14} perp {:+.2e}  parallel {:+.2e}  raman_circ {:.2e}  raman_pi {:+.2e}",
            residuals.perp_residual,
            residuals.parallel_residual,
            residuals.raman_circ_residual,
            residuals.raman_pi_scalar_residual
        )?;
    }
    Ok(())
}

fn cmd_optimize(
    registry: &Registry,
    species: &str,
    f: &str,
    theta: f64,
    out: &mut dyn Write,
) -> Result<()> {
    let record = find_record(registry, species, f)?;
    let result = optimize_detuning(record, theta)?;
    writeln!(
        out,
        "{} at theta = {theta:.4} over [{:.1}, {:.1}]",
        record.label(),
        result.bracket.0,
        result.bracket.1
    )?;
    match result.status {
        OptimizerStatus::InteriorMinimum => {
            writeln!(
                out,
                "  delta_opt = {}   M = {:.3e}",
                fmt_detuning(&record.species, result.delta_opt.expect("interior minimum")),
                result.m_value.expect("interior minimum")
            )?;
        }
        OptimizerStatus::NoInteriorMinimum => {
            writeln!(out, "  no interior minimum: the measure falls toward both bracket edges")?;
        }
    }
    Ok(())
}

fn cmd_table(
    kind: TableKind,
    csv: Option<&PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let registry = builtin_registry();
    let mut failures = Vec::new();
    let mut csv_body = String::from(REPORT_CSV_HEADER);
    csv_body.push('\n');
    writeln!(
        out,
        "{:<8} {:>4} {:>9} {:>9} {:>7} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}  {}",
        "species", "F", "zeta+", "zeta-", "B/A", "perp_1", "perp_2", "parallel", "pi", "opt", "M", "cells"
    )?;
    for published in published_table(kind) {
        let record = registry.find(published.species, published.f)?;
        let row = ReportRow::compute(record)?;
        let row_problems = row_failures(&row, &published);
        let s = &row.species;
        writeln!(
            out,
            "{:<8} {:>4} {:>9.1} {:>9.1} {:>7.3} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}  {}",
            row.species,
            row.f.to_string(),
            row.zeta_plus,
            row.zeta_minus,
            row.b_over_a,
            fmt_detuning(s, row.delta_perp_1),
            fmt_detuning(s, row.delta_perp_2),
            fmt_detuning(s, row.delta_parallel),
            fmt_detuning(s, row.delta_pi),
            row.delta_opt.map_or("N/A".into(), |v| fmt_detuning(s, v)),
            row.m_value.map_or("N/A".into(), |v| format!("{v:.1e}")),
            if row_problems.is_empty() { "ok" } else { "DISAGREES" }
        )?;
        failures.extend(row_problems);
        let _ = writeln!(csv_body, "{}", row.to_csv_line());
    }
    if let Some(path) = csv {
        std::fs::write(path, &csv_body)?;
        writeln!(out, "wrote {path:?}")?;
    }
    if failures.is_empty() {
        writeln!(out, "all cells agree with the reference table")?;
        Ok(0)
    } else {
        writeln!(err, "{} cell(s) disagree:", failures.len())?;
        for failure in &failures {
            writeln!(err, "  {failure}")?;
        }
        Ok(1)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    registry: &Registry,
    species: &str,
    f: &str,
    lo: f64,
    hi: f64,
    n: usize,
    theta: f64,
    csv: Option<&PathBuf>,
    out: &mut dyn Write,
) -> Result<()> {
    let record = find_record(registry, species, f)?;
    let scan = scan_magic_distance(record, theta, lo, hi, n)?;
    let body = scan.to_csv();
    match csv {
        Some(path) => {
            std::fs::write(path, &body)?;
            writeln!(out, "wrote {} samples to {path:?}", scan.samples.len())?;
        }
        None => write!(out, "{body}")?,
    }
    Ok(())
}

fn cmd_stark(
    registry: &Registry,
    species: &str,
    f: &str,
    delta: f64,
    theta: f64,
    intensity: f64,
    out: &mut dyn Write,
) -> Result<()> {
    let record = find_record(registry, species, f)?;
    let shifts = stark_shifts(record, theta, delta, intensity)?;
    writeln!(
        out,
        "{} at delta = {delta} (2π·MHz), theta = {theta:.4}, intensity = {intensity}",
        record.label()
    )?;
    for shift in &shifts {
        writeln!(out, "  m = {:>5}   shift = {:+.6e}", shift.m.to_string(), shift.energy)?;
    }
    let fit = stark_decompose(record, theta, delta)?;
    writeln!(
        out,
        "  per unit intensity: scalar {:+.6e}  vector {:+.6e}  tensor {:+.6e}",
        fit.scalar, fit.vector_coeff, fit.tensor_coeff
    )?;
    Ok(())
}

fn cmd_cavity(
    registry: &Registry,
    species: &str,
    f: &str,
    delta: Option<f64>,
    mut cfg: CavityConfig,
    compensate_shift: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let record = find_record(registry, species, f)?;
    let delta = match delta {
        Some(value) => value,
        None => {
            let optimum = optimize_detuning(record, cfg.theta)?;
            optimum.delta_opt.ok_or_else(|| {
                Error::UnsupportedCase(format!(
                    "{} has no interior optimum; pass --delta explicitly",
                    record.label()
                ))
            })?
        }
    };
    let params = effective_params(record, &cfg, delta)?;
    writeln!(out, "{} at delta = {delta:.4} (2π·MHz)", record.label())?;
    if let Some(warning) = &params.validity_warning {
        writeln!(out, "  warning: {warning}")?;
    }
    writeln!(
        out,
        "  {:>5} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "m", "U_a", "U_b", "omega", "omega~", "h", "eta+_ray", "eta-_ray", "eta_raman"
    )?;
    for row in &params.rows {
        writeln!(
            out,
            "  {:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            row.m.to_string(),
            row.u_a,
            row.u_b,
            row.omega,
            row.omega_tilde,
            row.h,
            row.eta_plus_ray,
            row.eta_minus_ray,
            row.eta_raman
        )?;
    }
    let reduced = parallel_basis_params(&params, cfg.theta);
    writeln!(out, "  drive-anchored reduction (m spread {:.3e}):", reduced.m_spread)?;
    for row in &reduced.rows {
        writeln!(
            out,
            "  {:>5} U_par {:>12.4e}  U_perp {:>12.4e}  eta_par {:>12.4e}",
            row.m.to_string(),
            row.u_par,
            row.u_perp,
            row.eta_par
        )?;
    }
    let averaged = |values: Vec<f64>| values.iter().sum::<f64>() / reduced.rows.len() as f64;
    let u_par = averaged(reduced.rows.iter().map(|row| row.u_par).collect());
    let eta_par = averaged(reduced.rows.iter().map(|row| row.eta_par).collect());
    if compensate_shift {
        let shift: f64 =
            u_par * cfg.couplings.iter().map(|phi| phi.sin() * phi.sin()).sum::<f64>();
        cfg.delta_c = -shift;
    }
    let state = multi_atom_steady_state(&cfg, u_par, eta_par)?;
    writeln!(
        out,
        "  {} atom(s): drive {:+.4e}  shift {:+.4e}  photons {:.6e}",
        cfg.couplings.len(),
        state.drive_sum,
        state.shift_sum,
        state.photon_number
    )?;
    if cfg.couplings.len() > 1 {
        let mut single = cfg.clone();
        single.couplings = vec![FRAC_PI_2];
        if compensate_shift {
            single.delta_c = -u_par;
        }
        let lone = multi_atom_steady_state(&single, u_par, eta_par)?;
        if lone.photon_number > 0.0 {
            writeln!(
                out,
                "  photon-number ratio vs one atom: {:.4}",
                state.photon_number / lone.photon_number
            )?;
        }
    }
    Ok(())
}
