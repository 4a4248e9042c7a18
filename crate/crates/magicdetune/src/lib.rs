//! Magic-detuning calculator for light scattering from atomic Zeeman states.
//!
//! An atom in a hyperfine manifold `F` driven off-resonantly on a `D2`-type
//! line (`J = 1/2 -> J' = 3/2`) scatters light through the three excited
//! manifolds `F' in {F-1, F, F+1}`. At generic detunings the amplitude and
//! polarization of the scattered field depend on the Zeeman substate `m`, so
//! an atom prepared in a superposition decoheres as it becomes entangled with
//! the field. This crate computes the special detunings at which that state
//! dependence vanishes or is minimized:
//!
//! * `delta_perp` — the induced dipole preserves the ellipticity of the drive
//!   (two roots of a quadratic),
//! * `delta_parallel` — all substates scatter into the parallel mode with
//!   equal amplitude (single root),
//! * `delta_pi` — the stretched pi-Raman channel closes,
//! * `delta_opt` — the detuning minimizing the scalar figure of merit
//!   `M(F, delta)`, a normalized Frobenius distance between the generalized
//!   polarizability tensor and its ideal state-independent form.
//!
//! All frequencies are in units of 2π·MHz. Dipole matrix elements are kept in
//! reduced units in which the reduced matrix element drops out; every quantity
//! exposed here is invariant under that overall scale.
//!
//! The crate also evaluates ac Stark shifts, and the effective cavity-QED
//! coefficients obtained by adiabatic elimination of the excited states.

pub mod atomic_data;
pub mod cavity;
pub mod cli;
pub mod detunings;
pub mod dipole;
pub mod error;
pub mod halfint;
pub mod optimizer;
pub mod polarizability;
pub mod stark;
pub mod wigner;

pub use atomic_data::{builtin_registry, AtomRecord, HyperfineConstants, Registry};
pub use detunings::{
    dipole_limit_detunings, magic_exists, solve_d1, solve_delta_parallel, solve_delta_perp,
    solve_delta_pi, solve_detunings, D1Detunings, DetuningSet, DipoleLimitDetunings,
    MagicExistence, ParallelSolution, PerpRoots, PerpendicularSolution, QuadraticCoefficients,
};
pub use cavity::{
    effective_params, multi_atom_steady_state, parallel_basis_params, CavityCoefficients,
    CavityConfig, EffectiveCavityParams, ParallelBasisParams, ParallelBasisRow, SteadyState,
};
pub use error::{Error, Result};
pub use optimizer::{
    optimize_detuning, polarization_sensitivity, scan_magic_distance, MagicScan,
    OptimizationResult, OptimizerStatus, PolarizationSensitivity, ScanSample,
};
pub use polarizability::{
    condition_residuals, generalized_polarizability, magic_distance, magic_distance_components,
    ConditionResiduals, DriveConfig, MagicDistanceComponents, OutputPolarization,
    PolarizabilityTensor, DEFAULT_POLE_EXCLUSION,
};
pub use halfint::HalfInt;
pub use stark::{ac_stark_shift, stark_decompose, stark_shifts, StarkDecomposition, StarkShift};
pub use wigner::{wigner_3j, wigner_6j, CouplingValue};
