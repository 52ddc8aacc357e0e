//! Simulation and analysis of spin-squeezed free-electron interferometry.
//!
//! A batch of `N` electrons passing through a two-arm interferometer is
//! represented as a collective spin `N/2` on the symmetric (Dicke) subspace.
//! The crate provides the exact state-vector machinery ([`dicke`]), the two
//! squeezing mechanisms ([`squeezers`]), the phase-uncertainty figures of merit
//! and their optimization ([`metrology`]), an end-to-end Mach-Zehnder pipeline
//! with Monte Carlo shot simulation ([`interferometer`]), and hardware
//! calculators linking beam and channel parameters to squeezing strengths
//! ([`physical`]).
//!
//! Conventions used throughout:
//!
//! * Basis index `k = n_R` counts electrons in the right arm; the `S_z`
//!   eigenvalue of index `k` is `m_k = N/2 - k`. Index `0` is the all-left
//!   state `|N, 0>` (north pole).
//! * Every rotation is `exp(-i θ S_axis)`. In particular the sample phase
//!   `phase_shift(ψ, φ)` is `exp(-i φ S_z)`, which rotates the mean spin by
//!   `+φ` about `z`.

pub mod dicke;
pub mod error;
pub mod interferometer;
pub mod metrology;
pub mod physical;
pub mod squeezers;

pub use dicke::{
    basis_state, coherent_state, moments, number_distribution, overlap, phase_shift, rotate,
    wigner_function, DickeState, SphereGrid, SpinAxis, SpinMoments, WignerField,
};
pub use error::{Result, SqueezeError};
pub use interferometer::{Calibration, MZISpec, MonteCarloSummary, ShotRecord};
pub use physical::{BeamParams, CavityParams, ChannelGeometry};
pub use metrology::{MetricsRow, OptimumReport};
pub use squeezers::{MeasConfig, MeasOutcome, OATConfig, SqueezerConfig, SqueezerKind};

pub use num_complex::Complex64 as C64;
