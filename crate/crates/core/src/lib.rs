//! Two-particle quantum decay in a Fano-Anderson lattice.
//!
//! Two waveguides (sites 1 and 2) are side-coupled to the head of a
//! tight-binding waveguide chain. A photon pair launched into the two sites
//! leaks into the chain; how much of the pair survives depends on the
//! particle statistics. When the sites are tuned to the same energy a bound
//! state in the continuum forms and bosons show fractional decay, while
//! fermions (simulated with an antisymmetric polarization-entangled pair)
//! decay completely.
//!
//! - [`lattice`]: parameters and the coupling matrix
//! - [`propagator`]: `S(z) = exp(−iHz)` plus an RK4 cross-check
//! - [`statistics`]: boson, fermion, classical and entangled survival, permanents
//! - [`bound_states`]: bound-state detection and asymptotic survival
//! - [`experiments`]: sweeps, maps, count normalization
//! - [`output`] and [`plot`]: CSV/JSON emission and SVG figures
//! - [`cli`]: the `fano-decay` command line

pub mod bound_states;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod output;
pub mod plot;
pub mod propagator;
pub mod statistics;

pub use bound_states::{asymptotic_survival, detect_bics, BoundState, BoundStateKind};
pub use error::{Error, Result};
pub use experiments::{
    normalize_counts, survival_map, sweep_detuning, sweep_z, ChainPolicy, CountsRecord,
    SurvivalMap, SweepConfig,
};
pub use lattice::{build_hamiltonian, chain_length_for, Hamiltonian, LatticeSpec};
pub use output::{emit_results, Format, ResultRow};
pub use propagator::{propagator, propagator_ode, Propagator, Spectrum};
pub use statistics::{
    permanent, survival_boson, survival_classical, survival_entangled, survival_fermion,
    ModePair, SurvivalRecord, TwoModeBlock,
};
