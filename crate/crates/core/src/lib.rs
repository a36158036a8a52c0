//! Steady-state squeezing in the resonance fluorescence of a continuously
//! driven quantum dot coupled to a lossy cavity mode and an
//! acoustic-phonon bath.
//!
//! The pipeline: phonon-bath quadratures produce four incoherent rates,
//! the Liouvillian is assembled on a truncated two-level ⊗ Fock space,
//! its null vector with unit trace is the steady state, and the
//! normally ordered quadrature variance of the emitted field is read off
//! the exciton moments. Sweep tooling drives the pipeline over parameter
//! grids and emits CSV/JSON tables.
//!
//! ```
//! use rfsqueeze::prelude::*;
//!
//! let params = PhysicalParams {
//!     omega_r_uev: 200.0,
//!     g_r_uev: 120.0,
//!     kappa_uev: 180.0,
//!     gamma_uev: 2.0,
//!     gamma_prime_uev: 0.5,
//!     delta_xl_uev: 200.0,
//!     delta_cl_uev: 282.84,
//!     temperature_k: 0.0,
//!     phonons_enabled: false,
//!     fock_truncation: 4,
//!     bath: PhononBathParams::default_ingaas(),
//! };
//! let validated = validate_params(&params)?;
//! let model = PhononBathModel::new(params.bath, params.temperature_k)?;
//! let generator = build_effective_liouvillian(&validated, &model)?;
//! let steady = steady_state(&generator)?;
//! let ops = build_operators(steady.rho.space());
//! let report = report(&steady.rho, &ops)?;
//! assert!(report.variance_min < -0.125); // deeper than the free-space bound
//! # Ok::<(), rfsqueeze::Error>(())
//! ```

pub mod bath;
pub mod config;
pub mod error;
pub mod hilbert;
pub mod liouvillian;
pub mod quad;
pub mod squeezing;
pub mod steady;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};

/// The commonly used surface in one import.
pub mod prelude {
    pub use crate::bath::{
        mean_displacement, polaron_shift, spectral_density, IncoherentRates, PhononBathModel,
    };
    pub use crate::config::{parse_params_json, parse_sweep_json};
    pub use crate::error::{Error, Result};
    pub use crate::hilbert::{
        build_operators, DensityMatrix, Level, Operator, OperatorSet, SpaceDescriptor,
    };
    pub use crate::liouvillian::{
        build_effective_liouvillian, build_full_generator, build_hamiltonian,
        interaction_operators, lindblad_dissipator, Superoperator, SystemHamiltonian,
    };
    pub use crate::squeezing::{min_variance, report, squeezing_db, variance_theta, SqueezingReport};
    pub use crate::steady::{
        build_generator, converge_truncation, evolve, steady_state, suggest_dt, GeneratorPath,
        SteadyStateSolution, TruncationConvergence,
    };
    pub use crate::sweep::{
        emit_csv, emit_json, figure_preset, run_single_point, run_sweep, FigureId, OutputField,
        ResultTable, RunOptions, SweepSpec,
    };
    pub use crate::units::{
        rabi_to_power, validate_params, validity_metric, PhononBathParams, PhysicalParams,
        ValidatedParams, ValidityWarning,
    };
}

// The guide chapters double as doctests; every fenced Rust block in
// book/src must compile and pass against the current API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/units-and-validity.md")]
    mod units_and_validity {}
    #[doc = include_str!("../../../book/src/phonon-bath.md")]
    mod phonon_bath {}
    #[doc = include_str!("../../../book/src/liouvillian.md")]
    mod liouvillian {}
    #[doc = include_str!("../../../book/src/steady-state.md")]
    mod steady_state {}
    #[doc = include_str!("../../../book/src/squeezing.md")]
    mod squeezing {}
    #[doc = include_str!("../../../book/src/sweeps-and-cli.md")]
    mod sweeps_and_cli {}
}
