//! Multi-replica Liouvillian construction for a driven qubit strongly
//! hybridized with a classical probe reservoir.
//!
//! The Rényi-M entropy current into the probe is read off the leading
//! eigenvalue of the M-replica generator, `F_M = -Λ₀`. Weak-coupling
//! closed forms live in [`weak`] for cross-checking, and [`fit`] extrapolates
//! the integer-M flows to the von Neumann limit `M → 1`.
//!
//! Units: `ħ = k_B = 1` and the environment rate `Γ_e = 1`. Temperatures enter
//! only through `θ = ω/T`.
//!
//! The crate is `no_std` (it needs `alloc`); file formats, sweeps and the
//! command line live in the `replica-flow` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod fit;
pub mod liouvillian;
pub mod model;
pub mod ops;
pub mod oracle;
pub mod rates;
pub mod spectrum;
pub mod weak;

pub use error::{Error, Result};
pub use faer::c64;
pub use fit::{extrapolate_vn, fit_flow_vs_m, powerlaw_slope, FitResult};
pub use liouvillian::{assemble, assemble_with_ceiling, LiouvillianParts, DEFAULT_MAX_REPLICAS};
pub use model::{ModelParams, ParamKey};
pub use ops::{ReplicaOperator, SuperOperator};
pub use rates::RatePair;
pub use spectrum::{leading_eigenvalue, renyi_flow, spectrum, FlowReport, Leading, SpectrumResult};
pub use weak::{QubitState, WeakOptions};
