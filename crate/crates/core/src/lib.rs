//! Hermite functions, Hermite multipliers of the harmonic oscillator
//! `H = -Δ + |x|²`, nuclearity summability criteria and trace identities.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; IO, file formats and the command-line front end
//! live in the companion `hermult` crate.
//!
//! Module map:
//!
//! * [`hermite`]: stable evaluation of `φ_ν` at large degree, multi-index
//!   lattices.
//! * [`quadrature`]: Gauss–Hermite rules, `L^p` norms of Hermite functions
//!   and their asymptotic models.
//! * [`spectral`]: symbols, Hermite–Fourier analysis and synthesis,
//!   projections, series and Mehler kernels.
//! * [`nuclearity`]: the direct sum `s_r(m,p₁,p₂)` and the nine asymptotic
//!   weight sums `ϰ(m,p₁,p₂)` with certified verdicts.
//! * [`trace`]: nuclear and spectral traces, including the Hermite
//!   semigroup.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
mod exponent;
mod math;
mod sum;
mod tail;

pub mod hermite;
pub mod nuclearity;
pub mod quadrature;
pub mod spectral;
pub mod trace;

pub use error::{Error, Result};
pub use exponent::Exponent;
pub use hermite::{
    enumerate_level, enumerate_up_to, eval_phi_1d, eval_phi_nd, HermiteValue, MultiIndex,
};
pub use nuclearity::{
    classify_regime, gl_condition, kappa_sum, kappa_weight, partition_cell_of, s_r_sum,
    CriterionReport, RegimeCase, Verdict,
};
pub use quadrature::{gauss_hermite_rule, lp_norm_phi, QuadratureRule};
pub use spectral::{
    analyze, apply_multiplier, kernel_series, mehler_kernel, project_level, synthesize,
    CoefficientVector, Envelope, Symbol,
};
pub use sum::CompensatedSum;
pub use trace::{semigroup_trace_closed_form, trace_diagonal_quadrature, trace_symbol_sum};
