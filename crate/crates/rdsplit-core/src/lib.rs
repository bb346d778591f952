//! Explicit time-split solver for scalar reaction-diffusion equations
//!
//!   u_t − a·Δu = f(u)   on the unit square (0,1)², Dirichlet boundary data
//!
//! using a symmetric three-stage composition per time step: a half-step
//! one-dimensional sweep in y, a full-step sweep in x, and a second
//! half-step sweep in y. The sweeps are collapsed MacCormack
//! (predictor-corrector) updates, which makes the whole step explicit and
//! raises the stability bound to 2·a·k/h² ≤ 1, twice the time step allowed
//! by the unsplit forward-time centered-space scheme.
//!
//! The crate is split into four modules:
//!
//! * [`grid`] — uniform collocated grid, scalar fields, centered second
//!   differences, the interior discrete L² norm, and two self-check
//!   operators (a summation-by-parts identity and a truncation-order
//!   probe).
//! * [`problem`] — problem definitions (diffusivity, reaction term,
//!   initial/boundary data, optional exact solution), factories for three
//!   manufactured solutions with known closed forms, and an independent
//!   finite-difference residual check.
//! * [`scheme`] — the split scheme itself: the three stage operators, one
//!   composed step, and a driver that records error and solution-norm
//!   traces and detects blow-up.
//! * [`metrics`] — time-aggregated error norms and convergence ratios for
//!   refinement studies.
//!
//! # `no_std`
//!
//! The crate is `no_std`-compatible (it requires `alloc`). The default
//! `std` feature only adds wall-clock timing in [`scheme::solve`] and
//! `std::error::Error` impls for the error types. Transcendental functions
//! are always evaluated through `libm` so results do not depend on the
//! feature selection.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod grid;
pub mod metrics;
pub mod problem;
pub mod scheme;

/// Float helpers that behave identically with and without `std`.
///
/// `sqrt`, `abs` and `floor` are exactly rounded IEEE-754 operations, so
/// any correct implementation returns the same bits; `exp`, `tanh` and
/// `log2` are not, so those always go through `libm` to keep `std` and
/// `no_std` builds bit-identical.
pub(crate) mod fmath {
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }

    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }

    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }

    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }

    #[inline]
    pub fn tanh(x: f64) -> f64 {
        libm::tanh(x)
    }

    #[inline]
    pub fn log2(x: f64) -> f64 {
        libm::log2(x)
    }

    #[inline]
    pub fn max(a: f64, b: f64) -> f64 {
        if a > b {
            a
        } else {
            b
        }
    }
}
