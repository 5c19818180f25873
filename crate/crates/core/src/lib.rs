//! Distribution and moments of `N = max_{t≥0}(W(t) − t²/2)` and of the two-sided
//! maximum `M = max_{t∈ℝ}(W(t) − t²/2)` for standard Brownian motion `W`.
//!
//! * [`airy`]: Airy and Scorer functions on the real line, zeros of `Ai`.
//! * [`series`]: tail probability, densities, moments and hitting density as sums
//!   over Airy zeros, with asymptotic tail corrections.
//! * [`forms`]: integral representations and Airy integral identities used as
//!   independent cross-checks.
//! * [`mc`]: Monte Carlo oracle with grid-step extrapolation (`f64` only).
//!
//! Numeric kernels are generic over [`Real`] (`f32`, `f64`); the aliases below fix
//! the scalar to `f64`.

// Domain guards are written `!(x > 0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod airy;
pub mod error;
pub mod forms;
pub mod mc;
pub mod quad;
pub mod scalar;
pub mod series;
pub mod sum;

pub use error::{Error, Result};
pub use scalar::Real;

pub type AiryValues64 = airy::AiryValues<f64>;
pub type ZeroRecord64 = airy::ZeroRecord<f64>;
pub type ZeroTable64 = airy::ZeroTable<f64>;
pub type EvalPoint64 = series::EvalPoint<f64>;
pub type MomentSet64 = series::MomentSet<f64>;
pub type MomentDiagnostics64 = series::MomentDiagnostics<f64>;
pub type HittingKernel64 = series::HittingKernel<f64>;
pub type IdentityReport64 = forms::IdentityReport<f64>;
pub type QuadratureSpec64 = quad::QuadratureSpec<f64>;
pub type QuadResult64 = quad::QuadResult<f64>;
