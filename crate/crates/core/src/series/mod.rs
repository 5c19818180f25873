//! Airy-zero series for the law of the maximum of `W(t) − t²/2`.
//!
//! Every sum is split at the cutoff `K`: indices `k < K` use Newton-refined zero
//! records, and with [`TailMode::Asymptotic`] the rest is summed from closed-form
//! asymptotic records and finished with a power-law or oscillatory remainder.

mod dist;
mod hitting;
mod moments;
mod tail;

pub use dist::{density_fm, density_fn, eval_point, tail_probability_g, EvalPoint};
pub use hitting::{hitting_density, HittingKernel};
pub use moments::{
    em2_via_g_squared, gparseval_check, mean_via_tmean, moment_diagnostics, moments, moments_by_quadrature,
    MomentDiagnostics, MomentErrors, MomentSet,
};

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};

/// Smallest cutoff accepted with asymptotic tails.
pub const MIN_ASYMPTOTIC_TERMS: usize = 200;

/// Values within this distance outside their admissible range are clamped silently
/// (but counted).
pub const CLAMP_TOL: f64 = 1e-12;

/// How the part of a series beyond the cutoff is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailMode {
    /// Truncate at the cutoff.
    None,
    /// Sum the tail from asymptotic expansions of the summands.
    Asymptotic,
}

/// Truncation and summation policy shared by all series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Cutoff `K`: indices `k < K` are summed from refined zero records.
    pub terms: usize,
    pub tail_mode: TailMode,
    /// Group `k = 2j` with `2j + 1` in sums whose terms alternate in sign.
    pub pairing: bool,
    pub compensated_summation: bool,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            terms: MIN_ASYMPTOTIC_TERMS,
            tail_mode: TailMode::Asymptotic,
            pairing: true,
            compensated_summation: true,
        }
    }
}

impl SeriesConfig {
    /// Plain truncated sums over `k < terms`.
    pub fn truncated(terms: usize) -> Self {
        Self { terms, tail_mode: TailMode::None, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms < 2 {
            return Err(Error::Config(format!("terms must be >= 2, got {}", self.terms)));
        }
        if self.terms > crate::airy::MAX_ZERO_INDEX {
            return Err(Error::Config(format!("terms must be <= {}, got {}", crate::airy::MAX_ZERO_INDEX, self.terms)));
        }
        if self.tail_mode == TailMode::Asymptotic && self.terms < MIN_ASYMPTOTIC_TERMS {
            return Err(Error::Config(format!(
                "asymptotic tails need terms >= {MIN_ASYMPTOTIC_TERMS}, got {}",
                self.terms
            )));
        }
        Ok(())
    }
}

static CLAMPS: AtomicUsize = AtomicUsize::new(0);
static CLAMP_VIOLATIONS: AtomicUsize = AtomicUsize::new(0);

/// Number of values clamped into range since the last reset.
pub fn clamp_count() -> usize {
    CLAMPS.load(Ordering::Relaxed)
}

/// Number of clamped values that were further than [`CLAMP_TOL`] out of range.
pub fn clamp_violations() -> usize {
    CLAMP_VIOLATIONS.load(Ordering::Relaxed)
}

pub fn reset_clamp_counters() {
    CLAMPS.store(0, Ordering::Relaxed);
    CLAMP_VIOLATIONS.store(0, Ordering::Relaxed);
}

fn record_clamp(distance: f64) {
    CLAMPS.fetch_add(1, Ordering::Relaxed);
    if distance > CLAMP_TOL {
        CLAMP_VIOLATIONS.fetch_add(1, Ordering::Relaxed);
    }
}

pub(crate) fn clamp_unit<T: Real>(v: T) -> T {
    if v < T::zero() {
        record_clamp((-v).to_f64_lossy());
        T::zero()
    } else if v > T::one() {
        record_clamp((v - T::one()).to_f64_lossy());
        T::one()
    } else {
        v
    }
}

pub(crate) fn clamp_nonneg<T: Real>(v: T) -> T {
    if v < T::zero() {
        record_clamp((-v).to_f64_lossy());
        T::zero()
    } else {
        v
    }
}

#[inline]
pub(crate) fn cbrt2<T: Real>() -> T {
    T::lit(2.0).cbrt()
}
