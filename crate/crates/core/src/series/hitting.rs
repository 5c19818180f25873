//! Density of the first time `x + W(t)` meets `−t²/2`.

use super::{cbrt2, clamp_nonneg, SeriesConfig, TailMode};
use crate::airy::{ai_aip, neg_modulus_phase, shared_zero_table, zero_seed_real, zeta_gap};
use crate::error::{domain, Result};
use crate::quad::{adaptive, linspace, QuadResult};
use crate::scalar::Real;
use crate::sum::Neumaier;

/// Terms with `e^{−α(z_k − z_1)t}` below `e^{−STOP}` are dropped.
const STOP: f64 = 45.0;
/// Beyond `x²/(2t) = GAUSSIAN_CUTOFF` the density is reported as zero.
const GAUSSIAN_CUTOFF: f64 = 50.0;
/// Exact records are used at least until `|a_k| ≥ y + HEAD_MARGIN`, so that the
/// shifted arguments of the tail lie in the oscillatory asymptotic regime.
const HEAD_MARGIN: f64 = 12.0;

/// Hitting-time density for a fixed start level `x`, with the `t`-independent
/// coefficients `Ai(a_k + 2^{1/3}x)/Ai′(a_k)` precomputed.
#[derive(Debug, Clone)]
pub struct HittingKernel<T> {
    x: T,
    y: T,
    /// `(|a_k|, Ai(a_k + y)/Ai′(a_k))` for `k < head_end`.
    coef: Vec<(T, T)>,
    /// First index left to the tail integral, if any.
    tail_from: Option<usize>,
}

impl<T: Real> HittingKernel<T> {
    pub fn new(x: T, cfg: &SeriesConfig) -> Result<Self> {
        cfg.validate()?;
        if !(x > T::zero()) || !x.is_finite() {
            return domain(format!("hitting density requires finite x > 0, got {x}"));
        }
        let y = cbrt2::<T>() * x;
        let mut head_end = cfg.terms;
        if cfg.tail_mode == TailMode::Asymptotic {
            while -zero_seed_real::<T>(T::from_usize_lossy(head_end) - T::lit(0.5)) < y + T::lit(HEAD_MARGIN) {
                head_end += head_end / 2;
            }
        }
        let table = shared_zero_table::<T>(head_end - 1)?;
        let coef = table.head(head_end - 1).iter().map(|r| (-r.a, ai_aip(r.a + y).0 / r.aip)).collect();
        let tail_from = (cfg.tail_mode == TailMode::Asymptotic).then_some(head_end);
        Ok(Self { x, y, coef, tail_from })
    }

    pub fn x(&self) -> T {
        self.x
    }

    /// `e^{t³/6} f_τ(t) = 2^{−1/3} Σ_k e^{2^{−1/3} a_k t} Ai(a_k + 2^{1/3}x)/Ai′(a_k)`.
    pub fn scaled_density(&self, t: T) -> Result<T> {
        if !(t > T::zero()) || !t.is_finite() {
            return domain(format!("hitting density requires finite t > 0, got {t}"));
        }
        if self.x * self.x / (T::lit(2.0) * t) > T::lit(GAUSSIAN_CUTOFF) {
            return Ok(T::zero());
        }
        let alpha = cbrt2::<T>().recip();
        let stop = T::lit(STOP);
        let z1 = self.coef[0].0;
        let mut acc = Neumaier::new();
        let mut scale = T::zero();
        for &(z, c) in &self.coef {
            if alpha * (z - z1) * t > stop {
                return Ok(alpha * acc.value());
            }
            let term = c * (-alpha * z * t).exp();
            scale = scale + term.abs();
            acc.add(term);
        }
        if let Some(k) = self.tail_from {
            acc.add(self.tail(k, t, alpha, z1, scale));
        }
        Ok(alpha * acc.value())
    }

    /// `f_τ(t)`, clamped at zero.
    pub fn density(&self, t: T) -> Result<T> {
        let h = self.scaled_density(t)?;
        Ok(clamp_nonneg((-t * t * t / T::lit(6.0)).exp() * h))
    }

    /// `∫_a^b f_τ(t) dt` for `0 ≤ a ≤ b`.
    pub fn mass(&self, a: T, b: T) -> Result<QuadResult<T>> {
        if !(a >= T::zero() && b >= a && b.is_finite()) {
            return domain(format!("mass needs 0 <= a <= b < inf, got [{a}, {b}]"));
        }
        if a == b {
            return Ok(QuadResult { value: T::zero(), abs_err: T::zero(), subdivisions: 0, evaluations: 0 });
        }
        let mut failure = None;
        let r = adaptive(
            |t: T| {
                if t <= T::zero() {
                    return T::zero();
                }
                self.density(t).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    T::zero()
                })
            },
            &[a, b],
            T::lit(1e-13),
            T::lit(1e-12),
            2000,
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(r),
        }
    }

    /// `Σ_{j≥k} c_j e^{−α z_j t}` by midpoint Euler–Maclaurin in the index.
    ///
    /// With `z = −a_j` and `w = z − y`, `c_j = π M(z) M(w) sin Δ` where `M` is the
    /// Airy modulus and `Δ` the phase difference `θ(z) − θ(w)`; this is smooth in `j`.
    /// The integral is resolved relative to `scale`, the magnitude of the head terms.
    fn tail(&self, k: usize, t: T, alpha: T, z1: T, scale: T) -> T {
        let half = T::from_usize_lossy(k) - T::lit(0.5);
        let z0 = -zero_seed_real::<T>(half);
        let stop = T::lit(STOP);
        if alpha * (z0 - z1) * t > stop {
            return T::zero();
        }
        let z_end = z1 + stop / (alpha * t);
        let y = self.y;
        let pi = T::PI();
        // c(z) e^{−αzt} and its value per unit z (divide by π²M(z)²)
        let parts = |z: T| {
            let (mz, bz) = neg_modulus_phase(z);
            let (mw, bw) = neg_modulus_phase(z - y);
            let delta = zeta_gap(z, y) - bz + bw;
            let f = pi * mz * mw * delta.sin() * (-alpha * z * t).exp();
            (f, f / (pi * pi * mz * mz))
        };
        let (u0, u1) = (z0.sqrt(), z_end.sqrt());
        let n = ((u1 - u0) * (y + T::one()) / pi).ceil().to_usize().unwrap_or(1).clamp(2, 4000);
        let integral = adaptive(
            |u: T| T::lit(2.0) * u * parts(u * u).1,
            &linspace(u0, u1, n),
            (T::epsilon() * scale).max(T::min_positive_value()),
            T::epsilon() * T::lit(64.0),
            4000,
        )
        .map(|r| r.value)
        .unwrap_or_else(|e| match e {
            crate::error::Error::Quadrature { value, .. } => T::lit(value),
            _ => T::nan(),
        });
        let d = T::lit(0.25);
        let fk = |kk: T| parts(-zero_seed_real::<T>(kk)).0;
        let slope = (fk(half + d) - fk(half - d)) / (T::lit(2.0) * d);
        integral + slope / T::lit(24.0)
    }
}

/// `f_τ(t)` for the first passage of `x + W(t)` to `−t²/2`.
pub fn hitting_density<T: Real>(x: T, t: T, cfg: &SeriesConfig) -> Result<T> {
    HittingKernel::new(x, cfg)?.density(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_integral_matches_direct_summation() {
        let x = 0.8;
        let cfg = SeriesConfig::default();
        let k = HittingKernel::<f64>::new(x, &cfg).unwrap();
        let tail_from = k.tail_from.unwrap();
        let table = shared_zero_table::<f64>(60_000).unwrap();
        let y = 2f64.cbrt() * x;
        let alpha = 2f64.cbrt().recip();
        // at t = 0.02 the terms beyond k = 60000 are below e^{−60}
        for &t in &[0.02, 0.05, 0.2, 1.0] {
            let direct: f64 = table.records()[tail_from - 1..]
                .iter()
                .map(|r| ai_aip(r.a + y).0 / r.aip * (alpha * r.a * t).exp())
                .sum();
            let est = k.tail(tail_from, t, alpha, k.coef[0].0, 1.0);
            assert!((est - direct).abs() < 1e-10 * (1.0 + direct.abs()), "t={t}: {est} vs {direct}");
        }
    }

    #[test]
    fn laplace_transform_identity() {
        let x = 0.6;
        let k = HittingKernel::<f64>::new(x, &SeriesConfig::default()).unwrap();
        let c = 2f64.cbrt();
        for &z in &[0.0, 1.0, 2.0] {
            let pts = linspace(1e-9, 30.0, 60);
            let r = adaptive(|t: f64| k.scaled_density(t).unwrap() * (-z * t).exp(), &pts, 1e-14, 1e-12, 4000).unwrap();
            let want = ai_aip(c * (z + x)).0 / ai_aip(c * z).0;
            assert!((r.value - want).abs() < 1e-8 * want, "z={z}: {} vs {want}", r.value);
        }
    }

    #[test]
    fn mass_is_additive() {
        let k = HittingKernel::<f64>::new(0.5, &SeriesConfig::default()).unwrap();
        let whole = k.mass(0.0, 2.0).unwrap().value;
        let parts = k.mass(0.0, 0.3).unwrap().value + k.mass(0.3, 2.0).unwrap().value;
        assert!((whole - parts).abs() < 1e-12);
        assert_eq!(k.mass(1.0, 1.0).unwrap().value, 0.0);
        assert!(k.mass(1.0, 0.5).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        let cfg = SeriesConfig::default();
        assert!(hitting_density(0.0, 1.0, &cfg).is_err());
        assert!(hitting_density(1.0, 0.0, &cfg).is_err());
        assert_eq!(hitting_density(2.0, 0.01, &cfg).unwrap(), 0.0);
    }
}
