//! `G(x) = P(N > x)` and the densities of `N` and `M`.

use super::tail::osc_power_tail;
use super::{cbrt2, clamp_nonneg, clamp_unit, SeriesConfig, TailMode};
use crate::airy::{ai_aip, shared_asymptotic_table, shared_zero_table, ZeroRecord, AI0, AIP0};
use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::sum::Neumaier;
use serde::{Deserialize, Serialize};

/// Tail terms `K ≤ k ≤ DIRECT_END` are summed from asymptotic records; beyond that
/// the leading oscillatory form is integrated.
const DIRECT_END: usize = 4000;

/// Law of `N` and `M` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint<T> {
    pub x: T,
    pub g: T,
    pub f_n: T,
    pub f_m: T,
    pub cdf_n: T,
    pub cdf_m: T,
}

/// Unclamped `(G(x), f_N(x))`. At `x = 0` the density is the limit of the series.
pub(crate) fn raw_g_fn<T: Real>(x: T, cfg: &SeriesConfig) -> Result<(T, T)> {
    cfg.validate()?;
    let c = cbrt2::<T>();
    let y = c * x;
    let a0 = T::lit(AI0);
    let mut g = Neumaier::new();
    let mut f = Neumaier::new();
    let k = cfg.terms;
    let table = shared_zero_table::<T>(k - 1)?;
    if x == T::zero() {
        // Ai(a_k) = 0, and the density series collapses to −c(Ai′(0)/Ai(0) + Σ φ_k).
        g.add(T::one());
        f.add(-c * T::lit(AIP0) / a0);
        let phi = super::tail::series_sum::<T, _>(cfg, |r| r.phi, super::tail::Shape::Smooth(8.0 / 3.0))?;
        f.add(-c * phi.value);
        return Ok((g.value(), f.value()));
    }
    let (ai, aip) = ai_aip(y);
    g.add(ai / a0);
    f.add(-c * aip / a0);
    let mut term = |r: &ZeroRecord<T>| {
        let w = r.phi / r.aip;
        let (s, sp) = ai_aip(r.a + y);
        g.add(w * s);
        f.add(-c * w * sp);
    };
    table.head(k - 1).iter().for_each(&mut term);
    if cfg.tail_mode == TailMode::Asymptotic {
        let end = DIRECT_END.max(k - 1);
        if end >= k {
            let asym = shared_asymptotic_table::<T>(end);
            asym.records()[k - 1..end].iter().for_each(&mut term);
        }
        let (gr, fr) = oscillatory_remainder(x, end + 1);
        g.add(gr);
        f.add(fr);
    }
    Ok((g.value(), f.value()))
}

/// Leading-order sums over `k ≥ k0` of the `G` and `f_N` summands, by midpoint
/// Euler–Maclaurin in `u = k^{1/3}`.
fn oscillatory_remainder<T: Real>(x: T, k0: usize) -> (T, T) {
    let pi = T::PI();
    let omega = (T::lit(3.0) * pi).cbrt() * x;
    let u0 = (T::from_usize_lossy(k0) - T::lit(0.5)).cbrt();
    let three = T::lit(3.0);
    let g_coef = -T::lit(16.0) / (T::lit(27.0) * pi.powi(3));
    let f_coef = T::lit(16.0) / (three * pi).powf(T::lit(8.0 / 3.0));
    let g = g_coef * three * osc_power_tail(7, omega, u0, -T::FRAC_PI_2());
    let f = f_coef * three * osc_power_tail(6, omega, u0, T::zero());
    (g, f)
}

fn check_nonneg<T: Real>(x: T, what: &str) -> Result<()> {
    if !(x >= T::zero()) || !x.is_finite() {
        return domain(format!("{what} requires finite x >= 0, got {x}"));
    }
    Ok(())
}

fn check_pos<T: Real>(x: T, what: &str) -> Result<()> {
    if !(x > T::zero()) || !x.is_finite() {
        return domain(format!("{what} requires finite x > 0, got {x}"));
    }
    Ok(())
}

/// `G(x) = P(N > x)`, clamped to `[0, 1]`.
pub fn tail_probability_g<T: Real>(x: T, cfg: &SeriesConfig) -> Result<T> {
    check_nonneg(x, "G(x)")?;
    Ok(clamp_unit(raw_g_fn(x, cfg)?.0))
}

/// Density of `N`, clamped at zero.
pub fn density_fn<T: Real>(x: T, cfg: &SeriesConfig) -> Result<T> {
    check_pos(x, "f_N(x)")?;
    Ok(clamp_nonneg(raw_g_fn(x, cfg)?.1))
}

/// Density of `M`: `2(1 − G(x)) f_N(x)`.
pub fn density_fm<T: Real>(x: T, cfg: &SeriesConfig) -> Result<T> {
    check_pos(x, "f_M(x)")?;
    let p = eval_point(x, cfg)?;
    Ok(p.f_m)
}

/// Distribution functions and densities of `N` and `M` at `x ≥ 0` from one pass.
pub fn eval_point<T: Real>(x: T, cfg: &SeriesConfig) -> Result<EvalPoint<T>> {
    check_nonneg(x, "eval_point")?;
    let (g, f) = raw_g_fn(x, cfg)?;
    let g = clamp_unit(g);
    let f_n = clamp_nonneg(f);
    let cdf_n = T::one() - g;
    Ok(EvalPoint { x, g, f_n, f_m: T::lit(2.0) * cdf_n * f_n, cdf_n, cdf_m: cdf_n * cdf_n })
}
