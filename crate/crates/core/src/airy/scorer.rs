//! Scorer function Hi on the non-positive axis, the weight φ(k) and the primitive AI.

use super::eval::{airy_unchecked, scaled_unchecked, zeta};
use crate::error::{domain, Result};
use crate::quad::{adaptive, linspace};
use crate::scalar::Real;

/// Below this argument Hi is evaluated from its asymptotic expansion, whose smallest
/// term is 2.7e-17 here (and 2e-8 at x = −8).
pub const HI_ASYMPTOTIC_BELOW: f64 = -14.0;

/// φ(k) switches from the integral route to the asymptotic route at this index
/// (`a_40 ≈ −32.7`).
pub const PHI_CROSSOVER_K: usize = 40;

// Relative tolerance for the internal integrals.
fn tight<T: Real>() -> T {
    T::epsilon() * T::lit(64.0)
}

/// `Hi(x) = π^{−1}∫₀^∞ exp(−t³/3 + x t) dt` for `x ≤ 0`.
pub fn scorer_hi<T: Real>(x: T) -> Result<T> {
    if x.is_nan() {
        return domain("scorer_hi: NaN argument");
    }
    if x > T::zero() {
        return domain(format!("scorer_hi: only x <= 0 is supported, got {x}"));
    }
    if x == T::neg_infinity() {
        return Ok(T::zero());
    }
    if x < T::lit(HI_ASYMPTOTIC_BELOW) {
        return Ok(hi_asymptotic(x));
    }
    let ax = -x;
    // t³/3 + |x|t ≥ 46 beyond the cutoff
    let cutoff = T::lit(138.0).cbrt().min(T::lit(46.0) / ax.max(T::min_positive_value()));
    let pts = [T::zero(), cutoff / T::lit(8.0), cutoff / T::lit(4.0), cutoff / T::lit(2.0), cutoff];
    let r = adaptive(|t: T| (-t * t * t / T::lit(3.0) + x * t).exp(), &pts, T::zero(), tight(), 2000)?;
    Ok(r.value * T::FRAC_1_PI())
}

/// `−π^{−1}Σ_{ℓ≥0} (3ℓ)!/(3^ℓ ℓ!) · x^{−3ℓ−1}`, optimally truncated.
pub(crate) fn hi_asymptotic<T: Real>(x: T) -> T {
    let s = asymptotic_hi_series(x, 0);
    -s * T::FRAC_1_PI()
}

/// `Σ_{ℓ≥ℓ0} (3ℓ)!/(3^ℓ ℓ!) · x^{−3ℓ−1}` truncated at its smallest term.
fn asymptotic_hi_series<T: Real>(x: T, l0: usize) -> T {
    let x3 = x * x * x;
    let mut term = T::one() / x;
    for l in 1..=l0 {
        let l3 = T::from_usize_lossy(3 * l);
        term = term * (l3 - T::lit(2.0)) * (l3 - T::one()) / x3;
    }
    let mut sum = term;
    let mut last = term.abs();
    for l in l0 + 1..l0 + 400 {
        let l3 = T::from_usize_lossy(3 * l);
        let next = term * (l3 - T::lit(2.0)) * (l3 - T::one()) / x3;
        if next.abs() >= last {
            break;
        }
        sum = sum + next;
        if next.abs() <= T::epsilon() * T::lit(1e-3) * sum.abs() {
            break;
        }
        last = next.abs();
        term = next;
    }
    sum
}

/// φ = πHi(a) + 1/a from `∫₀^∞ (e^{−t³/3} − 1) e^{a t} dt`, which has no cancellation.
pub fn phi_by_integral<T: Real>(a: T) -> Result<T> {
    if !(a < T::zero()) {
        return domain(format!("phi: argument must be negative, got {a}"));
    }
    let aa = -a;
    // e^{a t} < e^{-46} |a|^{-4} beyond the cutoff
    let cutoff = (T::lit(46.0) + T::lit(4.0) * aa.ln().max(T::zero())) / aa;
    let pts = linspace(T::zero(), cutoff, 6);
    let r = adaptive(|t: T| (-t * t * t / T::lit(3.0)).exp_m1() * (a * t).exp(), &pts, T::zero(), tight(), 2000)?;
    Ok(r.value)
}

/// φ from the asymptotic expansion `−Σ_{ℓ≥1} (3ℓ)!/(3^ℓ ℓ!) · a^{−3ℓ−1} ∼ −2a^{−4}`.
/// The terms alternate in sign for `a < 0`; the truncation error is below the first
/// omitted term.
pub fn phi_by_asymptotic<T: Real>(a: T) -> T {
    -asymptotic_hi_series(a, 1)
}

/// `φ(k) = πHi(a_k) + 1/a_k`, routed by `k` around [`PHI_CROSSOVER_K`].
pub fn phi_of_k<T: Real>(k: usize, a_k: T) -> Result<T> {
    if k < PHI_CROSSOVER_K {
        phi_by_integral(a_k)
    } else {
        if !(a_k < T::zero()) {
            return domain(format!("phi: argument must be negative, got {a_k}"));
        }
        Ok(phi_by_asymptotic(a_k))
    }
}

/// `AI(x) = ∫_x^∞ Ai(t) dt` for `|x| ≤ 10⁴`.
pub fn ai_primitive<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() || x.abs() > T::lit(1e4) {
        return domain(format!("ai_primitive: argument must be finite with |x| <= 1e4, got {x}"));
    }
    if x >= T::zero() {
        // e^{−ζ(x)} ∫_x^T Ai(t)e^{ζ(t)} e^{−(ζ(t)−ζ(x))} dt keeps the relative accuracy.
        let zx = zeta(x);
        let upper = (T::lit(1.5) * (zx + T::lit(46.0))).powf(T::lit(2.0 / 3.0));
        let pts = linspace(x, upper, 8);
        let r = adaptive(
            |t: T| {
                let s = scaled_unchecked(t);
                s.ai_scaled * (zx - s.zeta).exp()
            },
            &pts,
            T::zero(),
            tight(),
            2000,
        )?;
        Ok(r.value * (-zx).exp())
    } else {
        let panels = (-x).ceil().to_usize().unwrap_or(1).max(1);
        let pts = linspace(x, T::zero(), panels);
        let r = adaptive(|t: T| airy_unchecked(t).ai, &pts, T::epsilon(), tight(), 20 * panels + 2000)?;
        Ok(T::one() / T::lit(3.0) + r.value)
    }
}
