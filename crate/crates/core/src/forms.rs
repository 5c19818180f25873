//! Real-axis integral forms of `E M` and a suite of Airy integral identities
//! checked by quadrature.

use crate::airy::{ai_aip, ai_primitive, airy_unchecked, scaled_unchecked, shared_zero_table, zeta, AI0, AIP0};
use crate::error::{Error, Result};
use crate::quad::{adaptive, linspace, QuadResult, QuadratureSpec};
use crate::scalar::Real;
use crate::sum::{hurwitz_zeta, Neumaier};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Integrands switch to exponentially scaled Airy values from here on.
pub const SCALED_FROM: f64 = 6.0;

/// Real-axis form used by [`em_via_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmForm {
    /// `2^{2/3} ∫ (Ai² + √3 Ai Bi)/(Ai² + Bi²)`
    Em3,
    /// `(2^{2/3}/π) ∫ (√3 Bi² − √3 Ai² + 2 Ai Bi)/(Ai² + Bi²)² t`
    Em2,
    /// `2^{2/3} Re[(1 + i√3) ∫ Ai/(Ai + i Bi)]`
    Em4,
}

impl EmForm {
    pub const ALL: [EmForm; 3] = [EmForm::Em3, EmForm::Em2, EmForm::Em4];

    pub fn name(self) -> &'static str {
        match self {
            EmForm::Em3 => "em3",
            EmForm::Em2 => "em2",
            EmForm::Em4 => "em4",
        }
    }
}

impl std::str::FromStr for EmForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "em3" => Ok(EmForm::Em3),
            "em2" => Ok(EmForm::Em2),
            "em4" => Ok(EmForm::Em4),
            _ => Err(Error::Config(format!("unknown form {s:?} (expected em3, em2 or em4)"))),
        }
    }
}

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport<T> {
    pub name: String,
    /// Closed form.
    pub lhs: T,
    /// Quadrature or summation.
    pub rhs: T,
    pub abs_gap: T,
    pub tolerance: T,
    pub pass: bool,
}

impl<T: Real> IdentityReport<T> {
    pub fn new(name: impl Into<String>, lhs: T, rhs: T, tolerance: T) -> Self {
        let abs_gap = (lhs - rhs).abs();
        Self { name: name.into(), lhs, rhs, abs_gap, tolerance, pass: abs_gap <= tolerance }
    }
}

/// `(ρ, 1/Bi²)` with `ρ = Ai/Bi`, for `t ≥ 0`.
fn ratio_parts<T: Real>(t: T) -> (T, T) {
    if t < T::lit(SCALED_FROM) {
        let v = airy_unchecked(t);
        (v.ai / v.bi, (v.bi * v.bi).recip())
    } else {
        let s = scaled_unchecked(t);
        let e = (-T::lit(2.0) * s.zeta).exp();
        (s.ai_scaled / s.bi_scaled * e, e / (s.bi_scaled * s.bi_scaled))
    }
}

/// Integrand of the chosen form at `t ≥ 0`, without the `2^{2/3}` prefactor.
pub fn em_integrand<T: Real>(form: EmForm, t: T) -> T {
    let (rho, inv_bi2) = ratio_parts(t);
    let s3 = T::lit(3.0).sqrt();
    let d = T::one() + rho * rho;
    match form {
        EmForm::Em3 => (rho * rho + s3 * rho) / d,
        EmForm::Em2 => (s3 - s3 * rho * rho + T::lit(2.0) * rho) * inv_bi2 / (d * d) * t * T::FRAC_1_PI(),
        EmForm::Em4 => {
            // Ai/(Ai + i Bi) = ρ/(ρ + i)
            let w = Complex::new(rho, T::zero()) / Complex::new(rho, T::one());
            (Complex::new(T::one(), s3) * w).re
        }
    }
}

/// Em3 integrand from unscaled Airy values, for comparison with the scaled path.
pub fn em3_integrand_unscaled<T: Real>(t: T) -> T {
    let v = airy_unchecked(t);
    let s3 = T::lit(3.0).sqrt();
    (v.ai * v.ai + s3 * v.ai * v.bi) / (v.ai * v.ai + v.bi * v.bi)
}

/// Bound on `∫_T^∞` of the integrand: all forms decay like `t^{3/2} e^{−(4/3)t^{3/2}}`
/// at worst, and `∫_T^∞ e^{−(4/3)t^{3/2}} ≤ e^{−(4/3)T^{3/2}}/(2√T)`.
fn em_tail_bound<T: Real>(form: EmForm, cutoff: T) -> T {
    let two_zeta = T::lit(2.0) * zeta(cutoff);
    let poly = match form {
        EmForm::Em2 => T::lit(2.0) * cutoff * cutoff.sqrt(),
        _ => T::one(),
    };
    T::lit(2.0) * poly * (-two_zeta).exp() / (T::lit(2.0) * cutoff.sqrt())
}

/// `E M` by quadrature of a real-axis form. The value includes the `2^{2/3}` factor;
/// `abs_err` includes the analytic tail bound beyond the cutoff.
pub fn em_via_integral<T: Real>(form: EmForm, spec: &QuadratureSpec<T>) -> Result<QuadResult<T>> {
    spec.validate()?;
    let cutoff = match spec.upper_cutoff {
        Some(c) => c,
        None => {
            let mut c = T::lit(2.0);
            while em_tail_bound(form, c) > spec.abs_tol / T::lit(10.0) {
                c = c + T::lit(0.25);
            }
            c
        }
    };
    let tail = em_tail_bound(form, cutoff);
    let scale = T::lit(4.0).cbrt();
    let mut pts = linspace(T::zero(), cutoff, (cutoff.to_f64_lossy().ceil() as usize).max(1));
    pts.dedup();
    let mut r = adaptive(|t| em_integrand(form, t), &pts, spec.abs_tol / scale, spec.rel_tol, spec.max_subdivisions)?;
    r.value = r.value * scale;
    r.abs_err = (r.abs_err + tail) * scale;
    Ok(r)
}

/// `∫_{−t_neg}^{t_pos} e^{zt} Ai(t) dt`, with the tail bounds beyond both ends added
/// to the error.
pub fn laplace_airy_integral<T: Real>(z: T, t_neg: T, t_pos: T, spec: &QuadratureSpec<T>) -> Result<QuadResult<T>> {
    spec.validate()?;
    if !(z > T::zero()) {
        return Err(Error::Domain(format!("Laplace transform of Ai needs z > 0, got {z}")));
    }
    let panels = (t_neg + t_pos).ceil().to_usize().unwrap_or(1).max(1);
    let pts = linspace(-t_neg, t_pos, panels);
    let mut r = adaptive(|t: T| (z * t).exp() * ai_aip(t).0, &pts, spec.abs_tol, spec.rel_tol, spec.max_subdivisions)?;
    // |Ai(−x)| ≤ x^{−1/4}/√π and Ai(x) ≤ e^{−ζ}/(2√π x^{1/4})
    let rpi = T::PI().sqrt().recip();
    let neg = rpi * t_neg.powf(T::lit(-0.25)) * (-z * t_neg).exp() / z;
    let slope = t_pos.sqrt() - z;
    let pos = if slope > T::zero() {
        rpi * (z * t_pos - zeta(t_pos)).exp() / (T::lit(2.0) * t_pos.powf(T::lit(0.25)) * slope)
    } else {
        T::infinity()
    };
    r.abs_err = r.abs_err + neg + pos;
    Ok(r)
}

/// Checks `∫_{−∞}^{∞} e^{zt} Ai(t) dt = e^{z³/3}` to `1e-7` relative or `1e-9`
/// absolute, whichever is tighter.
pub fn laplace_airy_check<T: Real>(z: T, spec: &QuadratureSpec<T>) -> Result<IdentityReport<T>> {
    let exact = (z * z * z / T::lit(3.0)).exp();
    let tol = (T::lit(1e-7) * exact).min(T::lit(1e-9)).max(spec.abs_tol);
    // negative side: e^{−z T}T^{−1/4}/(z√π) ≤ tol/10
    let mut t_neg = T::lit(4.0);
    while T::PI().sqrt().recip() * t_neg.powf(T::lit(-0.25)) * (-z * t_neg).exp() / z > tol / T::lit(100.0) {
        t_neg = t_neg + T::one();
    }
    // positive side: exponent zt − (2/3)t^{3/2} below −40 past the maximum at √t = z
    let mut t_pos = (z * z).max(T::one()) + T::one();
    while z * t_pos - zeta(t_pos) > T::lit(-40.0) {
        t_pos = t_pos + T::one();
    }
    let r = laplace_airy_integral(z, t_neg, t_pos, spec)?;
    Ok(IdentityReport::new(format!("laplace(z={z})"), exact, r.value, tol))
}

/// Upper end for integrals of `Ai(x + a)` products over `[0, ∞)` with `a ≥ a_min`.
fn product_cutoff<T: Real>(a_min: T) -> T {
    (-a_min).max(T::zero()) + T::lit(30.0)
}

fn integrate_on_half_line<T: Real>(f: impl FnMut(T) -> T, a_min: T, spec: &QuadratureSpec<T>) -> Result<T> {
    let hi = product_cutoff(a_min);
    let pts = linspace(T::zero(), hi, hi.ceil().to_usize().unwrap_or(1));
    Ok(adaptive(f, &pts, spec.abs_tol / T::lit(10.0), spec.rel_tol, spec.max_subdivisions)?.value)
}

/// Integral identities for Airy translates: orthogonality and norms of
/// `Ai(x + a_k)`, first moments, mixed products with `Ai(x)`, the two-point formulas
/// at generic points and the cubic recursion.
pub fn airy_identity_suite<T: Real>(spec: &QuadratureSpec<T>, k_max: usize) -> Result<Vec<IdentityReport<T>>> {
    spec.validate()?;
    if k_max == 0 {
        return Err(Error::Config("k_max must be positive".into()));
    }
    let table = shared_zero_table::<T>(k_max)?;
    let tol = spec.abs_tol;
    let (a0, a0p) = (T::lit(AI0), T::lit(AIP0));
    let mut out = Vec::new();
    let ai = |x: T| ai_aip(x).0;
    for rk in table.head(k_max) {
        let (a, d) = (rk.a, rk.aip);
        let k = rk.k;
        let q = integrate_on_half_line(|x| ai(x + a) * ai(x + a), a, spec)?;
        out.push(IdentityReport::new(format!("norm(k={k})"), d * d, q, tol));
        let q = integrate_on_half_line(|x| x * ai(x + a) * ai(x + a), a, spec)?;
        out.push(IdentityReport::new(format!("x_norm(k={k})"), -T::lit(2.0 / 3.0) * a * d * d, q, tol));
        let q = integrate_on_half_line(|x| ai(x) * ai(x + a), a, spec)?;
        out.push(IdentityReport::new(format!("mixed_origin(k={k})"), -a0 * d / a, q, tol));
        let q = integrate_on_half_line(|x| x * ai(x) * ai(x + a), a, spec)?;
        let lhs = -T::lit(2.0) * a0p * d / (a * a) - T::lit(2.0) * a0 * d / (a * a * a);
        out.push(IdentityReport::new(format!("x_mixed_origin(k={k})"), lhs, q, tol));
        let q = integrate_on_half_line(|x| ai(x + a), a, spec)?;
        out.push(IdentityReport::new(format!("primitive(k={k})"), -T::PI() * d * rk.gi, q, tol));
        let q = integrate_on_half_line(|x| x * ai(x + a), a, spec)?;
        let lhs = -d - a * ai_primitive(a)?;
        out.push(IdentityReport::new(format!("x_primitive(k={k})"), lhs, q, tol));
    }
    for (i, rk) in table.head(k_max).iter().enumerate() {
        for rl in &table.head(k_max)[i + 1..] {
            let (ak, al) = (rk.a, rl.a);
            let lo = ak.min(al);
            let q = integrate_on_half_line(|x| ai(x + ak) * ai(x + al), lo, spec)?;
            out.push(IdentityReport::new(format!("orthogonal(k={},l={})", rk.k, rl.k), T::zero(), q, tol));
            let q = integrate_on_half_line(|x| x * ai(x + ak) * ai(x + al), lo, spec)?;
            let d = ak - al;
            let lhs = -T::lit(2.0) * rk.aip * rl.aip / (d * d);
            out.push(IdentityReport::new(format!("x_orthogonal(k={},l={})", rk.k, rl.k), lhs, q, tol));
        }
    }
    let (a, b) = (T::lit(0.3), T::lit(-1.1));
    let q = integrate_on_half_line(|x| ai(x + a) * ai(x + b), b, spec)?;
    out.push(IdentityReport::new("two_point(a=0.3,b=-1.1)", two_point(a, b), q, tol));
    let q = integrate_on_half_line(|x| x * ai(x + a) * ai(x + b), b, spec)?;
    out.push(IdentityReport::new("x_two_point(a=0.3,b=-1.1)", two_point_x(a, b), q, tol));
    // a → b limit of the two-point formula against ∫_b^∞ Ai² = Ai′(b)² − bAi(b)²
    let h = T::lit(1e-5);
    let limit = (two_point(b + h, b) + two_point(b - h, b)) / T::lit(2.0);
    let (ab, abp) = ai_aip(b);
    out.push(IdentityReport::new("two_point_diagonal(b=-1.1)", abp * abp - b * ab * ab, limit, tol));
    // ∫_0^∞ x³Ai² = (3/7)Ai′(0)² from the recursion
    let q = integrate_on_half_line(|x| x * x * x * ai(x) * ai(x), T::zero(), spec)?;
    out.push(IdentityReport::new("cubic_moment", T::lit(3.0 / 7.0) * a0p * a0p, q, tol));
    Ok(out)
}

/// `∫_0^∞ Ai(x + a)Ai(x + b) dx` for `a ≠ b`.
pub fn two_point<T: Real>(a: T, b: T) -> T {
    let ((fa, fpa), (fb, fpb)) = (ai_aip(a), ai_aip(b));
    (fa * fpb - fpa * fb) / (a - b)
}

/// `∫_0^∞ x Ai(x + a)Ai(x + b) dx` for `a ≠ b`.
pub fn two_point_x<T: Real>(a: T, b: T) -> T {
    let ((fa, fpa), (fb, fpb)) = (ai_aip(a), ai_aip(b));
    let d = a - b;
    let two = T::lit(2.0);
    (a + b) / (d * d) * fa * fb - two / (d * d) * fpa * fpb + two / (d * d * d) * (fa * fpb - fpa * fb)
}

/// `Σ_{k≤K} a_k^{−2}`.
pub fn parseval_partial<T: Real>(k_max: usize) -> Result<T> {
    let table = shared_zero_table::<T>(k_max)?;
    Ok(table.head(k_max).iter().map(|r| (r.a * r.a).recip()).collect::<Neumaier<T>>().value())
}

/// `Σ_{k>K} a_k^{−2}` from `a_k^{−2} = C s^{−4/3} − C(5/24)(3π/2)^{−2} s^{−10/3} + O(s^{−16/3})`,
/// `s = k − 1/4`, `C = (3π/2)^{−4/3}`.
pub fn parseval_tail<T: Real>(k_max: usize) -> T {
    let w = T::lit(1.5) * T::PI();
    let c = w.powf(T::lit(-4.0 / 3.0));
    let q = T::from_usize_lossy(k_max) + T::lit(0.75);
    c * hurwitz_zeta(T::lit(4.0 / 3.0), q) - c * T::lit(5.0 / 24.0) / (w * w) * hurwitz_zeta(T::lit(10.0 / 3.0), q)
}

/// Compares `Σ_k a_k^{−2}` (partial sum to `k_max` plus tail) with `(Ai′(0)/Ai(0))²`.
pub fn parseval_sum<T: Real>(k_max: usize) -> Result<IdentityReport<T>> {
    let sum = parseval_partial::<T>(k_max)? + parseval_tail::<T>(k_max);
    let r = T::lit(AIP0) / T::lit(AI0);
    Ok(IdentityReport::new(format!("parseval(k_max={k_max})"), r * r, sum, T::lit(1e-7)))
}
