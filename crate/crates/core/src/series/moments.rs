//! Means and second moments of `N` and `M` as Airy-zero series.

use super::dist::raw_g_fn;
use super::tail::{series_sum, Partial, Shape};
use super::{cbrt2, SeriesConfig, TailMode};
use crate::airy::{airy_zero_asymptotic, shared_zero_table, ZeroRecord, AI0, AIP0};
use crate::error::Result;
use crate::quad::{adaptive, linspace};
use crate::scalar::Real;
use crate::sum::{hurwitz_zeta, Neumaier};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Absolute error estimates for the entries of a [`MomentSet`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentErrors<T> {
    pub en: T,
    pub em: T,
    pub en2: T,
    pub em2: T,
    pub var_n: T,
    pub var_m: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet<T> {
    pub en: T,
    pub em: T,
    pub en2: T,
    pub em2: T,
    pub var_n: T,
    pub var_m: T,
    pub err_est: MomentErrors<T>,
}

/// Alternative forms of the same quantities, used as self-checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentDiagnostics<T> {
    /// `E N` summed with `Gi(a_k)` in place of `Bi − Hi`.
    pub en_gi: T,
    /// `E N²` summed with `Gi(a_k)`.
    pub en2_gi: T,
    /// `∫G²` from the `φ/a_k` and `φ²` sums.
    pub g2_phi: T,
    /// `∫G²` as `2^{−1/3}π² Σ Hi(a_k)²`.
    pub g2_hi: T,
    /// `Σ_k Σ_{j<k} φ_k φ_j/(a_k − a_j)²`.
    pub double_sum: T,
    /// Estimated part of the double sum beyond the summed range.
    pub double_sum_tail: T,
}

/// Sums over `k ≥ K` of the double sum are extrapolated beyond this index.
const DOUBLE_SUM_END: usize = 4000;
/// Exact summation limit of the double sum without tails.
const DOUBLE_SUM_CAP: usize = 20_000;

struct Sums<T> {
    phi_bi: Partial<T>,
    phi_hi: Partial<T>,
    phi2: Partial<T>,
    a_phi_bi: Partial<T>,
    a_phi2: Partial<T>,
    phi_a3: Partial<T>,
    phi_a2: Partial<T>,
}

fn sums<T: Real>(cfg: &SeriesConfig) -> Result<Sums<T>> {
    let p = |x: f64| Shape::Paired(x);
    let s = |x: f64| Shape::Smooth(x);
    Ok(Sums {
        phi_bi: series_sum::<T, _>(cfg, |r| r.phi * r.bi, p(23.0 / 6.0))?,
        phi_hi: series_sum::<T, _>(cfg, |r| r.phi * r.hi, s(10.0 / 3.0))?,
        phi2: series_sum::<T, _>(cfg, |r| r.phi * r.phi, s(16.0 / 3.0))?,
        a_phi_bi: series_sum::<T, _>(cfg, |r| r.a * r.phi * r.bi, p(19.0 / 6.0))?,
        a_phi2: series_sum::<T, _>(cfg, |r| r.a * r.phi * r.phi, s(14.0 / 3.0))?,
        phi_a3: series_sum::<T, _>(cfg, |r| r.phi / r.a.powi(3), s(14.0 / 3.0))?,
        phi_a2: series_sum::<T, _>(cfg, |r| r.phi / (r.a * r.a), s(4.0))?,
    })
}

fn double_sum_over<T: Real>(recs: &[ZeroRecord<T>]) -> (T, T) {
    let terms: Vec<T> = (1..recs.len())
        .into_par_iter()
        .map(|k| {
            let ak = recs[k].a;
            let mut inner = Neumaier::new();
            for r in &recs[..k] {
                let d = ak - r.a;
                inner.add(r.phi / (d * d));
            }
            recs[k].phi * inner.value()
        })
        .collect();
    let last = terms.last().copied().unwrap_or_else(T::zero);
    (terms.into_iter().collect::<Neumaier<T>>().value(), last)
}

/// `Σ_{k≥2} φ_k Σ_{j<k} φ_j/(a_k − a_j)²` with an error estimate.
fn double_sum<T: Real>(cfg: &SeriesConfig) -> Result<Partial<T>> {
    let k = cfg.terms;
    let exact = shared_zero_table::<T>(k - 1)?;
    let build = |end: usize, exact_below: usize| -> Vec<ZeroRecord<T>> {
        (1..=end).map(|i| if i < exact_below { *exact.get(i) } else { airy_zero_asymptotic(i) }).collect()
    };
    // terms ~ C k^{−4}
    let four = T::lit(4.0);
    let extrapolate = |n: usize, last: T| {
        let nf = T::from_usize_lossy(n);
        last * nf.powf(four) * hurwitz_zeta(four, nf + T::one())
    };
    let full = |end: usize| {
        let recs = build(end, k.min(end + 1));
        let (v, last) = double_sum_over(&recs);
        let rem = extrapolate(end, last);
        Partial { value: v + rem, err: rem.abs() * T::lit(0.1) + T::epsilon() * T::lit(16.0) * v.abs() }
    };
    match cfg.tail_mode {
        TailMode::Asymptotic => Ok(full(DOUBLE_SUM_END.max((k - 1).min(DOUBLE_SUM_CAP)))),
        TailMode::None => {
            let end = (k - 1).min(DOUBLE_SUM_CAP);
            let (v, _) = double_sum_over(exact.head(end));
            let reference = full(DOUBLE_SUM_END.max(end));
            Ok(Partial { value: v, err: (reference.value - v).abs() + reference.err })
        }
    }
}

fn head_constants<T: Real>() -> (T, T, T) {
    (T::lit(AI0), T::lit(AIP0), T::lit(AIP0) / T::lit(AI0))
}

/// Means, second moments and variances of `N` and `M`.
pub fn moments<T: Real>(cfg: &SeriesConfig) -> Result<MomentSet<T>> {
    cfg.validate()?;
    let s = sums::<T>(cfg)?;
    let d = double_sum::<T>(cfg)?;
    let c = cbrt2::<T>();
    let pi = T::PI();
    let (a0, a0p, r) = head_constants::<T>();
    let three = T::lit(3.0);
    let two = T::lit(2.0);
    let c4 = c.powi(4);
    let c7 = c.powi(7);

    let en = (three * c * a0).recip() - pi / c * (s.phi_bi.value - s.phi_hi.value);
    let en_err = pi / c * (s.phi_bi.err + s.phi_hi.err);
    let em = c * c / (three * a0) - a0p * a0p / (c * a0 * a0) - (two * pi * s.phi_bi.value - s.phi2.value) / c;
    let em_err = (two * pi * s.phi_bi.err + s.phi2.err) / c;
    let en2 = -c * r + c * (pi * s.a_phi_bi.value - s.a_phi2.value);
    let en2_err = c * (pi * s.a_phi_bi.err + s.a_phi2.err);
    let em2 = -T::lit(5.0) * c / three * r
        + c4 * (pi * s.a_phi_bi.value - two / three * s.a_phi2.value + two * s.phi_a3.value + two * r * s.phi_a2.value)
        + c7 * d.value;
    let em2_err = c4
        * (pi * s.a_phi_bi.err + two / three * s.a_phi2.err + two * s.phi_a3.err + two * r.abs() * s.phi_a2.err)
        + c7 * d.err;
    // rounding of the closed-form heads
    let ulp = T::epsilon() * T::lit(8.0);
    let err_est = MomentErrors {
        en: en_err + ulp * en.abs(),
        em: em_err + ulp * em.abs(),
        en2: en2_err + ulp * en2.abs(),
        em2: em2_err + ulp * em2.abs(),
        var_n: en2_err + two * en.abs() * en_err + ulp * en2.abs(),
        var_m: em2_err + two * em.abs() * em_err + ulp * em2.abs(),
    };
    Ok(MomentSet { en, em, en2, em2, var_n: en2 - en * en, var_m: em2 - em * em, err_est })
}

/// Algebraically equivalent forms of the moment series.
pub fn moment_diagnostics<T: Real>(cfg: &SeriesConfig) -> Result<MomentDiagnostics<T>> {
    cfg.validate()?;
    let c = cbrt2::<T>();
    let pi = T::PI();
    let (a0, _, r) = head_constants::<T>();
    let phi_gi = series_sum::<T, _>(cfg, |rec| rec.phi * rec.gi, Shape::Paired(10.0 / 3.0))?;
    let en2_terms =
        series_sum::<T, _>(cfg, |rec| rec.phi * (pi * rec.a * rec.gi - T::one()), Shape::Paired(19.0 / 6.0))?;
    let phi_a = series_sum::<T, _>(cfg, |rec| rec.phi / rec.a, Shape::Smooth(10.0 / 3.0))?;
    let phi2 = series_sum::<T, _>(cfg, |rec| rec.phi * rec.phi, Shape::Smooth(16.0 / 3.0))?;
    let hi2 = series_sum::<T, _>(cfg, |rec| rec.hi * rec.hi, Shape::Smooth(4.0 / 3.0))?;
    let d = double_sum::<T>(cfg)?;
    let ic = c.recip();
    Ok(MomentDiagnostics {
        en_gi: (T::lit(3.0) * c * a0).recip() - pi / c * phi_gi.value,
        en2_gi: -c * r + c * en2_terms.value,
        g2_phi: ic * r * r - c * c * phi_a.value + ic * phi2.value,
        g2_hi: ic * pi * pi * hi2.value,
        double_sum: d.value,
        double_sum_tail: d.err,
    })
}

/// `(E N, E M)` from the conditionally convergent `Σ Hi(Hi − Bi)` and `Σ Hi(Hi − 2Bi)`.
/// Consecutive terms are always paired.
pub fn mean_via_tmean<T: Real>(cfg: &SeriesConfig) -> Result<(T, T)> {
    let cfg = SeriesConfig { pairing: true, ..*cfg };
    cfg.validate()?;
    let hi2 = series_sum::<T, _>(&cfg, |r| r.hi * r.hi, Shape::Smooth(4.0 / 3.0))?;
    let hibi = series_sum::<T, _>(&cfg, |r| r.hi * r.bi, Shape::Paired(11.0 / 6.0))?;
    let k = T::PI() * T::PI() / cbrt2::<T>();
    Ok((k * (hi2.value - hibi.value), k * (hi2.value - T::lit(2.0) * hibi.value)))
}

/// `G(x)` is below `1e-40` from here on.
pub(crate) const G_SUPPORT_END: f64 = 12.0;
/// Pointwise accuracy of the series for `G`, set by the oscillatory tail remainder.
const G_POINT_ERROR: f64 = 1e-12;

/// `∫_0^∞ w(x) F(G(x)) dx` by adaptive quadrature of the series for `G`.
pub(crate) fn integrate_g<T: Real>(cfg: &SeriesConfig, weight: impl Fn(T, T) -> T) -> Result<T> {
    let pts = linspace(T::zero(), T::lit(G_SUPPORT_END), 24);
    let mut failure = None;
    let r = adaptive(
        |x: T| match raw_g_fn(x, cfg) {
            Ok((g, _)) => weight(x, g),
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        &pts,
        T::lit(1e-13),
        T::epsilon() * T::lit(100.0),
        2000,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(r.value),
    }
}

/// Moments from the tail integrals `E N = ∫G`, `E N² = 2∫xG`,
/// `E M = ∫(2G − G²)` and `E M² = 2∫x(2G − G²)`, with quadrature error estimates.
/// The four integrals share one cache of `G` values.
pub fn moments_by_quadrature<T: Real>(cfg: &SeriesConfig) -> Result<MomentSet<T>> {
    cfg.validate()?;
    let cache = std::cell::RefCell::new(std::collections::HashMap::<u64, T>::new());
    let mut failure = None;
    let mut g_at = |x: T| -> T {
        let key = x.to_f64_lossy().to_bits();
        if let Some(&g) = cache.borrow().get(&key) {
            return g;
        }
        let g = match raw_g_fn(x, cfg) {
            Ok((g, _)) => g,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        };
        cache.borrow_mut().insert(key, g);
        g
    };
    let pts = linspace(T::zero(), T::lit(G_SUPPORT_END), 24);
    let two = T::lit(2.0);
    let mut run =
        |w: &dyn Fn(T, T) -> T| adaptive(|x: T| w(x, g_at(x)), &pts, T::lit(1e-13), T::epsilon() * T::lit(100.0), 2000);
    let en = run(&|_, g| g)?;
    let en2 = run(&|x, g| two * x * g)?;
    let em = run(&|_, g| two * g - g * g)?;
    let em2 = run(&|x, g| two * x * (two * g - g * g))?;
    if let Some(e) = failure {
        return Err(e);
    }
    // pointwise error of G, propagated over [0, 4] with |∂w/∂G| ≤ 1, 2x, 2, 4x
    let dg = T::lit(G_POINT_ERROR);
    let errs = [
        en.abs_err + dg * T::lit(4.0),
        em.abs_err + dg * T::lit(8.0),
        en2.abs_err + dg * T::lit(16.0),
        em2.abs_err + dg * T::lit(32.0),
    ];
    let var_n = en2.value - en.value * en.value;
    let var_m = em2.value - em.value * em.value;
    Ok(MomentSet {
        en: en.value,
        em: em.value,
        en2: en2.value,
        em2: em2.value,
        var_n,
        var_m,
        err_est: MomentErrors {
            en: errs[0],
            em: errs[1],
            en2: errs[2],
            em2: errs[3],
            var_n: errs[2] + two * en.value.abs() * errs[0],
            var_m: errs[3] + two * em.value.abs() * errs[1],
        },
    })
}

/// `(∫_0^∞ G², 2^{−1/3}π² Σ Hi(a_k)²)`: quadrature of the series for `G` against
/// the Parseval-type zero sum.
pub fn gparseval_check<T: Real>(cfg: &SeriesConfig) -> Result<(T, T)> {
    cfg.validate()?;
    let quad = integrate_g(cfg, |_, g| g * g)?;
    let hi2 = series_sum::<T, _>(cfg, |r| r.hi * r.hi, Shape::Smooth(4.0 / 3.0))?;
    Ok((quad, T::PI() * T::PI() / cbrt2::<T>() * hi2.value))
}

/// `E M² = 2 E N² − 2∫ x G(x)² dx`, with the integral by quadrature.
pub fn em2_via_g_squared<T: Real>(cfg: &SeriesConfig) -> Result<T> {
    let m = moments::<T>(cfg)?;
    let i = integrate_g(cfg, |x, g| x * g * g)?;
    Ok(T::lit(2.0) * (m.en2 - i))
}

#[cfg(test)]
mod tests {
    use super::*;

    // E N² and E M² frozen from this series after agreement with 2∫xG, with
    // 2E N² − 2∫xG² (both by quadrature below), with a 30-digit quadrature of the
    // truncated series (0.7966334, 1.3258224) and with simulation (0.798, 1.324).
    const EN2: f64 = 0.796_633_451_717_393;
    const EM2: f64 = 1.325_822_569_598_967;

    #[test]
    fn reference_moments() {
        let m = moments::<f64>(&SeriesConfig::default()).unwrap();
        assert!((m.en - 0.6955289995).abs() < 1e-9, "{}", m.en);
        assert!((m.em - 0.99619301992836311660).abs() < 1e-12, "{}", m.em);
        assert!((m.en2 - EN2).abs() < 1e-12, "{}", m.en2);
        assert!((m.em2 - EM2).abs() < 1e-12, "{}", m.em2);
        assert_eq!(m.var_n, m.en2 - m.en * m.en);
        assert_eq!(m.var_m, m.em2 - m.em * m.em);
        assert!(m.err_est.en < 1e-9 && m.err_est.em2 < 1e-9, "{:?}", m.err_est);
    }

    #[test]
    fn second_moment_of_n_by_quadrature() {
        let cfg = SeriesConfig::default();
        let i = integrate_g::<f64>(&cfg, |x, g| x * g).unwrap();
        assert!((2.0 * i - EN2).abs() < 1e-10, "{}", 2.0 * i);
        let e = integrate_g::<f64>(&cfg, |_, g| g).unwrap();
        assert!((e - 0.6955289995).abs() < 1e-9);
    }

    #[test]
    fn alternative_forms_agree() {
        let cfg = SeriesConfig::default();
        let m = moments::<f64>(&cfg).unwrap();
        let d = moment_diagnostics::<f64>(&cfg).unwrap();
        assert!((d.en_gi - m.en).abs() < 1e-10, "{} vs {}", d.en_gi, m.en);
        assert!((d.en2_gi - m.en2).abs() < 1e-10);
        assert!((d.g2_phi - (2.0 * m.en - m.em)).abs() < 1e-10);
        assert!((d.g2_hi - d.g2_phi).abs() < 1e-9, "{} vs {}", d.g2_hi, d.g2_phi);
    }

    #[test]
    fn second_moment_of_max_by_squared_tail() {
        let cfg = SeriesConfig::default();
        let m = moments::<f64>(&cfg).unwrap();
        let alt = em2_via_g_squared::<f64>(&cfg).unwrap();
        assert!((alt - m.em2).abs() < 1e-9, "{alt} vs {}", m.em2);
    }

    #[test]
    fn tmean_forms() {
        let (en, em) = mean_via_tmean::<f64>(&SeriesConfig::default()).unwrap();
        assert!((en - 0.6955289995).abs() < 1e-6, "{en}");
        assert!((em - 0.9961930199).abs() < 1e-6, "{em}");
    }
}
