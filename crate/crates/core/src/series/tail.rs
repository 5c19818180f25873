//! Summation helpers: exact heads, asymptotic tails and their remainders.

use super::{SeriesConfig, TailMode, MIN_ASYMPTOTIC_TERMS};
use crate::airy::{airy_zero_asymptotic, shared_asymptotic_table, shared_zero_table, ZeroRecord};
use crate::error::Result;
use crate::quad::{adaptive, linspace};
use crate::scalar::Real;
use crate::sum::{hurwitz_zeta, Neumaier};

/// Last index summed term by term from asymptotic records.
pub(crate) const FAR_INDEX: usize = 20_001;

/// Decay model of a summand used to extrapolate beyond [`FAR_INDEX`].
#[derive(Debug, Clone, Copy)]
pub(crate) enum Shape {
    /// `|f(k)| ~ C k^{−p}` with constant sign.
    Smooth(f64),
    /// Alternating; the pairs `f(2j) + f(2j+1)` behave like `C j^{−p}`.
    Paired(f64),
}

/// A partial sum with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Partial<T> {
    pub value: T,
    pub err: T,
}

struct Acc<T> {
    comp: Neumaier<T>,
    plain: T,
    abs: T,
    n: usize,
    compensated: bool,
}

impl<T: Real> Acc<T> {
    fn new(compensated: bool) -> Self {
        Self { comp: Neumaier::new(), plain: T::zero(), abs: T::zero(), n: 0, compensated }
    }
    fn add(&mut self, x: T) {
        if self.compensated {
            self.comp.add(x);
        } else {
            self.plain = self.plain + x;
        }
        self.abs = self.abs + x.abs();
        self.n += 1;
    }
    fn value(&self) -> T {
        if self.compensated {
            self.comp.value()
        } else {
            self.plain
        }
    }
    /// Rounding bound for the accumulated sum.
    fn rounding(&self) -> T {
        let growth = if self.compensated { T::lit(4.0) } else { T::from_usize_lossy(self.n.max(1)) };
        T::epsilon() * growth * self.abs
    }
}

/// Sums `f` over `recs` (consecutive indices), grouping pairs `(2j, 2j+1)` when asked.
fn sum_records<T: Real>(recs: &[ZeroRecord<T>], f: &impl Fn(&ZeroRecord<T>) -> T, pair: bool, acc: &mut Acc<T>) {
    let mut i = 0;
    if pair && !recs.is_empty() && recs[0].k % 2 == 1 {
        acc.add(f(&recs[0]));
        i = 1;
    }
    if pair {
        while i + 1 < recs.len() {
            acc.add(f(&recs[i]) + f(&recs[i + 1]));
            i += 2;
        }
    }
    while i < recs.len() {
        acc.add(f(&recs[i]));
        i += 1;
    }
}

/// Index at which the remainder is refitted to estimate its own error.
const HALF_INDEX: usize = 10_001;

/// `Σ_{k=k0}^{∞} f(k)` from asymptotic records up to [`FAR_INDEX`] plus a remainder.
pub(crate) fn asymptotic_tail<T: Real>(
    k0: usize,
    f: &impl Fn(&ZeroRecord<T>) -> T,
    shape: Shape,
    compensated: bool,
) -> Partial<T> {
    if k0 > FAR_INDEX {
        let rem = remainder(k0 - 1, f, shape);
        let refit = remainder(k0 / 2, f, shape)
            - (k0 / 2 + 1..k0).map(|k| f(&airy_zero_asymptotic(k))).fold(T::zero(), |a, b| a + b);
        return Partial { value: rem, err: (rem - refit).abs() };
    }
    let table = shared_asymptotic_table::<T>(FAR_INDEX);
    let pair = matches!(shape, Shape::Paired(_));
    let mut acc = Acc::new(compensated);
    sum_records(&table.records()[k0 - 1..FAR_INDEX], f, pair, &mut acc);
    let rem = remainder(FAR_INDEX, f, shape);
    acc.add(rem);
    // The same quantity Σ_{k>HALF_INDEX} extrapolated from HALF_INDEX instead.
    let mut upper = Acc::new(true);
    sum_records(&table.records()[HALF_INDEX..FAR_INDEX], f, pair, &mut upper);
    let fit_err = (remainder(HALF_INDEX, f, shape) - upper.value() - rem).abs();
    Partial { value: acc.value(), err: acc.rounding() + fit_err }
}

/// Power-law extrapolation of `Σ_{k>last} f(k)` from the terms at `last`.
///
/// Summands are smooth functions of `k − 1/4` (through `a_k`), so smooth terms are
/// fitted as `C (k − 1/4)^{−p}` and pair sums as `C (j + 1/8)^{−p}`.
fn remainder<T: Real>(last: usize, f: &impl Fn(&ZeroRecord<T>) -> T, shape: Shape) -> T {
    let rec = |k: usize| f(&airy_zero_asymptotic::<T>(k));
    match shape {
        Shape::Smooth(p) => {
            let p = T::lit(p);
            let kf = T::from_usize_lossy(last) - T::lit(0.25);
            rec(last) * kf.powf(p) * hurwitz_zeta(p, kf + T::one())
        }
        Shape::Paired(p) => {
            let p = T::lit(p);
            // last complete pair (2J, 2J+1) with 2J+1 ≤ last
            let j = (last - 1) / 2;
            let g = rec(2 * j) + rec(2 * j + 1);
            let jf = T::from_usize_lossy(j) + T::lit(0.125);
            let mut rem = g * jf.powf(p) * hurwitz_zeta(p, jf + T::one());
            if 2 * j + 1 < last {
                // `last` opens the next pair and is already summed
                rem = rem - rec(last);
            }
            rem
        }
    }
}

/// Series `Σ_{k≥1} f(k)` under `cfg`, with an error estimate.
///
/// With [`TailMode::None`] the value is the truncated sum and the error estimate
/// includes the neglected tail, itself computed as in asymptotic mode.
pub(crate) fn series_sum<T: Real, F: Fn(&ZeroRecord<T>) -> T>(
    cfg: &SeriesConfig,
    f: F,
    shape: Shape,
) -> Result<Partial<T>> {
    let k = cfg.terms;
    let pair = cfg.pairing && matches!(shape, Shape::Paired(_));
    let table = shared_zero_table::<T>(k.max(MIN_ASYMPTOTIC_TERMS) - 1)?;
    let mut acc = Acc::new(cfg.compensated_summation);
    sum_records(table.head(k - 1), &f, pair, &mut acc);
    match cfg.tail_mode {
        TailMode::Asymptotic => {
            let tail = asymptotic_tail(k, &f, shape, cfg.compensated_summation);
            acc.add(tail.value);
            Ok(Partial { value: acc.value(), err: acc.rounding() + tail.err })
        }
        TailMode::None => {
            let mut est = Acc::new(true);
            if k < MIN_ASYMPTOTIC_TERMS {
                sum_records(&table.records()[k - 1..MIN_ASYMPTOTIC_TERMS - 1], &f, pair, &mut est);
            }
            let tail = asymptotic_tail(k.max(MIN_ASYMPTOTIC_TERMS), &f, shape, true);
            est.add(tail.value);
            Ok(Partial { value: acc.value(), err: acc.rounding() + est.value().abs() + tail.err })
        }
    }
}

/// `∫_U^∞ u^{−n} cos(ωu + φ) du` for `n ≥ 2`, `U > 0`, `ω ≥ 0`.
pub(crate) fn osc_power_tail<T: Real>(n: u32, omega: T, u0: T, phase: T) -> T {
    let nf = T::from_u32(n).expect("small integer");
    if omega <= T::zero() {
        return phase.cos() * u0.powf(T::one() - nf) / (nf - T::one());
    }
    // Integrate numerically until ωu reaches 60, then by repeated integration by parts.
    let u_max = T::lit(1e4);
    let u_switch = (T::lit(60.0) / omega).max(u0).min(u_max);
    let mut total = T::zero();
    if u_switch > u0 {
        let periods = (omega * (u_switch - u0) / T::lit(std::f64::consts::PI)).ceil().to_usize().unwrap_or(1);
        let pts = linspace(u0, u_switch, periods.clamp(1, 4000));
        let r = adaptive(
            |u: T| u.powi(-(n as i32)) * (omega * u + phase).cos(),
            &pts,
            T::min_positive_value(),
            T::epsilon() * T::lit(100.0),
            20_000,
        )
        .expect("smooth oscillatory integrand");
        total = r.value;
    }
    if u_switch < u_max {
        // ∫_V^∞ u^{−n} e^{i(ωu+φ)} du = −(e^{i(ωV+φ)}/(iω)) V^{−n} Σ_j (n)_j (iωV)^{−j}
        let v = u_switch;
        let x = omega * v;
        let (mut re, mut im) = (T::one(), T::zero());
        let (mut tre, mut tim) = (T::one(), T::zero());
        let mut last = T::one();
        for j in 0..200u32 {
            // multiply term by (n + j)/(i x) = −i (n + j)/x
            let fac = T::from_u32(n + j).expect("small integer") / x;
            let (nre, nim) = (tim * fac, -tre * fac);
            let mag = nre.hypot(nim);
            if mag >= last || mag < T::epsilon() * T::lit(1e-3) {
                break;
            }
            tre = nre;
            tim = nim;
            re = re + tre;
            im = im + tim;
            last = mag;
        }
        // −(e^{iψ}/(iω)) (re + i im) with ψ = ωV + φ; 1/i = −i
        let psi = x + phase;
        let (s, c) = psi.sin_cos();
        // e^{iψ}(re + i im) = (c re − s im) + i(s re + c im); times i/ω
        let pre = v.powi(-(n as i32)) / omega;
        let real = -(s * re + c * im) * pre;
        total = total + real;
    }
    total
}
