//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sum::Neumaier;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

// Kronrod abscissae, descending; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Tolerances and budget for an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
    /// Truncation point for semi-infinite ranges; `None` lets each caller pick one
    /// from its analytic tail bound.
    pub upper_cutoff: Option<T>,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-12).max(T::epsilon() * T::lit(16.0)),
            rel_tol: T::lit(1e-12).max(T::epsilon() * T::lit(16.0)),
            max_subdivisions: 4000,
            upper_cutoff: None,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_subdivisions: usize) -> Result<Self> {
        let spec = Self { abs_tol, rel_tol, max_subdivisions, upper_cutoff: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_cutoff(mut self, t: T) -> Self {
        self.upper_cutoff = Some(t);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= T::lit(1e-14)) {
            return Err(Error::Config(format!("abs_tol must be >= 1e-14, got {}", self.abs_tol)));
        }
        if !(self.rel_tol >= T::zero()) {
            return Err(Error::Config("rel_tol must be non-negative".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be positive".into()));
        }
        if let Some(c) = self.upper_cutoff {
            if !(c.is_finite() && c > T::zero()) {
                return Err(Error::Config("upper_cutoff must be finite and positive".into()));
            }
        }
        Ok(())
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_err: T,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    err: T,
    resabs: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

fn gk21<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Panel<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let hl = half * (b - a);
    let fc = f(center);
    let mut resg = T::zero();
    let mut resk = T::lit(WGK[10]) * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = hl * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + T::lit(WGK[j]) * (f1 + f2);
        resabs = resabs + T::lit(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg = resg + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let reskh = resk * half;
    let mut resasc = T::lit(WGK[10]) * (fc - reskh).abs();
    for j in 0..10 {
        resasc = resasc + T::lit(WGK[j]) * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let habs = hl.abs();
    let value = resk * hl;
    resabs = resabs * habs;
    resasc = resasc * habs;
    let mut err = ((resk - resg) * hl).abs();
    if resasc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / resasc).powf(T::lit(1.5));
        err = resasc * scale.min(T::one());
    }
    let floor = T::lit(50.0) * T::epsilon() * resabs;
    if resabs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        err = err.max(floor);
    }
    Panel { a, b, value, err, resabs }
}

/// Integrates `f` over the consecutive intervals defined by `points` (at least two,
/// monotone) to the requested tolerances. Tolerances are not validated here so that
/// internal callers can ask for purely relative accuracy.
pub(crate) fn adaptive<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    points: &[T],
    abs_tol: T,
    rel_tol: T,
    limit: usize,
) -> Result<QuadResult<T>> {
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::with_capacity(points.len() + 2 * limit);
    let mut total = T::zero();
    let mut err_total = T::zero();
    let mut evaluations = 0usize;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let p = gk21(&mut f, w[0], w[1]);
        evaluations += 21;
        total = total + p.value;
        err_total = err_total + p.err;
        heap.push(p);
    }
    let mut subdivisions = 0usize;
    loop {
        let tol = abs_tol.max(rel_tol * total.abs());
        if err_total <= tol {
            // Recompute exactly before accepting; the running sums drift.
            let (v, e, _) = totals(&heap);
            total = v;
            err_total = e;
            if err_total <= abs_tol.max(rel_tol * total.abs()) {
                break;
            }
        }
        let worst = match heap.peek() {
            Some(p) => *p,
            None => break,
        };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        let too_narrow =
            (worst.b - worst.a).abs() <= T::lit(100.0) * T::epsilon() * mid.abs().max(T::min_positive_value());
        if subdivisions >= limit || too_narrow {
            let (v, e, resabs) = totals(&heap);
            // Accept when the remaining error is at the rounding floor of the rule.
            if e <= T::lit(100.0) * T::epsilon() * resabs || e <= abs_tol.max(rel_tol * v.abs()) {
                total = v;
                err_total = e;
                break;
            }
            let (lo, hi) = (points[0], points[points.len() - 1]);
            return Err(Error::Quadrature {
                a: lo.to_f64_lossy(),
                b: hi.to_f64_lossy(),
                value: v.to_f64_lossy(),
                abs_err: e.to_f64_lossy(),
                subdivisions,
            });
        }
        heap.pop();
        let l = gk21(&mut f, worst.a, mid);
        let r = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        subdivisions += 1;
        total = total - worst.value + l.value + r.value;
        err_total = err_total - worst.err + l.err + r.err;
        heap.push(l);
        heap.push(r);
    }
    Ok(QuadResult { value: total, abs_err: err_total, subdivisions, evaluations })
}

fn totals<T: Real>(heap: &BinaryHeap<Panel<T>>) -> (T, T, T) {
    let mut v = Neumaier::new();
    let mut e = Neumaier::new();
    let mut r = Neumaier::new();
    for p in heap.iter() {
        v.add(p.value);
        e.add(p.err);
        r.add(p.resabs);
    }
    (v.value(), e.value(), r.value())
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<QuadResult<T>> {
    spec.validate()?;
    adaptive(f, &[a, b], spec.abs_tol, spec.rel_tol, spec.max_subdivisions)
}

/// Integrates `f` over `[points[0], points[n-1]]`, splitting at every interior point.
pub fn integrate_points<T: Real, F: FnMut(T) -> T>(
    f: F,
    points: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<QuadResult<T>> {
    spec.validate()?;
    if points.len() < 2 {
        return Err(Error::Config("need at least two breakpoints".into()));
    }
    adaptive(f, points, spec.abs_tol, spec.rel_tol, spec.max_subdivisions)
}

/// Integrates `f` over `[a, ∞)` by truncating at `cutoff`; `tail_bound` is a caller-supplied
/// bound on `|∫_cutoff^∞ f|` and is added to the reported error.
pub fn integrate_semi_infinite<T: Real, F: FnMut(T) -> T>(
    f: F,
    a: T,
    cutoff: T,
    tail_bound: T,
    spec: &QuadratureSpec<T>,
) -> Result<QuadResult<T>> {
    spec.validate()?;
    if !(cutoff > a) {
        return Err(Error::Config("cutoff must exceed the lower limit".into()));
    }
    let mut r = adaptive(f, &[a, cutoff], spec.abs_tol, spec.rel_tol, spec.max_subdivisions)?;
    r.abs_err = r.abs_err + tail_bound.abs();
    Ok(r)
}

/// Evenly spaced breakpoints `lo, lo + h, …, hi` with `n` panels.
pub(crate) fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let n = n.max(1);
    let h = (hi - lo) / T::from_usize_lossy(n);
    let mut v: Vec<T> = (0..n).map(|i| lo + h * T::from_usize_lossy(i)).collect();
    v.push(hi);
    v
}
