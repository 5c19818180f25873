//! Zeros `a_k` of Ai with cached companion values.

use super::eval::{ai_aip, FRAC_1_SQRT_PI};
use super::scorer::{phi_of_k, scorer_hi};
use crate::error::{domain, Result};
use crate::scalar::Real;
use rayon::prelude::*;
use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// Largest supported zero index.
pub const MAX_ZERO_INDEX: usize = 1_000_000;

/// One zero of Ai and the quantities the series need there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRecord<T> {
    pub k: usize,
    pub a: T,
    /// `Ai′(a_k)`
    pub aip: T,
    /// `Bi(a_k)`
    pub bi: T,
    /// `Hi(a_k)`
    pub hi: T,
    /// `Gi(a_k) = Bi(a_k) − Hi(a_k)`
    pub gi: T,
    /// `φ(k) = πHi(a_k) + 1/a_k`
    pub phi: T,
}

#[inline]
fn phase<T: Real>(k: usize) -> T {
    T::lit(3.0) * T::PI() * T::from_usize_lossy(4 * k - 1) / T::lit(8.0)
}

/// Asymptotic estimate `−T(3π(4k−1)/8)` of `a_k`, accurate to `O(k^{−22/3})`.
pub fn zero_seed<T: Real>(k: usize) -> T {
    zero_seed_real(T::from_usize_lossy(k))
}

/// [`zero_seed`] for a real index; smooth in `k`, used to map indices to positions
/// when a tail sum is replaced by an integral.
pub fn zero_seed_real<T: Real>(k: T) -> T {
    let t = T::lit(3.0) * T::PI() * (T::lit(4.0) * k - T::one()) / T::lit(8.0);
    let u = (t * t).recip();
    let poly = T::one()
        + u * (T::lit(5.0 / 48.0)
            + u * (T::lit(-5.0 / 36.0)
                + u * (T::lit(77125.0 / 82944.0)
                    + u * (T::lit(-108056875.0 / 6967296.0) + u * T::lit(162375596875.0 / 334430208.0)))));
    -t.powf(T::lit(2.0 / 3.0)) * poly
}

/// Asymptotic estimate of `Ai′(a_k) = (−1)^{k−1}V(3π(4k−1)/8)`.
pub fn zero_slope_asymptotic<T: Real>(k: usize) -> T {
    let t = phase::<T>(k);
    let u = (t * t).recip();
    let poly = T::one() + u * (T::lit(5.0 / 48.0) + u * (T::lit(-1525.0 / 4608.0) + u * T::lit(2397875.0 / 663552.0)));
    let v = T::lit(FRAC_1_SQRT_PI) * t.powf(T::lit(1.0 / 6.0)) * poly;
    if k % 2 == 1 {
        v
    } else {
        -v
    }
}

fn check_index(k: usize) -> Result<()> {
    if k == 0 || k > MAX_ZERO_INDEX {
        return domain(format!("zero index must be in 1..={MAX_ZERO_INDEX}, got {k}"));
    }
    Ok(())
}

/// Locates `a_k` by safeguarded Newton iteration from [`zero_seed`].
pub fn zero_location<T: Real>(k: usize) -> Result<(T, T)> {
    check_index(k)?;
    let seed = zero_seed::<T>(k);
    // A quarter of the local zero spacing π/√|a| brackets exactly one zero.
    let half = T::lit(0.3) * T::PI() / (-seed).sqrt();
    let (mut lo, mut hi) = (seed - half, seed + half);
    let (mut flo, _) = ai_aip(lo);
    let (fhi, _) = ai_aip(hi);
    debug_assert!(flo * fhi <= T::zero(), "bracket failed for k={k}");
    let mut x = seed;
    let (mut f, mut fp) = ai_aip(x);
    for _ in 0..80 {
        if f == T::zero() {
            break;
        }
        if (f < T::zero()) == (flo < T::zero()) {
            lo = x;
            flo = f;
        } else {
            hi = x;
        }
        let mut next = x - f / fp;
        if !(next > lo && next < hi) {
            next = T::lit(0.5) * (lo + hi);
        }
        let done = (next - x).abs() <= T::lit(2.0) * T::epsilon() * x.abs();
        x = next;
        (f, fp) = ai_aip(x);
        if done {
            break;
        }
    }
    Ok((x, fp))
}

fn complete<T: Real>(k: usize, a: T, aip: T) -> Result<ZeroRecord<T>> {
    let bi = -(T::PI() * aip).recip();
    let hi = scorer_hi(a)?;
    let phi = phi_of_k(k, a)?;
    Ok(ZeroRecord { k, a, aip, bi, hi, gi: bi - hi, phi })
}

/// The `k`-th zero of Ai with all cached fields, `1 ≤ k ≤ 10⁶`.
pub fn airy_zero<T: Real>(k: usize) -> Result<ZeroRecord<T>> {
    let (a, aip) = zero_location::<T>(k)?;
    complete(k, a, aip)
}

/// Record built from closed-form asymptotics only (no root finding). For `k ≥ 200`
/// both `a_k` and `Ai′(a_k)` are at round-off level; used for series tails.
pub fn airy_zero_asymptotic<T: Real>(k: usize) -> ZeroRecord<T> {
    assert!(k >= 1, "zero index is 1-based");
    let a = zero_seed::<T>(k);
    let aip = zero_slope_asymptotic::<T>(k);
    let bi = -(T::PI() * aip).recip();
    let phi = super::scorer::phi_by_asymptotic(a);
    let hi = (phi - a.recip()) * T::FRAC_1_PI();
    ZeroRecord { k, a, aip, bi, hi, gi: bi - hi, phi }
}

/// Immutable table of the first `K` zero records.
#[derive(Debug, Clone)]
pub struct ZeroTable<T> {
    records: Vec<ZeroRecord<T>>,
}

impl<T: Real> ZeroTable<T> {
    /// Computes records `1..=k_max` (in parallel; each record is independent, so the
    /// table is identical for any worker count).
    pub fn new(k_max: usize) -> Result<Self> {
        check_index(k_max.max(1))?;
        let records = (1..=k_max).into_par_iter().map(airy_zero::<T>).collect::<Result<Vec<_>>>()?;
        Ok(Self { records })
    }

    fn extended(&self, k_max: usize) -> Result<Self> {
        check_index(k_max)?;
        let start = self.records.len() + 1;
        let mut records = self.records.clone();
        let more = (start..=k_max).into_par_iter().map(airy_zero::<T>).collect::<Result<Vec<_>>>()?;
        records.extend(more);
        Ok(Self { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Record `k` (1-based).
    pub fn get(&self, k: usize) -> &ZeroRecord<T> {
        &self.records[k - 1]
    }

    pub fn records(&self) -> &[ZeroRecord<T>] {
        &self.records
    }

    /// The first `k` records.
    pub fn head(&self, k: usize) -> &[ZeroRecord<T>] {
        &self.records[..k.min(self.records.len())]
    }
}

type AnyArc = Arc<dyn Any + Send + Sync>;

/// Process-wide tables keyed by their concrete type. Each entry only ever grows; a
/// reader receives an immutable snapshot.
fn grow_cached<V, F>(key_extra: u8, have: impl Fn(&V) -> bool, build: F) -> Result<Arc<V>>
where
    V: Any + Send + Sync,
    F: FnOnce(Option<&V>) -> Result<V>,
{
    static CACHE: OnceLock<RwLock<HashMap<(TypeId, u8), AnyArc>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = (TypeId::of::<V>(), key_extra);
    {
        let map = cell.read().expect("zero cache poisoned");
        if let Some(v) = map.get(&key) {
            let v = Arc::clone(v).downcast::<V>().expect("cache entry type");
            if have(&v) {
                return Ok(v);
            }
        }
    }
    let mut map = cell.write().expect("zero cache poisoned");
    let current = map.get(&key).map(|v| Arc::clone(v).downcast::<V>().expect("cache entry type"));
    if let Some(v) = &current {
        if have(v) {
            return Ok(Arc::clone(v));
        }
    }
    let fresh = Arc::new(build(current.as_deref())?);
    map.insert(key, fresh.clone() as AnyArc);
    Ok(fresh)
}

/// Shared table of Newton-refined records holding at least `k_max` entries.
pub fn shared_zero_table<T: Real>(k_max: usize) -> Result<Arc<ZeroTable<T>>> {
    grow_cached::<ZeroTable<T>, _>(
        0,
        |t| t.len() >= k_max,
        |cur| match cur {
            Some(t) => t.extended(k_max),
            None => ZeroTable::new(k_max),
        },
    )
}

/// Shared table of closed-form asymptotic records ([`airy_zero_asymptotic`]) holding
/// at least `k_max` entries. Entries for small `k` are only rough.
pub fn shared_asymptotic_table<T: Real>(k_max: usize) -> Arc<ZeroTable<T>> {
    grow_cached::<ZeroTable<T>, _>(
        1,
        |t| t.len() >= k_max,
        |cur| {
            let start = cur.map_or(0, |t| t.len());
            let mut records = cur.map_or_else(Vec::new, |t| t.records.clone());
            records.extend((start + 1..=k_max).map(airy_zero_asymptotic::<T>));
            Ok(ZeroTable { records })
        },
    )
    .expect("asymptotic table construction is infallible")
}
