//! Compensated summation and the Hurwitz zeta function used for series tails.

use crate::scalar::Real;

/// Neumaier (improved Kahan) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Neumaier<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Real> FromIterator<T> for Neumaier<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Sums an iterator either with compensation or naively.
pub fn sum_with<T: Real, I: IntoIterator<Item = T>>(iter: I, compensated: bool) -> T {
    if compensated {
        iter.into_iter().collect::<Neumaier<T>>().value()
    } else {
        iter.into_iter().fold(T::zero(), |a, b| a + b)
    }
}

// B_{2j} / (2j)! for j = 1..=8
const BERNOULLI_OVER_FACT: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Hurwitz zeta `ζ(s, q) = Σ_{n≥0} (q+n)^{-s}` for `s > 1`, `q > 0`, via Euler–Maclaurin.
pub fn hurwitz_zeta<T: Real>(s: T, q: T) -> T {
    assert!(s > T::one() && q > T::zero(), "hurwitz_zeta needs s > 1, q > 0");
    let n_direct = 12usize;
    let mut acc = Neumaier::new();
    for n in 0..n_direct {
        acc.add((q + T::from_usize_lossy(n)).powf(-s));
    }
    let w = q + T::from_usize_lossy(n_direct);
    acc.add(w.powf(T::one() - s) / (s - T::one()));
    acc.add(w.powf(-s) / T::lit(2.0));
    // rising factorial s(s+1)...(s+2j-2) times w^{-s-2j+1}
    let mut poch = s;
    let mut wpow = w.powf(-s - T::one());
    let w2 = w * w;
    for (j, &b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let term = T::lit(b) * poch * wpow;
        acc.add(term);
        let jj = T::from_usize_lossy(2 * j + 1);
        poch = poch * (s + jj) * (s + jj + T::one());
        wpow = wpow / w2;
    }
    acc.value()
}
