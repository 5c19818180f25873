//! Monte Carlo oracle for `N = max_{t≥0}(W(t) − γt²)` and its two-sided analogue `M`.
//!
//! Each path yields the grid maxima on two nested grids, `4h` and `h`, so that the
//! `√h` extrapolation `2·max_h − max_{4h}` is formed per path. The fine-grid maximum
//! is computed exactly in distribution but lazily: the path is drawn on a grid of
//! step `256h` and intervals are bisected with Brownian-bridge midpoints only where
//! the process could still exceed the running maximum `b`. Between grid points the
//! process exceeds the Brownian bridge through its endpoint values by at most
//! `γL²/4`, so with `b′ = b − γL²/4` an interval is skipped when
//! `exp(−2(b′ − x₀)(b′ − x₁)/L) < SKIP_PROBABILITY`. On the surviving intervals of
//! length `h` the bridge maximum is sampled exactly, which gives the continuous
//! maximum up to `γh²/8`.
//!
//! Every random draw is keyed by `(seed, stream, path, grid index)`, so samples do
//! not depend on the order of refinement or on the thread count.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Ratio of the two grids used for extrapolation.
pub const COARSE_FACTOR: u64 = 4;
/// Base grid step in units of the fine step.
const BASE_FACTOR: u64 = 256;
/// Key tag separating bridge-maximum uniforms from midpoint normals.
const BRIDGE_TAG: u64 = 1 << 62;
/// Probability bound below which an interval is not refined.
const SKIP_PROBABILITY: f64 = 1e-10;
/// Samples per reduction chunk; chunk boundaries never depend on the thread count.
pub const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Simulation horizon `T` (rounded up to a multiple of the base grid step).
    /// At `T = 4`, `W(t) − t²/2` is positive somewhere beyond `T` with probability between 3.2e-5
    /// and 4.3e-5; the effect on the moments is far smaller.
    pub horizon: f64,
    /// Fine grid step `h`.
    pub step: f64,
    /// Number of samples.
    pub paths: u64,
    pub seed: u64,
    /// Pair each path with its reflection `−W`.
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { horizon: 4.0, step: 1e-4, paths: 100_000, seed: 0x5EED, antithetic: false }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon >= 3.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be >= 3, got {}", self.horizon)));
        }
        if !(self.step > 0.0 && self.step <= 1e-3) {
            return Err(Error::Config(format!("step must be in (0, 1e-3], got {}", self.step)));
        }
        if self.paths < 10_000 {
            return Err(Error::Config(format!("paths must be >= 1e4, got {}", self.paths)));
        }
        if self.antithetic && self.paths % 2 == 1 {
            return Err(Error::Config("antithetic sampling needs an even number of paths".into()));
        }
        Ok(())
    }
}

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Number of independent contributions (pairs when antithetic).
    pub n_effective: u64,
}

/// Maxima of one path on the grids `4h` and `h`, and over the whole interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMax {
    pub coarse: f64,
    pub fine: f64,
    /// Bridge-sampled supremum, within `γh²/8` of the exact one.
    pub continuous: f64,
}

impl GridMax {
    /// `√h` extrapolation to the continuous maximum.
    pub fn extrapolated(&self) -> f64 {
        2.0 * self.fine - self.coarse
    }

    fn max(self, o: GridMax) -> GridMax {
        GridMax {
            coarse: self.coarse.max(o.coarse),
            fine: self.fine.max(o.fine),
            continuous: self.continuous.max(o.continuous),
        }
    }
}

/// Independent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Base = 1,
    Scaled = 2,
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn key(seed: u64, stream: u64, path: u64, node: u64) -> u64 {
    let mut h = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    h = mix64(h ^ stream.wrapping_mul(0xd6e8_feb8_6659_fd93));
    h = mix64(h ^ path.wrapping_mul(0xa076_1d64_78bd_642f));
    mix64(h ^ node.wrapping_mul(0xe703_7ed1_a0b4_28db))
}

#[inline]
fn keyed_normal(k: u64) -> f64 {
    SplitMix64::seed_from_u64(k).sample(StandardNormal)
}

/// Grid geometry for drift `γt²`: steps and horizon scaled by `(2γ)^{−2/3}` so that
/// the grid maxima obey the same scaling law as the continuous ones.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    h: f64,
    gamma: f64,
    base_intervals: u64,
}

impl Geometry {
    fn new(cfg: &McConfig, gamma: f64) -> Self {
        let s = (2.0 * gamma).powf(-2.0 / 3.0);
        let base = BASE_FACTOR as f64 * cfg.step;
        Self { h: cfg.step * s, gamma, base_intervals: (cfg.horizon / base).ceil() as u64 }
    }
}

struct Work {
    stack: Vec<(u64, u64, f64, f64)>,
    w: Vec<f64>,
    cand: Vec<(f64, u32)>,
}

impl Work {
    fn new() -> Self {
        Self { stack: Vec::with_capacity(256), w: Vec::new(), cand: Vec::new() }
    }
}

fn simulate(g: &Geometry, seed: u64, stream: Stream, path: u64, sign: f64, work: &mut Work) -> GridMax {
    let h = g.h;
    let x_of = |i: u64, w: f64| {
        let t = i as f64 * h;
        w - g.gamma * t * t
    };
    let nb = g.base_intervals as usize;
    let base_sd = (BASE_FACTOR as f64 * h).sqrt();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(key(seed, stream as u64, path, u64::MAX));
    work.w.clear();
    work.w.push(0.0);
    let mut best = 0.0f64;
    for i in 1..=nb {
        let z: f64 = rng.sample(StandardNormal);
        let w = work.w[i - 1] + sign * base_sd * z;
        work.w.push(w);
        best = best.max(x_of(i as u64 * BASE_FACTOR, w));
    }
    let log_skip = -SKIP_PROBABILITY.ln() / 2.0;
    // P(sup over an interval of length l exceeds b) < SKIP_PROBABILITY
    let negligible = |b: f64, x0: f64, x1: f64, l: f64| {
        let b = b - 0.25 * g.gamma * l * l;
        b >= x0.max(x1) && (b - x0) * (b - x1) >= l * log_skip
    };
    let (mut best_c, mut best_f, mut best_cont) = (best, best, best);
    let base_len = BASE_FACTOR as f64 * h;
    // the thresholds only grow, so intervals rejected now stay rejected
    work.cand.clear();
    for i in 0..nb {
        let x0 = x_of(i as u64 * BASE_FACTOR, work.w[i]);
        let x1 = x_of((i + 1) as u64 * BASE_FACTOR, work.w[i + 1]);
        if !negligible(best, x0, x1, base_len) {
            work.cand.push((x0.max(x1), i as u32));
        }
    }
    // most promising intervals last, so they are refined first
    work.cand.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    work.stack.clear();
    for &(_, i) in &work.cand {
        let i = i as usize;
        work.stack.push((i as u64 * BASE_FACTOR, (i + 1) as u64 * BASE_FACTOR, work.w[i], work.w[i + 1]));
    }
    while let Some((i0, i1, w0, w1)) = work.stack.pop() {
        let len = i1 - i0;
        let l = len as f64 * h;
        let (x0, x1) = (x_of(i0, w0), x_of(i1, w1));
        if len == 1 {
            if !negligible(best_cont, x0, x1, l) {
                // maximum of the bridge through (x0, x1); the drift adds at most γl²/4
                let u: f64 = SplitMix64::seed_from_u64(key(seed, stream as u64, path, BRIDGE_TAG | i0)).random();
                let d = x1 - x0;
                let m = 0.5 * (x0 + x1 + (d * d - 2.0 * l * (1.0 - u).ln()).sqrt());
                best_cont = best_cont.max(m + 0.125 * g.gamma * l * l);
            }
            continue;
        }
        let b = if len > COARSE_FACTOR { best_c } else { best_f };
        if negligible(b, x0, x1, l) {
            continue;
        }
        let im = i0 + len / 2;
        let wm = 0.5 * (w0 + w1) + sign * (0.25 * l).sqrt() * keyed_normal(key(seed, stream as u64, path, im));
        let xm = x_of(im, wm);
        best_f = best_f.max(xm);
        best_cont = best_cont.max(xm);
        if im % COARSE_FACTOR == 0 {
            best_c = best_c.max(xm);
        }
        if x0 > x1 {
            work.stack.push((im, i1, wm, w1));
            work.stack.push((i0, im, w0, wm));
        } else {
            work.stack.push((i0, im, w0, wm));
            work.stack.push((im, i1, wm, w1));
        }
    }
    GridMax { coarse: best_c, fine: best_f, continuous: best_cont }
}

fn sign_of(cfg: &McConfig, i: u64) -> (u64, f64) {
    if cfg.antithetic {
        (i / 2, if i.is_multiple_of(2) { 1.0 } else { -1.0 })
    } else {
        (i, 1.0)
    }
}

/// Sample `i` is a pair of independent one-sided paths: the first gives `N`, the
/// larger of the two gives `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub n: GridMax,
    pub m: GridMax,
}

fn pair_block(cfg: &McConfig, gamma: f64, stream: Stream, range: std::ops::Range<u64>) -> Vec<PairSample> {
    let g = Geometry::new(cfg, gamma);
    range
        .into_par_iter()
        .map_init(Work::new, |work, i| {
            let (p, s) = sign_of(cfg, i);
            let a = simulate(&g, cfg.seed, stream, 2 * p, s, work);
            let b = simulate(&g, cfg.seed, stream, 2 * p + 1, s, work);
            PairSample { n: a, m: a.max(b) }
        })
        .collect()
}

/// Coupled grid maxima of `N` and `M` for all configured samples.
pub fn sample_grid(cfg: &McConfig) -> Result<Vec<PairSample>> {
    cfg.validate()?;
    Ok(pair_block(cfg, 0.5, Stream::Base, 0..cfg.paths))
}

/// Fine-grid maxima of `W(t) − t²/2` over `t ∈ [0, T]`.
pub fn sample_n(cfg: &McConfig) -> Result<Vec<f64>> {
    Ok(sample_grid(cfg)?.into_iter().map(|p| p.n.fine).collect())
}

/// Fine-grid maxima of the two-sided functional.
pub fn sample_m(cfg: &McConfig) -> Result<Vec<f64>> {
    Ok(sample_grid(cfg)?.into_iter().map(|p| p.m.fine).collect())
}

/// Fine-grid two-sided maxima for drift `γt²` on grids scaled by `(2γ)^{−2/3}`,
/// from a stream independent of [`sample_m`].
pub fn sample_m_gamma(cfg: &McConfig, gamma: f64) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    Ok(pair_block(cfg, gamma, Stream::Scaled, 0..cfg.paths).into_iter().map(|p| p.m.fine).collect())
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Welford) -> Welford {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Welford {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * self.n as f64 * o.n as f64 / n as f64,
        }
    }

    fn estimate(&self) -> McEstimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        McEstimate { mean: self.mean, stderr: (var / self.n as f64).sqrt(), n_effective: self.n }
    }
}

/// Mean and standard error, reduced over fixed chunks of [`CHUNK`] samples.
pub fn estimate(samples: &[f64]) -> McEstimate {
    samples
        .par_chunks(CHUNK)
        .map(|c| {
            let mut w = Welford::default();
            c.iter().for_each(|&x| w.push(x));
            w
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Welford::default(), Welford::merge)
        .estimate()
}

/// [`estimate`] over antithetic pairs `(x_{2i}, x_{2i+1})`.
pub fn estimate_pairs(samples: &[f64]) -> McEstimate {
    let pairs: Vec<f64> = samples.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    estimate(&pairs)
}

/// Extrapolated means, second moments and variances of `N` and `M`, plus the raw
/// grid means at both resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub en: McEstimate,
    pub em: McEstimate,
    pub en2: McEstimate,
    pub em2: McEstimate,
    pub var_n: McEstimate,
    pub var_m: McEstimate,
    pub en_fine: McEstimate,
    pub en_coarse: McEstimate,
    pub em_fine: McEstimate,
    pub em_coarse: McEstimate,
    /// Means and variances of the bridge-sampled suprema.
    pub en_continuous: McEstimate,
    pub em_continuous: McEstimate,
    pub var_n_continuous: McEstimate,
    pub var_m_continuous: McEstimate,
    pub config: McConfig,
}

/// Per-chunk sums used for batch-means standard errors.
#[derive(Debug, Clone, Copy, Default)]
struct Batch {
    n: f64,
    y: f64,
    y2: f64,
    fine: f64,
    coarse: f64,
    cont: f64,
    cont2: f64,
}

impl Batch {
    fn of(samples: &[GridMax], antithetic: bool) -> Self {
        let mut b = Batch::default();
        let step = if antithetic { 2 } else { 1 };
        for c in samples.chunks(step) {
            let k = c.len() as f64;
            let avg = |f: fn(&GridMax) -> f64| c.iter().map(f).sum::<f64>() / k;
            b.n += 1.0;
            b.y += avg(|g| g.extrapolated());
            b.y2 += avg(|g| 2.0 * g.fine * g.fine - g.coarse * g.coarse);
            b.fine += avg(|g| g.fine);
            b.coarse += avg(|g| g.coarse);
            b.cont += avg(|g| g.continuous);
            b.cont2 += avg(|g| g.continuous * g.continuous);
        }
        b
    }

    fn add(self, o: &Batch) -> Batch {
        Batch {
            n: self.n + o.n,
            y: self.y + o.y,
            y2: self.y2 + o.y2,
            fine: self.fine + o.fine,
            coarse: self.coarse + o.coarse,
            cont: self.cont + o.cont,
            cont2: self.cont2 + o.cont2,
        }
    }

    fn normalized(&self) -> Batch {
        let n = self.n;
        Batch {
            n,
            y: self.y / n,
            y2: self.y2 / n,
            fine: self.fine / n,
            coarse: self.coarse / n,
            cont: self.cont / n,
            cont2: self.cont2 / n,
        }
    }
}

/// Batch-means estimate of `f` applied to per-sample averages.
fn batch_estimate(batches: &[Batch], f: impl Fn(&Batch) -> f64) -> McEstimate {
    let total = batches.iter().fold(Batch::default(), Batch::add);
    let mean = f(&total.normalized());
    let k = batches.len() as f64;
    let ssq: f64 = batches.iter().map(|b| (f(&b.normalized()) - mean).powi(2) * b.n).sum();
    let stderr = if k > 1.0 { (ssq / (k - 1.0) / total.n).sqrt() } else { f64::NAN };
    McEstimate { mean, stderr, n_effective: total.n as u64 }
}

/// Runs the simulation in chunks of [`CHUNK`] samples; `sink` sees every chunk in order.
pub fn summarize_with(cfg: &McConfig, sink: &mut dyn FnMut(&[PairSample])) -> Result<McSummary> {
    cfg.validate()?;
    let (mut nb, mut mb) = (Vec::new(), Vec::new());
    let mut start = 0;
    while start < cfg.paths {
        let end = (start + CHUNK as u64).min(cfg.paths);
        let s = pair_block(cfg, 0.5, Stream::Base, start..end);
        sink(&s);
        let n: Vec<GridMax> = s.iter().map(|p| p.n).collect();
        let m: Vec<GridMax> = s.iter().map(|p| p.m).collect();
        nb.push(Batch::of(&n, cfg.antithetic));
        mb.push(Batch::of(&m, cfg.antithetic));
        start = end;
    }
    let var = |b: &Batch| b.y2 - b.y * b.y;
    Ok(McSummary {
        en: batch_estimate(&nb, |b| b.y),
        em: batch_estimate(&mb, |b| b.y),
        en2: batch_estimate(&nb, |b| b.y2),
        em2: batch_estimate(&mb, |b| b.y2),
        var_n: batch_estimate(&nb, var),
        var_m: batch_estimate(&mb, var),
        en_fine: batch_estimate(&nb, |b| b.fine),
        en_coarse: batch_estimate(&nb, |b| b.coarse),
        em_fine: batch_estimate(&mb, |b| b.fine),
        em_coarse: batch_estimate(&mb, |b| b.coarse),
        en_continuous: batch_estimate(&nb, |b| b.cont),
        em_continuous: batch_estimate(&mb, |b| b.cont),
        var_n_continuous: batch_estimate(&nb, |b| b.cont2 - b.cont * b.cont),
        var_m_continuous: batch_estimate(&mb, |b| b.cont2 - b.cont * b.cont),
        config: *cfg,
    })
}

pub fn summarize(cfg: &McConfig) -> Result<McSummary> {
    summarize_with(cfg, &mut |_| {})
}

/// Empirical distribution of `N` on the uniform grid `x_j = j·dx`, `j = 0..=bins`,
/// from coupled samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    pub dx: f64,
    /// Counts of fine-grid maxima in `(x_{j−1}, x_j]`; the last slot collects the overflow.
    fine: Vec<u64>,
    coarse: Vec<u64>,
    continuous: Vec<u64>,
    pub n: u64,
}

impl EmpiricalCdf {
    pub fn new(x_max: f64, bins: usize) -> Self {
        let v = vec![0; bins + 2];
        Self { dx: x_max / bins as f64, fine: v.clone(), coarse: v.clone(), continuous: v, n: 0 }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.fine.len() - 1).map(|j| j as f64 * self.dx).collect()
    }

    fn slot(&self, x: f64) -> usize {
        let last = self.fine.len() - 1;
        let mut j = ((x / self.dx).ceil().max(0.0) as usize).min(last);
        // the division may land one cell off near a grid point
        while j > 0 && x <= (j - 1) as f64 * self.dx {
            j -= 1;
        }
        while j < last && x > j as f64 * self.dx {
            j += 1;
        }
        j
    }

    pub fn add(&mut self, samples: &[GridMax]) {
        for g in samples {
            self.n += 1;
            let (a, b, c) = (self.slot(g.fine), self.slot(g.coarse), self.slot(g.continuous));
            self.fine[a] += 1;
            self.coarse[b] += 1;
            self.continuous[c] += 1;
        }
    }

    fn cumulative(counts: &[u64], n: u64) -> Vec<f64> {
        let mut acc = 0;
        counts[..counts.len() - 1]
            .iter()
            .map(|&c| {
                acc += c;
                acc as f64 / n as f64
            })
            .collect()
    }

    /// `√h`-extrapolated CDF `2F_h − F_{4h}` on [`Self::xs`].
    pub fn extrapolated(&self) -> Vec<f64> {
        let f = Self::cumulative(&self.fine, self.n);
        let c = Self::cumulative(&self.coarse, self.n);
        f.iter().zip(&c).map(|(a, b)| 2.0 * a - b).collect()
    }

    /// Fine-grid CDF on [`Self::xs`].
    pub fn raw(&self) -> Vec<f64> {
        Self::cumulative(&self.fine, self.n)
    }

    /// CDF of the bridge-sampled suprema on [`Self::xs`].
    pub fn continuous(&self) -> Vec<f64> {
        Self::cumulative(&self.continuous, self.n)
    }
}

/// Outcome of a band check of an empirical CDF against a reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub max_deviation: f64,
    pub band: f64,
    pub pass: bool,
}

/// Dvoretzky–Kiefer–Wolfowitz half-width at confidence `1 − alpha`.
pub fn dkw_band(n: u64, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Largest deviation of `emp` from `reference` on the grid against the DKW band.
pub fn dkw_check(xs: &[f64], emp: &[f64], reference: impl Fn(f64) -> f64, n: u64, alpha: f64) -> BandCheck {
    let max_deviation = xs.iter().zip(emp).map(|(&x, &e)| (e - reference(x)).abs()).fold(0.0, f64::max);
    let band = dkw_band(n, alpha);
    BandCheck { max_deviation, band, pass: max_deviation <= band }
}

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    KsResult { statistic: d, p_value: kolmogorov_q(lambda) }
}

/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let t = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += if k % 2 == 1 { t } else { -t };
        if t < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// KS test of `max_t(W(t) − γt²)` against `(2γ)^{−1/3}` times independent samples of `M`.
pub fn scaling_check(cfg: &McConfig, gamma: f64) -> Result<KsResult> {
    let scaled = sample_m_gamma(cfg, gamma)?;
    let factor = (2.0 * gamma).powf(-1.0 / 3.0);
    let base: Vec<f64> = sample_m(cfg)?.into_iter().map(|x| factor * x).collect();
    Ok(ks_two_sample(&scaled, &base))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(paths: u64, step: f64) -> McConfig {
        McConfig { paths, step, ..McConfig::default() }
    }

    /// Plain fine-grid maximum built from the same keyed normals, refining everything.
    fn brute_force(g: &Geometry, seed: u64, path: u64) -> GridMax {
        let n = g.base_intervals * BASE_FACTOR;
        let mut w = vec![f64::NAN; n as usize + 1];
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(key(seed, Stream::Base as u64, path, u64::MAX));
        w[0] = 0.0;
        let sd = (BASE_FACTOR as f64 * g.h).sqrt();
        for i in 1..=g.base_intervals {
            let z: f64 = rng.sample(StandardNormal);
            w[(i * BASE_FACTOR) as usize] = w[((i - 1) * BASE_FACTOR) as usize] + sd * z;
        }
        let mut len = BASE_FACTOR;
        while len > 1 {
            let mut i0 = 0;
            while i0 < n {
                let im = i0 + len / 2;
                let l = len as f64 * g.h;
                w[im as usize] = 0.5 * (w[i0 as usize] + w[(i0 + len) as usize])
                    + (0.25 * l).sqrt() * keyed_normal(key(seed, Stream::Base as u64, path, im));
                i0 += len;
            }
            len /= 2;
        }
        let x = |i: usize| w[i] - g.gamma * (i as f64 * g.h).powi(2);
        let fine = (0..=n as usize).map(x).fold(f64::MIN, f64::max);
        let bridge = |i: usize| {
            let u: f64 =
                SplitMix64::seed_from_u64(key(seed, Stream::Base as u64, path, BRIDGE_TAG | i as u64)).random();
            let (x0, x1) = (x(i), x(i + 1));
            let d = x1 - x0;
            0.5 * (x0 + x1 + (d * d - 2.0 * g.h * (1.0 - u).ln()).sqrt()) + 0.125 * g.gamma * g.h * g.h
        };
        GridMax {
            coarse: (0..=n as usize).step_by(COARSE_FACTOR as usize).map(x).fold(f64::MIN, f64::max),
            fine,
            continuous: (0..n as usize).map(bridge).fold(fine, f64::max),
        }
    }

    #[test]
    fn lazy_refinement_equals_full_grid() {
        let c = cfg(10_000, 1e-3);
        let g = Geometry::new(&c, 0.5);
        let mut work = Work::new();
        for p in 0..300 {
            let lazy = simulate(&g, c.seed, Stream::Base, p, 1.0, &mut work);
            let full = brute_force(&g, c.seed, p);
            assert_eq!(lazy, full, "path {p}");
        }
    }

    #[test]
    fn samples_nonnegative_and_nested() {
        let s = sample_grid(&cfg(10_000, 1e-3)).unwrap();
        assert!(s.iter().all(|p| p.n.coarse >= 0.0 && p.n.fine >= p.n.coarse && p.n.continuous >= p.n.fine));
        assert!(s.iter().all(|p| p.m.fine >= p.n.fine && p.m.coarse >= p.n.coarse));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let c = cfg(20_000, 1e-3);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| sample_n(&c).unwrap());
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| sample_n(&c).unwrap());
        assert_eq!(one, three);
        assert_eq!(estimate(&one), estimate(&three));
    }

    #[test]
    fn estimate_basics() {
        let e = estimate(&vec![2.5; 50_000]);
        assert_eq!(e.mean, 2.5);
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.n_effective, 50_000);
    }

    #[test]
    fn empirical_cdf_counts() {
        let mut e = EmpiricalCdf::new(3.0, 30);
        let xs = e.xs();
        assert_eq!(xs.len(), 31);
        let s: Vec<GridMax> = [0.0, 0.1, 0.1000001, 0.25, 2.95, 3.5]
            .iter()
            .map(|&x| GridMax { coarse: x - 0.05, fine: x, continuous: x + 0.01 })
            .collect();
        e.add(&s);
        let raw = e.raw();
        for (j, &x) in xs.iter().enumerate() {
            let direct = s.iter().filter(|g| g.fine <= x).count() as f64 / 6.0;
            assert_eq!(raw[j], direct, "x = {x}");
        }
        let ext = e.extrapolated();
        assert!((ext[30] - (2.0 * 5.0 - 5.0) / 6.0).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::default().validate().is_ok());
        assert!(McConfig { horizon: 2.0, ..McConfig::default() }.validate().is_err());
        assert!(McConfig { step: 2e-3, ..McConfig::default() }.validate().is_err());
        assert!(McConfig { paths: 100, ..McConfig::default() }.validate().is_err());
    }

    #[test]
    fn kolmogorov_tail() {
        // Q(1.36) ≈ 0.049, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_q(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_q(1.628) - 0.0100).abs() < 5e-4);
    }
}
