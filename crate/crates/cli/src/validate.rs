//! Validation suites behind `pmax validate`.

use parabolic_max::airy::{
    ai_primitive, airy_eval, airy_zero, phi_by_asymptotic, phi_by_integral, shared_zero_table, PHI_CROSSOVER_K,
};
use parabolic_max::forms::{airy_identity_suite, em_via_integral, laplace_airy_check, parseval_sum, EmForm};
use parabolic_max::mc::{dkw_band, summarize_with, EmpiricalCdf, GridMax, McConfig};
use parabolic_max::quad::QuadratureSpec;
use parabolic_max::series::{
    em2_via_g_squared, eval_point, gparseval_check, mean_via_tmean, moments, moments_by_quadrature, tail_probability_g,
    HittingKernel, SeriesConfig,
};
use parabolic_max::Result;
use serde::Serialize;

/// Reference values of the means.
pub const EN_REF: f64 = 0.6955289995;
pub const EM_REF: f64 = 0.9961930199;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: Vec::new() }
    }

    fn gap(&mut self, name: impl Into<String>, value: f64, reference: f64, tolerance: f64) {
        let gap = (value - reference).abs();
        self.checks.push(Check { name: name.into(), value, reference, gap, tolerance, pass: gap <= tolerance });
    }

    /// `value ≤ bound`.
    fn below(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            reference: 0.0,
            gap: value,
            tolerance: bound,
            pass: value <= bound,
        });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        let v = if ok { 0.0 } else { 1.0 };
        self.checks.push(Check { name: name.into(), value: v, reference: 0.0, gap: v, tolerance: 0.0, pass: ok });
    }

    fn finish(self) -> SuiteReport {
        let pass = self.checks.iter().all(|c| c.pass);
        SuiteReport { suite: self.name.into(), pass, checks: self.checks }
    }
}

pub fn airy() -> Result<SuiteReport> {
    let mut s = Suite::new("airy");
    let inv_pi = std::f64::consts::FRAC_1_PI;
    let n = 10_000;
    let mut worst = 0.0f64;
    for i in 0..n {
        let x = -50.0 + 58.0 * i as f64 / (n - 1) as f64;
        let v = airy_eval(x)?;
        let scale = 1.0 + (v.ai * v.bip).abs() + (v.aip * v.bi).abs();
        worst = worst.max((v.wronskian() - inv_pi).abs() / scale);
    }
    s.below("wronskian residual on [-50, 8]", worst, 1e-12);
    let table = shared_zero_table::<f64>(10_000)?;
    let head = table.head(1000);
    let mut worst = 0.0f64;
    for r in head {
        worst = worst.max(airy_eval(r.a)?.ai.abs() / r.aip.abs());
    }
    s.below("zero residual |Ai/Ai'| for k <= 1000", worst, 1e-12);
    s.flag("zeros decreasing for k <= 10000", table.records().windows(2).all(|w| w[1].a < w[0].a));
    s.flag("phi(k) < 0 for k <= 1000", head.iter().all(|r| r.phi < 0.0));
    let a = airy_zero::<f64>(PHI_CROSSOVER_K)?.a;
    let (i, t) = (phi_by_integral(a)?, phi_by_asymptotic(a));
    s.below(format!("phi routes at k = {PHI_CROSSOVER_K}, relative"), ((i - t) / i).abs(), 1e-10);
    for r in table.head(5) {
        s.gap(
            format!("AI(a_{}) = -pi Ai'(a_k) Gi(a_k)", r.k),
            ai_primitive(r.a)?,
            -std::f64::consts::PI * r.aip * r.gi,
            1e-11,
        );
    }
    s.gap("a_1", table.get(1).a, -2.338_107_410_459_767, 1e-13);
    Ok(s.finish())
}

pub fn identities() -> Result<SuiteReport> {
    let mut s = Suite::new("identities");
    let spec = QuadratureSpec::<f64>::default();
    let tol = 1e-9;
    for r in airy_identity_suite(&spec, 4)? {
        s.gap(r.name, r.rhs, r.lhs, tol);
    }
    for z in [0.5, 1.0, 2.0] {
        let r = laplace_airy_check(z, &spec)?;
        s.gap(r.name, r.rhs, r.lhs, tol);
    }
    let r = parseval_sum::<f64>(1000)?;
    s.gap(r.name, r.rhs, r.lhs, tol);
    let (quad, sum) = gparseval_check::<f64>(&SeriesConfig::default())?;
    s.gap("integral of G^2 vs Hi(a_k)^2 sum", quad, sum, tol);
    Ok(s.finish())
}

pub fn series(cfg: &SeriesConfig) -> Result<SuiteReport> {
    let mut s = Suite::new("series");
    let m = moments::<f64>(cfg)?;
    s.gap("E N vs reference", m.en, EN_REF, 1e-8 + m.err_est.en);
    s.gap("E M vs reference", m.em, EM_REF, 1e-8 + m.err_est.em);
    let spec = QuadratureSpec::<f64>::default();
    for f in EmForm::ALL {
        s.gap(format!("E M via {}", f.name()), em_via_integral(f, &spec)?.value, m.em, 1e-8);
    }
    let (en, em) = mean_via_tmean::<f64>(cfg)?;
    s.gap("E N via paired conditional sum", en, m.en, 1e-3);
    s.gap("E M via paired conditional sum", em, m.em, 1e-3);
    s.gap("E M^2 via integral of G^2", em2_via_g_squared::<f64>(cfg)?, m.em2, 1e-9);
    let q = moments_by_quadrature::<f64>(cfg)?;
    let pairs = [
        ("E N", q.en, m.en, q.err_est.en + m.err_est.en),
        ("E M", q.em, m.em, q.err_est.em + m.err_est.em),
        ("E N^2", q.en2, m.en2, q.err_est.en2 + m.err_est.en2),
        ("E M^2", q.em2, m.em2, q.err_est.em2 + m.err_est.em2),
    ];
    for (name, a, b, e) in pairs {
        s.gap(format!("{name} by quadrature of G"), a, b, e.max(1e-10));
    }
    let h = 1e-4;
    let mut worst = 0.0f64;
    let mut squares = true;
    for i in 0..=29 {
        let x = 0.1 + 0.1 * i as f64;
        let p = eval_point(x, cfg)?;
        let d = (eval_point(x + h, cfg)?.cdf_n - eval_point(x - h, cfg)?.cdf_n) / (2.0 * h);
        worst = worst.max((d - p.f_n).abs());
        squares &= p.cdf_m == p.cdf_n * p.cdf_n;
    }
    s.below("max |dF_N/dx - f_N| on [0.1, 3]", worst, 1e-5);
    s.flag("F_M = F_N^2", squares);
    let x = 0.5;
    let k = HittingKernel::<f64>::new(x, cfg)?;
    s.gap(
        "integral of hitting density at x = 0.5 vs G(0.5)",
        k.mass(0.0, 6.0)?.value,
        tail_probability_g(x, cfg)?,
        1e-9,
    );
    Ok(s.finish())
}

pub fn monte_carlo(mc: &McConfig, cfg: &SeriesConfig) -> Result<SuiteReport> {
    let mut s = Suite::new("mc");
    let m = moments::<f64>(cfg)?;
    let (mut ecdf_n, mut ecdf_m) = (EmpiricalCdf::new(3.0, 300), EmpiricalCdf::new(3.0, 300));
    let sum = summarize_with(mc, &mut |chunk| {
        ecdf_n.add(&chunk.iter().map(|p| p.n).collect::<Vec<GridMax>>());
        ecdf_m.add(&chunk.iter().map(|p| p.m).collect::<Vec<GridMax>>());
    })?;
    let z = |name: &str, s: &mut Suite, est: parabolic_max::mc::McEstimate, want: f64| {
        s.gap(name, est.mean, want, 3.0 * est.stderr);
    };
    z("E N, sqrt(h)-extrapolated", &mut s, sum.en, m.en);
    z("E M, sqrt(h)-extrapolated", &mut s, sum.em, m.em);
    z("E N, bridge-sampled suprema", &mut s, sum.en_continuous, m.en);
    z("E M, bridge-sampled suprema", &mut s, sum.em_continuous, m.em);
    z("Var N, bridge-sampled suprema", &mut s, sum.var_n_continuous, m.var_n);
    z("Var M, bridge-sampled suprema", &mut s, sum.var_m_continuous, m.var_m);
    s.flag("grid means below series (fine, coarse)", sum.en_coarse.mean < sum.en_fine.mean && sum.en_fine.mean < m.en);
    let xs = ecdf_n.xs();
    let (fn_hat, fm_hat) = (ecdf_n.continuous(), ecdf_m.continuous());
    let band = dkw_band(ecdf_n.n, 0.01);
    let mut dev_n = 0.0f64;
    let mut dev_m = 0.0f64;
    for (j, &x) in xs.iter().enumerate() {
        let f = 1.0 - tail_probability_g(x, cfg)?;
        dev_n = dev_n.max((fn_hat[j] - f).abs());
        dev_m = dev_m.max((fm_hat[j] - fn_hat[j] * fn_hat[j]).abs());
    }
    s.below("ECDF of N vs 1 - G, 99% DKW band", dev_n, band);
    // |F̂_N² − F_N²| ≤ 2|F̂_N − F_N|, so the band for the square is three-fold
    s.below("ECDF of M vs squared ECDF of N", dev_m, 3.0 * band);
    let j1 = xs.iter().position(|&x| (x - 1.0).abs() < 1e-12).unwrap_or(100);
    let p = 1.0 - fn_hat[j1];
    let g1 = tail_probability_g(1.0, cfg)?;
    let binom = (g1 * (1.0 - g1) / ecdf_n.n as f64).sqrt();
    s.gap("P(N > 1) vs G(1)", p, g1, 3.0 * binom);
    Ok(s.finish())
}
