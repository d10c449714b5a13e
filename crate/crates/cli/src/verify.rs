//! Verification suites. Each check carries its measured value and the
//! tolerance it was held to; exact checks count mismatches against 0.

use crate::{CliError, CliResult};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;
use twofold_core::critical::{
    a_max, critical_line_n0, critical_point_a1, critical_point_general, cuts_n0, h_pair_n0, ising_critical,
    potts_critical, symmetric_bending, symmetric_h, w_pair_n0,
};
use twofold_core::elliptic::{build_frame, ZetaB};
use twofold_core::maps::{
    cluster_grand_sum, duality_identity_check, enumerate_rooted_maps, loop_grand_sum, loops_to_potts,
    potts_partition_cluster, potts_partition_spin, potts_to_loops, rooted_map_count, ClusterConfig, Color,
    RotationMap, MAX_ENUM_EDGES,
};
use twofold_core::model::{loop_from_potts_exact, potts_dual, ModelParams, PottsParams};
use twofold_core::numeric::laurent_coefficient;
use twofold_core::scalar::{parse_rational, ratio, Rational, Scalar};
use twofold_core::series::{gasket_fixed_point, gasket_fixed_point_f64, ring_coefficient};
use twofold_core::solver::solve_cuts;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tol: f64,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    /// Passes when `value <= tol` (NaN fails).
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            passed: value <= tol,
            value,
            tol,
            detail: String::new(),
        }
    }

    /// Exact check: `mismatches` must be zero.
    pub fn exact(name: impl Into<String>, mismatches: usize) -> Self {
        Check::at_most(name, mismatches as f64, 0.0)
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// Largest value among checks whose name starts with `prefix`.
    pub fn max_value(&self, prefix: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with(prefix))
            .map(|c| c.value)
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Bijection,
    Partition,
    Series,
    Ring,
    Elliptic,
    Solver,
    Critical,
    Ising,
    Duality,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Bijection,
        Suite::Partition,
        Suite::Series,
        Suite::Ring,
        Suite::Elliptic,
        Suite::Solver,
        Suite::Critical,
        Suite::Ising,
        Suite::Duality,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Bijection => "bijection",
            Suite::Partition => "partition",
            Suite::Series => "series",
            Suite::Ring => "ring",
            Suite::Elliptic => "elliptic",
            Suite::Solver => "solver",
            Suite::Critical => "critical",
            Suite::Ising => "ising",
            Suite::Duality => "duality",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub max_edges: usize,
    /// Triangle grade for the series identity (even).
    pub order: usize,
    /// Restricts the Potts-based suites to one value of `Q`.
    pub q: Option<Rational>,
    /// Ring table size `k + k' <= kmax`.
    pub kmax: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_edges: 3,
            order: 6,
            q: None,
            kmax: 8,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.max_edges > MAX_ENUM_EDGES {
            return Err(CliError::Config(format!(
                "--max-edges {} exceeds the enumeration bound {MAX_ENUM_EDGES}",
                self.max_edges
            )));
        }
        if self.order == 0 || self.order % 2 == 1 || self.order > 2 * MAX_ENUM_EDGES {
            return Err(CliError::Config(format!(
                "--order must be even and in 2..={}, got {}",
                2 * MAX_ENUM_EDGES,
                self.order
            )));
        }
        if self.kmax == 0 || self.kmax > 16 {
            return Err(CliError::Config(format!("--kmax must be in 1..=16, got {}", self.kmax)));
        }
        if let Some(q) = &self.q {
            if *q <= ratio(0, 1) {
                return Err(CliError::Config(format!("--Q must be positive, got {q}")));
            }
        }
        Ok(())
    }
}

pub fn parse_q(s: &str) -> CliResult<Rational> {
    parse_rational(s).ok_or_else(|| CliError::Config(format!("--Q `{s}` is not a rational number")))
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> CliResult<SuiteReport> {
    cfg.validate()?;
    let start = Instant::now();
    let checks = match suite {
        Suite::Bijection => bijection(cfg)?,
        Suite::Partition => partition(cfg)?,
        Suite::Series => series(cfg)?,
        Suite::Ring => ring(cfg),
        Suite::Elliptic => elliptic()?,
        Suite::Solver => solver()?,
        Suite::Critical => critical()?,
        Suite::Ising => ising()?,
        Suite::Duality => duality(cfg)?,
    };
    Ok(SuiteReport {
        suite: suite.name().into(),
        passed: checks.iter().all(|c| c.passed),
        seconds: start.elapsed().as_secs_f64(),
        checks,
    })
}

fn configs(max_edges: usize) -> CliResult<Vec<ClusterConfig>> {
    Ok(ClusterConfig::enumerate(max_edges)?)
}

fn bijection(cfg: &VerifyConfig) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let maps = enumerate_rooted_maps(cfg.max_edges)?;
    for e in 1..=cfg.max_edges {
        let got = maps.iter().filter(|m| m.num_edges() == e).count() as u128;
        let expect = rooted_map_count(e);
        checks.push(Check::exact(format!("rooted-maps E={e}"), got.abs_diff(expect) as usize));
    }
    let all = configs(cfg.max_edges)?;
    let (mut invalid, mut triangles, mut loops, mut red, mut green) = (0, 0, 0, 0, 0);
    for c in &all {
        let lc = potts_to_loops(c);
        invalid += usize::from(lc.validate().is_err());
        triangles += usize::from(lc.num_triangles() != 2 * c.map.num_edges());
        let expect = 2 * c.clusters + c.subset_size() - c.map.num_vertices();
        loops += usize::from(lc.num_loops() != expect);
        red += usize::from(loops_to_potts(&lc, Color::Red).as_ref() != Ok(c));
        green += usize::from(loops_to_potts(&lc, Color::Green) != c.dual());
    }
    let detail = format!("{} configurations", all.len());
    checks.push(Check::exact("fully-packed", invalid).with_detail(detail));
    checks.push(Check::exact("triangles = 2E", triangles));
    checks.push(Check::exact("loops = 2c + |S| - |V|", loops));
    checks.push(Check::exact("red roundtrip", red));
    checks.push(Check::exact("green reading is the dual", green));
    Ok(checks)
}

fn partition(cfg: &VerifyConfig) -> CliResult<Vec<Check>> {
    let qs = match &cfg.q {
        Some(q) => vec![q.clone()],
        None => vec![ratio(1, 1), ratio(2, 1), ratio(3, 1)],
    };
    let maps = enumerate_rooted_maps(cfg.max_edges)?;
    let (t, w) = (ratio(2, 3), ratio(5, 2));
    let j = &w - ratio(1, 1);
    let mut checks = Vec::new();
    for q in qs {
        let mut bad = 0;
        for m in &maps {
            let spin = potts_partition_spin(m, &q, &t, &w).map_err(|e| CliError::Config(e.to_string()))?;
            bad += usize::from(spin != potts_partition_cluster(m, &q, &t, &j));
        }
        checks.push(Check::exact(format!("spin = cluster Q={q}"), bad).with_detail(format!("{} maps", maps.len())));
    }
    Ok(checks)
}

/// Potts weights with rational loop weights: `t = 1/9`, `J = 4 sqrt(Q)`.
fn series_weights(q: &Rational) -> CliResult<PottsParams<Rational>> {
    let n = q
        .try_sqrt()
        .ok_or_else(|| CliError::Config(format!("--Q {q} must be a perfect square for the exact series")))?;
    let mut p = PottsParams::new(q.clone(), ratio(1, 9), ratio(4, 1) * n);
    p.mu_v = ratio(2, 3);
    p.mu_f = ratio(5, 4);
    Ok(p)
}

fn series(cfg: &VerifyConfig) -> CliResult<Vec<Check>> {
    let qs = match &cfg.q {
        Some(q) => vec![q.clone()],
        None => vec![ratio(1, 1), ratio(9, 4)],
    };
    let emax = cfg.order / 2;
    let all = configs(emax)?;
    let mut checks = Vec::new();
    for q in qs {
        let p = series_weights(&q)?;
        let w = loop_from_potts_exact(&p)?;
        let sol = gasket_fixed_point(&w, 2, cfg.order)?;
        let mut bad = 0;
        let mut loop_side = 0;
        for grade in 1..=cfg.order {
            let lhs = sol.f1[2].coeff(grade) + sol.f2[2].coeff(grade);
            if grade % 2 == 1 {
                bad += usize::from(lhs != ratio(0, 1));
            } else {
                let e = grade / 2;
                let clusters = cluster_grand_sum(&all, e, &p);
                bad += usize::from(lhs != clusters);
                loop_side += usize::from(loop_grand_sum(&all, e, &w) != clusters);
            }
        }
        checks.push(Check::exact(format!("series = maps Q={q}"), bad).with_detail(format!("grades 1..={}", cfg.order)));
        checks.push(Check::exact(format!("loop weights = cluster weights Q={q}"), loop_side));
    }
    Ok(checks)
}

/// Marked bicolored necklaces: words of length `k + k'` starting with the
/// marked red-facing triangle, weight `a` per cyclically adjacent equal pair.
pub fn necklace_sum(k: usize, kp: usize, h1: &Rational, h2: &Rational, a: &Rational) -> Rational {
    let len = k + kp;
    let mut total = ratio(0, 1);
    if k == 0 {
        return total;
    }
    for word in 0u32..(1 << len) {
        // bit set = red-facing
        if word & 1 == 0 || word.count_ones() as usize != k {
            continue;
        }
        let same = (0..len)
            .filter(|&i| ((word >> i) & 1) == ((word >> ((i + 1) % len)) & 1))
            .count();
        total += Scalar::pow(a, same as u32);
    }
    total * Scalar::pow(h1, k as u32) * Scalar::pow(h2, kp as u32)
}

fn ring(cfg: &VerifyConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    for (h1, h2, a) in [
        (ratio(1, 3), ratio(2, 5), ratio(3, 2)),
        (ratio(7, 2), ratio(1, 1), ratio(2, 9)),
        (ratio(1, 1), ratio(1, 1), ratio(1, 1)),
    ] {
        let mut bad = 0;
        for k in 0..=cfg.kmax {
            for kp in 0..=(cfg.kmax - k) {
                bad += usize::from(ring_coefficient(k, kp, &h1, &h2, &a) != necklace_sum(k, kp, &h1, &h2, &a));
            }
        }
        checks.push(Check::exact(format!("ring = necklaces (h1,h2,a)=({h1},{h2},{a})"), bad));
    }
    checks
}

/// The `(b, T)` grid of the special-function checks.
pub const ZETA_B: [f64; 3] = [0.1, 1.0 / 3.0, 0.45];
pub const ZETA_T: [f64; 3] = [0.5, 2.0, 8.0];
/// Values of `b` at which the `T = 8` zeta is compared with the trigonometric form.
pub const ZETA_TRIG_B: [f64; 4] = [0.1, 1.0 / 3.0, 0.4, 0.45];

fn zeta_sample(rng: &mut ChaCha8Rng, t: f64) -> C {
    loop {
        let v = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-t..t));
        // stay away from the poles at 0, +-1 and +-2iT
        let near = [C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(-1.0, 0.0), C::new(0.0, 2.0 * t), C::new(0.0, -2.0 * t)]
            .iter()
            .any(|p| (v - p).norm() < 0.05);
        if !near {
            return v;
        }
    }
}

fn elliptic() -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for &b in &ZETA_B {
        for &t in &ZETA_T {
            let z = ZetaB::new(b, t)?;
            let pb = C::from_polar(1.0, PI * b);
            let (mut per1, mut per2) = (0.0f64, 0.0f64);
            for _ in 0..100 {
                let v = zeta_sample(&mut rng, t);
                let zv = z.eval(v);
                let scale = zv.norm().max(1.0);
                per1 = per1.max((z.eval(v + 1.0) - pb * zv).norm() / scale);
                per2 = per2.max((z.eval(v + C::new(0.0, 2.0 * t)) - zv).norm() / scale);
            }
            let res = laurent_coefficient(|v| z.eval(v), C::new(0.0, 0.0), 0.25, -1, 128);
            let tag = format!("b={b:.4} T={t}");
            checks.push(Check::at_most(format!("zeta(v+1) = e^(i pi b) zeta(v) {tag}"), per1, 1e-12));
            checks.push(Check::at_most(format!("zeta(v+2iT) = zeta(v) {tag}"), per2, 1e-12));
            checks.push(Check::at_most(format!("residue at 0 {tag}"), (res - 1.0).norm(), 1e-12));
        }
    }
    for &b in &ZETA_TRIG_B {
        let finite = ZetaB::new(b, 8.0)?;
        let trig = ZetaB::new(b, f64::INFINITY)?;
        let mut worst = 0.0f64;
        for k in 0..100 {
            let v = C::new(-0.9 + 1.8 * k as f64 / 99.0, -0.2 + 0.4 * ((k * 37) % 100) as f64 / 99.0);
            if v.norm() < 0.05 {
                continue;
            }
            let zt = trig.eval(v);
            worst = worst.max((finite.eval(v) - zt).norm() / zt.norm().max(1.0));
        }
        checks.push(
            Check::at_most(format!("zeta T=8 vs trigonometric b={b:.4}"), worst, 1e-8)
                .with_detail("difference is O(e^(-2 pi b T))"),
        );
    }
    // the trigonometric form itself
    let b = 0.4;
    let trig = ZetaB::new(b, f64::INFINITY)?;
    let mut worst = 0.0f64;
    for v in [C::new(0.3, -0.2), C::new(-0.7, 1.1), C::new(0.2, 0.0)] {
        let e = C::new(0.0, PI * v.re).exp() * (-PI * v.im).exp();
        let closed = C::new(0.0, 2.0 * PI) * (C::new(0.0, PI * (b - 1.0)) * v).exp() / (e - 1.0 / e);
        worst = worst.max((trig.eval(v) - closed).norm());
    }
    checks.push(Check::at_most("T = inf zeta is 2 i pi e^(i pi (b-1) v) / (2 i sin pi v)", worst, 1e-12));
    let frame = build_frame(-0.9, 1.1, -1.0, 1.0, 1.0, 0.12, 0.1)?;
    let cons = frame.consistency().into_iter().fold(0.0, f64::max);
    checks.push(Check::at_most("elliptic frame consistency", cons, 1e-10).with_detail(format!("T = {}", frame.t)));
    Ok(checks)
}

/// The five subcritical parameter sets `(n, a, h1, h2, u1, u2)`.
pub const SOLVER_SETS: [[f64; 6]; 5] = [
    [1.0, 1.0, 0.05, 0.05, 1.0, 1.0],
    [0.5, 1.0, 0.06, 0.04, 1.2, 0.8],
    [1.2, 1.3, 0.05, 0.05, 1.0, 1.0],
    [0.8, 0.7, 0.04, 0.06, 0.9, 1.1],
    [1.5, 1.5, 0.03, 0.05, 1.0, 1.5],
];

fn solver() -> CliResult<Vec<Check>> {
    use rayon::prelude::*;
    let per_set: Vec<CliResult<Vec<Check>>> = SOLVER_SETS.par_iter().enumerate().map(|(k, s)| solver_set(k, s)).collect();
    let mut checks = Vec::new();
    for c in per_set {
        checks.extend(c?);
    }
    Ok(checks)
}

fn solver_set(k: usize, s: &[f64; 6]) -> CliResult<Vec<Check>> {
    let p = ModelParams::new(s[0], s[1], s[2], s[3], s[4], s[5])?;
    let tag = format!("set {}", k + 1);
    let solved = solve_cuts(&p)?;
    let sol = &solved.solution;
    let mut checks = vec![Check::at_most(format!("edge conditions {tag}"), solved.residual, 1e-10)];
    let f = sol.functional_residuals(50)?;
    checks.push(Check::at_most(format!("functional equations {tag}"), f[0].max(f[1]), 1e-8));
    let pts: Vec<C> = (0..20)
        .map(|j| C::new(-1.7 + 0.17 * j as f64 + 0.013, 0.37 * (j as f64 - 10.0) / 10.0 * sol.frame.t.min(4.0)))
        .collect();
    let cont = sol.continuation_residuals(&pts).into_iter().fold(0.0, f64::max);
    checks.push(Check::at_most(format!("continuation relations {tag}"), cont, 1e-8));
    let mut lim = 0.0f64;
    for (i, u) in [(1, p.u1), (2, p.u2)] {
        lim = lim.max((sol.large_x_limit(i)? - u).abs());
    }
    checks.push(Check::at_most(format!("x W(x) -> u_i {tag}"), lim, 1e-6));
    let series = gasket_fixed_point_f64(&p, 4, 24)?;
    let mut coef = 0.0f64;
    for (i, fs) in [(1, &series.f1), (2, &series.f2)] {
        let m = sol.moments(i, 4)?;
        for l in 0..=4 {
            let e = fs[l].eval_f64(1.0);
            coef = coef.max((m[l] - e).abs() / (1.0 + e.abs()));
        }
    }
    checks.push(Check::at_most(format!("F_l (l <= 4) vs series {tag}"), coef, 1e-6));
    let scan = sol.density_scan(512);
    let neg = (-scan.min_rho1.min(scan.min_rho2)).max(0.0);
    checks.push(Check::at_most(format!("density positive {tag}"), neg, 1e-9));
    checks.push(Check::at_most(format!("edge exponent 1/2 {tag}"), (sol.edge_exponent() - 0.5).abs(), 0.02));
    Ok(checks)
}

/// `(a, r)` pairs compared with the `n -> 0` closed forms at `b = 0.4999`.
pub const N0_POINTS: [(f64, f64); 4] = [(1.0, 2.0), (1.5, 2.0), (0.8, 0.5), (2.0, 1.0)];

fn critical() -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let mut symh = 0.0f64;
    for (u, b) in [(1.0, 1.0 / 3.0), (0.7, 0.4), (2.0, 0.2), (1.0, 0.45)] {
        let cp = critical_point_a1(u, 1.0, b)?;
        let h = symmetric_h(u, 2.0 * (PI * b).cos());
        symh = symh.max((cp.h1 - h).abs()).max((cp.h2 - h).abs());
    }
    checks.push(Check::at_most("r = 1, a = 1: h = 1/(2 sqrt(2u(2+n)))", symh, 1e-12));
    let pc = potts_critical(1.0)?;
    checks.push(Check::at_most("Potts Q = 1: t_c = 1/24", (pc.t_c - 1.0 / 24.0).abs(), 1e-12));
    checks.push(Check::at_most("Potts Q = 1: J_c = 1", (pc.j_c - 1.0).abs(), 1e-12));
    let b = 0.4999;
    let (mut dw, mut dh, mut dc, mut line) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (a, r) in N0_POINTS {
        let cp = critical_point_general(1.0, r, a, b)?;
        let (w1, w2) = w_pair_n0(a, r);
        let (h1, h2) = h_pair_n0(1.0, r, a);
        dw = dw.max((cp.w1.re - w1).abs()).max((cp.w2.re - w2).abs());
        dh = dh.max((cp.h1 - h1).abs()).max((cp.h2 - h2).abs());
        if a == 1.0 {
            let c = cuts_n0(1.0, r);
            dc = dc.max((cp.g1m - c[0]).abs()).max((cp.g1p - c[1]).abs());
        }
        line = line.max(critical_line_n0(r.sqrt(), 1.0 / r.sqrt(), a, h1, h2).abs());
    }
    checks.push(Check::at_most("n -> 0: w1, w2 closed forms at b = 0.4999", dw, 1e-3));
    checks.push(Check::at_most("n -> 0: h1, h2 closed forms at b = 0.4999", dh, 1e-3));
    checks.push(Check::at_most("n -> 0: symmetric cuts +-2 sqrt(u1) at b = 0.4999", dc, 1e-3));
    checks.push(Check::at_most("n -> 0 point lies on the critical line", line, 1e-12));
    Ok(checks)
}

pub const ISING_A: [f64; 4] = [1.5, 2.0, 3.0, 3.9];

fn ising() -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let b = 1.0 / 3.0;
    for a in ISING_A {
        let cp = symmetric_bending(a, b, 1.0)?;
        let big_h = (1.0 - a * a).powi(2) * cp.h1 * cp.h1;
        let expect = 2.0 / 9.0 * (1.0 - 3.0 * a + 2.0 * a.powf(1.5));
        checks.push(Check::at_most(format!("H(a={a}) = (2/9)(1 - 3a + 2a^(3/2))"), (big_h - expect).abs(), 1e-10));
        checks.push(Check::at_most(
            format!("Ising equations at a={a}"),
            ising_critical(a).residual,
            1e-12,
        ));
    }
    let (w, amax) = a_max(b)?;
    checks.push(Check::at_most("a_max(1/3) = 4", (amax - 4.0).abs(), 1e-8));
    checks.push(Check::at_most("w1_max(1/3) = 3/4", (w - 0.75).abs(), 1e-10));
    let at4 = ising_critical(4.0);
    checks.push(Check::at_most("non-generic branch = 10/9 at a = 4", (at4.h_nongeneric - 10.0 / 9.0).abs(), 1e-12));
    checks.push(Check::at_most("generic branch = 10/9 at a = 4", (at4.h_generic - 10.0 / 9.0).abs(), 1e-12));
    Ok(checks)
}

fn duality(cfg: &VerifyConfig) -> CliResult<Vec<Check>> {
    let qs = match &cfg.q {
        Some(q) => vec![q.clone()],
        None => vec![ratio(1, 1), ratio(9, 4)],
    };
    let edge = RotationMap::new(vec![0, 1], vec![1, 0], 0)?;
    let triangle: RotationMap = "sigma:5,2,1,4,3,0;alpha:1,0,3,2,5,4;root:0".parse()?;
    let pairs = [("edge / self-loop", edge.clone(), edge.dual()), ("triangle / theta", triangle.clone(), triangle.dual())];
    let mut checks = Vec::new();
    for q in &qs {
        for (name, m, d) in &pairs {
            let mut bad = 0;
            for (t, j) in [(ratio(2, 3), ratio(3, 2)), (ratio(1, 5), ratio(7, 4))] {
                bad += usize::from(!duality_identity_check(m, q, &t, &j)?);
                bad += usize::from(!duality_identity_check(d, q, &t, &j)?);
            }
            checks.push(Check::exact(format!("duality identity {name} Q={q}"), bad));
        }
        let mut bad = 0;
        for (t, j) in [(ratio(2, 3), ratio(3, 2)), (ratio(1, 5), ratio(7, 4)), (ratio(9, 2), ratio(1, 8))] {
            let mut p = PottsParams::new(q.clone(), t.clone(), j.clone());
            p.mu_v = ratio(2, 3);
            p.mu_f = ratio(5, 4);
            let d = match potts_dual(&p) {
                Ok(d) => d,
                Err(e) => return Err(CliError::Config(e.to_string())),
            };
            bad += usize::from(&j * &d.j != *q);
            bad += usize::from(&j * &t * &t != &d.j * &d.t * &d.t);
            bad += usize::from(potts_dual(&d)? != p);
        }
        checks.push(Check::exact(format!("dual involution, J J* = Q, J t^2 = J* t*^2, Q={q}"), bad));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn necklace_oracle_small_cases() {
        let (h1, h2, a) = (ratio(1, 1), ratio(1, 1), ratio(2, 1));
        // R: one cyclic pair R-R
        assert_eq!(necklace_sum(1, 0, &h1, &h2, &a), ratio(2, 1));
        // RG only
        assert_eq!(necklace_sum(1, 1, &h1, &h2, &a), ratio(1, 1));
        // RRG, RGR: one equal pair each
        assert_eq!(necklace_sum(2, 1, &h1, &h2, &a), ratio(4, 1));
    }

    #[test]
    fn rejects_bad_configs() {
        let cfg = VerifyConfig {
            max_edges: 6,
            ..Default::default()
        };
        assert!(matches!(run(Suite::Bijection, &cfg), Err(CliError::Config(_))));
        let cfg = VerifyConfig {
            order: 5,
            ..Default::default()
        };
        assert!(matches!(run(Suite::Series, &cfg), Err(CliError::Config(_))));
        let cfg = VerifyConfig {
            q: Some(ratio(2, 1)),
            ..Default::default()
        };
        assert!(matches!(run(Suite::Series, &cfg), Err(CliError::Config(_))));
        assert!(parse_q("abc").is_err());
    }
}
