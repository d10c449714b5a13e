//! Non-generic critical points of the fully packed model (`T = inf`): closed
//! forms at `a = 1`, the procedural solve for `a != 1`, the `n -> 0` limit,
//! the symmetric bending model and the Ising cross-check.

use crate::elliptic::s1_map;
use crate::error::{out_of_range, Error, Result};
use crate::numeric::{bracket_root, scan_roots, StableTrig};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    DenseGeneric,
    DiluteBoundary,
    InvalidPositivity,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::DenseGeneric => "dense-generic",
            Regime::DiluteBoundary => "dilute-boundary",
            Regime::InvalidPositivity => "invalid-positivity",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub b: f64,
    pub a: f64,
    pub u: f64,
    pub r: f64,
    pub w1: C,
    pub w2: C,
    pub h1: f64,
    pub h2: f64,
    pub g1m: f64,
    pub g1p: f64,
    pub g2m: f64,
    pub g2p: f64,
    pub lam: f64,
    pub del: f64,
    pub regime: Regime,
}

impl CriticalPoint {
    pub fn n(&self) -> f64 {
        2.0 * (PI * self.b).stable_cos()
    }

    pub fn u1(&self) -> f64 {
        self.u * self.r.sqrt()
    }

    pub fn u2(&self) -> f64 {
        self.u / self.r.sqrt()
    }
}

fn check_b(b: f64) -> Result<()> {
    if b > 0.0 && b <= 0.5 {
        Ok(())
    } else {
        Err(out_of_range("b", b, "(0, 1/2]"))
    }
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(out_of_range(name, x, "(0, inf)"))
    }
}

/// `kappa_b(w) = b cos(pi b w) sin(pi w) - sin(pi b w) cos(pi w)`.
pub fn kappa_b(b: f64, w: f64) -> f64 {
    b * (PI * b * w).stable_cos() * (PI * w).stable_sin() - (PI * b * w).stable_sin() * (PI * w).stable_cos()
}

/// `g_b(w1) = sqrt(kappa_b(w1) kappa_b(1 - w1))`.
pub fn g_b(b: f64, w1: f64) -> f64 {
    (kappa_b(b, w1) * kappa_b(b, 1.0 - w1)).sqrt()
}

/// The unique `w1` in `(0,1)` with `kappa_b(w1) / kappa_b(1 - w1) = r`.
pub fn solve_w1_a1(r: f64, b: f64) -> Result<f64> {
    check_positive("r", r)?;
    check_b(b)?;
    if r == 1.0 {
        return Ok(0.5);
    }
    let f = |w: f64| kappa_b(b, w) - r * kappa_b(b, 1.0 - w);
    bracket_root(f, 0.0, 1.0, 0.0)
}

/// Closed-form critical point at `a = 1`.
pub fn critical_point_a1(u: f64, r: f64, b: f64) -> Result<CriticalPoint> {
    check_positive("u", u)?;
    let w1 = solve_w1_a1(r, b)?;
    let (sb, sw) = ((PI * b).stable_sin(), (PI * w1).stable_sin());
    let cw = (PI * w1).stable_cos();
    let pre = (4.0 * u * sb / (b * g_b(b, w1))).sqrt();
    let (s_a, s_b) = ((PI * b * w1).stable_sin(), (PI * b * (1.0 - w1)).stable_sin());
    let (c_a, c_b) = ((PI * b * w1).stable_cos(), (PI * b * (1.0 - w1)).stable_cos());
    let h1 = s_b.sqrt() * s_a / (pre * b * sb * sw.sqrt());
    let h2 = s_a.sqrt() * s_b / (pre * b * sb * sw.sqrt());
    let g1p = pre * b * c_b * sw.sqrt() / s_b.sqrt();
    let g1m = pre * (b * sw * c_b - (1.0 - cw) * s_b) / (sw * s_b).sqrt();
    let g2p = pre * b * c_a * sw.sqrt() / s_a.sqrt();
    let g2m = pre * (b * c_a * sw - (1.0 + cw) * s_a) / (sw * s_a).sqrt();
    // x(0) = s2(g2m) with s2(y) = (1 - h2 y) / h1 at a = 1.
    let lam = (1.0 - h2 * g2m) / h1;
    Ok(CriticalPoint {
        b,
        a: 1.0,
        u,
        r,
        w1: C::new(w1, 0.0),
        w2: C::new(w1, 0.0),
        h1,
        h2,
        g1m,
        g1p,
        g2m,
        g2p,
        lam,
        del: lam - g1p,
        regime: Regime::DenseGeneric,
    })
}

/// `h` on the symmetric line `r = 1`, `a = 1`: `1 / (2 sqrt(2u) sqrt(2+n))`.
pub fn symmetric_h(u: f64, n: f64) -> f64 {
    1.0 / (2.0 * (2.0 * u).sqrt() * (2.0 + n).sqrt())
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PottsCritical {
    #[serde(rename = "Q")]
    pub q: f64,
    pub t_c: f64,
    #[serde(rename = "J_c")]
    pub j_c: f64,
    #[serde(rename = "K_c")]
    pub k_c: f64,
    pub t_selfdual: f64,
    #[serde(rename = "J_selfdual")]
    pub j_selfdual: f64,
}

/// Critical couplings of the Potts model with `mu_v = mu_f = 1`
/// (`r = n`, `u = sqrt(n)`), together with the self-dual values of the
/// symmetric model `u1 = u2 = 1`.
pub fn potts_critical(q: f64) -> Result<PottsCritical> {
    if !(q > 0.0 && q < 4.0) {
        return Err(out_of_range("Q", q, "(0, 4)"));
    }
    let n = q.sqrt();
    let b = (n / 2.0).acos() / PI;
    let cp = critical_point_a1(n.sqrt(), n, b)?;
    let j_c = n * (cp.h1 / cp.h2).powi(2);
    let h_sd = symmetric_h(1.0, n);
    Ok(PottsCritical {
        q,
        t_c: cp.h2 * cp.h2,
        j_c,
        k_c: j_c.ln_1p(),
        t_selfdual: h_sd * h_sd,
        j_selfdual: n,
    })
}

// ---------------------------------------------------------------- n -> 0

/// `eta_{a,r} = sqrt(4 a^2 r^{2/3} + (1 - r^{2/3})^2)`.
pub fn eta_ar(a: f64, r: f64) -> f64 {
    let r23 = r.powf(2.0 / 3.0);
    (4.0 * a * a * r23 + (1.0 - r23).powi(2)).sqrt()
}

/// `(w1, w2)` of the `n -> 0` critical point.
pub fn w_pair_n0(a: f64, r: f64) -> (f64, f64) {
    let eta = eta_ar(a, r);
    let w1 = (2.0 / eta - 1.0).clamp(-1.0, 1.0).acos() / PI;
    let w2 = (1.0 - 2.0 * r.powf(2.0 / 3.0) / eta).clamp(-1.0, 1.0).acos() / PI;
    (w1, w2)
}

/// `(h1, h2)` at `n -> 0`, `a = 1`.
pub fn h_pair_n0_a1(u: f64, r: f64) -> (f64, f64) {
    let h1 = 0.5 / u.sqrt() * r.powf(-0.25) / (1.0 + r.powf(-2.0 / 3.0));
    let h2 = 0.5 / u.sqrt() * r.powf(0.25) / (1.0 + r.powf(2.0 / 3.0));
    (h1, h2)
}

/// `(h1, h2)` at `n -> 0` for `a != 1`.
pub fn h_pair_n0(u: f64, r: f64, a: f64) -> (f64, f64) {
    if a == 1.0 {
        return h_pair_n0_a1(u, r);
    }
    let eta = eta_ar(a, r);
    let r23 = r.powf(2.0 / 3.0);
    let base = (eta - 1.0 - r23) / (4.0 * (a * a - 1.0) * u.sqrt());
    let q = (eta - 1.0 + r23) / (eta + 1.0 - r23);
    (base * r.powf(-7.0 / 12.0) * q.sqrt(), base * r.powf(-1.0 / 12.0) / q.sqrt())
}

/// Cuts `[g1m, g1p, g2m, g2p]` at `n -> 0`: `+-2 sqrt(u) r^{+-1/4}`.
pub fn cuts_n0(u: f64, r: f64) -> [f64; 4] {
    let c1 = 2.0 * u.sqrt() * r.powf(0.25);
    let c2 = 2.0 * u.sqrt() * r.powf(-0.25);
    [-c1, c1, -c2, c2]
}

/// Left side of the codimension-one `n = 0` critical line
/// `1 - 2a sqrt(u1) h1 - 2a sqrt(u2) h2 + 4(a^2-1) sqrt(u1 u2) h1 h2`.
pub fn critical_line_n0(u1: f64, u2: f64, a: f64, h1: f64, h2: f64) -> f64 {
    1.0 - 2.0 * a * u1.sqrt() * h1 - 2.0 * a * u2.sqrt() * h2 + 4.0 * (a * a - 1.0) * (u1 * u2).sqrt() * h1 * h2
}

// ------------------------------------------------------- general a != 1

type Jet = [C; 3];

fn cos_jet(k: f64, phase: f64, w: C) -> Jet {
    let arg = w * k + phase;
    [arg.stable_cos(), -arg.stable_sin() * k, -arg.stable_cos() * k * k]
}

fn sin_jet(k: f64, w: C) -> Jet {
    let arg = w * k;
    [arg.stable_sin(), arg.stable_cos() * k, -arg.stable_sin() * k * k]
}

fn quotient(n: Jet, d: Jet) -> Jet {
    let q = n[0] / d[0];
    let q1 = (n[1] - q * d[1]) / d[0];
    let q2 = (n[2] - 2.0 * q1 * d[1] - q * d[2]) / d[0];
    [q, q1, q2]
}

/// Jet in `w` of `f(1 - w)` from the jet of `f` at `1 - w`.
fn reflect(j: Jet) -> Jet {
    [j[0], -j[1], j[2]]
}

/// `D_j[f] = sum_l alpha_{j|l} / l! f^{(l)}(w_j)`.
fn apply(alpha: &[C; 3], f: &Jet) -> C {
    alpha[0] * f[0] + alpha[1] * f[1] + alpha[2] * f[2] / 2.0
}

/// Laurent coefficients `alpha_{j|l}` (`j = 1, 2`; `l = 0, 1, 2`) of a
/// `T = inf` fully packed solution.
#[derive(Clone, Copy, Debug)]
pub struct EdgeAlphas {
    pub alpha: [[C; 3]; 2],
}

struct RowFns {
    f1: Jet,
    f2: Jet,
    sign: f64,
}

fn edge_rows(b: f64, w1: C, w2: C) -> [RowFns; 4] {
    let bt = 1.0 - b;
    let m2 = C::new(1.0, 0.0) - w2;
    let sin_pi = |w: C| sin_jet(PI, w);
    [
        RowFns {
            f1: cos_jet(PI * b, 0.0, w1),
            f2: reflect(cos_jet(PI * b, 0.0, m2)),
            sign: 1.0,
        },
        RowFns {
            f1: cos_jet(PI * bt, 0.0, w1),
            f2: reflect(cos_jet(PI * bt, 0.0, m2)),
            sign: -1.0,
        },
        RowFns {
            f1: quotient(sin_jet(PI * b, w1), sin_pi(w1)),
            f2: reflect(quotient(sin_jet(PI * b, m2), sin_pi(m2))),
            sign: -1.0,
        },
        RowFns {
            f1: quotient(sin_jet(PI * bt, w1), sin_pi(w1)),
            f2: reflect(quotient(sin_jet(PI * bt, m2), sin_pi(m2))),
            sign: 1.0,
        },
    ]
}

/// Solves the four edge conditions for `alpha_{j|1}, alpha_{j|2}` given the
/// residues fixed by `n, u1, u2`.
pub fn edge_alphas(b: f64, u1: f64, u2: f64, w1: C, w2: C) -> Result<EdgeAlphas> {
    let n = 2.0 * (PI * b).stable_cos();
    let d = 4.0 - n * n;
    let a10 = C::new(-2.0 * (2.0 * u1 - n * u2) / d, 0.0);
    let a20 = C::new(2.0 * (n * u1 - 2.0 * u2) / d, 0.0);
    let rows = edge_rows(b, w1, w2);
    let mut m = Matrix4::<C>::zeros();
    let mut rhs = Vector4::<C>::zeros();
    for (i, row) in rows.iter().enumerate() {
        m[(i, 0)] = row.f1[1];
        m[(i, 1)] = row.f1[2] / 2.0;
        m[(i, 2)] = row.f2[1] * row.sign;
        m[(i, 3)] = row.f2[2] / 2.0 * row.sign;
        rhs[i] = -(a10 * row.f1[0] + a20 * row.f2[0] * row.sign);
    }
    let sol = m.lu().solve(&rhs).ok_or_else(|| Error::NonConvergence {
        what: "edge-condition system (singular)",
        residual: vec![w1.re, w1.im, w2.re, w2.im],
    })?;
    Ok(EdgeAlphas {
        alpha: [[a10, sol[0], sol[1]], [a20, sol[2], sol[3]]],
    })
}

/// Residual of the extra relation that cancels the `e^{-i pi (1+b) v}` order.
pub fn extra_relation(b: f64, al: &EdgeAlphas, w1: C, w2: C) -> C {
    let m2 = C::new(1.0, 0.0) - w2;
    let f1 = cos_jet(PI * (1.0 + b), 0.0, w1);
    let f2 = reflect(cos_jet(PI * (1.0 + b), 0.0, m2));
    apply(&al.alpha[0], &f1) - apply(&al.alpha[1], &f2)
}

/// Coefficient `L` of the leading `e^{-i pi (2-b) v}` order of
/// `rho1(x(v+1)) x'(v+1)`, up to the factor `-2i sin(pi b)`. The density is
/// locally positive at the merged edge iff `L < 0`.
pub fn edge_coefficient(b: f64, al: &EdgeAlphas, w1: C, w2: C) -> C {
    let f1 = cos_jet(PI * (2.0 - b), 0.0, w1);
    let f2 = cos_jet(PI * (2.0 - b), PI * b, w2);
    (apply(&al.alpha[0], &f1) + apply(&al.alpha[1], &f2)) / 2.0
}

/// Everything that follows from `(w1, w2)` once the edge conditions hold:
/// `x(v)`, the bending weight `a`, `h1, h2` and the cuts.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub alphas: EdgeAlphas,
    pub lam: C,
    pub del: C,
    pub a: C,
    pub h1: C,
    pub h2: C,
    /// `[g1m, g1p, g2m, g2p]`.
    pub cuts: [C; 4],
    pub extra: C,
    pub edge: C,
    /// The two alternative closed expressions for `h1` in terms of the
    /// Laurent coefficients.
    pub h1_alt: [C; 2],
}

fn trig_x_jet(lam: C, del: C, c1: C, v: C) -> Jet {
    let cv = (v * PI).stable_cos();
    let sv = (v * PI).stable_sin();
    let g = (cv - 1.0) / (cv - c1);
    let gc = (1.0 - c1) / ((cv - c1) * (cv - c1));
    let gcc = -2.0 * gc / (cv - c1);
    let c1d = -sv * PI;
    let c2d = -cv * PI * PI;
    [lam - del * g, -del * gc * c1d, -del * (gcc * c1d * c1d + gc * c2d)]
}

fn pick_sign<F: Fn(C) -> C>(root: C, f: F) -> C {
    let a = f(root);
    let b = f(-root);
    if a.re >= b.re {
        root
    } else {
        -root
    }
}

/// Builds the `T = inf` solution attached to `(w1, w2)` at fixed `b, u1, u2`.
pub fn reconstruct(b: f64, u1: f64, u2: f64, w1: C, w2: C) -> Result<Reconstruction> {
    let n = 2.0 * (PI * b).stable_cos();
    let p = 2.0 / (4.0 - n * n);
    let al = edge_alphas(b, u1, u2, w1, w2)?;
    let [[_, a11, a12], [_, a21, a22]] = al.alpha;
    let (c1, s1) = ((w1 * PI).stable_cos(), (w1 * PI).stable_sin());
    let r1 = (a12 / p).sqrt();
    // delta (1 - cos pi w1) > 0 fixes the branch of R1.
    let r1 = pick_sign(r1, |r| r * PI * s1 / (c1 - 1.0) * (1.0 - c1));
    let del = r1 * PI * s1 / (c1 - 1.0);
    let x0 = a11 / (p * r1);
    let lam = x0 + del + del * (c1 - 1.0) * c1 / (2.0 * s1 * s1);
    let [xx, x1, x2d] = trig_x_jet(lam, del, c1, w2);
    let x2 = x2d / 2.0;
    let a_sq = xx / x1 * (a21 / a22 + x2 / x1);
    let a = a_sq.sqrt();
    let h1 = a / ((a_sq - 1.0) * xx);
    let r2 = (a22 / p).sqrt();
    let k = (a_sq - 1.0) * (a_sq - 1.0) * h1 * x1;
    let r2 = pick_sign(r2, |r| 1.0 / (k * r));
    let h2 = 1.0 / (k * r2);
    let s1m = |x: C| {
        let (ar, h1r, h2r) = (a.re, h1.re, h2.re);
        s1_map(x, ar, h1r, h2r)
    };
    let g1p = lam - del;
    let g1m = lam - 2.0 * del / (1.0 + c1);
    let g2m = s1m(lam);
    let g2p = s1m(lam - del);
    let extra = extra_relation(b, &al, w1, w2);
    let edge = edge_coefficient(b, &al, w1, w2);

    // Alternative closed expressions for h1.
    let sq4 = (4.0 - n * n).sqrt();
    let (c2, s2) = ((w2 * PI).stable_cos(), (w2 * PI).stable_sin());
    let q12 = PI * PI * a12 / 2.0;
    let q22 = PI * PI * a22 / 2.0;
    let num_a = q22 * (c2 * c2 + c2 * c1 - 2.0) + PI * a21 * s2 * (c1 - c2);
    let h1_a = (c1 - c2) / (2.0 * sq4 * a * (1.0 - a_sq) * s1 * s2 * s2) * num_a / (q22 * q12.sqrt());
    let den_b = -q12 * (c1 * c1 + c1 * c2 - 2.0) + PI * a11 * s1 * (c1 - c2);
    let h1_b = 2.0 / sq4 * a / (1.0 - a_sq) * (c1 - c2) * s1 * q12.sqrt() / den_b;

    Ok(Reconstruction {
        alphas: al,
        lam,
        del,
        a,
        h1,
        h2,
        cuts: [g1m, g1p, g2m, g2p],
        extra,
        edge,
        h1_alt: [h1_a, h1_b],
    })
}

fn extra_re(b: f64, r: f64, w1: f64, w2: f64) -> f64 {
    let (u1, u2) = (r.sqrt(), 1.0 / r.sqrt());
    let (w1, w2) = (C::new(w1, 0.0), C::new(w2, 0.0));
    match edge_alphas(b, u1, u2, w1, w2) {
        Ok(al) => extra_relation(b, &al, w1, w2).re,
        Err(_) => f64::NAN,
    }
}

/// Root `w2` of the extra relation at fixed `w1`, closest to `seed`.
fn branch_w2(b: f64, r: f64, w1: f64, seed: f64) -> Result<f64> {
    let f = |w2: f64| extra_re(b, r, w1, w2);
    let mut win = 0.02;
    while win <= 1.0 {
        let lo = (seed - win).max(1e-9);
        let hi = (seed + win).min(1.0 - 1e-9);
        let roots = scan_roots(f, lo, hi, 16, 0.0);
        if let Some(best) = roots.iter().copied().min_by(|x, y| (x - seed).abs().total_cmp(&(y - seed).abs())) {
            return Ok(best);
        }
        win *= 2.0;
    }
    Err(Error::Bracket(format!("no extra-relation root near w2 = {seed} at w1 = {w1}")))
}

fn a_of_w(b: f64, r: f64, w1: f64, w2: f64) -> Result<f64> {
    let (u1, u2) = (r.sqrt(), 1.0 / r.sqrt());
    let rec = reconstruct(b, u1, u2, C::new(w1, 0.0), C::new(w2, 0.0))?;
    Ok(rec.a.re)
}

/// Solution of the `a != 1` critical conditions.
#[derive(Clone, Copy, Debug)]
pub struct GeneralSolution {
    pub w1: f64,
    pub w2: f64,
    pub regime: Regime,
    /// Residual of the extra relation at the solution.
    pub extra_residual: f64,
}

/// Solves for `(w1, w2)` by continuation along the extra-relation branch
/// through the `a = 1` point `w1 = w2 = w1*(r)`, then root-finding `a`.
pub fn solve_w1w2_general(r: f64, a: f64, b: f64) -> Result<GeneralSolution> {
    check_positive("a", a)?;
    let ws = solve_w1_a1(r, b)?;
    if a == 1.0 {
        return Ok(GeneralSolution {
            w1: ws,
            w2: ws,
            regime: Regime::DenseGeneric,
            extra_residual: 0.0,
        });
    }
    let dir = if a > 1.0 { 1.0 } else { -1.0 };
    let h0 = 1e-3;
    let mut w1_prev = ws;
    let mut w2_prev = ws;
    let mut a_prev = 1.0;
    let mut slope = -1.0;
    let mut step: f64 = 0.01;
    let mut w1 = ws + dir * h0;
    loop {
        if !(w1 > 0.0 && w1 < 1.0) {
            return Err(Error::OutOfRange {
                name: "a",
                value: a.to_string(),
                range: "reachable with real w1, w2 in (0,1)",
            });
        }
        let seed = w2_prev + slope * (w1 - w1_prev);
        let w2 = branch_w2(b, r, w1, seed)?;
        let av = a_of_w(b, r, w1, w2)?;
        if (av - a) * (a_prev - a) <= 0.0 && av.is_finite() {
            // Refine inside [w1_prev, w1] with w2 tracked from the secant line.
            let (wl, wr, w2l, w2r) = (w1_prev, w1, w2_prev, w2);
            let track = |x: f64| {
                let t = (x - wl) / (wr - wl);
                branch_w2(b, r, x, w2l + t * (w2r - w2l))
            };
            let g = |x: f64| match track(x) {
                Ok(y) => a_of_w(b, r, x, y).map(|v| v - a).unwrap_or(f64::NAN),
                Err(_) => f64::NAN,
            };
            let lo_pt = if (wl - ws).abs() < 1e-15 { ws + dir * 1e-9 } else { wl };
            let w1s = bracket_root(g, lo_pt, wr, 1e-14)?;
            let w2s = track(w1s)?;
            let (u1, u2) = (r.sqrt(), 1.0 / r.sqrt());
            let rec = reconstruct(b, u1, u2, C::new(w1s, 0.0), C::new(w2s, 0.0))?;
            let regime = if rec.edge.re > 0.0 {
                Regime::DenseGeneric
            } else {
                Regime::InvalidPositivity
            };
            return Ok(GeneralSolution {
                w1: w1s,
                w2: w2s,
                regime,
                extra_residual: rec.extra.norm(),
            });
        }
        slope = (w2 - w2_prev) / (w1 - w1_prev);
        w1_prev = w1;
        w2_prev = w2;
        a_prev = av;
        if (av - 1.0).abs() > 0.0 {
            step = (step * 1.5).min(0.02);
        }
        w1 += dir * step;
    }
}

fn point_from_reconstruction(b: f64, u: f64, r: f64, a: f64, w1: C, w2: C, regime: Regime) -> Result<CriticalPoint> {
    let rec = reconstruct(b, u * r.sqrt(), u / r.sqrt(), w1, w2)?;
    Ok(CriticalPoint {
        b,
        a,
        u,
        r,
        w1,
        w2,
        h1: rec.h1.re,
        h2: rec.h2.re,
        g1m: rec.cuts[0].re,
        g1p: rec.cuts[1].re,
        g2m: rec.cuts[2].re,
        g2p: rec.cuts[3].re,
        lam: rec.lam.re,
        del: rec.del.re,
        regime,
    })
}

/// Critical point for general `a` (real `w1, w2` branch).
pub fn critical_point_general(u: f64, r: f64, a: f64, b: f64) -> Result<CriticalPoint> {
    check_positive("u", u)?;
    if a == 1.0 {
        return critical_point_a1(u, r, b);
    }
    let sol = solve_w1w2_general(r, a, b)?;
    point_from_reconstruction(b, u, r, a, C::new(sol.w1, 0.0), C::new(sol.w2, 0.0), sol.regime)
}

// -------------------------------------------------- symmetric bending model

/// Bending weight `a` as a function of `w1` on the symmetric line `r = 1`.
pub fn a_of_w1_symmetric(b: f64, w: C) -> C {
    let tp = 2.0 * PI;
    let num = b * (w * tp).stable_sin() * ((w * tp * b).stable_cos() + 2.0) - (w * tp * b).stable_sin() * ((w * tp).stable_cos() + 2.0);
    let s = (w * PI).stable_sin();
    let den = s * s * (b * (w * tp).stable_sin() - (w * tp * b).stable_sin());
    num / den
}

/// `H = (2 - n)(1 - a^2)^2 h^2 u` on the symmetric line, as a function of
/// `w1`, read off the reconstructed solution.
pub fn h_value_symmetric(b: f64, w: C) -> Result<f64> {
    let rec = reconstruct(b, 1.0, 1.0, w, C::new(1.0, 0.0) - w)?;
    let n = 2.0 * (PI * b).stable_cos();
    Ok(((2.0 - n) * (rec.a * rec.a - 1.0).powi(2) * rec.h1 * rec.h1).re)
}

/// Edge coefficient along the symmetric line `w2 = 1 - w1`; it changes sign
/// at `w1_max`.
pub fn edge_coefficient_symmetric(b: f64, w: f64) -> f64 {
    let w1 = C::new(w, 0.0);
    reconstruct(b, 1.0, 1.0, w1, C::new(1.0, 0.0) - w1).map_or(f64::NAN, |r| r.edge.re)
}

/// `(w1_max, a_max)`; `(1, inf)` at `b = 1/2`.
pub fn a_max(b: f64) -> Result<(f64, f64)> {
    check_b(b)?;
    if (b - 0.5).abs() < 1e-12 {
        return Ok((1.0, f64::INFINITY));
    }
    let roots = scan_roots(|w| edge_coefficient_symmetric(b, w), 0.5 + 1e-4, 1.0 - 1e-6, 400, 0.0);
    let w = roots
        .first()
        .copied()
        .ok_or_else(|| Error::Bracket(format!("no positivity edge in (1/2, 1) at b = {b}")))?;
    Ok((w, a_of_w1_symmetric(b, C::new(w, 0.0)).re))
}

/// Solves `a_of_w1_symmetric(w1) = a` on the real branch `(0,1)` or on the
/// imaginary branch `w1 = i y`.
pub fn symmetric_w1(a: f64, b: f64) -> Result<C> {
    check_positive("a", a)?;
    check_b(b)?;
    if a == 1.0 {
        return Ok(C::new(0.5, 0.0));
    }
    let threshold = 0.4 * (1.0 + b * b);
    if a >= threshold {
        let f = |w: f64| a_of_w1_symmetric(b, C::new(w, 0.0)).re - a;
        let roots = scan_roots(f, 1e-3, 1.0 - 1e-9, 2000, 0.0);
        roots
            .first()
            .map(|w| C::new(*w, 0.0))
            .ok_or_else(|| Error::Bracket(format!("no real w1 for a = {a}")))
    } else {
        let f = |y: f64| a_of_w1_symmetric(b, C::new(0.0, y)).re - a;
        let mut hi = 1.0;
        while f(hi) > 0.0 && hi < 64.0 {
            hi *= 2.0;
        }
        Ok(C::new(0.0, bracket_root(f, 1e-3, hi, 0.0)?))
    }
}

/// The symmetric (`r = 1`) fully packed model with bending weight `a`.
pub fn symmetric_bending(a: f64, b: f64, u: f64) -> Result<CriticalPoint> {
    check_positive("u", u)?;
    let n = 2.0 * (PI * b).stable_cos();
    if (a - 1.0).abs() < 1e-12 {
        return critical_point_a1(u, 1.0, b);
    }
    let w1 = symmetric_w1(a, b)?;
    let big_h = h_value_symmetric(b, w1)?;
    let h = big_h.sqrt() / ((2.0 - n).sqrt() * (a * a - 1.0).abs() * u.sqrt());
    let (_, amax) = a_max(b)?;
    let regime = if (a - amax).abs() <= 1e-9 * amax {
        Regime::DiluteBoundary
    } else if a > amax {
        Regime::InvalidPositivity
    } else {
        Regime::DenseGeneric
    };
    let w2 = C::new(1.0, 0.0) - w1;
    let mut cp = match point_from_reconstruction(b, u, 1.0, a, w1, w2, regime) {
        Ok(cp) => cp,
        Err(_) => CriticalPoint {
            b,
            a,
            u,
            r: 1.0,
            w1,
            w2,
            h1: h,
            h2: h,
            g1m: f64::NAN,
            g1p: f64::NAN,
            g2m: f64::NAN,
            g2p: f64::NAN,
            lam: f64::NAN,
            del: f64::NAN,
            regime,
        },
    };
    cp.h1 = h;
    cp.h2 = h;
    Ok(cp)
}

// ------------------------------------------------------------------ Ising

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IsingCritical {
    pub a: f64,
    pub h_nongeneric: f64,
    pub h_generic: f64,
    pub p_nongeneric: f64,
    pub p_generic: f64,
    /// Largest residual of the two defining equations over both branches.
    pub residual: f64,
}

fn ising_equations(a: f64, h: f64, p: f64) -> [f64; 2] {
    let hp = h * p;
    let e1 = 1.0 + 3.0 * h * h * p.powi(3) + a * a * p / (1.0 - 3.0 * hp).powi(2) - p;
    let e2 = 9.0 * h * h * p * p + a * a * (1.0 + 3.0 * hp) / (1.0 - 3.0 * hp).powi(3) - 1.0;
    [e1, e2]
}

/// Critical values of `H = (1-a^2)^2 h^2 u` for the `n = 1` model seen as an
/// Ising model on tetravalent maps.
pub fn ising_critical(a: f64) -> IsingCritical {
    let sa = a.sqrt();
    let h_ng = 2.0 / 9.0 * (1.0 - 3.0 * a + 2.0 * a * sa);
    let h_g = (3.0 * a * a - 8.0) / 36.0;
    let hp_ng = (1.0 - sa) / 3.0;
    let p_ng = 1.0 / (1.0 - a - 3.0 * hp_ng * hp_ng);
    let p_g = 12.0 / (8.0 - 3.0 * a * a);
    let mut residual: f64 = 0.0;
    for (h, p) in [(h_ng, p_ng), (h_g, p_g)] {
        if p.is_finite() {
            for e in ising_equations(a, h, p) {
                residual = residual.max(e.abs() / p.abs().max(1.0));
            }
        }
    }
    IsingCritical {
        a,
        h_nongeneric: h_ng,
        h_generic: h_g,
        p_nongeneric: p_ng,
        p_generic: p_g,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_values() {
        assert_eq!(kappa_b(0.3, 0.0), 0.0);
        assert!((kappa_b(0.3, 1.0) - (0.3 * PI).sin()).abs() < 1e-15);
        assert!((kappa_b(0.5, 0.5) - 2f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn w1_a1_reciprocity_and_ratio() {
        for &b in &[0.1, 0.3, 0.45] {
            assert_eq!(solve_w1_a1(1.0, b).unwrap(), 0.5);
            for &r in &[2.0, 5.0, 10.0] {
                let w = solve_w1_a1(r, b).unwrap();
                let wi = solve_w1_a1(1.0 / r, b).unwrap();
                assert!((w + wi - 1.0).abs() < 1e-12);
                assert!((kappa_b(b, w) / kappa_b(b, 1.0 - w) - r).abs() < 1e-12 * r);
            }
        }
    }

    #[test]
    fn symmetric_closed_form() {
        let cp = critical_point_a1(1.0, 1.0, 1.0 / 3.0).unwrap();
        let h = 1.0 / (2.0 * 6f64.sqrt());
        assert!((cp.h1 - h).abs() < 1e-12 && (cp.h2 - h).abs() < 1e-12);
        assert!((h - 0.2041241).abs() < 1e-7);
    }

    #[test]
    fn a1_point_satisfies_merged_edge() {
        for &(r, b) in &[(1.0, 0.3), (3.0, 0.4), (0.2, 0.15)] {
            let cp = critical_point_a1(1.3, r, b).unwrap();
            // s2(g2p) = g1p at T = inf, s2(y) = (1 - h2 y)/h1.
            let s2p = (1.0 - cp.h2 * cp.g2p) / cp.h1;
            assert!((s2p - cp.g1p).abs() < 1e-12, "{s2p} {}", cp.g1p);
        }
    }

    #[test]
    fn potts_q1() {
        let p = potts_critical(1.0).unwrap();
        assert!((p.t_c - 1.0 / 24.0).abs() < 1e-12);
        assert!((p.j_c - 1.0).abs() < 1e-12);
        assert!((p.k_c - 2f64.ln()).abs() < 1e-12);
        assert!((p.t_selfdual - p.t_c).abs() < 1e-12);
        let p2 = potts_critical(2.0).unwrap();
        assert!((p2.j_c - 2f64.sqrt()).abs() > 1e-3);
        assert!(potts_critical(4.0).is_err());
    }

    #[test]
    fn ising_branches() {
        let i4 = ising_critical(4.0);
        assert!((i4.h_nongeneric - 10.0 / 9.0).abs() < 1e-12);
        assert!((i4.h_generic - 10.0 / 9.0).abs() < 1e-12);
        assert_eq!(ising_critical(1.0).h_nongeneric, 0.0);
        for a in [0.5, 1.5, 2.0, 3.0, 3.9, 5.0] {
            assert!(ising_critical(a).residual < 1e-12, "{a}");
        }
    }

    #[test]
    fn a_max_at_n1() {
        let (w, a) = a_max(1.0 / 3.0).unwrap();
        assert!((w - 0.75).abs() < 1e-10);
        assert!((a - 4.0).abs() < 1e-8);
        assert_eq!(a_max(0.5).unwrap().1, f64::INFINITY);
    }

    #[test]
    fn symmetric_line_closed_forms_at_n1() {
        let b = 1.0 / 3.0;
        for w in [0.3, 0.65, 0.7, 0.75] {
            let c = (2.0 * PI * w / 3.0).cos();
            let a = 4.0 / (1.0 + 2.0 * c).powi(2);
            let h = 2.0 / 9.0 * (1.0 - 2.0 * c).powi(2) * (5.0 + 2.0 * c) / (1.0 + 2.0 * c).powi(3);
            assert!((a_of_w1_symmetric(b, C::new(w, 0.0)).re - a).abs() < 1e-12);
            assert!((h_value_symmetric(b, C::new(w, 0.0)).unwrap() - h).abs() < 1e-12);
        }
    }

    #[test]
    fn extra_relation_on_symmetric_line() {
        for &b in &[0.2, 1.0 / 3.0, 0.4] {
            for w in [0.3, 0.55, 0.7] {
                let (w1, w2) = (C::new(w, 0.0), C::new(1.0 - w, 0.0));
                let rec = reconstruct(b, 1.0, 1.0, w1, w2).unwrap();
                assert!(rec.extra.norm() < 1e-10, "{b} {w} {}", rec.extra);
                let a = a_of_w1_symmetric(b, w1).re;
                assert!((rec.a.re - a).abs() < 1e-9, "{b} {w}: {} vs {a}", rec.a);
                let n = 2.0 * (PI * b).cos();
                let big_h = h_value_symmetric(b, w1).unwrap();
                let h = big_h.sqrt() / ((2.0 - n).sqrt() * (a * a - 1.0).abs());
                assert!((rec.h1.re - h).abs() < 1e-9 && (rec.h2.re - rec.h1.re).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn edge_coefficient_vanishes_at_a_max() {
        let b = 1.0 / 3.0;
        let edge = |w: f64| reconstruct(b, 1.0, 1.0, C::new(w, 0.0), C::new(1.0 - w, 0.0)).unwrap().edge.re;
        assert!(edge(0.6) > 0.0);
        assert!(edge(0.74) > 0.0);
        assert!(edge(0.76) < 0.0);
        assert!(edge(0.75).abs() < 1e-10);
    }

    #[test]
    fn symmetric_line_closed_forms_at_n0() {
        for w in [0.3, 0.6, 0.7] {
            let c = (PI * w).cos();
            let wc = C::new(w, 0.0);
            assert!((a_of_w1_symmetric(0.5, wc).re - 1.0 / (1.0 + c)).abs() < 1e-12);
            let h = 0.5 * (c / (1.0 + c)).powi(2);
            assert!((h_value_symmetric(0.5, wc).unwrap() - h).abs() < 1e-12);
        }
    }

    #[test]
    fn general_solver_is_continuous_at_a1() {
        let (b, r) = (0.4, 2.0);
        let cp1 = critical_point_a1(1.0, r, b).unwrap();
        let lo = critical_point_general(1.0, r, 1.0 - 1e-4, b).unwrap();
        let hi = critical_point_general(1.0, r, 1.0 + 1e-4, b).unwrap();
        for (x, y, z) in [
            (lo.h1, hi.h1, cp1.h1),
            (lo.h2, hi.h2, cp1.h2),
            (lo.g1p, hi.g1p, cp1.g1p),
            (lo.g1m, hi.g1m, cp1.g1m),
            (lo.g2p, hi.g2p, cp1.g2p),
            (lo.g2m, hi.g2m, cp1.g2m),
        ] {
            assert!(((x + y) / 2.0 - z).abs() < 1e-8, "{x} {y} {z}");
        }
    }

    #[test]
    fn general_solution_satisfies_its_conditions() {
        let (b, r, a) = (0.3, 1.5, 1.7);
        let sol = solve_w1w2_general(r, a, b).unwrap();
        assert!(sol.extra_residual < 1e-10);
        let cp = critical_point_general(0.7, r, a, b).unwrap();
        assert!((cp.a - a).abs() < 1e-12);
        let rec = reconstruct(b, cp.u1(), cp.u2(), cp.w1, cp.w2).unwrap();
        assert!((rec.a.re - a).abs() < 1e-9);
        // Both alternative closed expressions give h1 up to the branch sign.
        for alt in rec.h1_alt {
            assert!((alt.norm() - cp.h1).abs() < 1e-9 * cp.h1);
        }
        // s2(g2p) = g1p, s2(g2m) = x(0).
        let s2 = |y: f64| crate::elliptic::s2_map(C::new(y, 0.0), a, cp.h1, cp.h2).re;
        assert!((s2(cp.g2p) - cp.g1p).abs() < 1e-9);
        assert!((s2(cp.g2m) - cp.lam).abs() < 1e-9);
    }

    #[test]
    fn color_exchange() {
        let (b, a, r) = (0.35, 1.4, 3.0);
        let p = critical_point_general(1.2, r, a, b).unwrap();
        let q = critical_point_general(1.2, 1.0 / r, a, b).unwrap();
        assert!((p.h1 - q.h2).abs() < 1e-9 && (p.h2 - q.h1).abs() < 1e-9);
        assert!((p.w1.re + q.w2.re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn approaches_n0_limit() {
        let b = 0.4999;
        for (a, r) in [(1.0, 2.0), (1.5, 2.0), (0.8, 0.5), (2.0, 1.0)] {
            let (w1, w2) = w_pair_n0(a, r);
            let (h1, h2) = h_pair_n0(1.0, r, a);
            let cp = critical_point_general(1.0, r, a, b).unwrap();
            assert!((cp.w1.re - w1).abs() < 1e-3 && (cp.w2.re - w2).abs() < 1e-3);
            assert!((cp.h1 - h1).abs() < 1e-3 && (cp.h2 - h2).abs() < 1e-3);
            let (u1, u2) = (r.sqrt(), 1.0 / r.sqrt());
            assert!(critical_line_n0(u1, u2, a, h1, h2).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_bending_matches_ising() {
        for a in [0.3, 0.5, 1.5, 2.0, 3.0, 3.9] {
            let cp = symmetric_bending(a, 1.0 / 3.0, 1.0).unwrap();
            let big_h = (1.0 - a * a).powi(2) * cp.h1 * cp.h1;
            assert!((big_h - ising_critical(a).h_nongeneric).abs() < 1e-10, "{a}");
        }
        assert!(symmetric_bending(0.3, 1.0 / 3.0, 1.0).unwrap().w1.re == 0.0);
        assert_eq!(symmetric_bending(4.5, 1.0 / 3.0, 1.0).unwrap().regime, Regime::InvalidPositivity);
    }

    #[test]
    fn n0_closed_forms() {
        let (h1, h2) = h_pair_n0_a1(1.0, 1.0);
        assert!((h1 - 0.25).abs() < 1e-15 && (h2 - 0.25).abs() < 1e-15);
        assert_eq!(cuts_n0(1.0, 1.0), [-2.0, 2.0, -2.0, 2.0]);
        for r in [0.5, 1.0, 3.0] {
            let (h1, h2) = h_pair_n0_a1(1.0, r);
            assert!(critical_line_n0(r.sqrt(), 1.0 / r.sqrt(), 1.0, h1, h2).abs() < 1e-12);
            let w = solve_w1_a1(r, 0.5).unwrap();
            assert!(((PI * w / 2.0).tan().powi(3) - r).abs() < 1e-10 * r);
        }
    }
}
