//! Jacobi theta function, the pseudo-periodic kernel `zeta_b` and the two-cut
//! elliptic change of variable `x(v)`.

use crate::error::{out_of_range, Error, Result};
use crate::numeric::{complex_newton, tanh_sinh, QuadPoint};
use num_complex::Complex64 as C;
use std::f64::consts::PI;

const I: C = C { re: 0.0, im: 1.0 };

/// Threshold above which the half-period is reported as effectively infinite.
pub const T_EFFECTIVELY_INFINITE: f64 = 12.0;

/// `cot z` and `csc^2 z`, stable for large `|Im z|`.
fn cot_csc2(z: C) -> (C, C) {
    if z.im >= 0.0 {
        let e = (2.0 * I * z).exp();
        let d = e - 1.0;
        (I * (e + 1.0) / d, -4.0 * e / (d * d))
    } else {
        let f = (-2.0 * I * z).exp();
        let d = 1.0 - f;
        (I * (1.0 + f) / d, -4.0 * f / (d * d))
    }
}

/// Scaled theta series `sum_n (-1)^n q^{n(n+1)} sin((2n+1) pi z)` and its first
/// three derivatives. With `q = 0` it is exactly `sin(pi z)`.
#[derive(Clone, Copy, Debug)]
pub struct ThetaHat {
    q: f64,
}

impl ThetaHat {
    pub fn new(q: f64) -> Self {
        ThetaHat { q }
    }

    pub fn nome(&self) -> f64 {
        self.q
    }

    pub fn derivs(&self, z: C) -> [C; 4] {
        let mut out = [C::new(0.0, 0.0); 4];
        let envelope = (PI * z.im.abs()).exp();
        let mut n = 0usize;
        loop {
            let k = (2 * n + 1) as f64;
            let weight = if n == 0 { 1.0 } else { self.q.powi((n * (n + 1)) as i32) };
            if n > 0 && (weight == 0.0 || weight * (k * PI * z.im.abs()).exp() * k.powi(3) < 1e-18 * envelope) {
                break;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let arg = k * PI * z;
            let (s, c) = (arg.sin(), arg.cos());
            let kp = k * PI;
            out[0] += sign * weight * s;
            out[1] += sign * weight * kp * c;
            out[2] -= sign * weight * kp * kp * s;
            out[3] -= sign * weight * kp * kp * kp * c;
            n += 1;
            if n > 200 {
                break;
            }
        }
        out
    }

    pub fn eval(&self, z: C) -> C {
        self.derivs(z)[0]
    }
}

/// Jacobi `theta_1(v | iT)` with nome `q = e^{-pi T}`.
pub fn theta1(v: C, t: f64) -> Result<C> {
    Ok(theta1_derivatives(v, t)?[0])
}

/// `theta_1(v | iT)` and its first three `v`-derivatives.
pub fn theta1_derivatives(v: C, t: f64) -> Result<[C; 4]> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(out_of_range("T", t, "(0, inf)"));
    }
    let q = (-PI * t).exp();
    let pre = 2.0 * (-PI * t / 4.0).exp();
    let d = ThetaHat::new(q).derivs(v);
    Ok(d.map(|x| x * pre))
}

/// The kernel `zeta_b` on the lattice `Z + 2iT Z`: simple poles of residue 1 at
/// the lattice points, `zeta_b(v+1) = e^{i pi b} zeta_b(v)`, `zeta_b(v+2iT) = zeta_b(v)`.
///
/// Evaluated as `e^{i pi b v} S(v)` with `S` a rapidly convergent Lambert-type
/// sum; `T = inf` gives the trigonometric form exactly.
#[derive(Clone, Debug)]
pub struct ZetaB {
    b: f64,
    t: f64,
    coth: f64,
    // (rho1/(1-rho1), rho2/(1-rho2)) for m = 1, 2, ...
    lambert: Vec<(f64, f64)>,
}

impl ZetaB {
    pub fn new(b: f64, t: f64) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return Err(out_of_range("b", b, "(0, 1)"));
        }
        if !(t > 0.0) {
            return Err(out_of_range("T", t, "(0, inf]"));
        }
        let mut lambert = Vec::new();
        let coth = if t.is_finite() {
            let mut m = 1usize;
            loop {
                let mf = m as f64;
                let r1 = (-4.0 * PI * t * mf - 2.0 * PI * b * t).exp();
                let r2 = (-4.0 * PI * t * mf + 2.0 * PI * b * t).exp();
                lambert.push((r1 / (1.0 - r1), r2 / (1.0 - r2)));
                // Largest reachable term after reduction to |Im v| <= T.
                let size = (-2.0 * PI * t * mf + 2.0 * PI * b * t).exp() * (2.0 * PI * mf).powi(2);
                if size < 1e-19 || m >= 20000 {
                    break;
                }
                m += 1;
            }
            1.0 / (PI * b * t).tanh()
        } else {
            1.0
        };
        Ok(ZetaB { b, t, coth, lambert })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eval(&self, v: C) -> C {
        self.derivs(v)[0]
    }

    /// `zeta_b`, `zeta_b'`, `zeta_b''`. Non-finite exactly on the pole lattice.
    pub fn derivs(&self, v: C) -> [C; 3] {
        let k = (v.re + 0.5).floor();
        let mut v0 = v - k;
        if self.t.is_finite() {
            let j = (v0.im / (2.0 * self.t)).round();
            v0 -= I * (2.0 * self.t * j);
        }
        if v0.norm() == 0.0 {
            let inf = C::new(f64::INFINITY, f64::INFINITY);
            return [inf; 3];
        }
        let factor = (I * (PI * self.b * k)).exp();
        let (cot, csc2) = cot_csc2(PI * v0);
        let mut s0 = PI * cot - I * (PI * self.coth);
        let mut s1 = -PI * PI * csc2;
        let mut s2 = 2.0 * PI.powi(3) * csc2 * cot;
        if !self.lambert.is_empty() {
            let e = (2.0 * PI * I * v0).exp();
            let einv = 1.0 / e;
            let (mut em, mut eminv) = (C::new(1.0, 0.0), C::new(1.0, 0.0));
            let (mut a0, mut a1, mut a2) = (C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0));
            for (m, &(c1, c2)) in self.lambert.iter().enumerate() {
                em *= e;
                eminv *= einv;
                let km = 2.0 * PI * I * (m + 1) as f64;
                let p = em * c1;
                let n = eminv * c2;
                a0 += p - n;
                a1 += km * (p + n);
                a2 += km * km * (p - n);
            }
            let pref = -2.0 * PI * I;
            s0 += pref * a0;
            s1 += pref * a1;
            s2 += pref * a2;
        }
        let ib = I * (PI * self.b);
        let e = (ib * v0).exp();
        let z0 = e * s0;
        let z1 = ib * z0 + e * s1;
        let z2 = ib * ib * z0 + 2.0 * ib * e * s1 + e * s2;
        [z0 * factor, z1 * factor, z2 * factor]
    }
}

/// One-shot `zeta_b(v)`; `t = f64::INFINITY` selects the trigonometric form.
pub fn zeta_b(v: C, b: f64, t: f64) -> Result<C> {
    Ok(ZetaB::new(b, t)?.eval(v))
}

/// `s1(x) = (1 - a h1 x) / (a h2 + (1 - a^2) h1 h2 x)`.
pub fn s1_map(x: C, a: f64, h1: f64, h2: f64) -> C {
    (1.0 - a * h1 * x) / (a * h2 + (1.0 - a * a) * h1 * h2 * x)
}

/// `s2`: `s1` with the colors exchanged; the inverse of `s1`.
pub fn s2_map(y: C, a: f64, h1: f64, h2: f64) -> C {
    s1_map(y, a, h2, h1)
}

/// `s2(inf) = a / ((a^2 - 1) h1)`, `None` when `a = 1`.
pub fn s2_at_infinity(a: f64, h1: f64) -> Option<f64> {
    if a == 1.0 {
        None
    } else {
        Some(a / ((a * a - 1.0) * h1))
    }
}

/// Which segment of the real projective line a point of the frame lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    D1,
    C1,
    D2,
    C2,
}

/// The parametrization of the two-sheeted spectral curve by the rectangle
/// `[0,1] x [-T,T]`: `x(v) = lambda - delta Phi(v)`.
#[derive(Clone, Debug)]
pub struct EllipticFrame {
    pub g1m: f64,
    pub g1p: f64,
    pub g2m: f64,
    pub g2p: f64,
    /// `s2(g2m)` and `s2(g2p)`.
    pub sigma_m: f64,
    pub sigma_p: f64,
    pub c: f64,
    pub t: f64,
    pub w1: C,
    pub w2: C,
    pub sign_choice: i8,
    pub a: f64,
    pub h1: f64,
    pub h2: f64,
    pub lambda: f64,
    pub delta: f64,
    /// Moebius coordinate `eta = 1/(xi - pole)` used by the quadrature.
    pole: f64,
    etas: [f64; 4],
    d2_integral: f64,
    theta: ThetaHat,
}

impl EllipticFrame {
    pub fn effectively_infinite(&self) -> bool {
        self.t > T_EFFECTIVELY_INFINITE
    }

    pub fn nome(&self) -> f64 {
        self.theta.nome()
    }

    pub fn s2_infinity(&self) -> Option<f64> {
        s2_at_infinity(self.a, self.h1)
    }

    pub fn s1(&self, x: C) -> C {
        s1_map(x, self.a, self.h1, self.h2)
    }

    pub fn s2(&self, y: C) -> C {
        s2_map(y, self.a, self.h1, self.h2)
    }

    /// Trigonometric frame (`T = inf`) with `x(0) = lambda`, `x(1) = lambda - 2 delta/(1 + cos pi w1)`
    /// and merged inner edges `lambda - delta`. `w2` is taken as given.
    pub fn trigonometric(lambda: f64, delta: f64, w1: C, w2: C, a: f64, h1: f64, h2: f64) -> Result<Self> {
        let c1 = (PI * w1).cos();
        let g1p = lambda - delta;
        let g1m = (lambda - 2.0 * delta / (1.0 + c1)).re;
        let g2m = s1_map(C::new(lambda, 0.0), a, h1, h2).re;
        let g2p = s1_map(C::new(lambda - delta, 0.0), a, h1, h2).re;
        let mut f = EllipticFrame {
            g1m,
            g1p,
            g2m: g2m.min(g2p),
            g2p: g2m.max(g2p),
            sigma_m: lambda,
            sigma_p: lambda - delta,
            c: f64::NAN,
            t: f64::INFINITY,
            w1,
            w2,
            sign_choice: 1,
            a,
            h1,
            h2,
            lambda,
            delta,
            pole: f64::NAN,
            etas: [f64::NAN; 4],
            d2_integral: f64::NAN,
            theta: ThetaHat::new(0.0),
        };
        // dv/dx = c / sqrt(P) on D2, sampled at v = 1/2.
        let vh = C::new(0.5, 0.0);
        let xh = f.x_of_v(vh).re;
        let p = (xh - g1m) * (xh - g1p).powi(2) * (xh - lambda);
        f.c = (p.abs().sqrt() / f.x_derivs(vh)[1].norm()).abs();
        f.sign_choice = if p >= 0.0 { 1 } else { -1 };
        Ok(f)
    }

    fn quartic(&self, xi: f64) -> f64 {
        (xi - self.g1m) * (xi - self.g1p) * (xi - self.sigma_m) * (xi - self.sigma_p)
    }

    /// `int dEta / sqrt(prod |E_i - eta|)` between two points of `[E1, E4]`.
    fn eta_integral(&self, lo: f64, hi: f64) -> f64 {
        let e = self.etas;
        tanh_sinh(
            |p: QuadPoint| {
                let mut prod = 1.0;
                for &ei in &e {
                    let d = if ei == lo {
                        p.from_lo
                    } else if ei == hi {
                        p.to_hi
                    } else {
                        (p.x - ei).abs()
                    };
                    prod *= d;
                }
                1.0 / prod.sqrt()
            },
            lo,
            hi,
            1e-14,
        )
        .value
    }

    fn eta_of(&self, xi: f64) -> f64 {
        if xi.is_infinite() {
            0.0
        } else {
            1.0 / (xi - self.pole)
        }
    }

    /// `v(xi)` for real `xi` on `D2` (real values in `[0,1]`) or `C2` (`v = i t`,
    /// `t` in `[0,T]`, the `+i0` side), by direct quadrature.
    pub fn v_of_x_quadrature(&self, xi: f64) -> Result<C> {
        if !self.t.is_finite() {
            return Err(Error::InvalidCuts("quadrature needs a finite-T frame".into()));
        }
        let eta = self.eta_of(xi);
        let [_, e2, e3, e4] = self.etas;
        if eta >= e2 && eta <= e3 {
            Ok(C::new(self.eta_integral(eta, e3) / self.d2_integral, 0.0))
        } else if eta > e3 && eta <= e4 {
            let full = self.eta_integral(e3, e4);
            Ok(C::new(0.0, self.t * self.eta_integral(e3, eta) / full))
        } else {
            Err(Error::OutOfRange {
                name: "xi",
                value: xi.to_string(),
                range: "D2 or C2",
            })
        }
    }

    /// Segment containing a real point (`inf` allowed).
    pub fn segment_of(&self, xi: f64) -> Segment {
        let eta = self.eta_of(xi);
        let [e1, e2, e3, e4] = self.etas;
        if eta >= e2 && eta <= e3 {
            Segment::D2
        } else if eta > e3 && eta <= e4 {
            Segment::C2
        } else if eta >= e1 && eta < e2 {
            Segment::C1
        } else {
            Segment::D1
        }
    }

    fn phi_derivs(&self, v: C) -> [C; 3] {
        let th = &self.theta;
        let n = th.derivs(v / 2.0);
        let m = th.derivs((v - self.w1) / 2.0);
        let p = th.derivs((v + self.w1) / 2.0);
        let num = [n[0] * n[0], n[0] * n[1], (n[1] * n[1] + n[0] * n[2]) / 2.0];
        let den = [
            m[0] * p[0],
            (m[1] * p[0] + m[0] * p[1]) / 2.0,
            (m[2] * p[0] + 2.0 * m[1] * p[1] + m[0] * p[2]) / 4.0,
        ];
        let phi = num[0] / den[0];
        let d1 = (num[1] * den[0] - num[0] * den[1]) / (den[0] * den[0]);
        let d2 = (num[2] - 2.0 * den[1] * d1 - phi * den[2]) / den[0];
        [phi, d1, d2]
    }

    /// Reduces `v` modulo the period lattice `2Z + 2iT Z` into `(-1,1] x (-T,T]`.
    pub fn reduce(&self, v: C) -> C {
        let mut re = v.re - 2.0 * ((v.re + 1.0) / 2.0).floor();
        if re <= -1.0 {
            re += 2.0;
        }
        if re > 1.0 {
            re -= 2.0;
        }
        let mut im = v.im;
        if self.t.is_finite() {
            im -= 2.0 * self.t * ((im + self.t) / (2.0 * self.t)).floor();
            if im <= -self.t {
                im += 2.0 * self.t;
            }
        }
        C::new(re, im)
    }

    /// Representative on the physical sheet: `Re v` in `[0,1]`, `Im v` in `(-T,T]`.
    pub fn canonical(&self, v: C) -> C {
        let mut r = self.reduce(v);
        if r.re < 0.0 {
            r = self.reduce(-r);
        }
        r
    }

    pub fn x_of_v(&self, v: C) -> C {
        self.x_derivs(v)[0]
    }

    /// `x`, `x'`, `x''` at `v`.
    pub fn x_derivs(&self, v: C) -> [C; 3] {
        let r = self.reduce(v);
        let [phi, d1, d2] = self.phi_derivs(r);
        [self.lambda - self.delta * phi, -self.delta * d1, -self.delta * d2]
    }

    /// Laurent data of `x` at `w1`: `x = R1/(v - w1) + x0 + O(v - w1)`.
    pub fn laurent_w1(&self) -> (C, C) {
        let th = &self.theta;
        let w = self.w1;
        let n = th.derivs(w / 2.0);
        let p = th.derivs(w);
        let t1 = th.derivs(C::new(0.0, 0.0))[1];
        let g = n[0] * n[0] / p[0];
        let gp = (n[0] * n[1] * p[0] - n[0] * n[0] * p[1] / 2.0) / (p[0] * p[0]);
        let r1 = -2.0 * self.delta * g / t1;
        let x0 = self.lambda - 2.0 * self.delta * gp / t1;
        (r1, x0)
    }

    /// Laurent data of `y = s1(x(v))` at `w2` (`a != 1`): `y = R2/(v - w2) + y0 + ...`.
    pub fn laurent_w2(&self) -> Option<(C, C)> {
        let big_x = self.s2_infinity()?;
        let [_, x1, x2h] = self.x_derivs(self.w2);
        let x2 = x2h / 2.0;
        let (a, h1, h2) = (self.a, self.h1, self.h2);
        let k = (1.0 - a * a) * h1 * h2;
        let nx = 1.0 - a * h1 * big_x;
        let r2 = nx / (k * x1);
        let y0 = -r2 * x2 / x1 - a * h1 / k;
        Some((r2, y0))
    }

    /// Inverse of `x` on the physical sheet.
    pub fn v_of_x(&self, target: C) -> Result<C> {
        let tol = 1e-13 * target.norm().max(1.0);
        let g = |v: C| {
            let d = self.x_derivs(v);
            (d[0] - target, d[1])
        };
        let mut seeds = Vec::new();
        let (r1, x0) = self.laurent_w1();
        if (target - x0).norm() > 1e-12 {
            seeds.push(self.w1 + r1 / (target - x0));
        }
        let tmax = if self.t.is_finite() { self.t } else { 3.0 };
        let mut grid: Vec<(f64, C)> = Vec::new();
        for i in 0..=20 {
            for j in 0..=20 {
                let v = C::new(0.025 + 0.95 * i as f64 / 20.0, tmax * (-0.95 + 1.9 * j as f64 / 20.0));
                let x = self.x_of_v(v);
                let dist = (x - target).norm() / (1.0 + x.norm());
                if dist.is_finite() {
                    grid.push((dist, v));
                }
            }
        }
        grid.sort_by(|a, b| a.0.total_cmp(&b.0));
        seeds.extend(grid.iter().take(6).map(|s| s.1));
        for seed in seeds {
            if let Some(v) = complex_newton(g, seed, tol, 80) {
                let v = self.canonical(v);
                if (self.x_of_v(v) - target).norm() <= 1e-9 * target.norm().max(1.0) {
                    return Ok(v);
                }
            }
        }
        Err(Error::NonConvergence {
            what: "inversion of x(v)",
            residual: vec![target.re, target.im],
        })
    }

    /// Residuals of `x(iT) = s2(g2p)`, `x(1+iT) = g1p`, `x(1) = g1m` and
    /// `x(w2) = s2(inf)`.
    pub fn consistency(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if self.t.is_finite() {
            let it = C::new(0.0, self.t);
            out.push((self.x_of_v(it) - self.sigma_p).norm());
            out.push((self.x_of_v(it + 1.0) - self.g1p).norm());
        }
        out.push((self.x_of_v(C::new(1.0, 0.0)) - self.g1m).norm());
        if let Some(x) = self.s2_infinity() {
            out.push(((self.x_of_v(self.w2) - x) / x.abs().max(1.0)).norm());
        }
        out
    }
}

/// Builds the frame of a pair of cuts `[g1m, g1p]` and `[g2m, g2p]` by
/// quadrature of the quartic differential.
pub fn build_frame(g1m: f64, g1p: f64, g2m: f64, g2p: f64, a: f64, h1: f64, h2: f64) -> Result<EllipticFrame> {
    if !(g1m < g1p && g2m < g2p) {
        return Err(Error::InvalidCuts(format!(
            "endpoints out of order: [{g1m}, {g1p}], [{g2m}, {g2p}]"
        )));
    }
    if !(a > 0.0 && h1 > 0.0 && h2 > 0.0) {
        return Err(out_of_range("a, h1, h2", format!("{a}, {h1}, {h2}"), "(0, inf)"));
    }
    let sm = s2_map(C::new(g2m, 0.0), a, h1, h2).re;
    let sp = s2_map(C::new(g2p, 0.0), a, h1, h2).re;
    if !(sm.is_finite() && sp.is_finite()) {
        return Err(Error::InvalidCuts("an endpoint of the second cut maps to infinity".into()));
    }
    // A point of D1, the arc from g1p up to s2(g2p).
    let pole = if sp > g1p {
        0.5 * (g1p + sp)
    } else {
        g1p + (g1p - g1m).max(1.0)
    };
    let eta = |x: f64| 1.0 / (x - pole);
    let etas = [eta(g1p), eta(g1m), eta(sm), eta(sp)];
    if !(etas[0] < etas[1] && etas[1] < etas[2] && etas[2] < etas[3]) {
        return Err(Error::InvalidCuts(format!(
            "cut [{g1m}, {g1p}] and s2-image [{sp}, {sm}] overlap or are misordered"
        )));
    }
    let mut frame = EllipticFrame {
        g1m,
        g1p,
        g2m,
        g2p,
        sigma_m: sm,
        sigma_p: sp,
        c: 0.0,
        t: 0.0,
        w1: C::new(0.0, 0.0),
        w2: C::new(0.0, 0.0),
        sign_choice: 1,
        a,
        h1,
        h2,
        lambda: sm,
        delta: 0.0,
        pole,
        etas,
        d2_integral: 0.0,
        theta: ThetaHat::new(0.0),
    };
    let d2 = frame.eta_integral(etas[1], etas[2]);
    let c2 = frame.eta_integral(etas[2], etas[3]);
    frame.d2_integral = d2;
    frame.t = c2 / d2;
    let scale: f64 = etas.iter().map(|e| e.abs()).product::<f64>().sqrt();
    frame.c = 1.0 / (scale * d2);
    let mid_eta = 0.5 * (etas[1] + etas[2]);
    let mid = if mid_eta == 0.0 { f64::INFINITY } else { pole + 1.0 / mid_eta };
    frame.sign_choice = if mid.is_infinite() || frame.quartic(mid) >= 0.0 { 1 } else { -1 };
    frame.w1 = frame.v_of_x_quadrature(f64::INFINITY).map_err(|_| {
        Error::InvalidCuts("the point at infinity must lie on D2 or C2".into())
    })?;
    frame.w2 = match s2_at_infinity(a, h1) {
        None => frame.w1,
        Some(x) => frame
            .v_of_x_quadrature(x)
            .map_err(|_| Error::InvalidCuts("s2(inf) must lie on D2 or C2".into()))?,
    };
    frame.theta = ThetaHat::new((-PI * frame.t).exp());
    let phi1 = frame.phi_derivs(C::new(1.0, 0.0))[0].re;
    frame.delta = (frame.lambda - g1m) / phi1;
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample(rng: &mut ChaCha8Rng, t: f64) -> C {
        let span = if t.is_finite() { t } else { 2.0 };
        loop {
            let v = C::new(rng.gen_range(-1.5..1.5), rng.gen_range(-span..span));
            // Keep clear of the pole lattice.
            let r = v.re - v.re.round();
            if r.abs() > 0.05 || v.im.abs() > 0.05 {
                return v;
            }
        }
    }

    #[test]
    fn theta_is_odd_and_quasi_periodic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &t in &[0.5, 1.3, 4.0] {
            for _ in 0..20 {
                let v = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.4..0.4));
                let th = theta1(v, t).unwrap();
                assert!((theta1(-v, t).unwrap() + th).norm() < 1e-12);
                assert!((theta1(v + 1.0, t).unwrap() + th).norm() < 1e-12);
                let shifted = theta1(v + I * t, t).unwrap();
                let expect = -th * (PI * t).exp() * (-2.0 * PI * I * v).exp();
                assert!((shifted - expect).norm() < 1e-10 * expect.norm().max(1.0));
            }
            assert_eq!(theta1(C::new(0.0, 0.0), t).unwrap().norm(), 0.0);
        }
        assert!(theta1(C::new(0.1, 0.0), 0.0).is_err());
    }

    #[test]
    fn zeta_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &b in &[0.1, 1.0 / 3.0, 0.45] {
            for &t in &[0.5, 2.0, 8.0, f64::INFINITY] {
                let z = ZetaB::new(b, t).unwrap();
                let pb = (I * PI * b).exp();
                for _ in 0..100 {
                    let v = sample(&mut rng, t);
                    let zv = z.eval(v);
                    let scale = zv.norm().max(1.0);
                    assert!((z.eval(v + 1.0) - pb * zv).norm() < 1e-12 * scale);
                    if t.is_finite() {
                        assert!((z.eval(v + 2.0 * I * t) - zv).norm() < 1e-12 * scale);
                    }
                }
                let res = crate::numeric::laurent_coefficient(|v| z.eval(v), C::new(0.0, 0.0), 0.25, -1, 128);
                assert!((res - 1.0).norm() < 1e-12);
                if t >= 2.0 {
                    let eps = C::new(1e-6, 0.0);
                    assert!((eps * z.eval(eps) - 1.0).norm() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn zeta_infinite_period_is_trigonometric() {
        let b = 0.4;
        let z = ZetaB::new(b, f64::INFINITY).unwrap();
        for v in [C::new(0.3, -0.2), C::new(-0.7, 1.1), C::new(0.2, 0.0)] {
            let e = (I * PI * v).exp();
            let trig = 2.0 * I * PI * (I * PI * (b - 1.0) * v).exp() / (e - 1.0 / e);
            assert!((z.eval(v) - trig).norm() < 1e-13);
        }
    }

    #[test]
    fn zeta_derivatives_match_finite_differences() {
        let z = ZetaB::new(0.37, 1.1).unwrap();
        let h = 1e-5;
        for v in [C::new(0.31, 0.2), C::new(-0.8, -0.6), C::new(0.45, 0.0)] {
            let d = z.derivs(v);
            let fd1 = (z.eval(v + h) - z.eval(v - h)) / (2.0 * h);
            let fd2 = (z.eval(v + h) - 2.0 * d[0] + z.eval(v - h)) / (h * h);
            assert!((d[1] - fd1).norm() < 1e-7 * d[1].norm().max(1.0));
            assert!((d[2] - fd2).norm() < 1e-3 * d[2].norm().max(1.0));
        }
    }

    fn test_frame() -> EllipticFrame {
        build_frame(-0.9, 1.1, -1.0, 1.0, 1.0, 0.12, 0.1).unwrap()
    }

    #[test]
    fn frame_consistency() {
        let f = test_frame();
        assert!(f.t.is_finite() && f.t > 0.0);
        assert!(f.w1.im == 0.0 && f.w1.re > 0.0 && f.w1.re < 1.0);
        assert_eq!(f.w1, f.w2);
        for r in f.consistency() {
            assert!(r < 1e-10, "{:?}", f.consistency());
        }
        let f = build_frame(-0.9, 1.1, -1.0, 1.0, 1.3, 0.12, 0.1).unwrap();
        for r in f.consistency() {
            assert!(r < 1e-10, "{:?}", f.consistency());
        }
        assert!(f.w2.re < f.w1.re);
    }

    #[test]
    fn x_is_even_and_periodic() {
        let f = test_frame();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let v = sample(&mut rng, f.t);
            let x = f.x_of_v(v);
            let s = x.norm().max(1.0);
            assert!((f.x_of_v(-v) - x).norm() < 1e-10 * s);
            assert!((f.x_of_v(v + 2.0 * I * f.t) - x).norm() < 1e-10 * s);
            assert!((f.x_of_v(v + 2.0) - x).norm() < 1e-10 * s);
        }
    }

    #[test]
    fn quadrature_and_inversion_round_trip() {
        let f = build_frame(-0.9, 1.1, -1.0, 1.0, 1.2, 0.12, 0.1).unwrap();
        let mut n = 0;
        // Real points on D2 and C2 through the quadrature.
        for xi in [-3.0, -1.5, -50.0, 40.0, 12.0] {
            if matches!(f.segment_of(xi), Segment::D2 | Segment::C2) {
                let v = f.v_of_x_quadrature(xi).unwrap();
                assert!((f.x_of_v(v) - xi).norm() < 1e-9 * xi.abs().max(1.0));
                n += 1;
            }
        }
        assert!(n >= 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let xi = C::new(rng.gen_range(-6.0..6.0), rng.gen_range(0.2..4.0));
            let v = f.v_of_x(xi).unwrap();
            assert!((f.x_of_v(v) - xi).norm() < 1e-9 * xi.norm());
            assert!(v.re >= 0.0 && v.re <= 1.0);
        }
    }

    #[test]
    fn laurent_data_matches_local_expansion() {
        let f = build_frame(-0.9, 1.1, -1.0, 1.0, 1.2, 0.12, 0.1).unwrap();
        let (r1, x0) = f.laurent_w1();
        let eps = C::new(1e-4, 1e-4);
        let x = f.x_of_v(f.w1 + eps);
        assert!((x - r1 / eps - x0).norm() < 1e-3);
        let (r2, y0) = f.laurent_w2().unwrap();
        let y = f.s1(f.x_of_v(f.w2 + eps));
        assert!((y - r2 / eps - y0).norm() < 1e-3);
    }

    #[test]
    fn near_degenerate_cuts_approach_trigonometric_frame() {
        let (a, h1, h2) = (1.0, 0.1, 0.1);
        let mut last = 0.0;
        for gap in [1e-1, 1e-3, 1e-6, 1e-12] {
            // sigma_p = s2(g2p) sits just above g1p.
            let g1p = 1.0;
            let target = g1p + gap;
            let g2p = s1_map(C::new(target, 0.0), a, h1, h2).re;
            let g2m = s1_map(C::new(9.0, 0.0), a, h1, h2).re;
            let f = build_frame(-1.2, g1p, g2m, g2p, a, h1, h2).unwrap();
            assert!(f.t > last);
            last = f.t;
            if gap == 1e-12 {
                assert!(f.effectively_infinite() || f.t > 8.0);
                let trig =
                    EllipticFrame::trigonometric(f.lambda, f.delta, f.w1, f.w2, a, h1, h2).unwrap();
                for v in [C::new(0.3, 0.1), C::new(0.8, -0.5), C::new(0.1, 1.5)] {
                    let x = f.x_of_v(v);
                    let cosv = (PI * v).cos();
                    let closed = f.lambda - f.delta * (cosv - 1.0) / (cosv - (PI * f.w1).cos());
                    assert!((x - closed).norm() < 1e-9 * x.norm().max(1.0));
                    assert!((trig.x_of_v(v) - closed).norm() < 1e-12 * x.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn overlapping_cuts_rejected() {
        // s2 image of [-1, 1] with a = 1, h = 0.5 lands on [1, 3], touching the first cut.
        assert!(matches!(
            build_frame(-2.0, 2.0, -1.0, 1.0, 1.0, 0.5, 0.5),
            Err(Error::InvalidCuts(_))
        ));
    }
}
