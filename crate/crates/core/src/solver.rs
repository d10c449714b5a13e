//! Generic-cut solution of the fully packed model: the homogeneous parts
//! `omega^{(i)}(v)` assembled from `zeta_b` blocks, spectral densities,
//! resolvents and the Newton solve of the four edge conditions.

use crate::critical::CriticalPoint;
use crate::elliptic::{build_frame, s1_map, EllipticFrame, ZetaB};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numeric::{laurent_coefficient, newton, NewtonOptions};
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::PI;

const I: C = C { re: 0.0, im: 1.0 };

/// Which Laurent basis is in use: split poles at `w1 != w2` (`a != 1`, the
/// `alpha` coefficients) or a merged pole (`a = 1`, the `beta` coefficients).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Split,
    Merged,
}

/// The building blocks of `omega` and of the densities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Z1,
    Z2,
    Delta1,
    Delta2,
}

/// The two `zeta` kernels `zeta_b` and `zeta_{1-b}` of a frame.
#[derive(Clone, Debug)]
pub struct Kernels {
    pub b: f64,
    pub zeta: ZetaB,
    pub zeta_tilde: ZetaB,
}

impl Kernels {
    pub fn new(b: f64, t: f64) -> Result<Self> {
        Ok(Kernels {
            b,
            zeta: ZetaB::new(b, t)?,
            zeta_tilde: ZetaB::new(1.0 - b, t)?,
        })
    }
}

/// Weights attached to the `sigma = +1` and `sigma = -1` arguments of each
/// kernel, for the `zeta_b` and the `zeta_{1-b}` halves.
fn block_weights(block: Block, b: f64) -> ([C; 2], [C; 2]) {
    let e = C::from_polar(1.0, PI * b);
    let one = C::new(1.0, 0.0);
    match block {
        Block::Z1 => ([one, -one], [one, -one]),
        Block::Z2 => ([e.conj(), -e], [e, -e.conj()]),
        Block::Delta1 | Block::Delta2 => {
            let s = C::new(-(PI * b).sin() / PI, 0.0);
            let t = if block == Block::Delta1 { s } else { -s };
            ([s, s], [t, t])
        }
    }
}

fn half_block(kernel: &ZetaB, weights: [C; 2], am: C, ap: C, v: C, w: C, l: usize) -> C {
    let mut out = C::new(0.0, 0.0);
    // (coefficient, sigma, tau): the argument is sigma v + tau w.
    for (coef, sigma, tau) in [(am, 1.0, -1.0), (am, -1.0, -1.0), (ap, 1.0, 1.0), (ap, -1.0, 1.0)] {
        if coef == C::new(0.0, 0.0) {
            continue;
        }
        let d = kernel.derivs(v * sigma + w * tau);
        let wt = if sigma > 0.0 { weights[0] } else { weights[1] };
        out += coef * wt * tau.powi(l as i32) * d[l];
    }
    out
}

/// `d^l/dw^l` of a block at `(v; w, A)`; `l <= 2`. Returns the `zeta_b` and
/// the `zeta_{1-b}` contributions separately.
pub fn z_block_parts(block: Block, v: C, w: C, coeffs: &[C; 4], l: usize, k: &Kernels) -> (C, C) {
    let (wb, wt) = block_weights(block, k.b);
    (
        half_block(&k.zeta, wb, coeffs[0], coeffs[1], v, w, l),
        half_block(&k.zeta_tilde, wt, coeffs[2], coeffs[3], v, w, l),
    )
}

/// `d^l/dw^l` of `Z^{(1)}`, `Z^{(2)}`, `Delta^{(1)}` or `Delta^{(2)}` at `(v; w, A)`.
pub fn z_block(block: Block, v: C, w: C, coeffs: &[C; 4], l: usize, k: &Kernels) -> C {
    let (p, q) = z_block_parts(block, v, w, coeffs, l, k);
    p + q
}

/// Coefficient vectors `A_1, A_2` (split poles).
pub fn a_vectors(b: f64) -> [[C; 4]; 2] {
    let e = C::from_polar(1.0, PI * b);
    let q = C::new(0.25, 0.0);
    [[q, q, q, q], [q * e, q * e.conj(), q * e.conj(), q * e]]
}

/// Coefficient vectors `B_1, B_2` (merged pole).
pub fn b_vectors(b: f64) -> [[C; 4]; 2] {
    let e = C::from_polar(1.0, PI * b);
    let pre = 1.0 / (4.0 * I * (PI * b).sin());
    [
        [pre * e, -pre * e.conj(), -pre * e.conj(), pre * e],
        [-pre, pre, pre, -pre],
    ]
}

/// Closed-form particular solutions of the inhomogeneous equations for the
/// fully packed potentials `V'(x) = x`.
#[derive(Clone, Copy, Debug)]
pub struct ParticularParts {
    pub n: f64,
    pub a: f64,
    pub h1: f64,
    pub h2: f64,
    pub u1: f64,
    pub u2: f64,
}

impl ParticularParts {
    pub fn new(p: &ModelParams) -> Self {
        ParticularParts {
            n: p.n,
            a: p.a,
            h1: p.h1,
            h2: p.h2,
            u1: p.u1,
            u2: p.u2,
        }
    }

    pub fn s1(&self, x: C) -> C {
        s1_map(x, self.a, self.h1, self.h2)
    }

    pub fn s1_prime(&self, x: C) -> C {
        let den = self.a * self.h2 + (1.0 - self.a * self.a) * self.h1 * self.h2 * x;
        -self.h1 * self.h2 / (den * den)
    }

    /// `s1''/(2 s1')`, identically zero at `a = 1`.
    pub fn s_ratio(&self, x: C) -> C {
        if self.a == 1.0 {
            C::new(0.0, 0.0)
        } else {
            let pole = -self.a / ((1.0 - self.a * self.a) * self.h1);
            -1.0 / (x - pole)
        }
    }

    /// `(V^{(2s)})'(x) = s1'(x) s1(x)`.
    pub fn v2s(&self, x: C) -> C {
        self.s1_prime(x) * self.s1(x)
    }

    pub fn w1(&self, x: C) -> C {
        let (n, d) = (self.n, 4.0 - self.n * self.n);
        (2.0 * x + n * self.v2s(x)) / d + n * (n * self.u1 - 2.0 * self.u2) / d * self.s_ratio(x)
    }

    pub fn w2s(&self, x: C) -> C {
        let (n, d) = (self.n, 4.0 - self.n * self.n);
        (n * x + 2.0 * self.v2s(x)) / d + n * (2.0 * self.u1 - n * self.u2) / d * self.s_ratio(x)
    }

    /// Residuals of the two inhomogeneous relations evaluated on the
    /// particular parts alone (they hold identically in `x`).
    pub fn residuals(&self, x: C) -> [C; 2] {
        let n = self.n;
        let s = self.s_ratio(x);
        [
            2.0 * self.w1(x) - n * self.w2s(x) - (x - n * self.u2 * s),
            2.0 * self.w2s(x) - n * self.w1(x) - (self.v2s(x) + n * self.u1 * s),
        ]
    }
}

/// Laurent coefficients of `omega^{(1)}, omega^{(2)}` at their poles, read off
/// the local expansion of `x(v)`.
pub fn laurent_data(p: &ModelParams, frame: &EllipticFrame) -> Result<(Basis, [[C; 3]; 2])> {
    let n = p.n;
    let d = 4.0 - n * n;
    let (r1, x0) = frame.laurent_w1();
    if p.a == 1.0 {
        let rho2 = (p.h1 / p.h2).powi(2);
        let m1 = (2.0 + n * rho2) / d;
        let n1 = n * p.h1 / (p.h2 * p.h2 * d);
        let m2 = (n + 2.0 * rho2) / d;
        let n2 = 2.0 * p.h1 / (p.h2 * p.h2 * d);
        return Ok((
            Basis::Merged,
            [
                [C::new(-p.u1, 0.0), (m1 * x0 - n1) * r1, m1 * r1 * r1],
                [C::new(-p.u2, 0.0), (m2 * x0 - n2) * r1, m2 * r1 * r1],
            ],
        ));
    }
    let pp = 2.0 / d;
    let a10 = -2.0 * (2.0 * p.u1 - n * p.u2) / d;
    let a20 = 2.0 * (n * p.u1 - 2.0 * p.u2) / d;
    let one_m = 1.0 - p.a * p.a;
    let k = 1.0 / (one_m * one_m * p.h1 * p.h2);
    let big_a = -p.a / (one_m * p.h2);
    let [_, y1, y2h] = frame.x_derivs(frame.w2);
    let y2 = y2h / 2.0;
    if !(y1.norm() > 0.0) {
        return Err(Error::InvalidCuts("x'(w2) vanishes".into()));
    }
    Ok((
        Basis::Split,
        [
            [C::new(a10, 0.0), pp * r1 * x0, pp * r1 * r1],
            [
                C::new(a20, 0.0),
                pp * (k * big_a / y1 - k * k * y2 / (y1 * y1 * y1)),
                pp * k * k / (y1 * y1),
            ],
        ],
    ))
}

/// The assembled homogeneous solution on a frame.
#[derive(Clone, Debug)]
pub struct OmegaSolution {
    pub params: ModelParams,
    pub frame: EllipticFrame,
    pub basis: Basis,
    pub coeff_vectors: [[C; 4]; 2],
    /// `alpha_{j|l}` or `beta_{j|l}`.
    pub laurent: [[C; 3]; 2],
    /// Pole positions of the two basis families (`w1, w2`, or `w1, w1`).
    pub points: [C; 2],
    pub kernels: Kernels,
    pub parts: ParticularParts,
}

/// Assembles `omega^{(1)}, omega^{(2)}` for the parameters `p` on `frame`.
pub fn assemble_omega(p: &ModelParams, frame: EllipticFrame) -> Result<OmegaSolution> {
    if !p.is_fully_packed() {
        return Err(Error::NotFullyPacked("the solver handles V'(x) = x only".into()));
    }
    if (frame.a - p.a).abs() > 1e-14 || (frame.h1 - p.h1).abs() > 1e-14 || (frame.h2 - p.h2).abs() > 1e-14 {
        return Err(Error::InvalidCuts("frame built for other weights".into()));
    }
    let (basis, laurent) = laurent_data(p, &frame)?;
    let (coeff_vectors, points) = match basis {
        Basis::Split => (a_vectors(p.b), [frame.w1, frame.w2]),
        Basis::Merged => (b_vectors(p.b), [frame.w1, frame.w1]),
    };
    let kernels = Kernels::new(p.b, frame.t)?;
    Ok(OmegaSolution {
        params: p.clone(),
        frame,
        basis,
        coeff_vectors,
        laurent,
        points,
        kernels,
        parts: ParticularParts::new(p),
    })
}

impl OmegaSolution {
    fn apply_parts(&self, block: Block, v: C) -> (C, C) {
        let mut out = (C::new(0.0, 0.0), C::new(0.0, 0.0));
        for j in 0..2 {
            for l in 0..3 {
                let c = self.laurent[j][l] / [1.0, 1.0, 2.0][l];
                let (p, q) = z_block_parts(block, v, self.points[j], &self.coeff_vectors[j], l, &self.kernels);
                out.0 += c * p;
                out.1 += c * q;
            }
        }
        out
    }

    /// `omega^{(i)}(v)` for `i = 1, 2`, anywhere in the plane.
    pub fn omega(&self, i: usize, v: C) -> C {
        let block = if i == 1 { Block::Z1 } else { Block::Z2 };
        let (p, q) = self.apply_parts(block, v);
        p + q
    }

    /// `(sum_j D_j Delta_j(v), sum_j D_j Delta~_j(v))`.
    pub fn delta_split(&self, v: C) -> (C, C) {
        self.apply_parts(Block::Delta1, v)
    }

    /// The four edge conditions at `v = 0` and `v = -iT`.
    pub fn edge_values(&self) -> [C; 4] {
        let (d0, t0) = self.delta_split(C::new(0.0, 0.0));
        if self.frame.t.is_finite() {
            let (d1, t1) = self.delta_split(C::new(0.0, -self.frame.t));
            [d0, d1, t0, t1]
        } else {
            [d0, C::new(0.0, 0.0), t0, C::new(0.0, 0.0)]
        }
    }

    /// `rho^{(1)}(x(1 - i t))` or `rho^{(2)}(s1(x(-i t)))`, `t` in `[0, T]`,
    /// together with the point of the cut where it is evaluated. Both are
    /// real up to rounding. The frame maps the upper half-plane to `Im v > 0`,
    /// so `x(1 - i t)` is reached from below and the jump carries a minus sign.
    pub fn density(&self, i: usize, t: f64) -> (C, C) {
        let v = C::new(0.0, -t);
        let (d, dt) = self.delta_split(v);
        if i == 1 {
            let [x, xp, _] = self.frame.x_derivs(v + 1.0);
            (-(d + dt) / xp, x)
        } else {
            let [x, xp, _] = self.frame.x_derivs(v);
            (-(d - dt) / (self.parts.s1_prime(x) * xp), self.parts.s1(x))
        }
    }

    /// `|rho|` just inside the four edges (`t = eps` and `t = T - eps`).
    pub fn edge_densities(&self, eps: f64) -> [f64; 4] {
        let tt = self.frame.t;
        [
            self.density(1, eps).0.norm(),
            self.density(1, tt - eps).0.norm(),
            self.density(2, eps).0.norm(),
            self.density(2, tt - eps).0.norm(),
        ]
    }

    /// `W-bar^{(i)}(x) = omega^{(i)}(v)/x'(v)` at the physical-sheet preimage of `x`.
    pub fn w_bar(&self, i: usize, x: C) -> Result<C> {
        let v = self.frame.v_of_x(x)?;
        Ok(self.omega(i, v) / self.frame.x_derivs(v)[1])
    }

    /// The resolvent `W^{(1)}(x)`.
    pub fn resolvent1(&self, x: C) -> Result<C> {
        Ok(self.parts.w1(x) + self.w_bar(1, x)?)
    }

    /// The resolvent `W^{(2)}(y)`, through `W^{(2s)}(x) = s1'(x) W^{(2)}(s1(x))`.
    pub fn resolvent2(&self, y: C) -> Result<C> {
        let x = self.frame.s2(y);
        let w2s = self.parts.w2s(x) + self.w_bar(2, x)?;
        Ok(w2s / self.parts.s1_prime(x))
    }

    fn resolvent(&self, i: usize, x: C) -> Result<C> {
        if i == 1 {
            self.resolvent1(x)
        } else {
            self.resolvent2(x)
        }
    }

    /// Centre and radius of a circle enclosing cut `i` and nothing else singular.
    fn moment_circle(&self, i: usize) -> (f64, f64) {
        let f = &self.frame;
        let (lo, hi) = if i == 1 { (f.g1m, f.g1p) } else { (f.g2m, f.g2p) };
        let mid = 0.5 * (lo + hi);
        (mid, 0.5 * (hi - lo) * 1.6 + 0.05 * mid.abs())
    }

    /// `F^{(i)}_l` for `l <= lmax`: the coefficients of `W^{(i)} = sum_l F_l / x^{l+1}`.
    pub fn moments(&self, i: usize, lmax: usize) -> Result<Vec<f64>> {
        let (c, r) = self.moment_circle(i);
        let m = 128;
        let mut samples = Vec::with_capacity(m);
        for k in 0..m {
            let z = C::new(c, 0.0) + C::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / m as f64);
            samples.push((z, self.resolvent(i, z)?));
        }
        // F_l = (1/2 pi i) \oint x^l W(x) dx on the circle.
        Ok((0..=lmax)
            .map(|l| {
                let mut acc = C::new(0.0, 0.0);
                for (z, w) in &samples {
                    let dz = I * (z - c);
                    acc += z.powu(l as u32) * w * dz;
                }
                (acc / (m as f64) / I).re
            })
            .collect())
    }

    /// `lim x W^{(i)}(x)` as `x -> inf`, i.e. `F^{(i)}_0`, by a contour
    /// integral around the cut.
    pub fn large_x_limit(&self, i: usize) -> Result<f64> {
        Ok(self.moments(i, 0)?[0])
    }

    /// Sup residuals of the two original functional equations over `samples`
    /// interior points of each cut.
    pub fn functional_residuals(&self, samples: usize) -> Result<[f64; 2]> {
        let f = &self.frame;
        let n = self.params.n;
        let mut out = [0.0f64; 2];
        if !f.t.is_finite() {
            return Ok(out);
        }
        for k in 1..=samples {
            let t = f.t * k as f64 / (samples + 1) as f64;
            // Cut 1: x = x(1 + i t), the two sides are v = 1 +- i t.
            let vp = C::new(1.0, t);
            let vm = C::new(1.0, -t);
            let [x, xpp, _] = f.x_derivs(vp);
            let xpm = f.x_derivs(vm)[1];
            let w1p = self.parts.w1(x) + self.omega(1, vp) / xpp;
            let w1m = self.parts.w1(x) + self.omega(1, vm) / xpm;
            let w2s = self.parts.w2s(x) + self.omega(2, vp) / xpp;
            let rhs = x - n * self.params.u2 * self.parts.s_ratio(x);
            let r1 = (w1p + w1m - n * w2s - rhs).norm() / (1.0 + x.norm());
            // Cut 2 seen from W^{(2)}: y = s1(x(i t)), sides v = +- i t.
            let vp = C::new(0.0, t);
            let vm = C::new(0.0, -t);
            let [x, xpp, _] = f.x_derivs(vp);
            let xpm = f.x_derivs(vm)[1];
            let sp = self.parts.s1_prime(x);
            let y = self.parts.s1(x);
            let w2p = (self.parts.w2s(x) + self.omega(2, vp) / xpp) / sp;
            let w2m = (self.parts.w2s(x) + self.omega(2, vm) / xpm) / sp;
            let w1 = self.parts.w1(x) + self.omega(1, vp) / xpp;
            // s2'(y) = 1/s1'(x) and s2''/(2 s2')(y) = -s_ratio(x)/s1'(x).
            let rhs = y + n * self.params.u1 * self.parts.s_ratio(x) / sp;
            let r2 = (w2p + w2m - n * w1 / sp - rhs).norm() / (1.0 + y.norm());
            out[0] = out[0].max(r1);
            out[1] = out[1].max(r2);
        }
        Ok(out)
    }

    /// Sup residuals of the six continuation relations at the given points:
    /// `[periodicity, parity, shift]` for `omega^{(1)}` then `omega^{(2)}`.
    pub fn continuation_residuals(&self, points: &[C]) -> [f64; 6] {
        let n = self.params.n;
        let tt = if self.frame.t.is_finite() { self.frame.t } else { 0.0 };
        let per = C::new(0.0, 2.0 * tt);
        let mut out = [0.0f64; 6];
        for &v in points {
            let o1 = self.omega(1, v);
            let o2 = self.omega(2, v);
            let scale = 1.0 + o1.norm() + o2.norm();
            let res = [
                if tt > 0.0 { (self.omega(1, v + per) - o1).norm() } else { 0.0 },
                (self.omega(1, -v) + o1).norm(),
                (o1 + self.omega(1, v - 2.0) - n * o2).norm(),
                if tt > 0.0 { (self.omega(2, v + per) - o2).norm() } else { 0.0 },
                (self.omega(2, 2.0 - v) + o2).norm(),
                (o2 + self.omega(2, v + 2.0) - n * o1).norm(),
            ];
            for (o, r) in out.iter_mut().zip(res) {
                *o = o.max(r / scale);
            }
        }
        out
    }

    /// Laurent coefficient of `omega^{(i)}` of order `(v - w_j)^{-(l+1)}`,
    /// measured by a contour integral.
    pub fn measured_laurent(&self, i: usize, j: usize, l: usize) -> C {
        let w = self.points[j];
        let rho = self.pole_radius(w);
        laurent_coefficient(|v| self.omega(i, v), w, rho, -(l as i32) - 1, 256)
    }

    fn pole_radius(&self, w: C) -> f64 {
        let mut r = [2.0 * w.norm(), (2.0 - 2.0 * w.re).abs().max(2.0 * w.im.abs()), 1.0]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if self.basis == Basis::Split {
            let (w1, w2) = (self.points[0], self.points[1]);
            r = r.min((w1 - w2).norm()).min((w1 + w2).norm()).min((2.0 - w1 - w2).norm());
        }
        if self.frame.t.is_finite() {
            r = r.min(2.0 * self.frame.t);
        }
        0.45 * r
    }

    /// Densities on `samples` points of each cut. Values strictly inside are
    /// checked for positivity.
    pub fn density_scan(&self, samples: usize) -> DensityScan {
        // On an infinite strip rho is a ratio of two quantities decaying like
        // e^{-pi (2 - b) t}; past e^{-20} of decay rounding dominates.
        let tmax = if self.frame.t.is_finite() {
            self.frame.t
        } else {
            20.0 / (PI * (2.0 - self.params.b))
        };
        let mut rows = Vec::with_capacity(samples);
        let mut min = [f64::INFINITY; 2];
        let mut imag = 0.0f64;
        for k in 0..samples {
            let t = tmax * (k as f64 + 0.5) / samples as f64;
            let (r1, x1) = self.density(1, t);
            let (r2, x2) = self.density(2, t);
            for (m, r) in min.iter_mut().zip([r1.re, r2.re]) {
                *m = m.min(r);
            }
            imag = imag.max(r1.im.abs()).max(r2.im.abs());
            rows.push(DensityRow {
                t,
                x1: x1.re,
                rho1: r1.re,
                y2: x2.re,
                rho2: r2.re,
            });
        }
        DensityScan {
            positive: min[0] > -1e-9 && min[1] > -1e-9,
            min_rho1: min[0],
            min_rho2: min[1],
            max_imag: imag,
            rows,
        }
    }

    /// Log-slope of `|D Delta(-i t)|` for `t` in `[t0, t1]`, divided by `pi`:
    /// the rate of the leading `e^{-i pi r v}` order at the merged edge.
    pub fn merged_edge_rate(&self, t0: f64, t1: f64) -> f64 {
        let g = |t: f64| {
            let (d, dt) = self.delta_split(C::new(0.0, -t));
            (d + dt).norm().ln()
        };
        let m = 16;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..=m {
            let t = t0 + (t1 - t0) * k as f64 / m as f64;
            let y = g(t);
            sx += t;
            sy += y;
            sxx += t * t;
            sxy += t * y;
        }
        let nn = (m + 1) as f64;
        let slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        -slope / PI
    }

    /// Exponent `e` of `rho^{(1)} ~ (x - g1m)^e` near the left edge of cut 1.
    pub fn edge_exponent(&self) -> f64 {
        let pts: Vec<(f64, f64)> = [1e-3, 2e-3, 4e-3, 8e-3]
            .iter()
            .map(|&t| {
                let (r, x) = self.density(1, t);
                ((x.re - self.frame.g1m).abs().ln(), r.re.abs().ln())
            })
            .collect();
        let nn = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (nn * sxy - sx * sy) / (nn * sxx - sx * sx)
    }

    pub fn report(&self, residual: f64, iterations: usize, samples: usize) -> SolveReport {
        let scan = self.density_scan(samples);
        let f = &self.frame;
        SolveReport {
            params: self.params.clone(),
            basis: self.basis,
            cuts: [f.g1m, f.g1p, f.g2m, f.g2p],
            t: if f.t.is_finite() { Some(f.t) } else { None },
            w1: [f.w1.re, f.w1.im],
            w2: [f.w2.re, f.w2.im],
            edge_residual: residual,
            iterations,
            positive: scan.positive,
            min_rho1: scan.min_rho1,
            min_rho2: scan.min_rho2,
            density: scan.rows,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityRow {
    pub t: f64,
    pub x1: f64,
    pub rho1: f64,
    pub y2: f64,
    pub rho2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityScan {
    pub positive: bool,
    pub min_rho1: f64,
    pub min_rho2: f64,
    /// Largest imaginary part met on the scan.
    pub max_imag: f64,
    pub rows: Vec<DensityRow>,
}

/// JSON report of a solve.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub params: ModelParams,
    pub basis: Basis,
    pub cuts: [f64; 4],
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub w1: [f64; 2],
    pub w2: [f64; 2],
    pub edge_residual: f64,
    pub iterations: usize,
    pub positive: bool,
    pub min_rho1: f64,
    pub min_rho2: f64,
    pub density: Vec<DensityRow>,
}

/// A converged solve.
#[derive(Clone, Debug)]
pub struct Solved {
    pub solution: OmegaSolution,
    pub residual: f64,
    pub iterations: usize,
}

fn solution_at(p: &ModelParams, cuts: &[f64]) -> Result<OmegaSolution> {
    let frame = build_frame(cuts[0], cuts[1], cuts[2], cuts[3], p.a, p.h1, p.h2)?;
    assemble_omega(p, frame)
}

fn edge_residual(p: &ModelParams, cuts: &[f64]) -> Result<Vec<f64>> {
    let sol = solution_at(p, cuts)?;
    Ok(sol.edge_values().iter().map(|z| z.im).collect())
}

/// The decoupled `n = 0` cuts `+-2 sqrt(u_i)`.
pub fn decoupled_seed(p: &ModelParams) -> [f64; 4] {
    let (c1, c2) = (2.0 * p.u1.sqrt(), 2.0 * p.u2.sqrt());
    [-c1, c1, -c2, c2]
}

/// Newton solve of the four edge conditions from a given seed.
pub fn solve_cuts_from(p: &ModelParams, seed: &[f64; 4], opts: &NewtonOptions) -> Result<Solved> {
    let rep = newton(|c| edge_residual(p, c), seed, opts)?;
    let solution = solution_at(p, &rep.x)?;
    let residual = solution.edge_values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(Solved {
        solution,
        residual,
        iterations: rep.iterations,
    })
}

/// Solves for the cuts from the decoupled seed. When the direct Newton run
/// fails, the weights `h1, h2` are ramped up from a tenth of their value.
pub fn solve_cuts(p: &ModelParams) -> Result<Solved> {
    let opts = NewtonOptions::default();
    let seed = decoupled_seed(p);
    match solve_cuts_from(p, &seed, &opts) {
        Ok(s) => Ok(s),
        Err(first) => {
            let mut cur = seed;
            let steps = 10;
            for k in 1..=steps {
                let mut q = p.clone();
                let f = k as f64 / steps as f64;
                q.h1 = p.h1 * f;
                q.h2 = p.h2 * f;
                match solve_cuts_from(&q, &cur, &opts) {
                    Ok(s) => {
                        let fr = &s.solution.frame;
                        cur = [fr.g1m, fr.g1p, fr.g2m, fr.g2p];
                        if k == steps {
                            return Ok(s);
                        }
                    }
                    Err(_) => return Err(first),
                }
            }
            Err(first)
        }
    }
}

/// Runs Newton from several seeds and keeps the distinct converged solutions.
pub fn solve_cuts_multi(p: &ModelParams, seeds: &[[f64; 4]]) -> Vec<Solved> {
    let opts = NewtonOptions::default();
    let mut out: Vec<Solved> = Vec::new();
    for seed in seeds {
        if let Ok(s) = solve_cuts_from(p, seed, &opts) {
            let f = &s.solution.frame;
            let c = [f.g1m, f.g1p, f.g2m, f.g2p];
            let dup = out.iter().any(|o| {
                let g = &o.solution.frame;
                [g.g1m, g.g1p, g.g2m, g.g2p].iter().zip(&c).all(|(a, b)| (a - b).abs() < 1e-8)
            });
            if !dup {
                out.push(s);
            }
        }
    }
    out
}

/// The `T = inf` solution attached to a critical point.
pub fn critical_solution(cp: &CriticalPoint) -> Result<OmegaSolution> {
    let n = cp.n();
    let p = ModelParams::new(n, cp.a, cp.h1, cp.h2, cp.u1(), cp.u2())?;
    let frame = EllipticFrame::trigonometric(cp.lam, cp.del, cp.w1, cp.w2, cp.a, cp.h1, cp.h2)?;
    assemble_omega(&p, frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{critical_point_a1, critical_point_general, symmetric_bending, Regime};
    use crate::series::gasket_fixed_point_f64;

    fn params() -> ModelParams {
        ModelParams::new(1.2, 1.3, 0.05, 0.05, 1.0, 1.0).unwrap()
    }

    #[test]
    fn particular_parts_solve_the_inhomogeneous_equations() {
        for p in [params(), ModelParams::new(1.0, 1.0, 0.05, 0.07, 1.0, 1.3).unwrap()] {
            let pp = ParticularParts::new(&p);
            for k in 0..50 {
                let x = C::new(-2.0 + 0.08 * k as f64, 0.0);
                for r in pp.residuals(x) {
                    assert!(r.norm() < 1e-12, "{r}");
                }
            }
        }
    }

    #[test]
    fn vectors_have_the_stated_poles() {
        let b = 0.3;
        let k = Kernels::new(b, 1.5).unwrap();
        let w = C::new(0.37, 0.0);
        let n = 2.0 * (PI * b).cos();
        let av = a_vectors(b);
        let bv = b_vectors(b);
        let res = |block: Block, c: &[C; 4], at: C| {
            laurent_coefficient(|v| z_block(block, v, w, c, 0, &k), at, 0.1, -1, 128)
        };
        let one_m = C::new(1.0, 0.0) - w;
        let expect = [
            (av[0], 1.0, n / 2.0),
            (av[1], n / 2.0, 1.0),
            (bv[0], 1.0, 0.0),
            (bv[1], 0.0, 1.0),
        ];
        for (c, e1, e2) in expect {
            assert!((res(Block::Z1, &c, w) - e1).norm() < 1e-10);
            assert!((res(Block::Z2, &c, w) - e2).norm() < 1e-10);
            assert!(res(Block::Z1, &c, one_m).norm() < 1e-10);
            assert!(res(Block::Z2, &c, one_m).norm() < 1e-10);
        }
    }

    #[test]
    fn block_identities() {
        let b = 0.35;
        let n = 2.0 * (PI * b).cos();
        let k = Kernels::new(b, 2.0).unwrap();
        let w = C::new(0.41, 0.0);
        let c = [C::new(0.3, 0.1), C::new(-0.2, 0.5), C::new(0.7, 0.0), C::new(0.1, -0.4)];
        let neg = [c[0], c[1], -c[2], -c[3]];
        for l in 0..3 {
            for v in [C::new(0.23, 0.4), C::new(-0.7, -1.1), C::new(1.3, 0.2)] {
                let z1 = z_block(Block::Z1, v, w, &c, l, &k);
                assert!((z_block(Block::Z1, -v, w, &c, l, &k) + z1).norm() < 1e-12);
                let z2 = z_block(Block::Z2, v, w, &c, l, &k);
                let shifted = (z1 + z_block(Block::Z1, v - 2.0, w, &c, l, &k)) / n;
                assert!((z2 - shifted).norm() < 1e-11 * (1.0 + z2.norm()));
                assert!((z_block(Block::Z2, 2.0 - v, w, &c, l, &k) + z2).norm() < 1e-11 * (1.0 + z2.norm()));
                let d1 = z_block(Block::Delta1, v, w, &c, l, &k);
                let d_direct = (z_block(Block::Z1, v - 1.0, w, &c, l, &k) - z_block(Block::Z1, v + 1.0, w, &c, l, &k))
                    / (2.0 * PI * I);
                assert!((d1 - d_direct).norm() < 1e-11 * (1.0 + d1.norm()));
                let d2 = z_block(Block::Delta2, v, w, &c, l, &k);
                let d2_direct = (z_block(Block::Z2, v, w, &c, l, &k) - z_block(Block::Z2, v + 2.0, w, &c, l, &k))
                    / (2.0 * PI * I);
                assert!((d2 - d2_direct).norm() < 1e-11 * (1.0 + d2.norm()));
                assert!((z_block(Block::Delta1, v, w, &neg, l, &k) - d2).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn solve_meets_edge_conditions_and_normalisation() {
        let p = ModelParams::new(0.8, 0.7, 0.04, 0.06, 0.9, 1.1).unwrap();
        let solved = solve_cuts(&p).unwrap();
        assert!(solved.residual < 1e-10);
        let s = &solved.solution;
        for e in s.edge_values() {
            assert!(e.norm() < 1e-10, "{e}");
        }
        // rho vanishes linearly in t at every edge
        let (near, half) = (s.edge_densities(2e-5), s.edge_densities(1e-5));
        for (x, y) in near.iter().zip(half) {
            assert!(*x < 1e-2 && (y / x - 0.5).abs() < 1e-3, "{x} {y}");
        }
        for (i, u) in [(1, p.u1), (2, p.u2)] {
            assert!((s.large_x_limit(i).unwrap() - u).abs() < 1e-6);
        }
        for r in s.functional_residuals(64).unwrap() {
            assert!(r < 1e-8, "{r}");
        }
        let scan = s.density_scan(256);
        assert!(scan.positive && scan.max_imag < 1e-8);
    }

    #[test]
    fn moments_match_the_series() {
        let p = ModelParams::new(1.2, 1.3, 0.05, 0.05, 1.0, 1.0).unwrap();
        let s = solve_cuts(&p).unwrap().solution;
        let series = gasket_fixed_point_f64(&p, 4, 24).unwrap();
        for (i, f) in [(1, &series.f1), (2, &series.f2)] {
            let m = s.moments(i, 4).unwrap();
            for l in 0..=4 {
                let e = f[l].eval_f64(1.0);
                assert!((m[l] - e).abs() < 1e-6 * (1.0 + e.abs()), "i={i} l={l} {} {e}", m[l]);
            }
        }
    }

    #[test]
    fn critical_solutions_merge_edges_at_the_expected_rate() {
        for (b, a, r) in [(0.4, 1.0, 1.0), (0.3, 1.0, 2.0), (0.4, 1.3, 2.0)] {
            let cp = if a == 1.0 {
                critical_point_a1(1.0, r, b).unwrap()
            } else {
                critical_point_general(1.0, r, a, b).unwrap()
            };
            let sol = critical_solution(&cp).unwrap();
            for e in sol.edge_values() {
                assert!(e.norm() < 1e-10);
            }
            assert!((sol.merged_edge_rate(3.0, 6.0) - (2.0 - b)).abs() < 0.02);
            assert!(sol.density_scan(256).positive);
        }
    }

    #[test]
    fn beyond_a_max_the_density_turns_negative() {
        let cp = symmetric_bending(4.2, 1.0 / 3.0, 1.0).unwrap();
        assert_eq!(cp.regime, Regime::InvalidPositivity);
        assert!(!critical_solution(&cp).unwrap().density_scan(256).positive);
    }
}
