//! Quadrature, bracketed root finding and damped Newton iteration.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Point handed to a quadrature integrand: the abscissa and its exact
/// distances to both ends, so factors vanishing at an endpoint keep full
/// relative precision.
#[derive(Clone, Copy, Debug)]
pub struct QuadPoint {
    pub x: f64,
    pub from_lo: f64,
    pub to_hi: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const TS_TMAX: f64 = 4.0;
const TS_MAX_LEVEL: usize = 9;

/// Tanh-sinh integral of `f` over `[lo, hi]`, refined until successive
/// levels agree to `tol` (relative to the magnitude of the result).
///
/// Integrable endpoint singularities such as inverse square roots are
/// handled by the double-exponential decay of the weights.
pub fn tanh_sinh<F>(f: F, lo: f64, hi: f64, tol: f64) -> QuadResult
where
    F: Fn(QuadPoint) -> f64,
{
    if lo == hi {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        };
    }
    let (a, b, sign) = if lo < hi { (lo, hi, 1.0) } else { (hi, lo, -1.0) };
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut evaluations = 0;

    // Node at parameter t, mirrored pair included.
    let pair = |t: f64, evals: &mut usize| -> f64 {
        let u = 0.5 * PI * t.sinh();
        let cu = u.cosh();
        let w = 0.5 * PI * t.cosh() / (cu * cu);
        // 1 - tanh(u) computed without cancellation.
        let e = (-2.0 * u).exp();
        let gap = 2.0 * e / (1.0 + e);
        let d = half * gap;
        if d <= 0.0 || !w.is_finite() {
            return 0.0;
        }
        let mut s = 0.0;
        let right = QuadPoint {
            x: b - d,
            from_lo: 2.0 * half - d,
            to_hi: d,
        };
        let left = QuadPoint {
            x: a + d,
            from_lo: d,
            to_hi: 2.0 * half - d,
        };
        for p in [right, left] {
            let v = f(p);
            *evals += 1;
            if v.is_finite() {
                s += v;
            }
        }
        w * s
    };

    let mut h = 1.0;
    let mut sum = {
        evaluations += 1;
        0.5 * PI
            * f(QuadPoint {
                x: mid,
                from_lo: half,
                to_hi: half,
            })
    };
    let mut k = 1;
    while k as f64 * h <= TS_TMAX {
        sum += pair(k as f64 * h, &mut evaluations);
        k += 1;
    }
    let mut prev = half * h * sum;
    let mut error = f64::INFINITY;
    for _ in 1..=TS_MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= TS_TMAX {
            sum += pair(k as f64 * h, &mut evaluations);
            k += 2;
        }
        let cur = half * h * sum;
        error = (cur - prev).abs();
        prev = cur;
        if error <= tol * cur.abs().max(1e-300) {
            break;
        }
    }
    QuadResult {
        value: sign * prev,
        error,
        evaluations,
    }
}

/// `sin` and `cos` that LLVM cannot merge into one `sincos` call. The merged
/// call is used only in optimised builds and can differ in the last bit,
/// which would make dataset bytes depend on the build profile.
pub trait StableTrig: Copy {
    fn stable_sin(self) -> Self;
    fn stable_cos(self) -> Self;
}

impl StableTrig for f64 {
    fn stable_sin(self) -> f64 {
        std::hint::black_box(self).sin()
    }
    fn stable_cos(self) -> f64 {
        std::hint::black_box(self).cos()
    }
}

impl StableTrig for Complex64 {
    fn stable_sin(self) -> Complex64 {
        Complex64::new(self.re.stable_sin() * self.im.cosh(), self.re.stable_cos() * self.im.sinh())
    }
    fn stable_cos(self) -> Complex64 {
        Complex64::new(self.re.stable_cos() * self.im.cosh(), -self.re.stable_sin() * self.im.sinh())
    }
}

/// Laurent coefficient `c_k` of `f` around `z0` from `n` trapezoid samples on
/// a circle of radius `rho`; exact up to aliasing from the other singularities.
pub fn laurent_coefficient<F>(f: F, z0: Complex64, rho: f64, k: i32, n: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let theta = 2.0 * PI * j as f64 / n as f64;
        let e = Complex64::from_polar(1.0, theta);
        acc += f(z0 + e * rho) * Complex64::from_polar(rho.powi(-k), -(k as f64) * theta);
    }
    acc / n as f64
}

/// Root of `f` inside a sign-changing bracket, by secant steps safeguarded
/// with bisection. Stops once `|f| < ftol` or the bracket collapses.
pub fn bracket_root<F>(mut f: F, lo: f64, hi: f64, ftol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f = ({fa}, {fb})"
        )));
    }
    let mut side = 0i8;
    for _ in 0..300 {
        // Illinois-style regula falsi with bisection fallback.
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !c.is_finite() || c <= a.min(b) || c >= a.max(b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if !fc.is_finite() {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
            continue;
        }
        if fc.abs() < ftol || (b - a).abs() <= 4.0 * f64::EPSILON * c.abs().max(1e-300) {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}

/// Scans `[lo, hi]` on a uniform grid and returns every bracketed root.
pub fn scan_roots<F>(mut f: F, lo: f64, hi: f64, steps: usize, ftol: f64) -> Vec<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut roots = Vec::new();
    let xs: Vec<f64> = (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    for i in 0..steps {
        let (fa, fb) = (vals[i], vals[i + 1]);
        if fa.is_finite() && fb.is_finite() && fa.signum() != fb.signum() {
            if let Ok(r) = bracket_root(&mut f, xs[i], xs[i + 1], ftol) {
                roots.push(r);
            }
        }
    }
    roots
}

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Relative finite-difference step for the Jacobian.
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-12,
            max_iter: 100,
            fd_step: 1e-7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonReport {
    pub x: Vec<f64>,
    pub residual: Vec<f64>,
    pub iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton iteration with a forward-difference Jacobian. A step is
/// halved while the residual norm grows or the residual map fails.
pub fn newton<F>(mut f: F, x0: &[f64], opts: &NewtonOptions) -> Result<NewtonReport>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    for it in 0..opts.max_iter {
        if norm(&r) < opts.tol {
            return Ok(NewtonReport {
                x,
                residual: r,
                iterations: it,
            });
        }
        let mut jac = DMatrix::<f64>::zeros(r.len(), dim);
        for j in 0..dim {
            let h = opts.fd_step * x[j].abs().max(1e-3);
            let mut xp = x.clone();
            xp[j] += h;
            let rp = f(&xp)?;
            for i in 0..r.len() {
                jac[(i, j)] = (rp[i] - r[i]) / h;
            }
        }
        let rhs = DVector::from_vec(r.iter().map(|v| -v).collect());
        let step = if r.len() == dim {
            jac.clone().lu().solve(&rhs)
        } else {
            None
        }
        .or_else(|| jac.clone().svd(true, true).solve(&rhs, 1e-14).ok())
        .ok_or_else(|| Error::NonConvergence {
            what: "Newton step (singular Jacobian)",
            residual: r.clone(),
        })?;
        let base = norm(&r);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + lambda * s).collect();
            if let Ok(rt) = f(&trial) {
                if rt.iter().all(|v| v.is_finite()) && norm(&rt) < base {
                    x = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm(&r) < opts.tol {
        let iterations = opts.max_iter;
        return Ok(NewtonReport {
            x,
            residual: r,
            iterations,
        });
    }
    Err(Error::NonConvergence {
        what: "Newton iteration",
        residual: r,
    })
}

/// Complex Newton iteration for a scalar analytic equation `g(z) = 0` with
/// known derivative.
pub fn complex_newton<F>(mut g: F, z0: Complex64, tol: f64, max_iter: usize) -> Option<Complex64>
where
    F: FnMut(Complex64) -> (Complex64, Complex64),
{
    let mut z = z0;
    let (mut val, mut der) = g(z);
    for _ in 0..max_iter {
        if !(val.norm().is_finite() && der.norm().is_finite()) || der.norm() == 0.0 {
            return None;
        }
        let step = val / der;
        let mut lambda = 1.0;
        let base = val.norm();
        let mut moved = false;
        for _ in 0..20 {
            let zt = z - step * lambda;
            let (vt, dt) = g(zt);
            if vt.norm().is_finite() && vt.norm() < base {
                z = zt;
                val = vt;
                der = dt;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if val.norm() <= tol || (moved && (step * lambda).norm() <= 1e-15 * z.norm().max(1.0)) {
            return Some(z);
        }
        if !moved {
            return if base <= tol * 1e3 { Some(z) } else { None };
        }
    }
    if val.norm() <= tol * 1e3 {
        Some(z)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_smooth_and_singular() {
        let r = tanh_sinh(|p| p.x.exp(), 0.0, 1.0, 1e-14);
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-14);
        // Inverse square roots at both ends: integral of 1/sqrt((x-a)(b-x)) is pi.
        let r = tanh_sinh(|p| 1.0 / (p.from_lo * p.to_hi).sqrt(), -2.0, 3.0, 1e-14);
        assert!((r.value - PI).abs() < 1e-13, "{}", r.value);
        let r = tanh_sinh(|p| p.x, 1.0, 0.0, 1e-14);
        assert!((r.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn bracket_root_finds_cos_zero() {
        let x = bracket_root(|x| x.cos(), 1.0, 2.0, 1e-14).unwrap();
        assert!((x - PI / 2.0).abs() < 1e-13);
        assert!(matches!(bracket_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::Bracket(_))));
        let roots = scan_roots(|x| (PI * x).sin(), 0.5, 3.5, 30, 1e-14);
        assert_eq!(roots.len(), 3);
    }

    #[test]
    fn newton_solves_small_system() {
        let rep = newton(
            |x| Ok(vec![x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1]]),
            &[1.0, 0.5],
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!((rep.x[0] - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn laurent_of_simple_pole() {
        let f = |z: Complex64| Complex64::new(3.0, 0.0) / (z - 1.0) + z * z;
        let c = laurent_coefficient(f, Complex64::new(1.0, 0.0), 0.5, -1, 64);
        assert!((c - 3.0).norm() < 1e-13);
        let c0 = laurent_coefficient(f, Complex64::new(1.0, 0.0), 0.5, 0, 64);
        assert!((c0 - 1.0).norm() < 1e-13);
    }
}
