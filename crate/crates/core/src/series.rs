//! Graded formal power series: disk, ring and gasket generating functions.
//!
//! The grading variable marks visited triangles. Regular faces coming from a
//! plain weight sequence carry grade 1 each, so every substituted face weight
//! has a vanishing constant term and the recursions are triangular in the grade.

use crate::error::{Error, Result};
use crate::model::{ExactWeights, ModelParams};
use crate::scalar::{Rational, Scalar};
use num_traits::Signed;
use serde::Serialize;
use std::ops::{Add, Mul};

/// Coefficients of grades `0..=order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<S = Rational> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TruncatedSeries<S> {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![S::zero(); order + 1],
        }
    }

    pub fn constant(c: S, order: usize) -> Self {
        Self::monomial(c, 0, order)
    }

    /// `c z^grade`, dropped when `grade > order`.
    pub fn monomial(c: S, grade: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if grade <= order {
            s.coeffs[grade] = c;
        }
        s
    }

    pub fn from_coeffs(mut coeffs: Vec<S>, order: usize) -> Self {
        coeffs.resize(order + 1, S::zero());
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, grade: usize) -> S {
        self.coeffs.get(grade).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Lowest grade with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &S) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    /// Multiplies by `z^shift`, truncating.
    pub fn shift(&self, shift: usize) -> Self {
        let order = self.order();
        let mut out = Self::zero(order);
        for g in shift..=order {
            out.coeffs[g] = self.coeffs[g - shift].clone();
        }
        out
    }

    /// Sum of `coeff(g) z^g` at a numeric point.
    pub fn eval_f64(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c.to_f64())
    }
}

impl<S: Scalar> Add for &TruncatedSeries<S> {
    type Output = TruncatedSeries<S>;

    fn add(self, rhs: Self) -> TruncatedSeries<S> {
        let order = self.order().min(rhs.order());
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|g| self.coeffs[g].clone() + rhs.coeffs[g].clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Mul for &TruncatedSeries<S> {
    type Output = TruncatedSeries<S>;

    fn mul(self, rhs: Self) -> TruncatedSeries<S> {
        let order = self.order().min(rhs.order());
        let mut out = TruncatedSeries::<S>::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for j in 0..=(order - i) {
                out.coeffs[i + j] = out.coeffs[i + j].clone() + a.clone() * rhs.coeffs[j].clone();
            }
        }
        out
    }
}

/// Disk generating functions `F_l(u; G_1, G_2, ...)` for `l <= ell_max`.
///
/// `g[k-1]` is the weight of a face of degree `k` and must have zero constant
/// term. Uses the root-edge recursion
/// `F_l = sum_k G_k F_{l+k-2} + sum_{l'} F_{l'} F_{l-2-l'}` with `F_0 = u`.
pub fn disk_series_graded<S: Scalar>(
    u: &S,
    g: &[TruncatedSeries<S>],
    ell_max: usize,
    order: usize,
) -> Result<Vec<TruncatedSeries<S>>> {
    let min_grades: Vec<Option<usize>> = g
        .iter()
        .enumerate()
        .map(|(i, gk)| match gk.valuation() {
            Some(0) => Err(Error::Ungraded(format!("face weight of degree {} has a constant term", i + 1))),
            v => Ok(v),
        })
        .collect::<Result<_>>()?;
    Ok(disk_table(u, g, &min_grades, ell_max, order))
}

/// Longest boundary needed at each grade so that grade `order` is exact up to `ell_max`.
fn length_budget(min_grades: &[Option<usize>], ell_max: usize, order: usize) -> Vec<usize> {
    let mut lmax = vec![ell_max; order + 1];
    for m in (1..=order).rev() {
        for (i, mg) in min_grades.iter().enumerate() {
            let Some(d0) = *mg else { continue };
            let k = i + 1;
            for d in d0..=m {
                let need = (lmax[m] + k).saturating_sub(2);
                if lmax[m - d] < need {
                    lmax[m - d] = need;
                }
            }
        }
        if lmax[m - 1] < lmax[m] {
            lmax[m - 1] = lmax[m];
        }
    }
    lmax
}

fn disk_table<S: Scalar>(
    u: &S,
    g: &[TruncatedSeries<S>],
    min_grades: &[Option<usize>],
    ell_max: usize,
    order: usize,
) -> Vec<TruncatedSeries<S>> {
    let lmax = length_budget(min_grades, ell_max, order);
    let width = lmax[0] + 1;
    // f[l][m], zero outside the budget.
    let mut f = vec![vec![S::zero(); order + 1]; width];
    f[0][0] = u.clone();
    for m in 0..=order {
        for l in 1..=lmax[m] {
            let mut acc = S::zero();
            for (i, gk) in g.iter().enumerate() {
                let Some(d0) = min_grades[i] else { continue };
                let target = l + i + 1;
                if target < 2 {
                    continue;
                }
                let lt = target - 2;
                for d in d0..=m {
                    let c = &gk.coeffs[d];
                    if !c.is_zero() && lt < width {
                        acc = acc + c.clone() * f[lt][m - d].clone();
                    }
                }
            }
            if l >= 2 {
                for lp in 0..=(l - 2) {
                    let lq = l - 2 - lp;
                    for m1 in 0..=m {
                        let a = &f[lp][m1];
                        if !a.is_zero() {
                            acc = acc + a.clone() * f[lq][m - m1].clone();
                        }
                    }
                }
            }
            f[l][m] = acc;
        }
    }
    f.truncate(ell_max + 1);
    f.into_iter().map(|c| TruncatedSeries::from_coeffs(c, order)).collect()
}

/// `F_ell(u; g_1, g_2, ...)` where each face carries grade 1.
pub fn disk_series(u: &Rational, g_seq: &[Rational], ell: usize, order: usize) -> Result<TruncatedSeries> {
    if g_seq.iter().any(|g| g.is_negative()) {
        return Err(Error::Ungraded("face weights must be non-negative".into()));
    }
    let g: Vec<_> = g_seq
        .iter()
        .map(|gk| TruncatedSeries::monomial(gk.clone(), 1, order))
        .collect();
    Ok(disk_series_graded(u, &g, ell, order)?.swap_remove(ell))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Ring coefficient `A^{(1->2)}_{k,k'}`: `k >= 1` red-facing and `k'` green-facing
/// triangles around one loop, with a marked red-facing triangle and a weight `a`
/// per pair of consecutive triangles facing the same color.
///
/// `A_{k,0} = (a h1)^k` and otherwise
/// `h1^k h2^k' sum_m C(k,m) C(k'-1,m-1) a^{k+k'-2m}`, `m` counting color runs.
pub fn ring_coefficient<S: Scalar>(k: usize, kp: usize, h1: &S, h2: &S, a: &S) -> S {
    if k == 0 {
        return S::zero();
    }
    if kp == 0 {
        return (a.clone() * h1.clone()).pow(k as u32);
    }
    let mut sum = S::zero();
    for m in 1..=k.min(kp) {
        let c = binomial(k, m) * binomial(kp - 1, m - 1);
        let c = S::from_i64(i64::try_from(c).expect("ring binomial overflows i64"));
        sum = sum + c * a.pow((k + kp - 2 * m) as u32);
    }
    h1.pow(k as u32) * h2.pow(kp as u32) * sum
}

/// `A^{(1->2)}_{k,k'}` for `k + k' <= kmax`; row `k = 0` is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RingTable<S = Rational> {
    pub kmax: usize,
    values: Vec<Vec<S>>,
}

impl<S: Scalar> RingTable<S> {
    pub fn get(&self, k: usize, kp: usize) -> S {
        if k + kp > self.kmax {
            return S::zero();
        }
        self.values[k][kp].clone()
    }
}

pub fn ring_series<S: Scalar>(h1: &S, h2: &S, a: &S, kmax: usize) -> RingTable<S> {
    let values = (0..=kmax)
        .map(|k| (0..=(kmax - k)).map(|kp| ring_coefficient(k, kp, h1, h2, a)).collect())
        .collect();
    RingTable { kmax, values }
}

/// `A^{(2->1)}`, obtained by exchanging `h1` and `h2`.
pub fn ring_series_reverse<S: Scalar>(h1: &S, h2: &S, a: &S, kmax: usize) -> RingTable<S> {
    ring_series(h2, h1, a, kmax)
}

/// Fixed point of the gasket decomposition, truncated at grade `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct GasketSolution<S = Rational> {
    pub order: usize,
    /// `F^{(1)}_l` for `l <= ell_max`.
    pub f1: Vec<TruncatedSeries<S>>,
    pub f2: Vec<TruncatedSeries<S>>,
    /// Substituted face weights `G^{(i)}_k`, index `k - 1`.
    pub g1: Vec<TruncatedSeries<S>>,
    pub g2: Vec<TruncatedSeries<S>>,
    pub iterations: usize,
}

/// Loop-model weights for the gasket iteration.
#[derive(Clone, Debug)]
pub struct GasketWeights<S> {
    pub n: S,
    pub a: S,
    pub h1: S,
    pub h2: S,
    pub u1: S,
    pub u2: S,
    pub g1_seq: Vec<S>,
    pub g2_seq: Vec<S>,
}

impl From<&ExactWeights> for GasketWeights<Rational> {
    fn from(w: &ExactWeights) -> Self {
        GasketWeights {
            n: w.n.clone(),
            a: w.a.clone(),
            h1: w.h1.clone(),
            h2: w.h2.clone(),
            u1: w.u1.clone(),
            u2: w.u2.clone(),
            g1_seq: w.g1_seq.clone(),
            g2_seq: w.g2_seq.clone(),
        }
    }
}

impl From<&ModelParams> for GasketWeights<f64> {
    fn from(p: &ModelParams) -> Self {
        GasketWeights {
            n: p.n,
            a: p.a,
            h1: p.h1,
            h2: p.h2,
            u1: p.u1,
            u2: p.u2,
            g1_seq: p.g1_seq.clone(),
            g2_seq: p.g2_seq.clone(),
        }
    }
}

/// Exact gasket fixed point for `l <= ell_max` up to grade `order`.
pub fn gasket_fixed_point(w: &ExactWeights, ell_max: usize, order: usize) -> Result<GasketSolution<Rational>> {
    gasket_fixed_point_generic(&GasketWeights::from(w), ell_max, order)
}

/// Floating-point gasket fixed point, for high-order spot checks.
pub fn gasket_fixed_point_f64(p: &ModelParams, ell_max: usize, order: usize) -> Result<GasketSolution<f64>> {
    gasket_fixed_point_generic(&GasketWeights::from(p), ell_max, order)
}

pub fn gasket_fixed_point_generic<S: Scalar>(
    w: &GasketWeights<S>,
    ell_max: usize,
    order: usize,
) -> Result<GasketSolution<S>> {
    if w.g1_seq.iter().chain(&w.g2_seq).any(|g| *g < S::zero()) {
        return Err(Error::Ungraded("face weights must be non-negative".into()));
    }
    let a12 = ring_series(&w.h1, &w.h2, &w.a, order);
    let a21 = ring_series_reverse(&w.h1, &w.h2, &w.a, order);
    let kmax = order.max(w.g1_seq.len()).max(w.g2_seq.len());
    let ell_eff = ell_max.max(order.saturating_sub(1));

    let plain = |seq: &[S], k: usize| match seq.get(k - 1) {
        Some(gk) if !gk.is_zero() => TruncatedSeries::monomial(gk.clone(), 1, order),
        _ => TruncatedSeries::zero(order),
    };
    // A hole of degree k carries at least k triangles; plain faces carry one grade.
    let min_grades = |seq: &[S]| -> Vec<Option<usize>> {
        (1..=kmax)
            .map(|k| {
                let plain_face = seq.get(k - 1).is_some_and(|g| !g.is_zero());
                if plain_face {
                    Some(1)
                } else if k <= order {
                    Some(k)
                } else {
                    None
                }
            })
            .collect()
    };
    let mg1 = min_grades(&w.g1_seq);
    let mg2 = min_grades(&w.g2_seq);

    let holes = |table: &RingTable<S>, inner: &[TruncatedSeries<S>], seq: &[S]| -> Vec<TruncatedSeries<S>> {
        (1..=kmax)
            .map(|k| {
                let mut gk = plain(seq, k);
                for kp in 0..=order.saturating_sub(k) {
                    let coeff = table.get(k, kp);
                    if coeff.is_zero() {
                        continue;
                    }
                    let term = inner[kp].shift(k + kp).scale(&(w.n.clone() * coeff));
                    gk = &gk + &term;
                }
                gk
            })
            .collect()
    };

    let mut g1: Vec<_> = (1..=kmax).map(|k| plain(&w.g1_seq, k)).collect();
    let mut g2: Vec<_> = (1..=kmax).map(|k| plain(&w.g2_seq, k)).collect();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let f1 = disk_table(&w.u1, &g1, &mg1, ell_eff, order);
        let f2 = disk_table(&w.u2, &g2, &mg2, ell_eff, order);
        let n1 = holes(&a12, &f2, &w.g1_seq);
        let n2 = holes(&a21, &f1, &w.g2_seq);
        let stable = n1 == g1 && n2 == g2;
        g1 = n1;
        g2 = n2;
        if stable || iterations > order + 2 {
            let mut f1 = f1;
            let mut f2 = f2;
            if !stable {
                f1 = disk_table(&w.u1, &g1, &mg1, ell_eff, order);
                f2 = disk_table(&w.u2, &g2, &mg2, ell_eff, order);
            }
            f1.truncate(ell_max + 1);
            f2.truncate(ell_max + 1);
            return Ok(GasketSolution {
                order,
                f1,
                f2,
                g1,
                g2,
                iterations,
            });
        }
    }
}

/// One row of the coefficient table dump.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesRow {
    pub grade: usize,
    #[serde(rename = "ℓ")]
    pub ell: usize,
    pub color: u8,
    pub numerator: String,
    pub denominator: String,
}

impl GasketSolution<Rational> {
    /// Rows ordered by grade, then length, then color.
    pub fn rows(&self) -> Vec<SeriesRow> {
        let mut rows = Vec::new();
        for grade in 0..=self.order {
            for ell in 0..self.f1.len() {
                for (color, f) in [(1u8, &self.f1), (2u8, &self.f2)] {
                    let c = f[ell].coeff(grade);
                    rows.push(SeriesRow {
                        grade,
                        ell,
                        color,
                        numerator: c.numer().to_string(),
                        denominator: c.denom().to_string(),
                    });
                }
            }
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_traits::Zero;

    fn r(p: i64) -> Rational {
        ratio(p, 1)
    }

    fn catalan(m: u64) -> u64 {
        (binomial(2 * m as usize, m as usize) / (m as u128 + 1)) as u64
    }

    #[test]
    fn trees_are_catalan() {
        let u = ratio(3, 2);
        assert_eq!(disk_series(&u, &[], 0, 3).unwrap().coeff(0), u);
        assert_eq!(disk_series(&u, &[], 2, 3).unwrap().coeff(0), &u * &u);
        for m in 0..6u32 {
            let f = disk_series(&u, &[], 2 * m as usize, 2).unwrap();
            assert_eq!(f.coeff(0), r(catalan(m as u64) as i64) * Scalar::pow(&u, m + 1));
            assert!(f.coeff(1).is_zero());
        }
        assert!(disk_series(&u, &[], 3, 4).unwrap().coeffs().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn single_triangle_face() {
        let u = ratio(2, 1);
        let g = ratio(5, 3);
        let f1 = disk_series(&u, &[r(0), r(0), g.clone()], 1, 3).unwrap();
        assert!(f1.coeff(0).is_zero());
        assert_eq!(f1.coeff(1), &g * &u * &u);
    }

    #[test]
    fn face_of_degree_one_and_two() {
        // Grade-1 part of F_0 is empty; F_1 = g1 u at grade 1 (a loop edge with a degree-1 face).
        let u = ratio(1, 1);
        let f = disk_series(&u, &[ratio(1, 1)], 1, 2).unwrap();
        assert_eq!(f.coeff(1), r(1));
        let err = disk_series_graded(&u, &[TruncatedSeries::constant(r(1), 2)], 2, 2);
        assert!(matches!(err, Err(Error::Ungraded(_))));
    }

    #[test]
    fn ring_small_values() {
        let (h1, h2, a) = (ratio(2, 3), ratio(5, 7), ratio(3, 2));
        for k in 1..5 {
            assert_eq!(ring_coefficient(k, 0, &h1, &h2, &a), Scalar::pow(&(&a * &h1), k as u32));
        }
        let one = r(1);
        assert_eq!(ring_coefficient(1, 1, &h1, &h2, &one), &h1 * &h2);
        assert_eq!(ring_coefficient(2, 1, &h1, &h2, &one), r(2) * &h1 * &h1 * &h2);
        assert!(ring_coefficient(0, 3, &h1, &h2, &a).is_zero());
    }

    /// Marked necklaces: words starting with the marked red triangle, weight `a`
    /// per cyclically adjacent equal pair.
    fn necklace(k: usize, kp: usize, h1: &Rational, h2: &Rational, a: &Rational) -> Rational {
        let len = k + kp;
        let mut total = Rational::zero();
        for mask in 0u32..(1 << len) {
            if mask & 1 == 0 || mask.count_ones() as usize != k {
                continue;
            }
            let red = |i: usize| mask >> (i % len) & 1 == 1;
            let same = (0..len).filter(|&i| red(i) == red(i + 1)).count();
            total += Scalar::pow(a, same as u32);
        }
        total * Scalar::pow(h1, k as u32) * Scalar::pow(h2, kp as u32)
    }

    #[test]
    fn ring_matches_necklaces() {
        let (h1, h2, a) = (ratio(2, 3), ratio(5, 7), ratio(3, 2));
        for k in 1..=8 {
            for kp in 0..=(8 - k) {
                assert_eq!(ring_coefficient(k, kp, &h1, &h2, &a), necklace(k, kp, &h1, &h2, &a), "{k},{kp}");
            }
        }
    }

    #[test]
    fn gasket_grade_zero() {
        let w = ExactWeights::fully_packed(r(1), r(1), ratio(1, 2), ratio(1, 3), ratio(3, 2), ratio(5, 4));
        let sol = gasket_fixed_point(&w, 4, 0).unwrap();
        assert_eq!(sol.f1[0].coeff(0), ratio(3, 2));
        assert_eq!(sol.f2[0].coeff(0), ratio(5, 4));
        assert_eq!(sol.f1[2].coeff(0), ratio(9, 4));
    }

    #[test]
    fn gasket_one_loop_grade_two() {
        // Holes of degree 1 and 2 filled by a ring around a single green vertex.
        let (h1, h2) = (ratio(1, 2), ratio(1, 3));
        let w = ExactWeights::fully_packed(r(1), r(1), h1.clone(), h2.clone(), r(1), r(1));
        let sol = gasket_fixed_point(&w, 2, 2).unwrap();
        let g1 = &sol.g1;
        assert_eq!(g1[0].coeff(1), h1.clone());
        assert!(g1[0].coeff(2).is_zero());
        assert_eq!(g1[1].coeff(2), &h1 * &h1);
        assert_eq!(sol.g2[1].coeff(2), &h2 * &h2);
    }

    #[test]
    fn float_and_exact_agree() {
        let w = ExactWeights::fully_packed(ratio(3, 2), ratio(2, 1), ratio(1, 5), ratio(1, 7), ratio(1, 1), ratio(2, 3));
        let exact = gasket_fixed_point(&w, 3, 6).unwrap();
        let float = gasket_fixed_point_f64(&w.to_model().unwrap(), 3, 6).unwrap();
        for l in 0..=3 {
            for m in 0..=6 {
                let e = exact.f1[l].coeff(m).to_f64();
                assert!((e - float.f1[l].coeff(m)).abs() <= 1e-12 * e.abs().max(1.0));
            }
        }
    }
}
