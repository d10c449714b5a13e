//! Model parameters, the Potts to loop weight dictionary and planar duality.

use crate::error::{out_of_range, Error, Result};
use crate::scalar::{Rational, Scalar};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Potts / random-cluster weights on planar maps.
///
/// `j` is `e^K - 1`. The optional dilution weights are carried so that
/// [`dilution_sequences`] can build unvisited-face weights; nothing solves for them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct PottsParams<S = f64> {
    #[serde(rename = "Q")]
    pub q: S,
    pub t: S,
    #[serde(rename = "J")]
    pub j: S,
    pub mu_v: S,
    pub mu_f: S,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_v_vac: Option<S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_f_dual: Option<S>,
}

impl<S: Scalar> PottsParams<S> {
    /// Weights with `mu_v = mu_f = 1` and no dilution.
    pub fn new(q: S, t: S, j: S) -> Self {
        PottsParams {
            q,
            t,
            j,
            mu_v: S::one(),
            mu_f: S::one(),
            mu_v_vac: None,
            mu_f_dual: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q <= S::zero() {
            return Err(out_of_range("Q", &self.q, "(0, inf)"));
        }
        if self.j <= -S::one() {
            return Err(out_of_range("J", &self.j, "(-1, inf)"));
        }
        for (name, w) in [("mu_v", &self.mu_v), ("mu_f", &self.mu_f), ("t", &self.t)] {
            if *w <= S::zero() {
                return Err(out_of_range(name, w, "(0, inf)"));
            }
        }
        Ok(())
    }
}

impl PottsParams<f64> {
    /// Coupling `K = ln(1 + J)`.
    pub fn k(&self) -> f64 {
        self.j.ln_1p()
    }
}

/// Weights of the twofold loop model, with derived `b`, `r` and `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: f64,
    pub a: f64,
    pub h1: f64,
    pub h2: f64,
    pub u1: f64,
    pub u2: f64,
    #[serde(default)]
    pub g1_seq: Vec<f64>,
    #[serde(default)]
    pub g2_seq: Vec<f64>,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub u: f64,
}

impl ModelParams {
    /// Fully packed weights; derived fields are filled in.
    pub fn new(n: f64, a: f64, h1: f64, h2: f64, u1: f64, u2: f64) -> Result<Self> {
        let mut p = ModelParams {
            n,
            a,
            h1,
            h2,
            u1,
            u2,
            g1_seq: Vec::new(),
            g2_seq: Vec::new(),
            b: 0.0,
            r: 0.0,
            u: 0.0,
        };
        p.refresh()?;
        Ok(p)
    }

    /// Recomputes `b`, `r`, `u` from the primary weights and checks ranges.
    pub fn refresh(&mut self) -> Result<()> {
        self.b = b_from_n(self.n)?;
        if self.a <= 0.0 {
            return Err(out_of_range("a", self.a, "(0, inf)"));
        }
        for (name, w) in [("h1", self.h1), ("h2", self.h2), ("u1", self.u1), ("u2", self.u2)] {
            if !(w > 0.0) {
                return Err(out_of_range(name, w, "(0, inf)"));
            }
        }
        if self.g1_seq.iter().chain(&self.g2_seq).any(|g| *g < 0.0) {
            return Err(Error::OutOfRange {
                name: "g_k",
                value: "negative entry".into(),
                range: "[0, inf)",
            });
        }
        self.r = self.u1 / self.u2;
        self.u = (self.u1 * self.u2).sqrt();
        Ok(())
    }

    /// `b~ = 1 - b`, the exponent attached to `-n`.
    pub fn b_tilde(&self) -> f64 {
        1.0 - self.b
    }

    /// The same model with red and green exchanged.
    pub fn swapped(&self) -> Self {
        let mut p = self.clone();
        std::mem::swap(&mut p.h1, &mut p.h2);
        std::mem::swap(&mut p.u1, &mut p.u2);
        std::mem::swap(&mut p.g1_seq, &mut p.g2_seq);
        p.r = p.u1 / p.u2;
        p
    }

    pub fn is_fully_packed(&self) -> bool {
        self.g1_seq.iter().chain(&self.g2_seq).all(|g| *g == 0.0)
    }
}

/// Exact loop weights for the series layer.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactWeights {
    pub n: Rational,
    pub a: Rational,
    pub h1: Rational,
    pub h2: Rational,
    pub u1: Rational,
    pub u2: Rational,
    pub g1_seq: Vec<Rational>,
    pub g2_seq: Vec<Rational>,
}

impl ExactWeights {
    pub fn fully_packed(n: Rational, a: Rational, h1: Rational, h2: Rational, u1: Rational, u2: Rational) -> Self {
        ExactWeights {
            n,
            a,
            h1,
            h2,
            u1,
            u2,
            g1_seq: Vec::new(),
            g2_seq: Vec::new(),
        }
    }

    pub fn to_model(&self) -> Result<ModelParams> {
        let mut p = ModelParams::new(
            self.n.to_f64(),
            self.a.to_f64(),
            self.h1.to_f64(),
            self.h2.to_f64(),
            self.u1.to_f64(),
            self.u2.to_f64(),
        )?;
        p.g1_seq = self.g1_seq.iter().map(Scalar::to_f64).collect();
        p.g2_seq = self.g2_seq.iter().map(Scalar::to_f64).collect();
        p.refresh()?;
        Ok(p)
    }
}

/// Solves `n = 2 cos(pi b)` for `b` in `(0, 1/2)`.
pub fn b_from_n(n: f64) -> Result<f64> {
    if !(n > 0.0 && n < 2.0) {
        return Err(out_of_range("n", n, "open interval (0, 2)"));
    }
    Ok((n / 2.0).acos() / PI)
}

/// Inverse of [`b_from_n`].
pub fn n_from_b(b: f64) -> f64 {
    2.0 * (PI * b).cos()
}

/// Loop weights generic over the scalar field; fails when a square root leaves it.
fn dictionary<S: Scalar>(p: &PottsParams<S>) -> Result<(S, S, S, S, S)> {
    p.validate()?;
    let n = p
        .q
        .try_sqrt()
        .ok_or_else(|| Error::Irrational(format!("sqrt(Q) for Q = {}", p.q)))?;
    let h1sq = p.j.clone() * p.t.clone() / n.clone();
    let h1 = h1sq
        .try_sqrt()
        .ok_or_else(|| Error::Irrational(format!("h1 = sqrt(J t / sqrt Q) = sqrt({h1sq})")))?;
    let h2 = p
        .t
        .try_sqrt()
        .ok_or_else(|| Error::Irrational(format!("h2 = sqrt(t) = sqrt({})", p.t)))?;
    let u1 = p.mu_v.clone() * n.clone();
    let u2 = p.mu_f.clone();
    Ok((n, h1, h2, u1, u2))
}

/// Potts weights to fully packed loop weights (`a = 1`).
pub fn loop_from_potts(p: &PottsParams<f64>) -> Result<ModelParams> {
    if p.q >= 4.0 {
        return Err(out_of_range("Q", p.q, "(0, 4)"));
    }
    if p.j <= 0.0 {
        return Err(out_of_range("J", p.j, "(0, inf) on the critical-solver path"));
    }
    let (n, h1, h2, u1, u2) = dictionary(p)?;
    ModelParams::new(n, 1.0, h1, h2, u1, u2)
}

/// Exact version of [`loop_from_potts`]; `J = 0` is accepted.
pub fn loop_from_potts_exact(p: &PottsParams<Rational>) -> Result<ExactWeights> {
    let (n, h1, h2, u1, u2) = dictionary(p)?;
    Ok(ExactWeights::fully_packed(n, Rational::from_i64(1), h1, h2, u1, u2))
}

/// Reads the Potts weights back from loop weights.
///
/// `t = h2^2`, `J = n (h1/h2)^2`, `Q = n^2`, `mu_v = u1/n`, `mu_f = u2`.
pub fn potts_from_loop<S: Scalar>(n: &S, h1: &S, h2: &S, u1: &S, u2: &S) -> PottsParams<S> {
    let t = h2.clone() * h2.clone();
    let j = n.clone() * h1.clone() * h1.clone() / t.clone();
    PottsParams {
        q: n.clone() * n.clone(),
        t,
        j,
        mu_v: u1.clone() / n.clone(),
        mu_f: u2.clone(),
        mu_v_vac: None,
        mu_f_dual: None,
    }
}

/// Planar duality `J* = Q/J`, `t* = J t / sqrt(Q)`.
///
/// Vertex and face weights follow the exchange of the primal and dual maps:
/// `mu_v* = mu_f / sqrt(Q)`, `mu_f* = sqrt(Q) mu_v`, which amounts to exchanging
/// the two colors of the loop model. Dilution weights transform the same way.
pub fn potts_dual<S: Scalar>(p: &PottsParams<S>) -> Result<PottsParams<S>> {
    p.validate()?;
    if p.j.is_zero() {
        return Err(Error::DualUndefined);
    }
    if p.j < S::zero() {
        return Err(out_of_range("J", &p.j, "(0, inf) for duality"));
    }
    let sq = p
        .q
        .try_sqrt()
        .ok_or_else(|| Error::Irrational(format!("sqrt(Q) for Q = {}", p.q)))?;
    Ok(PottsParams {
        q: p.q.clone(),
        t: p.j.clone() * p.t.clone() / sq.clone(),
        j: p.q.clone() / p.j.clone(),
        mu_v: p.mu_f.clone() / sq.clone(),
        mu_f: p.mu_v.clone() * sq.clone(),
        mu_v_vac: p.mu_f_dual.clone().map(|m| m * sq.clone()),
        mu_f_dual: p.mu_v_vac.clone().map(|m| m / sq.clone()),
    })
}

/// Dilution face weights `(g^(1)_k, g^(2)_k)` for `k = 1..=kmax`.
///
/// `g^(2)_k = t^(k/2) mu~_v` and `g^(1)_k = (J t)^(k/2) Q^((2-k)/4) mu~_f`; absent
/// dilution weights give zero sequences.
pub fn dilution_sequences(p: &PottsParams<f64>, kmax: usize) -> (Vec<f64>, Vec<f64>) {
    let mv = p.mu_v_vac.unwrap_or(0.0);
    let mf = p.mu_f_dual.unwrap_or(0.0);
    let g1 = (1..=kmax)
        .map(|k| {
            let k = k as f64;
            (p.j * p.t).powf(k / 2.0) * p.q.powf((2.0 - k) / 4.0) * mf
        })
        .collect();
    let g2 = (1..=kmax).map(|k| p.t.powf(k as f64 / 2.0) * mv).collect();
    (g1, g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn b_examples() {
        assert!((b_from_n(1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((b_from_n(2f64.sqrt()).unwrap() - 0.25).abs() < 1e-15);
        assert!((b_from_n(1e-9).unwrap() - 0.5).abs() < 1e-9);
        assert!(b_from_n(2.0).is_err());
        assert!(b_from_n(0.0).is_err());
        let msg = b_from_n(3.0).unwrap_err().to_string();
        assert!(msg.contains("(0, 2)"), "{msg}");
    }

    #[test]
    fn dictionary_examples() {
        let p = PottsParams::new(1.0, 0.3, 0.5);
        let m = loop_from_potts(&p).unwrap();
        assert!((m.n - 1.0).abs() < 1e-15);
        assert!((m.h1 - (0.5f64 * 0.3).sqrt()).abs() < 1e-15);
        assert!((m.h2 - 0.3f64.sqrt()).abs() < 1e-15);
        assert_eq!((m.u1, m.u2), (1.0, 1.0));

        let m = loop_from_potts(&PottsParams::new(2.0, 1.0, 1.0)).unwrap();
        assert!((m.u1 - 2f64.sqrt()).abs() < 1e-15);
        assert!((m.r - 2f64.sqrt()).abs() < 1e-15);
        assert!((m.u - 2f64.powf(0.25)).abs() < 1e-15);

        let mut p = PottsParams::new(3.0, 1.0, 1.0);
        p.mu_v = 1.0 / 3f64.sqrt();
        let m = loop_from_potts(&p).unwrap();
        assert!((m.u1 - 1.0).abs() < 1e-15 && m.u2 == 1.0);

        assert!(loop_from_potts(&PottsParams::new(4.0, 1.0, 1.0)).is_err());
        assert!(loop_from_potts(&PottsParams::new(2.0, 1.0, 0.0)).is_err());
        assert!(loop_from_potts_exact(&PottsParams::new(ratio(1, 1), ratio(1, 4), ratio(0, 1))).is_ok());
    }

    #[test]
    fn dual_examples() {
        let p = PottsParams::new(ratio(2, 1), ratio(1, 1), ratio(4, 1));
        // sqrt(2) is irrational: the exact dual must refuse.
        assert!(matches!(potts_dual(&p), Err(Error::Irrational(_))));
        let d = potts_dual(&PottsParams::new(2.0, 1.0, 4.0)).unwrap();
        assert!((d.j - 0.5).abs() < 1e-15);
        assert!((d.t - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!((d.j * d.t * d.t - 4.0).abs() < 1e-13);

        let s = PottsParams::new(ratio(9, 4), ratio(5, 7), ratio(3, 2));
        let d = potts_dual(&s).unwrap();
        assert_eq!(d.j, ratio(3, 2));
        assert_eq!(d.t, s.t);

        let q1 = PottsParams::new(ratio(1, 1), ratio(1, 24), ratio(1, 1));
        let d = potts_dual(&q1).unwrap();
        assert_eq!((d.j.clone(), d.t.clone()), (ratio(1, 1), ratio(1, 24)));

        assert_eq!(potts_dual(&PottsParams::new(1.0, 1.0, 0.0)), Err(Error::DualUndefined));
    }

    #[test]
    fn dual_exchanges_colors() {
        let p = PottsParams {
            mu_v: ratio(2, 3),
            mu_f: ratio(5, 4),
            ..PottsParams::new(ratio(9, 4), ratio(4, 9), ratio(27, 8))
        };
        let w = loop_from_potts_exact(&p).unwrap();
        let wd = loop_from_potts_exact(&potts_dual(&p).unwrap()).unwrap();
        assert_eq!((wd.h1, wd.h2), (w.h2, w.h1));
        assert_eq!((wd.u1, wd.u2), (w.u2, w.u1));
    }

    #[test]
    fn json_field_names() {
        let p = PottsParams::new(2.0, 0.5, 1.5);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"Q\"") && s.contains("\"J\"") && s.contains("\"mu_v\""));
        let back: PottsParams = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let m = ModelParams::new(1.0, 1.0, 0.1, 0.2, 1.0, 2.0).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        for f in ["\"n\"", "\"a\"", "\"h1\"", "\"h2\"", "\"u1\"", "\"u2\"", "\"g1_seq\"", "\"g2_seq\"", "\"b\"", "\"r\"", "\"u\""] {
            assert!(s.contains(f), "{f}");
        }
    }

    #[test]
    fn dilution_weights() {
        let mut p = PottsParams::new(4.0 / 9.0 * 9.0 / 4.0, 0.25, 2.0);
        p.mu_v_vac = Some(1.0);
        p.mu_f_dual = Some(1.0);
        let (g1, g2) = dilution_sequences(&p, 3);
        assert!((g2[1] - 0.25).abs() < 1e-15);
        assert!((g1[1] - 0.5).abs() < 1e-15);
    }
}
