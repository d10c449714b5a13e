//! Critical-variety datasets. One row per grid point; points that cannot be
//! solved keep their row with regime `unsolved` and NaN values.

use crate::grid::Range;
use crate::output::{Cell, Table};
use crate::{CliError, CliResult};
use rayon::prelude::*;
use std::f64::consts::PI;
use twofold_core::critical::{
    a_max, critical_line_n0, critical_point_a1, critical_point_general, cuts_n0, edge_coefficient_symmetric,
    h_pair_n0, kappa_b, potts_critical, reconstruct, symmetric_bending, w_pair_n0, CriticalPoint, Regime,
};
use twofold_core::model::{b_from_n, n_from_b};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    A1,
    General,
    Symmetric,
    Potts,
    Amax,
    Nzero,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::A1 => "a1",
            Mode::General => "general",
            Mode::Symmetric => "symmetric",
            Mode::Potts => "potts",
            Mode::Amax => "amax",
            Mode::Nzero => "nzero",
        }
    }
}

/// Flags of the `critical` command after defaults are applied.
#[derive(Clone, Debug)]
pub struct CriticalConfig {
    pub b: f64,
    pub u: f64,
    pub r_values: Vec<f64>,
    pub a_values: Vec<f64>,
    pub q_values: Vec<f64>,
    pub n_values: Vec<f64>,
}

/// Raw flags; `None` means "use the mode default".
#[derive(Clone, Debug, Default)]
pub struct CriticalFlags {
    pub b: Option<f64>,
    pub n: Option<f64>,
    pub u: Option<f64>,
    pub r: Option<f64>,
    pub r_range: Option<Range>,
    pub a: Option<f64>,
    pub a_range: Option<Range>,
    pub q_range: Option<Range>,
    pub n_range: Option<Range>,
}

impl CriticalFlags {
    pub fn resolve(&self, mode: Mode) -> CliResult<CriticalConfig> {
        let b = match (self.b, self.n) {
            (Some(_), Some(_)) => return Err(CliError::Config("give --b or --n, not both".into())),
            (Some(b), None) => b,
            (None, Some(n)) => b_from_n(n).map_err(|e| CliError::Config(e.to_string()))?,
            (None, None) => 0.4,
        };
        if !(b > 0.0 && b <= 0.5) {
            return Err(CliError::Config(format!("--b must be in (0, 1/2], got {b}")));
        }
        let u = self.u.unwrap_or(1.0);
        if !(u > 0.0 && u.is_finite()) {
            return Err(CliError::Config(format!("--u must be positive, got {u}")));
        }
        let pick = |single: Option<f64>, range: Option<Range>, default: &str, name: &str| -> CliResult<Vec<f64>> {
            match (single, range) {
                (Some(_), Some(_)) => Err(CliError::Config(format!("give --{name} or --{name}-range, not both"))),
                (Some(x), None) => Ok(vec![x]),
                (None, Some(r)) => Ok(r.values()),
                (None, None) => Ok(default.parse::<Range>()?.values()),
            }
        };
        let r_default = match mode {
            Mode::General => "0.2:5:0.2",
            _ => "0.1:10:0.1",
        };
        let a_default = match mode {
            Mode::Symmetric => "0.5:3:0.05",
            Mode::Nzero => "0.5:2:0.5",
            _ => "1.7:1.7:1",
        };
        let r_values = pick(self.r, self.r_range, r_default, "r")?;
        let a_values = pick(self.a, self.a_range, a_default, "a")?;
        if r_values.iter().chain(&a_values).any(|x| !(*x > 0.0)) {
            return Err(CliError::Config("--r and --a values must be positive".into()));
        }
        let q_values = match self.q_range {
            Some(r) => r.values(),
            None => "0.1:3.9:0.1".parse::<Range>()?.values(),
        };
        if q_values.iter().any(|q| !(*q > 0.0 && *q < 4.0)) {
            return Err(CliError::Config("--Q-range must lie in (0, 4)".into()));
        }
        let n_values = match self.n_range {
            Some(r) => r.values(),
            None => "0.05:1.95:0.05".parse::<Range>()?.values(),
        };
        if n_values.iter().any(|n| !(*n > 0.0 && *n < 2.0)) {
            return Err(CliError::Config("--n-range must lie in (0, 2)".into()));
        }
        Ok(CriticalConfig {
            b,
            u,
            r_values,
            a_values,
            q_values,
            n_values,
        })
    }
}

const POINT_COLUMNS: [&str; 18] = [
    "b", "n", "a", "u", "r", "w1_re", "w1_im", "w2_re", "w2_im", "h1", "h2", "g1m", "g1p", "g2m", "g2p", "branch", "regime",
    "residual",
];

/// Residual of a critical point: the `a = 1` ratio equation, or the mismatch
/// between the point and the weights reconstructed from its `(w1, w2)`.
pub fn point_residual(cp: &CriticalPoint) -> f64 {
    if cp.a == 1.0 {
        let w = cp.w1.re;
        return (kappa_b(cp.b, w) / kappa_b(cp.b, 1.0 - w) - cp.r).abs() / cp.r;
    }
    match reconstruct(cp.b, cp.u1(), cp.u2(), cp.w1, cp.w2) {
        Ok(rec) => {
            let scale = |x: f64| x.abs().max(1.0);
            let da = (rec.a.re.abs() - cp.a).abs() / scale(cp.a);
            let dh = (rec.h1.norm() - cp.h1).abs().max((rec.h2.norm() - cp.h2).abs());
            da.max(dh).max(rec.extra.norm())
        }
        Err(_) => f64::NAN,
    }
}

fn branch(cp: &CriticalPoint) -> &'static str {
    if cp.w1.im != 0.0 {
        "imaginary"
    } else {
        "real"
    }
}

fn point_row(cp: &CriticalPoint) -> Vec<Cell> {
    vec![
        cp.b.into(),
        cp.n().into(),
        cp.a.into(),
        cp.u.into(),
        cp.r.into(),
        cp.w1.re.into(),
        cp.w1.im.into(),
        cp.w2.re.into(),
        cp.w2.im.into(),
        cp.h1.into(),
        cp.h2.into(),
        cp.g1m.into(),
        cp.g1p.into(),
        cp.g2m.into(),
        cp.g2p.into(),
        branch(cp).into(),
        cp.regime.as_str().into(),
        point_residual(cp).into(),
    ]
}

fn unsolved_row(b: f64, a: f64, u: f64, r: f64) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![b.into(), n_from_b(b).into(), a.into(), u.into(), r.into()];
    row.extend((0..10).map(|_| Cell::Num(f64::NAN)));
    row.extend(["none".into(), "unsolved".into(), Cell::Num(f64::NAN)]);
    row
}

fn points_table(rows: Vec<Vec<Cell>>) -> Table {
    let mut t = Table::new(&POINT_COLUMNS);
    rows.into_iter().for_each(|r| t.push(r));
    t
}

/// Builds the dataset of one mode. Call inside a rayon pool to bound the
/// worker count; rows come out in grid order.
pub fn critical_table(mode: Mode, cfg: &CriticalConfig) -> Table {
    let (b, u) = (cfg.b, cfg.u);
    match mode {
        Mode::A1 => points_table(
            cfg.r_values
                .par_iter()
                .map(|&r| critical_point_a1(u, r, b).map_or_else(|_| unsolved_row(b, 1.0, u, r), |cp| point_row(&cp)))
                .collect(),
        ),
        Mode::General => {
            let grid: Vec<(f64, f64)> = cfg
                .a_values
                .iter()
                .flat_map(|&a| cfg.r_values.iter().map(move |&r| (a, r)))
                .collect();
            points_table(
                grid.par_iter()
                    .map(|&(a, r)| {
                        critical_point_general(u, r, a, b).map_or_else(|_| unsolved_row(b, a, u, r), |cp| point_row(&cp))
                    })
                    .collect(),
            )
        }
        Mode::Symmetric => {
            let mut t = Table::new(&[
                "b", "n", "a", "u", "w1_re", "w1_im", "h", "H", "branch", "regime", "residual",
            ]);
            let rows: Vec<Vec<Cell>> = cfg
                .a_values
                .par_iter()
                .map(|&a| match symmetric_bending(a, b, u) {
                    Ok(cp) => {
                        let big_h = (2.0 - cp.n()) * (1.0 - a * a).powi(2) * cp.h1 * cp.h1 * u;
                        vec![
                            b.into(),
                            cp.n().into(),
                            a.into(),
                            u.into(),
                            cp.w1.re.into(),
                            cp.w1.im.into(),
                            cp.h1.into(),
                            big_h.into(),
                            branch(&cp).into(),
                            cp.regime.as_str().into(),
                            point_residual(&cp).into(),
                        ]
                    }
                    Err(_) => {
                        let nan = Cell::Num(f64::NAN);
                        vec![
                            b.into(),
                            n_from_b(b).into(),
                            a.into(),
                            u.into(),
                            nan.clone(),
                            nan.clone(),
                            nan.clone(),
                            nan.clone(),
                            "none".into(),
                            "unsolved".into(),
                            nan,
                        ]
                    }
                })
                .collect();
            rows.into_iter().for_each(|r| t.push(r));
            t
        }
        Mode::Potts => {
            let mut t = Table::new(&[
                "Q", "n", "b", "t_c", "J_c", "K_c", "t_selfdual", "J_selfdual", "regime", "residual",
            ]);
            let rows: Vec<Vec<Cell>> = cfg
                .q_values
                .par_iter()
                .map(|&q| {
                    let n = q.sqrt();
                    let bq = (n / 2.0).acos() / PI;
                    match potts_critical(q).and_then(|pc| Ok((pc, critical_point_a1(n.sqrt(), n, bq)?))) {
                        Ok((pc, cp)) => vec![
                            q.into(),
                            n.into(),
                            bq.into(),
                            pc.t_c.into(),
                            pc.j_c.into(),
                            pc.k_c.into(),
                            pc.t_selfdual.into(),
                            pc.j_selfdual.into(),
                            cp.regime.as_str().into(),
                            point_residual(&cp).into(),
                        ],
                        Err(_) => {
                            let mut row: Vec<Cell> = vec![q.into(), n.into(), bq.into()];
                            row.extend((0..5).map(|_| Cell::Num(f64::NAN)));
                            row.extend(["unsolved".into(), Cell::Num(f64::NAN)]);
                            row
                        }
                    }
                })
                .collect();
            rows.into_iter().for_each(|r| t.push(r));
            t
        }
        Mode::Amax => {
            let mut t = Table::new(&["n", "b", "w1_max", "a_max", "regime", "residual"]);
            let rows: Vec<Vec<Cell>> = cfg
                .n_values
                .par_iter()
                .map(|&n| {
                    let bn = (n / 2.0).acos() / PI;
                    match a_max(bn) {
                        Ok((w, a)) => {
                            let res = if w < 1.0 { edge_coefficient_symmetric(bn, w).abs() } else { 0.0 };
                            vec![
                                n.into(),
                                bn.into(),
                                w.into(),
                                a.into(),
                                Regime::DiluteBoundary.as_str().into(),
                                res.into(),
                            ]
                        }
                        Err(_) => vec![
                            n.into(),
                            bn.into(),
                            Cell::Num(f64::NAN),
                            Cell::Num(f64::NAN),
                            "unsolved".into(),
                            Cell::Num(f64::NAN),
                        ],
                    }
                })
                .collect();
            rows.into_iter().for_each(|r| t.push(r));
            t
        }
        Mode::Nzero => {
            let mut t = Table::new(&[
                "a", "u", "r", "w1", "w2", "h1", "h2", "g1m", "g1p", "g2m", "g2p", "regime", "residual",
            ]);
            for &a in &cfg.a_values {
                for &r in &cfg.r_values {
                    let (w1, w2) = w_pair_n0(a, r);
                    let (h1, h2) = h_pair_n0(u, r, a);
                    let c = cuts_n0(u, r);
                    let (u1, u2) = (u * r.sqrt(), u / r.sqrt());
                    let res = critical_line_n0(u1, u2, a, h1, h2).abs();
                    t.push(vec![
                        a.into(),
                        u.into(),
                        r.into(),
                        w1.into(),
                        w2.into(),
                        h1.into(),
                        h2.into(),
                        c[0].into(),
                        c[1].into(),
                        c[2].into(),
                        c[3].into(),
                        Regime::DenseGeneric.as_str().into(),
                        res.into(),
                    ]);
                }
            }
            t
        }
    }
}

/// Columns drawn in the optional SVG, as `(x, [y...])`.
pub fn plot_columns(mode: Mode) -> (&'static str, &'static [&'static str]) {
    match mode {
        Mode::A1 | Mode::General | Mode::Nzero => ("r", &["h1", "h2"]),
        Mode::Symmetric => ("a", &["h"]),
        Mode::Potts => ("Q", &["t_c", "J_c", "t_selfdual", "J_selfdual"]),
        Mode::Amax => ("n", &["a_max"]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: Mode, f: CriticalFlags) -> CriticalConfig {
        f.resolve(mode).unwrap()
    }

    #[test]
    fn potts_row_at_q1() {
        let c = cfg(
            Mode::Potts,
            CriticalFlags {
                q_range: Some("1:1:1".parse().unwrap()),
                ..Default::default()
            },
        );
        let t = critical_table(Mode::Potts, &c);
        assert!((t.numbers("t_c")[0] - 1.0 / 24.0).abs() < 1e-12);
        assert!((t.numbers("J_c")[0] - 1.0).abs() < 1e-12);
        assert!(t.numbers("residual")[0] < 1e-12);
    }

    #[test]
    fn residuals_are_small_on_solved_points() {
        let c = cfg(
            Mode::General,
            CriticalFlags {
                a: Some(1.4),
                r_range: Some("0.5:2:0.5".parse().unwrap()),
                ..Default::default()
            },
        );
        let t = critical_table(Mode::General, &c);
        for r in t.numbers("residual") {
            assert!(r < 1e-9, "{r}");
        }
        let c = cfg(
            Mode::Symmetric,
            CriticalFlags {
                a_range: Some("0.2:1.6:0.7".parse().unwrap()),
                ..Default::default()
            },
        );
        let t = critical_table(Mode::Symmetric, &c);
        let col = t.column("branch").unwrap();
        assert_eq!(t.rows[0][col], Cell::Text("imaginary".into()));
        assert_eq!(t.rows[1][col], Cell::Text("real".into()));
    }

    #[test]
    fn conflicting_flags_are_rejected() {
        let f = CriticalFlags {
            b: Some(0.3),
            n: Some(1.0),
            ..Default::default()
        };
        assert!(f.resolve(Mode::A1).is_err());
        let f = CriticalFlags {
            q_range: Some("1:5:1".parse().unwrap()),
            ..Default::default()
        };
        assert!(f.resolve(Mode::Potts).is_err());
    }
}
