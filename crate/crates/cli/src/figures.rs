//! Figure datasets with their checksums.

use crate::datasets::{critical_table, CriticalFlags, Mode};
use crate::output::{sha256_hex, Table};
use crate::svg::{line_plot, Series};
use crate::CliResult;
use std::path::Path;

pub struct Figure {
    pub file: &'static str,
    pub title: &'static str,
    pub mode: Mode,
    pub flags: CriticalFlags,
}

/// The figure datasets, in output order.
pub fn figures() -> Vec<Figure> {
    let range = |s: &str| Some(s.parse().expect("static range"));
    vec![
        Figure {
            file: "fig5_h_vs_r_a1.csv",
            title: "critical h1, h2 vs r (b = 0.4, a = 1, u = 1)",
            mode: Mode::A1,
            flags: CriticalFlags {
                b: Some(0.4),
                r_range: range("0.1:10:0.1"),
                ..Default::default()
            },
        },
        Figure {
            file: "fig7_potts.csv",
            title: "Potts critical couplings vs Q",
            mode: Mode::Potts,
            flags: CriticalFlags {
                q_range: range("0.1:3.9:0.1"),
                ..Default::default()
            },
        },
        Figure {
            file: "fig9_exchange.csv",
            title: "critical h1, h2 vs r (b = 0.4, u = 1)",
            mode: Mode::General,
            flags: CriticalFlags {
                b: Some(0.4),
                a_range: range("1:2:0.5"),
                r_range: range("0.25:4:0.25"),
                ..Default::default()
            },
        },
        Figure {
            file: "fig10_symmetric.csv",
            title: "symmetric bending: h vs a (b = 0.4, u = 1)",
            mode: Mode::Symmetric,
            flags: CriticalFlags {
                b: Some(0.4),
                a_range: range("0.1:3:0.05"),
                ..Default::default()
            },
        },
        Figure {
            file: "fig11_amax.csv",
            title: "a_max vs n",
            mode: Mode::Amax,
            flags: CriticalFlags {
                n_range: range("0.05:1.95:0.05"),
                ..Default::default()
            },
        },
    ]
}

pub struct Written {
    pub file: String,
    pub sha256: String,
    pub table: Table,
}

/// Writes every figure CSV and SVG plus `checksums.sha256` into `dir`.
/// Call inside a rayon pool to bound the worker count.
pub fn write_all(dir: &Path) -> CliResult<Vec<Written>> {
    let mut out = Vec::new();
    let mut sums = String::new();
    for fig in figures() {
        let cfg = fig.flags.resolve(fig.mode)?;
        let table = critical_table(fig.mode, &cfg);
        let bytes = table.to_csv_bytes()?;
        std::fs::write(dir.join(fig.file), &bytes)?;
        let svg = plot(&table, fig.mode, fig.title);
        std::fs::write(dir.join(fig.file.replace(".csv", ".svg")), svg)?;
        let sha = sha256_hex(&bytes);
        sums.push_str(&format!("{sha}  {}\n", fig.file));
        out.push(Written {
            file: fig.file.to_string(),
            sha256: sha,
            table,
        });
    }
    std::fs::write(dir.join("checksums.sha256"), sums)?;
    Ok(out)
}

pub fn plot(table: &Table, mode: Mode, title: &str) -> String {
    let (x, ys) = crate::datasets::plot_columns(mode);
    let xs = table.numbers(x);
    // one curve per value of `a` in the general mode
    let groups: Vec<f64> = if mode == Mode::General {
        let mut a = table.numbers("a");
        a.dedup();
        a
    } else {
        vec![f64::NAN]
    };
    let a_col = table.numbers("a");
    let mut labels = Vec::new();
    let mut points = Vec::new();
    for g in &groups {
        for y in ys {
            let yv = table.numbers(y);
            let pts: Vec<(f64, f64)> = xs
                .iter()
                .zip(&yv)
                .enumerate()
                .filter(|(i, _)| g.is_nan() || a_col[*i] == *g)
                .map(|(_, (x, y))| (*x, *y))
                .collect();
            labels.push(if g.is_nan() { y.to_string() } else { format!("{y} (a={g})") });
            points.push(pts);
        }
    }
    let series: Vec<Series> = labels
        .iter()
        .zip(points)
        .map(|(l, p)| Series { label: l, points: p })
        .collect();
    line_plot(title, x, "", &series)
}

/// Sign of `(h1 - h2)(r - 1)` on rows with the given `a` and `r != 1`;
/// `Some(s)` when all such rows agree.
pub fn exchange_sign(table: &Table, a: f64) -> Option<f64> {
    let (av, rv, h1, h2) = (table.numbers("a"), table.numbers("r"), table.numbers("h1"), table.numbers("h2"));
    let signs: Vec<f64> = (0..av.len())
        .filter(|&i| (av[i] - a).abs() < 1e-12 && (rv[i] - 1.0).abs() > 1e-12)
        .map(|i| ((h1[i] - h2[i]) * (rv[i] - 1.0)).signum())
        .collect();
    let first = *signs.first()?;
    signs.iter().all(|s| *s == first && s.is_finite()).then_some(first)
}
