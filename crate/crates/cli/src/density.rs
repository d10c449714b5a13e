//! Density tables from a solved parameter point.

use crate::output::Table;
use crate::{CliError, CliResult};
use serde::{Deserialize, Serialize};
use twofold_core::critical::{critical_point_a1, critical_point_general, symmetric_bending, CriticalPoint};
use twofold_core::model::ModelParams;
use twofold_core::solver::{critical_solution, decoupled_seed, solve_cuts, solve_cuts_multi, OmegaSolution};

/// Input of the `density` command: either loop weights, solved with finite
/// `T`, or a critical point `(b, a, r, u)` solved at `T = inf`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DensityInput {
    Critical { critical: CriticalSpec },
    Weights(WeightsSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSpec {
    pub n: f64,
    pub a: f64,
    pub h1: f64,
    pub h2: f64,
    pub u1: f64,
    pub u2: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalSpec {
    pub b: f64,
    pub a: f64,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "one")]
    pub u: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub params: ModelParams,
    pub critical: bool,
    pub cuts: [f64; 4],
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub edge_residual: f64,
    pub iterations: usize,
    pub positive: bool,
    pub min_rho1: f64,
    pub min_rho2: f64,
    /// Fitted `e` in `rho ~ (x - edge)^e` at a simple edge.
    pub edge_exponent: f64,
    /// Fitted decay rate at the merged edge (critical points only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub merged_edge_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_rate: Option<f64>,
    /// Distinct Newton solutions found from the decoupled seed and two
    /// rescaled copies (finite `T` only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
}

pub fn parse_input(text: &str) -> CliResult<DensityInput> {
    let src = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).map_err(|e| CliError::Config(format!("--params-json {text}: {e}")))?
    };
    serde_json::from_str(&src).map_err(|e| CliError::Config(format!("--params-json: {e}")))
}

fn critical_point(c: &CriticalSpec) -> CliResult<CriticalPoint> {
    if !(c.b > 0.0 && c.b <= 0.5 && c.a > 0.0 && c.r > 0.0 && c.u > 0.0) {
        return Err(CliError::Config(format!("critical point {c:?} out of range")));
    }
    let cp = if c.a == 1.0 {
        critical_point_a1(c.u, c.r, c.b)
    } else if c.r == 1.0 {
        symmetric_bending(c.a, c.b, c.u)
    } else {
        critical_point_general(c.u, c.r, c.a, c.b)
    };
    Ok(cp?)
}

/// Solves and scans the density with `samples` points per cut.
pub fn run(input: &DensityInput, samples: usize) -> CliResult<(DensityReport, Table)> {
    if samples < 8 {
        return Err(CliError::Config(format!("--samples must be at least 8, got {samples}")));
    }
    let (sol, residual, iterations, basins, regime, critical): (OmegaSolution, f64, usize, Option<usize>, Option<String>, bool) =
        match input {
            DensityInput::Weights(w) => {
                let p = ModelParams::new(w.n, w.a, w.h1, w.h2, w.u1, w.u2).map_err(|e| CliError::Config(e.to_string()))?;
                let solved = solve_cuts(&p)?;
                let seed = decoupled_seed(&p);
                let seeds = [seed, seed.map(|x| 0.8 * x), seed.map(|x| 1.25 * x)];
                let basins = solve_cuts_multi(&p, &seeds).len().max(1);
                (solved.solution, solved.residual, solved.iterations, Some(basins), None, false)
            }
            DensityInput::Critical { critical } => {
                let cp = critical_point(critical)?;
                let sol = critical_solution(&cp)?;
                let res = sol.edge_values().iter().map(|z| z.norm()).fold(0.0, f64::max);
                (sol, res, 0, None, Some(cp.regime.as_str().to_string()), true)
            }
        };
    let scan = sol.density_scan(samples);
    let f = &sol.frame;
    let b = sol.params.b;
    let report = DensityReport {
        params: sol.params.clone(),
        critical,
        cuts: [f.g1m, f.g1p, f.g2m, f.g2p],
        t: f.t.is_finite().then_some(f.t),
        edge_residual: residual,
        iterations,
        positive: scan.positive,
        min_rho1: scan.min_rho1,
        min_rho2: scan.min_rho2,
        edge_exponent: sol.edge_exponent(),
        merged_edge_rate: critical.then(|| sol.merged_edge_rate(3.0, 6.0)),
        expected_rate: critical.then_some(2.0 - b),
        basins,
        regime,
    };
    let mut table = Table::new(&["t", "x1", "rho1", "y2", "rho2"]);
    for r in &scan.rows {
        table.push(vec![r.t.into(), r.x1.into(), r.rho1.into(), r.y2.into(), r.rho2.into()]);
    }
    Ok((report, table))
}
