//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.
//!
//! Every tolerance is pinned here and compared against the tolerance the
//! verify suites report, so loosening a check in the library fails this test.
//! Pass/fail is recomputed from the measured values, not taken from the suite.

use std::collections::BTreeSet;
use std::time::Instant;
use twofold_cli::figures::{exchange_sign, write_all};
use twofold_cli::output::Table;
use twofold_cli::verify::{run, Check, Suite, SuiteReport, VerifyConfig};

const BIJECTION_SECONDS: f64 = 5.0;
const SOLVER_SECONDS: f64 = 120.0;

const ZETA_TOL: f64 = 1e-12;
const ZETA_TRIG_TOL: f64 = 1e-8;
const EDGE_TOL: f64 = 1e-10;
const FUNCTIONAL_TOL: f64 = 1e-8;
const LARGE_X_TOL: f64 = 1e-6;
const MOMENT_TOL: f64 = 1e-6;
const SYMH_TOL: f64 = 1e-12;
const POTTS_TOL: f64 = 1e-12;
const NZERO_TOL: f64 = 1e-3;
const CRITICAL_LINE_TOL: f64 = 1e-12;
const ISING_H_TOL: f64 = 1e-10;
const AMAX_TOL: f64 = 1e-8;
const W1MAX_TOL: f64 = 1e-10;
const BRANCH_TOL: f64 = 1e-12;

/// `T = 8` comparisons that cannot meet `ZETA_TRIG_TOL`: the gap to the
/// trigonometric limit decays like `exp(-2 pi b T)` and is still above
/// 1e-8 for small `b`.
const KNOWN_TRIG_FAILURES: [&str; 2] = ["b=0.1000", "b=0.3333"];

const GOLDEN: &str = include_str!("golden.sha256");

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

/// Checks whose name starts with `prefix`, after asserting the suite used
/// the pinned tolerance for each of them.
fn pinned<'a>(rep: &'a SuiteReport, prefix: &str, tol: f64) -> Vec<&'a Check> {
    let found: Vec<&Check> = rep.checks.iter().filter(|c| c.name.starts_with(prefix)).collect();
    assert!(!found.is_empty(), "[{}] no check named {prefix:?}", rep.suite);
    for c in &found {
        assert_eq!(c.tol, tol, "[{}] {} runs at tol {:e}, pinned {tol:e}", rep.suite, c.name, c.tol);
    }
    found
}

fn worst(checks: &[&Check]) -> f64 {
    checks.iter().map(|c| c.value).fold(0.0, f64::max)
}

fn all_within(checks: &[&Check], tol: f64) -> bool {
    checks.iter().all(|c| c.value.is_finite() && c.value <= tol)
}

fn suite(s: Suite) -> SuiteReport {
    run(s, &VerifyConfig::default()).unwrap_or_else(|e| panic!("{} suite failed to run: {e}", s.name()))
}

/// Suites made only of exact (zero-tolerance) comparisons.
fn exact_suite(s: Suite) -> (bool, String) {
    let rep = suite(s);
    for c in &rep.checks {
        assert_eq!(c.tol, 0.0, "[{}] {} should be exact", rep.suite, c.name);
    }
    let bad: Vec<&str> = rep.checks.iter().filter(|c| c.value != 0.0).map(|c| c.name.as_str()).collect();
    (bad.is_empty(), format!("{} exact checks, mismatches: {bad:?}", rep.checks.len()))
}

fn criterion_bijection() -> Outcome {
    let start = Instant::now();
    let (ok, detail) = exact_suite(Suite::Bijection);
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        id: 1,
        title: "bijection and rooted-map counts for E <= 3",
        passed: ok && secs < BIJECTION_SECONDS,
        detail: format!("{detail}; {secs:.2}s (limit {BIJECTION_SECONDS}s)"),
    }
}

fn criterion_exact(id: usize, title: &'static str, s: Suite) -> Outcome {
    let (passed, detail) = exact_suite(s);
    Outcome { id, title, passed, detail }
}

fn criterion_elliptic() -> Outcome {
    let rep = suite(Suite::Elliptic);
    let per1 = pinned(&rep, "zeta(v+1) = e^(i pi b) zeta(v)", ZETA_TOL);
    let per2 = pinned(&rep, "zeta(v+2iT) = zeta(v)", ZETA_TOL);
    let res = pinned(&rep, "residue at 0", ZETA_TOL);
    assert_eq!(per1.len(), 9);
    assert_eq!(per2.len(), 9);
    assert_eq!(res.len(), 9);
    let trig = pinned(&rep, "zeta T=8 vs trigonometric", ZETA_TRIG_TOL);
    let trig_fail: BTreeSet<String> = trig
        .iter()
        .filter(|c| !(c.value <= ZETA_TRIG_TOL))
        .map(|c| c.name.rsplit(' ').next().unwrap().to_string())
        .collect();
    let expected: BTreeSet<String> = KNOWN_TRIG_FAILURES.iter().map(|s| s.to_string()).collect();
    assert_eq!(trig_fail, expected, "T=8 trigonometric failures changed");
    let core_ok = all_within(&per1, ZETA_TOL) && all_within(&per2, ZETA_TOL) && all_within(&res, ZETA_TOL);
    assert!(core_ok, "periodicity or residue out of tolerance");
    let trig_detail: Vec<String> = trig.iter().map(|c| format!("{} {:.2e}", c.name.rsplit(' ').next().unwrap(), c.value)).collect();
    Outcome {
        id: 5,
        title: "zeta periodicity, residue and T=8 trigonometric limit",
        passed: core_ok && trig_fail.is_empty(),
        detail: format!(
            "periodicity {:.1e}, residue {:.1e} (tol {ZETA_TOL:e}); T=8 vs trig [{}] (tol {ZETA_TRIG_TOL:e})",
            worst(&per1).max(worst(&per2)),
            worst(&res),
            trig_detail.join(", ")
        ),
    }
}

fn criterion_solver() -> Outcome {
    let start = Instant::now();
    let rep = suite(Suite::Solver);
    let secs = start.elapsed().as_secs_f64();
    let edge = pinned(&rep, "edge conditions", EDGE_TOL);
    let func = pinned(&rep, "functional equations", FUNCTIONAL_TOL);
    let cont = pinned(&rep, "continuation relations", FUNCTIONAL_TOL);
    let large = pinned(&rep, "x W(x) -> u_i", LARGE_X_TOL);
    let mom = pinned(&rep, "F_l (l <= 4) vs series", MOMENT_TOL);
    assert_eq!(edge.len(), 5, "five parameter sets");
    let positive = rep.checks.iter().filter(|c| c.name.starts_with("density positive")).all(|c| c.passed);
    let ok = all_within(&edge, EDGE_TOL)
        && all_within(&func, FUNCTIONAL_TOL)
        && all_within(&cont, FUNCTIONAL_TOL)
        && all_within(&large, LARGE_X_TOL)
        && all_within(&mom, MOMENT_TOL)
        && positive
        && secs < SOLVER_SECONDS;
    Outcome {
        id: 6,
        title: "finite-T solver on five parameter sets",
        passed: ok,
        detail: format!(
            "edge {:.1e}, functional {:.1e}, continuation {:.1e}, xW {:.1e}, moments {:.1e}; {secs:.2}s",
            worst(&edge),
            worst(&func),
            worst(&cont),
            worst(&large),
            worst(&mom)
        ),
    }
}

fn criterion_critical() -> Outcome {
    let rep = suite(Suite::Critical);
    let symh = pinned(&rep, "r = 1, a = 1: h =", SYMH_TOL);
    let potts = pinned(&rep, "Potts Q = 1", POTTS_TOL);
    let nzero = pinned(&rep, "n -> 0: ", NZERO_TOL);
    let line = pinned(&rep, "n -> 0 point lies on the critical line", CRITICAL_LINE_TOL);
    assert_eq!(nzero.len(), 3);
    let ok = all_within(&symh, SYMH_TOL)
        && all_within(&potts, POTTS_TOL)
        && all_within(&nzero, NZERO_TOL)
        && all_within(&line, CRITICAL_LINE_TOL);
    Outcome {
        id: 7,
        title: "critical closed forms",
        passed: ok,
        detail: format!(
            "symmetric h {:.1e}, Potts Q=1 {:.1e}, n->0 {:.1e}, critical line {:.1e}",
            worst(&symh),
            worst(&potts),
            worst(&nzero),
            worst(&line)
        ),
    }
}

fn criterion_ising() -> Outcome {
    let rep = suite(Suite::Ising);
    let h = pinned(&rep, "H(a=", ISING_H_TOL);
    assert_eq!(h.len(), 4);
    let amax = pinned(&rep, "a_max(1/3) = 4", AMAX_TOL);
    let w1 = pinned(&rep, "w1_max(1/3) = 3/4", W1MAX_TOL);
    let ng = pinned(&rep, "non-generic branch = 10/9", BRANCH_TOL);
    let g = pinned(&rep, "generic branch = 10/9", BRANCH_TOL);
    let ok = all_within(&h, ISING_H_TOL)
        && all_within(&amax, AMAX_TOL)
        && all_within(&w1, W1MAX_TOL)
        && all_within(&ng, BRANCH_TOL)
        && all_within(&g, BRANCH_TOL);
    Outcome {
        id: 8,
        title: "Ising closed forms and the a_max endpoint",
        passed: ok,
        detail: format!(
            "H {:.1e}, a_max {:.1e}, w1_max {:.1e}, branches {:.1e}",
            worst(&h),
            worst(&amax),
            worst(&w1),
            worst(&ng).max(worst(&g))
        ),
    }
}

fn row_where(t: &Table, col: &str, v: f64) -> Vec<f64> {
    let i = t.column(col).unwrap();
    let row = t
        .rows
        .iter()
        .find(|r| (r[i].render().parse::<f64>().unwrap() - v).abs() < 1e-9)
        .unwrap_or_else(|| panic!("no row with {col} = {v}"));
    row.iter().map(|c| c.render().parse::<f64>().unwrap_or(f64::NAN)).collect()
}

fn criterion_figures() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let written = write_all(dir.path()).unwrap();
    let golden: Vec<(&str, &str)> = GOLDEN
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (sha, file) = l.split_once("  ").unwrap();
            (file, sha)
        })
        .collect();
    assert_eq!(written.len(), golden.len());
    let mut mismatched = Vec::new();
    for (w, (file, sha)) in written.iter().zip(&golden) {
        assert_eq!(w.file, *file);
        let on_disk = std::fs::read(dir.path().join(&w.file)).unwrap();
        assert_eq!(twofold_cli::output::sha256_hex(&on_disk), w.sha256);
        if w.sha256 != *sha {
            mismatched.push(w.file.clone());
        }
    }
    let sums = std::fs::read_to_string(dir.path().join("checksums.sha256")).unwrap();
    assert_eq!(sums.trim(), GOLDEN.trim());

    let table = |name: &str| &written.iter().find(|w| w.file == name).unwrap().table;
    let potts = table("fig7_potts.csv");
    let q1 = row_where(potts, "Q", 1.0);
    let (tc, jc) = (q1[potts.column("t_c").unwrap()], q1[potts.column("J_c").unwrap()]);
    let potts_ok = (tc - 1.0 / 24.0).abs() <= POTTS_TOL && (jc - 1.0).abs() <= POTTS_TOL;

    let amax = table("fig11_amax.csv");
    let n1 = row_where(amax, "n", 1.0);
    let (a_max, w1_max) = (n1[amax.column("a_max").unwrap()], n1[amax.column("w1_max").unwrap()]);
    let amax_ok = (a_max - 4.0).abs() <= AMAX_TOL && (w1_max - 0.75).abs() <= W1MAX_TOL;

    let ex = table("fig9_exchange.csv");
    let (s1, s2) = (exchange_sign(ex, 1.0), exchange_sign(ex, 2.0));
    let exchange_ok = matches!((s1, s2), (Some(x), Some(y)) if x != y);

    Outcome {
        id: 10,
        title: "figure datasets, checksums and anchors",
        passed: mismatched.is_empty() && potts_ok && amax_ok && exchange_ok,
        detail: format!(
            "checksum mismatches {mismatched:?}; Q=1 t_c-1/24 {:.1e}, J_c-1 {:.1e}; n=1 a_max-4 {:.1e}; sign (h1-h2)(r-1) a=1 {s1:?}, a=2 {s2:?}",
            tc - 1.0 / 24.0,
            jc - 1.0,
            a_max - 4.0
        ),
    }
}

fn main() {
    let outcomes = vec![
        criterion_bijection(),
        criterion_exact(2, "spin and cluster partition functions agree for Q = 1, 2, 3", Suite::Partition),
        criterion_exact(3, "series identity through grade 6 at Q = 1 and 9/4", Suite::Series),
        criterion_exact(4, "ring closed form against necklace sums, k + k' <= 8", Suite::Ring),
        criterion_elliptic(),
        criterion_solver(),
        criterion_critical(),
        criterion_ising(),
        criterion_exact(9, "duality on edge/self-loop and triangle/theta", Suite::Duality),
        criterion_figures(),
    ];
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2}: {} ({})", o.id, o.title, o.detail);
    }
    let failed: BTreeSet<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    // criterion 5 carries the unattainable T=8 comparisons at small b
    assert_eq!(failed, BTreeSet::from([5]), "unexpected acceptance failures");
    println!(
        "acceptance: {}/{} criteria pass; known failure: criterion 5 (T=8 trigonometric limit at b = 0.1, 1/3)",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
}
