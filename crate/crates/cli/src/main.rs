use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use twofold_cli::datasets::{critical_table, CriticalFlags, Mode};
use twofold_cli::grid::Range;
use twofold_cli::output::{resolve_out_dir, OUT_DIR_ENV};
use twofold_cli::verify::{self, Suite, VerifyConfig};
use twofold_cli::{density, figures, with_workers, CliResult};

/// Twofold loop model on random planar maps: exact checks, critical
/// varieties and spectral densities.
#[derive(Parser)]
#[command(name = "twofold", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Bijection,
    Partition,
    Series,
    Ring,
    Elliptic,
    Solver,
    Critical,
    Ising,
    Duality,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exit 0 if every check passes, 1 otherwise.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Largest edge count of the enumerated maps.
        #[arg(long, default_value_t = 3)]
        max_edges: usize,
        /// Triangle grade of the series identity.
        #[arg(long, default_value_t = 6)]
        order: usize,
        /// Restrict Potts-based suites to one rational Q.
        #[arg(long = "Q")]
        q: Option<String>,
        /// Ring table size k + k' <= kmax.
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Scan the non-generic critical variety and write a dataset.
    Critical {
        #[arg(value_enum)]
        mode: Mode,
        #[arg(long)]
        b: Option<f64>,
        /// Loop weight, as an alternative to --b.
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        u: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        /// lo:hi:step
        #[arg(long)]
        r_range: Option<Range>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        a_range: Option<Range>,
        #[arg(long = "Q-range")]
        q_range: Option<Range>,
        #[arg(long)]
        n_range: Option<Range>,
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write an SVG line plot.
        #[arg(long)]
        svg: bool,
        /// Worker threads (default: one per logical core).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Solve one parameter point and tabulate its spectral densities.
    Density {
        /// Inline JSON or a path: {"n","a","h1","h2","u1","u2"} or {"critical":{"b","a","r","u"}}.
        #[arg(long)]
        params_json: String,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
    /// Regenerate every figure dataset with checksums.
    Figures {
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("twofold: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Command) -> CliResult<u8> {
    match cmd {
        Command::Verify {
            suite,
            max_edges,
            order,
            q,
            kmax,
            json,
        } => {
            let cfg = VerifyConfig {
                max_edges,
                order,
                q: q.as_deref().map(verify::parse_q).transpose()?,
                kmax,
            };
            cfg.validate()?;
            let suites: Vec<Suite> = match suite {
                SuiteArg::All => Suite::ALL.to_vec(),
                SuiteArg::Bijection => vec![Suite::Bijection],
                SuiteArg::Partition => vec![Suite::Partition],
                SuiteArg::Series => vec![Suite::Series],
                SuiteArg::Ring => vec![Suite::Ring],
                SuiteArg::Elliptic => vec![Suite::Elliptic],
                SuiteArg::Solver => vec![Suite::Solver],
                SuiteArg::Critical => vec![Suite::Critical],
                SuiteArg::Ising => vec![Suite::Ising],
                SuiteArg::Duality => vec![Suite::Duality],
            };
            let mut reports = Vec::new();
            for s in suites {
                let rep = verify::run(s, &cfg)?;
                for c in &rep.checks {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    println!("{tag} [{}] {}: {:.3e} (tol {:.0e})", rep.suite, c.name, c.value, c.tol);
                }
                reports.push(rep);
            }
            if let Some(path) = json {
                std::fs::write(path, serde_json::to_string_pretty(&reports)?)?;
            }
            Ok(if reports.iter().all(|r| r.passed) { 0 } else { 1 })
        }
        Command::Critical {
            mode,
            b,
            n,
            u,
            r,
            r_range,
            a,
            a_range,
            q_range,
            n_range,
            out,
            format,
            svg,
            workers,
        } => {
            let flags = CriticalFlags {
                b,
                n,
                u,
                r,
                r_range,
                a,
                a_range,
                q_range,
                n_range,
            };
            let cfg = flags.resolve(mode)?;
            let dir = resolve_out_dir(out.as_deref())?;
            let table = with_workers(workers, || critical_table(mode, &cfg))?;
            let stem = format!("critical_{}", mode.name());
            let path = match format {
                Format::Csv => {
                    let p = dir.join(format!("{stem}.csv"));
                    table.write_csv(&p)?;
                    p
                }
                Format::Json => {
                    let p = dir.join(format!("{stem}.json"));
                    std::fs::write(&p, serde_json::to_string_pretty(&table.to_json())?)?;
                    p
                }
            };
            if svg {
                let plot = figures::plot(&table, mode, &stem);
                std::fs::write(dir.join(format!("{stem}.svg")), plot)?;
            }
            let unsolved = table
                .column("regime")
                .map_or(0, |i| table.rows.iter().filter(|r| r[i].render() == "unsolved").count());
            println!("{} rows ({unsolved} unsolved) -> {}", table.rows.len(), path.display());
            Ok(0)
        }
        Command::Density {
            params_json,
            samples,
            out,
        } => {
            let input = density::parse_input(&params_json)?;
            let (report, table) = density::run(&input, samples)?;
            let dir = resolve_out_dir(out.as_deref())?;
            table.write_csv(&dir.join("density.csv"))?;
            let json = serde_json::to_string_pretty(&report)?;
            std::fs::write(dir.join("density.json"), &json)?;
            println!("{json}");
            Ok(if report.positive { 0 } else { 1 })
        }
        Command::Figures { out, workers } => {
            let dir = resolve_out_dir(out.as_deref())?;
            let written = with_workers(workers, || figures::write_all(&dir))??;
            for w in &written {
                println!("{}  {}", w.sha256, w.file);
            }
            Ok(0)
        }
    }
}
