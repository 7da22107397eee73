//! `periodlab`: periods, monodromy, modular forms, Hodge data and Poincare
//! series from the command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

mod commands;
mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use periodlab_core::modular::Lattice;
use periodlab_core::periods::{KhodayaPoint, WeierstrassPoint};
use periodlab_core::Complex;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "periodlab", version, about = "Numerical periods and computational Hodge theory")]
struct Cli {
    /// Target tolerance for quadrature, transport and lattice sums.
    #[arg(long, global = true, env = "PERIODLAB_TOL", default_value_t = 1e-10)]
    tol: f64,

    /// Output format; csv is only available for sweeps.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args, Debug)]
struct PointArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
    t2: Option<Complex>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
    t3: Option<Complex>,
    /// Grid `START:END:N` for t2 (replaces --t2).
    #[arg(long, allow_hyphen_values = true)]
    sweep_t2: Option<String>,
    /// Grid `START:END:N` for t3 (replaces --t3).
    #[arg(long, allow_hyphen_values = true)]
    sweep_t3: Option<String>,
}

impl PointArgs {
    fn is_sweep(&self) -> bool {
        self.sweep_t2.is_some() || self.sweep_t3.is_some()
    }

    fn axis(fixed: Option<Complex>, sweep: &Option<String>, name: &str) -> Result<Vec<Complex>> {
        match (fixed, sweep) {
            (_, Some(g)) => parse::grid(g),
            (Some(v), None) => Ok(vec![v]),
            (None, None) => bail!("--{name} or --sweep-{name} is required"),
        }
    }

    fn grid(&self) -> Result<(Vec<Complex>, Vec<Complex>)> {
        Ok((Self::axis(self.t2, &self.sweep_t2, "t2")?, Self::axis(self.t3, &self.sweep_t3, "t3")?))
    }

    fn point(&self) -> Result<WeierstrassPoint> {
        match (self.t2, self.t3) {
            (Some(a), Some(b)) => Ok(WeierstrassPoint::new(a, b)),
            _ => bail!("--t2 and --t3 are required"),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Period matrix of y^2 = 4x^3 - t2 x - t3.
    Periods(PointArgs),
    /// Period ratio tau and the j-invariant.
    Tau(PointArgs),
    /// Transport along a path read from a JSON file.
    PfTransport {
        #[arg(long)]
        path_file: PathBuf,
    },
    /// Monodromy of a loop in the t3-plane.
    Monodromy {
        /// Centre `t2,t3`.
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        turns: i32,
    },
    /// Eisenstein lattice sum of weight k.
    Eisenstein {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        tau: Option<Complex>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        omega1: Option<Complex>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        omega2: Option<Complex>,
        /// Run a homogeneity check on this many random lattices.
        #[arg(long)]
        weight_check: Option<usize>,
        /// Seed for the homogeneity check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// j-invariant in both normalizations.
    J {
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        tau: Complex,
    },
    /// q-expansion coefficients of the classical j.
    JQexp {
        #[arg(long)]
        terms: usize,
    },
    /// Polarization and Riemann relations of a point read from a JSON file.
    HodgeCheck {
        #[arg(long)]
        point_file: PathBuf,
    },
    /// Dimensions of the period domain at a base point.
    DomainDims {
        #[arg(long)]
        weight: u32,
        /// Comma-separated `h^{m,0},...,h^{0,m}`.
        #[arg(long, value_delimiter = ',')]
        hodge_numbers: Vec<usize>,
        /// Use this point instead of the built-in base point.
        #[arg(long)]
        point_file: Option<PathBuf>,
    },
    /// Effective parameter count of degree-d hypersurfaces in P^{n+1}.
    KsCount {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
    },
    /// Truncated Poincare series.
    Poincare {
        /// `det`, `x11^k` or `x21^k` on period matrices, or `one` on the
        /// upper half-plane.
        #[arg(long)]
        functional: String,
        #[arg(long)]
        height: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        t2: Option<Complex>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        t3: Option<Complex>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        tau: Option<Complex>,
        /// Weight n of the upper half-plane series.
        #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
        weight: i32,
    },
    /// Periods of y^2 = 4 t0 (x - t1)^3 - t2 (x - t1) - t3.
    Khodaya {
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        t0: Complex,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        t1: Complex,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        t2: Complex,
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        t3: Complex,
    },
}

enum Artifact {
    Json(Value),
    Csv(Vec<String>),
}

fn point_command<F>(
    name: &str,
    args: &PointArgs,
    format: Option<Format>,
    tol: f64,
    header: &[&str],
    row: F,
    single: fn(&WeierstrassPoint, f64) -> Result<Value>,
) -> Result<Artifact>
where
    F: Fn(&WeierstrassPoint, f64) -> Result<Vec<f64>> + Sync,
{
    if args.is_sweep() {
        let (t2s, t3s) = args.grid()?;
        let (lines, objects) = commands::sweep(&t2s, &t3s, header, |t| row(t, tol));
        return Ok(match format {
            Some(Format::Json) => {
                let failed = objects.iter().filter(|o| o["status"] != "ok").count();
                Artifact::Json(json!({
                    "command": name,
                    "inputs": { "sweep_t2": args.sweep_t2, "sweep_t3": args.sweep_t3, "t2": args.t2.map(commands::cj), "t3": args.t3.map(commands::cj), "tol": tol },
                    "rows": objects,
                    "diagnostics": { "points": objects.len(), "failed": failed },
                }))
            }
            _ => Artifact::Csv(lines),
        });
    }
    if format == Some(Format::Csv) {
        bail!("csv output needs --sweep-t2 or --sweep-t3");
    }
    Ok(Artifact::Json(single(&args.point()?, tol)?))
}

fn run(cli: Cli) -> Result<Artifact> {
    let tol = cli.tol;
    if !(tol > 0.0 && tol.is_finite()) {
        bail!("tolerance must be positive");
    }
    let json_only = |v: Result<Value>| -> Result<Artifact> {
        if cli.format == Some(Format::Csv) {
            bail!("csv output is only available for sweeps");
        }
        v.map(Artifact::Json)
    };
    match &cli.command {
        Command::Periods(args) => point_command("periods", args, cli.format, tol, &commands::PERIOD_COLUMNS, commands::period_row, commands::periods),
        Command::Tau(args) => point_command("tau", args, cli.format, tol, &commands::TAU_COLUMNS, commands::tau_row, commands::tau),
        Command::PfTransport { path_file } => json_only(commands::load_path(path_file).and_then(|p| commands::pf_transport(&p, tol))),
        Command::Monodromy { center, radius, turns } => {
            let center = parse::complex_list(center)?;
            if center.len() != 2 {
                bail!("--center takes t2,t3");
            }
            json_only(commands::monodromy(&WeierstrassPoint::new(center[0], center[1]), *radius, *turns, tol))
        }
        Command::Eisenstein { k, tau, omega1, omega2, weight_check, seed } => {
            let lattice = match (tau, omega1, omega2) {
                (Some(t), None, None) => Lattice::from_tau(*t)?,
                (None, Some(a), Some(b)) => Lattice::new(*a, *b)?,
                _ => bail!("give either --tau or both --omega1 and --omega2"),
            };
            json_only(commands::eisenstein(*k, &lattice, weight_check.map(|n| (n, *seed)), tol))
        }
        Command::J { tau } => json_only(commands::j(*tau, tol)),
        Command::JQexp { terms } => json_only(commands::j_qexp(*terms)),
        Command::HodgeCheck { point_file } => {
            json_only(commands::load_point(point_file).and_then(|(phi, f)| commands::hodge_check(&phi, &f)))
        }
        Command::DomainDims { weight, hodge_numbers, point_file } => {
            let v = match point_file {
                Some(file) => {
                    let (phi, f) = commands::load_point(file)?;
                    if phi.weight() != *weight || phi.hodge_numbers() != hodge_numbers.as_slice() {
                        bail!("point file does not have the requested Hodge type");
                    }
                    commands::domain(&phi, Some(&f))
                }
                None => commands::standard_type(*weight, hodge_numbers).and_then(|phi| commands::domain(&phi, None)),
            };
            json_only(v)
        }
        Command::KsCount { n, d } => json_only(commands::ks_count(*n, *d)),
        Command::Poincare { functional, height, t2, t3, tau, weight } => {
            let v = if functional == "one" {
                let tau = tau.ok_or_else(|| anyhow!("--tau is required for the upper half-plane series"))?;
                commands::poincare_uhp(*weight, tau, *height, tol)
            } else {
                match (t2, t3) {
                    (Some(a), Some(b)) => commands::poincare_periods(functional, &WeierstrassPoint::new(*a, *b), *height, tol),
                    _ => bail!("--t2 and --t3 are required for period-matrix functionals"),
                }
            };
            json_only(v)
        }
        Command::Khodaya { t0, t1, t2, t3 } => json_only(commands::khodaya(&KhodayaPoint::new(*t0, *t1, *t2, *t3), tol)),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<periodlab_core::Error>() {
        Some(err) if err.is_numerical() => 3,
        _ => 2,
    }
}

fn emit(artifact: &Artifact, output: Option<&PathBuf>) -> Result<()> {
    let text = match artifact {
        Artifact::Json(v) => serde_json::to_string_pretty(v)? + "\n",
        Artifact::Csv(lines) => lines.join("\n") + "\n",
    };
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let result = run(cli).and_then(|a| emit(&a, output.as_ref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            let kind = if code == 3 { "numerical" } else { "validation" };
            eprintln!("{}", json!({ "error": format!("{e:#}"), "kind": kind }));
            ExitCode::from(code)
        }
    }
}
