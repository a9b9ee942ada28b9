//! `pnps`: steady nanopore transport from the command line.

mod case;
mod output;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use pnps_core::observables::{current_decomposition, flow_decomposition};
use pnps_core::{load_preset, solve_steady, solve_steady_unchecked, Error, PRESET_NAMES};

use case::CaseArgs;
use output::num;
use sweep::{Axis, Values};

#[derive(Parser)]
#[command(name = "pnps", version, about = "Steady ion and fluid transport through slender nanopores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one case and write fields.csv, axial.csv, summary.csv and meta.txt.
    Run {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Write dimensional values.
        #[arg(long)]
        si: bool,
    },
    /// Solve a case for a list of boundary values and write sweep.csv.
    Sweep {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, value_enum)]
        axis: Axis,
        /// `a,b,c` or `start:stop:count`.
        #[arg(long, allow_hyphen_values = true)]
        values: Values,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        si: bool,
        /// Worker threads; defaults to the available cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List the built-in presets, or print one as TOML.
    Presets {
        name: Option<String>,
    },
    /// Flow and current decompositions for a straight pore.
    Decompose {
        #[command(flatten)]
        case: CaseArgs,
        /// Also write decompose.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status when a solve did not converge.
const NOT_CONVERGED: u8 = 2;

fn run(case_args: &CaseArgs, out: &Path, si: bool) -> Result<ExitCode> {
    let case = case_args.resolve()?;
    let problem = case.problem()?;
    match solve_steady(&problem) {
        Ok(sol) => {
            output::write_run(out, &case, &sol, si, None)?;
            println!("{}", fs::read_to_string(out.join("summary.csv"))?.trim_end());
            Ok(ExitCode::SUCCESS)
        }
        Err(err @ Error::NonConvergence { .. }) => {
            let partial = solve_steady_unchecked(&problem)?;
            output::write_run(out, &case, &partial, si, Some(&err.to_string()))?;
            eprintln!("error: {err}; partial results in {}", out.display());
            Ok(ExitCode::from(NOT_CONVERGED))
        }
        Err(err) => Err(err.into()),
    }
}

fn run_sweep(case_args: &CaseArgs, axis: Axis, values: &Values, out: &Path, si: bool, jobs: Option<usize>) -> Result<ExitCode> {
    let base = case_args.resolve()?;
    base.problem()?;
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let points = sweep::run(&base, axis, &values.0, jobs)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("sweep.csv"), sweep::render(&points, si)).context("writing sweep.csv")?;
    fs::write(out.join("meta.txt"), output::meta_text(&base, None, si, None)?).context("writing meta.txt")?;
    let failed = points.iter().filter(|p| p.result.is_err()).count();
    if failed > 0 {
        eprintln!("{failed} of {} sweep points failed; see the status column", points.len());
        return Ok(ExitCode::from(NOT_CONVERGED));
    }
    Ok(ExitCode::SUCCESS)
}

fn decompose(case_args: &CaseArgs, out: Option<&Path>) -> Result<ExitCode> {
    let case = case_args.resolve()?;
    let sol = solve_steady(&case.problem()?)?;
    let flow = flow_decomposition(&sol)?;
    let currents = current_decomposition(&sol)?;
    let mut text = String::from("quantity,part,value\n");
    for (part, v) in [("pf", flow.pf), ("hs", flow.hs), ("edl", flow.edl), ("total", flow.total), ("defect", flow.defect)] {
        text.push_str(&format!("u_mean,{part},{}\n", num(v)));
    }
    for (s, d) in case.preset.mixture.species.iter().zip(&currents) {
        for (part, v) in [("ie", d.ie), ("ip", d.ip), ("ic", d.ic), ("computed", d.computed), ("threshold", d.threshold)] {
            text.push_str(&format!("I_{},{part},{}\n", s.name, num(v)));
        }
    }
    print!("{text}");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("decompose.csv"), &text).context("writing decompose.csv")?;
    }
    Ok(ExitCode::SUCCESS)
}

fn presets(name: Option<&str>) -> Result<ExitCode> {
    match name {
        Some(name) => print!("{}", toml::to_string(&load_preset(name)?)?),
        None => {
            for name in PRESET_NAMES {
                let p = load_preset(name)?;
                println!("{name:<11} {} sigma0 = {}", p.mixture.variant, p.charge.sigma0);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { case, out, si } => run(case, out, *si),
        Command::Sweep {
            case,
            axis,
            values,
            out,
            si,
            jobs,
        } => run_sweep(case, *axis, values, out, *si, *jobs),
        Command::Presets { name } => presets(name.as_deref()),
        Command::Decompose { case, out } => decompose(case, out.as_deref()),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
