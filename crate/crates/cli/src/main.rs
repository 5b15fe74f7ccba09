use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lagpath_cli::verify::{verify_identities, verify_kernels, KernelSuiteParams, VerificationReport, MAX_SUM_N};
use lagpath_cli::{run, CliError, Plan, RunConfig};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "lagpath", version, about = "Lagrangian particle paths: identities, kernels, simulations and time-Taylor jets")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact rational checks of the partition and series identities.
    VerifyIdentities {
        #[arg(long, default_value_t = MAX_SUM_N)]
        max_n: u32,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
        dims: Vec<usize>,
        /// Also write the report here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Derivative bounds and circle means of the kernel catalog.
    VerifyKernels {
        #[arg(long, default_value_t = 32.0)]
        ck: f64,
        #[arg(long, default_value_t = 5)]
        max_order: u32,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Integrate a scenario and write states, diagnostics and a summary.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Trajectory jets of a scenario with radius estimates and Cauchy fits.
    Taylor {
        #[arg(long)]
        config: PathBuf,
    },
    /// Hölder statistics of the initial data and the explicit radius bound.
    RadiusBound {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    emit(&serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?)
}

fn report(r: &VerificationReport, output: Option<&Path>) -> Result<u8, CliError> {
    let text = serde_json::to_string_pretty(r).map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(path) = output {
        std::fs::write(path, format!("{text}\n")).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    emit(&text)?;
    for c in r.failures() {
        eprintln!("FAILED {} {}", c.name, c.inputs);
    }
    Ok(if r.all_passed() { 0 } else { 1 })
}

fn plan(config: &Path) -> Result<Plan, CliError> {
    Plan::new(&RunConfig::from_file(config)?)
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::VerifyIdentities { max_n, dims, output } => report(&verify_identities(max_n, &dims)?, output.as_deref()),
        Command::VerifyKernels { ck, max_order, samples, seed, output } => {
            let r = verify_kernels(KernelSuiteParams { c_k: ck, max_order, samples, seed })?;
            report(&r, output.as_deref())
        }
        Command::Simulate { config } => {
            print_json(&run::simulate(&plan(&config)?)?)?;
            Ok(0)
        }
        Command::Taylor { config } => {
            print_json(&run::taylor(&plan(&config)?)?)?;
            Ok(0)
        }
        Command::RadiusBound { config } => {
            print_json(&run::radius_bound(&plan(&config)?)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
