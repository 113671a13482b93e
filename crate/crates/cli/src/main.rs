//! `bergman`: kernels of Blaschke-power weighted Bergman spaces and
//! contractive zero divisors from the command line.
//!
//! Output is deterministic: identical inputs give byte-identical output.
//! `--seed` is accepted for pipeline compatibility and has no effect.

mod commands;
mod job;

use std::io::Write;
use std::process::ExitCode;

use bergman::{Complex64, Error, DEFAULT_TRUNCATION};
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Output, Points, Rep};
use job::{parse_grid, parse_job, read_source, Job, Subject};

#[derive(Parser)]
#[command(name = "bergman", version, about = "Reproducing kernels of Blaschke-power weighted Bergman spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample K(z, zeta) on a grid.
    Kernel(Common),
    /// Origin derivatives of the kernel.
    Derivs(Common),
    /// Contractive zero divisor samples and its verification report.
    Divisor(Common),
    /// Run the consistency and oracle checks; exit 1 if any fails.
    Verify(Common),
    /// Kernel of the degree-N polynomial subspace.
    Oracle(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Weight, zero set or job JSON; `-` reads stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// `-` writes stdout.
    #[arg(long, default_value = "-")]
    output: String,
    #[arg(long, value_enum, default_value = "main")]
    rep: Rep,
    /// `r0:r1:n`. Kernel commands use the n² real pairs, divisor the complex
    /// points x_j + i x_k inside the disk.
    #[arg(long)]
    grid: Option<String>,
    /// Overrides the quadrature `abs_tol`.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    seed: Option<u64>,
    /// Truncation degree for the polynomial-subspace oracle.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    degree: usize,
}

const DEFAULT_KERNEL_GRID: &str = "-0.6:0.6:5";
const DEFAULT_DIVISOR_GRID: &str = "-0.9:0.9:7";

fn kernel_points(job: &Job, grid: Option<&str>) -> Result<Points, Error> {
    if grid.is_none() {
        if let Some(z) = &job.z_points {
            let zeta = job.zeta_points.clone().unwrap_or_else(|| z.clone());
            return Ok(Points { z: z.clone(), zeta });
        }
    }
    let xs: Vec<Complex64> = parse_grid(grid.unwrap_or(DEFAULT_KERNEL_GRID))?
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    Ok(Points {
        z: xs.clone(),
        zeta: xs,
    })
}

fn divisor_points(job: &Job, grid: Option<&str>) -> Result<Vec<Complex64>, Error> {
    if grid.is_none() {
        if let Some(z) = &job.z_points {
            return Ok(z.clone());
        }
    }
    let xs = parse_grid(grid.unwrap_or(DEFAULT_DIVISOR_GRID))?;
    Ok(xs
        .iter()
        .flat_map(|&x| xs.iter().map(move |&y| Complex64::new(x, y)))
        .filter(|z| z.norm() < 1.0)
        .collect())
}

fn run(command: &Command) -> Result<(Output, &Common), Error> {
    let (opts, name) = match command {
        Command::Kernel(o) => (o, "kernel"),
        Command::Derivs(o) => (o, "derivs"),
        Command::Divisor(o) => (o, "divisor"),
        Command::Verify(o) => (o, "verify"),
        Command::Oracle(o) => (o, "oracle"),
    };
    let mut job = parse_job(&read_source(&opts.input)?)?;
    if let Some(tol) = opts.tol {
        job.quad.abs_tol = tol;
        job.quad.validate()?;
    }
    let grid = opts.grid.as_deref();
    let cfg = &job.quad;
    let out = match (command, &job.subject) {
        (Command::Divisor(_), Subject::ZeroSet(zs)) => {
            commands::divisor(zs, cfg, &divisor_points(&job, grid)?)?
        }
        (Command::Divisor(_), Subject::Weight(_)) => {
            return Err(Error::InvalidInput("divisor needs a zeroset, got a weight".into()))
        }
        (_, Subject::ZeroSet(_)) => {
            return Err(Error::InvalidInput(format!("{name} needs a weight, got a zeroset")))
        }
        (Command::Kernel(_), Subject::Weight(spec)) => {
            commands::kernel(spec, cfg, &kernel_points(&job, grid)?, opts.rep)?
        }
        (Command::Derivs(_), Subject::Weight(spec)) => commands::derivs(spec, cfg)?,
        (Command::Verify(_), Subject::Weight(spec)) => {
            commands::verify(spec, cfg, &kernel_points(&job, grid)?, opts.degree)?
        }
        (Command::Oracle(_), Subject::Weight(spec)) => {
            commands::oracle(spec, cfg, &kernel_points(&job, grid)?, opts.degree)?
        }
    };
    Ok((out, opts))
}

fn emit(out: &Output, opts: &Common) -> Result<(), Error> {
    let text = match (opts.format, &out.csv) {
        (Format::Csv, Some(csv)) => csv.clone(),
        _ => {
            let mut s = serde_json::to_string_pretty(&out.json).expect("output serializes");
            s.push('\n');
            s
        }
    };
    let io = |e: std::io::Error| Error::InvalidInput(format!("{}: {e}", opts.output));
    if opts.output == "-" {
        std::io::stdout().lock().write_all(text.as_bytes()).map_err(io)
    } else {
        std::fs::write(&opts.output, text).map_err(io)
    }
}

fn fail(e: &Error) -> ExitCode {
    let body = serde_json::json!({"error": e.kind(), "message": e.to_string()});
    eprintln!("{body}");
    ExitCode::from(if e.is_numerical() { 3 } else { 2 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command).and_then(|(out, opts)| emit(&out, opts).map(|_| out.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}
