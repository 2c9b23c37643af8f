//! Argument parsing and dispatch. Every subcommand is turned into a
//! [`JobSpec`] and goes through the same runner.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, CliResult};
use crate::report::ReportDocument;
use crate::run::{run, RunOptions};
use crate::spec::{
    lattice_arg, parse_job, read_file, regions_file, JobSpec, MethodChoice, OutputFormat, Template, TaskSpec,
    TemplateInput,
};

#[derive(Debug, Parser)]
#[command(name = "toric-tee", version, about = "Entanglement entropy and boundary invariants of toric codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format (default: the job's `format`, else json).
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Seed for randomized checks (overrides the job's `seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a TOML job file.
    Run { job: PathBuf },
    /// Entropy of named regions.
    Entropy {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        regions: PathBuf,
        /// Regions to evaluate (default: all, in name order).
        #[arg(long = "region")]
        names: Vec<String>,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
    },
    /// Boundary invariant on a partition template.
    Invariant {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, value_enum)]
        template: TemplateArg,
        #[arg(long)]
        face: Option<String>,
        #[arg(long)]
        wall: Option<i64>,
        #[arg(long)]
        core: Option<i64>,
        #[arg(long)]
        depth: Option<i64>,
        #[arg(long)]
        height: Option<i64>,
        /// Two comma-separated cell offsets along the face.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        offset: Option<Vec<i64>>,
    },
    /// Restriction-graph reduction of one region.
    Reduce {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long)]
        regions: PathBuf,
        #[arg(long)]
        region: String,
        #[arg(long)]
        plane_y: i64,
        #[arg(long, default_value_t = 0)]
        random_orders: usize,
    },
    /// Seeded property checks on one lattice.
    Verify {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
    /// Check the built-in reference targets.
    Reproduce,
}

#[derive(Debug, Args)]
pub struct LatticeArg {
    /// `torus2:L`, `torus3:L`, `slab:AxBxC:bottom:top`, or a TOML file with a
    /// `[lattice]` table.
    #[arg(long)]
    pub lattice: String,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum MethodArg {
    Both,
    RestrictedRank,
    FattalPairs,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum TemplateArg {
    Point,
    Line,
    #[value(name = "2d")]
    TwoD,
}

fn job_from(cmd: Command) -> CliResult<JobSpec> {
    let mut job = JobSpec::default();
    let task = match cmd {
        Command::Run { job: path } => {
            let text = read_file(&path)?;
            return parse_job(&text, &path.display().to_string());
        }
        Command::Entropy {
            lattice,
            regions,
            names,
            method,
        } => {
            job.lattice = Some(lattice_arg(&lattice.lattice)?);
            job.regions = regions_file(&regions)?;
            let regions = if names.is_empty() { job.regions.keys().cloned().collect() } else { names };
            let method = match method {
                MethodArg::Both => MethodChoice::Both,
                MethodArg::RestrictedRank => MethodChoice::RestrictedRank,
                MethodArg::FattalPairs => MethodChoice::FattalPairs,
            };
            TaskSpec::Entropy { regions, method }
        }
        Command::Invariant {
            lattice,
            template,
            face,
            wall,
            core,
            depth,
            height,
            offset,
        } => {
            job.lattice = Some(lattice_arg(&lattice.lattice)?);
            TaskSpec::Invariant(TemplateInput {
                template: match template {
                    TemplateArg::Point => Template::Point,
                    TemplateArg::Line => Template::Line,
                    TemplateArg::TwoD => Template::TwoD,
                },
                part: None,
                face,
                wall,
                core,
                depth,
                height,
                offset: offset.map(|o| [o[0], o[1]]),
            })
        }
        Command::Reduce {
            lattice,
            regions,
            region,
            plane_y,
            random_orders,
        } => {
            job.lattice = Some(lattice_arg(&lattice.lattice)?);
            job.regions = regions_file(&regions)?;
            TaskSpec::GraphReduce {
                region,
                plane_y,
                random_orders,
            }
        }
        Command::Verify { lattice, cases } => {
            job.lattice = Some(lattice_arg(&lattice.lattice)?);
            TaskSpec::VerifySuite { cases }
        }
        Command::Reproduce => TaskSpec::ReproducePaper {},
    };
    job.tasks.push(task);
    Ok(job)
}

/// Parses the job, runs it and renders the report.
pub fn execute(cli: Cli) -> CliResult<(ReportDocument, String)> {
    let mut job = job_from(cli.command)?;
    if cli.common.seed.is_some() {
        job.seed = cli.common.seed;
    }
    let format = cli.common.format.or(job.format).unwrap_or_default();
    let report = run(
        &job,
        RunOptions {
            threads: cli.common.threads,
        },
    )?;
    let text = report.render(format)?;
    Ok((report, text))
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    let out = cli.common.out.clone();
    match execute(cli).and_then(|(report, text)| {
        match &out {
            Some(path) => std::fs::write(path, &text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?,
            None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?,
        }
        Ok(report)
    }) {
        Ok(report) => {
            let failed_targets = report.failed_targets();
            let failed_tasks = report.results.iter().filter(|r| !r.passed).count();
            if failed_targets > 0 {
                let _ = writeln!(stderr, "error: {}", CliError::TargetsFailed(failed_targets));
                3
            } else if failed_tasks > 0 {
                let _ = writeln!(stderr, "error: {failed_tasks} task(s) failed their checks");
                3
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
