//! Command-line front end.
//!
//! Exit codes: 0 success, 1 selfcheck failure, 2 config or usage error,
//! 3 solver or runtime error.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fields::ComplexField;
use crate::scenario::RunOutcome;
use crate::selfcheck;
use crate::sweep::{run_sweep, write_sweep_csv, SweepAxis, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFCHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "darkstate",
    version,
    about = "Dark-state narrowing of a probe beam in a driven atomic vapour"
)]
pub struct Cli {
    /// Worker threads for sweeps (default: all processors).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// Write a field snapshot every M propagation steps.
    #[arg(long, global = true, value_name = "M")]
    pub snapshots: Option<usize>,

    /// Output directory (overrides the config's output.dir).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate once and write profile.csv and metrics.txt.
    Run { config: PathBuf },
    /// Repeat the run over one parameter axis and write sweep.csv.
    Sweep {
        config: PathBuf,
        /// `name=start:stop:count`, e.g. `detuning_hz=-2e6:2e6:21`.
        #[arg(long)]
        axis: String,
    },
    /// Run the built-in oracle checks.
    Selfcheck,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    if cli.jobs == Some(0) {
        return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
    }
    if cli.snapshots == Some(0) {
        return Err(Error::InvalidArgument(
            "--snapshots must be at least 1".into(),
        ));
    }
    match &cli.command {
        Command::Run { config } => run_single(cli, config),
        Command::Sweep { config, axis } => run_sweep_cmd(cli, config, axis),
        Command::Selfcheck => Ok(run_selfcheck()),
    }
}

fn config_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

fn output_dir(cli: &Cli, cfg: &RunConfig, cfg_path: &Path) -> PathBuf {
    match (&cli.out, cfg.output_dir()) {
        (Some(dir), _) => dir.clone(),
        (None, Some(dir)) => config_dir(cfg_path).join(dir),
        (None, None) => PathBuf::from("."),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| {
        Error::InvalidArgument(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })
}

fn run_single(cli: &Cli, cfg_path: &Path) -> Result<i32> {
    let cfg = RunConfig::load(cfg_path)?;
    let mut scenario = cfg.to_scenario(config_dir(cfg_path))?;
    if cli.snapshots.is_some() {
        scenario.cell.snapshot_every = cli.snapshots;
    }
    let dir = output_dir(cli, &cfg, cfg_path);
    create_dir(&dir)?;
    let outcome = scenario.run()?;
    write_profile(&dir.join("profile.csv"), &outcome)?;
    fs::write(dir.join("metrics.txt"), outcome.report.to_string())?;
    for (step, field) in &outcome.record.snapshots {
        write_snapshot(&dir.join(format!("snap_{step:06}.csv")), field)?;
    }
    print!("{}", outcome.report);
    log::info!("wrote results to {}", dir.display());
    Ok(EXIT_OK)
}

fn run_sweep_cmd(cli: &Cli, cfg_path: &Path, axis: &str) -> Result<i32> {
    let axis = SweepAxis::parse(axis)?;
    let cfg = RunConfig::load(cfg_path)?;
    let base = cfg.to_scenario(config_dir(cfg_path))?;
    let dir = output_dir(cli, &cfg, cfg_path);
    create_dir(&dir)?;
    let spec = SweepSpec {
        base,
        axis,
        output_dir: Some(dir.clone()),
        jobs: cli.jobs,
    };
    let rows = run_sweep(&spec)?;
    for row in &rows {
        if let Err(e) = &row.result {
            log::warn!("{} = {:e}: {e}", spec.axis.kind, row.axis_value);
        }
    }
    let file = File::create(dir.join("sweep.csv"))?;
    let mut out = BufWriter::new(file);
    write_sweep_csv(&mut out, spec.axis.kind, &rows)?;
    out.flush()?;
    println!(
        "{} rows written to {}",
        rows.len(),
        dir.join("sweep.csv").display()
    );
    Ok(EXIT_OK)
}

fn run_selfcheck() -> i32 {
    let checks = selfcheck::run_all();
    let mut ok = true;
    for check in &checks {
        println!("{check}");
        ok &= check.passed();
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_SELFCHECK
    }
}

pub const PROFILE_HEADER: &str = "x_m,drive_intensity,probe_in,probe_out";
pub const SNAPSHOT_HEADER: &str = "x_m,re,im,intensity";

pub fn write_profile(path: &Path, outcome: &RunOutcome) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{PROFILE_HEADER}")?;
    let grid = &outcome.drive.grid;
    let input = outcome.record.input.intensity();
    let output = outcome.record.output.intensity();
    for (i, x) in grid.positions().enumerate() {
        writeln!(
            out,
            "{x:.12e},{:.12e},{:.12e},{:.12e}",
            outcome.drive.intensity[i], input[i], output[i]
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_snapshot(path: &Path, field: &ComplexField) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{SNAPSHOT_HEADER}")?;
    for (x, v) in field.grid.positions().zip(&field.values) {
        writeln!(
            out,
            "{x:.12e},{:.12e},{:.12e},{:.12e}",
            v.re,
            v.im,
            v.norm_sqr()
        )?;
    }
    out.flush()?;
    Ok(())
}
