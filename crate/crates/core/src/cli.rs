//! Command-line front end.
//!
//! Exit status: 0 on success with no bound violations, 1 if any checked
//! bound is violated, 2 on usage or input errors. Output files are written
//! atomically; without `--out` the artifact goes to standard output.
//! `BCC_LAB_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::avc::{example_family, lambda_sweep, symmetrizability_check};
use crate::continuity::{
    lemma4_suite, telescope_suite, theorem2_suite, verify_entropy_continuity, verify_mi_continuity,
    ContinuityReport, JointSizes, MiSizes,
};
use crate::error::Error;
use crate::io::{read_channel, read_compound, read_region_csv, write_atomic, FormatError};
use crate::metrics::{channel_distance_witness, compound_distance_detail, region_distance_witness};
use crate::region::{capacity_region_approx, region_mn, GridSpec};

pub const THREADS_ENV: &str = "BCC_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "bcc-lab", version, about = "Rate regions, distances and continuity checks for compound broadcast channels with confidential messages")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate-region approximations
    #[command(subcommand)]
    Region(RegionCommand),
    /// Distances between channels, compound families or regions
    #[command(subcommand)]
    Distance(DistanceCommand),
    /// Empirical checks of the continuity bounds
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Symmetrizability of the parameterised arbitrarily varying channel
    #[command(subcommand)]
    Avc(AvcCommand),
}

#[derive(Debug, Subcommand)]
pub enum RegionCommand {
    /// Grid inner approximation; writes `n,R0,R1,aux_id` per rectangle corner
    Compute(RegionArgs),
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    /// Compound channel JSON
    #[arg(long)]
    pub input: PathBuf,
    /// Single block length
    #[arg(long, conflicts_with = "n_max")]
    pub n: Option<usize>,
    /// Union over block lengths 1..=N [default: 1]
    #[arg(long)]
    pub n_max: Option<usize>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Corner CSV (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the convex hull as JSON
    #[arg(long)]
    pub hull: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Lattice step for auxiliary distributions: `8`, `1/8` or `0.125`
    #[arg(long, default_value = "8", value_parser = parse_grid)]
    pub grid: u32,
    /// Auxiliary alphabet size |U|
    #[arg(long, default_value_t = 2)]
    pub u_size: usize,
    /// Auxiliary alphabet size |V|
    #[arg(long, default_value_t = 2)]
    pub v_size: usize,
    /// Refuse grids with more auxiliary chains than this
    #[arg(long, default_value_t = 1 << 24)]
    pub max_aux: u64,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            resolution: self.grid,
            u_size: self.u_size,
            v_size: self.v_size,
            max_aux: self.max_aux,
        }
    }
}

/// Accepts a resolution (`8`), a unit fraction (`1/8`) or a decimal step.
fn parse_grid(s: &str) -> Result<u32, String> {
    let s = s.trim();
    let resolution = if let Some(den) = s.strip_prefix("1/") {
        den.parse::<u32>().map_err(|e| e.to_string())?
    } else if let Ok(r) = s.parse::<u32>() {
        r
    } else {
        let step: f64 = s.parse().map_err(|_| format!("bad grid step {s}"))?;
        if !(step > 0.0 && step <= 1.0) {
            return Err(format!("grid step {s} outside (0,1]"));
        }
        let r = (1.0 / step).round();
        if ((1.0 / step) - r).abs() > 1e-9 {
            return Err(format!("grid step {s} is not 1/k for an integer k"));
        }
        r as u32
    };
    if resolution == 0 {
        return Err("grid resolution must be at least 1".into());
    }
    Ok(resolution)
}

#[derive(Debug, Subcommand)]
pub enum DistanceCommand {
    /// Worst-row ℓ₁ distance between two channel JSON files
    Channels(PairArgs),
    /// Hausdorff distance between two compound channel JSON files
    Compound(PairArgs),
    /// ℓ₁ Hausdorff distance between two region CSV files
    Regions(PairArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// First input
    #[arg(long)]
    pub a: PathBuf,
    /// Second input
    #[arg(long)]
    pub b: PathBuf,
    /// JSON `{value, witness}` (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Conditional entropy continuity on random joint pairs
    Lemma2(Lemma2Args),
    /// Conditional mutual information continuity on random chains
    Lemma3(Lemma3Args),
    /// Rectangle continuity on random perturbed compound pairs
    Lemma4(Lemma4Args),
    /// Capacity-region continuity on matched-grid approximations
    Theorem2(Theorem2Args),
    /// Per-step hybrid telescoping checks
    Telescope(Lemma3Args),
}

#[derive(Debug, Args)]
pub struct CommonVerifyArgs {
    /// Perturbation radius ε in (0,1)
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Number of random instances (pairs for lemma4 and theorem2)
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Base seed; trial i uses stream i
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report JSON (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Lemma2Args {
    #[command(flatten)]
    pub common: CommonVerifyArgs,
    /// Input alphabet size
    #[arg(long, default_value_t = 3)]
    pub x_size: usize,
    /// Output alphabet size
    #[arg(long, default_value_t = 4)]
    pub y_size: usize,
}

#[derive(Debug, Args)]
pub struct Lemma3Args {
    #[command(flatten)]
    pub common: CommonVerifyArgs,
    /// Block length
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Input alphabet size
    #[arg(long, default_value_t = 2)]
    pub x_size: usize,
    /// Output alphabet size
    #[arg(long, default_value_t = 3)]
    pub y_size: usize,
    /// Auxiliary alphabet size |U|
    #[arg(long, default_value_t = 2)]
    pub u_size: usize,
    /// Auxiliary alphabet size |V|
    #[arg(long, default_value_t = 3)]
    pub v_size: usize,
}

#[derive(Debug, Args)]
pub struct Lemma4Args {
    #[command(flatten)]
    pub common: CommonVerifyArgs,
    /// Random auxiliary chains per pair
    #[arg(long, default_value_t = 50)]
    pub aux: usize,
    /// Block length
    #[arg(long, default_value_t = 1)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct Theorem2Args {
    #[command(flatten)]
    pub common: CommonVerifyArgs,
    /// Largest block length in the approximation
    #[arg(long, default_value_t = 1)]
    pub n_max: usize,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Subcommand)]
pub enum AvcCommand {
    /// Decision and residual per λ; writes `lambda,symmetrizable,residual`
    Sweep(SweepArgs),
    /// Decision, residual and witness for one λ as JSON
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated λ values in [0,1]
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub lambdas: Vec<f64>,
    /// Sweep CSV (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// λ in [0,1]
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Result JSON (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// The clap command tree, for help rendering and introspection.
pub fn command() -> clap::Command {
    Cli::command()
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Usage(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    text.into_bytes()
}

fn csv_bytes<R: Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
    writer.write_record(header).map_err(io)?;
    for row in rows {
        writer.serialize(row).map_err(io)?;
    }
    writer.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))
}

/// Violations found, or not.
type Outcome = bool;

fn report(r: ContinuityReport, out: Option<&Path>) -> Result<Outcome, CliError> {
    emit(out, r.to_json().as_bytes())?;
    eprintln!(
        "{}: {} instances, {} violations, max gap {:.6}, bound {:.6}, tightness {:.4}",
        r.suite, r.instances, r.violations, r.max_gap, r.bound, r.tightness
    );
    Ok(r.violations > 0)
}

fn region(cmd: RegionCommand) -> Result<Outcome, CliError> {
    let RegionCommand::Compute(args) = cmd;
    let c = read_compound(&args.input)?;
    let grid = args.grid.spec();
    let approx = match (args.n, args.n_max) {
        (Some(n), _) => region_mn(&c, n, &grid)?,
        (None, n_max) => capacity_region_approx(&c, n_max.unwrap_or(1), &grid)?,
    };
    let rows = approx
        .corners
        .iter()
        .map(|k| (k.n, k.corner.r0, k.corner.r1, k.aux_id));
    emit(args.out.as_deref(), &csv_bytes(&["n", "R0", "R1", "aux_id"], rows)?)?;
    if let Some(path) = &args.hull {
        let doc = json!({
            "label": approx.label,
            "n_values": approx.n_values,
            "grid": approx.grid,
            "hull": approx.hull,
        });
        write_atomic(path, &json_bytes(&doc))?;
    }
    Ok(false)
}

fn distance(cmd: DistanceCommand) -> Result<Outcome, CliError> {
    let (doc, out) = match cmd {
        DistanceCommand::Channels(p) => {
            let d = channel_distance_witness(&read_channel(&p.a)?, &read_channel(&p.b)?)?;
            (json!({ "value": d.value, "witness": { "row": d.row } }), p.out)
        }
        DistanceCommand::Compound(p) => {
            let d = compound_distance_detail(&read_compound(&p.a)?, &read_compound(&p.b)?)?;
            let (name, attained) = d.witness();
            let witness = json!({
                "component": name,
                "a_index": attained.a_index,
                "b_index": attained.b_index,
                "components": { "d1_W": d.w_one, "d2_W": d.w_two, "d1_V": d.v_one, "d2_V": d.v_two },
            });
            (json!({ "value": d.value, "witness": witness }), p.out)
        }
        DistanceCommand::Regions(p) => {
            let d = region_distance_witness(&read_region_csv(&p.a)?, &read_region_csv(&p.b)?)?;
            (json!({ "value": d.value, "witness": { "from": d.from, "to": d.to } }), p.out)
        }
    };
    emit(out.as_deref(), &json_bytes(&doc))?;
    Ok(false)
}

fn verify(cmd: VerifyCommand) -> Result<Outcome, CliError> {
    match cmd {
        VerifyCommand::Lemma2(a) => {
            let c = &a.common;
            let sizes = JointSizes { x: a.x_size, y: a.y_size };
            report(verify_entropy_continuity(c.trials, c.eps, sizes, c.seed)?, c.out.as_deref())
        }
        VerifyCommand::Lemma3(a) => {
            let c = &a.common;
            let r = verify_mi_continuity(c.trials, c.eps, a.n, mi_sizes(&a), c.seed)?;
            report(r, c.out.as_deref())
        }
        VerifyCommand::Telescope(a) => {
            let c = &a.common;
            let r = telescope_suite(c.trials, c.eps, a.n, mi_sizes(&a), c.seed)?;
            report(r, c.out.as_deref())
        }
        VerifyCommand::Lemma4(a) => {
            let c = &a.common;
            report(lemma4_suite(c.trials, a.aux, c.eps, a.n, c.seed)?, c.out.as_deref())
        }
        VerifyCommand::Theorem2(a) => {
            let c = &a.common;
            let r = theorem2_suite(c.trials, c.eps, a.n_max, &a.grid.spec(), c.seed)?;
            report(r, c.out.as_deref())
        }
    }
}

fn mi_sizes(a: &Lemma3Args) -> MiSizes {
    MiSizes {
        x: a.x_size,
        y: a.y_size,
        u: a.u_size,
        v: a.v_size,
    }
}

fn avc(cmd: AvcCommand) -> Result<Outcome, CliError> {
    match cmd {
        AvcCommand::Sweep(a) => {
            let rows = lambda_sweep(&a.lambdas)?;
            let bytes = csv_bytes(
                &["lambda", "symmetrizable", "residual"],
                rows.iter().map(|r| (r.lambda, r.symmetrizable, r.residual)),
            )?;
            emit(a.out.as_deref(), &bytes)?;
        }
        AvcCommand::Check(a) => {
            let (family, _) = example_family(a.lambda)?;
            let r = symmetrizability_check(&family)?;
            let doc = json!({
                "lambda": a.lambda,
                "symmetrizable": r.symmetrizable,
                "residual": r.residual,
                "sigma": r.sigma,
            });
            emit(a.out.as_deref(), &json_bytes(&doc))?;
        }
    }
    Ok(false)
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Region(c) => region(c),
        Command::Distance(c) => distance(c),
        Command::Verify(c) => verify(c),
        Command::Avc(c) => avc(c),
    }
}

fn thread_pool(setting: Option<String>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(raw) = setting {
        let threads: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV}={raw} is not a positive integer")))?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = thread_pool(std::env::var(THREADS_ENV).ok()).and_then(|pool| pool.install(|| dispatch(cli)));
    match result {
        Ok(false) => 0,
        Ok(true) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
