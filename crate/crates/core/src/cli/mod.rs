//! Command-line front end. Every subcommand writes a JSON report with a
//! manifest, or a CSV projection of it with `--format csv`.

mod commands;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith::ArithError;
use crate::cmbounds::CmError;
use crate::curvedeg::CurveError;
use crate::families::FamilyError;
use crate::gl2::enumerate::DEFAULT_EXHAUSTIVE_CEILING;
use crate::gl2::Gl2Error;

pub use report::{sidecar_path, Format, Manifest, Verdict, CODE_VERSION, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {field}: {message}")]
    Input { path: String, field: String, message: String },
    #[error("{0}")]
    Compute(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

macro_rules! compute_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Compute(e.to_string())
            }
        }
    )*};
}
compute_error!(Gl2Error, FamilyError, CurveError, CmError, ArithError);

#[derive(Debug, Parser)]
#[command(name = "degdiv", version, about = "Degree-divisibility computations for torsion of abelian varieties")]
pub struct Cli {
    /// Write the report here instead of stdout; a `.run.json` sidecar with timings goes next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads. Output does not depend on this.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for sampled enumeration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Defaults to csv when --out ends in `.csv`, json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Directory for cached subgroup enumerations.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orbit-divisibility check over conjugacy classes of subgroups of GL2(F_p).
    VerifyCases(VerifyCasesArgs),
    /// Pointwise-stabilizer checks inside the Cartan normalizers.
    VerifyLemmas(VerifyLemmasArgs),
    /// Classify the subgroup generated by the given matrices.
    Classify(ClassifyArgs),
    /// List conjugacy-class representatives of subgroups of GL2(F_p).
    Enumerate(EnumerateArgs),
    /// Genus of X_1(N) and the degree from which points are guaranteed.
    Genus(GenusArgs),
    /// Closed-point degree bounds for a curve of genus g.
    Degrees(DegreesArgs),
    /// Numerical semigroup data for a generator set.
    Semigroup(SemigroupArgs),
    /// Density of an integer set given as JSON clauses.
    Density(DensityArgs),
    /// Density of the prime-shift set {d : (l - 1) | c d for some prime l > C}.
    Ew(EwArgs),
    /// Excluded set and exponent bound for a family profile.
    Bepsilon(BepsilonArgs),
    /// Divisibility constants for CM abelian varieties.
    Cm(CmArgs),
}

#[derive(Debug, Args, Serialize)]
struct VerifyCasesArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    primes: Vec<u32>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    /// Subgroups drawn per prime in sampled mode.
    #[arg(long, default_value_t = 200)]
    count: u32,
    /// Also evaluate the arithmetic corollary for this base degree.
    #[arg(long)]
    d0: Option<u64>,
    /// Largest prime enumerated exhaustively.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CEILING)]
    ceiling: u32,
    /// Include one record per subgroup.
    #[arg(long)]
    details: bool,
}

#[derive(Debug, Args, Serialize)]
struct VerifyLemmasArgs {
    #[arg(long, default_value_t = 3)]
    p_min: u32,
    #[arg(long, default_value_t = 31)]
    p_max: u32,
}

#[derive(Debug, Args, Serialize)]
struct ClassifyArgs {
    #[arg(long)]
    p: u32,
    /// Generator `a,b,c,d` for [[a,b],[c,d]]; repeat for more.
    #[arg(long = "gen", required = true, allow_hyphen_values = true)]
    gens: Vec<String>,
    #[arg(long)]
    d0: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
struct EnumerateArgs {
    #[arg(long)]
    p: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    #[arg(long, default_value_t = 200)]
    count: u32,
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CEILING)]
    ceiling: u32,
}

#[derive(Debug, Args, Serialize)]
struct GenusArgs {
    #[arg(long, default_value_t = 100)]
    n_max: u64,
    /// Largest N reached in every degree from d on, for each listed d.
    #[arg(long, value_delimiter = ',')]
    reach: Vec<u64>,
}

#[derive(Debug, Args, Serialize)]
struct DegreesArgs {
    #[arg(long)]
    g: u64,
    /// Known closed-point degrees.
    #[arg(long, value_delimiter = ',')]
    generators: Vec<u64>,
    /// The curve has a rational Weierstrass point.
    #[arg(long)]
    weierstrass: bool,
}

#[derive(Debug, Args, Serialize)]
struct SemigroupArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    generators: Vec<u64>,
    /// Targets to test for membership.
    #[arg(long, value_delimiter = ',')]
    check: Vec<u64>,
}

#[derive(Debug, Args, Serialize)]
struct DensityArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    x: u64,
}

#[derive(Debug, Args, Serialize)]
struct EwArgs {
    #[arg(long)]
    c: u64,
    #[arg(long, conflicts_with = "epsilon", required_unless_present = "epsilon")]
    cutoff: Option<u64>,
    /// Find the least cutoff with density at most this instead.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    x: u64,
}

#[derive(Debug, Args, Serialize)]
struct BepsilonArgs {
    /// Family profile JSON.
    #[arg(long, conflicts_with = "cm_g", required_unless_present = "cm_g")]
    profile: Option<PathBuf>,
    /// Use the CM profile of this dimension.
    #[arg(long)]
    cm_g: Option<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    epsilon: Vec<String>,
    #[arg(long, default_value_t = 1_000_000)]
    x: u64,
}

#[derive(Debug, Args, Serialize)]
struct CmArgs {
    #[arg(long, default_value_t = 1)]
    g: u32,
    /// List the admissible torsion exponents at this degree.
    #[arg(long)]
    d: Option<u64>,
    #[arg(long, default_value_t = 13)]
    p_max: u64,
    #[arg(long, default_value_t = 3)]
    n_max: u32,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyCases(_) => "verify-cases",
            Command::VerifyLemmas(_) => "verify-lemmas",
            Command::Classify(_) => "classify",
            Command::Enumerate(_) => "enumerate",
            Command::Genus(_) => "genus",
            Command::Degrees(_) => "degrees",
            Command::Semigroup(_) => "semigroup",
            Command::Density(_) => "density",
            Command::Ew(_) => "ew",
            Command::Bepsilon(_) => "bepsilon",
            Command::Cm(_) => "cm",
        }
    }

    fn parameters(&self) -> serde_json::Value {
        let v = match self {
            Command::VerifyCases(a) => serde_json::to_value(a),
            Command::VerifyLemmas(a) => serde_json::to_value(a),
            Command::Classify(a) => serde_json::to_value(a),
            Command::Enumerate(a) => serde_json::to_value(a),
            Command::Genus(a) => serde_json::to_value(a),
            Command::Degrees(a) => serde_json::to_value(a),
            Command::Semigroup(a) => serde_json::to_value(a),
            Command::Density(a) => serde_json::to_value(a),
            Command::Ew(a) => serde_json::to_value(a),
            Command::Bepsilon(a) => serde_json::to_value(a),
            Command::Cm(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}

fn default_format(out: Option<&Path>) -> Format {
    match out.and_then(|p| p.extension()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Json,
    }
}

pub(crate) struct Context<'a> {
    pub seed: Option<u64>,
    pub cache_dir: Option<&'a Path>,
}

fn execute(cli: &Cli, started: u128) -> Result<Verdict, CliError> {
    let ctx = Context { seed: cli.seed, cache_dir: cli.cache_dir.as_deref() };
    let outcome = match &cli.command {
        Command::VerifyCases(a) => commands::verify_cases(a, &ctx)?,
        Command::VerifyLemmas(a) => commands::verify_lemmas(a)?,
        Command::Classify(a) => commands::classify(a)?,
        Command::Enumerate(a) => commands::enumerate(a, &ctx)?,
        Command::Genus(a) => commands::genus(a)?,
        Command::Degrees(a) => commands::degrees(a)?,
        Command::Semigroup(a) => commands::semigroup(a)?,
        Command::Density(a) => commands::density(a)?,
        Command::Ew(a) => commands::ew(a)?,
        Command::Bepsilon(a) => commands::bepsilon(a)?,
        Command::Cm(a) => commands::cm(a)?,
    };
    let manifest = Manifest {
        command: cli.command.name().to_string(),
        parameters: cli.command.parameters(),
        code_version: CODE_VERSION,
        seed: outcome.seed,
        verdict: outcome.verdict,
    };
    let how = report::Emit {
        out: cli.out.as_deref(),
        format: cli.format.unwrap_or_else(|| default_format(cli.out.as_deref())),
        jobs: rayon::current_num_threads(),
        started,
    };
    report::emit(&manifest, &outcome, how)?;
    Ok(outcome.verdict)
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let started = report::now_ms();
    let result = match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli, started)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} worker threads: {e}"))),
        },
        None => execute(&cli, started),
    };
    exit_code(result)
}

fn exit_code(result: Result<Verdict, CliError>) -> i32 {
    match result {
        Ok(Verdict::Fail) => EXIT_VERIFICATION_FAILED,
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
