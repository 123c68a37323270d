//! Run configuration: command-line flags merged over an optional TOML file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use arithsemi::catalog::{CountMode, Perturbation, SemigroupKind, SemigroupSpec};
use arithsemi::real::parse_rational;
use arithsemi::{Precision, Tolerances};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::exit::CliError;

#[derive(Debug, Parser)]
#[command(name = "arithsemi", version, about = "Exact counts, Mertens constants and Meissel sums for additive arithmetical semigroups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the n,P,G,lambda,g_norm,r table.
    Generate(CommonArgs),
    /// Compute gamma, A, C_M, C_1, C_2, C_3 and I.
    Constants(CommonArgs),
    /// Run every check and emit the verification report.
    Verify(CommonArgs),
    /// Scan the Meissel identity over a grid of alpha.
    Meissel(CommonArgs),
    /// Check the exact degree identity for every degree up to n_max.
    Identity(CommonArgs),
}

impl Command {
    pub fn name(&self) -> CommandName {
        match self {
            Command::Generate(_) => CommandName::Generate,
            Command::Constants(_) => CommandName::Constants,
            Command::Verify(_) => CommandName::Verify,
            Command::Meissel(_) => CommandName::Meissel,
            Command::Identity(_) => CommandName::Identity,
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Generate(a) | Command::Constants(a) | Command::Verify(a) | Command::Meissel(a) | Command::Identity(a) => a,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandName {
    Generate,
    Constants,
    Verify,
    Meissel,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemigroupChoice {
    Polyfq,
    File,
    Perturbed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    Strict,
    Analysis,
}

#[derive(Clone, Debug, Default, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub semigroup: Option<SemigroupChoice>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub pfile: Option<PathBuf>,
    #[arg(long)]
    pub gfile: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Working precision in bits.
    #[arg(long)]
    pub precision: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Significant digits for printed reals.
    #[arg(long)]
    pub digits: Option<usize>,
    /// Check tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated decreasing alpha grid (meissel).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Series truncation degree K (meissel; default n_max).
    #[arg(long)]
    pub k: Option<usize>,
    /// Integral truncation point N (meissel; default n_max).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeChoice>,
    /// Highest perturbed degree (perturbed).
    #[arg(long)]
    pub perturb_degree: Option<usize>,
    /// Largest extra generator count per perturbed degree (perturbed).
    #[arg(long)]
    pub perturb_amplitude: Option<u64>,
}

/// Keys accepted in a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub semigroup: Option<SemigroupChoice>,
    pub q: Option<u64>,
    pub nmax: Option<usize>,
    pub pfile: Option<PathBuf>,
    pub gfile: Option<PathBuf>,
    pub seed: Option<u64>,
    pub precision: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub digits: Option<usize>,
    pub alpha: Option<String>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub mode: Option<ModeChoice>,
    pub perturb_degree: Option<usize>,
    pub perturb_amplitude: Option<u64>,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved and validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandName,
    pub spec: SemigroupSpec,
    pub pfile: Option<PathBuf>,
    pub gfile: Option<PathBuf>,
    pub precision: Precision,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    pub digits: usize,
    pub alpha: Vec<String>,
    pub k: Option<usize>,
    pub n: Option<usize>,
}

pub const DEFAULT_DIGITS: usize = 25;
pub const DEFAULT_ALPHA: &str = "0.4,0.2,0.1,0.05";

/// Parses `argv` (program name first) and merges the config file.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    resolve(&cli.command)
}

fn resolve(command: &Command) -> Result<RunConfig, CliError> {
    let args = command.args();
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    // file values are validated as config errors, flag values as usage errors
    let from_file = |what: &str| CliError::Config(format!("config file: {what}"));
    let pick = |flag: bool| if flag { CliError::Usage as fn(String) -> CliError } else { CliError::Config as fn(String) -> CliError };

    let semigroup = args.semigroup.or(file.semigroup).unwrap_or(SemigroupChoice::Polyfq);
    let mode = match args.mode.or(file.mode).unwrap_or(ModeChoice::Strict) {
        ModeChoice::Strict => CountMode::Strict,
        ModeChoice::Analysis => CountMode::Analysis,
    };
    let q = args.q.or(file.q);
    let q_err = pick(args.q.is_some());
    if let Some(q) = q {
        if q < 2 {
            return Err(q_err(format!("--q must be >= 2, got {q}")));
        }
    }
    let nmax = args
        .nmax
        .or(file.nmax)
        .ok_or_else(|| CliError::Usage("--nmax is required".into()))?;
    if nmax == 0 {
        return Err(pick(args.nmax.is_some())("--nmax must be >= 1".into()));
    }
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let pfile = args.pfile.clone().or(file.pfile.clone());
    let gfile = args.gfile.clone().or(file.gfile.clone());

    let spec = match semigroup {
        SemigroupChoice::Polyfq => SemigroupSpec::poly(q.unwrap_or(2), nmax),
        SemigroupChoice::Perturbed => {
            let default = Perturbation::default();
            let perturbation = Perturbation {
                max_degree: args.perturb_degree.or(file.perturb_degree).unwrap_or(default.max_degree),
                amplitude: args.perturb_amplitude.or(file.perturb_amplitude).unwrap_or(default.amplitude),
            };
            SemigroupSpec::perturbed(q.unwrap_or(2), nmax, seed, perturbation)
        }
        SemigroupChoice::File => {
            let (kind, source) = match (&pfile, &gfile) {
                (Some(p), None) => (SemigroupKind::ExplicitP, p),
                (None, Some(g)) => (SemigroupKind::ExplicitG, g),
                _ => return Err(CliError::Usage("--semigroup file needs exactly one of --pfile, --gfile".into())),
            };
            let mut spec = SemigroupSpec::explicit(kind, nmax, q, mode);
            spec.seed = seed;
            spec.source = Some(source.display().to_string());
            spec
        }
    };
    let mut spec = spec;
    if semigroup != SemigroupChoice::File {
        if mode == CountMode::Analysis {
            return Err(CliError::Usage("--mode analysis applies to --semigroup file only".into()));
        }
        spec.seed = seed;
    }
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let precision_bits = args.precision.or(file.precision).unwrap_or(Precision::DEFAULT.bits());
    let precision = Precision::new(precision_bits).map_err(|e| pick(args.precision.is_some())(e.to_string()))?;

    let mut tolerances = Tolerances::default();
    for (name, value) in &file.tol {
        tolerances.set(name, *value).map_err(|e| from_file(&e.to_string()))?;
    }
    for item in &args.tol {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--tol expects name=value, got {item:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--tol {name}: {value:?} is not a number")))?;
        tolerances.set(name.trim(), value).map_err(|e| CliError::Usage(e.to_string()))?;
    }

    let digits = args.digits.or(file.digits).unwrap_or(DEFAULT_DIGITS);
    if !(1..=1000).contains(&digits) {
        return Err(pick(args.digits.is_some())(format!("--digits must lie in 1..=1000, got {digits}")));
    }
    let threads = args.threads.or(file.threads);
    if threads == Some(0) {
        return Err(pick(args.threads.is_some())("--threads must be >= 1".into()));
    }

    let name = command.name();
    let format = args.format.or(file.format).unwrap_or(match name {
        CommandName::Generate | CommandName::Meissel => Format::Csv,
        _ => Format::Json,
    });
    if name == CommandName::Generate && format == Format::Json {
        return Err(CliError::Usage("generate writes CSV only".into()));
    }
    if matches!(name, CommandName::Constants | CommandName::Verify) && format == Format::Csv {
        return Err(CliError::Usage("constants and verify write JSON only".into()));
    }

    let alpha_flag = args.alpha.is_some();
    let alpha_text = args.alpha.clone().or(file.alpha.clone()).unwrap_or_else(|| DEFAULT_ALPHA.to_string());
    let alpha: Vec<String> = alpha_text.split(',').map(|s| s.trim().to_string()).collect();
    for a in &alpha {
        parse_rational(a).map_err(|e| pick(alpha_flag)(format!("--alpha: {e}")))?;
    }
    let k = args.k.or(file.k);
    let n = args.n.or(file.n);
    for (label, v) in [("--k", k), ("--n", n)] {
        if let Some(v) = v {
            if v < 2 || v > nmax {
                return Err(CliError::Usage(format!("{label} must lie in 2..={nmax}, got {v}")));
            }
        }
    }

    Ok(RunConfig {
        command: name,
        spec,
        pfile,
        gfile,
        precision,
        tolerances,
        out: args.out.clone().or(file.out.clone()),
        format,
        threads,
        digits,
        alpha,
        k,
        n,
    })
}
