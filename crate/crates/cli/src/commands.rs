//! The five subcommands. Each renders its artifact into memory first so that
//! output files are only touched once the computation has succeeded.

use std::io::Write;
use std::path::{Path, PathBuf};

use arithsemi::catalog::{Instance, InstanceCounts, SemigroupKind};
use arithsemi::json::{to_pretty, Num};
use arithsemi::meissel::EvaluationJson;
use arithsemi::mertens::report::{report_a, ConstantsDocument, SCHEMA_VERSION};
use arithsemi::mertens::{constants_report, zhang_report};
use arithsemi::normalization::{residuals, write_normalized_table};
use arithsemi::semigroup::exact_degree_identity_check;
use arithsemi::seqio::SequenceTable;
use arithsemi::{Error, MeisselContext, MertensTables, NormalizedSemigroup, SemigroupSpec};
use serde::Serialize;

use crate::config::{CommandName, Format, RunConfig};
use crate::exit::CliError;

/// Runs the configured command, writing to `--out` or `stdout`.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let outcome = match cfg.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?
            .install(|| dispatch(cfg)),
        None => dispatch(cfg),
    }?;
    for (path, bytes) in &outcome.files {
        std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    if let Some(bytes) = &outcome.stdout {
        stdout.write_all(bytes)?;
        stdout.flush()?;
    }
    match outcome.failed {
        Some(names) => Err(CliError::Verification(names)),
        None => Ok(()),
    }
}

#[derive(Default)]
struct Outcome {
    files: Vec<(PathBuf, Vec<u8>)>,
    stdout: Option<Vec<u8>>,
    /// Set when the artifact was produced but its checks failed.
    failed: Option<Vec<String>>,
}

impl Outcome {
    fn primary(cfg: &RunConfig, bytes: Vec<u8>) -> Self {
        match &cfg.out {
            Some(path) => Outcome {
                files: vec![(path.clone(), bytes)],
                ..Default::default()
            },
            None => Outcome {
                stdout: Some(bytes),
                ..Default::default()
            },
        }
    }
}

fn dispatch(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let instance = resolve_instance(cfg)?;
    match cfg.command {
        CommandName::Generate => generate(cfg, &instance),
        CommandName::Constants => constants(cfg, &instance),
        CommandName::Verify => verify(cfg, &instance),
        CommandName::Meissel => meissel(cfg, &instance),
        CommandName::Identity => identity(cfg, &instance),
    }
}

pub fn resolve_instance(cfg: &RunConfig) -> Result<Instance, CliError> {
    let table = match cfg.spec.kind {
        SemigroupKind::ExplicitP => Some(read_table(cfg.pfile.as_deref())?),
        SemigroupKind::ExplicitG => Some(read_table(cfg.gfile.as_deref())?),
        _ => None,
    };
    Ok(Instance::resolve(&cfg.spec, table.as_ref(), cfg.precision)?)
}

fn read_table(path: Option<&Path>) -> Result<SequenceTable, CliError> {
    let path = path.ok_or_else(|| CliError::Usage("missing sequence file".into()))?;
    SequenceTable::read_path(path).map_err(|e| match e {
        Error::Io(io) => CliError::Io(format!("{}: {io}", path.display())),
        other => CliError::Domain(other),
    })
}

fn generate(cfg: &RunConfig, instance: &Instance) -> Result<Outcome, CliError> {
    let norm = NormalizedSemigroup::from_instance(instance, cfg.precision)?;
    // r stays blank when A cannot be determined at this n_max
    let r = if instance.is_degenerate() {
        None
    } else {
        report_a(instance, &norm)
            .ok()
            .map(|a| residuals(norm.g_norm(), &a.a))
            .transpose()?
    };
    let mut bytes = Vec::new();
    write_normalized_table(&mut bytes, &norm, r.as_deref(), cfg.digits)?;
    Ok(Outcome::primary(cfg, bytes))
}

fn constants(cfg: &RunConfig, instance: &Instance) -> Result<Outcome, CliError> {
    let norm = NormalizedSemigroup::from_instance(instance, cfg.precision)?;
    let tables = MertensTables::new(&norm);
    let a = if instance.is_degenerate() { None } else { report_a(instance, &norm).ok() };
    let report = constants_report(&norm, &tables, a.as_ref(), cfg.tolerances.get("tail"))?;
    let doc = ConstantsDocument::new(&instance.spec, &report, cfg.precision, cfg.digits);
    Ok(Outcome::primary(cfg, to_pretty(&doc).into_bytes()))
}

fn verify(cfg: &RunConfig, instance: &Instance) -> Result<Outcome, CliError> {
    let report = zhang_report(instance, &cfg.tolerances, cfg.precision, cfg.digits)?;
    let mut outcome = Outcome::primary(cfg, to_pretty(&report).into_bytes());
    if !report.all_pass() {
        outcome.failed = Some(report.failing().into_iter().map(str::to_string).collect());
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct MeisselDocument {
    schema_version: u32,
    spec: SemigroupSpec,
    precision_bits: usize,
    #[serde(rename = "C_1")]
    c_1: Num,
    #[serde(rename = "J0")]
    j0: Num,
    #[serde(rename = "J0_tail_bound")]
    j0_tail_bound: f64,
    max_deviation: f64,
    evaluations: Vec<EvaluationJson>,
}

fn meissel(cfg: &RunConfig, instance: &Instance) -> Result<Outcome, CliError> {
    let prec = cfg.precision;
    if instance.is_degenerate() {
        return Err(Error::Domain("a semigroup without generators has no Meissel sum".into()).into());
    }
    let norm = NormalizedSemigroup::from_instance(instance, prec)?;
    let tables = MertensTables::new(&norm);
    let a = report_a(instance, &norm)?;
    let report = constants_report(&norm, &tables, Some(&a), cfg.tolerances.get("tail"))?;
    let c_1 = report.c_1.as_ref().expect("non-degenerate constants include C_1");
    let ctx = MeisselContext::new(&norm, &tables, &c_1.value)?;
    let grid = cfg
        .alpha
        .iter()
        .map(|a| prec.parse(a))
        .collect::<arithsemi::Result<Vec<_>>>()?;
    let n_max = instance.n_max();
    let scan = ctx.alpha_scan(&grid, cfg.k.unwrap_or(n_max), cfg.n.unwrap_or(n_max))?;

    let doc = MeisselDocument {
        schema_version: SCHEMA_VERSION,
        spec: instance.spec.clone(),
        precision_bits: prec.bits(),
        c_1: Num::real(&c_1.value, cfg.digits),
        j0: Num::real(&scan.j0.value, cfg.digits),
        j0_tail_bound: scan.j0.tail_bound,
        max_deviation: scan.max_deviation,
        evaluations: scan.rows.iter().map(|r| r.eval.to_json(cfg.digits)).collect(),
    };
    let json = to_pretty(&doc).into_bytes();
    match cfg.format {
        Format::Json => Ok(Outcome::primary(cfg, json)),
        Format::Csv => {
            let mut csv = Vec::new();
            scan.write_csv(&mut csv, cfg.digits)?;
            let mut outcome = Outcome::primary(cfg, csv);
            if let Some(path) = &cfg.out {
                outcome.files.push((path.with_extension("json"), json));
            }
            Ok(outcome)
        }
    }
}

fn identity(cfg: &RunConfig, instance: &Instance) -> Result<Outcome, CliError> {
    let (p, g) = match &instance.counts {
        InstanceCounts::Exact { p, g } => (p, g),
        InstanceCounts::Analysis(_) => {
            return Err(Error::Domain("the degree identity needs exact integer counts".into()).into())
        }
    };
    let n_max = instance.n_max();
    let failures: Vec<usize> = (1..=n_max).filter(|&n| !exact_degree_identity_check(p, g, n)).collect();
    let text = if failures.is_empty() {
        format!("degree identity holds for 1 <= n <= {n_max}\n")
    } else {
        let shown: Vec<String> = failures.iter().take(20).map(|n| n.to_string()).collect();
        let more = if failures.len() > 20 { ", ..." } else { "" };
        format!("degree identity fails at n = {}{more}\n", shown.join(", "))
    };
    let mut outcome = Outcome::primary(cfg, text.into_bytes());
    if let Some(&first) = failures.first() {
        outcome.failed = Some(vec![format!("degree_identity (first failure at n = {first})")]);
    }
    Ok(outcome)
}
