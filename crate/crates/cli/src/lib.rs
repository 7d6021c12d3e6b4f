//! The `anl` command line: one subcommand per library operation.
//!
//! Exit status is 0 on success, 1 when a checked property fails (an
//! `--expect` mismatch or a failed decomposition), and 2 on usage errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anl_core::behavior::Behavior;
use anl_core::bell::{self, local_lp, LocalLpOutcome, MerminSign};
use anl_core::bisep::{bisep_lp, enumerate_bipartitions, ghz_bisep_mixture, verify_ghz_bisep, BisepCertificate};
use anl_core::nsbox::{ghz_behavior, ns_box, BoxFamily};
use anl_core::oracle::{appendix_c_value, ghz_state, measure_behavior, oracle_compare, EquatorialSetting};
use anl_core::protocols::{
    eve_partition_success, run_mss, run_qkd, run_qkd_leakage, AdversaryModel, Grouping, LeakPolicy, Transcript,
};
use anl_core::rational;
use anl_core::Root2Scalar;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

pub use anl_core::bisep::Bipartition;

/// Parses `"1,3|2,4"` into a canonical bipartition of `n` parties.
pub fn parse_partition_spec(text: &str, n: usize) -> anl_core::Result<Bipartition> {
    Bipartition::parse(text, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Ok = 0,
    PropertyFailed = 1,
    Usage = 2,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] anl_core::Error),
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Pretty,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "anl",
    version,
    about = "Exact GHZ, non-signaling box and Bell-test workbench"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Parties {
    /// Number of parties.
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct Subject {
    /// Number of parties (the GHZ table is used unless --input is given).
    #[arg(long)]
    pub n: Option<usize>,
    /// Behavior JSON file to analyse instead of the GHZ table.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Run {
    /// Number of parties.
    #[arg(long)]
    pub n: usize,
    /// Number of rounds to simulate.
    #[arg(long, default_value_t = 10_000)]
    pub rounds: u64,
    /// Master seed; defaults to $ANL_SEED, then 0.
    #[arg(long, env = "ANL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Also write one CSV line per round to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LocalExpectation {
    Local,
    Nonlocal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BisepExpectation {
    Biseparable,
    NotBiseparable,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact GHZ correlation table.
    GhzTable(Parties),
    /// One of the four non-signaling box families.
    NsBox {
        /// Number of parties.
        #[arg(long)]
        n: usize,
        /// mu1, mu2, mu3 or mu4.
        #[arg(long)]
        family: BoxFamily,
    },
    /// Four-strategy biseparable mixture of the GHZ table across a split.
    Decompose {
        /// Number of parties.
        #[arg(long)]
        n: usize,
        /// Bipartition such as "1,3|2,4".
        #[arg(long)]
        split: String,
    },
    /// Mixes the decomposition and compares it with the GHZ table.
    VerifyDecomposition {
        /// Number of parties.
        #[arg(long)]
        n: usize,
        /// Bipartition to check.
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        split: Option<String>,
        /// Check every bipartition.
        #[arg(long)]
        all: bool,
    },
    /// Exact biseparability LP (groups of at most two parties).
    BisepLp {
        #[command(flatten)]
        subject: Subject,
        #[arg(long)]
        split: String,
        #[arg(long, value_enum)]
        expect: Option<BisepExpectation>,
    },
    /// Mermin-Bell values B+ and B-.
    Mermin(Subject),
    /// The Σ-expression and its 3-separable bound.
    Sigma(Subject),
    /// Mermin, Σ and bound comparisons together.
    Classify(Subject),
    /// Exact local-polytope membership with a certificate when nonlocal.
    LocalTest {
        #[command(flatten)]
        subject: Subject,
        #[arg(long, value_enum)]
        expect: Option<LocalExpectation>,
    },
    /// Statevector cross-check of the GHZ table.
    Oracle {
        /// Number of parties.
        #[arg(long)]
        n: usize,
        /// Also evaluate the biseparable-state Mermin construction.
        #[arg(long)]
        biseparable: bool,
    },
    /// Multipartite secret sharing.
    SimulateMss {
        #[command(flatten)]
        run: Run,
        /// Eve's biseparable source, e.g. "bisep:1|2,3".
        #[arg(long)]
        adversary: Option<String>,
        /// "random" or a fixed split such as "1|2,3".
        #[arg(long, default_value = "random")]
        grouping: String,
    },
    /// Leakage-resilient QKD.
    SimulateQkd {
        #[command(flatten)]
        run: Run,
        /// none, all-but-one, all, side-a, side-b or a party list.
        #[arg(long)]
        leak: Option<LeakPolicy>,
    },
    /// Eve guessing the bipartition uniformly at random.
    EvePartition {
        /// Number of parties.
        #[arg(long)]
        n: usize,
        /// Number of rounds to simulate.
        #[arg(long, default_value_t = 10_000)]
        rounds: u64,
        #[arg(long, env = "ANL_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn emit<T: Serialize>(out: &mut dyn Write, format: Format, value: &T) -> Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(value).expect("serializable"))?,
        Format::Pretty => writeln!(out, "{}", serde_json::to_string_pretty(value).expect("serializable"))?,
        Format::Csv => {
            return Err(CliError::Usage(
                "csv output is only available for tables and transcripts".into(),
            ))
        }
    }
    Ok(())
}

fn emit_table(out: &mut dyn Write, format: Format, b: &Behavior) -> Result<()> {
    if format != Format::Csv {
        return emit(out, format, b);
    }
    writeln!(out, "input,output,probability")?;
    let n = b.n();
    let bits = |w: u32| {
        (0..n)
            .map(|i| char::from(b'0' + ((w >> i) & 1) as u8))
            .collect::<String>()
    };
    for x in 0..(1u32 << n) {
        for a in 0..(1u32 << n) {
            writeln!(out, "{},{},{}", bits(x), bits(a), rational::to_text(b.prob(x, a)))?;
        }
    }
    Ok(())
}

fn load_subject(subject: &Subject) -> Result<Behavior> {
    match (&subject.input, subject.n) {
        (Some(path), n) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?;
            let b = Behavior::from_json(&text)?;
            if let Some(n) = n {
                if n != b.n() {
                    return Err(CliError::Usage(format!(
                        "--n {n} but {} holds {} parties",
                        path.display(),
                        b.n()
                    )));
                }
            }
            Ok(b)
        }
        (None, Some(n)) => Ok(ghz_behavior(n)?),
        (None, None) => Err(CliError::Usage("give --n or --input".into())),
    }
}

fn write_csv(path: &Option<PathBuf>, t: &Transcript) -> Result<()> {
    if let Some(path) = path {
        fs::write(path, t.to_csv())?;
    }
    Ok(())
}

fn check_csv_target(path: &Option<PathBuf>) -> Result<()> {
    if let Some(parent) = path.as_ref().and_then(|p| p.parent()) {
        if !parent.as_os_str().is_empty() && !parent.is_dir() {
            return Err(CliError::Usage(format!(
                "directory {} does not exist",
                parent.display()
            )));
        }
    }
    Ok(())
}

fn emit_transcript(out: &mut dyn Write, format: Format, t: &Transcript) -> Result<()> {
    if format == Format::Csv {
        write!(out, "{}", t.to_csv())?;
        Ok(())
    } else {
        emit(out, format, &t.summary_json())
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Status> {
    let format = cli.format;
    match &cli.command {
        Command::GhzTable(p) => emit_table(out, format, &ghz_behavior(p.n)?)?,
        Command::NsBox { n, family } => emit_table(out, format, &ns_box(*n, *family)?)?,
        Command::Decompose { n, split } => {
            let bp = parse_partition_spec(split, *n)?;
            let m = ghz_bisep_mixture(*n, &bp)?;
            emit(out, format, &json!({ "split": bp.spec(), "mixture": m }))?;
        }
        Command::VerifyDecomposition { n, split, all } => {
            let splits = if *all {
                enumerate_bipartitions(*n)
            } else {
                let spec = split.as_deref().expect("clap requires --split without --all");
                vec![parse_partition_spec(spec, *n)?]
            };
            if splits.is_empty() {
                return Err(CliError::Usage(format!("{n} parties admit no bipartition")));
            }
            let mut failed = false;
            for bp in splits {
                let ok = verify_ghz_bisep(*n, &bp);
                failed |= !ok;
                writeln!(out, "{} {}", if ok { "PASS" } else { "FAIL" }, bp.spec())?;
            }
            if failed {
                return Ok(Status::PropertyFailed);
            }
        }
        Command::BisepLp { subject, split, expect } => {
            let b = load_subject(subject)?;
            let bp = parse_partition_spec(split, b.n())?;
            let result = bisep_lp(&b, &bp)?;
            let (biseparable, detail) = match &result {
                BisepCertificate::Biseparable(m) => (true, json!({ "mixture": m })),
                BisepCertificate::NotBiseparable(c) => (false, json!({ "certificate": c.to_document() })),
            };
            emit(
                out,
                format,
                &json!({ "split": bp.spec(), "biseparable": biseparable, "result": detail }),
            )?;
            if let Some(e) = expect {
                if biseparable != (*e == BisepExpectation::Biseparable) {
                    return Ok(Status::PropertyFailed);
                }
            }
        }
        Command::Mermin(subject) => {
            let b = load_subject(subject)?;
            let plus = bell::mermin_value(&b, MerminSign::Plus);
            let minus = bell::mermin_value(&b, MerminSign::Minus);
            let max = plus.abs().max(minus.abs());
            emit(
                out,
                format,
                &json!({ "n": b.n(), "b_plus": plus, "b_minus": minus, "max_abs": max, "value": max.to_string() }),
            )?;
        }
        Command::Sigma(subject) => {
            let b = load_subject(subject)?;
            let sigma = bell::sigma_value(&b);
            let bound = bell::three_separable_sigma_bound(b.n());
            emit(
                out,
                format,
                &json!({
                    "n": b.n(),
                    "sigma": sigma,
                    "value": sigma.to_string(),
                    "three_separable_bound": bound,
                    "exceeds_bound": sigma > bound,
                }),
            )?;
        }
        Command::Classify(subject) => emit(out, format, &bell::classify(&load_subject(subject)?))?,
        Command::LocalTest { subject, expect } => {
            let b = load_subject(subject)?;
            let (local, detail) = match local_lp(&b)? {
                LocalLpOutcome::Local(m) => (true, json!({ "model": m })),
                LocalLpOutcome::Nonlocal(c) => {
                    let normalized = c.normalized().map(|c| c.to_document());
                    (
                        false,
                        json!({ "certificate": c.to_document(), "normalized": normalized }),
                    )
                }
            };
            emit(out, format, &json!({ "n": b.n(), "local": local, "result": detail }))?;
            if let Some(e) = expect {
                if local != (*e == LocalExpectation::Local) {
                    return Ok(Status::PropertyFailed);
                }
            }
        }
        Command::Oracle { n, biseparable } => {
            let table = measure_behavior(&ghz_state(*n)?, &EquatorialSetting::pauli_xy(*n))?;
            let deviation = oracle_compare(&ghz_behavior(*n)?, &table)?;
            let mut report = json!({ "n": n, "max_deviation": deviation });
            if *biseparable {
                let value = appendix_c_value(*n)?;
                let expected = Root2Scalar::sqrt2_pow(*n as i64 - 2);
                report["biseparable"] = json!({
                    "value": value,
                    "expected": expected,
                    "error": (value - expected.to_f64()).abs(),
                });
            }
            emit(out, format, &report)?;
        }
        Command::SimulateMss {
            run,
            adversary,
            grouping,
        } => {
            check_csv_target(&run.csv)?;
            let grouping = match grouping.as_str() {
                "random" => Grouping::Random,
                spec => Grouping::Fixed(parse_partition_spec(spec, run.n)?),
            };
            let adversary = match adversary.as_deref() {
                None | Some("none") => AdversaryModel::None,
                Some(text) => match text.strip_prefix("bisep:") {
                    Some(spec) => AdversaryModel::BisepBox {
                        guess: parse_partition_spec(spec, run.n)?,
                    },
                    None => match text.strip_prefix("leak:") {
                        Some(policy) => AdversaryModel::Leakage(policy.parse()?),
                        None => {
                            return Err(CliError::Usage(format!(
                                "adversary must be none, bisep:<split> or leak:<policy>, got {text:?}"
                            )))
                        }
                    },
                },
            };
            let t = run_mss(run.n, run.rounds, run.seed, grouping, adversary)?;
            write_csv(&run.csv, &t)?;
            emit_transcript(out, format, &t)?;
        }
        Command::SimulateQkd { run, leak } => {
            check_csv_target(&run.csv)?;
            match leak {
                Some(policy) if format != Format::Csv && run.csv.is_none() => {
                    emit(out, format, &run_qkd_leakage(run.n, run.rounds, run.seed, *policy)?)?;
                }
                _ => {
                    let adversary = leak.map_or(AdversaryModel::None, AdversaryModel::Leakage);
                    let t = run_qkd(run.n, run.rounds, run.seed, adversary)?;
                    write_csv(&run.csv, &t)?;
                    emit_transcript(out, format, &t)?;
                }
            }
        }
        Command::EvePartition { n, rounds, seed } => emit(out, format, &eve_partition_success(*n, *rounds, *seed)?)?,
    }
    Ok(Status::Ok)
}
