//! The `seqpat` command line.
//!
//! Exit status is 0 on success, 1 for usage errors (bad flags or parameter
//! values) and 2 for data errors (unreadable files, malformed input).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::approx::{
    match_and_support_report, mine_approximate, ApproxConfig, CompatibilityMatrix,
};
use crate::error::Error;
use crate::generator::{generate_synthetic, GeneratorSpec, Plant};
use crate::pattern::Pattern;
use crate::periodic::{mine_periodic, PeriodicConfig, PeriodicResult};
use crate::sequence::{parse_sequence, parse_sequence_with, Alphabet, SymbolSequence};
use crate::surprise::{mine_surprising, symbol_stats, ScoredPattern, SurpriseConfig};

#[derive(Debug, Parser)]
#[command(
    name = "seqpat",
    version,
    about = "Mine periodic, surprising and approximate patterns from symbol sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Partial periodic patterns with their best valid subsequence.
    Periodic(PeriodicArgs),
    /// Patterns ranked by information gain.
    Surprise(SurpriseArgs),
    /// Approximate patterns under a compatibility matrix.
    Approx(ApproxArgs),
    /// Generate a synthetic sequence with planted patterns.
    Gen(GenArgs),
    /// Brute-force reference results for small inputs.
    #[cfg(feature = "oracle")]
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[cfg(feature = "oracle")]
#[derive(Debug, Subcommand)]
enum OracleCommand {
    Periodic(PeriodicArgs),
    Surprise(SurpriseArgs),
    Approx(ApproxArgs),
    /// Every length-|pattern| subsequence of one sequence with its match.
    Match(MatchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Jsonl,
    Tsv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write results here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
}

#[derive(Debug, Args)]
struct PeriodicArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    min_rep: usize,
    #[arg(long, default_value_t = 0)]
    max_dist: usize,
    #[arg(long)]
    max_period: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
#[group(id = "filter", required = true, multiple = false, args = ["min_gain", "top_k"])]
struct SurpriseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    min_gain: Option<f64>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    /// Also emit one row per symbol with its probability and information.
    #[arg(long)]
    symbol_table: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ApproxArgs {
    /// One sequence per file; repeat for a database.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    min_match: f64,
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[cfg(feature = "oracle")]
#[derive(Debug, Args)]
struct MatchArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    matrix: PathBuf,
    /// Space- or comma-separated symbols, e.g. "I2 I3".
    #[arg(long)]
    pattern: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    alphabet_size: usize,
    #[arg(long)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// SYMS@PERIOD@START@REPS@NOISE, SYMS comma-separated with `*` wildcards
    /// over the names a, b, c, ...
    #[arg(long)]
    plant: Vec<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn fixed(x: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{x:.6}")).expect("decimal literal is valid JSON")
}

#[derive(Serialize)]
struct PeriodicRecord {
    pattern: String,
    period: usize,
    total_reps: usize,
    segments: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct SurpriseRecord {
    pattern: String,
    support: usize,
    info: Box<RawValue>,
    gain: Box<RawValue>,
}

#[derive(Serialize)]
struct SymbolRecord {
    symbol: String,
    count: usize,
    prob: Box<RawValue>,
    info: Box<RawValue>,
    gain: Box<RawValue>,
}

#[derive(Serialize)]
struct ApproxRecord {
    pattern: String,
    #[serde(rename = "match")]
    value: Box<RawValue>,
    per_sequence: Vec<Box<RawValue>>,
    support: usize,
}

#[cfg(feature = "oracle")]
#[derive(Serialize)]
struct SubsequenceRecord {
    positions: Vec<usize>,
    subsequence: String,
    value: Box<RawValue>,
}

/// A record that can also be written as a TSV row.
trait Row: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

fn raw_list(values: &[Box<RawValue>]) -> String {
    values.iter().map(|v| v.get()).collect::<Vec<_>>().join(",")
}

impl Row for PeriodicRecord {
    const HEADER: &'static [&'static str] = &["pattern", "period", "total_reps", "segments"];
    fn cells(&self) -> Vec<String> {
        let segs: Vec<String> = self
            .segments
            .iter()
            .map(|(s, r)| format!("{s}:{r}"))
            .collect();
        vec![
            self.pattern.clone(),
            self.period.to_string(),
            self.total_reps.to_string(),
            segs.join(";"),
        ]
    }
}

impl Row for SurpriseRecord {
    const HEADER: &'static [&'static str] = &["pattern", "support", "info", "gain"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.pattern.clone(),
            self.support.to_string(),
            self.info.get().to_owned(),
            self.gain.get().to_owned(),
        ]
    }
}

impl Row for SymbolRecord {
    const HEADER: &'static [&'static str] = &["symbol", "count", "prob", "info", "gain"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.symbol.clone(),
            self.count.to_string(),
            self.prob.get().to_owned(),
            self.info.get().to_owned(),
            self.gain.get().to_owned(),
        ]
    }
}

impl Row for ApproxRecord {
    const HEADER: &'static [&'static str] = &["pattern", "match", "per_sequence", "support"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.pattern.clone(),
            self.value.get().to_owned(),
            raw_list(&self.per_sequence),
            self.support.to_string(),
        ]
    }
}

#[cfg(feature = "oracle")]
impl Row for SubsequenceRecord {
    const HEADER: &'static [&'static str] = &["positions", "subsequence", "value"];
    fn cells(&self) -> Vec<String> {
        let pos: Vec<String> = self.positions.iter().map(usize::to_string).collect();
        vec![
            pos.join(","),
            self.subsequence.clone(),
            self.value.get().to_owned(),
        ]
    }
}

fn emit<R: Row>(rows: &[R], out: &OutputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let mut buf = Vec::new();
    match out.format {
        Format::Jsonl => {
            for r in rows {
                serde_json::to_writer(&mut buf, r).expect("records serialize");
                buf.push(b'\n');
            }
        }
        Format::Tsv => {
            buf.extend_from_slice(R::HEADER.join("\t").as_bytes());
            buf.push(b'\n');
            for r in rows {
                buf.extend_from_slice(r.cells().join("\t").as_bytes());
                buf.push(b'\n');
            }
        }
    }
    write_output(&buf, out.output.as_deref(), stdout)
}

fn write_output(buf: &[u8], path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, buf).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => stdout
            .write_all(buf)
            .map_err(|e| Failure::Data(format!("stdout: {e}"))),
    }
}

fn periodic_records(alphabet: &Alphabet, results: &[PeriodicResult]) -> Vec<PeriodicRecord> {
    results
        .iter()
        .map(|r| PeriodicRecord {
            pattern: r.pattern.render(alphabet),
            period: r.pattern.period(),
            total_reps: r.best.total_reps,
            segments: r.best.segments.iter().map(|s| (s.start, s.reps)).collect(),
        })
        .collect()
}

fn surprise_records(alphabet: &Alphabet, results: &[ScoredPattern]) -> Vec<SurpriseRecord> {
    results
        .iter()
        .map(|r| SurpriseRecord {
            pattern: r.pattern.render(alphabet),
            support: r.support,
            info: fixed(r.info),
            gain: fixed(r.gain),
        })
        .collect()
}

fn load_sequence(path: &Path) -> Result<(Alphabet, SymbolSequence), Failure> {
    parse_sequence(&read(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn periodic_config(args: &PeriodicArgs) -> Result<PeriodicConfig, Failure> {
    Ok(PeriodicConfig::new(
        args.min_rep,
        args.max_dist,
        args.max_period,
    )?)
}

fn surprise_config(args: &SurpriseArgs) -> Result<SurpriseConfig, Failure> {
    Ok(match (args.min_gain, args.top_k) {
        (Some(g), None) => SurpriseConfig::min_gain(g, args.max_len)?,
        (None, Some(k)) => SurpriseConfig::top_k(k, args.max_len)?,
        _ => {
            return Err(Failure::Usage(
                "exactly one of --min-gain or --top-k".into(),
            ))
        }
    })
}

fn run_periodic(args: PeriodicArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cfg = periodic_config(&args)?;
    let (alphabet, seq) = load_sequence(&args.input)?;
    let results = mine_periodic(&seq, &cfg)?;
    emit(&periodic_records(&alphabet, &results), &args.out, stdout)
}

fn run_surprise(args: SurpriseArgs, stdout: &mut dyn Write, oracle: bool) -> Result<(), Failure> {
    let cfg = surprise_config(&args)?;
    let (alphabet, seq) = load_sequence(&args.input)?;
    if args.symbol_table {
        let rows: Vec<SymbolRecord> = symbol_stats(&seq)
            .into_iter()
            .map(|r| SymbolRecord {
                symbol: alphabet.name(r.symbol).to_owned(),
                count: r.count,
                prob: fixed(r.prob),
                info: fixed(r.info),
                gain: fixed(r.gain),
            })
            .collect();
        return emit(&rows, &args.out, stdout);
    }
    let results = if oracle {
        oracle_surprise(&seq, &cfg)?
    } else {
        mine_surprising(&seq, &cfg)?
    };
    emit(&surprise_records(&alphabet, &results), &args.out, stdout)
}

#[cfg(feature = "oracle")]
fn oracle_surprise(
    seq: &SymbolSequence,
    cfg: &SurpriseConfig,
) -> Result<Vec<ScoredPattern>, Failure> {
    use crate::surprise::SurpriseMode;
    let mut all = crate::oracle::oracle_info_gain(seq, cfg.max_len)?;
    match cfg.mode {
        SurpriseMode::MinGain(t) => all.retain(|p| p.gain >= t),
        SurpriseMode::TopK(k) => all.truncate(k),
    }
    Ok(all)
}

#[cfg(not(feature = "oracle"))]
fn oracle_surprise(_: &SymbolSequence, _: &SurpriseConfig) -> Result<Vec<ScoredPattern>, Failure> {
    unreachable!("oracle subcommand requires the `oracle` feature")
}

fn load_database(args: &ApproxArgs) -> Result<(CompatibilityMatrix, Vec<SymbolSequence>), Failure> {
    let matrix = CompatibilityMatrix::from_csv(&read(&args.matrix)?)
        .map_err(|e| Failure::Data(format!("{}: {e}", args.matrix.display())))?;
    let db = args
        .input
        .iter()
        .map(|p| {
            parse_sequence_with(&read(p)?, matrix.alphabet())
                .map_err(|e| Failure::Data(format!("{}: {e}", p.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((matrix, db))
}

fn run_approx(args: ApproxArgs, stdout: &mut dyn Write, oracle: bool) -> Result<(), Failure> {
    let cfg = ApproxConfig::new(args.min_match, args.max_len)?;
    let (matrix, db) = load_database(&args)?;
    let found = if oracle {
        oracle_approx(&db, &matrix, &cfg)?
    } else {
        mine_approximate(&db, &matrix, &cfg)?
    };
    let rows = found
        .iter()
        .map(|r| {
            let report = match_and_support_report(&r.pattern, &db, &matrix)?;
            Ok(ApproxRecord {
                pattern: r.pattern.render(matrix.alphabet()),
                value: fixed(r.value),
                per_sequence: r.per_sequence.iter().copied().map(fixed).collect(),
                support: report.support,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    emit(&rows, &args.out, stdout)
}

#[cfg(feature = "oracle")]
fn oracle_approx(
    db: &[SymbolSequence],
    c: &CompatibilityMatrix,
    cfg: &ApproxConfig,
) -> Result<Vec<crate::approx::ApproxPattern>, Failure> {
    Ok(crate::oracle::oracle_approx(db, c, cfg)?)
}

#[cfg(not(feature = "oracle"))]
fn oracle_approx(
    _: &[SymbolSequence],
    _: &CompatibilityMatrix,
    _: &ApproxConfig,
) -> Result<Vec<crate::approx::ApproxPattern>, Failure> {
    unreachable!("oracle subcommand requires the `oracle` feature")
}

/// Parses `SYMS@PERIOD@START@REPS@NOISE`.
fn parse_plant(text: &str, alphabet: &Alphabet) -> Result<Plant, Failure> {
    let usage = || {
        Failure::Usage(format!(
            "--plant `{text}`: expected SYMS@PERIOD@START@REPS@NOISE"
        ))
    };
    let parts: Vec<&str> = text.split('@').collect();
    let [syms, period, start, reps, noise] = parts.as_slice() else {
        return Err(usage());
    };
    let pattern = Pattern::parse(syms, alphabet)
        .map_err(|e| Failure::Usage(format!("--plant `{text}`: {e}")))?;
    let num = |s: &str| s.parse::<usize>().map_err(|_| usage());
    Ok(Plant {
        pattern,
        period: num(period)?,
        start: num(start)?,
        reps: num(reps)?,
        noise_rate: noise.parse::<f64>().map_err(|_| usage())?,
    })
}

fn run_gen(args: GenArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    if args.alphabet_size == 0 {
        return Err(Failure::Usage("alphabet_size must be >= 1".into()));
    }
    let alphabet = Alphabet::letters(args.alphabet_size);
    let plants = args
        .plant
        .iter()
        .map(|p| parse_plant(p, &alphabet))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = GeneratorSpec {
        alphabet_size: args.alphabet_size,
        length: args.length,
        seed: args.seed,
        plants,
    };
    let seq = generate_synthetic(&spec).map_err(|e| match e {
        Error::PlantOverlap { .. } | Error::PlantOutOfRange { .. } => Failure::Usage(e.to_string()),
        other => Failure::from(other),
    })?;
    let mut text = seq.render(&alphabet);
    text.push('\n');
    write_output(text.as_bytes(), args.output.as_deref(), stdout)
}

#[cfg(feature = "oracle")]
fn run_oracle(cmd: OracleCommand, stdout: &mut dyn Write) -> Result<(), Failure> {
    use crate::oracle::{oracle_match_all, oracle_periodic};
    match cmd {
        OracleCommand::Periodic(args) => {
            let cfg = periodic_config(&args)?;
            let (alphabet, seq) = load_sequence(&args.input)?;
            let results = oracle_periodic(&seq, &cfg)?;
            emit(&periodic_records(&alphabet, &results), &args.out, stdout)
        }
        OracleCommand::Surprise(args) => run_surprise(args, stdout, true),
        OracleCommand::Approx(args) => run_approx(args, stdout, true),
        OracleCommand::Match(args) => {
            let matrix = CompatibilityMatrix::from_csv(&read(&args.matrix)?)
                .map_err(|e| Failure::Data(format!("{}: {e}", args.matrix.display())))?;
            let alphabet = matrix.alphabet();
            let seq = parse_sequence_with(&read(&args.input)?, alphabet)
                .map_err(|e| Failure::Data(format!("{}: {e}", args.input.display())))?;
            let pattern = Pattern::parse(&args.pattern, alphabet)
                .map_err(|e| Failure::Usage(format!("--pattern: {e}")))?;
            let rows: Vec<SubsequenceRecord> = oracle_match_all(&pattern, &seq, &matrix)?
                .into_iter()
                .map(|(positions, value)| SubsequenceRecord {
                    subsequence: positions
                        .iter()
                        .map(|&i| alphabet.name(seq[i]))
                        .collect::<Vec<_>>()
                        .join(" "),
                    positions,
                    value: fixed(value),
                })
                .collect();
            emit(&rows, &args.out, stdout)
        }
    }
}

/// Runs the command line and returns the process exit status.
pub fn run_cli<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    let result = match cli.command {
        Command::Periodic(args) => run_periodic(args, stdout),
        Command::Surprise(args) => run_surprise(args, stdout, false),
        Command::Approx(args) => run_approx(args, stdout, false),
        Command::Gen(args) => run_gen(args, stdout),
        #[cfg(feature = "oracle")]
        Command::Oracle(cmd) => run_oracle(cmd, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "seqpat: {msg}");
            1
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(stderr, "seqpat: {msg}");
            2
        }
    }
}

/// [`run_cli`] over the process arguments and standard streams.
pub fn main_with_args() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
