//! geez-forge: corpus engineering and MT evaluation for Ge'ez-script
//! languages, as a composable command-line tool.
//!
//! Every command is a thin adapter over the library: identical inputs through
//! the CLI and the API produce identical artifacts. Exit codes are fixed so
//! pipelines can branch on failure class: 0 success, 1 usage or configuration
//! error, 2 data or validation error, 3 I/O error.

mod errors;

use clap::{Args, Parser, Subcommand, ValueEnum};
use errors::AppError;
use geez_forge::corpus::{self, FilterConfig, ManifestFormat};
use geez_forge::metrics::{self, MetricKind};
use geez_forge::report::{self, ReportFormat};
use geez_forge::script_norm::NormalizationConfig;
use geez_forge::stats_sig;
use geez_forge::subword::{train_bpe, Affix, BpeTrainConfig, TokenizerModel};
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

/// Environment variable holding a default normalization config path.
const CONFIG_ENV: &str = "GEEZ_FORGE_CONFIG";

fn version_string() -> String {
    format!(
        "{} (model format {})",
        env!("CARGO_PKG_VERSION"),
        geez_forge::MODEL_FORMAT_VERSION
    )
}

#[derive(Parser)]
#[command(name = "geez-forge", version = version_string(), about = "Corpus engineering and MT evaluation toolkit for Ge'ez-script languages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize text files (or stdin) line by line
    Normalize(NormalizeArgs),
    /// Train and apply the BPE subword tokenizer
    Tokenizer {
        #[command(subcommand)]
        command: TokenizerCommand,
    },
    /// Ingest, clean, split, and profile parallel corpora
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// Score hypotheses against references
    Score(ScoreArgs),
    /// Paired-bootstrap significance with Bonferroni correction
    Significance(SignificanceArgs),
    /// Build score tables and comparison reports
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

#[derive(Args)]
struct NormalizeArgs {
    /// Normalization config JSON (default: $GEEZ_FORGE_CONFIG, then the
    /// built-in Ge'ez table)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rewrite the input files instead of printing to stdout
    #[arg(long)]
    in_place: bool,
    /// Input files; stdin when omitted
    files: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum TokenizerCommand {
    /// Train a BPE model on a text corpus (one segment per line)
    Train(TrainArgs),
    /// Encode stdin to token ids (or pieces), one segment per line
    Encode(CodecArgs),
    /// Decode token ids (or pieces) from stdin, one segment per line
    Decode(CodecArgs),
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 8000)]
    vocab_size: usize,
    #[arg(long, default_value_t = 2)]
    min_pair_frequency: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Protected affix lexicon: JSON array of {"form", "side"}
    #[arg(long)]
    affixes: Option<PathBuf>,
    /// Normalization config JSON (default: $GEEZ_FORGE_CONFIG, then built-in)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CodecArgs {
    #[arg(long)]
    model: PathBuf,
    /// Read/write integer token ids (the default)
    #[arg(long, conflicts_with = "pieces")]
    ids: bool,
    /// Read/write surface pieces instead of ids
    #[arg(long)]
    pieces: bool,
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Normalize and filter a TSV corpus, writing kept pairs and a report
    Clean(CleanArgs),
    /// Deterministically shuffle and partition a TSV corpus
    Split(SplitArgs),
    /// Per-domain statistics of a TSV corpus
    Stats(StatsArgs),
}

#[derive(Args)]
struct CleanArgs {
    /// Filter config JSON (defaults built in)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Normalization config JSON (default: $GEEZ_FORGE_CONFIG, then built-in)
    #[arg(long)]
    norm: Option<PathBuf>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    /// Comma-separated train,valid,test ratios, e.g. 0.8,0.1,0.1
    #[arg(long)]
    ratios: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long = "in")]
    input: PathBuf,
    /// Writes <prefix>.train.tsv, <prefix>.valid.tsv, <prefix>.test.tsv
    #[arg(long)]
    out_prefix: String,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(value_enum)]
    metric: MetricArg,
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Emit full component JSON instead of the one-line text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SignificanceArgs {
    #[arg(long)]
    hyp_a: PathBuf,
    #[arg(long)]
    hyp_b: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long, value_enum)]
    metric: MetricArg,
    #[arg(long, default_value_t = stats_sig::DEFAULT_RESAMPLES)]
    resamples: usize,
    #[arg(long, default_value_t = stats_sig::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = stats_sig::DEFAULT_ALPHA)]
    alpha: f64,
    /// Bonferroni correction family size m (threshold alpha/m)
    #[arg(long, default_value_t = 1)]
    family_size: usize,
    /// Print the one-line text rendering instead of JSON
    #[arg(long)]
    text: bool,
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Render a score table grouped by system and direction
    Table(TableArgs),
    /// Compare a baseline system against a candidate
    Compare(CompareArgs),
}

#[derive(Args)]
struct TableArgs {
    /// Entries file: JSON array, or 5-column TSV by extension
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// System label of the baseline rows
    #[arg(long)]
    baseline: String,
    /// System label of the candidate rows
    #[arg(long)]
    candidate: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Bleu,
    Chrf,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Bleu => MetricKind::Bleu,
            MetricArg::Chrf => MetricKind::Chrf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Tsv,
    Json,
}

impl From<OutputFormat> for ReportFormat {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Text => ReportFormat::Text,
            OutputFormat::Tsv => ReportFormat::Tsv,
            OutputFormat::Json => ReportFormat::Json,
        }
    }
}

impl From<OutputFormat> for ManifestFormat {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Text => ManifestFormat::Text,
            OutputFormat::Tsv => ManifestFormat::Tsv,
            OutputFormat::Json => ManifestFormat::Json,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Normalize(args) => cmd_normalize(args),
        Command::Tokenizer { command } => match command {
            TokenizerCommand::Train(args) => cmd_train(args),
            TokenizerCommand::Encode(args) => cmd_encode(args),
            TokenizerCommand::Decode(args) => cmd_decode(args),
        },
        Command::Corpus { command } => match command {
            CorpusCommand::Clean(args) => cmd_clean(args),
            CorpusCommand::Split(args) => cmd_split(args),
            CorpusCommand::Stats(args) => cmd_stats(args),
        },
        Command::Score(args) => cmd_score(args),
        Command::Significance(args) => cmd_significance(args),
        Command::Report { command } => match command {
            ReportCommand::Table(args) => cmd_report_table(args),
            ReportCommand::Compare(args) => cmd_report_compare(args),
        },
    }
}

/// Resolve the normalization config: explicit flag, then $GEEZ_FORGE_CONFIG,
/// then the built-in Ge'ez table.
fn load_norm_config(flag: &Option<PathBuf>) -> Result<NormalizationConfig, AppError> {
    let path = flag
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    match path {
        Some(path) => Ok(NormalizationConfig::from_file(path)?),
        None => Ok(NormalizationConfig::default_geez()),
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>, AppError> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| AppError::io(format!("{}: {e}", path.display())))?;
    Ok(content.lines().map(str::to_string).collect())
}

fn cmd_normalize(args: NormalizeArgs) -> Result<(), AppError> {
    let cfg = load_norm_config(&args.config)?;
    let normalizer = geez_forge::script_norm::Normalizer::new(&cfg)?;
    if args.in_place {
        if args.files.is_empty() {
            return Err(AppError::usage("--in-place requires at least one file"));
        }
        for path in &args.files {
            let lines = read_lines(path)?;
            let mut out = String::new();
            for line in &lines {
                out.push_str(&normalizer.apply(line));
                out.push('\n');
            }
            std::fs::write(path, out)
                .map_err(|e| AppError::io(format!("{}: {e}", path.display())))?;
        }
        return Ok(());
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut emit = |line: &str| -> Result<(), AppError> {
        writeln!(out, "{}", normalizer.apply(line)).map_err(|e| AppError::io(e.to_string()))
    };
    if args.files.is_empty() {
        for line in std::io::stdin().lock().lines() {
            emit(&line.map_err(|e| AppError::io(e.to_string()))?)?;
        }
    } else {
        for path in &args.files {
            for line in read_lines(path)? {
                emit(&line)?;
            }
        }
    }
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<(), AppError> {
    let norm = load_norm_config(&args.config)?;
    let corpus = read_lines(&args.corpus)?;
    let affixes: Vec<Affix> = match &args.affixes {
        Some(path) => {
            let content = std::fs::read_to_string(path)
                .map_err(|e| AppError::io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&content)
                .map_err(|e| AppError::usage(format!("bad affix file {}: {e}", path.display())))?
        }
        None => Vec::new(),
    };
    let cfg = BpeTrainConfig {
        vocab_size: args.vocab_size,
        min_pair_frequency: args.min_pair_frequency,
        seed: args.seed,
    };
    let model = train_bpe(&corpus, &cfg, &norm, &affixes)?;
    model.save(&args.out)?;
    println!(
        "trained model: {} tokens, {} merges, seed {} -> {}",
        model.vocab_size(),
        model.merges().len(),
        args.seed,
        args.out.display()
    );
    Ok(())
}

fn cmd_encode(args: CodecArgs) -> Result<(), AppError> {
    let model = TokenizerModel::load(&args.model)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in std::io::stdin().lock().lines() {
        let line = line.map_err(|e| AppError::io(e.to_string()))?;
        let seq = model.encode(&line);
        let rendered = if args.pieces {
            seq.pieces.join(" ")
        } else {
            seq.ids
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "{rendered}").map_err(|e| AppError::io(e.to_string()))?;
    }
    Ok(())
}

fn cmd_decode(args: CodecArgs) -> Result<(), AppError> {
    let model = TokenizerModel::load(&args.model)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in std::io::stdin().lock().lines() {
        let line = line.map_err(|e| AppError::io(e.to_string()))?;
        let ids: Vec<u32> = if args.pieces {
            line.split_whitespace()
                .map(|piece| {
                    model.token_to_id(piece).ok_or_else(|| {
                        AppError::data(format!("piece {piece:?} is not in the vocabulary"))
                    })
                })
                .collect::<Result<_, _>>()?
        } else {
            line.split_whitespace()
                .map(|token| {
                    token
                        .parse::<u32>()
                        .map_err(|e| AppError::data(format!("bad token id {token:?}: {e}")))
                })
                .collect::<Result<_, _>>()?
        };
        let text = model.decode(&ids)?;
        writeln!(out, "{text}").map_err(|e| AppError::io(e.to_string()))?;
    }
    Ok(())
}

fn cmd_clean(args: CleanArgs) -> Result<(), AppError> {
    let filters = match &args.config {
        Some(path) => FilterConfig::from_file(path)?,
        None => FilterConfig::default(),
    };
    let norm = load_norm_config(&args.norm)?;
    let pairs = corpus::read_tsv(&args.input)?;
    let (kept, report) = corpus::clean(&pairs, &filters, &norm)?;
    corpus::write_tsv(&kept, &args.out)?;
    let mut report_json = serde_json::to_string_pretty(&report).expect("report serializes");
    report_json.push('\n');
    std::fs::write(&args.report, report_json)
        .map_err(|e| AppError::io(format!("{}: {e}", args.report.display())))?;
    println!(
        "kept {} of {} pairs (removed {}) -> {}",
        report.kept_count,
        report.input_count,
        report.removed_count,
        args.out.display()
    );
    Ok(())
}

fn cmd_split(args: SplitArgs) -> Result<(), AppError> {
    let parts: Vec<f64> = args
        .ratios
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| AppError::usage(format!("bad --ratios {:?}: {e}", args.ratios)))?;
    let [train_ratio, valid_ratio, test_ratio] = parts.as_slice() else {
        return Err(AppError::usage(format!(
            "--ratios needs exactly three comma-separated values, got {}",
            parts.len()
        )));
    };
    let pairs = corpus::read_tsv(&args.input)?;
    let (train, valid, test) =
        corpus::split(pairs, (*train_ratio, *valid_ratio, *test_ratio), args.seed)?;
    for (name, subset) in [("train", &train), ("valid", &valid), ("test", &test)] {
        let path = format!("{}.{name}.tsv", args.out_prefix);
        corpus::write_tsv(subset, &path)?;
    }
    println!(
        "split {} pairs (seed {}): train {}, valid {}, test {}",
        train.len() + valid.len() + test.len(),
        args.seed,
        train.len(),
        valid.len(),
        test.len()
    );
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<(), AppError> {
    let pairs = corpus::read_tsv(&args.input)?;
    let manifests = corpus::compute_stats(&pairs);
    print!("{}", corpus::render_manifests(&manifests, args.format.into()));
    Ok(())
}

fn cmd_score(args: ScoreArgs) -> Result<(), AppError> {
    let hyps = read_lines(&args.hyp)?;
    let refs = read_lines(&args.reference)?;
    let rendered = match MetricKind::from(args.metric) {
        MetricKind::Bleu => {
            let score = metrics::corpus_bleu(&hyps, &refs)?;
            if args.json {
                score.to_json()
            } else {
                score.render_text()
            }
        }
        MetricKind::Chrf => {
            let score = metrics::corpus_chrf(&hyps, &refs)?;
            if args.json {
                score.to_json()
            } else {
                score.render_text()
            }
        }
    };
    println!("{rendered}");
    Ok(())
}

fn cmd_significance(args: SignificanceArgs) -> Result<(), AppError> {
    let hyp_a = read_lines(&args.hyp_a)?;
    let hyp_b = read_lines(&args.hyp_b)?;
    let refs = read_lines(&args.reference)?;
    let result = stats_sig::paired_bootstrap(
        &hyp_a,
        &hyp_b,
        &refs,
        args.metric.into(),
        args.resamples,
        args.seed,
    )?
    .corrected(args.alpha, args.family_size)?;
    if args.text {
        println!("{}", result.render_text());
    } else {
        println!(
            "{}",
            serde_json::to_string_pretty(&result).expect("result serializes")
        );
    }
    Ok(())
}

fn cmd_report_table(args: TableArgs) -> Result<(), AppError> {
    let entries = report::read_entries(&args.input)?;
    print!("{}", report::build_table(&entries, args.format.into())?);
    Ok(())
}

fn cmd_report_compare(args: CompareArgs) -> Result<(), AppError> {
    let entries = report::read_entries(&args.input)?;
    let side = |label: &str| -> Vec<report::ScoreEntry> {
        entries
            .iter()
            .filter(|e| e.system == label)
            .cloned()
            .collect()
    };
    let baseline = side(&args.baseline);
    let candidate = side(&args.candidate);
    if baseline.is_empty() {
        return Err(AppError::data(format!(
            "no entries with system label {:?}",
            args.baseline
        )));
    }
    if candidate.is_empty() {
        return Err(AppError::data(format!(
            "no entries with system label {:?}",
            args.candidate
        )));
    }
    let comparison = report::compare(&baseline, &candidate)?;
    print!("{}", comparison.render(args.format.into()));
    Ok(())
}
