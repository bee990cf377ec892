//! `episodeseq`: mine episode summaries, simulate the episode-pair HMM and
//! build episode dictionaries for text classification.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use episodeseq::textpipe::{Weighting, DEFAULT_TEXT_MAX_GAP};
use episodeseq::{Error, FrequencyMode};

#[derive(Debug, Parser)]
#[command(
    name = "episodeseq",
    version,
    about = "Summarize event sequences with fixed-interval serial episodes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select episodes for an event data file and print the encoding table (CSV).
    Mine(MineArgs),
    /// Rebuild the event data file from an encoding table.
    Decode(DecodeArgs),
    /// Sample a trajectory of the episode-pair HMM.
    HmmSim(HmmSimArgs),
    /// Viterbi-decode an observation sequence and report likelihoods and counts.
    HmmScore(HmmScoreArgs),
    /// Compare the pair models (alpha, beta) and (alpha, gamma) on one observation sequence.
    HmmCompare(HmmCompareArgs),
    /// Mine the episode dictionary of a training corpus.
    Dict(DictArgs),
    /// Train Naive Bayes with both dictionaries and print a metrics CSV.
    Classify(ClassifyArgs),
    /// Write one of the bundled synthetic corpora.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct MineArgs {
    /// Event data file (`<time>\t<type>` lines, blank line between sequences).
    #[arg(long, short)]
    input: PathBuf,
    /// Largest gap between consecutive episode events.
    #[arg(long = "max-gap", short = 'g', default_value_t = 5)]
    max_gap: u32,
    /// Stop after this many episodes (default: no limit).
    #[arg(long = "top-k", short = 'k')]
    top_k: Option<usize>,
    #[arg(long = "freq-mode", default_value = "non-overlapped", value_parser = parse_mode)]
    freq_mode: FrequencyMode,
    /// Use the episodes listed in this file (one per line) instead of selecting.
    #[arg(long = "force-episodes")]
    force_episodes: Option<PathBuf>,
    /// Write the table here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Write the first-round candidates as `<episode>\t<f>\t<score>` lines.
    #[arg(long = "dump-candidates")]
    dump_candidates: Option<PathBuf>,
    /// Write the occurrences of every selected episode as `<episode>\t<seq>\t<start>` lines.
    #[arg(long = "dump-occurrences")]
    dump_occurrences: Option<PathBuf>,
    /// Write a summary (selected episodes, scores, total length) here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Do not print the summary on standard error.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    /// Encoding table CSV.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// First episode, e.g. `A B C` or `A -> B -> C`.
    #[arg(long)]
    alpha: String,
    /// Second episode, same length as alpha.
    #[arg(long)]
    beta: String,
    /// Alphabet size M; symbols are A, B, ... in order.
    #[arg(long = "alphabet-size", short = 'm')]
    alphabet_size: usize,
    /// Noise parameter, 0 < eta < M/(M+8).
    #[arg(long)]
    eta: f64,
}

#[derive(Debug, Args)]
struct HmmSimArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, short = 't')]
    length: usize,
    #[arg(long)]
    seed: u64,
    /// Write the emitted symbols (one line, space separated) here.
    #[arg(long)]
    observations: Option<PathBuf>,
    /// Write the model as JSON here.
    #[arg(long = "dump-model")]
    dump_model: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HmmScoreArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Observation file: whitespace-separated symbol names.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HmmCompareArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Competing second episode.
    #[arg(long)]
    gamma: String,
    /// Observation file: whitespace-separated symbol names.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Minimum token length for raw-text input.
    #[arg(long = "min-len", default_value_t = 3)]
    min_len: usize,
    /// Keep letter case in raw-text input.
    #[arg(long = "keep-case")]
    keep_case: bool,
    /// Stopword file (one word per line) for raw-text input.
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DictArgs {
    /// Training corpus: `<label>\t<tokens>` per line, or a directory
    /// `<root>/<split>/<class>/<doc>.txt` with `--split`.
    #[arg(long, short)]
    input: PathBuf,
    /// Split subdirectory when `--input` is a directory.
    #[arg(long, default_value = "train")]
    split: String,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long = "max-gap", short = 'g', default_value_t = DEFAULT_TEXT_MAX_GAP)]
    max_gap: u32,
    #[arg(long = "top-k", short = 'k')]
    top_k: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Training corpus file, or the root of a `<split>/<class>/<doc>.txt` tree.
    #[arg(long)]
    train: PathBuf,
    /// Test corpus file; omit when `--train` is a directory with a `test` split.
    #[arg(long)]
    test: Option<PathBuf>,
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Episode dictionary (one word per line); mined from the training corpus when omitted.
    #[arg(long)]
    dictionary: Option<PathBuf>,
    #[arg(long, default_value = "tfidf", value_parser = parse_weighting)]
    weighting: Weighting,
    #[arg(long = "max-gap", short = 'g', default_value_t = DEFAULT_TEXT_MAX_GAP)]
    max_gap: u32,
    #[arg(long = "top-k", short = 'k')]
    top_k: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SynthKind {
    /// Corpus with five planted episodes.
    Planted,
    /// Two-class review-style corpus (train and test files).
    Review,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    /// Defaults to the seed of the bundled corpus.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

fn parse_mode(s: &str) -> Result<FrequencyMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_weighting(s: &str) -> Result<Weighting, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit status for each error class.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) => 3,
        Error::Invalid(_) => 4,
        Error::Integrity(_) => 5,
        Error::Io(_) => 6,
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("EPISODESEQ_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| {
        Error::Invalid(format!(
            "EPISODESEQ_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    if threads == 0 {
        return Err(Error::Invalid(
            "EPISODESEQ_THREADS must be at least 1".into(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Invalid(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Mine(args) => commands::mine(args),
        Command::Decode(args) => commands::decode(args),
        Command::HmmSim(args) => commands::hmm_sim(args),
        Command::HmmScore(args) => commands::hmm_score(args),
        Command::HmmCompare(args) => commands::hmm_compare(args),
        Command::Dict(args) => commands::dict(args),
        Command::Classify(args) => commands::classify(args),
        Command::Synth(args) => commands::synth(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("episodeseq: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
