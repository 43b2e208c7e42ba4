//! Command-line front end for the alignment-based grammar induction
//! toolkit.
//!
//! The subcommands mirror the pipeline stages: `learn` aligns all sentence
//! pairs and writes the hypothesis store, `select` reduces a store to the
//! most probable non-crossing structure, `eval` scores spans against a gold
//! treebank, `baseline` scores fixed branching structures, and `run` chains
//! the whole pipeline over one or more seeds.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use aligram_core::{
    alignment_learning, apply_selection, evaluate, io as corpus_io, left_branching_store,
    right_branching_store, strip_structure, Corpus, CostConfig, Error as CoreError, EvalReport,
    HypothesisStore, LearnConfig, LearnMode, Scorer, ScorerKind, TreeCorpus,
};

#[derive(Parser)]
#[command(
    name = "aligram",
    version,
    about = "Learn constituent structure from raw text by aligning sentence pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align every sentence pair of a corpus and write the hypotheses.
    Learn(LearnArgs),
    /// Reduce stored hypotheses to the best non-crossing set per sentence.
    Select(SelectArgs),
    /// Score a span table against a gold treebank.
    Eval(EvalArgs),
    /// Score left- and right-branching structures against a gold treebank.
    Baseline(BaselineArgs),
    /// Learn, select and evaluate in one go, optionally over several seeds.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Discard hypotheses that would cross already-stored ones.
    Incr,
    /// Keep everything; select later by yield frequency.
    Leaf,
    /// Keep everything; select later by yield frequency within each type.
    Branch,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Incr => "incr",
            Mode::Leaf => "leaf",
            Mode::Branch => "branch",
        }
    }

    fn scorer_kind(self) -> Option<ScorerKind> {
        match self {
            Mode::Incr => None,
            Mode::Leaf => Some(ScorerKind::Leaf),
            Mode::Branch => Some(ScorerKind::Branch),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Tab-separated span table.
    Spans,
    /// One bracketed sentence per line.
    Brackets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Left,
    Right,
    Both,
}

#[derive(Args)]
struct LearnArgs {
    /// Plain corpus: one sentence per line, whitespace-separated tokens.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Seed for the sentence-pair order (used by mode incr).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Positional bias weight of the aligner.
    #[arg(long, default_value_t = 0.5)]
    bias: f64,
    /// Skip sentences shorter than this many tokens.
    #[arg(long, default_value_t = 2)]
    min_len: usize,
    #[arg(long, value_enum, default_value_t = Format::Spans)]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    /// The corpus the spans were learned from.
    #[arg(long)]
    input: PathBuf,
    /// Span table produced by `learn`.
    #[arg(long)]
    spans: PathBuf,
    /// Scoring model; `incr` needs no selection and is refused.
    #[arg(long, value_enum)]
    mode: Mode,
    /// Seed for breaking ties between equally probable structures.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    min_len: usize,
    #[arg(long, value_enum, default_value_t = Format::Spans)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Gold treebank: one bracketed tree per line.
    #[arg(long)]
    gold: PathBuf,
    /// Span table to score.
    #[arg(long)]
    spans: PathBuf,
    #[arg(long, default_value_t = 2)]
    min_len: usize,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, value_enum, default_value_t = Direction::Both)]
    direction: Direction,
    #[arg(long, default_value_t = 2)]
    min_len: usize,
}

#[derive(Args)]
struct RunArgs {
    /// Gold treebank; its sentences are stripped and re-learned, then the
    /// result is scored against the original trees.
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Repetitions; repeat k uses seed + k.
    #[arg(long, default_value_t = 1)]
    repeats: u64,
    #[arg(long, default_value_t = 0.5)]
    bias: f64,
    #[arg(long, default_value_t = 2)]
    min_len: usize,
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        // A closed reader (`aligram … | head`) is not a failure of ours.
        if is_broken_pipe(&e) {
            return;
        }
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        let io = match cause.downcast_ref::<CoreError>() {
            Some(CoreError::Io(io)) => Some(io),
            Some(_) => None,
            None => cause.downcast_ref::<std::io::Error>(),
        };
        io.is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Learn(args) => cmd_learn(args),
        Command::Select(args) => cmd_select(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Run(args) => cmd_run(args),
    }
}

fn read_corpus(path: &Path, min_len: usize) -> Result<Corpus> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let corpus = corpus_io::read_plain(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(corpus.filter_min_length(min_len))
}

fn read_gold(path: &Path, min_len: usize) -> Result<TreeCorpus> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let gold = corpus_io::read_bracketed(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(gold.filter_min_length(min_len))
}

fn read_store(path: &Path, corpus: &Corpus) -> Result<HypothesisStore> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    corpus_io::read_spans(BufReader::new(file), corpus)
        .with_context(|| format!("reading {}", path.display()))
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit(
    store: &HypothesisStore,
    corpus: &Corpus,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let mut writer = open_out(out)?;
    match format {
        Format::Spans => corpus_io::emit_spans(&mut writer, store)?,
        Format::Brackets => corpus_io::emit_bracketed(&mut writer, store, corpus)?,
    }
    writer.flush()?;
    Ok(())
}

fn learn_config(mode: Mode, seed: u64, bias: f64) -> LearnConfig {
    let cost = CostConfig { match_bias_weight: bias, ..CostConfig::default() };
    match mode {
        Mode::Incr => LearnConfig { mode: LearnMode::Incr, order_seed: Some(seed), cost },
        Mode::Leaf | Mode::Branch => {
            LearnConfig { mode: LearnMode::All, order_seed: None, cost }
        }
    }
}

fn cmd_learn(args: LearnArgs) -> Result<()> {
    let corpus = read_corpus(&args.input, args.min_len)?;
    let config = learn_config(args.mode, args.seed, args.bias);
    let (store, _registry, stats) = alignment_learning(&corpus, &config)?;
    eprintln!(
        "aligned {} pairs over {} sentences: {} hypotheses, {} type merges, {} discards",
        stats.pairs_processed,
        stats.sentences,
        stats.hypotheses_stored,
        stats.type_merges,
        stats.incr_discards
    );
    emit(&store, &corpus, args.format, args.out.as_deref())
}

fn cmd_select(args: SelectArgs) -> Result<()> {
    let Some(kind) = args.mode.scorer_kind() else {
        bail!("mode incr keeps no crossing hypotheses; selection applies to leaf or branch");
    };
    let corpus = read_corpus(&args.input, args.min_len)?;
    let store = read_store(&args.spans, &corpus)?;
    let scorer = Scorer::freeze(kind, &store, &corpus)?;
    let selected = apply_selection(&store, &scorer, &corpus, args.seed)?;
    emit(&selected, &corpus, args.format, args.out.as_deref())
}

fn report_scores(report: &EvalReport) -> String {
    format!(
        "NCBP {:.2} NCBR {:.2} ZCS {:.2}",
        report.ncbp, report.ncbr, report.zcs
    )
}

fn warn_vacuous(report: &EvalReport) {
    if report.precision_vacuous() {
        eprintln!("warning: no learned brackets were counted; NCBP is vacuously 100.00");
    }
    if report.recall_vacuous() {
        eprintln!("warning: no gold brackets were counted; NCBR is vacuously 100.00");
    }
    if report.sentences == 0 {
        eprintln!("warning: no sentences were evaluated; ZCS is vacuously 100.00");
    }
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let gold = read_gold(&args.gold, args.min_len)?;
    let corpus = strip_structure(&gold);
    let store = read_store(&args.spans, &corpus)?;
    let report = evaluate(&store, &corpus, &gold)?;
    warn_vacuous(&report);
    print!("{}", report.text_table());
    println!();
    print!("{}", report.key_values());
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> Result<()> {
    let gold = read_gold(&args.gold, args.min_len)?;
    let corpus = strip_structure(&gold);
    if matches!(args.direction, Direction::Left | Direction::Both) {
        let report = evaluate(&left_branching_store(&corpus), &corpus, &gold)?;
        warn_vacuous(&report);
        println!("left {}", report_scores(&report));
    }
    if matches!(args.direction, Direction::Right | Direction::Both) {
        let report = evaluate(&right_branching_store(&corpus), &corpus, &gold)?;
        warn_vacuous(&report);
        println!("right {}", report_scores(&report));
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let gold = read_gold(&args.gold, args.min_len)?;
    let corpus = strip_structure(&gold);
    let kind = args.mode.scorer_kind();

    // Under leaf/branch the learning pass is seed-independent; only the
    // tie-breaking draws of selection vary with the seed.
    let shared = match kind {
        Some(k) => {
            let config = learn_config(args.mode, 0, args.bias);
            let (store, _registry, _stats) = alignment_learning(&corpus, &config)?;
            let scorer = Scorer::freeze(k, &store, &corpus)?;
            Some((store, scorer))
        }
        None => None,
    };

    let mut scores: Vec<[f64; 3]> = Vec::new();
    for k in 0..args.repeats.max(1) {
        let seed = args.seed.wrapping_add(k);
        let store = match &shared {
            Some((store, scorer)) => apply_selection(store, scorer, &corpus, seed)?,
            None => {
                let config = learn_config(args.mode, seed, args.bias);
                alignment_learning(&corpus, &config)?.0
            }
        };
        let report = evaluate(&store, &corpus, &gold)?;
        warn_vacuous(&report);
        println!("run {k} {}", report_scores(&report));
        scores.push([report.ncbp, report.ncbr, report.zcs]);
    }

    let stat = |idx: usize| {
        let values: Vec<f64> = scores.iter().map(|s| s[idx]).collect();
        (mean(&values), sample_std(&values))
    };
    let ((pm, ps), (rm, rs), (zm, zs)) = (stat(0), stat(1), stat(2));
    println!(
        "{} mean NCBP {pm:.2} ({ps:.2}) NCBR {rm:.2} ({rs:.2}) ZCS {zm:.2} ({zs:.2})",
        args.mode.name()
    );
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation; zero for fewer than two observations.
fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn summary_statistics() {
        assert_eq!(mean(&[2.0, 4.0]), 3.0);
        assert_eq!(sample_std(&[5.0]), 0.0);
        // Sample (n-1) variance of {2, 4} is 2.
        assert!((sample_std(&[2.0, 4.0]) - 2.0f64.sqrt()).abs() < 1e-12);
    }
}
