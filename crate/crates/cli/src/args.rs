use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frameforge_core::classify::Task;
use frameforge_core::corpus::{Issue, LabelKind, Stance};
use frameforge_core::lexstats::FeatureKind;

fn parse<T: FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

#[derive(Parser, Debug)]
#[command(name = "frameforge", version, about = "Collective-action framing analytics")]
pub struct Cli {
    /// Directory for outputs and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Flat `key = value` file of default flag values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate and normalize a JSONL document file.
    Ingest(IngestArgs),
    /// Check documents, labels, parses and manifest against each other.
    Validate(ValidateArgs),
    /// Label prevalence and frame-count statistics.
    Stats(StatsArgs),
    /// Krippendorff's alpha for wide annotation CSVs, one per category.
    Agreement(AgreementArgs),
    /// Log-odds feature rankings for framing subsets.
    Lexstats(LexstatsArgs),
    /// Train a classifier for one task on gold labels.
    Train(TrainArgs),
    /// Apply trained models and write inferred labels.
    Predict(PredictArgs),
    /// Score predicted labels against gold labels.
    Evaluate(EvaluateArgs),
    /// Seeded split, k-fold cross-validation and a held-out test score.
    Crossval(CrossvalArgs),
    /// Logistic regressions of framing outcomes on sociocultural factors.
    Regress(RegressArgs),
    /// Bootstrapped relative entropy between message groups.
    Align(AlignArgs),
    /// Daily framing-task series.
    Temporal(TemporalArgs),
    /// Re-run a recorded command and compare its outputs.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Validate(_) => "validate",
            Command::Stats(_) => "stats",
            Command::Agreement(_) => "agreement",
            Command::Lexstats(_) => "lexstats",
            Command::Train(_) => "train",
            Command::Predict(_) => "predict",
            Command::Evaluate(_) => "evaluate",
            Command::Crossval(_) => "crossval",
            Command::Regress(_) => "regress",
            Command::Align(_) => "align",
            Command::Temporal(_) => "temporal",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindArg {
    Gold,
    Inferred,
}

impl From<KindArg> for LabelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Gold => LabelKind::Gold,
            KindArg::Inferred => LabelKind::Inferred,
        }
    }
}

#[derive(Args, Debug)]
pub struct DocsArgs {
    /// JSONL documents.
    #[arg(long)]
    pub docs: PathBuf,
    /// Skip malformed document lines instead of failing.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Args, Debug)]
pub struct LabeledArgs {
    #[command(flatten)]
    pub docs: DocsArgs,
    /// Label CSV keyed by doc_id.
    #[arg(long)]
    pub labels: PathBuf,
    /// Whether labels are human annotations or classifier output.
    #[arg(long, value_enum)]
    pub label_kind: Option<KindArg>,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[command(flatten)]
    pub docs: DocsArgs,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub docs: DocsArgs,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub label_kind: Option<KindArg>,
    /// CoNLL-U parses.
    #[arg(long)]
    pub tokens: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long, requires = "labels")]
    pub docs: Option<PathBuf>,
    #[arg(long, requires = "docs")]
    pub labels: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub label_kind: Option<KindArg>,
    #[arg(long)]
    pub lenient: bool,
    /// Collection manifest to summarize.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AgreementArgs {
    /// Wide CSVs (`doc_id,<annotator>...`); the file stem names the category.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LexstatsArgs {
    #[command(flatten)]
    pub data: LabeledArgs,
    #[arg(long)]
    pub tokens: Option<PathBuf>,
    /// Feature kinds, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse::<FeatureKind>, default_value = "word")]
    pub kind: Vec<FeatureKind>,
    /// Framing fields defining the subset, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "diagnostic,prognostic,motivational")]
    pub task: Vec<String>,
    /// Issues to analyse (default: all present).
    #[arg(long, value_delimiter = ',', value_parser = parse::<Issue>)]
    pub issue: Vec<Issue>,
    /// Restrict subset and background to one stance.
    #[arg(long, value_parser = parse::<Stance>)]
    pub stance: Option<Stance>,
    #[arg(long, default_value_t = 15)]
    pub k: usize,
    #[arg(long, default_value_t = 500.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 5)]
    pub min_count: u64,
    /// Compare against messages outside the subset rather than all messages.
    #[arg(long)]
    pub complement: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 2)]
    pub max_ngram: usize,
    #[arg(long, default_value_t = 2)]
    pub min_df: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub l2: f64,
    #[arg(long, default_value_t = 300)]
    pub epochs: usize,
    #[arg(long, default_value_t = 4.0)]
    pub step: f64,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: LabeledArgs,
    #[arg(long, value_parser = parse::<Task>)]
    pub task: Task,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[command(flatten)]
    pub docs: DocsArgs,
    /// Model files, one per task.
    #[arg(long = "model", required = true)]
    pub models: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub docs: DocsArgs,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    /// Tasks to score (default: all four).
    #[arg(long, value_delimiter = ',', value_parser = parse::<Task>)]
    pub task: Vec<Task>,
    /// Value of the `split` column.
    #[arg(long, default_value = "test")]
    pub split: String,
    /// Labels with F1 below this are listed as excluded.
    #[arg(long, default_value_t = 0.5)]
    pub exclude_below: f64,
}

#[derive(Args, Debug)]
pub struct CrossvalArgs {
    #[command(flatten)]
    pub data: LabeledArgs,
    #[arg(long, value_parser = parse::<Task>)]
    pub task: Task,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Args, Debug)]
pub struct RegressArgs {
    #[command(flatten)]
    pub data: LabeledArgs,
    /// Outcomes to model (default: all eight).
    #[arg(long, value_delimiter = ',')]
    pub outcome: Vec<String>,
    /// Drop stance from the predictors.
    #[arg(long)]
    pub no_stance: bool,
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Holm-adjust across all fitted models instead of within each.
    #[arg(long)]
    pub joint_holm: bool,
    /// Fit the pronoun-person models instead.
    #[arg(long)]
    pub pronouns: bool,
    /// Parses supplying pronoun tokens (the tokenizer is used otherwise).
    #[arg(long)]
    pub tokens: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct AlignArgs {
    #[command(flatten)]
    pub data: LabeledArgs,
    /// Group pairs as `a:b`, where a group is `stance`, `issue` or
    /// `stance-issue` (default: the four stance/issue comparisons).
    #[arg(long = "pair")]
    pub pairs: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 10_000)]
    pub sample_size: usize,
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TemporalArgs {
    #[command(flatten)]
    pub data: LabeledArgs,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// One series per author role.
    #[arg(long)]
    pub by_role: bool,
    /// `date,label` CSV of events (default: the built-in event dates that
    /// fall inside the series).
    #[arg(long, conflicts_with = "no_events")]
    pub events: Option<PathBuf>,
    #[arg(long)]
    pub no_events: bool,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    /// A `.run.json` manifest written by an earlier run.
    pub manifest: PathBuf,
}
