//! The `medtweet` command-line tool.
//!
//! Every subcommand is a `cmd_*` function taking its parsed arguments, so the
//! commands can also be driven from code. Outputs contain no timestamps;
//! identical inputs and seed give byte-identical files.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{self, ClassId, Dataset};
use crate::error::{Error, Result};
use crate::eval::{self, MetricReport, Protocol, ADR_ABLATION, INTAKE_ABLATION};
use crate::features::FeatureConfig;
use crate::pipeline::{PipelineConfig, Task, TrainedPipeline};
use crate::resources::{layout, Resources};

pub const RESOURCES_ENV: &str = "MEDTWEET_RESOURCES";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "medtweet", version, about = "Tweet classification for ADR detection and medication intake")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write it with a training log and the effective config.
    Train(TrainArgs),
    /// Predict a class for every tweet of a TSV file.
    Predict(PredictArgs),
    /// Score predictions against gold labels.
    Eval(EvalArgs),
    /// Cross-validate (k-fold, or dev-fold augmented when --dev is given).
    Cv(CvArgs),
    /// Remove one feature group at a time and report each result.
    Ablate(AblateArgs),
    /// Rank n-gram features by mutual information with the class.
    RankFeatures(RankArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Pipeline config file (key = value).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Shipped preset: task1-sub1..3 or task2-sub1..3.
    #[arg(long)]
    pub preset: Option<String>,
    /// Random seed for sampling, folds and coordinate order; overrides the config seed (default 42).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory with lexicons, embeddings, clusters and sentiment lexicons.
    #[arg(long, env = RESOURCES_ENV)]
    pub resources_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Labeled training TSV.
    #[arg(long)]
    pub train: PathBuf,
    /// Labeled development TSV, appended to the training data.
    #[arg(long)]
    pub dev: Option<PathBuf>,
    /// Drop near-duplicate training tweets first.
    #[arg(long)]
    pub dedup: bool,
    /// Model output path; `<out>.log` and `<out>.config` are written beside it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Input TSV (`id<TAB>text`, or `id<TAB>label<TAB>text` with --labeled).
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub labeled: bool,
    #[arg(long, env = RESOURCES_ENV)]
    pub resources_dir: Option<PathBuf>,
    /// Output TSV of `id<TAB>class` lines.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Labeled gold TSV.
    #[arg(long)]
    pub test: PathBuf,
    /// Predictions TSV (`id<TAB>class`).
    #[arg(long)]
    pub pred: PathBuf,
    /// adr or intake; inferred from the gold labels when omitted.
    #[arg(long)]
    pub task: Option<Task>,
    /// Report path; the TSV form goes to `<out>.tsv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub train: PathBuf,
    /// Development TSV; switches to dev-fold augmented cross-validation.
    #[arg(long)]
    pub dev: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub train: PathBuf,
    /// Held-out test TSV (train/test protocol).
    #[arg(long, conflicts_with = "dev")]
    pub test: Option<PathBuf>,
    /// Development TSV (dev-fold augmented protocol).
    #[arg(long)]
    pub dev: Option<PathBuf>,
    /// Folds for the cross-validation protocols.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Comma-separated group ids; defaults to the task's standard table.
    #[arg(long, value_delimiter = ',')]
    pub groups: Option<Vec<String>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, default_value_t = 25)]
    pub top_k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Preset name or config path the pipeline came from.
    pub source: String,
    pub pipeline: PipelineConfig,
    pub resources_dir: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub fn resolve(args: &ConfigArgs) -> Result<Self> {
        let (source, pipeline) = match (&args.preset, &args.config) {
            (Some(name), None) => (format!("preset {name}"), PipelineConfig::preset(name)?),
            (None, Some(path)) => (format!("config {}", path.display()), PipelineConfig::load(path)?),
            (None, None) => return Err(Error::Config("one of --preset or --config is required".into())),
            (Some(_), Some(_)) => return Err(Error::Config("--preset and --config are exclusive".into())),
        };
        let seed = args.seed.unwrap_or(pipeline.params.seed);
        Ok(RunConfig {
            source,
            pipeline: pipeline.with_seed(seed),
            resources_dir: args.resources_dir.clone(),
            seed,
        })
    }

    pub fn task(&self) -> Task {
        self.pipeline.task
    }

    pub fn resources(&self) -> Result<Resources> {
        load_resources(self.resources_dir.as_deref(), &self.pipeline.features)
    }
}

/// Loads the resource directory after checking that every file `features`
/// needs is there, so a missing one is reported by path.
pub fn load_resources(dir: Option<&Path>, features: &FeatureConfig) -> Result<Resources> {
    let Some(dir) = dir else {
        let res = Resources::new();
        features.validate(&res).map_err(|e| match e {
            Error::MissingResource(what) => {
                Error::MissingResource(format!("{what} (no resources directory given; use --resources-dir or {RESOURCES_ENV})"))
            }
            other => other,
        })?;
        return Ok(res);
    };
    let mut needed: Vec<PathBuf> = Vec::new();
    if features.uses_domain_ngrams() {
        needed.push(dir.join(layout::MEDICATIONS));
        needed.push(dir.join(layout::ADR));
    }
    if features.use_adr_lexicon_feature {
        needed.push(dir.join(layout::ADR));
    }
    if features.use_pronoun_lexicon {
        needed.push(dir.join(layout::PRONOUNS));
    }
    for t in features.embedding_tables.iter().chain(&features.domain_embedding_tables) {
        needed.push(dir.join(layout::EMBEDDINGS_DIR).join(format!("{t}.txt")));
    }
    for c in features.cluster_maps.iter().chain(&features.domain_cluster_maps) {
        needed.push(dir.join(layout::CLUSTERS_DIR).join(format!("{c}.txt")));
    }
    for s in &features.sentiment_lexicons {
        needed.push(dir.join(layout::SENTIMENT_DIR).join(format!("{s}.tsv")));
    }
    if let Some(missing) = needed.iter().find(|p| !p.is_file()) {
        return Err(Error::MissingResource(missing.display().to_string()));
    }
    let res = Resources::load_dir(dir)?;
    features.validate(&res)?;
    Ok(res)
}

fn load_labeled(path: &Path, task: Task) -> Result<Dataset> {
    corpus::load_tsv(path, &task.label_domain(), true)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<out>` (human form) and `<out>.tsv` when an output path is given.
fn write_report(out: Option<&Path>, human: &str, tsv: &str) -> Result<()> {
    if let Some(out) = out {
        write_file(out, human)?;
        write_file(&with_suffix(out, ".tsv"), tsv)?;
    }
    Ok(())
}

/// Result of [`cmd_train`].
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model_path: PathBuf,
    pub log_path: PathBuf,
    pub config_path: PathBuf,
    pub log: String,
}

pub fn cmd_train(args: &TrainArgs) -> Result<TrainOutcome> {
    let run = RunConfig::resolve(&args.config)?;
    let res = run.resources()?;
    let task = run.task();
    let mut data = load_labeled(&args.train, task)?;
    let mut log = String::new();
    let _ = writeln!(log, "medtweet train");
    let _ = writeln!(log, "source: {}", run.source);
    let _ = writeln!(log, "task: {task}");
    let _ = writeln!(log, "seed: {}", run.seed);
    let _ = writeln!(log, "training data: {} ({} tweets)", args.train.display(), data.len());
    if let Some(dev) = &args.dev {
        let dev_data = load_labeled(dev, task)?;
        let _ = writeln!(log, "development data: {} ({} tweets)", dev.display(), dev_data.len());
        data = data.concat(&dev_data)?;
    }
    if args.dedup {
        let before = data.len();
        data = corpus::near_duplicate_filter(&data);
        let _ = writeln!(log, "near-duplicates removed: {}", before - data.len());
    }
    let (model, report) = TrainedPipeline::fit(&run.pipeline, &data, &res)?;
    for line in report.lines() {
        let _ = writeln!(log, "{line}");
    }
    let model_path = args.out.clone();
    let log_path = with_suffix(&model_path, ".log");
    let config_path = with_suffix(&model_path, ".config");
    write_file(&model_path, &model.to_json()?)?;
    write_file(&log_path, &log)?;
    write_file(&config_path, &run.pipeline.render())?;
    Ok(TrainOutcome {
        model_path,
        log_path,
        config_path,
        log,
    })
}

pub fn cmd_predict(args: &PredictArgs) -> Result<Vec<(String, ClassId)>> {
    let model = TrainedPipeline::load(&args.model)?;
    let res = load_resources(args.resources_dir.as_deref(), &model.config().features)?;
    let data = corpus::load_tsv(&args.test, &model.config().task.label_domain(), args.labeled)?;
    let pred = model.predict(&data, &res)?;
    let rows: Vec<(String, ClassId)> = data.iter().map(|t| t.id.clone()).zip(pred).collect();
    let out: String = rows.iter().map(|(id, c)| format!("{id}\t{c}\n")).collect();
    write_file(&args.out, &out)?;
    Ok(rows)
}

/// Reads `id<TAB>class` lines.
pub fn parse_predictions(content: &str, context: &str) -> Result<Vec<(String, ClassId)>> {
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (id, class) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(context, i + 1, "expected id<TAB>class"))?;
        let class = class
            .trim()
            .parse()
            .map_err(|_| Error::parse(context, i + 1, format!("invalid class {class:?}")))?;
        out.push((id.to_owned(), class));
    }
    Ok(out)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<MetricReport> {
    let task = match args.task {
        Some(t) => t,
        None => {
            let probe = corpus::load_tsv(&args.test, &[0, 1, 2, 3], true)?;
            if probe.labels()?.contains(&0) {
                Task::Adr
            } else {
                Task::Intake
            }
        }
    };
    let gold = load_labeled(&args.test, task)?;
    let content = fs::read_to_string(&args.pred).map_err(|e| Error::io(&args.pred, e))?;
    let pred: HashMap<String, ClassId> = parse_predictions(&content, &args.pred.display().to_string())?
        .into_iter()
        .collect();
    let mut p = Vec::with_capacity(gold.len());
    for t in &gold {
        p.push(
            *pred
                .get(&t.id)
                .ok_or_else(|| Error::Invalid(format!("no prediction for tweet {}", t.id)))?,
        );
    }
    let report = MetricReport::from_labels(&gold.labels()?, &p, &task.label_domain(), &task.eval_classes())?;
    let human = format!("task: {task}\ninstances: {}\n{}", gold.len(), report.render());
    print!("{human}");
    write_report(args.out.as_deref(), &human, &report.to_tsv())?;
    Ok(report)
}

pub fn cmd_cv(args: &CvArgs) -> Result<eval::CvReport> {
    let run = RunConfig::resolve(&args.config)?;
    let res = run.resources()?;
    let train = load_labeled(&args.train, run.task())?;
    let (report, protocol) = match &args.dev {
        Some(dev) => {
            let dev = load_labeled(dev, run.task())?;
            (
                eval::augmented_fold_cv(&train, &dev, args.folds, &run.pipeline, &res, run.seed)?,
                "dev-fold augmented cross-validation",
            )
        }
        None => (
            eval::kfold_cv(&train, args.folds, &run.pipeline, &res, run.seed)?,
            "k-fold cross-validation",
        ),
    };
    let human = format!(
        "{protocol}, {} folds\nsource: {}\nseed: {}\n{}",
        args.folds,
        run.source,
        run.seed,
        report.render()
    );
    print!("{human}");
    write_report(args.out.as_deref(), &human, &report.to_tsv())?;
    Ok(report)
}

pub fn cmd_ablate(args: &AblateArgs) -> Result<eval::AblationTable> {
    let run = RunConfig::resolve(&args.config)?;
    let res = run.resources()?;
    let task = run.task();
    let train = load_labeled(&args.train, task)?;
    let test = args.test.as_ref().map(|p| load_labeled(p, task)).transpose()?;
    let dev = args.dev.as_ref().map(|p| load_labeled(p, task)).transpose()?;
    let protocol = match (&test, &dev) {
        (Some(test), _) => Protocol::Holdout { train: &train, test },
        (None, Some(dev)) => Protocol::Augmented {
            train: &train,
            dev,
            k: args.folds,
            seed: run.seed,
        },
        (None, None) => Protocol::KFold {
            data: &train,
            k: args.folds,
            seed: run.seed,
        },
    };
    let groups: Vec<&str> = match &args.groups {
        Some(g) => g.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect(),
        None => match task {
            Task::Adr => ADR_ABLATION.to_vec(),
            Task::Intake => INTAKE_ABLATION.to_vec(),
        },
    };
    let table = eval::ablation_run(&run.pipeline, &groups, &protocol, &res)?;
    let human = format!("source: {}\nseed: {}\n{}", run.source, run.seed, table.render());
    print!("{human}");
    write_report(args.out.as_deref(), &human, &table.to_tsv())?;
    Ok(table)
}

/// The n-gram groups of `f`: word, non-contiguous and domain generalized.
pub fn ngram_family(f: &FeatureConfig) -> FeatureConfig {
    FeatureConfig {
        word_ngram_max: f.word_ngram_max,
        noncontig_ngram_max: f.noncontig_ngram_max,
        domain_ngram_max: f.domain_ngram_max,
        domain_noncontig_max: f.domain_noncontig_max,
        use_negation: f.use_negation,
        ..Default::default()
    }
}

pub fn cmd_rank_features(args: &RankArgs) -> Result<Vec<(String, f64)>> {
    let run = RunConfig::resolve(&args.config)?;
    let family = ngram_family(&run.pipeline.features);
    let res = load_resources(run.resources_dir.as_deref(), &family)?;
    let train = load_labeled(&args.train, run.task())?;
    let ranked = eval::mi_rank(&train, &family, &res, args.top_k)?;
    let mut human = format!("top {} n-gram features by mutual information\n", ranked.len());
    for (i, (name, mi)) in ranked.iter().enumerate() {
        let _ = writeln!(human, "{:>3}. {name}  ({mi:.4})", i + 1);
    }
    print!("{human}");
    write_report(args.out.as_deref(), &human, &eval::render_ranking(&ranked))?;
    Ok(ranked)
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Train(a) => {
            let outcome = cmd_train(a)?;
            print!("{}", outcome.log);
            println!("model written to {}", outcome.model_path.display());
        }
        Command::Predict(a) => {
            let rows = cmd_predict(a)?;
            println!("{} predictions written to {}", rows.len(), a.out.display());
        }
        Command::Eval(a) => {
            cmd_eval(a)?;
        }
        Command::Cv(a) => {
            cmd_cv(a)?;
        }
        Command::Ablate(a) => {
            cmd_ablate(a)?;
        }
        Command::RankFeatures(a) => {
            cmd_rank_features(a)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_resolution() {
        let args = ConfigArgs {
            preset: Some("task2-sub3".into()),
            ..Default::default()
        };
        let run = RunConfig::resolve(&args).unwrap();
        assert_eq!((run.seed, run.pipeline.params.c), (DEFAULT_SEED, 0.1));
        let args = ConfigArgs {
            preset: Some("task1-sub1".into()),
            seed: Some(7),
            ..Default::default()
        };
        assert_eq!(RunConfig::resolve(&args).unwrap().pipeline.params.seed, 7);
        assert!(RunConfig::resolve(&ConfigArgs::default()).is_err());
    }

    #[test]
    fn prediction_lines() {
        let rows = parse_predictions("a\t1\r\n\nb\t0\n", "p").unwrap();
        assert_eq!(rows, [("a".to_owned(), 1), ("b".to_owned(), 0)]);
        assert!(parse_predictions("a 1\n", "p").is_err());
    }

    #[test]
    fn missing_resources_name_the_path() {
        let dir = std::env::temp_dir().join("medtweet-cli-missing-resources");
        let _ = fs::create_dir_all(&dir);
        let cfg = PipelineConfig::preset("task1-sub1").unwrap();
        let err = load_resources(Some(&dir), &cfg.features).unwrap_err().to_string();
        assert!(err.contains("medications.txt"), "{err}");
        assert!(load_resources(None, &cfg.features).is_err());
    }

    #[test]
    fn argument_parsing() {
        let cli = Cli::try_parse_from([
            "medtweet", "ablate", "--preset", "task1-sub1", "--train", "t.tsv", "--groups", "negation,domain-ngrams",
        ])
        .unwrap();
        match cli.command {
            Command::Ablate(a) => assert_eq!(a.groups.unwrap(), ["negation", "domain-ngrams"]),
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["medtweet", "train", "--preset", "x"]).is_err());
    }
}
