//! End-to-end models: feature extraction, class-imbalance strategy and SVM
//! training bundled into one serializable object.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{split_list, KeyValues};
use crate::corpus::{ClassCounts, ClassId, Dataset};
use crate::error::{Error, Result};
use crate::features::{Extractor, FeatureConfig, FeatureSpace, FeatureVector};
use crate::imbalance::{undersample_indices, Ensemble};
use crate::resources::Resources;
use crate::svm::{self, Convergence, LinearModel, TrainParams};

/// The two classification tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    /// Binary: 1 = mentions an adverse drug reaction, 0 = does not.
    Adr,
    /// Three classes: 1 = definite intake, 2 = possible intake, 3 = no intake.
    Intake,
}

impl Task {
    pub fn label_domain(self) -> Vec<ClassId> {
        match self {
            Task::Adr => vec![0, 1],
            Task::Intake => vec![1, 2, 3],
        }
    }

    /// The class kept in full by under-sampling.
    pub fn minority_class(self) -> ClassId {
        1
    }

    /// Classes the official metric averages over.
    pub fn eval_classes(self) -> Vec<ClassId> {
        match self {
            Task::Adr => vec![1],
            Task::Intake => vec![1, 2],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Adr => "adr",
            Task::Intake => "intake",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adr" | "task1" => Ok(Task::Adr),
            "intake" | "task2" => Ok(Task::Intake),
            _ => Err(Error::Config(format!("unknown task {s:?} (expected adr or intake)"))),
        }
    }
}

/// Class-imbalance strategy. Class weights live in [`TrainParams`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Imbalance {
    None,
    Undersample(f64),
    Ensemble(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub task: Task,
    pub features: FeatureConfig,
    pub params: TrainParams,
    pub imbalance: Imbalance,
}

const PIPELINE_KEYS: &[&str] = &[
    "task",
    "c",
    "class_weights",
    "tolerance",
    "max_iterations",
    "seed",
    "imbalance",
    "sample_ratios",
];

/// Shipped presets, one per official submission.
pub const PRESETS: &[(&str, &str)] = &[
    ("task1-sub1", include_str!("../presets/task1-sub1.conf")),
    ("task1-sub2", include_str!("../presets/task1-sub2.conf")),
    ("task1-sub3", include_str!("../presets/task1-sub3.conf")),
    ("task2-sub1", include_str!("../presets/task2-sub1.conf")),
    ("task2-sub2", include_str!("../presets/task2-sub2.conf")),
    ("task2-sub3", include_str!("../presets/task2-sub3.conf")),
];

fn parse_ratios(v: &str) -> Result<Vec<f64>> {
    split_list(v)
        .iter()
        .map(|r| {
            r.parse::<f64>()
                .ok()
                .filter(|x| *x > 0.0 && x.is_finite())
                .ok_or_else(|| Error::Config(format!("invalid sampling ratio {r:?}")))
        })
        .collect()
}

fn parse_class_weights(v: &str) -> Result<Vec<(ClassId, f64)>> {
    split_list(v)
        .iter()
        .map(|entry| {
            let bad = || Error::Config(format!("invalid class weight {entry:?} (expected class:weight)"));
            let (c, w) = entry.split_once(':').ok_or_else(bad)?;
            Ok((c.trim().parse().map_err(|_| bad())?, w.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn format_number(x: f64) -> String {
    format!("{x}")
}

impl PipelineConfig {
    pub fn new(task: Task, features: FeatureConfig, params: TrainParams, imbalance: Imbalance) -> Self {
        PipelineConfig {
            task,
            features,
            params,
            imbalance,
        }
    }

    pub fn preset_names() -> impl Iterator<Item = &'static str> {
        PRESETS.iter().map(|(n, _)| *n)
    }

    pub fn preset_text(name: &str) -> Result<&'static str> {
        PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| *text)
            .ok_or_else(|| {
                let known: Vec<_> = PipelineConfig::preset_names().collect();
                Error::Config(format!("unknown preset {name:?}; known presets: {}", known.join(", ")))
            })
    }

    pub fn preset(name: &str) -> Result<Self> {
        PipelineConfig::parse(PipelineConfig::preset_text(name)?)
    }

    /// Reads a config file. A `preset = <name>` line starts from that preset
    /// and the remaining keys override it.
    pub fn parse(content: &str) -> Result<Self> {
        let kv = KeyValues::parse(content, "pipeline config")?;
        let kv = match kv.get("preset") {
            None => kv,
            Some(name) => {
                let mut base = KeyValues::parse(PipelineConfig::preset_text(name)?, name)?;
                for k in kv.keys().filter(|k| *k != "preset") {
                    base.set(k, kv.get(k).unwrap_or_default());
                }
                base
            }
        };
        PipelineConfig::from_kv(&kv)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PipelineConfig::parse(&content)
    }

    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        let known: Vec<&str> = PIPELINE_KEYS.iter().chain(FeatureConfig::keys()).copied().collect();
        kv.reject_unknown(&known)?;
        let task: Task = kv
            .get("task")
            .ok_or_else(|| Error::Config("missing key task".into()))?
            .parse()?;
        let defaults = TrainParams::default();
        let mut params = TrainParams {
            c: kv.parse_value("c")?.unwrap_or(defaults.c),
            tolerance: kv.parse_value("tolerance")?.unwrap_or(defaults.tolerance),
            max_iterations: kv.parse_value("max_iterations")?.unwrap_or(defaults.max_iterations),
            seed: kv.parse_value("seed")?.unwrap_or(defaults.seed),
            class_weights: Default::default(),
        };
        if let Some(v) = kv.get("class_weights") {
            let domain = task.label_domain();
            for (class, w) in parse_class_weights(v)? {
                if !domain.contains(&class) {
                    return Err(Error::LabelOutOfDomain { label: class, domain });
                }
                params.class_weights.insert(class, w);
            }
        }
        params.validate()?;
        let ratios = kv.get("sample_ratios").map(parse_ratios).transpose()?.unwrap_or_default();
        let imbalance = match kv.get("imbalance").unwrap_or("none") {
            "none" | "-" => Imbalance::None,
            "undersample" => match ratios.as_slice() {
                [r] => Imbalance::Undersample(*r),
                _ => return Err(Error::Config("undersample needs exactly one sample ratio".into())),
            },
            "ensemble" if !ratios.is_empty() => Imbalance::Ensemble(ratios),
            "ensemble" => return Err(Error::Config("ensemble needs at least one sample ratio".into())),
            other => {
                return Err(Error::Config(format!(
                    "unknown imbalance strategy {other:?} (expected none, undersample or ensemble)"
                )))
            }
        };
        Ok(PipelineConfig {
            task,
            features: FeatureConfig::from_kv(kv)?,
            params,
            imbalance,
        })
    }

    pub fn to_kv(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.set("task", self.task);
        self.features.write_kv(&mut kv);
        kv.set("c", format_number(self.params.c));
        let weights: Vec<String> = self
            .params
            .class_weights
            .iter()
            .map(|(c, w)| format!("{c}:{}", format_number(*w)))
            .collect();
        kv.set("class_weights", if weights.is_empty() { "-".into() } else { weights.join(", ") });
        kv.set("tolerance", format_number(self.params.tolerance));
        kv.set("max_iterations", self.params.max_iterations);
        kv.set("seed", self.params.seed);
        let (name, ratios) = match &self.imbalance {
            Imbalance::None => ("none", vec![]),
            Imbalance::Undersample(r) => ("undersample", vec![*r]),
            Imbalance::Ensemble(rs) => ("ensemble", rs.clone()),
        };
        kv.set("imbalance", name);
        let ratios: Vec<String> = ratios.into_iter().map(format_number).collect();
        kv.set("sample_ratios", if ratios.is_empty() { "-".into() } else { ratios.join(", ") });
        kv
    }

    /// The effective configuration as a key=value file that parses back to
    /// an equal config.
    pub fn render(&self) -> String {
        self.to_kv().render()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.params.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Classifier {
    Single(LinearModel),
    Ensemble(Ensemble),
}

impl Classifier {
    pub fn predict(&self, x: &FeatureVector) -> Result<ClassId> {
        match self {
            Classifier::Single(m) => m.predict(x),
            Classifier::Ensemble(e) => e.predict(x),
        }
    }

    pub fn models(&self) -> Vec<&LinearModel> {
        match self {
            Classifier::Single(m) => vec![m],
            Classifier::Ensemble(e) => e.members().iter().collect(),
        }
    }
}

/// What happened during [`TrainedPipeline::fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub class_counts: ClassCounts,
    pub space_size: usize,
    /// Training-set size of each model after sampling.
    pub model_instances: Vec<usize>,
    pub sampling_shortfall: Vec<usize>,
    pub convergence: Vec<Convergence>,
}

impl FitReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("class counts: {}", self.class_counts),
            format!("feature space size: {}", self.space_size),
        ];
        for (k, n) in self.model_instances.iter().enumerate() {
            let short = self.sampling_shortfall.get(k).copied().unwrap_or(0);
            let mut line = format!("model {k}: {n} training instances");
            if short > 0 {
                line.push_str(&format!(" (sampling shortfall {short})"));
            }
            out.push(line);
        }
        for (k, c) in self.convergence.iter().enumerate() {
            out.push(format!(
                "solver {k}: {} after {} sweeps, primal {:.6e}, gap {:.3e}, max violation {:.3e}",
                if c.converged { "converged" } else { "stopped" },
                c.sweeps,
                c.primal,
                c.gap(),
                c.max_violation
            ));
        }
        out
    }
}

pub const MODEL_FORMAT: &str = "medtweet-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    config: PipelineConfig,
    space: FeatureSpace,
    classifier: Classifier,
}

/// A trained model over a frozen feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedPipeline {
    config: PipelineConfig,
    space: FeatureSpace,
    classifier: Classifier,
}

impl TrainedPipeline {
    /// Builds the feature space over all of `train`, then trains according
    /// to the imbalance strategy. Ensemble members share the space.
    pub fn fit(config: &PipelineConfig, train: &Dataset, res: &Resources) -> Result<(Self, FitReport)> {
        let domain = config.task.label_domain();
        let ys = train.labels()?;
        if let Some(&y) = ys.iter().find(|y| !domain.contains(y)) {
            return Err(Error::LabelOutOfDomain { label: y, domain });
        }
        let extractor = Extractor::new(&config.features, res)?;
        let texts: Vec<&str> = train.iter().map(|t| t.text.as_str()).collect();
        let (space, xs) = extractor.fit_space(&texts);
        let dim = space.len();
        let params = &config.params;
        let minority = config.task.minority_class();

        let (classifier, instances, shortfall) = match &config.imbalance {
            Imbalance::None => (
                Classifier::Single(svm::train(&xs, &ys, dim, params, &domain)?),
                vec![xs.len()],
                vec![0],
            ),
            Imbalance::Undersample(ratio) => {
                let sample = undersample_indices(&ys, minority, *ratio, params.seed)?;
                let sx: Vec<FeatureVector> = sample.indices.iter().map(|&i| xs[i].clone()).collect();
                let sy: Vec<ClassId> = sample.indices.iter().map(|&i| ys[i]).collect();
                (
                    Classifier::Single(svm::train(&sx, &sy, dim, params, &domain)?),
                    vec![sx.len()],
                    vec![sample.shortfall],
                )
            }
            Imbalance::Ensemble(ratios) => {
                let e = Ensemble::fit(&xs, &ys, dim, &domain, minority, ratios, params)?;
                let instances = e.members().iter().map(|m| m.metadata().instances).collect();
                let shortfall = ratios
                    .iter()
                    .enumerate()
                    .map(|(k, &r)| {
                        undersample_indices(&ys, minority, r, params.seed.wrapping_add(k as u64))
                            .map(|s| s.shortfall)
                    })
                    .collect::<Result<_>>()?;
                (Classifier::Ensemble(e), instances, shortfall)
            }
        };
        let report = FitReport {
            class_counts: train.class_counts()?,
            space_size: dim,
            model_instances: instances,
            sampling_shortfall: shortfall,
            convergence: classifier
                .models()
                .iter()
                .flat_map(|m| m.metadata().convergence.iter().cloned())
                .collect(),
        };
        let pipeline = TrainedPipeline {
            config: config.clone(),
            space,
            classifier,
        };
        Ok((pipeline, report))
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn classifier(&self) -> &Classifier {
        &self.classifier
    }

    pub fn vectorize<S: AsRef<str> + Sync>(&self, texts: &[S], res: &Resources) -> Result<Vec<FeatureVector>> {
        let extractor = Extractor::new(&self.config.features, res)?;
        Ok(extractor.transform(texts, &self.space))
    }

    /// Predictions in input order. Names outside the training space are dropped.
    pub fn predict_texts<S: AsRef<str> + Sync>(&self, texts: &[S], res: &Resources) -> Result<Vec<ClassId>> {
        self.vectorize(texts, res)?
            .iter()
            .map(|x| self.classifier.predict(x))
            .collect()
    }

    pub fn predict(&self, d: &Dataset, res: &Resources) -> Result<Vec<ClassId>> {
        let texts: Vec<&str> = d.iter().map(|t| t.text.as_str()).collect();
        self.predict_texts(&texts, res)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            config: self.config.clone(),
            space: self.space.clone(),
            classifier: self.classifier.clone(),
        };
        let mut s = serde_json::to_string(&file).map_err(|e| Error::Model(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(s).map_err(|e| Error::Model(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Model(format!("not a model file (format {:?})", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::Model(format!("unsupported model version {}", file.version)));
        }
        if file.classifier.models().iter().any(|m| m.space_size() != file.space.len()) {
            return Err(Error::Model("model and feature space sizes differ".into()));
        }
        let mut space = file.space;
        space.freeze();
        Ok(TrainedPipeline {
            config: file.config,
            space,
            classifier: file.classifier,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TrainedPipeline::from_json(&s)
    }
}
