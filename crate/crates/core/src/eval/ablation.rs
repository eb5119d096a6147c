use std::fmt::Write as _;

use rayon::prelude::*;

use super::metrics::MetricReport;
use super::protocols::{augmented_fold_cv, holdout_eval, kfold_cv};
use crate::corpus::Dataset;
use crate::error::{Error, Result};
use crate::pipeline::{Imbalance, PipelineConfig};
use crate::resources::Resources;

/// A removable feature group or training option.
#[derive(Debug, Clone, Copy)]
pub struct Group {
    pub id: &'static str,
    pub label: &'static str,
    remove: fn(&mut PipelineConfig),
}

fn general_ngrams(p: &mut PipelineConfig) {
    let f = &mut p.features;
    f.word_ngram_max = 0;
    f.noncontig_ngram_max = 0;
    f.char_ngram_max = 0;
    f.use_stems = false;
}

fn twitter_punctuation(p: &mut PipelineConfig) {
    p.features.use_twitter = false;
    p.features.use_punctuation = false;
}

fn domain_ngrams(p: &mut PipelineConfig) {
    p.features.domain_ngram_max = 0;
    p.features.domain_noncontig_max = 0;
}

pub const GROUPS: &[Group] = &[
    Group {
        id: "general-textual",
        label: "all - general textual features",
        remove: |p| {
            general_ngrams(p);
            twitter_punctuation(p);
            p.features.use_negation = false;
            p.features.embedding_tables.clear();
            p.features.cluster_maps.clear();
        },
    },
    Group {
        id: "general-ngrams",
        label: "all - general n-grams",
        remove: general_ngrams,
    },
    Group {
        id: "general-embeddings",
        label: "all - general embeddings",
        remove: |p| p.features.embedding_tables.clear(),
    },
    Group {
        id: "general-clusters",
        label: "all - general clusters",
        remove: |p| p.features.cluster_maps.clear(),
    },
    Group {
        id: "twitter-punctuation",
        label: "all - Twitter-specific - punctuation",
        remove: twitter_punctuation,
    },
    Group {
        id: "negation-twitter-punctuation",
        label: "all - negation - Twitter-specific - punctuation",
        remove: |p| {
            twitter_punctuation(p);
            p.features.use_negation = false;
        },
    },
    Group {
        id: "negation",
        label: "all - negation",
        remove: |p| p.features.use_negation = false,
    },
    Group {
        id: "domain-specific",
        label: "all - domain-specific features",
        remove: |p| {
            domain_ngrams(p);
            let f = &mut p.features;
            f.use_adr_lexicon_feature = false;
            f.use_pronoun_lexicon = false;
            f.domain_embedding_tables.clear();
            f.domain_cluster_maps.clear();
        },
    },
    Group {
        id: "domain-ngrams",
        label: "all - domain generalized n-grams",
        remove: domain_ngrams,
    },
    Group {
        id: "pronoun-lexicon",
        label: "all - Pronoun lexicon",
        remove: |p| p.features.use_pronoun_lexicon = false,
    },
    Group {
        id: "adr-lexicon",
        label: "all - ADR lexicon",
        remove: |p| p.features.use_adr_lexicon_feature = false,
    },
    Group {
        id: "domain-embeddings",
        label: "all - domain embeddings",
        remove: |p| p.features.domain_embedding_tables.clear(),
    },
    Group {
        id: "domain-clusters",
        label: "all - domain clusters",
        remove: |p| p.features.domain_cluster_maps.clear(),
    },
    Group {
        id: "sentiment-lexicons",
        label: "all - sentiment lexicon features",
        remove: |p| p.features.sentiment_lexicons.clear(),
    },
    Group {
        id: "under-sampling",
        label: "all - under-sampling",
        remove: |p| p.imbalance = Imbalance::None,
    },
    Group {
        id: "class-weights",
        label: "all - class weights",
        remove: |p| p.params.class_weights.clear(),
    },
];

/// Rows of the ADR-detection ablation table.
pub const ADR_ABLATION: &[&str] = &[
    "general-textual",
    "general-ngrams",
    "general-embeddings",
    "general-clusters",
    "twitter-punctuation",
    "domain-specific",
    "domain-ngrams",
    "pronoun-lexicon",
    "domain-embeddings",
    "domain-clusters",
    "under-sampling",
];

/// Rows of the medication-intake ablation table.
pub const INTAKE_ABLATION: &[&str] = &[
    "general-textual",
    "general-ngrams",
    "general-embeddings",
    "general-clusters",
    "negation-twitter-punctuation",
    "domain-specific",
    "domain-ngrams",
    "domain-embeddings",
    "sentiment-lexicons",
    "class-weights",
];

pub fn group(id: &str) -> Result<&'static Group> {
    GROUPS.iter().find(|g| g.id == id).ok_or_else(|| {
        let known: Vec<&str> = GROUPS.iter().map(|g| g.id).collect();
        Error::Config(format!("unknown feature group {id:?}; known groups: {}", known.join(", ")))
    })
}

impl Group {
    pub fn apply(&self, base: &PipelineConfig) -> PipelineConfig {
        let mut p = base.clone();
        (self.remove)(&mut p);
        p
    }
}

/// How each ablation row is trained and scored.
#[derive(Debug, Clone, Copy)]
pub enum Protocol<'a> {
    Holdout { train: &'a Dataset, test: &'a Dataset },
    KFold { data: &'a Dataset, k: usize, seed: u64 },
    Augmented { train: &'a Dataset, dev: &'a Dataset, k: usize, seed: u64 },
}

impl Protocol<'_> {
    pub fn run(&self, cfg: &PipelineConfig, res: &Resources) -> Result<MetricReport> {
        match *self {
            Protocol::Holdout { train, test } => holdout_eval(train, test, cfg, res),
            Protocol::KFold { data, k, seed } => Ok(kfold_cv(data, k, cfg, res, seed)?.mean),
            Protocol::Augmented { train, dev, k, seed } => Ok(augmented_fold_cv(train, dev, k, cfg, res, seed)?.mean),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    /// `None` for the all-features row.
    pub group: Option<&'static str>,
    pub label: String,
    pub report: MetricReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationTable {
    pub rows: Vec<AblationRow>,
}

/// The all-features row followed by one row per removed group, in the given
/// order. Rows are computed in parallel.
pub fn ablation_run(base: &PipelineConfig, groups: &[&str], protocol: &Protocol<'_>, res: &Resources) -> Result<AblationTable> {
    let groups: Vec<&Group> = groups.iter().map(|id| group(id)).collect::<Result<_>>()?;
    let mut configs: Vec<(Option<&'static str>, String, PipelineConfig)> =
        vec![(None, "all features".to_owned(), base.clone())];
    configs.extend(groups.iter().map(|g| (Some(g.id), g.label.to_owned(), g.apply(base))));
    let rows = configs
        .into_par_iter()
        .map(|(group, label, cfg)| {
            Ok(AblationRow {
                group,
                label,
                report: protocol.run(&cfg, res)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AblationTable { rows })
}

impl AblationTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Aligned table of the micro-averaged P, R and F per row.
    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(8);
        let subset = self.rows.first().map(|r| r.report.subset_name()).unwrap_or_default();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>8}  {:>8}  {:>8}",
            "features",
            format!("P({subset})"),
            format!("R({subset})"),
            format!("F({subset})")
        );
        for r in &self.rows {
            let m = r.report.micro;
            let _ = writeln!(
                out,
                "{:<width$}  {:>8.4}  {:>8.4}  {:>8.4}",
                r.label, m.precision, m.recall, m.f
            );
        }
        out
    }

    /// `row<TAB>metric<TAB>subset<TAB>value` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let id = r.group.unwrap_or("all");
            for line in r.report.to_tsv().lines() {
                let _ = writeln!(out, "{id}\t{line}");
            }
        }
        out
    }
}
