//! Sparse feature extraction driven by a declarative [`FeatureConfig`].
//!
//! Every feature group owns a name prefix so the groups partition the
//! feature space:
//!
//! | group                         | names                                  |
//! |-------------------------------|----------------------------------------|
//! | word n-grams                  | `need`, `makes me` (escaped as `w:..` if they would start with a reserved prefix) |
//! | non-contiguous n-grams        | `nc:a * c`                             |
//! | character n-grams             | `c:ab`                                 |
//! | unigram stems                 | `s:run`                                |
//! | embedding sums                | `emb:<table>:<dim>`                    |
//! | clusters                      | `cl:<map>:<cluster>`                   |
//! | negation                      | `neg:present`                          |
//! | Twitter-specific              | `tw:*`                                 |
//! | punctuation                   | `pu:*`                                 |
//! | domain generalized n-grams    | `g:<MED> makes me`, `gnc:<MED> * me`   |
//! | pronoun lexicon               | `pro:count`                            |
//! | ADR lexicon                   | `adr:count`, `adr:any`                 |
//! | sentiment lexicons            | `sent:<lexicon>:{count,total,max,last}`|
//!
//! N-gram, cluster and stem features are binary presence features.

mod extractors;
mod space;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{split_list, KeyValues};
use crate::error::{Error, Result};
use crate::resources::Resources;
use crate::textprep::{mark_negation, normalize, tokenize_with, TokenSequence};

pub use extractors::*;
pub use space::{FeatureId, FeatureSpace, FeatureVector};

/// Prefixes reserved by non-word feature groups.
pub const RESERVED_PREFIXES: &[&str] = &[
    "w:", "nc:", "c:", "s:", "emb:", "cl:", "neg:", "tw:", "pu:", "g:", "gnc:", "pro:", "adr:",
    "sent:",
];

/// Which feature groups are enabled, and with what orders and resources.
///
/// Embedding tables and cluster maps are split into general-domain and
/// domain-specific lists so they can be ablated separately.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub word_ngram_max: usize,
    pub noncontig_ngram_max: usize,
    pub char_ngram_max: usize,
    pub use_stems: bool,
    pub use_negation: bool,
    pub use_twitter: bool,
    pub use_punctuation: bool,
    pub embedding_tables: Vec<String>,
    pub cluster_maps: Vec<String>,
    pub domain_ngram_max: usize,
    pub domain_noncontig_max: usize,
    pub use_adr_lexicon_feature: bool,
    pub use_pronoun_lexicon: bool,
    pub domain_embedding_tables: Vec<String>,
    pub domain_cluster_maps: Vec<String>,
    pub sentiment_lexicons: Vec<String>,
}

const KEYS: &[&str] = &[
    "word_ngram_max",
    "noncontig_ngram_max",
    "char_ngram_max",
    "use_stems",
    "use_negation",
    "use_twitter",
    "use_punctuation",
    "embedding_tables",
    "cluster_maps",
    "domain_ngram_max",
    "domain_noncontig_max",
    "use_adr_lexicon_feature",
    "use_pronoun_lexicon",
    "domain_embedding_tables",
    "domain_cluster_maps",
    "sentiment_lexicons",
];

impl FeatureConfig {
    /// Only word unigrams.
    pub fn unigrams() -> Self {
        FeatureConfig {
            word_ngram_max: 1,
            ..Default::default()
        }
    }

    pub fn keys() -> &'static [&'static str] {
        KEYS
    }

    /// Reads the feature keys of `kv`; absent keys keep their default (off).
    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        let num = |k: &str| -> Result<usize> { Ok(kv.parse_value(k)?.unwrap_or(0)) };
        let flag = |k: &str| -> Result<bool> { Ok(kv.bool_value(k)?.unwrap_or(false)) };
        let list = |k: &str| kv.get(k).map(split_list).unwrap_or_default();
        Ok(FeatureConfig {
            word_ngram_max: num("word_ngram_max")?,
            noncontig_ngram_max: num("noncontig_ngram_max")?,
            char_ngram_max: num("char_ngram_max")?,
            use_stems: flag("use_stems")?,
            use_negation: flag("use_negation")?,
            use_twitter: flag("use_twitter")?,
            use_punctuation: flag("use_punctuation")?,
            embedding_tables: list("embedding_tables"),
            cluster_maps: list("cluster_maps"),
            domain_ngram_max: num("domain_ngram_max")?,
            domain_noncontig_max: num("domain_noncontig_max")?,
            use_adr_lexicon_feature: flag("use_adr_lexicon_feature")?,
            use_pronoun_lexicon: flag("use_pronoun_lexicon")?,
            domain_embedding_tables: list("domain_embedding_tables"),
            domain_cluster_maps: list("domain_cluster_maps"),
            sentiment_lexicons: list("sentiment_lexicons"),
        })
    }

    pub fn parse(content: &str) -> Result<Self> {
        let kv = KeyValues::parse(content, "feature config")?;
        kv.reject_unknown(KEYS)?;
        FeatureConfig::from_kv(&kv)
    }

    pub fn write_kv(&self, kv: &mut KeyValues) {
        let list = |v: &[String]| if v.is_empty() { "-".into() } else { v.join(", ") };
        kv.set("word_ngram_max", self.word_ngram_max);
        kv.set("noncontig_ngram_max", self.noncontig_ngram_max);
        kv.set("char_ngram_max", self.char_ngram_max);
        kv.set("use_stems", self.use_stems);
        kv.set("use_negation", self.use_negation);
        kv.set("use_twitter", self.use_twitter);
        kv.set("use_punctuation", self.use_punctuation);
        kv.set("embedding_tables", list(&self.embedding_tables));
        kv.set("cluster_maps", list(&self.cluster_maps));
        kv.set("domain_ngram_max", self.domain_ngram_max);
        kv.set("domain_noncontig_max", self.domain_noncontig_max);
        kv.set("use_adr_lexicon_feature", self.use_adr_lexicon_feature);
        kv.set("use_pronoun_lexicon", self.use_pronoun_lexicon);
        kv.set("domain_embedding_tables", list(&self.domain_embedding_tables));
        kv.set("domain_cluster_maps", list(&self.domain_cluster_maps));
        kv.set("sentiment_lexicons", list(&self.sentiment_lexicons));
    }

    pub fn render(&self) -> String {
        let mut kv = KeyValues::default();
        self.write_kv(&mut kv);
        kv.render()
    }

    pub fn uses_domain_ngrams(&self) -> bool {
        self.domain_ngram_max > 0 || self.domain_noncontig_max >= 3
    }

    /// Checks that every resource the configuration needs is available.
    pub fn validate(&self, res: &Resources) -> Result<()> {
        for t in self.embedding_tables.iter().chain(&self.domain_embedding_tables) {
            res.embedding(t)?;
        }
        for c in self.cluster_maps.iter().chain(&self.domain_cluster_maps) {
            res.cluster_map(c)?;
        }
        for s in &self.sentiment_lexicons {
            res.sentiment_lexicon(s)?;
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in self
            .embedding_tables
            .iter()
            .chain(&self.domain_embedding_tables)
            .map(|n| format!("emb:{n}"))
            .chain(
                self.cluster_maps
                    .iter()
                    .chain(&self.domain_cluster_maps)
                    .map(|n| format!("cl:{n}")),
            )
            .chain(self.sentiment_lexicons.iter().map(|n| format!("sent:{n}")))
        {
            if !seen.insert(name.clone()) {
                return Err(Error::Config(format!("resource {name} listed twice")));
            }
        }
        if self.uses_domain_ngrams() {
            if res.medications.is_none() {
                return Err(Error::MissingResource("medication lexicon".into()));
            }
            if res.adr.is_none() {
                return Err(Error::MissingResource("ADR lexicon".into()));
            }
        }
        if self.use_adr_lexicon_feature && res.adr.is_none() {
            return Err(Error::MissingResource("ADR lexicon".into()));
        }
        if self.use_pronoun_lexicon && res.pronouns.is_none() {
            return Err(Error::MissingResource("pronoun lexicon".into()));
        }
        Ok(())
    }
}

fn word_feature_name(ngram: String) -> String {
    if RESERVED_PREFIXES.iter().any(|p| ngram.starts_with(p)) {
        format!("w:{ngram}")
    } else {
        ngram
    }
}

/// Preprocessed tweet: normalized, tokenized and, when enabled, negation-marked.
pub fn prepare(text: &str, cfg: &FeatureConfig, res: &Resources) -> TokenSequence {
    let tokens = tokenize_with(&normalize(text), &res.emoticons);
    if cfg.use_negation {
        mark_negation(&tokens, &res.negators)
    } else {
        tokens
    }
}

/// Feature extraction bound to a configuration and a resource bundle.
#[derive(Debug, Clone, Copy)]
pub struct Extractor<'a> {
    cfg: &'a FeatureConfig,
    res: &'a Resources,
}

impl<'a> Extractor<'a> {
    /// Fails if the configuration names a resource the bundle lacks.
    pub fn new(cfg: &'a FeatureConfig, res: &'a Resources) -> Result<Self> {
        cfg.validate(res)?;
        Ok(Extractor { cfg, res })
    }

    pub fn config(&self) -> &FeatureConfig {
        self.cfg
    }

    /// A growable space with the dense embedding id ranges already reserved.
    pub fn new_space(&self) -> FeatureSpace {
        let mut space = FeatureSpace::new();
        for name in self.cfg.embedding_tables.iter().chain(&self.cfg.domain_embedding_tables) {
            let dim = self.res.embeddings[name].dim();
            for i in 0..dim {
                space.intern(&format!("emb:{name}:{i}"));
            }
        }
        space
    }

    /// All enabled features of `text` by name, in a deterministic order.
    /// Zero-valued features are left out.
    pub fn named_features(&self, text: &str) -> Vec<(String, f64)> {
        let cfg = self.cfg;
        let res = self.res;
        let seq = prepare(text, cfg, res);
        let mut out: Vec<(String, f64)> = Vec::new();
        let binary = |names: std::collections::BTreeSet<String>, out: &mut Vec<(String, f64)>| {
            out.extend(names.into_iter().map(|n| (n, 1.0)));
        };

        if cfg.word_ngram_max > 0 {
            let names = word_ngrams(&seq, cfg.word_ngram_max);
            binary(names.into_iter().map(word_feature_name).collect(), &mut out);
        }
        if cfg.noncontig_ngram_max >= 3 {
            let names = noncontig_ngrams(&seq, cfg.noncontig_ngram_max);
            binary(names.into_iter().map(|n| format!("nc:{n}")).collect(), &mut out);
        }
        if cfg.char_ngram_max > 0 {
            binary(char_ngrams(&seq, cfg.char_ngram_max), &mut out);
        }
        if cfg.use_stems {
            binary(stem_unigrams(&seq), &mut out);
        }
        for name in cfg.embedding_tables.iter().chain(&cfg.domain_embedding_tables) {
            let sum = embedding_sum(&seq, &res.embeddings[name]);
            out.extend(
                sum.into_iter()
                    .enumerate()
                    .map(|(i, v)| (format!("emb:{name}:{i}"), v)),
            );
        }
        for name in cfg.cluster_maps.iter().chain(&cfg.domain_cluster_maps) {
            let ids = cluster_ids(&seq, &res.clusters[name]);
            binary(ids.into_iter().map(|c| format!("cl:{name}:{c}")).collect(), &mut out);
        }
        if cfg.use_negation && has_negator(&seq, &res.negators) {
            out.push(("neg:present".into(), 1.0));
        }
        if cfg.use_twitter {
            let f = twitter_features(&seq, &res.emoticons);
            out.extend(f.named().into_iter().map(|(n, v)| (n.to_owned(), v)));
        }
        if cfg.use_punctuation {
            let f = punctuation_features(&seq);
            out.extend(f.named().into_iter().map(|(n, v)| (n.to_owned(), v)));
        }
        if cfg.uses_domain_ngrams() {
            let med = res.medications.as_ref().expect("validated");
            let adr = res.adr.as_ref().expect("validated");
            let generalized = domain_generalize(&seq, med, adr);
            binary(
                domain_ngrams(&generalized, cfg.domain_ngram_max, cfg.domain_noncontig_max),
                &mut out,
            );
        }
        if cfg.use_pronoun_lexicon {
            let n = pronoun_count(&seq, res.pronouns.as_ref().expect("validated"));
            out.push(("pro:count".into(), n as f64));
        }
        if cfg.use_adr_lexicon_feature {
            let f = adr_lexicon_feature(&seq, res.adr.as_ref().expect("validated"));
            out.extend(f.into_iter().map(|(n, v)| (n.to_owned(), v)));
        }
        for name in &cfg.sentiment_lexicons {
            let f = sentiment_features(&seq, &res.sentiment[name]);
            out.push((format!("sent:{name}:count"), f.count as f64));
            out.push((format!("sent:{name}:total"), f.total));
            if let Some(max) = f.max {
                out.push((format!("sent:{name}:max"), max));
            }
            out.push((format!("sent:{name}:last"), f.last));
        }
        out.retain(|(_, v)| *v != 0.0);
        out
    }

    /// Extracts and interns; unseen names grow `space` unless it is frozen.
    pub fn extract(&self, text: &str, space: &mut FeatureSpace) -> FeatureVector {
        let pairs = self
            .named_features(text)
            .into_iter()
            .filter_map(|(n, v)| space.intern(&n).map(|id| (id, v)))
            .collect();
        FeatureVector::from_pairs(pairs)
    }

    /// Extracts against a read-only space; unknown names are dropped.
    pub fn extract_frozen(&self, text: &str, space: &FeatureSpace) -> FeatureVector {
        let pairs = self
            .named_features(text)
            .into_iter()
            .filter_map(|(n, v)| space.get(&n).map(|id| (id, v)))
            .collect();
        FeatureVector::from_pairs(pairs)
    }

    /// Builds a frozen space over `texts` together with their vectors.
    /// Names are extracted in parallel and interned in input order, so the
    /// result does not depend on scheduling.
    pub fn fit_space<S: AsRef<str> + Sync>(&self, texts: &[S]) -> (FeatureSpace, Vec<FeatureVector>) {
        let named: Vec<_> = texts.par_iter().map(|t| self.named_features(t.as_ref())).collect();
        let mut space = self.new_space();
        let vectors = named
            .into_iter()
            .map(|pairs| {
                let pairs = pairs
                    .into_iter()
                    .map(|(n, v)| (space.intern(&n).expect("space is growable"), v))
                    .collect();
                FeatureVector::from_pairs(pairs)
            })
            .collect();
        space.freeze();
        (space, vectors)
    }

    /// Vectors of `texts` over an existing space, in parallel.
    pub fn transform<S: AsRef<str> + Sync>(&self, texts: &[S], space: &FeatureSpace) -> Vec<FeatureVector> {
        texts
            .par_iter()
            .map(|t| self.extract_frozen(t.as_ref(), space))
            .collect()
    }
}
