//! External knowledge resources: term lexicons, scored lexicons, embeddings and
//! word clusters, plus the [`Resources`] bundle handed to feature extraction.
//!
//! File formats:
//!
//! | resource       | line format                                        |
//! |----------------|----------------------------------------------------|
//! | term lexicon   | `term`  (may be several space-separated tokens)    |
//! | scored lexicon | `term<TAB>score`                                   |
//! | embeddings     | `term v1 v2 .. vd` (optional `count dim` header)   |
//! | clusters       | `cluster<TAB>term` or `path<TAB>term<TAB>count`    |
//!
//! A resources directory uses fixed file names, see [`Resources::load_dir`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::textprep::{Emoticons, Negators, Token};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn stem_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// A set of lowercased terms, each one or more tokens long.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermLexicon {
    pub name: String,
    entries: HashSet<String>,
    max_tokens: usize,
}

impl TermLexicon {
    pub fn new<I, S>(name: impl Into<String>, terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = TermLexicon {
            name: name.into(),
            ..Default::default()
        };
        for t in terms {
            lex.insert(t.as_ref());
        }
        lex
    }

    fn insert(&mut self, term: &str) {
        let tokens: Vec<String> = term.split_whitespace().map(str::to_lowercase).collect();
        if tokens.is_empty() {
            return;
        }
        self.max_tokens = self.max_tokens.max(tokens.len());
        self.entries.insert(tokens.join(" "));
    }

    pub fn parse(name: impl Into<String>, content: &str) -> Self {
        TermLexicon::new(name, content.lines())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Ok(TermLexicon::parse(stem_name(path), &read(path)?))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest entry length in tokens.
    pub fn max_tokens(&self) -> usize {
        self.max_tokens
    }

    /// Whether the (whitespace-normalized, lowercased) term is an entry.
    pub fn contains(&self, term: &str) -> bool {
        let key: Vec<String> = term.split_whitespace().map(str::to_lowercase).collect();
        self.entries.contains(&key.join(" "))
    }

    pub fn contains_tokens(&self, tokens: &[&str]) -> bool {
        self.entries.contains(&tokens.join(" "))
    }

    /// Sorted entries, for inspection and serialization.
    pub fn entries(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.entries.iter().map(String::as_str).collect();
        v.sort_unstable();
        v
    }
}

/// Leftmost-longest, non-overlapping lexicon matches over lowercased tokens.
/// Returns `(start, length)` spans sorted by start. Placeholder tokens never match.
pub fn match_phrases(tokens: &[Token], lex: &TermLexicon) -> Vec<(usize, usize)> {
    let lowered: Vec<Option<String>> = tokens
        .iter()
        .map(|t| (!t.placeholder).then(|| t.text.to_lowercase()))
        .collect();
    let mut spans = Vec::new();
    let mut i = 0;
    while i < lowered.len() {
        let longest = lex.max_tokens.min(lowered.len() - i);
        let found = (1..=longest).rev().find(|&len| {
            let window = &lowered[i..i + len];
            if window.iter().any(Option::is_none) {
                return false;
            }
            let words: Vec<&str> = window.iter().map(|w| w.as_deref().unwrap()).collect();
            lex.contains_tokens(&words)
        });
        match found {
            Some(len) => {
                spans.push((i, len));
                i += len;
            }
            None => i += 1,
        }
    }
    spans
}

/// Term to real-valued score association (sentiment lexicons).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoredLexicon {
    pub name: String,
    scores: HashMap<String, f64>,
}

impl ScoredLexicon {
    pub fn new<I, S>(name: impl Into<String>, entries: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        ScoredLexicon {
            name: name.into(),
            scores: entries
                .into_iter()
                .map(|(t, s)| (t.as_ref().to_lowercase(), s))
                .collect(),
        }
    }

    /// Parses `term<TAB>score` lines; later duplicates override earlier ones.
    pub fn parse(name: impl Into<String>, content: &str) -> Result<Self> {
        let name = name.into();
        let mut scores = HashMap::new();
        for (idx, line) in content.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (term, score) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::parse(&name, idx + 1, "expected term<TAB>score"))?;
            let score: f64 = score.trim().parse().map_err(|_| {
                Error::parse(&name, idx + 1, format!("unparseable score {score:?}"))
            })?;
            if !score.is_finite() {
                return Err(Error::parse(&name, idx + 1, "score is not finite"));
            }
            scores.insert(term.trim().to_lowercase(), score);
        }
        Ok(ScoredLexicon { name, scores })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        ScoredLexicon::parse(path.display().to_string(), &read(path)?).map(|mut l| {
            l.name = stem_name(path);
            l
        })
    }

    pub fn score(&self, term: &str) -> Option<f64> {
        self.scores.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Dense word vectors of a uniform dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub name: String,
    dim: usize,
    index: HashMap<String, usize>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new<I, S>(name: impl Into<String>, dim: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let name = name.into();
        if dim == 0 {
            return Err(Error::Invalid(format!("{name}: embedding dimension must be >= 1")));
        }
        let mut table = EmbeddingTable {
            name,
            dim,
            index: HashMap::new(),
            data: Vec::new(),
        };
        for (term, v) in vectors {
            if v.len() != dim {
                return Err(Error::Invalid(format!(
                    "{}: vector of length {} in a table of dimension {dim}",
                    table.name,
                    v.len()
                )));
            }
            table.push(term.into(), &v);
        }
        Ok(table)
    }

    fn push(&mut self, term: String, v: &[f64]) {
        match self.index.get(&term) {
            Some(&row) => self.data[row * self.dim..(row + 1) * self.dim].copy_from_slice(v),
            None => {
                self.index.insert(term, self.index.len());
                self.data.extend_from_slice(v);
            }
        }
    }

    /// Parses `term v1 .. vd` lines. A first line of exactly two integers is a
    /// word2vec-style `count dim` header and is skipped.
    pub fn parse(name: impl Into<String>, content: &str) -> Result<Self> {
        let name = name.into();
        let mut table: Option<EmbeddingTable> = None;
        for (idx, line) in content.lines().enumerate() {
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if idx == 0
                && fields.len() == 2
                && fields.iter().all(|f| f.parse::<u64>().is_ok())
            {
                continue;
            }
            let values: Vec<f64> = fields[1..]
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::parse(&name, lineno, format!("bad value {f:?}")))
                })
                .collect::<Result<_>>()?;
            if values.is_empty() {
                return Err(Error::parse(&name, lineno, "vector has dimension 0"));
            }
            let t = table.get_or_insert_with(|| EmbeddingTable {
                name: name.clone(),
                dim: values.len(),
                index: HashMap::new(),
                data: Vec::new(),
            });
            if values.len() != t.dim {
                return Err(Error::parse(
                    &name,
                    lineno,
                    format!("dimension mismatch: expected {}, found {}", t.dim, values.len()),
                ));
            }
            t.push(fields[0].to_owned(), &values);
        }
        table.ok_or_else(|| Error::Invalid(format!("{name}: no vectors")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut t = EmbeddingTable::parse(path.display().to_string(), &read(path)?)?;
        t.name = stem_name(path);
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// The vector for `term`, trying the exact form and then the lowercased form.
    /// `None` means the term is out of vocabulary.
    pub fn get(&self, term: &str) -> Option<&[f64]> {
        let row = match self.index.get(term) {
            Some(&r) => r,
            None => *self.index.get(&term.to_lowercase())?,
        };
        Some(&self.data[row * self.dim..(row + 1) * self.dim])
    }
}

/// Hard word clusters: every term belongs to exactly one cluster.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterMap {
    pub name: String,
    clusters: HashMap<String, String>,
}

impl ClusterMap {
    pub fn new<I, S, T>(name: impl Into<String>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut map = ClusterMap {
            name: name.into(),
            clusters: HashMap::new(),
        };
        for (term, cluster) in pairs {
            let (term, cluster) = (term.into(), cluster.into());
            if let Some(prev) = map.clusters.get(&term) {
                if *prev != cluster {
                    return Err(Error::Invalid(format!(
                        "{}: term {term:?} assigned to clusters {prev} and {cluster}",
                        map.name
                    )));
                }
            }
            map.clusters.insert(term, cluster);
        }
        Ok(map)
    }

    /// Parses `cluster<TAB>term` or Brown `path<TAB>term<TAB>count` lines.
    pub fn parse(name: impl Into<String>, content: &str) -> Result<Self> {
        let name = name.into();
        let mut clusters: HashMap<String, String> = HashMap::new();
        for (idx, line) in content.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let (cluster, term) = match fields.as_slice() {
                [c, t] | [c, t, _] => (c.trim(), *t),
                _ => {
                    return Err(Error::parse(
                        &name,
                        idx + 1,
                        "expected cluster<TAB>term[<TAB>count]",
                    ))
                }
            };
            if let Some(prev) = clusters.get(term) {
                if prev != cluster {
                    return Err(Error::parse(
                        &name,
                        idx + 1,
                        format!("term {term:?} already assigned to cluster {prev}"),
                    ));
                }
                continue;
            }
            clusters.insert(term.to_owned(), cluster.to_owned());
        }
        Ok(ClusterMap { name, clusters })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut m = ClusterMap::parse(path.display().to_string(), &read(path)?)?;
        m.name = stem_name(path);
        Ok(m)
    }

    /// Cluster of `term`, trying the exact form and then the lowercased form.
    pub fn cluster(&self, term: &str) -> Option<&str> {
        self.clusters
            .get(term)
            .or_else(|| self.clusters.get(&term.to_lowercase()))
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Everything feature extraction may consult. Named resources are kept in
/// ordered maps so iteration is deterministic.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub medications: Option<TermLexicon>,
    pub adr: Option<TermLexicon>,
    pub pronouns: Option<TermLexicon>,
    pub embeddings: BTreeMap<String, EmbeddingTable>,
    pub clusters: BTreeMap<String, ClusterMap>,
    pub sentiment: BTreeMap<String, ScoredLexicon>,
    pub negators: Negators,
    pub emoticons: Emoticons,
}

/// File names used inside a resources directory.
pub mod layout {
    pub const MEDICATIONS: &str = "medications.txt";
    pub const ADR: &str = "adr.txt";
    pub const PRONOUNS: &str = "pronouns.txt";
    pub const NEGATORS: &str = "negators.txt";
    pub const EMOTICONS_POSITIVE: &str = "emoticons_positive.txt";
    pub const EMOTICONS_NEGATIVE: &str = "emoticons_negative.txt";
    /// `embeddings/<name>.txt`
    pub const EMBEDDINGS_DIR: &str = "embeddings";
    /// `clusters/<name>.txt`
    pub const CLUSTERS_DIR: &str = "clusters";
    /// `sentiment/<name>.tsv`
    pub const SENTIMENT_DIR: &str = "sentiment";
}

impl Resources {
    pub fn new() -> Self {
        Resources::default()
    }

    pub fn with_medications(mut self, lex: TermLexicon) -> Self {
        self.medications = Some(lex);
        self
    }

    pub fn with_adr(mut self, lex: TermLexicon) -> Self {
        self.adr = Some(lex);
        self
    }

    pub fn with_pronouns(mut self, lex: TermLexicon) -> Self {
        self.pronouns = Some(lex);
        self
    }

    pub fn add_embeddings(&mut self, table: EmbeddingTable) {
        self.embeddings.insert(table.name.clone(), table);
    }

    pub fn add_clusters(&mut self, map: ClusterMap) {
        self.clusters.insert(map.name.clone(), map);
    }

    pub fn add_sentiment(&mut self, lex: ScoredLexicon) {
        self.sentiment.insert(lex.name.clone(), lex);
    }

    pub fn embedding(&self, name: &str) -> Result<&EmbeddingTable> {
        self.embeddings
            .get(name)
            .ok_or_else(|| Error::MissingResource(format!("embedding table {name:?}")))
    }

    pub fn cluster_map(&self, name: &str) -> Result<&ClusterMap> {
        self.clusters
            .get(name)
            .ok_or_else(|| Error::MissingResource(format!("cluster map {name:?}")))
    }

    pub fn sentiment_lexicon(&self, name: &str) -> Result<&ScoredLexicon> {
        self.sentiment
            .get(name)
            .ok_or_else(|| Error::MissingResource(format!("sentiment lexicon {name:?}")))
    }

    /// Loads whatever resources exist in `dir` (see [`layout`]). Missing files
    /// are simply absent; requesting them later from a feature configuration
    /// produces an error. Files that exist but fail to parse are errors here.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "resources directory not found"),
            ));
        }
        let opt = |name: &str| -> Option<PathBuf> {
            let p = dir.join(name);
            p.is_file().then_some(p)
        };
        let mut res = Resources::new();
        if let Some(p) = opt(layout::MEDICATIONS) {
            res.medications = Some(TermLexicon::load(p)?);
        }
        if let Some(p) = opt(layout::ADR) {
            res.adr = Some(TermLexicon::load(p)?);
        }
        if let Some(p) = opt(layout::PRONOUNS) {
            res.pronouns = Some(TermLexicon::load(p)?);
        }
        if let Some(p) = opt(layout::NEGATORS) {
            res.negators = Negators::load(p)?;
        }
        if let (Some(pos), Some(neg)) = (
            opt(layout::EMOTICONS_POSITIVE),
            opt(layout::EMOTICONS_NEGATIVE),
        ) {
            res.emoticons = Emoticons::load(pos, neg)?;
        }
        for path in sorted_files(&dir.join(layout::EMBEDDINGS_DIR))? {
            res.add_embeddings(EmbeddingTable::load(path)?);
        }
        for path in sorted_files(&dir.join(layout::CLUSTERS_DIR))? {
            res.add_clusters(ClusterMap::load(path)?);
        }
        for path in sorted_files(&dir.join(layout::SENTIMENT_DIR))? {
            res.add_sentiment(ScoredLexicon::load(path)?);
        }
        Ok(res)
    }

    /// Writes the bundle in the [`layout`] of [`Resources::load_dir`].
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let write = |path: PathBuf, content: String| -> Result<()> {
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::write(&path, content).map_err(|e| Error::io(&path, e))
        };
        let lex_text = |lex: &TermLexicon| {
            lex.entries().iter().map(|e| format!("{e}\n")).collect::<String>()
        };
        if let Some(l) = &self.medications {
            write(dir.join(layout::MEDICATIONS), lex_text(l))?;
        }
        if let Some(l) = &self.adr {
            write(dir.join(layout::ADR), lex_text(l))?;
        }
        if let Some(l) = &self.pronouns {
            write(dir.join(layout::PRONOUNS), lex_text(l))?;
        }
        for (name, t) in &self.embeddings {
            let mut rows: Vec<(&String, &usize)> = t.index.iter().collect();
            rows.sort_by_key(|(_, &r)| r);
            let mut s = String::new();
            for (term, &r) in rows {
                s.push_str(term);
                for v in &t.data[r * t.dim..(r + 1) * t.dim] {
                    s.push(' ');
                    s.push_str(&v.to_string());
                }
                s.push('\n');
            }
            write(dir.join(layout::EMBEDDINGS_DIR).join(format!("{name}.txt")), s)?;
        }
        for (name, m) in &self.clusters {
            let mut rows: Vec<_> = m.clusters.iter().collect();
            rows.sort();
            let s: String = rows.iter().map(|(t, c)| format!("{c}\t{t}\n")).collect();
            write(dir.join(layout::CLUSTERS_DIR).join(format!("{name}.txt")), s)?;
        }
        for (name, l) in &self.sentiment {
            let mut rows: Vec<_> = l.scores.iter().collect();
            rows.sort_by(|a, b| a.0.cmp(b.0));
            let s: String = rows.iter().map(|(t, v)| format!("{t}\t{v}\n")).collect();
            write(dir.join(layout::SENTIMENT_DIR).join(format!("{name}.tsv")), s)?;
        }
        Ok(())
    }
}

fn sorted_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    Ok(files)
}
