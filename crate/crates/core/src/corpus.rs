//! Labeled tweet corpora: TSV loading, near-duplicate removal and class bookkeeping.
//!
//! The interchange format is one tweet per line, tab separated, no quoting:
//!
//! ```text
//! id<TAB>label<TAB>text     (labeled)
//! id<TAB>text               (unlabeled)
//! ```
//!
//! Tabs inside a tweet must be written as the two characters `\t`; they are
//! turned back into a tab on load. LF and CRLF line endings are accepted.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use patterns::{MENTION_RE, URL_RE};

use crate::error::{Error, Result};

/// Integer class identifier (`{0, 1}` for ADR detection, `{1, 2, 3}` for intake).
pub type ClassId = i32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    pub label: Option<ClassId>,
}

impl Tweet {
    pub fn labeled(id: impl Into<String>, label: ClassId, text: impl Into<String>) -> Self {
        Tweet {
            id: id.into(),
            text: text.into(),
            label: Some(label),
        }
    }

    pub fn unlabeled(id: impl Into<String>, text: impl Into<String>) -> Self {
        Tweet {
            id: id.into(),
            text: text.into(),
            label: None,
        }
    }
}

/// An ordered collection of tweets over a declared label domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    tweets: Vec<Tweet>,
    label_domain: BTreeSet<ClassId>,
}

/// Per-class instance counts. Every class of the label domain has an entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts {
    pub counts: BTreeMap<ClassId, usize>,
    pub total: usize,
}

impl ClassCounts {
    pub fn get(&self, class: ClassId) -> usize {
        self.counts.get(&class).copied().unwrap_or(0)
    }
}

impl std::fmt::Display for ClassCounts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(c, n)| format!("{c}:{n}"))
            .collect();
        write!(f, "{} (total {})", parts.join(" "), self.total)
    }
}

impl Dataset {
    /// Builds a dataset, checking every tweet against the label domain.
    pub fn new(
        tweets: Vec<Tweet>,
        label_domain: impl IntoIterator<Item = ClassId>,
    ) -> Result<Self> {
        let label_domain: BTreeSet<ClassId> = label_domain.into_iter().collect();
        for t in &tweets {
            check_tweet(t, &label_domain)?;
        }
        Ok(Dataset {
            tweets,
            label_domain,
        })
    }

    pub fn empty(label_domain: impl IntoIterator<Item = ClassId>) -> Self {
        Dataset {
            tweets: Vec::new(),
            label_domain: label_domain.into_iter().collect(),
        }
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn label_domain(&self) -> &BTreeSet<ClassId> {
        &self.label_domain
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Tweet> {
        self.tweets.iter()
    }

    /// Labels of all tweets; fails on the first unlabeled tweet.
    pub fn labels(&self) -> Result<Vec<ClassId>> {
        self.tweets
            .iter()
            .map(|t| t.label.ok_or_else(|| Error::Unlabeled(t.id.clone())))
            .collect()
    }

    /// The tweets at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            tweets: indices.iter().map(|&i| self.tweets[i].clone()).collect(),
            label_domain: self.label_domain.clone(),
        }
    }

    /// Concatenation of `self` and `other`; the label domains must agree.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.label_domain != other.label_domain {
            return Err(Error::Invalid(format!(
                "cannot combine datasets with label domains {:?} and {:?}",
                self.label_domain, other.label_domain
            )));
        }
        let mut tweets = self.tweets.clone();
        tweets.extend(other.tweets.iter().cloned());
        Ok(Dataset {
            tweets,
            label_domain: self.label_domain.clone(),
        })
    }

    pub fn class_counts(&self) -> Result<ClassCounts> {
        class_counts(self)
    }

    /// Indices of the tweets with the given label.
    pub fn indices_of(&self, class: ClassId) -> Vec<usize> {
        self.tweets
            .iter()
            .enumerate()
            .filter(|(_, t)| t.label == Some(class))
            .map(|(i, _)| i)
            .collect()
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Tweet;
    type IntoIter = std::slice::Iter<'a, Tweet>;

    fn into_iter(self) -> Self::IntoIter {
        self.tweets.iter()
    }
}

fn check_tweet(t: &Tweet, domain: &BTreeSet<ClassId>) -> Result<()> {
    if t.text.trim().is_empty() {
        return Err(Error::Invalid(format!("tweet {} has empty text", t.id)));
    }
    if let Some(label) = t.label {
        if !domain.contains(&label) {
            return Err(Error::LabelOutOfDomain {
                label,
                domain: domain.iter().copied().collect(),
            });
        }
    }
    Ok(())
}

/// Reads a TSV corpus from disk. See [`parse_tsv`] for the format rules.
pub fn load_tsv(
    path: impl AsRef<Path>,
    label_domain: &[ClassId],
    labeled: bool,
) -> Result<Dataset> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tsv(&content, &path.display().to_string(), label_domain, labeled)
}

/// Parses TSV text. Blank lines are skipped; line numbers in errors are 1-based.
pub fn parse_tsv(
    content: &str,
    context: &str,
    label_domain: &[ClassId],
    labeled: bool,
) -> Result<Dataset> {
    let domain: BTreeSet<ClassId> = label_domain.iter().copied().collect();
    let mut tweets = Vec::new();
    for (idx, raw) in content.split('\n').enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        let tweet = if labeled {
            let mut parts = line.splitn(3, '\t');
            let (id, label, text) = match (parts.next(), parts.next(), parts.next()) {
                (Some(id), Some(label), Some(text)) => (id, label, text),
                _ => {
                    return Err(Error::parse(
                        context,
                        lineno,
                        "expected id<TAB>label<TAB>text",
                    ))
                }
            };
            let label: ClassId = label.trim().parse().map_err(|_| {
                Error::parse(context, lineno, format!("label {label:?} is not an integer"))
            })?;
            if !domain.contains(&label) {
                return Err(Error::parse(
                    context,
                    lineno,
                    format!("label {label} is outside the label domain {domain:?}"),
                ));
            }
            Tweet::labeled(id, label, unescape(text))
        } else {
            let (id, text) = line.split_once('\t').ok_or_else(|| {
                Error::parse(context, lineno, "expected id<TAB>text")
            })?;
            Tweet::unlabeled(id, unescape(text))
        };
        if tweet.id.is_empty() {
            return Err(Error::parse(context, lineno, "empty id"));
        }
        if tweet.text.trim().is_empty() {
            return Err(Error::parse(context, lineno, "empty text"));
        }
        tweets.push(tweet);
    }
    Ok(Dataset {
        tweets,
        label_domain: domain,
    })
}

fn unescape(text: &str) -> String {
    text.replace("\\t", "\t")
}

fn escape(text: &str) -> String {
    text.replace('\t', "\\t").replace(['\n', '\r'], " ")
}

/// Serializes a dataset in the same TSV format [`parse_tsv`] reads.
pub fn to_tsv(d: &Dataset) -> String {
    let mut out = String::new();
    for t in d {
        match t.label {
            Some(l) => out.push_str(&format!("{}\t{}\t{}\n", t.id, l, escape(&t.text))),
            None => out.push_str(&format!("{}\t{}\n", t.id, escape(&t.text))),
        }
    }
    out
}

/// Grouping key for near-duplicate detection: lowercase, drop @mentions, URLs and
/// punctuation, collapse whitespace.
pub fn near_duplicate_key(text: &str) -> String {
    let lower = text.to_lowercase();
    let no_urls = URL_RE.replace_all(&lower, " ");
    let no_mentions = MENTION_RE.replace_all(&no_urls, "$pre ");
    let stripped: String = no_mentions
        .chars()
        .map(|c| if is_punctuation(c) { ' ' } else { c })
        .collect();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{2018}'..='\u{201F}' | '\u{2010}'..='\u{2015}' | '\u{2026}' | '\u{00A1}' | '\u{00BF}'
                | '\u{00AB}' | '\u{00BB}'
        )
}

/// Keeps the first tweet of every near-duplicate group, and the first tweet of
/// every id, preserving order.
pub fn near_duplicate_filter(d: &Dataset) -> Dataset {
    let mut seen_keys = HashSet::new();
    let mut seen_ids = HashSet::new();
    let tweets = d
        .tweets
        .iter()
        .filter(|t| {
            let key = near_duplicate_key(&t.text);
            if seen_ids.contains(t.id.as_str()) || seen_keys.contains(&key) {
                return false;
            }
            seen_ids.insert(t.id.as_str());
            seen_keys.insert(key);
            true
        })
        .cloned()
        .collect();
    Dataset {
        tweets,
        label_domain: d.label_domain.clone(),
    }
}

pub fn class_counts(d: &Dataset) -> Result<ClassCounts> {
    let mut counts: BTreeMap<ClassId, usize> =
        d.label_domain.iter().map(|&c| (c, 0)).collect();
    for t in &d.tweets {
        let label = t.label.ok_or_else(|| Error::Unlabeled(t.id.clone()))?;
        *counts.entry(label).or_insert(0) += 1;
    }
    Ok(ClassCounts {
        counts,
        total: d.tweets.len(),
    })
}

mod patterns {
    use std::sync::LazyLock;

    use regex::Regex;

    pub static URL_RE: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S+").unwrap());
    pub static MENTION_RE: LazyLock<Regex> =
        LazyLock::new(|| Regex::new(r"(?P<pre>^|[^\w@])@\w+").unwrap());
}
