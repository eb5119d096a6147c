//! Individual feature groups. Each function is pure; names carry a group
//! prefix except plain word n-grams and the bare non-contiguous bodies, which
//! [`super::Extractor`] prefixes when interning.

use std::collections::BTreeSet;

use crate::resources::{match_phrases, ClusterMap, EmbeddingTable, ScoredLexicon, TermLexicon};
use crate::textprep::{porter_stem, Emoticons, Negators, Token, TokenSequence};

pub const MED_PLACEHOLDER: &str = "<MED>";
pub const ADR_PLACEHOLDER: &str = "<ADR>";

fn ngrams_of(tokens: &[String], n_max: usize, out: &mut BTreeSet<String>) {
    for n in 1..=n_max.min(tokens.len()) {
        for w in tokens.windows(n) {
            out.insert(w.join(" "));
        }
    }
}

fn noncontig_of(tokens: &[String], n_max: usize, out: &mut BTreeSet<String>) {
    for n in 3..=n_max.min(tokens.len()) {
        for w in tokens.windows(n) {
            for star in 1..n - 1 {
                let parts: Vec<&str> = w
                    .iter()
                    .enumerate()
                    .map(|(i, t)| if i == star { "*" } else { t.as_str() })
                    .collect();
                out.insert(parts.join(" "));
            }
        }
    }
}

/// Distinct lowercased word n-grams, `1 <= n <= n_max`, with `_NEG` marks.
pub fn word_ngrams(seq: &TokenSequence, n_max: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    ngrams_of(&seq.rendered(), n_max, &mut out);
    out
}

/// Contiguous n-grams, `3 <= n <= n_max`, with one interior token replaced by `*`.
pub fn noncontig_ngrams(seq: &TokenSequence, n_max: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    noncontig_of(&seq.rendered(), n_max, &mut out);
    out
}

/// Character n-grams within each lowercased token, prefixed `c:`.
pub fn char_ngrams(seq: &TokenSequence, n_max: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for t in seq.iter() {
        let chars: Vec<char> = t.lower().chars().collect();
        for n in 1..=n_max.min(chars.len()) {
            for w in chars.windows(n) {
                let mut name = String::from("c:");
                name.extend(w);
                out.insert(name);
            }
        }
    }
    out
}

/// Distinct Porter stems of the lowercased tokens, prefixed `s:`.
pub fn stem_unigrams(seq: &TokenSequence) -> BTreeSet<String> {
    seq.iter()
        .map(|t| format!("s:{}", porter_stem(&t.lower())))
        .collect()
}

/// Component-wise sum of the in-vocabulary token vectors.
pub fn embedding_sum(seq: &TokenSequence, table: &EmbeddingTable) -> Vec<f64> {
    let mut sum = vec![0.0; table.dim()];
    for t in seq.iter() {
        if let Some(v) = table.get(&t.text) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
        }
    }
    sum
}

pub(crate) fn cluster_ids<'a>(seq: &TokenSequence, map: &'a ClusterMap) -> BTreeSet<&'a str> {
    seq.iter().filter_map(|t| map.cluster(&t.text)).collect()
}

/// One `cl:<id>` name per distinct cluster hit.
pub fn cluster_presence(seq: &TokenSequence, map: &ClusterMap) -> BTreeSet<String> {
    cluster_ids(seq, map)
        .into_iter()
        .map(|c| format!("cl:{c}"))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TwitterFeatures {
    pub allcaps: usize,
    pub hashtags: usize,
    pub positive_emoticon: bool,
    pub negative_emoticon: bool,
    pub last_positive_emoticon: bool,
    pub last_negative_emoticon: bool,
    pub elongated: usize,
}

impl TwitterFeatures {
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("tw:allcaps", self.allcaps as f64),
            ("tw:hashtags", self.hashtags as f64),
            ("tw:emoticon_pos", f64::from(u8::from(self.positive_emoticon))),
            ("tw:emoticon_neg", f64::from(u8::from(self.negative_emoticon))),
            ("tw:last_emoticon_pos", f64::from(u8::from(self.last_positive_emoticon))),
            ("tw:last_emoticon_neg", f64::from(u8::from(self.last_negative_emoticon))),
            ("tw:elongated", self.elongated as f64),
        ]
    }
}

fn is_allcaps(token: &str) -> bool {
    let letters: Vec<char> = token.chars().filter(|c| c.is_alphabetic()).collect();
    letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase())
}

fn is_elongated(token: &str) -> bool {
    let chars: Vec<char> = token.chars().collect();
    chars
        .windows(3)
        .any(|w| w[0].is_alphabetic() && w[0] == w[1] && w[1] == w[2])
}

pub fn twitter_features(seq: &TokenSequence, emoticons: &Emoticons) -> TwitterFeatures {
    let tokens: Vec<&Token> = seq.iter().filter(|t| !t.placeholder).collect();
    let last = tokens.last().map(|t| t.text.as_str());
    TwitterFeatures {
        allcaps: tokens.iter().filter(|t| is_allcaps(&t.text)).count(),
        hashtags: tokens
            .iter()
            .filter(|t| t.text.len() > 1 && t.text.starts_with('#'))
            .count(),
        positive_emoticon: tokens.iter().any(|t| emoticons.is_positive(&t.text)),
        negative_emoticon: tokens.iter().any(|t| emoticons.is_negative(&t.text)),
        last_positive_emoticon: last.is_some_and(|t| emoticons.is_positive(t)),
        last_negative_emoticon: last.is_some_and(|t| emoticons.is_negative(t)),
        elongated: tokens.iter().filter(|t| is_elongated(&t.text)).count(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PunctuationFeatures {
    pub exclamation: bool,
    pub question: bool,
    pub last_exclamation: bool,
    pub last_question: bool,
}

impl PunctuationFeatures {
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        let b = |x: bool| f64::from(u8::from(x));
        vec![
            ("pu:excl", b(self.exclamation)),
            ("pu:quest", b(self.question)),
            ("pu:last_excl", b(self.last_exclamation)),
            ("pu:last_quest", b(self.last_question)),
        ]
    }
}

pub fn punctuation_features(seq: &TokenSequence) -> PunctuationFeatures {
    let last = seq.tokens().last().map(|t| t.text.as_str()).unwrap_or("");
    PunctuationFeatures {
        exclamation: seq.iter().any(|t| t.text.contains('!')),
        question: seq.iter().any(|t| t.text.contains('?')),
        last_exclamation: last.contains('!'),
        last_question: last.contains('?'),
    }
}

/// Whether any token is a negator.
pub fn has_negator(seq: &TokenSequence, negators: &Negators) -> bool {
    seq.iter().any(|t| negators.is_negator(&t.text))
}

fn replace_spans(seq: &TokenSequence, lex: &TermLexicon, placeholder: &str) -> TokenSequence {
    let spans = match_phrases(seq.tokens(), lex);
    let tokens = seq.tokens();
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    for (start, len) in spans {
        out.extend_from_slice(&tokens[i..start]);
        let span = &tokens[start..start + len];
        out.push(Token {
            text: placeholder.to_owned(),
            surface: span
                .iter()
                .map(|t| t.surface.as_str())
                .collect::<Vec<_>>()
                .join(" "),
            negated: span.iter().any(|t| t.negated),
            placeholder: true,
        });
        i = start + len;
    }
    out.extend_from_slice(&tokens[i..]);
    TokenSequence::new(out)
}

/// Replaces medication spans with `<MED>`, then ADR spans among the remaining
/// tokens with `<ADR>`. A placeholder is negated if any token it replaces was.
pub fn domain_generalize(
    seq: &TokenSequence,
    medications: &TermLexicon,
    adr: &TermLexicon,
) -> TokenSequence {
    let with_med = replace_spans(seq, medications, MED_PLACEHOLDER);
    replace_spans(&with_med, adr, ADR_PLACEHOLDER)
}

/// N-grams over a generalized sequence: contiguous as `g:`, non-contiguous as `gnc:`.
pub fn domain_ngrams(
    generalized: &TokenSequence,
    ngram_max: usize,
    noncontig_max: usize,
) -> BTreeSet<String> {
    let rendered = generalized.rendered();
    let mut contig = BTreeSet::new();
    ngrams_of(&rendered, ngram_max, &mut contig);
    let mut noncontig = BTreeSet::new();
    noncontig_of(&rendered, noncontig_max, &mut noncontig);
    contig
        .into_iter()
        .map(|n| format!("g:{n}"))
        .chain(noncontig.into_iter().map(|n| format!("gnc:{n}")))
        .collect()
}

/// Number of tokens whose lowercased form is in the pronoun lexicon.
pub fn pronoun_count(seq: &TokenSequence, pronouns: &TermLexicon) -> usize {
    seq.iter()
        .filter(|t| !t.placeholder && pronouns.contains_tokens(&[t.lower().as_str()]))
        .count()
}

/// `adr:count` (number of matched spans) and `adr:any`.
pub fn adr_lexicon_feature(seq: &TokenSequence, adr: &TermLexicon) -> Vec<(&'static str, f64)> {
    let n = match_phrases(seq.tokens(), adr).len();
    if n == 0 {
        return Vec::new();
    }
    vec![("adr:count", n as f64), ("adr:any", 1.0)]
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SentimentFeatures {
    /// Tokens with a nonzero score.
    pub count: usize,
    pub total: f64,
    /// Maximum over in-lexicon tokens; `None` when no token is in the lexicon.
    pub max: Option<f64>,
    /// Score of the last token, 0 when it is not in the lexicon.
    pub last: f64,
}

pub fn sentiment_features(seq: &TokenSequence, lex: &ScoredLexicon) -> SentimentFeatures {
    let scores: Vec<Option<f64>> = seq.iter().map(|t| lex.score(&t.lower())).collect();
    SentimentFeatures {
        count: scores.iter().filter(|s| matches!(s, Some(v) if *v != 0.0)).count(),
        total: scores.iter().flatten().sum(),
        max: scores.iter().flatten().copied().reduce(f64::max),
        last: scores.last().copied().flatten().unwrap_or(0.0),
    }
}
