//! Text preprocessing: URL/mention normalization, a Twitter-aware tokenizer,
//! negation scoping and the Porter stemmer.

mod porter;
mod tokenize;

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};

pub use porter::porter_stem;
pub use tokenize::{tokenize, tokenize_with};

pub const URL_PLACEHOLDER: &str = "http://someurl";
pub const USER_PLACEHOLDER: &str = "@username";

/// Suffix appended to the rendered form of a token inside a negation scope.
pub const NEG_SUFFIX: &str = "_NEG";

static URL_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?i)(?:https?://|www\.)\S*[^\s.,;:!?)\]"'…]"#).unwrap()
});
static MENTION_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?P<pre>^|[^\w@])@\w+").unwrap());

/// Replaces every URL with `http://someurl` and every user mention with `@username`.
pub fn normalize(text: &str) -> String {
    let urls = URL_RE.replace_all(text, URL_PLACEHOLDER);
    MENTION_RE
        .replace_all(&urls, format!("${{pre}}{USER_PLACEHOLDER}").as_str())
        .into_owned()
}

/// One token of a tweet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Current form of the token; case preserved, may be a `<MED>`/`<ADR>` placeholder.
    pub text: String,
    /// The text this token was produced from (the whole span for placeholders).
    pub surface: String,
    pub negated: bool,
    /// True for tokens produced by domain generalization.
    pub placeholder: bool,
}

impl Token {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        Token {
            surface: text.clone(),
            text,
            negated: false,
            placeholder: false,
        }
    }

    pub fn lower(&self) -> String {
        if self.placeholder {
            self.text.clone()
        } else {
            self.text.to_lowercase()
        }
    }

    /// Lowercased form with `_NEG` appended inside a negation scope.
    pub fn rendered(&self) -> String {
        let mut s = self.lower();
        if self.negated {
            s.push_str(NEG_SUFFIX);
        }
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSequence {
    tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn new(tokens: Vec<Token>) -> Self {
        TokenSequence { tokens }
    }

    /// Convenience constructor for already-tokenized text.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Self {
        TokenSequence {
            tokens: words.iter().map(|w| Token::new(w.as_ref())).collect(),
        }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.tokens.iter()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    pub fn rendered(&self) -> Vec<String> {
        self.tokens.iter().map(Token::rendered).collect()
    }
}

/// Parses a one-entry-per-line list; blank lines and lines starting with `#` are skipped.
pub fn parse_list(content: &str) -> Vec<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

fn read_list(path: &Path) -> Result<Vec<String>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_list(&content))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Negators {
    words: HashSet<String>,
}

static DEFAULT_NEGATORS: LazyLock<Negators> =
    LazyLock::new(|| Negators::from_list(parse_list(include_str!("../../data/negators.txt"))));

impl Negators {
    pub fn from_list<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Negators {
            words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::from_list(read_list(path.as_ref())?))
    }

    /// Whether `token` is a negator: a listed word or any `n't` form.
    pub fn is_negator(&self, token: &str) -> bool {
        let lower = token.to_lowercase();
        self.words.contains(&lower) || lower.ends_with("n't") || lower.ends_with("n\u{2019}t")
    }
}

impl Default for Negators {
    fn default() -> Self {
        DEFAULT_NEGATORS.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emoticons {
    positive: HashSet<String>,
    negative: HashSet<String>,
}

static DEFAULT_EMOTICONS: LazyLock<Emoticons> = LazyLock::new(|| Emoticons {
    positive: parse_list(include_str!("../../data/emoticons_positive.txt"))
        .into_iter()
        .collect(),
    negative: parse_list(include_str!("../../data/emoticons_negative.txt"))
        .into_iter()
        .collect(),
});

impl Emoticons {
    pub fn new<I: IntoIterator<Item = String>>(positive: I, negative: I) -> Self {
        Emoticons {
            positive: positive.into_iter().collect(),
            negative: negative.into_iter().collect(),
        }
    }

    pub fn load(positive: impl AsRef<Path>, negative: impl AsRef<Path>) -> Result<Self> {
        Ok(Emoticons::new(
            read_list(positive.as_ref())?,
            read_list(negative.as_ref())?,
        ))
    }

    pub fn is_positive(&self, token: &str) -> bool {
        self.positive.contains(token)
    }

    pub fn is_negative(&self, token: &str) -> bool {
        self.negative.contains(token)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.is_positive(token) || self.is_negative(token)
    }
}

impl Default for Emoticons {
    fn default() -> Self {
        DEFAULT_EMOTICONS.clone()
    }
}

/// Characters that close a negation scope.
pub fn closes_negation_scope(token: &str) -> bool {
    token
        .chars()
        .any(|c| matches!(c, '.' | ',' | ':' | ';' | '!' | '?' | '(' | ')' | '[' | ']' | '"'))
}

/// Marks every token after a negator, up to the next token containing a
/// scope-closing punctuation character. Negators themselves stay unmarked.
pub fn mark_negation(seq: &TokenSequence, negators: &Negators) -> TokenSequence {
    let mut in_scope = false;
    let tokens = seq
        .tokens
        .iter()
        .map(|t| {
            let mut t = t.clone();
            if closes_negation_scope(&t.text) {
                in_scope = false;
                t.negated = false;
            } else if negators.is_negator(&t.text) {
                in_scope = true;
                t.negated = false;
            } else {
                t.negated = in_scope;
            }
            t
        })
        .collect();
    TokenSequence { tokens }
}
