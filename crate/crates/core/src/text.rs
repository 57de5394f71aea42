//! Tokenization, stopwords and light stemming shared by scoring, ranking,
//! verification and the benchmark forge.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use crate::error::Result;

/// Default English function-word list (50 entries).
pub const DEFAULT_STOPWORDS: [&str; 50] = [
    "a", "an", "the", "of", "in", "on", "at", "to", "for", "with", "by", "from", "and", "or",
    "is", "was", "are", "were", "be", "been", "did", "does", "do", "has", "have", "had", "what",
    "which", "who", "whom", "when", "where", "why", "how", "that", "this", "it", "its", "as",
    "into", "their", "his", "her", "he", "she", "they", "not", "s", "than", "then",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
    pub end: usize,
}

fn word_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\p{L}\p{N}]+").unwrap())
}

/// Word tokens with byte spans. Apostrophes and punctuation separate tokens,
/// so `Queen's` yields `Queen` and `s`.
pub fn tokens(text: &str) -> Vec<Token<'_>> {
    word_re()
        .find_iter(text)
        .map(|m| Token { text: m.as_str(), start: m.start(), end: m.end() })
        .collect()
}

pub fn lower_tokens(text: &str) -> Vec<String> {
    tokens(text).iter().map(|t| t.text.to_lowercase()).collect()
}

pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords(BTreeSet<String>);

impl Default for Stopwords {
    fn default() -> Self {
        Stopwords(DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect())
    }
}

impl Stopwords {
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Stopwords(
            words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        )
    }

    /// One word per line; `#` starts a comment line.
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        Ok(Self::from_words(
            raw.lines().filter(|l| !l.trim_start().starts_with('#')),
        ))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Lowercased content tokens of `text`, deduplicated.
    pub fn content_tokens(&self, text: &str) -> BTreeSet<String> {
        lower_tokens(text)
            .into_iter()
            .filter(|t| !self.contains(t))
            .collect()
    }
}

/// Suffix-stripping stemmer. Repeatedly removes common inflectional and
/// derivational endings while at least three characters remain.
pub fn stem(word: &str) -> String {
    const SUFFIXES: [(&str, &str); 12] = [
        ("ies", "i"),
        ("ial", ""),
        ("ing", ""),
        ("ers", ""),
        ("ed", ""),
        ("er", ""),
        ("es", ""),
        ("ly", ""),
        ("al", ""),
        ("e", ""),
        ("s", ""),
        ("y", "i"),
    ];
    let mut w = word.to_lowercase();
    loop {
        let before = w.len();
        for (suffix, repl) in SUFFIXES {
            if w.ends_with(suffix) && w.chars().count() - suffix.chars().count() >= 3 {
                w.truncate(w.len() - suffix.len());
                w.push_str(repl);
                break;
            }
        }
        if w.len() == before {
            return w;
        }
    }
}

pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Case-insensitive phrase search on token boundaries.
pub fn contains_phrase(haystack: &str, phrase: &str) -> bool {
    let needle = lower_tokens(phrase);
    if needle.is_empty() {
        return false;
    }
    let hay = lower_tokens(haystack);
    hay.windows(needle.len()).any(|w| w == needle.as_slice())
}
