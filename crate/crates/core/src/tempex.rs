//! Rule-based temporal expression extraction and signal detection.
//!
//! Recognized point forms: `24 November 1991`, `25th of May 1533`,
//! `January 25, 1981`, `1991-11-24`, `August 1975`, bare four-digit years and
//! the deictic words `today`, `now`, `current(ly)` and `present`. Adjacent
//! points joined by a dash, `to`, `between .. and ..` or the KB qualifier
//! pattern `start time, A, end time, B` become intervals.

use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::temporal::{TemporalSignal, TemporalValue, TimePoint};
use crate::text;

/// Byte range into a UTF-8 string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn slice<'a>(&self, s: &'a str) -> &'a str {
        &s[self.start..self.end]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalMention {
    pub span: Span,
    pub surface: String,
    pub value: TemporalValue,
}

/// How the detected cue constrains the question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ConstraintForm {
    /// No constraint.
    Absent,
    /// The cue is followed by an explicit temporal expression.
    Explicit { mention: Span },
    /// The cue introduces a clause describing an event.
    Implicit { clause: Span },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalDetection {
    pub signal: TemporalSignal,
    pub cue_span: Option<Span>,
    pub form: ConstraintForm,
}

impl SignalDetection {
    pub fn none() -> Self {
        Self { signal: TemporalSignal::None, cue_span: None, form: ConstraintForm::Absent }
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self.form, ConstraintForm::Implicit { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cue {
    tokens: Vec<String>,
    signal: TemporalSignal,
}

/// Cue phrases mapped to temporal signals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CueLexicon {
    cues: Vec<Cue>,
}

/// Cues that only signal a constraint when an explicit expression follows
/// (`in 1975`, `on 25 May 1553`); on their own they are ordinary prepositions.
const PREPOSITIONAL_CUES: [&str; 2] = ["in", "on"];

/// Words allowed between a cue and its expression: `in the year 1982`.
const CUE_FILLERS: [&str; 2] = ["the", "year"];

impl Default for CueLexicon {
    fn default() -> Self {
        use TemporalSignal::*;
        let seed = [
            ("in", Overlap),
            ("on", Overlap),
            ("during", Overlap),
            ("when", Overlap),
            ("while", Overlap),
            ("at the time of", Overlap),
            ("before", Before),
            ("prior to", Before),
            ("until", Before),
            ("after", After),
            ("follows", After),
            ("since", After),
            ("next", After),
        ];
        CueLexicon::from_entries(seed.iter().map(|(c, s)| (c.to_string(), *s)))
    }
}

impl CueLexicon {
    pub fn from_entries<I: IntoIterator<Item = (String, TemporalSignal)>>(entries: I) -> Self {
        let mut cues: Vec<Cue> = entries
            .into_iter()
            .map(|(c, signal)| Cue { tokens: text::lower_tokens(&c), signal })
            .filter(|c| !c.tokens.is_empty())
            .collect();
        // longest cue wins at a position
        cues.sort_by(|a, b| b.tokens.len().cmp(&a.tokens.len()).then(a.tokens.cmp(&b.tokens)));
        cues.dedup_by(|a, b| a.tokens == b.tokens);
        Self { cues }
    }

    /// Parses `CUE<TAB>SIGNAL` lines. Blank lines and `#` comments are skipped.
    pub fn parse(raw: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in raw.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (cue, signal) = line.split_once('\t').ok_or_else(|| {
                Error::Format(format!("cue lexicon line {}: expected CUE<TAB>SIGNAL", n + 1))
            })?;
            let signal: TemporalSignal = signal.parse()?;
            if signal == TemporalSignal::None {
                return Err(Error::Format(format!(
                    "cue lexicon line {}: signal must be overlap, before or after",
                    n + 1
                )));
            }
            entries.push((cue.trim().to_string(), signal));
        }
        Ok(Self::from_entries(entries))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn len(&self) -> usize {
        self.cues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cues.is_empty()
    }

    /// Renders the lexicon back to its file format.
    pub fn to_file_format(&self) -> String {
        self.cues
            .iter()
            .map(|c| format!("{}\t{}\n", c.tokens.join(" "), c.signal))
            .collect()
    }

    pub fn contains_phrase(&self, phrase: &str) -> bool {
        let toks = text::lower_tokens(phrase);
        self.cues.iter().any(|c| c.tokens == toks)
    }
}

/// Result of removing the constraint phrase from a question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stripped {
    /// Question text without the temporal phrase, whitespace normalized.
    pub text: String,
    /// Byte ranges of the question kept in `text`.
    pub kept: Vec<Span>,
    /// Byte ranges removed (cue plus expression or clause).
    pub removed: Vec<Span>,
    /// The event clause of an implicit constraint.
    pub implicit_clause: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RawKind {
    Point(TimePoint),
    Deictic,
}

#[derive(Debug, Clone, Copy)]
struct RawPoint {
    span: Span,
    kind: RawKind,
}

const MONTHS: &str = r"january|february|march|april|may|june|july|august|september|october|november|december|jan|feb|mar|apr|jun|jul|aug|sept|sep|oct|nov|dec";

fn point_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        let pattern = format!(
            r"(?ix)
            \b(?P<dmy_d>\d{{1,2}})(?:st|nd|rd|th)?\s+(?:of\s+)?(?P<dmy_m>{m})\.?,?\s+(?P<dmy_y>\d{{4}})\b
            | \b(?P<mdy_m>{m})\.?\s+(?P<mdy_d>\d{{1,2}})(?:st|nd|rd|th)?,?\s+(?P<mdy_y>\d{{4}})\b
            | \b(?P<iso_y>\d{{4}})-(?P<iso_m>\d{{2}})-(?P<iso_d>\d{{2}})\b
            | \b(?P<my_m>{m})\.?,?\s+(?P<my_y>\d{{4}})\b
            | \b(?P<y>\d{{4}})\b
            | \b(?P<deictic>today|now|currently|current|present)\b
            ",
            m = MONTHS
        );
        Regex::new(&pattern).unwrap()
    })
}

fn month_number(name: &str) -> Option<u32> {
    let n = name.to_ascii_lowercase();
    let prefix = n.get(..3)?;
    let idx = [
        "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
    ]
    .iter()
    .position(|m| *m == prefix)?;
    Some(idx as u32 + 1)
}

fn connector_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\s*(?:–|—|-|to)\s*$").unwrap())
}

fn kb_range_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^,\s*end time,\s*$").unwrap())
}

fn between_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\bbetween\s+$").unwrap())
}

fn kb_start_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\bstart time,\s*$").unwrap())
}

/// Stateless rule engine for temporal expressions and signal cues.
#[derive(Debug, Clone)]
pub struct TempexParser {
    window: (i32, i32),
    lexicon: CueLexicon,
}

impl Default for TempexParser {
    fn default() -> Self {
        Self { window: (1000, 2100), lexicon: CueLexicon::default() }
    }
}

impl TempexParser {
    pub fn new(window: (i32, i32), lexicon: CueLexicon) -> Result<Self> {
        if window.0 > window.1 {
            return Err(Error::Config(format!(
                "plausibility window [{}, {}] is empty",
                window.0, window.1
            )));
        }
        Ok(Self { window, lexicon })
    }

    pub fn window(&self) -> (i32, i32) {
        self.window
    }

    pub fn lexicon(&self) -> &CueLexicon {
        &self.lexicon
    }

    fn in_window(&self, year: i32) -> bool {
        (self.window.0..=self.window.1).contains(&year)
    }

    fn point_from(&self, caps: &Captures<'_>) -> Option<RawKind> {
        let num = |name: &str| caps.name(name).and_then(|m| m.as_str().parse::<i64>().ok());
        let year = |name: &str| {
            num(name).and_then(|y| i32::try_from(y).ok()).filter(|y| self.in_window(*y))
        };
        let month = |name: &str| caps.name(name).and_then(|m| month_number(m.as_str()));
        let point = if caps.name("dmy_y").is_some() {
            TimePoint::day(year("dmy_y")?, month("dmy_m")?, num("dmy_d")? as u32)
        } else if caps.name("mdy_y").is_some() {
            TimePoint::day(year("mdy_y")?, month("mdy_m")?, num("mdy_d")? as u32)
        } else if caps.name("iso_y").is_some() {
            TimePoint::day(year("iso_y")?, num("iso_m")? as u32, num("iso_d")? as u32)
        } else if caps.name("my_y").is_some() {
            TimePoint::month(year("my_y")?, month("my_m")?)
        } else if caps.name("y").is_some() {
            TimePoint::year(year("y")?)
        } else {
            return caps.name("deictic").map(|_| RawKind::Deictic);
        };
        point.ok().map(RawKind::Point)
    }

    fn scan_points(&self, text: &str) -> Vec<RawPoint> {
        point_re()
            .captures_iter(text)
            .filter_map(|caps| {
                let m = caps.get(0)?;
                let kind = self.point_from(&caps)?;
                Some(RawPoint { span: Span::new(m.start(), m.end()), kind })
            })
            .collect()
    }

    /// Spans of all temporal expressions, without resolving their values.
    pub fn mention_spans(&self, text: &str) -> Vec<Span> {
        self.group(text).into_iter().map(|(span, _, _)| span).collect()
    }

    fn group(&self, text: &str) -> Vec<(Span, RawPoint, Option<RawPoint>)> {
        let points = self.scan_points(text);
        let mut out = Vec::new();
        let mut i = 0;
        while i < points.len() {
            let a = points[i];
            if let Some(&b) = points.get(i + 1) {
                let gap = &text[a.span.end..b.span.start];
                let before = &text[..a.span.start];
                let between = between_re().find(before).filter(|_| {
                    gap.trim().eq_ignore_ascii_case("and")
                });
                let kb_pair = kb_range_re().is_match(gap) && kb_start_re().is_match(before);
                if connector_re().is_match(gap) || between.is_some() || kb_pair {
                    let start = between.map(|m| m.start()).unwrap_or(a.span.start);
                    out.push((Span::new(start, b.span.end), a, Some(b)));
                    i += 2;
                    continue;
                }
            }
            out.push((a.span, a, None));
            i += 1;
        }
        out
    }

    pub fn extract_mentions(&self, text: &str, reference_time: TimePoint) -> Vec<TemporalMention> {
        let resolve = |k: RawKind| match k {
            RawKind::Point(p) => p,
            RawKind::Deictic => reference_time,
        };
        let mut out = Vec::new();
        for (span, a, b) in self.group(text) {
            match b {
                Some(b) => match TemporalValue::interval(resolve(a.kind), resolve(b.kind)) {
                    Ok(value) => out.push(TemporalMention {
                        span,
                        surface: span.slice(text).to_string(),
                        value,
                    }),
                    // reversed ranges fall back to their endpoints
                    Err(_) => {
                        for p in [a, b] {
                            out.push(TemporalMention {
                                span: p.span,
                                surface: p.span.slice(text).to_string(),
                                value: resolve(p.kind).into(),
                            });
                        }
                    }
                },
                None => out.push(TemporalMention {
                    span,
                    surface: span.slice(text).to_string(),
                    value: resolve(a.kind).into(),
                }),
            }
        }
        out
    }

    /// Finds the first cue that constrains the question, scanning left to right.
    pub fn detect_signal(&self, question: &str) -> SignalDetection {
        let toks = text::tokens(question);
        let lower: Vec<String> = toks.iter().map(|t| t.text.to_lowercase()).collect();
        let mentions = self.mention_spans(question);
        let clause_end = sentence_body_end(question);

        for i in 0..toks.len() {
            for cue in &self.lexicon.cues {
                let n = cue.tokens.len();
                if i + n > toks.len() || lower[i..i + n] != cue.tokens[..] {
                    continue;
                }
                let cue_span = Span::new(toks[i].start, toks[i + n - 1].end);
                // a sentence-initial "when" asks for a date
                if i == 0 && cue.tokens == ["when"] {
                    continue;
                }
                let mut j = i + n;
                while j < toks.len() && CUE_FILLERS.contains(&lower[j].as_str()) {
                    j += 1;
                }
                if let Some(m) = toks
                    .get(j)
                    .and_then(|t| mentions.iter().find(|m| m.start == t.start))
                {
                    return SignalDetection {
                        signal: cue.signal,
                        cue_span: Some(cue_span),
                        form: ConstraintForm::Explicit { mention: *m },
                    };
                }
                if n == 1 && PREPOSITIONAL_CUES.contains(&cue.tokens[0].as_str()) {
                    continue;
                }
                let end = if i == 0 {
                    question[cue_span.end..]
                        .find(',')
                        .map(|p| cue_span.end + p)
                        .unwrap_or(clause_end)
                        .min(clause_end)
                } else {
                    clause_end
                };
                if let Some(clause) = trim_span(question, Span::new(cue_span.end.min(end), end)) {
                    return SignalDetection {
                        signal: cue.signal,
                        cue_span: Some(cue_span),
                        form: ConstraintForm::Implicit { clause },
                    };
                }
            }
        }
        SignalDetection::none()
    }

    /// Removes the cue together with its expression or clause.
    pub fn strip_temporal(
        &self,
        question: &str,
        _mentions: &[TemporalMention],
        detection: &SignalDetection,
    ) -> Stripped {
        let (removed, implicit_clause) = match (detection.cue_span, detection.form) {
            (Some(cue), ConstraintForm::Explicit { mention }) => {
                (Some(Span::new(cue.start, mention.end)), None)
            }
            (Some(cue), ConstraintForm::Implicit { clause }) => {
                let mut end = clause.end;
                // drop the comma closing a fronted clause
                let rest = &question[end..];
                let trimmed = rest.trim_start();
                if cue.start == first_token_start(question) && trimmed.starts_with(',') {
                    end += rest.len() - trimmed.len() + 1;
                }
                (
                    Some(Span::new(cue.start, end)),
                    Some(clause.slice(question).to_string()),
                )
            }
            _ => (None, None),
        };
        let (kept, removed) = match removed {
            Some(r) => {
                let mut kept = Vec::new();
                if r.start > 0 {
                    kept.push(Span::new(0, r.start));
                }
                if r.end < question.len() {
                    kept.push(Span::new(r.end, question.len()));
                }
                (kept, vec![r])
            }
            None => (vec![Span::new(0, question.len())], Vec::new()),
        };
        let joined: String = kept.iter().map(|s| s.slice(question)).collect::<Vec<_>>().join(" ");
        let text = if removed.is_empty() { question.to_string() } else { tidy(&joined) };
        Stripped { text, kept, removed, implicit_clause }
    }
}

impl fmt::Display for TemporalMention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.surface, self.value)
    }
}

fn first_token_start(s: &str) -> usize {
    text::tokens(s).first().map(|t| t.start).unwrap_or(0)
}

/// End of the sentence body, before trailing `?`, `.` or `!`.
fn sentence_body_end(s: &str) -> usize {
    s.trim_end().trim_end_matches(['?', '.', '!']).trim_end().len()
}

fn trim_span(s: &str, span: Span) -> Option<Span> {
    let slice = span.slice(s);
    let lead = slice.len() - slice.trim_start_matches(|c: char| c.is_whitespace() || c == ',').len();
    let body = slice.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    let body = body.trim_end_matches(|c: char| c.is_whitespace() || c == ',');
    if text::tokens(body).is_empty() {
        return None;
    }
    Some(Span::new(span.start + lead, span.start + lead + body.len()))
}

/// Collapses whitespace and repairs punctuation left behind by a removal.
pub fn tidy(s: &str) -> String {
    static SPACE_PUNCT: OnceLock<Regex> = OnceLock::new();
    static COMMA_RUN: OnceLock<Regex> = OnceLock::new();
    static COMMA_END: OnceLock<Regex> = OnceLock::new();
    let mut out = text::collapse_whitespace(s);
    let space_punct = SPACE_PUNCT.get_or_init(|| Regex::new(r"\s+([,?.!])").unwrap());
    let comma_run = COMMA_RUN.get_or_init(|| Regex::new(r",(\s*,)+").unwrap());
    let comma_end = COMMA_END.get_or_init(|| Regex::new(r",\s*([?.!]|$)").unwrap());
    out = space_punct.replace_all(&out, "$1").into_owned();
    out = comma_run.replace_all(&out, ",").into_owned();
    out = comma_end.replace_all(&out, "$1").into_owned();
    out.trim_start_matches([',', ' ']).trim().to_string()
}
