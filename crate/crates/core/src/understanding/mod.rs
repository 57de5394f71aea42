//! Time-aware structured frames: construction, serialization, intermediate
//! question generation and implicit constraint resolution.

mod extractor;
mod intermediate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use extractor::{expected_answer_type, relation_phrase, HttpExtractor, RuleExtractor};
pub use intermediate::{
    expand_generated, generate_intermediate, parse_generated, resolve_implicit, AnswerKind,
    HttpGenerator, IntermediateQuestion, Role, RuleGenerator, TraceStep, SPAN_VERBS,
};

use crate::error::{Error, Result};
use crate::store::EntityTable;
use crate::strategy::FrameExtractor;
use crate::tempex::{ConstraintForm, TempexParser};
use crate::temporal::{TemporalConstraint, TemporalSignal, TemporalValue, TimePoint};
use crate::text::Stopwords;

pub const TEMPORAL_ANSWER_TYPES: [&str; 3] = ["date", "time interval", "year"];

const FIELD_SEPARATOR: &str = "||";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Implicit,
    NonImplicit,
}

impl Category {
    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Implicit => "implicit",
            Category::NonImplicit => "non-implicit",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "implicit" => Ok(Category::Implicit),
            "non-implicit" | "non_implicit" | "explicit" => Ok(Category::NonImplicit),
            other => Err(Error::Format(format!("unknown temporal category `{other}`"))),
        }
    }
}

/// Shared read-only resources for frame extraction and generation.
#[derive(Debug, Clone, Copy)]
pub struct FrameContext<'a> {
    pub parser: &'a TempexParser,
    pub entities: &'a EntityTable,
    pub stopwords: &'a Stopwords,
}

/// The five slots a frame extractor fills.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSlots {
    pub entity_phrases: Vec<String>,
    pub relation_phrase: String,
    pub expected_answer_type: String,
    pub signal: TemporalSignal,
    pub category: Category,
}

impl FrameSlots {
    pub fn serialize(&self) -> String {
        [
            self.entity_phrases.join(", "),
            self.relation_phrase.clone(),
            self.expected_answer_type.clone(),
            self.signal.as_str().to_string(),
            self.category.as_str().to_string(),
        ]
        .join(FIELD_SEPARATOR)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.split(FIELD_SEPARATOR).collect();
        if fields.len() != 5 {
            return Err(Error::Format(format!(
                "expected 5 `||`-separated fields, found {}: `{s}`",
                fields.len()
            )));
        }
        let entity_phrases = fields[0]
            .split(", ")
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::to_string)
            .collect();
        let signal: TemporalSignal = fields[3].parse()?;
        let category: Category = fields[4].parse()?;
        if category == Category::Implicit && signal == TemporalSignal::None {
            return Err(Error::Format("implicit category requires a temporal signal".into()));
        }
        Ok(Self {
            entity_phrases,
            relation_phrase: fields[1].trim().to_string(),
            expected_answer_type: fields[2].trim().to_string(),
            signal,
            category,
        })
    }
}

/// Time-aware structured frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tsf {
    pub entity_phrases: Vec<String>,
    pub relation_phrase: String,
    pub expected_answer_type: String,
    pub signal: TemporalSignal,
    pub category: Category,
    pub temporal_values: Vec<TemporalValue>,
    pub reference_time: TimePoint,
}

impl Tsf {
    pub fn slots(&self) -> FrameSlots {
        FrameSlots {
            entity_phrases: self.entity_phrases.clone(),
            relation_phrase: self.relation_phrase.clone(),
            expected_answer_type: self.expected_answer_type.clone(),
            signal: self.signal,
            category: self.category,
        }
    }

    pub fn is_implicit(&self) -> bool {
        self.category == Category::Implicit
    }

    pub fn expects_temporal(&self) -> bool {
        TEMPORAL_ANSWER_TYPES.contains(&self.expected_answer_type.to_lowercase().as_str())
    }

    /// One constraint per temporal value; resolved values combine disjunctively.
    pub fn constraints(&self) -> Vec<TemporalConstraint> {
        if self.signal == TemporalSignal::None {
            return Vec::new();
        }
        self.temporal_values
            .iter()
            .filter_map(|v| TemporalConstraint::new(self.signal, *v).ok())
            .collect()
    }

    /// Which endpoint of an interval the frame asks for.
    pub fn role(&self) -> Role {
        Role::from_relation(&self.relation_phrase)
    }

    /// Entity phrases, relation and expected type, used for linking and scoring.
    pub fn query(&self) -> String {
        let mut parts: Vec<&str> = self.entity_phrases.iter().map(String::as_str).collect();
        parts.push(&self.relation_phrase);
        parts.push(&self.expected_answer_type);
        parts.retain(|p| !p.is_empty());
        parts.join(", ")
    }
}

impl fmt::Display for Tsf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_tsf(self))
    }
}

pub fn serialize_tsf(tsf: &Tsf) -> String {
    tsf.slots().serialize()
}

/// Parses the five serialized slots; temporal values are re-derived from the
/// relation phrase.
pub fn parse_tsf(s: &str, reference_time: TimePoint, parser: &TempexParser) -> Result<Tsf> {
    let slots = FrameSlots::parse(s)?;
    Ok(complete_frame(slots, &s_relation(s), reference_time, parser))
}

fn s_relation(s: &str) -> String {
    s.split(FIELD_SEPARATOR).nth(1).unwrap_or("").to_string()
}

/// Builds the frame for a question with the given extractor.
pub fn build_tsf(
    question: &str,
    reference_time: TimePoint,
    extractor: &dyn FrameExtractor,
    ctx: &FrameContext<'_>,
) -> Result<Tsf> {
    if question.trim().is_empty() {
        return Err(Error::Argument("question is empty".into()));
    }
    let slots = extractor.extract(question, ctx)?;
    if slots.entity_phrases.is_empty() {
        log::warn!("no question entity recognized in `{question}`");
    }
    Ok(complete_frame(slots, question, reference_time, ctx.parser))
}

/// Adds explicit temporal values found in `source` to extracted slots.
fn complete_frame(slots: FrameSlots, source: &str, reference_time: TimePoint, parser: &TempexParser) -> Tsf {
    let mut temporal_values = Vec::new();
    if slots.signal != TemporalSignal::None && slots.category == Category::NonImplicit {
        let mentions = parser.extract_mentions(source, reference_time);
        let detection = parser.detect_signal(source);
        let chosen = match detection.form {
            ConstraintForm::Explicit { mention } => {
                mentions.iter().find(|m| m.span == mention).or(mentions.first())
            }
            _ => mentions.first(),
        };
        if mentions.len() > 1 {
            log::info!("several temporal expressions in `{source}`; using the constrained one");
        }
        temporal_values.extend(chosen.map(|m| m.value));
    }
    Tsf {
        entity_phrases: slots.entity_phrases,
        relation_phrase: slots.relation_phrase,
        expected_answer_type: slots.expected_answer_type,
        signal: slots.signal,
        category: slots.category,
        temporal_values,
        reference_time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> Tsf {
        Tsf {
            entity_phrases: vec!["Queen".into()],
            relation_phrase: "Record company of in 1975".into(),
            expected_answer_type: "record company".into(),
            signal: TemporalSignal::Overlap,
            category: Category::NonImplicit,
            temporal_values: vec![TemporalValue::year(1975).unwrap()],
            reference_time: TimePoint::day(2023, 1, 1).unwrap(),
        }
    }

    #[test]
    fn serialize_and_parse() {
        let f = frame();
        let s = serialize_tsf(&f);
        assert_eq!(s, "Queen||Record company of in 1975||record company||overlap||non-implicit");
        let back = parse_tsf(&s, f.reference_time, &TempexParser::default()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn parse_rejects_wrong_arity() {
        let p = TempexParser::default();
        let r = TimePoint::day(2023, 1, 1).unwrap();
        assert!(matches!(parse_tsf("a||b||c||overlap", r, &p), Err(Error::Format(_))));
        assert!(matches!(parse_tsf("a||b||c||none||implicit", r, &p), Err(Error::Format(_))));
    }

    #[test]
    fn constraints_follow_values() {
        let mut f = frame();
        assert_eq!(f.constraints().len(), 1);
        f.signal = TemporalSignal::None;
        assert!(f.constraints().is_empty());
        assert!(!f.expects_temporal());
    }
}
