use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{FrameContext, Tsf};
use crate::answering::{AnswerValue, QAResult};
use crate::error::{Error, Result};
use crate::http::HttpEndpoint;
use crate::strategy::IntermediateGenerator;
use crate::tempex::{ConstraintForm, Span};
use crate::temporal::{TemporalValue, TimePoint};
use crate::text;

/// Words whose event denotes a span of time (tenure, membership, activity).
pub const SPAN_VERBS: [&str; 22] = [
    "recording", "recorded", "managing", "managed", "manager", "playing", "played", "member",
    "serving", "served", "lead singer", "singer", "president", "coach", "coaching", "captain",
    "leading", "led", "working", "worked", "studying", "studied",
];

pub(super) fn has_span_verb(s: &str) -> bool {
    SPAN_VERBS.iter().any(|v| text::contains_phrase(s, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnswerKind {
    #[serde(rename = "date")]
    Date,
    #[serde(rename = "time interval")]
    TimeInterval,
}

impl AnswerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AnswerKind::Date => "date",
            AnswerKind::TimeInterval => "time interval",
        }
    }
}

impl fmt::Display for AnswerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnswerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "date" => Ok(AnswerKind::Date),
            "time interval" | "time_interval" => Ok(AnswerKind::TimeInterval),
            other => Err(Error::Format(format!("unknown answer kind `{other}`"))),
        }
    }
}

/// Which part of the event's time an intermediate question asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Role {
    Whole,
    Start,
    End,
}

impl Role {
    pub fn from_relation(relation: &str) -> Role {
        if text::contains_phrase(relation, "start date") {
            Role::Start
        } else if text::contains_phrase(relation, "end date") {
            Role::End
        } else {
            Role::Whole
        }
    }

    /// The part of a value this role selects.
    pub fn project(&self, v: &TemporalValue) -> TemporalValue {
        match self {
            Role::Whole => *v,
            Role::Start => TemporalValue::Point(v.begin()),
            Role::End => TemporalValue::Point(v.end()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntermediateQuestion {
    pub text: String,
    pub expected_answer_kind: AnswerKind,
    pub role: Role,
}

/// An intermediate question together with the pipeline's answer to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub question: IntermediateQuestion,
    pub result: QAResult,
}

/// Splits generator output of the form `text||kind`.
pub fn parse_generated(s: &str) -> Result<(String, AnswerKind)> {
    let (text, kind) = s
        .split_once("||")
        .ok_or_else(|| Error::Format(format!("generator output lacks `||`: `{s}`")))?;
    let text = text.trim().trim_end_matches('?').trim();
    if text.is_empty() {
        return Err(Error::Generation("generator returned an empty question".into()));
    }
    Ok((text.to_string(), kind.parse()?))
}

/// One question for a date, a start/end pair for a time interval.
pub fn expand_generated(text: &str, kind: AnswerKind) -> Vec<IntermediateQuestion> {
    match kind {
        AnswerKind::Date => vec![IntermediateQuestion {
            text: format!("{text}?"),
            expected_answer_kind: kind,
            role: Role::Whole,
        }],
        AnswerKind::TimeInterval => vec![
            IntermediateQuestion {
                text: format!("{text} start date?"),
                expected_answer_kind: kind,
                role: Role::Start,
            },
            IntermediateQuestion {
                text: format!("{text} end date?"),
                expected_answer_kind: kind,
                role: Role::End,
            },
        ],
    }
}

pub fn generate_intermediate(
    question: &str,
    tsf: &Tsf,
    generator: &dyn IntermediateGenerator,
    ctx: &FrameContext<'_>,
) -> Result<Vec<IntermediateQuestion>> {
    if !tsf.is_implicit() {
        return Err(Error::Argument("intermediate questions need an implicit frame".into()));
    }
    let (text, kind) = parse_generated(&generator.generate(question, tsf, ctx)?)?;
    Ok(expand_generated(&text, kind))
}

/// Baseline generator: `when` + main entities + implicit clause.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleGenerator;

impl IntermediateGenerator for RuleGenerator {
    fn name(&self) -> &str {
        "rule"
    }

    fn generate(&self, question: &str, _tsf: &Tsf, ctx: &FrameContext<'_>) -> Result<String> {
        let detection = ctx.parser.detect_signal(question);
        let ConstraintForm::Implicit { clause } = detection.form else {
            return Err(Error::Generation(format!("no implicit clause in `{question}`")));
        };
        let clause_text = clause.slice(question);
        let temporal = ctx.parser.mention_spans(question);
        let spans: Vec<Span> = ctx
            .entities
            .link(question)
            .into_iter()
            .map(|r| r.span)
            .filter(|s| !temporal.iter().any(|t| t.overlaps(s)))
            .collect();

        let content: Vec<_> = text::tokens(clause_text)
            .into_iter()
            .filter(|t| !ctx.stopwords.contains(&t.text.to_lowercase()))
            .map(|t| Span::new(t.start + clause.start, t.end + clause.start))
            .collect();
        if content.is_empty() {
            return Err(Error::Generation(format!("implicit clause `{clause_text}` has no content")));
        }

        let inside = |s: &Span| s.start >= clause.start && s.end <= clause.end;
        let mut main: Vec<&str> = Vec::new();
        for s in spans.iter().filter(|s| !inside(s)) {
            let p = s.slice(question);
            if !main.contains(&p) {
                main.push(p);
            }
        }
        let entity_only = content
            .iter()
            .all(|t| spans.iter().any(|s| inside(s) && s.start <= t.start && t.end <= s.end));

        let (body, kind) = if entity_only {
            let stripped = ctx.parser.strip_temporal(question, &[], &detection).text;
            let head = super::extractor::head_phrase(&stripped, ctx);
            let mut body = format!("when {clause_text} {head}");
            if !main.is_empty() {
                body.push_str(" of ");
                body.push_str(&main.join(" and "));
            }
            (body, AnswerKind::TimeInterval)
        } else {
            let kind = if has_span_verb(clause_text) { AnswerKind::TimeInterval } else { AnswerKind::Date };
            (format!("when {} {clause_text}", main.join(" ")), kind)
        };
        Ok(format!("{}||{}", text::collapse_whitespace(&body), kind))
    }
}

/// Generation delegated to an endpoint answering in the `text||kind` format.
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    endpoint: HttpEndpoint,
}

impl HttpGenerator {
    pub fn new(url: &str, timeout: Duration) -> Self {
        Self { endpoint: HttpEndpoint::new(url, timeout) }
    }
}

impl IntermediateGenerator for HttpGenerator {
    fn name(&self) -> &str {
        "http"
    }

    fn generate(&self, question: &str, _tsf: &Tsf, _ctx: &FrameContext<'_>) -> Result<String> {
        self.endpoint.transform(question)
    }
}

/// Answers each intermediate question and fills the frame's temporal values
/// from the top-k temporal answers. Returns the trace even when resolution
/// fails.
pub fn resolve_implicit(
    tsf: &Tsf,
    intermediates: &[IntermediateQuestion],
    answer: &dyn Fn(&IntermediateQuestion) -> Result<QAResult>,
    top_k: usize,
) -> (Vec<TraceStep>, Result<Tsf>) {
    let mut trace = Vec::new();
    let mut wholes: Vec<TemporalValue> = Vec::new();
    let mut starts: Vec<TimePoint> = Vec::new();
    let mut ends: Vec<TimePoint> = Vec::new();
    for iq in intermediates {
        let result = match answer(iq) {
            Ok(r) => r,
            Err(e) => return (trace, Err(e)),
        };
        if result.tsf.is_implicit() {
            return (trace, Err(Error::RecursionDepth(iq.text.clone())));
        }
        let values: Vec<TemporalValue> = result
            .answers
            .iter()
            .take(top_k.max(1))
            .filter_map(|a| match a.value {
                AnswerValue::Temporal { value } => Some(value),
                AnswerValue::Entity { .. } => None,
            })
            .collect();
        for v in values {
            match iq.role {
                Role::Whole => push_unique(&mut wholes, v),
                Role::Start => push_unique(&mut starts, v.begin()),
                Role::End => push_unique(&mut ends, v.end()),
            }
        }
        trace.push(TraceStep { question: iq.clone(), result });
    }

    let mut values = wholes;
    match (starts.is_empty(), ends.is_empty()) {
        (false, false) => {
            for s in &starts {
                for e in &ends {
                    if let Ok(v) = TemporalValue::interval(*s, *e) {
                        push_unique(&mut values, v);
                    }
                }
            }
        }
        (false, true) => {
            let now = TimePoint::year(tsf.reference_time.year_value()).expect("reference year is valid");
            for s in &starts {
                match TemporalValue::interval(*s, now) {
                    Ok(v) => push_unique(&mut values, v),
                    Err(_) => push_unique(&mut values, TemporalValue::Point(*s)),
                }
            }
        }
        (true, false) => {
            for e in &ends {
                push_unique(&mut values, TemporalValue::Point(*e));
            }
        }
        (true, true) => {}
    }
    if values.is_empty() {
        let asked: Vec<&str> = intermediates.iter().map(|q| q.text.as_str()).collect();
        return (
            trace,
            Err(Error::Resolution(format!("no temporal answer for {}", asked.join(" / ")))),
        );
    }
    let mut resolved = tsf.clone();
    resolved.temporal_values = values;
    (trace, Ok(resolved))
}

fn push_unique<T: PartialEq>(v: &mut Vec<T>, x: T) {
    if !v.contains(&x) {
        v.push(x);
    }
}
