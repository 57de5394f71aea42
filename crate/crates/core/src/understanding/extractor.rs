use std::time::Duration;

use super::intermediate::has_span_verb;
use super::{Category, FrameContext, FrameSlots};
use crate::error::Result;
use crate::http::HttpEndpoint;
use crate::strategy::FrameExtractor;
use crate::tempex::{tidy, Span};
use crate::text;

const WH_WORDS: [&str; 6] = ["what", "which", "who", "whom", "whose", "where"];

/// Rule-based slot filling: alias linking, cue detection and type heuristics.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleExtractor;

impl FrameExtractor for RuleExtractor {
    fn name(&self) -> &str {
        "rule"
    }

    fn extract(&self, question: &str, ctx: &FrameContext<'_>) -> Result<FrameSlots> {
        let detection = ctx.parser.detect_signal(question);
        let spans = entity_spans(question, ctx);
        let mut entity_phrases: Vec<String> = Vec::new();
        for s in &spans {
            let p = s.slice(question).to_string();
            if !entity_phrases.contains(&p) {
                entity_phrases.push(p);
            }
        }
        let stripped = ctx.parser.strip_temporal(question, &[], &detection);
        Ok(FrameSlots {
            entity_phrases,
            relation_phrase: relation_phrase(question, &spans),
            expected_answer_type: expected_answer_type(question, &stripped.text, ctx),
            signal: detection.signal,
            category: if detection.is_implicit() { Category::Implicit } else { Category::NonImplicit },
        })
    }
}

/// Linked entity mentions that do not overlap a temporal expression.
fn entity_spans(s: &str, ctx: &FrameContext<'_>) -> Vec<Span> {
    let temporal = ctx.parser.mention_spans(s);
    ctx.entities
        .link(s)
        .into_iter()
        .map(|r| r.span)
        .filter(|sp| !temporal.iter().any(|t| t.overlaps(sp)))
        .collect()
}

/// The question with entity mentions (and a trailing possessive) removed.
pub fn relation_phrase(question: &str, entity_spans: &[Span]) -> String {
    let mut out = String::new();
    let mut pos = 0;
    for s in entity_spans {
        if s.start < pos {
            continue;
        }
        out.push_str(&question[pos..s.start]);
        out.push(' ');
        pos = s.end;
        for possessive in ["'s", "\u{2019}s"] {
            if question[pos..].starts_with(possessive) {
                pos += possessive.len();
            }
        }
    }
    out.push_str(&question[pos..]);
    tidy(&out).trim_end_matches(['?', '.', '!']).trim().to_string()
}

/// Expected answer type from question shape, entity aliases and type labels.
pub fn expected_answer_type(question: &str, stripped: &str, ctx: &FrameContext<'_>) -> String {
    let lower = text::lower_tokens(question);
    let first = lower.first().map(String::as_str);
    if first == Some("when") {
        let asks_endpoint = text::contains_phrase(question, "start date")
            || text::contains_phrase(question, "end date");
        return if !asks_endpoint && has_span_verb(question) { "time interval" } else { "date" }.into();
    }
    let opens = |a: &[&str]| lower.len() >= a.len() && lower.iter().zip(a).all(|(x, y)| x == y);
    if opens(&["what", "year"]) || opens(&["which", "year"]) || opens(&["in", "what", "year"]) || opens(&["in", "which", "year"]) {
        return "year".into();
    }

    let run = head_run(stripped, ctx);
    if run.is_empty() {
        return "entity".into();
    }
    for len in (1..=run.len()).rev() {
        let phrase = run[..len].join(" ");
        for form in std::iter::once(phrase.clone()).chain(singulars(&phrase)) {
            let ids = ctx.entities.alias_candidates(&form);
            if !ids.is_empty() {
                if let Some(t) = ctx.entities.most_frequent_type(ids) {
                    return t;
                }
            }
            if ctx.entities.has_type_label(&form) {
                return form;
            }
        }
    }
    run.join(" ")
}

/// Lowercased head phrase of a stripped question.
pub(super) fn head_phrase(stripped: &str, ctx: &FrameContext<'_>) -> String {
    head_run(stripped, ctx).join(" ")
}

/// First run of adjacent content tokens after the wh-word, skipping entities.
fn head_run(stripped: &str, ctx: &FrameContext<'_>) -> Vec<String> {
    let spans = entity_spans(stripped, ctx);
    let toks: Vec<_> = text::tokens(stripped)
        .into_iter()
        .filter(|t| !spans.iter().any(|s| s.overlaps(&Span::new(t.start, t.end))))
        .collect();
    let lower: Vec<String> = toks.iter().map(|t| t.text.to_lowercase()).collect();
    let start = lower
        .iter()
        .position(|t| WH_WORDS.contains(&t.as_str()))
        .map(|i| i + 1)
        .unwrap_or(0);
    let Some(first) = (start..toks.len()).find(|&i| !ctx.stopwords.contains(&lower[i])) else {
        return Vec::new();
    };
    let mut run = vec![lower[first].clone()];
    for i in first + 1..toks.len() {
        let gap = &stripped[toks[i - 1].end..toks[i].start];
        if ctx.stopwords.contains(&lower[i]) || !gap.chars().all(char::is_whitespace) {
            break;
        }
        run.push(lower[i].clone());
    }
    run
}

/// Candidate singular forms, e.g. `movies` gives `movie` and `movy`.
fn singulars(phrase: &str) -> Vec<String> {
    let mut out = Vec::new();
    if phrase.ends_with('s') && !phrase.ends_with("ss") {
        out.push(phrase[..phrase.len() - 1].to_string());
    }
    if let Some(stem) = phrase.strip_suffix("ies") {
        out.push(format!("{stem}y"));
    }
    out
}

/// Frame extraction delegated to an endpoint answering in the pipe format.
#[derive(Debug, Clone)]
pub struct HttpExtractor {
    endpoint: HttpEndpoint,
}

impl HttpExtractor {
    pub fn new(url: &str, timeout: Duration) -> Self {
        Self { endpoint: HttpEndpoint::new(url, timeout) }
    }
}

impl FrameExtractor for HttpExtractor {
    fn name(&self) -> &str {
        "http"
    }

    fn extract(&self, question: &str, _ctx: &FrameContext<'_>) -> Result<FrameSlots> {
        FrameSlots::parse(&self.endpoint.transform(question)?)
    }
}
