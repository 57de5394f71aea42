//! Answer matching, ranking metrics, the corrupted-constraint experiment,
//! answer-presence tracing and distant-supervision frame annotation.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::answering::{AnswerCandidate, AnswerValue, Pipeline, QAResult};
use crate::error::{Error, Result};
use crate::retrieval::{link, retrieve, temporal_prune};
use crate::store::{CorpusIndex, EntityId, EntityTable, Evidence};
use crate::tempex::{tidy, ConstraintForm, Span, TempexParser};
use crate::temporal::{TemporalSignal, TemporalValue, TimePoint};
use crate::understanding::{Category, TEMPORAL_ANSWER_TYPES};

/// Draws per item before a corruption is given up.
pub const MAX_CORRUPTION_DRAWS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnswer {
    /// Labels and aliases; never empty.
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<EntityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<TemporalValue>,
}

impl GoldAnswer {
    pub fn new(labels: Vec<String>, id: Option<EntityId>) -> Result<Self> {
        if labels.iter().all(|l| l.trim().is_empty()) {
            return Err(Error::Argument("a gold answer needs at least one label".into()));
        }
        let value = labels.iter().find_map(|l| l.parse::<TemporalValue>().ok());
        Ok(Self { labels, id, value })
    }

    /// Gold built from a candidate, with the entity's aliases.
    pub fn from_candidate(c: &AnswerCandidate, entities: &EntityTable) -> Self {
        match &c.value {
            AnswerValue::Entity { id, label } => {
                let labels = entities
                    .get(id)
                    .map(|e| e.surface_forms().map(str::to_string).collect())
                    .unwrap_or_else(|| vec![label.clone()]);
                Self { labels, id: Some(id.clone()), value: None }
            }
            AnswerValue::Temporal { value } => Self { labels: vec![value.to_string()], id: None, value: Some(*value) },
        }
    }

    pub fn primary_label(&self) -> &str {
        self.labels.first().map(String::as_str).unwrap_or("")
    }
}

/// Case-insensitive label or alias match, entity id equality, or equal day
/// expansion for temporal answers.
pub fn match_answer(candidate: &AnswerCandidate, gold: &GoldAnswer) -> bool {
    if let (Some(id), Some(gid)) = (candidate.entity_id(), &gold.id) {
        if id == gid {
            return true;
        }
    }
    if let (Some(v), Some(g)) = (candidate.temporal(), gold.value) {
        if v.expand() == g.expand() {
            return true;
        }
    }
    match_label(&candidate.label(), gold)
}

pub fn match_label(label: &str, gold: &GoldAnswer) -> bool {
    let l = label.trim().to_lowercase();
    if gold.labels.iter().any(|g| g.trim().to_lowercase() == l) {
        return true;
    }
    match (label.parse::<TemporalValue>(), gold.value) {
        (Ok(v), Some(g)) => v.expand() == g.expand(),
        _ => false,
    }
}

/// Whether a snippet contains the answer: an annotation of the gold entity,
/// a label or alias in its text, or a temporal mention (or interval
/// endpoint) with the gold expansion.
pub fn evidence_contains_answer(gold: &GoldAnswer, e: &Evidence, _entities: &EntityTable) -> bool {
    if let Some(id) = &gold.id {
        if e.mentions_entity(id) {
            return true;
        }
    }
    if let Some(g) = gold.value {
        let target = g.expand();
        let hit = e.temporal_mentions.iter().any(|m| {
            [m.value, TemporalValue::Point(m.value.begin()), TemporalValue::Point(m.value.end())]
                .iter()
                .any(|v| v.expand() == target)
        });
        if hit {
            return true;
        }
        if gold.id.is_none() {
            return false;
        }
    }
    gold.labels.iter().any(|l| crate::text::contains_phrase(&e.text, l))
}

/// 1-based rank of the first matching answer; `None` for refusals.
pub fn first_match_rank(result: &QAResult, gold: &GoldAnswer) -> Option<usize> {
    if result.refused {
        return None;
    }
    result.answers.iter().position(|a| match_answer(a, gold)).map(|i| i + 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metrics {
    pub n: usize,
    pub p_at_1: BigRational,
    pub mrr: BigRational,
    pub hit_at_5: BigRational,
}

impl Metrics {
    pub fn as_f64(&self) -> [f64; 3] {
        [&self.p_at_1, &self.mrr, &self.hit_at_5].map(|r| r.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p, m, h] = self.as_f64();
        writeln!(f, "{:<8} {:>8}", "metric", "value")?;
        writeln!(f, "{:<8} {:>8.4}", "P@1", p)?;
        writeln!(f, "{:<8} {:>8.4}", "MRR", m)?;
        writeln!(f, "{:<8} {:>8.4}", "Hit@5", h)?;
        write!(f, "{:<8} {:>8}", "n", self.n)
    }
}

impl Serialize for Metrics {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let [p, m, h] = self.as_f64();
        serde_json::json!({ "n": self.n, "p_at_1": p, "mrr": m, "hit_at_5": h }).serialize(s)
    }
}

/// Exact metrics from first-match ranks (`None` = no match or refusal).
pub fn metrics_from_ranks(ranks: &[Option<usize>]) -> Result<Metrics> {
    if ranks.is_empty() {
        return Err(Error::Argument("metrics need at least one record".into()));
    }
    let one = |b: bool| BigRational::from_integer(BigInt::from(u8::from(b)));
    let mut p = BigRational::zero();
    let mut mrr = BigRational::zero();
    let mut hit = BigRational::zero();
    for r in ranks {
        p += one(*r == Some(1));
        hit += one(matches!(r, Some(k) if *k <= 5));
        if let Some(k) = r {
            mrr += BigRational::new(BigInt::from(1), BigInt::from(*k));
        }
    }
    let n = BigRational::from_integer(BigInt::from(ranks.len()));
    Ok(Metrics { n: ranks.len(), p_at_1: p / &n, mrr: mrr / &n, hit_at_5: hit / n })
}

pub fn metrics(records: &[RunRecord]) -> Result<Metrics> {
    let ranks: Vec<Option<usize>> = records.iter().map(|r| first_match_rank(&r.result, &r.gold)).collect();
    metrics_from_ranks(&ranks)
}

/// P@1 when an oracle switches to the Un-FAITH answer whenever FAITH is
/// wrong. Both slices must be aligned by question.
pub fn oracle_fallback_p_at_1(faith: &[RunRecord], unfaith: &[RunRecord]) -> Result<BigRational> {
    if faith.is_empty() || faith.len() != unfaith.len() {
        return Err(Error::Argument("oracle fallback needs two non-empty aligned runs".into()));
    }
    let hits = faith
        .iter()
        .zip(unfaith)
        .filter(|(f, u)| first_match_rank(&f.result, &f.gold) == Some(1) || first_match_rank(&u.result, &u.gold) == Some(1))
        .count();
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(faith.len())))
}

/// Whether the gold answer is still reachable after each pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFlags {
    pub retrieved: bool,
    pub survived_prune: bool,
    pub survived_cut: bool,
    pub in_top5: bool,
    pub at_rank1: bool,
}

impl StageFlags {
    pub fn as_array(&self) -> [bool; 5] {
        [self.retrieved, self.survived_prune, self.survived_cut, self.in_top5, self.at_rank1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: String,
    pub result: QAResult,
    pub gold: GoldAnswer,
    pub stages: StageFlags,
}

impl RunRecord {
    pub fn new(id: impl Into<String>, result: QAResult, gold: GoldAnswer, index: &CorpusIndex, parser: &TempexParser) -> Self {
        let present = |ids: &[crate::store::EvidenceId]| {
            ids.iter().filter_map(|i| index.get(*i)).any(|e| {
                let e = e.with_mentions(parser, result.tsf.reference_time);
                evidence_contains_answer(&gold, &e, index.entities())
            })
        };
        let retrieved = present(&result.stages.retrieved);
        let survived_prune = retrieved && present(&result.stages.pruned);
        let survived_cut = survived_prune && present(&result.stages.cut);
        let rank = first_match_rank(&result, &gold);
        let in_top5 = survived_cut && matches!(rank, Some(k) if k <= 5);
        let at_rank1 = in_top5 && rank == Some(1);
        let stages = StageFlags { retrieved, survived_prune, survived_cut, in_top5, at_rank1 };
        Self { id: id.into(), result, gold, stages }
    }
}

pub const STAGE_NAMES: [&str; 5] = ["retrieved", "pruned", "cut", "top5", "rank1"];

pub const ERROR_CATEGORIES: [&str; 5] = [
    "not found in the initial retrieval",
    "lost during temporal pruning",
    "lost at the evidence cutoff",
    "present in evidence but not among top candidates",
    "among top candidates but not at rank 1",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresenceReport {
    pub n: usize,
    /// Fraction of records whose answer survives each stage.
    pub fractions: [f64; 5],
    /// Failures per error category.
    pub errors: [usize; 5],
}

impl fmt::Display for PresenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>8}", "stage", "presence")?;
        for (name, v) in STAGE_NAMES.iter().zip(self.fractions) {
            writeln!(f, "{name:<10} {v:>8.4}")?;
        }
        for (i, (name, c)) in ERROR_CATEGORIES.iter().zip(self.errors).enumerate() {
            write!(f, "({}) {name}: {c}", ["i", "ii", "iii", "iv", "v"][i])?;
            if i < 4 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Error category index of a failed record, `None` when answered at rank 1.
pub fn error_category(flags: &StageFlags) -> Option<usize> {
    flags.as_array().iter().position(|ok| !ok)
}

pub fn presence_trace(records: &[RunRecord]) -> PresenceReport {
    let n = records.len();
    let mut counts = [0usize; 5];
    let mut errors = [0usize; 5];
    for r in records {
        for (c, ok) in counts.iter_mut().zip(r.stages.as_array()) {
            *c += usize::from(ok);
        }
        if let Some(cat) = error_category(&r.stages) {
            errors[cat] += 1;
        }
    }
    let fractions = counts.map(|c| if n == 0 { 0.0 } else { c as f64 / n as f64 });
    PresenceReport { n, fractions, errors }
}

/// A benchmark question with its gold answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalItem {
    pub id: String,
    pub question: String,
    pub gold: GoldAnswer,
    pub reference_time: TimePoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<TemporalSignal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<Category>,
}

fn field<'a>(v: &'a Value, key: &str, line: usize) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Format(format!("benchmark line {line}: missing field `{key}`")))
}

fn str_field(v: &Value, key: &str, line: usize) -> Result<String> {
    field(v, key, line)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::Format(format!("benchmark line {line}: `{key}` must be a string")))
}

fn answer_labels(v: &Value) -> (Vec<String>, Option<EntityId>) {
    match v {
        Value::String(s) => (vec![s.clone()], None),
        Value::Object(o) => {
            let mut labels: Vec<String> = o.get("label").and_then(Value::as_str).map(str::to_string).into_iter().collect();
            if let Some(Value::Array(a)) = o.get("aliases") {
                labels.extend(a.iter().filter_map(Value::as_str).map(str::to_string));
            }
            let id = o.get("id").and_then(Value::as_str).map(EntityId::new);
            (labels, id)
        }
        _ => (Vec::new(), None),
    }
}

/// Parses one benchmark line in the generated-item schema (`answer`
/// object) or the minimal schema (`answers` list).
pub fn parse_eval_item(raw: &str, line: usize, default_reference: Option<TimePoint>) -> Result<EvalItem> {
    let v: Value = serde_json::from_str(raw).map_err(|e| Error::Format(format!("benchmark line {line}: {e}")))?;
    let id = match field(&v, "id", line)? {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let question = str_field(&v, "question", line)?;
    let (mut labels, mut gid) = (Vec::new(), None);
    if let Some(a) = v.get("answer") {
        (labels, gid) = answer_labels(a);
    } else if let Some(Value::Array(list)) = v.get("answers") {
        for a in list {
            let (l, i) = answer_labels(a);
            labels.extend(l);
            gid = gid.or(i);
        }
    } else {
        return Err(Error::Format(format!("benchmark line {line}: missing `answer` or `answers`")));
    }
    let gold = GoldAnswer::new(labels, gid).map_err(|e| Error::Format(format!("benchmark line {line}: {e}")))?;
    let reference_time = match v.get("reference_time").and_then(Value::as_str) {
        Some(s) => s.parse()?,
        None => default_reference
            .ok_or_else(|| Error::Format(format!("benchmark line {line}: missing `reference_time`")))?,
    };
    let signal = v.get("signal").and_then(Value::as_str).map(str::parse).transpose()?;
    let category = v.get("category").and_then(Value::as_str).map(str::parse).transpose()?;
    let category = category.or(signal.map(|_| Category::Implicit).filter(|_| v.get("implicit").is_some()));
    Ok(EvalItem { id, question, gold, reference_time, signal, category })
}

pub fn load_benchmark(path: &Path, default_reference: Option<TimePoint>) -> Result<Vec<EvalItem>> {
    let raw = fs::read_to_string(path)?;
    raw.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_eval_item(l, i + 1, default_reference))
        .collect()
}

/// Runs every item; a failing item is reported and skipped.
pub fn run_benchmark(pipeline: &Pipeline, items: &[EvalItem], opts: crate::answering::AnswerOptions) -> (Vec<RunRecord>, Vec<String>) {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for item in items {
        match pipeline.answer_with(&item.question, item.reference_time, opts) {
            Ok(result) => records.push(RunRecord::new(
                item.id.clone(),
                result,
                item.gold.clone(),
                pipeline.index(),
                pipeline.parser(),
            )),
            Err(e) => errors.push(format!("{}: {e}", item.id)),
        }
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    (records, errors)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptedItem {
    pub item: EvalItem,
    pub original_question: String,
    pub value: TemporalValue,
}

pub fn render_day(date: NaiveDate) -> String {
    const MONTHS: [&str; 12] = [
        "January", "February", "March", "April", "May", "June", "July", "August", "September", "October",
        "November", "December",
    ];
    format!("{} {} {}", date.day(), MONTHS[date.month0() as usize], date.year())
}

/// Replaces each item's explicit temporal value with a seeded random day in
/// the plausibility window that no evidence of its linked entities
/// satisfies. Items without an explicit value, or without such a day after
/// a bounded number of draws, are skipped with a warning.
pub fn corrupt_questions(pipeline: &Pipeline, items: &[EvalItem], seed: u64) -> (Vec<CorruptedItem>, Vec<String>) {
    let parser = pipeline.parser();
    let (lo, hi) = parser.window();
    let first = TimePoint::year(lo).expect("window year").first_date().num_days_from_ce();
    let last = TimePoint::year(hi).expect("window year").last_date().num_days_from_ce();
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let explicit = pipeline.understand(&item.question, item.reference_time).ok().and_then(|tsf| {
            let d = parser.detect_signal(&item.question);
            match d.form {
                ConstraintForm::Explicit { mention }
                    if tsf.category == Category::NonImplicit && !tsf.constraints().is_empty() =>
                {
                    Some(mention)
                }
                _ => None,
            }
        });
        let Some(span) = explicit else {
            warnings.push(format!("{}: no explicit temporal value, skipped", item.id));
            continue;
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut done = false;
        for _ in 0..MAX_CORRUPTION_DRAWS {
            let day = rng.gen_range(first..=last);
            let date = NaiveDate::from_num_days_from_ce_opt(day).expect("in range");
            let question = replace_span(&item.question, span, &render_day(date));
            if unsatisfiable(pipeline, &question, item.reference_time) {
                out.push(CorruptedItem {
                    item: EvalItem { question, ..item.clone() },
                    original_question: item.question.clone(),
                    value: TemporalValue::Point(TimePoint::from_date(date)),
                });
                done = true;
                break;
            }
        }
        if !done {
            let w = format!("{}: no unsatisfiable date after {MAX_CORRUPTION_DRAWS} draws, skipped", item.id);
            log::warn!("{w}");
            warnings.push(w);
        }
    }
    (out, warnings)
}

fn replace_span(s: &str, span: Span, with: &str) -> String {
    format!("{}{}{}", &s[..span.start], with, &s[span.end..])
}

/// Whether temporal pruning leaves nothing for the question's entities.
pub fn unsatisfiable(pipeline: &Pipeline, question: &str, reference_time: TimePoint) -> bool {
    let Ok(tsf) = pipeline.understand(question, reference_time) else {
        return false;
    };
    if tsf.constraints().is_empty() {
        return false;
    }
    let linked = link(&tsf, pipeline.index().entities());
    let retrieved = retrieve(pipeline.index(), &linked, pipeline.parser(), &tsf);
    temporal_prune(&retrieved, &tsf).is_empty()
}

/// A frame annotation derived from gold answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub question: String,
    pub entity_phrases: Vec<String>,
    pub relation_phrase: String,
    pub expected_answer_type: String,
    pub signal: TemporalSignal,
    pub category: Category,
    pub resolved: bool,
}

impl Annotation {
    /// Frame slots in the `||`-separated training format.
    pub fn serialize(&self) -> String {
        format!(
            "{}||{}||{}||{}||{}",
            self.entity_phrases.join(", "),
            self.relation_phrase,
            self.expected_answer_type,
            self.signal.as_str(),
            self.category.as_str()
        )
    }
}

/// Labels a linked mention as a question entity when one of its snippets
/// contains the gold answer; the rest of the question is the relation.
pub fn distant_supervision_annotate(
    question: &str,
    gold: &GoldAnswer,
    index: &CorpusIndex,
    parser: &TempexParser,
    reference_time: TimePoint,
    signal: Option<TemporalSignal>,
    category: Option<Category>,
) -> Annotation {
    let mut spans = Vec::new();
    let mut phrases: Vec<String> = Vec::new();
    for hit in index.entities().link(question) {
        if gold.id.as_ref() == Some(&hit.entity) {
            continue;
        }
        let qualifies = index
            .retrieve_by_entity(&hit.entity)
            .into_iter()
            .any(|e| evidence_contains_answer(gold, &e.with_mentions(parser, reference_time), index.entities()));
        if qualifies {
            let phrase = hit.span.slice(question).to_string();
            if !phrases.contains(&phrase) {
                phrases.push(phrase);
            }
            spans.push(hit.span);
        }
    }
    let mut rest = String::new();
    let mut pos = 0;
    for s in &spans {
        rest.push_str(&question[pos..s.start]);
        rest.push(' ');
        pos = s.end;
    }
    rest.push_str(&question[pos..]);
    let relation = tidy(&rest).trim_end_matches(['?', '.', '!']).trim().to_string();
    let expected = match (&gold.id, gold.value) {
        (Some(id), _) => index.entities().most_frequent_type([id]).unwrap_or_else(|| "entity".into()),
        (None, Some(_)) => TEMPORAL_ANSWER_TYPES[0].to_string(),
        (None, None) => "entity".into(),
    };
    let signal = signal.unwrap_or(TemporalSignal::None);
    Annotation {
        question: question.to_string(),
        resolved: !phrases.is_empty(),
        entity_phrases: phrases,
        relation_phrase: relation,
        expected_answer_type: expected,
        signal,
        category: category.unwrap_or(Category::NonImplicit),
    }
}

/// Aligned plain-text table of per-record outcomes.
pub fn records_table(records: &[RunRecord]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<14} {:<8} {:<5} top answer", "id", "refused", "rank");
    for r in records {
        let rank = first_match_rank(&r.result, &r.gold).map(|k| k.to_string()).unwrap_or_else(|| "-".into());
        let top = r.result.top().map(|a| a.label()).unwrap_or_default();
        let _ = writeln!(out, "{:<14} {:<8} {:<5} {}", r.id, r.result.refused, rank, top);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(label: &str, id: Option<&str>) -> AnswerCandidate {
        let value = match id {
            Some(id) => AnswerValue::Entity { id: EntityId::new(id), label: label.into() },
            None => AnswerValue::Temporal { value: label.parse().unwrap() },
        };
        AnswerCandidate { value, score: 0.0, supporting_evidence: vec![], types: vec![] }
    }

    #[test]
    fn matching_rules() {
        let booker = GoldAnswer::new(vec!["Booker Prize".into(), "Man Booker Prize".into()], None).unwrap();
        assert!(match_label("booker prize", &booker));
        let year = GoldAnswer::new(vec!["1975".into()], None).unwrap();
        assert!(match_answer(&cand("1975", None), &year));
        let parlophone = GoldAnswer::new(vec!["Parlophone".into()], Some(EntityId::new("parlophone"))).unwrap();
        assert!(!match_answer(&cand("EMI", Some("emi")), &parlophone));
        assert!(match_answer(&cand("Parlophone Records", Some("parlophone")), &parlophone));
        assert!(GoldAnswer::new(vec![], None).is_err());
    }

    #[test]
    fn worked_mrr() {
        let m = metrics_from_ranks(&[Some(1), Some(2), None, Some(4)]).unwrap();
        assert_eq!(m.mrr, BigRational::new(BigInt::from(7), BigInt::from(16)));
        assert_eq!(m.as_f64()[1], 0.4375);
        let single = metrics_from_ranks(&[Some(3)]).unwrap();
        assert_eq!(single.as_f64(), [0.0, 1.0 / 3.0, 1.0]);
        assert!(metrics_from_ranks(&[]).is_err());
    }

    #[test]
    fn categories_follow_first_failed_stage() {
        let f = |a: [bool; 5]| StageFlags {
            retrieved: a[0],
            survived_prune: a[1],
            survived_cut: a[2],
            in_top5: a[3],
            at_rank1: a[4],
        };
        assert_eq!(error_category(&f([false; 5])), Some(0));
        assert_eq!(error_category(&f([true, true, true, true, false])), Some(4));
        assert_eq!(error_category(&f([true; 5])), None);
    }

    #[test]
    fn minimal_and_generated_schemas() {
        let a = parse_eval_item(r#"{"id":"q1","question":"Who?","answers":["Parlophone"],"reference_time":"2023-01-01"}"#, 1, None)
            .unwrap();
        assert_eq!(a.gold.labels, vec!["Parlophone"]);
        let b = parse_eval_item(
            r#"{"id":"f1","question":"What?","answer":{"label":"X","aliases":["Y"],"id":"x"},"signal":"overlap","reference_time":"2023-01-01"}"#,
            1,
            None,
        )
        .unwrap();
        assert_eq!(b.gold.id, Some(EntityId::new("x")));
        assert_eq!(b.signal, Some(TemporalSignal::Overlap));
        assert!(parse_eval_item(r#"{"id":"q","question":"?"}"#, 3, None).is_err());
    }

    #[test]
    fn day_rendering() {
        assert_eq!(render_day(NaiveDate::from_ymd_opt(2091, 10, 12).unwrap()), "12 October 2091");
    }
}
