//! Implicit temporal question generation from a corpus: topic sampling,
//! snippet gathering, conjunction-consistent pairing, pseudo-question
//! assembly, rephrasing and benchmark emission.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::http::HttpEndpoint;
use crate::store::{CorpusIndex, Entity, EntityId, Evidence, Provenance, SourceKind};
use crate::strategy::Rephraser;
use crate::tempex::{tidy, Span, TempexParser};
use crate::temporal::{satisfies, TemporalConstraint, TemporalSignal, TemporalValue, TimePoint};
use crate::text::{self, Stopwords};

/// Text sentences per page considered by the gatherer.
pub const FIRST_SENTENCES: usize = 5;

const LEAD_INS: [&str; 12] = [
    "in", "on", "at", "during", "since", "from", "by", "until", "till", "around", "between", "of",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ForgeConfig {
    /// Number of sampled topics; `None` uses every non-year-page entity.
    pub topics: Option<usize>,
    /// Topics per band (long tail, mid, prominent); `None` splits evenly.
    pub quotas: Option<[usize; 3]>,
    pub type_cap: f64,
    pub max_per_topic: usize,
    pub split: [f64; 3],
    pub reference_time: TimePoint,
}

impl Default for ForgeConfig {
    fn default() -> Self {
        Self {
            topics: None,
            quotas: None,
            type_cap: 0.10,
            max_per_topic: 3,
            split: [0.6, 0.2, 0.2],
            reference_time: TimePoint::day(2023, 1, 1).expect("valid date"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Band {
    LongTail,
    Mid,
    Prominent,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::LongTail, Band::Mid, Band::Prominent];

    /// Fewer than 20 facts is long tail, more than 500 is prominent.
    pub fn of(fact_count: u64) -> Band {
        if fact_count < 20 {
            Band::LongTail
        } else if fact_count > 500 {
            Band::Prominent
        } else {
            Band::Mid
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::LongTail => "LONG_TAIL",
            Band::Mid => "MID",
            Band::Prominent => "PROMINENT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicSample {
    pub entity: Entity,
    pub band: Band,
}

fn entity_type(e: &Entity) -> &str {
    e.primary_type().unwrap_or("")
}

/// Seeded sampling of `n` topics honoring band quotas and a per-type cap
/// of `max(1, floor(type_cap * n))`.
pub fn sample_topics(
    index: &CorpusIndex,
    n: usize,
    quotas: Option<[usize; 3]>,
    type_cap: f64,
    seed: u64,
) -> Result<Vec<TopicSample>> {
    let pool: Vec<&Entity> = index.entities().iter().filter(|e| !e.is_year_page()).collect();
    if n > pool.len() {
        return Err(Error::Generation(format!("{n} topics requested but the corpus has {} entities", pool.len())));
    }
    let quotas = quotas.unwrap_or([n / 3 + usize::from(!n.is_multiple_of(3)), n / 3 + usize::from(n % 3 > 1), n / 3]);
    if quotas.iter().sum::<usize>() != n {
        return Err(Error::Generation(format!("band quotas {quotas:?} do not sum to {n}")));
    }
    let cap = ((type_cap * n as f64).floor() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_type: BTreeMap<&str, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(n);
    for (band, quota) in Band::ALL.into_iter().zip(quotas) {
        let mut members: Vec<&Entity> = pool.iter().copied().filter(|e| Band::of(e.fact_count) == band).collect();
        members.sort_by(|a, b| a.id.cmp(&b.id));
        members.shuffle(&mut rng);
        let mut taken = 0;
        for e in members.iter().copied() {
            if taken == quota {
                break;
            }
            let used = per_type.entry(entity_type(e)).or_default();
            if *used < cap {
                *used += 1;
                taken += 1;
                out.push(TopicSample { entity: e.clone(), band });
            }
        }
        if taken < quota {
            return Err(Error::Generation(format!(
                "band {band}: quota {quota} unsatisfiable ({} entities in band, {taken} eligible under type cap {cap})",
                members.len()
            )));
        }
    }
    Ok(out)
}

/// A snippet with its dominant (first) temporal value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatedSnippet {
    pub evidence: Evidence,
    pub value: TemporalValue,
}

/// Entity whose record produced the snippet.
fn page_entity(index: &CorpusIndex, e: &Evidence) -> Option<EntityId> {
    let r = index.records();
    let line = e.provenance.line;
    match e.source {
        SourceKind::Kb => r.kb.iter().find(|l| l.line == line).map(|l| l.record.subject.clone()),
        SourceKind::Infobox => r.infoboxes.iter().find(|l| l.line == line).map(|l| l.record.entity.clone()),
        SourceKind::Table => r.tables.iter().find(|l| l.line == line).map(|l| l.record.entity.clone()),
        SourceKind::Text => r.texts.iter().find(|l| l.line == line).map(|l| l.record.entity.clone()),
    }
}

/// KB facts mentioning the topic, its infobox entries and table rows, the
/// first sentences of its page and year-page sentences mentioning it.
/// Only dated snippets are kept.
pub fn gather_snippets(index: &CorpusIndex, parser: &TempexParser, topic: &Entity, reference_time: TimePoint) -> Vec<DatedSnippet> {
    let mut out = Vec::new();
    for e in index.evidence() {
        let page = page_entity(index, e);
        let keep = match e.source {
            SourceKind::Kb => e.mentions_entity(&topic.id),
            SourceKind::Infobox | SourceKind::Table => page.as_ref() == Some(&topic.id),
            SourceKind::Text => {
                let year_page = page.as_ref().and_then(|p| index.entities().get(p)).map(Entity::is_year_page);
                if page.as_ref() == Some(&topic.id) {
                    e.provenance.item.map(|i| i < FIRST_SENTENCES).unwrap_or(false)
                } else {
                    year_page == Some(true) && e.mentions_entity(&topic.id)
                }
            }
        };
        if !keep {
            continue;
        }
        let dated = e.with_mentions(parser, reference_time);
        if let Some(m) = dated.temporal_mentions.first() {
            let value = m.value;
            out.push(DatedSnippet { evidence: dated, value });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conjunction {
    During,
    Before,
    After,
}

impl Conjunction {
    pub const ALL: [Conjunction; 3] = [Conjunction::During, Conjunction::Before, Conjunction::After];

    pub fn as_str(&self) -> &'static str {
        match self {
            Conjunction::During => "during",
            Conjunction::Before => "before",
            Conjunction::After => "after",
        }
    }

    pub fn signal(&self) -> TemporalSignal {
        match self {
            Conjunction::During => TemporalSignal::Overlap,
            Conjunction::Before => TemporalSignal::Before,
            Conjunction::After => TemporalSignal::After,
        }
    }

    /// Whether a main value is consistent with the implicit value. BEFORE
    /// and AFTER also require disjoint scopes.
    pub fn consistent(&self, main: &TemporalValue, implicit: &TemporalValue) -> bool {
        let disjoint = main.expand().intersect(&implicit.expand()).is_none();
        match self {
            Conjunction::During => !disjoint,
            Conjunction::Before | Conjunction::After => {
                disjoint && satisfies(main, &TemporalConstraint::new(self.signal(), *implicit).expect("signal is set"))
            }
        }
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Conjunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "during" => Ok(Conjunction::During),
            "before" => Ok(Conjunction::Before),
            "after" => Ok(Conjunction::After),
            other => Err(Error::Format(format!("unknown conjunction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetPair {
    pub main: DatedSnippet,
    pub answer: EntityId,
    pub implicit: DatedSnippet,
    pub conjunction: Conjunction,
    pub distractors: Vec<DatedSnippet>,
}

/// Content tokens of a snippet body, temporal mentions excluded.
fn similarity_tokens(s: &DatedSnippet, stopwords: &Stopwords) -> BTreeSet<String> {
    let e = &s.evidence;
    text::tokens(e.body())
        .into_iter()
        .filter(|t| {
            let (a, b) = (t.start + e.body_start, t.end + e.body_start);
            !e.temporal_mentions.iter().any(|m| m.span.start <= a && b <= m.span.end)
        })
        .map(|t| t.text.to_lowercase())
        .filter(|t| !stopwords.contains(t))
        .collect()
}

/// Qualifying (main, implicit) pairs under `conjunction`, in snippet order.
/// Answer candidates are the main snippet's annotated entities other than
/// the topic and year pages; the first one absent from the assembled
/// question is used.
pub fn pair_snippets(
    index: &CorpusIndex,
    topic: &EntityId,
    snippets: &[DatedSnippet],
    conjunction: Conjunction,
    sigma: f64,
    stopwords: &Stopwords,
) -> Vec<SnippetPair> {
    let tokens: Vec<BTreeSet<String>> = snippets.iter().map(|s| similarity_tokens(s, stopwords)).collect();
    let mut out = Vec::new();
    for (mi, main) in snippets.iter().enumerate() {
        for (ii, implicit) in snippets.iter().enumerate() {
            if mi == ii
                || !conjunction.consistent(&main.value, &implicit.value)
                || !has_content(index, &strip_part(&implicit.evidence, &[]), stopwords)
            {
                continue;
            }
            let distractors: Vec<DatedSnippet> = snippets
                .iter()
                .enumerate()
                .filter(|(di, d)| {
                    *di != mi
                        && *di != ii
                        && text::jaccard(&tokens[mi], &tokens[*di]) >= sigma
                        && d.value.expand().intersect(&implicit.value.expand()).is_none()
                })
                .map(|(_, d)| d.clone())
                .collect();
            if distractors.is_empty() {
                continue;
            }
            let answer = main.evidence.entity_ids().into_iter().find(|id| {
                *id != topic
                    && !implicit.evidence.mentions_entity(id)
                    && index.entities().get(id).map(|e| !e.is_year_page()).unwrap_or(false)
                    && {
                        let candidate = SnippetPair {
                            main: main.clone(),
                            answer: (*id).clone(),
                            implicit: implicit.clone(),
                            conjunction,
                            distractors: Vec::new(),
                        };
                        let q = assemble_pseudo(index, &candidate);
                        let answer_spans: Vec<Span> = candidate.main.evidence.entities.iter()
                            .filter(|a| &a.entity == *id && a.span.start >= main.evidence.body_start)
                            .map(|a| a.span)
                            .collect();
                        !answer_in_question(index, id, &q)
                            && has_content(index, &strip_part(&main.evidence, &answer_spans), stopwords)
                    }
            });
            if let Some(answer) = answer {
                out.push(SnippetPair {
                    main: main.clone(),
                    answer: answer.clone(),
                    implicit: implicit.clone(),
                    conjunction,
                    distractors,
                });
            }
        }
    }
    out
}

/// Whether a stripped part says more than the entities it names.
fn has_content(index: &CorpusIndex, part: &str, stopwords: &Stopwords) -> bool {
    let mut rest = format!(" {} ", part.to_lowercase());
    for hit in index.entities().link(part) {
        rest = rest.replace(&format!(" {} ", hit.span.slice(part).to_lowercase()), " ");
    }
    !stopwords.content_tokens(&rest).is_empty()
}

fn answer_in_question(index: &CorpusIndex, answer: &EntityId, question: &str) -> bool {
    let q = question.to_lowercase();
    index
        .entities()
        .get(answer)
        .map(|e| e.surface_forms().any(|f| q.contains(&f.to_lowercase())))
        .unwrap_or(true)
}

/// Body text with the given spans, temporal mentions and their lead-ins
/// removed, commas and final period dropped.
fn strip_part(e: &Evidence, remove: &[Span]) -> String {
    let body_start = e.body_start;
    let text = &e.text;
    let mut cut: Vec<Span> = remove.to_vec();
    for m in &e.temporal_mentions {
        if m.span.start < body_start {
            continue;
        }
        let mut start = m.span.start;
        let before = &text[body_start..start];
        let after = &text[m.span.end..];
        let seg_start = before.trim_end().is_empty() || before.trim_end().ends_with(',');
        let seg_end = after.trim_start().is_empty() || after.trim_start().starts_with([',', '.']);
        let segment = text[..m.span.start].matches(", ").count();
        if e.source == SourceKind::Kb && seg_start && seg_end && segment >= 4 {
            // a qualifier value: drop its key segment as well
            let head = before.trim_end().trim_end_matches(',');
            start = body_start + head.rfind(',').map(|i| i + 1).unwrap_or(0);
        } else {
            let head = before.trim_end();
            if let Some(word) = head.rsplit(char::is_whitespace).next() {
                if LEAD_INS.contains(&word.to_lowercase().as_str()) {
                    start = body_start + head.len() - word.len();
                }
            }
        }
        cut.push(Span::new(start, m.span.end));
    }
    cut.sort_by_key(|s| s.start);
    let mut out = String::new();
    let mut pos = body_start;
    for s in cut {
        if s.end <= pos {
            continue;
        }
        out.push_str(&text[pos..s.start.max(pos)]);
        out.push(' ');
        pos = s.end;
    }
    out.push_str(&text[pos..]);
    let out = out.replace(',', " ").replace("( )", " ").replace("()", " ").replace(" – ", " ");
    let out = text::collapse_whitespace(&out);
    out.trim_start_matches(['–', '-', ' ']).trim_end_matches(['.', ' ']).to_string()
}

/// "What {answer type} {main}, {conjunction}, {implicit}?"
pub fn assemble_pseudo(index: &CorpusIndex, pair: &SnippetPair) -> String {
    let answer_type = index
        .entities()
        .get(&pair.answer)
        .and_then(|e| e.primary_type().map(str::to_string))
        .unwrap_or_else(|| "entity".into());
    let answer_spans: Vec<Span> = pair
        .main
        .evidence
        .entities
        .iter()
        .filter(|a| a.entity == pair.answer && a.span.start >= pair.main.evidence.body_start)
        .map(|a| a.span)
        .collect();
    let main = strip_part(&pair.main.evidence, &answer_spans);
    let implicit = strip_part(&pair.implicit.evidence, &[]);
    format!("What {answer_type} {main}, {}, {implicit}?", pair.conjunction)
}

/// Leaves the pseudo-question as is, with punctuation tidied.
#[derive(Debug, Clone, Copy, Default)]
pub struct PassthroughRephraser;

impl Rephraser for PassthroughRephraser {
    fn name(&self) -> &str {
        "passthrough"
    }

    fn rephrase(&self, pseudo: &str) -> Result<String> {
        Ok(tidy(pseudo))
    }

    fn is_natural(&self) -> bool {
        false
    }
}

/// Remote text-in/text-out rephrasing.
#[derive(Debug, Clone)]
pub struct HttpRephraser {
    endpoint: HttpEndpoint,
}

impl HttpRephraser {
    pub fn new(url: &str, timeout: Duration) -> Self {
        Self { endpoint: HttpEndpoint::new(url, timeout) }
    }
}

impl Rephraser for HttpRephraser {
    fn name(&self) -> &str {
        "http"
    }

    fn rephrase(&self, pseudo: &str) -> Result<String> {
        self.endpoint.transform(pseudo)
    }

    fn is_natural(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rephrased {
    pub text: String,
    pub natural: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Rephrases; on failure falls back to passthrough with a warning.
pub fn rephrase(pseudo: &str, rephraser: &dyn Rephraser) -> Rephrased {
    match rephraser.rephrase(pseudo) {
        Ok(text) if !text.trim().is_empty() => Rephrased { text, natural: rephraser.is_natural(), warning: None },
        Ok(_) => Rephrased {
            text: tidy(pseudo),
            natural: false,
            warning: Some(format!("{} rephraser returned empty output", rephraser.name())),
        },
        Err(e) => {
            log::warn!("rephrasing failed, using passthrough: {e}");
            Rephrased { text: tidy(pseudo), natural: false, warning: Some(e.to_string()) }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemAnswer {
    pub label: String,
    pub aliases: Vec<String>,
    pub id: EntityId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnippetRef {
    pub provenance: Provenance,
    pub source: SourceKind,
}

impl SnippetRef {
    fn of(e: &Evidence) -> Self {
        Self { provenance: e.provenance.clone(), source: e.source }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkItem {
    pub id: String,
    pub question: String,
    pub pseudo_question: String,
    pub natural: bool,
    pub answer: ItemAnswer,
    pub main: SnippetRef,
    pub main_value: TemporalValue,
    pub implicit: SnippetRef,
    pub implicit_value: TemporalValue,
    pub conjunction: Conjunction,
    pub distractors: Vec<SnippetRef>,
    pub topic: EntityId,
    pub question_entities: Vec<EntityId>,
    pub signal: TemporalSignal,
    pub reference_time: TimePoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Runs the whole generator and returns items in generation order.
pub fn generate(
    index: &CorpusIndex,
    parser: &TempexParser,
    stopwords: &Stopwords,
    rephraser: &dyn Rephraser,
    config: &ForgeConfig,
    sigma: f64,
    seed: u64,
) -> Result<Vec<BenchmarkItem>> {
    let mut topics: Vec<Entity> = match config.topics {
        Some(n) => sample_topics(index, n, config.quotas, config.type_cap, seed)?
            .into_iter()
            .map(|t| t.entity)
            .collect(),
        None => index.entities().iter().filter(|e| !e.is_year_page()).cloned().collect(),
    };
    topics.sort_by(|a, b| a.id.cmp(&b.id));
    let mut items = Vec::new();
    for topic in &topics {
        let snippets = gather_snippets(index, parser, topic, config.reference_time);
        if snippets.len() < 2 {
            continue;
        }
        let mut seen = BTreeSet::new();
        let mut taken = 0;
        for conjunction in Conjunction::ALL {
            for pair in pair_snippets(index, &topic.id, &snippets, conjunction, sigma, stopwords) {
                if taken == config.max_per_topic {
                    break;
                }
                // one question per main snippet and answer
                if !seen.insert((pair.main.evidence.id, pair.answer.clone())) {
                    continue;
                }
                taken += 1;
                items.push(build_item(index, pair, topic, rephraser, config.reference_time, items.len()));
            }
        }
    }
    Ok(items)
}

fn build_item(
    index: &CorpusIndex,
    pair: SnippetPair,
    topic: &Entity,
    rephraser: &dyn Rephraser,
    reference_time: TimePoint,
    n: usize,
) -> BenchmarkItem {
    let pseudo = assemble_pseudo(index, &pair);
    let rephrased = rephrase(&pseudo, rephraser);
    let answer = index.entities().get(&pair.answer).expect("answer entity is indexed");
    let mut question_entities: Vec<EntityId> = Vec::new();
    for id in pair.main.evidence.entity_ids().into_iter().chain(pair.implicit.evidence.entity_ids()) {
        if *id != pair.answer && !question_entities.contains(id) {
            question_entities.push(id.clone());
        }
    }
    BenchmarkItem {
        id: format!("forge-{n:05}"),
        question: rephrased.text,
        pseudo_question: pseudo,
        natural: rephrased.natural,
        answer: ItemAnswer { label: answer.label.clone(), aliases: answer.aliases.clone(), id: answer.id.clone() },
        main: SnippetRef::of(&pair.main.evidence),
        main_value: pair.main.value,
        implicit: SnippetRef::of(&pair.implicit.evidence),
        implicit_value: pair.implicit.value,
        conjunction: pair.conjunction,
        distractors: pair.distractors.iter().map(|d| SnippetRef::of(&d.evidence)).collect(),
        topic: topic.id.clone(),
        question_entities,
        signal: pair.conjunction.signal(),
        reference_time,
        warning: rephrased.warning,
    }
}

/// Re-checks an item against the corpus; returns the failed checks.
pub fn revalidate(item: &BenchmarkItem, index: &CorpusIndex, parser: &TempexParser) -> Vec<String> {
    let mut failures = Vec::new();
    let value_of = |r: &SnippetRef| {
        index
            .reverbalize(&r.provenance)
            .map(|e| e.with_mentions(parser, item.reference_time))
            .and_then(|e| e.temporal_mentions.first().map(|m| m.value))
    };
    match (value_of(&item.main), value_of(&item.implicit)) {
        (Some(m), Some(i)) => {
            if m != item.main_value || i != item.implicit_value {
                failures.push("stored temporal values differ from the corpus".into());
            }
            if !item.conjunction.consistent(&m, &i) {
                failures.push(format!("`{}` is inconsistent for {m} and {i}", item.conjunction));
            }
        }
        _ => failures.push("main or implicit provenance does not resolve to a dated snippet".into()),
    }
    if item.distractors.is_empty() {
        failures.push("no distractor".into());
    }
    for d in &item.distractors {
        if index.reverbalize(&d.provenance).is_none() {
            failures.push(format!("distractor {} does not resolve", d.provenance));
        }
    }
    let q = item.question.to_lowercase();
    for form in std::iter::once(&item.answer.label).chain(&item.answer.aliases) {
        if q.contains(&form.to_lowercase()) {
            failures.push(format!("answer `{form}` occurs in the question"));
        }
    }
    if item.signal != item.conjunction.signal() {
        failures.push("signal does not match the conjunction".into());
    }
    failures
}

/// An intermediate-question training pair derived from an item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainPair {
    pub item: String,
    pub intermediate_question: String,
    pub value: TemporalValue,
}

pub fn train_pairs(items: &[BenchmarkItem], index: &CorpusIndex) -> Vec<TrainPair> {
    items
        .iter()
        .filter_map(|item| {
            let e = index.reverbalize(&item.implicit.provenance)?;
            let body = strip_part(&e.with_mentions(&TempexParser::default(), item.reference_time), &[]);
            Some(TrainPair {
                item: item.id.clone(),
                intermediate_question: format!("when {body}?"),
                value: item.implicit_value,
            })
        })
        .collect()
}

/// Split sizes for `n` items: train and dev rounded, test takes the rest.
pub fn split_sizes(n: usize, ratios: [f64; 3]) -> [usize; 3] {
    let train = ((n as f64) * ratios[0]).round() as usize;
    let dev = (((n as f64) * ratios[1]).round() as usize).min(n - train.min(n));
    let train = train.min(n);
    [train, dev, n - train - dev]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emitted {
    pub train: PathBuf,
    pub dev: PathBuf,
    pub test: PathBuf,
    pub train_pairs: PathBuf,
    pub sizes: [usize; 3],
}

/// Sorts by id, shuffles with `seed` and writes train/dev/test JSONL plus
/// the intermediate-question training pairs.
pub fn emit(
    items: &[BenchmarkItem],
    index: &CorpusIndex,
    ratios: [f64; 3],
    seed: u64,
    out_dir: &Path,
) -> Result<Emitted> {
    if ratios.iter().any(|r| *r < 0.0) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Argument(format!("split ratios {ratios:?} must be non-negative and sum to 1")));
    }
    let mut sorted: Vec<&BenchmarkItem> = items.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let sizes = split_sizes(sorted.len(), ratios);
    fs::create_dir_all(out_dir)?;
    let write = |name: &str, part: &[&BenchmarkItem]| -> Result<PathBuf> {
        let path = out_dir.join(name);
        let mut body = String::new();
        for item in part {
            body.push_str(&serde_json::to_string(item)?);
            body.push('\n');
        }
        fs::write(&path, body)?;
        Ok(path)
    };
    let (train, rest) = sorted.split_at(sizes[0]);
    let (dev, test) = rest.split_at(sizes[1]);
    let pairs_path = out_dir.join("train_pairs.jsonl");
    let owned: Vec<BenchmarkItem> = train.iter().map(|i| (*i).clone()).collect();
    let mut pairs = String::new();
    for p in train_pairs(&owned, index) {
        pairs.push_str(&serde_json::to_string(&p)?);
        pairs.push('\n');
    }
    fs::write(&pairs_path, pairs)?;
    Ok(Emitted {
        train: write("train.jsonl", train)?,
        dev: write("dev.jsonl", dev)?,
        test: write("test.jsonl", test)?,
        train_pairs: pairs_path,
        sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands_follow_fact_thresholds() {
        assert_eq!(Band::of(0), Band::LongTail);
        assert_eq!(Band::of(19), Band::LongTail);
        assert_eq!(Band::of(20), Band::Mid);
        assert_eq!(Band::of(500), Band::Mid);
        assert_eq!(Band::of(501), Band::Prominent);
    }

    #[test]
    fn split_sizes_round() {
        assert_eq!(split_sizes(10, [0.6, 0.2, 0.2]), [6, 2, 2]);
        assert_eq!(split_sizes(10_000, [0.6, 0.2, 0.2]), [6000, 2000, 2000]);
        assert_eq!(split_sizes(7, [1.0, 0.0, 0.0]), [7, 0, 0]);
        assert_eq!(split_sizes(0, [0.6, 0.2, 0.2]), [0, 0, 0]);
    }

    #[test]
    fn conjunction_consistency() {
        let y = |y| TemporalValue::year(y).unwrap();
        let dec2003 = TemporalValue::Point(TimePoint::month(2003, 12).unwrap());
        assert!(Conjunction::During.consistent(&dec2003, &y(2003)));
        assert!(!Conjunction::Before.consistent(&dec2003, &y(2003)));
        assert!(!Conjunction::After.consistent(&dec2003, &y(2003)));
        assert!(Conjunction::Before.consistent(&y(2001), &y(2003)));
        assert!(Conjunction::After.consistent(&y(2007), &y(2003)));
        assert_eq!(Conjunction::After.signal(), TemporalSignal::After);
    }

    #[test]
    fn passthrough_is_not_natural() {
        let r = rephrase("What x  ,  during, y ?", &PassthroughRephraser);
        assert_eq!(r.text, "What x, during, y?");
        assert!(!r.natural);
        assert!(r.warning.is_none());
    }

    #[test]
    fn failing_endpoint_falls_back() {
        let r = rephrase("What x, during, y?", &HttpRephraser::new("http://127.0.0.1:9/", Duration::from_millis(200)));
        assert!(!r.natural);
        assert!(r.warning.is_some());
    }
}
