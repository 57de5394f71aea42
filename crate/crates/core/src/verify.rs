//! Four-part faithfulness check over an answer's supporting evidence.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::answering::QAResult;
use crate::error::{Error, Result};
use crate::eval::{evidence_contains_answer, GoldAnswer};
use crate::store::{EntityTable, Evidence};
use crate::tempex::TempexParser;
use crate::temporal::{satisfies, TemporalSignal};
use crate::text::{self, Stopwords};

const DEFAULT_SYNONYMS: [(&str, &str); 22] = [
    ("starring", "role"),
    ("starring", "cast"),
    ("movie", "film"),
    ("movie", "title"),
    ("award", "prize"),
    ("award", "winner"),
    ("receive", "winner"),
    ("receive", "won"),
    ("company", "label"),
    ("marry", "spouse"),
    ("marry", "married"),
    ("club", "team"),
    ("managing", "coach"),
    ("managing", "managerial"),
    ("singer", "vocalist"),
    ("singer", "member"),
    ("song", "single"),
    ("founded", "inception"),
    ("born", "birth"),
    ("died", "death"),
    ("recording", "recorded"),
    ("president", "office"),
];

/// Symmetric token synonym table over stems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synonyms(BTreeMap<String, BTreeSet<String>>);

impl Default for Synonyms {
    fn default() -> Self {
        Self::from_pairs(DEFAULT_SYNONYMS.iter().map(|(a, b)| (a.to_string(), b.to_string())))
    }
}

impl Synonyms {
    pub fn empty() -> Self {
        Self(BTreeMap::new())
    }

    pub fn from_pairs<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Self {
        let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (a, b) in pairs {
            let (a, b) = (text::stem(&a), text::stem(&b));
            map.entry(a.clone()).or_default().insert(b.clone());
            map.entry(b).or_default().insert(a);
        }
        Self(map)
    }

    /// One `word<TAB>synonym[, synonym]*` entry per line; `#` starts a comment.
    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path)?;
        let mut pairs = Vec::new();
        for (i, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, syns) = line.split_once('\t').ok_or_else(|| {
                Error::Config(format!("{}:{}: expected `word<TAB>synonyms`", path.display(), i + 1))
            })?;
            for s in syns.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                pairs.push((word.trim().to_string(), s.to_string()));
            }
        }
        Ok(Self::from_pairs(pairs))
    }

    pub fn of(&self, stem: &str) -> impl Iterator<Item = &String> {
        self.0.get(stem).into_iter().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub answer_present: bool,
    pub entities_present: bool,
    pub predicate_present: bool,
    pub temporal_satisfied: bool,
    pub faithful: bool,
    pub justifications: Justifications,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Justifications {
    pub answer: String,
    pub entities: String,
    pub predicate: String,
    pub temporal: String,
}

#[derive(Debug, Clone)]
pub struct Verifier<'a> {
    entities: &'a EntityTable,
    parser: &'a TempexParser,
    stopwords: &'a Stopwords,
    synonyms: Synonyms,
    theta: f64,
}

impl<'a> Verifier<'a> {
    pub fn new(entities: &'a EntityTable, parser: &'a TempexParser, stopwords: &'a Stopwords, synonyms: Synonyms, theta: f64) -> Self {
        Self { entities, parser, stopwords, synonyms, theta }
    }

    /// Checks the answer at 1-based `rank` against the union of its
    /// supporting snippets.
    pub fn verify(&self, result: &QAResult, rank: usize) -> Result<FaithfulnessReport> {
        if rank == 0 || rank > result.answers.len() {
            return Err(Error::Argument(format!(
                "rank {rank} outside 1..={} for `{}`",
                result.answers.len(),
                result.question
            )));
        }
        let candidate = &result.answers[rank - 1];
        let gold = GoldAnswer::from_candidate(candidate, self.entities);
        Ok(self.check(result, &gold, &result.supporting(rank)))
    }

    /// The four criteria for an arbitrary answer and snippet set.
    pub fn check(&self, result: &QAResult, answer: &GoldAnswer, snippets: &[&Evidence]) -> FaithfulnessReport {
        let tsf = &result.tsf;
        if snippets.is_empty() {
            let none = "no supporting evidence".to_string();
            return FaithfulnessReport {
                answer_present: false,
                entities_present: false,
                predicate_present: false,
                temporal_satisfied: false,
                faithful: false,
                justifications: Justifications {
                    answer: none.clone(),
                    entities: none.clone(),
                    predicate: none.clone(),
                    temporal: none,
                },
            };
        }

        let hit = snippets.iter().find(|e| evidence_contains_answer(answer, e, self.entities));
        let answer_present = hit.is_some();
        let answer_why = match hit {
            Some(e) => format!("`{}` found in {}", answer.primary_label(), e.id),
            None => format!("`{}` absent from evidence", answer.primary_label()),
        };

        let mut missing = Vec::new();
        for phrase in &tsf.entity_phrases {
            if !self.phrase_present(phrase, snippets) {
                missing.push(phrase.as_str());
            }
        }
        let entities_present = missing.is_empty();
        let entities_why = if entities_present {
            format!("all {} question entities present", tsf.entity_phrases.len())
        } else {
            format!("missing: {}", missing.join(", "))
        };

        let (predicate_present, predicate_why) = self.predicate(&tsf.relation_phrase, snippets);

        let constraints = tsf.constraints();
        let (temporal_satisfied, temporal_why) = if !constraints.is_empty() {
            let found = snippets.iter().find_map(|e| {
                e.temporal_mentions
                    .iter()
                    .find(|m| constraints.iter().any(|c| satisfies(&m.value, c)))
                    .map(|m| (e.id, m.surface.clone()))
            });
            let shown: Vec<String> = constraints.iter().map(|c| c.to_string()).collect();
            match found {
                Some((id, surface)) => (true, format!("`{surface}` in {id} satisfies {}", shown.join(" or "))),
                None => (false, format!("no mention satisfies {}", shown.join(" or "))),
            }
        } else if tsf.signal != TemporalSignal::None {
            (false, "constraint has no resolved temporal value".to_string())
        } else if tsf.expects_temporal() {
            let dated = snippets.iter().any(|e| !e.temporal_mentions.is_empty());
            (dated, if dated { "evidence carries a temporal expression" } else { "evidence carries no temporal expression" }.to_string())
        } else {
            (true, "no temporal constraint".to_string())
        };

        FaithfulnessReport {
            answer_present,
            entities_present,
            predicate_present,
            temporal_satisfied,
            faithful: answer_present && entities_present && predicate_present && temporal_satisfied,
            justifications: Justifications {
                answer: answer_why,
                entities: entities_why,
                predicate: predicate_why,
                temporal: temporal_why,
            },
        }
    }

    fn phrase_present(&self, phrase: &str, snippets: &[&Evidence]) -> bool {
        let ids: Vec<_> = self.entities.link(phrase).into_iter().map(|r| r.entity).collect();
        if ids.is_empty() {
            return snippets.iter().any(|e| text::contains_phrase(&e.text, phrase));
        }
        ids.iter().any(|id| {
            snippets.iter().any(|e| {
                e.mentions_entity(id)
                    || self
                        .entities
                        .get(id)
                        .map(|ent| ent.surface_forms().any(|f| text::contains_phrase(&e.text, f)))
                        .unwrap_or(false)
            })
        })
    }

    fn predicate(&self, relation: &str, snippets: &[&Evidence]) -> (bool, String) {
        let temporal = self.parser.mention_spans(relation);
        let rel: BTreeSet<String> = text::tokens(relation)
            .into_iter()
            .filter(|t| !temporal.iter().any(|s| s.start <= t.start && t.end <= s.end))
            .map(|t| t.text.to_lowercase())
            .filter(|t| !self.stopwords.contains(t))
            .map(|t| text::stem(&t))
            .collect();
        if rel.is_empty() {
            return (true, "relation has no content tokens".into());
        }
        let ev: BTreeSet<String> = snippets
            .iter()
            .flat_map(|e| text::lower_tokens(&e.text))
            .map(|t| text::stem(&t))
            .collect();
        let matched: Vec<&String> = rel
            .iter()
            .filter(|t| ev.contains(*t) || self.synonyms.of(t).any(|s| ev.contains(s)))
            .collect();
        let needed = (self.theta * rel.len() as f64).ceil() as usize;
        let ok = matched.len() >= needed;
        let shown: Vec<&str> = matched.iter().map(|s| s.as_str()).collect();
        (ok, format!("{}/{} relation tokens matched (need {needed}): {}", matched.len(), rel.len(), shown.join(", ")))
    }
}

/// Aggregate rates over answered results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub reports: Vec<Option<FaithfulnessReport>>,
    pub answered: usize,
    pub faithful: f64,
    pub temporally_unfaithful: f64,
}

pub fn verify_batch(verifier: &Verifier<'_>, results: &[QAResult]) -> Result<BatchReport> {
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(if r.refused || r.answers.is_empty() { None } else { Some(verifier.verify(r, 1)?) });
    }
    let answered: Vec<&FaithfulnessReport> = reports.iter().flatten().collect();
    let n = answered.len();
    let rate = |f: &dyn Fn(&FaithfulnessReport) -> bool| {
        if n == 0 {
            0.0
        } else {
            answered.iter().filter(|r| f(r)).count() as f64 / n as f64
        }
    };
    Ok(BatchReport {
        answered: n,
        faithful: rate(&|r| r.faithful),
        temporally_unfaithful: rate(&|r| !r.temporal_satisfied),
        reports,
    })
}
