//! Frame linking, heterogeneous retrieval, temporal pruning and scored cutoff.

use std::collections::BTreeSet;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::http::HttpEndpoint;
use crate::store::{CorpusIndex, EntityId, EntityTable, Evidence};
use crate::strategy::EvidenceScorer;
use crate::tempex::TempexParser;
use crate::temporal::{satisfies, TemporalConstraint, TemporalSignal};
use crate::text::Stopwords;
use crate::understanding::Tsf;

pub const DEFAULT_CUTOFF: usize = 100;

/// Links the frame's concatenated text; entities in order of first match.
pub fn link(tsf: &Tsf, entities: &EntityTable) -> Vec<EntityId> {
    let mut out: Vec<EntityId> = Vec::new();
    for hit in entities.link(&tsf.query()) {
        if !out.contains(&hit.entity) {
            out.push(hit.entity);
        }
    }
    out
}

/// Evidence of all linked entities, deduplicated, in evidence id order, with
/// temporal mentions computed against the frame's reference time.
pub fn retrieve(index: &CorpusIndex, linked: &[EntityId], parser: &TempexParser, tsf: &Tsf) -> Vec<Evidence> {
    let mut seen = BTreeSet::new();
    let mut hits: Vec<&Evidence> = linked
        .iter()
        .flat_map(|id| index.retrieve_by_entity(id))
        .filter(|e| seen.insert(e.id))
        .collect();
    hits.sort_by_key(|e| e.id);
    hits.into_iter().map(|e| e.with_mentions(parser, tsf.reference_time)).collect()
}

/// Whether a snippet has a mention satisfying any of the constraints.
pub fn satisfies_any(e: &Evidence, constraints: &[TemporalConstraint]) -> bool {
    e.temporal_mentions
        .iter()
        .any(|m| constraints.iter().any(|c| satisfies(&m.value, c)))
}

/// Drops snippets that cannot support a faithful answer. Temporal lookups
/// without a constraint keep dated snippets; constrained frames keep snippets
/// with a satisfying mention; anything else passes through.
pub fn temporal_prune(evidences: &[Evidence], tsf: &Tsf) -> Vec<Evidence> {
    let constraints = tsf.constraints();
    if !constraints.is_empty() {
        evidences.iter().filter(|e| satisfies_any(e, &constraints)).cloned().collect()
    } else if tsf.signal == TemporalSignal::None && tsf.expects_temporal() {
        evidences.iter().filter(|e| !e.temporal_mentions.is_empty()).cloned().collect()
    } else {
        evidences.to_vec()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub evidence: Evidence,
    pub score: f64,
}

/// Keeps the `k` best-scoring snippets; ties by evidence id.
pub fn score_and_cut(
    evidences: Vec<Evidence>,
    query: &str,
    k: usize,
    scorer: &dyn EvidenceScorer,
) -> Result<Vec<Scored>> {
    if k == 0 {
        return Err(Error::Argument("cutoff k must be at least 1".into()));
    }
    let mut scored = evidences
        .into_iter()
        .map(|e| Ok(Scored { score: scorer.score(query, &e)?, evidence: e }))
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.evidence.id.cmp(&b.evidence.id)));
    scored.truncate(k);
    Ok(scored)
}

/// Fraction of the query's content tokens found in the text.
pub fn lexical_overlap(stopwords: &Stopwords, query: &str, text: &str) -> f64 {
    let q = stopwords.content_tokens(query);
    if q.is_empty() {
        return 0.0;
    }
    let t = stopwords.content_tokens(text);
    q.intersection(&t).count() as f64 / q.len() as f64
}

#[derive(Debug, Clone, Default)]
pub struct LexicalScorer {
    stopwords: Stopwords,
}

impl LexicalScorer {
    pub fn new(stopwords: Stopwords) -> Self {
        Self { stopwords }
    }
}

impl EvidenceScorer for LexicalScorer {
    fn name(&self) -> &str {
        "lexical"
    }

    fn score(&self, query: &str, evidence: &Evidence) -> Result<f64> {
        Ok(lexical_overlap(&self.stopwords, query, &evidence.text))
    }
}

#[derive(Debug, Clone)]
pub struct HttpScorer {
    endpoint: HttpEndpoint,
}

impl HttpScorer {
    pub fn new(url: &str, timeout: Duration) -> Self {
        Self { endpoint: HttpEndpoint::new(url, timeout) }
    }
}

impl EvidenceScorer for HttpScorer {
    fn name(&self) -> &str {
        "http"
    }

    fn score(&self, query: &str, evidence: &Evidence) -> Result<f64> {
        self.endpoint.score(query, &evidence.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{EvidenceId, Provenance, SourceKind};
    use crate::temporal::{TemporalValue, TimePoint};
    use crate::understanding::Category;

    fn ev(id: u32, text: &str) -> Evidence {
        let e = Evidence {
            id: EvidenceId(id),
            text: text.into(),
            source: SourceKind::Text,
            entities: vec![],
            temporal_mentions: vec![],
            provenance: Provenance { source: SourceKind::Text, line: 1, item: Some(0) },
            body_start: 0,
        };
        e.with_mentions(&TempexParser::default(), TimePoint::day(2023, 1, 1).unwrap())
    }

    fn frame(signal: TemporalSignal, values: &[&str], answer_type: &str) -> Tsf {
        Tsf {
            entity_phrases: vec!["Thomas Keneally".into()],
            relation_phrase: "award".into(),
            expected_answer_type: answer_type.into(),
            signal,
            category: Category::NonImplicit,
            temporal_values: values.iter().map(|v| v.parse::<TemporalValue>().unwrap()).collect(),
            reference_time: TimePoint::day(2023, 1, 1).unwrap(),
        }
    }

    #[test]
    fn prune_cases() {
        let evs = vec![
            ev(0, "Thomas Keneally, which won the Booker Prize in 1982."),
            ev(1, "Thomas Keneally, Keneally was born in 1935."),
            ev(2, "Thomas Keneally, He is an Australian novelist."),
        ];
        let kept = temporal_prune(&evs, &frame(TemporalSignal::Overlap, &["1982"], "award"));
        assert_eq!(kept.iter().map(|e| e.id.0).collect::<Vec<_>>(), vec![0]);
        let kept = temporal_prune(&evs, &frame(TemporalSignal::None, &[], "date"));
        assert_eq!(kept.len(), 2);
        let kept = temporal_prune(&evs, &frame(TemporalSignal::None, &[], "award"));
        assert_eq!(kept, evs);
        let kept = temporal_prune(&evs, &frame(TemporalSignal::After, &["1946/1949", "1930"], "award"));
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn after_keeps_adjacent_granule() {
        let evs = vec![ev(0, "Antoine Raab, Managerial career, 1949–1950, Stade Lavallois")];
        let kept = temporal_prune(&evs, &frame(TemporalSignal::After, &["1946/1949"], "football club"));
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn cut_orders_and_truncates() {
        let scorer = LexicalScorer::default();
        let evs = vec![
            ev(0, "Thomas Keneally, He is an Australian novelist."),
            ev(1, "Man Booker Prize, winner, Thomas Keneally, point in time, 1982"),
            ev(2, "Thomas Keneally, He is an Australian novelist."),
        ];
        let cut = score_and_cut(evs.clone(), "Thomas Keneally award 1982", 100, &scorer).unwrap();
        assert_eq!(cut.iter().map(|s| s.evidence.id.0).collect::<Vec<_>>(), vec![1, 0, 2]);
        let cut = score_and_cut(evs.clone(), "Thomas Keneally award 1982", 2, &scorer).unwrap();
        assert_eq!(cut.len(), 2);
        assert!(score_and_cut(evs, "q", 0, &scorer).is_err());
    }
}
