//! Answer candidates, ranking, the end-to-end pipeline and trace rendering.

mod pipeline;
mod trace;

use serde::{Deserialize, Serialize};

pub use pipeline::{AnswerOptions, Pipeline};
pub use trace::render_trace;

use crate::config::{Mode, RankWeights};
use crate::retrieval::lexical_overlap;
use crate::store::{EntityId, EntityTable, Evidence, EvidenceId};
use crate::tempex::TemporalMention;
use crate::temporal::TemporalValue;
use crate::text::Stopwords;
use crate::understanding::{TraceStep, Tsf};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum AnswerValue {
    #[serde(rename = "ENTITY")]
    Entity { id: EntityId, label: String },
    #[serde(rename = "TEMPORAL")]
    Temporal { value: TemporalValue },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerCandidate {
    #[serde(flatten)]
    pub value: AnswerValue,
    pub score: f64,
    pub supporting_evidence: Vec<EvidenceId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub types: Vec<String>,
}

impl AnswerCandidate {
    pub fn label(&self) -> String {
        match &self.value {
            AnswerValue::Entity { label, .. } => label.clone(),
            AnswerValue::Temporal { value } => value.to_string(),
        }
    }

    pub fn entity_id(&self) -> Option<&EntityId> {
        match &self.value {
            AnswerValue::Entity { id, .. } => Some(id),
            AnswerValue::Temporal { .. } => None,
        }
    }

    pub fn temporal(&self) -> Option<TemporalValue> {
        match self.value {
            AnswerValue::Temporal { value } => Some(value),
            AnswerValue::Entity { .. } => None,
        }
    }
}

/// Evidence ids at each pipeline stage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stages {
    pub linked: Vec<EntityId>,
    pub retrieved: Vec<EvidenceId>,
    pub pruned: Vec<EvidenceId>,
    pub cut: Vec<EvidenceId>,
}

/// The retrieved mention closest to a violated constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearMiss {
    pub evidence: EvidenceId,
    pub text: String,
    pub mention: TemporalMention,
    pub distance_days: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QAResult {
    pub question: String,
    pub tsf: Tsf,
    pub answers: Vec<AnswerCandidate>,
    pub refused: bool,
    pub mode: Mode,
    pub fallback_used: bool,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default)]
    pub trace: Vec<TraceStep>,
    #[serde(default)]
    pub stages: Stages,
    /// Snippets that survived the cutoff, with temporal mentions.
    #[serde(default)]
    pub evidence: Vec<Evidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near_miss: Option<NearMiss>,
}

impl QAResult {
    pub fn top(&self) -> Option<&AnswerCandidate> {
        self.answers.first()
    }

    pub fn evidence_by_id(&self, id: EvidenceId) -> Option<&Evidence> {
        self.evidence.iter().find(|e| e.id == id)
    }

    /// Supporting snippets of the answer at 1-based `rank`.
    pub fn supporting(&self, rank: usize) -> Vec<&Evidence> {
        rank.checked_sub(1)
            .and_then(|i| self.answers.get(i))
            .map(|a| a.supporting_evidence.iter().filter_map(|id| self.evidence_by_id(*id)).collect())
            .unwrap_or_default()
    }
}

/// Candidates from post-cut evidence: temporal mentions for temporal
/// questions, otherwise annotated entities other than the question's.
pub fn extract_candidates(
    evidences: &[Evidence],
    tsf: &Tsf,
    question_entities: &[EntityId],
    entities: &EntityTable,
) -> Vec<AnswerCandidate> {
    let mut out: Vec<AnswerCandidate> = Vec::new();
    let support = |out: &mut Vec<AnswerCandidate>, pos: Option<usize>, value: AnswerValue, types: Vec<String>, ev: EvidenceId| {
        match pos {
            Some(i) => {
                if !out[i].supporting_evidence.contains(&ev) {
                    out[i].supporting_evidence.push(ev);
                }
            }
            None => out.push(AnswerCandidate { value, score: 0.0, supporting_evidence: vec![ev], types }),
        }
    };
    if tsf.expects_temporal() {
        let role = tsf.role();
        for e in evidences {
            for m in &e.temporal_mentions {
                let v = role.project(&m.value);
                let pos = out.iter().position(|c| c.temporal().map(|t| t.expand()) == Some(v.expand()));
                support(&mut out, pos, AnswerValue::Temporal { value: v }, Vec::new(), e.id);
            }
        }
    } else {
        for e in evidences {
            for id in e.entity_ids() {
                if question_entities.contains(id) {
                    continue;
                }
                let pos = out.iter().position(|c| c.entity_id() == Some(id));
                let (label, types) = entities
                    .get(id)
                    .map(|x| (x.label.clone(), x.types.clone()))
                    .unwrap_or_else(|| (id.to_string(), Vec::new()));
                support(&mut out, pos, AnswerValue::Entity { id: id.clone(), label }, types, e.id);
            }
        }
    }
    out
}

/// Scores and orders candidates. Ties go to finer, earlier temporal values,
/// then label, then id.
pub fn rank(
    mut candidates: Vec<AnswerCandidate>,
    tsf: &Tsf,
    evidences: &[Evidence],
    weights: &RankWeights,
    stopwords: &Stopwords,
) -> Vec<AnswerCandidate> {
    let max_support = candidates.iter().map(|c| c.supporting_evidence.len()).max().unwrap_or(1).max(1);
    let query = tsf.query();
    let expected = tsf.expected_answer_type.to_lowercase();
    for c in &mut candidates {
        let overlap = c
            .supporting_evidence
            .iter()
            .filter_map(|id| evidences.iter().find(|e| e.id == *id))
            .map(|e| lexical_overlap(stopwords, &query, &e.text))
            .fold(0.0, f64::max);
        let type_match = match &c.value {
            AnswerValue::Temporal { .. } => tsf.expects_temporal(),
            AnswerValue::Entity { .. } => c.types.iter().any(|t| t.to_lowercase() == expected),
        };
        c.score = weights.support * (c.supporting_evidence.len() as f64 / max_support as f64)
            + weights.overlap * overlap
            + weights.type_match * if type_match { 1.0 } else { 0.0 };
    }
    candidates.sort_by(|a, b| {
        let temporal_key = |c: &AnswerCandidate| {
            c.temporal().map(|v| (std::cmp::Reverse(v.granularity()), v.expand().start_day))
        };
        b.score
            .total_cmp(&a.score)
            .then_with(|| temporal_key(a).cmp(&temporal_key(b)))
            .then_with(|| a.label().cmp(&b.label()))
            .then_with(|| a.entity_id().cmp(&b.entity_id()))
    });
    candidates
}
