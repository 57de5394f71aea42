use std::fmt;

use serde::{Deserialize, Serialize};

use super::schema::EntityId;
use crate::tempex::{Span, TempexParser, TemporalMention};
use crate::temporal::TimePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SourceKind {
    Kb,
    Infobox,
    Table,
    Text,
}

impl SourceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceKind::Kb => "KB",
            SourceKind::Infobox => "INFOBOX",
            SourceKind::Table => "TABLE",
            SourceKind::Text => "TEXT",
        }
    }

    pub fn file_name(&self) -> &'static str {
        match self {
            SourceKind::Kb => "kb_facts.jsonl",
            SourceKind::Infobox => "infoboxes.jsonl",
            SourceKind::Table => "tables.jsonl",
            SourceKind::Text => "text.jsonl",
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvidenceId(pub u32);

impl fmt::Display for EvidenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ev{:05}", self.0)
    }
}

/// Locates the source record an evidence snippet was verbalized from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub source: SourceKind,
    /// 1-based line in the source file.
    pub line: usize,
    /// Row, entry or sentence index inside the record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item: Option<usize>,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.source.file_name(), self.line)?;
        if let Some(i) = self.item {
            write!(f, "#{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityAnnotation {
    pub entity: EntityId,
    pub span: Span,
}

/// A verbalized information snippet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub id: EvidenceId,
    pub text: String,
    pub source: SourceKind,
    pub entities: Vec<EntityAnnotation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub temporal_mentions: Vec<TemporalMention>,
    pub provenance: Provenance,
    /// Where the snippet body starts; text sentences carry a page-label prefix.
    #[serde(default)]
    pub body_start: usize,
}

impl Evidence {
    pub fn body(&self) -> &str {
        &self.text[self.body_start..]
    }

    pub fn mentions_entity(&self, id: &EntityId) -> bool {
        self.entities.iter().any(|a| &a.entity == id)
    }

    /// Distinct annotated entities in order of first occurrence.
    pub fn entity_ids(&self) -> Vec<&EntityId> {
        let mut out: Vec<&EntityId> = Vec::new();
        for a in &self.entities {
            if !out.contains(&&a.entity) {
                out.push(&a.entity);
            }
        }
        out
    }

    /// Copy with temporal mentions extracted against `reference_time`.
    pub fn with_mentions(&self, parser: &TempexParser, reference_time: TimePoint) -> Evidence {
        let mut e = self.clone();
        e.temporal_mentions = parser.extract_mentions(&e.text, reference_time);
        e
    }
}
