//! JSONL record schemas for corpus files.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        EntityId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entity {
    pub id: EntityId,
    pub label: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    /// Type labels, most frequent first.
    #[serde(default)]
    pub types: Vec<String>,
    #[serde(default)]
    pub fact_count: u64,
}

impl Entity {
    /// Label followed by aliases, without duplicates.
    pub fn surface_forms(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.label.as_str())
            .chain(self.aliases.iter().map(String::as_str).filter(move |a| *a != self.label))
    }

    pub fn primary_type(&self) -> Option<&str> {
        self.types.first().map(String::as_str)
    }

    /// Reserved entities whose text records list notable events of a year.
    pub fn is_year_page(&self) -> bool {
        self.types.iter().any(|t| t == YEAR_PAGE_TYPE)
    }
}

pub const YEAR_PAGE_TYPE: &str = "year page";

/// An entity reference or a literal value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<EntityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal: Option<String>,
}

impl ValueRef {
    pub fn entity(id: impl Into<String>) -> Self {
        Self { id: Some(EntityId::new(id)), literal: None }
    }

    pub fn literal(value: impl Into<String>) -> Self {
        Self { id: None, literal: Some(value.into()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Qualifier {
    pub predicate: String,
    pub value: ValueRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KbFact {
    pub subject: EntityId,
    pub predicate: String,
    pub object: ValueRef,
    #[serde(default)]
    pub qualifiers: Vec<Qualifier>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Anchor {
    /// Byte offsets into the page text.
    pub span: [usize; 2],
    pub entity: EntityId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextRecord {
    pub entity: EntityId,
    pub page_title: String,
    pub text: String,
    #[serde(default)]
    pub anchors: Vec<Anchor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRecord {
    pub entity: EntityId,
    pub table_id: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// One row of a table, paired with its page entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub page_entity: EntityId,
    pub headers: Vec<String>,
    pub cells: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoboxEntryRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<String>,
    pub attribute: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoboxRecord {
    pub entity: EntityId,
    pub entries: Vec<InfoboxEntryRecord>,
}

/// A single infobox attribute-value pair of an entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoboxEntry {
    pub entity: EntityId,
    pub section: Option<String>,
    pub attribute: String,
    pub value: String,
}
