//! Corpus data model, ingestion, verbalization and entity-indexed retrieval.

pub mod entities;
pub mod evidence;
pub mod index;
pub mod schema;
pub mod verbalize;

pub use entities::{EntityTable, LinkerResult};
pub use evidence::{EntityAnnotation, Evidence, EvidenceId, Provenance, SourceKind};
pub use index::{CorpusIndex, Records};
pub use schema::{Entity, EntityId, InfoboxEntry, KbFact, TableRow, TextRecord, ValueRef};
