//! JSONL ingestion and the entity-indexed evidence store.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::entities::EntityTable;
use super::evidence::{Evidence, EvidenceId, Provenance, SourceKind};
use super::schema::{
    Entity, EntityId, InfoboxEntry, InfoboxRecord, KbFact, TableRecord, TableRow, TextRecord,
    ValueRef,
};
use super::verbalize::Verbalizer;
use crate::error::{Error, Result};

pub const ENTITIES_FILE: &str = "entities.jsonl";

/// A parsed record together with its 1-based source line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lined<T> {
    pub line: usize,
    pub record: T,
}

/// Raw corpus records as read from the five JSONL files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Records {
    pub entities: Vec<Entity>,
    pub kb: Vec<Lined<KbFact>>,
    pub infoboxes: Vec<Lined<InfoboxRecord>>,
    pub tables: Vec<Lined<TableRecord>>,
    pub texts: Vec<Lined<TextRecord>>,
}

impl Records {
    /// Reads all corpus files in `dir`. A missing file contributes nothing.
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let entities = read_jsonl::<Entity>(&dir.join(ENTITIES_FILE))?;
        for e in &entities {
            if e.record.label.trim().is_empty() {
                return Err(schema(&dir.join(ENTITIES_FILE), e.line, "label", "label is empty"));
            }
        }
        Ok(Records {
            entities: entities.into_iter().map(|l| l.record).collect(),
            kb: read_jsonl(&dir.join(SourceKind::Kb.file_name()))?,
            infoboxes: read_jsonl(&dir.join(SourceKind::Infobox.file_name()))?,
            tables: read_jsonl(&dir.join(SourceKind::Table.file_name()))?,
            texts: read_jsonl(&dir.join(SourceKind::Text.file_name()))?,
        })
    }
}

fn schema(file: &Path, line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        file: file.to_path_buf(),
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

/// Field name quoted in a serde error message, if any.
fn field_of(message: &str) -> String {
    message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<record>".to_string())
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<Lined<T>>> {
    if !path.exists() {
        log::warn!("corpus file {} not found; treating as empty", path.display());
        return Ok(Vec::new());
    }
    let raw = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str::<T>(line).map_err(|e| {
            let msg = e.to_string();
            schema(path, i + 1, &field_of(&msg), msg)
        })?;
        out.push(Lined { line: i + 1, record });
    }
    Ok(out)
}

/// Immutable corpus index: entity table, evidence in id order, and
/// entity postings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusIndex {
    root: PathBuf,
    entities: EntityTable,
    records: Records,
    evidence: Vec<Evidence>,
    postings: BTreeMap<EntityId, Vec<EvidenceId>>,
}

impl CorpusIndex {
    /// Ingests the JSONL corpus under `dir`.
    pub fn ingest(dir: &Path) -> Result<Self> {
        let records = Records::read_dir(dir)?;
        Self::build(dir, records)
    }

    /// Builds an index from already parsed records. `root` is only used in
    /// error messages.
    pub fn build(root: &Path, records: Records) -> Result<Self> {
        let entities = EntityTable::new(records.entities.clone())?;
        validate(root, &entities, &records)?;
        let mut index = CorpusIndex {
            root: root.to_path_buf(),
            entities,
            records,
            evidence: Vec::new(),
            postings: BTreeMap::new(),
        };
        index.evidence = index.verbalize_all();
        for ev in &index.evidence {
            for id in ev.entity_ids() {
                index.postings.entry(id.clone()).or_default().push(ev.id);
            }
        }
        log::info!(
            "indexed {} entities, {} evidence snippets",
            index.entities.len(),
            index.evidence.len()
        );
        Ok(index)
    }

    fn verbalize_all(&self) -> Vec<Evidence> {
        let v = Verbalizer::new(&self.entities);
        let mut out: Vec<Evidence> = Vec::new();
        let next = |out: &Vec<Evidence>| EvidenceId(out.len() as u32);
        for l in &self.records.kb {
            let p = Provenance { source: SourceKind::Kb, line: l.line, item: None };
            out.push(v.verbalize_kb_fact(&l.record, next(&out), p));
        }
        for l in &self.records.infoboxes {
            for (i, entry) in infobox_entries(&l.record).iter().enumerate() {
                let p = Provenance { source: SourceKind::Infobox, line: l.line, item: Some(i) };
                out.push(v.verbalize_infobox(entry, next(&out), p));
            }
        }
        for l in &self.records.tables {
            for (i, row) in table_rows(&l.record).iter().enumerate() {
                let p = Provenance { source: SourceKind::Table, line: l.line, item: Some(i) };
                out.push(v.verbalize_table_row(row, next(&out), p));
            }
        }
        for l in &self.records.texts {
            let first = next(&out).0;
            out.extend(v.verbalize_text(&l.record, first, l.line));
        }
        out
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entities(&self) -> &EntityTable {
        &self.entities
    }

    pub fn records(&self) -> &Records {
        &self.records
    }

    pub fn evidence(&self) -> &[Evidence] {
        &self.evidence
    }

    pub fn get(&self, id: EvidenceId) -> Option<&Evidence> {
        self.evidence.get(id.0 as usize)
    }

    pub fn count(&self, kind: SourceKind) -> usize {
        self.evidence.iter().filter(|e| e.source == kind).count()
    }

    /// All evidence mentioning the entity, ordered KB, INFOBOX, TABLE, TEXT,
    /// then by ingestion order.
    pub fn retrieve_by_entity(&self, id: &EntityId) -> Vec<&Evidence> {
        self.postings
            .get(id)
            .map(|ids| ids.iter().map(|i| &self.evidence[i.0 as usize]).collect())
            .unwrap_or_default()
    }

    /// Re-verbalizes the source record named by a provenance locator.
    pub fn reverbalize(&self, p: &Provenance) -> Option<Evidence> {
        let v = Verbalizer::new(&self.entities);
        let id = self
            .evidence
            .iter()
            .find(|e| &e.provenance == p)
            .map(|e| e.id)
            .unwrap_or(EvidenceId(u32::MAX));
        match p.source {
            SourceKind::Kb => {
                let l = self.records.kb.iter().find(|l| l.line == p.line)?;
                Some(v.verbalize_kb_fact(&l.record, id, p.clone()))
            }
            SourceKind::Infobox => {
                let l = self.records.infoboxes.iter().find(|l| l.line == p.line)?;
                let entry = infobox_entries(&l.record).into_iter().nth(p.item?)?;
                Some(v.verbalize_infobox(&entry, id, p.clone()))
            }
            SourceKind::Table => {
                let l = self.records.tables.iter().find(|l| l.line == p.line)?;
                let row = table_rows(&l.record).into_iter().nth(p.item?)?;
                Some(v.verbalize_table_row(&row, id, p.clone()))
            }
            SourceKind::Text => {
                let l = self.records.texts.iter().find(|l| l.line == p.line)?;
                let item = p.item?;
                let mut ev = v.verbalize_text(&l.record, 0, l.line).into_iter().nth(item)?;
                ev.id = id;
                Some(ev)
            }
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

pub fn table_rows(t: &TableRecord) -> Vec<TableRow> {
    t.rows
        .iter()
        .map(|cells| TableRow {
            page_entity: t.entity.clone(),
            headers: t.headers.clone(),
            cells: cells.clone(),
        })
        .collect()
}

pub fn infobox_entries(r: &InfoboxRecord) -> Vec<InfoboxEntry> {
    r.entries
        .iter()
        .map(|e| InfoboxEntry {
            entity: r.entity.clone(),
            section: e.section.clone(),
            attribute: e.attribute.clone(),
            value: e.value.clone(),
        })
        .collect()
}

fn validate(root: &Path, entities: &EntityTable, r: &Records) -> Result<()> {
    let file = |k: SourceKind| root.join(k.file_name());
    let known = |id: &EntityId| entities.contains(id);
    let value_ok = |v: &ValueRef| match (&v.id, &v.literal) {
        (Some(id), None) => known(id),
        (None, Some(_)) => true,
        _ => false,
    };

    for l in &r.kb {
        let f = &l.record;
        let bad = |field: &str, msg: &str| Err(schema(&file(SourceKind::Kb), l.line, field, msg));
        if !known(&f.subject) {
            return bad("subject", &format!("unknown entity `{}`", f.subject));
        }
        if !value_ok(&f.object) {
            return bad("object", "expected exactly one of a known `id` or a `literal`");
        }
        if let Some(i) = f.qualifiers.iter().position(|q| !value_ok(&q.value)) {
            return bad(
                &format!("qualifiers[{i}].value"),
                "expected exactly one of a known `id` or a `literal`",
            );
        }
    }
    for l in &r.infoboxes {
        let bad = |field: &str, msg: &str| Err(schema(&file(SourceKind::Infobox), l.line, field, msg));
        if !known(&l.record.entity) {
            return bad("entity", &format!("unknown entity `{}`", l.record.entity));
        }
        if let Some(i) = l.record.entries.iter().position(|e| e.attribute.trim().is_empty()) {
            return bad(&format!("entries[{i}].attribute"), "attribute is empty");
        }
    }
    for l in &r.tables {
        let t = &l.record;
        let bad = |field: &str, msg: &str| Err(schema(&file(SourceKind::Table), l.line, field, msg));
        if !known(&t.entity) {
            return bad("entity", &format!("unknown entity `{}`", t.entity));
        }
        if t.headers.is_empty() {
            return bad("headers", "at least one header is required");
        }
        if let Some(i) = t.rows.iter().position(|row| row.len() != t.headers.len()) {
            return bad(&format!("rows[{i}]"), "row length differs from header count");
        }
    }
    for l in &r.texts {
        let t = &l.record;
        let bad = |field: &str, msg: &str| Err(schema(&file(SourceKind::Text), l.line, field, msg));
        if !known(&t.entity) {
            return bad("entity", &format!("unknown entity `{}`", t.entity));
        }
        for (i, a) in t.anchors.iter().enumerate() {
            let [s, e] = a.span;
            if s >= e || e > t.text.len() || !t.text.is_char_boundary(s) || !t.text.is_char_boundary(e) {
                return bad(&format!("anchors[{i}].span"), "span outside text bounds");
            }
            if !known(&a.entity) {
                return bad(&format!("anchors[{i}].entity"), &format!("unknown entity `{}`", a.entity));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        fs::write(dir.join(name), body).unwrap();
    }

    fn tiny(dir: &Path) {
        write(
            dir,
            ENTITIES_FILE,
            r#"{"id":"Q1","label":"Queen","aliases":["Queen band"],"types":["band"],"fact_count":5}
{"id":"Q2","label":"EMI","types":["record label"],"fact_count":3}
"#,
        );
        write(
            dir,
            "kb_facts.jsonl",
            r#"{"subject":"Q1","predicate":"record label","object":{"id":"Q2"},"qualifiers":[{"predicate":"start time","value":{"literal":"1973"}}]}
"#,
        );
        write(dir, "infoboxes.jsonl", r#"{"entity":"Q1","entries":[{"attribute":"Label","value":"EMI"}]}"#);
        write(dir, "tables.jsonl", r#"{"entity":"Q1","table_id":"t","headers":["Year","Album"],"rows":[["1975","A Night at the Opera"]]}"#);
        write(
            dir,
            "text.jsonl",
            r#"{"entity":"Q1","page_title":"Queen","text":"Queen are a rock band. They signed with EMI in 1973."}"#,
        );
    }

    #[test]
    fn ingest_orders_by_kind() {
        let d = tempfile::tempdir().unwrap();
        tiny(d.path());
        let idx = CorpusIndex::ingest(d.path()).unwrap();
        let got: Vec<_> = idx
            .retrieve_by_entity(&EntityId::new("Q1"))
            .iter()
            .map(|e| (e.source, e.text.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                (SourceKind::Kb, "Queen, record label, EMI, start time, 1973".to_string()),
                (SourceKind::Infobox, "Queen, Label, EMI".to_string()),
                (SourceKind::Table, "Queen, Year is 1975, Album is A Night at the Opera".to_string()),
                (SourceKind::Text, "Queen, Queen are a rock band.".to_string()),
                (SourceKind::Text, "Queen, They signed with EMI in 1973.".to_string()),
            ]
        );
        let emi = idx.retrieve_by_entity(&EntityId::new("Q2"));
        assert_eq!(emi.len(), 3);
        assert!(idx.retrieve_by_entity(&EntityId::new("nope")).is_empty());
        for e in idx.evidence() {
            assert_eq!(idx.reverbalize(&e.provenance).unwrap(), *e);
        }
    }

    #[test]
    fn persist_round_trip() {
        let d = tempfile::tempdir().unwrap();
        tiny(d.path());
        let idx = CorpusIndex::ingest(d.path()).unwrap();
        let p = d.path().join("index.json");
        idx.save(&p).unwrap();
        assert_eq!(CorpusIndex::load(&p).unwrap(), idx);
    }

    #[test]
    fn schema_errors_name_file_line_field() {
        let d = tempfile::tempdir().unwrap();
        tiny(d.path());
        write(d.path(), "tables.jsonl", "\n{\"entity\":\"Q1\",\"headers\":[\"a\"],\"rows\":[[\"x\"]]}\n");
        match CorpusIndex::ingest(d.path()) {
            Err(Error::Schema { file, line, field, .. }) => {
                assert!(file.ends_with("tables.jsonl"));
                assert_eq!(line, 2);
                assert_eq!(field, "table_id");
            }
            other => panic!("unexpected {other:?}"),
        }
        write(d.path(), "tables.jsonl", r#"{"entity":"Q1","table_id":"t","headers":["a","b"],"rows":[["x"]]}"#);
        match CorpusIndex::ingest(d.path()) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "rows[0]"),
            other => panic!("unexpected {other:?}"),
        }
        write(d.path(), "tables.jsonl", "");
        write(d.path(), "kb_facts.jsonl", r#"{"subject":"Q9","predicate":"p","object":{"literal":"x"}}"#);
        match CorpusIndex::ingest(d.path()) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "subject"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_entity_rejected() {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), ENTITIES_FILE, "{\"id\":\"A\",\"label\":\"a\"}\n{\"id\":\"A\",\"label\":\"b\"}\n");
        assert!(matches!(CorpusIndex::ingest(d.path()), Err(Error::DuplicateEntity(_))));
    }

    #[test]
    fn missing_files_yield_empty_index() {
        let d = tempfile::tempdir().unwrap();
        let idx = CorpusIndex::ingest(d.path()).unwrap();
        assert!(idx.evidence().is_empty());
    }
}
