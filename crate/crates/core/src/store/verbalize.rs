//! Renders KB facts, table rows, infobox entries and page text into uniform
//! comma-separated snippets.

use super::entities::EntityTable;
use super::evidence::{EntityAnnotation, Evidence, EvidenceId, Provenance, SourceKind};
use super::schema::{EntityId, InfoboxEntry, KbFact, TableRow, TextRecord, ValueRef};
use crate::tempex::Span;

pub const SEPARATOR: &str = ", ";

/// Abbreviations that never end a sentence. Single capital initials are
/// always treated as abbreviations.
pub const DEFAULT_ABBREVIATIONS: [&str; 22] = [
    "Mr.", "Mrs.", "Ms.", "Dr.", "St.", "Jr.", "Sr.", "Prof.", "Inc.", "Ltd.", "Co.", "vs.",
    "etc.", "e.g.", "i.e.", "No.", "Gen.", "Lt.", "Col.", "Mt.", "U.S.", "U.K.",
];

/// Builds snippet text left to right while recording entity spans.
struct Builder<'a> {
    table: &'a EntityTable,
    text: String,
    entities: Vec<EntityAnnotation>,
}

impl<'a> Builder<'a> {
    fn new(table: &'a EntityTable) -> Self {
        Self { table, text: String::new(), entities: Vec::new() }
    }

    fn sep(&mut self) {
        if !self.text.is_empty() {
            self.text.push_str(SEPARATOR);
        }
    }

    fn push_str(&mut self, s: &str) {
        self.text.push_str(s);
    }

    fn push_entity(&mut self, id: &EntityId) {
        let label = self.table.label(id).unwrap_or(id.as_str());
        let start = self.text.len();
        self.text.push_str(label);
        self.entities.push(EntityAnnotation {
            entity: id.clone(),
            span: Span::new(start, self.text.len()),
        });
    }

    fn push_value(&mut self, v: &ValueRef) {
        match (&v.id, &v.literal) {
            (Some(id), _) => self.push_entity(id),
            (None, Some(lit)) => self.push_str(lit),
            (None, None) => {}
        }
    }

    /// Adds alias matches found in `text[from..]` that do not overlap
    /// existing annotations.
    fn link_rest(&mut self, from: usize) {
        for hit in self.table.link(&self.text[from..]) {
            let span = Span::new(hit.span.start + from, hit.span.end + from);
            if self.entities.iter().any(|a| a.span.overlaps(&span)) {
                continue;
            }
            self.entities.push(EntityAnnotation { entity: hit.entity, span });
        }
    }

    fn finish(mut self, id: EvidenceId, source: SourceKind, provenance: Provenance, body_start: usize) -> Evidence {
        self.entities.sort_by_key(|a| (a.span.start, a.span.end));
        Evidence {
            id,
            text: self.text,
            source,
            entities: self.entities,
            temporal_mentions: Vec::new(),
            provenance,
            body_start,
        }
    }
}

pub struct Verbalizer<'a> {
    table: &'a EntityTable,
    abbreviations: Vec<String>,
}

impl<'a> Verbalizer<'a> {
    pub fn new(table: &'a EntityTable) -> Self {
        Self {
            table,
            abbreviations: DEFAULT_ABBREVIATIONS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn with_abbreviations(table: &'a EntityTable, abbreviations: Vec<String>) -> Self {
        Self { table, abbreviations }
    }

    /// `subject, predicate, object[, qualifier, value]*`
    pub fn verbalize_kb_fact(&self, f: &KbFact, id: EvidenceId, provenance: Provenance) -> Evidence {
        let mut b = Builder::new(self.table);
        b.push_entity(&f.subject);
        b.sep();
        b.push_str(&f.predicate);
        b.sep();
        b.push_value(&f.object);
        for q in &f.qualifiers {
            b.sep();
            b.push_str(&q.predicate);
            b.sep();
            b.push_value(&q.value);
        }
        b.finish(id, SourceKind::Kb, provenance, 0)
    }

    /// `page, h1 is c1, h2 is c2, ...`; an empty header renders as `is c`.
    pub fn verbalize_table_row(&self, r: &TableRow, id: EvidenceId, provenance: Provenance) -> Evidence {
        let mut b = Builder::new(self.table);
        b.push_entity(&r.page_entity);
        let prefix_end = b.text.len();
        for (h, c) in r.headers.iter().zip(&r.cells) {
            b.sep();
            if h.is_empty() {
                b.push_str(&format!("is {c}"));
            } else {
                b.push_str(&format!("{h} is {c}"));
            }
        }
        b.link_rest(prefix_end);
        b.finish(id, SourceKind::Table, provenance, 0)
    }

    /// `entity, [section, ]attribute, value`
    pub fn verbalize_infobox(&self, e: &InfoboxEntry, id: EvidenceId, provenance: Provenance) -> Evidence {
        let mut b = Builder::new(self.table);
        b.push_entity(&e.entity);
        let prefix_end = b.text.len();
        if let Some(section) = &e.section {
            b.sep();
            b.push_str(section);
        }
        b.sep();
        b.push_str(&e.attribute);
        b.sep();
        b.push_str(&e.value);
        b.link_rest(prefix_end);
        b.finish(id, SourceKind::Infobox, provenance, 0)
    }

    /// One snippet per sentence, each prefixed with the page entity label.
    /// `first_id` numbers the sentences consecutively; `line` is the record's
    /// line in the text file.
    pub fn verbalize_text(&self, record: &TextRecord, first_id: u32, line: usize) -> Vec<Evidence> {
        split_sentences(&record.text, &self.abbreviations)
            .into_iter()
            .enumerate()
            .map(|(n, sentence)| {
                let mut b = Builder::new(self.table);
                b.push_entity(&record.entity);
                b.sep();
                let body_start = b.text.len();
                b.push_str(sentence.slice(&record.text));
                for anchor in &record.anchors {
                    let [a, z] = anchor.span;
                    if a >= sentence.start && z <= sentence.end && a < z {
                        let span = Span::new(a - sentence.start + body_start, z - sentence.start + body_start);
                        b.entities.push(EntityAnnotation { entity: anchor.entity.clone(), span });
                    }
                }
                b.link_rest(body_start);
                b.finish(
                    EvidenceId(first_id + n as u32),
                    SourceKind::Text,
                    Provenance { source: SourceKind::Text, line, item: Some(n) },
                    body_start,
                )
            })
            .collect()
    }
}

/// Sentence boundaries: `.`, `!` or `?` followed by whitespace and an
/// uppercase letter or digit, unless the word ending there is an
/// abbreviation or a single capital initial.
pub fn split_sentences(text: &str, abbreviations: &[String]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut start = 0;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (k, &(pos, c)) in chars.iter().enumerate() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let mut j = k + 1;
        let mut saw_space = false;
        while j < chars.len() && chars[j].1.is_whitespace() {
            saw_space = true;
            j += 1;
        }
        let Some(&(_, next)) = chars.get(j) else { continue };
        if !saw_space || !(next.is_uppercase() || next.is_ascii_digit()) {
            continue;
        }
        let word_start = text[..pos]
            .rfind(char::is_whitespace)
            .map(|w| w + 1)
            .unwrap_or(0);
        let word = &text[word_start..pos + c.len_utf8()];
        if c == '.' && is_abbreviation(word, abbreviations) {
            continue;
        }
        push_trimmed(&mut spans, text, start, pos + c.len_utf8());
        start = chars[j].0;
    }
    push_trimmed(&mut spans, text, start, text.len());
    spans
}

fn is_abbreviation(word: &str, abbreviations: &[String]) -> bool {
    let word = word.trim_start_matches(['(', '"', '\'']);
    if abbreviations.iter().any(|a| a == word) {
        return true;
    }
    let mut cs = word.chars();
    matches!((cs.next(), cs.next(), cs.next()), (Some(a), Some('.'), None) if a.is_uppercase())
}

fn push_trimmed(spans: &mut Vec<Span>, text: &str, start: usize, end: usize) {
    let slice = &text[start..end];
    let lead = slice.len() - slice.trim_start().len();
    let body = slice.trim();
    if !body.is_empty() {
        spans.push(Span::new(start + lead, start + lead + body.len()));
    }
}
