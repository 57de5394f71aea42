//! Entity table with an alias dictionary and longest-match linker.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::schema::{Entity, EntityId};
use crate::error::{Error, Result};
use crate::tempex::Span;
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkerResult {
    pub span: Span,
    pub entity: EntityId,
    /// Matched length in tokens.
    pub match_len: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntityTable {
    entities: Vec<Entity>,
    by_id: BTreeMap<EntityId, usize>,
    /// Normalized alias (lowercased tokens joined by a space) to entity ids.
    aliases: BTreeMap<String, Vec<EntityId>>,
    max_alias_tokens: usize,
}

pub fn normalize_alias(alias: &str) -> String {
    text::lower_tokens(alias).join(" ")
}

impl EntityTable {
    pub fn new(entities: Vec<Entity>) -> Result<Self> {
        let mut table = EntityTable::default();
        for e in entities {
            table.insert(e)?;
        }
        Ok(table)
    }

    fn insert(&mut self, e: Entity) -> Result<()> {
        if self.by_id.contains_key(&e.id) {
            return Err(Error::DuplicateEntity(e.id.0));
        }
        for form in e.surface_forms() {
            let key = normalize_alias(form);
            if key.is_empty() {
                continue;
            }
            self.max_alias_tokens = self.max_alias_tokens.max(key.split(' ').count());
            let ids = self.aliases.entry(key).or_default();
            if !ids.contains(&e.id) {
                ids.push(e.id.clone());
            }
        }
        self.by_id.insert(e.id.clone(), self.entities.len());
        self.entities.push(e);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Entity> {
        self.entities.iter()
    }

    pub fn get(&self, id: &EntityId) -> Option<&Entity> {
        self.by_id.get(id).map(|&i| &self.entities[i])
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn label(&self, id: &EntityId) -> Option<&str> {
        self.get(id).map(|e| e.label.as_str())
    }

    /// All entities sharing the alias, as stored.
    pub fn alias_candidates(&self, alias: &str) -> &[EntityId] {
        self.aliases
            .get(&normalize_alias(alias))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Most prominent entity for an alias: highest fact count, then smallest id.
    pub fn resolve_alias(&self, alias: &str) -> Option<&EntityId> {
        self.best_of(self.alias_candidates(alias))
    }

    fn best_of<'a>(&self, ids: &'a [EntityId]) -> Option<&'a EntityId> {
        ids.iter().min_by(|a, b| {
            let fa = self.get(a).map(|e| e.fact_count).unwrap_or(0);
            let fb = self.get(b).map(|e| e.fact_count).unwrap_or(0);
            fb.cmp(&fa).then(a.cmp(b))
        })
    }

    /// Longest-match alias linking. Overlapping matches resolve longest
    /// first, then leftmost. Results are ordered by position.
    pub fn link(&self, input: &str) -> Vec<LinkerResult> {
        let toks = text::tokens(input);
        let lower: Vec<String> = toks.iter().map(|t| t.text.to_lowercase()).collect();
        let mut found: Vec<(usize, usize, &EntityId)> = Vec::new();
        for i in 0..toks.len() {
            let max = self.max_alias_tokens.min(toks.len() - i);
            for n in 1..=max {
                if let Some(ids) = self.aliases.get(&lower[i..i + n].join(" ")) {
                    if let Some(id) = self.best_of(ids) {
                        found.push((i, n, id));
                    }
                }
            }
        }
        found.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut taken = vec![false; toks.len()];
        let mut out = Vec::new();
        for (i, n, id) in found {
            if taken[i..i + n].iter().any(|t| *t) {
                continue;
            }
            taken[i..i + n].iter_mut().for_each(|t| *t = true);
            out.push(LinkerResult {
                span: Span::new(toks[i].start, toks[i + n - 1].end),
                entity: id.clone(),
                match_len: n,
            });
        }
        out.sort_by_key(|r| r.span.start);
        out
    }

    /// Most frequent first type among the given entities; ties by label order.
    pub fn most_frequent_type<'a, I>(&self, ids: I) -> Option<String>
    where
        I: IntoIterator<Item = &'a EntityId>,
    {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for id in ids {
            if let Some(t) = self.get(id).and_then(Entity::primary_type) {
                *counts.entry(t).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0)))
            .map(|(t, _)| t.to_string())
    }

    /// Whether some entity carries this type label.
    pub fn has_type_label(&self, label: &str) -> bool {
        let key = label.to_lowercase();
        self.entities
            .iter()
            .any(|e| e.types.iter().any(|t| t.to_lowercase() == key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ent(id: &str, label: &str, aliases: &[&str], facts: u64) -> Entity {
        Entity {
            id: EntityId::new(id),
            label: label.into(),
            aliases: aliases.iter().map(|s| s.to_string()).collect(),
            types: vec![],
            fact_count: facts,
        }
    }

    fn table() -> EntityTable {
        EntityTable::new(vec![
            ent("Q15862", "Queen", &["Queen band"], 400),
            ent("Q15869", "Freddie Mercury", &["Mercury"], 300),
            ent("Q1", "Mercury", &[], 900),
        ])
        .unwrap()
    }

    #[test]
    fn longest_match_first() {
        let t = table();
        let r = t.link("Queen's lead singer after Freddie Mercury?");
        let ids: Vec<_> = r.iter().map(|r| r.entity.as_str()).collect();
        assert_eq!(ids, vec!["Q15862", "Q15869"]);
        assert_eq!(r[1].match_len, 2);
        assert_eq!(r[1].span.slice("Queen's lead singer after Freddie Mercury?"), "Freddie Mercury");
    }

    #[test]
    fn ambiguous_alias_prefers_prominent_entity() {
        let t = table();
        let r = t.link("Mercury rising");
        assert_eq!(r[0].entity.as_str(), "Q1");
    }

    #[test]
    fn no_hit_yields_empty() {
        assert!(table().link("nothing relevant here").is_empty());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let e = EntityTable::new(vec![ent("A", "a", &[], 0), ent("A", "b", &[], 0)]);
        assert!(matches!(e, Err(Error::DuplicateEntity(_))));
    }
}
