//! Conversion between tables and feature-list formats.
//!
//! A feature list only names the features an entry has. It cannot say that
//! an entry lacks a feature, so importing a list reads every unlisted
//! feature as Unknown, never as Minus. The extended list keeps signed
//! values and converts without loss.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feature::{CellError, FeatureValue};
use crate::lexicon::{Entry, Pos, Table};
use crate::registry::FeatureRegistry;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureListEntry {
    pub id: String,
    pub lemma: String,
    pub pattern: String,
    pub pos: Pos,
    /// `feature` for Plus, `feature=value` for literal values.
    #[serde(rename = "features")]
    pub present_features: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedListEntry {
    pub id: String,
    pub lemma: String,
    pub pattern: String,
    pub pos: Pos,
    #[serde(rename = "features")]
    pub signed_features: IndexMap<String, FeatureValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InteropError {
    #[error("entry {entry:?}: unknown feature {feature:?}")]
    UnknownFeature { entry: String, feature: String },
    #[error("entry {entry:?}: feature {feature:?}: {source}")]
    BadValue {
        entry: String,
        feature: String,
        source: CellError,
    },
    #[error("entry {entry:?}: value {value} does not fit feature {feature:?}")]
    KindMismatch {
        entry: String,
        feature: String,
        value: FeatureValue,
    },
    #[error("entry {entry:?} lists feature {feature:?} twice")]
    Repeated { entry: String, feature: String },
    #[error("duplicate entry id {0:?}")]
    DuplicateEntry(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

/// Entries with class constants copied in, features in registry order.
fn ordered_cells(t: &Table, reg: &FeatureRegistry) -> Vec<(Entry, Vec<String>)> {
    let m = t.materialized(reg);
    m.entries
        .into_iter()
        .map(|e| (e, m.columns.clone()))
        .collect()
}

fn list_token(feature: &str, v: &FeatureValue) -> Option<String> {
    match v {
        FeatureValue::Plus => Some(feature.to_string()),
        FeatureValue::Literal(_) | FeatureValue::LiteralSet(_) => Some(format!("{feature}{v}")),
        _ => None,
    }
}

/// Positive-only export: Plus and literal-valued features.
pub fn export_feature_list(t: &Table, reg: &FeatureRegistry) -> Vec<FeatureListEntry> {
    ordered_cells(t, reg)
        .into_iter()
        .map(|(e, cols)| FeatureListEntry {
            present_features: cols
                .iter()
                .filter_map(|f| list_token(f, e.value(f)))
                .collect(),
            id: e.id,
            lemma: e.lemma,
            pattern: e.pattern,
            pos: e.pos,
        })
        .collect()
}

fn check_value(
    reg: &FeatureRegistry,
    entry: &str,
    feature: &str,
    v: &FeatureValue,
) -> Result<(), InteropError> {
    let def = reg.lookup(feature).ok_or_else(|| InteropError::UnknownFeature {
        entry: entry.to_string(),
        feature: feature.to_string(),
    })?;
    if !def.accepts(v) {
        return Err(InteropError::KindMismatch {
            entry: entry.to_string(),
            feature: feature.to_string(),
            value: v.clone(),
        });
    }
    Ok(())
}

fn unique_ids<'a>(ids: impl Iterator<Item = &'a str>) -> Result<(), InteropError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(InteropError::DuplicateEntry(id.to_string()));
        }
    }
    Ok(())
}

/// Listed features become Plus or literal values; every other registry
/// feature becomes Unknown.
pub fn import_feature_list(
    entries: &[FeatureListEntry],
    table_id: &str,
    reg: &FeatureRegistry,
) -> Result<Table, InteropError> {
    unique_ids(entries.iter().map(|e| e.id.as_str()))?;
    let mut out = Vec::with_capacity(entries.len());
    for le in entries {
        let mut e = Entry::new(&le.id, &le.lemma, &le.pattern, le.pos);
        for d in reg.defs() {
            e.features.insert(d.id.clone(), FeatureValue::Unknown);
        }
        let mut listed = BTreeSet::new();
        for tok in &le.present_features {
            let (feature, value) = match tok.split_once('=') {
                Some((f, body)) => {
                    let v = FeatureValue::literals(body.split('|')).map_err(|source| {
                        InteropError::BadValue {
                            entry: le.id.clone(),
                            feature: f.to_string(),
                            source,
                        }
                    })?;
                    (f, v)
                }
                None => (tok.as_str(), FeatureValue::Plus),
            };
            check_value(reg, &le.id, feature, &value)?;
            if !listed.insert(feature) {
                return Err(InteropError::Repeated {
                    entry: le.id.clone(),
                    feature: feature.to_string(),
                });
            }
            e.features.insert(feature.to_string(), value);
        }
        out.push(e);
    }
    Ok(Table::new(table_id, Vec::new(), out, reg))
}

/// Lossless export with explicit `+`, `-`, `?` and `=value` cells.
pub fn export_extended_list(t: &Table, reg: &FeatureRegistry) -> Vec<ExtendedListEntry> {
    ordered_cells(t, reg)
        .into_iter()
        .map(|(e, cols)| ExtendedListEntry {
            signed_features: cols
                .iter()
                .map(|f| (f.clone(), e.value(f).clone()))
                .collect(),
            id: e.id,
            lemma: e.lemma,
            pattern: e.pattern,
            pos: e.pos,
        })
        .collect()
}

pub fn import_extended_list(
    entries: &[ExtendedListEntry],
    table_id: &str,
    reg: &FeatureRegistry,
) -> Result<Table, InteropError> {
    unique_ids(entries.iter().map(|e| e.id.as_str()))?;
    let mut out = Vec::with_capacity(entries.len());
    for le in entries {
        let mut e = Entry::new(&le.id, &le.lemma, &le.pattern, le.pos);
        for (f, v) in &le.signed_features {
            check_value(reg, &le.id, f, v)?;
            e.features.insert(f.clone(), v.clone());
        }
        out.push(e);
    }
    Ok(Table::new(table_id, Vec::new(), out, reg))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryLoss {
    pub id: String,
    pub minus_lost: usize,
    pub unknown_lost: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LossReport {
    pub entries: Vec<EntryLoss>,
    pub minus_lost: usize,
    pub unknown_lost: usize,
    pub lossless: bool,
}

impl LossReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("id\tminus_lost\tunknown_lost\n");
        for e in &self.entries {
            out.push_str(&format!("{}\t{}\t{}\n", e.id, e.minus_lost, e.unknown_lost));
        }
        out.push_str(&format!(
            "total\t{}\t{}\n{}\n",
            self.minus_lost,
            self.unknown_lost,
            if self.lossless { "lossless" } else { "lossy" }
        ));
        out
    }
}

/// What a positive-only export drops: Minus cells, which come back as
/// Unknown, and Unknown cells, which the list cannot mention at all.
pub fn loss_report(t: &Table) -> LossReport {
    let cells = t.cell_features();
    let entries: Vec<EntryLoss> = t
        .entries
        .iter()
        .map(|e| {
            let vals = cells.iter().map(|f| t.effective_value(e, f));
            let (mut minus, mut unknown) = (0, 0);
            for v in vals {
                match v {
                    FeatureValue::Minus => minus += 1,
                    FeatureValue::Unknown => unknown += 1,
                    _ => {}
                }
            }
            EntryLoss {
                id: e.id.clone(),
                minus_lost: minus,
                unknown_lost: unknown,
            }
        })
        .collect();
    let minus_lost = entries.iter().map(|e| e.minus_lost).sum();
    let unknown_lost = entries.iter().map(|e| e.unknown_lost).sum();
    LossReport {
        lossless: minus_lost == 0 && unknown_lost == 0,
        entries,
        minus_lost,
        unknown_lost,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellChange {
    pub entry_id: String,
    pub feature: String,
    pub before: FeatureValue,
    pub after: FeatureValue,
}

/// Cells whose effective value differs, over the union of both tables'
/// features, for entries present in `a`.
pub fn cell_diff(a: &Table, b: &Table) -> Vec<CellChange> {
    let mut features = a.cell_features();
    for f in b.cell_features() {
        if !features.contains(&f) {
            features.push(f);
        }
    }
    let mut out = Vec::new();
    for ea in &a.entries {
        let eb = b.entry(&ea.id);
        for f in &features {
            let before = a.effective_value(ea, f);
            let after = eb.map_or(&FeatureValue::Unknown, |eb| b.effective_value(eb, f));
            if before != after {
                out.push(CellChange {
                    entry_id: ea.id.clone(),
                    feature: f.clone(),
                    before: before.clone(),
                    after: after.clone(),
                });
            }
        }
    }
    out
}

fn json_err(e: serde_json::Error) -> InteropError {
    InteropError::Json(e.to_string())
}

pub fn list_to_json(entries: &[FeatureListEntry]) -> String {
    serde_json::to_string_pretty(entries).expect("list entries serialize")
}

pub fn list_from_json(text: &str) -> Result<Vec<FeatureListEntry>, InteropError> {
    serde_json::from_str(text).map_err(json_err)
}

pub fn extended_to_json(entries: &[ExtendedListEntry]) -> String {
    serde_json::to_string_pretty(entries).expect("extended entries serialize")
}

pub fn extended_from_json(text: &str) -> Result<Vec<ExtendedListEntry>, InteropError> {
    serde_json::from_str(text).map_err(json_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::*;
    use FeatureValue::*;

    fn table(entries: Vec<Entry>) -> Table {
        Table::new("t", Vec::new(), entries, &standard_registry())
    }

    fn bear() -> Entry {
        Entry::new("bear", "bear comparison to", "N0 V:bear comparison P:to N1", Pos::VerbIdiom)
            .with(FREE_SLOT_OPTIONAL, Plus)
            .with(PASSIVIZATION, Minus)
            .with(SELECTED_PREP_N1, Literal("to".into()))
    }

    #[test]
    fn positive_only_export() {
        let reg = standard_registry();
        let e = Entry::new("x", "x", "x", Pos::Noun)
            .with(PASSIVIZATION, Plus)
            .with(DATIVE_SHIFT, Minus)
            .with(TOPICALIZATION, Unknown);
        let l = export_feature_list(&table(vec![e]), &reg);
        assert_eq!(l[0].present_features, ["passivization"]);

        let l = export_feature_list(&table(vec![bear()]), &reg);
        assert_eq!(l[0].present_features, ["free-slot-optional", "selected-prep-N1=to"]);
    }

    #[test]
    fn import_reads_absence_as_unknown() {
        let reg = standard_registry();
        let mut defs = reg.defs()[..14].to_vec();
        defs.push(reg.lookup(PASSIVIZATION).unwrap().clone());
        let small = FeatureRegistry::new("small", defs, reg.rules()[..3].to_vec()).unwrap();
        let le = FeatureListEntry {
            id: "x".into(),
            lemma: "x".into(),
            pattern: "x".into(),
            pos: Pos::Noun,
            present_features: vec!["passivization".into()],
        };
        let t = import_feature_list(std::slice::from_ref(&le), "t", &small).unwrap();
        let vals: Vec<&FeatureValue> = t.entries[0].features.values().collect();
        assert_eq!(vals.iter().filter(|v| ***v == Plus).count(), 1);
        assert_eq!(vals.iter().filter(|v| ***v == Unknown).count(), 14);

        let bad = FeatureListEntry {
            present_features: vec!["no-such".into()],
            ..le
        };
        assert!(matches!(
            import_feature_list(&[bad], "t", &small),
            Err(InteropError::UnknownFeature { .. })
        ));
    }

    #[test]
    fn loss_counts_match_round_trip() {
        let reg = standard_registry();
        let t = table(vec![
            bear().with(DATIVE_SHIFT, Minus).with(TOPICALIZATION, Unknown),
            Entry::new("y", "y", "y", Pos::Noun)
                .with(PASSIVIZATION, Minus)
                .with(TOPICALIZATION, Plus),
        ]);
        let r = loss_report(&t);
        assert_eq!((r.minus_lost, r.unknown_lost, r.lossless), (3, 4, false));
        let back = import_feature_list(&export_feature_list(&t, &reg), "t", &reg).unwrap();
        let diff = cell_diff(&t, &back);
        assert_eq!(diff.len(), r.minus_lost);
        assert!(diff.iter().all(|c| c.before == Minus && c.after == Unknown));
    }

    #[test]
    fn all_plus_is_lossless() {
        let t = table(vec![Entry::new("x", "x", "x", Pos::Noun).with(PASSIVIZATION, Plus)]);
        assert!(loss_report(&t).lossless);
    }

    #[test]
    fn extended_round_trip() {
        let reg = standard_registry();
        let t = table(vec![bear().with(DATIVE_SHIFT, Unknown)]);
        let json = extended_to_json(&export_extended_list(&t, &reg));
        assert!(json.contains("\"passivization\": \"-\""));
        assert!(json.contains("\"dative-shift\": \"?\""));
        let back = import_extended_list(&extended_from_json(&json).unwrap(), "t", &reg).unwrap();
        assert_eq!(back, t);
    }
}
