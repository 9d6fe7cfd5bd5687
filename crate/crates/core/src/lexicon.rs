//! Lexicon-grammar tables: entries described by tri-state feature vectors,
//! grouped into classes that share defining features.
//!
//! Table file layout (UTF-8, tab separated):
//!
//! ```text
//! #table <table_id>
//! #def <feature-id> <cell>
//! id  lemma  pattern  pos  <feature-id>...     (tab-separated)
//! <one entry per line>
//! ```
//!
//! Lines starting with `##` are comments. An empty or missing cell under a
//! defining-feature column means the entry inherits the class value; under
//! any other column it reads as Unknown.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feature::{CellError, FeatureValue};
use crate::registry::{self, FeatureKind, FeatureRegistry, LanguageConfig};
use crate::variant::pattern::{EntryPattern, PatternError};
use crate::violation::{Violation, ViolationKind};

static UNKNOWN: FeatureValue = FeatureValue::Unknown;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    #[serde(rename = "N")]
    Noun,
    #[serde(rename = "A")]
    Adjective,
    #[serde(rename = "V")]
    VerbIdiom,
    #[serde(rename = "ADV")]
    Adverbial,
    #[serde(rename = "PP")]
    PrepPhrase,
}

impl Pos {
    pub const ALL: [Pos; 5] = [
        Pos::Noun,
        Pos::Adjective,
        Pos::VerbIdiom,
        Pos::Adverbial,
        Pos::PrepPhrase,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Pos::Noun => "N",
            Pos::Adjective => "A",
            Pos::VerbIdiom => "V",
            Pos::Adverbial => "ADV",
            Pos::PrepPhrase => "PP",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL
            .into_iter()
            .find(|p| p.code() == s)
            .ok_or_else(|| format!("unknown part of speech {s:?} (expected N, A, V, ADV or PP)"))
    }
}

/// One multiword expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    /// Citation form, e.g. "deal a blow to".
    pub lemma: String,
    /// Pattern DSL string.
    pub pattern: String,
    pub pos: Pos,
    pub features: BTreeMap<String, FeatureValue>,
}

impl Entry {
    pub fn new(id: &str, lemma: &str, pattern: &str, pos: Pos) -> Self {
        Entry {
            id: id.to_string(),
            lemma: lemma.to_string(),
            pattern: pattern.to_string(),
            pos,
            features: BTreeMap::new(),
        }
    }

    pub fn with(mut self, feature: &str, value: FeatureValue) -> Self {
        self.features.insert(feature.to_string(), value);
        self
    }

    /// The stored value, Unknown when absent.
    pub fn value(&self, feature: &str) -> &FeatureValue {
        self.features.get(feature).unwrap_or(&UNKNOWN)
    }

    pub fn parsed_pattern(&self) -> Result<EntryPattern, PatternError> {
        EntryPattern::parse_for(&self.pattern, self.pos)
    }
}

/// A class of entries sharing defining features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub id: String,
    /// Class constants, in registry order.
    pub defining: Vec<(String, FeatureValue)>,
    /// Feature columns, in registry order.
    pub columns: Vec<String>,
    pub entries: Vec<Entry>,
}

impl Table {
    /// Builds a table in canonical form: columns are the features recorded by
    /// any entry, in registry order, and non-defining cells an entry leaves out
    /// are stored as Unknown.
    pub fn new(
        id: &str,
        defining: Vec<(String, FeatureValue)>,
        entries: Vec<Entry>,
        registry: &FeatureRegistry,
    ) -> Table {
        let mut columns: Vec<String> = entries
            .iter()
            .flat_map(|e| e.features.keys().cloned())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        sort_by_registry(&mut columns, registry, |c| c);
        let mut defining = defining;
        sort_by_registry(&mut defining, registry, |(f, _)| f);
        let mut t = Table {
            id: id.to_string(),
            defining,
            columns,
            entries,
        };
        t.fill_unknowns();
        t
    }

    fn fill_unknowns(&mut self) {
        let open: Vec<String> = self
            .columns
            .iter()
            .filter(|c| self.defining_value(c).is_none())
            .cloned()
            .collect();
        for e in &mut self.entries {
            for c in &open {
                e.features.entry(c.clone()).or_insert(FeatureValue::Unknown);
            }
        }
    }

    pub fn defining_value(&self, feature: &str) -> Option<&FeatureValue> {
        self.defining
            .iter()
            .find(|(f, _)| f == feature)
            .map(|(_, v)| v)
    }

    pub fn entry(&self, id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// The entry's value with class inheritance applied.
    pub fn effective_value<'a>(&'a self, e: &'a Entry, feature: &str) -> &'a FeatureValue {
        match e.features.get(feature) {
            Some(v) => v,
            None => self.defining_value(feature).unwrap_or(&UNKNOWN),
        }
    }

    /// Feature ids that are cells of this table: columns plus defining features.
    pub fn cell_features(&self) -> Vec<String> {
        let mut out = self.columns.clone();
        for (f, _) in &self.defining {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        out
    }

    /// Copies every defining feature onto every entry that does not record it.
    /// Stored values are never changed.
    pub fn materialize(&self, e: &Entry) -> Entry {
        let mut out = e.clone();
        for (f, v) in &self.defining {
            out.features.entry(f.clone()).or_insert_with(|| v.clone());
        }
        out
    }

    pub fn materialized_entries(&self) -> Vec<Entry> {
        self.entries.iter().map(|e| self.materialize(e)).collect()
    }

    /// The same table with class constants moved into explicit columns.
    pub fn materialized(&self, registry: &FeatureRegistry) -> Table {
        let mut columns = self.cell_features();
        sort_by_registry(&mut columns, registry, |c| c);
        Table {
            id: self.id.clone(),
            defining: Vec::new(),
            columns,
            entries: self.materialized_entries(),
        }
    }
}

fn sort_by_registry<T>(items: &mut [T], registry: &FeatureRegistry, key: impl Fn(&T) -> &str) {
    items.sort_by(|a, b| {
        let ka = (registry.position(key(a)).unwrap_or(usize::MAX), key(a));
        let kb = (registry.position(key(b)).unwrap_or(usize::MAX), key(b));
        ka.cmp(&kb)
    });
}

/// Several tables merged under one registry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lexicon {
    pub registry_version: String,
    pub tables: Vec<Table>,
}

impl Lexicon {
    pub fn entry_count(&self) -> usize {
        self.tables.iter().map(|t| t.entries.len()).sum()
    }

    /// All entries with inherited features copied in, in table then entry order.
    pub fn materialized_entries(&self) -> Vec<Entry> {
        self.tables
            .iter()
            .flat_map(|t| t.materialized_entries())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}, column {column}: unknown feature {feature:?}")]
    UnknownFeature {
        line: usize,
        column: usize,
        feature: String,
    },
    #[error("line {line}: duplicate entry id {id:?}")]
    DuplicateEntry { line: usize, id: String },
    #[error("line {line}, column {column}: bad cell: {source}")]
    BadCell {
        line: usize,
        column: usize,
        source: CellError,
    },
    #[error("line {line}, column {column}: {feature} is {found} but the table defines it as {expected}")]
    DefiningContradiction {
        line: usize,
        column: usize,
        feature: String,
        expected: FeatureValue,
        found: FeatureValue,
    },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("line {line}: bad pattern: {source}")]
    BadPattern { line: usize, source: PatternError },
}

const FIXED_COLUMNS: [&str; 4] = ["id", "lemma", "pattern", "pos"];

/// Reads one table.
pub fn parse_table(source: &str, registry: &FeatureRegistry) -> Result<Table, TableError> {
    let mut lines = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.starts_with("##") && !l.trim().is_empty());

    let (line, first) = lines.next().ok_or(TableError::MalformedHeader {
        line: 1,
        reason: "missing `#table <id>` line".into(),
    })?;
    let table_id = match first.strip_prefix("#table") {
        Some(rest) if rest.starts_with([' ', '\t']) && !rest.trim().is_empty() => {
            rest.trim().to_string()
        }
        _ => {
            return Err(TableError::MalformedHeader {
                line,
                reason: "expected `#table <id>`".into(),
            })
        }
    };

    let mut defining: Vec<(String, FeatureValue)> = Vec::new();
    let mut header: Option<(usize, Vec<String>)> = None;
    let mut entries: Vec<Entry> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();

    for (line, text) in lines {
        let Some((_, columns)) = &header else {
            if let Some(rest) = text.strip_prefix("#def") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [feature, cell] = parts[..] else {
                    return Err(TableError::MalformedHeader {
                        line,
                        reason: "expected `#def <feature-id> <cell>`".into(),
                    });
                };
                if registry.lookup(feature).is_none() {
                    return Err(TableError::UnknownFeature {
                        line,
                        column: 2,
                        feature: feature.to_string(),
                    });
                }
                if defining.iter().any(|(f, _)| f == feature) {
                    return Err(TableError::MalformedHeader {
                        line,
                        reason: format!("feature {feature} defined twice"),
                    });
                }
                let value = cell.parse().map_err(|source| TableError::BadCell {
                    line,
                    column: 3,
                    source,
                })?;
                defining.push((feature.to_string(), value));
                continue;
            }
            let cells: Vec<&str> = text.split('\t').collect();
            if cells.len() < 4 || cells[..4] != FIXED_COLUMNS {
                return Err(TableError::MalformedHeader {
                    line,
                    reason: "expected `id<TAB>lemma<TAB>pattern<TAB>pos<TAB>features...`".into(),
                });
            }
            let mut cols = Vec::new();
            for (i, c) in cells[4..].iter().enumerate() {
                if registry.lookup(c).is_none() {
                    return Err(TableError::UnknownFeature {
                        line,
                        column: i + 5,
                        feature: c.to_string(),
                    });
                }
                if cols.iter().any(|x: &String| x == c) {
                    return Err(TableError::MalformedHeader {
                        line,
                        reason: format!("column {c} repeated"),
                    });
                }
                cols.push(c.to_string());
            }
            header = Some((line, cols));
            continue;
        };

        let cells: Vec<&str> = text.split('\t').collect();
        if cells.len() < 4 {
            return Err(TableError::MalformedRow {
                line,
                reason: "an entry needs id, lemma, pattern and pos".into(),
            });
        }
        if cells.len() > 4 + columns.len() {
            return Err(TableError::MalformedRow {
                line,
                reason: format!("{} cells for {} columns", cells.len(), 4 + columns.len()),
            });
        }
        let id = cells[0];
        if id.is_empty() {
            return Err(TableError::MalformedRow {
                line,
                reason: "empty id".into(),
            });
        }
        if seen.insert(id.to_string(), line).is_some() {
            return Err(TableError::DuplicateEntry {
                line,
                id: id.to_string(),
            });
        }
        let pos: Pos = cells[3]
            .parse()
            .map_err(|reason| TableError::MalformedRow { line, reason })?;
        EntryPattern::parse_for(cells[2], pos)
            .map_err(|source| TableError::BadPattern { line, source })?;
        let mut entry = Entry::new(id, cells[1], cells[2], pos);
        for (i, feature) in columns.iter().enumerate() {
            let column = i + 5;
            let cell = cells.get(i + 4).copied().unwrap_or("");
            let inherited = defining.iter().find(|(f, _)| f == feature).map(|(_, v)| v);
            if cell.is_empty() {
                if inherited.is_none() {
                    entry.features.insert(feature.clone(), FeatureValue::Unknown);
                }
                continue;
            }
            let value: FeatureValue = cell
                .parse()
                .map_err(|source| TableError::BadCell {
                    line,
                    column,
                    source,
                })?;
            if let Some(expected) = inherited {
                if *expected != value {
                    return Err(TableError::DefiningContradiction {
                        line,
                        column,
                        feature: feature.clone(),
                        expected: expected.clone(),
                        found: value,
                    });
                }
            }
            entry.features.insert(feature.clone(), value);
        }
        entries.push(entry);
    }

    let Some((_, mut columns)) = header else {
        return Err(TableError::MalformedHeader {
            line: line + 1,
            reason: "missing column header line".into(),
        });
    };
    sort_by_registry(&mut columns, registry, |c| c);
    sort_by_registry(&mut defining, registry, |(f, _)| f);
    Ok(Table {
        id: table_id,
        defining,
        columns,
        entries,
    })
}

/// Writes a table in the file format read by [`parse_table`].
pub fn serialize_table(t: &Table) -> String {
    let mut out = format!("#table {}\n", t.id);
    for (f, v) in &t.defining {
        out.push_str(&format!("#def {f} {v}\n"));
    }
    let mut header: Vec<&str> = FIXED_COLUMNS.to_vec();
    header.extend(t.columns.iter().map(String::as_str));
    out.push_str(&header.join("\t"));
    out.push('\n');
    for e in &t.entries {
        let mut row = vec![
            e.id.clone(),
            e.lemma.clone(),
            e.pattern.clone(),
            e.pos.code().to_string(),
        ];
        for c in &t.columns {
            row.push(match e.features.get(c) {
                Some(v) => v.to_cell(),
                None if t.defining_value(c).is_some() => String::new(),
                None => FeatureValue::Unknown.to_cell(),
            });
        }
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

/// Every defining-feature contradiction, registry mismatch and rule violation
/// in the table, in entry order then feature order.
pub fn validate_table(
    t: &Table,
    registry: &FeatureRegistry,
    lang: LanguageConfig,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let tag = |v: Violation| v.in_table(&t.id);

    for (f, v) in &t.defining {
        match registry.lookup(f) {
            None => out.push(tag(Violation::error(
                ViolationKind::RegistryMismatch,
                format!("defining feature {f} is not declared"),
            )
            .on_feature(f))),
            Some(def) if !def.accepts(v) => out.push(tag(Violation::error(
                ViolationKind::RegistryMismatch,
                format!("defining value {v} does not fit a {:?} feature", def.kind),
            )
            .on_feature(f))),
            _ => {}
        }
    }

    let mut ids = HashSet::new();
    for e in &t.entries {
        if !ids.insert(e.id.as_str()) {
            out.push(tag(Violation::error(
                ViolationKind::RegistryMismatch,
                "duplicate entry id",
            )
            .for_entry(&e.id)));
        }
        let pattern = match e.parsed_pattern() {
            Ok(p) => Some(p),
            Err(err) => {
                out.push(tag(Violation::error(
                    ViolationKind::RegistryMismatch,
                    format!("pattern {:?} does not parse: {err}", e.pattern),
                )
                .for_entry(&e.id)));
                None
            }
        };
        let mut features: Vec<&String> = e.features.keys().collect();
        sort_by_registry(&mut features, registry, |f| f);
        for f in features {
            let value = &e.features[f];
            if let Some(expected) = t.defining_value(f) {
                if expected != value {
                    out.push(tag(Violation::error(
                        ViolationKind::DefiningFeature,
                        format!("records {value} but the table defines {f}={expected}"),
                    )
                    .for_entry(&e.id)
                    .on_feature(f)));
                }
            }
            let Some(def) = registry.lookup(f) else {
                out.push(tag(Violation::error(
                    ViolationKind::RegistryMismatch,
                    format!("feature {f} is not declared"),
                )
                .for_entry(&e.id)
                .on_feature(f)));
                continue;
            };
            if !def.accepts(value) {
                out.push(tag(Violation::error(
                    ViolationKind::RegistryMismatch,
                    format!("value {value} does not fit a {:?} feature", def.kind),
                )
                .for_entry(&e.id)
                .on_feature(f)));
            }
            if let (Some(slot), Some(p)) = (def.slot(), &pattern) {
                if def.kind == FeatureKind::SlotValued
                    && !value.literal_texts().is_empty()
                    && !p.has_slot(slot)
                {
                    out.push(tag(Violation::error(
                        ViolationKind::MissingSlot,
                        format!("{f} names slot {slot}, absent from the pattern"),
                    )
                    .for_entry(&e.id)
                    .on_feature(f)));
                }
            }
        }
        let full = t.materialize(e);
        let derived = registry::derive_features(&full, registry);
        out.extend(derived.violations.into_iter().map(tag));
        out.extend(
            registry::check_implications(&derived.entry, registry, lang)
                .into_iter()
                .map(tag),
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("entry id {id:?} occurs in both table {first} and table {second}")]
pub struct MergeError {
    pub id: String,
    pub first: String,
    pub second: String,
}

/// Joins tables into a lexicon; entry ids must be unique across tables.
pub fn merge_lexicon(registry_version: &str, parts: Vec<Table>) -> Result<Lexicon, MergeError> {
    let mut owner: HashMap<&str, &str> = HashMap::new();
    for t in &parts {
        for e in &t.entries {
            if let Some(first) = owner.insert(&e.id, &t.id) {
                return Err(MergeError {
                    id: e.id.clone(),
                    first: first.to_string(),
                    second: t.id.clone(),
                });
            }
        }
    }
    Ok(Lexicon {
        registry_version: registry_version.to_string(),
        tables: parts,
    })
}
