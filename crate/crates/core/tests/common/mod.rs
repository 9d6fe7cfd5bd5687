//! Fixture paths and random table generators shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use mwelex::registry::{FeatureDef, FeatureKind};
use mwelex::{parse_table, standard_registry, Entry, FeatureRegistry, FeatureValue, Pos, Table};
use proptest::prelude::*;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> Table {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    parse_table(&text, &standard_registry()).unwrap()
}

const VERB_PATTERNS: [&str; 4] = [
    "N0 V:deal <a ~ blow> P:to N1",
    "N0 V:bear comparison P:to N1",
    "N0 V:beard <the lion> [P:in <his den>]",
    "N0 V:have pity P:on N1",
];

const OTHER_PATTERNS: [&str; 3] = ["on time", "red wine", "in a jam"];

pub fn arb_pos() -> impl Strategy<Value = Pos> {
    prop::sample::select(Pos::ALL.to_vec())
}

fn arb_literal() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["to", "on", "in", "get", "throw", "keep", "into"]).prop_map(String::from)
}

/// A value accepted by the feature's kind, Unknown included.
pub fn arb_value(def: &FeatureDef) -> BoxedStrategy<FeatureValue> {
    match def.kind {
        FeatureKind::Binary => prop_oneof![
            Just(FeatureValue::Plus),
            Just(FeatureValue::Minus),
            Just(FeatureValue::Unknown)
        ]
        .boxed(),
        FeatureKind::SlotValued | FeatureKind::VerbSetValued => prop_oneof![
            Just(FeatureValue::Minus),
            Just(FeatureValue::Unknown),
            prop::collection::btree_set(arb_literal(), 1..3)
                .prop_map(|s| FeatureValue::literals(s).unwrap()),
        ]
        .boxed(),
        FeatureKind::Literal => {
            let values = if def.values.is_empty() {
                vec!["into".to_string(), "out of".to_string()]
            } else {
                def.values.clone()
            };
            prop_oneof![
                Just(FeatureValue::Unknown),
                prop::sample::select(values).prop_map(FeatureValue::Literal),
            ]
            .boxed()
        }
    }
}

pub fn arb_binary() -> impl Strategy<Value = FeatureValue> {
    prop_oneof![
        Just(FeatureValue::Plus),
        Just(FeatureValue::Minus),
        Just(FeatureValue::Unknown)
    ]
}

fn arb_lemma() -> impl Strategy<Value = String> {
    "[a-z]{1,6}( [a-z']{1,6}){0,2}"
}

/// An entry with a random subset of registry features.
pub fn arb_entry(id: String, reg: &FeatureRegistry) -> BoxedStrategy<Entry> {
    let defs: Vec<FeatureDef> = reg.defs().to_vec();
    let features = defs
        .into_iter()
        .map(|d| (Just(d.id.clone()), arb_value(&d), any::<bool>()))
        .collect::<Vec<_>>();
    (arb_pos(), arb_lemma(), 0usize..4, features)
        .prop_map(move |(pos, lemma, pi, feats)| {
            let pattern = if pos == Pos::VerbIdiom {
                VERB_PATTERNS[pi % VERB_PATTERNS.len()]
            } else {
                OTHER_PATTERNS[pi % OTHER_PATTERNS.len()]
            };
            let mut e = Entry::new(&id, &lemma, pattern, pos);
            for (f, v, keep) in feats {
                if keep {
                    e.features.insert(f, v);
                }
            }
            e
        })
        .boxed()
}

/// A table with 1..=max entries and up to two class constants. Entries never
/// record a value that contradicts a class constant.
pub fn arb_table(max: usize) -> BoxedStrategy<Table> {
    let reg = standard_registry();
    let defining_pool: Vec<FeatureDef> = reg
        .defs()
        .iter()
        .filter(|d| d.kind == FeatureKind::Binary)
        .cloned()
        .collect();
    let defining = prop::collection::vec(
        (prop::sample::select(defining_pool), prop_oneof![Just(FeatureValue::Plus), Just(FeatureValue::Minus)]),
        0..3,
    );
    let reg2 = reg.clone();
    (1..=max, defining)
        .prop_flat_map(move |(n, defining)| {
            let entries: Vec<BoxedStrategy<Entry>> = (0..n)
                .map(|i| arb_entry(format!("e{i}"), &reg2))
                .collect();
            (Just(defining), entries)
        })
        .prop_map(move |(defining, entries)| {
            let mut seen = std::collections::BTreeSet::new();
            let defining: Vec<(String, FeatureValue)> = defining
                .into_iter()
                .filter(|(d, _)| seen.insert(d.id.clone()))
                .map(|(d, v)| (d.id, v))
                .collect();
            let entries = entries
                .into_iter()
                .map(|mut e| {
                    for (f, v) in &defining {
                        if e.features.contains_key(f) {
                            e.features.insert(f.clone(), v.clone());
                        }
                    }
                    e
                })
                .collect();
            Table::new("rand", defining, entries, &reg)
        })
        .boxed()
}
