//! The two MWE classification trees.
//!
//! The first tree gates on lexicalization, then on support-verb
//! construction, then on part of speech, with prepositional phrases split by
//! compatibility with *be*. The second tree counts the copula as a support
//! verb: be-compatible phrases move under the support-verb branch, which is
//! subdivided by the part of speech of the predicate core.
//!
//! An Unknown value on any consulted feature stops descent; the tree never
//! guesses.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::feature::FeatureValue;
use crate::lexicon::{Entry, Lexicon, Pos};
use crate::registry::{
    self, FeatureRegistry, LanguageConfig, BE_COMPATIBLE, COPULAR_SVC, LEXICALIZED,
    PRED_CORE_POS, SVC,
};

/// Pseudo-feature recorded in decision paths for the part-of-speech test.
pub const POS_DECISION: &str = "pos";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tree {
    Fig1,
    Fig2,
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tree::Fig1 => "fig1",
            Tree::Fig2 => "fig2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Leaf {
    NonLexicalized,
    SupportVerbConstruction,
    MultiwordNoun,
    MultiwordAdjective,
    VerbalIdiom,
    MultiwordAdverbial,
    PPCompatibleWithBe,
    SvcNounPredicate,
    CopularPredNoun,
    CopularPredAdjective,
    CopularPredPP,
}

impl Leaf {
    pub const FIG1: [Leaf; 7] = [
        Leaf::NonLexicalized,
        Leaf::SupportVerbConstruction,
        Leaf::MultiwordNoun,
        Leaf::MultiwordAdjective,
        Leaf::VerbalIdiom,
        Leaf::MultiwordAdverbial,
        Leaf::PPCompatibleWithBe,
    ];

    pub const FIG2: [Leaf; 9] = [
        Leaf::NonLexicalized,
        Leaf::SvcNounPredicate,
        Leaf::CopularPredNoun,
        Leaf::CopularPredAdjective,
        Leaf::CopularPredPP,
        Leaf::MultiwordNoun,
        Leaf::MultiwordAdjective,
        Leaf::VerbalIdiom,
        Leaf::MultiwordAdverbial,
    ];

    pub fn leaves(tree: Tree) -> &'static [Leaf] {
        match tree {
            Tree::Fig1 => &Leaf::FIG1,
            Tree::Fig2 => &Leaf::FIG2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Leaf::NonLexicalized => "NonLexicalized",
            Leaf::SupportVerbConstruction => "SupportVerbConstruction",
            Leaf::MultiwordNoun => "MultiwordNoun",
            Leaf::MultiwordAdjective => "MultiwordAdjective",
            Leaf::VerbalIdiom => "VerbalIdiom",
            Leaf::MultiwordAdverbial => "MultiwordAdverbial",
            Leaf::PPCompatibleWithBe => "PPCompatibleWithBe",
            Leaf::SvcNounPredicate => "SvcNounPredicate",
            Leaf::CopularPredNoun => "CopularPredNoun",
            Leaf::CopularPredAdjective => "CopularPredAdjective",
            Leaf::CopularPredPP => "CopularPredPP",
        }
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One test made on the way down a tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub feature: String,
    pub observed: FeatureValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassLabel {
    pub tree: Tree,
    pub leaf: Leaf,
    pub path: Vec<Decision>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", content = "rule", rename_all = "kebab-case")]
pub enum BlockReason {
    /// The blocking feature is not judged.
    Unknown,
    /// The blocking feature holds a value of the wrong kind.
    InvalidValue,
    /// The combination of judgments breaks the named rule.
    RuleConflict(String),
    /// The combination of judgments has no place in the tree.
    Unplaced,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unclassifiable {
    pub tree: Tree,
    pub entry_id: String,
    pub blocking_feature: String,
    pub reason: BlockReason,
    pub partial_path: Vec<Decision>,
}

pub type Classification = Result<ClassLabel, Unclassifiable>;

/// Short form used in reports: the leaf name or `Unclassifiable(<feature>)`.
pub fn outcome_name(c: &Classification) -> String {
    match c {
        Ok(l) => l.leaf.to_string(),
        Err(u) => format!("Unclassifiable({})", u.blocking_feature),
    }
}

struct Walk<'a> {
    tree: Tree,
    entry: &'a Entry,
    path: Vec<Decision>,
}

impl<'a> Walk<'a> {
    fn new(tree: Tree, entry: &'a Entry) -> Self {
        Walk {
            tree,
            entry,
            path: Vec::new(),
        }
    }

    fn record(&mut self, feature: &str, observed: FeatureValue) {
        self.path.push(Decision {
            feature: feature.to_string(),
            observed,
        });
    }

    fn block(&self, feature: &str, reason: BlockReason) -> Unclassifiable {
        Unclassifiable {
            tree: self.tree,
            entry_id: self.entry.id.clone(),
            blocking_feature: feature.to_string(),
            reason,
            partial_path: self.path.clone(),
        }
    }

    /// Reads a binary gate and records it.
    fn gate(&mut self, feature: &str) -> Result<bool, Unclassifiable> {
        match self.entry.value(feature) {
            FeatureValue::Plus => {
                self.record(feature, FeatureValue::Plus);
                Ok(true)
            }
            FeatureValue::Minus => {
                self.record(feature, FeatureValue::Minus);
                Ok(false)
            }
            FeatureValue::Unknown => Err(self.block(feature, BlockReason::Unknown)),
            _ => Err(self.block(feature, BlockReason::InvalidValue)),
        }
    }

    fn pos(&mut self) -> Pos {
        let pos = self.entry.pos;
        self.record(POS_DECISION, FeatureValue::Literal(pos.code().to_string()));
        pos
    }

    fn leaf(self, leaf: Leaf) -> Classification {
        Ok(ClassLabel {
            tree: self.tree,
            leaf,
            path: self.path,
        })
    }
}

/// Classification under the first tree.
pub fn classify_fig1(e: &Entry) -> Classification {
    let mut w = Walk::new(Tree::Fig1, e);
    if !w.gate(LEXICALIZED)? {
        return w.leaf(Leaf::NonLexicalized);
    }
    if w.gate(SVC)? {
        return w.leaf(Leaf::SupportVerbConstruction);
    }
    let leaf = match w.pos() {
        Pos::Noun => Leaf::MultiwordNoun,
        Pos::Adjective => Leaf::MultiwordAdjective,
        Pos::VerbIdiom => Leaf::VerbalIdiom,
        // adverbs, prepositions and conjunctions share one class
        Pos::Adverbial => Leaf::MultiwordAdverbial,
        Pos::PrepPhrase => {
            if w.gate(BE_COMPATIBLE)? {
                Leaf::PPCompatibleWithBe
            } else {
                Leaf::MultiwordAdverbial
            }
        }
    };
    w.leaf(leaf)
}

/// Classification under the second tree, where the copula counts as a
/// support verb.
pub fn classify_fig2(e: &Entry, lang: LanguageConfig) -> Classification {
    let mut w = Walk::new(Tree::Fig2, e);
    if !w.gate(LEXICALIZED)? {
        return w.leaf(Leaf::NonLexicalized);
    }

    // svc OR copular-svc, under strong Kleene disjunction
    let copular = match e.value(SVC) {
        FeatureValue::Plus => {
            w.record(SVC, FeatureValue::Plus);
            Some(w.gate(COPULAR_SVC)?)
        }
        FeatureValue::Minus => {
            w.record(SVC, FeatureValue::Minus);
            if w.gate(COPULAR_SVC)? {
                Some(true)
            } else {
                None
            }
        }
        FeatureValue::Unknown => match e.value(COPULAR_SVC) {
            FeatureValue::Plus => {
                w.record(COPULAR_SVC, FeatureValue::Plus);
                Some(true)
            }
            FeatureValue::Minus => {
                w.record(COPULAR_SVC, FeatureValue::Minus);
                return Err(w.block(SVC, BlockReason::Unknown));
            }
            _ => return Err(w.block(SVC, BlockReason::Unknown)),
        },
        _ => return Err(w.block(SVC, BlockReason::InvalidValue)),
    };

    let Some(copular) = copular else {
        let leaf = match w.pos() {
            Pos::Noun => Leaf::MultiwordNoun,
            Pos::Adjective => Leaf::MultiwordAdjective,
            Pos::VerbIdiom => Leaf::VerbalIdiom,
            Pos::Adverbial | Pos::PrepPhrase => Leaf::MultiwordAdverbial,
        };
        return w.leaf(leaf);
    };

    let core = match e.value(PRED_CORE_POS) {
        FeatureValue::Unknown => return Err(w.block(PRED_CORE_POS, BlockReason::Unknown)),
        FeatureValue::Literal(s) if matches!(s.as_str(), "noun" | "adjective" | "pp") => s.clone(),
        _ => return Err(w.block(PRED_CORE_POS, BlockReason::InvalidValue)),
    };
    w.record(PRED_CORE_POS, FeatureValue::Literal(core.clone()));
    match (copular, core.as_str()) {
        (false, "noun") => w.leaf(Leaf::SvcNounPredicate),
        (true, "noun") => w.leaf(Leaf::CopularPredNoun),
        (true, "pp") => w.leaf(Leaf::CopularPredPP),
        (true, "adjective") if lang.has_copula => w.leaf(Leaf::CopularPredAdjective),
        (true, "adjective") => Err(w.block(COPULAR_SVC, BlockReason::Unplaced)),
        (false, "adjective") if lang.has_copula => {
            Err(w.block(COPULAR_SVC, BlockReason::RuleConflict("R3".into())))
        }
        _ => Err(w.block(PRED_CORE_POS, BlockReason::Unplaced)),
    }
}

/// Second-tree leaves that correspond to each first-tree leaf.
pub fn fig2_counterparts(fig1: Leaf) -> &'static [Leaf] {
    match fig1 {
        Leaf::PPCompatibleWithBe => &[Leaf::CopularPredPP],
        Leaf::SupportVerbConstruction => &[Leaf::SvcNounPredicate],
        Leaf::MultiwordNoun => &[Leaf::MultiwordNoun, Leaf::CopularPredNoun],
        Leaf::MultiwordAdjective => &[Leaf::MultiwordAdjective, Leaf::CopularPredAdjective],
        Leaf::VerbalIdiom => &[Leaf::VerbalIdiom],
        Leaf::MultiwordAdverbial => &[Leaf::MultiwordAdverbial],
        Leaf::NonLexicalized => &[Leaf::NonLexicalized],
        _ => &[],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Consistency {
    pub entry_id: String,
    pub fig1: Classification,
    pub fig2: Classification,
    /// None when either tree could not classify the entry.
    pub consistent: Option<bool>,
}

impl Consistency {
    pub fn is_inconsistent(&self) -> bool {
        self.consistent == Some(false)
    }
}

/// Checks that the two trees agree under the leaf correspondence.
pub fn cross_check(e: &Entry, lang: LanguageConfig) -> Consistency {
    let fig1 = classify_fig1(e);
    let fig2 = classify_fig2(e, lang);
    let consistent = match (&fig1, &fig2) {
        (Ok(a), Ok(b)) => Some(fig2_counterparts(a.leaf).contains(&b.leaf)),
        _ => None,
    };
    Consistency {
        entry_id: e.id.clone(),
        fig1,
        fig2,
        consistent,
    }
}

/// Entries ready for classification: class constants copied in and derived
/// features computed.
pub fn prepare_entries(lx: &Lexicon, registry: &FeatureRegistry) -> Vec<Entry> {
    lx.materialized_entries()
        .iter()
        .map(|e| registry::derive_features(e, registry).entry)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeafCount {
    pub leaf: Leaf,
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeSummary {
    pub tree: Tree,
    pub leaves: Vec<LeafCount>,
    pub unclassifiable: Vec<Unclassifiable>,
    pub unclassifiable_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexiconSummary {
    pub total: usize,
    pub fig1: TreeSummary,
    pub fig2: TreeSummary,
    pub inconsistent: Vec<String>,
}

fn percent(n: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * n as f64 / total as f64
    }
}

fn summarize(tree: Tree, outcomes: &[&Classification]) -> TreeSummary {
    let total = outcomes.len();
    let leaves = Leaf::leaves(tree)
        .iter()
        .map(|&leaf| {
            let count = outcomes
                .iter()
                .filter(|o| matches!(o, Ok(l) if l.leaf == leaf))
                .count();
            LeafCount {
                leaf,
                count,
                percent: percent(count, total),
            }
        })
        .collect();
    let unclassifiable: Vec<Unclassifiable> = outcomes
        .iter()
        .filter_map(|o| o.as_ref().err().cloned())
        .collect();
    let unclassifiable_percent = percent(unclassifiable.len(), total);
    TreeSummary {
        tree,
        leaves,
        unclassifiable,
        unclassifiable_percent,
    }
}

/// Per-entry cross-checks for the whole lexicon, in entry order.
pub fn classify_entries(entries: &[Entry], lang: LanguageConfig) -> Vec<Consistency> {
    entries.par_iter().map(|e| cross_check(e, lang)).collect()
}

/// Per-leaf counts and percentages for both trees.
pub fn classify_lexicon(
    lx: &Lexicon,
    registry: &FeatureRegistry,
    lang: LanguageConfig,
) -> LexiconSummary {
    let entries = prepare_entries(lx, registry);
    let checks = classify_entries(&entries, lang);
    let fig1: Vec<&Classification> = checks.iter().map(|c| &c.fig1).collect();
    let fig2: Vec<&Classification> = checks.iter().map(|c| &c.fig2).collect();
    LexiconSummary {
        total: entries.len(),
        fig1: summarize(Tree::Fig1, &fig1),
        fig2: summarize(Tree::Fig2, &fig2),
        inconsistent: checks
            .iter()
            .filter(|c| c.is_inconsistent())
            .map(|c| c.entry_id.clone())
            .collect(),
    }
}
