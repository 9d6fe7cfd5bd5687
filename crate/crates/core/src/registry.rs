//! The feature catalogue, the implication rules between features, and the
//! three-valued logic used for derived features.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feature::FeatureValue;
use crate::lexicon::Entry;
use crate::violation::{Violation, ViolationKind};

pub const LEXICALIZED: &str = "lexicalized";
pub const SVC: &str = "svc";
pub const COPULAR_SVC: &str = "copular-svc";
pub const PRED_CORE_POS: &str = "pred-core-pos";
pub const DET_COREF_CONSTRAINT: &str = "det-coref-constraint";
pub const VERB_REMOVABLE: &str = "verb-removable";
pub const BE_COMPATIBLE: &str = "be-compatible";
pub const CAUSATIVE_VERBS: &str = "causative-verbs";
pub const CAUSATIVE_PREP: &str = "causative-prep";
pub const COMPULSORY_COREF: &str = "compulsory-coref";
pub const FIXED_CONSTITUENT_OPTIONAL: &str = "fixed-constituent-optional";
pub const FREE_SLOT_OPTIONAL: &str = "free-slot-optional";
pub const ADJUNCT_INSERTION: &str = "adjunct-insertion";
pub const TOPICALIZATION: &str = "topicalization";
pub const DATIVE_SHIFT: &str = "dative-shift";
pub const REPEATED_REDUCTION: &str = "repeated-reduction";
pub const PSEUDOCLEFT: &str = "pseudocleft";
pub const PASSIVIZATION: &str = "passivization";
pub const SELECTED_PREP_N1: &str = "selected-prep-N1";
pub const SELECTED_PREP_N2: &str = "selected-prep-N2";
pub const HEAD_AUTONOMOUS: &str = "head-autonomous";
pub const REF_COMP_I: &str = "ref-comp-i";
pub const REF_COMP_II: &str = "ref-comp-ii";
pub const REF_COMP_III: &str = "ref-comp-iii";
pub const REF_COMPONENT: &str = "ref-component";

/// The syntactic-operation features, in catalogue order.
pub const OPERATION_FEATURES: [&str; 8] = [
    FIXED_CONSTITUENT_OPTIONAL,
    FREE_SLOT_OPTIONAL,
    ADJUNCT_INSERTION,
    TOPICALIZATION,
    DATIVE_SHIFT,
    REPEATED_REDUCTION,
    PSEUDOCLEFT,
    PASSIVIZATION,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    /// Plus, Minus or Unknown.
    Binary,
    /// A literal attached to a free slot, e.g. the preposition selected by N1.
    SlotValued,
    /// A set of verbs, e.g. the causative verbs an idiom accepts.
    VerbSetValued,
    /// A single literal, optionally restricted to a closed set of values.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDef {
    pub id: String,
    pub kind: FeatureKind,
    /// Closed value set for `Literal` features; empty means unrestricted.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    pub doc: String,
    pub criterion_ref: String,
}

impl FeatureDef {
    fn new(id: &str, kind: FeatureKind, doc: &str, criterion_ref: &str) -> Self {
        FeatureDef {
            id: id.to_string(),
            kind,
            values: Vec::new(),
            doc: doc.to_string(),
            criterion_ref: criterion_ref.to_string(),
        }
    }

    fn with_values(mut self, values: &[&str]) -> Self {
        self.values = values.iter().map(|s| s.to_string()).collect();
        self
    }

    /// The slot named by a slot-valued feature (`selected-prep-N1` -> `N1`).
    pub fn slot(&self) -> Option<&str> {
        if self.kind != FeatureKind::SlotValued {
            return None;
        }
        slot_suffix(&self.id)
    }

    /// Whether `value` is a legal cell for this feature.
    pub fn accepts(&self, value: &FeatureValue) -> bool {
        use FeatureValue::*;
        match (self.kind, value) {
            (_, Unknown) => true,
            (FeatureKind::Binary, Plus | Minus) => true,
            (FeatureKind::SlotValued | FeatureKind::VerbSetValued, Minus) => true,
            (FeatureKind::SlotValued | FeatureKind::VerbSetValued, Literal(_) | LiteralSet(_)) => {
                true
            }
            (FeatureKind::Literal, Literal(s)) => self.values.is_empty() || self.values.contains(s),
            _ => false,
        }
    }
}

fn slot_suffix(id: &str) -> Option<&str> {
    let (_, tail) = id.rsplit_once('-')?;
    let mut chars = tail.chars();
    match (chars.next(), chars.next(), chars.next()) {
        (Some('N'), Some(d), None) if d.is_ascii_digit() => Some(tail),
        _ => None,
    }
}

/// A required value in a rule: an exact cell value, or "any non-empty
/// literal set" for verb-set features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Requirement {
    Value(FeatureValue),
    NonEmpty,
}

impl Requirement {
    /// Whether the stored value meets the requirement. Unknown never does.
    pub fn holds(&self, value: &FeatureValue) -> bool {
        match self {
            Requirement::NonEmpty => !value.literal_texts().is_empty(),
            Requirement::Value(FeatureValue::Literal(want)) => {
                value.literal_texts().iter().any(|t| t == want)
            }
            Requirement::Value(want) => want == value,
        }
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Requirement::Value(v) => write!(f, "{v}"),
            Requirement::NonEmpty => f.write_str("non-empty"),
        }
    }
}

impl From<Requirement> for String {
    fn from(r: Requirement) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Requirement {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if s == "non-empty" {
            return Ok(Requirement::NonEmpty);
        }
        s.parse::<FeatureValue>()
            .map(Requirement::Value)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub feature: String,
    pub value: Requirement,
}

impl Condition {
    fn new(feature: &str, value: Requirement) -> Self {
        Condition {
            feature: feature.to_string(),
            value,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Requirement::Value(FeatureValue::Literal(s)) => write!(f, "{}={s}", self.feature),
            v => write!(f, "{}={v}", self.feature),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RuleKind {
    /// `antecedent => consequent`.
    Implication {
        antecedent: Condition,
        consequent: Condition,
        /// Only checked for languages where predicational adjectives take a copula.
        #[serde(default)]
        copula_only: bool,
    },
    /// `target <=> conjuncts[0] AND conjuncts[1] AND ...`, under strong Kleene logic.
    Conjunction { target: String, conjuncts: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationRule {
    pub rule_id: String,
    #[serde(flatten)]
    pub kind: RuleKind,
    pub doc: String,
}

impl ImplicationRule {
    pub fn features(&self) -> Vec<&str> {
        match &self.kind {
            RuleKind::Implication {
                antecedent,
                consequent,
                ..
            } => vec![antecedent.feature.as_str(), consequent.feature.as_str()],
            RuleKind::Conjunction { target, conjuncts } => std::iter::once(target.as_str())
                .chain(conjuncts.iter().map(String::as_str))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("feature {0:?} declared twice")]
    DuplicateFeature(String),
    #[error("slot-valued feature {0:?} must end with a slot suffix such as -N1")]
    MissingSlotSuffix(String),
    #[error("rule {rule}: feature {feature:?} is not declared")]
    UnknownRuleFeature { rule: String, feature: String },
    #[error("rule {0}: antecedent and consequent name the same feature")]
    SelfImplication(String),
    #[error("rule {0} declared twice")]
    DuplicateRule(String),
    #[error("invalid registry document: {0}")]
    Json(String),
}

/// Per-language switches consulted by rules and classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LanguageConfig {
    /// False for languages where predicational adjectives are used without a copula.
    pub has_copula: bool,
}

impl Default for LanguageConfig {
    fn default() -> Self {
        LanguageConfig { has_copula: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RegistryDoc", into = "RegistryDoc")]
pub struct FeatureRegistry {
    version: String,
    defs: Vec<FeatureDef>,
    rules: Vec<ImplicationRule>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct RegistryDoc {
    version: String,
    features: Vec<FeatureDef>,
    rules: Vec<ImplicationRule>,
}

impl TryFrom<RegistryDoc> for FeatureRegistry {
    type Error = RegistryError;

    fn try_from(doc: RegistryDoc) -> Result<Self, Self::Error> {
        FeatureRegistry::new(doc.version, doc.features, doc.rules)
    }
}

impl From<FeatureRegistry> for RegistryDoc {
    fn from(r: FeatureRegistry) -> Self {
        RegistryDoc {
            version: r.version,
            features: r.defs,
            rules: r.rules,
        }
    }
}

impl FeatureRegistry {
    pub fn new(
        version: impl Into<String>,
        defs: Vec<FeatureDef>,
        rules: Vec<ImplicationRule>,
    ) -> Result<Self, RegistryError> {
        let mut index = HashMap::new();
        for (i, d) in defs.iter().enumerate() {
            if index.insert(d.id.clone(), i).is_some() {
                return Err(RegistryError::DuplicateFeature(d.id.clone()));
            }
            if d.kind == FeatureKind::SlotValued && slot_suffix(&d.id).is_none() {
                return Err(RegistryError::MissingSlotSuffix(d.id.clone()));
            }
        }
        let mut seen = Vec::new();
        for r in &rules {
            if seen.contains(&&r.rule_id) {
                return Err(RegistryError::DuplicateRule(r.rule_id.clone()));
            }
            seen.push(&r.rule_id);
            for f in r.features() {
                if !index.contains_key(f) {
                    return Err(RegistryError::UnknownRuleFeature {
                        rule: r.rule_id.clone(),
                        feature: f.to_string(),
                    });
                }
            }
            let self_ref = match &r.kind {
                RuleKind::Implication {
                    antecedent,
                    consequent,
                    ..
                } => antecedent.feature == consequent.feature,
                RuleKind::Conjunction { target, conjuncts } => conjuncts.contains(target),
            };
            if self_ref {
                return Err(RegistryError::SelfImplication(r.rule_id.clone()));
            }
        }
        Ok(FeatureRegistry {
            version: version.into(),
            defs,
            rules,
            index,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, RegistryError> {
        serde_json::from_str(text).map_err(|e| RegistryError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn defs(&self) -> &[FeatureDef] {
        &self.defs
    }

    pub fn rules(&self) -> &[ImplicationRule] {
        &self.rules
    }

    pub fn lookup(&self, id: &str) -> Option<&FeatureDef> {
        self.index.get(id).map(|&i| &self.defs[i])
    }

    /// Declaration position of a feature; defines column order.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn rule(&self, rule_id: &str) -> Option<&ImplicationRule> {
        self.rules.iter().find(|r| r.rule_id == rule_id)
    }
}

/// The built-in catalogue of clear-cut features.
pub fn standard_registry() -> FeatureRegistry {
    use FeatureKind::*;
    let defs = vec![
        FeatureDef::new(
            LEXICALIZED,
            Binary,
            "constitutes a lexical item whose interpretation is not compositional",
            "black and white vs. *white and black with the same sense",
        ),
        FeatureDef::new(
            SVC,
            Binary,
            "support-verb construction: the predicate core is the noun, and a variant without the verb exists",
            "The quake made damage to the area / the damage to the area by the quake",
        ),
        FeatureDef::new(
            COPULAR_SVC,
            Binary,
            "the verb is the copula or a copula variant, counted as a support verb",
            "The customer was angry / an angry customer",
        ),
        FeatureDef::new(
            PRED_CORE_POS,
            Literal,
            "part of speech of the core of the predicate in a support-verb construction",
            "have an aim (noun), be angry (adjective), be on time (pp)",
        )
        .with_values(&["noun", "adjective", "pp"]),
        FeatureDef::new(
            DET_COREF_CONSTRAINT,
            Binary,
            "possessives, of-phrases and genitives around the noun can only refer to the subject",
            "He made his joke / *He made your joke",
        ),
        FeatureDef::new(
            VERB_REMOVABLE,
            Binary,
            "some syntactic operation yields a variant where the verb is absent",
            "the damage to the area made by the quake / the damage to the area by the quake",
        ),
        FeatureDef::new(
            BE_COMPATIBLE,
            Binary,
            "the prepositional phrase may appear in predicative position after be",
            "John will be on time / *The cause is in the final analysis",
        ),
        FeatureDef::new(
            CAUSATIVE_VERBS,
            VerbSetValued,
            "verbs inserted with an additional causative or agentive subject",
            "The storm (got + threw) the crew into a jam",
        ),
        FeatureDef::new(
            CAUSATIVE_PREP,
            Literal,
            "preposition heading the phrase in the causative construction when it differs from the base form",
            "Kathy was in a jam / ... got Kathy into a jam",
        ),
        FeatureDef::new(
            COMPULSORY_COREF,
            Binary,
            "a possessive inside the idiom must corefer with the subject",
            "He thought on his feet / *He thought on Ann's feet",
        ),
        FeatureDef::new(
            FIXED_CONSTITUENT_OPTIONAL,
            Binary,
            "a fixed constituent may be omitted",
            "John bearded the lion in his den / John bearded the lion",
        ),
        FeatureDef::new(
            FREE_SLOT_OPTIONAL,
            Binary,
            "a free slot may be omitted",
            "John bears comparison to Magritte / John bears comparison",
        ),
        FeatureDef::new(
            ADJUNCT_INSERTION,
            Binary,
            "free adjuncts may be inserted into fixed constituents",
            "This dealt a blow to my hopes / This dealt a strong blow to my hopes",
        ),
        FeatureDef::new(
            TOPICALIZATION,
            Binary,
            "a fixed constituent may be topicalized",
            "A blow like that, nobody deals to a friend",
        ),
        FeatureDef::new(
            DATIVE_SHIFT,
            Binary,
            "the to-complement may shift before the object",
            "The verdict dealt the campaign a blow",
        ),
        FeatureDef::new(
            REPEATED_REDUCTION,
            Binary,
            "a repeated occurrence may be reduced",
            "Ann lost her temper at noon; Bob lost his at dinner",
        ),
        FeatureDef::new(
            PSEUDOCLEFT,
            Binary,
            "the pseudocleft construction applies",
            "What Max took was a dip",
        ),
        FeatureDef::new(
            PASSIVIZATION,
            Binary,
            "the passive applies",
            "John was caught short of change by the price of the coffee / *Comparison to Magritte is borne by John",
        ),
        FeatureDef::new(
            SELECTED_PREP_N1,
            SlotValued,
            "preposition selected by free slot N1",
            "The judge had pity on the driver",
        ),
        FeatureDef::new(
            SELECTED_PREP_N2,
            SlotValued,
            "preposition selected by free slot N2",
            "N0 aller a N1 comme un tablier",
        ),
        FeatureDef::new(
            HEAD_AUTONOMOUS,
            Binary,
            "the modifier can be inserted or removed around the head noun without unexpected change",
            "They have an interest in wine / They have an interest in red wine",
        ),
        FeatureDef::new(
            REF_COMP_I,
            Binary,
            "(i) the component has the meaning of an independent lexical entry",
            "citer un temoin",
        ),
        FeatureDef::new(
            REF_COMP_II,
            Binary,
            "(ii) the component can belong to a chain of coreferring expressions",
            "La defense a cite un temoin. Il vient de s'exprimer",
        ),
        FeatureDef::new(
            REF_COMP_III,
            Binary,
            "(iii) coreference markers follow the rules of the free noun",
            "Ils avaient un autre temoin, mais finalement ils ne l'ont pas cite",
        ),
        FeatureDef::new(
            REF_COMPONENT,
            Binary,
            "referential component: conjunction of (i), (ii) and (iii)",
            "citer un temoin (+) vs. pull strings (-)",
        ),
    ];

    let implication = |id: &str, ante: Condition, cons: Condition, copula_only: bool, doc: &str| {
        ImplicationRule {
            rule_id: id.to_string(),
            kind: RuleKind::Implication {
                antecedent: ante,
                consequent: cons,
                copula_only,
            },
            doc: doc.to_string(),
        }
    };
    let rules = vec![
        implication(
            "R1",
            Condition::new(CAUSATIVE_VERBS, Requirement::NonEmpty),
            Condition::new(BE_COMPATIBLE, Requirement::Value(FeatureValue::Plus)),
            false,
            "the causative construction is only observed when the idiom is compatible with be",
        ),
        implication(
            "R2",
            Condition::new(SVC, Requirement::Value(FeatureValue::Plus)),
            Condition::new(VERB_REMOVABLE, Requirement::Value(FeatureValue::Plus)),
            false,
            "every support-verb construction has a variant without the verb",
        ),
        implication(
            "R3",
            Condition::new(
                PRED_CORE_POS,
                Requirement::Value(FeatureValue::Literal("adjective".into())),
            ),
            Condition::new(COPULAR_SVC, Requirement::Value(FeatureValue::Plus)),
            true,
            "a predicational adjective core requires the copula in copula languages",
        ),
        ImplicationRule {
            rule_id: "R4".to_string(),
            kind: RuleKind::Conjunction {
                target: REF_COMPONENT.to_string(),
                conjuncts: vec![
                    REF_COMP_I.to_string(),
                    REF_COMP_II.to_string(),
                    REF_COMP_III.to_string(),
                ],
            },
            doc: "a referential component has (i), (ii) and (iii) simultaneously".to_string(),
        },
    ];
    FeatureRegistry::new("standard-1", defs, rules).expect("built-in registry is well formed")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("strong Kleene conjunction takes tri-state values, got {0}")]
pub struct NotBinary(pub FeatureValue);

/// Strong Kleene conjunction: Minus dominates, then Unknown, else Plus.
/// The empty conjunction is Plus.
pub fn kleene_and<'a, I>(values: I) -> Result<FeatureValue, NotBinary>
where
    I: IntoIterator<Item = &'a FeatureValue>,
{
    let mut acc = FeatureValue::Plus;
    for v in values {
        match v {
            FeatureValue::Minus => acc = FeatureValue::Minus,
            FeatureValue::Unknown if acc == FeatureValue::Plus => acc = FeatureValue::Unknown,
            FeatureValue::Plus | FeatureValue::Unknown => {}
            other => return Err(NotBinary(other.clone())),
        }
    }
    Ok(acc)
}

/// Strong Kleene disjunction, the dual of [`kleene_and`].
pub fn kleene_or<'a, I>(values: I) -> Result<FeatureValue, NotBinary>
where
    I: IntoIterator<Item = &'a FeatureValue>,
{
    let mut acc = FeatureValue::Minus;
    for v in values {
        match v {
            FeatureValue::Plus => acc = FeatureValue::Plus,
            FeatureValue::Unknown if acc == FeatureValue::Minus => acc = FeatureValue::Unknown,
            FeatureValue::Minus | FeatureValue::Unknown => {}
            other => return Err(NotBinary(other.clone())),
        }
    }
    Ok(acc)
}

/// An entry with its derived features filled in, plus any contradiction
/// between a stored judgment and the derivation.
#[derive(Debug, Clone, PartialEq)]
pub struct Derived {
    pub entry: Entry,
    pub violations: Vec<Violation>,
}

/// Computes conjunction-defined features. A stored, known value that
/// disagrees with the derivation is kept and reported.
pub fn derive_features(e: &Entry, reg: &FeatureRegistry) -> Derived {
    let mut entry = e.clone();
    let mut violations = Vec::new();
    for rule in reg.rules() {
        let RuleKind::Conjunction { target, conjuncts } = &rule.kind else {
            continue;
        };
        let derived = match kleene_and(conjuncts.iter().map(|c| e.value(c))) {
            Ok(v) => v,
            Err(NotBinary(v)) => {
                violations.push(
                    Violation::error(
                        ViolationKind::Rule(rule.rule_id.clone()),
                        format!("conjunct carries non tri-state value {v}"),
                    )
                    .for_entry(&e.id)
                    .on_feature(target),
                );
                continue;
            }
        };
        let stored = e.value(target);
        match stored {
            FeatureValue::Unknown => {
                entry.features.insert(target.clone(), derived);
            }
            s if derived.is_known() && *s != derived => {
                violations.push(
                    Violation::error(
                        ViolationKind::Rule(rule.rule_id.clone()),
                        format!(
                            "stored {target}={s} contradicts {} = {derived}",
                            conjuncts.join(" & ")
                        ),
                    )
                    .for_entry(&e.id)
                    .on_feature(target),
                );
            }
            _ => {}
        }
    }
    Derived { entry, violations }
}

/// One violation per implication whose antecedent holds and whose consequent
/// is contradicted. A missing consequent judgment is a warning.
pub fn check_implications(
    e: &Entry,
    reg: &FeatureRegistry,
    lang: LanguageConfig,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for rule in reg.rules() {
        let RuleKind::Implication {
            antecedent,
            consequent,
            copula_only,
        } = &rule.kind
        else {
            continue;
        };
        if *copula_only && !lang.has_copula {
            continue;
        }
        if !antecedent.value.holds(e.value(&antecedent.feature)) {
            continue;
        }
        let found = e.value(&consequent.feature);
        if consequent.value.holds(found) {
            continue;
        }
        let kind = ViolationKind::Rule(rule.rule_id.clone());
        let v = if *found == FeatureValue::Unknown {
            Violation::warning(
                kind,
                format!("{antecedent} requires {consequent}, which is not judged yet"),
            )
        } else {
            Violation::error(
                kind,
                format!("{antecedent} requires {consequent}, found {found}"),
            )
        };
        out.push(v.for_entry(&e.id).on_feature(&consequent.feature));
    }
    out
}
