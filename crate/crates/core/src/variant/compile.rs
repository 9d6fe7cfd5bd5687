//! Compiles an entry's pattern and operation features into the surface
//! variants the entry licenses.

use std::fmt;

use serde::Serialize;

use super::pattern::{EntryPattern, PatternAtom, PatternError};
use crate::feature::FeatureValue;
use crate::lexicon::{Entry, Pos};
use crate::registry::{
    ADJUNCT_INSERTION, CAUSATIVE_PREP, CAUSATIVE_VERBS, DATIVE_SHIFT, FIXED_CONSTITUENT_OPTIONAL,
    FREE_SLOT_OPTIONAL, PASSIVIZATION, VERB_REMOVABLE,
};

/// One licensed surface form. Atoms are flat except for optional groups,
/// which hold only leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariantPattern {
    pub entry_id: String,
    pub variant_id: String,
    #[serde(serialize_with = "atoms_as_dsl")]
    pub atoms: Vec<PatternAtom>,
    /// None for the base variant.
    pub licensing_feature: Option<String>,
}

fn atoms_as_dsl<S: serde::Serializer>(atoms: &[PatternAtom], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&dsl(atoms))
}

fn dsl(atoms: &[PatternAtom]) -> String {
    atoms
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for VariantPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&dsl(&self.atoms))
    }
}

/// A licensed variant that could not be built from the pattern's shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompileWarning {
    pub entry_id: String,
    pub variant: String,
    pub feature: String,
    pub message: String,
}

impl fmt::Display for CompileWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "warning\t{}\t{}\t{}\t{}",
            self.entry_id, self.variant, self.feature, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Compiled {
    pub variants: Vec<VariantPattern>,
    pub warnings: Vec<CompileWarning>,
}

struct Builder<'a> {
    entry: &'a Entry,
    keep_adjuncts: bool,
    out: Compiled,
}

impl Builder<'_> {
    fn push(&mut self, id: String, feature: Option<&str>, atoms: Vec<PatternAtom>) {
        let atoms = flatten(&atoms, self.keep_adjuncts, true);
        self.out.variants.push(VariantPattern {
            entry_id: self.entry.id.clone(),
            variant_id: id,
            atoms,
            licensing_feature: feature.map(str::to_string),
        });
    }

    fn warn(&mut self, variant: &str, feature: &str, message: &str) {
        self.out.warnings.push(CompileWarning {
            entry_id: self.entry.id.clone(),
            variant: variant.to_string(),
            feature: feature.to_string(),
            message: message.to_string(),
        });
    }
}

/// Removes fixed groups, keeps or drops adjunct sites, and either keeps
/// optional groups or makes their content required.
fn flatten(atoms: &[PatternAtom], keep_adjuncts: bool, keep_optional: bool) -> Vec<PatternAtom> {
    let mut out = Vec::new();
    for a in atoms {
        match a {
            PatternAtom::AdjunctSite if !keep_adjuncts => {}
            PatternAtom::FixedGroup(g) => out.extend(flatten(g, keep_adjuncts, keep_optional)),
            PatternAtom::OptionalGroup(g) => {
                let inner = flatten(g, keep_adjuncts, keep_optional);
                if !keep_optional {
                    out.extend(inner);
                } else if !inner.is_empty() {
                    out.push(PatternAtom::OptionalGroup(inner));
                }
            }
            other => out.push(other.clone()),
        }
    }
    out
}

/// Entry optional groups become required: dropping them is a variant of its own.
fn required(atoms: &[PatternAtom]) -> Vec<PatternAtom> {
    atoms
        .iter()
        .flat_map(|a| match a {
            PatternAtom::OptionalGroup(g) => g.clone(),
            other => vec![other.clone()],
        })
        .collect()
}

fn is_plus(e: &Entry, f: &str) -> bool {
    *e.value(f) == FeatureValue::Plus
}

/// `subject V object rest` split of a verbal pattern, where the subject is a
/// single slot or absent and the object is a fixed group or a run of fixed words.
struct VerbShape<'a> {
    subject: &'a [PatternAtom],
    verb: &'a str,
    object: &'a [PatternAtom],
    rest: &'a [PatternAtom],
}

fn verb_shape(atoms: &[PatternAtom]) -> Option<VerbShape<'_>> {
    let vi = atoms
        .iter()
        .position(|a| matches!(a, PatternAtom::VerbHead { .. }))?;
    let PatternAtom::VerbHead { lemma, .. } = &atoms[vi] else {
        unreachable!()
    };
    let subject = &atoms[..vi];
    if !matches!(subject, [] | [PatternAtom::SlotRef(_)]) {
        return None;
    }
    let after = &atoms[vi + 1..];
    let len = match after.first()? {
        PatternAtom::FixedGroup(_) => 1,
        PatternAtom::FixedWord(_) => after
            .iter()
            .take_while(|a| matches!(a, PatternAtom::FixedWord(_) | PatternAtom::AdjunctSite))
            .count(),
        _ => return None,
    };
    Some(VerbShape {
        subject,
        verb: lemma,
        object: &after[..len],
        rest: &after[len..],
    })
}

/// `P Nk`, bare or as an optional group.
fn prep_slot(rest: &[PatternAtom]) -> Option<(&str, &str)> {
    match rest {
        [PatternAtom::PrepLiteral(p), PatternAtom::SlotRef(s)] => Some((p, s)),
        [PatternAtom::OptionalGroup(g)] => prep_slot(g),
        _ => None,
    }
}

/// A prepositional complement: `P` then a slot, a fixed group or fixed words,
/// bare or as an optional group.
fn is_prep_phrase(rest: &[PatternAtom]) -> bool {
    match rest {
        [PatternAtom::OptionalGroup(g)] => is_prep_phrase(g),
        [PatternAtom::PrepLiteral(_), PatternAtom::SlotRef(_) | PatternAtom::FixedGroup(_)] => true,
        [PatternAtom::PrepLiteral(_), tail @ ..] => {
            !tail.is_empty() && tail.iter().all(|a| matches!(a, PatternAtom::FixedWord(_)))
        }
        _ => false,
    }
}

fn passive(atoms: &[PatternAtom]) -> Option<Vec<PatternAtom>> {
    let shape = verb_shape(atoms)?;
    if !shape.rest.is_empty() && !is_prep_phrase(shape.rest) {
        return None;
    }
    let mut out: Vec<PatternAtom> = shape.object.to_vec();
    out.extend(required(shape.rest));
    out.push(PatternAtom::FixedWord("be".into()));
    out.push(PatternAtom::VerbHead {
        lemma: shape.verb.to_string(),
        participle: true,
    });
    if !shape.subject.is_empty() {
        let mut by = vec![PatternAtom::FixedWord("by".into())];
        by.extend(shape.subject.iter().cloned());
        out.push(PatternAtom::OptionalGroup(by));
    }
    Some(out)
}

fn dative(atoms: &[PatternAtom]) -> Option<Vec<PatternAtom>> {
    let shape = verb_shape(atoms)?;
    let ("to", slot) = prep_slot(shape.rest)? else {
        return None;
    };
    let mut out: Vec<PatternAtom> = shape.subject.to_vec();
    out.push(PatternAtom::verb(shape.verb));
    out.push(PatternAtom::SlotRef(slot.to_string()));
    out.extend(shape.object.iter().cloned());
    Some(out)
}

fn drop_trailing_slot(atoms: &[PatternAtom]) -> Option<(String, Vec<PatternAtom>)> {
    let n = atoms.len();
    match atoms {
        [.., PatternAtom::PrepLiteral(_), PatternAtom::SlotRef(s)] if n > 2 => {
            Some((s[1..].to_string(), atoms[..n - 2].to_vec()))
        }
        _ => None,
    }
}

fn causative(p: &EntryPattern, verb: &str, prep: Option<&str>) -> Option<Vec<PatternAtom>> {
    if p.verb_head().is_some() || p.has_slot("N0") {
        return None;
    }
    let cause = (1..=9)
        .map(|k| format!("N{k}"))
        .find(|s| !p.has_slot(s))?;
    let mut body = p.atoms.clone();
    if let Some(prep) = prep {
        match body.first_mut() {
            Some(PatternAtom::FixedWord(w) | PatternAtom::PrepLiteral(w)) => *w = prep.to_string(),
            _ => return None,
        }
    }
    let mut out = vec![
        PatternAtom::SlotRef(cause),
        PatternAtom::verb(verb),
        PatternAtom::SlotRef("N0".into()),
    ];
    out.extend(body);
    Some(out)
}

/// The variants licensed by an entry, base first. Pass an entry with class
/// constants already copied in.
pub fn compile_variants(e: &Entry) -> Result<Compiled, PatternError> {
    let p = e.parsed_pattern()?;
    let mut b = Builder {
        entry: e,
        keep_adjuncts: is_plus(e, ADJUNCT_INSERTION),
        out: Compiled {
            variants: Vec::new(),
            warnings: Vec::new(),
        },
    };
    b.push("base".into(), None, required(&p.atoms));

    if is_plus(e, PASSIVIZATION) {
        match passive(&p.atoms) {
            Some(atoms) => b.push("passive".into(), Some(PASSIVIZATION), atoms),
            None => b.warn(
                "passive",
                PASSIVIZATION,
                "pattern is not a verb with a fixed object",
            ),
        }
    }

    if is_plus(e, DATIVE_SHIFT) {
        match dative(&p.atoms) {
            Some(atoms) => b.push("dative".into(), Some(DATIVE_SHIFT), atoms),
            None => b.warn(
                "dative",
                DATIVE_SHIFT,
                "pattern is not a verb with a fixed object and a P:to slot",
            ),
        }
    }

    if is_plus(e, FIXED_CONSTITUENT_OPTIONAL) {
        let groups: Vec<usize> = p
            .atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, PatternAtom::OptionalGroup(_)))
            .map(|(i, _)| i)
            .collect();
        if groups.is_empty() {
            b.warn("drop-optional", FIXED_CONSTITUENT_OPTIONAL, "pattern has no optional group");
        }
        for (k, &gi) in groups.iter().enumerate() {
            let mut atoms = p.atoms.clone();
            atoms.remove(gi);
            b.push(
                format!("drop-optional-{}", k + 1),
                Some(FIXED_CONSTITUENT_OPTIONAL),
                required(&atoms),
            );
        }
    }

    if is_plus(e, FREE_SLOT_OPTIONAL) {
        match drop_trailing_slot(&p.atoms) {
            Some((k, atoms)) => b.push(
                format!("drop-slot-{k}"),
                Some(FREE_SLOT_OPTIONAL),
                required(&atoms),
            ),
            None => b.warn(
                "drop-slot",
                FREE_SLOT_OPTIONAL,
                "pattern does not end with a prepositional slot",
            ),
        }
    }

    let verbs = e.value(CAUSATIVE_VERBS).literal_texts();
    if !verbs.is_empty() {
        let prep = e.value(CAUSATIVE_PREP).literal_texts().first().map(String::as_str);
        for v in verbs {
            let id = format!("causative-{v}");
            if e.pos != Pos::PrepPhrase {
                b.warn(&id, CAUSATIVE_VERBS, "causative variants apply to prepositional phrases");
                continue;
            }
            match causative(&p, v, prep) {
                Some(atoms) => b.push(id, Some(CAUSATIVE_VERBS), required(&atoms)),
                None => b.warn(&id, CAUSATIVE_VERBS, "pattern already has a verb or an N0 slot"),
            }
        }
    }

    if is_plus(e, VERB_REMOVABLE) {
        let atoms: Vec<PatternAtom> = required(&p.atoms)
            .into_iter()
            .filter(|a| !matches!(a, PatternAtom::VerbHead { .. }))
            .collect();
        if p.verb_head().is_none() {
            b.warn("verbless", VERB_REMOVABLE, "pattern has no verb head");
        } else if atoms.is_empty() {
            b.warn("verbless", VERB_REMOVABLE, "pattern is only a verb");
        } else {
            b.push("verbless".into(), Some(VERB_REMOVABLE), atoms);
        }
    }

    Ok(b.out)
}
