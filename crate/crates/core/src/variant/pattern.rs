//! The pattern DSL describing an entry's canonical surface form.
//!
//! Atoms are whitespace separated: `N0`..`N9` free slots, `V:lemma` the verb
//! head, `P:word` a selected preposition, `~` an adjunct site, `[ ... ]` an
//! optional constituent, `< ... >` a fixed constituent, and any other token
//! a fixed word. Brackets may be attached to the words they enclose.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lexicon::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternAtom {
    FixedWord(String),
    /// The verb head; `participle` marks the past-participle form used by passives.
    VerbHead { lemma: String, participle: bool },
    SlotRef(String),
    PrepLiteral(String),
    OptionalGroup(Vec<PatternAtom>),
    /// A fixed constituent such as the object noun phrase of a verbal idiom.
    FixedGroup(Vec<PatternAtom>),
    AdjunctSite,
}

impl PatternAtom {
    pub fn verb(lemma: &str) -> Self {
        PatternAtom::VerbHead {
            lemma: lemma.to_string(),
            participle: false,
        }
    }

    pub fn is_group(&self) -> bool {
        matches!(self, PatternAtom::OptionalGroup(_) | PatternAtom::FixedGroup(_))
    }
}

impl fmt::Display for PatternAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternAtom::FixedWord(w) => f.write_str(w),
            PatternAtom::VerbHead {
                lemma,
                participle: false,
            } => write!(f, "V:{lemma}"),
            PatternAtom::VerbHead {
                lemma,
                participle: true,
            } => write!(f, "V.pp:{lemma}"),
            PatternAtom::SlotRef(s) => f.write_str(s),
            PatternAtom::PrepLiteral(p) => write!(f, "P:{p}"),
            PatternAtom::AdjunctSite => f.write_str("~"),
            PatternAtom::OptionalGroup(atoms) => write!(f, "[{}]", join(atoms)),
            PatternAtom::FixedGroup(atoms) => write!(f, "<{}>", join(atoms)),
        }
    }
}

fn join(atoms: &[PatternAtom]) -> String {
    atoms
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("empty pattern")]
    Empty,
    #[error("nested optional group")]
    NestedOptional,
    #[error("fixed group nested inside a fixed group, or optional group inside a fixed group")]
    NestedGroup,
    #[error("unbalanced bracket {0:?}")]
    Unbalanced(char),
    #[error("empty group")]
    EmptyGroup,
    #[error("slot {0} occurs twice")]
    DuplicateSlot(String),
    #[error("verbal pattern has no verb head")]
    MissingVerbHead,
    #[error("more than one verb head")]
    MultipleVerbHeads,
    #[error("verb head inside a group")]
    VerbInGroup,
    #[error("malformed atom {0:?}")]
    BadAtom(String),
}

/// A parsed pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntryPattern {
    pub atoms: Vec<PatternAtom>,
}

impl EntryPattern {
    /// Checks the structural invariants of an atom list.
    pub fn new(atoms: Vec<PatternAtom>) -> Result<Self, PatternError> {
        let p = EntryPattern { atoms };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<(), PatternError> {
        if self.atoms.is_empty() {
            return Err(PatternError::Empty);
        }
        let mut slots: Vec<&str> = Vec::new();
        let mut verbs = 0;
        check_atoms(&self.atoms, None, &mut slots, &mut verbs)?;
        if verbs > 1 {
            return Err(PatternError::MultipleVerbHeads);
        }
        Ok(())
    }

    /// Parses and additionally checks part-of-speech specific constraints.
    pub fn parse_for(dsl: &str, pos: Pos) -> Result<Self, PatternError> {
        let p: EntryPattern = dsl.parse()?;
        if pos == Pos::VerbIdiom && p.verb_head().is_none() {
            return Err(PatternError::MissingVerbHead);
        }
        Ok(p)
    }

    pub fn verb_head(&self) -> Option<&str> {
        self.atoms.iter().find_map(|a| match a {
            PatternAtom::VerbHead { lemma, .. } => Some(lemma.as_str()),
            _ => None,
        })
    }

    /// Slot names in order of occurrence, including those inside groups.
    pub fn slots(&self) -> Vec<&str> {
        fn walk<'a>(atoms: &'a [PatternAtom], out: &mut Vec<&'a str>) {
            for a in atoms {
                match a {
                    PatternAtom::SlotRef(s) => out.push(s),
                    PatternAtom::OptionalGroup(g) | PatternAtom::FixedGroup(g) => walk(g, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.atoms, &mut out);
        out
    }

    pub fn has_slot(&self, name: &str) -> bool {
        self.slots().contains(&name)
    }

    /// Atoms with groups expanded, in surface order.
    pub fn leaves(&self) -> Vec<&PatternAtom> {
        fn walk<'a>(atoms: &'a [PatternAtom], out: &mut Vec<&'a PatternAtom>) {
            for a in atoms {
                match a {
                    PatternAtom::OptionalGroup(g) | PatternAtom::FixedGroup(g) => walk(g, out),
                    other => out.push(other),
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.atoms, &mut out);
        out
    }
}

fn check_atoms<'a>(
    atoms: &'a [PatternAtom],
    parent: Option<&PatternAtom>,
    slots: &mut Vec<&'a str>,
    verbs: &mut usize,
) -> Result<(), PatternError> {
    for a in atoms {
        match a {
            PatternAtom::SlotRef(s) => {
                if !is_slot_name(s) {
                    return Err(PatternError::BadAtom(s.clone()));
                }
                if slots.contains(&s.as_str()) {
                    return Err(PatternError::DuplicateSlot(s.clone()));
                }
                slots.push(s);
            }
            PatternAtom::VerbHead { lemma, .. } => {
                if parent.is_some() {
                    return Err(PatternError::VerbInGroup);
                }
                check_word(lemma)?;
                *verbs += 1;
            }
            PatternAtom::FixedWord(w) | PatternAtom::PrepLiteral(w) => check_word(w)?,
            PatternAtom::AdjunctSite => {}
            PatternAtom::OptionalGroup(g) | PatternAtom::FixedGroup(g) => {
                match (parent, a) {
                    (Some(PatternAtom::OptionalGroup(_)), PatternAtom::OptionalGroup(_)) => {
                        return Err(PatternError::NestedOptional)
                    }
                    (Some(PatternAtom::FixedGroup(_)), _) => return Err(PatternError::NestedGroup),
                    _ => {}
                }
                if g.is_empty() {
                    return Err(PatternError::EmptyGroup);
                }
                check_atoms(g, Some(a), slots, verbs)?;
            }
        }
    }
    Ok(())
}

fn check_word(w: &str) -> Result<(), PatternError> {
    if w.is_empty() || w.contains(|c: char| c.is_whitespace() || "[]<>~".contains(c)) {
        return Err(PatternError::BadAtom(w.to_string()));
    }
    Ok(())
}

pub fn is_slot_name(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 2 && b[0] == b'N' && b[1].is_ascii_digit()
}

fn lex(dsl: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in dsl.chars() {
        if c.is_whitespace() || "[]<>".contains(c) {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn atom(tok: &str) -> Result<PatternAtom, PatternError> {
    if tok == "~" {
        return Ok(PatternAtom::AdjunctSite);
    }
    if is_slot_name(tok) {
        return Ok(PatternAtom::SlotRef(tok.to_string()));
    }
    let nonempty = |s: &str| {
        if s.is_empty() || s.contains(':') {
            Err(PatternError::BadAtom(tok.to_string()))
        } else {
            Ok(s.to_string())
        }
    };
    if let Some(l) = tok.strip_prefix("V:") {
        return Ok(PatternAtom::VerbHead {
            lemma: nonempty(l)?,
            participle: false,
        });
    }
    if let Some(l) = tok.strip_prefix("V.pp:") {
        return Ok(PatternAtom::VerbHead {
            lemma: nonempty(l)?,
            participle: true,
        });
    }
    if let Some(p) = tok.strip_prefix("P:") {
        return Ok(PatternAtom::PrepLiteral(nonempty(p)?));
    }
    if tok.contains(':') || tok.contains('~') {
        return Err(PatternError::BadAtom(tok.to_string()));
    }
    Ok(PatternAtom::FixedWord(tok.to_string()))
}

impl FromStr for EntryPattern {
    type Err = PatternError;

    fn from_str(dsl: &str) -> Result<Self, Self::Err> {
        // Stack of (closing bracket, atoms collected so far).
        let mut stack: Vec<(char, Vec<PatternAtom>)> = vec![(' ', Vec::new())];
        for tok in lex(dsl) {
            match tok.as_str() {
                "[" => {
                    if stack.iter().any(|(c, _)| *c == ']') {
                        return Err(PatternError::NestedOptional);
                    }
                    if stack.iter().any(|(c, _)| *c == '>') {
                        return Err(PatternError::NestedGroup);
                    }
                    stack.push((']', Vec::new()));
                }
                "<" => {
                    if stack.iter().any(|(c, _)| *c == '>') {
                        return Err(PatternError::NestedGroup);
                    }
                    stack.push(('>', Vec::new()));
                }
                "]" | ">" => {
                    let close = tok.chars().next().unwrap();
                    if stack.len() < 2 || stack.last().unwrap().0 != close {
                        return Err(PatternError::Unbalanced(close));
                    }
                    let (_, inner) = stack.pop().unwrap();
                    if inner.is_empty() {
                        return Err(PatternError::EmptyGroup);
                    }
                    let group = if close == ']' {
                        PatternAtom::OptionalGroup(inner)
                    } else {
                        PatternAtom::FixedGroup(inner)
                    };
                    stack.last_mut().unwrap().1.push(group);
                }
                t => {
                    let a = atom(t)?;
                    stack.last_mut().unwrap().1.push(a);
                }
            }
        }
        if stack.len() != 1 {
            let open = stack.last().unwrap().0;
            return Err(PatternError::Unbalanced(if open == ']' { '[' } else { '<' }));
        }
        EntryPattern::new(stack.pop().unwrap().1)
    }
}

impl fmt::Display for EntryPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.atoms))
    }
}

/// Parses a pattern string.
pub fn parse_pattern(dsl: &str) -> Result<EntryPattern, PatternError> {
    dsl.parse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use PatternAtom::*;

    #[test]
    fn deal_a_blow() {
        let p = parse_pattern("N0 V:deal <a ~ blow> P:to N1").unwrap();
        assert_eq!(p.atoms.len(), 5);
        assert_eq!(
            p.atoms[2],
            FixedGroup(vec![FixedWord("a".into()), AdjunctSite, FixedWord("blow".into())])
        );
        let leaves = p.leaves();
        assert_eq!(leaves.iter().filter(|a| **a != &AdjunctSite).count(), 6);
        assert_eq!(leaves.iter().filter(|a| **a == &AdjunctSite).count(), 1);
        assert_eq!(p.to_string(), "N0 V:deal <a ~ blow> P:to N1");
    }

    #[test]
    fn optional_group_with_fixed_group() {
        let p = parse_pattern("N0 V:beard <the lion> [P:in <his den>]").unwrap();
        assert_eq!(
            p.atoms[3],
            OptionalGroup(vec![
                PrepLiteral("in".into()),
                FixedGroup(vec![FixedWord("his".into()), FixedWord("den".into())])
            ])
        );
        assert_eq!(p.verb_head(), Some("beard"));
        assert_eq!(p.to_string(), "N0 V:beard <the lion> [P:in <his den>]");
    }

    #[test]
    fn errors() {
        assert_eq!(parse_pattern("[[x]]"), Err(PatternError::NestedOptional));
        assert_eq!(parse_pattern("<a <b>>"), Err(PatternError::NestedGroup));
        assert_eq!(parse_pattern("N0 V:x N0"), Err(PatternError::DuplicateSlot("N0".into())));
        assert_eq!(parse_pattern("V:a V:b"), Err(PatternError::MultipleVerbHeads));
        assert_eq!(parse_pattern("[x"), Err(PatternError::Unbalanced('[')));
        assert_eq!(parse_pattern("x]"), Err(PatternError::Unbalanced(']')));
        assert_eq!(parse_pattern("[ ]"), Err(PatternError::EmptyGroup));
        assert_eq!(parse_pattern(""), Err(PatternError::Empty));
        assert_eq!(parse_pattern("[V:go]"), Err(PatternError::VerbInGroup));
        assert!(matches!(parse_pattern("V:"), Err(PatternError::BadAtom(_))));
        assert!(matches!(parse_pattern("Q:x"), Err(PatternError::BadAtom(_))));
        assert_eq!(
            EntryPattern::parse_for("on time", Pos::VerbIdiom),
            Err(PatternError::MissingVerbHead)
        );
        assert!(EntryPattern::parse_for("on time", Pos::PrepPhrase).is_ok());
    }

    #[test]
    fn loose_spacing_normalizes() {
        let p = parse_pattern("  N0   V:beard < the lion >  [ P:in  <his den> ] ").unwrap();
        assert_eq!(p.to_string(), "N0 V:beard <the lion> [P:in <his den>]");
    }
}
