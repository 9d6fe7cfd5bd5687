//! Brute-force enumeration of the token sequences a set of variants
//! generates over a finite vocabulary. Ground truth for the matcher.

use std::collections::BTreeSet;

use thiserror::Error;

use super::compile::VariantPattern;
use super::matcher::{alternatives, Node};

pub const DEFAULT_CAP: usize = 100_000;

/// Finite filler sets. Slot fillers should be non-empty sequences; adjunct
/// fillers may include the empty sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleVocab {
    pub slot_fillers: Vec<Vec<String>>,
    pub adjunct_fillers: Vec<Vec<String>>,
    pub cap: Option<usize>,
}

impl OracleVocab {
    /// Every sequence over `words` of length 1..=max_slot for slots and
    /// 0..=max_gap for adjunct sites.
    pub fn closed(words: &[&str], max_slot: usize, max_gap: usize) -> Self {
        OracleVocab {
            slot_fillers: sequences(words, 1, max_slot),
            adjunct_fillers: sequences(words, 0, max_gap),
            cap: None,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }
}

fn sequences(words: &[&str], min: usize, max: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for len in 0..=max {
        if len >= min {
            out.extend(layer.iter().cloned());
        }
        layer = layer
            .iter()
            .flat_map(|s| {
                words.iter().map(move |w| {
                    let mut t = s.clone();
                    t.push(w.to_lowercase());
                    t
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("enumeration exceeds the cap of {0} sequences")]
    CapExceeded(usize),
}

/// The exact set of lower-cased token sequences generable from `patterns`.
pub fn oracle_enumerate(
    patterns: &[VariantPattern],
    vocab: &OracleVocab,
) -> Result<BTreeSet<Vec<String>>, OracleError> {
    let cap = vocab.cap.unwrap_or(DEFAULT_CAP);
    let mut out = BTreeSet::new();
    for p in patterns {
        for alt in alternatives(&p.atoms) {
            let mut partial: Vec<Vec<String>> = vec![Vec::new()];
            for node in &alt {
                let mut next = Vec::new();
                for prefix in &partial {
                    match node {
                        Node::Word(w) => {
                            let mut s = prefix.clone();
                            s.push(w.clone());
                            next.push(s);
                        }
                        Node::Gap => {
                            for f in &vocab.adjunct_fillers {
                                let mut s = prefix.clone();
                                s.extend(f.iter().cloned());
                                next.push(s);
                            }
                        }
                        Node::Slot { stop, .. } => {
                            for f in &vocab.slot_fillers {
                                if f.is_empty() || stop.as_ref().is_some_and(|w| f.contains(w)) {
                                    continue;
                                }
                                let mut s = prefix.clone();
                                s.extend(f.iter().cloned());
                                next.push(s);
                            }
                        }
                    }
                    if next.len() > cap {
                        return Err(OracleError::CapExceeded(cap));
                    }
                }
                partial = next;
            }
            out.extend(partial);
            if out.len() > cap {
                return Err(OracleError::CapExceeded(cap));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::FeatureValue::*;
    use crate::lexicon::{Entry, Pos};
    use crate::registry::*;
    use crate::variant::compile::compile_variants;

    fn vocab2() -> OracleVocab {
        OracleVocab {
            slot_fillers: vec![vec!["max".into()], vec!["luc".into()]],
            adjunct_fillers: vec![vec![]],
            cap: None,
        }
    }

    fn give() -> Entry {
        Entry::new("g", "deal a blow to", "V:deal <a blow> P:to N1", Pos::VerbIdiom)
    }

    #[test]
    fn base_only_counts() {
        let c = compile_variants(&give()).unwrap();
        assert_eq!(oracle_enumerate(&c.variants, &vocab2()).unwrap().len(), 2);
    }

    #[test]
    fn base_and_dative_counts() {
        let c = compile_variants(&give().with(DATIVE_SHIFT, Plus)).unwrap();
        assert_eq!(c.variants.len(), 2);
        assert_eq!(oracle_enumerate(&c.variants, &vocab2()).unwrap().len(), 4);
    }

    #[test]
    fn cap() {
        let e = Entry::new("x", "x", "N0 V:x N1 N2", Pos::VerbIdiom);
        let c = compile_variants(&e).unwrap();
        let v = OracleVocab::closed(&["a", "b", "c"], 3, 0).with_cap(100);
        assert_eq!(oracle_enumerate(&c.variants, &v), Err(OracleError::CapExceeded(100)));
    }

    #[test]
    fn closed_vocab_sizes() {
        let v = OracleVocab::closed(&["a", "b"], 2, 1);
        assert_eq!(v.slot_fillers.len(), 2 + 4);
        assert_eq!(v.adjunct_fillers.len(), 1 + 2);
    }

    #[test]
    fn slot_fillers_avoid_the_next_literal() {
        let e = Entry::new("x", "x", "N0 V:bear comparison", Pos::VerbIdiom);
        let c = compile_variants(&e).unwrap();
        let v = OracleVocab::closed(&["bear", "max"], 2, 0);
        let set = oracle_enumerate(&c.variants, &v).unwrap();
        assert!(set.iter().all(|s| !s[..s.len() - 2].contains(&"bear".to_string())));
        assert_eq!(set.len(), 2);
    }
}
