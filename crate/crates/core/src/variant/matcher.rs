//! Matching compiled variants against tokenized text.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::compile::VariantPattern;
use super::pattern::PatternAtom;

/// A corpus token. Written `surface` or `surface/lemma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
}

impl Token {
    pub fn new(surface: &str, lemma: &str) -> Self {
        Token {
            surface: surface.to_string(),
            lemma: lemma.to_string(),
        }
    }

    pub fn parse(s: &str) -> Self {
        match s.rsplit_once('/') {
            Some((surface, lemma)) if !surface.is_empty() && !lemma.is_empty() => {
                Token::new(surface, lemma)
            }
            _ => Token::new(s, s),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surface == self.lemma {
            f.write_str(&self.surface)
        } else {
            write!(f, "{}/{}", self.surface, self.lemma)
        }
    }
}

/// One sentence per line, tokens separated by whitespace. Blank lines are
/// kept as empty documents so line numbers stay aligned.
pub fn parse_corpus(text: &str) -> Vec<Vec<Token>> {
    text.lines()
        .map(|l| l.split_whitespace().map(Token::parse).collect())
        .collect()
}

/// Lemma to inflected forms. Lookups are case-insensitive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InflectionMap {
    forms: HashMap<String, HashSet<String>>,
}

impl InflectionMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, lemma: &str, form: &str) {
        self.forms
            .entry(lemma.to_lowercase())
            .or_default()
            .insert(form.to_lowercase());
    }

    /// Lines of `lemma form form ...`, tab or space separated; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut m = InflectionMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let lemma = fields.next().unwrap();
            let forms: Vec<&str> = fields.collect();
            if forms.is_empty() {
                return Err(format!("line {}: lemma {lemma:?} lists no forms", i + 1));
            }
            for f in forms {
                m.insert(lemma, f);
            }
        }
        Ok(m)
    }

    fn has_form(&self, lemma: &str, surface: &str) -> bool {
        self.forms
            .get(lemma)
            .is_some_and(|set| set.contains(surface))
    }
}

#[derive(Debug, Clone)]
pub struct MatchConfig {
    pub max_slot_len: usize,
    pub max_gap: usize,
    pub inflections: InflectionMap,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            max_slot_len: 5,
            max_gap: 2,
            inflections: InflectionMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchSpan {
    /// 1-based document (line) number; 0 when matching a single document.
    pub doc: usize,
    pub entry_id: String,
    pub variant_id: String,
    pub token_start: usize,
    /// Exclusive.
    pub token_end: usize,
    /// Slot name to token span, in pattern order.
    pub slot_bindings: Vec<(String, (usize, usize))>,
}

impl MatchSpan {
    /// `N0=...;N1=...` with the bound surface text.
    pub fn bindings_text(&self, doc: &[Token]) -> String {
        self.slot_bindings
            .iter()
            .map(|(s, (a, b))| {
                let words: Vec<&str> = doc[*a..*b].iter().map(|t| t.surface.as_str()).collect();
                format!("{s}={}", words.join(" "))
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn to_tsv(&self, doc: &[Token]) -> String {
        let bindings = self.bindings_text(doc);
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.doc,
            self.token_start,
            self.token_end,
            self.entry_id,
            self.variant_id,
            if bindings.is_empty() { "-" } else { &bindings }
        )
    }
}

/// Flat matching step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Word(String),
    /// A slot and the literal right after it, which the filler may not contain.
    Slot { name: String, stop: Option<String> },
    Gap,
}

fn literal(a: &PatternAtom) -> Option<&str> {
    match a {
        PatternAtom::FixedWord(w) | PatternAtom::PrepLiteral(w) => Some(w),
        PatternAtom::VerbHead { lemma, .. } => Some(lemma),
        _ => None,
    }
}

fn node(atoms: &[PatternAtom], i: usize) -> Node {
    match &atoms[i] {
        PatternAtom::SlotRef(s) => Node::Slot {
            name: s.clone(),
            stop: atoms.get(i + 1).and_then(literal).map(str::to_lowercase),
        },
        PatternAtom::AdjunctSite => Node::Gap,
        a => Node::Word(literal(a).expect("variant atoms are flat").to_lowercase()),
    }
}

/// Every optional group taken or skipped, taken first.
pub(crate) fn alternatives(atoms: &[PatternAtom]) -> Vec<Vec<Node>> {
    let mut alts: Vec<Vec<Node>> = vec![Vec::new()];
    for (i, a) in atoms.iter().enumerate() {
        match a {
            PatternAtom::OptionalGroup(g) => {
                let inner: Vec<Node> = (0..g.len()).map(|j| node(g, j)).collect();
                let mut next = Vec::with_capacity(alts.len() * 2);
                for alt in &alts {
                    let mut with = alt.clone();
                    with.extend(inner.iter().cloned());
                    next.push(with);
                    next.push(alt.clone());
                }
                alts = next;
            }
            _ => {
                let n = node(atoms, i);
                for alt in &mut alts {
                    alt.push(n.clone());
                }
            }
        }
    }
    alts
}

struct Doc<'a> {
    lemmas: Vec<String>,
    surfaces: Vec<String>,
    cfg: &'a MatchConfig,
}

impl Doc<'_> {
    fn is(&self, pos: usize, word: &str) -> bool {
        self.lemmas[pos] == word
            || self.surfaces[pos] == word
            || self.cfg.inflections.has_form(word, &self.surfaces[pos])
    }
}

type Bindings = Vec<(String, (usize, usize))>;

/// Longest end reachable from `pos`; ties keep the first found.
fn search(
    nodes: &[Node],
    pos: usize,
    doc: &Doc,
    bindings: &mut Bindings,
    best: &mut Option<(usize, Bindings)>,
) {
    let Some((first, rest)) = nodes.split_first() else {
        if best.as_ref().is_none_or(|(end, _)| pos > *end) {
            *best = Some((pos, bindings.clone()));
        }
        return;
    };
    let n = doc.lemmas.len();
    match first {
        Node::Word(w) => {
            if pos < n && doc.is(pos, w) {
                search(rest, pos + 1, doc, bindings, best);
            }
        }
        Node::Gap => {
            for len in 0..=doc.cfg.max_gap.min(n - pos) {
                search(rest, pos + len, doc, bindings, best);
            }
        }
        Node::Slot { name, stop } => {
            for len in 1..=doc.cfg.max_slot_len.min(n - pos) {
                if let Some(stop) = stop {
                    if doc.is(pos + len - 1, stop) {
                        break;
                    }
                }
                bindings.push((name.clone(), (pos, pos + len)));
                search(rest, pos + len, doc, bindings, best);
                bindings.pop();
            }
        }
    }
}

struct Program<'a> {
    variant: &'a VariantPattern,
    alts: Vec<Vec<Node>>,
}

fn longest_at(progs: &[Program], start: usize, doc: &Doc) -> Option<(usize, usize, Bindings)> {
    let mut found: Option<(usize, usize, Bindings)> = None;
    for (vi, p) in progs.iter().enumerate() {
        for alt in &p.alts {
            let mut best = None;
            search(alt, start, doc, &mut Vec::new(), &mut best);
            if let Some((end, b)) = best {
                if end > start && found.as_ref().is_none_or(|(e, _, _)| end > *e) {
                    found = Some((end, vi, b));
                }
            }
        }
    }
    found
}

/// Leftmost-longest, non-crossing matches of each entry's variants. Output
/// is ordered by start position, then by first appearance of the entry.
pub fn match_corpus(patterns: &[VariantPattern], doc: &[Token], cfg: &MatchConfig) -> Vec<MatchSpan> {
    let d = Doc {
        lemmas: doc.iter().map(|t| t.lemma.to_lowercase()).collect(),
        surfaces: doc.iter().map(|t| t.surface.to_lowercase()).collect(),
        cfg,
    };
    let mut order: Vec<&str> = Vec::new();
    for p in patterns {
        if !order.contains(&p.entry_id.as_str()) {
            order.push(&p.entry_id);
        }
    }
    let mut out = Vec::new();
    for entry in order {
        let progs: Vec<Program> = patterns
            .iter()
            .filter(|p| p.entry_id == entry)
            .map(|p| Program {
                variant: p,
                alts: alternatives(&p.atoms),
            })
            .collect();
        let mut start = 0;
        while start < doc.len() {
            match longest_at(&progs, start, &d) {
                Some((end, vi, bindings)) => {
                    out.push(MatchSpan {
                        doc: 0,
                        entry_id: entry.to_string(),
                        variant_id: progs[vi].variant.variant_id.clone(),
                        token_start: start,
                        token_end: end,
                        slot_bindings: bindings,
                    });
                    start = end;
                }
                None => start += 1,
            }
        }
    }
    // stable: equal starts keep entry order
    out.sort_by_key(|m| m.token_start);
    out
}

/// Matches every document; spans carry 1-based document numbers.
pub fn match_documents(
    patterns: &[VariantPattern],
    docs: &[Vec<Token>],
    cfg: &MatchConfig,
) -> Vec<MatchSpan> {
    docs.par_iter()
        .enumerate()
        .map(|(i, d)| {
            let mut spans = match_corpus(patterns, d, cfg);
            for s in &mut spans {
                s.doc = i + 1;
            }
            spans
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
