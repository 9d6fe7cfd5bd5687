//! Tri-state feature values and the table cell grammar.
//!
//! A cell is one of `+`, `-`, `?`, `=literal` or `=lit1|lit2|...`. Minus and
//! Unknown are kept apart everywhere: an unjudged cell is never read as a
//! negative judgment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The value of one feature for one entry. Serializes as its cell text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FeatureValue {
    /// Attested: the feature applies.
    Plus,
    /// Attested: the feature does not apply.
    Minus,
    /// Not judged yet.
    Unknown,
    /// A single literal, e.g. a selected preposition.
    Literal(String),
    /// Two or more alternative literals, e.g. `get|throw`.
    LiteralSet(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("empty literal")]
    EmptyLiteral,
    #[error("literal {0:?} contains whitespace at its edges or a control separator")]
    BadLiteral(String),
    #[error("duplicate literal {0:?} in set")]
    DuplicateLiteral(String),
    #[error("cell {0:?} does not match `+ | - | ? | =literal | =a|b`")]
    Unrecognized(String),
}

pub(crate) fn check_literal(text: &str) -> Result<(), CellError> {
    if text.is_empty() {
        return Err(CellError::EmptyLiteral);
    }
    if text.trim() != text || text.contains(['\t', '\n', '\r', '|']) {
        return Err(CellError::BadLiteral(text.to_string()));
    }
    Ok(())
}

impl FeatureValue {
    /// Builds a literal value, checking the literal constraints.
    pub fn literal(text: impl Into<String>) -> Result<Self, CellError> {
        let text = text.into();
        check_literal(&text)?;
        Ok(FeatureValue::Literal(text))
    }

    /// Builds a literal-valued cell from one or more alternatives. A single
    /// alternative yields `Literal`, two or more yield `LiteralSet`.
    pub fn literals<I, S>(texts: I) -> Result<Self, CellError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for t in texts {
            let t = t.into();
            check_literal(&t)?;
            if out.contains(&t) {
                return Err(CellError::DuplicateLiteral(t));
            }
            out.push(t);
        }
        match out.len() {
            0 => Err(CellError::EmptyLiteral),
            1 => Ok(FeatureValue::Literal(out.pop().unwrap())),
            _ => Ok(FeatureValue::LiteralSet(out)),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, FeatureValue::Plus | FeatureValue::Minus | FeatureValue::Unknown)
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, FeatureValue::Unknown)
    }

    /// The literal alternatives carried by this value, empty for tri-state values.
    pub fn literal_texts(&self) -> &[String] {
        match self {
            FeatureValue::Literal(s) => std::slice::from_ref(s),
            FeatureValue::LiteralSet(v) => v,
            _ => &[],
        }
    }

    /// Plus or a literal value: the entry positively has the feature.
    pub fn is_positive(&self) -> bool {
        matches!(
            self,
            FeatureValue::Plus | FeatureValue::Literal(_) | FeatureValue::LiteralSet(_)
        )
    }

    /// The cell text for this value.
    pub fn to_cell(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Plus => f.write_str("+"),
            FeatureValue::Minus => f.write_str("-"),
            FeatureValue::Unknown => f.write_str("?"),
            FeatureValue::Literal(s) => write!(f, "={s}"),
            FeatureValue::LiteralSet(v) => write!(f, "={}", v.join("|")),
        }
    }
}

impl FromStr for FeatureValue {
    type Err = CellError;

    fn from_str(cell: &str) -> Result<Self, Self::Err> {
        match cell {
            "+" => Ok(FeatureValue::Plus),
            "-" => Ok(FeatureValue::Minus),
            "?" => Ok(FeatureValue::Unknown),
            _ => match cell.strip_prefix('=') {
                Some(body) => FeatureValue::literals(body.split('|')),
                None => Err(CellError::Unrecognized(cell.to_string())),
            },
        }
    }
}

impl From<FeatureValue> for String {
    fn from(v: FeatureValue) -> String {
        v.to_cell()
    }
}

impl TryFrom<String> for FeatureValue {
    type Error = CellError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}
