//! Lexicon-grammar toolkit for multiword expressions.
//!
//! Entries are stored as vectors of clear-cut, tri-state features in
//! tab-separated tables with explicit negative information. On top of that
//! model the crate provides:
//!
//! - [`registry`]: the feature catalogue and implication rules,
//! - [`classify`]: the two MWE classification trees and their cross-check,
//! - [`stats`]: feature correlation, inter-judge agreement and reproducibility verdicts,
//! - [`interop`]: conversion to and from positive-only feature lists, with loss auditing,
//! - [`variant`]: surface variant compilation and corpus matching.

pub mod classify;
pub mod cli;
pub mod feature;
pub mod interop;
pub mod lexicon;
pub mod registry;
pub mod stats;
pub mod variant;
pub mod violation;

pub use feature::FeatureValue;
pub use lexicon::{merge_lexicon, parse_table, serialize_table, validate_table, Entry, Lexicon, Pos, Table};
pub use registry::{standard_registry, FeatureRegistry, LanguageConfig};
pub use violation::{Severity, Violation, ViolationKind};
