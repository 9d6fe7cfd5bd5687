//! Surface variants licensed by an entry's syntactic-operation features, and
//! matching of those variants against tokenized text.

pub mod compile;
pub mod matcher;
pub mod oracle;
pub mod pattern;

pub use compile::{compile_variants, Compiled, VariantPattern};
pub use matcher::{match_corpus, InflectionMap, MatchConfig, MatchSpan, Token};
pub use oracle::{oracle_enumerate, OracleError, OracleVocab};
pub use pattern::{parse_pattern, EntryPattern, PatternAtom, PatternError};
