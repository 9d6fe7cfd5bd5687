use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", content = "rule", rename_all = "kebab-case")]
pub enum ViolationKind {
    /// An entry records a value different from its table's class constant.
    DefiningFeature,
    /// The value does not fit the declared kind of the feature, or the
    /// feature is not declared at all.
    RegistryMismatch,
    /// A free slot named by a feature does not occur in the pattern.
    MissingSlot,
    /// An implication or derivation rule is broken.
    Rule(String),
}

/// One finding of a validation pass. Violations are data, never failures.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Violation {
    pub severity: Severity,
    pub kind: ViolationKind,
    pub table_id: Option<String>,
    pub entry_id: Option<String>,
    pub feature: Option<String>,
    pub message: String,
}

impl Violation {
    pub fn error(kind: ViolationKind, message: impl Into<String>) -> Self {
        Violation {
            severity: Severity::Error,
            kind,
            table_id: None,
            entry_id: None,
            feature: None,
            message: message.into(),
        }
    }

    pub fn warning(kind: ViolationKind, message: impl Into<String>) -> Self {
        Violation {
            severity: Severity::Warning,
            ..Violation::error(kind, message)
        }
    }

    pub fn in_table(mut self, table_id: &str) -> Self {
        self.table_id = Some(table_id.to_string());
        self
    }

    pub fn for_entry(mut self, entry_id: &str) -> Self {
        self.entry_id = Some(entry_id.to_string());
        self
    }

    pub fn on_feature(mut self, feature: &str) -> Self {
        self.feature = Some(feature.to_string());
        self
    }

    pub fn rule_id(&self) -> Option<&str> {
        match &self.kind {
            ViolationKind::Rule(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        let kind = match &self.kind {
            ViolationKind::DefiningFeature => "defining-feature".to_string(),
            ViolationKind::RegistryMismatch => "registry".to_string(),
            ViolationKind::MissingSlot => "missing-slot".to_string(),
            ViolationKind::Rule(r) => format!("rule {r}"),
        };
        write!(
            f,
            "{sev}\t{kind}\t{}\t{}\t{}\t{}",
            self.table_id.as_deref().unwrap_or("-"),
            self.entry_id.as_deref().unwrap_or("-"),
            self.feature.as_deref().unwrap_or("-"),
            self.message
        )
    }
}
