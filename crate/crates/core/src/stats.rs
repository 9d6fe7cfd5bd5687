//! Feature correlation and inter-judge agreement.
//!
//! Unknown cells are abstentions: they are dropped pairwise and never
//! imputed. Pearson's r uses population variance.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::feature::FeatureValue;
use crate::lexicon::Table;
use crate::registry::{FeatureKind, FeatureRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UndefinedReason {
    TooFewPairs,
    ZeroVariance,
    NoJointJudgments,
    DegenerateMarginals,
}

impl fmt::Display for UndefinedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UndefinedReason::TooFewPairs => "too-few-pairs",
            UndefinedReason::ZeroVariance => "zero-variance",
            UndefinedReason::NoJointJudgments => "no-joint-judgments",
            UndefinedReason::DegenerateMarginals => "degenerate-marginals",
        })
    }
}

/// A coefficient, or the reason it does not exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimate {
    Value(f64),
    Undefined(UndefinedReason),
}

impl Estimate {
    pub fn value(self) -> Option<f64> {
        match self {
            Estimate::Value(v) => Some(v),
            Estimate::Undefined(_) => None,
        }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimate::Value(v) => write!(f, "{v:.4}"),
            Estimate::Undefined(r) => write!(f, "NA({r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("feature {0:?} is not binary")]
    NotBinary(String),
    #[error("judged columns cover different entries")]
    MismatchedEntries,
    #[error("copies differ in their {0}")]
    MismatchedCopies(&'static str),
    #[error("at least two judged copies are needed")]
    TooFewCopies,
    #[error("thresholds must satisfy 0 <= abandon <= review <= 1")]
    BadThresholds,
}

fn as_bit(v: &FeatureValue) -> Option<bool> {
    match v {
        FeatureValue::Plus => Some(true),
        FeatureValue::Minus => Some(false),
        _ => None,
    }
}

/// Pearson's r over the rows where both values are Plus or Minus.
/// Returns the number of such rows and the coefficient.
pub fn pearson_columns(a: &[FeatureValue], b: &[FeatureValue]) -> (usize, Estimate) {
    let pairs: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .filter_map(|(x, y)| Some((as_bit(x)? as u8 as f64, as_bit(y)? as u8 as f64)))
        .collect();
    let n = pairs.len();
    if n < 2 {
        return (n, Estimate::Undefined(UndefinedReason::TooFewPairs));
    }
    let nf = n as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return (n, Estimate::Undefined(UndefinedReason::ZeroVariance));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    (n, Estimate::Value(r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub feature_f: String,
    pub feature_g: String,
    pub n_complete: usize,
    pub r: Estimate,
}

fn binary_def<'a>(reg: &'a FeatureRegistry, f: &str) -> Result<&'a str, StatsError> {
    let def = reg
        .lookup(f)
        .ok_or_else(|| StatsError::UnknownFeature(f.to_string()))?;
    if def.kind != FeatureKind::Binary {
        return Err(StatsError::NotBinary(f.to_string()));
    }
    Ok(&def.id)
}

fn column(t: &Table, f: &str) -> Vec<FeatureValue> {
    t.entries
        .iter()
        .map(|e| t.effective_value(e, f).clone())
        .collect()
}

pub fn pearson_pair(
    t: &Table,
    f: &str,
    g: &str,
    reg: &FeatureRegistry,
) -> Result<CorrelationResult, StatsError> {
    binary_def(reg, f)?;
    binary_def(reg, g)?;
    let (n_complete, r) = pearson_columns(&column(t, f), &column(t, g));
    Ok(CorrelationResult {
        feature_f: f.to_string(),
        feature_g: g.to_string(),
        n_complete,
        r,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub features: Vec<String>,
    pub cells: Vec<Vec<CorrelationResult>>,
}

impl CorrelationMatrix {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("feature");
        for f in &self.features {
            out.push('\t');
            out.push_str(f);
        }
        out.push('\n');
        for (f, row) in self.features.iter().zip(&self.cells) {
            out.push_str(f);
            for c in row {
                out.push('\t');
                out.push_str(&c.r.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// All pairwise correlations among `features`, in the given order.
pub fn correlation_matrix(
    t: &Table,
    features: &[String],
    reg: &FeatureRegistry,
) -> Result<CorrelationMatrix, StatsError> {
    for f in features {
        binary_def(reg, f)?;
    }
    let columns: Vec<Vec<FeatureValue>> = features.iter().map(|f| column(t, f)).collect();
    let cells = (0..features.len())
        .into_par_iter()
        .map(|i| {
            (0..features.len())
                .map(|j| {
                    let (n_complete, r) = pearson_columns(&columns[i], &columns[j]);
                    CorrelationResult {
                        feature_f: features[i].clone(),
                        feature_g: features[j].clone(),
                        n_complete,
                        r,
                    }
                })
                .collect()
        })
        .collect();
    Ok(CorrelationMatrix {
        features: features.to_vec(),
        cells,
    })
}

/// One judge's values for one feature, keyed by entry id.
pub type JudgedColumn = BTreeMap<String, FeatureValue>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kappa {
    pub n_joint: usize,
    /// Observed agreement; None without joint judgments.
    pub raw_agreement: Option<f64>,
    /// Chance agreement from the marginals.
    pub expected_agreement: Option<f64>,
    pub kappa: Estimate,
}

/// Cohen's kappa over entries both judges marked Plus or Minus.
pub fn cohen_kappa(a: &JudgedColumn, b: &JudgedColumn) -> Result<Kappa, StatsError> {
    if a.len() != b.len() || a.keys().zip(b.keys()).any(|(x, y)| x != y) {
        return Err(StatsError::MismatchedEntries);
    }
    let joint: Vec<(bool, bool)> = a
        .values()
        .zip(b.values())
        .filter_map(|(x, y)| Some((as_bit(x)?, as_bit(y)?)))
        .collect();
    let n = joint.len();
    if n == 0 {
        return Ok(Kappa {
            n_joint: 0,
            raw_agreement: None,
            expected_agreement: None,
            kappa: Estimate::Undefined(UndefinedReason::NoJointJudgments),
        });
    }
    let nf = n as f64;
    let po = joint.iter().filter(|(x, y)| x == y).count() as f64 / nf;
    let pa = joint.iter().filter(|(x, _)| *x).count() as f64 / nf;
    let pb = joint.iter().filter(|(_, y)| *y).count() as f64 / nf;
    let pe = pa * pb + (1.0 - pa) * (1.0 - pb);
    let kappa = if pe >= 1.0 {
        Estimate::Undefined(UndefinedReason::DegenerateMarginals)
    } else {
        Estimate::Value((po - pe) / (1.0 - pe))
    };
    Ok(Kappa {
        n_joint: n,
        raw_agreement: Some(po),
        expected_agreement: Some(pe),
        kappa,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub abandon_below: f64,
    pub review_below: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            abandon_below: 0.4,
            review_below: 0.6,
        }
    }
}

impl Thresholds {
    pub fn new(abandon_below: f64, review_below: f64) -> Result<Self, StatsError> {
        if !(0.0..=1.0).contains(&abandon_below)
            || !(0.0..=1.0).contains(&review_below)
            || abandon_below > review_below
        {
            return Err(StatsError::BadThresholds);
        }
        Ok(Thresholds {
            abandon_below,
            review_below,
        })
    }

    pub fn verdict(&self, mean_kappa: f64) -> Verdict {
        if mean_kappa < self.abandon_below {
            Verdict::Abandon
        } else if mean_kappa < self.review_below {
            Verdict::Review
        } else {
            Verdict::Keep
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    Abandon,
    Review,
    Keep,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Abandon => "Abandon",
            Verdict::Review => "Review",
            Verdict::Keep => "Keep",
        })
    }
}

/// One judge's copy of a table.
#[derive(Debug, Clone)]
pub struct JudgedCopy {
    pub judge: String,
    pub table: Table,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementResult {
    pub feature: String,
    pub judge_pair: (String, String),
    #[serde(flatten)]
    pub kappa: Kappa,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureReproducibility {
    pub feature: String,
    pub mean_kappa: Option<f64>,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub pairs: Vec<AgreementResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproducibilityReport {
    pub statistic: &'static str,
    pub thresholds: Thresholds,
    pub features: Vec<FeatureReproducibility>,
}

impl ReproducibilityReport {
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "## mean pairwise Cohen's kappa; abandon below {}, review below {}\nfeature\tmean_kappa\tverdict\treason\n",
            self.thresholds.abandon_below, self.thresholds.review_below
        );
        for f in &self.features {
            let mean = f.mean_kappa.map_or("NA".to_string(), |m| format!("{m:.4}"));
            out.push_str(&format!(
                "{}\t{mean}\t{}\t{}\n",
                f.feature,
                f.verdict,
                f.reason.as_deref().unwrap_or("-")
            ));
        }
        out
    }
}

fn judged_column(t: &Table, f: &str) -> JudgedColumn {
    t.entries
        .iter()
        .map(|e| (e.id.clone(), t.effective_value(e, f).clone()))
        .collect()
}

/// Per binary feature, the mean of the defined pairwise kappas and the
/// resulting verdict.
pub fn reproducibility_report(
    copies: &[JudgedCopy],
    reg: &FeatureRegistry,
    thresholds: Thresholds,
) -> Result<ReproducibilityReport, StatsError> {
    if copies.len() < 2 {
        return Err(StatsError::TooFewCopies);
    }
    let ids = |t: &Table| {
        let mut v: Vec<String> = t.entries.iter().map(|e| e.id.clone()).collect();
        v.sort();
        v
    };
    let features = |t: &Table| {
        let mut v = t.cell_features();
        v.sort();
        v
    };
    let first = &copies[0].table;
    for c in &copies[1..] {
        if ids(&c.table) != ids(first) {
            return Err(StatsError::MismatchedCopies("entry ids"));
        }
        if features(&c.table) != features(first) {
            return Err(StatsError::MismatchedCopies("feature sets"));
        }
    }
    let judged: Vec<&str> = reg
        .defs()
        .iter()
        .filter(|d| d.kind == FeatureKind::Binary && first.cell_features().contains(&d.id))
        .map(|d| d.id.as_str())
        .collect();

    let features = judged
        .par_iter()
        .map(|&f| {
            let columns: Vec<JudgedColumn> =
                copies.iter().map(|c| judged_column(&c.table, f)).collect();
            let mut pairs = Vec::new();
            for i in 0..copies.len() {
                for j in i + 1..copies.len() {
                    let kappa = cohen_kappa(&columns[i], &columns[j])?;
                    pairs.push(AgreementResult {
                        feature: f.to_string(),
                        judge_pair: (copies[i].judge.clone(), copies[j].judge.clone()),
                        kappa,
                    });
                }
            }
            let defined: Vec<f64> = pairs.iter().filter_map(|p| p.kappa.kappa.value()).collect();
            let (mean_kappa, verdict, reason) = if defined.is_empty() {
                let why = pairs
                    .first()
                    .and_then(|p| match p.kappa.kappa {
                        Estimate::Undefined(r) => Some(r.to_string()),
                        _ => None,
                    })
                    .unwrap_or_default();
                (None, Verdict::Review, Some(format!("kappa undefined for every pair ({why})")))
            } else {
                let mean = defined.iter().sum::<f64>() / defined.len() as f64;
                (Some(mean), thresholds.verdict(mean), None)
            };
            Ok(FeatureReproducibility {
                feature: f.to_string(),
                mean_kappa,
                verdict,
                reason,
                pairs,
            })
        })
        .collect::<Result<Vec<_>, StatsError>>()?;
    Ok(ReproducibilityReport {
        statistic: "mean pairwise Cohen's kappa",
        thresholds,
        features,
    })
}
