//! The `mwelex` command line.
//!
//! Exit codes: 0 clean, 1 the requested check found something, 2 bad
//! input or usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{self, outcome_name, Classification, Decision, Tree};
use crate::feature::FeatureValue;
use crate::interop;
use crate::lexicon::{self, Lexicon, Table};
use crate::registry::{standard_registry, FeatureKind, FeatureRegistry, LanguageConfig};
use crate::stats::{self, JudgedCopy, Thresholds};
use crate::variant::matcher::{match_documents, parse_corpus};
use crate::variant::{compile_variants, InflectionMap, MatchConfig, VariantPattern};
use crate::violation::Violation;

#[derive(Debug, Parser)]
#[command(name = "mwelex", version, about = "Lexicon-grammar tables for multiword expressions")]
struct Cli {
    /// Feature registry: a JSON file, or `builtin`.
    #[arg(long, global = true, env = "MWELEX_REGISTRY", default_value = "builtin")]
    registry: String,

    /// Whether the language uses a copula with predicational adjectives.
    #[arg(long, global = true, default_value = "true", action = clap::ArgAction::Set)]
    language_has_copula: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeArg {
    Fig1,
    Fig2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    List,
    Extended,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check tables against the registry, class constants and rules.
    Validate { tables: Vec<PathBuf> },
    /// Place every entry in a classification tree.
    Classify {
        /// One tree; both trees when omitted.
        #[arg(long, value_enum)]
        tree: Option<TreeArg>,
        /// Per-leaf counts and percentages instead of per-entry rows.
        #[arg(long)]
        summary: bool,
        tables: Vec<PathBuf>,
    },
    /// Compare the two trees entry by entry.
    Xcheck { tables: Vec<PathBuf> },
    /// Pearson correlation matrix of binary features.
    StatsCorr {
        /// Comma-separated feature ids; every binary column except class
        /// constants when omitted.
        #[arg(long, value_delimiter = ',')]
        features: Vec<String>,
        table: PathBuf,
    },
    /// Pairwise Cohen's kappa between judged copies of a table.
    StatsAgree {
        #[arg(required = true, num_args = 2..)]
        copies: Vec<PathBuf>,
    },
    /// Keep, review or abandon verdict per feature from judged copies.
    ReportRepro {
        #[arg(long, default_value_t = 0.4)]
        abandon_below: f64,
        #[arg(long, default_value_t = 0.6)]
        review_below: f64,
        #[arg(required = true, num_args = 2..)]
        copies: Vec<PathBuf>,
    },
    /// Convert between table, feature-list and extended-list formats.
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        /// Table id for JSON input; the file stem by default.
        #[arg(long)]
        table_id: Option<String>,
        input: PathBuf,
    },
    /// What a positive-only feature list would lose.
    Loss { table: PathBuf },
    /// List the surface variants each entry licenses.
    Compile { tables: Vec<PathBuf> },
    /// Find entry variants in a tokenized corpus.
    Match {
        #[arg(long, required = true, num_args = 1..)]
        lexicon: Vec<PathBuf>,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_slot_len: usize,
        #[arg(long, default_value_t = 2)]
        max_gap: usize,
        /// Lines of `lemma form form ...`.
        #[arg(long)]
        inflections: Option<PathBuf>,
    },
}

/// Runs with the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut ctx = Ctx { out, err };
    match dispatch(&cli, &mut ctx) {
        Ok(findings) => i32::from(findings),
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e:#}");
            2
        }
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn print(&mut self, s: &str) -> Result<()> {
        self.out.write_all(s.as_bytes())?;
        Ok(())
    }

    fn json<T: Serialize>(&mut self, v: &T) -> Result<()> {
        let s = serde_json::to_string_pretty(v)?;
        writeln!(self.out, "{s}")?;
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_registry(spec: &str) -> Result<FeatureRegistry> {
    if spec == "builtin" {
        return Ok(standard_registry());
    }
    let text = read(Path::new(spec))?;
    FeatureRegistry::from_json(&text).with_context(|| format!("registry {spec}"))
}

fn load_table(path: &Path, reg: &FeatureRegistry) -> Result<Table> {
    let text = read(path)?;
    lexicon::parse_table(&text, reg).with_context(|| format!("{}", path.display()))
}

fn load_lexicon(paths: &[PathBuf], reg: &FeatureRegistry) -> Result<Lexicon> {
    if paths.is_empty() {
        bail!("no table files given");
    }
    let tables = paths
        .iter()
        .map(|p| load_table(p, reg))
        .collect::<Result<Vec<_>>>()?;
    Ok(lexicon::merge_lexicon(reg.version(), tables)?)
}

fn file_stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".into())
}

/// Ok(true) when the check produced findings.
fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Result<bool> {
    let reg = load_registry(&cli.registry)?;
    let lang = LanguageConfig {
        has_copula: cli.language_has_copula,
    };
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Validate { tables } => validate(ctx, &reg, lang, json, tables),
        Command::Classify {
            tree,
            summary,
            tables,
        } => {
            let lx = load_lexicon(tables, &reg)?;
            classify_cmd(ctx, &reg, lang, json, &lx, *tree, *summary)?;
            Ok(false)
        }
        Command::Xcheck { tables } => {
            let lx = load_lexicon(tables, &reg)?;
            xcheck(ctx, &reg, lang, json, &lx)
        }
        Command::StatsCorr { features, table } => {
            let t = load_table(table, &reg)?;
            let features = if features.is_empty() {
                reg.defs()
                    .iter()
                    .filter(|d| d.kind == FeatureKind::Binary && t.columns.contains(&d.id))
                    .map(|d| d.id.clone())
                    .collect()
            } else {
                features.clone()
            };
            let m = stats::correlation_matrix(&t, &features, &reg)?;
            if json {
                ctx.json(&m)?;
            } else {
                ctx.print("## Pearson r, population variance, pairwise-complete rows\n")?;
                ctx.print(&m.to_tsv())?;
            }
            Ok(false)
        }
        Command::StatsAgree { copies } => {
            let copies = load_copies(copies, &reg)?;
            let report = stats::reproducibility_report(&copies, &reg, Thresholds::default())?;
            let pairs: Vec<&stats::AgreementResult> =
                report.features.iter().flat_map(|f| &f.pairs).collect();
            if json {
                ctx.json(&pairs)?;
            } else {
                ctx.print("feature\tjudge_a\tjudge_b\tn_joint\traw_agreement\tkappa\n")?;
                for p in pairs {
                    let raw = p
                        .kappa
                        .raw_agreement
                        .map_or("NA".to_string(), |r| format!("{r:.4}"));
                    ctx.print(&format!(
                        "{}\t{}\t{}\t{}\t{raw}\t{}\n",
                        p.feature, p.judge_pair.0, p.judge_pair.1, p.kappa.n_joint, p.kappa.kappa
                    ))?;
                }
            }
            Ok(false)
        }
        Command::ReportRepro {
            abandon_below,
            review_below,
            copies,
        } => {
            let thresholds = Thresholds::new(*abandon_below, *review_below)?;
            let copies = load_copies(copies, &reg)?;
            let report = stats::reproducibility_report(&copies, &reg, thresholds)?;
            if json {
                ctx.json(&report)?;
            } else {
                ctx.print(&report.to_tsv())?;
            }
            Ok(false)
        }
        Command::Convert {
            to,
            table_id,
            input,
        } => {
            convert(ctx, &reg, *to, table_id.as_deref(), input)?;
            Ok(false)
        }
        Command::Loss { table } => {
            let t = load_table(table, &reg)?;
            let r = interop::loss_report(&t);
            if json {
                ctx.json(&r)?;
            } else {
                ctx.print(&r.to_tsv())?;
            }
            Ok(!r.lossless)
        }
        Command::Compile { tables } => {
            let lx = load_lexicon(tables, &reg)?;
            let (variants, warnings) = compile_lexicon(&lx)?;
            for w in &warnings {
                writeln!(ctx.err, "{w}")?;
            }
            if json {
                ctx.json(&variants)?;
            } else {
                ctx.print("entry\tvariant\tlicensing_feature\tpattern\n")?;
                for v in &variants {
                    ctx.print(&format!(
                        "{}\t{}\t{}\t{v}\n",
                        v.entry_id,
                        v.variant_id,
                        v.licensing_feature.as_deref().unwrap_or("-")
                    ))?;
                }
            }
            Ok(false)
        }
        Command::Match {
            lexicon,
            corpus,
            max_slot_len,
            max_gap,
            inflections,
        } => {
            let lx = load_lexicon(lexicon, &reg)?;
            let (variants, _) = compile_lexicon(&lx)?;
            let mut cfg = MatchConfig {
                max_slot_len: *max_slot_len,
                max_gap: *max_gap,
                ..MatchConfig::default()
            };
            if let Some(path) = inflections {
                cfg.inflections = InflectionMap::parse(&read(path)?)
                    .map_err(|e| anyhow!("{}: {e}", path.display()))?;
            }
            let docs = parse_corpus(&read(corpus)?);
            let spans = match_documents(&variants, &docs, &cfg);
            if json {
                ctx.json(&spans)?;
            } else {
                ctx.print("doc\tstart\tend\tentry\tvariant\tbindings\n")?;
                for s in &spans {
                    ctx.print(&format!("{}\n", s.to_tsv(&docs[s.doc - 1])))?;
                }
            }
            Ok(false)
        }
    }
}

fn validate(
    ctx: &mut Ctx,
    reg: &FeatureRegistry,
    lang: LanguageConfig,
    json: bool,
    paths: &[PathBuf],
) -> Result<bool> {
    let lx = load_lexicon(paths, reg)?;
    let violations: Vec<Violation> = lx
        .tables
        .iter()
        .flat_map(|t| lexicon::validate_table(t, reg, lang))
        .collect();
    let errors = violations.iter().filter(|v| v.is_error()).count();
    if json {
        ctx.json(&violations)?;
    } else {
        for v in &violations {
            ctx.print(&format!("{v}\n"))?;
        }
        ctx.print(&format!(
            "{} violations ({errors} errors, {} warnings)\n",
            violations.len(),
            violations.len() - errors
        ))?;
    }
    Ok(!violations.is_empty())
}

fn path_text(path: &[Decision]) -> String {
    path.iter()
        .map(|d| match &d.observed {
            FeatureValue::Literal(s) => format!("{}={s}", d.feature),
            v => format!("{}={v}", d.feature),
        })
        .collect::<Vec<_>>()
        .join(" > ")
}

fn outcome_path(c: &Classification) -> String {
    match c {
        Ok(l) => path_text(&l.path),
        Err(u) => {
            let p = path_text(&u.partial_path);
            if p.is_empty() {
                format!("{}=?", u.blocking_feature)
            } else {
                format!("{p} > {}=?", u.blocking_feature)
            }
        }
    }
}

fn classify_cmd(
    ctx: &mut Ctx,
    reg: &FeatureRegistry,
    lang: LanguageConfig,
    json: bool,
    lx: &Lexicon,
    tree: Option<TreeArg>,
    summary: bool,
) -> Result<()> {
    if summary {
        let s = classify::classify_lexicon(lx, reg, lang);
        if json {
            return ctx.json(&s);
        }
        ctx.print("tree\tleaf\tcount\tpercent\n")?;
        for t in [&s.fig1, &s.fig2] {
            if tree.is_some_and(|a| tree_of(a) != t.tree) {
                continue;
            }
            for l in &t.leaves {
                ctx.print(&format!("{}\t{}\t{}\t{:.2}\n", t.tree, l.leaf, l.count, l.percent))?;
            }
            ctx.print(&format!(
                "{}\tUnclassifiable\t{}\t{:.2}\n",
                t.tree,
                t.unclassifiable.len(),
                t.unclassifiable_percent
            ))?;
        }
        return ctx.print(&format!("total\t-\t{}\t100.00\n", s.total));
    }
    let entries = classify::prepare_entries(lx, reg);
    let checks = classify::classify_entries(&entries, lang);
    match tree {
        Some(a) => {
            let rows: Vec<&Classification> = checks
                .iter()
                .map(|c| if tree_of(a) == Tree::Fig1 { &c.fig1 } else { &c.fig2 })
                .collect();
            if json {
                return ctx.json(&rows);
            }
            ctx.print("id\tlemma\tleaf\tpath\n")?;
            for (e, c) in entries.iter().zip(rows) {
                ctx.print(&format!(
                    "{}\t{}\t{}\t{}\n",
                    e.id,
                    e.lemma,
                    outcome_name(c),
                    outcome_path(c)
                ))?;
            }
        }
        None => {
            if json {
                return ctx.json(&checks);
            }
            ctx.print("id\tlemma\tfig1\tfig2\n")?;
            for (e, c) in entries.iter().zip(&checks) {
                ctx.print(&format!(
                    "{}\t{}\t{}\t{}\n",
                    e.id,
                    e.lemma,
                    outcome_name(&c.fig1),
                    outcome_name(&c.fig2)
                ))?;
            }
        }
    }
    Ok(())
}

fn tree_of(a: TreeArg) -> Tree {
    match a {
        TreeArg::Fig1 => Tree::Fig1,
        TreeArg::Fig2 => Tree::Fig2,
    }
}

fn xcheck(
    ctx: &mut Ctx,
    reg: &FeatureRegistry,
    lang: LanguageConfig,
    json: bool,
    lx: &Lexicon,
) -> Result<bool> {
    let entries = classify::prepare_entries(lx, reg);
    let checks = classify::classify_entries(&entries, lang);
    let bad = checks.iter().filter(|c| c.is_inconsistent()).count();
    if json {
        ctx.json(&checks)?;
    } else {
        ctx.print("id\tfig1\tfig2\tstatus\n")?;
        for c in &checks {
            let status = match c.consistent {
                Some(true) => "consistent",
                Some(false) => "inconsistent",
                None => "unclassifiable",
            };
            ctx.print(&format!(
                "{}\t{}\t{}\t{status}\n",
                c.entry_id,
                outcome_name(&c.fig1),
                outcome_name(&c.fig2)
            ))?;
        }
        ctx.print(&format!("{bad} inconsistencies\n"))?;
    }
    Ok(bad > 0)
}

fn load_copies(paths: &[PathBuf], reg: &FeatureRegistry) -> Result<Vec<JudgedCopy>> {
    paths
        .iter()
        .map(|p| {
            Ok(JudgedCopy {
                judge: file_stem(p),
                table: load_table(p, reg)?,
            })
        })
        .collect()
}

fn compile_lexicon(
    lx: &Lexicon,
) -> Result<(Vec<VariantPattern>, Vec<crate::variant::compile::CompileWarning>)> {
    let mut variants = Vec::new();
    let mut warnings = Vec::new();
    for e in lx.materialized_entries() {
        let c = compile_variants(&e).with_context(|| format!("entry {}", e.id))?;
        variants.extend(c.variants);
        warnings.extend(c.warnings);
    }
    Ok((variants, warnings))
}

fn convert(
    ctx: &mut Ctx,
    reg: &FeatureRegistry,
    to: Target,
    table_id: Option<&str>,
    input: &Path,
) -> Result<()> {
    let text = read(input)?;
    let id = table_id
        .map(str::to_string)
        .unwrap_or_else(|| file_stem(input));
    let table = if text.trim_start().starts_with('[') {
        let value: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("{}", input.display()))?;
        let is_list = value
            .as_array()
            .and_then(|a| a.first())
            .and_then(|e| e.get("features"))
            .is_some_and(|f| f.is_array());
        if is_list {
            interop::import_feature_list(&interop::list_from_json(&text)?, &id, reg)?
        } else {
            interop::import_extended_list(&interop::extended_from_json(&text)?, &id, reg)?
        }
    } else {
        lexicon::parse_table(&text, reg).with_context(|| format!("{}", input.display()))?
    };
    match to {
        Target::List => {
            let l = interop::export_feature_list(&table, reg);
            ctx.print(&format!("{}\n", interop::list_to_json(&l)))
        }
        Target::Extended => {
            let l = interop::export_extended_list(&table, reg);
            ctx.print(&format!("{}\n", interop::extended_to_json(&l)))
        }
        Target::Table => ctx.print(&lexicon::serialize_table(&table)),
    }
}
