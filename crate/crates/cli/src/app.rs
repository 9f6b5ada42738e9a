use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use scratchcat::duality::{dualize_category, dualize_dual_is_identity, dualize_formula, Formula};
use scratchcat::functors::{build_cat_of_categories, check_functor_laws, FunctorError};
use scratchcat::laws::{
    check_associativity_suite, check_identity_laws, check_identity_unicity, find_inverse, neutrality,
    LawError, LawReport, NeutralityOutcome, TruncatedReport,
};
use scratchcat::{check_category, eval_expr, Category, CategoryError, CompositionExpr, Flag, Registry, Sampling};
use serde_json::json;
use thiserror::Error;

use crate::defs::{parse_definition, DefError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_LAW_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "scratchcat", about = "Law-checked category composition", version)]
pub struct Cli {
    /// Samples drawn per object for extensional comparisons.
    #[arg(long, global = true, default_value_t = 100)]
    pub samples: usize,
    /// Sampling seed; `0x` prefix for hex, decimal otherwise.
    #[arg(long, global = true, default_value = "0xC47", value_parser = parse_seed)]
    pub seed: u64,
    /// Emit JSON instead of text reports
    #[arg(long, global = true)]
    pub json: bool,
    /// Category to use when a name resolves in more than one.
    #[arg(long, global = true)]
    pub category: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Well-formedness of every declared category.
    Check { file: PathBuf },
    /// Type-check a composition expression and print its signature.
    Compose { file: PathBuf, expr: String },
    /// Identity, associativity and unicity suites over every category.
    Laws { file: PathBuf },
    /// Neutrality verdict for one morphism.
    Discover { file: PathBuf, morphism: String },
    /// Print a registered inverse or `none`.
    Inverse { file: PathBuf, morphism: String },
    /// Opposite-category summary and the involution check.
    Dual { file: PathBuf, category: String },
    /// Print the dual of a formula.
    DualFormula { formula: String },
    /// Functor laws for every declared functor, then the category of categories.
    FunctorCheck { file: PathBuf },
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Definition { path: String, source: DefError },
    #[error("{0}")]
    Category(#[from] CategoryError),
    #[error("{0}")]
    Law(#[from] LawError),
    #[error("{0}")]
    Functor(#[from] FunctorError),
    #[error("{0}")]
    Formula(#[from] scratchcat::duality::FormulaError),
    #[error("{0}")]
    Usage(String),
}

struct Output {
    text: String,
    json: serde_json::Value,
    passed: bool,
}

impl Output {
    fn new(text: String, json: serde_json::Value, passed: bool) -> Self {
        Self { text, json, passed }
    }
}

/// Runs one invocation, writing reports to `out` and errors to `err`, and
/// returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli) {
        Ok(output) => {
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&output.json).expect("reports serialize"))
            } else {
                write!(out, "{}", output.text)
            };
            if output.passed {
                EXIT_PASS
            } else {
                EXIT_LAW_FAILURE
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn load(path: &PathBuf) -> Result<Registry, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    parse_definition(&text).map_err(|source| CliError::Definition { path: shown, source })
}

fn report_lines(reports: &[LawReport]) -> String {
    reports.iter().map(|r| format!("{r}\n")).collect()
}

/// The single category in which `fits` holds, honoring `--category`.
fn pick_category<'r>(
    registry: &'r Registry,
    chosen: Option<&str>,
    what: &str,
    fits: impl Fn(&Category) -> bool,
) -> Result<&'r Category, CliError> {
    if let Some(name) = chosen {
        return registry.category(name).ok_or_else(|| CliError::Usage(format!("unknown category `{name}`")));
    }
    let matches: Vec<&Category> = registry.categories.values().filter(|c| fits(c)).collect();
    match matches.as_slice() {
        [one] => Ok(one),
        [] => match registry.categories.values().next() {
            Some(first) if registry.categories.len() == 1 => Ok(first),
            _ => Err(CliError::Usage(format!("no declared category contains {what}"))),
        },
        many => {
            let names: Vec<&str> = many.iter().map(|c| c.name.as_str()).collect();
            Err(CliError::Usage(format!("{what} is found in {}; pass --category", names.join(", "))))
        }
    }
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let sampling = Sampling::new(cli.samples, cli.seed);
    let chosen = cli.category.as_deref();
    match &cli.command {
        Command::Check { file } => {
            let registry = load(file)?;
            let reports: Vec<_> = registry.categories.values().map(|c| check_category(c, sampling)).collect();
            let mut text = String::new();
            for r in &reports {
                let status = if r.is_ok() { "OK" } else { "VIOLATIONS" };
                text += &format!("CATEGORY {} {status} SAMPLES {} SEED {:#x}\n", r.category, r.samples, r.seed);
                for v in &r.violations {
                    text += &format!("  {v}\n");
                }
            }
            let passed = reports.iter().all(|r| r.is_ok());
            Ok(Output::new(text, json!(reports), passed))
        }
        Command::Compose { file, expr } => {
            let registry = load(file)?;
            let parsed = CompositionExpr::parse(expr)?;
            let atoms = parsed.atoms();
            let cat = pick_category(&registry, chosen, &format!("every name in `{expr}`"), |c| {
                atoms.iter().all(|a| c.resolve(a).is_ok())
            })?;
            let m = eval_expr(cat, &parsed)?;
            let text = format!("{parsed} : {}\n", m.sig);
            let json = json!({
                "category": cat.name,
                "expr": parsed.to_string(),
                "canonical_id": m.canonical_id,
                "source": m.sig.source,
                "target": m.sig.target,
            });
            Ok(Output::new(text, json, true))
        }
        Command::Laws { file } => {
            let registry = load(file)?;
            let mut text = String::new();
            let mut all = Vec::new();
            let mut passed = true;
            for cat in registry.categories.values() {
                let (reports, truncated) = category_laws(cat, sampling)?;
                passed &= reports.iter().all(LawReport::passed);
                text += &format!("CATEGORY {}\n", cat.name);
                if let Some(t) = &truncated {
                    text += &format!("NOTE associativity checked {} of {} composable triples\n", t.checked, t.total);
                }
                text += &report_lines(&reports);
                all.push(json!({ "category": cat.name, "truncated": truncated, "reports": reports }));
            }
            Ok(Output::new(text, json!(all), passed))
        }
        Command::Discover { file, morphism } => {
            let registry = load(file)?;
            let cat = pick_category(&registry, chosen, &format!("`{morphism}`"), |c| c.resolve(morphism).is_ok())?;
            let m = cat.resolve(morphism)?;
            let verdict = neutrality(cat, m, sampling)?;
            let passed = !matches!(verdict.outcome, NeutralityOutcome::NotNeutral { .. });
            let text = format!("MORPHISM {} {verdict}\n", m.canonical_id);
            Ok(Output::new(text, json!({ "morphism": m.canonical_id, "verdict": verdict }), passed))
        }
        Command::Inverse { file, morphism } => {
            let registry = load(file)?;
            let cat = pick_category(&registry, chosen, &format!("`{morphism}`"), |c| c.resolve(morphism).is_ok())?;
            let m = cat.resolve(morphism)?;
            let inverse = find_inverse(cat, m, sampling)?.map(|g| g.canonical_id);
            let text = format!("{}\n", inverse.as_deref().unwrap_or("none"));
            Ok(Output::new(text, json!({ "morphism": m.canonical_id, "inverse": inverse }), true))
        }
        Command::Dual { file, category } => {
            let registry = load(file)?;
            let cat = registry
                .category(category)
                .ok_or_else(|| CliError::Usage(format!("unknown category `{category}`")))?;
            let op = dualize_category(cat);
            let report = dualize_dual_is_identity(cat);
            let mut text = format!("CATEGORY {}\n", op.skeleton.name);
            for o in &op.skeleton.objects {
                text += &format!("OBJECT {o}\n");
            }
            for (id, sig) in &op.skeleton.arrows {
                text += &format!("ARROW {id} : {sig}\n");
            }
            for (o, id) in &op.skeleton.identities {
                text += &format!("IDENTITY {o} {id}\n");
            }
            text += &format!("{report}\n");
            let json = json!({
                "category": op.skeleton.name,
                "objects": op.skeleton.objects,
                "arrows": op.skeleton.arrows.iter().map(|(id, sig)| json!({
                    "id": id, "source": sig.source, "target": sig.target,
                })).collect::<Vec<_>>(),
                "identities": op.skeleton.identities,
                "report": report,
            });
            Ok(Output::new(text, json, report.passed()))
        }
        Command::DualFormula { formula } => {
            let parsed: Formula = formula.parse()?;
            let dual = dualize_formula(&parsed).to_string();
            let json = json!({ "formula": parsed.to_string(), "dual": dual });
            Ok(Output::new(format!("{dual}\n"), json, true))
        }
        Command::FunctorCheck { file } => {
            let registry = load(file)?;
            let mut reports = Vec::new();
            for functor in registry.functors.values() {
                reports.extend(check_functor_laws(functor, &registry.categories, sampling)?);
            }
            let functors: Vec<_> = registry.functors.values().cloned().collect();
            let cat_of_cats = build_cat_of_categories(&registry.categories, &functors)?;
            reports.extend(cat_of_cats.reports);
            let passed = reports.iter().all(LawReport::passed);
            Ok(Output::new(report_lines(&reports), json!(reports), passed))
        }
    }
}

/// Identity laws for designated identities, the associativity suite, and a
/// unicity proof between each designated identity and every other
/// endomorphism flagged neutral on the same object. Sorted by law and
/// subject.
pub fn category_laws(
    cat: &Category,
    sampling: Sampling,
) -> Result<(Vec<LawReport>, Option<TruncatedReport>), LawError> {
    let mut reports = Vec::new();
    for id in cat.identities().values() {
        reports.push(check_identity_laws(cat, cat.resolve(id)?, sampling)?);
    }
    let suite = check_associativity_suite(cat, sampling)?;
    reports.extend(suite.reports);
    let neutral = [Flag::NeutralByConstruction, Flag::NeutralByFiat, Flag::Virtual];
    for (object, id) in cat.identities() {
        let designated = cat.resolve(id)?;
        for other in cat.hom(object, object) {
            if other.canonical_id != *id && neutral.iter().any(|f| other.has_flag(*f)) {
                reports.push(check_identity_unicity(cat, designated, other, sampling)?.report);
            }
        }
    }
    reports.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok((reports, suite.truncated))
}
