//! Theory files in, consistency reports out.
//!
//! Each command returns a [`CommandOutput`] holding its exit code and the
//! complete stdout and stderr text, so runs can be compared byte for byte.

pub mod args;
pub mod dsl;
pub mod report;

use std::path::PathBuf;

use sheafaccord_core::oracle::DEFAULT_TUPLE_CAP;
use sheafaccord_core::{
    enumerate_sections, oracle_verdicts, verify_axioms, Analysis, AnalysisError, Corpus, Mode, OracleError,
    Outcome, SheafError, VerdictKind,
};

use crate::dsl::{Diagnostic, Source};
use crate::report::{
    section, CheckReport, CoalitionReport, CorpusInfo, DegreeReport, OracleCheck, PredicateReport,
    ReconcilePredicate, ReconcileReport, SectionsPredicate, SectionsReport, SheafReport, VerifyReport,
    ViolationReport, Witness,
};

pub const EXIT_ERROR: i32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub mode: Mode,
    pub predicate: Option<String>,
    pub format: Format,
    pub model_cap: usize,
    pub oracle: bool,
}

impl RunConfig {
    pub fn new(inputs: Vec<PathBuf>) -> RunConfig {
        RunConfig {
            inputs,
            mode: Mode::Strict,
            predicate: None,
            format: Format::Text,
            model_cap: sheafaccord_core::DEFAULT_MODEL_CAP,
            oracle: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(Box<Diagnostic>),
    #[error("{0}")]
    Analysis(Box<AnalysisError>),
    #[error("oracle: {0}")]
    Oracle(Box<OracleError>),
    #[error("{0}")]
    Sheaf(Box<SheafError>),
    #[error("{0}")]
    Usage(String),
}

macro_rules! boxed_from {
    ($($source:ty => $variant:ident),*) => {
        $(impl From<$source> for CliError {
            fn from(e: $source) -> Self {
                CliError::$variant(Box::new(e))
            }
        })*
    };
}

boxed_from!(Diagnostic => Parse, AnalysisError => Analysis, OracleError => Oracle, SheafError => Sheaf);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn failed(e: CliError) -> CommandOutput {
        let stderr = match e {
            CliError::Parse(d) => format!("{d}\n"),
            e => format!("error: {e}\n"),
        };
        CommandOutput { code: EXIT_ERROR, stdout: String::new(), stderr }
    }
}

pub fn exit_code(kind: VerdictKind) -> i32 {
    match kind {
        VerdictKind::Agreement => 0,
        VerdictKind::Disagreement => 10,
        VerdictKind::Contradiction => 20,
    }
}

fn verdict_name(kind: VerdictKind) -> String {
    let name = kind.name();
    name[..1].to_uppercase() + &name[1..]
}

fn load(config: &RunConfig) -> Result<Corpus, CliError> {
    if config.inputs.is_empty() {
        return Err(CliError::Usage("no input files".into()));
    }
    if config.model_cap == 0 {
        return Err(CliError::Usage("model cap must be positive".into()));
    }
    let sources = config.inputs.iter().map(|p| Source::read(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(dsl::load(&sources)?)
}

fn corpus_info(config: &RunConfig, corpus: &Corpus) -> CorpusInfo {
    CorpusInfo {
        files: config.inputs.iter().map(|p| p.display().to_string()).collect(),
        theories: corpus.theories().iter().map(|t| t.id.clone()).collect(),
    }
}

/// Truth values are shown once negation or the agnostic value can occur.
fn show_truth(corpus: &Corpus, mode: Mode) -> bool {
    mode == Mode::Permissive || corpus.has_negation()
}

/// Constrained predicates, narrowed to the `--predicate` filter.
fn selected(config: &RunConfig, an: &Analysis) -> Result<Vec<String>, CliError> {
    let all = an.predicates();
    match &config.predicate {
        None => Ok(all),
        Some(p) if all.contains(p) => Ok(vec![p.clone()]),
        Some(p) if an.corpus().vocab.predicate(p).is_some() => {
            Err(CliError::Usage(format!("predicate `{p}` is not constrained by any theory")))
        }
        Some(p) => Err(AnalysisError::UnknownPredicate(p.clone()).into()),
    }
}

fn ids(an: &Analysis, docs: &[usize]) -> Vec<String> {
    docs.iter().map(|&d| an.corpus().theories()[d].id.clone()).collect()
}

fn emit<T: serde::Serialize>(config: &RunConfig, report: &T, text: impl FnOnce(&T) -> String, code: i32) -> CommandOutput {
    let stdout = match config.format {
        Format::Text => text(report),
        Format::Json => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
    };
    CommandOutput { code, stdout, stderr: String::new() }
}

pub fn check_report(config: &RunConfig) -> Result<CheckReport, CliError> {
    let corpus = load(config)?;
    let an = Analysis::with_cap(&corpus, config.mode, config.model_cap)?;
    let predicates = selected(config, &an)?;
    let truth = show_truth(&corpus, config.mode);
    let types = &corpus.vocab.types;
    let oracle = if config.oracle {
        Some(oracle_verdicts(&corpus, config.mode, config.model_cap, DEFAULT_TUPLE_CAP)?)
    } else {
        None
    };
    let mut aggregate = VerdictKind::Agreement;
    let mut out = Vec::with_capacity(predicates.len());
    for p in &predicates {
        let pv = an.classify_predicate(p)?;
        let kind = pv.outcome.kind();
        aggregate = aggregate.max(kind);
        let (witnesses, coalitions) = match &pv.outcome {
            Outcome::Contradiction { witnesses, coalitions } => (
                witnesses.iter().map(|w| Witness::from_core(&corpus.vocab, w)).collect(),
                coalitions
                    .iter()
                    .map(|c| CoalitionReport {
                        theories: c.theories.clone(),
                        sections: c.sections.iter().map(|b| section(types, b, truth)).collect(),
                    })
                    .collect(),
            ),
            _ => (Vec::new(), Vec::new()),
        };
        out.push(PredicateReport {
            name: p.clone(),
            verdict: verdict_name(kind),
            theories: pv.theories.clone(),
            sections: pv.outcome.sections().iter().map(|b| section(types, b, truth)).collect(),
            witnesses,
            degree: DegreeReport::new(an.disagreement_degree(p)?),
            coalitions,
            oracle: oracle.as_ref().map(|o| {
                let consistent = o[p];
                OracleCheck { consistent, agrees: consistent == (kind != VerdictKind::Contradiction) }
            }),
        });
    }
    Ok(CheckReport {
        corpus: corpus_info(config, &corpus),
        mode: config.mode.name().into(),
        predicates: out,
        aggregate: verdict_name(aggregate),
    })
}

fn aggregate_kind(name: &str) -> VerdictKind {
    [VerdictKind::Agreement, VerdictKind::Disagreement, VerdictKind::Contradiction]
        .into_iter()
        .find(|k| verdict_name(*k) == name)
        .expect("aggregate names a verdict")
}

/// Verdict, witnesses and degree per predicate. Exit code 0, 10 or 20 from
/// the aggregate verdict; 1 on any error or oracle disagreement.
pub fn cmd_check(config: &RunConfig) -> CommandOutput {
    match check_report(config) {
        Ok(r) => {
            let mut out = emit(config, &r, CheckReport::text, exit_code(aggregate_kind(&r.aggregate)));
            for p in &r.predicates {
                if p.oracle.as_ref().is_some_and(|o| !o.agrees) {
                    out.stderr.push_str(&format!("error: oracle cross-check disagrees on `{}`\n", p.name));
                    out.code = EXIT_ERROR;
                }
            }
            out
        }
        Err(e) => CommandOutput::failed(e),
    }
}

pub fn sections_report(config: &RunConfig, nodes: Option<&[String]>) -> Result<SectionsReport, CliError> {
    let corpus = load(config)?;
    let an = Analysis::with_cap(&corpus, config.mode, config.model_cap)?;
    let predicates = selected(config, &an)?;
    let truth = show_truth(&corpus, config.mode);
    let mut chosen: Vec<usize> = match nodes {
        Some(ns) => ns.iter().map(|n| an.theory_index(n)).collect::<Result<_, _>>()?,
        None => (0..corpus.theories().len()).collect(),
    };
    chosen.sort();
    chosen.dedup();
    let mut out = Vec::with_capacity(predicates.len());
    for p in &predicates {
        let docs: Vec<usize> = an.theories_constraining(p).into_iter().filter(|d| chosen.contains(d)).collect();
        let (sections, note) = if docs.is_empty() {
            (Vec::new(), Some("not constrained by the selected theories".to_string()))
        } else {
            let s = an.sections(&docs, p)?;
            let note = s.is_empty().then(|| "no section".to_string());
            (s.iter().map(|b| section(&corpus.vocab.types, b, truth)).collect(), note)
        };
        out.push(SectionsPredicate { name: p.clone(), theories: ids(&an, &docs), sections, note });
    }
    Ok(SectionsReport {
        corpus: corpus_info(config, &corpus),
        mode: config.mode.name().into(),
        nodes: ids(&an, &chosen),
        predicates: out,
    })
}

/// Maximal sections over a subset of theories (all of them by default).
pub fn cmd_sections(config: &RunConfig, nodes: Option<&[String]>) -> CommandOutput {
    match sections_report(config, nodes) {
        Ok(r) => emit(config, &r, SectionsReport::text, 0),
        Err(e) => CommandOutput::failed(e),
    }
}

pub fn verify_report(config: &RunConfig) -> Result<VerifyReport, CliError> {
    let corpus = load(config)?;
    if corpus.generic_sheaves().is_empty() {
        return Err(CliError::Usage("no generic_sheaf blocks in the input".into()));
    }
    let mut sheaves = Vec::new();
    for spec in corpus.generic_sheaves() {
        let axioms = verify_axioms(spec)?;
        let global_sections = if axioms.is_ok() {
            let all: Vec<usize> = (0..spec.nodes().len()).collect();
            enumerate_sections(spec, &all)?.into_iter().map(|s| s.assignment).collect()
        } else {
            Vec::new()
        };
        sheaves.push(SheafReport {
            id: spec.id.clone(),
            ok: axioms.is_ok(),
            violations: axioms
                .violations
                .into_iter()
                .map(|v| ViolationReport {
                    lower: v.lower,
                    middle: v.middle,
                    upper: v.upper,
                    element: v.element,
                    direct: v.direct,
                    composed: v.composed,
                })
                .collect(),
            global_sections,
        });
    }
    Ok(VerifyReport { files: config.inputs.iter().map(|p| p.display().to_string()).collect(), sheaves })
}

/// Composition law of every generic_sheaf block. Exit 0 when all hold, 20 on
/// a violation.
pub fn cmd_verify_sheaf(config: &RunConfig) -> CommandOutput {
    match verify_report(config) {
        Ok(r) => {
            let code = if r.sheaves.iter().all(|s| s.ok) { 0 } else { 20 };
            emit(config, &r, VerifyReport::text, code)
        }
        Err(e) => CommandOutput::failed(e),
    }
}

pub fn reconcile_report(config: &RunConfig) -> Result<ReconcileReport, CliError> {
    let corpus = load(config)?;
    let an = Analysis::with_cap(&corpus, config.mode, config.model_cap)?;
    let predicates = selected(config, &an)?;
    let truth = show_truth(&corpus, config.mode);
    let types = &corpus.vocab.types;
    let rec = an.reconcile()?;
    let mut aggregate = VerdictKind::Agreement;
    let mut out = Vec::with_capacity(predicates.len());
    for r in rec.predicates.iter().filter(|r| predicates.contains(&r.predicate)) {
        let kind = an.classify_predicate(&r.predicate)?.outcome.kind();
        aggregate = aggregate.max(kind);
        out.push(ReconcilePredicate {
            name: r.predicate.clone(),
            verdict: verdict_name(kind),
            dominant: r.dominant.iter().map(|b| section(types, b, truth)).collect(),
            coalitions: r
                .coalitions
                .iter()
                .map(|c| CoalitionReport {
                    theories: c.theories.clone(),
                    sections: c.sections.iter().map(|b| section(types, b, truth)).collect(),
                })
                .collect(),
            degree: DegreeReport::new(r.degree),
        });
    }
    Ok(ReconcileReport {
        corpus: corpus_info(config, &corpus),
        mode: config.mode.name().into(),
        predicates: out,
        aggregate: verdict_name(aggregate),
    })
}

/// Dominant sections and coalitions per predicate; exit code as for check.
pub fn cmd_reconcile(config: &RunConfig) -> CommandOutput {
    match reconcile_report(config) {
        Ok(r) => {
            let code = exit_code(aggregate_kind(&r.aggregate));
            emit(config, &r, ReconcileReport::text, code)
        }
        Err(e) => CommandOutput::failed(e),
    }
}
