//! Verdicts, conflict witnesses, coalitions and reconciliation reports.
//!
//! Each theory is expanded into its ground models and every combination (one
//! model per theory) is analysed separately. For a predicate `p`:
//!
//! * **Contradiction**: no combination has a global section on `p`;
//! * **Agreement**: some combination has a global section and all theories
//!   induce the same boxes for `p`;
//! * **Disagreement**: otherwise.
//!
//! Reported sections are the maximal elements of the union over combinations.
//! The corpus verdict is the worst per-predicate verdict.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::lattice::{LatticeError, LatticeValue, Truth};
use crate::sheaf::{maximal_elements, sections_over, Mode, Sheaf, SheafError, TheoryStalk, MAX_POSET_THEORIES};
use crate::theory::{expand_models, ConstraintBox, Corpus, GroundTheory, TheoryError, DEFAULT_MODEL_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VerdictKind {
    Agreement,
    Disagreement,
    Contradiction,
}

impl VerdictKind {
    pub fn name(self) -> &'static str {
        match self {
            VerdictKind::Agreement => "agreement",
            VerdictKind::Disagreement => "disagreement",
            VerdictKind::Contradiction => "contradiction",
        }
    }
}

/// Argument position, or the implicit truth slot appended to every predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Arg(usize),
    Truth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotValue {
    Value(LatticeValue),
    Truth(Truth),
}

/// Theories whose boxes cannot meet, and the slot where they collide.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConflictWitness {
    pub predicate: String,
    pub theories: Vec<String>,
    pub slot: Slot,
    /// One value per theory, in the order of `theories`; their meet is bottom.
    pub values: Vec<SlotValue>,
    /// Slotwise meet of the arguments (bottom where they clash).
    pub overlap: Vec<LatticeValue>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalition {
    pub theories: Vec<String>,
    pub sections: Vec<ConstraintBox>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Agreement { sections: Vec<ConstraintBox> },
    Disagreement { sections: Vec<ConstraintBox> },
    Contradiction { witnesses: Vec<ConflictWitness>, coalitions: Vec<Coalition> },
}

impl Outcome {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Outcome::Agreement { .. } => VerdictKind::Agreement,
            Outcome::Disagreement { .. } => VerdictKind::Disagreement,
            Outcome::Contradiction { .. } => VerdictKind::Contradiction,
        }
    }

    pub fn sections(&self) -> &[ConstraintBox] {
        match self {
            Outcome::Agreement { sections } | Outcome::Disagreement { sections } => sections,
            Outcome::Contradiction { .. } => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateVerdict {
    pub predicate: String,
    /// Theories that constrain the predicate.
    pub theories: Vec<String>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub predicates: Vec<PredicateVerdict>,
    pub aggregate: VerdictKind,
}

impl Verdict {
    pub fn predicate(&self, name: &str) -> Option<&PredicateVerdict> {
        self.predicates.iter().find(|p| p.predicate == name)
    }
}

/// A reduced fraction in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Degree {
    num: u32,
    den: u32,
}

impl Degree {
    pub fn new(num: u32, den: u32) -> Degree {
        assert!(den > 0 && num <= den, "degree must lie in [0, 1]");
        let g = crate::lattice::gcd(num as u64, den as u64) as u32;
        if num == 0 {
            Degree { num: 0, den: 1 }
        } else {
            Degree { num: num / g, den: den / g }
        }
    }

    pub fn zero() -> Degree {
        Degree { num: 0, den: 1 }
    }

    pub fn numerator(&self) -> u32 {
        self.num
    }

    pub fn denominator(&self) -> u32 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateReconciliation {
    pub predicate: String,
    /// Maximal global sections; empty when the theories contradict.
    pub dominant: Vec<ConstraintBox>,
    /// Maximal coalitions admitting a section, largest first (contradictions only).
    pub coalitions: Vec<Coalition>,
    pub degree: Degree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconciliationReport {
    pub predicates: Vec<PredicateReconciliation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnalysisError {
    Theory(TheoryError),
    Sheaf(SheafError),
    Lattice(LatticeError),
    ModelCapExceeded { count: u128, cap: usize },
    NoContradiction,
    UnknownTheory(String),
    UnknownPredicate(String),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::Theory(e) => e.fmt(f),
            AnalysisError::Sheaf(e) => e.fmt(f),
            AnalysisError::Lattice(e) => e.fmt(f),
            AnalysisError::ModelCapExceeded { count, cap } => {
                write!(f, "corpus has {count} model combinations, above the cap of {cap}")
            }
            AnalysisError::NoContradiction => write!(f, "the corpus has no contradiction to explain"),
            AnalysisError::UnknownTheory(t) => write!(f, "unknown theory `{t}`"),
            AnalysisError::UnknownPredicate(p) => write!(f, "predicate `{p}` is not constrained by any theory"),
        }
    }
}

impl core::error::Error for AnalysisError {}

impl From<TheoryError> for AnalysisError {
    fn from(e: TheoryError) -> Self {
        AnalysisError::Theory(e)
    }
}

impl From<SheafError> for AnalysisError {
    fn from(e: SheafError) -> Self {
        AnalysisError::Sheaf(e)
    }
}

impl From<LatticeError> for AnalysisError {
    fn from(e: LatticeError) -> Self {
        AnalysisError::Lattice(e)
    }
}

/// Odometer over `counts[0] × counts[1] × ...`.
pub(crate) fn for_each_combination<E>(
    counts: &[usize],
    mut f: impl FnMut(&[usize]) -> Result<(), E>,
) -> Result<(), E> {
    if counts.contains(&0) {
        return Ok(());
    }
    let mut idx = vec![0usize; counts.len()];
    loop {
        f(&idx)?;
        let mut k = counts.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

struct SubsetOutcome {
    admits: bool,
    identical: bool,
    sections: Vec<ConstraintBox>,
}

/// Analysis of one corpus under one interpretation mode.
pub struct Analysis<'c> {
    corpus: &'c Corpus,
    mode: Mode,
    models: Vec<Vec<GroundTheory>>,
    stalks: Vec<Vec<TheoryStalk>>,
}

impl<'c> Analysis<'c> {
    pub fn new(corpus: &'c Corpus, mode: Mode) -> Result<Analysis<'c>, AnalysisError> {
        Self::with_cap(corpus, mode, DEFAULT_MODEL_CAP)
    }

    /// Expands every theory and builds the stalks of every model. Fails when
    /// the number of model combinations exceeds `cap`.
    pub fn with_cap(corpus: &'c Corpus, mode: Mode, cap: usize) -> Result<Analysis<'c>, AnalysisError> {
        let models = corpus
            .theories()
            .iter()
            .map(|t| expand_models(t, cap))
            .collect::<Result<Vec<_>, _>>()?;
        let count = models.iter().fold(1u128, |acc, m| acc.saturating_mul(m.len() as u128));
        if count > cap as u128 {
            return Err(AnalysisError::ModelCapExceeded { count, cap });
        }
        let vocab = &corpus.vocab;
        let stalks = models
            .iter()
            .map(|ms| ms.iter().map(|g| TheoryStalk::build(vocab, g, mode)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let analysis = Analysis { corpus, mode, models, stalks };
        if !vocab.types.conversions().is_empty() && !analysis.stalks.is_empty() {
            // One combination suffices: restrictions do not depend on the model.
            let first: Vec<TheoryStalk> = analysis.stalks.iter().map(|s| s[0].clone()).collect();
            if first.len() <= MAX_POSET_THEORIES {
                Sheaf::from_stalks(vocab, first, mode)?.verify_composition()?;
            }
        }
        Ok(analysis)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn corpus(&self) -> &Corpus {
        self.corpus
    }

    pub fn models(&self, doc: usize) -> &[GroundTheory] {
        &self.models[doc]
    }

    pub fn predicates(&self) -> Vec<String> {
        self.corpus.constrained_predicates()
    }

    /// Indices of the theories that mention `predicate`.
    pub fn theories_constraining(&self, predicate: &str) -> Vec<usize> {
        self.corpus.theories().iter().enumerate().filter(|(_, t)| t.mentions(predicate)).map(|(i, _)| i).collect()
    }

    pub fn theory_index(&self, id: &str) -> Result<usize, AnalysisError> {
        self.corpus
            .theories()
            .iter()
            .position(|t| t.id == id)
            .ok_or_else(|| AnalysisError::UnknownTheory(id.to_string()))
    }

    fn ids(&self, docs: &[usize]) -> Vec<String> {
        docs.iter().map(|&d| self.corpus.theories()[d].id.clone()).collect()
    }

    fn subset(&self, docs: &[usize], predicate: &str) -> Result<SubsetOutcome, AnalysisError> {
        let vocab = &self.corpus.vocab;
        let counts: Vec<usize> = docs.iter().map(|&d| self.stalks[d].len()).collect();
        let mut out = SubsetOutcome { admits: false, identical: false, sections: Vec::new() };
        for_each_combination(&counts, |choice| -> Result<(), AnalysisError> {
            let members: Vec<&TheoryStalk> = docs
                .iter()
                .zip(choice)
                .map(|(&d, &m)| &self.stalks[d][m])
                .filter(|s| s.mentions(predicate))
                .collect();
            if members.is_empty() {
                out.admits = true;
                out.identical = true;
                return Ok(());
            }
            let sections = sections_over(vocab, &members, predicate)?;
            if sections.is_empty() {
                return Ok(());
            }
            out.admits = true;
            let first = &members[0].canonical[predicate];
            if members.len() == docs.len() && members.iter().all(|s| s.canonical[predicate] == *first) {
                out.identical = true;
            }
            out.sections.extend(sections);
            Ok(())
        })?;
        out.sections = maximal_elements(vocab, out.sections)?;
        Ok(out)
    }

    /// Maximal sections for a subset of theories, unioned over model combinations.
    pub fn sections(&self, docs: &[usize], predicate: &str) -> Result<Vec<ConstraintBox>, AnalysisError> {
        Ok(self.subset(docs, predicate)?.sections)
    }

    /// Whether the theories admit any section on `predicate`.
    pub fn admits(&self, docs: &[usize], predicate: &str) -> Result<bool, AnalysisError> {
        Ok(self.subset(docs, predicate)?.admits)
    }

    pub fn classify(&self) -> Result<Verdict, AnalysisError> {
        let mut predicates = Vec::new();
        for p in self.predicates() {
            predicates.push(self.classify_predicate(&p)?);
        }
        let aggregate = predicates.iter().map(|v| v.outcome.kind()).max().unwrap_or(VerdictKind::Agreement);
        Ok(Verdict { predicates, aggregate })
    }

    pub fn classify_predicate(&self, predicate: &str) -> Result<PredicateVerdict, AnalysisError> {
        let docs = self.theories_constraining(predicate);
        if docs.is_empty() {
            return Err(AnalysisError::UnknownPredicate(predicate.to_string()));
        }
        let all = self.subset(&docs, predicate)?;
        let outcome = if !all.admits {
            Outcome::Contradiction {
                witnesses: self.witnesses(predicate)?,
                coalitions: self.coalitions(predicate)?,
            }
        } else if all.identical {
            Outcome::Agreement { sections: all.sections }
        } else {
            Outcome::Disagreement { sections: all.sections }
        };
        Ok(PredicateVerdict { predicate: predicate.to_string(), theories: self.ids(&docs), outcome })
    }

    /// All subsets of the theories constraining `predicate`, as index lists,
    /// largest first and lexicographic within one size.
    fn subsets(&self, predicate: &str) -> Result<Vec<Vec<usize>>, AnalysisError> {
        let docs = self.theories_constraining(predicate);
        if docs.len() > MAX_POSET_THEORIES {
            return Err(SheafError::TooManyTheories(docs.len()).into());
        }
        let mut subsets: Vec<Vec<usize>> = (1u32..(1u32 << docs.len()))
            .map(|mask| docs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &d)| d).collect())
            .collect();
        subsets.sort_by(|a: &Vec<usize>, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Ok(subsets)
    }

    /// Maximal subsets of theories admitting a section, largest first.
    pub fn coalitions(&self, predicate: &str) -> Result<Vec<Coalition>, AnalysisError> {
        let mut found: Vec<(Vec<usize>, Vec<ConstraintBox>)> = Vec::new();
        for s in self.subsets(predicate)? {
            if found.iter().any(|(c, _)| s.iter().all(|x| c.contains(x))) {
                continue;
            }
            let outcome = self.subset(&s, predicate)?;
            if outcome.admits {
                found.push((s, outcome.sections));
            }
        }
        Ok(found.into_iter().map(|(docs, sections)| Coalition { theories: self.ids(&docs), sections }).collect())
    }

    /// `1 - (largest coalition) / (theories constraining the predicate)`.
    ///
    /// A diagnostic of our own: zero exactly when a global section exists.
    pub fn disagreement_degree(&self, predicate: &str) -> Result<Degree, AnalysisError> {
        let docs = self.theories_constraining(predicate);
        if docs.is_empty() {
            return Err(AnalysisError::UnknownPredicate(predicate.to_string()));
        }
        let largest = self.coalitions(predicate)?.iter().map(|c| c.theories.len()).max().unwrap_or(0);
        let n = docs.len() as u32;
        Ok(Degree::new(n - largest as u32, n))
    }

    /// Minimal conflicting subsets of theories and, for every box choice over
    /// them, each slot whose meet is bottom.
    pub fn witnesses(&self, predicate: &str) -> Result<Vec<ConflictWitness>, AnalysisError> {
        let mut subsets = self.subsets(predicate)?;
        subsets.reverse();
        let mut conflicting: Vec<Vec<usize>> = Vec::new();
        let mut out = BTreeSet::new();
        for s in subsets {
            if s.len() < 2 || conflicting.iter().any(|c| c.iter().all(|x| s.contains(x))) {
                continue;
            }
            if self.subset(&s, predicate)?.admits {
                continue;
            }
            self.collect_witnesses(&s, predicate, &mut out)?;
            conflicting.push(s);
        }
        Ok(out.into_iter().collect())
    }

    fn collect_witnesses(
        &self,
        docs: &[usize],
        predicate: &str,
        out: &mut BTreeSet<ConflictWitness>,
    ) -> Result<(), AnalysisError> {
        let types = &self.corpus.vocab.types;
        let counts: Vec<usize> = docs.iter().map(|&d| self.stalks[d].len()).collect();
        for_each_combination(&counts, |choice| -> Result<(), AnalysisError> {
            let members: Vec<(usize, &TheoryStalk)> = docs
                .iter()
                .zip(choice)
                .map(|(&d, &m)| (d, &self.stalks[d][m]))
                .filter(|(_, s)| s.mentions(predicate))
                .collect();
            if members.len() < 2 {
                return Ok(());
            }
            let ids = self.ids(&members.iter().map(|(d, _)| *d).collect::<Vec<_>>());
            let options: Vec<Vec<(&ConstraintBox, bool)>> = members
                .iter()
                .map(|(_, s)| {
                    s.canonical[predicate]
                        .iter()
                        .map(|b| (b, false))
                        .chain(s.agnostic.get(predicate).into_iter().flatten().map(|b| (b, true)))
                        .collect()
                })
                .collect();
            let widths: Vec<usize> = options.iter().map(Vec::len).collect();
            for_each_combination(&widths, |pick| -> Result<(), AnalysisError> {
                let boxes: Vec<(&ConstraintBox, bool)> = options.iter().zip(pick).map(|(o, &i)| o[i]).collect();
                if boxes.iter().all(|(_, agnostic)| *agnostic) {
                    return Ok(());
                }
                let arity = boxes[0].0.generator.len();
                let mut overlap = Vec::with_capacity(arity);
                for slot in 0..arity {
                    let mut m = boxes[0].0.generator[slot];
                    for (b, _) in &boxes[1..] {
                        m = types.meet(&m, &b.generator[slot])?;
                    }
                    overlap.push(m);
                }
                for (slot, m) in overlap.iter().enumerate() {
                    if m.is_bottom() {
                        out.insert(ConflictWitness {
                            predicate: predicate.to_string(),
                            theories: ids.clone(),
                            slot: Slot::Arg(slot),
                            values: boxes.iter().map(|(b, _)| SlotValue::Value(b.generator[slot])).collect(),
                            overlap: overlap.clone(),
                        });
                    }
                }
                let truth = boxes[1..].iter().try_fold(boxes[0].0.truth, |t, (b, _)| t.meet(b.truth));
                if truth.is_none() {
                    out.insert(ConflictWitness {
                        predicate: predicate.to_string(),
                        theories: ids.clone(),
                        slot: Slot::Truth,
                        values: boxes.iter().map(|(b, _)| SlotValue::Truth(b.truth)).collect(),
                        overlap: overlap.clone(),
                    });
                }
                Ok(())
            })
        })
    }

    /// Witnesses for every contradicted predicate.
    pub fn explain(&self) -> Result<Vec<ConflictWitness>, AnalysisError> {
        let mut out = Vec::new();
        let mut any = false;
        for p in self.predicates() {
            let docs = self.theories_constraining(&p);
            if !self.admits(&docs, &p)? {
                any = true;
                out.extend(self.witnesses(&p)?);
            }
        }
        if !any {
            return Err(AnalysisError::NoContradiction);
        }
        Ok(out)
    }

    pub fn reconcile(&self) -> Result<ReconciliationReport, AnalysisError> {
        let mut predicates = Vec::new();
        for p in self.predicates() {
            let docs = self.theories_constraining(&p);
            let all = self.subset(&docs, &p)?;
            let entry = if all.admits {
                PredicateReconciliation { predicate: p, dominant: all.sections, coalitions: Vec::new(), degree: Degree::zero() }
            } else {
                let coalitions = self.coalitions(&p)?;
                let largest = coalitions.iter().map(|c| c.theories.len()).max().unwrap_or(0) as u32;
                let n = docs.len() as u32;
                PredicateReconciliation { predicate: p, dominant: Vec::new(), coalitions, degree: Degree::new(n - largest, n) }
            };
            predicates.push(entry);
        }
        Ok(ReconciliationReport { predicates })
    }
}

/// Convenience wrapper: classify a corpus with the default model cap.
pub fn classify(corpus: &Corpus, mode: Mode) -> Result<Verdict, AnalysisError> {
    Analysis::new(corpus, mode)?.classify()
}

pub fn reconcile(corpus: &Corpus, mode: Mode) -> Result<ReconciliationReport, AnalysisError> {
    Analysis::new(corpus, mode)?.reconcile()
}

pub fn explain(corpus: &Corpus, mode: Mode) -> Result<Vec<ConflictWitness>, AnalysisError> {
    Analysis::new(corpus, mode)?.explain()
}

pub fn disagreement_degree(corpus: &Corpus, predicate: &str, mode: Mode) -> Result<Degree, AnalysisError> {
    Analysis::new(corpus, mode)?.disagreement_degree(predicate)
}
