//! Brute-force reference semantics over ground points.
//!
//! Nothing here uses box meets: every ground tuple of the (bounded) universe is
//! tested directly against the atoms of each theory. The box algebra is
//! expected to agree with these answers.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::analysis::for_each_combination;
use crate::lattice::{LatticeError, LatticeValue, Truth};
use crate::sheaf::{GenericSection, GenericSheafSpec, Mode, SheafError};
use crate::theory::{expand_models, Corpus, GroundTheory, TheoryError, Vocabulary};

pub const DEFAULT_TUPLE_CAP: usize = 1_000_000;

/// A fully ground tuple: one point per argument plus a truth value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundTuple {
    pub predicate: String,
    pub values: Vec<LatticeValue>,
    pub truth: Truth,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub consistent: bool,
    /// Every ground tuple admitted by all mentioning theories, sorted.
    pub witnesses: Vec<GroundTuple>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    Lattice(LatticeError),
    Theory(TheoryError),
    UniverseTooLarge { predicate: String, size: u128, cap: usize },
    ModelCapExceeded { count: u128, cap: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Lattice(e) => e.fmt(f),
            OracleError::Theory(e) => e.fmt(f),
            OracleError::UniverseTooLarge { predicate, size, cap } => {
                write!(f, "ground universe of `{predicate}` has {size} tuples, above the cap of {cap}")
            }
            OracleError::ModelCapExceeded { count, cap } => {
                write!(f, "corpus has {count} model combinations, above the cap of {cap}")
            }
        }
    }
}

impl core::error::Error for OracleError {}

impl From<LatticeError> for OracleError {
    fn from(e: LatticeError) -> Self {
        OracleError::Lattice(e)
    }
}

impl From<TheoryError> for OracleError {
    fn from(e: TheoryError) -> Self {
        OracleError::Theory(e)
    }
}

type Bits = Vec<u64>;

fn bit(bits: &Bits, i: usize) -> bool {
    bits[i / 64] & (1 << (i % 64)) != 0
}

/// Atoms of one theory and sign, as the set of ground points below each.
struct SignAtoms {
    below: Vec<Bits>,
}

impl SignAtoms {
    /// A point is admitted when the atoms above it form a maximal family of
    /// atoms sharing a point.
    fn admits(&self, p: usize, words: usize) -> bool {
        let above: Vec<usize> = (0..self.below.len()).filter(|&a| bit(&self.below[a], p)).collect();
        if above.is_empty() {
            return false;
        }
        let mut common = vec![!0u64; words];
        for &a in &above {
            for (c, w) in common.iter_mut().zip(&self.below[a]) {
                *c &= w;
            }
        }
        (0..self.below.len())
            .filter(|a| !above.contains(a))
            .all(|b| common.iter().zip(&self.below[b]).all(|(c, w)| c & w == 0))
    }
}

/// Ground consistency of one predicate across `theories`.
///
/// Strict: some tuple is admitted by every theory mentioning the predicate.
/// Permissive: a theory also tolerates tuples whose arguments it admits under
/// neither sign, but at least one theory must admit the tuple outright.
pub fn oracle_consistent(
    vocab: &Vocabulary,
    theories: &[GroundTheory],
    predicate: &str,
    mode: Mode,
    cap: usize,
) -> Result<OracleResult, OracleError> {
    let sig = vocab.signature(predicate);
    let members: Vec<&GroundTheory> = theories.iter().filter(|g| g.mentions(predicate)).collect();
    if members.is_empty() {
        // Nothing is asserted: consistent, with no tuple singled out.
        return Ok(OracleResult { consistent: true, witnesses: Vec::new() });
    }
    let slots: Vec<Vec<LatticeValue>> =
        sig.args.iter().map(|&ty| vocab.types.points(ty)).collect::<Result<_, _>>()?;
    let size = slots.iter().fold(2u128, |acc, s| acc.saturating_mul(s.len() as u128));
    if size > cap as u128 {
        return Err(OracleError::UniverseTooLarge { predicate: predicate.to_string(), size, cap });
    }
    let mut points: Vec<Vec<LatticeValue>> = Vec::new();
    let widths: Vec<usize> = slots.iter().map(Vec::len).collect();
    for_each_combination(&widths, |idx| -> Result<(), OracleError> {
        points.push(idx.iter().zip(&slots).map(|(&i, s)| s[i]).collect());
        Ok(())
    })?;
    let words = points.len().div_ceil(64).max(1);

    let mut atoms: Vec<BTreeMap<bool, SignAtoms>> = Vec::with_capacity(members.len());
    for g in &members {
        let mut by_sign: BTreeMap<bool, SignAtoms> = BTreeMap::new();
        by_sign.insert(true, SignAtoms { below: Vec::new() });
        by_sign.insert(false, SignAtoms { below: Vec::new() });
        for lit in g.literals.iter().filter(|l| l.atom.predicate == predicate) {
            let args: Vec<LatticeValue> = lit
                .atom
                .args
                .iter()
                .zip(&sig.args)
                .map(|(v, &ty)| vocab.to_type(v, ty))
                .collect::<Result<_, _>>()?;
            let mut below = vec![0u64; words];
            for (i, p) in points.iter().enumerate() {
                let mut inside = true;
                for (x, a) in p.iter().zip(&args) {
                    if !vocab.types.leq(x, a)? {
                        inside = false;
                        break;
                    }
                }
                if inside {
                    below[i / 64] |= 1 << (i % 64);
                }
            }
            by_sign.get_mut(&lit.positive).expect("both signs present").below.push(below);
        }
        atoms.push(by_sign);
    }

    let mut witnesses = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let strict: Vec<(bool, bool)> =
            atoms.iter().map(|a| (a[&true].admits(i, words), a[&false].admits(i, words))).collect();
        for truth in [Truth::T, Truth::F] {
            let own = |&(pos, neg): &(bool, bool)| if truth == Truth::T { pos } else { neg };
            let ok = match mode {
                Mode::Strict => strict.iter().all(own),
                Mode::Permissive => {
                    strict.iter().all(|s| own(s) || (!s.0 && !s.1)) && strict.iter().any(own)
                }
            };
            if ok {
                witnesses.push(GroundTuple { predicate: predicate.to_string(), values: p.clone(), truth });
            }
        }
    }
    witnesses.sort();
    Ok(OracleResult { consistent: !witnesses.is_empty(), witnesses })
}

/// Whether each constrained predicate is consistent in at least one model
/// combination, by ground enumeration.
pub fn oracle_verdicts(
    corpus: &Corpus,
    mode: Mode,
    model_cap: usize,
    tuple_cap: usize,
) -> Result<BTreeMap<String, bool>, OracleError> {
    let models = corpus
        .theories()
        .iter()
        .map(|t| expand_models(t, model_cap))
        .collect::<Result<Vec<_>, _>>()?;
    let count = models.iter().fold(1u128, |acc, m| acc.saturating_mul(m.len() as u128));
    if count > model_cap as u128 {
        return Err(OracleError::ModelCapExceeded { count, cap: model_cap });
    }
    let mut out = BTreeMap::new();
    for p in corpus.constrained_predicates() {
        let docs: Vec<usize> = (0..models.len()).filter(|&d| corpus.theories()[d].mentions(&p)).collect();
        let counts: Vec<usize> = docs.iter().map(|&d| models[d].len()).collect();
        let mut consistent = false;
        for_each_combination(&counts, |choice| -> Result<(), OracleError> {
            if consistent {
                return Ok(());
            }
            let ground: Vec<GroundTheory> = docs.iter().zip(choice).map(|(&d, &m)| models[d][m].clone()).collect();
            consistent = oracle_consistent(&corpus.vocab, &ground, &p, mode, tuple_cap)?.consistent;
            Ok(())
        })?;
        out.insert(p, consistent);
    }
    Ok(out)
}

/// Sections of an extensional sheaf by filtering the full product of stalks
/// over `domain` against every comparable pair.
pub fn oracle_sections(spec: &GenericSheafSpec, domain: &[usize]) -> Result<Vec<GenericSection>, SheafError> {
    let mut nodes = domain.to_vec();
    nodes.sort();
    nodes.dedup();
    let widths: Vec<usize> = nodes.iter().map(|&n| spec.stalk(n).len()).collect();
    let mut out = Vec::new();
    for_each_combination(&widths, |idx| -> Result<(), SheafError> {
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate() {
                if a != b && spec.leq(a, b) && spec.restrict(a, b, &spec.stalk(a)[idx[i]])? != spec.stalk(b)[idx[j]] {
                    return Ok(());
                }
            }
        }
        out.push(GenericSection {
            assignment: nodes.iter().zip(idx).map(|(&n, &i)| (spec.nodes()[n].clone(), spec.stalk(n)[i].clone())).collect(),
        });
        Ok(())
    })?;
    out.sort();
    Ok(out)
}
