//! Theories, their ground models, and the per-predicate boxes they induce.
//!
//! A theory is a set of clauses; each clause is a disjunction of possibly
//! negated ground atoms. [`expand_models`] replaces a theory by its ground
//! models (one literal picked from every clause), and [`combine_boxes`] turns a
//! ground model into the boxes that describe its stalk: for every predicate and
//! sign, one box per maximal set of atoms whose argument-wise meet survives.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::lattice::{LatticeError, LatticeValue, Truth, TypeId, TypeTable};
use crate::sheaf::GenericSheafSpec;

/// Default ceiling on the number of ground models or model combinations.
pub const DEFAULT_MODEL_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateSignature {
    pub name: String,
    pub args: Vec<TypeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<LatticeValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn truth(&self) -> Truth {
        if self.positive {
            Truth::T
        } else {
            Truth::F
        }
    }
}

/// A non-empty disjunction of literals.
pub type Clause = Vec<Literal>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryDoc {
    pub id: String,
    pub clauses: Vec<Clause>,
}

impl TheoryDoc {
    pub fn mentions(&self, predicate: &str) -> bool {
        self.clauses.iter().flatten().any(|l| l.atom.predicate == predicate)
    }

    pub fn predicates(&self) -> BTreeSet<&str> {
        self.clauses.iter().flatten().map(|l| l.atom.predicate.as_str()).collect()
    }

    pub fn has_negation(&self) -> bool {
        self.clauses.iter().flatten().any(|l| !l.positive)
    }
}

/// One ground model of a theory: a consistent set of signed atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTheory {
    pub source: String,
    pub model: usize,
    pub literals: BTreeSet<Literal>,
}

impl GroundTheory {
    /// Wraps an explicit literal set; used for tests and for positive atomic input.
    pub fn new(source: impl Into<String>, literals: impl IntoIterator<Item = Literal>) -> Self {
        GroundTheory { source: source.into(), model: 0, literals: literals.into_iter().collect() }
    }

    pub fn mentions(&self, predicate: &str) -> bool {
        self.literals.iter().any(|l| l.atom.predicate == predicate)
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        self.literals.iter().map(|l| l.atom.predicate.clone()).collect()
    }
}

/// Down-set of a generator tuple, tagged with a truth value.
///
/// Denotes `{ (t, v) : t ≤ generator componentwise, v ≤ truth }`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintBox {
    pub predicate: String,
    pub generator: Vec<LatticeValue>,
    pub truth: Truth,
}

impl ConstraintBox {
    /// Componentwise meet, `None` as soon as one slot (or the truth tag) hits bottom.
    pub fn meet(&self, types: &TypeTable, other: &ConstraintBox) -> Result<Option<ConstraintBox>, LatticeError> {
        debug_assert_eq!(self.predicate, other.predicate);
        let Some(truth) = self.truth.meet(other.truth) else { return Ok(None) };
        let Some(generator) = meet_args(types, &self.generator, &other.generator)? else {
            return Ok(None);
        };
        Ok(Some(ConstraintBox { predicate: self.predicate.clone(), generator, truth }))
    }

    pub fn leq(&self, types: &TypeTable, other: &ConstraintBox) -> Result<bool, LatticeError> {
        if self.predicate != other.predicate || !self.truth.leq(other.truth) {
            return Ok(false);
        }
        for (a, b) in self.generator.iter().zip(&other.generator) {
            if !types.leq(a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Converts every slot into the predicate's declared argument type.
    pub fn canonical(&self, vocab: &Vocabulary) -> Result<ConstraintBox, LatticeError> {
        let sig = vocab.signature(&self.predicate);
        let generator = self
            .generator
            .iter()
            .zip(&sig.args)
            .map(|(v, &target)| vocab.to_type(v, target))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ConstraintBox { predicate: self.predicate.clone(), generator, truth: self.truth })
    }

    pub fn show<'a>(&'a self, types: &'a TypeTable, with_truth: bool) -> BoxDisplay<'a> {
        BoxDisplay { types, boxed: self, with_truth }
    }
}

pub struct BoxDisplay<'a> {
    types: &'a TypeTable,
    boxed: &'a ConstraintBox,
    with_truth: bool,
}

impl fmt::Display for BoxDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.boxed.predicate)?;
        for (i, v) in self.boxed.generator.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", self.types.show(v))?;
        }
        if self.with_truth {
            if !self.boxed.generator.is_empty() {
                f.write_str(", ")?;
            }
            write!(f, "{}", self.boxed.truth)?;
        }
        f.write_str(")")
    }
}

/// Slotwise meet of two argument tuples; `None` when any slot is bottom.
pub fn meet_args(
    types: &TypeTable,
    a: &[LatticeValue],
    b: &[LatticeValue],
) -> Result<Option<Vec<LatticeValue>>, LatticeError> {
    let mut out = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        let m = types.meet(x, y)?;
        if m.is_bottom() {
            return Ok(None);
        }
        out.push(m);
    }
    Ok(Some(out))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoryError {
    Lattice(LatticeError),
    UnknownPredicate(String),
    DuplicatePredicate(String),
    DuplicateTheory(String),
    EmptyTheory(String),
    EmptyClause(String),
    ArityMismatch { predicate: String, expected: usize, found: usize },
    ArgumentType { predicate: String, position: usize, expected: String, found: String },
    BottomArgument { predicate: String, position: usize },
    ModelCapExceeded { theory: String, count: u128, cap: usize },
    Unsatisfiable(String),
}

impl fmt::Display for TheoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TheoryError::*;
        match self {
            Lattice(e) => e.fmt(f),
            UnknownPredicate(p) => write!(f, "unknown predicate `{p}`"),
            DuplicatePredicate(p) => write!(f, "predicate `{p}` declared twice"),
            DuplicateTheory(t) => write!(f, "theory `{t}` declared twice"),
            EmptyTheory(t) => write!(f, "theory `{t}` has no statements"),
            EmptyClause(t) => write!(f, "theory `{t}` contains an empty clause"),
            ArityMismatch { predicate, expected, found } => {
                write!(f, "predicate `{predicate}` takes {expected} arguments, found {found}")
            }
            ArgumentType { predicate, position, expected, found } => write!(
                f,
                "argument {} of `{predicate}` must be {expected} (or convertible to it), found {found}",
                position + 1
            ),
            BottomArgument { predicate, position } => {
                write!(f, "argument {} of `{predicate}` is bottom", position + 1)
            }
            ModelCapExceeded { theory, count, cap } => {
                write!(f, "`{theory}` expands to {count} candidate models, above the cap of {cap}")
            }
            Unsatisfiable(t) => write!(f, "theory `{t}` is unsatisfiable: every model picks an atom with both signs"),
        }
    }
}

impl core::error::Error for TheoryError {}

impl From<LatticeError> for TheoryError {
    fn from(e: LatticeError) -> Self {
        TheoryError::Lattice(e)
    }
}

/// Declared types, conversions and predicate signatures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub types: TypeTable,
    predicates: BTreeMap<String, PredicateSignature>,
}

impl Vocabulary {
    pub fn new(types: TypeTable) -> Self {
        Vocabulary { types, predicates: BTreeMap::new() }
    }

    pub fn declare_predicate(&mut self, sig: PredicateSignature) -> Result<(), TheoryError> {
        if self.predicates.contains_key(&sig.name) {
            return Err(TheoryError::DuplicatePredicate(sig.name));
        }
        self.predicates.insert(sig.name.clone(), sig);
        Ok(())
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateSignature> {
        self.predicates.get(name)
    }

    /// Signature of a predicate already validated to exist.
    pub fn signature(&self, name: &str) -> &PredicateSignature {
        &self.predicates[name]
    }

    pub fn predicates(&self) -> impl Iterator<Item = &PredicateSignature> {
        self.predicates.values()
    }

    /// Converts `v` into `target`, through a registered conversion if needed.
    pub fn to_type(&self, v: &LatticeValue, target: TypeId) -> Result<LatticeValue, LatticeError> {
        match self.types.conversion(v.ty, target) {
            Some(map) => self.types.convert(v, &map),
            None => Err(LatticeError::TypeMismatch {
                expected: self.types.name(target).to_string(),
                found: self.types.name(v.ty).to_string(),
            }),
        }
    }

    pub fn check_atom(&self, atom: &Atom) -> Result<(), TheoryError> {
        let sig = self
            .predicate(&atom.predicate)
            .ok_or_else(|| TheoryError::UnknownPredicate(atom.predicate.clone()))?;
        if sig.args.len() != atom.args.len() {
            return Err(TheoryError::ArityMismatch {
                predicate: atom.predicate.clone(),
                expected: sig.args.len(),
                found: atom.args.len(),
            });
        }
        for (position, (v, &expected)) in atom.args.iter().zip(&sig.args).enumerate() {
            if v.is_bottom() {
                return Err(TheoryError::BottomArgument { predicate: atom.predicate.clone(), position });
            }
            if self.types.conversion(v.ty, expected).is_none() {
                return Err(TheoryError::ArgumentType {
                    predicate: atom.predicate.clone(),
                    position,
                    expected: self.types.name(expected).to_string(),
                    found: self.types.name(v.ty).to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Everything read from one or more theory files.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub vocab: Vocabulary,
    theories: Vec<TheoryDoc>,
    generic_sheaves: Vec<GenericSheafSpec>,
}

impl Corpus {
    pub fn new(vocab: Vocabulary) -> Self {
        Corpus { vocab, theories: Vec::new(), generic_sheaves: Vec::new() }
    }

    pub fn add_theory(&mut self, doc: TheoryDoc) -> Result<(), TheoryError> {
        if self.theories.iter().any(|t| t.id == doc.id) {
            return Err(TheoryError::DuplicateTheory(doc.id));
        }
        if doc.clauses.is_empty() {
            return Err(TheoryError::EmptyTheory(doc.id));
        }
        for clause in &doc.clauses {
            if clause.is_empty() {
                return Err(TheoryError::EmptyClause(doc.id.clone()));
            }
            for lit in clause {
                self.vocab.check_atom(&lit.atom)?;
            }
        }
        self.theories.push(doc);
        Ok(())
    }

    pub fn add_generic_sheaf(&mut self, spec: GenericSheafSpec) {
        self.generic_sheaves.push(spec);
    }

    pub fn theories(&self) -> &[TheoryDoc] {
        &self.theories
    }

    pub fn theory(&self, id: &str) -> Option<&TheoryDoc> {
        self.theories.iter().find(|t| t.id == id)
    }

    pub fn generic_sheaves(&self) -> &[GenericSheafSpec] {
        &self.generic_sheaves
    }

    /// Predicates mentioned by at least one theory, sorted by name.
    pub fn constrained_predicates(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.theories.iter().flat_map(|t| t.predicates()).collect();
        set.into_iter().map(String::from).collect()
    }

    pub fn has_negation(&self) -> bool {
        self.theories.iter().any(TheoryDoc::has_negation)
    }
}

/// Expands a theory into its ground models.
///
/// Each model picks one literal from every clause; picks that assert an atom
/// with both signs are dropped and duplicates are merged. A theory whose every
/// pick is self-contradictory is reported as unsatisfiable.
pub fn expand_models(doc: &TheoryDoc, cap: usize) -> Result<Vec<GroundTheory>, TheoryError> {
    let count = doc.clauses.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if count > cap as u128 {
        return Err(TheoryError::ModelCapExceeded { theory: doc.id.clone(), count, cap });
    }
    if doc.clauses.iter().any(Vec::is_empty) {
        return Err(TheoryError::EmptyClause(doc.id.clone()));
    }
    let mut seen: Vec<BTreeSet<Literal>> = Vec::new();
    let mut choice = alloc::vec![0usize; doc.clauses.len()];
    'outer: loop {
        let picked: BTreeSet<Literal> = doc.clauses.iter().zip(&choice).map(|(c, &i)| c[i].clone()).collect();
        let consistent = picked
            .iter()
            .filter(|l| l.positive)
            .all(|l| !picked.contains(&Literal { atom: l.atom.clone(), positive: false }));
        if consistent && !seen.contains(&picked) {
            seen.push(picked);
        }
        for (slot, clause) in choice.iter_mut().zip(&doc.clauses).rev() {
            *slot += 1;
            if *slot < clause.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    if seen.is_empty() {
        return Err(TheoryError::Unsatisfiable(doc.id.clone()));
    }
    Ok(seen
        .into_iter()
        .enumerate()
        .map(|(model, literals)| GroundTheory { source: doc.id.clone(), model, literals })
        .collect())
}

/// Boxes of a ground model, per predicate, in the units the model states them in.
///
/// Atoms of one predicate and sign are combined: every maximal subset whose
/// argument-wise meet has no bottom slot yields one box with that meet as its
/// generator. The boxes emitted for one predicate and sign are pairwise
/// disjoint. When atoms in a group state the same slot in different units, that
/// slot is first converted to the predicate's declared type.
pub fn combine_boxes(
    vocab: &Vocabulary,
    g: &GroundTheory,
) -> Result<BTreeMap<String, Vec<ConstraintBox>>, TheoryError> {
    let mut groups: BTreeMap<(&str, bool), Vec<Vec<LatticeValue>>> = BTreeMap::new();
    for lit in &g.literals {
        groups.entry((lit.atom.predicate.as_str(), lit.positive)).or_default().push(lit.atom.args.clone());
    }
    let mut out: BTreeMap<String, Vec<ConstraintBox>> = BTreeMap::new();
    for ((predicate, positive), mut atoms) in groups {
        let sig = vocab.signature(predicate);
        for (slot, &target) in sig.args.iter().enumerate() {
            let first = atoms[0][slot].ty;
            if atoms.iter().any(|a| a[slot].ty != first) {
                for atom in atoms.iter_mut() {
                    atom[slot] = vocab.to_type(&atom[slot], target)?;
                }
            }
        }
        let truth = if positive { Truth::T } else { Truth::F };
        let boxes = out.entry(predicate.to_string()).or_default();
        for generator in maximal_compatible_meets(&vocab.types, &atoms)? {
            boxes.push(ConstraintBox { predicate: predicate.to_string(), generator, truth });
        }
    }
    for boxes in out.values_mut() {
        boxes.sort();
        boxes.dedup();
    }
    Ok(out)
}

/// Meets of all maximal subsets of `atoms` whose slotwise meet avoids bottom.
fn maximal_compatible_meets(
    types: &TypeTable,
    atoms: &[Vec<LatticeValue>],
) -> Result<Vec<Vec<LatticeValue>>, LatticeError> {
    struct Search<'a> {
        types: &'a TypeTable,
        atoms: &'a [Vec<LatticeValue>],
        excluded: Vec<usize>,
        out: Vec<Vec<LatticeValue>>,
    }

    impl Search<'_> {
        fn walk(&mut self, i: usize, acc: Option<&[LatticeValue]>) -> Result<(), LatticeError> {
            if i == self.atoms.len() {
                if let Some(m) = acc {
                    for &j in &self.excluded {
                        if meet_args(self.types, m, &self.atoms[j])?.is_some() {
                            return Ok(());
                        }
                    }
                    self.out.push(m.to_vec());
                }
                return Ok(());
            }
            let with = match acc {
                None => Some(self.atoms[i].clone()),
                Some(m) => meet_args(self.types, m, &self.atoms[i])?,
            };
            if let Some(next) = with {
                self.walk(i + 1, Some(&next))?;
            }
            self.excluded.push(i);
            let r = self.walk(i + 1, acc);
            self.excluded.pop();
            r
        }
    }

    let mut search = Search { types, atoms, excluded: Vec::new(), out: Vec::new() };
    search.walk(0, None)?;
    Ok(search.out)
}
