//! The sheaf of a corpus: a poset of theory subsets with box-valued stalks.
//!
//! Singletons `{o}` carry the boxes of theory `o` (plus its agnostic region in
//! permissive mode). A subset of two or more theories is a node when some
//! predicate is constrained by every member; its stalk is the full product of
//! the shared predicates. Restrictions out of a singleton convert each slot into
//! the predicate's declared unit; every other restriction is the identity.

mod generic;

pub use generic::{
    enumerate_sections, verify_axioms, AxiomReport, GenericSection, GenericSheafSpec, Violation,
};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::lattice::{Interval, LatticeError, LatticeValue, Payload, Truth, TypeKind, Upper};
use crate::theory::{combine_boxes, ConstraintBox, GroundTheory, TheoryError, Vocabulary};

/// Largest corpus for which the subset poset is materialized.
pub const MAX_POSET_THEORIES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Truth values `{T, F}`; a theory's stalk is exactly what it asserts.
    Strict,
    /// Adds `U`; regions a theory says nothing about are agnostic.
    Permissive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Permissive => "permissive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SheafError {
    Theory(TheoryError),
    Lattice(LatticeError),
    /// The agnostic region of a predicate needs bounded interval slots.
    UnboundedType { predicate: String, ty: String },
    TooManyTheories(usize),
    CompositionViolation { lower: Vec<usize>, middle: Vec<usize>, upper: Vec<usize> },
    UnknownNode(String),
    EmptySpec(String),
    CyclicOrder { spec: String, a: String, b: String },
    MissingMap { spec: String, from: String, to: String },
    MapDomain { spec: String, from: String, to: String, element: String },
    MapCodomain { spec: String, from: String, to: String, element: String },
    DuplicateNode { spec: String, node: String },
}

impl fmt::Display for SheafError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SheafError::*;
        match self {
            Theory(e) => e.fmt(f),
            Lattice(e) => e.fmt(f),
            UnboundedType { predicate, ty } => write!(
                f,
                "agnostic region of `{predicate}` is undefined: type {ty} needs declared bounds"
            ),
            TooManyTheories(n) => {
                write!(f, "{n} theories exceed the poset limit of {MAX_POSET_THEORIES}")
            }
            CompositionViolation { lower, middle, upper } => write!(
                f,
                "restrictions do not compose along {lower:?} <= {middle:?} <= {upper:?}"
            ),
            UnknownNode(n) => write!(f, "unknown node `{n}`"),
            EmptySpec(s) => write!(f, "generic sheaf `{s}` has no nodes"),
            CyclicOrder { spec, a, b } => {
                write!(f, "order of `{spec}` is not antisymmetric: {a} <= {b} <= {a}")
            }
            MissingMap { spec, from, to } => {
                write!(f, "`{spec}`: no restriction map for {from} <= {to}")
            }
            MapDomain { spec, from, to, element } => write!(
                f,
                "`{spec}`: restriction {from} -> {to} is undefined on stalk element {element}"
            ),
            MapCodomain { spec, from, to, element } => write!(
                f,
                "`{spec}`: restriction {from} -> {to} sends an element to {element}, which is not in the stalk of {to}"
            ),
            DuplicateNode { spec, node } => write!(f, "`{spec}`: node {node} declared twice"),
        }
    }
}

impl core::error::Error for SheafError {}

impl From<TheoryError> for SheafError {
    fn from(e: TheoryError) -> Self {
        SheafError::Theory(e)
    }
}

impl From<LatticeError> for SheafError {
    fn from(e: LatticeError) -> Self {
        SheafError::Lattice(e)
    }
}

/// Subsets of theory indices ordered by inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    theories: usize,
    nodes: Vec<Vec<usize>>,
}

impl Poset {
    /// Singletons plus every subset of two or more theories that all constrain
    /// some common predicate.
    pub fn from_predicate_sets(sets: &[BTreeSet<String>]) -> Result<Poset, SheafError> {
        let n = sets.len();
        if n > MAX_POSET_THEORIES {
            return Err(SheafError::TooManyTheories(n));
        }
        let mut nodes = Vec::new();
        for mask in 1u32..(1u32 << n) {
            let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let shared = members.len() == 1 || {
                let first = &sets[members[0]];
                first.iter().any(|p| members[1..].iter().all(|&m| sets[m].contains(p)))
            };
            if shared {
                nodes.push(members);
            }
        }
        nodes.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(Poset { theories: n, nodes })
    }

    pub fn theory_count(&self) -> usize {
        self.theories
    }

    pub fn nodes(&self) -> &[Vec<usize>] {
        &self.nodes
    }

    pub fn index_of(&self, node: &[usize]) -> Option<usize> {
        self.nodes.iter().position(|n| n == node)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        is_subset(&self.nodes[a], &self.nodes[b])
    }

    /// Cover pairs `(a, b)`: `a ⊂ b` with `b` exactly one theory larger.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.nodes.iter().enumerate() {
            for (j, b) in self.nodes.iter().enumerate() {
                if b.len() == a.len() + 1 && is_subset(a, b) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Builds the poset over the theories' predicate sets.
pub fn build_poset(theories: &[GroundTheory]) -> Result<Poset, SheafError> {
    let sets: Vec<BTreeSet<String>> = theories.iter().map(GroundTheory::predicates).collect();
    Poset::from_predicate_sets(&sets)
}

/// The stalk attached to one theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryStalk {
    pub id: String,
    /// Boxes in the units the theory states them in.
    pub native: BTreeMap<String, Vec<ConstraintBox>>,
    /// The same boxes after the singleton restriction (declared units).
    pub canonical: BTreeMap<String, Vec<ConstraintBox>>,
    /// Permissive mode only: boxes, tagged `U`, over which the theory is silent.
    pub agnostic: BTreeMap<String, Vec<ConstraintBox>>,
}

impl TheoryStalk {
    pub fn build(vocab: &Vocabulary, g: &GroundTheory, mode: Mode) -> Result<TheoryStalk, SheafError> {
        let native = combine_boxes(vocab, g)?;
        let mut canonical = BTreeMap::new();
        for (p, boxes) in &native {
            let mut conv = boxes.iter().map(|b| b.canonical(vocab)).collect::<Result<Vec<_>, _>>()?;
            conv.sort();
            conv.dedup();
            canonical.insert(p.clone(), conv);
        }
        let mut agnostic = BTreeMap::new();
        if mode == Mode::Permissive {
            for (p, boxes) in &canonical {
                agnostic.insert(p.clone(), agnostic_boxes(vocab, p, boxes)?);
            }
        }
        let id = if g.model == 0 { g.source.clone() } else { alloc::format!("{}#{}", g.source, g.model) };
        Ok(TheoryStalk { id, native, canonical, agnostic })
    }

    pub fn mentions(&self, predicate: &str) -> bool {
        self.canonical.contains_key(predicate)
    }

    /// Whether a tuple (in declared units) lies in this stalk.
    pub fn contains(&self, vocab: &Vocabulary, tuple: &ConstraintBox, mode: Mode) -> Result<bool, LatticeError> {
        let p = tuple.predicate.as_str();
        let Some(boxes) = self.canonical.get(p) else {
            return Ok(mode == Mode::Permissive);
        };
        for b in boxes.iter().chain(self.agnostic.get(p).into_iter().flatten()) {
            if tuple.leq(&vocab.types, b)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// A candidate box for a section: canonical generator plus whether it comes
/// from the theory's agnostic region.
struct Candidate<'a> {
    boxed: &'a ConstraintBox,
    agnostic: bool,
}

/// Maximal section tuples over a set of theory stalks for one predicate.
///
/// Every choice of one box per stalk is met componentwise; choices with a bottom
/// slot are discarded, and in permissive mode so are choices made only of
/// agnostic boxes (no member asserts anything there). The maximal results
/// under the componentwise order are returned, sorted.
pub fn sections_over(
    vocab: &Vocabulary,
    stalks: &[&TheoryStalk],
    predicate: &str,
) -> Result<Vec<ConstraintBox>, LatticeError> {
    if stalks.is_empty() {
        return Ok(Vec::new());
    }
    let mut options: Vec<Vec<Candidate<'_>>> = Vec::with_capacity(stalks.len());
    for s in stalks {
        let mut opts: Vec<Candidate<'_>> = s
            .canonical
            .get(predicate)
            .into_iter()
            .flatten()
            .map(|b| Candidate { boxed: b, agnostic: false })
            .collect();
        opts.extend(s.agnostic.get(predicate).into_iter().flatten().map(|b| Candidate { boxed: b, agnostic: true }));
        if opts.is_empty() {
            return Ok(Vec::new());
        }
        options.push(opts);
    }
    let mut found = Vec::new();
    choose(vocab, &options, 0, None, false, &mut found)?;
    maximal_elements(vocab, found)
}

fn choose(
    vocab: &Vocabulary,
    options: &[Vec<Candidate<'_>>],
    depth: usize,
    acc: Option<&ConstraintBox>,
    supported: bool,
    found: &mut Vec<ConstraintBox>,
) -> Result<(), LatticeError> {
    if depth == options.len() {
        if let (Some(m), true) = (acc, supported) {
            found.push(m.clone());
        }
        return Ok(());
    }
    for c in &options[depth] {
        let next = match acc {
            None => Some(c.boxed.clone()),
            Some(m) => m.meet(&vocab.types, c.boxed)?,
        };
        if let Some(n) = next {
            choose(vocab, options, depth + 1, Some(&n), supported || !c.agnostic, found)?;
        }
    }
    Ok(())
}

/// Sorted, deduplicated maximal elements of a set of boxes.
pub fn maximal_elements(vocab: &Vocabulary, mut boxes: Vec<ConstraintBox>) -> Result<Vec<ConstraintBox>, LatticeError> {
    boxes.sort();
    boxes.dedup();
    let mut keep = Vec::new();
    for (i, b) in boxes.iter().enumerate() {
        let mut dominated = false;
        for (j, c) in boxes.iter().enumerate() {
            if i != j && b.leq(&vocab.types, c)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            keep.push(b.clone());
        }
    }
    Ok(keep)
}

/// Agnostic region of a ground theory for one predicate (permissive reading).
///
/// Covers exactly the point tuples that lie below none of the theory's boxes
/// for that predicate, as maximal boxes tagged `U`. A theory that does not
/// mention the predicate is agnostic about all of it.
pub fn agnostic_region(vocab: &Vocabulary, g: &GroundTheory, predicate: &str) -> Result<Vec<ConstraintBox>, SheafError> {
    let native = combine_boxes(vocab, g)?;
    let constrained = native
        .get(predicate)
        .into_iter()
        .flatten()
        .map(|b| b.canonical(vocab))
        .collect::<Result<Vec<_>, _>>()?;
    agnostic_boxes(vocab, predicate, &constrained)
}

fn agnostic_boxes(vocab: &Vocabulary, predicate: &str, constrained: &[ConstraintBox]) -> Result<Vec<ConstraintBox>, SheafError> {
    let types = &vocab.types;
    let sig = vocab.signature(predicate);
    // Per slot: the values a maximal agnostic box can take there.
    let mut candidates: Vec<Vec<LatticeValue>> = Vec::with_capacity(sig.args.len());
    for (slot, &ty) in sig.args.iter().enumerate() {
        let values = match &types.decl(ty).kind {
            TypeKind::IntegerInterval { min: Some(lo), max: Some(hi) } => {
                let (lo, hi) = (*lo, *hi);
                let mut cuts: BTreeSet<i64> = [lo, hi + 1].into_iter().collect();
                for b in constrained {
                    if let Some(iv) = b.generator[slot].as_interval() {
                        let end = match iv.hi {
                            Upper::At(h) => h + 1,
                            Upper::Unbounded => hi + 1,
                        };
                        for c in [iv.lo, end] {
                            if c > lo && c <= hi {
                                cuts.insert(c);
                            }
                        }
                    }
                }
                let cuts: Vec<i64> = cuts.into_iter().collect();
                let mut vals = Vec::new();
                for i in 0..cuts.len() {
                    for j in (i + 1)..cuts.len() {
                        let iv = Interval { lo: cuts[i], hi: Upper::At(cuts[j] - 1) };
                        vals.push(LatticeValue { ty, payload: Payload::Interval(iv) });
                    }
                }
                vals
            }
            TypeKind::IntegerInterval { .. } => {
                return Err(SheafError::UnboundedType {
                    predicate: predicate.to_string(),
                    ty: types.name(ty).to_string(),
                })
            }
            _ => types.finite_values(ty).unwrap_or_default(),
        };
        candidates.push(values);
    }

    let mut free = Vec::new();
    let mut current = Vec::with_capacity(candidates.len());
    collect_free(vocab, predicate, constrained, &candidates, &mut current, &mut free)?;
    Ok(maximal_elements(vocab, free)?)
}

fn collect_free(
    vocab: &Vocabulary,
    predicate: &str,
    constrained: &[ConstraintBox],
    candidates: &[Vec<LatticeValue>],
    current: &mut Vec<LatticeValue>,
    free: &mut Vec<ConstraintBox>,
) -> Result<(), LatticeError> {
    if current.len() == candidates.len() {
        let b = ConstraintBox { predicate: predicate.to_string(), generator: current.clone(), truth: Truth::U };
        // Free iff it shares no point with any constrained box, whatever the truth tag.
        for c in constrained {
            let untagged = ConstraintBox { truth: Truth::U, ..c.clone() };
            if b.meet(&vocab.types, &untagged)?.is_some() {
                return Ok(());
            }
        }
        free.push(b);
        return Ok(());
    }
    for v in &candidates[current.len()] {
        current.push(*v);
        collect_free(vocab, predicate, constrained, candidates, current, free)?;
        current.pop();
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Restriction {
    Identity,
    /// Singleton to a larger subset: convert every slot into its declared type.
    ToDeclaredUnits,
}

/// A section over a set of theories: the same tuple at every node below their union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub assignment: Vec<(Vec<usize>, ConstraintBox)>,
}

/// The sheaf over one ground model per theory.
#[derive(Clone, Debug)]
pub struct Sheaf<'v> {
    vocab: &'v Vocabulary,
    mode: Mode,
    poset: Poset,
    stalks: Vec<TheoryStalk>,
}

/// What a poset node carries.
pub enum Stalk<'a> {
    Theory(&'a TheoryStalk),
    /// Full product over the predicates shared by all members.
    Full(BTreeSet<String>),
}

impl<'v> Sheaf<'v> {
    pub fn build(vocab: &'v Vocabulary, theories: &[GroundTheory], mode: Mode) -> Result<Sheaf<'v>, SheafError> {
        let poset = build_poset(theories)?;
        let stalks = theories.iter().map(|g| TheoryStalk::build(vocab, g, mode)).collect::<Result<Vec<_>, _>>()?;
        let sheaf = Sheaf { vocab, mode, poset, stalks };
        if !vocab.types.conversions().is_empty() {
            sheaf.verify_composition()?;
        }
        Ok(sheaf)
    }

    pub fn from_stalks(vocab: &'v Vocabulary, stalks: Vec<TheoryStalk>, mode: Mode) -> Result<Sheaf<'v>, SheafError> {
        let sets: Vec<BTreeSet<String>> = stalks.iter().map(|s| s.canonical.keys().cloned().collect()).collect();
        let poset = Poset::from_predicate_sets(&sets)?;
        Ok(Sheaf { vocab, mode, poset, stalks })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn theory_stalks(&self) -> &[TheoryStalk] {
        &self.stalks
    }

    pub fn stalk(&self, node: usize) -> Stalk<'_> {
        let members = &self.poset.nodes()[node];
        if let [single] = members[..] {
            return Stalk::Theory(&self.stalks[single]);
        }
        let first = &self.stalks[members[0]];
        let shared = first
            .canonical
            .keys()
            .filter(|p| members[1..].iter().all(|&m| self.stalks[m].mentions(p)))
            .cloned()
            .collect();
        Stalk::Full(shared)
    }

    pub fn restriction(&self, from: usize, to: usize) -> Option<Restriction> {
        if !self.poset.leq(from, to) {
            return None;
        }
        let single = self.poset.nodes()[from].len() == 1;
        Some(if single && from != to { Restriction::ToDeclaredUnits } else { Restriction::Identity })
    }

    pub fn restrict(&self, from: usize, to: usize, b: &ConstraintBox) -> Result<Option<ConstraintBox>, LatticeError> {
        match self.restriction(from, to) {
            None => Ok(None),
            Some(Restriction::Identity) => Ok(Some(b.clone())),
            Some(Restriction::ToDeclaredUnits) => b.canonical(self.vocab).map(Some),
        }
    }

    /// Checks `R(x ≤ z) = R(y ≤ z) ∘ R(x ≤ y)` on every singleton box and every
    /// chain of nodes above it.
    pub fn verify_composition(&self) -> Result<(), SheafError> {
        let n = self.poset.nodes().len();
        for x in 0..n {
            let Stalk::Theory(stalk) = self.stalk(x) else { continue };
            for b in stalk.native.values().flatten() {
                for y in (0..n).filter(|&y| self.poset.leq(x, y)) {
                    for z in (0..n).filter(|&z| self.poset.leq(y, z)) {
                        let direct = self.restrict(x, z, b)?;
                        let via = match self.restrict(x, y, b)? {
                            Some(mid) => self.restrict(y, z, &mid)?,
                            None => None,
                        };
                        if direct != via {
                            let nodes = self.poset.nodes();
                            return Err(SheafError::CompositionViolation {
                                lower: nodes[x].clone(),
                                middle: nodes[y].clone(),
                                upper: nodes[z].clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Maximal tuples on which the given theories (by index) can glue.
    pub fn maximal_sections(&self, theories: &[usize], predicate: &str) -> Result<Vec<ConstraintBox>, LatticeError> {
        let stalks: Vec<&TheoryStalk> = theories.iter().map(|&i| &self.stalks[i]).collect();
        sections_over(self.vocab, &stalks, predicate)
    }

    /// Extends a section tuple to every poset node made of the given theories.
    pub fn section_on(&self, theories: &[usize], tuple: &ConstraintBox) -> Section {
        let assignment = self
            .poset
            .nodes()
            .iter()
            .filter(|n| is_subset(n, theories))
            .map(|n| (n.clone(), tuple.clone()))
            .collect();
        Section { assignment }
    }

    /// Checks a [`Section`]: stalk membership at singletons and identity
    /// restriction along every pair of its nodes.
    pub fn is_section(&self, section: &Section) -> Result<bool, LatticeError> {
        for (node, value) in &section.assignment {
            if let [single] = node[..] {
                if !self.stalks[single].contains(self.vocab, value, self.mode)? {
                    return Ok(false);
                }
            }
        }
        for (a, va) in &section.assignment {
            for (b, vb) in &section.assignment {
                if is_subset(a, b) && a.len() > 1 && va != vb {
                    return Ok(false);
                }
                if is_subset(a, b) && a.len() == 1 && b.len() > 1 && va.canonical(self.vocab)? != *vb {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}
