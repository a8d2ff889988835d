//! Consistency analysis of parameterized theories through sheaves of lattices.
//!
//! Theories assert atoms such as `s([50,74], m, an)` whose arguments live in
//! lattices (integer intervals, finite meet-semilattices, truth values). Each
//! theory becomes a stalk of constraint boxes; global sections over a set of
//! theories are the ways they can be jointly satisfied.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod lattice;
pub mod oracle;
pub mod sheaf;
pub mod theory;

pub use analysis::{
    classify, disagreement_degree, explain, reconcile, Analysis, AnalysisError, Coalition, ConflictWitness, Degree,
    Outcome, PredicateReconciliation, PredicateVerdict, ReconciliationReport, Slot, SlotValue, Verdict, VerdictKind,
};
pub use lattice::{
    ConversionMap, FiniteLattice, Interval, LatticeError, LatticeTypeDecl, LatticeValue, Payload, Rational, Truth,
    TypeId, TypeKind, TypeTable, Upper,
};
pub use oracle::{oracle_consistent, oracle_sections, oracle_verdicts, GroundTuple, OracleError, OracleResult};
pub use sheaf::{
    enumerate_sections, verify_axioms, AxiomReport, GenericSection, GenericSheafSpec, Mode, Sheaf, SheafError,
    TheoryStalk, Violation,
};
pub use theory::{
    combine_boxes, expand_models, Atom, Clause, ConstraintBox, Corpus, GroundTheory, Literal, PredicateSignature,
    TheoryDoc, TheoryError, Vocabulary, DEFAULT_MODEL_CAP,
};
