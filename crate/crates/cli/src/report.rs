//! Report structures. JSON is their serde form; text is rendered from the
//! same structures, so both always carry the same content.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sheafaccord_core::{
    ConflictWitness, ConstraintBox, LatticeValue, Payload, Slot, SlotValue, Truth, TypeKind, TypeTable, Upper,
    Vocabulary,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValuePayload {
    Interval { lo: i64, hi: Option<i64> },
    Element(String),
    Truth(String),
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Value {
    #[serde(rename = "type")]
    pub ty: String,
    pub payload: ValuePayload,
}

impl Value {
    pub fn from_core(types: &TypeTable, v: &LatticeValue) -> Value {
        let payload = match v.payload {
            Payload::Interval(iv) => ValuePayload::Interval {
                lo: iv.lo,
                hi: match iv.hi {
                    Upper::At(hi) => Some(hi),
                    Upper::Unbounded => None,
                },
            },
            Payload::Element(e) => match &types.decl(v.ty).kind {
                TypeKind::Finite(l) => ValuePayload::Element(l.name(e).to_string()),
                _ => ValuePayload::Element(e.to_string()),
            },
            Payload::Truth(t) => ValuePayload::Truth(t.symbol().to_string()),
            Payload::Bottom => ValuePayload::Bottom,
        };
        Value { ty: types.name(v.ty).to_string(), payload }
    }

    fn truth(t: Truth) -> Value {
        Value { ty: "truth".into(), payload: ValuePayload::Truth(t.symbol().to_string()) }
    }

    pub fn text(&self) -> String {
        match &self.payload {
            ValuePayload::Interval { lo, hi: Some(hi) } => format!("[{lo},{hi}]"),
            ValuePayload::Interval { lo, hi: None } => format!("[{lo},+inf)"),
            ValuePayload::Element(e) | ValuePayload::Truth(e) => e.clone(),
            ValuePayload::Bottom => "⊥".into(),
        }
    }
}

/// Argument values of a box, with its truth value last when `with_truth`.
pub fn section(types: &TypeTable, b: &ConstraintBox, with_truth: bool) -> Vec<Value> {
    let mut out: Vec<Value> = b.generator.iter().map(|v| Value::from_core(types, v)).collect();
    if with_truth {
        out.push(Value::truth(b.truth));
    }
    out
}

fn tuple(predicate: &str, values: &[Value]) -> String {
    let inner: Vec<String> = values.iter().map(Value::text).collect();
    format!("{predicate}({})", inner.join(", "))
}

fn ids(theories: &[String]) -> String {
    format!("{{{}}}", theories.join(", "))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotLabel {
    /// Argument type name, or `truth`.
    pub label: String,
    /// Zero-based argument position; absent for the truth slot.
    pub position: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub theories: Vec<String>,
    pub slot: SlotLabel,
    pub values: Vec<Value>,
    pub overlap: Vec<Value>,
}

impl Witness {
    pub fn from_core(vocab: &Vocabulary, w: &ConflictWitness) -> Witness {
        let types = &vocab.types;
        let slot = match w.slot {
            Slot::Arg(i) => {
                let ty = vocab.signature(&w.predicate).args[i];
                SlotLabel { label: types.name(ty).to_string(), position: Some(i) }
            }
            Slot::Truth => SlotLabel { label: "truth".into(), position: None },
        };
        let values = w
            .values
            .iter()
            .map(|v| match v {
                SlotValue::Value(v) => Value::from_core(types, v),
                SlotValue::Truth(t) => Value::truth(*t),
            })
            .collect();
        let overlap = w.overlap.iter().map(|v| Value::from_core(types, v)).collect();
        Witness { theories: w.theories.clone(), slot, values, overlap }
    }

    fn text(&self, predicate: &str) -> String {
        let at = match self.slot.position {
            Some(i) => format!("{} (argument {})", self.slot.label, i + 1),
            None => "truth value".to_string(),
        };
        let values: Vec<String> = self.values.iter().map(Value::text).collect();
        format!(
            "{} clash at {at}: {}; overlap {}",
            ids(&self.theories),
            values.join(" vs "),
            tuple(predicate, &self.overlap)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub value: f64,
    pub numerator: u32,
    pub denominator: u32,
    pub note: String,
}

impl DegreeReport {
    pub fn new(d: sheafaccord_core::Degree) -> DegreeReport {
        DegreeReport {
            value: d.as_f64(),
            numerator: d.numerator(),
            denominator: d.denominator(),
            note: "share of constraining theories left out of the largest coalition".into(),
        }
    }

    fn text(&self) -> String {
        if self.numerator == 0 {
            "0".into()
        } else {
            format!("{}/{}", self.numerator, self.denominator)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoalitionReport {
    pub theories: Vec<String>,
    pub sections: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub consistent: bool,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusInfo {
    pub files: Vec<String>,
    pub theories: Vec<String>,
}

impl CorpusInfo {
    fn text(&self, out: &mut String, mode: &str) {
        let _ = writeln!(out, "corpus: {}", self.files.join(", "));
        let _ = writeln!(out, "theories: {}", self.theories.join(", "));
        let _ = writeln!(out, "mode: {mode}");
    }
}

fn section_lines(out: &mut String, indent: &str, predicate: &str, sections: &[Vec<Value>]) {
    for s in sections {
        let _ = writeln!(out, "{indent}{}", tuple(predicate, s));
    }
}

fn coalition_lines(out: &mut String, predicate: &str, coalitions: &[CoalitionReport]) {
    if coalitions.is_empty() {
        return;
    }
    let _ = writeln!(out, "  coalitions:");
    for c in coalitions {
        let _ = writeln!(out, "    {}", ids(&c.theories));
        section_lines(out, "      ", predicate, &c.sections);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredicateReport {
    pub name: String,
    pub verdict: String,
    pub theories: Vec<String>,
    pub sections: Vec<Vec<Value>>,
    pub witnesses: Vec<Witness>,
    pub degree: DegreeReport,
    pub coalitions: Vec<CoalitionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub corpus: CorpusInfo,
    pub mode: String,
    pub predicates: Vec<PredicateReport>,
    pub aggregate: String,
}

impl CheckReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        self.corpus.text(&mut out, &self.mode);
        for p in &self.predicates {
            let _ = writeln!(out);
            let _ = writeln!(out, "predicate {}: {}", p.name, p.verdict);
            let _ = writeln!(out, "  theories: {}", p.theories.join(", "));
            if !p.sections.is_empty() {
                let _ = writeln!(out, "  sections:");
                section_lines(&mut out, "    ", &p.name, &p.sections);
            }
            if !p.witnesses.is_empty() {
                let _ = writeln!(out, "  witnesses:");
                for w in &p.witnesses {
                    let _ = writeln!(out, "    {}", w.text(&p.name));
                }
            }
            let _ = writeln!(out, "  degree: {}", p.degree.text());
            coalition_lines(&mut out, &p.name, &p.coalitions);
            if let Some(o) = &p.oracle {
                let _ = writeln!(
                    out,
                    "  oracle: {} ({})",
                    if o.consistent { "consistent" } else { "inconsistent" },
                    if o.agrees { "agrees" } else { "DISAGREES" }
                );
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "aggregate: {}", self.aggregate);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionsPredicate {
    pub name: String,
    pub theories: Vec<String>,
    pub sections: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionsReport {
    pub corpus: CorpusInfo,
    pub mode: String,
    pub nodes: Vec<String>,
    pub predicates: Vec<SectionsPredicate>,
}

impl SectionsReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        self.corpus.text(&mut out, &self.mode);
        let _ = writeln!(out, "nodes: {}", ids(&self.nodes));
        for p in &self.predicates {
            let _ = writeln!(out);
            let _ = writeln!(out, "predicate {} over {}:", p.name, ids(&p.theories));
            section_lines(&mut out, "  ", &p.name, &p.sections);
            if let Some(note) = &p.note {
                let _ = writeln!(out, "  {note}");
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconcilePredicate {
    pub name: String,
    pub verdict: String,
    pub dominant: Vec<Vec<Value>>,
    pub coalitions: Vec<CoalitionReport>,
    pub degree: DegreeReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconcileReport {
    pub corpus: CorpusInfo,
    pub mode: String,
    pub predicates: Vec<ReconcilePredicate>,
    pub aggregate: String,
}

impl ReconcileReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        self.corpus.text(&mut out, &self.mode);
        for p in &self.predicates {
            let _ = writeln!(out);
            let _ = writeln!(out, "predicate {}: {}", p.name, p.verdict);
            if p.dominant.is_empty() {
                let _ = writeln!(out, "  dominant: none, no section over all theories");
            } else {
                let _ = writeln!(out, "  dominant:");
            }
            section_lines(&mut out, "    ", &p.name, &p.dominant);
            let _ = writeln!(out, "  degree: {}", p.degree.text());
            coalition_lines(&mut out, &p.name, &p.coalitions);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "aggregate: {}", self.aggregate);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub lower: String,
    pub middle: String,
    pub upper: String,
    pub element: String,
    pub direct: String,
    pub composed: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheafReport {
    pub id: String,
    pub ok: bool,
    pub violations: Vec<ViolationReport>,
    /// Global sections as `(node, element)` pairs; only listed when `ok`.
    pub global_sections: Vec<Vec<(String, String)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub files: Vec<String>,
    pub sheaves: Vec<SheafReport>,
}

impl VerifyReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "corpus: {}", self.files.join(", "));
        for s in &self.sheaves {
            let _ = writeln!(out);
            if s.ok {
                let _ = writeln!(out, "generic_sheaf {}: ok", s.id);
                let _ = writeln!(out, "  global sections: {}", s.global_sections.len());
                for g in &s.global_sections {
                    let parts: Vec<String> = g.iter().map(|(n, e)| format!("{n}: {e}")).collect();
                    let _ = writeln!(out, "    {{{}}}", parts.join(", "));
                }
            } else {
                let _ = writeln!(out, "generic_sheaf {}: violation", s.id);
                for v in &s.violations {
                    let _ = writeln!(
                        out,
                        "  triple ({}, {}, {}) on {}: direct {} but composed {}",
                        v.lower, v.middle, v.upper, v.element, v.direct, v.composed
                    );
                }
            }
        }
        out
    }
}
