#![allow(dead_code)]

use rand::Rng;
use sheafaccord_core::*;

pub fn interval_type(types: &mut TypeTable, name: &str, lo: i64, hi: Option<i64>) -> TypeId {
    types
        .declare(LatticeTypeDecl {
            name: name.into(),
            kind: TypeKind::IntegerInterval { min: Some(lo), max: hi },
            unit: None,
        })
        .unwrap()
}

pub fn finite_type(types: &mut TypeTable, name: &str, elems: &[&str], order: &[(&str, &str)]) -> TypeId {
    let names: Vec<String> = elems.iter().map(|s| s.to_string()).collect();
    let idx = |n: &str| elems.iter().position(|e| *e == n).unwrap();
    let pairs: Vec<(usize, usize)> = order.iter().map(|(a, b)| (idx(a), idx(b))).collect();
    let lattice = FiniteLattice::new(names, &pairs).unwrap();
    types.declare(LatticeTypeDecl { name: name.into(), kind: TypeKind::Finite(lattice), unit: None }).unwrap()
}

pub fn iv(types: &TypeTable, ty: TypeId, lo: i64, hi: i64) -> LatticeValue {
    types.interval(ty, lo, Upper::At(hi)).unwrap()
}

pub fn el(types: &TypeTable, ty: TypeId, name: &str) -> LatticeValue {
    types.element(ty, name).unwrap()
}

pub fn lit(predicate: &str, args: Vec<LatticeValue>, positive: bool) -> Literal {
    Literal { atom: Atom { predicate: predicate.into(), args }, positive }
}

pub fn pos(predicate: &str, args: Vec<LatticeValue>) -> Literal {
    lit(predicate, args, true)
}

pub fn doc(id: &str, clauses: Vec<Clause>) -> TheoryDoc {
    TheoryDoc { id: id.into(), clauses }
}

pub struct Screening {
    pub vocab: Vocabulary,
    pub age: TypeId,
    pub exam: TypeId,
    pub freq: TypeId,
}

/// Age 0..120, exams m and bx (which can happen together), frequencies an and bi.
pub fn screening_vocab() -> Screening {
    let mut types = TypeTable::new();
    let age = interval_type(&mut types, "Age", 0, Some(120));
    let exam = finite_type(&mut types, "Exam", &["m", "bx", "m_bx"], &[("m_bx", "m"), ("m_bx", "bx")]);
    let freq = finite_type(&mut types, "Freq", &["an", "bi"], &[]);
    let mut vocab = Vocabulary::new(types);
    vocab.declare_predicate(PredicateSignature { name: "s".into(), args: vec![age, exam, freq] }).unwrap();
    Screening { vocab, age, exam, freq }
}

impl Screening {
    pub fn atom(&self, lo: i64, hi: i64, exam: &str, freq: &str) -> Literal {
        let t = &self.vocab.types;
        pos("s", vec![iv(t, self.age, lo, hi), el(t, self.exam, exam), el(t, self.freq, freq)])
    }

    pub fn boxed(&self, lo: i64, hi: i64, exam: &str, freq: &str, truth: Truth) -> ConstraintBox {
        let t = &self.vocab.types;
        ConstraintBox {
            predicate: "s".into(),
            generator: vec![iv(t, self.age, lo, hi), el(t, self.exam, exam), el(t, self.freq, freq)],
            truth,
        }
    }

    pub fn t_a(&self) -> TheoryDoc {
        doc("a", vec![vec![self.atom(50, 74, "m", "an")], vec![self.atom(50, 74, "bx", "an")]])
    }

    pub fn t_b(&self) -> TheoryDoc {
        doc("b", vec![vec![self.atom(50, 74, "m", "bi")]])
    }

    pub fn t_c(&self) -> TheoryDoc {
        doc(
            "c",
            vec![
                vec![self.atom(50, 54, "m", "an")],
                vec![self.atom(55, 74, "m", "bi"), self.atom(55, 74, "m", "an")],
            ],
        )
    }

    pub fn corpus(&self, docs: Vec<TheoryDoc>) -> Corpus {
        let mut c = Corpus::new(self.vocab.clone());
        for d in docs {
            c.add_theory(d).unwrap();
        }
        c
    }
}

pub struct Negation {
    pub vocab: Vocabulary,
    pub age: TypeId,
    pub exam: TypeId,
}

/// `s(Age, Exam)` with Age 0..120 and the antichain {m, bx}.
pub fn negation_vocab() -> Negation {
    let mut types = TypeTable::new();
    let age = interval_type(&mut types, "Age", 0, Some(120));
    let exam = finite_type(&mut types, "Exam", &["m", "bx"], &[]);
    let mut vocab = Vocabulary::new(types);
    vocab.declare_predicate(PredicateSignature { name: "s".into(), args: vec![age, exam] }).unwrap();
    Negation { vocab, age, exam }
}

impl Negation {
    pub fn atom(&self, lo: i64, hi: i64, exam: &str, positive: bool) -> Literal {
        let t = &self.vocab.types;
        lit("s", vec![iv(t, self.age, lo, hi), el(t, self.exam, exam)], positive)
    }

    pub fn corpus(&self) -> Corpus {
        let mut c = Corpus::new(self.vocab.clone());
        c.add_theory(doc("o", vec![vec![self.atom(50, 74, "m", true)]])).unwrap();
        c.add_theory(doc("o2", vec![vec![self.atom(55, 74, "m", false)]])).unwrap();
        c
    }
}

/// A random meet-semilattice on 1..=4 elements, retried until valid.
fn random_lattice(rng: &mut impl Rng) -> FiniteLattice {
    loop {
        let n = rng.gen_range(1..=4usize);
        let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.gen_bool(0.3) {
                    pairs.push((a, b));
                }
            }
        }
        if let Ok(l) = FiniteLattice::new(names, &pairs) {
            return l;
        }
    }
}

/// Random corpus within the oracle's reach: up to 4 theories, predicates
/// `p(Num, Fin)` and `q(Num)`, endpoints in 0..12, at most one disjunction and
/// at most one negation per theory.
pub fn random_corpus(rng: &mut impl Rng) -> Corpus {
    let mut types = TypeTable::new();
    let num = interval_type(&mut types, "Num", 0, Some(12));
    let lattice = random_lattice(rng);
    let size = lattice.len();
    let fin = types.declare(LatticeTypeDecl { name: "Fin".into(), kind: TypeKind::Finite(lattice), unit: None }).unwrap();
    let mut vocab = Vocabulary::new(types);
    vocab.declare_predicate(PredicateSignature { name: "p".into(), args: vec![num, fin] }).unwrap();
    vocab.declare_predicate(PredicateSignature { name: "q".into(), args: vec![num] }).unwrap();
    let use_q = rng.gen_bool(0.5);

    loop {
        let mut corpus = Corpus::new(vocab.clone());
        let theories = rng.gen_range(1..=4);
        for t in 0..theories {
            let clauses = rng.gen_range(1..=3);
            let disjunction = if rng.gen_bool(0.5) { Some(rng.gen_range(0..clauses)) } else { None };
            let mut negated = rng.gen_bool(0.5);
            let mut body = Vec::new();
            for c in 0..clauses {
                let width = if disjunction == Some(c) { 2 } else { 1 };
                let mut clause = Vec::new();
                for _ in 0..width {
                    let positive = if negated && rng.gen_bool(0.5) {
                        negated = false;
                        false
                    } else {
                        true
                    };
                    let lo = rng.gen_range(0..=12);
                    let hi = rng.gen_range(lo..=12);
                    let types = &vocab.types;
                    let n = types.interval(num, lo, Upper::At(hi)).unwrap();
                    let l = if use_q && rng.gen_bool(0.3) {
                        lit("q", vec![n], positive)
                    } else {
                        let e = rng.gen_range(0..size) as u16;
                        lit("p", vec![n, LatticeValue { ty: fin, payload: Payload::Element(e) }], positive)
                    };
                    clause.push(l);
                }
                body.push(clause);
            }
            corpus.add_theory(doc(&format!("t{t}"), body)).unwrap();
        }
        if corpus.theories().iter().all(|d| expand_models(d, DEFAULT_MODEL_CAP).is_ok()) {
            return corpus;
        }
    }
}

/// Every ground model combination of a corpus, restricted to the theories in `docs`.
pub fn model_combinations(corpus: &Corpus, docs: &[usize]) -> Vec<Vec<GroundTheory>> {
    let models: Vec<Vec<GroundTheory>> =
        docs.iter().map(|&d| expand_models(&corpus.theories()[d], DEFAULT_MODEL_CAP).unwrap()).collect();
    let mut out = vec![Vec::new()];
    for ms in models {
        let mut next = Vec::new();
        for prefix in &out {
            for m in &ms {
                let mut v = prefix.clone();
                v.push(m.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Every ground argument tuple of a predicate.
pub fn all_points(vocab: &Vocabulary, predicate: &str) -> Vec<Vec<LatticeValue>> {
    let mut tuples: Vec<Vec<LatticeValue>> = vec![Vec::new()];
    for &ty in &vocab.signature(predicate).args {
        let pts = vocab.types.points(ty).unwrap();
        tuples = tuples
            .iter()
            .flat_map(|t| pts.iter().map(move |p| { let mut v = t.clone(); v.push(*p); v }))
            .collect();
    }
    tuples
}

/// Ground points below a box, with its truth when that is T or F.
pub fn box_points(vocab: &Vocabulary, b: &ConstraintBox) -> Vec<GroundTuple> {
    let sig = vocab.signature(&b.predicate);
    let mut tuples: Vec<Vec<LatticeValue>> = vec![Vec::new()];
    for (slot, &ty) in sig.args.iter().enumerate() {
        let mut next = Vec::new();
        for t in &tuples {
            for p in vocab.types.points(ty).unwrap() {
                if vocab.types.leq(&p, &b.generator[slot]).unwrap() {
                    let mut v = t.clone();
                    v.push(p);
                    next.push(v);
                }
            }
        }
        tuples = next;
    }
    let truths: Vec<Truth> = [Truth::T, Truth::F].into_iter().filter(|t| t.leq(b.truth)).collect();
    let mut out = Vec::new();
    for values in tuples {
        for &truth in &truths {
            out.push(GroundTuple { predicate: b.predicate.clone(), values: values.clone(), truth });
        }
    }
    out
}
