mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use sheafaccord_core::sheaf::{agnostic_region, build_poset};
use sheafaccord_core::*;

fn set_name(s: &[i64]) -> String {
    let inner: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Subsets of `0..=n` made only of evens or only of odds, non-empty.
fn parity_sets(n: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for parity in [1, 0] {
        let pool: Vec<i64> = (0..=n).filter(|x| x % 2 == parity).collect();
        for mask in 1u32..(1 << pool.len()) {
            out.push(pool.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &x)| x).collect());
        }
    }
    out
}

/// The chain 0 < 1 < 2 < 3 with parity stalks; `shift(x, y)` is added along `x ≤ y`.
fn numbers_sheaf(shift: impl Fn(i64, i64) -> i64) -> GenericSheafSpec {
    let nodes: Vec<String> = (0..4).map(|i| i.to_string()).collect();
    let mut order = Vec::new();
    let mut stalks = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for x in 0..4i64 {
        stalks.insert(x.to_string(), parity_sets(x).iter().map(|s| set_name(s)).collect());
        for y in (x + 1)..4 {
            order.push((x.to_string(), y.to_string()));
            let table = parity_sets(x)
                .iter()
                .map(|s| {
                    let moved: Vec<i64> = s.iter().map(|v| v + shift(x, y)).collect();
                    (set_name(s), set_name(&moved))
                })
                .collect();
            maps.insert((x.to_string(), y.to_string()), table);
        }
    }
    GenericSheafSpec::new("numbers", nodes, &order, stalks, maps).unwrap()
}

#[test]
fn parity_stalk_sizes() {
    assert_eq!(parity_sets(3).len(), 6);
    assert_eq!(parity_sets(2).len(), 4);
    assert_eq!(parity_sets(0), vec![vec![0]]);
}

#[test]
fn shift_sheaf_has_one_global_section() {
    let spec = numbers_sheaf(|x, y| y - x);
    assert!(verify_axioms(&spec).unwrap().is_ok());
    let all: Vec<usize> = (0..4).collect();
    let sections = enumerate_sections(&spec, &all).unwrap();
    let expected = GenericSection {
        assignment: vec![("0".into(), "{0}".into()), ("1".into(), "{1}".into()), ("2".into(), "{2}".into()), ("3".into(), "{3}".into())],
    };
    assert_eq!(sections, vec![expected]);
    assert_eq!(oracle_sections(&spec, &all).unwrap(), sections);
    assert_eq!(enumerate_sections(&spec, &[0]).unwrap().len(), 1);
    // Every element of S(2) extends uniquely to node 3.
    assert_eq!(enumerate_sections(&spec, &[2, 3]).unwrap().len(), 4);
    assert_eq!(oracle_sections(&spec, &[2, 3]).unwrap().len(), 4);
}

#[test]
fn constant_shift_is_not_a_sheaf() {
    let spec = numbers_sheaf(|_, _| 1);
    let report = verify_axioms(&spec).unwrap();
    assert!(!report.is_ok());
    let v = report.violations.iter().find(|v| (v.lower.as_str(), v.middle.as_str(), v.upper.as_str()) == ("1", "2", "3")).unwrap();
    assert_eq!(v.element, "{1}");
    assert_eq!((v.direct.as_str(), v.composed.as_str()), ("{2}", "{3}"));
}

#[test]
fn single_node_spec_is_fine() {
    let stalks = BTreeMap::from([("x".to_string(), vec!["a".to_string(), "b".to_string()])]);
    let spec = GenericSheafSpec::new("one", vec!["x".into()], &[], stalks, BTreeMap::new()).unwrap();
    assert!(verify_axioms(&spec).unwrap().is_ok());
    assert_eq!(enumerate_sections(&spec, &[0]).unwrap().len(), 2);
}

#[test]
fn generic_oracle_examples() {
    let mut stalks = BTreeMap::new();
    stalks.insert("x".to_string(), vec!["a".to_string(), "b".to_string()]);
    stalks.insert("y".to_string(), vec!["c".to_string(), "d".to_string(), "e".to_string()]);
    let spec = GenericSheafSpec::new("pair", vec!["x".into(), "y".into()], &[], stalks.clone(), BTreeMap::new()).unwrap();
    assert_eq!(oracle_sections(&spec, &[0, 1]).unwrap().len(), 6);
    stalks.insert("y".to_string(), Vec::new());
    let empty = GenericSheafSpec::new("pair", vec!["x".into(), "y".into()], &[], stalks, BTreeMap::new()).unwrap();
    assert!(oracle_sections(&empty, &[0, 1]).unwrap().is_empty());
}

#[test]
fn malformed_specs_are_rejected() {
    assert!(GenericSheafSpec::new("e", vec![], &[], BTreeMap::new(), BTreeMap::new()).is_err());
    let cyc = [("a".to_string(), "b".to_string()), ("b".to_string(), "a".to_string())];
    assert!(GenericSheafSpec::new("c", vec!["a".into(), "b".into()], &cyc, BTreeMap::new(), BTreeMap::new()).is_err());
    let stalks = BTreeMap::from([("a".to_string(), vec!["1".to_string()]), ("b".to_string(), vec!["1".to_string()])]);
    let spec = GenericSheafSpec::new("m", vec!["a".into(), "b".into()], &cyc[..1], stalks, BTreeMap::new()).unwrap();
    assert!(matches!(verify_axioms(&spec), Err(SheafError::MissingMap { .. })));
}

fn arb_spec() -> impl Strategy<Value = (GenericSheafSpec, Vec<usize>)> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let pairs = prop::collection::vec(any::<bool>(), n * n);
            let sizes = prop::collection::vec(0usize..=3, n);
            let images = prop::collection::vec(0usize..3, n * n * 3);
            let domain = prop::collection::vec(any::<bool>(), n);
            (Just(n), pairs, sizes, images, domain)
        })
        .prop_map(|(n, pairs, sizes, images, domain)| {
            let nodes: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
            let mut order = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    if pairs[a * n + b] {
                        order.push((nodes[a].clone(), nodes[b].clone()));
                    }
                }
            }
            // Close the order so maps exist on every comparable pair.
            let mut leq = vec![vec![false; n]; n];
            for (a, b) in &order {
                leq[nodes.iter().position(|x| x == a).unwrap()][nodes.iter().position(|x| x == b).unwrap()] = true;
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if leq[i][k] && leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
            let stalk = |i: usize| (0..sizes[i]).map(|e| format!("e{e}")).collect::<Vec<_>>();
            let stalks: BTreeMap<String, Vec<String>> = (0..n).map(|i| (nodes[i].clone(), stalk(i))).collect();
            let mut maps = BTreeMap::new();
            for a in 0..n {
                for b in 0..n {
                    if a != b && leq[a][b] && sizes[b] > 0 {
                        let table = (0..sizes[a])
                            .map(|e| (format!("e{e}"), format!("e{}", images[(a * n + b) * 3 + e] % sizes[b])))
                            .collect();
                        maps.insert((nodes[a].clone(), nodes[b].clone()), table);
                    }
                }
            }
            // A source with elements over an empty target cannot map; drop such stalks.
            let mut stalks = stalks;
            for a in 0..n {
                for b in 0..n {
                    if a != b && leq[a][b] && sizes[b] == 0 {
                        stalks.insert(nodes[a].clone(), Vec::new());
                    }
                }
            }
            let domain: Vec<usize> = (0..n).filter(|&i| domain[i]).collect();
            (GenericSheafSpec::new("r", nodes, &order, stalks, maps).unwrap(), domain)
        })
}

proptest! {
    #[test]
    fn enumeration_matches_cartesian_oracle((spec, domain) in arb_spec()) {
        prop_assert_eq!(enumerate_sections(&spec, &domain).unwrap(), oracle_sections(&spec, &domain).unwrap());
    }
}

#[test]
fn poset_shapes() {
    let s = screening_vocab();
    let ground: Vec<GroundTheory> = [s.t_a(), s.t_b(), s.t_c()]
        .iter()
        .map(|d| expand_models(d, DEFAULT_MODEL_CAP).unwrap().remove(0))
        .collect();
    let poset = build_poset(&ground).unwrap();
    assert_eq!(poset.nodes().len(), 7);
    assert_eq!(poset.hasse_edges().len(), 9);
    let a = poset.index_of(&[0]).unwrap();
    let ab = poset.index_of(&[0, 1]).unwrap();
    let abc = poset.index_of(&[0, 1, 2]).unwrap();
    assert!(poset.leq(a, ab) && poset.leq(ab, abc) && !poset.leq(abc, a));

    let mut types = TypeTable::new();
    let n = interval_type(&mut types, "N", 0, Some(5));
    let mut vocab = Vocabulary::new(types);
    vocab.declare_predicate(PredicateSignature { name: "p".into(), args: vec![n] }).unwrap();
    vocab.declare_predicate(PredicateSignature { name: "q".into(), args: vec![n] }).unwrap();
    let p = GroundTheory::new("x", [pos("p", vec![iv(&vocab.types, n, 1, 2)])]);
    let q = GroundTheory::new("y", [pos("q", vec![iv(&vocab.types, n, 1, 2)])]);
    assert_eq!(build_poset(&[p.clone(), q]).unwrap().nodes().len(), 2);
    assert_eq!(build_poset(&[p]).unwrap().nodes().len(), 1);
}

#[test]
fn screening_local_sections() {
    let s = screening_vocab();
    let corpus = s.corpus(vec![s.t_a(), s.t_b(), s.t_c()]);
    let an = Analysis::new(&corpus, Mode::Strict).unwrap();
    assert_eq!(
        an.sections(&[0, 2], "s").unwrap(),
        vec![s.boxed(50, 54, "m_bx", "an", Truth::T), s.boxed(55, 74, "m_bx", "an", Truth::T)]
    );
    assert_eq!(an.sections(&[1, 2], "s").unwrap(), vec![s.boxed(55, 74, "m", "bi", Truth::T)]);
    assert!(an.sections(&[0, 1], "s").unwrap().is_empty());
    assert!(an.sections(&[0, 1, 2], "s").unwrap().is_empty());

    // The same tuples through an explicit sheaf over one model combination.
    let c_models = expand_models(&s.t_c(), DEFAULT_MODEL_CAP).unwrap();
    for c in &c_models {
        let ground = vec![
            expand_models(&s.t_a(), DEFAULT_MODEL_CAP).unwrap().remove(0),
            expand_models(&s.t_b(), DEFAULT_MODEL_CAP).unwrap().remove(0),
            c.clone(),
        ];
        let sheaf = Sheaf::build(&s.vocab, &ground, Mode::Strict).unwrap();
        for tuple in sheaf.maximal_sections(&[0, 2], "s").unwrap() {
            assert!(sheaf.is_section(&sheaf.section_on(&[0, 2], &tuple)).unwrap());
        }
    }
}

#[test]
fn one_proposition_theories() {
    let mut types = TypeTable::new();
    let m = interval_type(&mut types, "Minutes", 0, Some(500));
    let mut vocab = Vocabulary::new(types);
    vocab.declare_predicate(PredicateSignature { name: "p".into(), args: vec![m] }).unwrap();
    let t = vocab.types.clone();
    let mut corpus = Corpus::new(vocab);
    corpus.add_theory(doc("o", vec![vec![pos("p", vec![iv(&t, m, 150, 300)])]])).unwrap();
    corpus.add_theory(doc("o2", vec![vec![pos("p", vec![iv(&t, m, 210, 400)])]])).unwrap();
    let an = Analysis::new(&corpus, Mode::Strict).unwrap();
    let boxed = ConstraintBox { predicate: "p".into(), generator: vec![iv(&t, m, 210, 300)], truth: Truth::T };
    assert_eq!(an.sections(&[0, 1], "p").unwrap(), vec![boxed]);
}

#[test]
fn negation_stalks() {
    let n = negation_vocab();
    let corpus = n.corpus();
    let t = &n.vocab.types;
    let neg = expand_models(&corpus.theories()[1], DEFAULT_MODEL_CAP).unwrap().remove(0);
    let strict = TheoryStalk::build(&n.vocab, &neg, Mode::Strict).unwrap();
    let boxed = |lo, hi, e, truth| ConstraintBox {
        predicate: "s".into(),
        generator: vec![iv(t, n.age, lo, hi), el(t, n.exam, e)],
        truth,
    };
    assert_eq!(strict.canonical["s"], vec![boxed(55, 74, "m", Truth::F)]);
    assert!(strict.agnostic.is_empty());
    assert!(strict.contains(&n.vocab, &boxed(60, 70, "m", Truth::F), Mode::Strict).unwrap());
    assert!(!strict.contains(&n.vocab, &boxed(50, 54, "m", Truth::T), Mode::Strict).unwrap());

    let permissive = TheoryStalk::build(&n.vocab, &neg, Mode::Permissive).unwrap();
    let region = &permissive.agnostic["s"];
    assert!(region.contains(&boxed(0, 54, "m", Truth::U)));
    assert!(region.contains(&boxed(75, 120, "m", Truth::U)));
    for truth in [Truth::T, Truth::F, Truth::U] {
        assert!(permissive.contains(&n.vocab, &boxed(50, 54, "m", truth), Mode::Permissive).unwrap());
    }
}

/// The agnostic region covers exactly the points outside every constrained box.
#[test]
fn agnostic_region_is_the_exact_complement() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let n = negation_vocab();
    let neg = expand_models(&n.corpus().theories()[1], DEFAULT_MODEL_CAP).unwrap().remove(0);
    let mut cases = vec![(n.vocab.clone(), neg, "s".to_string())];
    for _ in 0..100 {
        let corpus = random_corpus(&mut rng);
        for d in corpus.theories() {
            for g in expand_models(d, DEFAULT_MODEL_CAP).unwrap() {
                for p in ["p", "q"] {
                    cases.push((corpus.vocab.clone(), g.clone(), p.to_string()));
                }
            }
        }
    }
    for (vocab, g, p) in cases {
        let region = agnostic_region(&vocab, &g, &p).unwrap();
        let constrained: Vec<ConstraintBox> = combine_boxes(&vocab, &g).unwrap().get(&p).cloned().unwrap_or_default();
        for pt in all_points(&vocab, &p) {
            let inside = |b: &ConstraintBox| pt.iter().zip(&b.generator).all(|(x, a)| vocab.types.leq(x, a).unwrap());
            assert_eq!(region.iter().any(inside), !constrained.iter().any(inside), "{p} at {pt:?}");
        }
    }
}
