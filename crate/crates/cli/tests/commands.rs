use std::path::PathBuf;
use std::process::Command;

use sheafaccord::report::{CheckReport, ReconcileReport, SectionsReport, ValuePayload, VerifyReport};
use sheafaccord::*;
use sheafaccord_core::Mode;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn config(names: &[&str]) -> RunConfig {
    RunConfig::new(names.iter().map(|n| fixture(n)).collect())
}

fn json(mut c: RunConfig) -> RunConfig {
    c.format = Format::Json;
    c
}

#[test]
fn exit_codes_follow_the_aggregate() {
    assert_eq!(cmd_check(&config(&["screening.sa"])).code, 20);
    assert_eq!(cmd_check(&config(&["exercise.sa"])).code, 10);
    assert_eq!(cmd_check(&config(&["single.sa"])).code, 0);
    assert_eq!(cmd_check(&config(&["identical.sa"])).code, 0);
    assert_eq!(cmd_check(&config(&["negation.sa"])).code, 20);
    let mut permissive = config(&["negation.sa"]);
    permissive.mode = Mode::Permissive;
    assert_eq!(cmd_check(&permissive).code, 10);
    // Several files form one corpus; the worst verdict wins.
    assert_eq!(cmd_check(&config(&["exercise.sa", "single.sa"])).code, 10);
    assert_eq!(cmd_reconcile(&config(&["screening.sa"])).code, 20);
    assert_eq!(cmd_reconcile(&config(&["exercise.sa"])).code, 10);
}

#[test]
fn predicate_filter_narrows_the_aggregate() {
    let mut c = config(&["exercise.sa", "single.sa"]);
    c.predicate = Some("s".into());
    let out = cmd_check(&c);
    assert_eq!(out.code, 0);
    assert!(!out.stdout.contains("predicate exercise"));
    c.predicate = Some("nope".into());
    let out = cmd_check(&c);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("nope"));
}

#[test]
fn errors_exit_one_with_a_location() {
    let out = cmd_check(&config(&["parse_error.sa"]));
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("parse_error.sa:4:27: error:"), "{}", out.stderr);
    let out = cmd_verify_sheaf(&config(&["empty_sheaf.sa"]));
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("empty_sheaf.sa:1:1"));
    assert_eq!(cmd_verify_sheaf(&config(&["screening.sa"])).code, 1);
    assert_eq!(cmd_check(&config(&["missing.sa"])).code, 1);
    let mut c = config(&["screening.sa"]);
    c.model_cap = 1;
    let out = cmd_check(&c);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("cap of 1"));
    assert_eq!(cmd_sections(&config(&["screening.sa"]), Some(&["zz".to_string()])).code, 1);
}

#[test]
fn sections_over_subsets() {
    let c = config(&["screening.sa"]);
    let nodes = |ns: &[&str]| ns.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let r = sections_report(&c, Some(&nodes(&["a", "c"]))).unwrap();
    assert_eq!(r.predicates[0].sections.len(), 2);
    assert_eq!(r.predicates[0].note, None);
    let r = sections_report(&c, Some(&nodes(&["a"]))).unwrap();
    assert_eq!(r.predicates[0].sections.len(), 1);
    assert_eq!(r.predicates[0].sections[0][1].payload, ValuePayload::Element("m_bx".into()));
    let r = sections_report(&c, Some(&nodes(&["b", "a"]))).unwrap();
    assert_eq!(r.nodes, nodes(&["a", "b"]));
    assert!(r.predicates[0].sections.is_empty());
    assert_eq!(r.predicates[0].note.as_deref(), Some("no section"));
    let out = cmd_sections(&c, Some(&nodes(&["a", "b"])));
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("no section"));
    // Predicates outside the selection are reported as such.
    let both = config(&["screening.sa", "exercise.sa"]);
    let r = sections_report(&both, Some(&nodes(&["aha"]))).unwrap();
    let s = r.predicates.iter().find(|p| p.name == "s").unwrap();
    assert!(s.theories.is_empty());
    assert!(s.note.as_deref().unwrap().contains("not constrained"));
}

#[test]
fn reconcile_reports() {
    let r = reconcile_report(&config(&["screening.sa"])).unwrap();
    let s = &r.predicates[0];
    assert!(s.dominant.is_empty());
    let names: Vec<Vec<String>> = s.coalitions.iter().map(|c| c.theories.clone()).collect();
    assert_eq!(names, vec![vec!["a".to_string(), "c".to_string()], vec!["b".to_string(), "c".to_string()]]);
    assert_eq!((s.degree.numerator, s.degree.denominator), (1, 3));

    let r = reconcile_report(&config(&["identical.sa"])).unwrap();
    assert_eq!(r.aggregate, "Agreement");
    assert_eq!(r.predicates[0].dominant.len(), 1);
    assert_eq!(r.predicates[0].dominant[0][0].payload, ValuePayload::Interval { lo: 50, hi: Some(74) });
}

#[test]
fn verify_sheaf_reports() {
    let out = cmd_verify_sheaf(&config(&["numbers.sa"]));
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("{0: {0}, 1: {1}, 2: {2}, 3: {3}}"));
    let out = cmd_verify_sheaf(&config(&["numbers_plus_one.sa"]));
    assert_eq!(out.code, 20);
    assert!(out.stdout.contains("triple (1, 2, 3) on {1}: direct {2} but composed {3}"));
    // One failing block fails the run.
    assert_eq!(cmd_verify_sheaf(&config(&["numbers.sa", "numbers_plus_one.sa"])).code, 20);
}

#[test]
fn truth_column_only_when_needed() {
    let r = check_report(&config(&["single.sa"])).unwrap();
    assert_eq!(r.predicates[0].sections[0].len(), 2);
    let mut c = config(&["single.sa"]);
    c.mode = Mode::Permissive;
    let r = check_report(&c).unwrap();
    assert_eq!(r.predicates[0].sections[0].len(), 3);
    assert_eq!(r.predicates[0].sections[0][2].ty, "truth");
    let r = check_report(&config(&["negation.sa"])).unwrap();
    assert_eq!(r.predicates[0].coalitions[0].sections[0].len(), 3);
}

#[test]
fn oracle_cross_check() {
    for (f, mode) in [("screening.sa", Mode::Strict), ("negation.sa", Mode::Permissive), ("single.sa", Mode::Strict)] {
        let mut c = config(&[f]);
        c.mode = mode;
        c.oracle = true;
        let r = check_report(&c).unwrap();
        assert!(r.predicates.iter().all(|p| p.oracle.as_ref().unwrap().agrees));
    }
    // The daily type is unbounded, so its ground universe cannot be enumerated.
    let mut c = config(&["exercise.sa"]);
    c.oracle = true;
    let out = cmd_check(&c);
    assert_eq!(out.code, 10, "{}", out.stderr);
}

/// JSON parses back into the same report, and text rendered from the parsed
/// report matches the text command output byte for byte.
#[test]
fn json_and_text_round_trip() {
    for files in [&["screening.sa"][..], &["negation.sa"], &["exercise.sa"], &["single.sa", "exercise.sa"]] {
        for mode in [Mode::Strict, Mode::Permissive] {
            let mut c = config(files);
            c.mode = mode;
            if mode == Mode::Permissive && files.contains(&"exercise.sa") {
                continue;
            }
            let text = cmd_check(&c);
            let js = cmd_check(&json(c.clone()));
            assert_eq!(text.code, js.code);
            let parsed: CheckReport = serde_json::from_str(&js.stdout).unwrap();
            assert_eq!(parsed, check_report(&c).unwrap());
            assert_eq!(parsed.text(), text.stdout);

            let parsed: ReconcileReport = serde_json::from_str(&cmd_reconcile(&json(c.clone())).stdout).unwrap();
            assert_eq!(parsed.text(), cmd_reconcile(&c).stdout);
            let parsed: SectionsReport = serde_json::from_str(&cmd_sections(&json(c.clone()), None).stdout).unwrap();
            assert_eq!(parsed.text(), cmd_sections(&c, None).stdout);
        }
    }
    let c = config(&["numbers_plus_one.sa"]);
    let parsed: VerifyReport = serde_json::from_str(&cmd_verify_sheaf(&json(c.clone())).stdout).unwrap();
    assert_eq!(parsed.text(), cmd_verify_sheaf(&c).stdout);
}

#[test]
fn json_schema_fields() {
    let out = cmd_check(&json(config(&["screening.sa"])));
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    for key in ["corpus", "mode", "predicates", "aggregate"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let p = &v["predicates"][0];
    for key in ["name", "verdict", "sections", "witnesses", "degree", "coalitions"] {
        assert!(p.get(key).is_some(), "{key}");
    }
    let w = &p["witnesses"][0];
    assert_eq!(w["slot"]["label"], "Freq");
    assert_eq!(w["values"][0], serde_json::json!({"type": "Freq", "payload": {"element": "an"}}));
    assert_eq!(w["values"][1]["payload"]["element"], "bi");
    assert_eq!(p["coalitions"][0]["sections"][0][0]["payload"]["interval"], serde_json::json!({"lo": 50, "hi": 54}));
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sheafaccord"))
}

#[test]
fn binary_exit_codes_and_streams() {
    let out = bin().arg("check").arg(fixture("screening.sa")).output().unwrap();
    assert_eq!(out.status.code(), Some(20));
    assert!(String::from_utf8(out.stdout).unwrap().contains("an vs bi"));
    assert!(out.stderr.is_empty());
    let out = bin().arg("check").arg(fixture("parse_error.sa")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8(out.stderr).unwrap().contains(":4:27: error:"));
    let out = bin().args(["sections", "--nodes", "a,c"]).arg(fixture("screening.sa")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().matches("s([5").count(), 2);
    let out = bin().arg("verify-sheaf").arg(fixture("numbers_plus_one.sa")).output().unwrap();
    assert_eq!(out.status.code(), Some(20));
    let out = bin().arg("check").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn model_cap_env_and_flag() {
    let out = bin().env("SHEAFACCORD_MODEL_CAP", "1").arg("check").arg(fixture("screening.sa")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // The flag wins over the environment.
    let out = bin()
        .env("SHEAFACCORD_MODEL_CAP", "1")
        .args(["check", "--model-cap", "8"])
        .arg(fixture("screening.sa"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(20));
    let out = bin().env("SHEAFACCORD_MODEL_CAP", "0").arg("check").arg(fixture("screening.sa")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
