use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;
use tricore::abgroup::FgAbelianGroup;
use tricore::cli::{run, Outcome, RunManifest};
use tricore::json::{self, complex_from_json, complex_to_json, ComplexJson};
use tricore::les::{Family, PoincareFacts, TrianglePuzzle};
use tricore::exactlin::LaurentPoly;
use tricore::chain::{ChainComplex, Grading};
use tricore::lin::{generate_valid_instance, inject_fault, Fault, InstanceParams};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn tricore(args: &[&str]) -> Outcome {
    let argv = std::iter::once("tricore").chain(args.iter().copied());
    run(argv, &mut std::io::empty())
}

fn with_stdin(args: &[&str], input: &str) -> Outcome {
    let argv = std::iter::once("tricore").chain(args.iter().copied());
    run(argv, &mut input.as_bytes())
}

fn ok_json(o: &Outcome) -> Value {
    assert_eq!(o.code, 0, "stderr: {}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

fn assert_canonical(text: &str) {
    let v: Value = serde_json::from_str(text).unwrap();
    assert_eq!(json::canonical(&v).unwrap() + "\n", text);
}

#[test]
fn poincare_with_facts_file() {
    let t = Instant::now();
    let o = tricore(&["poincare", &data("poincare_facts.json")]);
    assert!(t.elapsed().as_secs_f64() < 1.0);
    let v = ok_json(&o);
    assert_eq!(
        v["summary"],
        "I^#(P;Z) = (Z)_(0) + (G)_(1), G a nontrivial 2-group; not an F_2 L-space"
    );
    assert_eq!(v["a3_text"], "(Z^3)_(0) + (K)_(1)");
    assert!(v["trace_text"].as_str().unwrap().contains("[NonSplitDetect]"));
    // the file is the built-in default
    let facts: PoincareFacts = serde_json::from_str(&std::fs::read_to_string(data("poincare_facts.json")).unwrap()).unwrap();
    assert_eq!(facts, PoincareFacts::standard());
    assert_eq!(tricore(&["poincare"]).stdout, o.stdout);
}

#[test]
fn snf_two_by_two() {
    let v = ok_json(&tricore(&["snf", &data("snf_2x2.json")]));
    assert_eq!(v["diagonal"], json!([2, 4]));
    assert_eq!(v["d"], json!({"rows": 2, "cols": 2, "entries": [[2, 0], [0, 4]]}));
    assert_eq!(v["cokernel"], json!({"rank": 0, "torsion": [2, 4]}));
    // D is its own Smith form
    let again = ok_json(&with_stdin(&["snf", "-"], &v["d"].to_string()));
    assert_eq!(again["d"], v["d"]);
}

#[test]
fn snf_big_entries_are_strings() {
    let big = "123456789012345678901234567890";
    let input = json!({"rows": 2, "cols": 1, "entries": [[big], ["0"]]}).to_string();
    let v = ok_json(&with_stdin(&["snf"], &input));
    assert_eq!(v["diagonal"], json!([big]));
    // coker of ℤ → ℤ², 1 ↦ (N, 0)
    assert_eq!(v["cokernel"], json!({"rank": 1, "torsion": [big]}));
}

#[test]
fn moduli_problems() {
    let v = ok_json(&tricore(&["moduli", &data("moduli_shifted.json")]));
    assert_eq!(v["count"], 1);
    assert_eq!(v["solutions"], json!([[1, 0]]));
    let w = ok_json(&tricore(&["moduli", &data("moduli_unshifted.json")]));
    assert_eq!(w["solutions"], json!([[0, 0]]));
    // the echoed problem is valid input
    let again = ok_json(&with_stdin(&["moduli"], &v["problem"].to_string()));
    assert_eq!(again, v);
    let census = ok_json(&with_stdin(&["moduli"], r#"{"kappa": "1/8"}"#));
    assert_eq!(census["perfect"], true);
    assert_eq!(census["shifted"][0]["k"], "1/2");
    assert_eq!(census["shifted"][0]["l"], "-1");
}

#[test]
fn homology_and_cone_round_trip() {
    let v = ok_json(&tricore(&["homology", &data("rp2.json"), "--prime", "2", "--modulus", "2"]));
    assert_eq!(v["groups"]["1"], json!({"rank": 0, "torsion": [2]}));
    assert!(v["groups"].get("2").is_none());
    assert_eq!(v["dims"], json!({"0": 1, "1": 1, "2": 1}));
    assert_eq!(v["graded"], json!({"mod": 2, "components": {"0": {"rank": 1, "torsion": []}, "1": {"rank": 0, "torsion": [2]}}}));

    let c = ok_json(&tricore(&["cone", &data("cone_identity.json")]));
    assert_eq!(c["quasi_iso"], true);
    let h = ok_json(&with_stdin(&["homology"], &c["cone"].to_string()));
    assert_eq!(h["groups"], json!({}));
}

#[test]
fn spectral_sequence_of_a_filtered_interval() {
    let v = ok_json(&tricore(&["ss", &data("filtered_interval.json"), "--prime", "3"]));
    assert_eq!(v["field"], "F3");
    assert_eq!(v["pages"][0]["dims"], json!([[0, 0, 1]]));
    assert_eq!(v["homology_total"], 1);
    assert_eq!(v["abutment_ok"], true);
    let q = ok_json(&tricore(&["ss", &data("filtered_interval.json")]));
    assert_eq!(q["field"], "Q");
}

#[test]
fn index_requests() {
    let v = ok_json(&tricore(&["index", &data("index_s2xs2.json")]));
    assert_eq!(v, json!({"value": "-6", "integral": true}));
    let r = ok_json(&with_stdin(&["index"], r#"{"op": "rp3", "same_limits": true, "kappa_positive": true, "kappa_max": 4}"#));
    assert_eq!(r["min_index"], 5);
    let c = ok_json(&with_stdin(&["index"], r#"{"op": "charge", "k0": "0", "l0": "0"}"#));
    assert_eq!(c["index"], -1);
    let g = ok_json(&with_stdin(
        &["index"],
        r#"{"op": "glue", "first": 0, "second": -1, "limit": {"name": "u", "h0": 1, "h1": 0}}"#,
    ));
    assert_eq!(g["index"], 0);
    // parity failure is a domain error
    let bad = with_stdin(&["index"], r#"{"op": "cap", "closed": 0, "limit": {"name": "c", "h0": 1, "h1": 0}}"#);
    assert_eq!(bad.code, 1);
}

#[test]
fn triangle_solve_step_one() {
    let facts = PoincareFacts::standard();
    let p = TrianglePuzzle::new(2, Family::concrete(&facts.lens), Family::concrete(&facts.knot), [0, 0, 1])
        .with_rank(0, 3)
        .with_rank(1, 0);
    let input = serde_json::to_string(&p).unwrap();
    let v = ok_json(&with_stdin(&["triangle-solve", "--bound", "4"], &input));
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0]["text"], "(Z^3)_(0) + (K)_(1)");
    assert!(sols[0]["trace_text"].as_str().unwrap().contains("SplitOnFreeQuotient"));
    let members = sols[0]["members"].as_array().unwrap();
    assert!(!members.is_empty());
    for m in members {
        assert_eq!(m["components"]["0"], json!({"rank": 3, "torsion": []}));
        let odd: FgAbelianGroup = serde_json::from_value(m["components"].get("1").cloned().unwrap_or(json!({"rank": 0}))).unwrap();
        assert_eq!(odd.rank(), 0);
    }
}

#[test]
fn lin_check_seeded_and_round_trip() {
    let a = tricore(&["lin-check", "--seed", "7"]);
    let v = ok_json(&a);
    assert_eq!(v["ok"], true);
    assert_eq!(v["delta_quasi_iso"], true);
    assert_eq!(v["six_step"].as_array().unwrap().len(), 2);
    assert!(v["six_step"].as_array().unwrap().iter().all(|t| t["e4_zero"] == true));
    // deterministic
    assert_eq!(tricore(&["lin-check", "--seed", "7"]).stdout, a.stdout);
    assert_canonical(&a.stdout);
    // the emitted instance is valid input and gives the same checks
    let back = ok_json(&with_stdin(&["lin-check", "-"], &v["instance"].to_string()));
    for k in ["hypotheses", "total", "delta_quasi_iso", "six_step", "ok"] {
        assert_eq!(back[k], v[k], "{k}");
    }
}

#[test]
fn lin_check_reports_a_broken_identity() {
    // g₁ ≠ 0 must be caught by the second identity, with its residual
    let fault = Fault::Homotopy(1);
    let bad = (0..50)
        .find_map(|seed| inject_fault(&generate_valid_instance(seed, &InstanceParams::default()).ok()?, fault, seed).ok())
        .unwrap();
    let input = serde_json::to_string(&json::triangle_to_json(&bad)).unwrap();
    let o = with_stdin(&["lin-check", "-"], &input);
    assert_eq!(o.code, 1);
    let r: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(r["passed"], false);
    let failed: Vec<&Value> =
        r["hypotheses"]["outcomes"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    let names: Vec<String> = failed.iter().map(|c| c["check"].to_string()).collect();
    assert_eq!(names, vec![r#"{"Homotopy":1}"#, r#""G1Zero""#]);
    assert!(!failed[0]["residual"].as_object().unwrap().is_empty());
}

#[test]
fn lin_check_certificate_path() {
    let params = InstanceParams { perturb: false, ..InstanceParams::default() };
    let rot = generate_valid_instance(1, &params).unwrap();
    let z = serde_json::to_string(&json::triangle_to_json(&rot)).unwrap();
    let v = ok_json(&with_stdin(&["lin-check", "-", "--certificate", "--seed", "1"], &z));
    assert_eq!(v["mode"], "Certificate");
    assert_eq!(v["passed"], true);
    let pc = &v["pi_certificate"];
    assert_eq!(pc["replayed"], true);
    assert_eq!(pc["at_one"]["commutes"], true);
    assert!(pc["exponent"].as_u64().unwrap() >= 1);

    // same data over ℤ[T, T⁻¹]: acyclicity only by specialization, flagged
    let l = serde_json::to_string(&json::triangle_to_json(&rot.to_laurent().unwrap())).unwrap();
    let w = ok_json(&with_stdin(&["lin-check", "-", "--certificate"], &l));
    assert_eq!(w["ring"], "Z[T,T^-1]");
    assert_eq!(w["total"]["method"], "specialized");
    assert_eq!(w["total"]["at_one"], true);

    // generated F_i are quasi-isomorphisms but not unipotent
    let g = tricore(&["lin-check", "--seed", "1", "--certificate"]);
    assert_eq!(g.code, 1);
    assert!(g.stdout.contains("not nilpotent"));
}

#[test]
fn exit_codes() {
    let o = tricore(&["frobnicate"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("Usage"));
    assert_eq!(with_stdin(&["snf"], "{not json").code, 2);
    assert_eq!(with_stdin(&["snf"], r#"{"rows": 2, "cols": 1, "entries": [[1]]}"#).code, 2);
    assert_eq!(with_stdin(&["index"], r#"{"op": "nope"}"#).code, 2);
    assert_eq!(tricore(&["snf", "/nonexistent/file.json"]).code, 2);
    // a Laurent complex has no integral homology here
    let laurent = r#"{"ring": "Z[T,T^-1]", "ranks": {"0": 1}}"#;
    assert_eq!(with_stdin(&["homology"], laurent).code, 1);
    // not a complex: ∂∂ ≠ 0
    let bad = r#"{"ring": "Z", "ranks": {"0": 1, "1": 1, "2": 1},
        "differentials": {"1": {"rows": 1, "cols": 1, "entries": [[1]]}, "2": {"rows": 1, "cols": 1, "entries": [[1]]}}}"#;
    assert_eq!(with_stdin(&["homology"], bad).code, 1);
    assert_eq!(tricore(&["--help"]).code, 0);
}

#[test]
fn outputs_are_canonical_and_deterministic() {
    let runs: Vec<Vec<String>> = vec![
        vec!["snf".into(), data("snf_2x2.json")],
        vec!["homology".into(), data("rp2.json")],
        vec!["cone".into(), data("cone_identity.json")],
        vec!["ss".into(), data("filtered_interval.json")],
        vec!["poincare".into()],
        vec!["index".into(), data("index_s2xs2.json")],
        vec!["moduli".into(), data("moduli_shifted.json")],
    ];
    for args in runs {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let x = tricore(&a);
        assert_eq!(x.code, 0, "{args:?}: {}", x.stderr);
        assert_canonical(&x.stdout);
        assert_eq!(tricore(&a).stdout, x.stdout, "{args:?}");
    }
}

#[test]
fn manifest_digests_canonical_forms() {
    let dir = std::env::temp_dir().join(format!("tricore-manifest-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.json");
    let p = path.to_string_lossy().into_owned();
    let o = tricore(&["snf", &data("snf_2x2.json"), "--manifest", &p]);
    let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m.command, "snf");
    assert_eq!(m.output_digest, json::sha256_hex(o.stdout.trim_end().as_bytes()));
    // whitespace in the input does not change its digest
    let compact = r#"{"cols":2,"entries":[[2,4],[6,8]],"rows":2}"#;
    assert_eq!(m.input_digest, json::sha256_hex(compact.as_bytes()));
    assert_eq!(m.versions["tricore"], env!("CARGO_PKG_VERSION"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn laurent_complex_json_round_trip() {
    let big = "-99999999999999999999999";
    let text = format!(
        r#"{{"ring": "Z[T,T^-1]", "modulus": 4, "ranks": {{"0": 1, "1": 1}},
            "differentials": {{"1": {{"rows": 1, "cols": 1, "entries": [[{{"-1": "3", "2": "{big}"}}]]}}}}}}"#
    );
    let cj: ComplexJson<_> = serde_json::from_str(&text).unwrap();
    let c: ChainComplex<LaurentPoly> = complex_from_json(&cj).unwrap();
    assert_eq!(c.grading(), Grading::Cyclic(4));
    let d = c.diff(1);
    assert_eq!(d.get(0, 0).coeff(-1), 3.into());
    assert_eq!(d.get(0, 0).coeff(2).to_string(), big);
    let out = json::canonical(&complex_to_json(&c)).unwrap();
    let again: ChainComplex<LaurentPoly> = complex_from_json(&serde_json::from_str(&out).unwrap()).unwrap();
    assert_eq!(again, c);
    assert!(out.contains(&format!(r#""2":"{big}""#)));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tricore");
    let ok = Command::new(bin).args(["snf", &data("snf_2x2.json")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["diagonal"], json!([2, 4]));
    let bad = Command::new(bin).arg("nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let none = Command::new(bin).output().unwrap();
    assert_eq!(none.status.code(), Some(2));
}
