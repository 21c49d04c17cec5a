//! Golden tests for the command line: exact output values and exit
//! codes on the corpus documents. Outputs are compared as parsed JSON,
//! so formatting may change but values and shapes may not.

use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    assert!(path.exists(), "missing corpus file {}", path.display());
    path.to_string_lossy().into_owned()
}

struct Run {
    code: i32,
    out: Value,
}

fn fptrace(args: &[&str]) -> Run {
    let output = Command::new(env!("CARGO_BIN_EXE_fptrace"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(output.stdout).expect("utf-8 output");
    let out: Value = serde_json::from_str(&stdout)
        .unwrap_or_else(|e| panic!("bad JSON from {:?}: {}\n{}", args, e, stdout));
    Run { code: output.status.code().expect("exit code"), out }
}

fn result(run: &Run) -> &Value {
    &run.out["result"]
}

#[test]
fn euler_of_circle_and_sphere() {
    let run = fptrace(&["euler", &corpus("circle3.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(*result(&run), json!(0));

    let run = fptrace(&["euler", &corpus("tetra_boundary.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(*result(&run), json!(2));

    let run = fptrace(&["euler", &corpus("chain_circle.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(*result(&run), json!(0));
}

#[test]
fn lefschetz_of_identity_on_sphere() {
    let run = fptrace(&["lefschetz", &corpus("tetra_boundary.json"), &corpus("id_map.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(run.out["ok"], json!(true));
    assert_eq!(*result(&run), json!(2));
}

#[test]
fn lefschetz_of_circle_reflection() {
    let run = fptrace(&["lefschetz", &corpus("circle6.json"), &corpus("reflection6.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(*result(&run), json!(2));
}

#[test]
fn conjugacy_class_counts() {
    let run = fptrace(&["conjugacy-classes", &corpus("c3.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(result(&run)["count"], json!(3));

    let run = fptrace(&["conjugacy-classes", &corpus("s3.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(result(&run)["count"], json!(3));
}

#[test]
fn twisted_classes_of_tripling() {
    let run = fptrace(&["twisted-classes", &corpus("z_times3.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(result(&run)["count"], json!(2));
    assert_eq!(result(&run)["labels"], json!(["[0]", "[1]"]));
}

#[test]
fn reidemeister_traces_of_circle_maps() {
    // Degree 2 leaves a single twisted class: the class group is the
    // trivial quotient of the integers, whose one label is "[]".
    let run = fptrace(&["reidemeister", &corpus("circle_deg2.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(result(&run)["classes"], json!({"[]": -1}));
    assert_eq!(result(&run)["augment"], json!(-1));

    let run = fptrace(&["reidemeister", &corpus("circle_deg3.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(result(&run)["classes"], json!({"[0]": -1, "[1]": -1}));
    assert_eq!(result(&run)["augment"], json!(-2));

    let run = fptrace(&["reidemeister", &corpus("circle_deg5.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(result(&run)["class_count"], json!(4));
    assert_eq!(result(&run)["augment"], json!(-4));
}

#[test]
fn reidemeister_trace_of_torus_map() {
    // Winding matrix [[2,1],[0,3]]: |det(I - M)| = 2 classes, and on a
    // torus every class carries index sign(det(I - M)) = +1.
    let run = fptrace(&["reidemeister", &corpus("torus_endo.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(result(&run)["class_count"], json!(2));
    assert_eq!(result(&run)["augment"], json!(2));
    let classes = result(&run)["classes"].as_object().expect("classes object");
    for (_, v) in classes {
        assert_eq!(*v, json!(1));
    }
}

#[test]
fn coefficient_vectors_of_shipped_weights() {
    let run = fptrace(&["coefficient-vector", &corpus("cofiber_weight.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(*result(&run), json!({"[id_a]": -1, "[id_b]": 1}));

    let run = fptrace(&["coefficient-vector", &corpus("coproduct_weight.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(*result(&run), json!({"[id_b0]": 1, "[id_b1]": 1}));

    let run = fptrace(&["coefficient-vector", &corpus("empty_weight.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(*result(&run), json!({}));
}

#[test]
fn dual_pair_certificates_verify() {
    for name in ["cofiber_weight.json", "coproduct_weight.json", "empty_weight.json"] {
        let run = fptrace(&["verify-dual-pair", &corpus(name)]);
        assert_eq!(run.code, 0, "{}", name);
        assert_eq!(run.out["ok"], json!(true), "{}", name);
        assert_eq!(result(&run)["triangle_on_m"], json!(true), "{}", name);
        assert_eq!(result(&run)["triangle_on_dual"], json!(true), "{}", name);
    }
}

#[test]
fn additivity_of_arc_in_circle() {
    let run = fptrace(&[
        "verify-additivity",
        &corpus("circle6.json"),
        &corpus("arc3.json"),
        &corpus("id.json"),
    ]);
    assert_eq!(run.code, 0);
    assert_eq!(run.out["ok"], json!(true));
    assert_eq!(*result(&run), json!({"L_f": 0, "L_fA": 1, "L_cone": -1}));
}

#[test]
fn linearity_on_circle_into_disk() {
    let run = fptrace(&[
        "verify-linearity",
        &corpus("cofiber_weight.json"),
        &corpus("circle_into_disk.json"),
    ]);
    assert_eq!(run.code, 0);
    assert_eq!(run.out["ok"], json!(true));
    assert_eq!(result(&run)["colimit_trace"], json!(1));
    assert_eq!(result(&run)["weighted_sum"], json!(1));
}

#[test]
fn reidemeister_additivity_on_relative_inputs() {
    let run = fptrace(&[
        "verify-reidemeister-additivity",
        &corpus("circle_basepoint_deg2.json"),
    ]);
    assert_eq!(run.code, 0);
    assert_eq!(run.out["ok"], json!(true));
    assert_eq!(result(&run)["relative"]["classes"], json!({"[]": -2}));
    assert_eq!(result(&run)["augments"]["relative"], json!(-2));

    for name in ["circle_basepoint_deg3.json", "circle_basepoint_deg5.json", "torus_basepoint.json"]
    {
        let run = fptrace(&["verify-reidemeister-additivity", &corpus(name)]);
        assert_eq!(run.code, 0, "{}", name);
        assert_eq!(run.out["ok"], json!(true), "{}", name);
    }

    let run = fptrace(&["verify-reidemeister-additivity", &corpus("torus_circle.json")]);
    assert_eq!(run.code, 0);
    assert_eq!(run.out["ok"], json!(true));
    assert_eq!(result(&run)["ambient"]["class_count"], json!(2));
    assert_eq!(result(&run)["ambient"]["augment"], json!(2));
}

#[test]
fn broken_certificate_exits_one() {
    // Scaling one unit component breaks the triangle identities but not
    // the quasi-isomorphism legs, so verification fails cleanly.
    let raw = std::fs::read_to_string(corpus("cofiber_weight.json")).unwrap();
    let mut doc: Value = serde_json::from_str(&raw).unwrap();
    let comp = doc["eta"][0]["components"]
        .as_object_mut()
        .expect("eta component map");
    let (_, first) = comp.iter_mut().next().expect("nonempty component");
    let cell = &mut first[0][0];
    let doubled = (cell.as_str().unwrap().parse::<i64>().unwrap() * 2).to_string();
    *cell = json!(doubled);

    let dir = std::env::temp_dir().join("fptrace-golden");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken_certificate.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();

    let run = fptrace(&["verify-dual-pair", &path.to_string_lossy()]);
    assert_eq!(run.code, 1);
    assert_eq!(run.out["ok"], json!(false));
}

#[test]
fn malformed_input_exits_two() {
    let dir = std::env::temp_dir().join("fptrace-golden");
    std::fs::create_dir_all(&dir).unwrap();

    let bad = dir.join("truncated.json");
    std::fs::write(&bad, "{\"kind\": \"group\", ").unwrap();
    let run = fptrace(&["conjugacy-classes", &bad.to_string_lossy()]);
    assert_eq!(run.code, 2);
    assert_eq!(run.out["ok"], json!(false));
    let details = run.out["details"].as_str().unwrap();
    assert!(details.contains("line"), "parse error names a position: {}", details);

    let unlawful = dir.join("dd_not_zero.json");
    std::fs::write(
        &unlawful,
        serde_json::to_string(&json!({
            "kind": "chain_complex",
            "version": 1,
            "ring": {"type": "int"},
            "ranks": {"0": 1, "1": 1, "2": 1},
            "diffs": {"1": [["1"]], "2": [["1"]]}
        }))
        .unwrap(),
    )
    .unwrap();
    let run = fptrace(&["euler", &unlawful.to_string_lossy()]);
    assert_eq!(run.code, 2);
    let details = run.out["details"].as_str().unwrap();
    assert!(details.contains("square"), "names the violated law: {}", details);
}

#[test]
fn wrong_document_kind_exits_two() {
    let run = fptrace(&["reidemeister", &corpus("c3.json")]);
    assert_eq!(run.code, 2);
    assert_eq!(run.out["ok"], json!(false));
}
