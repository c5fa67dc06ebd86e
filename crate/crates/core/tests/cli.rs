use gammaspec::cli::{run_args, Outcome};
use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Outcome {
    run_args(std::iter::once("gammaspec").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let out = run(&[args, &["--format", "json"]].concat());
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn chain4_laplacian_text() {
    let out = run(&["--chain", "4", "laplacian"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("eigenvalues: 0, 3, 3"), "{}", out.stdout);
    assert!(out.stdout.contains("connectivity: connected"));
}

#[test]
fn laplacian_csv_is_the_eigenvalue_row() {
    assert_eq!(run(&["--chain", "4", "--format", "csv", "laplacian"]).stdout, "0,3,3\n");
    assert_eq!(run(&["--chain", "3", "--format", "csv", "laplacian"]).stdout, "0,2\n");
}

#[test]
fn json_envelope() {
    let v = json(&["--boolean-product", "2", "laplacian"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "laplacian");
    assert_eq!(v["edges"], serde_json::json!([]));
    assert_eq!(v["laplacian"], serde_json::json!([[0, 0], [0, 0]]));
}

#[test]
fn cluster_recovers_components() {
    let v = json(&["--boolean-product", "2", "cluster", "-k", "2"]);
    assert_eq!(v["clusters"]["partition"], serde_json::json!([[0], [1]]));
}

#[test]
fn seed_does_not_change_exact_clusters() {
    let a = json(&["--boolean-product", "3", "--seed", "1", "cluster", "-k", "3"]);
    let b = json(&["--boolean-product", "3", "--seed", "99", "cluster", "-k", "3"]);
    assert_eq!(a["clusters"]["partition"], b["clusters"]["partition"]);
}

#[test]
fn cluster_k_out_of_range() {
    let out = run(&["--chain", "3", "cluster", "-k", "5"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.starts_with("error:"));
}

#[test]
fn spec_dot() {
    let out = run(&["--chain", "3", "--format", "dot", "spec"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("graph comparability {"));
    assert!(out.stdout.contains("P0 -- P1;"));
}

#[test]
fn verify_passes_on_builtins() {
    for args in [["--chain", "3"], ["--chain", "5"], ["--boolean-product", "2"]] {
        let out = run(&[&args[..], &["verify"]].concat());
        assert_eq!(out.code, 0, "{args:?}: {}{}", out.stdout, out.stderr);
    }
}

#[test]
fn cover_reports_witness() {
    let out = run(&["--input", &data("bxb.json"), "cover", "(1,1)", "(1,0)", "(0,1)"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("D((1,1)) = D((1,0)) ∪ D((0,1)): true"), "{}", out.stdout);
    assert!(out.stdout.contains("witness: (1,1)^1"));
}

#[test]
fn glue_script_from_file() {
    let v = json(&["--input", &data("bxb.json"), "glue"]);
    assert_eq!(v["command"], "glue");
    let out = run(&["--input", &data("bxb.json"), "glue"]);
    assert!(out.stdout.contains("glued section (1,1)"), "{}", out.stdout);
}

#[test]
fn fuzzy_from_file() {
    let out = run(&["--input", &data("bxb.json"), "fuzzy"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("stability of mu vs nu at ε = 1/4: holds"), "{}", out.stdout);
}

#[test]
fn glue_and_fuzzy_need_an_input_file() {
    for cmd in ["glue", "fuzzy"] {
        let out = run(&["--chain", "3", cmd]);
        assert_eq!(out.code, 1);
        assert!(out.stderr.contains("--input"));
    }
}

#[test]
fn broken_tables_are_reported() {
    let out = run(&["--input", &data("broken.json"), "validate"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("addition is commutative fails"), "{}", out.stdout);
    let v: Value = serde_json::from_str(&run(&["--input", &data("broken.json"), "--format", "json", "validate"]).stdout).unwrap();
    assert_eq!(v["valid"], false);
}

#[test]
fn argument_errors() {
    assert_eq!(run(&["laplacian"]).code, 1);
    assert_eq!(run(&["--chain", "3", "--boolean-product", "2", "spec"]).code, 1);
    assert_eq!(run(&["--chain", "3", "--cap", "30", "spec"]).code, 1);
    assert_eq!(run(&["--chain", "3", "--tol", "0", "laplacian"]).code, 1);
    assert_eq!(run(&["--input", &data("missing.json"), "spec"]).code, 1);
    assert_eq!(run(&["--chain", "3", "--format", "dot", "validate"]).code, 1);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn autos_lists_the_swap() {
    let v = json(&["--boolean-product", "2", "autos"]);
    assert_eq!(v["automorphisms"].as_array().map(Vec::len), Some(2));
}

#[test]
fn localize_and_stalk() {
    assert_eq!(run(&["--chain", "3", "localize", "e"]).code, 0);
    assert_eq!(run(&["--chain", "3", "stalk", "1"]).code, 0);
    assert_eq!(run(&["--chain", "3", "stalk", "7"]).code, 1);
    assert_eq!(run(&["--chain", "3", "localize", "nope"]).code, 1);
}
