//! End-to-end tests of the `cremona` binary: exit codes, report shapes, and
//! byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cremona(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cremona"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("json output")
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).expect("temp file writes");
    path
}

#[test]
fn classify_sigma_is_bounded() {
    let out = cremona(&["classify", "[y*z : x*z : x*y]"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("Bounded"));
}

#[test]
fn classify_monomial_matrix_reports_exact_lambda() {
    let out = cremona(&["--format", "json", "classify", "[[2,1],[1,1]]", "-n", "12"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["class"], "Exponential");
    assert_eq!(v["lambda_exact"], "(3 + 1*sqrt(5))/2");
    assert_eq!(v["degrees"][0], "3");
    assert_eq!(v["degrees"][1], "8");
}

#[test]
fn classify_henon_word_is_exponential_lambda_two() {
    let out = cremona(&[
        "--format",
        "json",
        "classify",
        "[y*z : y^2 - x*z : z^2]",
        "-n",
        "6",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["class"], "Exponential");
    assert_eq!(v["lambda_estimate"], "2.000000");
}

#[test]
fn classify_csv_lists_degrees() {
    let out = cremona(&["--format", "csv", "classify", "[[1,1],[1,0]]", "-n", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(
        lines,
        ["n,degree", "1,2", "2,3", "3,5", "4,8", "5,13", "6,21"]
    );
}

#[test]
fn csv_is_rejected_outside_classify() {
    let out = cremona(&["--format", "csv", "monomial-conj", "classes", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("csv"));
}

#[test]
fn parse_errors_exit_2() {
    let out = cremona(&["classify", "not a map"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn degree_budget_exits_3_with_partial_data() {
    let out = cremona(&[
        "--budget-degree",
        "8",
        "classify",
        "[y*z : y^2 - x*z : z^2]",
        "-n",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("budget"));
    assert!(stderr(&out).contains('8'));
}

#[test]
fn nonneg_emits_a_verified_certificate() {
    let out = cremona(&[
        "--format",
        "json",
        "monomial-conj",
        "nonneg",
        "[[1,-1],[-1,2]]",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["verified"], true);
    let b = v["b"].as_array().unwrap();
    for row in b {
        for e in row.as_array().unwrap() {
            let x: i64 = e.as_str().unwrap().parse().unwrap();
            assert!(x >= 0);
        }
    }
}

#[test]
fn nonneg_rejects_non_loxodromic_input() {
    let out = cremona(&["monomial-conj", "nonneg", "[[1,0],[0,1]]"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classes_three_has_one_representative() {
    let out = cremona(&["--format", "json", "monomial-conj", "classes", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["count"], 1);
}

#[test]
fn torus_solve_prints_exponent_form() {
    let out = cremona(&[
        "--format",
        "json",
        "monomial-conj",
        "torus-solve",
        "[[1,1],[1,0]]",
        "(2x,3y)",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["verified"], true);
    // Exponent form: the conjugator is written with prime-power exponents.
    assert!(v["d_prime"].as_str().unwrap().contains("^("));
}

const SAMPLE_SYSTEM: &str = "# sigma and a torus pair\n\
    0 0 [y*z : x*z : x*y]\n\
    1 2 [2*x : 3*y : z]\n\
    2 1 [3*x : 2*y : 6*z]\n";

#[test]
fn modp_pipeline_reports_a_verified_homomorphism() {
    let path = write_temp("system.txt", SAMPLE_SYSTEM);
    let out = cremona(&["--format", "json", "modp", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["p"], 5);
    assert_eq!(v["verified"], true);
    assert_eq!(v["generators"], 3);
    assert_eq!(v["reduced"][0], "[y*z : x*z : x*y]");
}

#[test]
fn modp_experiment_certifies_a_finite_image() {
    let path = write_temp("system_exp.txt", SAMPLE_SYSTEM);
    let out = cremona(&[
        "--format",
        "json",
        "modp",
        path.to_str().unwrap(),
        "--experiment",
        "2",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["experiment"]["closure"], true);
    assert_eq!(v["experiment"]["image_size"], 8);
}

#[test]
fn modp_word_budget_exits_3() {
    let path = write_temp("system_budget.txt", SAMPLE_SYSTEM);
    let out = cremona(&[
        "--budget-words",
        "1",
        "modp",
        path.to_str().unwrap(),
        "--experiment",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("budget"));
}

#[test]
fn modp_unpaired_generator_names_the_culprit() {
    let path = write_temp(
        "system_bad.txt",
        "0 1 [2*x : 3*y : z]\n1 0 [5*x : 7*y : z]\n",
    );
    let out = cremona(&["modp", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("generator 0"));
}

#[test]
fn fan_trace_finds_no_fixed_ray() {
    let out = cremona(&[
        "--format",
        "json",
        "fan-trace",
        "[[2,1],[1,1]]",
        "--blowups",
        "2",
        "--steps",
        "10",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["no_fixed_ray"], true);
    assert_eq!(v["rays"].as_array().unwrap().len(), 5);
    assert_eq!(v["orbits"].as_array().unwrap().len(), 5);
}

#[test]
fn fan_trace_rejects_the_identity() {
    let out = cremona(&["fan-trace", "[[1,0],[0,1]]"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fan_trace_sigma_contracts_all_three_rays() {
    let out = cremona(&[
        "--format",
        "json",
        "fan-trace",
        "[[-1,0],[0,-1]]",
        "--steps",
        "0",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["e"], 3);
    for tag in v["tags"].as_array().unwrap() {
        assert!(tag.get("into_cone_interior").is_some());
    }
}

#[test]
fn fan_trace_orbit_needs_loxodromic() {
    let out = cremona(&["fan-trace", "[[-1,0],[0,-1]]", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("loxodromic"));
}

#[test]
fn fixed_seed_means_byte_identical_output() {
    let args = [
        "--seed",
        "42",
        "--format",
        "json",
        "fan-trace",
        "[[2,1],[1,1]]",
        "--blowups",
        "3",
        "--steps",
        "6",
    ];
    let a = cremona(&args);
    let b = cremona(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let args = ["--format", "json", "classify", "[[2,1],[1,1]]"];
    let a = cremona(&args);
    let b = cremona(&args);
    assert_eq!(a.stdout, b.stdout);
}
