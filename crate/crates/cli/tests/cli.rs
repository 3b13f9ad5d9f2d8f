//! End-to-end tests of the command-line harness: exit codes, JSON report
//! shape, determinism under a fixed seed, and the guarantee that a fail
//! report's counterexample re-checks as a genuine violation.

use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grouplab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("stdout is JSON lines"))
        .collect()
}

#[test]
fn steinberg_passes() {
    let out = run(&["verify", "steinberg", "--ring", "Zmod:7", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&out);
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["status"], "pass");
    assert_eq!(reports[0]["check"], "steinberg");
    assert!(reports[0]["wall_ms"].is_number());
}

#[test]
fn centralizer_example_sizes() {
    let out = run(&[
        "verify",
        "centralizer",
        "--ring",
        "Zmod:2",
        "--n",
        "3",
        "--family",
        "SL",
        "--k",
        "1",
        "--l",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&out);
    assert_eq!(reports[0]["status"], "pass");
    assert_eq!(reports[0]["details"]["sizes"], serde_json::json!([2, 2]));
}

#[test]
fn ext_example_order_two() {
    let out = run(&["cohomology", "ext", "--B", "4", "--A", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&out);
    assert_eq!(reports[0]["details"]["order"], 2);
    assert_eq!(reports[0]["details"]["brute_ext_order"], 2);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = run(&["suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_ring_preset_is_a_check_error() {
    let out = run(&["verify", "steinberg", "--ring", "Zmod:x", "--n", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let reports = json_lines(&out);
    assert_eq!(reports[0]["status"], "error");
    assert!(reports[0]["details"]["message"]
        .as_str()
        .unwrap()
        .contains("preset"));
}

#[test]
fn suite_reports_are_deterministic_given_seed() {
    let strip = |out: &Output| {
        let mut reports = json_lines(out);
        for r in &mut reports {
            r.as_object_mut().unwrap().remove("wall_ms");
        }
        reports
    };
    let a = run(&["suite", "cohomology", "--seed", "42"]);
    let b = run(&["suite", "cohomology", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(strip(&a), strip(&b));
    // and ordered by check name
    let names: Vec<(String, String)> = strip(&a)
        .iter()
        .map(|r| {
            (
                r["check"].as_str().unwrap().to_string(),
                r["instance"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn fail_counterexample_rechecks_as_genuine() {
    // over Z/2 the deformed triangular group is UT_3(Z/2), whose center
    // strictly contains the central-coordinate subgroup; the reported
    // counterexample must be a genuinely central non-scalar element
    let out = run(&["verify", "center", "--ring", "Zmod:2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let reports = json_lines(&out);
    assert_eq!(reports[0]["status"], "fail");
    let cx_text = reports[0]["details"]["counterexample"].as_str().unwrap();

    use grouplab::matgroup::{self, GroupFamily};
    use grouplab::rings::RingSpec;
    let spec = RingSpec::modular(2).unwrap();
    let cx = matgroup::parse_mat(&spec, cx_text).unwrap();
    let group: Vec<_> = matgroup::enumerate_group(&spec, 3, &GroupFamily::T)
        .unwrap()
        .collect();
    // central in the whole group...
    assert!(group
        .iter()
        .all(|y| matgroup::mat_mul(&spec, &cx, y) == matgroup::mat_mul(&spec, y, &cx)));
    // ...but not a scalar matrix
    assert_ne!(cx, matgroup::scalar_diag(&spec, 3, &spec.one()));
    assert!((0..3).any(|r| (0..3).any(|c| r != c && !spec.is_zero(cx.at(r, c)))));
}

#[test]
fn formula_parse_reports_syntax_errors() {
    let out = run(&["formula", "parse", "--formula", "A x. ("]);
    assert_eq!(out.status.code(), Some(1));
    let reports = json_lines(&out);
    assert_eq!(reports[0]["status"], "error");
    assert!(reports[0]["details"]["message"]
        .as_str()
        .unwrap()
        .contains("syntax error"));
}

#[test]
fn formula_define_counts_squares() {
    let out = run(&[
        "formula",
        "define",
        "--formula",
        "E y. x = y*y",
        "--ring",
        "Zmod:5",
        "--n",
        "3",
        "--family",
        "D",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&out);
    // squares in D_3(Z/5) = (Z/5^x)^3: the squares form a subgroup of
    // index 8, so 64 / 8 = 8 elements
    assert_eq!(reports[0]["details"]["size"], 8);
    assert_eq!(reports[0]["details"]["structure_size"], 64);
}

#[test]
fn formula_file_input_with_comments() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# corpus").unwrap();
    writeln!(file, "A x. x*1 = x").unwrap();
    writeln!(file).unwrap();
    writeln!(file, "E y. x = y*y").unwrap();
    let out = run(&[
        "formula",
        "parse",
        "--file",
        file.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out).len(), 2);
}

#[test]
fn decompose_ut_and_gl() {
    let out = run(&[
        "decompose",
        "ut",
        "--ring",
        "Z",
        "--mat",
        "1,2,3;0,1,4;0,0,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&out);
    assert_eq!(reports[0]["details"]["length"], 3);
    assert_eq!(reports[0]["details"]["roundtrip"], true);

    let out = run(&["decompose", "gl", "--ring", "Zmod:3", "--mat", "2,0;0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&out);
    assert_eq!(reports[0]["details"]["roundtrip"], true);

    // determinant zero: an error, reported not panicked
    let out = run(&["decompose", "gl", "--ring", "Z", "--mat", "0,0;0,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_lines(&out)[0]["status"], "error");
}

#[test]
fn ring_validate_from_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        "{}",
        serde_json::json!({
            "kind": "number-ring",
            "m": 2,
            "c": [[[1,0],[0,1]],[[0,1],[-1,0]]],
            "names": ["1", "i"],
        })
    )
    .unwrap();
    let arg = format!("@{}", file.path().display());
    let out = run(&["ring", "validate", "--ring", &arg]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&out);
    assert_eq!(reports[0]["status"], "pass");
    assert_eq!(reports[0]["details"]["degree"], 2);
}

#[test]
fn pretty_output_is_human_text() {
    let out = run(&[
        "verify",
        "centralizer",
        "--ring",
        "Zmod:2",
        "--n",
        "3",
        "--family",
        "SL",
        "--k",
        "1",
        "--l",
        "3",
        "--pretty",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("[PASS] centralizer"));
}

#[test]
fn deformation_checks_run() {
    let out = run(&[
        "verify",
        "deform-presentation",
        "--ring",
        "Zmod:3",
        "--n",
        "3",
        "--cocycle",
        "class:1,trivial",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&out);
    assert_eq!(reports.len(), 6); // five relations plus the shorthand note
    let out = run(&[
        "verify",
        "deform-derived",
        "--ring",
        "Zmod:3",
        "--n",
        "3",
        "--cocycle",
        "trivial",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_lines(&out)[0]["details"]["derived_order"], 27);
}
