//! Byte-for-byte pins of the command renderings over the shipped corpus.
//!
//! Run with UPDATE_GOLDEN=1 to regenerate after an intentional rendering
//! change; review the diff before committing it.

use std::path::PathBuf;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let full: Vec<String> = std::iter::once("ratho".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    let code = ratho_cli::run_from(&full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).expect("stdout is UTF-8"),
        String::from_utf8(err).expect("stderr is UTF-8"),
    )
}

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {name}; regenerate with UPDATE_GOLDEN=1"));
    assert_eq!(expected, actual, "rendering drifted from tests/golden/{name}");
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("ratho-golden");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn validate_a_two_algebra_model_with_a_morphism() {
    let (code, out, _) = run(&["validate", "cp2-to-cp1"]);
    assert_eq!(code, 0);
    golden("validate-cp2-to-cp1.txt", &out);
}

#[test]
fn cohomology_of_the_nonformal_model() {
    let (code, out, _) = run(&["cohomology", "nonformal", "--cutoff", "12"]);
    assert_eq!(code, 0);
    golden("cohomology-nonformal.txt", &out);
}

#[test]
fn cohomology_of_the_even_sphere_model() {
    let (code, out, _) = run(&["cohomology", "s2-model"]);
    assert_eq!(code, 0);
    golden("cohomology-s2-model.txt", &out);
}

#[test]
fn cuplength_of_complex_projective_three_space() {
    let (code, out, _) = run(&["cuplength", "cp3"]);
    assert_eq!(code, 0);
    golden("cuplength-cp3.txt", &out);
}

#[test]
fn zero_divisor_cuplength_of_the_projective_plane() {
    let (code, out, _) = run(&["zcl", "cp2"]);
    assert_eq!(code, 0);
    assert!(out.contains("nil(ker mu) = 4 (certified)"), "{out}");
    golden("zcl-cp2.txt", &out);
}

#[test]
fn zero_divisor_cuplength_reads_cohomology_when_d_is_nonzero() {
    let (code, out, _) = run(&["zcl", "s2-model"]);
    assert_eq!(code, 0);
    assert!(out.contains("H(s2-model)"), "{out}");
    golden("zcl-s2-model.txt", &out);
}

#[test]
fn kernel_nilpotency_of_the_projective_restriction() {
    let (code, out, _) = run(&["nilker", "cp2-to-cp1"]);
    assert_eq!(code, 0);
    assert!(out.contains("nil(ker restriction) = 1 (certified)"), "{out}");
    golden("nilker-cp2-to-cp1.txt", &out);
}

#[test]
fn kernel_nilpotency_defaults_to_the_multiplication() {
    let (code, out, _) = run(&["nilker", "s2xs3"]);
    assert_eq!(code, 0);
    golden("nilker-s2xs3.txt", &out);
}

#[test]
fn join_model_stages_of_the_odd_sphere_diagonal() {
    let log = scratch("join-s3.log");
    let (code, out, _) = run(&[
        "join-model",
        "s3-diagonal",
        "--n-max",
        "2",
        "--cutoff",
        "12",
        "--log",
        log.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    golden("join-model-s3-diagonal.txt", &out);
    golden("join-model-s3-diagonal.log", &std::fs::read_to_string(&log).unwrap());
}

#[test]
fn msecat_of_the_even_sphere_diagonal() {
    let (code, out, _) = run(&["msecat", "s2-diagonal", "--n-max", "2", "--cutoff", "12"]);
    assert_eq!(code, 0);
    assert!(out.contains("msecat = 2"), "{out}");
    golden("msecat-s2-diagonal.txt", &out);
}

#[test]
fn msecat_of_the_odd_sphere_diagonal_with_machine_report() {
    let report = scratch("msecat-s3.report");
    let (code, out, _) = run(&[
        "msecat",
        "s3-diagonal",
        "--n-max",
        "2",
        "--cutoff",
        "12",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("msecat = 1"), "{out}");
    golden("msecat-s3-diagonal.txt", &out);
    golden("msecat-s3-diagonal.report", &std::fs::read_to_string(&report).unwrap());
}

#[test]
fn tc_report_refuses_exactness_for_the_nonformal_model() {
    let (code, out, _) = run(&["tc-report", "nonformal"]);
    assert_eq!(code, 0);
    assert!(out.contains("exactness not claimed"), "{out}");
    assert!(!out.contains("exact:"), "{out}");
    golden("tc-report-nonformal.txt", &out);
}

#[test]
fn tc_report_takes_the_formal_route_when_the_metadata_asserts_it() {
    let (code, out, _) = run(&["tc-report", "cp4"]);
    assert_eq!(code, 0);
    assert!(out.contains("formal: yes (asserted)"), "{out}");
    assert!(out.contains("TC_0 = TC_0^M = 8 (exact: formal)"), "{out}");
    golden("tc-report-cp4.txt", &out);
}

#[test]
fn tc_report_claims_meeting_bounds_on_an_unasserted_zero_differential_table() {
    // A cohomology table shipped without a formality assertion: both bounds
    // read the same zero-differential ring, so their agreement is exact.
    let path = scratch("plain-sphere.cdga");
    std::fs::write(
        &path,
        "algebra plain table\n  element 1 0\n  element x 2\n  unit 1\nend\n\nmetadata\n  name plain\nend\n",
    )
    .unwrap();
    let (code, out, _) = run(&["tc-report", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("formal: not asserted"), "{out}");
    assert!(out.contains("TC_0 = TC_0^M = 2 (exact: bounds meet)"), "{out}");
}

#[test]
fn the_point_has_vanishing_invariants() {
    let (code, out, _) = run(&["tc-report", "point"]);
    assert_eq!(code, 0);
    assert!(out.contains("TC_0 = TC_0^M = 0"), "{out}");
    golden("tc-report-point.txt", &out);
}

#[test]
fn machine_report_of_a_bound_report_mirrors_both_bounds() {
    let report = scratch("tc-nonformal.report");
    let (code, _, _) = run(&["tc-report", "nonformal", "--out", report.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("format: ratho-report-v1\ncommand: tc-report\n"));
    assert!(text.contains("lower.certified: true"));
    assert!(text.contains("exact: none"));
    golden("tc-report-nonformal.report", &text);
}
