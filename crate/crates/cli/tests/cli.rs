use std::process::{Command, Output};

fn xtower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xtower"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gauss_sum_line() {
    let o = xtower(&["field", "gauss", "--p", "3", "--target-field", "p7r1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("theta=5, theta^2=4, chi(-1)p=4, PASS"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn even_gauss_prime_is_a_usage_error() {
    assert_eq!(
        xtower(&["field", "gauss", "--p", "2", "--target-field", "p7r1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn prime_field_has_trivial_automorphisms() {
    let o = xtower(&["field", "info", "--p", "7", "--deg", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("trivial automorphism group"));
}

#[test]
fn classify_builtins() {
    let cases = [
        ("fQ", "Q (D^{n-1}Q, n=1), isotropic count 1"),
        ("fE", "E^1, exponent 3"),
        ("hyperbolic-f4", "D^2 (D^n, n=2)"),
    ];
    for (name, expected) in cases {
        let o = xtower(&["es", "classify", "--builtin", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert!(stdout(&o).contains(expected), "{name}: {}", stdout(&o));
    }
}

#[test]
fn degenerate_form_is_rejected() {
    let path = std::env::temp_dir().join(format!("xtower-degenerate-{}.json", std::process::id()));
    let form = r#"{"field":{"p":2,"r":1,"modulus":[1,1]},"eta_power":0,"gram":[[[0],[0]],[[0],[0]]],"kind":"alternating"}"#;
    std::fs::write(&path, form).unwrap();
    let o = xtower(&["es", "classify", "--form", path.to_str().unwrap()]);
    let _ = std::fs::remove_file(&path);
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(2), "{stderr}");
    assert!(stderr.contains("degenerate"), "{stderr}");
}

#[test]
fn weil_extend_writes_json_and_report() {
    let dir = std::env::temp_dir();
    let out = dir.join(format!("xtower-weil-{}.json", std::process::id()));
    let report = dir.join(format!("xtower-report-{}.json", std::process::id()));
    let o = xtower(&[
        "weil",
        "extend",
        "--case",
        "symplectic",
        "--p",
        "3",
        "--n",
        "1",
        "--out",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("576/576 PASS"), "{}", stdout(&o));
    let weil: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(weil["case"], "symplectic");
    assert_eq!(weil["mu"].as_array().unwrap().len(), 24);
    assert_eq!(weil["verified_pairs"], 576);
    let run: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(run["checks_failed"], 0);
    assert_eq!(run["parameters"]["verify"], "all");
    let _ = std::fs::remove_file(&out);
    let _ = std::fs::remove_file(&report);
}

#[test]
fn unknown_case_and_bad_start_are_usage_errors() {
    assert_eq!(
        xtower(&["weil", "extend", "--case", "orthogonal"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        xtower(&["tower", "build", "--start", "sp4f3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        xtower(&["tower", "build", "--start", "hermitian-chain:3,7"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn derived_series_of_the_first_extension() {
    let o = xtower(&["tower", "derived", "--spec", "gl2f3-e27"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1296 > 648 > 216 > 54 > 27 > 3 > 1"));
    assert!(stdout(&o).contains("derived length 6"));
}
