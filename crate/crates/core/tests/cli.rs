use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dicke-witness"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn evaluate_pure_dicke() {
    let out = run(&["evaluate", "--state", "dicke", "--n", "4", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    assert_eq!(v["verdict"], "detected");
    assert_eq!(v["n_d"], 2);
}

#[test]
fn evaluate_noisy_and_mixed_states() {
    let out = run(&["evaluate", "--state", "dicke+noise", "--p", "0.5", "--n", "4", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "not_detected");

    let out = run(&["evaluate", "--state", "mix:0,0.9", "--n", "6", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "detected");
}

#[test]
fn threshold_reports_both_values() {
    let out = run(&["threshold", "--n", "4", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["analytic_p"].as_f64().unwrap() - 8.0 / 17.0).abs() < 1e-15);
    assert!(v["agreement"].as_f64().unwrap() < 1e-6);
}

#[test]
fn settings_count() {
    let out = run(&["settings", "--n", "4", "--m", "2"]);
    let v = json(&out);
    assert_eq!(v["count"], 39);
    assert_eq!(v["tomography_count"], 255);
    assert_eq!(v["operators"].as_array().unwrap().len(), 39);
}

#[test]
fn bisep_run_is_clean_and_reproducible() {
    let args = ["verify-bisep", "--n", "5", "--m", "2", "--samples", "10000", "--seed", "7"];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(json(&first)["violations"], 0);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn violations_outside_range_are_reported_but_pass() {
    // |1> (x) |D_2^3> is biseparable and scores above zero at m = 3, n = 4
    let out = run(&["verify-bisep", "--n", "4", "--m", "3", "--samples", "2000", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["regime"], "outside_stated_range");
    assert!(v["violations"].as_u64().unwrap() > 0);
}

#[test]
fn expectation_table_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.csv");
    let out = run(&[
        "expectations", "--state", "dicke+noise:0.2", "--n", "4", "--m", "2", "--out", table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let spec = format!("table:{}", table.display());
    let from_table = json(&run(&["evaluate", "--state", &spec, "--n", "4", "--m", "2"]));
    let direct = json(&run(&["evaluate", "--state", "dicke+noise:0.2", "--n", "4", "--m", "2", "--real-part"]));
    let a = from_table["value"].as_f64().unwrap();
    let b = direct["value"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-10, "{a} vs {b}");
}

#[test]
fn density_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.txt");
    // |01><01| on two qubits
    let z = "0+0i";
    let one = "1+0i";
    let rows = |d: [&str; 4]| {
        (0..4)
            .map(|r| (0..4).map(|c| if r == c { d[r] } else { z }).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    std::fs::write(&path, format!("n=2\n{}\n", rows([z, one, z, z]))).unwrap();
    let spec = format!("file:{}", path.display());
    let out = run(&["evaluate", "--state", &spec, "--n", "2", "--m", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    std::fs::write(&path, format!("n=2\n{}\n", rows([one, one, z, z]))).unwrap();
    let out = run(&["evaluate", "--state", &spec, "--n", "2", "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&["region", "--grid", "21", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("p,q,i_d2,i_d3,f_d3\n"));
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());

    let out = run(&["scaling", "--m", "2,3", "--n", "10"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("m,n,threshold\n"));
    assert!(text.contains("\n2,4,0.470588235294\n"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["evaluate", "--state", "dicke", "--n", "4"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--state", "dicke", "--n", "4", "--m", "4"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--state", "nonsense", "--n", "4", "--m", "2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_with_one() {
    let out = run(&["settings", "--n", "4", "--m", "2", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(out.status.code(), Some(1));
}
