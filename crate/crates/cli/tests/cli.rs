//! End-to-end tests of the binary: pipelines, exit codes and byte
//! stability.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mucosine"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .expect("stdin piped")
        .write_all(input)
        .expect("stdin writes");
    child.wait_with_output().expect("binary finishes")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn gen_then_verify_solution_kinds() {
    for (kind, extra) in [
        ("hermitian", vec!["--dim", "2"]),
        ("conjugated", vec!["--dim", "3"]),
        ("scalar", vec!["--dim", "1"]),
    ] {
        let mut args = vec![
            "gen", "--group", "4x2", "--mu", "2,1", "--seed", "11", "--kind", kind,
        ];
        args.extend(extra.iter().copied());
        let gen = run(&args);
        assert_eq!(exit_code(&gen), 0, "gen {kind} failed: {gen:?}");

        let verify = run_with_stdin(&["verify", "-"], &gen.stdout);
        assert_eq!(exit_code(&verify), 0, "verify {kind} failed: {verify:?}");
        let report = stdout_json(&verify);
        assert_eq!(report["passed"], serde_json::Value::Bool(true));
    }
}

#[test]
fn scalar_seed_example_passes_verification() {
    let gen = run(&[
        "gen",
        "--group",
        "4",
        "--dim",
        "1",
        "--mu",
        "2",
        "--kind",
        "hermitian",
        "--seed",
        "7",
    ]);
    assert_eq!(exit_code(&gen), 0);
    let verify = run_with_stdin(&["verify", "-"], &gen.stdout);
    assert_eq!(exit_code(&verify), 0);
}

#[test]
fn non_solution_fails_with_perturbation_scale_residual() {
    let gen = run(&[
        "gen",
        "--group",
        "6",
        "--dim",
        "2",
        "--kind",
        "non-solution",
        "--seed",
        "3",
    ]);
    assert_eq!(exit_code(&gen), 0);
    let verify = run_with_stdin(&["verify", "-"], &gen.stdout);
    assert_eq!(exit_code(&verify), 1);
    let report = stdout_json(&verify);
    let residual = report["max_equation_residual"].as_f64().unwrap();
    assert!(
        (0.1 / 4.0..=0.1 * 4.0).contains(&residual),
        "residual {residual}"
    );
}

#[test]
fn gen_output_is_byte_stable() {
    let args = [
        "gen",
        "--group",
        "4x2",
        "--dim",
        "3",
        "--mu",
        "2,0",
        "--kind",
        "conjugated",
        "--seed",
        "99",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn malformed_group_is_a_usage_error() {
    let out = run(&["gen", "--group", "4xx2", "--dim", "1"]);
    assert_eq!(exit_code(&out), 2);
    let out = run(&["gen", "--group", "0", "--dim", "1"]);
    assert_eq!(exit_code(&out), 2);
    let out = run(&["scalar", "--group", ""]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn verify_rejects_garbage_with_diagnostic() {
    let out = run_with_stdin(&["verify", "-"], b"{ not json");
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "diagnostic missing position: {err}");

    let missing = run(&["verify", "/nonexistent/instance.json"]);
    assert_eq!(exit_code(&missing), 2);
}

#[test]
fn factor_hermitian_round_trip_through_files() {
    let gen = run(&[
        "gen",
        "--group",
        "8",
        "--dim",
        "3",
        "--mu",
        "4",
        "--kind",
        "hermitian",
        "--seed",
        "21",
    ]);
    assert_eq!(exit_code(&gen), 0);
    let factor = run_with_stdin(&["factor", "-"], &gen.stdout);
    assert_eq!(exit_code(&factor), 0, "{factor:?}");
    let fact = stdout_json(&factor);
    assert!(fact["residual"].as_f64().unwrap() <= 1e-9);

    // rebuild from the emitted JSON and verify the rebuilt table
    let instance: mucosine::io::InstanceFile =
        serde_json::from_slice(&gen.stdout).expect("instance parses");
    let (spec, mu, phi) = instance.into_parts().unwrap();
    let json: mucosine::io::FactorizationJson =
        serde_json::from_slice(&factor.stdout).expect("factorization parses");
    let fact = json.into_factorization(&spec).unwrap();
    let rebuilt = fact.rebuild(&spec).unwrap();
    assert!(rebuilt.max_distance(&phi) <= 1e-9);
    let report = mucosine::cosine::verify_mu_cosine(&rebuilt, &mu, 1e-9).unwrap();
    assert!(report.passed());
}

#[test]
fn factor_bounded_recovers_generator_characters() {
    let gen = run(&[
        "gen",
        "--group",
        "4",
        "--dim",
        "2",
        "--kind",
        "conjugated",
        "--seed",
        "5",
    ]);
    assert_eq!(exit_code(&gen), 0);
    let factor = run_with_stdin(
        &["factor", "-", "--mode", "bounded", "--seed", "17"],
        &gen.stdout,
    );
    assert_eq!(exit_code(&factor), 0, "{factor:?}");
    let fact = stdout_json(&factor);
    assert!(fact["S"].is_object(), "bounded mode reports the transform");
    assert!(fact["cond_S"].as_f64().unwrap() >= 1.0);

    // provenance characters match the recovered ones up to the
    // chi <-> reflected-chi swap
    let instance: mucosine::io::InstanceFile = serde_json::from_slice(&gen.stdout).unwrap();
    let spec = mucosine::group::GroupSpec::parse(&instance.group).unwrap();
    let mu = spec.character(instance.mu.clone()).unwrap();
    let mut expected: Vec<Vec<u64>> = instance
        .provenance
        .as_ref()
        .unwrap()
        .chars
        .as_ref()
        .unwrap()
        .iter()
        .map(|e| {
            let chi = spec.character(e.clone()).unwrap();
            mucosine::factor::canonical_character(&spec, &mu, &chi)
                .unwrap()
                .exponents()
                .to_vec()
        })
        .collect();
    expected.sort();
    let mut got: Vec<Vec<u64>> = fact["chars"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let e: Vec<u64> = c
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_u64().unwrap())
                .collect();
            let chi = spec.character(e).unwrap();
            mucosine::factor::canonical_character(&spec, &mu, &chi)
                .unwrap()
                .exponents()
                .to_vec()
        })
        .collect();
    got.sort();
    assert_eq!(got, expected);
}

#[test]
fn factor_non_solution_exits_one() {
    let gen = run(&[
        "gen",
        "--group",
        "4",
        "--dim",
        "2",
        "--kind",
        "non-solution",
        "--seed",
        "2",
    ]);
    let factor = run_with_stdin(&["factor", "-"], &gen.stdout);
    assert_eq!(exit_code(&factor), 1);
}

#[test]
fn bounded_mode_requires_trivial_mu() {
    let gen = run(&[
        "gen", "--group", "4", "--dim", "1", "--mu", "2", "--kind", "scalar", "--seed", "1",
    ]);
    let factor = run_with_stdin(&["factor", "-", "--mode", "bounded"], &gen.stdout);
    assert_eq!(exit_code(&factor), 2);
}

#[test]
fn kernel_of_scalar_cosine_instance() {
    // dim-1 hermitian instance on Z_4 with trivial mu, sliced along xi = 1
    let gen = run(&[
        "gen",
        "--group",
        "4",
        "--dim",
        "1",
        "--kind",
        "hermitian",
        "--seed",
        "4",
    ]);
    assert_eq!(exit_code(&gen), 0);
    let kernel = run_with_stdin(&["kernel", "-", "--xi", "basis-0"], &gen.stdout);
    assert_eq!(exit_code(&kernel), 0, "{kernel:?}");
    let report = stdout_json(&kernel);
    assert_eq!(report["is_psd"], serde_json::Value::Bool(true));
    let rank = report["rank"].as_u64().unwrap();
    assert!(rank >= 1);
    assert!(report["f_recovery_residual"].as_f64().unwrap() <= 1e-13);
    assert!(report["even_part_residual"].as_f64().unwrap() <= 1e-13);
    assert!(report["regular_representation_residual"].as_f64().unwrap() <= 1e-13);
}

#[test]
fn kernel_accepts_explicit_xi_and_checks_dimension() {
    let gen = run(&[
        "gen",
        "--group",
        "2",
        "--dim",
        "2",
        "--kind",
        "hermitian",
        "--seed",
        "6",
    ]);
    let kernel = run_with_stdin(
        &["kernel", "-", "--xi", "[[0.6,0.0],[0.0,0.8]]"],
        &gen.stdout,
    );
    assert_eq!(exit_code(&kernel), 0, "{kernel:?}");

    let bad = run_with_stdin(&["kernel", "-", "--xi", "basis-5"], &gen.stdout);
    assert_eq!(exit_code(&bad), 2);
}

#[test]
fn kernel_gates_on_hermitian_symmetry() {
    let gen = run(&[
        "gen",
        "--group",
        "6",
        "--dim",
        "3",
        "--kind",
        "conjugated",
        "--seed",
        "12",
    ]);
    let kernel = run_with_stdin(&["kernel", "-"], &gen.stdout);
    // conjugated instances are valid solutions but not hermitian
    assert_eq!(exit_code(&kernel), 1);
    let err = String::from_utf8_lossy(&kernel.stderr);
    assert!(err.contains("not_hermitian"), "{err}");
}

#[test]
fn scalar_solution_counts() {
    let z2 = stdout_json(&run(&["scalar", "--group", "2"]));
    assert_eq!(z2["solutions"].as_array().unwrap().len(), 2);

    let z3 = stdout_json(&run(&["scalar", "--group", "3"]));
    assert_eq!(z3["solutions"].as_array().unwrap().len(), 2);

    // Z_4 with mu = (-1)^x includes the i^x table
    let z4 = stdout_json(&run(&["scalar", "--group", "4", "--mu", "2"]));
    let found = z4["solutions"].as_array().unwrap().iter().any(|s| {
        let f = s["f"].as_array().unwrap();
        let close = |v: &serde_json::Value, re: f64, im: f64| {
            (v[0].as_f64().unwrap() - re).abs() < 1e-12
                && (v[1].as_f64().unwrap() - im).abs() < 1e-12
        };
        close(&f[0], 1.0, 0.0)
            && close(&f[1], 0.0, 1.0)
            && close(&f[2], -1.0, 0.0)
            && close(&f[3], 0.0, -1.0)
    });
    assert!(found, "{z4}");
}
