use std::process::{Command, Output};

fn voa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voa"))
        .args(args)
        .env_remove("VOA_MAX_WEIGHT")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = voa(args);
    assert_eq!(out.status.code(), Some(0), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn heisenberg_ope() {
    assert_eq!(stdout(&["ope", "--algebra", "heisenberg1", "a1", "a1"]).trim(), "a1(z)a1(w) ~ k (z-w)^-2");
}

#[test]
fn sl2_ope_and_circle() {
    assert_eq!(
        stdout(&["ope", "--algebra", "sl2", "x", "y"]).trim(),
        "x(z)y(w) ~ k (z-w)^-2 + h(-1) (z-w)^-1"
    );
    assert_eq!(stdout(&["circle", "--algebra", "sl2", "--n", "0", "h", "x"]).trim(), "2*x(-1)");
    assert_eq!(stdout(&["circle", "--algebra", "sl2", "--n", "-2", "x", "|0>"]).trim(), "x(-2)");
}

#[test]
fn remainder_values() {
    assert_eq!(stdout(&["remainder", "--n", "1", "--I", "0,1", "--J", "0,1"]).trim(), "5/4");
    assert_eq!(stdout(&["remainder-direct", "--n", "1", "--I", "0,1", "--J", "0,1"]).trim(), "5/4");
    assert_eq!(stdout(&["table1", "--n-max", "3"]), "R_1 = 5/4\nR_2 = 149/600\nR_3 = -2419/705600\n");
}

#[test]
fn table1_json_shape() {
    let text = stdout(&["--json", "table1", "--n-max", "2"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v, serde_json::json!([{"n": 1, "value": "5/4"}, {"n": 2, "value": "149/600"}]));
}

#[test]
fn exit_codes() {
    assert_eq!(voa(&["remainder", "--n", "1", "--I", "0,1", "--J", "0,2"]).status.code(), Some(2));
    assert_eq!(voa(&["table1", "--n-max", "9"]).status.code(), Some(2));
    assert_eq!(voa(&["ope", "--algebra", "e8", "x", "y"]).status.code(), Some(2));
    assert_eq!(voa(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(voa(&["frobnicate"]).status.code(), Some(2));
    let bad_env = Command::new(env!("CARGO_BIN_EXE_voa"))
        .args(["remainder-direct", "--n", "1", "--I", "0,1", "--J", "0,1"])
        .env("VOA_MAX_WEIGHT", "lots")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn weight_budget_is_enforced() {
    let out = Command::new(env!("CARGO_BIN_EXE_voa"))
        .args(["remainder-direct", "--n", "1", "--I", "0,3", "--J", "1,3"])
        .env("VOA_MAX_WEIGHT", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("orbifold"));
}

#[test]
fn sugawara_check_passes() {
    let text = stdout(&["sugawara-check", "--algebra", "sl2", "--hdual", "2"]);
    assert!(text.contains("c = (3*k)/(2 + k)"));
    assert!(!text.contains("FAIL"));
    // a wrong dual Coxeter number breaks the Virasoro relations
    assert_eq!(voa(&["sugawara-check", "--algebra", "sl2", "--hdual", "3"]).status.code(), Some(1));
}

#[test]
fn invariants_and_decoupling() {
    let text = stdout(&["invariants", "--algebra", "heisenberg1", "--weight", "4"]);
    assert!(text.starts_with("dimension 3\n"));
    let text = stdout(&["decouple", "--algebra", "heisenberg1", "--generators", "j0,j2", "--target", "j4"]);
    assert!(text.starts_with("J[4] = "));
    assert!(text.contains("excluded levels: 0"));
    let text = stdout(&["decouple", "--algebra", "heisenberg1", "--generators", "j0", "--target", "j2"]);
    assert!(text.contains("does not decouple"));
}

#[test]
fn config_file_algebra() {
    let dir = std::env::temp_dir().join(format!("voa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sl2.alg");
    std::fs::write(
        &path,
        "[algebra]\nlabels = e, f, h\ndual_coxeter = 2\n[brackets]\ne f h = 1\nh e e = 2\nh f f = -2\n[form]\ne f = 1\nh h = 2\n[action]\npreset = adjoint\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(stdout(&["ope", "--algebra", p, "e", "f"]).trim(), "e(z)f(w) ~ k (z-w)^-2 + h(-1) (z-w)^-1");
    let text = stdout(&["--json", "invariants", "--algebra", p, "--weight", "2"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["dimension"], 1);
    assert_eq!(v["algebra"]["labels"], serde_json::json!(["e", "f", "h"]));
    std::fs::write(
        &path,
        "[algebra]\nlabels = e, f, h\n[brackets]\ne f h = 1\nh e e = 3\nh f f = -2\n[form]\ne f = 1\nh h = 2\n",
    )
    .unwrap();
    let out = voa(&["ope", "--algebra", p, "e", "f"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: config:"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    let args = ["--json", "sugawara-check", "--algebra", "sl2"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn verify_suites() {
    let text = stdout(&["verify", "sugawara"]);
    assert!(text.starts_with("sugawara: PASS"));
    let text = stdout(&["--json", "verify", "invariant-dims"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v[0]["failed"], 0);
}
