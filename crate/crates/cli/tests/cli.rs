use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bfun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bfun"))
        .args(args)
        .env_remove("BFUN_CACHE")
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bfunction_n2_passes_with_expected_roots() {
    let o = bfun(&["bfunction", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(
        r["btilde_roots"],
        serde_json::json!([[-3, 2, 1], [-1, 1, 2]])
    );
    assert_eq!(r["matches_theorem"], true);
    assert_eq!(r["alpha"], "4/1");
    assert_eq!(r["constant_ratio"], "1/1");
    for key in ["n", "method", "samples", "bhat_coeffs"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    assert!(r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["anchor"].is_string()));
}

#[test]
fn bfunction_n1_root() {
    let o = bfun(&["bfunction", "--n", "1", "--method", "symbolic"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["btilde_roots"], serde_json::json!([[-1, 1, 1]]));
}

#[test]
fn guard_and_usage_errors_exit_2() {
    assert_eq!(bfun(&["bfunction", "--n", "9"]).status.code(), Some(2));
    assert_eq!(bfun(&["bfunction", "--n", "0"]).status.code(), Some(2));
    assert_eq!(bfun(&["bfunction", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        bfun(&["bfunction", "--method", "magic"]).status.code(),
        Some(2)
    );
    assert_eq!(bfun(&["verify", "nothing"]).status.code(), Some(2));
    assert_eq!(
        bfun(&["verify", "bernstein", "--n", "2", "--k", "9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bfun(&["verify", "shift", "--n", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn large_runs_print_estimate_and_need_force() {
    let o = bfun(&["bfunction", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(
        e.contains("memory estimate") && e.contains("C(20+10, 10)"),
        "{e}"
    );
    assert!(e.contains("--force"));

    assert_eq!(
        bfun(&["bfunction", "--n", "2", "--max-n", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bfun(&["bfunction", "--n", "2", "--max-n", "1", "--force"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn verify_bernstein_k2() {
    let o = bfun(&["verify", "bernstein", "--n", "2", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["identities"][0]["bhat_k"], "126/1");
    assert_eq!(r["pass"], true);
}

#[test]
fn verify_radial_n3_passes_and_flags_factor_two_form() {
    let o = bfun(&["verify", "radial", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let checks = json(&o)["checks"].as_array().unwrap().clone();
    let info: Vec<&Value> = checks.iter().filter(|c| c["gating"] == false).collect();
    assert_eq!(info.len(), 1);
    assert_eq!(info[0]["pass"], false);
    assert!(checks
        .iter()
        .filter(|c| c["gating"] == true)
        .all(|c| c["pass"] == true));
}

#[test]
fn verify_shift_n2_writes_report_and_generator() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("shift.json");
    let o = bfun(&[
        "verify",
        "shift",
        "--n",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["N"], serde_json::json!([1]));
    assert_eq!(r["pN_factors"], serde_json::json!(["t1-t2"]));
    assert_eq!(r["nullspace_dim"], 1);
    assert_eq!(r["r"], -1);
    assert_eq!(r["matches_ct_formula"], true);
    assert_eq!(r["CT_monic_coeffs"], serde_json::json!(["3/2", "1/1"]));
    let lweyl = fs::read_to_string(dir.path().join("shift.lweyl")).unwrap();
    assert!(lweyl.starts_with("LWEYL n=2\n"));
}

#[test]
fn remaining_targets_n2() {
    for t in ["chart", "semiinvariance", "recursion", "factorization"] {
        let o = bfun(&["verify", t, "--n", "2"]);
        assert_eq!(o.status.code(), Some(0), "{t}: {}", stderr(&o));
        assert_eq!(json(&o)["pass"], true, "{t}");
    }
}

#[test]
fn reports_are_deterministic() {
    let a = bfun(&["verify", "shift", "--n", "2"]);
    let b = bfun(&["verify", "shift", "--n", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn markdown_format() {
    let o = bfun(&["verify", "chart", "--n", "2", "--format", "md"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("# bfun verify chart"));
    assert!(s.contains("| anchor | check | result | detail |"));
    assert!(s.contains("| local chart factorization |"));
}

#[test]
fn cache_env_var_is_used_and_survives_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_bfun"))
            .args(["bfunction", "--n", "2"])
            .env("BFUN_CACHE", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0));
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let path = files[0].as_ref().unwrap().path();
    assert_eq!(run().stdout, first.stdout);
    fs::write(
        &path,
        fs::read_to_string(&path)
            .unwrap()
            .replace("\"payload\":\"0 ", "\"payload\":\"0 7"),
    )
    .unwrap();
    let third = run();
    assert_eq!(third.status.code(), Some(0));
    assert_eq!(third.stdout, first.stdout);
}

#[test]
fn unwritable_cache_warns() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("f");
    fs::write(&blocker, "x").unwrap();
    let o = bfun(&[
        "bfunction",
        "--n",
        "1",
        "--cache",
        blocker.join("c").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("cache disabled"));
}
