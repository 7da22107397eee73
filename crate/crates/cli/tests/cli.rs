use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_periodlab")).args(args).env_remove("PERIODLAB_TOL").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn cx(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn ks_count_emits_m() {
    assert_eq!(json(&["ks-count", "--n", "2", "--d", "4"])["m"], 19);
}

#[test]
fn j_in_both_normalizations() {
    let v = json(&["j", "--tau", "i"]);
    let (p, _) = cx(&v["j_normalized"]);
    let (k, _) = cx(&v["j_classical"]);
    assert!((p - 1.0).abs() < 1e-12 && (k - 1728.0).abs() < 1e-9);
}

#[test]
fn j_coefficients() {
    let v = json(&["j-qexp", "--terms", "4"]);
    let coeffs: Vec<(i64, i64)> =
        v["coefficients"].as_array().unwrap().iter().map(|t| (t[0].as_i64().unwrap(), t[1].as_i64().unwrap())).collect();
    assert_eq!(&coeffs[..4], &[(-1, 1), (0, 744), (1, 196884), (2, 21493760)]);
}

#[test]
fn monodromy_is_unipotent() {
    let v = json(&["monodromy", "--center", "4,1.5396007178390021", "--radius", "0.3"]);
    assert_eq!(v["trace"], 2);
    assert_eq!(v["det"], 1);
    let m: Vec<i64> = v["matrix"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap().iter().map(|x| x.as_i64().unwrap())).collect();
    // (M - I)^2 = 0
    let (a, b, c, d) = (m[0] - 1, m[1], m[2], m[3] - 1);
    assert_eq!([a * a + b * c, a * b + b * d, c * a + d * c, c * b + d * d], [0, 0, 0, 0]);
    assert_ne!(m, vec![1, 0, 0, 1]);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["periods", "--t2", "3", "--t3", "1"]).status.code(), Some(3));
    assert_eq!(run(&["periods", "--t2", "x", "--t3", "1"]).status.code(), Some(2));
    assert_eq!(run(&["periods", "--t2", "4", "--t3", "0", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(run(&["periods", "--t2", "4", "--t3", "0", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["domain-dims", "--weight", "3", "--hodge-numbers", "1,2,2,1"]).status.code(), Some(2));
    let err: Value = serde_json::from_slice(&run(&["periods", "--t2", "3", "--t3", "1"]).stderr).unwrap();
    assert_eq!(err["kind"], "numerical");
}

#[test]
fn output_is_reproducible_and_lossless() {
    let args = ["periods", "--t2", "2+i", "--t3", "-0.5+0.3i"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let t = periodlab_core::periods::WeierstrassPoint::new(
        periodlab_core::numerics::c(2.0, 1.0),
        periodlab_core::numerics::c(-0.5, 0.3),
    );
    let p = periodlab_core::periods::period_matrix(&t, 1e-10).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let (re, im) = cx(&v["period_matrix"][i][j]);
            assert_eq!((re, im), (p.entries[i][j].re, p.entries[i][j].im));
        }
    }
}

#[test]
fn tolerance_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_periodlab"))
        .args(["periods", "--t2", "4", "--t3", "0"])
        .env("PERIODLAB_TOL", "1e-8")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["inputs"]["tol"], 1e-8);
}

#[test]
fn sweep_rows_follow_the_grid() {
    let out = run(&["tau", "--sweep-t2", "3:5:3", "--sweep-t3", "-0.5:0.5:2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("t2_re,t2_im,t3_re,t3_im,tau_re"));
    let first: Vec<&str> = lines[1].split(',').collect();
    let last: Vec<&str> = lines[6].split(',').collect();
    assert_eq!((first[0], first[2]), ("3.0", "-0.5"));
    assert_eq!((last[0], last[2]), ("5.0", "0.5"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));
    // a sweep row agrees with the single-point command
    let single = json(&["tau", "--t2", "3", "--t3", "-0.5"]);
    let (re, _) = cx(&single["tau"]);
    assert_eq!(first[4].parse::<f64>().unwrap(), re);
    let again = run(&["tau", "--sweep-t2", "3:5:3", "--sweep-t3", "-0.5:0.5:2"]);
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn json_sweep_records_failures() {
    // t2 = 3, t3 = 1 lies on the discriminant
    let v = json(&["periods", "--t2", "3", "--sweep-t3", "0:1:3", "--format", "json"]);
    assert_eq!(v["command"], "periods");
    assert_eq!(v["diagnostics"]["points"], 3);
    assert_eq!(v["diagnostics"]["failed"], 1);
    assert_eq!(v["rows"][0]["status"], "ok");
    assert!(v["rows"][2]["values"]["det_re"].is_null());
}

#[test]
fn transport_along_file_paths() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path.json");
    std::fs::write(&path, "[[[4, 0], [0, 0]], [\"4.2\", \"0.3+0.1i\"], [4, 0.5]]").unwrap();
    let v = json(&["pf-transport", "--path-file", path.to_str().unwrap()]);
    assert!(v["diagnostics"]["det_drift"].as_f64().unwrap() < 1e-8);
    assert!(v["diagnostics"]["difference_to_default_continuation"].as_f64().unwrap() < 1e-7);

    let lp = dir.path().join("loop.json");
    std::fs::write(&lp, r#"{"loop": {"center": [4, 1.5396007178390021], "radius": 0.3, "turns": 1}}"#).unwrap();
    let v = json(&["pf-transport", "--path-file", lp.to_str().unwrap()]);
    assert_eq!(v["monodromy"][0][0], 1);
    assert!(v["diagnostics"]["integrality_deviation"].as_f64().unwrap() < 1e-4);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[[4, 0]]").unwrap();
    assert_eq!(run(&["pf-transport", "--path-file", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn hodge_check_files() {
    let dir = tempfile::tempdir().unwrap();
    let ell = dir.path().join("ell.json");
    std::fs::write(&ell, r#"{"tau": [0.3, 1.2]}"#).unwrap();
    let v = json(&["hodge-check", "--point-file", ell.to_str().unwrap()]);
    assert_eq!(v["polarized"], true);
    assert_eq!(v["domain"]["dim_D"], 1);

    let lower = dir.path().join("lower.json");
    std::fs::write(&lower, r#"{"tau": "0.3-1.2i"}"#).unwrap();
    let v = json(&["hodge-check", "--point-file", lower.to_str().unwrap()]);
    assert_eq!((v["first_relation"].as_bool(), v["second_relation"].as_bool()), (Some(true), Some(false)));

    // weight 3, h = (1,1,1,1): F^3 = conj v1, F^2 adds v2, F^1 adds conj v2
    let w3 = dir.path().join("w3.json");
    std::fs::write(
        &w3,
        r#"{"weight": 3, "hodge_numbers": [1,1,1,1], "psi": [[0,0,1,0],[0,0,0,1],[-1,0,0,0],[0,-1,0,0]],
            "filtration": [
              [[[0,-1],0,1,0]],
              [[[0,-1],0,1,0], [0,[0,1],0,1]],
              [[[0,-1],0,1,0], [0,[0,1],0,1], [0,[0,-1],0,1]]
            ]}"#,
    )
    .unwrap();
    let v = json(&["hodge-check", "--point-file", w3.to_str().unwrap()]);
    assert_eq!(v["polarized"], true);
    assert_eq!(v["riemann_relations"]["odd_positive"], true);
    assert_eq!(v["domain"]["dim_horizontal"], 2);
    let d = json(&["domain-dims", "--weight", "3", "--hodge-numbers", "1,1,1,1", "--point-file", w3.to_str().unwrap()]);
    assert_eq!(d["dim_D"], 4);
}

#[test]
fn domain_dims_of_siegel_space() {
    let v = json(&["domain-dims", "--weight", "1", "--hodge-numbers", "2,2"]);
    assert_eq!(v["dim_D"], 3);
    assert_eq!(v["hermitian_case"], "Case1");
    assert_eq!(json(&["domain-dims", "--weight", "2", "--hodge-numbers", "1,20,1"])["hermitian_case"], "Case2");
}

#[test]
fn poincare_functionals() {
    let v = json(&["poincare", "--functional", "det", "--height", "50", "--t2", "4", "--t3", "0.5"]);
    assert_eq!(v["series"]["converged"], true);
    assert!(v["diagnostics"]["det_error"].as_f64().unwrap() < 1e-8);
    let v = json(&["poincare", "--functional", "x11^-4", "--height", "100", "--t2", "4", "--t3", "0.5"]);
    assert_eq!(v["series"]["converged"], true);
    let (r, _) = cx(&v["diagnostics"]["ratio"]);
    assert!((r / v["diagnostics"]["expected_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-4);
    let v = json(&["poincare", "--functional", "x11^0", "--height", "50", "--t2", "4", "--t3", "0.5"]);
    assert_eq!(v["series"]["converged"], false);
    let v = json(&["poincare", "--functional", "one", "--weight", "4", "--height", "100", "--tau", "0.1+1.1i"]);
    assert_eq!(v["series"]["converged"], true);
    assert_eq!(run(&["poincare", "--functional", "x12^2", "--height", "5", "--t2", "4", "--t3", "0"]).status.code(), Some(2));
}

#[test]
fn khodaya_determinant() {
    let v = json(&["khodaya", "--t0", "2", "--t1", "0.5", "--t2", "4", "--t3", "0.3"]);
    assert!(v["diagnostics"]["det_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(run(&["khodaya", "--t0", "0", "--t1", "0", "--t2", "4", "--t3", "0"]).status.code(), Some(2));
}

#[test]
fn eisenstein_values() {
    let v = json(&["eisenstein", "--k", "6", "--tau", "i"]);
    let (re, im) = cx(&v["value"]);
    assert!(re.hypot(im) < 1e-10);
    let v = json(&["eisenstein", "--k", "4", "--omega1", "1+2i", "--omega2", "0.5", "--weight-check", "3", "--seed", "4"]);
    assert!(v["diagnostics"]["q_series_difference"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["diagnostics"]["weight_check"]["pass"], true);
    assert_eq!(run(&["eisenstein", "--k", "3", "--tau", "i"]).status.code(), Some(2));
}
