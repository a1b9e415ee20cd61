use std::process::Command;

fn polylab(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_polylab")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn exit_codes() {
    let (code, out) = polylab(&["checks", "classify"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("suite,check,value,tolerance,status\n"));
    assert_eq!(polylab(&["checks", "bogus"]).0, 2);
    assert_eq!(polylab(&["trichotomy", "--m", "2", "--k", "2"]).0, 2);
    assert_eq!(polylab(&["trichotomy", "--eps-list", "1/8,1/4"]).0, 2);
    assert_eq!(polylab(&["frobnicate"]).0, 2);
}

#[test]
fn classify_and_cell_k() {
    let (code, out) = polylab(&["classify", "--m", "2", "--k", "1", "--alpha", "1,1.5,2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "m,k,alpha,threshold,regime\n2,1,1,1.5,Degenerate\n2,1,1.5,1.5,Critical\n2,1,2,1.5,Stable\n");
    let (code, out) = polylab(&["cell-k", "--m", "2", "--b", "2+cos"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["K"].as_f64().unwrap() - 6.0 * std::f64::consts::PI.powi(3)).abs() < 1e-9);
}

#[test]
fn trichotomy_files() {
    let dir = std::env::temp_dir().join(format!("polylab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("run.json");
    std::fs::write(&config, r#"{"alphas": [2.0], "epsilons": [0.25], "elements": [8, 8], "elements_per_period": 4, "n_eigs": 2}"#).unwrap();
    let csv = dir.join("run.csv");
    let (code, _) = polylab(&["trichotomy", "--config", config.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(std::fs::read_to_string(dir.join("run.gp")).unwrap().contains("'run.csv'"));
    assert!(std::fs::read_to_string(dir.join("run.json")).unwrap().contains("\"diagnostics\""));
    std::fs::remove_dir_all(&dir).unwrap();
}
