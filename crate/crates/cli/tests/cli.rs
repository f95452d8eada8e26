use std::process::Command;

use serde_json::Value;

fn csl(cache: &std::path::Path, args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_csl"))
        .args(args)
        .env("CSL_CACHE_DIR", cache)
        .output()
        .expect("runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), v, String::from_utf8(out.stderr).unwrap())
}

#[test]
fn factor_and_char() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v, _) = csl(dir.path(), &["factor", "30"]);
    assert_eq!(code, 0);
    assert_eq!(v["primes"], serde_json::json!([2, 3, 5]));
    let (_, v, _) = csl(dir.path(), &["factor", "12"]);
    assert_eq!(v["squarefree"], false);

    let (code, v, _) = csl(dir.path(), &["char", "eval", "--q", "15", "--indices", "1,2", "--n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["re"], 0.0);
    let (code, _, err) = csl(dir.path(), &["char", "eval", "--q", "15", "--indices", "1", "--n", "5"]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
}

#[test]
fn jcount_uses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let (_, v, _) = csl(dir.path(), &["jcount", "--r", "2", "--d", "2", "--V", "10"]);
    assert_eq!(v["count"], 190);
    assert_eq!(v["source"], "computed");
    let (_, v, _) = csl(dir.path(), &["jcount", "--r", "2", "--d", "2", "--V", "10"]);
    assert_eq!(v["source"], "cache");
    let (_, v, _) = csl(dir.path(), &["cache", "ls"]);
    assert_eq!(v["entries"].as_array().unwrap().len(), 1);
    let (_, v, _) = csl(dir.path(), &["jcount", "--r", "2", "--d", "1", "--V", "3", "--method", "naive"]);
    assert_eq!(v["count"], 19);
    let (_, v, _) = csl(dir.path(), &["cache", "clear"]);
    assert_eq!(v["removed"], true);
}

#[test]
fn energies() {
    let dir = tempfile::tempdir().unwrap();
    let (_, v, _) = csl(dir.path(), &["energy", "cong", "--q", "5", "--n", "2", "--u", "2"]);
    assert_eq!(v["energy"], 6);
    let (_, a, _) = csl(dir.path(), &["energy", "ffbox", "--q", "7", "--n", "2", "--h", "2", "--u", "2"]);
    let (_, b, _) = csl(
        dir.path(),
        &["energy", "ffbox", "--q", "7", "--n", "2", "--h", "2", "--u", "2", "--method", "naive"],
    );
    assert_eq!(a["energy"], b["energy"]);
    let (code, _, _) = csl(dir.path(), &["energy", "cong", "--q", "5", "--n", "4", "--u", "2"]);
    assert_eq!(code, 1);
    let (code, _, _) = csl(
        dir.path(),
        &["--override-hypotheses", "energy", "cong", "--q", "5", "--n", "4", "--u", "2"],
    );
    assert_eq!(code, 0);
    let (_, v, _) = csl(
        dir.path(),
        &["energy", "linforms", "--q", "13", "--matrix", "1,0;0,1", "--h", "3", "--u", "3"],
    );
    assert!(v["energy"].as_u64().unwrap() >= 81);
}

#[test]
fn verify_writes_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("b.csv");
    let base = ["verify", "thm1", "--r-d", "4", "--q-max", "60", "--seed", "3"];
    let (code, _, err) = csl(dir.path(), &[&base[..], &["--out", a.to_str().unwrap()]].concat());
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("PASS"));
    let (code, _, _) = csl(
        dir.path(),
        &[&base[..], &["--threads", "3", "--out", b.to_str().unwrap(), "--csv", c.to_str().unwrap()]].concat(),
    );
    assert_eq!(code, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(std::fs::read_to_string(&c).unwrap().starts_with("index,label"));

    let (code, _, err) = csl(dir.path(), &["verify", "thm1"]);
    assert_eq!(code, 1);
    assert!(err.contains("r_d"));
}

#[test]
fn verify_fails_on_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v, _) = csl(dir.path(), &["verify", "lemma3", "--q-max", "30", "--v-max", "5", "--threshold", "1e-6"]);
    assert_eq!(code, 2);
    assert_eq!(v["pass"], false);
}

#[test]
fn compare_exponents_table() {
    let dir = tempfile::tempdir().unwrap();
    let (_, v, _) = csl(
        dir.path(),
        &["compare-exponents", "--n", "100", "--q", "1000", "--d", "2", "--r", "5"],
    );
    assert!((v["chang_epsilon"].as_f64().unwrap() - 0.0025 / 48.4).abs() < 1e-12);
    let (code, _, err) = csl(
        dir.path(),
        &["compare-exponents", "--n", "100", "--q", "1000", "--d", "2", "--r", "3"],
    );
    assert_eq!(code, 1);
    assert!(err.to_lowercase().contains("denominator"));
}
