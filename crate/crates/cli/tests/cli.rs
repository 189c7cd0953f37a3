use std::process::{Command, Output};

use serde_json::Value;

fn detfactor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detfactor")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn primes(v: &Value) -> Vec<(String, u64)> {
    v["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["p"].as_str().unwrap().to_string(), f["e"].as_u64().unwrap()))
        .collect()
}

fn pairs(list: &[(&str, u64)]) -> Vec<(String, u64)> {
    list.iter().map(|&(p, e)| (p.to_string(), e)).collect()
}

#[test]
fn factor_pm1_example() {
    let out = detfactor(&["factor", "--n", "91", "--method", "pm1", "--B", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"], "91");
    assert_eq!(primes(&v), pairs(&[("7", 1), ("13", 1)]));
}

#[test]
fn factor_prime_attaches_certificate() {
    let out = detfactor(&["factor", "--n", "7", "--method", "pm1", "--B", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(primes(&v), pairs(&[("7", 1)]));
    assert_eq!(v["certificate"]["n"], "7");
    assert_eq!(v["certificate"]["sqrt_check"], true);
}

#[test]
fn factor_methods_agree() {
    for method in ["pm1", "pp1", "trial"] {
        let out = detfactor(&["factor", "--n", "720720", "--method", method]);
        assert_eq!(out.status.code(), Some(0), "{method}");
        assert_eq!(primes(&json(&out)), pairs(&[("2", 4), ("3", 2), ("5", 1), ("7", 1), ("11", 1), ("13", 1)]));
    }
}

#[test]
fn phi_factor_example() {
    let out = detfactor(&["phi-factor", "--n", "77", "--phi", "60"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(primes(&json(&out)), pairs(&[("7", 1), ("11", 1)]));
    let out = detfactor(&["phi-factor", "--n", "8633", "--phi", "8448", "--strategy", "random", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(primes(&json(&out)), pairs(&[("89", 1), ("97", 1)]));
}

#[test]
fn graf_phi_success_and_audit() {
    let out = detfactor(&["graf-phi", "--n", "1001", "--phi", "720"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(primes(&json(&out)), pairs(&[("7", 1), ("11", 1), ("13", 1)]));
    let out = detfactor(&["graf-phi", "--n", "1001", "--phi", "700", "--no-trial-guard"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["l2"].is_array() && v["reason"].is_string());
}

#[test]
fn phi_chain_from_file() {
    let dir = std::env::temp_dir().join(format!("detfactor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("chain.txt");
    std::fs::write(&path, "# 15 down to 1\n15 8\n8 4\n4 2\n2 1\n").unwrap();
    let out = detfactor(&["phi-chain", "--n", "15", "--oracle", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(primes(&v["factors"]), pairs(&[("3", 1), ("5", 1)]));
    assert_eq!(v["chain"], serde_json::json!(["15", "8", "4", "2", "1"]));
    assert_eq!(v["oracle_calls"], 4);

    std::fs::write(&path, "15 8\n").unwrap();
    let out = detfactor(&["phi-chain", "--n", "15", "--oracle", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn equal_order_computed() {
    let out = detfactor(&["equal-order", "--n", "360", "--oracle", "compute"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["parts"], serde_json::json!(["5", "3", "2"]));
}

#[test]
fn certify_and_verify_roundtrip() {
    let dir = std::env::temp_dir().join(format!("detfactor-cert-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cert.json");
    let out = detfactor(&["certify", "--n", "1000003", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = detfactor(&["certify", "--verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    cert["lcm"] = Value::String("2".into());
    std::fs::write(&path, cert.to_string()).unwrap();
    let out = detfactor(&["certify", "--verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn composite_gets_no_certificate() {
    let out = detfactor(&["certify", "--n", "561"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["prime"], false);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(detfactor(&["factor", "--n", "abc"]).status.code(), Some(2));
    assert_eq!(detfactor(&["factor", "--n", "18446744073709551616"]).status.code(), Some(2));
    assert_eq!(detfactor(&["factor"]).status.code(), Some(2));
    assert_eq!(detfactor(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(detfactor(&["phi-chain", "--n", "15", "--oracle", "/nonexistent/oracle"]).status.code(), Some(2));
    assert_eq!(detfactor(&["graf-phi", "--n", "91", "--phi", "72", "--delta", "2"]).status.code(), Some(2));
}

#[test]
fn parallelism_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_detfactor"))
            .args(["factor", "--n", "1000000016000000063", "--method", "pm1"])
            .env("DETFACTOR_PARALLELISM", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one.status.code(), four.status.code());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(detfactor(&["--parallelism", "0", "factor", "--n", "91"]).status.code(), Some(2));
}

#[test]
fn bench_is_seeded() {
    let args = ["bench", "--count", "3", "--digits", "5", "--seed", "9"];
    let a = json(&detfactor(&args));
    let b = json(&detfactor(&args));
    let solved = |v: &Value| v["sizes"][0]["methods"].as_array().unwrap().iter().map(|m| m["solved"].clone()).collect::<Vec<_>>();
    assert_eq!(solved(&a), solved(&b));
    assert_eq!(a["sizes"][0]["inputs"], 3);
}
