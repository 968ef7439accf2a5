use std::io::Write;
use std::process::{Command, Output, Stdio};

fn simds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simds")).args(args).output().expect("spawn simds")
}

fn simds_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_simds"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn simds");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn lines(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn check_gf8_example() {
    let out = simds(&["check", "--json", r#"{"p":2,"m":3,"poly":13,"n":3,"rows":[[6,1,5],[1,6,3],[5,3,6]]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["mds"], true);
    assert_eq!(v["involutory"], false);
    assert_eq!(v["si"], true);
    assert_eq!(v["branch"], "nowhere-zero");
    assert_eq!(v["D"], serde_json::json!([7, 6, 3]));
    assert_eq!(v["c"], 1);
}

#[test]
fn check_2x2_prime_field_gives_witness_pair() {
    let out = simds(&["check", "--json", r#"{"p":11,"m":1,"n":2,"rows":[[7,3],[4,2]]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["si"], true);
    // A^-1 = D1 A D2 over F_11
    let d1: Vec<u64> = serde_json::from_value(v["D1"].clone()).unwrap();
    let d2: Vec<u64> = serde_json::from_value(v["D2"].clone()).unwrap();
    let a = [[7u64, 3], [4, 2]];
    let b: Vec<Vec<u64>> = (0..2).map(|i| (0..2).map(|j| d1[i] * a[i][j] * d2[j] % 11).collect()).collect();
    for i in 0..2 {
        for j in 0..2 {
            let s: u64 = (0..2).map(|k| a[i][k] * b[k][j]).sum::<u64>() % 11;
            assert_eq!(s, u64::from(i == j));
        }
    }
}

#[test]
fn singular_input_reported_in_band() {
    let out = simds(&["check", "--json", r#"{"p":2,"m":2,"poly":7,"n":3,"rows":[[1,1,1],[1,1,1],[1,2,3]]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["si"], false);
    assert_eq!(v["det"], 0);
}

#[test]
fn build_then_check_round_trip() {
    let built = simds(&["build", "--json", r#"{"field":{"p":2,"m":4,"poly":25},"a":[1,2,4],"d":[2,2,9],"x":1,"y":2}"#]);
    assert_eq!(built.status.code(), Some(0));
    let b = json(&built);
    let checked = simds_stdin(&["check", "--json", "-"], &built.stdout);
    assert_eq!(checked.status.code(), Some(0));
    let c = json(&checked);
    assert_eq!(c["si"], true);
    assert_eq!(c["mds"], b["mds"]);
    assert_eq!(c["det"], b["det"]);
    // the associated diagonal is the parameter d up to scale
    let d: Vec<u32> = serde_json::from_value(c["D"].clone()).unwrap();
    let extract = serde_json::json!({ "matrix": b["matrix"], "D": d }).to_string();
    let e = json(&simds(&["extract", "--json", &extract]));
    assert_eq!(e["found"], true);
    assert_eq!((e["x"].clone(), e["y"].clone()), (serde_json::json!(1), serde_json::json!(2)));
}

#[test]
fn input_from_file() {
    let dir = std::env::temp_dir().join(format!("simds-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.json");
    std::fs::write(&path, r#"{"p":2,"m":3,"poly":13,"n":3,"rows":[[6,1,5],[1,6,3],[5,3,6]]}"#).unwrap();
    let out = simds(&["check", "--json", path.to_str().unwrap()]);
    assert_eq!(json(&out)["si"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn count_gf8_both() {
    let out = simds(&["count", "--m", "3", "--poly", "11", "--set", "SI_MDS", "--mode", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let v = &lines(&out)[0];
    assert_eq!(v["formula"], 403368);
    assert_eq!(v["brute_force"], 403368);
    assert_eq!(v["match"], true);
}

#[test]
fn count_gf4_all_sets() {
    let out = simds(&["count", "--m", "2", "--poly", "7", "--mode", "both", "--jobs", "2"]);
    let ls = lines(&out);
    assert_eq!(ls.len(), 8);
    let si = ls.iter().find(|v| v["set"] == "SI_MDS").unwrap();
    assert_eq!(si["formula"], 0);
    let inv = ls.iter().find(|v| v["set"] == "INV_MDS").unwrap();
    assert_eq!(inv["formula"], inv["brute_force"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn formula_only_gf16() {
    let out = simds(&["count", "--m", "4", "--poly", "19", "--set", "SI_MDS", "--mode", "formula"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(lines(&out)[0]["formula"], 127575000u64);
}

#[test]
fn csv_header_and_rows() {
    let out = simds(&["count", "--m", "3", "--poly", "13", "--set", "S1,S2", "--mode", "formula", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut it = text.lines();
    assert_eq!(it.next(), Some("set,q,formula,brute_force,match,seconds"));
    assert_eq!(it.next(), Some("S1,8,35280,,,"));
    assert_eq!(it.next(), Some("S2,8,1176,,,"));
}

#[test]
fn verify_lemmas_gf4() {
    let out = simds(&["verify-lemmas", "--m", "2", "--poly", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(lines(&out).iter().all(|v| v["match"] == true));
}

#[test]
fn curupira_gf8() {
    let v = json(&simds(&["curupira", "--m", "3", "--poly", "11", "--a", "2", "--b", "4"]));
    assert_eq!(v["involutory"], true);
    assert_eq!(v["mds"], v["mds_condition"]);
}

#[test]
fn field_table_gf8() {
    let v = json(&simds(&["field-table", "--m", "3", "--poly", "11"]));
    let els = v["elements"].as_array().unwrap();
    assert_eq!(els.len(), 8);
    assert_eq!(els[2]["inverse"], 5); // x * (x^2 + 1) = x^3 + x = 1 mod x^3 + x + 1
}

#[test]
fn input_errors_exit_2() {
    for args in [
        vec!["count", "--m", "3"],
        vec!["count", "--m", "3", "--poly", "12"],
        vec!["check", "--json", "{not json"],
        vec!["check", "--json", r#"{"p":2,"m":3,"poly":13,"n":2,"rows":[[1,2],[3,9]]}"#],
        vec!["build", "--json", r#"{"field":{"p":2,"m":4,"poly":25},"a":[0,2,4],"d":[2,2,9],"x":1,"y":2}"#],
        vec!["count", "--m", "3", "--poly", "11", "--set", "NOPE"],
        vec!["no-such-command"],
    ] {
        let out = simds(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn budget_exit_3() {
    let out = simds(&["count", "--m", "4", "--poly", "19", "--set", "SI_MDS", "--mode", "both"]);
    assert_eq!(out.status.code(), Some(3));
    let out = simds(&["count", "--m", "4", "--poly", "19", "--set", "INV_MDS", "--mode", "both"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn mismatch_exit_4() {
    // the single closed form for S disagrees with the brute-force count over GF(8)
    let out = simds(&["count", "--m", "3", "--poly", "11", "--set", "S", "--mode", "both"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(lines(&out)[0]["match"], false);
}

#[test]
fn output_identical_across_job_counts() {
    let run = |jobs: &str| simds(&["count", "--m", "3", "--poly", "13", "--mode", "both", "--jobs", jobs]).stdout;
    let one = run("1");
    assert!(!one.is_empty());
    for jobs in ["2", "5"] {
        assert_eq!(run(jobs), one);
    }
}
