use std::process::{Command, Output};

use lucaspf_core::lucas::term_at;
use lucaspf_core::{pf_fast_reject, validate_params, SeqKind};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use proptest::prelude::*;

fn lucaspf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lucaspf")).args(args).env_remove("LUCASPF_PRECISION_BITS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn unit_bounds_report() {
    let o = lucaspf(&["bounds", "--case", "unit", "--r", "1", "--s", "1", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["finalBound"], 150);
    assert_eq!(doc["case"], "unit");
    // Value sorts keys, so check the emitted order on the text
    let text = stdout(&o);
    let at: Vec<usize> = ["\"name\"", "\"parity\"", "\"omega\"", "\"phiBound\"", "\"variant\"", "\"computed\"", "\"paper\"", "\"decisive\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn case_follows_parameters() {
    let o = lucaspf(&["bounds", "--r", "1", "--s", "1", "--kind", "V"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(lucaspf(&["bounds", "--r", "1", "--s", "-1"]).status.code(), Some(2));
    assert!(text.starts_with("case unit, sequence V"), "{text}");
    assert!(text.contains("final bound 75 (stated 75)"));
}

#[test]
fn factorial_queries() {
    let o = lucaspf(&["pf", "39916800", "--decompose"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "11!"));
    let o = lucaspf(&["pf", "-144", "--decompose"]);
    let text = stdout(&o);
    assert!(text.contains("-3!*4!") && text.contains("-2!*2!*3!*3!"), "{text}");
    let o = lucaspf(&["pf", "1001"]);
    assert!(stdout(&o).contains("not a product of factorials"));
    assert!(stdout(&o).contains("Odd"));
}

#[test]
fn search_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("hits.csv");
    let json = dir.path().join("hits.json");
    let o = lucaspf(&[
        "search", "--r", "1", "--s", "1", "--max-n", "150", "--csv", csv.to_str().unwrap(), "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("exhaustive"));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(
        rows,
        "index,kind,digits,witness,trivial\n1,U,1,1,true\n2,U,1,1,true\n3,U,1,2!,false\n6,U,1,2!*2!*2!,false\n12,U,3,3!*4!,false\n"
    );
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["coverage"], "exhaustive");
    assert_eq!(doc["hits"].as_array().unwrap().len(), 5);
}

#[test]
fn partial_searches_say_so() {
    let o = lucaspf(&["search", "--r", "1", "--s", "-3", "--max-n", "200", "--json", "-"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["coverage"], "partial");
    assert_eq!(doc["upTo"], 200);
    assert_eq!(doc["bound"], 300_000);
}

#[test]
fn cyclotomic_query() {
    let o = lucaspf(&["cyclotomic", "--r", "1", "--s", "1", "--n", "13"]);
    let text = stdout(&o);
    assert!(text.contains("Phi_13 = 233") && text.contains("M_13 = 233"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(lucaspf(&["search", "--r", "2", "--s", "-1", "--max-n", "10"]).status.code(), Some(2));
    assert_eq!(lucaspf(&["search", "--r", "2", "--s", "4", "--max-n", "10"]).status.code(), Some(2));
    assert_eq!(lucaspf(&["search", "--r", "1", "--s", "1", "--min-n", "0"]).status.code(), Some(2));
    assert_eq!(lucaspf(&["bounds", "--case", "unit", "--r", "1", "--s", "2"]).status.code(), Some(2));
    assert_eq!(lucaspf(&["pf", "0"]).status.code(), Some(2));
    assert_eq!(lucaspf(&["pf", "twelve"]).status.code(), Some(2));
    assert_eq!(lucaspf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lucaspf(&["bounds", "--precision-bits", "4"]).status.code(), Some(2));
}

#[test]
fn precision_from_environment() {
    let run = |bits: &str| {
        Command::new(env!("CARGO_BIN_EXE_lucaspf"))
            .args(["bounds", "--case", "unit", "--json", "-"])
            .env("LUCASPF_PRECISION_BITS", bits)
            .output()
            .unwrap()
    };
    assert_eq!(run("3").status.code(), Some(2));
    let hi = run("256");
    assert_eq!(hi.status.code(), Some(0));
    assert_eq!(stdout(&hi), stdout(&lucaspf(&["bounds", "--case", "unit", "--json", "-"])));
}

#[test]
fn verify_suites() {
    let o = lucaspf(&["verify", "--suite", "identities"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 3);
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["bounds", "--case", "real", "--json", "-", "--workers", "3"];
    assert_eq!(lucaspf(&args).stdout, lucaspf(&args).stdout);
}

/// Plain descending division by factorials.
fn brute_member(v: &BigInt) -> bool {
    fn go(v: &BigInt, top: usize, f: &[BigInt]) -> bool {
        v.is_one() || (2..=top).rev().any(|m| &f[m] <= v && v.is_multiple_of(&f[m]) && go(&(v / &f[m]), m, f))
    }
    let mut f = vec![BigInt::one(), BigInt::one()];
    while f.last().unwrap() <= v {
        let m = f.len();
        let next = &f[m - 1] * m;
        f.push(next);
    }
    go(v, f.len() - 1, &f)
}

fn valid_params() -> impl Strategy<Value = (i64, i64)> {
    (-15i64..=15, -15i64..=15).prop_filter("invalid pair", |&(r, s)| validate_params(r, s).is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    // the cheap filter never discards a term the full test accepts
    #[test]
    fn fast_filter_is_sound((r, s) in valid_params()) {
        let p = validate_params(r, s).unwrap();
        for kind in [SeqKind::U, SeqKind::V] {
            for n in 1..=300 {
                let t = term_at(&p, kind, n).value;
                if t == 0.into() {
                    continue;
                }
                if pf_fast_reject(&t).is_some() {
                    prop_assert!(!brute_member(&t.abs()), "({}, {}) {:?} n = {}", r, s, kind, n);
                }
            }
        }
    }
}
