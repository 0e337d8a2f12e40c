//! End-to-end tests of the CLI surface: exit codes, JSON shapes, and a few
//! round trips through the subcommands.

use std::process::{Command, Output};

fn wittlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout was not JSON: {} / {:?}",
            e,
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn tables_emits_the_p2_polynomial() {
    let out = wittlab(&["tables", "--S", "1,2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    // P_2 = X_2 + Y_2 - X_1 Y_1, variables ordered X1 < X2 < Y1 < Y2
    let p2 = v["add"]["2"].as_array().unwrap();
    let mut terms: Vec<(Vec<u64>, String)> = p2
        .iter()
        .map(|t| {
            (
                t[0].as_array()
                    .unwrap()
                    .iter()
                    .map(|x| x.as_u64().unwrap())
                    .collect(),
                t[1].as_str().unwrap().to_string(),
            )
        })
        .collect();
    terms.sort();
    assert_eq!(
        terms,
        vec![
            (vec![0, 0, 0, 1], "1".to_string()),
            (vec![0, 1, 0, 0], "1".to_string()),
            (vec![1, 0, 1, 0], "-1".to_string()),
        ]
    );
}

#[test]
fn eval_and_ghost_round_trip() {
    let out = wittlab(&[
        "eval",
        "--ring",
        r#"{"kind":"Integers"}"#,
        "--S",
        "1,2,4",
        "--expr",
        "teich(3) + V(2, teich(1))",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let witt = v["witt"].clone();
    assert_eq!(witt["components"], serde_json::json!([3, 1, 0]));

    let ghost = wittlab(&["ghost", "--json", &witt.to_string()]);
    assert!(ghost.status.success());
    let g = stdout_json(&ghost);
    assert_eq!(g["components"], serde_json::json!([3, 11, 83]));

    let back = wittlab(&["fromghost", "--json", &g.to_string()]);
    assert!(back.status.success());
    assert_eq!(stdout_json(&back)["components"], witt["components"]);
}

#[test]
fn domain_errors_exit_1_with_structured_json() {
    // (0, 1) is not in the ghost image over Z
    let out = wittlab(&[
        "fromghost",
        "--json",
        r#"{"S":[1,2],"ring":{"kind":"Integers"},"components":[0,1]}"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["error"], "NotInGhostImage");
    assert!(v["detail"].as_str().is_some());

    // type errors from the expression language
    let out2 = wittlab(&[
        "eval",
        "--ring",
        r#"{"kind":"Integers"}"#,
        "--S",
        "1,2,4",
        "--expr",
        "V(7, teich(1))",
    ]);
    assert_eq!(out2.status.code(), Some(1));
    assert_eq!(stdout_json(&out2)["error"], "TypeError");
}

#[test]
fn usage_errors_exit_2() {
    let out = wittlab(&["tables"]);
    assert_eq!(out.status.code(), Some(2));
    let out2 = wittlab(&["no-such-command"]);
    assert_eq!(out2.status.code(), Some(2));
}

#[test]
fn series_round_trip_and_root() {
    let witt = r#"{"S":[1,2,3],"ring":{"kind":"PrimeField","p":7},"components":[2,5,1]}"#;
    let to = wittlab(&["series", "to", "--json", witt]);
    assert!(to.status.success());
    let series = stdout_json(&to);
    let from = wittlab(&["series", "from", "--json", &series.to_string()]);
    assert!(from.status.success());
    assert_eq!(stdout_json(&from)["components"], serde_json::json!([2, 5, 1]));

    // square root of ((1 - 3t))^2 over F_7
    let sq = r#"{"ring":{"kind":"PrimeField","p":7},"coefficients":[1,2,0]}"#;
    let root = wittlab(&["series", "root", "--l", "2", "--json", sq]);
    assert!(root.status.success());
    let r = stdout_json(&root);
    // (1 + 4t + ...)^2 = 1 + t + ... check by re-squaring through frob? just
    // verify the first coefficient doubles correctly: 2 c1 = 1 mod 7 => c1 = 4
    assert_eq!(r["coefficients"][0], serde_json::json!(4));
}

#[test]
fn zannier_and_semigroup_reports() {
    let count = wittlab(&["zannier", "count", "--p", "2", "--m", "3"]);
    assert!(count.status.success());
    assert_eq!(
        stdout_json(&count),
        serde_json::json!({"representable": 4, "total": 8})
    );

    let factor = wittlab(&[
        "zannier", "factor", "--p", "2", "--m", "3", "--j", "2", "--q", "[[0,1],[1],[1,1]]",
    ]);
    assert!(factor.status.success());
    let f = stdout_json(&factor);
    assert!(f["roots"].as_array().is_some());

    let iso = wittlab(&["semigroup", "iso", "--p", "2", "--k", "1", "--n", "2"]);
    assert!(iso.status.success());
    let v = stdout_json(&iso);
    assert_eq!(v["quotient_size"], serde_json::json!(4));
    assert_eq!(v["bijective"], serde_json::json!(true));

    let galois = wittlab(&["galois", "iso", "--p", "2", "--k", "1", "--n", "2"]);
    assert!(galois.status.success());
    let g = stdout_json(&galois);
    assert_eq!(g["size"], serde_json::json!(4));

    let ideal = wittlab(&["semigroup", "ideal", "--p", "2", "--k", "1", "--n", "2"]);
    assert!(ideal.status.success());
    assert_eq!(stdout_json(&ideal)["quotient_size"], serde_json::json!("4"));
}

#[test]
fn drw_verify_reports_pass() {
    let out = wittlab(&["drw", "verify", "--S", "1,2,3,6", "--vars", "2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let identities = v["identities"].as_array().unwrap();
    assert_eq!(identities.len(), 9);
    for i in identities {
        assert_eq!(i["failures"], serde_json::json!(0));
    }
}
