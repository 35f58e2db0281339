use std::process::{Command, Output};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbicalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn lattes_report_for_conjugated_example() {
    let v = json(&["lattes", "48*z/(4*z+3)^2"]);
    assert_eq!(v["schema"], "orbicalc/1");
    assert_eq!(v["report"]["class"], "GeneralizedLattes");
    let marks: Vec<(String, u64)> = v["report"]["maximal"]["marks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| {
            (
                m["point"].as_str().unwrap().to_string(),
                m["nu"].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(marks, vec![("0".to_string(), 2), ("inf".to_string(), 2)]);
}

/// x ↦ 144x(x+3)/(x−9)² on ℙ¹(ℚ), with ∞ as `None`.
fn step(x: &Option<BigRational>) -> Option<BigRational> {
    let c = |n: i64| BigRational::from_integer(BigInt::from(n));
    match x {
        None => Some(c(144)),
        Some(x) => {
            let d = x - c(9);
            if d.is_zero() {
                None
            } else {
                Some(c(144) * x * (x + c(3)) / (&d * &d))
            }
        }
    }
}

fn is_square(x: &Option<BigRational>) -> bool {
    let Some(x) = x else { return true };
    let sq = |n: &BigInt| !n.is_negative() && &(n.sqrt() * n.sqrt()) == n;
    sq(x.numer()) && sq(x.denom())
}

#[test]
fn orbit_scan_agrees_with_direct_iteration() {
    let v = json(&["orbit-scan", "144*z*(z+3)/(z-9)^2", "z^2", "1", "--n", "25"]);
    let membership = v["report"]["membership"].as_str().unwrap().to_string();
    assert_eq!(membership.len(), 26);
    let mut x = Some(BigRational::from_integer(BigInt::from(1)));
    for (k, bit) in membership.chars().take(9).enumerate() {
        assert_eq!(bit == '1', is_square(&x), "iterate {k}");
        x = step(&x);
    }
    assert!(membership.starts_with("1111"));
    assert!(membership[4..]
        .chars()
        .enumerate()
        .all(|(i, b)| (b == '1') == (i % 2 == 1)));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["analyze", "48*z/(4*z+3)^2", "--json"],
        vec!["curve-genus", "z^2", "z^3", "--dmax", "2"],
        vec!["orbit-scan", "144*z*(z+3)/(z-9)^2", "z^2", "1", "--n", "12"],
    ] {
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn malformed_input_exits_with_two() {
    assert_eq!(run(&["analyze", "z^2+"]).status.code(), Some(2));
    assert_eq!(
        run(&["analyze", "z^2", "--precision-bits", "20"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["orbit-scan", "z^2", "z^2", "sqrt(2)"]).status.code(),
        Some(2)
    );
}

#[test]
fn exhausted_budget_exits_with_three_and_keeps_the_report() {
    // iterates outgrow the default height cap long before 200 steps
    let out = run(&[
        "orbit-scan",
        "144*z*(z+3)/(z-9)^2",
        "z^2",
        "1",
        "--n",
        "200",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["schema"], "orbicalc/1");
    assert!(v["error"]["kind"].is_string());
    assert!(v["report"]["membership"]
        .as_str()
        .unwrap()
        .starts_with("1111"));
}
