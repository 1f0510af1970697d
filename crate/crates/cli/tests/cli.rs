use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffspecial"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn zeta_value_has_manifest_and_unit_leading_term() {
    let out = run(&["zeta", "--q", "3", "--n", "2", "--prec", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let m = &v["manifest"];
    assert_eq!(m["q"], 3);
    assert_eq!(m["p"], 3);
    assert_eq!(m["e"], 1);
    assert_eq!(m["precision"], 60);
    assert_eq!(m["command"], "zeta");
    assert_eq!(v["result"]["valuation"]["exact"], 0);
    assert_eq!(
        v["result"]["value"]["terms"][0],
        serde_json::json!([0, [1]])
    );
}

#[test]
fn gamma_over_pi_is_rational_for_q2() {
    let out = run(&[
        "gamma",
        "--q",
        "2",
        "--r",
        "1/x",
        "--recognize-over",
        "pi",
        "--prec",
        "60",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["recognition"]["outcome"], "recognized");
}

#[test]
fn pi_tilde_lives_on_the_theta_tilde_component() {
    let out = run(&["pi-tilde", "--q", "3", "--prec", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let comps = json(&out)["result"]["value"].as_array().unwrap().clone();
    assert_eq!(comps.len(), 2);
    assert!(comps[0]["terms"].as_array().unwrap().is_empty());
    assert_eq!(comps[1]["terms"][0], serde_json::json!([-1, [1]]));
}

#[test]
fn verify_examples_exit_zero() {
    for args in [
        vec![
            "verify",
            "reflection",
            "--q",
            "3",
            "--r",
            "1/x",
            "--prec",
            "60",
        ],
        vec!["verify", "frobenius", "--q", "3", "--n", "1", "--m", "1"],
        vec!["verify", "motive", "--q", "3", "--n", "2", "--T", "30"],
        vec![
            "verify",
            "euler-carlitz",
            "--q",
            "3",
            "--n",
            "2",
            "--prec",
            "60",
        ],
    ] {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn trdeg_examples() {
    let cases: [(&[&str], u64); 3] = [
        (
            &[
                "trdeg", "--which", "joint", "--q", "3", "--f", "θ", "--s", "4",
            ],
            3,
        ),
        (&["trdeg", "--which", "zeta", "--q", "3", "--s", "4"], 2),
        (&["trdeg", "--which", "gamma", "--q", "2", "--f", "x"], 1),
    ];
    for (args, want) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["result"]["value"], want, "{args:?}");
    }
}

#[test]
fn precondition_failures_exit_three() {
    for args in [
        vec!["zeta", "--q", "6", "--n", "1"],
        vec!["verify", "euler-carlitz", "--q", "3", "--n", "3"],
        vec!["gamma", "--q", "3", "--r", "0"],
        vec!["verify", "reflection", "--q", "3", "--r", "x"],
        vec![
            "zeta",
            "--q",
            "3",
            "--n",
            "2",
            "--engine",
            "enumeration",
            "--budget",
            "0",
        ],
        vec!["trdeg", "--which", "gamma", "--q", "3"],
        vec!["no-such-command"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn unrecognized_exits_two() {
    // for q = 3, Γ(1/θ)/π̃ is not in k(θ̃) at this precision
    let out = run(&[
        "gamma",
        "--q",
        "3",
        "--r",
        "1/x",
        "--recognize-over",
        "pi",
        "--prec",
        "40",
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        json(&out)["result"]["recognition"]["outcome"],
        "unrecognized-at-precision"
    );
}

#[test]
fn identical_manifests_give_identical_bytes() {
    for args in [
        vec![
            "trdeg", "--which", "gamma", "--q", "3", "--f", "x^3+2x+1", "--seed", "7",
        ],
        vec![
            "verify",
            "anderson-thakur",
            "--q",
            "3",
            "--n",
            "2",
            "--prec",
            "60",
        ],
        vec!["zeta", "--q", "4", "--n", "3", "--prec", "50"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn warnings_go_to_stderr() {
    let out = run(&[
        "zeta",
        "--q",
        "3",
        "--n",
        "1",
        "--prec",
        "40",
        "--engine",
        "enumeration",
        "--budget",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(json(&out)["result"].get("warnings").is_none());
}
