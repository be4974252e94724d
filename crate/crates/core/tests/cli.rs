use std::process::Command;

use dynaport::cli::run;
use serde_json::Value;

const COMMANDS: &[(&str, &[&str])] = &[
    (
        "portrait",
        &["portrait", "--map", "x^2+1", "--alpha", "2", "--prime", "7"],
    ),
    (
        "portrait",
        &[
            "portrait", "--map", "x^2+t", "--base", "ff", "--alpha", "t", "--place", "t+1",
        ],
    ),
    (
        "search",
        &[
            "search", "--map", "x^2+1", "--alpha", "2", "--m", "1", "--n", "2", "--pmax", "2000",
        ],
    ),
    (
        "admissible",
        &[
            "admissible",
            "--map",
            "x^2+1",
            "--alpha",
            "2",
            "--max-m",
            "3",
            "--max-n",
            "2",
        ],
    ),
    (
        "admissible",
        &["admissible", "--map", "x^2-1", "--alpha", "3", "--m", "1"],
    ),
    (
        "height",
        &["height", "--map", "x^2-2", "--alpha", "1/3", "--tol", "1e-3"],
    ),
    (
        "height",
        &[
            "height", "--map", "x^2+t", "--base", "ff", "--alpha", "t^2", "--tol", "1e-2",
        ],
    ),
    ("gleason", &["gleason", "--n-max", "4"]),
    (
        "ff-search",
        &["ff-search", "--map", "x^2+t", "--alpha", "0", "--m", "0", "--n", "2"],
    ),
    ("verify", &["verify", "--example", "counterexamples"]),
];

fn go(args: &[&str], threads: &str) -> dynaport::cli::Outcome {
    run(["dynaport", "--threads", threads]
        .into_iter()
        .chain(args.iter().copied()))
}

#[test]
fn every_command_emits_versioned_json() {
    for (name, args) in COMMANDS {
        let o = go(args, "2");
        assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", o.stdout));
        assert_eq!(v["schema_version"], 1, "{args:?}");
        assert_eq!(v["command"], *name, "{args:?}");
        assert_eq!(v["partial"], false, "{args:?}");
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    for (_, args) in COMMANDS {
        assert_eq!(go(args, "1").stdout, go(args, "4").stdout, "{args:?}");
    }
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_dynaport");
    let status = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .env("DYNAPORT_THREADS", "2")
            .output()
            .unwrap()
    };
    let ok = status(&["portrait", "--map", "x^2+1", "--alpha", "2", "--prime", "5"]);
    assert_eq!(ok.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(status(&["portrait", "--map", "x^2+1"]).status.code(), Some(2));
    assert_eq!(
        status(&["ff-search", "--map", "x^2+t", "--alpha", "t", "--m", "9", "--n", "9"])
            .status
            .code(),
        Some(3)
    );
    let capped = status(&["height", "--map", "x^2+t", "--base", "ff", "--alpha", "t^2"]);
    assert_eq!(capped.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&capped.stdout).unwrap();
    assert_eq!(v["partial"], true);
    assert!(v["canonical_height"]["partial_estimate"].is_number());
    let preperiodic = status(&["search", "--map", "x^2", "--alpha", "1", "--m", "0", "--n", "1"]);
    assert_eq!(
        preperiodic.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&preperiodic.stderr)
    );
}
