use std::path::Path;
use std::process::Command;

fn welcher() -> Command {
    Command::new(env!("CARGO_BIN_EXE_welcher"))
}

fn without_timestamp(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn same_seed_gives_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let runs = ["one", "two"].map(|name| {
        let out = dir.path().join(name);
        let status = welcher()
            .args([
                "simulate",
                "--case",
                "all",
                "--mode",
                "1d",
                "--seed",
                "4",
                "--photons",
                "--flux",
                "2e4",
            ])
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        out
    });
    assert_eq!(
        without_timestamp(&runs[0].join("summary.json")),
        without_timestamp(&runs[1].join("summary.json"))
    );
    for f in ["events.csv", "profile_b.csv"] {
        assert_eq!(
            std::fs::read(runs[0].join(f)).unwrap(),
            std::fs::read(runs[1].join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn single_case_with_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "mode = \"1d\"\nwire_thickness = 150e-6\n").unwrap();
    let out = dir.path().join("out");
    let status = welcher()
        .args(["simulate", "--case", "c", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(v["geometry"]["wire_thickness"], 150e-6);
    assert_eq!(v["scenarios"][0]["label"], "c");
    assert!(v["reductions"].is_null() && v["coincidence"].is_null());
    assert!(out.join("profile_c.csv").is_file());
    assert!(!out.join("events.csv").exists());
}

#[test]
fn metrics_subcommand_reports_the_chain() {
    let out = welcher().arg("metrics").output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let m = &v["metrics"];
    assert!((m["v_wire_limited"]["value"].as_f64().unwrap() - 0.951).abs() < 1e-3);
    assert!((m["intensity_ratio"].as_f64().unwrap() - 4.70).abs() < 0.01);
    assert!((m["v_star_lower_bound"]["value"].as_f64().unwrap() - 0.649).abs() < 0.005);
    assert!((m["k_b"]["value"].as_f64().unwrap() - 0.9721).abs() < 1e-3);
    assert_eq!(m["gy_violated"], true);

    let out = welcher()
        .args([
            "metrics",
            "--w2",
            "98.87",
            "--leak",
            "0",
            "--blocked-frac",
            "0.001",
        ])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["metrics"]["k_b"]["value"], 1.0);
}

#[test]
fn sweep_approaches_full_visibility() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let status = welcher()
        .args([
            "sweep",
            "--param",
            "wire-thickness",
            "--from",
            "0.3",
            "--to",
            "0",
            "--steps",
            "7",
            "--out",
        ])
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("wire_thickness_mm,v_wire_limited,"));
    let v: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(v.len(), 7);
    assert!(v.windows(2).all(|p| p[1] > p[0]));
    assert_eq!(*v.last().unwrap(), 1.0);
}

#[test]
fn failures_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x").to_string_lossy().into_owned();
    let cases: [(&[&str], &str); 4] = [
        (
            &[
                "simulate", "--grid-n", "1000", "--mode", "1d", "--out", &out,
            ],
            "power of two",
        ),
        (
            &["simulate", "--config", "/nonexistent.toml", "--out", &out],
            "/nonexistent.toml",
        ),
        (&["metrics", "--w2", "0"], "which-way"),
        (
            &[
                "sweep",
                "--param",
                "wire-thickness",
                "--from",
                "0",
                "--to",
                "1",
                "--steps",
                "0",
            ],
            "steps",
        ),
    ];
    for (args, needle) in cases {
        let res = welcher().args(args).output().unwrap();
        assert_eq!(res.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&res.stderr);
        assert!(
            err.starts_with("error: ") && err.contains(needle),
            "{args:?}: {err}"
        );
    }
}
