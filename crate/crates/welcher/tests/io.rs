use std::path::Path;

use welcher::config::{ConfigFile, Overrides};
use welcher::io::{
    read_events, read_profile, read_summary, summary_json, write_events, write_outputs,
    write_profile, write_summary,
};
use welcher::Error;
use welcher_core::scenario::{full_pipeline, PhotonOptions, SimMode};
use welcher_core::{
    Axis, DetectorLabel, ExperimentGeometry, IntensityProfile, PhotonEvent, SimOptions,
};

fn fast() -> SimOptions {
    SimOptions {
        mode: SimMode::OneD,
        ..Default::default()
    }
}

#[test]
fn summary_round_trips() {
    let out = full_pipeline(&ExperimentGeometry::default(), &fast()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    write_summary(&out.summary, &path).unwrap();

    let back = read_summary(&path).unwrap();
    assert!(back.provenance.timestamp.is_some());
    let again = dir.path().join("again.json");
    write_summary(&back, &again).unwrap();
    let strip = |p: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v["provenance"]["timestamp"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&path), strip(&again));
    assert_eq!(back.reductions, out.summary.reductions);
    assert_eq!(back.metrics, out.summary.metrics);
    assert_eq!(back.geometry, out.summary.geometry);
}

#[test]
fn schema_keys_are_stable() {
    let out = full_pipeline(&ExperimentGeometry::default(), &fast()).unwrap();
    let text = summary_json(&out.summary, Path::new("mem")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in [
        "geometry",
        "scenarios",
        "reductions",
        "metrics",
        "coincidence",
        "provenance",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["coincidence"].is_null());
}

#[test]
fn profiles_and_events_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = IntensityProfile {
        axis: Axis::X,
        coordinates: vec![-1e-3, 0.0, 1.25e-3],
        values: vec![0.5, 1.0 / 3.0, 2e-17],
    };
    let path = dir.path().join("profile_a.csv");
    write_profile(&p, &path).unwrap();
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with("x_m,intensity\n"));
    assert_eq!(read_profile(&path).unwrap(), p);

    let events = vec![
        PhotonEvent {
            t: 1e-6,
            detector: Some(DetectorLabel::One),
            position: (5e-4, 0.0),
        },
        PhotonEvent {
            t: 2e-6,
            detector: None,
            position: (1e-5, -3e-6),
        },
        PhotonEvent {
            t: 3.5e-6,
            detector: Some(DetectorLabel::Two),
            position: (-5e-4, 1e-6),
        },
    ];
    let path = dir.path().join("events.csv");
    write_events(&events, &path).unwrap();
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with("t_s,detector,x_m,y_m\n"));
    assert_eq!(read_events(&path).unwrap(), events);

    write_events(&[], &path).unwrap();
    assert!(read_events(&path).unwrap().is_empty());
}

#[test]
fn outputs_land_in_directory() {
    let mut opts = fast();
    opts.photons = Some(PhotonOptions {
        flux: 1e4,
        ..Default::default()
    });
    let out = full_pipeline(&ExperimentGeometry::default(), &opts).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested/run");
    let written = write_outputs(&out, &target).unwrap();
    for name in [
        "summary.json",
        "events.csv",
        "profile_a.csv",
        "profile_d.csv",
        "profile_b_only_no_grid.csv",
    ] {
        assert!(target.join(name).is_file(), "{name}");
    }
    assert_eq!(written.len(), 8);
    assert_eq!(
        read_events(&target.join("events.csv")).unwrap(),
        out.events.unwrap()
    );
}

#[test]
fn errors_carry_the_path() {
    let missing = Path::new("/nonexistent/dir/summary.json");
    let err = read_summary(missing).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("/nonexistent/dir/summary.json"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let err = read_summary(&bad).unwrap_err();
    assert!(matches!(err, Error::Json { .. }));
    assert!(err.to_string().contains("bad.json"));
}

#[test]
fn config_precedence() {
    let text = "wire_thickness = 1e-4\ngrid_n = 2048\nmode = \"1d\"\nseed = 3\nflux = 5e3\n";
    let file = ConfigFile::parse(text, Path::new("run.toml")).unwrap();

    let run = file.resolve(&Overrides::default());
    assert_eq!(run.geometry.wire_thickness, 1e-4);
    assert_eq!(
        run.geometry.wavelength,
        ExperimentGeometry::default().wavelength
    );
    assert_eq!(
        (run.options.grid_n, run.options.mode, run.options.seed),
        (2048, SimMode::OneD, 3)
    );
    assert!(run.options.photons.is_none());

    let run = file.resolve(&Overrides {
        grid_n: Some(8192),
        seed: Some(9),
        photons: true,
        duration: Some(2.0),
        ..Default::default()
    });
    assert_eq!((run.options.grid_n, run.options.seed), (8192, 9));
    let p = run.options.photons.unwrap();
    assert_eq!((p.flux, p.duration), (5e3, 2.0));
}

#[test]
fn config_rejects_unknown_keys_and_fixes_focus() {
    let err = ConfigFile::parse("wire_thicknes = 1e-4\n", Path::new("typo.toml")).unwrap_err();
    assert!(err.to_string().contains("typo.toml"));

    let file = ConfigFile::parse(
        "lens_object_distance = 0.8\nlens_image_distance = 2.4\n",
        Path::new("x"),
    )
    .unwrap();
    let g = file.resolve(&Overrides::default()).geometry;
    assert!(g.imaging_residual().abs() < 1e-12);
    g.validate().unwrap();
}
