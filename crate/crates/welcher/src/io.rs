//! Run summary (JSON), intensity profiles and photon events (CSV).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use welcher_core::scenario::PipelineOutput;
use welcher_core::{Axis, DetectorLabel, IntensityProfile, PhotonEvent, RunSummary};

use crate::{Error, Result};

pub const SUMMARY_FILE: &str = "summary.json";
pub const EVENTS_FILE: &str = "events.csv";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn profile_file_name(label: &str) -> String {
    format!("profile_{label}.csv")
}

/// Pretty JSON of a summary, exactly as written to disk.
pub fn summary_json(summary: &RunSummary, path: &Path) -> Result<String> {
    let mut s = serde_json::to_string_pretty(summary).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    s.push('\n');
    Ok(s)
}

/// Write the summary, stamping the provenance with the current UTC time.
pub fn write_summary(summary: &RunSummary, path: &Path) -> Result<()> {
    let mut stamped = summary.clone();
    stamped.provenance.timestamp = Some(chrono::Utc::now().to_rfc3339());
    let text = summary_json(&stamped, path)?;
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn read_summary(path: &Path) -> Result<RunSummary> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_profile(profile: &IntensityProfile, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record([profile.coordinate_header(), "intensity"])
        .map_err(csv_err(path))?;
    for (c, v) in profile.coordinates.iter().zip(&profile.values) {
        w.write_record([c.to_string(), v.to_string()])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_profile(path: &Path) -> Result<IntensityProfile> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    let axis = match header.get(0) {
        Some("x_m") => Axis::X,
        Some("y_m") => Axis::Y,
        other => {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: format!("unexpected coordinate column {other:?}"),
            })
        }
    };
    let mut coordinates = Vec::new();
    let mut values = Vec::new();
    for row in r.deserialize::<(f64, f64)>() {
        let (c, v) = row.map_err(csv_err(path))?;
        coordinates.push(c);
        values.push(v);
    }
    Ok(IntensityProfile {
        axis,
        coordinates,
        values,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct EventRow {
    t_s: f64,
    /// `1`, `2` or `none`.
    detector: String,
    x_m: f64,
    y_m: f64,
}

pub fn write_events(events: &[PhotonEvent], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for e in events {
        let detector = match e.detector {
            Some(d) => d.number().to_string(),
            None => "none".to_string(),
        };
        w.serialize(EventRow {
            t_s: e.t,
            detector,
            x_m: e.position.0,
            y_m: e.position.1,
        })
        .map_err(csv_err(path))?;
    }
    if events.is_empty() {
        w.write_record(["t_s", "detector", "x_m", "y_m"])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_events(path: &Path) -> Result<Vec<PhotonEvent>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut out = Vec::new();
    for row in r.deserialize::<EventRow>() {
        let row = row.map_err(csv_err(path))?;
        let detector = match row.detector.as_str() {
            "1" => Some(DetectorLabel::One),
            "2" => Some(DetectorLabel::Two),
            "none" => None,
            other => {
                return Err(Error::Format {
                    path: path.to_path_buf(),
                    message: format!("unknown detector '{other}'"),
                })
            }
        };
        out.push(PhotonEvent {
            t: row.t_s,
            detector,
            position: (row.x_m, row.y_m),
        });
    }
    Ok(out)
}

/// Write `summary.json`, one image-plane profile per scenario and, in photon
/// mode, `events.csv` into `dir`. Returns the paths written.
pub fn write_outputs(output: &PipelineOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let path = dir.join(SUMMARY_FILE);
    write_summary(&output.summary, &path)?;
    written.push(path);
    for r in &output.summary.scenarios {
        if let Some(p) = &r.image_profile {
            let path = dir.join(profile_file_name(&r.label));
            write_profile(p, &path)?;
            written.push(path);
        }
    }
    if let Some(events) = &output.events {
        let path = dir.join(EVENTS_FILE);
        write_events(events, &path)?;
        written.push(path);
    }
    Ok(written)
}

/// Write rows to a CSV file, or to stdout when `path` is `None`.
pub fn write_rows<T: Serialize>(rows: &[T], path: Option<&Path>) -> Result<()> {
    let shown = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_err(p))?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row).map_err(csv_err(&shown))?;
    }
    w.flush().map_err(io_err(&shown))
}
