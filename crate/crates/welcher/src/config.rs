//! Flat TOML run configuration. Every key is optional; missing keys keep the
//! built-in defaults and command-line flags override both. Lengths are in
//! metres, times in seconds.
//!
//! ```toml
//! wire_thickness = 127e-6
//! grid_n = 4096
//! mode = "2d"
//! photons = true
//! flux = 3e4
//! ```

use std::path::Path;

use serde::Deserialize;
use welcher_core::scenario::{PhotonOptions, SimMode};
use welcher_core::{EdgeMode, ExperimentGeometry, SimOptions};

use crate::{Error, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub wavelength: Option<f64>,
    pub pinhole_diameter: Option<f64>,
    pub pinhole_separation: Option<f64>,
    pub grid_distance: Option<f64>,
    pub wire_thickness: Option<f64>,
    pub wire_count: Option<usize>,
    pub wire_alignment_tolerance: Option<f64>,
    pub lens_object_distance: Option<f64>,
    pub lens_image_distance: Option<f64>,
    pub lens_focal_length: Option<f64>,
    pub lens_aperture_diameter: Option<f64>,
    pub detector_radius: Option<f64>,

    pub grid_n: Option<usize>,
    pub aperture_window: Option<f64>,
    pub mode: Option<SimMode>,
    pub edge_mode: Option<EdgeMode>,
    pub jitter: Option<bool>,
    pub seed: Option<u64>,
    pub profile_half_width: Option<f64>,
    pub visibility_half_width: Option<f64>,

    pub photons: Option<bool>,
    pub flux: Option<f64>,
    pub duration: Option<f64>,
    pub dark_rate: Option<f64>,
    pub coincidence_window: Option<f64>,
    pub dead_time: Option<f64>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub grid_n: Option<usize>,
    pub mode: Option<SimMode>,
    pub seed: Option<u64>,
    pub photons: bool,
    pub flux: Option<f64>,
    pub duration: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub geometry: ExperimentGeometry,
    pub options: SimOptions,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|source| Error::Config {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Merge file values and overrides onto the defaults.
    pub fn resolve(&self, overrides: &Overrides) -> RunConfig {
        let mut g = ExperimentGeometry::default();
        // A changed lens distance without an explicit focal length keeps the
        // imaging condition satisfied.
        let lens_moved = self.lens_object_distance.is_some() || self.lens_image_distance.is_some();
        set(&mut g.wavelength, self.wavelength);
        set(&mut g.pinhole_diameter, self.pinhole_diameter);
        set(&mut g.pinhole_separation, self.pinhole_separation);
        set(&mut g.grid_distance, self.grid_distance);
        set(&mut g.wire_thickness, self.wire_thickness);
        set(&mut g.wire_count, self.wire_count);
        set(
            &mut g.wire_alignment_tolerance,
            self.wire_alignment_tolerance,
        );
        set(&mut g.lens_object_distance, self.lens_object_distance);
        set(&mut g.lens_image_distance, self.lens_image_distance);
        if lens_moved && self.lens_focal_length.is_none() {
            let (so, si) = (g.lens_object_distance, g.lens_image_distance);
            g.lens_focal_length = so * si / (so + si);
        }
        set(&mut g.lens_focal_length, self.lens_focal_length);
        set(&mut g.lens_aperture_diameter, self.lens_aperture_diameter);
        set(&mut g.detector_radius, self.detector_radius);

        let mut o = SimOptions::default();
        set(&mut o.grid_n, self.grid_n);
        set(&mut o.aperture_window, self.aperture_window);
        set(&mut o.mode, self.mode);
        set(&mut o.edge_mode, self.edge_mode);
        set(&mut o.jitter, self.jitter);
        set(&mut o.seed, self.seed);
        set(&mut o.profile_half_width, self.profile_half_width);
        set(&mut o.visibility_half_width, self.visibility_half_width);

        set(&mut o.grid_n, overrides.grid_n);
        set(&mut o.mode, overrides.mode);
        set(&mut o.seed, overrides.seed);

        if self.photons.unwrap_or(false) || overrides.photons {
            let mut p = PhotonOptions::default();
            set(&mut p.flux, self.flux);
            set(&mut p.duration, self.duration);
            set(&mut p.dark_rate, self.dark_rate);
            set(&mut p.coincidence_window, self.coincidence_window);
            if self.dead_time.is_some() {
                p.dead_time = self.dead_time;
            }
            set(&mut p.flux, overrides.flux);
            set(&mut p.duration, overrides.duration);
            o.photons = Some(p);
        }
        RunConfig {
            geometry: g,
            options: o,
        }
    }
}
