//! The four measurement conditions, their comparison, and the full
//! visibility-then-which-way analysis chain.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::elements::{
    apply_dual_pinhole, apply_wire_grid, integrate_detector, jittered_centers, region_amplitudes,
    region_peak, wire_positions, EdgeMode, ExperimentGeometry, PinholeBlock,
};
use crate::error::{Error, Result};
use crate::field::{make_field, Axis, IntensityProfile, SampledField};
use crate::metrics::{
    attributed_leak_count, greenberger_yasin, measure_visibility_direct, which_way_lower_bound,
    wire_limited_visibility, worst_case_visibility, DualityMetrics,
};
use crate::photon::{
    apply_dead_time, count_coincidences, sample_photon_stream, CoincidenceReport, PhotonEvent,
    StreamParams, DEFAULT_COINCIDENCE_WINDOW, DEFAULT_DARK_RATE,
};
use crate::propagation::{
    fresnel_with_report, image_through_lens_with_report, FresnelReport, ImagingReport,
};
use crate::special::airy_envelope;

/// Measurement conditions. `C` blocks pinhole A and `D` blocks pinhole B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Scenario {
    /// Both pinholes open, no wire grid.
    A,
    /// Both pinholes open, wire grid at the dark fringes.
    B,
    /// Pinhole A blocked, wire grid in place.
    C,
    /// Pinhole B blocked, wire grid in place.
    D,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::A, Scenario::B, Scenario::C, Scenario::D];

    pub fn configuration(self) -> Configuration {
        match self {
            Scenario::A => Configuration::new(PinholeBlock::None, false),
            Scenario::B => Configuration::new(PinholeBlock::None, true),
            Scenario::C => Configuration::new(PinholeBlock::BlockA, true),
            Scenario::D => Configuration::new(PinholeBlock::BlockB, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Scenario::A => 'a',
            Scenario::B => 'b',
            Scenario::C => 'c',
            Scenario::D => 'd',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_lowercase() {
            'a' => Some(Scenario::A),
            'b' => Some(Scenario::B),
            'c' => Some(Scenario::C),
            'd' => Some(Scenario::D),
            _ => None,
        }
    }
}

/// Pinhole state plus presence of the wire grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Configuration {
    pub block: PinholeBlock,
    pub wire_grid: bool,
}

impl Configuration {
    pub fn new(block: PinholeBlock, wire_grid: bool) -> Self {
        Self { block, wire_grid }
    }

    /// Name used for result labels and file names.
    pub fn label(&self) -> String {
        let s = Scenario::ALL
            .iter()
            .find(|s| s.configuration() == *self)
            .map(|s| String::from(s.letter()));
        s.unwrap_or_else(|| {
            let open = match self.block {
                PinholeBlock::None => "ab",
                PinholeBlock::BlockA => "b_only",
                PinholeBlock::BlockB => "a_only",
            };
            let grid = if self.wire_grid { "grid" } else { "no_grid" };
            alloc::format!("{open}_{grid}")
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SimMode {
    /// Pinholes are slits and the y axis is collapsed.
    #[cfg_attr(feature = "serde", serde(rename = "1d"))]
    OneD,
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "2d"))]
    TwoD,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhotonOptions {
    pub flux: f64,
    pub duration: f64,
    pub dark_rate: f64,
    pub coincidence_window: f64,
    pub dead_time: Option<f64>,
}

impl Default for PhotonOptions {
    fn default() -> Self {
        Self {
            flux: 3e4,
            duration: 1.0,
            dark_rate: DEFAULT_DARK_RATE,
            coincidence_window: DEFAULT_COINCIDENCE_WINDOW,
            dead_time: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SimOptions {
    /// Samples per axis (power of two).
    pub grid_n: usize,
    /// Width of the pinhole-plane window, m.
    pub aperture_window: f64,
    pub mode: SimMode,
    pub edge_mode: EdgeMode,
    /// Displace each wire uniformly within the alignment tolerance.
    pub jitter: bool,
    pub seed: u64,
    /// Half-width of the stored image-plane profile, m.
    pub profile_half_width: f64,
    /// Half-width of the wire-plane region scanned for the direct visibility, m.
    pub visibility_half_width: f64,
    pub photons: Option<PhotonOptions>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            grid_n: 4096,
            aperture_window: 0.02,
            mode: SimMode::TwoD,
            edge_mode: EdgeMode::AreaWeighted,
            jitter: false,
            seed: 0,
            profile_half_width: 5e-3,
            visibility_half_width: 3e-3,
            photons: None,
        }
    }
}

impl SimOptions {
    fn jitter_seed(&self) -> Option<u64> {
        self.jitter.then_some(self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioDiagnostics {
    pub aperture_to_wire: FresnelReport,
    pub imaging: ImagingReport,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioResult {
    pub label: String,
    pub scenario: Option<Scenario>,
    pub configuration: Configuration,
    pub power_at_wire_plane_in: f64,
    pub power_at_wire_plane_out: f64,
    pub power_at_image: f64,
    pub detector1_count: f64,
    pub detector2_count: f64,
    pub detector1_peak: f64,
    pub detector2_peak: f64,
    /// Peak in the open pinhole's detector, % of the case-a peak there.
    pub peak_intensity_relative: Option<f64>,
    /// Wire centres actually used, m.
    pub wire_centers: Vec<f64>,
    pub diagnostics: ScenarioDiagnostics,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub image_profile: Option<IntensityProfile>,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub wire_plane_profile: Option<IntensityProfile>,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub detector_amplitudes: [Vec<Complex64>; 2],
}

impl ScenarioResult {
    pub fn counts(&self) -> [f64; 2] {
        [self.detector1_count, self.detector2_count]
    }

    pub fn peaks(&self) -> [f64; 2] {
        [self.detector1_peak, self.detector2_peak]
    }

    pub fn transmitted_fraction(&self) -> f64 {
        self.power_at_wire_plane_out / self.power_at_wire_plane_in
    }
}

/// A scenario result together with the image-plane field, when requested.
pub struct ScenarioRun {
    pub result: ScenarioResult,
    pub image: Option<SampledField>,
}

fn illuminated_aperture(geom: &ExperimentGeometry, options: &SimOptions) -> Result<SampledField> {
    let one = Complex64::new(1.0, 0.0);
    let n = options.grid_n;
    let w = options.aperture_window;
    let f = match options.mode {
        SimMode::TwoD => make_field(n, n, w, w, geom.wavelength)?,
        SimMode::OneD => SampledField::line(n, w, geom.wavelength)?,
    };
    Ok(f.fill(|_, _| one).with_label("aperture"))
}

/// Field just past the wires (or at the wire plane with no grid), with the
/// Fresnel diagnostics and powers before/after the grid.
pub fn wire_plane_field(
    geom: &ExperimentGeometry,
    configuration: Configuration,
    options: &SimOptions,
) -> Result<(SampledField, FresnelReport, f64, f64, Vec<f64>)> {
    geom.validate()?;
    let aperture = illuminated_aperture(geom, options)?;
    let masked = apply_dual_pinhole(aperture, geom, configuration.block, options.edge_mode)?;
    let (mut field, report) = fresnel_with_report(masked, geom.grid_distance)?;
    field.set_label("wire-plane");
    let power_in = field.total_power();
    let mut centers = Vec::new();
    if configuration.wire_grid {
        let nominal = wire_positions(geom, geom.fringe_period())?;
        centers = match options.jitter_seed() {
            Some(seed) => jittered_centers(&nominal, geom.wire_alignment_tolerance, seed),
            None => nominal,
        };
        field = apply_wire_grid(field, geom, &centers, None, options.edge_mode)?;
    }
    let power_out = field.total_power();
    Ok((field, report, power_in, power_out, centers))
}

/// Run one pinhole / grid configuration through the whole apparatus.
pub fn run_configuration(
    geom: &ExperimentGeometry,
    configuration: Configuration,
    options: &SimOptions,
    keep_image: bool,
) -> Result<ScenarioRun> {
    let (wire_field, aperture_to_wire, power_in, power_out, wire_centers) =
        wire_plane_field(geom, configuration, options)?;
    let hw = options.profile_half_width;
    let wire_plane_profile = wire_field.extract_profile(Axis::X, 0.0)?.window(-hw, hw);
    let (image, imaging) = image_through_lens_with_report(wire_field, geom)?;
    let regions = geom.detector_regions();
    let counts = [
        integrate_detector(&image, &regions[0])?,
        integrate_detector(&image, &regions[1])?,
    ];
    let peaks = [
        region_peak(&image, &regions[0])?,
        region_peak(&image, &regions[1])?,
    ];
    let detector_amplitudes = [
        region_amplitudes(&image, &regions[0])?,
        region_amplitudes(&image, &regions[1])?,
    ];
    let image_profile = image.extract_profile(Axis::X, 0.0)?.window(-hw, hw);
    let label = configuration.label();
    let scenario = Scenario::ALL
        .iter()
        .copied()
        .find(|s| s.configuration() == configuration);
    let result = ScenarioResult {
        label,
        scenario,
        configuration,
        power_at_wire_plane_in: power_in,
        power_at_wire_plane_out: power_out,
        power_at_image: image.total_power(),
        detector1_count: counts[0],
        detector2_count: counts[1],
        detector1_peak: peaks[0],
        detector2_peak: peaks[1],
        peak_intensity_relative: None,
        wire_centers,
        diagnostics: ScenarioDiagnostics {
            aperture_to_wire,
            imaging,
        },
        image_profile: Some(image_profile),
        wire_plane_profile: Some(wire_plane_profile),
        detector_amplitudes,
    };
    Ok(ScenarioRun {
        result,
        image: keep_image.then_some(image),
    })
}

/// Run one of the four measurement conditions.
pub fn run_scenario(
    geom: &ExperimentGeometry,
    scenario: Scenario,
    options: &SimOptions,
) -> Result<ScenarioResult> {
    run_configuration(geom, scenario.configuration(), options, false).map(|r| r.result)
}

/// All runs needed for the reduction table.
#[derive(Debug, Clone)]
pub struct ScenarioSet {
    pub a: ScenarioResult,
    pub b: ScenarioResult,
    pub c: ScenarioResult,
    pub d: ScenarioResult,
    /// Pinhole B blocked, no grid: baseline for `d`.
    pub a_only: ScenarioResult,
    /// Pinhole A blocked, no grid: baseline for `c`.
    pub b_only: ScenarioResult,
}

impl ScenarioSet {
    pub fn configurations() -> [Configuration; 6] {
        [
            Scenario::A.configuration(),
            Scenario::B.configuration(),
            Scenario::C.configuration(),
            Scenario::D.configuration(),
            Configuration::new(PinholeBlock::BlockB, false),
            Configuration::new(PinholeBlock::BlockA, false),
        ]
    }

    fn all(&self) -> [&ScenarioResult; 6] {
        [
            &self.a,
            &self.b,
            &self.c,
            &self.d,
            &self.a_only,
            &self.b_only,
        ]
    }
}

/// Interference cross term at one detector, `b − (c + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SumRule {
    pub case_b: f64,
    pub case_c_plus_d: f64,
    pub discrepancy: f64,
    /// `2·Re Σ conj(E_c)·E_d·dx·dy` over the detector.
    pub cross_term: f64,
    pub relative_error: f64,
}

/// Percent reductions and cross-counts, each against its matching baseline.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReductionTable {
    /// Case b vs case a, per detector, %.
    pub case_b_loss: [f64; 2],
    /// Case c (only B open) at detector 2 vs B-only without grid, %.
    pub case_c_loss: f64,
    /// Case d (only A open) at detector 1 vs A-only without grid, %.
    pub case_d_loss: f64,
    /// Peak at the open detector vs the no-grid baseline, % (c then d).
    pub peak_relative_c: f64,
    pub peak_relative_d: f64,
    /// Wrong-detector count as % of the case-a count at that detector.
    pub cross_count_c: f64,
    pub cross_count_d: f64,
    /// Case b counts normalized to case a, % (W1, W2).
    pub normalized_b: [f64; 2],
    /// Wire-plane transmitted power fraction for cases b, c, d.
    pub transmitted_b: f64,
    pub transmitted_c: f64,
    pub transmitted_d: f64,
    /// Wrong-detector fraction with one pinhole open and no grid (A only, B only).
    pub imaging_crosstalk: [f64; 2],
    pub sum_rule: [SumRule; 2],
    /// Detector-2 count attributed to pinhole A from the in-phase
    /// decomposition, next to its `3·leak` bound (both in %).
    pub attributed_leak_b: f64,
    pub leak_bound_b: f64,
}

fn loss_percent(with: f64, without: f64) -> f64 {
    100.0 * (1.0 - with / without)
}

fn cross_term(c: &[Complex64], d: &[Complex64], cell: f64) -> f64 {
    2.0 * c.iter().zip(d).map(|(x, y)| (x.conj() * y).re).sum::<f64>() * cell
}

/// Build the reduction table.
pub fn compare_scenarios(set: &ScenarioSet) -> Result<ReductionTable> {
    let first = set.a.diagnostics.imaging.to_image;
    for r in set.all() {
        let o = r.diagnostics.imaging.to_image;
        if o.output_pitch_x != first.output_pitch_x || o.output_pitch_y != first.output_pitch_y {
            return Err(Error::invalid("scenario results come from different grids"));
        }
        if r.detector_amplitudes[0].len() != set.a.detector_amplitudes[0].len() {
            return Err(Error::invalid(
                "scenario results come from different geometries",
            ));
        }
    }
    let expected = ScenarioSet::configurations();
    for (r, cfg) in set.all().iter().zip(expected) {
        if r.configuration != cfg {
            return Err(Error::invalid(alloc::format!(
                "result '{}' is in the wrong slot",
                r.label
            )));
        }
    }
    let wire_sets = [
        &set.b.wire_centers,
        &set.c.wire_centers,
        &set.d.wire_centers,
    ];
    if wire_sets.iter().any(|w| *w != wire_sets[0]) {
        return Err(Error::invalid("wire grids differ between scenarios"));
    }

    let a = set.a.counts();
    let b = set.b.counts();
    let cell = first.output_pitch_x * first.output_pitch_y;
    let sum_rule = [0usize, 1].map(|k| {
        let cd = set.c.counts()[k] + set.d.counts()[k];
        let discrepancy = b[k] - cd;
        let cross = cross_term(
            &set.c.detector_amplitudes[k],
            &set.d.detector_amplitudes[k],
            cell,
        );
        SumRule {
            case_b: b[k],
            case_c_plus_d: cd,
            discrepancy,
            cross_term: cross,
            relative_error: if cross != 0.0 {
                (discrepancy - cross).abs() / cross.abs()
            } else {
                discrepancy.abs()
            },
        }
    });
    let normalized_b = [100.0 * b[0] / a[0], 100.0 * b[1] / a[1]];
    let cross_count_d = 100.0 * set.d.detector2_count / a[1];
    let cross_count_c = 100.0 * set.c.detector1_count / a[0];
    Ok(ReductionTable {
        case_b_loss: [loss_percent(b[0], a[0]), loss_percent(b[1], a[1])],
        case_c_loss: loss_percent(set.c.detector2_count, set.b_only.detector2_count),
        case_d_loss: loss_percent(set.d.detector1_count, set.a_only.detector1_count),
        peak_relative_c: 100.0 * set.c.detector2_peak / set.b_only.detector2_peak,
        peak_relative_d: 100.0 * set.d.detector1_peak / set.a_only.detector1_peak,
        cross_count_c,
        cross_count_d,
        normalized_b,
        transmitted_b: set.b.transmitted_fraction(),
        transmitted_c: set.c.transmitted_fraction(),
        transmitted_d: set.d.transmitted_fraction(),
        imaging_crosstalk: [
            set.a_only.detector2_count / (set.a_only.detector1_count + set.a_only.detector2_count),
            set.b_only.detector1_count / (set.b_only.detector1_count + set.b_only.detector2_count),
        ],
        sum_rule,
        attributed_leak_b: attributed_leak_count(
            normalized_b[1],
            cross_count_d.min(normalized_b[1]),
        )?,
        leak_bound_b: 3.0 * cross_count_d,
    })
}

/// Line-spread of the Airy envelope `(2J₁(a·r)/(a·r))²`, normalized to unit
/// area, at x (trapezoid over y out to 60 envelope radii).
pub fn airy_line_spread(a: f64, x: f64) -> f64 {
    let r1 = crate::special::J1_FIRST_ZERO / a;
    let y_max = 60.0 * r1;
    let n = 24_000;
    let h = y_max / n as f64;
    let mut s = 0.5 * airy_envelope(a * x.abs());
    for i in 1..n {
        let y = i as f64 * h;
        s += airy_envelope(a * libm::sqrt(x * x + y * y));
    }
    s += 0.5 * airy_envelope(a * libm::sqrt(x * x + y_max * y_max));
    2.0 * s * h / (4.0 * PI / (a * a))
}

/// Closed-form estimate of the power fraction stopped by wires centred on dark
/// fringes: `b³t³/(6π)` of each fringe period's power, weighted by the Airy
/// envelope line-spread at each wire.
pub fn analytic_blocked_fraction(geom: &ExperimentGeometry) -> Result<f64> {
    let b = geom.fringe_constant();
    let t = geom.wire_thickness;
    let period = geom.fringe_period();
    let a = geom.airy_constant();
    let bt = b * t;
    let per_period = bt * bt * bt / (6.0 * PI);
    let centers = wire_positions(geom, period)?;
    Ok(centers
        .iter()
        .map(|&x| per_period * period * airy_line_spread(a, x))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Provenance {
    pub seed: u64,
    pub grid_n: usize,
    pub mode: SimMode,
    pub version: String,
    /// Filled in by the writer; the only field that varies between identical runs.
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunSummary {
    pub geometry: ExperimentGeometry,
    pub options: SimOptions,
    pub scenarios: Vec<ScenarioResult>,
    pub reductions: Option<ReductionTable>,
    pub metrics: Option<DualityMetrics>,
    pub coincidence: Option<CoincidenceReport>,
    pub provenance: Provenance,
}

pub struct PipelineOutput {
    pub summary: RunSummary,
    pub events: Option<Vec<PhotonEvent>>,
}

pub fn provenance(options: &SimOptions) -> Provenance {
    Provenance {
        seed: options.seed,
        grid_n: options.grid_n,
        mode: options.mode,
        version: String::from(env!("CARGO_PKG_VERSION")),
        timestamp: None,
    }
}

fn photon_stream(
    image: &SampledField,
    geom: &ExperimentGeometry,
    photons: &PhotonOptions,
    seed: u64,
) -> Result<(Vec<PhotonEvent>, CoincidenceReport)> {
    let params = StreamParams {
        flux: photons.flux,
        duration: photons.duration,
        dark_rate: photons.dark_rate,
        seed,
    };
    let mut events = sample_photon_stream(image, &geom.detector_regions(), &params)?;
    if let Some(dead) = photons.dead_time {
        events = apply_dead_time(&events, dead);
    }
    let report = count_coincidences(&events, photons.coincidence_window, Some(photons.duration))?;
    Ok((events, report))
}

/// Run a single scenario and wrap it in a summary without cross-scenario data.
pub fn single_scenario_pipeline(
    geom: &ExperimentGeometry,
    scenario: Scenario,
    options: &SimOptions,
) -> Result<PipelineOutput> {
    let run = run_configuration(
        geom,
        scenario.configuration(),
        options,
        options.photons.is_some(),
    )?;
    let (events, coincidence) = match (&options.photons, &run.image) {
        (Some(p), Some(image)) => {
            let (e, r) = photon_stream(image, geom, p, options.seed)?;
            (Some(e), Some(r))
        }
        _ => (None, None),
    };
    Ok(PipelineOutput {
        summary: RunSummary {
            geometry: geom.clone(),
            options: options.clone(),
            scenarios: alloc::vec![run.result],
            reductions: None,
            metrics: None,
            coincidence,
            provenance: provenance(options),
        },
        events,
    })
}

/// Every scenario plus baselines, then visibility first (wire-limited,
/// worst-case from the simulated case-b loss, direct scan) and which-way
/// information second, ending in the Greenberger–Yasin sum.
pub fn full_pipeline(geom: &ExperimentGeometry, options: &SimOptions) -> Result<PipelineOutput> {
    geom.validate()?;
    let mut results = Vec::with_capacity(6);
    let mut events = None;
    let mut coincidence = None;
    for cfg in ScenarioSet::configurations() {
        let want_image = options.photons.is_some() && cfg == Scenario::B.configuration();
        let run = run_configuration(geom, cfg, options, want_image)?;
        if let (Some(p), Some(image)) = (&options.photons, &run.image) {
            let (e, r) = photon_stream(image, geom, p, options.seed)?;
            events = Some(e);
            coincidence = Some(r);
        }
        results.push(run.result);
    }
    let mut it = results.into_iter();
    let mut set = ScenarioSet {
        a: it.next().unwrap(),
        b: it.next().unwrap(),
        c: it.next().unwrap(),
        d: it.next().unwrap(),
        a_only: it.next().unwrap(),
        b_only: it.next().unwrap(),
    };
    let a_peaks = set.a.peaks();
    set.a.peak_intensity_relative = Some(100.0);
    set.b.peak_intensity_relative =
        Some(100.0 * set.b.peaks()[0].max(set.b.peaks()[1]) / a_peaks[0].max(a_peaks[1]));
    set.c.peak_intensity_relative = Some(100.0 * set.c.detector2_peak / a_peaks[1]);
    set.d.peak_intensity_relative = Some(100.0 * set.d.detector1_peak / a_peaks[0]);
    let table = compare_scenarios(&set)?;
    let metrics = metrics_from_simulation(geom, options, &set, &table)?;

    let ScenarioSet {
        a,
        b,
        c,
        d,
        a_only,
        b_only,
    } = set;
    Ok(PipelineOutput {
        summary: RunSummary {
            geometry: geom.clone(),
            options: options.clone(),
            scenarios: alloc::vec![a, b, c, d, a_only, b_only],
            reductions: Some(table),
            metrics: Some(metrics),
            coincidence,
            provenance: provenance(options),
        },
        events,
    })
}

fn metrics_from_simulation(
    geom: &ExperimentGeometry,
    options: &SimOptions,
    set: &ScenarioSet,
    table: &ReductionTable,
) -> Result<DualityMetrics> {
    let mm = 1e3;
    let v_wire_limited =
        wire_limited_visibility(geom.fringe_constant() / mm, geom.wire_thickness * mm);
    let blocked_fraction = (table.case_b_loss[0].max(table.case_b_loss[1]) / 100.0)
        .clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    let wc = worst_case_visibility(
        geom.airy_radius() * mm,
        geom.wire_thickness * mm,
        geom.wire_count,
        blocked_fraction,
    )?;
    let hw = options.visibility_half_width;
    let v_direct = set
        .a
        .wire_plane_profile
        .as_ref()
        .map(|p| measure_visibility_direct(p, (-hw, hw)))
        .transpose()?;
    let k_a = which_way_lower_bound(table.normalized_b[0], table.cross_count_c)?;
    let k_b = which_way_lower_bound(table.normalized_b[1], table.cross_count_d)?;
    let (gy_value, gy_violated) = greenberger_yasin(wc.v_lower.value, k_a.value.min(k_b.value))?;
    Ok(DualityMetrics {
        v_direct,
        v_wire_limited,
        v_star_lower_bound: wc.v_lower,
        intensity_ratio: wc.ratio,
        blocked_fraction,
        k_a,
        k_b,
        gy_value,
        gy_violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(Scenario::C.configuration().label(), "c");
        assert_eq!(
            Configuration::new(PinholeBlock::BlockB, false).label(),
            "a_only_no_grid"
        );
        assert_eq!(Scenario::from_letter('D'), Some(Scenario::D));
        assert_eq!(Scenario::from_letter('e'), None);
    }

    #[test]
    fn line_spread_is_normalized() {
        // ∫ L dx = 1 by construction; check with a coarse trapezoid in x
        let a = 358.0;
        let r1 = crate::special::J1_FIRST_ZERO / a;
        let n = 2000;
        let h = 40.0 * r1 / n as f64;
        let s: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * airy_line_spread(a, i as f64 * h)
            })
            .sum();
        let total = 2.0 * s * h;
        assert!((total - 1.0).abs() < 0.01, "{total}");
    }

    #[test]
    fn blocked_fraction_estimate_is_small() {
        let f = analytic_blocked_fraction(&ExperimentGeometry::default()).unwrap();
        assert!(f > 1e-4 && f < 2e-3, "{f}");
    }
}
