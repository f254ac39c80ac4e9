//! Semiclassical photon counting: Poisson arrivals, positions drawn from the
//! image-plane intensity, dark counts and coincidence-window analysis.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elements::{DetectorLabel, DetectorRegion};
use crate::error::{Error, Result};
use crate::field::SampledField;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default coincidence window, s.
pub const DEFAULT_COINCIDENCE_WINDOW: f64 = 20e-9;

/// Default dark-count rate per detector, counts/s.
pub const DEFAULT_DARK_RATE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhotonEvent {
    /// Arrival time, s.
    pub t: f64,
    /// `None` when the photon missed both detectors.
    pub detector: Option<DetectorLabel>,
    /// Image-plane position, m. Dark counts report the detector centre.
    pub position: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoincidenceReport {
    pub window: f64,
    pub n_events_1: u64,
    pub n_events_2: u64,
    pub n_coincidences: u64,
    /// `n_coincidences / max(n_events_1, n_events_2)`.
    pub ratio: f64,
    /// `1 − exp(−2·window·rate)` with the rate of the detector that did not set
    /// the denominator.
    pub analytic_expectation: f64,
    /// Observation time used for the rates, s.
    pub duration: f64,
}

/// Parameters of one Monte Carlo stream.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StreamParams {
    /// Photons per second reaching the image plane.
    pub flux: f64,
    pub duration: f64,
    /// Dark counts per second, per detector.
    pub dark_rate: f64,
    pub seed: u64,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>()
}

/// Arrival times of a homogeneous Poisson process on `[0, duration)`.
pub fn poisson_arrivals(rate: f64, duration: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut out = Vec::new();
    if !(rate > 0.0) || !(duration > 0.0) {
        return out;
    }
    let mut t = 0.0;
    loop {
        // 1 - U lies in (0, 1], so the logarithm is finite
        t -= libm::log(1.0 - uniform(rng)) / rate;
        if t >= duration {
            break;
        }
        out.push(t);
    }
    out
}

/// Inverse-CDF sampler over the samples of a field's intensity.
struct IntensitySampler {
    cdf: Vec<f64>,
}

impl IntensitySampler {
    fn new(field: &SampledField) -> Result<Self> {
        let mut acc = 0.0;
        let cdf: Vec<f64> = field
            .amplitudes()
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::CannotNormalize);
        }
        Ok(Self { cdf })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cdf.last().unwrap();
        let target = uniform(rng) * total;
        self.cdf
            .partition_point(|&c| c <= target)
            .min(self.cdf.len() - 1)
    }
}

/// Draw a time-ordered photon stream from the intensity of `field`.
///
/// Photons arrive as a Poisson process at `flux`; each position is a sample
/// drawn with probability proportional to its intensity, then spread uniformly
/// over the sample's cell. Each detector additionally fires dark counts as an
/// independent Poisson process.
pub fn sample_photon_stream(
    field: &SampledField,
    regions: &[DetectorRegion; 2],
    params: &StreamParams,
) -> Result<Vec<PhotonEvent>> {
    if !(params.flux > 0.0) || !(params.duration >= 0.0) || !(params.dark_rate >= 0.0) {
        return Err(Error::invalid(
            "flux must be positive, duration and dark rate non-negative",
        ));
    }
    let sampler = IntensitySampler::new(field)?;
    for r in regions {
        r.sample_indices(field)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let times = poisson_arrivals(params.flux, params.duration, &mut rng);
    let nx = field.nx();
    let (dx, dy) = (field.dx(), field.dy());
    let y_inv = field.is_y_invariant();
    let mut events: Vec<PhotonEvent> = times
        .into_iter()
        .map(|t| {
            let idx = sampler.draw(&mut rng);
            let (ix, iy) = (idx % nx, idx / nx);
            let x = field.x_at(ix) + (uniform(&mut rng) - 0.5) * dx;
            let y = if y_inv {
                0.0
            } else {
                field.y_at(iy) + (uniform(&mut rng) - 0.5) * dy
            };
            let detector = regions
                .iter()
                .find(|r| r.contains(x, y, y_inv))
                .map(|r| r.label);
            PhotonEvent {
                t,
                detector,
                position: (x, y),
            }
        })
        .collect();
    for r in regions {
        for t in poisson_arrivals(params.dark_rate, params.duration, &mut rng) {
            events.push(PhotonEvent {
                t,
                detector: Some(r.label),
                position: r.center,
            });
        }
    }
    events.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(events)
}

/// Drop clicks that arrive within `dead_time` of the previous registered click
/// on the same detector. Events that missed the detectors pass through.
pub fn apply_dead_time(events: &[PhotonEvent], dead_time: f64) -> Vec<PhotonEvent> {
    let mut last = [f64::NEG_INFINITY; 2];
    events
        .iter()
        .filter(|e| match e.detector {
            None => true,
            Some(d) => {
                let slot = &mut last[(d.number() - 1) as usize];
                if e.t - *slot >= dead_time {
                    *slot = e.t;
                    true
                } else {
                    false
                }
            }
        })
        .copied()
        .collect()
}

/// Pair clicks on different detectors that lie within `window` of each other.
///
/// Pairing is greedy in time order: the earliest unpaired clicks on each
/// detector are matched when close enough, otherwise the earlier one is
/// dropped. Each click joins at most one coincidence. Rates use `duration`
/// when given, else the time of the last event.
pub fn count_coincidences(
    events: &[PhotonEvent],
    window: f64,
    duration: Option<f64>,
) -> Result<CoincidenceReport> {
    if !(window >= 0.0) {
        return Err(Error::invalid("coincidence window must be non-negative"));
    }
    if events.windows(2).any(|w| w[1].t < w[0].t) {
        return Err(Error::invalid("events are not time-ordered"));
    }
    let pick = |label| {
        events
            .iter()
            .filter(|e| e.detector == Some(label))
            .map(|e| e.t)
            .collect::<Vec<f64>>()
    };
    let t1 = pick(DetectorLabel::One);
    let t2 = pick(DetectorLabel::Two);
    let (mut i, mut j, mut n) = (0, 0, 0u64);
    while i < t1.len() && j < t2.len() {
        let d = t1[i] - t2[j];
        if d.abs() <= window {
            n += 1;
            i += 1;
            j += 1;
        } else if d < 0.0 {
            i += 1;
        } else {
            j += 1;
        }
    }
    let (n1, n2) = (t1.len() as u64, t2.len() as u64);
    let denom = n1.max(n2);
    let duration = duration.unwrap_or_else(|| events.last().map_or(0.0, |e| e.t));
    let other = if n1 >= n2 { n2 } else { n1 };
    let analytic_expectation = if duration > 0.0 {
        let rate = other as f64 / duration;
        -libm::expm1(-rate * 2.0 * window)
    } else {
        0.0
    };
    Ok(CoincidenceReport {
        window,
        n_events_1: n1,
        n_events_2: n2,
        n_coincidences: n,
        ratio: if denom > 0 {
            n as f64 / denom as f64
        } else {
            0.0
        },
        analytic_expectation,
        duration,
    })
}

/// Mean spacing between successive photons of a beam, `c/flux`.
pub fn mean_photon_separation(flux: f64) -> f64 {
    SPEED_OF_LIGHT / flux
}

/// Probability that the next photon follows within one coherence time,
/// `1 − exp(−flux·ℓ/c)`.
pub fn coherence_overlap_probability(flux: f64, coherence_length: f64) -> f64 {
    -libm::expm1(-flux * coherence_length / SPEED_OF_LIGHT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn ev(t: f64, d: Option<DetectorLabel>) -> PhotonEvent {
        PhotonEvent {
            t,
            detector: d,
            position: (0.0, 0.0),
        }
    }

    #[test]
    fn separation_and_overlap() {
        assert!((mean_photon_separation(3e4) / 1e4 - 1.0).abs() < 1e-3);
        assert_relative_eq!(mean_photon_separation(2.998e8), 1.0, max_relative = 1e-4);
        assert_relative_eq!(mean_photon_separation(1e7), 29.98, max_relative = 1e-3);
        assert_relative_eq!(
            coherence_overlap_probability(3e4, 0.4),
            4.0e-5,
            max_relative = 1e-3
        );
        assert_relative_eq!(
            coherence_overlap_probability(1e7, 0.4),
            1.325e-2,
            max_relative = 1e-3
        );
        assert_eq!(coherence_overlap_probability(0.0, 0.4), 0.0);
    }

    #[test]
    fn coincidence_definition() {
        let r = count_coincidences(&[], 20e-9, None).unwrap();
        assert_eq!(r.n_coincidences, 0);
        assert_eq!(r.ratio, 0.0);
        let pair = [
            ev(0.0, Some(DetectorLabel::One)),
            ev(10e-9, Some(DetectorLabel::Two)),
        ];
        let r = count_coincidences(&pair, 20e-9, None).unwrap();
        assert_eq!(r.n_coincidences, 1);
        assert_eq!(r.ratio, 1.0);
        let far = [
            ev(0.0, Some(DetectorLabel::One)),
            ev(30e-9, Some(DetectorLabel::Two)),
        ];
        assert_eq!(
            count_coincidences(&far, 20e-9, None)
                .unwrap()
                .n_coincidences,
            0
        );
    }

    #[test]
    fn greedy_pairs_each_click_once() {
        use DetectorLabel::*;
        let evs = [
            ev(0.0, Some(One)),
            ev(5e-9, Some(Two)),
            ev(8e-9, Some(One)),
            ev(100e-9, None),
        ];
        let r = count_coincidences(&evs, 20e-9, Some(1e-6)).unwrap();
        assert_eq!(r.n_coincidences, 1);
        assert_eq!((r.n_events_1, r.n_events_2), (2, 1));
        assert_eq!(r.ratio, 0.5);
    }

    #[test]
    fn coincidence_rejects_unordered() {
        let evs = [ev(1.0, None), ev(0.5, None)];
        assert!(matches!(
            count_coincidences(&evs, 20e-9, None),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn dead_time_filter() {
        use DetectorLabel::*;
        let evs = [
            ev(0.0, Some(One)),
            ev(10e-9, Some(One)),
            ev(15e-9, Some(Two)),
            ev(60e-9, Some(One)),
        ];
        let kept = apply_dead_time(&evs, 50e-9);
        assert_eq!(kept.len(), 3);
        assert_eq!(kept[2].t, 60e-9);
    }

    fn flat_field() -> (SampledField, [DetectorRegion; 2]) {
        let f = make_field(64, 64, 6.4e-3, 6.4e-3, 638e-9)
            .unwrap()
            .fill(|_, _| Complex64::new(1.0, 0.0));
        let regions = [
            DetectorRegion::new((1e-3, 0.0), 0.5e-3, DetectorLabel::One),
            DetectorRegion::new((-1e-3, 0.0), 0.5e-3, DetectorLabel::Two),
        ];
        (f, regions)
    }

    #[test]
    fn stream_counts_and_empty_duration() {
        let (f, regions) = flat_field();
        let p = StreamParams {
            flux: 1e4,
            duration: 1.0,
            dark_rate: 0.0,
            seed: 7,
        };
        let evs = sample_photon_stream(&f, &regions, &p).unwrap();
        let n = evs.len() as f64;
        assert!((n - 1e4).abs() < 300.0, "{n}");
        assert!(evs.windows(2).all(|w| w[0].t <= w[1].t));
        let empty =
            sample_photon_stream(&f, &regions, &StreamParams { duration: 0.0, ..p }).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn zero_field_cannot_normalize() {
        let (f, regions) = flat_field();
        let zero = f.scale(Complex64::new(0.0, 0.0));
        let p = StreamParams {
            flux: 1.0,
            duration: 1.0,
            dark_rate: 0.0,
            seed: 1,
        };
        assert_eq!(
            sample_photon_stream(&zero, &regions, &p),
            Err(Error::CannotNormalize)
        );
    }

    #[test]
    fn dark_counts_land_on_detectors() {
        let (f, regions) = flat_field();
        let p = StreamParams {
            flux: 1e-9,
            duration: 100.0,
            dark_rate: 50.0,
            seed: 3,
        };
        let evs = sample_photon_stream(&f, &regions, &p).unwrap();
        let n = evs.len() as f64;
        assert!((n - 1e4).abs() < 300.0);
        assert!(evs.iter().all(|e| e.detector.is_some()));
    }
}
