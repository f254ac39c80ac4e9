use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use welcher_core::elements::integrate_detector;
use welcher_core::field::make_field;
use welcher_core::photon::{
    count_coincidences, poisson_arrivals, sample_photon_stream, StreamParams,
};
use welcher_core::{Complex64, DetectorLabel, DetectorRegion, Error, PhotonEvent, SampledField};

const W: f64 = 1e-3;

fn regions() -> [DetectorRegion; 2] {
    [
        DetectorRegion::new((-2.5e-4, 0.0), 1e-4, DetectorLabel::One),
        DetectorRegion::new((2.5e-4, 0.0), 1e-4, DetectorLabel::Two),
    ]
}

/// Three Gaussian spots: two on the detectors, one between them.
fn spots(weights: [f64; 3]) -> SampledField {
    let centres = [(-2.5e-4, 0.0), (2.5e-4, 0.0), (0.0, 3e-4)];
    make_field(64, 64, W, W, 638e-9).unwrap().fill(|x, y| {
        let i: f64 = centres
            .iter()
            .zip(weights)
            .map(|(&(cx, cy), w)| {
                w * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * 2.5e-5f64.powi(2))).exp()
            })
            .sum();
        Complex64::new(i.sqrt(), 0.0)
    })
}

fn params(flux: f64, duration: f64, dark_rate: f64, seed: u64) -> StreamParams {
    StreamParams {
        flux,
        duration,
        dark_rate,
        seed,
    }
}

fn count(events: &[PhotonEvent], label: DetectorLabel) -> f64 {
    events.iter().filter(|e| e.detector == Some(label)).count() as f64
}

#[test]
fn event_count_is_poisson() {
    let f = spots([1.0, 1.0, 1.0]);
    let ev = sample_photon_stream(&f, &regions(), &params(1e4, 1.0, 0.0, 11)).unwrap();
    assert!((ev.len() as f64 - 1e4).abs() < 3.0 * 100.0, "{}", ev.len());
    let ev = sample_photon_stream(&f, &regions(), &params(1e4, 2.0, 500.0, 12)).unwrap();
    let mean = 2e4 + 2.0 * 500.0 * 2.0;
    assert!(
        (ev.len() as f64 - mean).abs() < 3.0 * mean.sqrt(),
        "{}",
        ev.len()
    );
    assert!(ev.windows(2).all(|p| p[0].t <= p[1].t));
    assert!(ev.iter().all(|e| e.t >= 0.0 && e.t < 2.0));
}

#[test]
fn empty_and_dark_inputs() {
    let f = spots([1.0, 1.0, 1.0]);
    assert!(
        sample_photon_stream(&f, &regions(), &params(1e4, 0.0, 100.0, 1))
            .unwrap()
            .is_empty()
    );
    let dark = make_field(64, 64, W, W, 638e-9).unwrap();
    let err = sample_photon_stream(&dark, &regions(), &params(1e4, 1.0, 0.0, 1)).unwrap_err();
    assert!(matches!(err, Error::CannotNormalize));
}

#[test]
fn detector_fractions_follow_intensity() {
    let f = spots([0.7, 0.2, 0.1]);
    let total = f.total_power();
    let ev = sample_photon_stream(&f, &regions(), &params(2e5, 1.0, 0.0, 5)).unwrap();
    let n = ev.len() as f64;
    for r in regions() {
        let p = integrate_detector(&f, &r).unwrap() / total;
        let got = count(&ev, r.label);
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!(
            (got - n * p).abs() < 3.0 * sigma,
            "{:?}: {got} vs {}",
            r.label,
            n * p
        );
    }
}

#[test]
fn symmetric_image_gives_equal_counts() {
    let f = spots([1.0, 1.0, 0.3]);
    let ev = sample_photon_stream(&f, &regions(), &params(1e5, 1.0, 100.0, 9)).unwrap();
    let (n1, n2) = (
        count(&ev, DetectorLabel::One),
        count(&ev, DetectorLabel::Two),
    );
    assert!((n1 - n2).abs() < 3.0 * (n1 + n2).sqrt(), "{n1} vs {n2}");
}

#[test]
fn positions_pass_chi_square() {
    let f = make_field(64, 64, W, W, 638e-9).unwrap().fill(|x, y| {
        let i = 1.0
            + 0.8 * (3.0 * std::f64::consts::TAU * x / W).sin()
            + 2.0 * (-(x * x + y * y) / 1e-8).exp();
        Complex64::new(i.sqrt(), 0.0)
    });
    let ev = sample_photon_stream(&f, &regions(), &params(1e6, 1.0, 0.0, 2024)).unwrap();
    assert!(ev.len() >= 990_000);

    // 32 bins of two columns each; jitter never leaves the cell
    let bins = 32;
    let per = f.nx() / bins;
    let mut expected = vec![0.0; bins];
    for iy in 0..f.ny() {
        for ix in 0..f.nx() {
            expected[ix / per] += f.intensity(ix, iy);
        }
    }
    let norm: f64 = expected.iter().sum();
    let left = f.x_at(0) - 0.5 * f.dx();
    let mut observed = vec![0.0; bins];
    for e in &ev {
        let k = ((e.position.0 - left) / (per as f64 * f.dx())).floor() as usize;
        observed[k.min(bins - 1)] += 1.0;
    }
    let n = ev.len() as f64;
    let chi2: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(o, e)| {
            let m = n * e / norm;
            (o - m) * (o - m) / m
        })
        .sum();
    // 0.1% upper critical value of chi-square with 31 degrees of freedom
    assert!(chi2 < 61.098, "chi2 = {chi2}");
}

#[test]
fn streams_are_deterministic() {
    let f = spots([1.0, 0.5, 0.2]);
    let a = sample_photon_stream(&f, &regions(), &params(3e4, 1.0, 100.0, 77)).unwrap();
    let b = sample_photon_stream(&f, &regions(), &params(3e4, 1.0, 100.0, 77)).unwrap();
    let c = sample_photon_stream(&f, &regions(), &params(3e4, 1.0, 100.0, 78)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

fn two_streams(rate: f64, duration: f64, seed: u64) -> Vec<PhotonEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ev: Vec<PhotonEvent> = [DetectorLabel::One, DetectorLabel::Two]
        .into_iter()
        .flat_map(|label| {
            poisson_arrivals(rate, duration, &mut rng)
                .into_iter()
                .map(move |t| PhotonEvent {
                    t,
                    detector: Some(label),
                    position: (0.0, 0.0),
                })
                .collect::<Vec<_>>()
        })
        .collect();
    ev.sort_by(|a, b| a.t.total_cmp(&b.t));
    ev
}

#[test]
fn accidental_coincidences_match_formula() {
    let (rate, duration, window): (f64, f64, f64) = (1.5e4, 100.0, 20e-9);
    let closed_form = 1.0 - (-rate * 2.0 * window).exp();
    assert!((closed_form - 6.0e-4).abs() < 0.01e-4);

    let seeds = 20;
    let (mut ratio_sum, mut expect_sum, mut var_sum) = (0.0, 0.0, 0.0);
    for seed in 0..seeds {
        let ev = two_streams(rate, duration, seed);
        let r = count_coincidences(&ev, window, Some(duration)).unwrap();
        let n = r.n_events_1.max(r.n_events_2) as f64;
        ratio_sum += r.ratio;
        expect_sum += r.analytic_expectation;
        var_sum += r.analytic_expectation * (1.0 - r.analytic_expectation) / n;
    }
    let k = seeds as f64;
    let sigma = var_sum.sqrt() / k;
    let (mean, expect) = (ratio_sum / k, expect_sum / k);
    assert!(
        (mean - expect).abs() < 3.0 * sigma,
        "{mean} vs {expect} ± {sigma}"
    );
    assert!(
        (expect - closed_form).abs() < 1e-2 * closed_form,
        "{expect} vs {closed_form}"
    );
}

#[test]
fn coincidences_ignore_detector_labels() {
    let ev = two_streams(2e5, 1.0, 3);
    let swapped: Vec<PhotonEvent> = ev
        .iter()
        .map(|e| PhotonEvent {
            detector: e.detector.map(DetectorLabel::other),
            ..*e
        })
        .collect();
    let a = count_coincidences(&ev, 20e-9, Some(1.0)).unwrap();
    let b = count_coincidences(&swapped, 20e-9, Some(1.0)).unwrap();
    assert_eq!(a.n_coincidences, b.n_coincidences);
    assert_eq!((a.n_events_1, a.n_events_2), (b.n_events_2, b.n_events_1));
    assert!(a.n_coincidences > 0);
}

#[test]
fn coincidence_definition() {
    let hit = |t, d| PhotonEvent {
        t,
        detector: Some(d),
        position: (0.0, 0.0),
    };
    assert_eq!(
        count_coincidences(&[], 20e-9, None).unwrap().n_coincidences,
        0
    );
    let pair = [
        hit(1e-6, DetectorLabel::One),
        hit(1.01e-6, DetectorLabel::Two),
    ];
    assert_eq!(
        count_coincidences(&pair, 20e-9, None)
            .unwrap()
            .n_coincidences,
        1
    );
    let unordered = [pair[1], pair[0]];
    assert!(count_coincidences(&unordered, 20e-9, None).is_err());
}
