//! Free-space propagation, the analytic two-pinhole pattern and lens imaging.
//!
//! Two propagators cover the apparatus: the single-FFT Fresnel transform
//! rescales the pitch and handles long legs (pinholes to wire plane, lens to
//! image), the angular-spectrum method keeps the pitch and handles the short
//! wire-plane to lens leg.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::elements::{apply_thin_lens, ExperimentGeometry};
use crate::error::{Error, Result};
use crate::fft::{fft2_centered, Direction};
use crate::field::SampledField;
use crate::special::airy_envelope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PropagationMethod {
    /// Same pitch in and out; for short legs.
    AngularSpectrum,
    /// Output pitch `λz/(n·dx)`; for long legs.
    FresnelSingleFft,
}

/// Default tolerated fraction of spectral power outside the band limit.
pub const DEFAULT_ALIAS_TOLERANCE: f64 = 1e-6;

/// Sampling diagnostics of one angular-spectrum step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AngularSpectrumReport {
    pub z: f64,
    /// Largest |fx| admitted by the band-limited transfer function, 1/m.
    pub band_limit_x: f64,
    pub band_limit_y: f64,
    /// Grid Nyquist frequency along x, 1/m.
    pub nyquist_x: f64,
    /// Spectral power fraction removed by the band limit.
    pub clipped_fraction: f64,
}

/// Sampling diagnostics of one single-FFT Fresnel step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FresnelReport {
    pub z: f64,
    /// `(window/2)²/(λz)` of the input window.
    pub fresnel_number: f64,
    pub output_pitch_x: f64,
    pub output_pitch_y: f64,
    /// `λz/(n·dx²)`; at least 1 when the input chirp is Nyquist-sampled over
    /// the whole window.
    pub chirp_sampling_margin: f64,
}

/// Band-limited transfer-function criterion for a grid with spectral pitch `df`.
fn band_limit(wavelength: f64, df: f64, z: f64) -> f64 {
    let s = 2.0 * df * z.abs();
    1.0 / (wavelength * libm::sqrt(s * s + 1.0))
}

/// Angular-spectrum propagation by `z` (negative z propagates backwards).
pub fn propagate_angular_spectrum(field: SampledField, z: f64) -> Result<SampledField> {
    angular_spectrum_with_report(field, z, DEFAULT_ALIAS_TOLERANCE).map(|(f, _)| f)
}

/// As [`propagate_angular_spectrum`], reporting sampling margins. Fails when more
/// than `alias_tolerance` of the spectral power lies beyond the band limit;
/// anything below the tolerance is removed and reported.
pub fn angular_spectrum_with_report(
    mut field: SampledField,
    z: f64,
    alias_tolerance: f64,
) -> Result<(SampledField, AngularSpectrumReport)> {
    if !z.is_finite() {
        return Err(Error::invalid("propagation distance must be finite"));
    }
    let (nx, ny) = (field.nx(), field.ny());
    let lambda = field.wavelength();
    let dfx = 1.0 / field.window_x();
    let dfy = 1.0 / field.window_y();
    let y_inv = field.is_y_invariant();
    let mut report = AngularSpectrumReport {
        z,
        band_limit_x: band_limit(lambda, dfx, z),
        band_limit_y: if y_inv {
            0.0
        } else {
            band_limit(lambda, dfy, z)
        },
        nyquist_x: 0.5 / field.dx(),
        clipped_fraction: 0.0,
    };
    if z == 0.0 {
        return Ok((field, report));
    }

    fft2_centered(field.amplitudes_mut(), nx, ny, Direction::Forward, !y_inv)?;

    let fx: Vec<f64> = (0..nx)
        .map(|k| (k as f64 - (nx / 2) as f64) * dfx)
        .collect();
    let fy: Vec<f64> = if y_inv {
        alloc::vec![0.0; ny]
    } else {
        (0..ny)
            .map(|k| (k as f64 - (ny / 2) as f64) * dfy)
            .collect()
    };
    let kz = 2.0 * PI * z / lambda;
    let (lim_x, lim_y) = (report.band_limit_x, report.band_limit_y);
    let mut total = 0.0;
    let mut clipped = 0.0;
    for (iy, row) in field.amplitudes_mut().chunks_exact_mut(nx).enumerate() {
        let fyv = fy[iy];
        let qy = (lambda * fyv) * (lambda * fyv);
        let y_ok = y_inv || fyv.abs() <= lim_y;
        for (ix, v) in row.iter_mut().enumerate() {
            let p = v.norm_sqr();
            total += p;
            let fxv = fx[ix];
            let q = qy + (lambda * fxv) * (lambda * fxv);
            if !y_ok || fxv.abs() > lim_x || q >= 1.0 {
                clipped += p;
                *v = Complex64::new(0.0, 0.0);
                continue;
            }
            let ph = kz * libm::sqrt(1.0 - q);
            *v *= Complex64::new(libm::cos(ph), libm::sin(ph));
        }
    }
    report.clipped_fraction = if total > 0.0 { clipped / total } else { 0.0 };
    if report.clipped_fraction > alias_tolerance {
        return Err(Error::Sampling(alloc::format!(
            "angular spectrum over {z:.4e} m: {:.3e} of the spectral power lies beyond the \
             band limit {:.4e} /m (Nyquist {:.4e} /m, tolerance {alias_tolerance:.1e})",
            report.clipped_fraction,
            lim_x,
            report.nyquist_x
        )));
    }

    fft2_centered(field.amplitudes_mut(), nx, ny, Direction::Inverse, !y_inv)?;
    Ok((field, report))
}

/// Single-FFT Fresnel transform over a distance `z > 0`.
pub fn propagate_fresnel(field: SampledField, z: f64) -> Result<SampledField> {
    fresnel_with_report(field, z).map(|(f, _)| f)
}

pub fn fresnel_diagnostics(field: &SampledField, z: f64) -> FresnelReport {
    let lambda = field.wavelength();
    let half = 0.5 * field.window_x();
    FresnelReport {
        z,
        fresnel_number: half * half / (lambda * z),
        output_pitch_x: lambda * z / field.window_x(),
        output_pitch_y: if field.is_y_invariant() {
            field.dy()
        } else {
            lambda * z / field.window_y()
        },
        chirp_sampling_margin: lambda * z / (field.nx() as f64 * field.dx() * field.dx()),
    }
}

pub fn fresnel_with_report(
    mut field: SampledField,
    z: f64,
) -> Result<(SampledField, FresnelReport)> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::invalid(alloc::format!(
            "Fresnel propagation needs z > 0, got {z}"
        )));
    }
    let report = fresnel_diagnostics(&field, z);
    let (nx, ny) = (field.nx(), field.ny());
    let lambda = field.wavelength();
    let y_inv = field.is_y_invariant();
    let (dx1, dy1) = (field.dx(), field.dy());
    let (dx2, dy2) = (report.output_pitch_x, report.output_pitch_y);
    let a = PI / (lambda * z);
    let chirp = |u: f64| {
        let ph = a * u * u;
        Complex64::new(libm::cos(ph), libm::sin(ph))
    };

    let xs_in = field.xs();
    let ys_in = field.ys();
    let cx: Vec<Complex64> = xs_in.iter().map(|&x| chirp(x)).collect();
    let cy: Vec<Complex64> = ys_in.iter().map(|&y| chirp(y)).collect();
    for (iy, row) in field.amplitudes_mut().chunks_exact_mut(nx).enumerate() {
        let c = cy[iy];
        for (v, cxv) in row.iter_mut().zip(&cx) {
            *v *= cxv * c;
        }
    }

    fft2_centered(field.amplitudes_mut(), nx, ny, Direction::Forward, !y_inv)?;

    // e^{ikz}/(iλz)·dx·dy in 2-D, e^{ikz}e^{-iπ/4}/√(λz)·dx in 1-D.
    let kz = 2.0 * PI * z / lambda;
    let carrier = Complex64::new(libm::cos(kz), libm::sin(kz));
    let prefactor = if y_inv {
        carrier
            * Complex64::new(libm::cos(-PI / 4.0), libm::sin(-PI / 4.0))
            * (dx1 / libm::sqrt(lambda * z))
    } else {
        carrier * Complex64::new(0.0, -1.0) * (dx1 * dy1 / (lambda * z))
    };
    field.set_pitch(dx2, if y_inv { dy1 } else { dy2 });
    let xs_out = field.xs();
    let ys_out = field.ys();
    let ox: Vec<Complex64> = xs_out.iter().map(|&x| chirp(x) * prefactor).collect();
    let oy: Vec<Complex64> = ys_out.iter().map(|&y| chirp(y)).collect();
    for (iy, row) in field.amplitudes_mut().chunks_exact_mut(nx).enumerate() {
        let c = oy[iy];
        for (v, oxv) in row.iter_mut().zip(&ox) {
            *v *= oxv * c;
        }
    }
    Ok((field, report))
}

/// `I₀·(2J₁(au)/au)²·cos²(bx)`.
pub fn analytic_two_pinhole_intensity(u: f64, x: f64, i0: f64, a: f64, b: f64) -> f64 {
    let c = libm::cos(b * x);
    i0 * airy_envelope(a * u) * c * c
}

/// Diagnostics of the wire-plane to image-plane relay.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImagingReport {
    pub to_lens: AngularSpectrumReport,
    pub to_image: FresnelReport,
    pub power_at_lens: f64,
    pub power_after_aperture: f64,
}

/// Relay the wire-plane field through the lens to the image plane.
pub fn image_through_lens(
    field_at_wire_plane: SampledField,
    geom: &ExperimentGeometry,
) -> Result<SampledField> {
    image_through_lens_with_report(field_at_wire_plane, geom).map(|(f, _)| f)
}

pub fn image_through_lens_with_report(
    field_at_wire_plane: SampledField,
    geom: &ExperimentGeometry,
) -> Result<(SampledField, ImagingReport)> {
    geom.validate()?;
    let leg = geom.lens_object_distance - geom.grid_distance;
    let (at_lens, to_lens) =
        angular_spectrum_with_report(field_at_wire_plane, leg, DEFAULT_ALIAS_TOLERANCE)?;
    let power_at_lens = at_lens.total_power();
    let after = apply_thin_lens(at_lens, geom.lens_focal_length, geom.lens_aperture_diameter)?;
    let power_after_aperture = after.total_power();
    let (mut image, to_image) = fresnel_with_report(after, geom.lens_image_distance)?;

    let reach = 0.5 * geom.magnification() * geom.pinhole_separation + geom.detector_radius;
    let half = 0.5
        * image.window_x().min(if image.is_y_invariant() {
            f64::INFINITY
        } else {
            image.window_y()
        });
    if reach >= half {
        return Err(Error::Sampling(alloc::format!(
            "image window half-width {half:.4e} m cannot hold the detectors reaching {reach:.4e} m"
        )));
    }
    image.set_label("image");
    Ok((
        image,
        ImagingReport {
            to_lens,
            to_image,
            power_at_lens,
            power_after_aperture,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use approx::assert_relative_eq;

    fn gaussian(n: usize, window: f64, w0: f64) -> SampledField {
        make_field(n, n, window, window, 638e-9)
            .unwrap()
            .fill(|x, y| Complex64::new(libm::exp(-(x * x + y * y) / (w0 * w0)), 0.0))
    }

    #[test]
    fn zero_distance_is_identity() {
        let f = gaussian(64, 2e-3, 2e-4);
        let g = propagate_angular_spectrum(f.clone(), 0.0).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn plane_wave_phase_advance() {
        let f = make_field(32, 32, 1e-3, 1e-3, 638e-9)
            .unwrap()
            .fill(|_, _| Complex64::new(1.0, 0.0));
        let p = f.total_power();
        let z = 0.1234;
        let g = propagate_angular_spectrum(f, z).unwrap();
        assert_relative_eq!(g.total_power(), p, max_relative = 1e-6);
        let k = 2.0 * PI / 638e-9;
        let want = Complex64::new((k * z).cos(), (k * z).sin());
        for a in g.amplitudes() {
            assert!((a - want).norm() < 1e-6);
        }
    }

    #[test]
    fn fresnel_rejects_bad_distance() {
        let f = gaussian(16, 1e-3, 1e-4);
        assert!(propagate_fresnel(f.clone(), 0.0).is_err());
        assert!(propagate_fresnel(f, -1.0).is_err());
    }

    #[test]
    fn fresnel_conserves_power_and_rescales() {
        let f = gaussian(128, 2e-3, 1e-4);
        let p = f.total_power();
        let (g, r) = fresnel_with_report(f, 0.5).unwrap();
        assert_relative_eq!(g.total_power(), p, max_relative = 1e-9);
        assert_relative_eq!(g.dx(), 638e-9 * 0.5 / 2e-3, max_relative = 1e-12);
        assert_relative_eq!(r.output_pitch_x, g.dx());
    }

    #[test]
    fn zero_field_stays_zero() {
        let f = make_field(32, 32, 1e-3, 1e-3, 638e-9).unwrap();
        assert_eq!(
            propagate_fresnel(f.clone(), 0.3).unwrap().total_power(),
            0.0
        );
        assert_eq!(
            propagate_angular_spectrum(f, 0.3).unwrap().total_power(),
            0.0
        );
    }

    #[test]
    fn aliasing_is_reported() {
        // white noise fills the spectrum up to Nyquist; a long leg must refuse it
        let mut s = 1u64;
        let f = make_field(64, 64, 6.4e-4, 6.4e-4, 638e-9)
            .unwrap()
            .fill(|_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                Complex64::new((s >> 11) as f64 / (1u64 << 53) as f64, 0.0)
            });
        let err = propagate_angular_spectrum(f, 1.0).unwrap_err();
        assert!(matches!(err, Error::Sampling(_)));
    }

    #[test]
    fn analytic_pattern_values() {
        let (a, b) = (358.0, 2462.0);
        assert_eq!(analytic_two_pinhole_intensity(0.0, 0.0, 2.5, a, b), 2.5);
        assert!(analytic_two_pinhole_intensity(0.0, PI / (2.0 * b), 1.0, a, b).abs() < 1e-30);
        let u = crate::special::J1_FIRST_ZERO / a;
        assert!(analytic_two_pinhole_intensity(u, 0.0, 1.0, a, b).abs() < 1e-20);
        assert!(analytic_two_pinhole_intensity(u, 1.234e-3, 1.0, a, b).abs() < 1e-20);
    }
}
