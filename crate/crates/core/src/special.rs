//! Bessel-function helpers for circular-aperture diffraction.

/// First positive zero of J₁.
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;

/// `J1_FIRST_ZERO / π`, the familiar 1.22 of the Airy first-zero radius.
pub const AIRY_ZERO_FACTOR: f64 = J1_FIRST_ZERO / core::f64::consts::PI;

/// Bessel function of the first kind, order one.
pub fn bessel_j1(v: f64) -> f64 {
    libm::j1(v)
}

/// Amplitude jinc `2·J₁(v)/v`, equal to 1 at `v = 0`.
///
/// Small arguments use the power series so the removable singularity is never
/// evaluated as 0/0.
pub fn jinc(v: f64) -> f64 {
    let v2 = v * v;
    if v.abs() < 1e-3 {
        // 2J1(v)/v = 1 - v²/8 + v⁴/192 - ...
        1.0 - v2 / 8.0 + v2 * v2 / 192.0
    } else {
        2.0 * bessel_j1(v) / v
    }
}

/// Airy intensity envelope `(2J₁(v)/v)²`.
pub fn airy_envelope(v: f64) -> f64 {
    let j = jinc(v);
    j * j
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jinc_limit_and_zero() {
        assert_eq!(jinc(0.0), 1.0);
        assert!((jinc(1e-4) - 1.0).abs() < 1e-8);
        assert!(jinc(J1_FIRST_ZERO).abs() < 1e-12);
        // continuity across the series switch
        assert!((jinc(0.999e-3) - 2.0 * libm::j1(0.999e-3) / 0.999e-3).abs() < 1e-12);
    }

    #[test]
    fn tabulated_values() {
        // Abramowitz & Stegun table 9.1
        assert!((bessel_j1(1.0) - 0.440_050_585_7).abs() < 1e-9);
        assert!((bessel_j1(2.0) - 0.576_724_807_8).abs() < 1e-9);
        assert!((AIRY_ZERO_FACTOR - 1.219_67).abs() < 1e-5);
    }
}
