//! Visibility, which-way information and the Greenberger–Yasin sum.
//!
//! Percent-valued inputs (`W2`, leak counts) are accepted on any consistent
//! scale; only their ratios enter the results.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::IntensityProfile;

/// A value that was clamped into its valid range.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Clamped {
    pub value: f64,
    /// Set when the raw value fell outside the valid range.
    pub clamped: bool,
}

impl Clamped {
    fn unit(raw: f64) -> Self {
        if raw < 0.0 {
            Clamped {
                value: 0.0,
                clamped: true,
            }
        } else if raw > 1.0 {
            Clamped {
                value: 1.0,
                clamped: true,
            }
        } else {
            Clamped {
                value: raw,
                clamped: false,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectorCounts {
    /// Normalized total count at detector 2.
    pub w2: f64,
    /// Part of `w2` originating from pinhole A.
    pub w_a2: f64,
    /// Part of `w2` originating from pinhole B.
    pub w_b2: f64,
    /// Normalized detector-2 count with pinhole B blocked.
    pub e2b_blocked_sq: f64,
}

impl DetectorCounts {
    pub fn from_components(w_a2: f64, w_b2: f64) -> Self {
        Self {
            w2: w_a2 + w_b2,
            w_a2,
            w_b2,
            e2b_blocked_sq: 0.0,
        }
    }
}

/// Everything the visibility / which-way analysis produces.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DualityMetrics {
    /// Scanned-pattern visibility; only available from a simulation.
    pub v_direct: Option<f64>,
    pub v_wire_limited: Clamped,
    pub v_star_lower_bound: Clamped,
    pub intensity_ratio: f64,
    pub blocked_fraction: f64,
    pub k_a: Clamped,
    pub k_b: Clamped,
    pub gy_value: f64,
    pub gy_violated: bool,
}

/// Inputs of the pure arithmetic pipeline, in millimetres and percent.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricInputs {
    /// Normalized count at detector 2 (both pinholes open, grid in), %.
    pub w2: f64,
    /// Normalized leak count at detector 2 with pinhole B blocked, %.
    pub leak_b: f64,
    /// Same pair for detector 1 / pinhole A blocked.
    pub w1: f64,
    pub leak_a: f64,
    pub blocked_fraction: f64,
    pub airy_radius_mm: f64,
    pub wire_thickness_mm: f64,
    pub wire_count: usize,
    pub fringe_constant_per_mm: f64,
}

impl Default for MetricInputs {
    /// The measured values reported for the apparatus.
    fn default() -> Self {
        Self {
            w2: 98.87,
            leak_b: 0.46,
            w1: 99.69,
            leak_a: 0.41,
            blocked_fraction: 0.01,
            airy_radius_mm: 10.7,
            wire_thickness_mm: 0.127,
            wire_count: 6,
            fringe_constant_per_mm: 2.462,
        }
    }
}

/// `(I_max − I_min)/(I_max + I_min)`.
pub fn visibility(i_max: f64, i_min: f64) -> Result<f64> {
    if !(i_max.is_finite() && i_min.is_finite()) || i_min < 0.0 {
        return Err(Error::invalid(
            "intensities must be finite and non-negative",
        ));
    }
    if i_max <= 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    if i_min > i_max {
        return Err(Error::invalid(alloc::format!(
            "i_min {i_min} exceeds i_max {i_max}"
        )));
    }
    Ok((i_max - i_min) / (i_max + i_min))
}

/// Visibility bound set by a wire of thickness `t` centred on a dark fringe of
/// `cos²(bx)`: `1 − b²t²/2`. Units of `b` and `t` must be reciprocal.
pub fn wire_limited_visibility(b: f64, t: f64) -> Clamped {
    Clamped::unit(1.0 - 0.5 * b * b * t * t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorstCase {
    /// `I_max / I_min` of the square-wave pattern.
    pub ratio: f64,
    pub v_lower: Clamped,
    /// Area covered by the wires inside the Airy disk, `n·2Rt`.
    pub wire_area: f64,
}

/// Lowest visibility compatible with a measured blocked fraction: a square-wave
/// pattern whose dark bars coincide with the wires inside the Airy disk.
pub fn worst_case_visibility(
    airy_radius: f64,
    wire_thickness: f64,
    n_wires: usize,
    blocked_fraction: f64,
) -> Result<WorstCase> {
    if !(blocked_fraction > 0.0 && blocked_fraction < 1.0) {
        return Err(Error::invalid(alloc::format!(
            "blocked fraction {blocked_fraction} must lie in (0, 1)"
        )));
    }
    if !(airy_radius > 0.0 && wire_thickness > 0.0 && n_wires > 0) {
        return Err(Error::InvalidGeometry(
            "radius, thickness and wire count must be positive".into(),
        ));
    }
    let wire_area = n_wires as f64 * 2.0 * airy_radius * wire_thickness;
    let disk = PI * airy_radius * airy_radius;
    if wire_area >= disk {
        return Err(Error::InvalidGeometry(alloc::format!(
            "wire area {wire_area:.4} exceeds the Airy disk area {disk:.4}"
        )));
    }
    let i_max = (1.0 - blocked_fraction) / (disk - wire_area);
    let i_min = blocked_fraction / wire_area;
    let ratio = i_max / i_min;
    Ok(WorstCase {
        ratio,
        v_lower: Clamped::unit((ratio - 1.0) / (ratio + 1.0)),
        wire_area,
    })
}

/// `K_B = (W_B2 − W_A2)/(W_A2 + W_B2)`.
pub fn which_way_from_components(counts: &DetectorCounts) -> Result<f64> {
    let w2 = counts.w_a2 + counts.w_b2;
    if !(w2 > 0.0) {
        return Err(Error::UndefinedWhichWay);
    }
    if counts.w_a2 < 0.0 || counts.w_b2 < 0.0 {
        return Err(Error::invalid("detector components must be non-negative"));
    }
    Ok((counts.w_b2 - counts.w_a2) / w2)
}

/// Lower bound `1 − 6·leak/W2`, from `W_A2 ≤ 3·leak`.
pub fn which_way_lower_bound(w2: f64, leak: f64) -> Result<Clamped> {
    if !(w2 > 0.0) {
        return Err(Error::UndefinedWhichWay);
    }
    if !(leak >= 0.0) {
        return Err(Error::invalid("leak count must be non-negative"));
    }
    Ok(Clamped::unit(1.0 - 6.0 * leak / w2))
}

/// `(E_A + E_B)²` and its cross term `2·E_A·E_B` for real, in-phase amplitudes.
pub fn superposition_decompose(e_a: f64, e_b: f64) -> (f64, f64) {
    let s = e_a + e_b;
    (s * s, 2.0 * e_a * e_b)
}

/// Count at detector 2 attributed to pinhole A: the leak itself plus the share
/// `E_leak/E_total` of the cross term, with amplitudes solved from `W2` and the
/// leak under the in-phase assumption.
pub fn attributed_leak_count(w2: f64, leak: f64) -> Result<f64> {
    if !(w2 > 0.0) || leak < 0.0 || leak > w2 {
        return Err(Error::invalid("need 0 <= leak <= w2 and w2 > 0"));
    }
    let e_total = libm::sqrt(w2);
    let e_leak = libm::sqrt(leak);
    let e_main = e_total - e_leak;
    let (_, cross) = superposition_decompose(e_main, e_leak);
    Ok(leak + e_leak / e_total * cross)
}

/// `V² + K²` and whether it exceeds 1.
pub fn greenberger_yasin(v: f64, k: f64) -> Result<(f64, bool)> {
    if !(0.0..=1.0).contains(&v) || !(0.0..=1.0).contains(&k) {
        return Err(Error::invalid(alloc::format!(
            "V = {v} and K = {k} must both lie in [0, 1]"
        )));
    }
    let value = v * v + k * k;
    Ok((value, value > 1.0))
}

const PROMINENCE_FLOOR: f64 = 1e-6;

/// Fringe visibility of a scanned profile over `region = (lo, hi)`, from the
/// mean of its local maxima and the mean of its local minima.
pub fn measure_visibility_direct(profile: &IntensityProfile, region: (f64, f64)) -> Result<f64> {
    let cut = profile.window(region.0, region.1);
    let v = &cut.values;
    let floor = PROMINENCE_FLOOR * cut.peak();
    let (mut max_sum, mut n_max) = (0.0, 0usize);
    let (mut min_sum, mut n_min) = (0.0, 0usize);
    for i in 1..v.len().saturating_sub(1) {
        let (l, c, r) = (v[i - 1], v[i], v[i + 1]);
        if c >= l && c >= r && c - l.min(r) > floor {
            max_sum += c;
            n_max += 1;
        } else if c <= l && c <= r && l.max(r) - c > floor {
            min_sum += c;
            n_min += 1;
        }
    }
    if n_max < 2 || n_min < 1 {
        return Err(Error::InsufficientFringes {
            maxima: n_max,
            minima: n_min,
        });
    }
    visibility(max_sum / n_max as f64, min_sum / n_min as f64)
}

/// The full arithmetic chain from measured (or simulated) inputs.
pub fn evaluate(inputs: &MetricInputs, v_direct: Option<f64>) -> Result<DualityMetrics> {
    let v_wire_limited =
        wire_limited_visibility(inputs.fringe_constant_per_mm, inputs.wire_thickness_mm);
    let wc = worst_case_visibility(
        inputs.airy_radius_mm,
        inputs.wire_thickness_mm,
        inputs.wire_count,
        inputs.blocked_fraction,
    )?;
    let k_b = which_way_lower_bound(inputs.w2, inputs.leak_b)?;
    let k_a = which_way_lower_bound(inputs.w1, inputs.leak_a)?;
    let k = k_a.value.min(k_b.value);
    let (gy_value, gy_violated) = greenberger_yasin(wc.v_lower.value, k)?;
    Ok(DualityMetrics {
        v_direct,
        v_wire_limited,
        v_star_lower_bound: wc.v_lower,
        intensity_ratio: wc.ratio,
        blocked_fraction: inputs.blocked_fraction,
        k_a,
        k_b,
        gy_value,
        gy_violated,
    })
}
