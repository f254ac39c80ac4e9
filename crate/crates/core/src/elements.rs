//! Transmission masks, the thin lens and detector regions.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::special::{AIRY_ZERO_FACTOR, J1_FIRST_ZERO};

/// Physical parameters of the apparatus. All lengths in metres.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ExperimentGeometry {
    pub wavelength: f64,
    pub pinhole_diameter: f64,
    /// Centre-to-centre, along x.
    pub pinhole_separation: f64,
    /// Pinholes to wire plane.
    pub grid_distance: f64,
    pub wire_thickness: f64,
    pub wire_count: usize,
    /// Half-width of the uniform placement error of each wire.
    pub wire_alignment_tolerance: f64,
    /// Pinholes to lens.
    pub lens_object_distance: f64,
    /// Lens to image plane.
    pub lens_image_distance: f64,
    pub lens_focal_length: f64,
    pub lens_aperture_diameter: f64,
    pub detector_radius: f64,
}

impl Default for ExperimentGeometry {
    fn default() -> Self {
        let s_o = 0.70;
        let s_i = 2.80;
        Self {
            wavelength: 638e-9,
            pinhole_diameter: 40e-6,
            pinhole_separation: 250e-6,
            grid_distance: 0.55,
            wire_thickness: 127e-6,
            wire_count: 6,
            wire_alignment_tolerance: 10e-6,
            lens_object_distance: s_o,
            lens_image_distance: s_i,
            lens_focal_length: s_o * s_i / (s_o + s_i),
            lens_aperture_diameter: 0.05,
            detector_radius: 0.5e-3,
        }
    }
}

impl ExperimentGeometry {
    pub fn magnification(&self) -> f64 {
        self.lens_image_distance / self.lens_object_distance
    }

    /// Intensity fringe period `λL/d` at the wire plane.
    pub fn fringe_period(&self) -> f64 {
        self.wavelength * self.grid_distance / self.pinhole_separation
    }

    /// Fringe constant `b` of `cos²(bx)`, i.e. `π/period`.
    pub fn fringe_constant(&self) -> f64 {
        PI / self.fringe_period()
    }

    /// Radius of the first dark ring of one pinhole at the wire plane.
    pub fn airy_radius(&self) -> f64 {
        AIRY_ZERO_FACTOR * self.wavelength * self.grid_distance / self.pinhole_diameter
    }

    /// Envelope constant `a` of `(2J₁(au)/au)²`.
    pub fn airy_constant(&self) -> f64 {
        J1_FIRST_ZERO / self.airy_radius()
    }

    /// x positions of pinholes A and B.
    pub fn pinhole_centers(&self) -> [f64; 2] {
        let h = 0.5 * self.pinhole_separation;
        [-h, h]
    }

    /// Residual of the thin-lens equation, 1/m.
    pub fn imaging_residual(&self) -> f64 {
        1.0 / self.lens_object_distance + 1.0 / self.lens_image_distance
            - 1.0 / self.lens_focal_length
    }

    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("wavelength", self.wavelength),
            ("pinhole_diameter", self.pinhole_diameter),
            ("pinhole_separation", self.pinhole_separation),
            ("grid_distance", self.grid_distance),
            ("wire_thickness", self.wire_thickness),
            ("lens_object_distance", self.lens_object_distance),
            ("lens_image_distance", self.lens_image_distance),
            ("lens_focal_length", self.lens_focal_length),
            ("lens_aperture_diameter", self.lens_aperture_diameter),
            ("detector_radius", self.detector_radius),
        ];
        for (name, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidGeometry(alloc::format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.wire_alignment_tolerance.is_finite() && self.wire_alignment_tolerance >= 0.0) {
            return Err(Error::InvalidGeometry(
                "wire_alignment_tolerance must be >= 0".into(),
            ));
        }
        if self.wire_count == 0 {
            return Err(Error::InvalidGeometry(
                "wire_count must be at least 1".into(),
            ));
        }
        if self.pinhole_diameter >= self.pinhole_separation {
            return Err(Error::InvalidGeometry("pinholes overlap".into()));
        }
        if self.lens_object_distance <= self.grid_distance {
            return Err(Error::InvalidGeometry(
                "lens must sit beyond the wire plane".into(),
            ));
        }
        let residual = self.imaging_residual();
        if residual.abs() >= 1e-9 {
            return Err(Error::InvalidGeometry(alloc::format!(
                "imaging condition violated: 1/s_o + 1/s_i - 1/f = {residual:.3e} /m"
            )));
        }
        Ok(())
    }

    /// Detector regions centred on the (inverted) images of A and B.
    pub fn detector_regions(&self) -> [DetectorRegion; 2] {
        let m = self.magnification();
        let [xa, xb] = self.pinhole_centers();
        [
            DetectorRegion::new((-m * xa, 0.0), self.detector_radius, DetectorLabel::One),
            DetectorRegion::new((-m * xb, 0.0), self.detector_radius, DetectorLabel::Two),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PinholeBlock {
    #[default]
    None,
    BlockA,
    BlockB,
}

impl PinholeBlock {
    pub fn a_open(self) -> bool {
        self != PinholeBlock::BlockA
    }

    pub fn b_open(self) -> bool {
        self != PinholeBlock::BlockB
    }
}

/// How mask edges are rasterized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum EdgeMode {
    /// Transmission 0 or 1 depending on whether the sample centre is inside.
    #[default]
    Binary,
    /// Transmission equal to the open fraction of each pixel's area.
    AreaWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DetectorLabel {
    /// Conjugate to pinhole A.
    #[cfg_attr(feature = "serde", serde(rename = "1"))]
    One,
    /// Conjugate to pinhole B.
    #[cfg_attr(feature = "serde", serde(rename = "2"))]
    Two,
}

impl DetectorLabel {
    pub fn number(self) -> u8 {
        match self {
            DetectorLabel::One => 1,
            DetectorLabel::Two => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            DetectorLabel::One => DetectorLabel::Two,
            DetectorLabel::Two => DetectorLabel::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectorRegion {
    pub center: (f64, f64),
    pub radius: f64,
    pub label: DetectorLabel,
}

impl DetectorRegion {
    pub fn new(center: (f64, f64), radius: f64, label: DetectorLabel) -> Self {
        Self {
            center,
            radius,
            label,
        }
    }

    /// Whether a point lies inside. One-dimensional fields ignore `y`.
    pub fn contains(&self, x: f64, y: f64, y_invariant: bool) -> bool {
        let ddx = x - self.center.0;
        if y_invariant {
            return ddx.abs() <= self.radius;
        }
        let ddy = y - self.center.1;
        ddx * ddx + ddy * ddy <= self.radius * self.radius
    }

    /// Flat indices of the samples whose centres fall in the region.
    pub fn sample_indices(&self, field: &SampledField) -> Result<Vec<usize>> {
        self.check_inside(field)?;
        let mut out = Vec::new();
        for iy in 0..field.ny() {
            let y = field.y_at(iy);
            for ix in 0..field.nx() {
                if self.contains(field.x_at(ix), y, field.is_y_invariant()) {
                    out.push(iy * field.nx() + ix);
                }
            }
        }
        Ok(out)
    }

    fn check_inside(&self, field: &SampledField) -> Result<()> {
        let (x0, x1) = (field.x_at(0), field.x_at(field.nx() - 1));
        let (y0, y1) = (field.y_at(0), field.y_at(field.ny() - 1));
        let (cx, cy) = self.center;
        let r = self.radius;
        let y_ok = field.is_y_invariant() || (cy - r >= y0 && cy + r <= y1);
        if !(r > 0.0 && cx - r >= x0 && cx + r <= x1 && y_ok) {
            return Err(Error::OutOfRange {
                what: "detector region",
                detail: alloc::format!(
                    "centre ({cx:.3e}, {cy:.3e}) m, radius {r:.3e} m exceeds the field window"
                ),
            });
        }
        Ok(())
    }
}

const SUPERSAMPLE: usize = 32;

/// Open fraction of the pixel centred at (x, y) for a disk of radius r at (cx, 0).
fn disk_coverage(x: f64, y: f64, cx: f64, r: f64, dx: f64, dy: f64, mode: EdgeMode) -> f64 {
    let ddx = x - cx;
    match mode {
        EdgeMode::Binary => {
            if ddx * ddx + y * y <= r * r {
                1.0
            } else {
                0.0
            }
        }
        EdgeMode::AreaWeighted => {
            let hx = 0.5 * dx;
            let hy = 0.5 * dy;
            let near = |d: f64, h: f64| if d.abs() <= h { 0.0 } else { d.abs() - h };
            let far = |d: f64, h: f64| d.abs() + h;
            let (nx_, ny_) = (near(ddx, hx), near(y, hy));
            if nx_ * nx_ + ny_ * ny_ >= r * r {
                return 0.0;
            }
            let (fx, fy) = (far(ddx, hx), far(y, hy));
            if fx * fx + fy * fy <= r * r {
                return 1.0;
            }
            let mut inside = 0usize;
            for i in 0..SUPERSAMPLE {
                let sx = ddx - hx + (i as f64 + 0.5) * dx / SUPERSAMPLE as f64;
                for j in 0..SUPERSAMPLE {
                    let sy = y - hy + (j as f64 + 0.5) * dy / SUPERSAMPLE as f64;
                    if sx * sx + sy * sy <= r * r {
                        inside += 1;
                    }
                }
            }
            inside as f64 / (SUPERSAMPLE * SUPERSAMPLE) as f64
        }
    }
}

/// Fraction of the interval `[x - d/2, x + d/2]` covered by `[c - w/2, c + w/2]`.
fn strip_coverage(x: f64, c: f64, w: f64, d: f64, mode: EdgeMode) -> f64 {
    match mode {
        EdgeMode::Binary => {
            if (x - c).abs() < 0.5 * w {
                1.0
            } else {
                0.0
            }
        }
        EdgeMode::AreaWeighted => {
            let lo = (x - 0.5 * d).max(c - 0.5 * w);
            let hi = (x + 0.5 * d).min(c + 0.5 * w);
            ((hi - lo) / d).clamp(0.0, 1.0)
        }
    }
}

/// Multiply the field by the dual-pinhole transmission.
pub fn apply_dual_pinhole(
    mut field: SampledField,
    geom: &ExperimentGeometry,
    block: PinholeBlock,
    edge: EdgeMode,
) -> Result<SampledField> {
    let limit = geom.pinhole_diameter / 8.0;
    let pitch = if field.is_y_invariant() {
        field.dx()
    } else {
        field.dx().max(field.dy())
    };
    if pitch > limit {
        return Err(Error::Resolution {
            element: "pinhole",
            pitch,
            limit,
        });
    }
    if field.window_x() < 2.0 * geom.pinhole_separation
        || (!field.is_y_invariant() && field.window_y() < 2.0 * geom.pinhole_separation)
    {
        return Err(Error::Resolution {
            element: "pinhole window",
            pitch: field.window_x().min(field.window_y()),
            limit: 2.0 * geom.pinhole_separation,
        });
    }

    let r = 0.5 * geom.pinhole_diameter;
    let [xa, xb] = geom.pinhole_centers();
    let mut open = Vec::with_capacity(2);
    if block.a_open() {
        open.push(xa);
    }
    if block.b_open() {
        open.push(xb);
    }
    let (dx, dy) = (field.dx(), field.dy());
    let (nx, y_inv) = (field.nx(), field.is_y_invariant());
    let xs = field.xs();
    let ys = field.ys();
    let reach = r + dx.max(if y_inv { 0.0 } else { dy });
    for (iy, row) in field.amplitudes_mut().chunks_exact_mut(nx).enumerate() {
        let y = ys[iy];
        if !y_inv && y.abs() > reach {
            row.fill(Complex64::new(0.0, 0.0));
            continue;
        }
        for (ix, v) in row.iter_mut().enumerate() {
            let x = xs[ix];
            let t: f64 = open
                .iter()
                .map(|&cx| {
                    if (x - cx).abs() > reach {
                        0.0
                    } else if y_inv {
                        strip_coverage(x, cx, 2.0 * r, dx, edge)
                    } else {
                        disk_coverage(x, y, cx, r, dx, dy, edge)
                    }
                })
                .sum();
            *v *= t.min(1.0);
        }
    }
    Ok(field)
}

/// Wire centres at the innermost intensity minima, symmetric about x = 0:
/// ±P/2, ±3P/2, … for `wire_count` wires.
pub fn wire_positions(geom: &ExperimentGeometry, fringe_period: f64) -> Result<Vec<f64>> {
    if !(fringe_period.is_finite() && fringe_period > 0.0) {
        return Err(Error::invalid("fringe period must be positive"));
    }
    let n = geom.wire_count;
    if n == 0 || n % 2 == 1 {
        return Err(Error::Unsupported(alloc::format!(
            "wire_count {n}: only even, symmetric wire grids are supported"
        )));
    }
    let half = n / 2;
    let mut out: Vec<f64> = (0..half)
        .rev()
        .map(|m| -(m as f64 + 0.5) * fringe_period)
        .collect();
    out.extend((0..half).map(|m| (m as f64 + 0.5) * fringe_period));
    Ok(out)
}

/// Apply independent uniform placement errors in `±tolerance` to each centre.
pub fn jittered_centers(centers: &[f64], tolerance: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    centers
        .iter()
        .map(|c| c + tolerance * (2.0 * rng.random::<f64>() - 1.0))
        .collect()
}

/// Opaque wires of width `geom.wire_thickness` running along y.
pub fn apply_wire_grid(
    mut field: SampledField,
    geom: &ExperimentGeometry,
    centers: &[f64],
    jitter_seed: Option<u64>,
    edge: EdgeMode,
) -> Result<SampledField> {
    let t = geom.wire_thickness;
    let limit = t / 6.0;
    if field.dx() > limit {
        return Err(Error::Resolution {
            element: "wire",
            pitch: field.dx(),
            limit,
        });
    }
    let centers = match jitter_seed {
        Some(seed) => jittered_centers(centers, geom.wire_alignment_tolerance, seed),
        None => centers.to_vec(),
    };
    let dx = field.dx();
    let transmission: Vec<f64> = field
        .xs()
        .iter()
        .map(|&x| {
            centers
                .iter()
                .map(|&c| 1.0 - strip_coverage(x, c, t, dx, edge))
                .product()
        })
        .collect();
    let nx = field.nx();
    for row in field.amplitudes_mut().chunks_exact_mut(nx) {
        for (v, &tr) in row.iter_mut().zip(&transmission) {
            if tr != 1.0 {
                *v *= tr;
            }
        }
    }
    Ok(field)
}

/// Ideal thin lens: quadratic phase `exp(-iπ(x²+y²)/(λf))` inside a circular
/// aperture, opaque outside. One-dimensional fields get a cylindrical lens.
pub fn apply_thin_lens(
    mut field: SampledField,
    focal_length: f64,
    aperture_diameter: f64,
) -> Result<SampledField> {
    if !(focal_length.is_finite() && focal_length > 0.0) {
        return Err(Error::invalid("focal length must be positive"));
    }
    if !(aperture_diameter > 0.0) {
        return Err(Error::invalid("lens aperture must be positive"));
    }
    let k = PI / (field.wavelength() * focal_length);
    let r2 = 0.25 * aperture_diameter * aperture_diameter;
    let chirp = |u: f64| {
        let ph = -k * u * u;
        Complex64::new(libm::cos(ph), libm::sin(ph))
    };
    let xs = field.xs();
    let ys = field.ys();
    let cx: Vec<Complex64> = xs.iter().map(|&x| chirp(x)).collect();
    let y_inv = field.is_y_invariant();
    let nx = field.nx();
    for (iy, row) in field.amplitudes_mut().chunks_exact_mut(nx).enumerate() {
        let y = if y_inv { 0.0 } else { ys[iy] };
        let cy = chirp(y);
        for (ix, v) in row.iter_mut().enumerate() {
            let x = xs[ix];
            if x * x + y * y <= r2 {
                *v *= cx[ix] * cy;
            } else {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }
    Ok(field)
}

/// Σ|a|²·dx·dy over samples whose centres lie in the region.
pub fn integrate_detector(field: &SampledField, region: &DetectorRegion) -> Result<f64> {
    let idx = region.sample_indices(field)?;
    let amps = field.amplitudes();
    Ok(idx.iter().map(|&i| amps[i].norm_sqr()).sum::<f64>() * field.dx() * field.dy())
}

/// Peak intensity among samples inside the region.
pub fn region_peak(field: &SampledField, region: &DetectorRegion) -> Result<f64> {
    let idx = region.sample_indices(field)?;
    let amps = field.amplitudes();
    Ok(idx.iter().map(|&i| amps[i].norm_sqr()).fold(0.0, f64::max))
}

/// Complex amplitudes inside the region, in sample order.
pub fn region_amplitudes(field: &SampledField, region: &DetectorRegion) -> Result<Vec<Complex64>> {
    let idx = region.sample_indices(field)?;
    let amps = field.amplitudes();
    Ok(idx.iter().map(|&i| amps[i]).collect())
}

/// A plain label for a pinhole configuration, used in logs.
pub fn describe_block(block: PinholeBlock) -> String {
    String::from(match block {
        PinholeBlock::None => "both pinholes open",
        PinholeBlock::BlockA => "pinhole A blocked",
        PinholeBlock::BlockB => "pinhole B blocked",
    })
}
