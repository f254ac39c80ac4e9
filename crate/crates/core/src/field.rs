//! Complex scalar fields on uniform power-of-two grids.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex amplitude sampled on an `nx × ny` row-major grid.
///
/// A field built with [`SampledField::line`] is invariant along `y`: it keeps two
/// identical rows with a combined y-extent of one metre, so powers are per metre
/// of `y` and the propagators skip the y transform.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    wavelength: f64,
    amplitudes: Vec<Complex64>,
    label: String,
    y_invariant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Axis {
    X,
    Y,
}

/// One-dimensional intensity cut through a field.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntensityProfile {
    pub axis: Axis,
    pub coordinates: Vec<f64>,
    pub values: Vec<f64>,
}

fn check_dim(n: usize, name: &str) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::invalid(alloc::format!(
            "{name} = {n} must be a power of two and at least 2"
        )));
    }
    Ok(())
}

fn check_positive(v: f64, name: &str) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(alloc::format!(
            "{name} must be positive, got {v}"
        )));
    }
    Ok(())
}

/// Zero-amplitude field covering `window_x × window_y` metres.
pub fn make_field(
    nx: usize,
    ny: usize,
    window_x: f64,
    window_y: f64,
    wavelength: f64,
) -> Result<SampledField> {
    SampledField::new(
        nx,
        ny,
        window_x / nx as f64,
        window_y / ny as f64,
        wavelength,
    )
}

impl SampledField {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, wavelength: f64) -> Result<Self> {
        check_dim(nx, "nx")?;
        check_dim(ny, "ny")?;
        check_positive(dx, "dx")?;
        check_positive(dy, "dy")?;
        check_positive(wavelength, "wavelength")?;
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            wavelength,
            amplitudes: vec![Complex64::new(0.0, 0.0); nx * ny],
            label: String::new(),
            y_invariant: false,
        })
    }

    /// Zero field for the fast one-dimensional mode (see type docs).
    pub fn line(nx: usize, window_x: f64, wavelength: f64) -> Result<Self> {
        let mut f = Self::new(nx, 2, window_x / nx as f64, 0.5, wavelength)?;
        f.y_invariant = true;
        Ok(f)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Fill with `f(x, y)` evaluated at each sample centre.
    pub fn fill(mut self, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let (nx, dx, dy, half_x, half_y) = (self.nx, self.dx, self.dy, self.nx / 2, self.ny / 2);
        let y_inv = self.y_invariant;
        for (iy, row) in self.amplitudes.chunks_exact_mut(nx).enumerate() {
            let y = if y_inv {
                0.0
            } else {
                (iy as f64 - half_y as f64) * dy
            };
            for (ix, v) in row.iter_mut().enumerate() {
                *v = f((ix as f64 - half_x as f64) * dx, y);
            }
        }
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn is_y_invariant(&self) -> bool {
        self.y_invariant
    }

    pub fn window_x(&self) -> f64 {
        self.dx * self.nx as f64
    }

    pub fn window_y(&self) -> f64 {
        self.dy * self.ny as f64
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub(crate) fn set_pitch(&mut self, dx: f64, dy: f64) {
        self.dx = dx;
        self.dy = dy;
    }

    pub fn x_at(&self, ix: usize) -> f64 {
        (ix as f64 - (self.nx / 2) as f64) * self.dx
    }

    pub fn y_at(&self, iy: usize) -> f64 {
        if self.y_invariant {
            0.0
        } else {
            (iy as f64 - (self.ny / 2) as f64) * self.dy
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x_at(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|i| self.y_at(i)).collect()
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.amplitudes[iy * self.nx + ix]
    }

    pub fn intensity(&self, ix: usize, iy: usize) -> f64 {
        self.at(ix, iy).norm_sqr()
    }

    pub fn peak_intensity(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .fold(0.0, f64::max)
    }

    /// Σ|a|²·dx·dy.
    pub fn total_power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dx * self.dy
    }

    /// True when both fields share grid shape, pitch and wavelength.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.y_invariant == other.y_invariant
            && rel_eq(self.dx, other.dx)
            && rel_eq(self.dy, other.dy)
            && rel_eq(self.wavelength, other.wavelength)
    }

    /// Pointwise sum of two fields on the same grid.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::invalid(
                "cannot add fields sampled on different grids",
            ));
        }
        let mut out = self.clone();
        for (a, b) in out.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += *b;
        }
        Ok(out)
    }

    pub fn scale(mut self, s: Complex64) -> Self {
        for a in self.amplitudes.iter_mut() {
            *a *= s;
        }
        self
    }

    fn index_near(&self, offset: f64, axis: Axis) -> Result<usize> {
        let (n, d) = match axis {
            Axis::X => (self.ny, self.dy),
            Axis::Y => (self.nx, self.dx),
        };
        if self.y_invariant && axis == Axis::X {
            return Ok(0);
        }
        let idx = libm::round(offset / d) + (n / 2) as f64;
        if !offset.is_finite() || idx < 0.0 || idx > (n - 1) as f64 {
            return Err(Error::OutOfRange {
                what: "profile offset",
                detail: alloc::format!(
                    "{offset:.4e} m lies outside the {:.4e} m window",
                    d * n as f64
                ),
            });
        }
        Ok(idx as usize)
    }

    /// Intensity along `axis` through the sample row/column nearest to `offset`
    /// (measured on the other axis).
    pub fn extract_profile(&self, axis: Axis, offset: f64) -> Result<IntensityProfile> {
        let k = self.index_near(offset, axis)?;
        Ok(match axis {
            Axis::X => IntensityProfile {
                axis,
                coordinates: self.xs(),
                values: self.amplitudes[k * self.nx..(k + 1) * self.nx]
                    .iter()
                    .map(|a| a.norm_sqr())
                    .collect(),
            },
            Axis::Y => IntensityProfile {
                axis,
                coordinates: self.ys(),
                values: (0..self.ny).map(|iy| self.intensity(k, iy)).collect(),
            },
        })
    }
}

/// Free-function form of [`SampledField::total_power`].
pub fn total_power(field: &SampledField) -> f64 {
    field.total_power()
}

/// Free-function form of [`SampledField::extract_profile`].
pub fn extract_profile(field: &SampledField, axis: Axis, offset: f64) -> Result<IntensityProfile> {
    field.extract_profile(axis, offset)
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

impl IntensityProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Sub-profile with coordinates in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> IntensityProfile {
        let (coordinates, values) = self
            .coordinates
            .iter()
            .zip(&self.values)
            .filter(|(c, _)| **c >= lo && **c <= hi)
            .map(|(c, v)| (*c, *v))
            .unzip();
        IntensityProfile {
            axis: self.axis,
            coordinates,
            values,
        }
    }

    /// Column name of the coordinate in the CSV form.
    pub fn coordinate_header(&self) -> &'static str {
        match self.axis {
            Axis::X => "x_m",
            Axis::Y => "y_m",
        }
    }
}
