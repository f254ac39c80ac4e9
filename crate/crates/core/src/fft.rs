//! Radix-2 fast Fourier transforms for power-of-two grids.
//!
//! Forward transforms use the `exp(-2πi·jk/n)` kernel and are unnormalized;
//! inverse transforms carry the `1/n` factor. The `centered` variants index
//! samples and frequencies from `-n/2`, matching the field grid convention.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Precomputed plan for one transform length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<u32>,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::invalid(alloc::format!(
                "FFT length {n} is not a power of two"
            )));
        }
        let bits = n.trailing_zeros();
        let twiddles = (0..n / 2)
            .map(|k| {
                let phase = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(phase), libm::sin(phase))
            })
            .collect();
        let bitrev = (0..n as u32)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (32 - bits)
                }
            })
            .collect();
        Ok(Self {
            n,
            twiddles,
            bitrev,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn process(&self, buf: &mut [Complex64], direction: Direction) {
        assert_eq!(buf.len(), self.n, "buffer length does not match plan");
        let n = self.n;
        for (i, &j) in self.bitrev.iter().enumerate() {
            let j = j as usize;
            if i < j {
                buf.swap(i, j);
            }
        }
        let inverse = direction == Direction::Inverse;
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for chunk in buf.chunks_exact_mut(size) {
                let (lo, hi) = chunk.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let t = *b * w;
                    *b = *a - t;
                    *a += t;
                }
            }
            size <<= 1;
        }
        if inverse {
            let scale = 1.0 / n as f64;
            for v in buf.iter_mut() {
                *v *= scale;
            }
        }
    }
}

/// Global phase picked up by a centered transform of length `n` (±1).
fn centering_sign(n: usize) -> f64 {
    if (n / 2) % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn checkerboard(data: &mut [Complex64], nx: usize, transform_y: bool) {
    for (iy, row) in data.chunks_exact_mut(nx).enumerate() {
        let row_odd = transform_y && iy % 2 == 1;
        for (ix, v) in row.iter_mut().enumerate() {
            if (ix % 2 == 1) ^ row_odd {
                *v = -*v;
            }
        }
    }
}

/// Transform every row (length `nx`) of a row-major `nx × ny` array.
pub fn fft_rows(data: &mut [Complex64], nx: usize, direction: Direction) -> Result<()> {
    let plan = Fft::new(nx)?;
    for row in data.chunks_exact_mut(nx) {
        plan.process(row, direction);
    }
    Ok(())
}

const COLUMN_BLOCK: usize = 16;

/// Transform every column (length `ny`) of a row-major `nx × ny` array.
pub fn fft_columns(
    data: &mut [Complex64],
    nx: usize,
    ny: usize,
    direction: Direction,
) -> Result<()> {
    let plan = Fft::new(ny)?;
    let mut scratch = vec![Complex64::new(0.0, 0.0); ny * COLUMN_BLOCK];
    let mut c0 = 0;
    while c0 < nx {
        let width = COLUMN_BLOCK.min(nx - c0);
        for iy in 0..ny {
            let row = &data[iy * nx + c0..iy * nx + c0 + width];
            for (b, v) in row.iter().enumerate() {
                scratch[b * ny + iy] = *v;
            }
        }
        for col in scratch.chunks_exact_mut(ny).take(width) {
            plan.process(col, direction);
        }
        for iy in 0..ny {
            let row = &mut data[iy * nx + c0..iy * nx + c0 + width];
            for (b, v) in row.iter_mut().enumerate() {
                *v = scratch[b * ny + iy];
            }
        }
        c0 += width;
    }
    Ok(())
}

/// Two-dimensional transform with both sample and frequency indices running
/// from `-n/2`. With `transform_y == false` only the rows are transformed.
pub fn fft2_centered(
    data: &mut [Complex64],
    nx: usize,
    ny: usize,
    direction: Direction,
    transform_y: bool,
) -> Result<()> {
    if data.len() != nx * ny {
        return Err(Error::invalid("array length does not match nx·ny"));
    }
    checkerboard(data, nx, transform_y);
    fft_rows(data, nx, direction)?;
    if transform_y {
        fft_columns(data, nx, ny, direction)?;
    }
    checkerboard(data, nx, transform_y);
    let mut sign = centering_sign(nx);
    if transform_y {
        sign *= centering_sign(ny);
    }
    if sign < 0.0 {
        for v in data.iter_mut() {
            *v = -*v;
        }
    }
    Ok(())
}
