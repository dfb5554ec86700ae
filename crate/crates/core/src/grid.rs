//! Uniform periodic grids on `[0, L)^n` and the matching Fourier lattice.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A cubic periodic grid with `N` points per axis in two or three dimensions.
///
/// Fourier modes are stored in FFT order along each axis: index `i` carries
/// the lattice frequency `i` for `i <= N/2` and `i - N` otherwise. The flat
/// layout is row-major with the last axis fastest, and axis `m` corresponds
/// to the coordinate `x_{m+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    points: usize,
    box_length: f64,
    dealias_fraction: f64,
}

impl TorusGrid {
    /// Grid on `[0, 2π)^dim` with the 2/3 truncation rule.
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two and at least 8, got {points}"
            )));
        }
        Ok(Self { dim, points, box_length: 2.0 * PI, dealias_fraction: 2.0 / 3.0 })
    }

    pub fn with_box_length(mut self, box_length: f64) -> Result<Self> {
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {box_length}")));
        }
        self.box_length = box_length;
        Ok(self)
    }

    pub fn with_dealias_fraction(mut self, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!("dealias fraction must lie in (0, 1], got {fraction}")));
        }
        self.dealias_fraction = fraction;
        Ok(self)
    }

    /// Same box and truncation rule with a different resolution.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.dim, points)?
            .with_box_length(self.box_length)?
            .with_dealias_fraction(self.dealias_fraction)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Total number of grid points, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// `2π / L`, the physical wavenumber of lattice frequency one.
    pub fn wavenumber_unit(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Largest retained lattice frequency (per axis) after truncation.
    pub fn k_max(&self) -> f64 {
        self.dealias_fraction * (self.points / 2) as f64
    }

    /// Largest `|ξ|` present on the lattice.
    pub fn max_radial_wavenumber(&self) -> f64 {
        self.wavenumber_unit() * (self.points / 2) as f64 * (self.dim as f64).sqrt()
    }

    pub fn index_frequency(&self, i: usize) -> i64 {
        if i <= self.points / 2 {
            i as i64
        } else {
            i as i64 - self.points as i64
        }
    }

    fn frequency_index(&self, k: i64) -> usize {
        k.rem_euclid(self.points as i64) as usize
    }

    /// Per-axis indices of a flat index.
    pub fn axis_indices(&self, flat: usize) -> [usize; 3] {
        let n = self.points;
        let mut out = [0; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % n;
            rest /= n;
        }
        out
    }

    /// Integer lattice frequency of a flat index (unused axes are zero).
    pub fn mode(&self, flat: usize) -> [i64; 3] {
        let idx = self.axis_indices(flat);
        let mut k = [0; 3];
        for axis in 0..self.dim {
            k[axis] = self.index_frequency(idx[axis]);
        }
        k
    }

    pub fn flat_index(&self, mode: [i64; 3]) -> usize {
        let mut flat = 0;
        for &k in mode.iter().take(self.dim) {
            flat = flat * self.points + self.frequency_index(k);
        }
        flat
    }

    /// Flat index of `-k`.
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let k = self.mode(flat);
        self.flat_index([-k[0], -k[1], -k[2]])
    }

    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let k = self.mode(flat);
        let u = self.wavenumber_unit();
        [u * k[0] as f64, u * k[1] as f64, u * k[2] as f64]
    }

    /// Wavevector used for first derivatives. Components on the Nyquist plane
    /// are dropped so that derivatives of real fields stay real.
    pub fn derivative_wavevector(&self, flat: usize) -> [f64; 3] {
        let k = self.mode(flat);
        let u = self.wavenumber_unit();
        let half = (self.points / 2) as i64;
        let mut out = [0.0; 3];
        for axis in 0..self.dim {
            if k[axis] != half {
                out[axis] = u * k[axis] as f64;
            }
        }
        out
    }

    pub fn wavenumber_sq(&self, flat: usize) -> f64 {
        let xi = self.wavevector(flat);
        xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]
    }

    pub fn wavenumber(&self, flat: usize) -> f64 {
        self.wavenumber_sq(flat).sqrt()
    }

    /// Whether the mode survives truncation: `|k|_∞ <= K_max`.
    pub fn is_retained(&self, flat: usize) -> bool {
        let k = self.mode(flat);
        let kmax = self.k_max();
        k.iter().take(self.dim).all(|&c| (c.abs() as f64) <= kmax + 1e-12)
    }

    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.axis_indices(flat);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = idx[axis] as f64 * h;
        }
        x
    }
}
