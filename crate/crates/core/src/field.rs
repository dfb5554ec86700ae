//! Field containers: spectral scalars, vectors and rank-2 tensors, plus physical samples.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::TorusGrid;

/// Common interface of every spectral container: a list of coefficient
/// arrays on one grid.
pub trait Field: Clone {
    fn grid(&self) -> &TorusGrid;
    fn component_count(&self) -> usize;
    fn coeffs(&self, component: usize) -> &[Complex64];
    fn coeffs_mut(&mut self, component: usize) -> &mut [Complex64];

    /// Zero field of the same shape.
    fn zeroed(&self) -> Self {
        let mut out = self.clone();
        for c in 0..out.component_count() {
            out.coeffs_mut(c).fill(Complex64::default());
        }
        out
    }

    /// Multiply every component by the real Fourier multiplier `m`.
    fn apply_multiplier(&self, m: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        out.scale_by_multiplier(m);
        out
    }

    fn scale_by_multiplier(&mut self, m: impl Fn(usize) -> f64) {
        let len = self.grid().len();
        let weights: Vec<f64> = (0..len).map(m).collect();
        for c in 0..self.component_count() {
            for (v, w) in self.coeffs_mut(c).iter_mut().zip(&weights) {
                *v *= *w;
            }
        }
    }

    /// `self += a * other`
    fn add_scaled(&mut self, a: f64, other: &Self) -> Result<()> {
        check_same(self, other)?;
        for c in 0..self.component_count() {
            let src = other.coeffs(c).to_vec();
            for (v, w) in self.coeffs_mut(c).iter_mut().zip(src) {
                *v += w * a;
            }
        }
        Ok(())
    }

    /// `a * self + b * other`
    fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_same(self, other)?;
        let mut out = self.clone();
        for c in 0..out.component_count() {
            for (v, w) in out.coeffs_mut(c).iter_mut().zip(other.coeffs(c)) {
                *v = *v * a + *w * b;
            }
        }
        Ok(out)
    }

    fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for c in 0..out.component_count() {
            for v in out.coeffs_mut(c) {
                *v *= a;
            }
        }
        out
    }

    /// Euclidean norm of the full coefficient array.
    fn coefficient_norm(&self) -> f64 {
        (0..self.component_count())
            .map(|c| self.coeffs(c).iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest coefficient modulus.
    fn max_coefficient(&self) -> f64 {
        (0..self.component_count())
            .flat_map(|c| self.coeffs(c).iter().map(|v| v.norm()))
            .fold(0.0, f64::max)
    }

    fn is_finite(&self) -> bool {
        (0..self.component_count()).all(|c| self.coeffs(c).iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }

    /// Real parts of the physical samples of every component.
    fn physical_components(&self) -> Vec<Vec<f64>> {
        (0..self.component_count())
            .map(|c| {
                let mut buf = self.coeffs(c).to_vec();
                fft::inverse(self.grid(), &mut buf);
                buf.into_iter().map(|v| v.re).collect()
            })
            .collect()
    }

    /// Pointwise Euclidean magnitude across components.
    fn pointwise_magnitude(&self) -> Vec<f64> {
        let comps = self.physical_components();
        if comps.len() == 1 {
            return comps.into_iter().next().unwrap().into_iter().map(f64::abs).collect();
        }
        let len = self.grid().len();
        (0..len)
            .map(|i| comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    }

    /// Largest `|c_k - conj(c_{-k})|` relative to the largest coefficient.
    /// Zero for fields with real physical samples.
    fn conjugate_symmetry_defect(&self) -> f64 {
        let grid = *self.grid();
        let scale = self.max_coefficient();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for c in 0..self.component_count() {
            let v = self.coeffs(c);
            for flat in 0..grid.len() {
                let d = (v[flat] - v[grid.conjugate_index(flat)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// Force real physical samples by averaging each mode with its mirror image.
    fn symmetrize(&mut self) {
        let grid = *self.grid();
        for c in 0..self.component_count() {
            let v = self.coeffs(c).to_vec();
            let out = self.coeffs_mut(c);
            for flat in 0..grid.len() {
                out[flat] = (v[flat] + v[grid.conjugate_index(flat)].conj()) * 0.5;
            }
        }
    }
}

pub(crate) fn check_same<F: Field>(a: &F, b: &F) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    if a.component_count() != b.component_count() {
        return Err(Error::ShapeMismatch { expected: a.component_count(), found: b.component_count() });
    }
    Ok(())
}

fn forward_real(grid: &TorusGrid, samples: &[f64]) -> Result<Vec<Complex64>> {
    if samples.len() != grid.len() {
        return Err(Error::ShapeMismatch { expected: grid.len(), found: samples.len() });
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft::forward(grid, &mut buf);
    Ok(buf)
}

/// A scalar field stored by its Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), found: coeffs.len() });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn from_physical(grid: TorusGrid, samples: &[f64]) -> Result<Self> {
        Ok(Self { grid, coeffs: forward_real(&grid, samples)? })
    }

    /// Sample `f` on the grid and transform.
    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let samples: Vec<f64> = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self::from_physical(grid, &samples).expect("sample count matches grid")
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn to_physical(&self) -> Vec<f64> {
        self.physical_components().pop().unwrap()
    }

    /// Zero-mode coefficient, i.e. the spatial mean.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }
}

impl Field for ScalarField {
    fn grid(&self) -> &TorusGrid {
        &self.grid
    }
    fn component_count(&self) -> usize {
        1
    }
    fn coeffs(&self, _component: usize) -> &[Complex64] {
        &self.coeffs
    }
    fn coeffs_mut(&mut self, _component: usize) -> &mut [Complex64] {
        &mut self.coeffs
    }
}

/// An `n`-component vector field in Fourier space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVectorField {
    grid: TorusGrid,
    components: Vec<ScalarField>,
}

impl SpectralVectorField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, components: vec![ScalarField::zeros(grid); grid.dim()] }
    }

    pub fn from_components(components: Vec<ScalarField>) -> Result<Self> {
        let grid = *components.first().ok_or(Error::ShapeMismatch { expected: 2, found: 0 })?.grid();
        if components.len() != grid.dim() {
            return Err(Error::ShapeMismatch { expected: grid.dim(), found: components.len() });
        }
        if components.iter().any(|c| *c.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, components })
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let values: Vec<[f64; 3]> = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        let components = (0..grid.dim())
            .map(|c| {
                let s: Vec<f64> = values.iter().map(|v| v[c]).collect();
                ScalarField::from_physical(grid, &s).expect("sample count matches grid")
            })
            .collect();
        Self { grid, components }
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.components[i]
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }
}

impl Field for SpectralVectorField {
    fn grid(&self) -> &TorusGrid {
        &self.grid
    }
    fn component_count(&self) -> usize {
        self.components.len()
    }
    fn coeffs(&self, component: usize) -> &[Complex64] {
        &self.components[component].coeffs
    }
    fn coeffs_mut(&mut self, component: usize) -> &mut [Complex64] {
        &mut self.components[component].coeffs
    }
}

/// A rank-2 tensor field; entry `(i, j)` is stored at `i * n + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    grid: TorusGrid,
    entries: Vec<ScalarField>,
}

impl TensorField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, entries: vec![ScalarField::zeros(grid); grid.dim() * grid.dim()] }
    }

    pub fn from_entries(grid: TorusGrid, entries: Vec<ScalarField>) -> Result<Self> {
        let n = grid.dim();
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch { expected: n * n, found: entries.len() });
        }
        if entries.iter().any(|e| *e.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, entries })
    }

    pub fn rank_dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarField {
        &self.entries[i * self.grid.dim() + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut ScalarField {
        let n = self.grid.dim();
        &mut self.entries[i * n + j]
    }

    pub fn transpose(&self) -> Self {
        let n = self.grid.dim();
        let entries = (0..n * n).map(|k| self.entries[(k % n) * n + k / n].clone()).collect();
        Self { grid: self.grid, entries }
    }

    /// `(T + Tᵀ) / 2`
    pub fn symmetric_part(&self) -> Self {
        self.combine(0.5, &self.transpose(), 0.5).expect("same shape")
    }

    /// `(T - Tᵀ) / 2`
    pub fn antisymmetric_part(&self) -> Self {
        self.combine(0.5, &self.transpose(), -0.5).expect("same shape")
    }
}

impl Field for TensorField {
    fn grid(&self) -> &TorusGrid {
        &self.grid
    }
    fn component_count(&self) -> usize {
        self.entries.len()
    }
    fn coeffs(&self, component: usize) -> &[Complex64] {
        &self.entries[component].coeffs
    }
    fn coeffs_mut(&mut self, component: usize) -> &mut [Complex64] {
        &mut self.entries[component].coeffs
    }
}

/// Real samples of a vector field on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: TorusGrid,
    components: Vec<Vec<f64>>,
}

impl PhysicalField {
    pub fn new(grid: TorusGrid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::ShapeMismatch { expected: grid.dim(), found: components.len() });
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::ShapeMismatch { expected: grid.len(), found: c.len() });
            }
        }
        Ok(Self { grid, components })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    /// Samples at one grid point.
    pub fn at(&self, flat: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[flat]).collect()
    }
}

/// Physical samples to Fourier coefficients.
pub fn forward_transform(field: &PhysicalField) -> Result<SpectralVectorField> {
    let components = field
        .components
        .iter()
        .map(|c| ScalarField::from_physical(field.grid, c))
        .collect::<Result<Vec<_>>>()?;
    SpectralVectorField::from_components(components)
}

/// Fourier coefficients to physical samples (real parts).
pub fn inverse_transform(field: &SpectralVectorField) -> PhysicalField {
    PhysicalField { grid: field.grid, components: field.physical_components() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn physical_round_trip() {
        let g = TorusGrid::new(3, 8).unwrap();
        let u = SpectralVectorField::from_fn(g, |x| [x[1].sin(), (2.0 * x[0]).cos(), 0.3]);
        let back = forward_transform(&inverse_transform(&u)).unwrap();
        assert!(back.combine(1.0, &u, -1.0).unwrap().coefficient_norm() < 1e-14);
        assert!(u.conjugate_symmetry_defect() < 1e-15);
    }

    #[test]
    fn tensor_parts() {
        let g = TorusGrid::new(2, 8).unwrap();
        let mut t = TensorField::zeros(g);
        *t.get_mut(0, 1) = ScalarField::from_fn(g, |x| x[0].cos());
        let s = t.symmetric_part();
        let a = t.antisymmetric_part();
        assert_eq!(s.get(0, 1), s.get(1, 0));
        assert_eq!(a.get(0, 1), &a.get(1, 0).scaled(-1.0));
        assert!(s.combine(1.0, &a, 1.0).unwrap().combine(1.0, &t, -1.0).unwrap().coefficient_norm() < 1e-16);
    }
}
