//! Seeded random and structured test fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::field::{Field, ScalarField, SpectralVectorField};
use crate::grid::TorusGrid;
use crate::lp::DyadicPartition;
use crate::spectral::leray_project;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spectral envelope of a random field: amplitude `|ξ|^{-decay}` on the
/// modes with `0 < |k|_∞ <= cutoff` (lattice units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub decay: f64,
    pub cutoff: f64,
}

impl Spectrum {
    pub fn new(decay: f64, cutoff: f64) -> Self {
        Self { decay, cutoff }
    }

    /// Envelope with cut-off at the truncation radius of `grid`.
    pub fn dealiased(grid: &TorusGrid, decay: f64) -> Self {
        Self { decay, cutoff: grid.k_max() }
    }

    fn amplitude(&self, grid: &TorusGrid, flat: usize) -> f64 {
        if flat == 0 {
            return 0.0;
        }
        let k = grid.mode(flat);
        let inf = k.iter().take(grid.dim()).map(|c| c.abs()).max().unwrap_or(0) as f64;
        // Nyquist modes would break realness of derivatives
        if inf > self.cutoff + 1e-12 || inf >= (grid.points_per_axis() / 2) as f64 {
            return 0.0;
        }
        grid.wavenumber(flat).powf(-self.decay)
    }
}

fn gaussian_coeffs<R: Rng>(grid: &TorusGrid, rng: &mut R, spectrum: &Spectrum) -> Vec<Complex64> {
    (0..grid.len())
        .map(|flat| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * spectrum.amplitude(grid, flat)
        })
        .collect()
}

/// Real random scalar field with Gaussian coefficients.
pub fn random_scalar<R: Rng>(grid: &TorusGrid, rng: &mut R, spectrum: &Spectrum) -> ScalarField {
    let mut f = ScalarField::from_coeffs(*grid, gaussian_coeffs(grid, rng, spectrum)).expect("grid length");
    f.symmetrize();
    f
}

/// Real random vector field, not projected.
pub fn random_vector<R: Rng>(grid: &TorusGrid, rng: &mut R, spectrum: &Spectrum) -> SpectralVectorField {
    let comps = (0..grid.dim()).map(|_| random_scalar(grid, rng, spectrum)).collect();
    SpectralVectorField::from_components(comps).expect("dim components")
}

/// Real random divergence-free field.
pub fn random_solenoidal<R: Rng>(grid: &TorusGrid, rng: &mut R, spectrum: &Spectrum) -> SpectralVectorField {
    leray_project(&random_vector(grid, rng, spectrum))
}

/// Rescale so that `norm(f)` equals `target`.
pub fn normalized<F: Field>(f: &F, norm: impl Fn(&F) -> Result<f64>, target: f64) -> Result<F> {
    let n = norm(f)?;
    if n == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.scaled(target / n))
}

/// A field concentrated on block `j`: the block multiplier with random
/// per-mode amplitudes in `[0.5, 1.5]`, translated to a random grid point.
/// Such fields nearly saturate the Bernstein inequalities.
pub fn shell_bump<R: Rng>(partition: &DyadicPartition, j: usize, rng: &mut R) -> Result<ScalarField> {
    let grid = *partition.grid();
    let shift: Vec<usize> = (0..grid.dim()).map(|_| rng.random_range(0..grid.points_per_axis())).collect();
    let h = grid.spacing();
    let mut f = ScalarField::zeros(grid);
    let coeffs = f.coefficients_mut();
    for (flat, w) in partition.shell(j)? {
        let xi = grid.wavevector(flat);
        let phase: f64 = (0..grid.dim()).map(|a| xi[a] * shift[a] as f64 * h).sum();
        let amp = w * rng.random_range(0.5..1.5);
        coeffs[flat] = Complex64::from_polar(amp, -phase);
    }
    f.symmetrize();
    Ok(f)
}

/// Deterministic rough profile `f̂(ξ) = |ξ|^{-decay}` on `0 < |ξ|`, without Nyquist modes.
/// All phases agree, so the blocks stay coherent and scale like a homogeneous kernel.
pub fn coherent_power_law(grid: &TorusGrid, decay: f64) -> ScalarField {
    let spectrum = Spectrum::new(decay, (grid.points_per_axis() / 2) as f64 - 1.0);
    let coeffs = (0..grid.len()).map(|flat| Complex64::new(spectrum.amplitude(grid, flat), 0.0)).collect();
    ScalarField::from_coeffs(*grid, coeffs).expect("grid length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{divergence, is_dealiased};

    #[test]
    fn random_fields_are_real_and_seeded() {
        let g = TorusGrid::new(3, 16).unwrap();
        let s = Spectrum::dealiased(&g, 1.0);
        let a = random_solenoidal(&g, &mut rng(7), &s);
        let b = random_solenoidal(&g, &mut rng(7), &s);
        assert_eq!(a, b);
        assert!(a.conjugate_symmetry_defect() < 1e-15);
        assert!(divergence(&a).coefficient_norm() < 1e-14 * a.coefficient_norm());
        assert!(is_dealiased(&a));
    }
}
