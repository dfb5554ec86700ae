//! Fourier-multiplier operators on periodic fields.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{check_same, Field, ScalarField, SpectralVectorField, TensorField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Velocity gradient with entry `(i, j) = ∂_j f_i`.
pub fn gradient(f: &SpectralVectorField) -> TensorField {
    let grid = *f.grid();
    let n = grid.dim();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut e = f.component(i).clone();
            for (flat, c) in e.coefficients_mut().iter_mut().enumerate() {
                *c *= I * grid.derivative_wavevector(flat)[j];
            }
            entries.push(e);
        }
    }
    TensorField::from_entries(grid, entries).expect("n*n entries")
}

pub fn scalar_gradient(f: &ScalarField) -> SpectralVectorField {
    let grid = *f.grid();
    let comps = (0..grid.dim())
        .map(|j| {
            let mut e = f.clone();
            for (flat, c) in e.coefficients_mut().iter_mut().enumerate() {
                *c *= I * grid.derivative_wavevector(flat)[j];
            }
            e
        })
        .collect();
    SpectralVectorField::from_components(comps).expect("n components")
}

pub fn divergence(f: &SpectralVectorField) -> ScalarField {
    let grid = *f.grid();
    let mut out = ScalarField::zeros(grid);
    let acc = out.coefficients_mut();
    for (j, comp) in f.components().iter().enumerate() {
        for (flat, (a, c)) in acc.iter_mut().zip(comp.coefficients()).enumerate() {
            *a += I * grid.derivative_wavevector(flat)[j] * c;
        }
    }
    out
}

/// Row divergence: `(div T)_i = Σ_j ∂_j T_ij`.
pub fn tensor_divergence(t: &TensorField) -> SpectralVectorField {
    let grid = *t.grid();
    let n = grid.dim();
    let comps = (0..n)
        .map(|i| {
            let mut out = ScalarField::zeros(grid);
            let acc = out.coefficients_mut();
            for j in 0..n {
                for (flat, (a, c)) in acc.iter_mut().zip(t.get(i, j).coefficients()).enumerate() {
                    *a += I * grid.derivative_wavevector(flat)[j] * c;
                }
            }
            out
        })
        .collect();
    SpectralVectorField::from_components(comps).expect("n components")
}

pub fn laplacian<F: Field>(f: &F) -> F {
    let grid = *f.grid();
    f.apply_multiplier(|flat| -grid.wavenumber_sq(flat))
}

/// `|ξ|^β` applied componentwise. The zero mode is kept for `β = 0`,
/// dropped for `β > 0`, and must already vanish for `β < 0`.
pub fn laplacian_power<F: Field>(f: &F, beta: f64) -> Result<F> {
    let grid = *f.grid();
    if beta == 0.0 {
        return Ok(f.clone());
    }
    if beta < 0.0 {
        let scale = f.max_coefficient().max(f64::MIN_POSITIVE);
        if (0..f.component_count()).any(|c| f.coeffs(c)[0].norm() > 1e-14 * scale) {
            return Err(Error::SingularMode(beta));
        }
    }
    Ok(f.apply_multiplier(|flat| if flat == 0 { 0.0 } else { grid.wavenumber(flat).powf(beta) }))
}

/// `(1 - α²Δ)^{-1}`
pub fn helmholtz_inverse<F: Field>(f: &F, alpha: f64) -> Result<F> {
    check_alpha(alpha)?;
    let grid = *f.grid();
    let a2 = alpha * alpha;
    Ok(f.apply_multiplier(|flat| 1.0 / (1.0 + a2 * grid.wavenumber_sq(flat))))
}

/// `(1 - α²Δ)`
pub fn helmholtz_apply<F: Field>(f: &F, alpha: f64) -> Result<F> {
    check_alpha(alpha)?;
    let grid = *f.grid();
    let a2 = alpha * alpha;
    Ok(f.apply_multiplier(|flat| 1.0 + a2 * grid.wavenumber_sq(flat)))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be finite and nonnegative, got {alpha}")));
    }
    Ok(())
}

/// Orthogonal projection onto divergence-free fields.
pub fn leray_project(u: &SpectralVectorField) -> SpectralVectorField {
    let grid = *u.grid();
    let n = grid.dim();
    let mut out = u.clone();
    for flat in 1..grid.len() {
        let xi = grid.derivative_wavevector(flat);
        let k2: f64 = xi.iter().take(n).map(|x| x * x).sum();
        if k2 == 0.0 {
            continue;
        }
        let mut dot = Complex64::default();
        for j in 0..n {
            dot += u.component(j).coefficients()[flat] * xi[j];
        }
        let dot = dot / k2;
        for j in 0..n {
            out.component_mut(j).coefficients_mut()[flat] -= dot * xi[j];
        }
    }
    out
}

/// Symmetric and antisymmetric parts of `∇f`.
pub fn def_rot(f: &SpectralVectorField) -> (TensorField, TensorField) {
    let g = gradient(f);
    (g.symmetric_part(), g.antisymmetric_part())
}

/// Zero every mode outside the truncation cube `|k|_∞ <= K_max`.
pub fn dealias<F: Field>(f: &F) -> F {
    let grid = *f.grid();
    f.apply_multiplier(|flat| if grid.is_retained(flat) { 1.0 } else { 0.0 })
}

pub fn is_dealiased<F: Field>(f: &F) -> bool {
    let grid = *f.grid();
    (0..f.component_count())
        .all(|c| f.coeffs(c).iter().enumerate().all(|(flat, v)| grid.is_retained(flat) || *v == Complex64::default()))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `L^p` norm of grid samples with equal quadrature weights; `p = ∞` is the grid maximum.
pub(crate) fn lp_of_samples(samples: &[f64], p: f64, cell_volume: f64) -> f64 {
    let max = samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    // factor out the maximum so large p does not overflow
    let sum: f64 = samples.iter().map(|v| (v.abs() / max).powf(p)).sum();
    max * (sum * cell_volume).powf(1.0 / p)
}

/// `L^p` norm of a field; vector and tensor fields use the pointwise Euclidean magnitude.
pub fn lp_norm<F: Field>(f: &F, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_of_samples(&f.pointwise_magnitude(), p, f.grid().cell_volume()))
}

/// Real `L²` inner product via Parseval.
pub fn inner_product<F: Field>(f: &F, g: &F) -> Result<f64> {
    check_same(f, g)?;
    let mut s = 0.0;
    for c in 0..f.component_count() {
        s += f.coeffs(c).iter().zip(g.coeffs(c)).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
    }
    Ok(s * f.grid().volume())
}

/// Sobolev norm by Parseval: weight `(1+|ξ|²)^{s/2}`, or `|ξ|^s` without
/// the zero mode when `homogeneous`.
pub fn sobolev_norm<F: Field>(f: &F, s: f64, homogeneous: bool) -> f64 {
    let grid = *f.grid();
    let mut total = 0.0;
    for c in 0..f.component_count() {
        for (flat, v) in f.coeffs(c).iter().enumerate() {
            let k2 = grid.wavenumber_sq(flat);
            let w = if homogeneous {
                if flat == 0 {
                    0.0
                } else {
                    k2.powf(s)
                }
            } else {
                (1.0 + k2).powf(s)
            };
            total += w * v.norm_sqr();
        }
    }
    (total * grid.volume()).sqrt()
}

/// Bessel-potential norm `‖(1-Δ)^{s/2} f‖_{L^p}`.
pub fn bessel_potential_norm<F: Field>(f: &F, s: f64, p: f64) -> Result<f64> {
    let grid = *f.grid();
    lp_norm(&f.apply_multiplier(|flat| (1.0 + grid.wavenumber_sq(flat)).powf(s / 2.0)), p)
}

/// Forward transform of real vector samples.
pub(crate) fn samples_to_vector(grid: &crate::grid::TorusGrid, samples: Vec<Vec<f64>>) -> SpectralVectorField {
    let comps = samples.into_iter().map(|s| samples_to_field(grid, s)).collect();
    SpectralVectorField::from_components(comps).expect("n components")
}

/// Forward transform of a real sample array.
pub(crate) fn samples_to_field(grid: &crate::grid::TorusGrid, samples: Vec<f64>) -> ScalarField {
    ScalarField::from_physical(*grid, &samples).expect("sample count matches grid")
}
