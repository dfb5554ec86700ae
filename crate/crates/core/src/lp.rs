//! Littlewood-Paley blocks, Besov norms and the Bony paraproduct on the torus.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, ScalarField};
use crate::grid::TorusGrid;
use crate::spectral::{check_exponent, dealias, lp_of_samples, samples_to_field};

/// Shape of the radial cut-off `H`, equal to one on `[0, 1]` and zero on `[2, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Profile {
    /// `C^∞` transition built from `exp(-1/x)`.
    #[default]
    Smooth,
    /// `cos²` transition; only `C^1`, kept for comparison.
    RaisedCosine,
}

fn bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

impl Profile {
    /// The cut-off `H(r)`.
    pub fn cutoff(self, r: f64) -> f64 {
        if r <= 1.0 {
            return 1.0;
        }
        if r >= 2.0 {
            return 0.0;
        }
        match self {
            Profile::Smooth => {
                let a = bump(2.0 - r);
                a / (a + bump(r - 1.0))
            }
            Profile::RaisedCosine => {
                let c = (std::f64::consts::FRAC_PI_2 * (r - 1.0)).cos();
                c * c
            }
        }
    }
}

/// A Besov index `(s, p, q)`; `p` and `q` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        check_exponent(p)?;
        check_exponent(q)?;
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("smoothness must be finite, got {s}")));
        }
        Ok(Self { s, p, q })
    }
}

#[derive(Debug, Clone)]
struct Shell {
    indices: Vec<u32>,
    weights: Vec<f64>,
}

/// The dyadic partition of unity sampled on a lattice, stored sparsely per shell.
///
/// Block 0 is the low-pass `H(|ξ|)`; block `j >= 1` is
/// `H(2^{-j}|ξ|) - H(2^{1-j}|ξ|)`, supported in `2^{j-1} < |ξ| < 2^{j+1}`.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: TorusGrid,
    profile: Profile,
    shells: Vec<Shell>,
}

/// The blocks `Δ_0 f, …, Δ_J f` of a field.
#[derive(Debug, Clone)]
pub struct LPBlocks<F> {
    pub blocks: Vec<F>,
}

impl<F: Field> LPBlocks<F> {
    /// Sum of all blocks.
    pub fn reconstruct(&self) -> F {
        let mut out = self.blocks[0].clone();
        for b in &self.blocks[1..] {
            out.add_scaled(1.0, b).expect("blocks share a grid");
        }
        out
    }
}

/// The three pieces of `fg = T_f g + T_g f + R(f, g)`.
#[derive(Debug, Clone)]
pub struct Paraproduct {
    /// `Σ_k S_{k-3} f Δ_k g`
    pub low_f_high_g: ScalarField,
    /// `Σ_k S_{k-3} g Δ_k f`
    pub low_g_high_f: ScalarField,
    /// `Σ_k Δ_k f Σ_{|l|<=2} Δ_{k+l} g`
    pub resonant: ScalarField,
}

impl Paraproduct {
    pub fn sum(&self) -> ScalarField {
        let mut out = self.low_f_high_g.clone();
        out.add_scaled(1.0, &self.low_g_high_f).expect("same grid");
        out.add_scaled(1.0, &self.resonant).expect("same grid");
        out
    }
}

impl DyadicPartition {
    /// Smallest `J` with `2^J` at least the largest lattice wavenumber, so the
    /// blocks sum to one on every mode.
    pub fn covering_level(grid: &TorusGrid) -> usize {
        let kmax = grid.max_radial_wavenumber();
        let mut j = 0;
        while ((1u64 << j) as f64) < kmax {
            j += 1;
        }
        j
    }

    /// Partition with enough shells to cover the whole lattice.
    pub fn new(grid: TorusGrid, profile: Profile) -> Self {
        Self::with_levels(grid, profile, Self::covering_level(&grid)).expect("covering level is valid")
    }

    /// Partition with blocks `0..=j_max`.
    pub fn with_levels(grid: TorusGrid, profile: Profile, j_max: usize) -> Result<Self> {
        let limit = Self::covering_level(&grid);
        if j_max > limit {
            return Err(Error::TooManyShells { requested: j_max, max: limit });
        }
        let mut shells: Vec<Shell> = (0..=j_max).map(|_| Shell { indices: Vec::new(), weights: Vec::new() }).collect();
        for flat in 0..grid.len() {
            let xi = grid.wavenumber(flat);
            for (j, shell) in shells.iter_mut().enumerate() {
                let w = multiplier(profile, j, xi);
                if w != 0.0 {
                    shell.indices.push(flat as u32);
                    shell.weights.push(w);
                }
            }
        }
        Ok(Self { grid, profile, shells })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// Index of the last block.
    pub fn j_max(&self) -> usize {
        self.shells.len() - 1
    }

    /// Largest `j >= 1` whose shell lies inside the ball `|ξ| <= N/2`,
    /// i.e. `2^{j+1} <= N/2` in wavenumber units.
    pub fn full_levels(&self) -> usize {
        self.last_level_below(self.grid.wavenumber_unit() * (self.grid.points_per_axis() / 2) as f64)
    }

    /// Largest `j` whose shell lies inside the truncation radius.
    pub fn dealiased_levels(&self) -> usize {
        self.last_level_below(self.grid.wavenumber_unit() * self.grid.k_max())
    }

    fn last_level_below(&self, radius: f64) -> usize {
        let mut j = 0;
        while j < self.j_max() && ((1u64 << (j + 2)) as f64) <= radius + 1e-12 {
            j += 1;
        }
        j
    }

    /// The multiplier of block `j` at radius `xi`.
    pub fn multiplier(&self, j: usize, xi: f64) -> f64 {
        multiplier(self.profile, j, xi)
    }

    /// Block multiplier at a lattice point.
    pub fn weight_at(&self, j: usize, flat: usize) -> f64 {
        self.multiplier(j, self.grid.wavenumber(flat))
    }

    /// Nonzero entries of block `j` as `(flat index, weight)`.
    pub fn shell(&self, j: usize) -> Result<impl Iterator<Item = (usize, f64)> + '_> {
        let shell = self.shells.get(j).ok_or(Error::ShellOutOfRange { j, j_max: self.j_max() })?;
        Ok(shell.indices.iter().map(|&i| i as usize).zip(shell.weights.iter().copied()))
    }

    fn check<F: Field>(&self, f: &F) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `Δ_j f`
    pub fn delta<F: Field>(&self, f: &F, j: usize) -> Result<F> {
        self.check(f)?;
        let shell = self.shells.get(j).ok_or(Error::ShellOutOfRange { j, j_max: self.j_max() })?;
        let mut out = f.zeroed();
        for c in 0..f.component_count() {
            let src = f.coeffs(c);
            let dst = out.coeffs_mut(c);
            for (&i, &w) in shell.indices.iter().zip(&shell.weights) {
                dst[i as usize] = src[i as usize] * w;
            }
        }
        Ok(out)
    }

    /// `S_j f = Σ_{i<=j} Δ_i f`; zero for `j < 0`, all blocks for `j >= J`.
    pub fn low_pass<F: Field>(&self, f: &F, j: i64) -> Result<F> {
        self.check(f)?;
        let mut out = f.zeroed();
        if j < 0 {
            return Ok(out);
        }
        let top = (j as usize).min(self.j_max());
        for shell in &self.shells[..=top] {
            for c in 0..f.component_count() {
                let src = f.coeffs(c);
                let dst = out.coeffs_mut(c);
                for (&i, &w) in shell.indices.iter().zip(&shell.weights) {
                    dst[i as usize] += src[i as usize] * w;
                }
            }
        }
        Ok(out)
    }

    pub fn decompose<F: Field>(&self, f: &F) -> Result<LPBlocks<F>> {
        let blocks = (0..=self.j_max()).map(|j| self.delta(f, j)).collect::<Result<Vec<_>>>()?;
        Ok(LPBlocks { blocks })
    }

    /// `‖Δ_j f‖_{L^p}` for every block.
    pub fn block_norms<F: Field>(&self, f: &F, p: f64) -> Result<Vec<f64>> {
        self.check(f)?;
        check_exponent(p)?;
        let vol = self.grid.volume();
        (0..=self.j_max())
            .map(|j| {
                if p == 2.0 {
                    // discrete Parseval equals the grid quadrature exactly
                    let shell = &self.shells[j];
                    let mut s = 0.0;
                    for c in 0..f.component_count() {
                        let src = f.coeffs(c);
                        for (&i, &w) in shell.indices.iter().zip(&shell.weights) {
                            s += w * w * src[i as usize].norm_sqr();
                        }
                    }
                    Ok((s * vol).sqrt())
                } else {
                    let d = self.delta(f, j)?;
                    Ok(lp_of_samples(&d.pointwise_magnitude(), p, self.grid.cell_volume()))
                }
            })
            .collect()
    }

    /// Inhomogeneous Besov norm `(Σ_j (2^{js} ‖Δ_j f‖_p)^q)^{1/q}` over `j = 0..=J`.
    pub fn besov_norm<F: Field>(&self, f: &F, index: BesovIndex) -> Result<f64> {
        let norms = self.block_norms(f, index.p)?;
        Ok(combine_blocks(&norms, index.s, index.q, 0))
    }

    /// Same sum with block 0 left out.
    pub fn besov_norm_homogeneous<F: Field>(&self, f: &F, index: BesovIndex) -> Result<f64> {
        let norms = self.block_norms(f, index.p)?;
        Ok(combine_blocks(&norms, index.s, index.q, 1))
    }

    fn physical_blocks(&self, f: &ScalarField) -> Result<Vec<Vec<f64>>> {
        (0..=self.j_max()).map(|j| Ok(self.delta(f, j)?.to_physical())).collect()
    }

    /// Bony decomposition of the truncated product of two scalar fields.
    pub fn paraproduct_split(&self, f: &ScalarField, g: &ScalarField) -> Result<Paraproduct> {
        self.check(f)?;
        self.check(g)?;
        let df = self.physical_blocks(f)?;
        let dg = self.physical_blocks(g)?;
        let len = self.grid.len();
        let cumulative = |blocks: &[Vec<f64>]| {
            let mut acc = vec![0.0; len];
            let mut out = Vec::with_capacity(blocks.len());
            for b in blocks {
                for (a, v) in acc.iter_mut().zip(b) {
                    *a += v;
                }
                out.push(acc.clone());
            }
            out
        };
        let sf = cumulative(&df);
        let sg = cumulative(&dg);
        let jm = self.j_max();

        let mut t1 = vec![0.0; len];
        let mut t2 = vec![0.0; len];
        let mut r = vec![0.0; len];
        for k in 3..=jm {
            for i in 0..len {
                t1[i] += sf[k - 3][i] * dg[k][i];
                t2[i] += sg[k - 3][i] * df[k][i];
            }
        }
        for k in 0..=jm {
            let lo = k.saturating_sub(2);
            let hi = (k + 2).min(jm);
            for l in lo..=hi {
                for i in 0..len {
                    r[i] += df[k][i] * dg[l][i];
                }
            }
        }
        Ok(Paraproduct {
            low_f_high_g: dealias(&samples_to_field(&self.grid, t1)),
            low_g_high_f: dealias(&samples_to_field(&self.grid, t2)),
            resonant: dealias(&samples_to_field(&self.grid, r)),
        })
    }

    /// One low-high term `S_{k-3} f Δ_k g`, truncated.
    pub fn low_high_term(&self, f: &ScalarField, g: &ScalarField, k: usize) -> Result<ScalarField> {
        let low = self.low_pass(f, k as i64 - 3)?.to_physical();
        let high = self.delta(g, k)?.to_physical();
        let prod = low.iter().zip(&high).map(|(a, b)| a * b).collect();
        Ok(dealias(&samples_to_field(&self.grid, prod)))
    }

    /// One resonant term `Δ_k f Σ_{|l|<=2} Δ_{k+l} g`, truncated.
    pub fn resonant_term(&self, f: &ScalarField, g: &ScalarField, k: usize) -> Result<ScalarField> {
        let a = self.delta(f, k)?.to_physical();
        let mut b = vec![0.0; self.grid.len()];
        for l in k.saturating_sub(2)..=(k + 2).min(self.j_max()) {
            for (acc, v) in b.iter_mut().zip(self.delta(g, l)?.to_physical()) {
                *acc += v;
            }
        }
        let prod = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Ok(dealias(&samples_to_field(&self.grid, prod)))
    }

    /// Periodic convolution kernel of block `j`: `ψ_j * f = Δ_j f`.
    pub fn kernel(&self, j: usize) -> Result<ScalarField> {
        let mut out = ScalarField::zeros(self.grid);
        let vol = self.grid.volume();
        let coeffs = out.coefficients_mut();
        for (i, w) in self.shell(j)? {
            coeffs[i] = Complex64::new(w / vol, 0.0);
        }
        Ok(out)
    }
}

fn multiplier(profile: Profile, j: usize, xi: f64) -> f64 {
    if j == 0 {
        return profile.cutoff(xi);
    }
    let scale = (1u64 << j) as f64;
    profile.cutoff(xi / scale) - profile.cutoff(2.0 * xi / scale)
}

/// `ℓ^q` sum of `2^{js} a_j` starting at block `first`.
pub(crate) fn combine_blocks(norms: &[f64], s: f64, q: f64, first: usize) -> f64 {
    let weighted = norms.iter().enumerate().skip(first).map(|(j, a)| 2f64.powf(j as f64 * s) * a);
    if q.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else {
        weighted.map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_limits() {
        for p in [Profile::Smooth, Profile::RaisedCosine] {
            assert_eq!(p.cutoff(0.3), 1.0);
            assert_eq!(p.cutoff(1.0), 1.0);
            assert_eq!(p.cutoff(2.0), 0.0);
            assert!((p.cutoff(1.5) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn level_counts() {
        let g = TorusGrid::new(3, 32).unwrap();
        let lp = DyadicPartition::new(g, Profile::Smooth);
        assert_eq!(lp.j_max(), 5);
        assert_eq!(lp.full_levels(), 3);
        assert_eq!(lp.dealiased_levels(), 2);
        let g64 = g.with_points(64).unwrap();
        let lp64 = DyadicPartition::new(g64, Profile::Smooth);
        assert_eq!(lp64.j_max(), 6);
        assert_eq!(lp64.full_levels(), 4);
        assert!(DyadicPartition::with_levels(g, Profile::Smooth, 9).is_err());
    }

    #[test]
    fn shell_centre_weight_is_one() {
        let g = TorusGrid::new(3, 32).unwrap();
        let lp = DyadicPartition::new(g, Profile::Smooth);
        for j in 1..=4 {
            assert_eq!(lp.multiplier(j, (1u64 << j) as f64), 1.0);
        }
        let flat = g.flat_index([0, 4, 0]);
        assert_eq!(lp.weight_at(2, flat), 1.0);
        assert_eq!(lp.weight_at(1, flat), 0.0);
        assert_eq!(lp.weight_at(3, flat), 0.0);
    }

    #[test]
    fn besov_of_single_mode() {
        let g = TorusGrid::new(3, 16).unwrap();
        let lp = DyadicPartition::new(g, Profile::Smooth);
        // |k| = 4 sits in block 2 only, with weight one
        let f = ScalarField::from_fn(g, |x| (4.0 * x[1]).cos());
        let l2 = (g.volume() / 2.0).sqrt();
        let b = lp.besov_norm(&f, BesovIndex::new(1.0, 2.0, 2.0).unwrap()).unwrap();
        assert!((b - 4.0 * l2).abs() < 1e-12 * b);
        let b = lp.besov_norm(&f, BesovIndex::new(1.0, f64::INFINITY, 1.0).unwrap()).unwrap();
        assert!((b - 4.0).abs() < 1e-12);
    }
}
