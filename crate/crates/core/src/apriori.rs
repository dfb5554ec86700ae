//! Diagnostics along trajectories: energy balance, cancellation identities,
//! Gronwall bounds, `Ḣ²` growth terms, the interpolation split of the data,
//! higher-regularity traces and restart consistency.

use serde::{Deserialize, Serialize};

use crate::dynamics::{reynolds_stress, relative_divergence, LansConfig, Trajectory};
use crate::error::{Error, Result};
use crate::field::{Field, SpectralVectorField};
use crate::lp::{BesovIndex, DyadicPartition};
use crate::spectral::{
    bessel_potential_norm, dealias, gradient, inner_product, laplacian, leray_project, lp_norm, sobolev_norm,
};

/// `‖u‖²_{L²} + α²‖∇u‖²_{L²}`, the energy conserved by the inviscid flow.
pub fn energy_pair(u: &SpectralVectorField, alpha: f64) -> Result<f64> {
    let l2 = lp_norm(u, 2.0)?;
    let h1 = sobolev_norm(u, 1.0, true);
    Ok(l2 * l2 + alpha * alpha * h1 * h1)
}

/// Grid quadrature of the pointwise dot product of two sample sets.
fn quadrature_dot(a: &[Vec<f64>], b: &[Vec<f64>], cell: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>()).sum::<f64>() * cell
}

/// Grid quadrature of `|a(x)| |b(x)|`, the pointwise Cauchy-Schwarz bound of
/// [`quadrature_dot`].
fn quadrature_abs_dot(a: &[Vec<f64>], b: &[Vec<f64>], cell: f64) -> f64 {
    let magnitude = |v: &[Vec<f64>], p: usize| v.iter().map(|c| c[p] * c[p]).sum::<f64>().sqrt();
    (0..a[0].len()).map(|p| magnitude(a, p) * magnitude(b, p)).sum::<f64>() * cell
}

/// `Σ_j a_j ∂_j b_i` in physical space, without truncation.
fn transport_samples(a: &[Vec<f64>], grad_b: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut out = vec![0.0; a[0].len()];
            for j in 0..n {
                for (p, o) in out.iter_mut().enumerate() {
                    *o += a[j][p] * grad_b[i * n + j][p];
                }
            }
            out
        })
        .collect()
}

/// The three energy cancellations, raw and relative to the integral of the
/// pointwise magnitude of their integrands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CancellationResiduals {
    /// `⟨(u·∇)u, u⟩`
    pub transport: f64,
    /// `α² Σ ∫ [u_i ∂_i Δu_j u_j + Δu_i ∂_j u_i u_j]`
    pub stress: f64,
    /// `⟨(I - P) N(u), u⟩`, the pressure work.
    pub pressure: f64,
    pub transport_scaled: f64,
    pub stress_scaled: f64,
    pub pressure_scaled: f64,
}

impl CancellationResiduals {
    pub fn max_scaled(&self) -> f64 {
        self.transport_scaled.abs().max(self.stress_scaled.abs()).max(self.pressure_scaled.abs())
    }
}

fn ratio(x: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        0.0
    } else {
        x / scale
    }
}

/// Evaluate the cancellation identities that make the energy pair dissipative.
/// For solenoidal, truncated `u` all three vanish up to rounding.
pub fn cancellation_check(u: &SpectralVectorField, cfg: &LansConfig) -> Result<CancellationResiduals> {
    if *u.grid() != cfg.grid {
        return Err(Error::GridMismatch);
    }
    let grid = cfg.grid;
    let n = grid.dim();
    let cell = grid.cell_volume();
    let vel = u.physical_components();
    let grad = gradient(u).physical_components();
    let lap_u = laplacian(u);
    let lap = lap_u.physical_components();
    let grad_lap = gradient(&lap_u).physical_components();

    let adv = transport_samples(&vel, &grad, n);
    let transport = quadrature_dot(&adv, &vel, cell);

    let a2 = cfg.alpha * cfg.alpha;
    let transport_scale = quadrature_abs_dot(&adv, &vel, cell);
    let (stress, stress_scale) = if cfg.alpha == 0.0 {
        (0.0, 0.0)
    } else {
        let t1 = transport_samples(&vel, &grad_lap, n);
        (
            a2 * (quadrature_dot(&t1, &vel, cell) + quadrature_dot(&adv, &lap, cell)),
            a2 * (quadrature_abs_dot(&t1, &vel, cell) + quadrature_abs_dot(&adv, &lap, cell)),
        )
    };

    let mut total = dealias(&crate::spectral::samples_to_vector(&grid, adv));
    total.add_scaled(1.0, &reynolds_stress(u, u, cfg)?)?;
    let gradient_part = total.combine(1.0, &leray_project(&total), -1.0)?;
    let pressure = inner_product(&gradient_part, u)?;

    let l2 = lp_norm(u, 2.0)?;
    Ok(CancellationResiduals {
        transport,
        stress,
        pressure,
        transport_scaled: ratio(transport, transport_scale),
        stress_scaled: ratio(stress, stress_scale),
        pressure_scaled: ratio(pressure, lp_norm(&gradient_part, 2.0)? * l2 + lp_norm(&total, 2.0)? * l2),
    })
}

/// Energy pair along a trajectory together with the Gronwall envelope
/// `e(t0) exp(C α^{-2} ∫_{t0}^t ‖v‖_{H^{2,p}})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub times: Vec<f64>,
    pub e_pair: Vec<f64>,
    /// `‖u(t)‖_{Ḣ²}`
    pub h2: Vec<f64>,
    /// `‖u(t)‖_{Ḣ³}`
    pub h3: Vec<f64>,
    /// `∫_{t0}^t ‖v(s)‖_{H^{2,p}} ds`
    pub forcing_integral: Vec<f64>,
    pub bound: Vec<f64>,
    pub bound_ratio: Vec<f64>,
    pub max_bound_ratio: f64,
    /// `C ‖v(t)‖_{L^p} - 1`; negative where the dissipative sign condition holds.
    pub sign_margin: Vec<f64>,
    pub constant: f64,
}

fn forcing_series(u: &Trajectory, v: Option<&Trajectory>, p: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut integral = Vec::with_capacity(u.len());
    let mut lp = Vec::with_capacity(u.len());
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &t in u.times() {
        let (h2p, vp) = match v {
            Some(v) => {
                let vt = v.state_at(t)?;
                (bessel_potential_norm(&vt, 2.0, p)?, lp_norm(&vt, p)?)
            }
            None => (0.0, 0.0),
        };
        if let Some((t0, f0)) = prev {
            acc += 0.5 * (t - t0) * (f0 + h2p);
        }
        prev = Some((t, h2p));
        integral.push(acc);
        lp.push(vp);
    }
    Ok((integral, lp))
}

/// Smallest `C >= 0` for which the Gronwall envelope dominates `u` on this run.
pub fn calibrate_gronwall(u: &Trajectory, v: Option<&Trajectory>, alpha: f64, p: f64) -> Result<f64> {
    if alpha <= 0.0 {
        return Err(Error::InvalidParameter("the Gronwall envelope needs alpha > 0".into()));
    }
    let (integral, _) = forcing_series(u, v, p)?;
    let e0 = energy_pair(&u.states()[0], alpha)?;
    let mut c: f64 = 0.0;
    for (s, &i) in u.states().iter().zip(&integral).skip(1) {
        if i > 0.0 && e0 > 0.0 {
            let e = energy_pair(s, alpha)?;
            c = c.max(alpha * alpha * (e / e0).ln() / i);
        }
    }
    Ok(c)
}

/// Energy pair, `Ḣ²`/`Ḣ³` norms and the Gronwall envelope with a frozen constant.
pub fn gronwall_monitor(u: &Trajectory, v: Option<&Trajectory>, alpha: f64, p: f64, constant: f64) -> Result<EnergyReport> {
    if alpha <= 0.0 {
        return Err(Error::InvalidParameter("the Gronwall envelope needs alpha > 0".into()));
    }
    let (integral, vp) = forcing_series(u, v, p)?;
    let e_pair = u.states().iter().map(|s| energy_pair(s, alpha)).collect::<Result<Vec<_>>>()?;
    let e0 = e_pair[0];
    let bound: Vec<f64> = integral.iter().map(|i| e0 * (constant * i / (alpha * alpha)).exp()).collect();
    let bound_ratio: Vec<f64> = e_pair.iter().zip(&bound).map(|(e, b)| if *b > 0.0 { e / b } else { 0.0 }).collect();
    Ok(EnergyReport {
        times: u.times().to_vec(),
        h2: u.states().iter().map(|s| sobolev_norm(s, 2.0, true)).collect(),
        h3: u.states().iter().map(|s| sobolev_norm(s, 3.0, true)).collect(),
        max_bound_ratio: bound_ratio.iter().copied().fold(0.0, f64::max),
        sign_margin: vp.iter().map(|x| constant * x - 1.0).collect(),
        forcing_integral: integral,
        e_pair,
        bound,
        bound_ratio,
        constant,
    })
}

/// The four nonlinear contributions to `d/dt ‖u‖²_{Ḣ²}` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H2Terms {
    /// `-(A P (u·∇)u, Au)`
    pub k1: f64,
    /// `-(A P div τ(u,u), Au)`
    pub k2: f64,
    /// `-(A P [(u·∇)v + (v·∇)u], Au)`
    pub l1: f64,
    /// `-(A P 2 div τ(u,v), Au)`
    pub l2: f64,
    pub h1: f64,
    pub h3: f64,
    /// `Ḣ³` norm of the modes a grid of half the resolution would hold.
    pub h3_coarse: f64,
    pub under_resolved: bool,
}

/// Evaluate the `Ḣ²` growth terms with `A = -Δ`.
pub fn h2_terms(u: &SpectralVectorField, v: &SpectralVectorField, cfg: &LansConfig) -> Result<H2Terms> {
    let grid = cfg.grid;
    let a_u = laplacian(u).scaled(-1.0);
    let term = |f: SpectralVectorField| -> Result<f64> {
        let af = laplacian(&leray_project(&dealias(&f))).scaled(-1.0);
        Ok(-inner_product(&af, &a_u)?)
    };
    let n = grid.dim();
    let vel_u = u.physical_components();
    let grad_u = gradient(u).physical_components();
    let vel_v = v.physical_components();
    let grad_v = gradient(v).physical_components();
    let self_adv = crate::spectral::samples_to_vector(&grid, transport_samples(&vel_u, &grad_u, n));
    let mut cross = transport_samples(&vel_u, &grad_v, n);
    for (c, x) in cross.iter_mut().zip(transport_samples(&vel_v, &grad_u, n)) {
        for (a, b) in c.iter_mut().zip(x) {
            *a += b;
        }
    }
    let cross = crate::spectral::samples_to_vector(&grid, cross);

    let h3 = sobolev_norm(u, 3.0, true);
    let quarter = (grid.points_per_axis() / 4) as i64;
    let coarse = u.apply_multiplier(|flat| {
        let k = grid.mode(flat);
        if k.iter().take(n).all(|c| c.abs() < quarter) {
            1.0
        } else {
            0.0
        }
    });
    let h3_coarse = sobolev_norm(&coarse, 3.0, true);
    Ok(H2Terms {
        k1: term(self_adv)?,
        k2: term(reynolds_stress(u, u, cfg)?)?,
        l1: term(cross)?,
        l2: term(reynolds_stress(u, v, cfg)?.scaled(2.0))?,
        h1: sobolev_norm(u, 1.0, true),
        h3,
        h3_coarse,
        under_resolved: h3 > 0.0 && (h3 - h3_coarse).abs() > 0.05 * h3,
    })
}

/// `H2Terms` at every stored node of `u`.
pub fn h2_term_monitor(u: &Trajectory, v: &Trajectory, cfg: &LansConfig) -> Result<Vec<H2Terms>> {
    u.times().iter().zip(u.states()).map(|(&t, s)| h2_terms(s, &v.state_at(t)?, cfg)).collect()
}

/// `μ^{-1} u(μx)`: a dilation that keeps `‖u‖_{Ḣ¹}` fixed and multiplies
/// `‖u‖_{Ḣ³}` by `μ²`.
pub fn dilate(u: &SpectralVectorField, mu: usize) -> Result<SpectralVectorField> {
    if mu == 0 {
        return Err(Error::InvalidParameter("dilation factor must be positive".into()));
    }
    let grid = *u.grid();
    let mut out = u.zeroed();
    let scale = 1.0 / mu as f64;
    // transform round-off is not worth refusing a dilation over
    let floor = 1e-14 * u.max_coefficient();
    for c in 0..u.component_count() {
        let src = u.coeffs(c).to_vec();
        let dst = out.coeffs_mut(c);
        for (flat, v) in src.iter().enumerate() {
            if v.norm() <= floor {
                continue;
            }
            let k = grid.mode(flat);
            let target = [k[0] * mu as i64, k[1] * mu as i64, k[2] * mu as i64];
            let t = grid.flat_index(target);
            if grid.mode(t) != target || !grid.is_retained(t) {
                return Err(Error::InvalidParameter(format!("dilation by {mu} pushes mode {k:?} off the retained lattice")));
            }
            dst[t] = *v * scale;
        }
    }
    Ok(out)
}

/// Parameters of the low/high frequency split of the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub p: f64,
    pub p_tilde: f64,
    pub epsilon: f64,
    pub j_cut: usize,
    pub q: f64,
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2.0 < self.p && self.p < self.p_tilde) {
            return Err(Error::InvalidParameter(format!(
                "split needs 2 < p < p_tilde, got p = {}, p_tilde = {}",
                self.p, self.p_tilde
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("split tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Interpolation exponent with `1/p = θ/2 + (1-θ)/p_tilde`.
    pub fn theta(&self) -> f64 {
        (1.0 / self.p - 1.0 / self.p_tilde) / (0.5 - 1.0 / self.p_tilde)
    }
}

#[derive(Debug, Clone)]
pub struct SplitOutcome {
    /// Low-frequency part `S_{J_c} w0`.
    pub u0: SpectralVectorField,
    /// High-frequency tail `w0 - S_{J_c} w0`.
    pub v0: SpectralVectorField,
    pub j_cut: usize,
    /// `‖v0‖_{B^{n/p̃}_{p̃,q}}`
    pub tail_norm: f64,
    pub theta: f64,
}

/// Split `w0` so that the tail is below `epsilon` in the critical `p_tilde`
/// norm, raising the cut from `j_cut` until it is.
pub fn interpolation_split(w0: &SpectralVectorField, cfg: &SplitConfig, partition: &DyadicPartition) -> Result<SplitOutcome> {
    cfg.validate()?;
    let dim = w0.grid().dim() as f64;
    let index = BesovIndex::new(dim / cfg.p_tilde, cfg.p_tilde, cfg.q)?;
    let mut best = f64::INFINITY;
    for jc in cfg.j_cut..=partition.j_max() {
        let u0 = partition.low_pass(w0, jc as i64)?;
        let v0 = w0.combine(1.0, &u0, -1.0)?;
        let tail = partition.besov_norm(&v0, index)?;
        best = best.min(tail);
        if tail < cfg.epsilon {
            return Ok(SplitOutcome { u0, v0, j_cut: jc, tail_norm: tail, theta: cfg.theta() });
        }
    }
    Err(Error::SplitUnreachable { target: cfg.epsilon, achievable: best })
}

/// `t^{(k - base)/2} ‖u(t)‖_{B^k_{2,q}}` along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityTrace {
    pub times: Vec<f64>,
    pub weighted: Vec<f64>,
    pub sup: f64,
    /// Weighted value at the first positive node.
    pub small_t: f64,
}

pub fn higher_regularity_trace(
    traj: &Trajectory,
    k: f64,
    base: f64,
    q: f64,
    partition: &DyadicPartition,
) -> Result<RegularityTrace> {
    let index = BesovIndex::new(k, 2.0, q)?;
    let exponent = (k - base) / 2.0;
    let mut times = Vec::new();
    let mut weighted = Vec::new();
    for (&t, s) in traj.times().iter().zip(traj.states()) {
        if t <= 0.0 {
            continue;
        }
        times.push(t);
        weighted.push(t.powf(exponent) * partition.besov_norm(s, index)?);
    }
    if times.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    Ok(RegularityTrace {
        sup: weighted.iter().copied().fold(0.0, f64::max),
        small_t: weighted[0],
        times,
        weighted,
    })
}

/// Relative change of the supremum between two resolutions of the same run;
/// above 0.1 the trace is flagged as under-resolved.
pub fn regularity_refinement(coarse: &RegularityTrace, fine: &RegularityTrace) -> (f64, bool) {
    let d = (coarse.sup - fine.sup).abs() / fine.sup.max(f64::MIN_POSITIVE);
    (d, d > 0.1)
}

/// Restart from `u(t1)` with `resolve` and compare with the original run on
/// the shared nodes; returns the largest discrepancy in `index`.
pub fn bootstrap_consistency(
    u: &Trajectory,
    t1: f64,
    resolve: impl Fn(&SpectralVectorField, f64) -> Result<Trajectory>,
    partition: &DyadicPartition,
    index: BesovIndex,
) -> Result<f64> {
    let start = u.node(t1).ok_or(Error::MissingTime(t1))?;
    let restarted = resolve(&u.states()[start], t1)?;
    let mut worst: f64 = 0.0;
    for (&s, state) in restarted.times().iter().zip(restarted.states()) {
        if let Some(i) = u.node(t1 + s) {
            let d = state.combine(1.0, &u.states()[i], -1.0)?;
            worst = worst.max(partition.besov_norm(&d, index)?);
        }
    }
    Ok(worst)
}

/// Largest relative divergence over a trajectory.
pub fn max_divergence(traj: &Trajectory) -> f64 {
    traj.states().iter().map(relative_divergence).fold(0.0, f64::max)
}
