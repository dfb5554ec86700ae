//! LANS-α and modified LANS vector fields, the heat semigroup, a Duhamel/Picard
//! solver and an integrating-factor time marcher.

use serde::{Deserialize, Serialize};

use crate::error::{Error, PicardFailureKind, Result};
use crate::field::{check_same, Field, SpectralVectorField, TensorField};
use crate::grid::TorusGrid;
use crate::lp::{BesovIndex, DyadicPartition};
use crate::spectral::{dealias, divergence, gradient, helmholtz_inverse, laplacian, leray_project, samples_to_field, tensor_divergence};

/// Physical constants of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LansConfig {
    pub alpha: f64,
    pub nu: f64,
    pub grid: TorusGrid,
}

impl LansConfig {
    pub fn new(alpha: f64, nu: f64, grid: TorusGrid) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be nonnegative, got {alpha}")));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::InvalidParameter(format!("viscosity must be positive, got {nu}")));
        }
        Ok(Self { alpha, nu, grid })
    }
}

/// Divergence relative to the full gradient, zero for the zero field.
pub fn relative_divergence(u: &SpectralVectorField) -> f64 {
    let g = gradient(u).coefficient_norm();
    if g == 0.0 {
        return 0.0;
    }
    divergence(u).coefficient_norm() / g
}

const SOLENOIDAL_TOL: f64 = 1e-8;

fn require_solenoidal(u: &SpectralVectorField) -> Result<()> {
    let r = relative_divergence(u);
    if r > SOLENOIDAL_TOL {
        return Err(Error::NotSolenoidal(r));
    }
    Ok(())
}

fn require_grid(u: &SpectralVectorField, cfg: &LansConfig) -> Result<()> {
    if *u.grid() != cfg.grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Velocity samples and gradient samples of one field.
struct Kinematics {
    vel: Vec<Vec<f64>>,
    grad: Vec<Vec<f64>>,
}

impl Kinematics {
    fn of(u: &SpectralVectorField) -> Self {
        Self { vel: u.physical_components(), grad: gradient(u).physical_components() }
    }
}

/// `out_i += Σ_j a_j ∂_j b_i` at every grid point.
fn add_transport(out: &mut [Vec<f64>], a: &Kinematics, b: &Kinematics, n: usize) {
    for (i, oi) in out.iter_mut().enumerate() {
        for j in 0..n {
            let aj = &a.vel[j];
            let dbij = &b.grad[i * n + j];
            for (p, o) in oi.iter_mut().enumerate() {
                *o += aj[p] * dbij[p];
            }
        }
    }
}

/// `out += c (Def(f) Rot(g) + Def(g) Rot(f))` as a pointwise matrix product.
fn add_def_rot(out: &mut [Vec<f64>], c: f64, f: &Kinematics, g: &Kinematics, n: usize) {
    let len = f.vel[0].len();
    let mut df = vec![0.0; n * n];
    let mut rf = vec![0.0; n * n];
    let mut dg = vec![0.0; n * n];
    let mut rg = vec![0.0; n * n];
    for p in 0..len {
        for i in 0..n {
            for j in 0..n {
                let a = f.grad[i * n + j][p];
                let at = f.grad[j * n + i][p];
                df[i * n + j] = 0.5 * (a + at);
                rf[i * n + j] = 0.5 * (a - at);
                let b = g.grad[i * n + j][p];
                let bt = g.grad[j * n + i][p];
                dg[i * n + j] = 0.5 * (b + bt);
                rg[i * n + j] = 0.5 * (b - bt);
            }
        }
        for i in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += df[i * n + j] * rg[j * n + k] + dg[i * n + j] * rf[j * n + k];
                }
                out[i * n + k][p] += c * s;
            }
        }
    }
}

fn tensor_from_samples(grid: &TorusGrid, samples: Vec<Vec<f64>>) -> TensorField {
    let entries = samples.into_iter().map(|s| samples_to_field(grid, s)).collect();
    TensorField::from_entries(*grid, entries).expect("n*n entries")
}

fn vector_from_samples(grid: &TorusGrid, samples: Vec<Vec<f64>>) -> SpectralVectorField {
    let comps = samples.into_iter().map(|s| samples_to_field(grid, s)).collect();
    SpectralVectorField::from_components(comps).expect("n components")
}

/// `div τ` for the stress built from the given Def/Rot combination matrix.
fn stress_divergence(grid: &TorusGrid, alpha: f64, matrix: Vec<Vec<f64>>) -> Result<SpectralVectorField> {
    let t = dealias(&tensor_from_samples(grid, matrix));
    let t = helmholtz_inverse(&t, alpha)?;
    Ok(dealias(&tensor_divergence(&t)))
}

/// The stress tensor `τ^α(f, g) = (α²/2)(1 - α²Δ)^{-1}[Def(f)Rot(g) + Def(g)Rot(f)]`, truncated.
pub fn reynolds_stress_tensor(f: &SpectralVectorField, g: &SpectralVectorField, alpha: f64) -> Result<TensorField> {
    check_same(f, g)?;
    let grid = *f.grid();
    let n = grid.dim();
    let mut m = vec![vec![0.0; grid.len()]; n * n];
    if alpha != 0.0 {
        add_def_rot(&mut m, 0.5 * alpha * alpha, &Kinematics::of(f), &Kinematics::of(g), n);
    }
    helmholtz_inverse(&dealias(&tensor_from_samples(&grid, m)), alpha)
}

/// `div τ^α(f, g)`, truncated. Identically zero for `α = 0`.
pub fn reynolds_stress(f: &SpectralVectorField, g: &SpectralVectorField, cfg: &LansConfig) -> Result<SpectralVectorField> {
    require_grid(f, cfg)?;
    check_same(f, g)?;
    if cfg.alpha == 0.0 {
        return Ok(f.zeroed());
    }
    let n = cfg.grid.dim();
    let mut m = vec![vec![0.0; cfg.grid.len()]; n * n];
    add_def_rot(&mut m, 0.5 * cfg.alpha * cfg.alpha, &Kinematics::of(f), &Kinematics::of(g), n);
    stress_divergence(&cfg.grid, cfg.alpha, m)
}

/// `-P[(w·∇)w + div τ^α(w, w)]` for LANS, or, when `v` is given, the modified
/// nonlinearity `-P[(u·∇)u + (u·∇)v + (v·∇)u + div τ^α(u,u) + 2 div τ^α(u,v)]`.
///
/// The transport form agrees with `div(u⊗u + u⊗v + v⊗u)` on solenoidal fields,
/// and keeps the two nonlinearities exactly bilinear-consistent.
fn nonlinear_term(u: &SpectralVectorField, v: Option<&SpectralVectorField>, cfg: &LansConfig) -> Result<SpectralVectorField> {
    let grid = cfg.grid;
    let n = grid.dim();
    let ku = Kinematics::of(u);
    let kv = v.map(Kinematics::of);

    let mut transport = vec![vec![0.0; grid.len()]; n];
    add_transport(&mut transport, &ku, &ku, n);
    if let Some(kv) = &kv {
        add_transport(&mut transport, &ku, kv, n);
        add_transport(&mut transport, kv, &ku, n);
    }
    let mut total = dealias(&vector_from_samples(&grid, transport));

    if cfg.alpha != 0.0 {
        let a2 = cfg.alpha * cfg.alpha;
        let mut m = vec![vec![0.0; grid.len()]; n * n];
        add_def_rot(&mut m, 0.5 * a2, &ku, &ku, n);
        if let Some(kv) = &kv {
            add_def_rot(&mut m, a2, &ku, kv, n);
        }
        total.add_scaled(1.0, &stress_divergence(&grid, cfg.alpha, m)?)?;
    }
    Ok(leray_project(&total).scaled(-1.0))
}

/// `-P[(w·∇)w + div τ^α(w,w)]`
pub fn lans_nonlinear(w: &SpectralVectorField, cfg: &LansConfig) -> Result<SpectralVectorField> {
    require_grid(w, cfg)?;
    nonlinear_term(w, None, cfg)
}

/// Nonlinear part of the modified equation for the perturbation `u` about `v`.
pub fn mlans_nonlinear(u: &SpectralVectorField, v: &SpectralVectorField, cfg: &LansConfig) -> Result<SpectralVectorField> {
    require_grid(u, cfg)?;
    check_same(u, v)?;
    nonlinear_term(u, Some(v), cfg)
}

/// `νΔw - P[(w·∇)w + div τ^α(w,w)]`
pub fn lans_rhs(w: &SpectralVectorField, cfg: &LansConfig) -> Result<SpectralVectorField> {
    require_grid(w, cfg)?;
    require_solenoidal(w)?;
    let mut out = lans_nonlinear(w, cfg)?;
    out.add_scaled(cfg.nu, &laplacian(w))?;
    Ok(out)
}

/// Right-hand side of the modified LANS equation for `u` driven by `v`.
pub fn mlans_rhs(u: &SpectralVectorField, v: &SpectralVectorField, cfg: &LansConfig) -> Result<SpectralVectorField> {
    require_grid(u, cfg)?;
    check_same(u, v)?;
    require_solenoidal(u)?;
    require_solenoidal(v)?;
    let mut out = mlans_nonlinear(u, v, cfg)?;
    out.add_scaled(cfg.nu, &laplacian(u))?;
    Ok(out)
}

/// The heat semigroup `e^{tΔ}`, one multiplier per mode.
pub fn heat_propagate<F: Field>(f: &F, t: f64) -> Result<F> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let grid = *f.grid();
    Ok(f.apply_multiplier(|flat| (-t * grid.wavenumber_sq(flat)).exp()))
}

/// Which equation a trajectory solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Lans,
    Mlans,
    Heat,
}

/// Where a trajectory came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub equation: Equation,
    pub alpha: f64,
    pub nu: f64,
    pub points_per_axis: usize,
    pub dim: usize,
    pub dt: f64,
    pub method: String,
}

/// States of a field at increasing times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<SpectralVectorField>,
    provenance: Provenance,
}

const TIME_MATCH: f64 = 1e-9;

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<SpectralVectorField>, provenance: Provenance) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        if times.len() != states.len() {
            return Err(Error::ShapeMismatch { expected: times.len(), found: states.len() });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("trajectory times must increase strictly".into()));
        }
        Ok(Self { times, states, provenance })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SpectralVectorField] {
        &self.states
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &TorusGrid {
        self.states[0].grid()
    }

    pub fn last(&self) -> (f64, &SpectralVectorField) {
        let i = self.times.len() - 1;
        (self.times[i], &self.states[i])
    }

    /// Index of the stored node at time `t`, if any.
    pub fn node(&self, t: f64) -> Option<usize> {
        let i = self.times.partition_point(|&s| s < t - TIME_MATCH);
        (i < self.times.len() && (self.times[i] - t).abs() <= TIME_MATCH).then_some(i)
    }

    /// State at `t`: the stored node, or linear interpolation between neighbours.
    pub fn state_at(&self, t: f64) -> Result<SpectralVectorField> {
        if let Some(i) = self.node(t) {
            return Ok(self.states[i].clone());
        }
        let first = self.times[0];
        let last = *self.times.last().unwrap();
        if t < first || t > last {
            return Err(Error::MissingTime(t));
        }
        let i = self.times.partition_point(|&s| s < t);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let theta = (t - t0) / (t1 - t0);
        self.states[i - 1].combine(1.0 - theta, &self.states[i], theta)
    }

    /// Pointwise sum of two trajectories on the same time grid.
    pub fn sum(&self, other: &Trajectory) -> Result<Trajectory> {
        let states = self
            .times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| s.combine(1.0, &other.state_at(t)?, 1.0))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.times.clone(), states, self.provenance.clone())
    }
}

/// Exponential time-stepping rule; the linear part is integrated exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Integrating-factor Heun, second order.
    #[default]
    IfHeun,
    /// Integrating-factor (Lawson) Runge-Kutta, fourth order.
    IfRk4,
}

impl Integrator {
    pub fn order(self) -> u32 {
        match self {
            Integrator::IfHeun => 2,
            Integrator::IfRk4 => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Integrator::IfHeun => "if-heun",
            Integrator::IfRk4 => "if-rk4",
        }
    }
}

/// Time grid and output cadence of a marched solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarchConfig {
    pub t_end: f64,
    pub dt: f64,
    pub integrator: Integrator,
    /// Keep every `save_every`-th step (the final state is always kept).
    pub save_every: usize,
    /// Switch the nonlinearity off, leaving pure heat flow.
    pub linear_only: bool,
}

impl MarchConfig {
    pub fn new(t_end: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!("final time must be nonnegative, got {t_end}")));
        }
        Ok(Self { t_end, dt, integrator: Integrator::default(), save_every: 1, linear_only: false })
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_save_every(mut self, every: usize) -> Self {
        self.save_every = every.max(1);
        self
    }

    pub fn linear(mut self) -> Self {
        self.linear_only = true;
        self
    }

    /// Number of steps; `dt` is shrunk slightly when it does not divide `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn step_size(&self) -> f64 {
        let n = self.steps();
        if n == 0 {
            self.dt
        } else {
            self.t_end / n as f64
        }
    }
}

fn march(
    u0: &SpectralVectorField,
    cfg: &LansConfig,
    mcfg: &MarchConfig,
    equation: Equation,
    nonlinear: &dyn Fn(&SpectralVectorField, f64) -> Result<SpectralVectorField>,
) -> Result<Trajectory> {
    require_grid(u0, cfg)?;
    require_solenoidal(u0)?;
    let steps = mcfg.steps();
    let h = mcfg.step_size();
    let grid = cfg.grid;
    let nu = cfg.nu;
    let prop = |f: &SpectralVectorField, t: f64| f.apply_multiplier(|flat| (-nu * t * grid.wavenumber_sq(flat)).exp());
    let rhs = |u: &SpectralVectorField, t: f64| -> Result<SpectralVectorField> {
        if mcfg.linear_only {
            Ok(u.zeroed())
        } else {
            nonlinear(u, t)
        }
    };

    let mut u = leray_project(&dealias(u0));
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    for step in 0..steps {
        let t = step as f64 * h;
        let next = if mcfg.linear_only {
            prop(&u, h)
        } else {
            match mcfg.integrator {
                Integrator::IfHeun => {
                    let k1 = rhs(&u, t)?;
                    let pred = prop(&u.combine(1.0, &k1, h)?, h);
                    let k2 = rhs(&pred, t + h)?;
                    let mut out = prop(&u.combine(1.0, &k1, 0.5 * h)?, h);
                    out.add_scaled(0.5 * h, &k2)?;
                    out
                }
                Integrator::IfRk4 => {
                    let k1 = rhs(&u, t)?;
                    let a = prop(&u.combine(1.0, &k1, 0.5 * h)?, 0.5 * h);
                    let k2 = rhs(&a, t + 0.5 * h)?;
                    let mut b = prop(&u, 0.5 * h);
                    b.add_scaled(0.5 * h, &k2)?;
                    let k3 = rhs(&b, t + 0.5 * h)?;
                    let mut c = prop(&u, h);
                    c.add_scaled(h, &prop(&k3, 0.5 * h))?;
                    let k4 = rhs(&c, t + h)?;
                    let mut out = prop(&u, h);
                    out.add_scaled(h / 6.0, &prop(&k1, h))?;
                    out.add_scaled(h / 3.0, &prop(&k2.combine(1.0, &k3, 1.0)?, 0.5 * h))?;
                    out.add_scaled(h / 6.0, &k4)?;
                    out
                }
            }
        };
        u = if mcfg.linear_only { next } else { leray_project(&dealias(&next)) };
        if !u.is_finite() {
            return Err(Error::NonFinite { step: step + 1 });
        }
        if (step + 1) % mcfg.save_every == 0 || step + 1 == steps {
            times.push((step + 1) as f64 * h);
            states.push(u.clone());
        }
    }
    let provenance = Provenance {
        equation,
        alpha: cfg.alpha,
        nu: cfg.nu,
        points_per_axis: grid.points_per_axis(),
        dim: grid.dim(),
        dt: h,
        method: mcfg.integrator.name().to_string(),
    };
    Trajectory::new(times, states, provenance)
}

/// March the LANS-α equation from `w0`.
pub fn solve_lans(w0: &SpectralVectorField, cfg: &LansConfig, mcfg: &MarchConfig) -> Result<Trajectory> {
    march(w0, cfg, mcfg, Equation::Lans, &|u, _| nonlinear_term(u, None, cfg))
}

/// March the modified equation for `u` driven by a stored background `v`.
pub fn solve_mlans(u0: &SpectralVectorField, v: &Trajectory, cfg: &LansConfig, mcfg: &MarchConfig) -> Result<Trajectory> {
    if v.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    march(u0, cfg, mcfg, Equation::Mlans, &|u, t| {
        let vt = v.state_at(t)?;
        nonlinear_term(u, Some(&vt), cfg)
    })
}

/// Duhamel quadrature on the uniform time grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    #[default]
    Trapezoid,
    LeftEndpoint,
}

/// Settings for the mild-solution fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MildSolverConfig {
    pub t_end: f64,
    pub dt: f64,
    pub quadrature: Quadrature,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    /// Time weight exponent `a` of the weighted norm.
    pub weight_a: f64,
    /// `(s, p, q)` of the weighted norm; the unweighted part uses `(n/p, p, q)`.
    pub weight_index: BesovIndex,
    pub contraction_target: f64,
}

impl MildSolverConfig {
    /// Configuration with the critical weight `a = (s - n/p)/2`.
    pub fn critical(t_end: f64, dt: f64, dim: usize, weight_index: BesovIndex) -> Result<Self> {
        let a = (weight_index.s - dim as f64 / weight_index.p) / 2.0;
        let cfg = Self {
            t_end,
            dt,
            quadrature: Quadrature::Trapezoid,
            picard_tol: 1e-10,
            picard_max_iters: 40,
            weight_a: a,
            weight_index,
            contraction_target: 0.5,
        };
        cfg.validate(dim)?;
        Ok(cfg)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.dt > 0.0 && self.t_end > 0.0) {
            return Err(Error::InvalidParameter("mild solver needs dt > 0 and t_end > 0".into()));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::InvalidParameter("Picard tolerance must be positive".into()));
        }
        if self.weight_a < 0.0 {
            return Err(Error::InvalidParameter(format!("weight exponent must be nonnegative, got {}", self.weight_a)));
        }
        let expect = (self.weight_index.s - dim as f64 / self.weight_index.p) / 2.0;
        if (expect - self.weight_a).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "weight exponent {} does not match (s - n/p)/2 = {expect}",
                self.weight_a
            )));
        }
        Ok(())
    }

    fn base_index(&self, dim: usize) -> BesovIndex {
        BesovIndex { s: dim as f64 / self.weight_index.p, p: self.weight_index.p, q: self.weight_index.q }
    }

    fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize
    }
}

/// One Picard iterate's bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationState {
    pub iterate_index: usize,
    /// Weighted-norm distance to the previous iterate (zero for the first).
    pub delta_norm: f64,
    pub e_norm: f64,
    /// `delta_norm` over the previous one, from the second increment on.
    pub contraction_ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub trajectory: Trajectory,
    pub history: Vec<IterationState>,
}

/// `sup_{0 < t <= T} t^a ‖f(t)‖_{B^s_{p,q}}` over stored nodes; `t = 0` counts when `a = 0`.
pub fn weighted_norm(traj: &Trajectory, a: f64, index: BesovIndex, t_end: f64, partition: &DyadicPartition) -> Result<f64> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mut sup: f64 = 0.0;
    for (&t, s) in traj.times().iter().zip(traj.states()) {
        if t > t_end + TIME_MATCH || (t == 0.0 && a > 0.0) {
            continue;
        }
        let w = if a == 0.0 { 1.0 } else { t.powf(a) };
        sup = sup.max(w * partition.besov_norm(s, index)?);
    }
    Ok(sup)
}

/// `sup_t ‖f(t) - e^{νtΔ}u0‖_{B^{n/p}_{p,q}} + sup_t t^a ‖f(t)‖_{B^s_{p,q}}`.
pub fn e_norm(
    traj: &Trajectory,
    u0: &SpectralVectorField,
    nu: f64,
    mcfg: &MildSolverConfig,
    partition: &DyadicPartition,
) -> Result<f64> {
    let dim = u0.grid().dim();
    let base = mcfg.base_index(dim);
    let mut sup: f64 = 0.0;
    for (&t, s) in traj.times().iter().zip(traj.states()) {
        let d = s.combine(1.0, &heat_propagate(u0, nu * t)?, -1.0)?;
        sup = sup.max(partition.besov_norm(&d, base)?);
    }
    Ok(sup + weighted_norm(traj, mcfg.weight_a, mcfg.weight_index, mcfg.t_end, partition)?)
}

/// The same two-part norm applied to the difference of two trajectories.
fn e_distance(a: &Trajectory, b: &Trajectory, mcfg: &MildSolverConfig, partition: &DyadicPartition) -> Result<f64> {
    let dim = a.grid().dim();
    let base = mcfg.base_index(dim);
    let mut sup_base: f64 = 0.0;
    let mut sup_weighted: f64 = 0.0;
    for ((&t, x), y) in a.times().iter().zip(a.states()).zip(b.states()) {
        let d = x.combine(1.0, y, -1.0)?;
        sup_base = sup_base.max(partition.besov_norm(&d, base)?);
        if t > 0.0 || mcfg.weight_a == 0.0 {
            let w = if mcfg.weight_a == 0.0 { 1.0 } else { t.powf(mcfg.weight_a) };
            sup_weighted = sup_weighted.max(w * partition.besov_norm(&d, mcfg.weight_index)?);
        }
    }
    Ok(sup_base + sup_weighted)
}

fn heat_trajectory(u0: &SpectralVectorField, cfg: &LansConfig, mcfg: &MildSolverConfig, equation: Equation) -> Result<Trajectory> {
    let steps = mcfg.steps();
    let h = mcfg.t_end / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    let states = times.iter().map(|&t| heat_propagate(u0, cfg.nu * t)).collect::<Result<Vec<_>>>()?;
    Trajectory::new(times, states, mild_provenance(cfg, mcfg, equation))
}

fn mild_provenance(cfg: &LansConfig, mcfg: &MildSolverConfig, equation: Equation) -> Provenance {
    let steps = mcfg.steps();
    Provenance {
        equation,
        alpha: cfg.alpha,
        nu: cfg.nu,
        points_per_axis: cfg.grid.points_per_axis(),
        dim: cfg.grid.dim(),
        dt: mcfg.t_end / steps as f64,
        method: match mcfg.quadrature {
            Quadrature::Trapezoid => "picard-trapezoid".into(),
            Quadrature::LeftEndpoint => "picard-left".into(),
        },
    }
}

/// One application of the mild map
/// `Φ(u)(t) = e^{νtΔ}u0 + ∫_0^t e^{ν(t-s)Δ} N(u(s), v(s)) ds` on the nodes of `iterate`.
pub fn mild_map(
    iterate: &Trajectory,
    u0: &SpectralVectorField,
    v: Option<&Trajectory>,
    cfg: &LansConfig,
    mcfg: &MildSolverConfig,
) -> Result<Trajectory> {
    let times = iterate.times().to_vec();
    let grid = cfg.grid;
    let nu = cfg.nu;
    let forcing = |i: usize| -> Result<SpectralVectorField> {
        let u = &iterate.states()[i];
        match v {
            Some(v) => nonlinear_term(u, Some(&v.state_at(times[i])?), cfg),
            None => nonlinear_term(u, None, cfg),
        }
    };
    let mut states = Vec::with_capacity(times.len());
    let mut duhamel = u0.zeroed();
    let mut prev = forcing(0)?;
    states.push(u0.clone());
    for i in 1..times.len() {
        let h = times[i] - times[i - 1];
        let decay = |f: &SpectralVectorField| f.apply_multiplier(|flat| (-nu * h * grid.wavenumber_sq(flat)).exp());
        let current = forcing(i)?;
        duhamel = match mcfg.quadrature {
            Quadrature::Trapezoid => {
                let mut d = decay(&duhamel.combine(1.0, &prev, 0.5 * h)?);
                d.add_scaled(0.5 * h, &current)?;
                d
            }
            Quadrature::LeftEndpoint => decay(&duhamel.combine(1.0, &prev, h)?),
        };
        let mut state = heat_propagate(u0, nu * times[i])?;
        state.add_scaled(1.0, &duhamel)?;
        if !state.is_finite() {
            return Err(Error::NonFinite { step: i });
        }
        states.push(state);
        prev = current;
    }
    Trajectory::new(times, states, iterate.provenance().clone())
}

/// Picard iteration `u^{(m+1)} = Φ(u^{(m)})` from the heat flow of `u0`.
///
/// Stops once the increment drops below `picard_tol`. From the second
/// increment on, a ratio of successive increments above `contraction_target`
/// aborts with [`PicardFailureKind::NotContractive`].
pub fn picard_iterate(
    u0: &SpectralVectorField,
    v: Option<&Trajectory>,
    cfg: &LansConfig,
    mcfg: &MildSolverConfig,
    partition: &DyadicPartition,
) -> Result<PicardOutcome> {
    require_grid(u0, cfg)?;
    require_solenoidal(u0)?;
    mcfg.validate(cfg.grid.dim())?;
    if let Some(v) = v {
        if v.grid() != &cfg.grid {
            return Err(Error::GridMismatch);
        }
    }
    let equation = if v.is_some() { Equation::Mlans } else { Equation::Lans };
    let mut current = heat_trajectory(u0, cfg, mcfg, equation)?;
    let mut history = vec![IterationState {
        iterate_index: 0,
        delta_norm: 0.0,
        e_norm: e_norm(&current, u0, cfg.nu, mcfg, partition)?,
        contraction_ratio: None,
    }];
    let mut last_delta = f64::NAN;
    for m in 1..=mcfg.picard_max_iters {
        let next = match mild_map(&current, u0, v, cfg, mcfg) {
            Ok(t) => t,
            Err(Error::NonFinite { .. }) => {
                return Err(Error::Picard { kind: PicardFailureKind::NonFinite, iterate: m, ratio: f64::INFINITY, increment: f64::INFINITY })
            }
            Err(e) => return Err(e),
        };
        let delta = e_distance(&next, &current, mcfg, partition)?;
        let ratio = (m >= 2).then(|| if last_delta > 0.0 { delta / last_delta } else { 0.0 });
        if !delta.is_finite() {
            return Err(Error::Picard { kind: PicardFailureKind::NonFinite, iterate: m, ratio: f64::INFINITY, increment: delta });
        }
        history.push(IterationState {
            iterate_index: m,
            delta_norm: delta,
            e_norm: e_norm(&next, u0, cfg.nu, mcfg, partition)?,
            contraction_ratio: ratio,
        });
        current = next;
        if delta < mcfg.picard_tol {
            return Ok(PicardOutcome { trajectory: current, history });
        }
        if let Some(r) = ratio {
            if r > mcfg.contraction_target {
                return Err(Error::Picard { kind: PicardFailureKind::NotContractive, iterate: m, ratio: r, increment: delta });
            }
        }
        last_delta = delta;
    }
    let ratio = history.last().and_then(|s| s.contraction_ratio).unwrap_or(f64::NAN);
    Err(Error::Picard { kind: PicardFailureKind::MaxIterations, iterate: mcfg.picard_max_iters, ratio, increment: last_delta })
}

/// Distance between two trajectories in the two-part weighted norm.
pub fn trajectory_distance(a: &Trajectory, b: &Trajectory, mcfg: &MildSolverConfig, partition: &DyadicPartition) -> Result<f64> {
    if a.len() != b.len() || a.times().iter().zip(b.times()).any(|(x, y)| (x - y).abs() > TIME_MATCH) {
        return Err(Error::InvalidParameter("trajectories have different time grids".into()));
    }
    e_distance(a, b, mcfg, partition)
}

