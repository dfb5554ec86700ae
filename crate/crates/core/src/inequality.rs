//! Numerical checks of the Littlewood-Paley inequalities: exponent fits on
//! saturating ensembles, constant stability under refinement, and reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ensemble::{coherent_power_law, random_scalar, rng, shell_bump, Spectrum};
use crate::error::{Error, ProductCondition, Result};
use crate::field::{Field, ScalarField};
use crate::grid::TorusGrid;
use crate::lp::{BesovIndex, DyadicPartition, Profile};
use crate::spectral::{bessel_potential_norm, check_exponent, laplacian_power, lp_norm, samples_to_field, sobolev_norm};

/// Relative tolerance on fitted Bernstein slopes.
pub const BERNSTEIN_SLOPE_TOL: f64 = 0.05;
/// Relative tolerance on fitted heat-smoothing exponents.
pub const HEAT_EXPONENT_TOL: f64 = 0.10;
/// Fits with a lower coefficient of determination are inconclusive.
pub const MIN_R_SQUARED: f64 = 0.98;
/// Allowed growth of a fitted constant from `N/2` to `N`.
pub const REFINEMENT_GROWTH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Fail dominates inconclusive, which dominates pass.
    pub fn worst(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts.into_iter().fold(Verdict::Pass, |acc, v| match (acc, v) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        })
    }
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<ExponentFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter("a line fit needs at least two paired samples".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("abscissae of a line fit must not all coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    // a flat series is fitted perfectly by a flat line
    let r_squared = if syy <= 1e-24 * (1.0 + my * my) { 1.0 } else { 1.0 - ss_res / syy };
    Ok(ExponentFit { slope, intercept, r_squared })
}

/// One measured point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Shell index, `log t`, or ensemble member, depending on the check.
    pub x: f64,
    pub y: f64,
}

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub case: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub points_per_axis: usize,
    pub predicted: Option<f64>,
    pub fit: Option<ExponentFit>,
    /// Largest ratio over the ensemble on the `N/2` grid.
    pub constant_coarse: Option<f64>,
    /// Largest ratio over the ensemble on the `N` grid.
    pub constant_fine: Option<f64>,
    /// Smallest ratio, for two-sided statements.
    pub lower_constant: Option<f64>,
    pub samples: Vec<Sample>,
    pub verdict: Verdict,
    pub detail: String,
}

impl InequalityReport {
    fn new(case: &str, seed: u64, points: usize) -> Self {
        Self {
            case: case.to_string(),
            parameters: BTreeMap::new(),
            seed,
            points_per_axis: points,
            predicted: None,
            fit: None,
            constant_coarse: None,
            constant_fine: None,
            lower_constant: None,
            samples: Vec::new(),
            verdict: Verdict::Inconclusive,
            detail: String::new(),
        }
    }

    fn param(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), exponent_value(value));
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Samples as `x,y` rows with a header.
    pub fn samples_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:.17e},{:.17e}", s.x, s.y);
        }
        out
    }

    fn refinement_ok(&self) -> bool {
        match (self.constant_coarse, self.constant_fine) {
            (Some(c), Some(f)) => f.is_finite() && c > 0.0 && f / c < REFINEMENT_GROWTH && c / f < REFINEMENT_GROWTH,
            _ => false,
        }
    }
}

/// Infinite exponents are written as the string `"inf"`.
pub fn exponent_value(x: f64) -> Value {
    if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        serde_json::json!(x)
    }
}

fn slope_within(measured: f64, predicted: f64, rel: f64) -> bool {
    (measured - predicted).abs() <= rel * predicted.abs().max(1.0)
}

fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn coarse_grid(grid: &TorusGrid) -> Option<TorusGrid> {
    grid.with_points(grid.points_per_axis() / 2).ok()
}

/// Per-level extreme ratios `‖|∇|^β g‖_q / ‖g‖_p` and `‖|∇|^β g‖_p / ‖g‖_p` over shell bumps.
fn bernstein_levels(grid: &TorusGrid, p: f64, q: f64, beta: f64, seed: u64, members: usize) -> Result<Vec<(usize, f64, f64)>> {
    let partition = DyadicPartition::new(*grid, Profile::Smooth);
    let mut r = rng(seed);
    let mut out = Vec::new();
    for j in 1..=partition.full_levels() {
        let mut upper: f64 = 0.0;
        let mut lower = f64::INFINITY;
        for _ in 0..members {
            let g = shell_bump(&partition, j, &mut r)?;
            let dg = laplacian_power(&g, beta)?;
            let base = lp_norm(&g, p)?;
            upper = upper.max(lp_norm(&dg, q)? / base);
            lower = lower.min(lp_norm(&dg, p)? / base);
        }
        out.push((j, upper, lower));
    }
    Ok(out)
}

/// Bernstein inequality on dyadic shells: `‖|∇|^β g‖_q ≲ 2^{j(β + n(1/p - 1/q))} ‖g‖_p`
/// for `g` with spectrum in shell `j`, and `‖|∇|^β g‖_p ≳ 2^{jβ} ‖g‖_p`.
///
/// The slope is fitted over the shells fully inside `grid`; the constant is
/// compared with the same ensemble on the grid with half the resolution.
pub fn verify_bernstein(p: f64, q: f64, beta: f64, grid: &TorusGrid, seed: u64, members: usize) -> Result<InequalityReport> {
    check_exponent(p)?;
    check_exponent(q)?;
    if q < p {
        return Err(Error::InvalidParameter(format!("Bernstein needs q >= p, got p = {p}, q = {q}")));
    }
    let n = grid.dim() as f64;
    let predicted = beta + n * (recip(p) - recip(q));
    let mut report = InequalityReport::new("bernstein", seed, grid.points_per_axis())
        .param("p", p)
        .param("q", q)
        .param("beta", beta);
    report.predicted = Some(predicted);

    let fine = bernstein_levels(grid, p, q, beta, seed, members)?;
    if fine.len() < 3 {
        report.detail = format!("only {} fully resolved shells; need 3", fine.len());
        return Ok(report);
    }
    let xs: Vec<f64> = fine.iter().map(|l| l.0 as f64).collect();
    let ys: Vec<f64> = fine.iter().map(|l| l.1.log2()).collect();
    let fit = fit_line(&xs, &ys)?;
    report.samples = xs.iter().zip(&ys).map(|(&x, &y)| Sample { x, y }).collect();
    report.fit = Some(fit);
    let constant = |levels: &[(usize, f64, f64)]| levels.iter().map(|l| l.1 / 2f64.powf(l.0 as f64 * predicted)).fold(0.0, f64::max);
    report.constant_fine = Some(constant(&fine));
    report.lower_constant = Some(fine.iter().map(|l| l.2 / 2f64.powf(l.0 as f64 * beta)).fold(f64::INFINITY, f64::min));
    if let Some(cg) = coarse_grid(grid) {
        let coarse = bernstein_levels(&cg, p, q, beta, seed, members)?;
        if !coarse.is_empty() {
            report.constant_coarse = Some(constant(&coarse));
        }
    }

    report.verdict = if fit.r_squared < MIN_R_SQUARED {
        report.detail = format!("fit r² = {:.4} below {MIN_R_SQUARED}", fit.r_squared);
        Verdict::Inconclusive
    } else if !slope_within(fit.slope, predicted, BERNSTEIN_SLOPE_TOL) {
        report.detail = format!("slope {:.4} vs predicted {predicted:.4}", fit.slope);
        Verdict::Fail
    } else if !report.refinement_ok() {
        report.detail = "constant not stable under refinement".into();
        Verdict::Fail
    } else if report.lower_constant.is_some_and(|c| !(c > 0.0)) {
        report.detail = "lower bound degenerates".into();
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok(report)
}

/// Regularity and integrability of the heat-smoothing estimate
/// `‖e^{tΔ}f‖_{B^{s2}_{p2,q}} ≲ t^{-(s2 - s1 + n(1/p1 - 1/p2))/2} ‖f‖_{B^{s1}_{p1,q}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatCase {
    pub s1: f64,
    pub p1: f64,
    pub s2: f64,
    pub p2: f64,
    pub q: f64,
}

impl HeatCase {
    pub fn validate(&self) -> Result<()> {
        check_exponent(self.p1)?;
        check_exponent(self.p2)?;
        check_exponent(self.q)?;
        if self.s2 < self.s1 || self.p2 < self.p1 {
            return Err(Error::InvalidParameter("heat smoothing needs s2 >= s1 and p2 >= p1".into()));
        }
        Ok(())
    }

    pub fn predicted_exponent(&self, dim: usize) -> f64 {
        -(self.s2 - self.s1 + dim as f64 * (recip(self.p1) - recip(self.p2))) / 2.0
    }

    /// Data that saturates the estimate: a coherent profile at the critical
    /// decay for `B^{s1}_{p1,∞}`.
    pub fn saturating_data(&self, grid: &TorusGrid) -> ScalarField {
        let n = grid.dim() as f64;
        coherent_power_law(grid, self.s1 + n - n * recip(self.p1))
    }
}

/// Log-spaced times between the smallest resolved diffusion time of `grid` and `3e-2`.
pub fn default_heat_times(grid: &TorusGrid) -> Vec<f64> {
    let k = grid.wavenumber_unit() * (grid.points_per_axis() / 2) as f64;
    let lo = (0.75 / (k * k)).min(3e-3);
    let hi: f64 = 3e-2;
    let count = 10;
    (0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect()
}

/// Fit the decay exponent of `‖e^{tΔ}f‖_{B^{s2}_{p2,q}}` against `t`.
pub fn verify_heat_smoothing(case: &HeatCase, f: &ScalarField, times: &[f64], seed: u64) -> Result<InequalityReport> {
    case.validate()?;
    let grid = *f.grid();
    let partition = DyadicPartition::new(grid, Profile::Smooth);
    let predicted = case.predicted_exponent(grid.dim());
    let mut report = InequalityReport::new("heat_smoothing", seed, grid.points_per_axis())
        .param("s1", case.s1)
        .param("p1", case.p1)
        .param("s2", case.s2)
        .param("p2", case.p2)
        .param("q", case.q);
    report.predicted = Some(predicted);
    if times.len() < 3 || times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParameter("heat smoothing needs at least three positive times".into()));
    }
    let target = BesovIndex::new(case.s2, case.p2, case.q)?;
    let data_norm = partition.besov_norm(f, BesovIndex::new(case.s1, case.p1, case.q)?)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut values = Vec::new();
    for &t in times {
        let v = partition.besov_norm(&crate::dynamics::heat_propagate(f, t)?, target)?;
        xs.push(t.ln());
        ys.push(v.ln());
        values.push(v);
    }
    let fit = fit_line(&xs, &ys)?;
    report.fit = Some(fit);
    report.samples = xs.iter().zip(&ys).map(|(&x, &y)| Sample { x, y }).collect();
    report.constant_fine = Some(
        times
            .iter()
            .zip(&values)
            .map(|(t, v)| v * t.powf(-predicted) / data_norm)
            .fold(0.0, f64::max),
    );
    if grid.points_per_axis() < 32 {
        report.detail = "grid too coarse to resolve the smoothing range".into();
        return Ok(report);
    }
    let monotone = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    report.verdict = if predicted == 0.0 {
        if monotone && fit.slope.abs() <= 0.05 {
            Verdict::Pass
        } else {
            report.detail = format!("slope {:.4}; monotone {monotone}", fit.slope);
            Verdict::Fail
        }
    } else if fit.r_squared < MIN_R_SQUARED {
        report.detail = format!("fit r² = {:.4} below {MIN_R_SQUARED}", fit.r_squared);
        Verdict::Inconclusive
    } else if (fit.slope - predicted).abs() <= HEAT_EXPONENT_TOL * predicted.abs() {
        Verdict::Pass
    } else {
        report.detail = format!("exponent {:.4} vs predicted {predicted:.4}", fit.slope);
        Verdict::Fail
    };
    Ok(report)
}

/// `sup_{0 < t <= T} t^{-σ} ‖e^{tΔ}f‖_{B^{s2}_{p2,q}}` with `σ` the predicted
/// exponent, over `samples` log-spaced times down to `T·1e-6`.
pub fn heat_smoothing_sup(case: &HeatCase, f: &ScalarField, t_max: f64, samples: usize) -> Result<f64> {
    case.validate()?;
    let grid = *f.grid();
    let partition = DyadicPartition::new(grid, Profile::Smooth);
    let sigma = case.predicted_exponent(grid.dim());
    let target = BesovIndex::new(case.s2, case.p2, case.q)?;
    let samples = samples.max(2);
    let lo = t_max * 1e-6;
    let mut sup: f64 = 0.0;
    for i in 0..samples {
        let t = lo * (t_max / lo).powf(i as f64 / (samples - 1) as f64);
        let v = partition.besov_norm(&crate::dynamics::heat_propagate(f, t)?, target)?;
        sup = sup.max(t.powf(-sigma) * v);
    }
    Ok(sup)
}

/// Indices of the bilinear estimate
/// `‖fg‖_{B^s_{p,q}} ≲ ‖f‖_{B^{s1}_{p1,q}} ‖g‖_{B^{s2}_{p2,q}}`, `s = s1 + s2 - n(1/p1 + 1/p2 - 1/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductCase {
    pub s1: f64,
    pub p1: f64,
    pub s2: f64,
    pub p2: f64,
    pub p: f64,
    pub q: f64,
}

impl ProductCase {
    pub fn check(&self, dim: usize) -> Result<f64> {
        for e in [self.p1, self.p2, self.p, self.q] {
            check_exponent(e)?;
        }
        let n = dim as f64;
        if self.s1 >= n * recip(self.p1) {
            return Err(Error::ProductHypothesis(ProductCondition::FirstRegularity));
        }
        if self.s2 >= n * recip(self.p2) {
            return Err(Error::ProductHypothesis(ProductCondition::SecondRegularity));
        }
        if self.s1 + self.s2 <= 0.0 {
            return Err(Error::ProductHypothesis(ProductCondition::PositiveSum));
        }
        if recip(self.p) > recip(self.p1) + recip(self.p2) + 1e-15 {
            return Err(Error::ProductHypothesis(ProductCondition::Integrability));
        }
        Ok(self.s1 + self.s2 - n * (recip(self.p1) + recip(self.p2) - recip(self.p)))
    }
}

/// Largest ratio of the product estimate over random pairs band-limited to
/// `|k|_∞ < N/4`, so that grid products are exact.
fn product_constant(case: &ProductCase, s: f64, grid: &TorusGrid, seed: u64, pairs: usize) -> Result<f64> {
    let partition = DyadicPartition::new(*grid, Profile::Smooth);
    let mut r = rng(seed);
    let cutoff = (grid.points_per_axis() / 4 - 1) as f64;
    let left = BesovIndex::new(case.s1, case.p1, case.q)?;
    let right = BesovIndex::new(case.s2, case.p2, case.q)?;
    let target = BesovIndex::new(s, case.p, case.q)?;
    let mut worst: f64 = 0.0;
    for i in 0..pairs {
        // alternate smooth and rough spectra
        let decay_f = [0.5, 1.5, 2.5, 3.5][i % 4];
        let decay_g = [2.5, 0.5, 3.5, 1.5][(i / 4) % 4];
        let f = random_scalar(grid, &mut r, &Spectrum::new(decay_f, cutoff));
        let g = random_scalar(grid, &mut r, &Spectrum::new(decay_g, cutoff));
        let prod: Vec<f64> = f.to_physical().iter().zip(g.to_physical()).map(|(a, b)| a * b).collect();
        let fg = samples_to_field(grid, prod);
        let denom = partition.besov_norm(&f, left)? * partition.besov_norm(&g, right)?;
        if denom > 0.0 {
            worst = worst.max(partition.besov_norm(&fg, target)? / denom);
        }
    }
    Ok(worst)
}

/// Bilinear product estimate: hypotheses checked, constant measured on `N/2`
/// and `N` over `pairs` random pairs.
pub fn verify_product_estimate(case: &ProductCase, grid: &TorusGrid, seed: u64, pairs: usize) -> Result<InequalityReport> {
    let s = case.check(grid.dim())?;
    let mut report = InequalityReport::new("product_estimate", seed, grid.points_per_axis())
        .param("s1", case.s1)
        .param("p1", case.p1)
        .param("s2", case.s2)
        .param("p2", case.p2)
        .param("p", case.p)
        .param("q", case.q)
        .param("s", s);
    let Some(cg) = coarse_grid(grid).filter(|g| g.points_per_axis() >= 16) else {
        report.detail = "grid too coarse for a refinement comparison".into();
        return Ok(report);
    };
    report.constant_coarse = Some(product_constant(case, s, &cg, seed, pairs)?);
    report.constant_fine = Some(product_constant(case, s, grid, seed, pairs)?);
    report.verdict = if report.refinement_ok() {
        Verdict::Pass
    } else {
        report.detail = format!("constant moved from {:?} to {:?}", report.constant_coarse, report.constant_fine);
        Verdict::Fail
    };
    Ok(report)
}

/// The embedding statements checked by [`verify_embedding`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingCase {
    /// `‖f‖_{B^{s}_{p,q2}} <= ‖f‖_{B^{s}_{p,q1}}` for `q1 <= q2`.
    SummabilityIndex { s: f64, p: f64, q1: f64, q2: f64 },
    /// `‖f‖_{B^{s}_{p2,q}} ≲ ‖f‖_{B^{s + n(1/p1 - 1/p2)}_{p1,q}}` for `p1 <= p2`.
    Integrability { s: f64, p1: f64, p2: f64, q: f64 },
    /// `‖f‖_{H^{s,p}} ≲ ‖f‖_{B^r_{p,q}}` for `s < r`.
    BesselBelowBesov { s: f64, r: f64, p: f64, q: f64 },
    /// `‖f‖_{H^{s,2}}` comparable to `‖f‖_{B^s_{2,2}}`.
    SobolevEquivalence { s: f64 },
}

fn embedding_ratio(case: &EmbeddingCase, f: &ScalarField, partition: &DyadicPartition) -> Result<f64> {
    let n = f.grid().dim() as f64;
    Ok(match *case {
        EmbeddingCase::SummabilityIndex { s, p, q1, q2 } => {
            partition.besov_norm(f, BesovIndex::new(s, p, q2)?)? / partition.besov_norm(f, BesovIndex::new(s, p, q1)?)?
        }
        EmbeddingCase::Integrability { s, p1, p2, q } => {
            let s1 = s + n * (recip(p1) - recip(p2));
            partition.besov_norm(f, BesovIndex::new(s, p2, q)?)? / partition.besov_norm(f, BesovIndex::new(s1, p1, q)?)?
        }
        EmbeddingCase::BesselBelowBesov { s, r, p, q } => {
            bessel_potential_norm(f, s, p)? / partition.besov_norm(f, BesovIndex::new(r, p, q)?)?
        }
        EmbeddingCase::SobolevEquivalence { s } => {
            sobolev_norm(f, s, false) / partition.besov_norm(f, BesovIndex::new(s, 2.0, 2.0)?)?
        }
    })
}

fn embedding_extremes(case: &EmbeddingCase, grid: &TorusGrid, seed: u64, members: usize) -> Result<(f64, f64)> {
    let partition = DyadicPartition::new(*grid, Profile::Smooth);
    let mut r = rng(seed);
    let mut hi: f64 = 0.0;
    let mut lo = f64::INFINITY;
    for i in 0..members {
        let decay = 0.5 + 3.0 * (i % 7) as f64 / 6.0;
        let f = if i % 3 == 2 {
            // single shells probe the sharp end of each statement
            let levels = partition.full_levels().max(1);
            shell_bump(&partition, 1 + i % levels, &mut r)?
        } else {
            random_scalar(grid, &mut r, &Spectrum::dealiased(grid, decay))
        };
        let ratio = embedding_ratio(case, &f, &partition)?;
        hi = hi.max(ratio);
        lo = lo.min(ratio);
    }
    Ok((hi, lo))
}

/// Besov and Sobolev embeddings: the ensemble maximum of each left/right ratio
/// must be finite and stable under refinement.
pub fn verify_embedding(case: &EmbeddingCase, grid: &TorusGrid, seed: u64, members: usize) -> Result<InequalityReport> {
    match *case {
        EmbeddingCase::SummabilityIndex { p, q1, q2, .. } => {
            check_exponent(p)?;
            if q1 > q2 {
                return Err(Error::InvalidParameter("summability embedding needs q1 <= q2".into()));
            }
        }
        EmbeddingCase::Integrability { p1, p2, q, .. } => {
            check_exponent(q)?;
            if p1 > p2 {
                return Err(Error::InvalidParameter("integrability embedding needs p1 <= p2".into()));
            }
        }
        EmbeddingCase::BesselBelowBesov { s, r, .. } => {
            if s >= r {
                return Err(Error::InvalidParameter("Bessel embedding needs s < r".into()));
            }
        }
        EmbeddingCase::SobolevEquivalence { .. } => {}
    }
    let mut report = InequalityReport::new("embedding", seed, grid.points_per_axis());
    report.parameters.insert("case".into(), serde_json::to_value(case)?);
    let Some(cg) = coarse_grid(grid).filter(|g| g.points_per_axis() >= 16) else {
        report.detail = "grid too coarse for a refinement comparison".into();
        return Ok(report);
    };
    let (hi_c, _) = embedding_extremes(case, &cg, seed, members)?;
    let (hi_f, lo_f) = embedding_extremes(case, grid, seed, members)?;
    report.constant_coarse = Some(hi_c);
    report.constant_fine = Some(hi_f);
    report.lower_constant = Some(lo_f);
    let mut ok = report.refinement_ok();
    match *case {
        EmbeddingCase::SummabilityIndex { .. } => ok &= hi_f <= 1.0 + 1e-12,
        EmbeddingCase::SobolevEquivalence { .. } => ok &= (0.25..=4.0).contains(&lo_f) && (0.25..=4.0).contains(&hi_f),
        _ => {}
    }
    report.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

/// Interpolation between `L²` and `Ḣ^{r2}`:
/// `‖f‖_{Ḣ^{r1}} <= ‖f‖_{L²}^{1-θ} ‖f‖_{Ḣ^{r2}}^θ` with `θ = r1/r2`.
pub fn verify_ladyzhenskaya(r1: f64, r2: f64, grid: &TorusGrid, seed: u64, members: usize) -> Result<InequalityReport> {
    if !(0.0 < r1 && r1 < r2) {
        return Err(Error::InvalidParameter("interpolation needs 0 < r1 < r2".into()));
    }
    let theta = r1 / r2;
    let mut report = InequalityReport::new("ladyzhenskaya", seed, grid.points_per_axis())
        .param("r1", r1)
        .param("r2", r2)
        .param("theta", theta);
    let extremes = |g: &TorusGrid| -> Result<f64> {
        let mut r = rng(seed);
        let mut hi: f64 = 0.0;
        for i in 0..members {
            let f = random_scalar(g, &mut r, &Spectrum::dealiased(g, 0.5 + (i % 5) as f64 * 0.75));
            let lhs = sobolev_norm(&f, r1, true);
            let rhs = sobolev_norm(&f, 0.0, true).powf(1.0 - theta) * sobolev_norm(&f, r2, true).powf(theta);
            if rhs > 0.0 {
                hi = hi.max(lhs / rhs);
            }
        }
        Ok(hi)
    };
    let Some(cg) = coarse_grid(grid).filter(|g| g.points_per_axis() >= 8) else {
        report.detail = "grid too coarse for a refinement comparison".into();
        return Ok(report);
    };
    report.constant_coarse = Some(extremes(&cg)?);
    report.constant_fine = Some(extremes(grid)?);
    let ok = report.refinement_ok() && report.constant_fine.is_some_and(|c| c <= 1.0 + 1e-12);
    report.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}
