use std::path::Path;

use anyhow::Context;
use lanslab_core::dynamics::{Integrator, LansConfig, MildSolverConfig, Quadrature};
use lanslab_core::{BesovIndex, TorusGrid};
use serde::{Deserialize, Serialize};

/// Every run parameter; read from a flat TOML table and overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    pub points_per_axis: usize,
    pub box_length: f64,
    pub dealias_fraction: f64,
    pub alpha: f64,
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub integrator: Integrator,
    /// Keep every `save_every`-th step of a solve.
    pub save_every: usize,
    /// Spectral decay exponent of random initial data.
    pub decay: f64,
    /// Sup norm of the initial data.
    pub amplitude: f64,
    /// Sup norm of the background field of an mLANS solve.
    pub background_amplitude: f64,
    /// Ensemble size of the inequality checks.
    pub members: usize,
    /// Random pairs per product-estimate case.
    pub pairs: usize,
    pub p: f64,
    pub p_tilde: f64,
    pub epsilon: f64,
    pub q: f64,
    pub j_cut: usize,
    pub reference_refinement: usize,
    pub tolerance_factor: f64,
    /// Run the Picard check inside `pipeline`.
    pub picard: bool,
    pub quadrature: Quadrature,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub contraction_target: f64,
    /// Regularity `s` of the weighted norm; its integrability is 2.
    pub weight_s: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            points_per_axis: 32,
            box_length: std::f64::consts::TAU,
            dealias_fraction: 2.0 / 3.0,
            alpha: 0.1,
            nu: 0.05,
            dt: 1e-3,
            t_end: 0.05,
            seed: 0,
            integrator: Integrator::IfHeun,
            save_every: 10,
            decay: 2.0,
            amplitude: 0.01,
            background_amplitude: 0.01,
            members: 6,
            pairs: 20,
            p: 6.0,
            p_tilde: 30.0,
            epsilon: 1e-3,
            q: 2.0,
            j_cut: 0,
            reference_refinement: 4,
            tolerance_factor: 10.0,
            picard: true,
            quadrature: Quadrature::Trapezoid,
            picard_tol: 1e-10,
            picard_max_iters: 40,
            contraction_target: 0.5,
            weight_s: 2.5,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))
            }
        }
    }

    pub fn grid(&self) -> lanslab_core::Result<TorusGrid> {
        TorusGrid::new(self.dim, self.points_per_axis)?
            .with_box_length(self.box_length)?
            .with_dealias_fraction(self.dealias_fraction)
    }

    pub fn lans(&self) -> lanslab_core::Result<LansConfig> {
        LansConfig::new(self.alpha, self.nu, self.grid()?)
    }

    pub fn mild(&self) -> lanslab_core::Result<MildSolverConfig> {
        let index = BesovIndex::new(self.weight_s, 2.0, self.q)?;
        let mut m = MildSolverConfig::critical(self.t_end, self.dt, self.dim, index)?;
        m.quadrature = self.quadrature;
        m.picard_tol = self.picard_tol;
        m.picard_max_iters = self.picard_max_iters;
        m.contraction_target = self.contraction_target;
        m.validate(self.dim)?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let c: RunConfig = toml::from_str("alpha = 0.3\nintegrator = \"if-rk4\"\n").unwrap();
        assert_eq!(c.alpha, 0.3);
        assert_eq!(c.integrator, Integrator::IfRk4);
        assert_eq!(c.points_per_axis, 32);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("alpah = 0.3").is_err());
    }
}
