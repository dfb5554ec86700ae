use std::collections::BTreeMap;
use std::path::Path;

use lanslab_core::apriori::{
    calibrate_gronwall, energy_pair, gronwall_monitor, h2_term_monitor, higher_regularity_trace, max_divergence, SplitConfig,
};
use lanslab_core::dynamics::{solve_lans, solve_mlans, Equation, LansConfig, MarchConfig, Trajectory};
use lanslab_core::ensemble::{normalized, random_solenoidal, rng, Spectrum};
use lanslab_core::inequality::Verdict;
use lanslab_core::io::save_trajectory;
use lanslab_core::pipeline::{run_pipeline, PipelineConfig};
use lanslab_core::spectral::lp_norm;
use lanslab_core::{DyadicPartition, Error, Field, Profile, SpectralVectorField, TorusGrid};
use serde::Serialize;
use serde_json::json;

use crate::artifact::{csv_table, Artifacts, RunManifest};
use crate::config::RunConfig;

pub fn initial_field(grid: &TorusGrid, seed: u64, decay: f64, sup: f64) -> lanslab_core::Result<SpectralVectorField> {
    let u = random_solenoidal(grid, &mut rng(seed), &Spectrum::dealiased(grid, decay));
    normalized(&u, |f| lp_norm(f, f64::INFINITY), sup)
}

fn march(cfg: &RunConfig) -> lanslab_core::Result<MarchConfig> {
    Ok(MarchConfig::new(cfg.t_end, cfg.dt)?.with_integrator(cfg.integrator).with_save_every(cfg.save_every))
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySummary {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub l2: Vec<f64>,
    pub max_divergence: f64,
}

impl TrajectorySummary {
    fn of(traj: &Trajectory, alpha: f64) -> lanslab_core::Result<Self> {
        let mut energy = Vec::with_capacity(traj.len());
        let mut l2 = Vec::with_capacity(traj.len());
        for s in traj.states() {
            energy.push(energy_pair(s, alpha)?);
            l2.push(lp_norm(s, 2.0)?);
        }
        Ok(Self { times: traj.times().to_vec(), energy, l2, max_divergence: max_divergence(traj) })
    }

    fn csv(&self) -> String {
        let rows = (0..self.times.len()).map(|i| vec![self.times[i], self.energy[i], self.l2[i]]);
        csv_table(&["t", "energy", "l2"], rows)
    }
}

#[derive(Debug, Clone, Serialize)]
struct SolveReport {
    equation: Equation,
    steps: usize,
    step_size: f64,
    solution: TrajectorySummary,
    background: Option<TrajectorySummary>,
}

/// Solve one equation from random data and checkpoint the trajectory.
pub fn solve(cfg: &RunConfig, equation: Equation, out: &Artifacts) -> anyhow::Result<Verdict> {
    let lans = cfg.lans()?;
    let m = march(cfg)?;
    let u0 = initial_field(&lans.grid, cfg.seed, cfg.decay, cfg.amplitude)?;
    let (u, v) = match equation {
        Equation::Lans => (solve_lans(&u0, &lans, &m)?, None),
        Equation::Heat => (solve_lans(&u0, &lans, &m.linear())?, None),
        Equation::Mlans => {
            let v0 = initial_field(&lans.grid, cfg.seed.wrapping_add(1), cfg.decay, cfg.background_amplitude)?;
            let v = solve_lans(&v0, &lans, &m)?;
            (solve_mlans(&u0, &v, &lans, &m)?, Some(v))
        }
    };
    save_trajectory(&out.root().join("trajectory"), &u, Some(out.hash()))?;
    let background = match &v {
        Some(v) => {
            save_trajectory(&out.root().join("background"), v, Some(out.hash()))?;
            Some(TrajectorySummary::of(v, lans.alpha)?)
        }
        None => None,
    };
    let report = SolveReport {
        equation,
        steps: m.steps(),
        step_size: m.step_size(),
        solution: TrajectorySummary::of(&u, lans.alpha)?,
        background,
    };
    out.csv("solve.csv", &report.solution.csv())?;
    out.json("solve.json", &report)?;
    Ok(Verdict::Pass)
}

pub fn pipeline_config(cfg: &RunConfig) -> lanslab_core::Result<PipelineConfig> {
    let split = SplitConfig { p: cfg.p, p_tilde: cfg.p_tilde, epsilon: cfg.epsilon, j_cut: cfg.j_cut, q: cfg.q };
    split.validate()?;
    Ok(PipelineConfig {
        lans: cfg.lans()?,
        t_end: cfg.t_end,
        dt: cfg.dt,
        integrator: cfg.integrator,
        split,
        reference_refinement: cfg.reference_refinement,
        picard: if cfg.picard { Some(cfg.mild()?) } else { None },
        tolerance_factor: cfg.tolerance_factor,
    })
}

/// Split, solve, recombine; a Picard failure is reported and fails the run.
pub fn pipeline(cfg: &RunConfig, out: &Artifacts) -> anyhow::Result<Verdict> {
    let pcfg = pipeline_config(cfg)?;
    let grid = pcfg.lans.grid;
    let partition = DyadicPartition::new(grid, Profile::Smooth);
    let w0 = initial_field(&grid, cfg.seed, cfg.decay, cfg.amplitude)?;
    let outcome = match run_pipeline(&w0, &pcfg, &partition) {
        Ok(o) => o,
        Err(Error::Picard { kind, iterate, ratio, increment }) => {
            let diag = json!({
                "stage": "picard",
                "kind": kind,
                "iterate": iterate,
                "contraction_ratio": ratio,
                "increment": increment,
            });
            out.json("pipeline_failure.json", &diag)?;
            eprintln!(
                "pipeline aborted: Picard iteration failed ({kind:?}) at iterate {iterate}, ratio {ratio:.3e}, increment {increment:.3e}"
            );
            return Ok(Verdict::Fail);
        }
        Err(e) => return Err(e.into()),
    };
    let s = &outcome.summary;
    out.json("pipeline.json", s)?;
    let (u, v, w) = (&outcome.u, &outcome.v, &outcome.w);
    let alpha = pcfg.lans.alpha;
    let constant = calibrate_gronwall(u, Some(v), alpha, cfg.p)?;
    let base = grid.dim() as f64 / 2.0;
    let monitors = json!({
        "gronwall_constant": constant,
        "gronwall": gronwall_monitor(u, Some(v), alpha, cfg.p, constant)?,
        "h2_terms": h2_term_monitor(u, v, &pcfg.lans)?,
        "regularity_trace": higher_regularity_trace(u, base + 1.0, base, cfg.q, &partition)?,
        "max_divergence": { "u": max_divergence(u), "v": max_divergence(v), "w": max_divergence(w) },
    });
    out.json("monitors.json", &monitors)?;
    let rows = (0..s.times.len()).map(|i| {
        vec![s.times[i], s.discrepancy[i], s.self_error[i], s.energy_u[i], s.energy_v[i], s.energy_w[i]]
    });
    out.csv(
        "pipeline.csv",
        &csv_table(&["t", "discrepancy", "self_error", "energy_u", "energy_v", "energy_w"], rows),
    )?;
    Ok(s.verdict)
}

/// Parameter axes of a sweep; an empty axis falls back to the base config.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepAxes {
    pub alpha: Vec<f64>,
    pub nu: Vec<f64>,
    pub n: Vec<usize>,
    pub dt: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub index: usize,
    pub alpha: f64,
    pub nu: f64,
    pub n: usize,
    pub dt: f64,
    pub manifest_hash: String,
    pub status: Verdict,
    pub error: Option<String>,
    pub final_energy: Option<f64>,
    /// L² distance of the final state to the finest-dt cell with the same `(alpha, nu, n)`.
    pub self_error: Option<f64>,
    /// Convergence order read off successive self errors along dt.
    pub observed_order: Option<f64>,
}

fn cells(base: &RunConfig, axes: &SweepAxes) -> Vec<RunConfig> {
    let pick_f = |v: &[f64], d: f64| if v.is_empty() { vec![d] } else { v.to_vec() };
    let ns = if axes.n.is_empty() { vec![base.points_per_axis] } else { axes.n.clone() };
    let mut out = Vec::new();
    for &alpha in &pick_f(&axes.alpha, base.alpha) {
        for &nu in &pick_f(&axes.nu, base.nu) {
            for &n in &ns {
                for &dt in &pick_f(&axes.dt, base.dt) {
                    out.push(RunConfig { alpha, nu, points_per_axis: n, dt, ..base.clone() });
                }
            }
        }
    }
    out
}

fn run_cell(cfg: &RunConfig, out: &Artifacts) -> anyhow::Result<(f64, SpectralVectorField)> {
    let lans = LansConfig::new(cfg.alpha, cfg.nu, cfg.grid()?)?;
    let u0 = initial_field(&lans.grid, cfg.seed, cfg.decay, cfg.amplitude)?;
    let traj = solve_lans(&u0, &lans, &march(cfg)?)?;
    let summary = TrajectorySummary::of(&traj, lans.alpha)?;
    out.json("solve.json", &summary)?;
    out.csv("solve.csv", &summary.csv())?;
    let (_, last) = traj.last();
    Ok((*summary.energy.last().unwrap_or(&f64::NAN), last.clone()))
}

/// Run every cell of the sweep; a failing cell is recorded and the rest still run.
pub fn sweep(base: &RunConfig, axes: &SweepAxes, config_path: Option<&Path>, out: &Artifacts) -> anyhow::Result<Verdict> {
    let configs = cells(base, axes);
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut results: Vec<(SweepCell, Option<SpectralVectorField>)> = Vec::with_capacity(configs.len());
    for (chunk_start, chunk) in configs.chunks(workers).enumerate().map(|(i, c)| (i * workers, c)) {
        let chunk_results = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .enumerate()
                .map(|(k, cfg)| {
                    let index = chunk_start + k;
                    scope.spawn(move || {
                        let dir = out.root().join(format!("cell_{index:03}"));
                        let manifest = RunManifest::new("sweep-cell", config_path, &dir, json!({ "cell": index }), cfg);
                        let hash = manifest.hash();
                        let result = Artifacts::create(&dir, &manifest)
                            .and_then(|dir| run_cell(cfg, &dir));
                        (index, hash, result)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect::<Vec<_>>()
        });
        for (index, hash, result) in chunk_results {
            let cfg = &configs[index];
            let mut cell = SweepCell {
                index,
                alpha: cfg.alpha,
                nu: cfg.nu,
                n: cfg.points_per_axis,
                dt: cfg.dt,
                manifest_hash: hash,
                status: Verdict::Pass,
                error: None,
                final_energy: None,
                self_error: None,
                observed_order: None,
            };
            let state = match result {
                Ok((e, s)) => {
                    cell.final_energy = Some(e);
                    Some(s)
                }
                Err(e) => {
                    cell.status = Verdict::Fail;
                    cell.error = Some(format!("{e:#}"));
                    None
                }
            };
            results.push((cell, state));
        }
    }
    self_convergence(&mut results)?;
    let cells: Vec<SweepCell> = results.into_iter().map(|(c, _)| c).collect();
    let rows = cells.iter().map(|c| {
        vec![
            c.index as f64,
            c.alpha,
            c.nu,
            c.n as f64,
            c.dt,
            if c.status == Verdict::Pass { 1.0 } else { 0.0 },
            c.final_energy.unwrap_or(f64::NAN),
            c.self_error.unwrap_or(f64::NAN),
            c.observed_order.unwrap_or(f64::NAN),
        ]
    });
    out.csv(
        "sweep.csv",
        &csv_table(&["cell", "alpha", "nu", "n", "dt", "ok", "final_energy", "self_error", "observed_order"], rows),
    )?;
    let verdict = Verdict::worst(cells.iter().map(|c| c.status));
    out.json("sweep.json", &json!({ "axes": axes, "cells": cells, "verdict": verdict }))?;
    Ok(verdict)
}

/// Within each `(alpha, nu, n)` group, compare final states against the smallest dt.
fn self_convergence(results: &mut [(SweepCell, Option<SpectralVectorField>)]) -> anyhow::Result<()> {
    let mut groups: BTreeMap<(u64, u64, usize), Vec<usize>> = BTreeMap::new();
    for (i, (c, s)) in results.iter().enumerate() {
        if s.is_some() {
            groups.entry((c.alpha.to_bits(), c.nu.to_bits(), c.n)).or_default().push(i);
        }
    }
    for members in groups.values_mut() {
        if members.len() < 2 {
            continue;
        }
        members.sort_by(|&a, &b| results[b].0.dt.total_cmp(&results[a].0.dt));
        let finest = *members.last().expect("nonempty group");
        let reference = results[finest].1.clone().expect("successful cell");
        let mut previous: Option<(f64, f64)> = None;
        for &i in members.iter().take(members.len() - 1) {
            let state = results[i].1.as_ref().expect("successful cell");
            let err = lp_norm(&state.combine(1.0, &reference, -1.0)?, 2.0)?;
            let cell = &mut results[i].0;
            cell.self_error = Some(err);
            if let Some((dt_prev, err_prev)) = previous {
                if err > 0.0 && err_prev > 0.0 {
                    cell.observed_order = Some((err_prev / err).ln() / (dt_prev / cell.dt).ln());
                }
            }
            previous = Some((cell.dt, err));
        }
    }
    Ok(())
}
