use std::str::FromStr;

use anyhow::bail;
use lanslab_core::apriori::cancellation_check;
use lanslab_core::dynamics::{lans_rhs, mlans_rhs};
use lanslab_core::ensemble::{normalized, random_scalar, random_solenoidal, rng, Spectrum};
use lanslab_core::inequality::{
    default_heat_times, verify_bernstein, verify_embedding, verify_heat_smoothing, verify_ladyzhenskaya,
    verify_product_estimate, EmbeddingCase, HeatCase, InequalityReport, ProductCase, Verdict,
};
use lanslab_core::spectral::{dealias, lp_norm};
use lanslab_core::{DyadicPartition, Field, Profile, ScalarField, SpectralVectorField, TorusGrid};
use serde::Serialize;

use crate::artifact::Artifacts;
use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Bernstein,
    Heat,
    Product,
    Embedding,
    Ladyzhenskaya,
    Cancellation,
    Partition,
    Paraproduct,
    MlansIdentity,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Bernstein,
        Suite::Heat,
        Suite::Product,
        Suite::Embedding,
        Suite::Ladyzhenskaya,
        Suite::Cancellation,
        Suite::Partition,
        Suite::Paraproduct,
        Suite::MlansIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bernstein => "bernstein",
            Suite::Heat => "heat",
            Suite::Product => "product",
            Suite::Embedding => "embedding",
            Suite::Ladyzhenskaya => "ladyzhenskaya",
            Suite::Cancellation => "cancellation",
            Suite::Partition => "partition",
            Suite::Paraproduct => "paraproduct",
            Suite::MlansIdentity => "mlans-identity",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Parse a comma list; `all` expands to every suite. Duplicates collapse.
pub fn parse_suites(list: &str) -> anyhow::Result<Vec<Suite>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim) {
        if item.is_empty() {
            continue;
        }
        if item == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(item.parse::<Suite>().map_err(anyhow::Error::msg)?);
        }
    }
    if out.is_empty() {
        bail!("no suite selected");
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

/// Scalar identity check: passes while `worst <= tol`.
#[derive(Debug, Clone, Serialize)]
struct IdentityReport {
    case: String,
    seed: u64,
    points_per_axis: usize,
    samples: usize,
    worst: f64,
    tolerance: f64,
    verdict: Verdict,
}

impl IdentityReport {
    fn new(case: &str, cfg: &RunConfig, samples: usize, worst: f64, tolerance: f64) -> Self {
        let verdict = if worst <= tolerance { Verdict::Pass } else { Verdict::Fail };
        Self { case: case.into(), seed: cfg.seed, points_per_axis: cfg.points_per_axis, samples, worst, tolerance, verdict }
    }

    fn outcome(&self, suite: Suite) -> CheckOutcome {
        CheckOutcome {
            suite,
            name: self.case.clone(),
            verdict: self.verdict,
            detail: format!("worst {:.3e} against tolerance {:.1e} over {} samples", self.worst, self.tolerance, self.samples),
        }
    }
}

fn emit_inequality(out: &Artifacts, suite: Suite, name: &str, rep: &InequalityReport) -> anyhow::Result<CheckOutcome> {
    out.json(&format!("{name}.json"), rep)?;
    if !rep.samples.is_empty() {
        out.csv(&format!("{name}.csv"), &rep.samples_csv())?;
    }
    let mut parts = Vec::new();
    if let Some(fit) = rep.fit {
        parts.push(format!("slope {:.3} (r² {:.3})", fit.slope, fit.r_squared));
    }
    if let Some(p) = rep.predicted {
        parts.push(format!("predicted {p:.3}"));
    }
    if let (Some(c), Some(f)) = (rep.constant_coarse, rep.constant_fine) {
        parts.push(format!("constant {c:.3} -> {f:.3}"));
    }
    if !rep.detail.is_empty() {
        parts.push(rep.detail.clone());
    }
    Ok(CheckOutcome { suite, name: name.into(), verdict: rep.verdict, detail: parts.join(", ") })
}

fn emit_identity(out: &Artifacts, suite: Suite, rep: &IdentityReport) -> anyhow::Result<CheckOutcome> {
    out.json(&format!("{}.json", rep.case), rep)?;
    Ok(rep.outcome(suite))
}

fn solenoidal(grid: &TorusGrid, seed: u64, decay: f64, sup: f64) -> anyhow::Result<SpectralVectorField> {
    let u = random_solenoidal(grid, &mut rng(seed), &Spectrum::dealiased(grid, decay));
    Ok(normalized(&u, |f| lp_norm(f, f64::INFINITY), sup)?)
}

pub fn run_suite(suite: Suite, cfg: &RunConfig, out: &Artifacts) -> anyhow::Result<Vec<CheckOutcome>> {
    let grid = cfg.grid()?;
    let seed = cfg.seed;
    let mut checks = Vec::new();
    match suite {
        Suite::Bernstein => {
            for (beta, p, q) in [(0.0, 2.0, f64::INFINITY), (1.0, 2.0, 2.0), (1.0, 2.0, 4.0)] {
                let rep = verify_bernstein(p, q, beta, &grid, seed, cfg.members)?;
                let q_name = if q.is_infinite() { "inf".to_string() } else { q.to_string() };
                checks.push(emit_inequality(out, suite, &format!("bernstein_beta{beta}_p{p}_q{q_name}"), &rep)?);
            }
        }
        Suite::Heat => {
            let times = default_heat_times(&grid);
            for case in [
                HeatCase { s1: 1.5, p1: 2.0, s2: 2.5, p2: 2.0, q: 2.0 },
                HeatCase { s1: 0.5, p1: 2.0, s2: 1.0, p2: 4.0, q: 2.0 },
                HeatCase { s1: 1.0, p1: 2.0, s2: 1.0, p2: 6.0, q: 2.0 },
            ] {
                let rep = verify_heat_smoothing(&case, &case.saturating_data(&grid), &times, seed)?;
                let name = format!("heat_s{}_p{}_to_s{}_p{}", case.s1, case.p1, case.s2, case.p2);
                checks.push(emit_inequality(out, suite, &name, &rep)?);
            }
        }
        Suite::Product => {
            for case in [
                ProductCase { s1: 1.0, p1: 2.0, s2: 1.0, p2: 2.0, p: 2.0, q: 2.0 },
                ProductCase { s1: 0.5, p1: 4.0, s2: 1.0, p2: 2.0, p: 4.0, q: 2.0 },
                ProductCase { s1: 0.25, p1: 6.0, s2: 0.25, p2: 6.0, p: 3.0, q: 2.0 },
            ] {
                let rep = verify_product_estimate(&case, &grid, seed, cfg.pairs)?;
                let name = format!("product_s{}_p{}_s{}_p{}_to_p{}", case.s1, case.p1, case.s2, case.p2, case.p);
                checks.push(emit_inequality(out, suite, &name, &rep)?);
            }
        }
        Suite::Embedding => {
            let cases = [
                ("embedding_summability", EmbeddingCase::SummabilityIndex { s: 1.0, p: 2.0, q1: 1.0, q2: 2.0 }),
                ("embedding_integrability", EmbeddingCase::Integrability { s: 0.5, p1: 2.0, p2: 4.0, q: 2.0 }),
                ("embedding_bessel", EmbeddingCase::BesselBelowBesov { s: 1.0, r: 1.5, p: 4.0, q: 2.0 }),
                ("embedding_sobolev", EmbeddingCase::SobolevEquivalence { s: 1.0 }),
            ];
            for (name, case) in cases {
                let rep = verify_embedding(&case, &grid, seed, cfg.members.max(7))?;
                checks.push(emit_inequality(out, suite, name, &rep)?);
            }
        }
        Suite::Ladyzhenskaya => {
            let rep = verify_ladyzhenskaya(0.75, 1.0, &grid, seed, cfg.members)?;
            checks.push(emit_inequality(out, suite, "ladyzhenskaya", &rep)?);
        }
        Suite::Cancellation => {
            let lans = cfg.lans()?;
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for k in 0..20 {
                let r = cancellation_check(&solenoidal(&grid, seed.wrapping_add(k), 2.0, 1.0)?, &lans)?;
                rows.push(vec![k as f64, r.transport_scaled, r.stress_scaled, r.pressure_scaled]);
                worst = worst.max(r.max_scaled());
            }
            let rep = IdentityReport::new("cancellation", cfg, 20, worst, 1e-10);
            out.csv(
                "cancellation.csv",
                &crate::artifact::csv_table(&["member", "transport", "stress", "pressure"], rows),
            )?;
            checks.push(emit_identity(out, suite, &rep)?);
        }
        Suite::Partition => {
            let lp = DyadicPartition::new(grid, Profile::Smooth);
            let mut total = vec![0.0; grid.len()];
            for j in 0..=lp.j_max() {
                for (i, w) in lp.shell(j)? {
                    total[i] += w;
                }
            }
            let unity = total.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max);
            checks.push(emit_identity(out, suite, &IdentityReport::new("partition_unity", cfg, grid.len(), unity, 1e-12))?);
            let f = random_scalar(&grid, &mut rng(seed), &Spectrum::new(0.5, f64::INFINITY));
            let norm = lp_norm(&f, 2.0)?;
            let mut leak: f64 = 0.0;
            for j in 0..=lp.j_max() {
                for k in 0..=lp.j_max() {
                    if j.abs_diff(k) >= 2 {
                        leak = leak.max(lp_norm(&lp.delta(&lp.delta(&f, k)?, j)?, 2.0)? / norm);
                    }
                }
            }
            let pairs = (lp.j_max() + 1) * (lp.j_max() + 1);
            checks.push(emit_identity(out, suite, &IdentityReport::new("partition_disjoint", cfg, pairs, leak, 1e-14))?);
        }
        Suite::Paraproduct => {
            let lp = DyadicPartition::new(grid, Profile::Smooth);
            let mut r = rng(seed);
            let mut worst: f64 = 0.0;
            for i in 0..50 {
                let f = random_scalar(&grid, &mut r, &Spectrum::dealiased(&grid, [0.0, 1.0, 2.0][i % 3]));
                let h = random_scalar(&grid, &mut r, &Spectrum::dealiased(&grid, 1.0));
                let prod: Vec<f64> = f.to_physical().iter().zip(h.to_physical()).map(|(a, b)| a * b).collect();
                let fg = dealias(&ScalarField::from_physical(grid, &prod)?);
                let sum = lp.paraproduct_split(&f, &h)?.sum();
                worst = worst.max(sum.combine(1.0, &fg, -1.0)?.coefficient_norm() / fg.coefficient_norm());
            }
            checks.push(emit_identity(out, suite, &IdentityReport::new("paraproduct", cfg, 50, worst, 1e-10))?);
        }
        Suite::MlansIdentity => {
            let lans = cfg.lans()?;
            let mut worst: f64 = 0.0;
            for k in 0..20u64 {
                let u = solenoidal(&grid, seed.wrapping_add(2 * k), 2.0, 0.5)?;
                let v = solenoidal(&grid, seed.wrapping_add(2 * k + 1), 1.0, 1.0)?;
                let full = lans_rhs(&u.combine(1.0, &v, 1.0)?, &lans)?;
                let split = mlans_rhs(&u, &v, &lans)?.combine(1.0, &lans_rhs(&v, &lans)?, 1.0)?;
                worst = worst.max(split.combine(1.0, &full, -1.0)?.coefficient_norm() / full.coefficient_norm());
            }
            checks.push(emit_identity(out, suite, &IdentityReport::new("mlans_identity", cfg, 20, worst, 1e-11))?);
        }
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_lists() {
        assert_eq!(parse_suites("all").unwrap().len(), Suite::ALL.len());
        assert_eq!(parse_suites("heat, bernstein,heat").unwrap(), vec![Suite::Bernstein, Suite::Heat]);
        assert!(parse_suites("").is_err());
        assert!(parse_suites(" , ").is_err());
        assert!(parse_suites("heat,bogus").is_err());
    }
}
