//! Acceptance criteria at desk scale (n = 3, N = 32-64). Every test writes one
//! `PASS`/`FAIL` line to stderr, bypassing the harness capture.

use std::io::Write;

use lanslab_core::apriori::{
    calibrate_gronwall, cancellation_check, gronwall_monitor, higher_regularity_trace, regularity_refinement, SplitConfig,
};
use lanslab_core::dynamics::{
    lans_rhs, mild_map, mlans_rhs, picard_iterate, solve_lans, solve_mlans, trajectory_distance, Integrator, LansConfig,
    MarchConfig, MildSolverConfig, Trajectory,
};
use lanslab_core::ensemble::{normalized, random_scalar, random_solenoidal, rng, Spectrum};
use lanslab_core::error::{PicardFailureKind, ProductCondition};
use lanslab_core::inequality::{
    default_heat_times, fit_line, verify_bernstein, verify_heat_smoothing, verify_product_estimate, HeatCase, ProductCase,
    Verdict,
};
use lanslab_core::pipeline::{run_pipeline, PipelineConfig};
use lanslab_core::spectral::{dealias, lp_norm};
use lanslab_core::{BesovIndex, DyadicPartition, Error, Field, Profile, ScalarField, SpectralVectorField, TorusGrid};

fn record(id: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[acceptance {id:>2}] {status} {name}: {detail}");
}

fn grid(n: usize) -> TorusGrid {
    TorusGrid::new(3, n).unwrap()
}

fn rel(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    a.combine(1.0, b, -1.0).unwrap().coefficient_norm() / b.coefficient_norm()
}

fn solenoidal(g: &TorusGrid, seed: u64, decay: f64, sup: f64) -> SpectralVectorField {
    let u = random_solenoidal(g, &mut rng(seed), &Spectrum::dealiased(g, decay));
    normalized(&u, |f| lp_norm(f, f64::INFINITY), sup).unwrap()
}

#[test]
fn c01_partition_of_unity_and_disjointness() {
    let mut unity: f64 = 0.0;
    let mut leak: f64 = 0.0;
    for n in [32, 64] {
        let g = grid(n);
        let lp = DyadicPartition::new(g, Profile::Smooth);
        let mut total = vec![0.0; g.len()];
        for j in 0..=lp.j_max() {
            for (i, w) in lp.shell(j).unwrap() {
                total[i] += w;
            }
        }
        unity = unity.max(total.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max));
        let f = random_scalar(&g, &mut rng(n as u64), &Spectrum::new(0.5, f64::INFINITY));
        let norm = lp_norm(&f, 2.0).unwrap();
        for j in 0..=lp.j_max() {
            for k in 0..=lp.j_max() {
                if j.abs_diff(k) >= 2 {
                    let d = lp.delta(&lp.delta(&f, k).unwrap(), j).unwrap();
                    leak = leak.max(lp_norm(&d, 2.0).unwrap() / norm);
                }
            }
        }
    }
    let pass = unity <= 1e-12 && leak <= 1e-14;
    record(1, "Littlewood-Paley partition", pass, &format!("unity defect {unity:.2e}, block leakage {leak:.2e}"));
    assert!(pass);
}

#[test]
fn c02_paraproduct_reconstruction() {
    let g = grid(32);
    let lp = DyadicPartition::new(g, Profile::Smooth);
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let decay = [0.0, 1.0, 2.0][i % 3];
        let f = random_scalar(&g, &mut r, &Spectrum::dealiased(&g, decay));
        let h = random_scalar(&g, &mut r, &Spectrum::dealiased(&g, 1.0));
        let prod: Vec<f64> = f.to_physical().iter().zip(h.to_physical()).map(|(a, b)| a * b).collect();
        let fg = dealias(&ScalarField::from_physical(g, &prod).unwrap());
        let sum = lp.paraproduct_split(&f, &h).unwrap().sum();
        worst = worst.max(sum.combine(1.0, &fg, -1.0).unwrap().coefficient_norm() / fg.coefficient_norm());
    }
    let pass = worst <= 1e-10;
    record(2, "paraproduct reconstruction", pass, &format!("worst relative error {worst:.2e} over 50 pairs"));
    assert!(pass);
}

#[test]
fn c03_bernstein_slopes() {
    let g = grid(64);
    let mut lines = Vec::new();
    let mut pass = true;
    for (beta, p, q) in [(0.0, 2.0, f64::INFINITY), (1.0, 2.0, 2.0), (1.0, 2.0, 4.0)] {
        let rep = verify_bernstein(p, q, beta, &g, 7, 6).unwrap();
        let fit = rep.fit.unwrap();
        let predicted = rep.predicted.unwrap();
        let ok = rep.verdict == Verdict::Pass
            && (fit.slope - predicted).abs() <= 0.05 * predicted.abs()
            && fit.r_squared >= 0.98;
        pass &= ok;
        lines.push(format!("(β={beta},p={p},q={q}) slope {:.3}/{predicted:.3} r² {:.4}", fit.slope, fit.r_squared));
    }
    record(3, "Bernstein slopes", pass, &lines.join("; "));
    assert!(pass);
}

#[test]
fn c04_heat_smoothing_exponents() {
    let g = grid(32);
    let times = default_heat_times(&g);
    let mut lines = Vec::new();
    let mut pass = true;
    for case in [
        HeatCase { s1: 1.5, p1: 2.0, s2: 2.5, p2: 2.0, q: 2.0 },
        HeatCase { s1: 0.5, p1: 2.0, s2: 1.0, p2: 4.0, q: 2.0 },
        HeatCase { s1: 1.0, p1: 2.0, s2: 1.0, p2: 6.0, q: 2.0 },
    ] {
        let rep = verify_heat_smoothing(&case, &case.saturating_data(&g), &times, 0).unwrap();
        let predicted = rep.predicted.unwrap();
        let slope = rep.fit.unwrap().slope;
        let ok = rep.verdict == Verdict::Pass && (slope - predicted).abs() <= 0.10 * predicted.abs();
        pass &= ok;
        lines.push(format!("({},{},{},{}) {slope:.3}/{predicted:.3}", case.s1, case.s2, case.p1, case.p2));
    }
    record(4, "heat smoothing", pass, &lines.join("; "));
    assert!(pass);
}

#[test]
fn c05_product_estimate() {
    let g = grid(64);
    let mut lines = Vec::new();
    let mut pass = true;
    for case in [
        ProductCase { s1: 1.0, p1: 2.0, s2: 1.0, p2: 2.0, p: 2.0, q: 2.0 },
        ProductCase { s1: 0.5, p1: 4.0, s2: 1.0, p2: 2.0, p: 4.0, q: 2.0 },
        ProductCase { s1: 0.25, p1: 6.0, s2: 0.25, p2: 6.0, p: 3.0, q: 2.0 },
    ] {
        let rep = verify_product_estimate(&case, &g, 3, 100).unwrap();
        let (c, f) = (rep.constant_coarse.unwrap(), rep.constant_fine.unwrap());
        let ok = rep.verdict == Verdict::Pass && f / c < 2.0 && c / f < 2.0;
        pass &= ok;
        lines.push(format!("C {c:.3} -> {f:.3}"));
    }
    let violations = [
        (ProductCase { s1: 2.0, p1: 2.0, s2: 1.0, p2: 2.0, p: 2.0, q: 2.0 }, ProductCondition::FirstRegularity),
        (ProductCase { s1: 1.0, p1: 2.0, s2: 1.5, p2: 2.0, p: 2.0, q: 2.0 }, ProductCondition::SecondRegularity),
        (ProductCase { s1: -1.0, p1: 2.0, s2: 0.5, p2: 2.0, p: 2.0, q: 2.0 }, ProductCondition::PositiveSum),
        (ProductCase { s1: 0.5, p1: 4.0, s2: 0.5, p2: 4.0, p: 1.0, q: 2.0 }, ProductCondition::Integrability),
    ];
    let mut rejected = 0;
    for (case, expected) in violations {
        match verify_product_estimate(&case, &g, 3, 1) {
            Err(Error::ProductHypothesis(c)) if c == expected => rejected += 1,
            _ => pass = false,
        }
    }
    lines.push(format!("{rejected}/4 violations rejected with the right condition"));
    record(5, "product estimate", pass, &lines.join("; "));
    assert!(pass);
}

#[test]
fn c06_energy_cancellations() {
    let g = grid(32);
    let cfg = LansConfig::new(0.1, 0.05, g).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let r = cancellation_check(&solenoidal(&g, 600 + seed, 2.0, 1.0), &cfg).unwrap();
        worst = worst.max(r.max_scaled());
    }
    // shear plus 0.1 ∇ sin x1: the injected divergence couples to the shear's
    // second harmonic, so the transport term is nonzero in closed form
    let control = SpectralVectorField::from_fn(g, |x| [0.1 * x[0].cos(), 0.1 * (x[0].sin() + (2.0 * x[0]).cos()), 0.0]);
    let c = cancellation_check(&control, &cfg).unwrap();
    let pass = worst <= 1e-10 && c.transport_scaled.abs() > 1e-3;
    record(
        6,
        "energy cancellations",
        pass,
        &format!("worst normalized residual {worst:.2e} over 20 fields; divergence control |I1| {:.2e}", c.transport_scaled.abs()),
    );
    assert!(pass);
}

#[test]
fn c07_modified_equation_identity() {
    let g = grid(32);
    let cfg = LansConfig::new(0.1, 0.05, g).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let u = solenoidal(&g, 700 + 2 * seed, 2.0, 0.5);
        let v = solenoidal(&g, 701 + 2 * seed, 1.0, 1.0);
        let full = lans_rhs(&u.combine(1.0, &v, 1.0).unwrap(), &cfg).unwrap();
        let split = mlans_rhs(&u, &v, &cfg).unwrap().combine(1.0, &lans_rhs(&v, &cfg).unwrap(), 1.0).unwrap();
        worst = worst.max(rel(&split, &full));
    }
    let pass = worst <= 1e-11;
    record(7, "modified equation identity", pass, &format!("worst relative defect {worst:.2e} over 20 pairs"));
    assert!(pass);
}

fn picard_setup() -> (LansConfig, MildSolverConfig, DyadicPartition, SpectralVectorField) {
    let g = grid(32);
    let cfg = LansConfig::new(0.1, 1.0, g).unwrap();
    let lp = DyadicPartition::new(g, Profile::Smooth);
    let mcfg = MildSolverConfig::critical(0.05, 1e-3, 3, BesovIndex::new(2.0, 2.0, 2.0).unwrap()).unwrap();
    let base = BesovIndex::new(1.5, 2.0, 2.0).unwrap();
    let u0 = random_solenoidal(&g, &mut rng(800), &Spectrum::dealiased(&g, 1.0));
    let u0 = normalized(&u0, |f| lp.besov_norm(f, base), 1e-2).unwrap();
    (cfg, mcfg, lp, u0)
}

#[test]
fn c08_picard_contraction() {
    let (cfg, mcfg, lp, u0) = picard_setup();
    let small = picard_iterate(&u0, None, &cfg, &mcfg, &lp);
    let (small_ok, small_detail) = match &small {
        Ok(out) => {
            let ratios: Vec<f64> = out.history.iter().filter_map(|s| s.contraction_ratio).collect();
            let again = mild_map(&out.trajectory, &u0, None, &cfg, &mcfg).unwrap();
            let residual = trajectory_distance(&again, &out.trajectory, &mcfg, &lp).unwrap();
            let worst = ratios.iter().copied().fold(0.0, f64::max);
            (worst <= 0.5 && residual < 1e-8, format!("max ratio {worst:.2e}, fixed-point residual {residual:.2e}"))
        }
        Err(e) => (false, format!("small data failed: {e}")),
    };
    let large = picard_iterate(&u0.scaled(100.0), None, &cfg, &mcfg, &lp);
    let (control_ok, control_detail) = match large {
        Err(Error::Picard { kind, ratio, .. }) => (
            matches!(kind, PicardFailureKind::NotContractive | PicardFailureKind::MaxIterations | PicardFailureKind::NonFinite),
            format!("100x data rejected ({kind:?}, ratio {ratio:.2e})"),
        ),
        Ok(out) => {
            let worst = out.history.iter().filter_map(|s| s.contraction_ratio).fold(0.0, f64::max);
            (false, format!("100x data still converges (max ratio {worst:.2e})"))
        }
        Err(e) => (false, format!("100x data: unexpected error {e}")),
    };
    let pass = small_ok && control_ok;
    record(8, "Picard contraction", pass, &format!("{small_detail}; {control_detail}"));
    assert!(small_ok, "{small_detail}");
    assert!(control_ok, "{control_detail}");
}

fn gronwall_run(seed: u64, cfg: &LansConfig, m: &MarchConfig) -> (Trajectory, Trajectory) {
    let g = cfg.grid;
    let u0 = solenoidal(&g, seed, 2.0, 0.1);
    let v0 = solenoidal(&g, seed + 1000, 2.0, 0.01);
    let v = solve_lans(&v0, cfg, m).unwrap();
    let u = solve_mlans(&u0, &v, cfg, m).unwrap();
    (u, v)
}

#[test]
fn c09_energy_and_gronwall_bound() {
    let g = grid(32);
    let cfg = LansConfig::new(0.1, 0.05, g).unwrap();
    let m = MarchConfig::new(0.05, 1e-3).unwrap().with_save_every(5);
    let mut monotone = true;
    for seed in [900, 901, 902] {
        let u = solve_lans(&solenoidal(&g, seed, 2.0, 1.0), &cfg, &m).unwrap();
        let rep = gronwall_monitor(&u, None, cfg.alpha, 6.0, 0.0).unwrap();
        monotone &= rep.e_pair.windows(2).all(|w| w[1] <= w[0]);
    }
    let (u, v) = gronwall_run(910, &cfg, &m);
    let constant = calibrate_gronwall(&u, Some(&v), cfg.alpha, 6.0).unwrap();
    let (u, v) = gronwall_run(911, &cfg, &m);
    let rep = gronwall_monitor(&u, Some(&v), cfg.alpha, 6.0, constant).unwrap();
    let pass = monotone && rep.max_bound_ratio <= 1.01;
    record(
        9,
        "energy and Gronwall bound",
        pass,
        &format!("v = 0 monotone on 3 seeds: {monotone}; fresh-seed bound ratio {:.4} (C = {constant:.3e})", rep.max_bound_ratio),
    );
    assert!(pass);
}

#[test]
fn c10_split_solve_recombine() {
    let g = grid(32);
    let cfg = LansConfig::new(0.1, 0.05, g).unwrap();
    let lp = DyadicPartition::new(g, Profile::Smooth);
    let w0 = solenoidal(&g, 5, 2.0, 0.01);
    let pcfg = PipelineConfig {
        lans: cfg,
        t_end: 0.05,
        dt: 1e-3,
        integrator: Integrator::IfHeun,
        split: SplitConfig { p: 6.0, p_tilde: 30.0, epsilon: 1e-3, j_cut: 0, q: 2.0 },
        reference_refinement: 4,
        picard: Some(MildSolverConfig::critical(0.05, 1e-3, 3, BesovIndex::new(2.5, 2.0, 2.0).unwrap()).unwrap()),
        tolerance_factor: 10.0,
    };
    let out = run_pipeline(&w0, &pcfg, &lp).unwrap();
    let s = &out.summary;
    let tail_moves = out.v.states()[0].coefficient_norm() > 0.0;
    let pass = s.verdict == Verdict::Pass && s.max_discrepancy <= 10.0 * s.max_self_error && tail_moves;
    record(
        10,
        "split-solve-recombine",
        pass,
        &format!(
            "J_c {} tail {:.2e}; discrepancy {:.2e} vs self error {:.2e}",
            s.j_cut, s.tail_norm, s.max_discrepancy, s.max_self_error
        ),
    );
    assert!(pass);
}

#[test]
fn c11_higher_regularity_trace() {
    let g = grid(32);
    let cfg = LansConfig::new(0.1, 0.05, g).unwrap();
    let lp = DyadicPartition::new(g, Profile::Smooth);
    let base = BesovIndex::new(1.5, 2.0, 2.0).unwrap();
    let u0 = normalized(&solenoidal(&g, 1100, 2.0, 1.0), |f| lp.besov_norm(f, base), 0.1).unwrap();
    let v0 = solenoidal(&g, 1101, 2.0, 0.01);
    let trace = |dt: f64, every: usize| {
        let m = MarchConfig::new(0.05, dt).unwrap().with_save_every(every);
        let v = solve_lans(&v0, &cfg, &m).unwrap();
        let u = solve_mlans(&u0, &v, &cfg, &m).unwrap();
        let heat = solve_lans(&u0, &cfg, &m.linear()).unwrap();
        (
            higher_regularity_trace(&u, 2.5, 1.5, 2.0, &lp).unwrap(),
            higher_regularity_trace(&heat, 2.5, 1.5, 2.0, &lp).unwrap(),
        )
    };
    let (coarse, heat) = trace(1e-3, 2);
    let (fine, _) = trace(5e-4, 4);
    let (change, flagged) = regularity_refinement(&coarse, &fine);
    let head = 4;
    let xs: Vec<f64> = fine.times[..head].iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = fine.weighted[..head].iter().map(|w| w.ln()).collect();
    let small_t_slope = fit_line(&xs, &ys).unwrap().slope;
    let heat_ratio = fine.sup / heat.sup;
    let pass = fine.sup.is_finite() && !flagged && small_t_slope > 0.4 && (1.0 / 3.0..=3.0).contains(&heat_ratio);
    record(
        11,
        "higher-regularity trace",
        pass,
        &format!(
            "sup {:.3e}, refinement change {change:.2e}, small-t slope {small_t_slope:.3}, ratio to heat flow {heat_ratio:.3}",
            fine.sup
        ),
    );
    assert!(pass);
}
