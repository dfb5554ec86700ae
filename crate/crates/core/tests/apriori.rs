use std::f64::consts::PI;

use lanslab_core::apriori::*;
use lanslab_core::dynamics::{solve_lans, solve_mlans, LansConfig, MarchConfig};
use lanslab_core::ensemble::{normalized, random_solenoidal, rng, Spectrum};
use lanslab_core::inequality::fit_line;
use lanslab_core::spectral::{lp_norm, sobolev_norm};
use lanslab_core::{BesovIndex, DyadicPartition, Error, Field, Profile, SpectralVectorField, TorusGrid};

fn grid(n: usize) -> TorusGrid {
    TorusGrid::new(3, n).unwrap()
}

fn field(g: &TorusGrid, seed: u64, sup: f64, decay: f64) -> SpectralVectorField {
    let u = random_solenoidal(g, &mut rng(seed), &Spectrum::dealiased(g, decay));
    normalized(&u, |f| lp_norm(f, f64::INFINITY), sup).unwrap()
}

#[test]
fn cancellations_vanish_on_solenoidal_fields() {
    let g = grid(16);
    let cfg = LansConfig::new(0.3, 0.1, g).unwrap();
    for seed in 0..5 {
        let r = cancellation_check(&field(&g, seed, 1.0, 1.0), &cfg).unwrap();
        assert!(r.max_scaled() < 1e-12, "{r:?}");
    }
    let zero = cancellation_check(&SpectralVectorField::zeros(g), &cfg).unwrap();
    assert_eq!(zero.max_scaled(), 0.0);
    assert_eq!((zero.transport, zero.stress, zero.pressure), (0.0, 0.0, 0.0));
}

#[test]
fn cancellation_terms_are_cubic() {
    let g = grid(16);
    let cfg = LansConfig::new(0.3, 0.1, g).unwrap();
    // a compressible field so the raw terms are not rounding noise
    let u = field(&g, 3, 1.0, 1.0)
        .combine(1.0, &SpectralVectorField::from_fn(g, |x| [0.3 * x[0].cos(), 0.0, 0.2 * (2.0 * x[2]).sin()]), 1.0)
        .unwrap();
    let base = cancellation_check(&u, &cfg).unwrap();
    for lambda in [0.1, 3.0] {
        let r = cancellation_check(&u.scaled(lambda), &cfg).unwrap();
        let l3 = lambda.powi(3);
        assert!((r.transport / (l3 * base.transport) - 1.0).abs() < 1e-10);
        assert!((r.stress / (l3 * base.stress) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn transport_term_of_injected_gradient_matches_closed_form() {
    let g = grid(16);
    let cfg = LansConfig::new(0.3, 0.1, g).unwrap();
    // shear (0, a(x1), 0) plus 0.1 ∇ sin x1; ⟨(u·∇)u, u⟩ = 0.05 ∫ sin x1 |u|²
    let u = SpectralVectorField::from_fn(g, |x| [0.1 * x[0].cos(), 0.1 * (x[0].sin() + (2.0 * x[0]).cos()), 0.0]);
    let r = cancellation_check(&u, &cfg).unwrap();
    let expect = -0.05 * 0.01 * 0.5 * (2.0 * PI).powi(3);
    assert!((r.transport / expect - 1.0).abs() < 1e-12, "{}", r.transport);
    assert!(r.transport_scaled.abs() > 1e-3);
}

#[test]
fn energy_decays_without_background() {
    let g = grid(16);
    let cfg = LansConfig::new(0.2, 0.05, g).unwrap();
    let u = solve_lans(&field(&g, 4, 1.0, 2.0), &cfg, &MarchConfig::new(0.05, 0.005).unwrap()).unwrap();
    let report = gronwall_monitor(&u, None, cfg.alpha, 6.0, 0.0).unwrap();
    assert!(report.e_pair.windows(2).all(|w| w[1] <= w[0]));
    assert!(report.max_bound_ratio <= 1.0 + 1e-15);
    assert_eq!(calibrate_gronwall(&u, None, cfg.alpha, 6.0).unwrap(), 0.0);
}

#[test]
fn zero_perturbation_has_zero_ratio() {
    let g = grid(8);
    let cfg = LansConfig::new(0.2, 0.05, g).unwrap();
    let m = MarchConfig::new(0.02, 0.01).unwrap();
    let v = solve_lans(&field(&g, 5, 1.0, 2.0), &cfg, &m).unwrap();
    let u = solve_mlans(&SpectralVectorField::zeros(g), &v, &cfg, &m).unwrap();
    let report = gronwall_monitor(&u, Some(&v), cfg.alpha, 6.0, 1.0).unwrap();
    assert!(report.bound_ratio.iter().all(|&r| r == 0.0));
    assert!(gronwall_monitor(&u, Some(&v), 0.0, 6.0, 1.0).is_err());
}

#[test]
fn h2_terms_vanish_for_zero_field() {
    let g = grid(16);
    let cfg = LansConfig::new(0.2, 0.05, g).unwrap();
    let t = h2_terms(&SpectralVectorField::zeros(g), &field(&g, 1, 1.0, 2.0), &cfg).unwrap();
    assert_eq!((t.k1, t.k2, t.l1, t.l2), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn dilation_scales_sobolev_norms() {
    let g = grid(32);
    let u = SpectralVectorField::from_fn(g, |x| [x[1].sin(), x[2].cos(), x[0].sin()]);
    let d = dilate(&u, 3).unwrap();
    assert!((sobolev_norm(&d, 1.0, true) / sobolev_norm(&u, 1.0, true) - 1.0).abs() < 1e-13);
    assert!((sobolev_norm(&d, 3.0, true) / sobolev_norm(&u, 3.0, true) - 9.0).abs() < 1e-12);
    assert!(dilate(&u, 16).is_err());
}

#[test]
fn h2_growth_terms_stay_below_their_exponents() {
    let g = grid(32);
    let cfg = LansConfig::new(0.2, 0.05, g).unwrap();
    let spectrum = Spectrum::new(1.0, 1.0);
    let u = random_solenoidal(&g, &mut rng(8), &spectrum);
    let v = random_solenoidal(&g, &mut rng(9), &spectrum);
    let mut h3 = Vec::new();
    let mut k1 = Vec::new();
    let mut l2 = Vec::new();
    for mu in [2, 4, 8] {
        let t = h2_terms(&dilate(&u, mu).unwrap(), &dilate(&v, mu).unwrap(), &cfg).unwrap();
        h3.push(t.h3.ln());
        k1.push(t.k1.abs().ln());
        l2.push(t.l2.abs().ln());
    }
    assert!(fit_line(&h3, &k1).unwrap().slope <= 15.0 / 8.0);
    assert!(fit_line(&h3, &l2).unwrap().slope <= 1.0);
}

fn split_cfg(epsilon: f64, j_cut: usize) -> SplitConfig {
    SplitConfig { p: 6.0, p_tilde: 30.0, epsilon, j_cut, q: 2.0 }
}

#[test]
fn interpolation_weight_solves_its_equation() {
    let c = split_cfg(1e-3, 0);
    let th = c.theta();
    assert!((3.0 / c.p - (1.5 * th + 3.0 * (1.0 - th) / c.p_tilde)).abs() < 1e-12);
    assert!(SplitConfig { p: 2.0, ..c }.validate().is_err());
    assert!(SplitConfig { p_tilde: 4.0, ..c }.validate().is_err());
}

#[test]
fn split_is_exact_and_tail_decreases() {
    let g = grid(32);
    let lp = DyadicPartition::new(g, Profile::Smooth);
    let w0 = field(&g, 5, 0.01, 2.0);
    let idx = BesovIndex::new(0.1, 30.0, 2.0).unwrap();
    let mut prev = f64::INFINITY;
    for jc in 0..=lp.j_max() {
        let low = lp.low_pass(&w0, jc as i64).unwrap();
        let tail = lp.besov_norm(&w0.combine(1.0, &low, -1.0).unwrap(), idx).unwrap();
        assert!(tail <= prev * (1.0 + 1e-12));
        prev = tail;
    }
    let s = interpolation_split(&w0, &split_cfg(1e-3, 0), &lp).unwrap();
    assert!(s.tail_norm < 1e-3);
    let sum = s.u0.combine(1.0, &s.v0, 1.0).unwrap();
    assert!(sum.combine(1.0, &w0, -1.0).unwrap().coefficient_norm() <= 1e-15 * w0.coefficient_norm());
}

#[test]
fn band_limited_data_has_no_tail() {
    let g = grid(32);
    let lp = DyadicPartition::new(g, Profile::Smooth);
    let w0 = SpectralVectorField::from_fn(g, |x| [x[1].sin(), 0.0, x[0].cos()]);
    let s = interpolation_split(&w0, &split_cfg(1e-3, 2), &lp).unwrap();
    assert_eq!(s.j_cut, 2);
    assert!(s.v0.coefficient_norm() < 1e-15);
}

#[test]
fn unreachable_split_names_the_minimum() {
    let g = grid(16);
    let lp = DyadicPartition::with_levels(g, Profile::Smooth, 2).unwrap();
    let w0 = field(&g, 6, 1.0, 0.0);
    match interpolation_split(&w0, &split_cfg(1e-12, 0), &lp) {
        Err(Error::SplitUnreachable { target, achievable }) => {
            assert_eq!(target, 1e-12);
            assert!(achievable > 1e-12);
        }
        other => panic!("{:?}", other.map(|s| s.tail_norm)),
    }
}

#[test]
fn trace_with_equal_indices_is_the_sup_norm() {
    let g = grid(16);
    let cfg = LansConfig::new(0.2, 0.05, g).unwrap();
    let lp = DyadicPartition::new(g, Profile::Smooth);
    let u = solve_lans(&field(&g, 7, 0.1, 2.0), &cfg, &MarchConfig::new(0.02, 0.005).unwrap()).unwrap();
    let tr = higher_regularity_trace(&u, 1.5, 1.5, 2.0, &lp).unwrap();
    let idx = BesovIndex::new(1.5, 2.0, 2.0).unwrap();
    let direct = u.states()[1..].iter().map(|s| lp.besov_norm(s, idx).unwrap()).fold(0.0, f64::max);
    assert!((tr.sup - direct).abs() <= 1e-15 * direct);
}

#[test]
fn restart_at_origin_reproduces_the_run() {
    let g = grid(16);
    let cfg = LansConfig::new(0.2, 0.05, g).unwrap();
    let lp = DyadicPartition::new(g, Profile::Smooth);
    let m = MarchConfig::new(0.02, 0.005).unwrap();
    let u = solve_lans(&field(&g, 8, 0.5, 2.0), &cfg, &m).unwrap();
    let idx = BesovIndex::new(1.5, 2.0, 2.0).unwrap();
    let resolve = |s: &SpectralVectorField, t1: f64| solve_lans(s, &cfg, &MarchConfig::new(0.02 - t1, 0.005).unwrap());
    assert!(bootstrap_consistency(&u, 0.0, resolve, &lp, idx).unwrap() < 1e-14);
    let d = bootstrap_consistency(&u, 0.01, resolve, &lp, idx).unwrap();
    assert!(d < 1e-12, "{d}");
}
