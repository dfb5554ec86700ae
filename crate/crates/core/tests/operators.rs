use std::f64::consts::PI;

use lanslab_core::ensemble::{random_scalar, random_solenoidal, random_vector, rng, Spectrum};
use lanslab_core::spectral::{
    dealias, def_rot, divergence, gradient, helmholtz_apply, helmholtz_inverse, inner_product, is_dealiased, laplacian,
    laplacian_power, leray_project, lp_norm, scalar_gradient, sobolev_norm,
};
use lanslab_core::{Field, ScalarField, SpectralVectorField, TorusGrid};
use proptest::prelude::*;

fn grid3(n: usize) -> TorusGrid {
    TorusGrid::new(3, n).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn gradient_of_product_of_sines() {
    let g = grid3(16);
    let f = ScalarField::from_fn(g, |x| (2.0 * x[0]).sin() * x[2].cos());
    let grad = scalar_gradient(&f);
    let expect = SpectralVectorField::from_fn(g, |x| {
        [2.0 * (2.0 * x[0]).cos() * x[2].cos(), 0.0, -(2.0 * x[0]).sin() * x[2].sin()]
    });
    assert!(grad.combine(1.0, &expect, -1.0).unwrap().coefficient_norm() < 1e-13);
}

#[test]
fn deformation_and_rotation_of_a_shear() {
    let g = grid3(16);
    // u = (sin x2, 0, 0): ∂_2 u_1 = cos x2
    let u = SpectralVectorField::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]);
    let (d, r) = def_rot(&u);
    let c = ScalarField::from_fn(g, |x| 0.5 * x[1].cos());
    let diff = |a: &ScalarField, b: &ScalarField, s: f64| a.combine(1.0, b, s).unwrap().coefficient_norm();
    assert!(diff(d.get(0, 1), &c, -1.0) < 1e-14);
    assert!(diff(d.get(1, 0), &c, -1.0) < 1e-14);
    assert!(diff(r.get(0, 1), &c, -1.0) < 1e-14);
    assert!(diff(r.get(1, 0), &c, 1.0) < 1e-14);
    assert!(d.get(0, 0).coefficient_norm() < 1e-14);
}

#[test]
fn helmholtz_inverse_of_a_single_mode() {
    let g = grid3(16);
    let alpha = 0.3;
    let f = ScalarField::from_fn(g, |x| (3.0 * x[1]).cos());
    let h = helmholtz_inverse(&f, alpha).unwrap();
    let expect = f.scaled(1.0 / (1.0 + alpha * alpha * 9.0));
    assert!(h.combine(1.0, &expect, -1.0).unwrap().coefficient_norm() < 1e-15);
    assert!(helmholtz_inverse(&f, -1.0).is_err());
}

#[test]
fn fractional_laplacian_of_single_mode() {
    let g = grid3(16);
    let f = ScalarField::from_fn(g, |x| (2.0 * x[0] + x[1]).sin());
    let h = laplacian_power(&f, 0.75).unwrap();
    assert!(h.combine(1.0, &f, -(5f64.sqrt().powf(0.75))).unwrap().coefficient_norm() < 1e-13);
    let shifted = f.combine(1.0, &ScalarField::from_fn(g, |_| 1.0), 1.0).unwrap();
    assert!(laplacian_power(&shifted, -0.5).is_err());
}

#[test]
fn energy_of_one_mode_matches_closed_form() {
    let g = grid3(16);
    let a = 0.7;
    // u = (0, a cos 2x1, 0): ‖u‖² = a² (2π)³/2, ‖∇u‖² = 4 a² (2π)³/2
    let u = SpectralVectorField::from_fn(g, |x| [0.0, a * (2.0 * x[0]).cos(), 0.0]);
    let vol = (2.0 * PI).powi(3);
    let l2 = lp_norm(&u, 2.0).unwrap();
    assert!(close(l2 * l2, a * a * vol / 2.0, 1e-12));
    let h1 = sobolev_norm(&u, 1.0, true);
    assert!(close(h1 * h1, 4.0 * a * a * vol / 2.0, 1e-12));
    let expect = a * a * vol / 2.0 * (1.0 + 4.0);
    assert!(close(lanslab_core::apriori::energy_pair(&u, 1.0).unwrap(), expect, 1e-10));
    assert!(close(lanslab_core::apriori::energy_pair(&u, 0.0).unwrap(), l2 * l2, 1e-15));
}

#[test]
fn sup_norm_on_the_grid() {
    let g = grid3(16);
    let f = ScalarField::from_fn(g, |x| 2.5 * x[0].cos());
    assert!(close(lp_norm(&f, f64::INFINITY).unwrap(), 2.5, 1e-14));
    assert!(lp_norm(&f, 0.5).is_err());
}

#[test]
fn two_dimensional_projection() {
    let g = TorusGrid::new(2, 16).unwrap();
    let u = random_vector(&g, &mut rng(1), &Spectrum::dealiased(&g, 1.0));
    let p = leray_project(&u);
    assert!(divergence(&p).coefficient_norm() < 1e-13 * u.coefficient_norm());
}

fn random_field(seed: u64) -> SpectralVectorField {
    let g = grid3(16);
    random_vector(&g, &mut rng(seed), &Spectrum::new(1.0, f64::INFINITY))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn leray_is_an_idempotent_projection(seed in 0u64..10_000) {
        let u = random_field(seed);
        let p = leray_project(&u);
        let pp = leray_project(&p);
        prop_assert!(pp.combine(1.0, &p, -1.0).unwrap().coefficient_norm() <= 1e-14 * u.coefficient_norm());
        prop_assert!(divergence(&p).coefficient_norm() <= 1e-12 * u.coefficient_norm());
        // orthogonal complement: ⟨Pu, u - Pu⟩ = 0
        let rest = u.combine(1.0, &p, -1.0).unwrap();
        let ip = inner_product(&p, &rest).unwrap();
        prop_assert!(ip.abs() <= 1e-12 * inner_product(&u, &u).unwrap());
    }

    #[test]
    fn parseval_matches_quadrature(seed in 0u64..10_000) {
        let u = random_field(seed);
        let quad = lp_norm(&u, 2.0).unwrap();
        let spectral = inner_product(&u, &u).unwrap().sqrt();
        prop_assert!(close(quad, spectral, 1e-12));
        prop_assert!(close(sobolev_norm(&u, 0.0, false), spectral, 1e-12));
    }

    #[test]
    fn derivatives_preserve_the_zero_mean(seed in 0u64..10_000) {
        let g = grid3(16);
        let f = random_scalar(&g, &mut rng(seed), &Spectrum::new(1.0, f64::INFINITY));
        let shifted = f.combine(1.0, &ScalarField::from_fn(g, |_| 1.0), 3.0).unwrap();
        prop_assert!(laplacian(&shifted).mean().abs() < 1e-14);
        let grad = scalar_gradient(&shifted);
        for c in grad.components() {
            prop_assert!(c.mean().abs() < 1e-14);
        }
        prop_assert!((dealias(&shifted).mean() - shifted.mean()).abs() < 1e-14);
        prop_assert!(close(helmholtz_inverse(&shifted, 0.4).unwrap().mean(), shifted.mean(), 1e-14));
    }

    #[test]
    fn helmholtz_round_trip(seed in 0u64..10_000, alpha in 0.0f64..2.0) {
        let u = random_field(seed);
        let back = helmholtz_apply(&helmholtz_inverse(&u, alpha).unwrap(), alpha).unwrap();
        prop_assert!(back.combine(1.0, &u, -1.0).unwrap().coefficient_norm() <= 1e-12 * u.coefficient_norm());
    }

    #[test]
    fn gradient_splits_into_deformation_and_rotation(seed in 0u64..10_000) {
        let u = random_field(seed);
        let grad = gradient(&u);
        let (d, r) = def_rot(&u);
        for i in 0..3 {
            for j in 0..3 {
                let sum = d.get(i, j).combine(1.0, r.get(i, j), 1.0).unwrap();
                prop_assert!(sum.combine(1.0, grad.get(i, j), -1.0).unwrap().coefficient_norm() < 1e-14 * (1.0 + u.coefficient_norm()));
                prop_assert!(d.get(i, j).combine(1.0, d.get(j, i), -1.0).unwrap().coefficient_norm() == 0.0);
            }
        }
    }

    #[test]
    fn solenoidal_ensemble_is_truncated_and_divergence_free(seed in 0u64..10_000) {
        let g = grid3(16);
        let u = random_solenoidal(&g, &mut rng(seed), &Spectrum::dealiased(&g, 2.0));
        prop_assert!(is_dealiased(&u));
        prop_assert!(divergence(&u).coefficient_norm() <= 1e-14 * u.coefficient_norm());
        prop_assert!(u.conjugate_symmetry_defect() < 1e-15);
    }
}
