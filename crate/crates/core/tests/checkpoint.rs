use lanslab_core::dynamics::{solve_lans, LansConfig, MarchConfig};
use lanslab_core::ensemble::{random_scalar, random_solenoidal, rng, Spectrum};
use lanslab_core::io::{load_trajectory, read_scalar_field, read_vector_field, save_trajectory, write_field, write_physical_csv};
use lanslab_core::{field::inverse_transform, Field, SpectralVectorField, TorusGrid};
use proptest::prelude::*;

#[test]
fn trajectory_checkpoint_round_trip() {
    let g = TorusGrid::new(3, 8).unwrap();
    let cfg = LansConfig::new(0.2, 0.1, g).unwrap();
    let u0 = random_solenoidal(&g, &mut rng(3), &Spectrum::dealiased(&g, 2.0));
    let traj = solve_lans(&u0, &cfg, &MarchConfig::new(0.02, 0.01).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = save_trajectory(dir.path(), &traj, Some("abc")).unwrap();
    assert_eq!(manifest.files.len(), 3);
    let back = load_trajectory(dir.path()).unwrap();
    assert_eq!(back.times(), traj.times());
    assert_eq!(back.states(), traj.states());
    assert_eq!(back.provenance(), traj.provenance());
}

#[test]
fn csv_has_header_and_one_row_per_point() {
    let g = TorusGrid::new(2, 8).unwrap();
    let u = SpectralVectorField::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]);
    let mut out = Vec::new();
    write_physical_csv(&mut out, &inverse_transform(&u)).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,u1,u2");
    assert_eq!(lines.count(), 64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn container_round_trip_is_bit_exact(seed in 0u64..1000, dim in 2usize..=3, log_n in 3u32..=4, length in 0.5f64..10.0) {
        let g = TorusGrid::new(dim, 1 << log_n).unwrap().with_box_length(length).unwrap();
        let f = random_scalar(&g, &mut rng(seed), &Spectrum::new(1.0, f64::INFINITY));
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let back = read_scalar_field(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back.grid(), f.grid());
        prop_assert_eq!(&back, &f);
        // a scalar container is not a vector field
        prop_assert!(read_vector_field(&mut buf.as_slice()).is_err());
    }
}
