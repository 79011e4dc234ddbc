use santalo_core::chamber::cell_of;
use santalo_core::continuation::{
    exponent_solution_dimension, homotopy_to_one, ml_degree, ml_solutions, numerical_patch_degree, seed_start_pair,
    track_santalo_path, ParametricSystem, TrackerOptions,
};
use santalo_core::exact::rational_vec;
use santalo_core::instances::{pentagon, random_polygon_fiber};
use santalo_core::numeric::norm;
use santalo_core::santalo::{distance, santalo_point};
use santalo_core::volume::DualVolume;

#[test]
fn start_pair_solves_system() {
    let fp = pentagon();
    let dv = DualVolume::for_fiber(&fp).unwrap();
    let ps = ParametricSystem::likelihood(&fp, &dv);
    for seed in 0..5 {
        let (x0, p0) = seed_start_pair(&ps, Some(fp.b()), seed).unwrap();
        assert!(norm(&ps.residual(&x0, &p0)) <= 1e-12);
        assert_eq!(exponent_solution_dimension(&ps, &x0), 4);
    }
}

#[test]
fn pentagon_path_endpoint() {
    let fp = pentagon();
    let cell = cell_of(fp.a(), fp.b()).unwrap();
    let x0 = santalo_point(&fp, 1e-13).unwrap().x_star;
    let b1 = rational_vec(&[(1, 1), (1, 1), (4, 5)]);
    let end = track_santalo_path(&fp, &cell, fp.b(), &x0, &b1, &TrackerOptions::default()).unwrap();
    let expected = [0.291, 0.181, 0.145, 0.237, 0.146];
    assert!(distance(&end, &expected) < 1e-3, "{end:?}");
    let direct = santalo_point(&fp.with_rhs(b1).unwrap(), 1e-13).unwrap().x_star;
    assert!(distance(&end, &direct) < 1e-8, "{end:?} vs {direct:?}");
}

#[test]
fn zero_length_path() {
    let fp = pentagon();
    let cell = cell_of(fp.a(), fp.b()).unwrap();
    let x0 = santalo_point(&fp, 1e-13).unwrap().x_star;
    let end = track_santalo_path(&fp, &cell, fp.b(), &x0, fp.b(), &TrackerOptions::default()).unwrap();
    assert_eq!(end, x0);
}

#[test]
fn pentagon_ml_degree_and_homotopy() {
    let fp = pentagon();
    let opts = TrackerOptions::with_seed(7);
    let sols = ml_solutions(&fp, &opts, None).unwrap();
    assert_eq!(sols.len(), 11);
    let dv = DualVolume::for_fiber(&fp).unwrap();
    let ps = ParametricSystem::likelihood(&fp, &dv);
    let res = homotopy_to_one(&ps, fp.b(), &sols, &opts).unwrap();
    let direct = santalo_point(&fp, 1e-13).unwrap();
    assert!(distance(&res.x_star, &direct.x_star) < 1e-8);
}

#[test]
fn small_polygon_ml_degrees() {
    for (n, expected) in [(3, 1), (4, 4)] {
        let emb = random_polygon_fiber(n, 11).unwrap();
        assert_eq!(ml_degree(&emb.fiber, &TrackerOptions::with_seed(3)).unwrap(), expected, "n = {n}");
    }
}

#[test]
fn pentagon_patch_degree() {
    let fp = pentagon();
    let cell = cell_of(fp.a(), fp.b()).unwrap();
    assert_eq!(numerical_patch_degree(fp.a(), &cell, &TrackerOptions::with_seed(5)).unwrap(), 14);
}

#[test]
fn monodromy_is_reproducible() {
    let fp = pentagon();
    let opts = TrackerOptions::with_seed(13);
    let first = ml_solutions(&fp, &opts, None).unwrap();
    let second = ml_solutions(&fp, &opts, None).unwrap();
    assert_eq!(first, second);
}

#[test]
fn counts_respect_bounds() {
    for (n, seed) in [(4, 31), (5, 32)] {
        let fp = random_polygon_fiber(n, seed).unwrap().fiber;
        let dv = DualVolume::for_fiber(&fp).unwrap();
        let bound = ParametricSystem::likelihood(&fp, &dv).bezout_bound() as usize;
        let opts = TrackerOptions::with_seed(seed);
        let ml = ml_solutions(&fp, &opts, None).unwrap();
        let cell = cell_of(fp.a(), fp.b()).unwrap();
        let patch = numerical_patch_degree(fp.a(), &cell, &opts).unwrap();
        assert!(ml.len() <= patch, "n = {n}: ML {} > patch {patch}", ml.len());
        assert!(patch <= bound, "n = {n}: patch {patch} > Bezout {bound}");
        assert!(ml.regularity.iter().all(|&s| s > 0.0));
        assert!(ml.residual_max <= 1e-10);
    }
}

#[test]
fn huge_adjoint_coefficients_stay_finite() {
    // The fiber of a 9-gon has adjoint coefficients beyond 1e150, whose
    // squares overflow in complex division.
    let fp = random_polygon_fiber(9, 109).unwrap().fiber;
    let dv = DualVolume::for_fiber(&fp).unwrap();
    let ps = ParametricSystem::likelihood(&fp, &dv);
    let (x0, p0) = seed_start_pair(&ps, Some(fp.b()), 0).unwrap();
    assert!(ps.relative_residual(&x0, &p0) <= 1e-12);
    let x = santalo_point(&fp, 1e-12).unwrap();
    let (objective, _) = ps.objective(&x.x_star);
    assert!((objective - x.objective).abs() <= 1e-9 * objective.abs().max(1.0));
}
