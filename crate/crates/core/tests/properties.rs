use nalgebra::DVector;
use proptest::prelude::*;

use liext::extension::{
    apply_gauge, build_extension, is_admissible, is_shift_isomorphism, random_admissible, random_perturbed,
    so3_kernel_couple, GaugeTransform,
};
use liext::holonomy::{parallel_transport, split_path, transport_nodes, unsplit};
use liext::liealg::cohomology_dims;
use liext::paths::{concatenate, reverse, APath};
use liext::spectral::{abutment, all_pages};
use liext::{Matrix, Rational, Scalar};

fn path_strategy(dim: usize) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -2.0..2.0f64, 0.0..6.0f64), dim)
}

fn path_from(alg: liext::liealg::LieAlgebra<f64>, n: usize, c: &[(f64, f64, f64)]) -> APath {
    let dim = alg.dim();
    APath::from_fn(alg, n, |t| DVector::from_fn(dim, |i, _| c[i].0 + c[i].1 * (c[i].2 * t).sin())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_iff_admissible(seed in any::<u64>(), perturb in any::<bool>()) {
        let cpl = if perturb { random_perturbed(seed) } else { random_admissible(seed) };
        let jac = build_extension(&cpl).total().check_jacobi().ok();
        prop_assert_eq!(jac, is_admissible(&cpl).ok());
        if !perturb {
            prop_assert!(jac);
        }
    }

    #[test]
    fn gauge_shifts_stay_admissible(seed in any::<u64>(), entries in prop::collection::vec(-4i64..=4, 12)) {
        let cpl = random_admissible(seed);
        let (nk, nb) = (cpl.kernel().dim(), cpl.base().dim());
        let delta = Matrix::from_rows((0..nk).map(|r| (0..nb).map(|c| Rational::from_i64(entries[(r * nb + c) % 12])).collect()).collect());
        let g = GaugeTransform::new(delta);
        prop_assert!(is_admissible(&apply_gauge(&cpl, &g).unwrap()).ok());
        prop_assert!(is_shift_isomorphism(&cpl, &g).unwrap());
    }

    #[test]
    fn euler_characteristic_vanishes(seed in any::<u64>()) {
        let alg = build_extension(&random_admissible(seed)).total().clone();
        let dims = cohomology_dims(&alg, None).unwrap();
        let chi: i64 = dims.iter().enumerate().map(|(k, d)| if k % 2 == 0 { *d as i64 } else { -(*d as i64) }).sum();
        prop_assert_eq!(chi, 0);
        prop_assert_eq!(dims[0], 1);
    }

    #[test]
    fn pages_abut_to_cohomology(seed in any::<u64>()) {
        let cpl = random_admissible(seed);
        prop_assert!(abutment(&cpl).unwrap().ok());
        for p in all_pages(&cpl).unwrap() {
            prop_assert!(p.d_squared_vanishes());
        }
    }

    #[test]
    fn transport_preserves_brackets(seed in any::<u64>(), c in path_strategy(3)) {
        let cpl = random_admissible(seed).to_f64();
        let a = path_from(cpl.base().clone(), 32, &c[..cpl.base().dim()]);
        for phi in transport_nodes(&cpl, &a, 256).unwrap() {
            let scale = 1.0 + phi.matrix.amax().powi(2);
            prop_assert!(phi.defect(cpl.kernel()) < 1e-8 * scale, "{} at scale {}", phi.defect(cpl.kernel()), scale);
        }
    }

    #[test]
    fn transport_there_and_back(c in path_strategy(2)) {
        let cpl = so3_kernel_couple(true).to_f64();
        let a = path_from(cpl.base().clone(), 64, &c);
        let there = parallel_transport(&cpl, &a, 1.0, 512).unwrap().matrix;
        let back = parallel_transport(&cpl, &reverse(&a), 1.0, 512).unwrap().matrix;
        prop_assert!((back * there - nalgebra::DMatrix::identity(3, 3)).amax() < 1e-8);
    }

    #[test]
    fn split_roundtrip(c in path_strategy(5)) {
        let cpl = so3_kernel_couple(true).to_f64();
        let a = path_from(build_extension(&cpl).total().clone(), 128, &c);
        let back = unsplit(&cpl, &split_path(&cpl, &a, 256).unwrap(), 256).unwrap();
        prop_assert!(back.distance(&a).unwrap() < 1e-10);
    }

    #[test]
    fn concatenation_adds_abelian_integrals(c1 in path_strategy(2), c2 in path_strategy(2)) {
        let alg = liext::liealg::abelian(2).to_f64();
        let (a1, a2) = (path_from(alg.clone(), 64, &c1), path_from(alg, 64, &c2));
        let sum = a1.integral() + a2.integral();
        prop_assert!((concatenate(&a1, &a2).unwrap().integral() - sum).amax() < 1e-6);
    }
}
