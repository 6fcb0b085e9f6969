use std::f64::consts::PI;

use num_complex::Complex64;
use pform_core::lattice::links::random_gauge;
use pform_core::lattice::{wrap_angle, AbelianPlaquetteAngles, GaugeGroup, LatticeGeometry, LinkField};
use pform_core::liealg::{build_algebra, AlgebraKind};
use pform_core::multitensor::{CMat, SitedOperator};
use pform_core::rational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_mat(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn bracket(f: &[Vec<Vec<f64>>], x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                out[c] += x[a] * y[b] * f[a][b][c];
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wrap_angle_is_canonical(theta in -1e3f64..1e3) {
        let w = wrap_angle(theta);
        prop_assert!(w > -PI && w <= PI);
        let turns = (theta - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn sited_commutator_matches_dense(seed in any::<u64>(), sa in 0usize..3, sb in 0usize..3) {
        let pairs = [vec![1, 2], vec![1, 3], vec![2, 3]];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = SitedOperator::new(vec![2; 3], pairs[sa].clone(), random_mat(&mut rng, 4)).unwrap();
        let b = SitedOperator::new(vec![2; 3], pairs[sb].clone(), random_mat(&mut rng, 4)).unwrap();
        let (fa, fb) = (a.to_full_matrix(), b.to_full_matrix());
        let dense = &fa * &fb - &fb * &fa;
        prop_assert!((a.commutator(&b).unwrap().to_full_matrix() - dense).norm() < 1e-12);
    }

    #[test]
    fn bracket_is_antisymmetric_and_jacobi(
        alg in prop::sample::select(vec![AlgebraKind::Sl2, AlgebraKind::Su2, AlgebraKind::GlN(3)]),
        seed in any::<u64>(),
    ) {
        let (spec, _) = build_algebra(alg).unwrap();
        let f: Vec<Vec<Vec<f64>>> =
            spec.f.iter().map(|m| m.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = || -> Vec<f64> { (0..spec.dim).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let (x, y, z) = (v(), v(), v());
        let xy = bracket(&f, &x, &y);
        let yx = bracket(&f, &y, &x);
        prop_assert!(xy.iter().zip(&yx).all(|(a, b)| (a + b).abs() < 1e-12));
        let j1 = bracket(&f, &x, &bracket(&f, &y, &z));
        let j2 = bracket(&f, &y, &bracket(&f, &z, &x));
        let j3 = bracket(&f, &z, &bracket(&f, &x, &y));
        prop_assert!((0..spec.dim).all(|c| (j1[c] + j2[c] + j3[c]).abs() < 1e-12));
    }

    #[test]
    fn wilson_action_is_gauge_invariant(
        seed in any::<u64>(),
        group in prop::sample::select(vec![GaugeGroup::U1, GaugeGroup::SU2]),
        l in 2usize..4,
    ) {
        let g = LatticeGeometry::new(vec![l, 3, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = LinkField::random(g.clone(), group, &mut rng);
        let moved = field.gauge_transform(&random_gauge(&mut rng, &g, group)).unwrap();
        let (s0, s1) = (field.wilson_action(1.3), moved.wilson_action(1.3));
        prop_assert!((s0 - s1).abs() < 1e-10 * s0.abs().max(1.0));
    }

    #[test]
    fn abelian_two_form_action_and_bianchi(seed in any::<u64>()) {
        let g = LatticeGeometry::new(vec![3, 2, 3, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let th = AbelianPlaquetteAngles::random(g.clone(), &mut rng);
        let lambda: Vec<f64> = (0..g.num_links()).map(|_| rng.random_range(-PI..PI)).collect();
        let moved = th.gauge_transform(&lambda).unwrap();
        prop_assert!((th.action(0.7) - moved.action(0.7)).abs() < 1e-10);
        for x in 0..g.num_sites() {
            prop_assert!(wrap_angle(th.bianchi_sum(x, [0, 1, 2, 3])).abs() < 1e-12);
        }
    }
}
