use num_traits::One;
use pform_core::liealg::AlgebraKind;
use pform_core::rational::{frac, int, Rational};
use pform_gerbejet::random::{random_gauge, random_rescale, random_section, random_vect, PolyShape};
use pform_gerbejet::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sp(n: usize, p: usize) -> JetSpace {
    JetSpace::new(n, p, 8).unwrap()
}

#[test]
fn translation_by_constant_vector() {
    let s = sp(2, 2);
    let rep = ModuleRep::trivial(AlgebraKind::U1, 2, 2).unwrap();
    let xi = Generator::Vect(vec![JetPoly::scalar(s, frac(3, 2)), JetPoly::scalar(s, int(5))]);
    let phi = JetPoly::x(s, 0);
    let out = apply_generator(&rep, &xi, &phi).unwrap();
    assert_eq!(out, JetPoly::scalar(s, frac(-3, 2)));
}

#[test]
fn dilation_acts_on_s_with_unit_weight() {
    // ξ = x¹∂₁ on s¹² gives −s¹²
    let s = sp(2, 2);
    let rep = ModuleRep::trivial(AlgebraKind::U1, 2, 2).unwrap();
    let xi = Generator::Vect(vec![JetPoly::x(s, 0), JetPoly::zero(s, 1)]);
    let phi = JetPoly::s(s, &[0, 1]);
    assert_eq!(apply_generator(&rep, &xi, &phi).unwrap(), phi.neg());
}

#[test]
fn constant_u1_gauge() {
    let s = sp(3, 2);
    let rep = ModuleRep::trivial(AlgebraKind::U1, 3, 2).unwrap();
    let x = Generator::Gauge(vec![JetPoly::scalar(s, int(7))]);
    let phi = JetPoly::one(s);
    assert_eq!(apply_generator(&rep, &x, &phi).unwrap(), JetPoly::scalar(s, int(-7)));
}

#[test]
fn vect_gauge_bracket_has_s_term() {
    // hand expansion: ξ = x²∂₁, X = s¹³ ⇒ [ξ,X] = ∂₂ξ¹ s^{2ρ}ð_{1ρ} s¹³ = s²³
    let s = sp(3, 2);
    let rep = ModuleRep::trivial(AlgebraKind::U1, 3, 2).unwrap();
    let xi = Generator::Vect(vec![JetPoly::x(s, 1), JetPoly::zero(s, 1), JetPoly::zero(s, 1)]);
    let x = Generator::Gauge(vec![JetPoly::s(s, &[0, 2])]);
    match bracket(&rep, &xi, &x).unwrap() {
        Generator::Gauge(c) => assert_eq!(c[0], JetPoly::s(s, &[1, 2])),
        other => panic!("{other:?}"),
    }
    // in two dimensions the same term vanishes
    let s2 = sp(2, 2);
    let rep2 = ModuleRep::trivial(AlgebraKind::U1, 2, 2).unwrap();
    let xi2 = Generator::Vect(vec![JetPoly::x(s2, 1), JetPoly::zero(s2, 1)]);
    let x2 = Generator::Gauge(vec![JetPoly::s(s2, &[0, 1])]);
    assert!(bracket(&rep2, &xi2, &x2).unwrap().is_zero());
}

#[test]
fn rescalings_commute() {
    let s = sp(3, 2);
    let rep = ModuleRep::graded(AlgebraKind::U1, 3, 2, Rational::one()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let f = random_rescale(s, 3, &mut rng);
        let g = random_rescale(s, 3, &mut rng);
        assert!(bracket(&rep, &f, &g).unwrap().is_zero());
    }
}

#[test]
fn homomorphism_is_not_vacuous() {
    // the bracket term itself is nonzero, so a zero residual is a real cancellation
    let s = sp(3, 2);
    let rep = ModuleRep::vector(AlgebraKind::Sl2, 3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shape = PolyShape { terms: 3, max_deg: 2, x_only: false };
    let xi = random_vect(s, 2, &mut rng);
    let x = random_gauge(s, rep.dim_g(), 2, &mut rng);
    let phi = random_section(s, rep.wdim, shape, &mut rng);
    let br = bracket(&rep, &xi, &x).unwrap();
    assert!(!apply_generator(&rep, &br, &phi).unwrap().is_zero());
    assert!(homomorphism_residual(&rep, &xi, &x, &phi).unwrap().is_zero());
}

#[test]
fn overflow_is_reported() {
    let s = JetSpace::new(2, 2, 2).unwrap();
    let rep = ModuleRep::trivial(AlgebraKind::U1, 2, 2).unwrap();
    let xi = Generator::Vect(vec![JetPoly::x(s, 0).mul_var(0).unwrap(), JetPoly::zero(s, 1)]);
    let phi = JetPoly::x(s, 1).mul_var(1).unwrap();
    // ξ·∂φ stays at degree 2, but the homomorphism check needs degree 3
    let eta = Generator::Vect(vec![JetPoly::zero(s, 1), JetPoly::x(s, 1).mul_var(0).unwrap()]);
    let err = homomorphism_residual(&rep, &xi, &eta, &phi);
    assert!(matches!(err, Err(JetError::Overflow { .. })), "{err:?}");
}

#[test]
fn suite_is_exact_on_shipped_modules() {
    for (n, p) in [(2, 1), (3, 2), (4, 2)] {
        for module in [ModuleKind::Trivial, ModuleKind::Vector] {
            for algebra in [AlgebraKind::U1, AlgebraKind::Sl2] {
                let cfg = VerifyConfig { n, p, cap: 8, trials: 2, seed: 11, algebra, module };
                for r in verify_suite(&cfg).unwrap() {
                    assert_eq!(r.status, Status::ExactZero, "{cfg:?} {r:?}");
                    assert_eq!(r.trials, if r.identity == "gl-n" { 1 } else { 2 });
                }
            }
        }
    }
}

#[test]
fn suite_is_exact_on_graded_module() {
    let cfg = VerifyConfig { n: 3, p: 1, cap: 6, trials: 2, seed: 2, algebra: AlgebraKind::Sl2, module: ModuleKind::Graded };
    assert!(verify_suite(&cfg).unwrap().iter().all(|r| r.status == Status::ExactZero));
}

#[test]
fn report_serializes() {
    let cfg = VerifyConfig { n: 2, p: 2, cap: 4, trials: 1, seed: 0, algebra: AlgebraKind::U1, module: ModuleKind::Vector };
    let r = verify_identity(&cfg, "heisenberg").unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["status"], "exact-zero");
    assert_eq!(v["identity"], "heisenberg");
    assert!(v["witness"].is_null());
}
