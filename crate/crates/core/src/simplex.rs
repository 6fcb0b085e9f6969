//! Residuals of the quantum and classical Yang–Baxter equations and of the
//! classical tetrahedron equation, plus the trigonometric solution family.
//!
//! The tetrahedron space is `V_12⊗V_13⊗V_14⊗V_23⊗V_24⊗V_34`, slots in that
//! lexicographic order. `A_{μνρ}` lives on the slots `μν, μρ, νρ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CoreError, Result};
use crate::liealg::{casimir_tensor, MatrixRep};
use crate::multitensor::SitedOperator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub u: Vec<f64>,
}

impl SpectralPoint {
    pub fn new(u: Vec<f64>) -> Self {
        Self { u }
    }

    pub fn distinct(&self) -> bool {
        self.u.iter().enumerate().all(|(i, a)| self.u[i + 1..].iter().all(|b| a != b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: String,
    pub residual_abs: f64,
    pub residual_rel: f64,
    pub params: serde_json::Value,
}

fn check_support(op: &SitedOperator, slots: usize, expected: &[usize]) -> Result<()> {
    if op.num_slots() != slots {
        return Err(CoreError::DimMismatch(format!(
            "expected an operator on {slots} slots, got {}",
            op.num_slots()
        )));
    }
    // an operator acting trivially on part of its nominal support is fine
    if op.support().iter().all(|s| expected.contains(s)) {
        Ok(())
    } else {
        Err(CoreError::WrongSupport { expected: expected.to_vec(), got: op.support().to_vec() })
    }
}

fn rel(abs: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        abs / scale
    } else {
        0.0
    }
}

/// Embed a two-slot operator on slots `(i, j)` of a `k`-fold product.
pub fn place_pair(op: &SitedOperator, k: usize, i: usize, j: usize) -> Result<SitedOperator> {
    if op.num_slots() != 2 {
        return Err(CoreError::DimMismatch("expected an operator on V⊗V".into()));
    }
    let d = op.slot_dims()[0];
    let full = op.promote(&[1, 2])?;
    full.embed(&vec![d; k], &[i, j])
}

/// `(‖R12R13R23 − R23R13R12‖_F, relative)`.
pub fn qybe_parts(r12: &SitedOperator, r13: &SitedOperator, r23: &SitedOperator) -> Result<(f64, f64)> {
    check_support(r12, 3, &[1, 2])?;
    check_support(r13, 3, &[1, 3])?;
    check_support(r23, 3, &[2, 3])?;
    let lhs = r12.multiply(r13)?.multiply(r23)?;
    let rhs = r23.multiply(r13)?.multiply(r12)?;
    let abs = lhs.sub(&rhs)?.frobenius_norm();
    Ok((abs, rel(abs, lhs.frobenius_norm() + rhs.frobenius_norm())))
}

pub fn qybe_residual(r12: &SitedOperator, r13: &SitedOperator, r23: &SitedOperator) -> Result<f64> {
    Ok(qybe_parts(r12, r13, r23)?.0)
}

/// `[A12,A13] + [A12,A23] + [A13,A23]` as an operator.
pub fn cybe_combination(a12: &SitedOperator, a13: &SitedOperator, a23: &SitedOperator) -> Result<SitedOperator> {
    check_support(a12, 3, &[1, 2])?;
    check_support(a13, 3, &[1, 3])?;
    check_support(a23, 3, &[2, 3])?;
    a12.commutator(a13)?.add(&a12.commutator(a23)?)?.add(&a13.commutator(a23)?)
}

pub fn cybe_parts(a12: &SitedOperator, a13: &SitedOperator, a23: &SitedOperator) -> Result<(f64, f64)> {
    let abs = cybe_combination(a12, a13, a23)?.frobenius_norm();
    let (n12, n13, n23) = (a12.frobenius_norm(), a13.frobenius_norm(), a23.frobenius_norm());
    Ok((abs, rel(abs, 2.0 * (n12 * n13 + n12 * n23 + n13 * n23))))
}

pub fn cybe_residual(a12: &SitedOperator, a13: &SitedOperator, a23: &SitedOperator) -> Result<f64> {
    Ok(cybe_parts(a12, a13, a23)?.0)
}

/// `t / (u − v)` with `t` the quadratic Casimir element of `rep`.
pub fn trig_r(rep: &MatrixRep, u: f64, v: f64) -> Result<SitedOperator> {
    if u == v {
        return Err(CoreError::SingularPoint(u));
    }
    Ok(casimir_tensor(rep)?.scale(Complex64::new(1.0 / (u - v), 0.0)))
}

/// The three CYBE operands `A_ij = r(u_i, u_j)` on `V⊗3`.
pub fn trig_triple(rep: &MatrixRep, u: &SpectralPoint) -> Result<[SitedOperator; 3]> {
    if u.u.len() != 3 {
        return Err(CoreError::InvalidParameter(format!("need 3 spectral parameters, got {}", u.u.len())));
    }
    let r = |i: usize, j: usize| -> Result<SitedOperator> {
        place_pair(&trig_r(rep, u.u[i - 1], u.u[j - 1])?, 3, i, j)
    };
    Ok([r(1, 2)?, r(1, 3)?, r(2, 3)?])
}

pub fn cybe_report(rep: &MatrixRep, u: &SpectralPoint) -> Result<ResidualReport> {
    let [a12, a13, a23] = trig_triple(rep, u)?;
    let (abs, r) = cybe_parts(&a12, &a13, &a23)?;
    Ok(ResidualReport {
        equation: "cybe".into(),
        residual_abs: abs,
        residual_rel: r,
        params: json!({ "rep": rep.algebra.name, "u": u.u }),
    })
}

/// Evaluate the trigonometric CYBE residual on many spectral triples; the
/// output order matches the input.
pub fn cybe_sweep(rep: &MatrixRep, points: &[SpectralPoint]) -> Result<Vec<ResidualReport>> {
    points.par_iter().map(|u| cybe_report(rep, u)).collect()
}

/// The four triples in the order `123, 124, 134, 234`.
pub const TETRA_TRIPLES: [[usize; 3]; 4] = [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]];

/// Slot (1-based) of the pair `μν`, `μ<ν`, in the lexicographic tetrahedron order.
pub fn pair_slot(mu: usize, nu: usize) -> usize {
    let (a, b) = if mu < nu { (mu, nu) } else { (nu, mu) };
    const PAIRS: [(usize, usize); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
    PAIRS.iter().position(|&p| p == (a, b)).expect("pair of distinct indices in 1..=4") + 1
}

/// Slots `μν, μρ, νρ` of `A_{μνρ}`, in that (increasing) order.
pub fn triple_slots(t: [usize; 3]) -> [usize; 3] {
    [pair_slot(t[0], t[1]), pair_slot(t[0], t[2]), pair_slot(t[1], t[2])]
}

/// `A_{μνρ}` indexed like [`TETRA_TRIPLES`].
#[derive(Debug, Clone)]
pub struct TetraFamily {
    pub ops: [SitedOperator; 4],
}

impl TetraFamily {
    pub fn new(ops: [SitedOperator; 4]) -> Result<Self> {
        for (op, t) in ops.iter().zip(TETRA_TRIPLES) {
            check_support(op, 6, &triple_slots(t))?;
        }
        Ok(Self { ops })
    }

    /// Embed four operators on `V⊗3` (local slots `μν, μρ, νρ`) into `V^{⊗6}`.
    pub fn from_local(local: [SitedOperator; 4]) -> Result<Self> {
        let mut out = Vec::with_capacity(4);
        for (op, t) in local.iter().zip(TETRA_TRIPLES) {
            if op.num_slots() != 3 {
                return Err(CoreError::DimMismatch("local tetrahedron operators act on V⊗3".into()));
            }
            let d = op.slot_dims()[0];
            let full = op.promote(&[1, 2, 3])?;
            out.push(full.embed(&[d; 6], &triple_slots(t))?);
        }
        let ops: [SitedOperator; 4] = out.try_into().expect("four operators");
        Self::new(ops)
    }

    pub fn combination(&self) -> Result<SitedOperator> {
        let a = &self.ops;
        let mut acc = a[0].commutator(&a[1])?;
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            acc = acc.add(&a[i].commutator(&a[j])?)?;
        }
        Ok(acc)
    }
}

pub fn tetra_classical_parts(a: &TetraFamily) -> Result<(f64, f64)> {
    let abs = a.combination()?.frobenius_norm();
    let norms: Vec<f64> = a.ops.iter().map(SitedOperator::frobenius_norm).collect();
    let mut scale = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            scale += 2.0 * norms[i] * norms[j];
        }
    }
    Ok((abs, rel(abs, scale)))
}

pub fn tetra_classical_residual(a: &TetraFamily) -> Result<f64> {
    Ok(tetra_classical_parts(a)?.0)
}

/// `A_{μνρ} = B_12 + B_13 + B_23` on the local space `V_μν⊗V_μρ⊗V_νρ`,
/// where the local slot pair `(a,b)` uses the spectral parameters of the
/// corresponding lattice directions: `B_ab = b(u_{t_a}, u_{t_b})` with
/// `t = (μ,ν,ρ)`.
pub fn tetra_ansatz<F>(b: F, u: &SpectralPoint) -> Result<(TetraFamily, ResidualReport)>
where
    F: Fn(f64, f64) -> Result<SitedOperator>,
{
    if u.u.len() != 4 {
        return Err(CoreError::InvalidParameter(format!("need 4 spectral parameters, got {}", u.u.len())));
    }
    let mut local = Vec::with_capacity(4);
    for t in TETRA_TRIPLES {
        let mut sum: Option<SitedOperator> = None;
        for (la, lb) in [(1, 2), (1, 3), (2, 3)] {
            let bab = b(u.u[t[la - 1] - 1], u.u[t[lb - 1] - 1])?;
            if bab.num_slots() != 2 {
                return Err(CoreError::InvalidParameter("slot labeling: B must act on V⊗V".into()));
            }
            let placed = place_pair(&bab, 3, la, lb)?;
            sum = Some(match sum {
                None => placed,
                Some(s) => s.add(&placed)?,
            });
        }
        local.push(sum.expect("three terms"));
    }
    let local: [SitedOperator; 4] = local.try_into().expect("four operators");
    let fam = TetraFamily::from_local(local)?;
    let (abs, r) = tetra_classical_parts(&fam)?;
    let report = ResidualReport {
        equation: "tetra-classical-ansatz".into(),
        residual_abs: abs,
        residual_rel: r,
        params: json!({ "u": u.u }),
    };
    Ok((fam, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_algebra, AlgebraKind};
    use crate::multitensor::{kron, swap_matrix, CMat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mat(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        CMat::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn pair(m: CMat, i: usize, j: usize, k: usize) -> SitedOperator {
        let d = (m.nrows() as f64).sqrt().round() as usize;
        place_pair(&SitedOperator::full(vec![d, d], m).unwrap(), k, i, j).unwrap()
    }

    /// Build `X ⊗ Y ⊗ Id` style operators on `V⊗3` directly with kron, as an oracle for `place_pair`.
    fn dense_12(m: &CMat, d: usize) -> CMat {
        kron(m, &CMat::identity(d, d))
    }

    #[test]
    fn identity_and_swap_solve_qybe() {
        let id = SitedOperator::identity(vec![2, 2, 2]);
        assert_eq!(qybe_residual(&id, &id, &id).unwrap(), 0.0);
        let p = swap_matrix(2);
        let (r12, r13, r23) = (pair(p.clone(), 1, 2, 3), pair(p.clone(), 1, 3, 3), pair(p, 2, 3, 3));
        // dense oracle: P12 P13 P23 and P23 P13 P12 both equal the reversal permutation
        let lhs = r12.to_full_matrix() * r13.to_full_matrix() * r23.to_full_matrix();
        let rhs = r23.to_full_matrix() * r13.to_full_matrix() * r12.to_full_matrix();
        assert!((&lhs - &rhs).norm() < 1e-14);
        assert!(qybe_residual(&r12, &r13, &r23).unwrap() < 1e-14);
    }

    #[test]
    fn place_pair_matches_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_mat(&mut rng, 4);
        let a12 = pair(m.clone(), 1, 2, 3);
        assert!((a12.to_full_matrix() - dense_12(&m, 2)).norm() < 1e-14);
        // slots (2,3): Id ⊗ m
        let a23 = pair(m.clone(), 2, 3, 3);
        assert!((a23.to_full_matrix() - kron(&CMat::identity(2, 2), &m)).norm() < 1e-14);
        // slots (1,3) = P23 (m⊗Id) P23
        let p23 = kron(&CMat::identity(2, 2), &swap_matrix(2));
        let a13 = pair(m.clone(), 1, 3, 3);
        assert!((a13.to_full_matrix() - &p23 * dense_12(&m, 2) * &p23).norm() < 1e-14);
    }

    #[test]
    fn random_operators_violate_qybe() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = pair(random_mat(&mut rng, 4), 1, 2, 3);
        let s = pair(random_mat(&mut rng, 4), 1, 3, 3);
        let t = pair(random_mat(&mut rng, 4), 2, 3, 3);
        assert!(qybe_residual(&r, &s, &t).unwrap() > 1e-3);
    }

    #[test]
    fn wrong_support_is_rejected() {
        let p = swap_matrix(2);
        let a = pair(p.clone(), 1, 2, 3);
        let b = pair(p, 2, 3, 3);
        assert!(matches!(qybe_residual(&b, &a, &a), Err(CoreError::WrongSupport { .. })));
        assert!(matches!(cybe_residual(&a, &b, &b), Err(CoreError::WrongSupport { .. })));
    }

    #[test]
    fn trig_r_definition_and_antisymmetry() {
        let (_, rep) = build_algebra(AlgebraKind::Sl2).unwrap();
        let t = casimir_tensor(&rep).unwrap();
        let r = trig_r(&rep, 2.0, 1.0).unwrap();
        assert!((r.data() - t.data()).norm() < 1e-15);
        let r1 = trig_r(&rep, 0.3, 1.7).unwrap();
        let r2 = trig_r(&rep, 1.7, 0.3).unwrap();
        assert!(r1.add(&r2).unwrap().frobenius_norm() < 1e-15);
        let scaled = r1.scale(Complex64::new(0.3 - 1.7, 0.0));
        assert!((scaled.data() - t.data()).norm() < 1e-14);
        assert!(matches!(trig_r(&rep, 1.0, 1.0), Err(CoreError::SingularPoint(_))));
    }

    #[test]
    fn cybe_trivial_cases() {
        let z = SitedOperator::zero(vec![2, 2, 2]);
        assert_eq!(cybe_residual(&z, &z, &z).unwrap(), 0.0);
        let (_, rep) = build_algebra(AlgebraKind::U1).unwrap();
        let [a, b, c] = trig_triple(&rep, &SpectralPoint::new(vec![0.0, 1.0, 3.0])).unwrap();
        assert!(cybe_residual(&a, &b, &c).unwrap() < 1e-15);
    }

    #[test]
    fn cybe_trig_family_su2_and_gl() {
        for kind in [AlgebraKind::Sl2, AlgebraKind::Su2, AlgebraKind::GlN(2), AlgebraKind::GlN(3)] {
            let (_, rep) = build_algebra(kind).unwrap();
            let rep_ = cybe_report(&rep, &SpectralPoint::new(vec![0.3, 1.7, 2.9])).unwrap();
            assert!(rep_.residual_abs < 1e-10, "{kind}: {}", rep_.residual_abs);
        }
    }

    #[test]
    fn cybe_sweep_preserves_order() {
        let (_, rep) = build_algebra(AlgebraKind::Sl2).unwrap();
        let pts: Vec<_> = (0..8).map(|k| SpectralPoint::new(vec![k as f64, k as f64 + 0.5, -1.0])).collect();
        let out = cybe_sweep(&rep, &pts).unwrap();
        for (p, r) in pts.iter().zip(&out) {
            assert_eq!(r.params["u"][0].as_f64().unwrap(), p.u[0]);
        }
    }

    #[test]
    fn cybe_is_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = pair(random_mat(&mut rng, 4), 1, 2, 3);
        let b = pair(random_mat(&mut rng, 4), 1, 3, 3);
        let c = pair(random_mat(&mut rng, 4), 2, 3, 3);
        let base = cybe_residual(&a, &b, &c).unwrap();
        for lambda in [2.0, 1.0 / 3.0] {
            let s = Complex64::new(lambda, 0.0);
            let r = cybe_residual(&a.scale(s), &b.scale(s), &c.scale(s)).unwrap();
            assert!((r - lambda * lambda * base).abs() < 1e-12 * base.max(1.0));
        }
    }

    #[test]
    fn pair_slots_are_lexicographic() {
        assert_eq!(pair_slot(1, 2), 1);
        assert_eq!(pair_slot(3, 4), 6);
        assert_eq!(pair_slot(4, 2), 5);
        assert_eq!(triple_slots([1, 2, 4]), [1, 3, 5]);
        assert_eq!(triple_slots([2, 3, 4]), [4, 5, 6]);
    }

    #[test]
    fn tetra_trivial_and_commuting() {
        let z = SitedOperator::zero(vec![2; 3]);
        let fam = TetraFamily::from_local([z.clone(), z.clone(), z.clone(), z]).unwrap();
        assert_eq!(tetra_classical_residual(&fam).unwrap(), 0.0);
        // diagonal operators commute
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let diag = |rng: &mut ChaCha8Rng| {
            let m = CMat::from_fn(8, 8, |i, j| {
                if i == j {
                    Complex64::new(rng.random_range(-1.0..1.0), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            SitedOperator::full(vec![2; 3], m).unwrap()
        };
        let fam = TetraFamily::from_local([diag(&mut rng), diag(&mut rng), diag(&mut rng), diag(&mut rng)]).unwrap();
        assert!(tetra_classical_residual(&fam).unwrap() < 1e-12);
    }

    #[test]
    fn tetra_support_is_checked() {
        let p = SitedOperator::full(vec![2; 2], swap_matrix(2)).unwrap();
        let wrong = p.promote(&[1, 2]).unwrap().embed(&[2; 6], &[1, 6]).unwrap();
        let z = SitedOperator::zero(vec![2; 6]);
        let err = TetraFamily::new([wrong, z.clone(), z.clone(), z]);
        assert!(matches!(err, Err(CoreError::WrongSupport { .. })));
    }

    #[test]
    fn tetra_ansatz_trivial_and_abelian() {
        let zero = |_: f64, _: f64| Ok(SitedOperator::zero(vec![2, 2]));
        let (_, r) = tetra_ansatz(zero, &SpectralPoint::new(vec![0.0, 1.0, 2.0, 4.0])).unwrap();
        assert_eq!(r.residual_abs, 0.0);
        let (_, u1) = build_algebra(AlgebraKind::U1).unwrap();
        let (_, r) = tetra_ansatz(|a, b| trig_r(&u1, a, b), &SpectralPoint::new(vec![0.0, 1.0, 2.0, 4.0])).unwrap();
        assert!(r.residual_abs < 1e-15);
    }

    #[test]
    fn tetra_ansatz_trig_is_finite() {
        let (_, rep) = build_algebra(AlgebraKind::Sl2).unwrap();
        let (fam, r) = tetra_ansatz(|a, b| trig_r(&rep, a, b), &SpectralPoint::new(vec![0.0, 1.0, 2.0, 4.0])).unwrap();
        assert!(r.residual_abs.is_finite());
        // cross-check the combination against a dense 64×64 evaluation
        let dense: Vec<CMat> = fam.ops.iter().map(|o| o.to_full_matrix()).collect();
        let mut acc = CMat::zeros(64, 64);
        for i in 0..4 {
            for j in i + 1..4 {
                acc += &dense[i] * &dense[j] - &dense[j] * &dense[i];
            }
        }
        assert!((acc.norm() - r.residual_abs).abs() < 1e-12);
    }
}
