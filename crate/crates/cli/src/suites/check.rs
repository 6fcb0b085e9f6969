use pform_core::lattice::links::random_gl;
use pform_core::lattice::plaquettes::distance_from_identity;
use pform_core::lattice::{LatticeGeometry, PlaquetteField};
use pform_core::liealg::{antisymmetry_residual, build_algebra, casimir_tensor, jacobi_residual, MatrixRep};
use pform_core::multitensor::{kron, swap_matrix, CMat, SitedOperator};
use pform_core::simplex::{place_pair, qybe_residual, tetra_ansatz, trig_r, SpectralPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{parse_algebra, rat_value};
use crate::args::{AlgebraArgs, TetraArgs, YbeArgs};
use crate::error::{CliError, Result};
use crate::report::{Check, Outcome};

pub const CYBE_TOL: f64 = 1e-10;
pub const QYBE_TOL: f64 = 1e-10;
pub const CASIMIR_TOL: f64 = 1e-12;
pub const COMPLEX_REP_TOL: f64 = 1e-13;
/// Random spectral values closer than this are redrawn.
pub const MIN_GAP: f64 = 0.1;

pub fn algebra(a: &AlgebraArgs) -> Result<Outcome> {
    let kind = parse_algebra(a.algebra.as_deref().unwrap_or("sl2"))?;
    let (spec, rep) = build_algebra(kind)?;
    let mut checks = vec![
        Check::exact_zero("jacobi", rat_value(&jacobi_residual(&spec)), None),
        Check::exact_zero("antisymmetry", rat_value(&antisymmetry_residual(&spec)), None),
    ];
    match rep.exact_relation_residual() {
        Some(r) => checks.push(Check::exact_zero("representation-relations", rat_value(&r), None)),
        None => checks.push(Check::below("representation-relations", rep.relation_residual(), COMPLEX_REP_TOL)),
    }
    checks.push(Check::holds("metric-invertible", rep.inverse_metric().is_ok()));
    if rep.inverse_metric().is_ok() {
        checks.push(Check::below("casimir-invariance", casimir_invariance(&rep)?, CASIMIR_TOL));
    }
    let results = json!({
        "algebra": spec.name,
        "dim": spec.dim,
        "rep_dim": rep.d,
        "metric": spec.metric,
        "killing": spec.killing.iter().map(|r| r.iter().map(rat_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    Ok(Outcome { results, checks })
}

/// `max_a ‖[t, J^a⊗1 + 1⊗J^a]‖_F`.
pub fn casimir_invariance(rep: &MatrixRep) -> Result<f64> {
    let t = casimir_tensor(rep)?;
    let id = CMat::identity(rep.d, rep.d);
    let mut worst = 0.0f64;
    for j in &rep.generators {
        let d = SitedOperator::full(vec![rep.d, rep.d], kron(j, &id) + kron(&id, j))?;
        worst = worst.max(t.commutator(&d)?.frobenius_norm());
    }
    Ok(worst)
}

/// Points from `u` (chunks of `k`) followed by `extra` random ones.
fn spectral_points(u: Option<&[f64]>, default: &[f64], k: usize, extra: usize, seed: u64) -> Result<Vec<SpectralPoint>> {
    let u = u.unwrap_or(if extra > 0 { &[] } else { default });
    if u.len() % k != 0 {
        return Err(CliError::Config(format!("--u needs a multiple of {k} values, got {}", u.len())));
    }
    let mut pts: Vec<SpectralPoint> = u.chunks(k).map(|c| SpectralPoint::new(c.to_vec())).collect();
    for p in &pts {
        if !p.distinct() {
            return Err(CliError::Config(format!("spectral parameters {:?} must be distinct", p.u)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while pts.len() < u.len() / k + extra {
        let v: Vec<f64> = (0..k).map(|_| rng.random_range(-10.0..10.0)).collect();
        let ok = (0..k).all(|i| (i + 1..k).all(|j| (v[i] - v[j]).abs() >= MIN_GAP));
        if ok {
            pts.push(SpectralPoint::new(v));
        }
    }
    Ok(pts)
}

pub fn ybe(a: &YbeArgs) -> Result<Outcome> {
    match a.equation.as_deref().unwrap_or("cybe") {
        "cybe" => cybe(a),
        "qybe" => qybe(a),
        other => Err(CliError::Config(format!("unknown equation {other:?}; use cybe or qybe"))),
    }
}

fn cybe(a: &YbeArgs) -> Result<Outcome> {
    let kind = parse_algebra(a.rep.as_deref().unwrap_or("sl2"))?;
    let (_, rep) = build_algebra(kind)?;
    let pts = spectral_points(a.u.as_deref(), &[0.3, 1.7, 2.9], 3, a.points.unwrap_or(0), a.seed.unwrap_or(0))?;
    let reports = pform_core::simplex::cybe_sweep(&rep, &pts)?;
    let worst = reports.iter().map(|r| r.residual_abs).fold(0.0, f64::max);
    let mut checks: Vec<Check> = reports
        .iter()
        .map(|r| Check::below(format!("cybe u={}", r.params["u"]), r.residual_abs, CYBE_TOL))
        .collect();
    checks.push(Check::below("cybe-max", worst, CYBE_TOL));
    Ok(Outcome { results: json!({ "equation": "cybe", "points": reports }), checks })
}

/// Constant `R`: QYBE residual against the holonomy of a homogeneous
/// plaquette field around one cube.
fn qybe(a: &YbeArgs) -> Result<Outcome> {
    let d = a.d.unwrap_or(2);
    if d == 0 || d > 4 {
        return Err(CliError::Config("--d must be between 1 and 4".into()));
    }
    let solution = a.solution.as_deref().unwrap_or("swap");
    let r = match solution {
        "swap" => swap_matrix(d),
        "identity" => CMat::identity(d * d, d * d),
        "random" => random_gl(&mut ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(0)), d * d),
        other => return Err(CliError::Config(format!("unknown solution {other:?}; use swap, identity or random"))),
    };
    let (residual, distance) = qybe_and_cube(&r, d)?;
    let results = json!({
        "equation": "qybe",
        "solution": solution,
        "d": d,
        "qybe_residual": residual,
        "cube_holonomy_distance": distance,
    });
    let checks = vec![
        Check::diagnostic("qybe-residual", residual),
        Check::diagnostic("cube-holonomy-distance", distance),
        Check::holds("cube-identity-iff-qybe", (residual < QYBE_TOL) == (distance < QYBE_TOL)),
    ];
    Ok(Outcome { results, checks })
}

/// `(‖R12R13R23 − R23R13R12‖, ‖H_cube − Id‖)` for a constant `R` on `V⊗V`.
pub fn qybe_and_cube(r: &CMat, d: usize) -> Result<(f64, f64)> {
    let op = SitedOperator::full(vec![d, d], r.clone())?;
    let p = |i, j| place_pair(&op, 3, i, j);
    let residual = qybe_residual(&p(1, 2)?, &p(1, 3)?, &p(2, 3)?)?;
    let field = PlaquetteField::homogeneous(LatticeGeometry::new(vec![3, 3, 3])?, r)?;
    let distance = distance_from_identity(&field.cube_holonomy(0, [0, 1, 2])?);
    Ok((residual, distance))
}

pub fn tetra(a: &TetraArgs) -> Result<Outcome> {
    let kind = parse_algebra(a.rep.as_deref().unwrap_or("sl2"))?;
    let (_, rep) = build_algebra(kind)?;
    let pts = spectral_points(a.u.as_deref(), &[0.0, 1.0, 2.0, 4.0], 4, a.points.unwrap_or(0), a.seed.unwrap_or(0))?;
    let mut reports = Vec::with_capacity(pts.len());
    let mut checks = Vec::with_capacity(pts.len());
    for u in &pts {
        let (_, r) = tetra_ansatz(|x, y| trig_r(&rep, x, y), u)?;
        checks.push(Check::diagnostic(format!("tetra-ansatz u={:?}", u.u), r.residual_abs));
        reports.push(r);
    }
    Ok(Outcome { results: json!({ "equation": "tetra-classical-ansatz", "points": reports }), checks })
}
