use num_complex::Complex64;
use num_traits::{One, Zero};
use pform_core::liealg::build_algebra;
use pform_core::multitensor::{CMat, SitedOperator};
use pform_core::rational::Rational;
use pform_core::seed::stream_seed;
use pform_core::simplex::{trig_triple, triple_slots, SpectralPoint, TETRA_TRIPLES};
use pform_gerbejet::curvature::{
    cross_curvature_residual, curvature_s, curvature_s_residual, curvature_x, curvature_x_residual,
};
use pform_gerbejet::io::format_poly;
use pform_gerbejet::random::{random_connection, random_scalar, random_section, PolyShape};
use pform_gerbejet::reduction::homogeneous_flatness_reduction;
use pform_gerbejet::special::{fs_consistency, max_abs, subalgebra_closure_defect, ym_divergence_residual, FormField};
use pform_gerbejet::verify::base_degree;
use pform_gerbejet::{
    verify_suite_named, GerbeConnection, JetPoly, JetSpace, ModuleKind, ModuleRep, Status, VerifyConfig, IDENTITIES,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::check::MIN_GAP;
use super::{parse_algebra, rat_value};
use crate::args::{CurvatureArgs, VerifyArgs};
use crate::error::{CliError, Result};
use crate::report::{Check, Outcome};

pub const REDUCTION_TOL: f64 = 1e-12;
pub const TRIG_FLAT_TOL: f64 = 1e-10;

fn parse_module(s: &str) -> Result<ModuleKind> {
    s.parse().map_err(|e| CliError::Config(format!("{e}")))
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let cfg = VerifyConfig {
        n: a.n.unwrap_or(3),
        p: a.p.unwrap_or(2),
        cap: a.degree.unwrap_or(8),
        trials: a.trials.unwrap_or(20),
        seed: a.seed.unwrap_or(0),
        algebra: parse_algebra(a.algebra.as_deref().unwrap_or("sl2"))?,
        module: parse_module(a.module.as_deref().unwrap_or("vector"))?,
    };
    let names: Vec<&str> = match &a.identities {
        None => IDENTITIES.to_vec(),
        Some(v) => v.iter().map(String::as_str).collect(),
    };
    let results = verify_suite_named(&cfg, &names).map_err(|e| CliError::Config(e.to_string()))?;
    let checks = results
        .iter()
        .map(|r| {
            let value = if r.status == Status::ExactZero { "0" } else { "nonzero" };
            Check::exact_zero(r.identity.clone(), value.into(), r.witness.clone())
        })
        .collect();
    let results = json!({
        "n": cfg.n,
        "p": cfg.p,
        "degree": cfg.cap,
        "base_degree": base_degree(cfg.cap),
        "algebra": cfg.algebra.to_string(),
        "module": cfg.module.to_string(),
        "identities": results,
    });
    Ok(Outcome { results, checks })
}

pub fn curvature(a: &CurvatureArgs) -> Result<Outcome> {
    match a.mode.as_deref().unwrap_or("connection") {
        "connection" => connection(a),
        "reduction" => reduction(a),
        "closure" => closure(a),
        "special" => special(a),
        other => Err(CliError::Config(format!(
            "unknown mode {other:?}; use connection, reduction, closure or special"
        ))),
    }
}

struct Setup {
    space: JetSpace,
    rep: ModuleRep,
    rng: ChaCha8Rng,
}

fn setup(a: &CurvatureArgs, algebra: &str, module: &str, stream: u64) -> Result<Setup> {
    let n = a.n.unwrap_or(3);
    let p = a.p.unwrap_or(2);
    let space = JetSpace::new(n, p, a.degree.unwrap_or(6))?;
    let kind = parse_algebra(a.algebra.as_deref().unwrap_or(algebra))?;
    let module = parse_module(a.module.as_deref().unwrap_or(module))?;
    let rep = ModuleRep::new(module, kind, n, p, Rational::one())?;
    let rng = ChaCha8Rng::seed_from_u64(stream_seed(a.seed.unwrap_or(0), &[stream]));
    Ok(Setup { space, rep, rng })
}

fn first_witness<I: IntoIterator<Item = (String, JetPoly)>>(it: I) -> Option<String> {
    it.into_iter().find_map(|(at, p)| p.witness().map(|w| format!("{at}: {w}")))
}

fn named(label: String, p: &JetPoly) -> Option<(String, String)> {
    (!p.is_zero()).then(|| (label, format_poly(p)))
}

fn connection(a: &CurvatureArgs) -> Result<Outcome> {
    let Setup { space, rep, mut rng } = setup(a, "sl2", "vector", 0)?;
    let d0 = base_degree(space.cap);
    let conn: GerbeConnection = match &a.connection {
        Some(spec) => spec.build(space, rep.dim_g())?,
        None => random_connection(space, rep.dim_g(), d0.saturating_sub(1), 0.3, true, &mut rng),
    };
    let n = space.n;
    let s_idx = space.s_indices();
    let mut components = serde_json::Map::new();
    for mu in 0..n {
        for nu in mu + 1..n {
            let c = curvature_x(&rep, &conn, mu, nu)?;
            for k in 0..n {
                for l in 0..n {
                    if let Some((k2, v)) = named(format!("R[{},{}]^{}_{}", mu + 1, nu + 1, k + 1, l + 1), c.r(k, l)) {
                        components.insert(k2, v.into());
                    }
                }
            }
            for (g, f) in c.f.iter().enumerate() {
                if let Some((k2, v)) = named(format!("F[{},{}]_{}", mu + 1, nu + 1, g + 1), f) {
                    components.insert(k2, v.into());
                }
            }
        }
    }
    for (i, m) in s_idx.iter().enumerate() {
        for s in &s_idx[i + 1..] {
            for (g, f) in curvature_s(&rep, &conn, m, s)?.iter().enumerate() {
                let label = format!("F[s{},s{}]_{}", one_based(m), one_based(s), g + 1);
                if let Some((k2, v)) = named(label, f) {
                    components.insert(k2, v.into());
                }
            }
        }
    }

    let draws = a.draws.unwrap_or(3);
    let shape = PolyShape { terms: 3, max_deg: d0, x_only: false };
    let (mut wx, mut ws, mut wc) = (None, None, None);
    for t in 0..draws {
        let phi = random_section(space, rep.wdim, shape, &mut rng);
        let mut xs = Vec::new();
        let mut ss = Vec::new();
        let mut cs = Vec::new();
        for mu in 0..n {
            for nu in mu + 1..n {
                xs.push((format!("draw {t}, x{}x{}", mu + 1, nu + 1), curvature_x_residual(&rep, &conn, mu, nu, &phi)?));
            }
            for s in &s_idx {
                cs.push((format!("draw {t}, x{} s{}", mu + 1, one_based(s)), cross_curvature_residual(&rep, &conn, mu, s, &phi)?));
            }
        }
        for (i, m) in s_idx.iter().enumerate() {
            for s in &s_idx[i + 1..] {
                ss.push((
                    format!("draw {t}, s{} s{}", one_based(m), one_based(s)),
                    curvature_s_residual(&rep, &conn, m, s, &phi)?,
                ));
            }
        }
        wx = wx.or_else(|| first_witness(xs));
        ws = ws.or_else(|| first_witness(ss));
        wc = wc.or_else(|| first_witness(cs));
    }
    let value = |w: &Option<String>| if w.is_none() { "0".to_string() } else { "nonzero".to_string() };
    let checks = vec![
        Check::exact_zero("curvature-x-residual", value(&wx), wx),
        Check::exact_zero("curvature-s-residual", value(&ws), ws),
        Check::exact_zero("curvature-cross-residual", value(&wc), wc),
    ];
    let results = json!({
        "mode": "connection",
        "n": n,
        "p": space.p,
        "degree": space.cap,
        "algebra": rep.algebra.to_string(),
        "module": rep.kind.to_string(),
        "draws": draws,
        "connection": conn.labelled().into_iter().map(|(k, v)| (k, Value::from(format_poly(v)))).collect::<serde_json::Map<_, _>>(),
        "curvature": components,
    });
    Ok(Outcome { results, checks })
}

fn one_based(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect()
}

fn random_op(rng: &mut ChaCha8Rng, dims: &[usize], support: &[usize]) -> Result<SitedOperator> {
    let d: usize = support.iter().map(|&s| dims[s - 1]).product();
    let m = CMat::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Ok(SitedOperator::new(dims.to_vec(), support.to_vec(), m)?)
}

fn distinct_triple(rng: &mut ChaCha8Rng) -> SpectralPoint {
    loop {
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(-10.0..10.0)).collect();
        if (0..3).all(|i| (i + 1..3).all(|j| (v[i] - v[j]).abs() >= MIN_GAP)) {
            return SpectralPoint::new(v);
        }
    }
}

/// Flatness of a homogeneous special-gauge form against the simplex equations.
fn reduction(a: &CurvatureArgs) -> Result<Outcome> {
    let p = a.p.unwrap_or(2);
    if !(p == 1 || p == 2) {
        return Err(CliError::Config("reduction mode needs --p 1 or 2".into()));
    }
    let family = a.family.as_deref().unwrap_or("random");
    let draws = a.draws.unwrap_or(50);
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(a.seed.unwrap_or(0), &[1]));
    let ones = if p == 1 { vec![1.0; 3] } else { vec![1.0; 6] };
    let (mut cross, mut flat, mut residuals) = (0.0f64, 0.0f64, Vec::with_capacity(draws));
    match family {
        "random" => {
            let d = 2;
            for _ in 0..draws {
                let ops: Vec<SitedOperator> = if p == 1 {
                    [[1, 2], [1, 3], [2, 3]].iter().map(|s| random_op(&mut rng, &[d; 3], s)).collect::<Result<_>>()?
                } else {
                    TETRA_TRIPLES
                        .iter()
                        .map(|t| random_op(&mut rng, &[d; 6], &triple_slots(*t)))
                        .collect::<Result<_>>()?
                };
                let (_, r) = homogeneous_flatness_reduction(p, &ops, &ones)?;
                cross = cross.max(r.cross_check.unwrap_or(f64::INFINITY));
                residuals.push(r);
            }
        }
        "trig" => {
            if p != 1 {
                return Err(CliError::Config("the trig family is a p = 1 family".into()));
            }
            let kind = parse_algebra(a.algebra.as_deref().unwrap_or("sl2"))?;
            let (_, rep) = build_algebra(kind)?;
            for _ in 0..draws {
                let ops = trig_triple(&rep, &distinct_triple(&mut rng))?;
                let (_, r) = homogeneous_flatness_reduction(p, &ops, &ones)?;
                cross = cross.max(r.cross_check.unwrap_or(f64::INFINITY));
                flat = flat.max(r.residual);
                residuals.push(r);
            }
        }
        other => return Err(CliError::Config(format!("unknown family {other:?}; use random or trig"))),
    }
    let mut checks = vec![Check::below("reduction-cross-check", cross, REDUCTION_TOL)];
    if family == "trig" {
        checks.push(Check::below("trig-flatness", flat, TRIG_FLAT_TOL));
    }
    let results = json!({
        "mode": "reduction",
        "p": p,
        "family": family,
        "factor": if p == 1 { -2.0 } else { 4.0 },
        "draws": residuals,
        "max_cross_check": cross,
    });
    Ok(Outcome { results, checks })
}

fn random_form(space: JetSpace, rank: usize, dim_g: usize, max_deg: u32, rng: &mut ChaCha8Rng) -> Result<FormField> {
    let shape = PolyShape { terms: 2, max_deg, x_only: true };
    let mut f = FormField::zero(space, rank, dim_g);
    for a in 0..dim_g {
        for idx in f.increasing_indices() {
            f.set_antisymmetric(a, &idx, random_scalar(space, shape, rng))?;
        }
    }
    Ok(f)
}

fn is_abelian(rep: &ModuleRep) -> bool {
    rep.f.iter().flatten().flatten().all(Zero::is_zero)
}

/// Largest s-quadratic coefficient of `[X, Y]` for s-linear gauge parameters.
fn closure(a: &CurvatureArgs) -> Result<Outcome> {
    let Setup { space, rep, mut rng } = setup(a, "sl2", "trivial", 2)?;
    let draws = a.draws.unwrap_or(10).max(1);
    let mut worst = Rational::zero();
    for _ in 0..draws {
        let x = random_form(space, space.p, rep.dim_g(), 1, &mut rng)?;
        let y = random_form(space, space.p, rep.dim_g(), 1, &mut rng)?;
        worst = worst.max(subalgebra_closure_defect(&rep, &x, &y)?);
    }
    let abelian = is_abelian(&rep);
    let check = if abelian {
        Check::exact_zero("closure-defect", rat_value(&worst), None)
    } else {
        Check::above("closure-defect", rat_f64(&worst), 0.0)
    };
    let results = json!({
        "mode": "closure",
        "algebra": rep.algebra.to_string(),
        "abelian": abelian,
        "draws": draws,
        "defect": rat_value(&worst),
    });
    Ok(Outcome { results, checks: vec![check] })
}

fn rat_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Special gauge of an abelian form: projected field strength and the
/// divergence residual.
fn special(a: &CurvatureArgs) -> Result<Outcome> {
    let Setup { space, rep, mut rng } = setup(a, "u1", "trivial", 3)?;
    if !is_abelian(&rep) {
        return Err(CliError::Config("special mode needs an abelian algebra".into()));
    }
    let rank = space.p + 1;
    let form = match &a.form {
        Some(spec) if spec.rank != rank => {
            return Err(CliError::Config(format!("the form must have rank p + 1 = {rank}")));
        }
        Some(spec) => spec.build(space, rep.dim_g())?,
        None => random_form(space, rank, rep.dim_g(), 2, &mut rng)?,
    };
    let fs = fs_consistency(&rep, &form)?;
    let div = ym_divergence_residual(&rep, &form)?;
    let w = fs.projected.witness();
    let value = if w.is_none() { "0".to_string() } else { "nonzero".to_string() };
    let checks = vec![
        Check::exact_zero("fs-projected", value, w),
        Check::diagnostic("fs-remainder", rat_f64(&fs.remainder)),
        Check::diagnostic("ym-divergence-max", rat_f64(&max_abs(&div))),
    ];
    let results = json!({
        "mode": "special",
        "n": space.n,
        "p": space.p,
        "rank": rank,
        "fs_remainder": rat_value(&fs.remainder),
        "ym_divergence_max": rat_value(&max_abs(&div)),
        "ym_divergence": div.iter().map(format_poly).collect::<Vec<_>>(),
    });
    Ok(Outcome { results, checks })
}
