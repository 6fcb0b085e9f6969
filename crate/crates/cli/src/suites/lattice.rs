use std::f64::consts::PI;

use pform_core::lattice::links::random_gauge;
use pform_core::lattice::plaquettes::random_link_gauge;
use pform_core::lattice::{
    mc_metropolis_abelian, wilson_surface, wrap_angle, AbelianPlaquetteAngles, GaugeGroup, LatticeGeometry,
    LatticePath, LinkField, McConfig, PlaquetteField, SurfacePatch,
};
use pform_core::seed::stream_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::parse_group;
use crate::args::{GaugeCheckArgs, McArgs};
use crate::error::{CliError, Result};
use crate::report::{Check, Outcome};

pub const GAUGE_TOL: f64 = 1e-9;
pub const BIANCHI_TOL: f64 = 1e-12;
/// Order of the cyclic group in the exact Bianchi check.
pub const ZN_ORDER: u32 = 7;

fn geometry(dims: Option<&Vec<usize>>, default: &[usize]) -> Result<LatticeGeometry> {
    Ok(LatticeGeometry::new(dims.cloned().unwrap_or_else(|| default.to_vec()))?)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(f64::MIN_POSITIVE)
}

pub fn gauge_check(a: &GaugeCheckArgs) -> Result<Outcome> {
    let pairs = a.pairs.unwrap_or(50);
    if pairs == 0 {
        return Err(CliError::Config("--pairs must be positive".into()));
    }
    let seed = a.seed.unwrap_or(0);
    let beta = a.beta.unwrap_or(1.0);
    let mut results = serde_json::Map::new();
    let mut checks = Vec::new();
    let forms: Vec<&str> = match a.form.as_deref() {
        None | Some("all") => vec!["1", "2", "bianchi"],
        Some(f @ ("1" | "2" | "bianchi")) => vec![f],
        Some(other) => return Err(CliError::Config(format!("unknown form {other:?}; use 1, 2 or bianchi"))),
    };
    for f in forms {
        let (key, v) = match f {
            "1" => ("form1", one_form(a, pairs, beta, seed, &mut checks)?),
            "2" => ("form2", two_form(a, pairs, beta, seed, &mut checks)?),
            _ => ("bianchi", bianchi(a, pairs, seed, &mut checks)?),
        };
        results.insert(key.into(), v);
    }
    Ok(Outcome { results: Value::Object(results), checks })
}

fn one_form(a: &GaugeCheckArgs, pairs: usize, beta: f64, seed: u64, checks: &mut Vec<Check>) -> Result<Value> {
    let g = geometry(a.dims.as_ref(), &[4, 4, 4, 4])?;
    if g.dim() < 2 {
        return Err(CliError::Config("the 1-form check needs at least two dimensions".into()));
    }
    let group = parse_group(a.group.as_deref().unwrap_or("su2"))?;
    let (mut action, mut loops) = (0.0f64, 0.0f64);
    for i in 0..pairs {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, &[1, i as u64]));
        let field = LinkField::random(g.clone(), group, &mut rng);
        let f = random_gauge(&mut rng, &g, group);
        let moved = field.gauge_transform(&f)?;
        action = action.max(rel(field.wilson_action(beta), moved.wilson_action(beta)));
        let start = rng.random_range(0..g.num_sites());
        let mu = rng.random_range(0..g.dim() - 1);
        let nu = rng.random_range(mu + 1..g.dim());
        for (x, y) in [(1, 1), (2, 1), (1, 3)] {
            let path = LatticePath::rectangle(start, mu, nu, x, y);
            let w0 = field.wilson_loop(&path)?;
            let w1 = moved.wilson_loop(&path)?;
            loops = loops.max((w0 - w1).norm() / w0.norm().max(1.0));
        }
    }
    checks.push(Check::below("form1-action-relative", action, GAUGE_TOL));
    checks.push(Check::below("form1-wilson-loops", loops, GAUGE_TOL));
    Ok(json!({
        "dims": g.extents(),
        "group": group_name(group),
        "pairs": pairs,
        "max_action_relative_change": action,
        "max_wilson_loop_change": loops,
    }))
}

fn group_name(g: GaugeGroup) -> String {
    match g {
        GaugeGroup::U1 => "u1".into(),
        GaugeGroup::SU2 => "su2".into(),
        GaugeGroup::GL(d) => format!("gl{d}"),
    }
}

fn two_form(a: &GaugeCheckArgs, pairs: usize, beta: f64, seed: u64, checks: &mut Vec<Check>) -> Result<Value> {
    let g = geometry(a.dims.as_ref(), &[4, 4, 4])?;
    if g.dim() < 3 || g.extents().iter().take(3).any(|&l| l < 2) {
        return Err(CliError::Config("the 2-form check needs three axes of extent >= 2".into()));
    }
    let d = a.d.unwrap_or(2);
    if d == 0 || d > 3 {
        return Err(CliError::Config("--d must be 1, 2 or 3".into()));
    }
    let patch = SurfacePatch::cuboid(&g, 0, [0, 1, 2], [2, 2, 2])?;
    let (mut action, mut surface) = (0.0f64, 0.0f64);
    for i in 0..pairs {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, &[2, i as u64]));
        let field = PlaquetteField::random(g.clone(), d, &mut rng);
        let h = random_link_gauge(&mut rng, &g, d);
        let moved = field.gauge_transform(&h)?;
        action = action.max(rel(field.action_cubes(beta)?, moved.action_cubes(beta)?));
        let closed = |f: &PlaquetteField| -> Result<_> {
            wilson_surface(f, &patch)?
                .scalar()
                .ok_or_else(|| CliError::Config("cuboid surface is not closed".into()))
        };
        let (w0, w1) = (closed(&field)?, closed(&moved)?);
        surface = surface.max((w0 - w1).norm() / w0.norm().max(f64::MIN_POSITIVE));
    }
    checks.push(Check::below("form2-action-relative", action, GAUGE_TOL));
    checks.push(Check::below("form2-cuboid-surface-relative", surface, GAUGE_TOL));
    Ok(json!({
        "dims": g.extents(),
        "d": d,
        "pairs": pairs,
        "cuboid": [2, 2, 2],
        "max_action_relative_change": action,
        "max_surface_relative_change": surface,
    }))
}

fn bianchi(a: &GaugeCheckArgs, pairs: usize, seed: u64, checks: &mut Vec<Check>) -> Result<Value> {
    let g = geometry(a.dims.as_ref(), &[4, 4, 4, 4])?;
    if g.dim() < 4 {
        return Err(CliError::Config("the Bianchi check needs four dimensions".into()));
    }
    let quads = g.quadruples();
    let (mut worst, mut zn_ok) = (0.0f64, true);
    for i in 0..pairs {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, &[3, i as u64]));
        let th = AbelianPlaquetteAngles::random(g.clone(), &mut rng);
        let zn = AbelianPlaquetteAngles::random_zn(g.clone(), ZN_ORDER, &mut rng)?;
        for x in 0..g.num_sites() {
            for q in &quads {
                worst = worst.max(wrap_angle(th.bianchi_sum(x, *q)).abs());
                zn_ok &= zn.bianchi_sum_zn(x, *q) == Some(0);
            }
        }
    }
    checks.push(Check::below("bianchi-mod-2pi", worst, BIANCHI_TOL));
    checks.push(Check::holds("bianchi-zn-exact", zn_ok));
    Ok(json!({
        "dims": g.extents(),
        "configurations": pairs,
        "zn_order": ZN_ORDER,
        "max_deviation_mod_2pi": worst,
        "zn_exact": zn_ok,
    }))
}

/// `∫₀^π cos θ e^{β cos θ} dθ / ∫₀^π e^{β cos θ} dθ` by composite Simpson.
pub fn cos_expectation(beta: f64) -> f64 {
    const N: usize = 4000;
    let h = PI / N as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..=N {
        let t = k as f64 * h;
        let w = if k == 0 || k == N { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        // shift by β to keep the weights finite at large β
        let e = (beta * (t.cos() - 1.0)).exp();
        num += w * t.cos() * e;
        den += w * e;
    }
    num / den
}

pub fn mc(a: &McArgs) -> Result<Outcome> {
    let group = parse_group(a.group.as_deref().unwrap_or("u1"))?;
    if group != GaugeGroup::U1 {
        return Err(CliError::Config("Monte Carlo is implemented for u1 only".into()));
    }
    let cfg = McConfig {
        dims: a.dims.clone().unwrap_or_else(|| vec![16, 16]),
        form_degree: a.form.unwrap_or(1),
        beta: a.beta.unwrap_or(1.0),
        sweeps: a.sweeps.unwrap_or(5000),
        burnin: a.burnin.unwrap_or(500),
        seed: a.seed.unwrap_or(0),
        record_samples: false,
    };
    let r = mc_metropolis_abelian(&cfg)?;
    if let Some(path) = &a.history {
        let h = json!({ "observable": r.observable_history, "action": r.action_history });
        std::fs::write(path, serde_json::to_string(&h).expect("history serializes"))?;
    }
    let mut checks = vec![
        Check::diagnostic("mean-observable", r.mean_observable),
        Check::diagnostic("stderr", r.stderr),
        Check::diagnostic("acceptance", r.acceptance),
    ];
    // cells decouple when the cell dimension equals the lattice dimension
    let oracle = (cfg.dims.len() == cfg.form_degree as usize + 1).then(|| cos_expectation(cfg.beta));
    if let Some(o) = oracle {
        let dev = (r.mean_observable - o).abs();
        checks.push(Check::below("mean-within-3-stderr", dev, 3.0 * r.stderr));
    }
    let results = json!({
        "mean_observable": r.mean_observable,
        "stderr": r.stderr,
        "acceptance": r.acceptance,
        "proposal_width": r.proposal_width,
        "measurements": r.observable_history.len(),
        "oracle": oracle,
        "history_file": a.history,
    });
    Ok(Outcome { results, checks })
}
