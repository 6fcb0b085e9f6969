//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use pform_cli::args::{CurvatureArgs, GaugeCheckArgs, HolonomyArgs, McArgs, TetraArgs, YbeArgs};
use pform_cli::report::Outcome;
use pform_cli::suites::{check, holonomy, jet, lattice};
use pform_core::liealg::AlgebraKind;
use pform_core::multitensor::{swap_matrix, CMat, SitedOperator};
use pform_core::simplex::{triple_slots, TETRA_TRIPLES};
use pform_gerbejet::reduction::homogeneous_flatness_reduction;
use pform_gerbejet::{verify_suite, ModuleKind, Status, VerifyConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn value(o: &Outcome, name: &str) -> f64 {
    let ch = o.checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("missing check {name}"));
    match &ch.value {
        Value::Number(n) => n.as_f64().unwrap(),
        Value::String(s) if s == "0" => 0.0,
        other => panic!("{name}: non-numeric value {other}"),
    }
}

fn within(elapsed: Duration, secs: f64) -> bool {
    elapsed.as_secs_f64() < secs
}

/// Dense matrix of `m` acting on the 1-based `support` of `n` slots of
/// dimension `d`; slot 1 is the most significant digit.
fn embed(m: &CMat, support: &[usize], n: usize, d: usize) -> CMat {
    let dim = d.pow(n as u32);
    let digit = |x: usize, slot: usize| (x / d.pow((n - slot) as u32)) % d;
    let sub = |x: usize| support.iter().fold(0, |acc, &s| acc * d + digit(x, s));
    let spectators = |r: usize, col: usize| (1..=n).filter(|s| !support.contains(s)).all(|s| digit(r, s) == digit(col, s));
    CMat::from_fn(dim, dim, |r, col| if spectators(r, col) { m[(sub(r), sub(col))] } else { c(0.0) })
}

fn comm(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

fn random_mat(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Gauge invariance of the 1-form and 2-form actions and of a closed surface.
fn criterion_1() -> Verdict {
    let t = Instant::now();
    let out = lattice::gauge_check(&GaugeCheckArgs {
        form: None,
        pairs: Some(50),
        seed: Some(11),
        ..Default::default()
    })
    .unwrap();
    let el = t.elapsed();
    let names = ["form1-action-relative", "form1-wilson-loops", "form2-action-relative", "form2-cuboid-surface-relative"];
    let worst = names.iter().map(|n| value(&out, n)).fold(0.0, f64::max);
    verdict(
        worst < 1e-9 && out.passed() && within(el, 30.0),
        format!("max relative change {worst:.2e} over 50 pairs (tol 1e-9), {:.2}s", el.as_secs_f64()),
    )
}

/// Homogeneous cube holonomy is the identity exactly when R solves the QYBE.
fn criterion_2() -> Verdict {
    let t = Instant::now();
    let (qs, hs) = check::qybe_and_cube(&swap_matrix(2), 2).unwrap();
    // independent: P12 P13 P23 = P23 P13 P12 as dense permutations
    let p = swap_matrix(2);
    let (p12, p23) = (embed(&p, &[1, 2], 3, 2), embed(&p, &[2, 3], 3, 2));
    let p13 = embed(&p, &[1, 3], 3, 2);
    let oracle = (&p12 * &p13 * &p23 - &p23 * &p13 * &p12).norm();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut random_ok = true;
    let mut worst_random = f64::INFINITY;
    for _ in 0..5 {
        let r = random_mat(&mut rng, 4);
        let (q, h) = check::qybe_and_cube(&r, 2).unwrap();
        let (r12, r13, r23) = (embed(&r, &[1, 2], 3, 2), embed(&r, &[1, 3], 3, 2), embed(&r, &[2, 3], 3, 2));
        let q_oracle = (&r12 * &r13 * &r23 - &r23 * &r13 * &r12).norm();
        random_ok &= (q - q_oracle).abs() < 1e-9 * q_oracle.max(1.0) && q > 1e-10 && h > 1e-10;
        worst_random = worst_random.min(h);
    }
    let el = t.elapsed();
    verdict(
        qs < 1e-10 && hs < 1e-10 && oracle == 0.0 && random_ok && within(el, 1.0),
        format!("swap: qybe {qs:.1e}, |H-1| {hs:.1e}; random R: min |H-1| {worst_random:.2e}; {:.3}s", el.as_secs_f64()),
    )
}

/// `t = (e⊗f + f⊗e)/4 + h⊗h/8` for sl2 in the defining representation.
fn sl2_casimir() -> CMat {
    let e = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    let f = CMat::from_row_slice(2, 2, &[c(0.0), c(0.0), c(1.0), c(0.0)]);
    let h = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    (kron(&e, &f) + kron(&f, &e)) * c(0.25) + kron(&h, &h) * c(0.125)
}

/// CYBE for the trigonometric r-matrix of sl2.
fn criterion_3() -> Verdict {
    let t = Instant::now();
    let out = check::ybe(&YbeArgs { rep: Some("sl2".into()), points: Some(100), seed: Some(3), ..Default::default() }).unwrap();
    let suite = value(&out, "cybe-max");
    let n_points = out.results["points"].as_array().unwrap().len();
    let cas = sl2_casimir();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut oracle = 0.0f64;
    let mut drawn = 0;
    while drawn < 100 {
        let u: Vec<f64> = (0..3).map(|_| rng.random_range(-10.0..10.0)).collect();
        if (u[0] - u[1]).abs() < 0.1 || (u[0] - u[2]).abs() < 0.1 || (u[1] - u[2]).abs() < 0.1 {
            continue;
        }
        drawn += 1;
        let r = |i: usize, j: usize| embed(&cas, &[i, j], 3, 2) * c(1.0 / (u[i - 1] - u[j - 1]));
        let (a12, a13, a23) = (r(1, 2), r(1, 3), r(2, 3));
        oracle = oracle.max((comm(&a12, &a13) + comm(&a12, &a23) + comm(&a13, &a23)).norm());
    }
    let el = t.elapsed();
    verdict(
        n_points == 100 && suite < 1e-10 && oracle < 1e-10 && within(el, 5.0),
        format!("max residual {suite:.2e} (dense oracle {oracle:.2e}) on 100 triples, {:.3}s", el.as_secs_f64()),
    )
}

/// Flatness reduction against dense CYBE and tetrahedron combinations.
fn criterion_4() -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut p1 = 0.0f64;
    for _ in 0..50 {
        let pairs = [[1, 2], [1, 3], [2, 3]];
        let local: Vec<CMat> = (0..3).map(|_| random_mat(&mut rng, 4)).collect();
        let ops: Vec<SitedOperator> =
            pairs.iter().zip(&local).map(|(s, m)| SitedOperator::new(vec![2; 3], s.to_vec(), m.clone()).unwrap()).collect();
        let (op, _) = homogeneous_flatness_reduction(1, &ops, &[1.0; 3]).unwrap();
        let d: Vec<CMat> = pairs.iter().zip(&local).map(|(s, m)| embed(m, s, 3, 2)).collect();
        let cybe = comm(&d[0], &d[1]) + comm(&d[0], &d[2]) + comm(&d[1], &d[2]);
        p1 = p1.max((op.to_full_matrix() - cybe * c(-2.0)).norm());
    }
    let mut p2 = 0.0f64;
    for _ in 0..5 {
        let local: Vec<CMat> = (0..4).map(|_| random_mat(&mut rng, 8)).collect();
        let ops: Vec<SitedOperator> = TETRA_TRIPLES
            .iter()
            .zip(&local)
            .map(|(tr, m)| SitedOperator::new(vec![2; 6], triple_slots(*tr).to_vec(), m.clone()).unwrap())
            .collect();
        let (op, _) = homogeneous_flatness_reduction(2, &ops, &[1.0; 6]).unwrap();
        let d: Vec<CMat> = TETRA_TRIPLES.iter().zip(&local).map(|(tr, m)| embed(m, &triple_slots(*tr), 6, 2)).collect();
        let mut sum = CMat::zeros(64, 64);
        for i in 0..4 {
            for j in i + 1..4 {
                sum += comm(&d[i], &d[j]);
            }
        }
        p2 = p2.max((op.to_full_matrix() - sum * c(4.0)).norm());
    }
    let suite = jet::curvature(&CurvatureArgs {
        mode: Some("reduction".into()),
        p: Some(1),
        draws: Some(50),
        seed: Some(1),
        ..Default::default()
    })
    .unwrap();
    let suite2 = jet::curvature(&CurvatureArgs {
        mode: Some("reduction".into()),
        p: Some(2),
        draws: Some(50),
        seed: Some(1),
        ..Default::default()
    })
    .unwrap();
    let el = t.elapsed();
    let s1 = value(&suite, "reduction-cross-check");
    let s2 = value(&suite2, "reduction-cross-check");
    verdict(
        p1 < 1e-12 && p2 < 1e-12 && s1 < 1e-12 && s2 < 1e-12 && within(el, 10.0),
        format!(
            "p=1 vs -2*CYBE {p1:.1e} (cli {s1:.1e}); p=2 vs tetrahedron sum {p2:.1e} (cli {s2:.1e}); {:.2}s",
            el.as_secs_f64()
        ),
    )
}

/// The exact identity suite on the shipped modules.
fn criterion_5() -> Verdict {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut runs = 0;
    for n in [2, 3, 4] {
        for p in [1, 2] {
            for module in [ModuleKind::Trivial, ModuleKind::Vector] {
                for algebra in [AlgebraKind::U1, AlgebraKind::Sl2] {
                    let cfg = VerifyConfig { n, p, cap: 6, trials: 20, seed: 9, algebra, module };
                    match verify_suite(&cfg) {
                        Ok(rs) => {
                            runs += rs.len();
                            for r in rs.iter().filter(|r| r.status != Status::ExactZero) {
                                failures.push(format!("n={n} p={p} {module} {algebra} {}: {:?}", r.identity, r.witness));
                            }
                        }
                        Err(e) => failures.push(format!("n={n} p={p} {module} {algebra}: {e}")),
                    }
                }
            }
        }
    }
    let el = t.elapsed();
    let detail = match failures.first() {
        None => format!("{runs} identity runs exact zero, {:.1}s", el.as_secs_f64()),
        Some(f) => format!("{} failures, first: {f}; {:.1}s", failures.len(), el.as_secs_f64()),
    };
    verdict(failures.is_empty() && within(el, 60.0), detail)
}

/// Closure of s-linear gauge parameters.
fn criterion_6() -> Verdict {
    let run = |alg: &str| {
        jet::curvature(&CurvatureArgs {
            mode: Some("closure".into()),
            algebra: Some(alg.into()),
            seed: Some(4),
            ..Default::default()
        })
        .unwrap()
    };
    let (u1, sl2) = (run("u1"), run("sl2"));
    let (du, ds) = (u1.results["defect"].as_str().unwrap().to_string(), value(&sl2, "closure-defect"));
    verdict(du == "0" && ds > 0.0, format!("u1 defect {du}, sl2 defect {ds}"))
}

/// `I_n(x)` by its power series.
fn bessel_i(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..500 {
        term *= half * half / (k as f64 * (k as f64 + n as f64));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn mc(beta: f64, sweeps: usize, burnin: usize) -> Outcome {
    lattice::mc(&McArgs {
        dims: Some(vec![16, 16]),
        form: Some(1),
        group: Some("u1".into()),
        beta: Some(beta),
        sweeps: Some(sweeps),
        burnin: Some(burnin),
        seed: Some(1),
        history: None,
    })
    .unwrap()
}

/// 2D U(1) plaquette expectation against `I1(β)/I0(β)`.
fn criterion_7() -> Verdict {
    let t = Instant::now();
    let main = mc(1.0, 5000, 500);
    let el = t.elapsed();
    let oracle = bessel_i(1, 1.0) / bessel_i(0, 1.0);
    let (mean, se) = (main.results["mean_observable"].as_f64().unwrap(), main.results["stderr"].as_f64().unwrap());
    let hot = mc(0.0, 1000, 200);
    let cold = mc(50.0, 1000, 200);
    let (m0, s0) = (hot.results["mean_observable"].as_f64().unwrap(), hot.results["stderr"].as_f64().unwrap());
    let m50 = cold.results["mean_observable"].as_f64().unwrap();
    let o50 = bessel_i(1, 50.0) / bessel_i(0, 50.0);
    let pass = (mean - oracle).abs() < 3.0 * se
        && (m0.abs() < 3.0 * s0)
        && (m50 - o50).abs() < 0.01
        && m50 > 0.97
        && within(el, 60.0);
    verdict(
        pass,
        format!(
            "beta=1: {mean:.5} +- {se:.5} vs I1/I0 = {oracle:.5}; beta=0: {m0:.5} +- {s0:.5}; beta=50: {m50:.4} (I1/I0 = {o50:.4}); {:.1}s",
            el.as_secs_f64()
        ),
    )
}

/// Bianchi identity of the abelian 2-form on 4^4.
fn criterion_8() -> Verdict {
    let out = lattice::gauge_check(&GaugeCheckArgs {
        form: Some("bianchi".into()),
        pairs: Some(20),
        seed: Some(8),
        ..Default::default()
    })
    .unwrap();
    let dev = value(&out, "bianchi-mod-2pi");
    let zn = out.checks.iter().find(|c| c.name == "bianchi-zn-exact").unwrap().pass == Some(true);
    verdict(dev < 1e-12 && zn, format!("max |sum mod 2pi| {dev:.1e}; Z_7 sums exactly 0: {zn}"))
}

/// Holonomy over the Clifford 3-torus.
fn criterion_9() -> Verdict {
    let t = Instant::now();
    let out = holonomy::holonomy(&HolonomyArgs::default()).unwrap();
    let el = t.elapsed();
    let r = &out.results;
    let gauge = r["probes"]["gauge_invariance"].as_f64().unwrap();
    let spread = r["probes"]["constant"]["max_deviation"].as_f64().unwrap();
    let n_forms = r["probes"]["constant"]["ratios"].as_array().unwrap().len();
    let ratios: Vec<f64> = r["convergence"]["ratios"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    // x2 x4 x6 dx1^dx3^dx5 pulls back to -sin²σ¹ sin²σ² sin²τ, integral -π³;
    // the special gauge doubles it
    let phase = r["phase"].as_f64().unwrap();
    let exact = -2.0 * PI.powi(3);
    let pass = gauge < 1e-8
        && spread < 1e-6
        && n_forms >= 3
        && ratios.iter().all(|x| (x - 4.0).abs() < 0.5)
        && (phase - exact).abs() < 1e-8
        && within(el, 60.0);
    verdict(
        pass,
        format!(
            "gauge probe {gauge:.1e}; constant spread {spread:.1e} over {n_forms} forms; ratios {ratios:.3?}; phase {phase:.10} vs -2pi^3 {exact:.10}; {:.1}s",
            el.as_secs_f64()
        ),
    )
}

/// Tetrahedron residual of the additive ansatz, reported only.
fn criterion_10() -> Verdict {
    let out = check::tetra(&TetraArgs { points: Some(5), seed: Some(10), ..Default::default() }).unwrap();
    let res: Vec<f64> = out.checks.iter().map(|c| c.value.as_f64().unwrap()).collect();
    let reported = res.len() >= 5 && out.checks.iter().all(|c| c.pass.is_none());
    verdict(reported, format!("residuals at {} points (reported, no verdict): {res:.4?}", res.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("gauge invariance", criterion_1),
        ("cube holonomy iff qybe", criterion_2),
        ("trigonometric cybe", criterion_3),
        ("flatness reduction", criterion_4),
        ("identity suite", criterion_5),
        ("subalgebra defect", criterion_6),
        ("u1 monte carlo", criterion_7),
        ("2-form bianchi", criterion_8),
        ("holonomy", criterion_9),
        ("tetrahedron ansatz", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!("criterion {:>2} {name}: {} ({})", k + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
