//! The exact identity suite: every check is a polynomial that must be the
//! zero polynomial, over seeded random inputs.

use num_traits::{One, Zero};
use pform_core::liealg::AlgebraKind;
use pform_core::rational::Rational;
use pform_core::seed::stream_seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{covariance_residual, scale_covariance_residual, Direction};
use crate::curvature::{cross_curvature_residual, curvature_s_residual, curvature_x_residual};
use crate::error::{JetError, Result};
use crate::generator::{antisymmetry_residual, gl_n_residual, homomorphism_residual, jacobi_residual, s_monomials, Generator};
use crate::module::{ModuleKind, ModuleRep};
use crate::poly::{JetPoly, JetSpace};
use crate::random::{random_connection, random_gauge, random_rescale, random_scalar, random_section, random_vect, PolyShape};
use crate::special::{fs_consistency, FormField};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub n: usize,
    pub p: usize,
    pub cap: u32,
    pub trials: usize,
    pub seed: u64,
    pub algebra: AlgebraKind,
    pub module: ModuleKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ExactZero,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityResult {
    pub identity: String,
    pub status: Status,
    pub witness: Option<String>,
    pub trials: usize,
}

pub const IDENTITIES: [&str; 20] = [
    "heisenberg",
    "bracket-antisymmetry",
    "bracket-jacobi",
    "homomorphism-vect-vect",
    "homomorphism-vect-gauge",
    "homomorphism-gauge-gauge",
    "homomorphism-vect-rescale",
    "homomorphism-rescale-rescale",
    "homomorphism-rescale-gauge",
    "gl-n",
    "covariance-x-vect",
    "covariance-x-gauge",
    "covariance-s-vect",
    "covariance-s-gauge",
    "scale-covariance-vect",
    "scale-covariance-gauge",
    "curvature-x",
    "curvature-s",
    "curvature-cross",
    "special-gauge-fs",
];

/// Everything a single trial needs.
struct Ctx {
    space: JetSpace,
    rep: ModuleRep,
    /// Base degree; chosen so that no composite in the suite exceeds the cap.
    d0: u32,
}

impl Ctx {
    fn phi(&self, rng: &mut ChaCha8Rng) -> JetPoly {
        random_section(self.space, self.rep.wdim, PolyShape { terms: 3, max_deg: self.d0, x_only: false }, rng)
    }
    fn vect(&self, rng: &mut ChaCha8Rng) -> Generator {
        random_vect(self.space, self.d0, rng)
    }
    fn gauge(&self, rng: &mut ChaCha8Rng) -> Generator {
        random_gauge(self.space, self.rep.dim_g(), self.d0 - 1, rng)
    }
    fn rescale(&self, rng: &mut ChaCha8Rng) -> Generator {
        random_rescale(self.space, self.d0 - 1, rng)
    }
    fn conn(&self, rng: &mut ChaCha8Rng) -> crate::connection::GerbeConnection {
        random_connection(self.space, self.rep.dim_g(), self.d0 - 1, 0.3, true, rng)
    }
    fn s_index(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let all = self.space.s_indices_ordered();
        all[rng.random_range(0..all.len())].clone()
    }
}

fn first_nonzero(ps: impl IntoIterator<Item = JetPoly>) -> Option<String> {
    ps.into_iter().find_map(|p| p.witness())
}

fn generator_witness(g: &Generator) -> Option<String> {
    match g {
        Generator::Vect(c) | Generator::Gauge(c) => first_nonzero(c.iter().cloned()),
        Generator::Rescale(f) => f.witness(),
    }
}

/// One trial of one identity; `Ok(None)` means exact zero.
fn run_trial(ctx: &Ctx, name: &str, rng: &mut ChaCha8Rng) -> Result<Option<String>> {
    let rep = &ctx.rep;
    let sp = ctx.space;
    let n = sp.n;
    Ok(match name {
        "heisenberg" => {
            let phi = ctx.phi(rng);
            let mut res = Vec::new();
            for mu in 0..n {
                for nu in 0..n {
                    let lhs = phi.mul_var(mu)?.dx(nu).sub(&phi.dx(nu).mul_var(mu)?)?;
                    let want = if mu == nu { phi.clone() } else { JetPoly::zero(sp, phi.wdim()) };
                    res.push(lhs.sub(&want)?);
                }
            }
            for r in sp.s_indices_ordered() {
                for m in sp.s_indices_ordered() {
                    let lhs = phi.mul_s(&m)?.eth(&r).sub(&phi.eth(&r).mul_s(&m)?)?;
                    let delta = if sp.p == 1 {
                        (m[0] == r[0]) as i64
                    } else {
                        (m[0] == r[0] && m[1] == r[1]) as i64 - (m[0] == r[1] && m[1] == r[0]) as i64
                    };
                    res.push(lhs.sub(&phi.scale(&pform_core::rational::int(delta)))?);
                }
            }
            first_nonzero(res)
        }
        "bracket-antisymmetry" => {
            let gens = [ctx.vect(rng), ctx.gauge(rng), ctx.rescale(rng), ctx.vect(rng), ctx.gauge(rng)];
            let mut out = None;
            for a in &gens {
                for b in &gens {
                    if out.is_none() {
                        out = generator_witness(&antisymmetry_residual(rep, a, b)?);
                    }
                }
            }
            out
        }
        "bracket-jacobi" => {
            let (v1, v2, v3) = (ctx.vect(rng), ctx.vect(rng), ctx.vect(rng));
            let (x1, x2, x3) = (ctx.gauge(rng), ctx.gauge(rng), ctx.gauge(rng));
            let (f1, f2) = (ctx.rescale(rng), ctx.rescale(rng));
            let triples = [
                (&v1, &v2, &v3),
                (&v1, &v2, &x1),
                (&v1, &x1, &x2),
                (&x1, &x2, &x3),
                (&v1, &v2, &f1),
                (&v1, &f1, &f2),
                (&v1, &f1, &x1),
                (&f1, &x1, &x2),
                (&f1, &f2, &x1),
            ];
            let mut out = None;
            for (a, b, c) in triples {
                if out.is_none() {
                    out = generator_witness(&jacobi_residual(rep, a, b, c)?);
                }
            }
            out
        }
        h if h.starts_with("homomorphism-") => {
            let (g1, g2) = match h {
                "homomorphism-vect-vect" => (ctx.vect(rng), ctx.vect(rng)),
                "homomorphism-vect-gauge" => (ctx.vect(rng), ctx.gauge(rng)),
                "homomorphism-gauge-gauge" => (ctx.gauge(rng), ctx.gauge(rng)),
                "homomorphism-vect-rescale" => (ctx.vect(rng), ctx.rescale(rng)),
                "homomorphism-rescale-rescale" => (ctx.rescale(rng), ctx.rescale(rng)),
                "homomorphism-rescale-gauge" => (ctx.rescale(rng), ctx.gauge(rng)),
                _ => return Err(JetError::Invalid(format!("unknown identity {h}"))),
            };
            let phi = ctx.phi(rng);
            homomorphism_residual(rep, &g1, &g2, &phi)?.witness()
        }
        "gl-n" => {
            let (worst, witness) = gl_n_residual(rep, sp, &s_monomials(sp, 2.min(sp.cap)))?;
            if worst.is_zero() {
                None
            } else {
                Some(witness.unwrap_or_else(|| format!("max deviation {worst}")))
            }
        }
        c if c.starts_with("covariance-") || c.starts_with("scale-covariance-") => {
            let conn = ctx.conn(rng);
            let g = if c.ends_with("vect") { ctx.vect(rng) } else { ctx.gauge(rng) };
            let phi = ctx.phi(rng);
            let res = if c.starts_with("scale-") {
                scale_covariance_residual(rep, &g, &conn, &phi)?
            } else if c.starts_with("covariance-x") {
                covariance_residual(rep, &g, &conn, &phi, &Direction::X(rng.random_range(0..n)))?
            } else {
                covariance_residual(rep, &g, &conn, &phi, &Direction::S(ctx.s_index(rng)))?
            };
            res.witness()
        }
        "curvature-x" => {
            let conn = ctx.conn(rng);
            let phi = ctx.phi(rng);
            let (mu, nu) = (rng.random_range(0..n), rng.random_range(0..n));
            curvature_x_residual(rep, &conn, mu, nu, &phi)?.witness()
        }
        "curvature-s" => {
            let conn = ctx.conn(rng);
            let phi = ctx.phi(rng);
            let (m, s) = (ctx.s_index(rng), ctx.s_index(rng));
            curvature_s_residual(rep, &conn, &m, &s, &phi)?.witness()
        }
        "curvature-cross" => {
            let conn = ctx.conn(rng);
            let phi = ctx.phi(rng);
            let mu = rng.random_range(0..n);
            let s = ctx.s_index(rng);
            cross_curvature_residual(rep, &conn, mu, &s, &phi)?.witness()
        }
        "special-gauge-fs" => {
            let u1 = ModuleRep::trivial(AlgebraKind::U1, n, sp.p)?;
            let shape = PolyShape { terms: 2, max_deg: ctx.d0, x_only: true };
            let mut form = FormField::zero(sp, sp.p + 1, 1);
            for idx in form.increasing_indices() {
                form.set_antisymmetric(0, &idx, random_scalar(sp, shape, rng))?;
            }
            fs_consistency(&u1, &form)?.projected.witness()
        }
        other => return Err(JetError::Invalid(format!("unknown identity {other}"))),
    })
}

/// Base degree for a cap: the deepest composite in the suite has degree
/// `3·d0 − 1`.
pub fn base_degree(cap: u32) -> u32 {
    ((cap + 1) / 3).max(1)
}

pub fn verify_identity(cfg: &VerifyConfig, name: &str) -> Result<IdentityResult> {
    Ok(verify_suite_named(cfg, &[name])?.remove(0))
}

pub fn verify_suite(cfg: &VerifyConfig) -> Result<Vec<IdentityResult>> {
    verify_suite_named(cfg, &IDENTITIES)
}

pub fn verify_suite_named(cfg: &VerifyConfig, names: &[&str]) -> Result<Vec<IdentityResult>> {
    let space = JetSpace::new(cfg.n, cfg.p, cfg.cap)?;
    if cfg.trials == 0 {
        return Err(JetError::Invalid("at least one trial is required".into()));
    }
    if cfg.cap < 2 {
        return Err(JetError::Invalid("the identity suite needs a degree cap of at least 2".into()));
    }
    for name in names {
        if !IDENTITIES.contains(name) {
            return Err(JetError::Invalid(format!("unknown identity {name:?}")));
        }
    }
    let rep = ModuleRep::new(cfg.module, cfg.algebra, cfg.n, cfg.p, Rational::one())?;
    let ctx = Ctx { space, rep, d0: base_degree(cfg.cap) };
    let tasks: Vec<(usize, usize)> = names
        .iter()
        .enumerate()
        .flat_map(|(i, name)| {
            let trials = if *name == "gl-n" { 1 } else { cfg.trials };
            (0..trials).map(move |t| (i, t))
        })
        .collect();
    let outcomes: Vec<(usize, Option<String>)> = tasks
        .par_iter()
        .map(|&(i, t)| {
            let id = IDENTITIES.iter().position(|n| *n == names[i]).expect("known") as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, &[id, t as u64]));
            let w = match run_trial(&ctx, names[i], &mut rng) {
                Ok(w) => w.map(|w| format!("trial {t}: {w}")),
                Err(e) => Some(format!("trial {t}: error: {e}")),
            };
            (i, w)
        })
        .collect();
    let mut results: Vec<IdentityResult> = names
        .iter()
        .map(|n| IdentityResult { identity: n.to_string(), status: Status::ExactZero, witness: None, trials: 0 })
        .collect();
    for (i, w) in outcomes {
        let r = &mut results[i];
        r.trials += 1;
        if let Some(w) = w {
            if r.witness.is_none() {
                r.status = Status::Failed;
                r.witness = Some(w);
            }
        }
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(module: ModuleKind, algebra: AlgebraKind, n: usize, p: usize) -> VerifyConfig {
        VerifyConfig { n, p, cap: 6, trials: 2, seed: 5, algebra, module }
    }

    #[test]
    fn budget() {
        assert_eq!(base_degree(8), 3);
        assert_eq!(base_degree(6), 2);
        assert_eq!(base_degree(2), 1);
    }

    #[test]
    fn small_suite_is_exact() {
        for (m, a, n, p) in [
            (ModuleKind::Vector, AlgebraKind::Sl2, 3, 2),
            (ModuleKind::Graded, AlgebraKind::U1, 2, 2),
            (ModuleKind::Trivial, AlgebraKind::Sl2, 2, 1),
        ] {
            for r in verify_suite(&cfg(m, a, n, p)).unwrap() {
                assert_eq!(r.status, Status::ExactZero, "{m} {a} n={n} p={p}: {r:?}");
            }
        }
    }

    #[test]
    fn deterministic() {
        let c = cfg(ModuleKind::Vector, AlgebraKind::Sl2, 2, 2);
        let a = serde_json::to_string(&verify_suite(&c).unwrap()).unwrap();
        let b = serde_json::to_string(&verify_suite(&c).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_identity() {
        let c = cfg(ModuleKind::Vector, AlgebraKind::U1, 2, 2);
        assert!(verify_identity(&c, "nope").is_err());
        assert_eq!(verify_identity(&c, "gl-n").unwrap().status, Status::ExactZero);
    }
}
