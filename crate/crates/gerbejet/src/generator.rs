//! Symmetry generators, their action on sections and their brackets.
//!
//! Every generator `g` has an operator form `O_g`; sections transform as
//! `δφ = −O_g φ`:
//!
//! * `O_ξ = ξ^μ ∂_μ + ∂_ν ξ^μ T̃^ν_μ` with `T̃^ν_μ = E^ν_μ + T^ν_μ`,
//! * `O_X = X_a J^a`,
//! * `O_F = F (Ξ + Λ) + ∂_ρ F s^S U^ρ_S` (sum over ordered `S`).

use num_traits::{One, Zero};
use pform_core::rational::{int, Rational};
use serde::Serialize;

use crate::error::{JetError, Result};
use crate::module::ModuleRep;
use crate::poly::{JetPoly, JetSpace};

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Vector field `ξ^μ(x)`.
    Vect(Vec<JetPoly>),
    /// Gauge parameter `X_a(x, s)`.
    Gauge(Vec<JetPoly>),
    /// Rescaling `F(x)`.
    Rescale(JetPoly),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeneratorTag {
    Vect,
    Gauge,
    Rescale,
}

impl Generator {
    pub fn tag(&self) -> GeneratorTag {
        match self {
            Self::Vect(_) => GeneratorTag::Vect,
            Self::Gauge(_) => GeneratorTag::Gauge,
            Self::Rescale(_) => GeneratorTag::Rescale,
        }
    }

    pub fn zero_like(&self) -> Self {
        match self {
            Self::Vect(c) => Self::Vect(c.iter().map(|p| JetPoly::zero(p.space(), 1)).collect()),
            Self::Gauge(c) => Self::Gauge(c.iter().map(|p| JetPoly::zero(p.space(), 1)).collect()),
            Self::Rescale(f) => Self::Rescale(JetPoly::zero(f.space(), 1)),
        }
    }

    fn components(&self) -> Vec<&JetPoly> {
        match self {
            Self::Vect(c) | Self::Gauge(c) => c.iter().collect(),
            Self::Rescale(f) => vec![f],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|p| p.is_zero())
    }

    /// Check shapes against the jet space and module.
    pub fn validate(&self, space: JetSpace, rep: &ModuleRep) -> Result<()> {
        let comps = self.components();
        for c in &comps {
            if c.space().n != space.n || c.space().p != space.p || c.wdim() != 1 {
                return Err(JetError::Incompatible("generator components must be scalar jets".into()));
            }
        }
        match self {
            Self::Vect(c) => {
                if c.len() != space.n {
                    return Err(JetError::Incompatible(format!("vector field needs {} components", space.n)));
                }
                if c.iter().any(|p| !p.is_x_only()) {
                    return Err(JetError::Invalid("vector field components must not depend on s".into()));
                }
            }
            Self::Gauge(c) => {
                if c.len() != rep.dim_g() {
                    return Err(JetError::Incompatible(format!("gauge parameter needs {} components", rep.dim_g())));
                }
            }
            Self::Rescale(f) => {
                if !f.is_x_only() {
                    return Err(JetError::Invalid("rescaling function must not depend on s".into()));
                }
            }
        }
        if rep.n != space.n || rep.p != space.p {
            return Err(JetError::Incompatible("module built for a different (n, p)".into()));
        }
        Ok(())
    }

    /// Same-tag sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let zip = |a: &[JetPoly], b: &[JetPoly]| -> Result<Vec<JetPoly>> {
            a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
        };
        match (self, other) {
            (Self::Vect(a), Self::Vect(b)) => Ok(Self::Vect(zip(a, b)?)),
            (Self::Gauge(a), Self::Gauge(b)) => Ok(Self::Gauge(zip(a, b)?)),
            (Self::Rescale(a), Self::Rescale(b)) => Ok(Self::Rescale(a.add(b)?)),
            _ => Err(JetError::Incompatible("only generators of the same kind can be added".into())),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Self::Vect(c) => Self::Vect(c.iter().map(|p| p.neg()).collect()),
            Self::Gauge(c) => Self::Gauge(c.iter().map(|p| p.neg()).collect()),
            Self::Rescale(f) => Self::Rescale(f.neg()),
        }
    }
}

/// `T̃^μ_ν φ = E^μ_ν φ + T^μ_ν φ`.
pub fn t_tilde(rep: &ModuleRep, mu: usize, nu: usize, phi: &JetPoly) -> Result<JetPoly> {
    phi.e_op(mu, nu)?.add(&phi.apply_matrix(rep.t(mu, nu))?)
}

/// `Σ_a c_a J^a φ` for scalar coefficients `c_a(x, s)`.
pub fn gauge_action(rep: &ModuleRep, c: &[JetPoly], phi: &JetPoly) -> Result<JetPoly> {
    let mut out = JetPoly::zero(phi.space(), phi.wdim());
    for (a, ca) in c.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        out.add_assign(&ca.mul(&phi.apply_matrix(rep.j(a))?)?)?;
    }
    Ok(out)
}

/// `ξ^μ ∂_μ f` for any polynomial `f`.
pub fn directional(xi: &[JetPoly], f: &JetPoly) -> Result<JetPoly> {
    let mut out = JetPoly::zero(f.space(), f.wdim());
    for (mu, x) in xi.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        out.add_assign(&x.mul(&f.dx(mu))?)?;
    }
    Ok(out)
}

/// `∂_ν ξ^μ E^ν_μ f`, the s-part of the vector-field action on a function.
pub fn xi_s_part(xi: &[JetPoly], f: &JetPoly) -> Result<JetPoly> {
    let n = f.space().n;
    let mut out = JetPoly::zero(f.space(), f.wdim());
    for mu in 0..n {
        for nu in 0..n {
            let d = xi[mu].dx(nu);
            if d.is_zero() {
                continue;
            }
            out.add_assign(&d.mul(&f.e_op(nu, mu)?)?)?;
        }
    }
    Ok(out)
}

/// `O_g φ`.
pub fn operator(rep: &ModuleRep, g: &Generator, phi: &JetPoly) -> Result<JetPoly> {
    g.validate(phi.space(), rep)?;
    if phi.wdim() != rep.wdim {
        return Err(JetError::Incompatible(format!("section in dimension {}, module has {}", phi.wdim(), rep.wdim)));
    }
    let sp = phi.space();
    match g {
        Generator::Vect(xi) => {
            let mut out = directional(xi, phi)?;
            for mu in 0..sp.n {
                for nu in 0..sp.n {
                    let d = xi[mu].dx(nu);
                    if d.is_zero() {
                        continue;
                    }
                    out.add_assign(&d.mul(&t_tilde(rep, nu, mu, phi)?)?)?;
                }
            }
            Ok(out)
        }
        Generator::Gauge(x) => gauge_action(rep, x, phi),
        Generator::Rescale(f) => {
            let mut out = f.mul(&phi.xi_op().add(&phi.apply_matrix(rep.lambda())?)?)?;
            if rep.has_rescaling_tensor() {
                for rho in 0..sp.n {
                    let df = f.dx(rho);
                    if df.is_zero() {
                        continue;
                    }
                    let mut acc = JetPoly::zero(sp, phi.wdim());
                    for s in sp.s_indices_ordered() {
                        if let Some((u, sign)) = rep.u(rho, &s) {
                            let term = phi.apply_matrix(u)?.mul_s(&s)?;
                            acc.add_assign(&term.scale(&int(sign)))?;
                        }
                    }
                    out.add_assign(&df.mul(&acc)?)?;
                }
            }
            Ok(out)
        }
    }
}

/// Infinitesimal action on a section, `δ_g φ = −O_g φ`.
pub fn apply_generator(rep: &ModuleRep, g: &Generator, phi: &JetPoly) -> Result<JetPoly> {
    Ok(operator(rep, g, phi)?.neg())
}

fn f_bracket(rep: &ModuleRep, x: &[JetPoly], y: &[JetPoly]) -> Result<Vec<JetPoly>> {
    let sp = x[0].space();
    let dim = rep.dim_g();
    let mut out = vec![JetPoly::zero(sp, 1); dim];
    for a in 0..dim {
        for b in 0..dim {
            if x[a].is_zero() || y[b].is_zero() {
                continue;
            }
            let xy = x[a].mul(&y[b])?;
            for (c, o) in out.iter_mut().enumerate() {
                let fc = &rep.f[a][b][c];
                if !fc.is_zero() {
                    o.add_assign(&xy.scale(fc))?;
                }
            }
        }
    }
    Ok(out)
}

/// Bracket with `[O_{g1}, O_{g2}] = O_{[g1, g2]}`.
pub fn bracket(rep: &ModuleRep, g1: &Generator, g2: &Generator) -> Result<Generator> {
    use Generator::*;
    Ok(match (g1, g2) {
        (Vect(xi), Vect(eta)) => {
            let mut out = Vec::with_capacity(xi.len());
            for nu in 0..xi.len() {
                out.push(directional(xi, &eta[nu])?.sub(&directional(eta, &xi[nu])?)?);
            }
            Vect(out)
        }
        (Vect(xi), Gauge(x)) => {
            let mut out = Vec::with_capacity(x.len());
            for xa in x {
                out.push(directional(xi, xa)?.add(&xi_s_part(xi, xa)?)?);
            }
            Gauge(out)
        }
        (Gauge(x), Gauge(y)) => Gauge(f_bracket(rep, x, y)?),
        (Vect(xi), Rescale(f)) => Rescale(directional(xi, f)?),
        (Rescale(f), Rescale(_)) => Rescale(JetPoly::zero(f.space(), 1)),
        (Rescale(f), Gauge(x)) => {
            let mut out = Vec::with_capacity(x.len());
            for xa in x {
                out.push(f.mul(&xa.xi_op())?);
            }
            Gauge(out)
        }
        (Gauge(_), Vect(_)) | (Rescale(_), Vect(_)) | (Gauge(_), Rescale(_)) => bracket(rep, g2, g1)?.neg(),
    })
}

/// `[O_{g1}, O_{g2}] φ − O_{[g1,g2]} φ`; identically zero.
pub fn homomorphism_residual(rep: &ModuleRep, g1: &Generator, g2: &Generator, phi: &JetPoly) -> Result<JetPoly> {
    let a = operator(rep, g1, &operator(rep, g2, phi)?)?;
    let b = operator(rep, g2, &operator(rep, g1, phi)?)?;
    let c = operator(rep, &bracket(rep, g1, g2)?, phi)?;
    a.sub(&b)?.sub(&c)
}

/// `[[g1,g2],g3] + [[g2,g3],g1] + [[g3,g1],g2]`.
pub fn jacobi_residual(rep: &ModuleRep, g1: &Generator, g2: &Generator, g3: &Generator) -> Result<Generator> {
    let a = bracket(rep, &bracket(rep, g1, g2)?, g3)?;
    let b = bracket(rep, &bracket(rep, g2, g3)?, g1)?;
    let c = bracket(rep, &bracket(rep, g3, g1)?, g2)?;
    a.add(&b)?.add(&c)
}

/// `[g1,g2] + [g2,g1]`.
pub fn antisymmetry_residual(rep: &ModuleRep, g1: &Generator, g2: &Generator) -> Result<Generator> {
    bracket(rep, g1, g2)?.add(&bracket(rep, g2, g1)?)
}

/// Every s-monomial of degree at most `max_deg`, as exponent vectors.
pub fn s_monomials(space: JetSpace, max_deg: u32) -> Vec<Vec<u8>> {
    let ns = space.num_s();
    let mut out = Vec::new();
    let mut cur = vec![0u8; ns];
    fn rec(k: usize, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[k] = e as u8;
            rec(k + 1, left - e, cur, out);
        }
        cur[k] = 0;
    }
    rec(0, max_deg, &mut cur, &mut out);
    out.into_iter()
        .map(|s| {
            let mut e = vec![0u8; space.n];
            e.extend(s);
            e
        })
        .collect()
}

/// Largest coefficient of `[T̃^μ_ν, T̃^ρ_σ]φ − (δ^ρ_ν T̃^μ_σ − δ^μ_σ T̃^ρ_ν)φ`
/// over trial sections `φ = monomial ⊗ w_k` for every basis vector `w_k`.
/// The `x` variables are inert under `T̃`, so trial monomials in `s` suffice.
pub fn gl_n_residual(rep: &ModuleRep, space: JetSpace, monomials: &[Vec<u8>]) -> Result<(Rational, Option<String>)> {
    let n = space.n;
    let mut worst = Rational::zero();
    let mut witness = None;
    for e in monomials {
        for k in 0..rep.wdim {
            let mut w = vec![Rational::zero(); rep.wdim];
            w[k] = Rational::one();
            let phi = JetPoly::monomial(space, e.clone(), w)?;
            for mu in 0..n {
                for nu in 0..n {
                    for rho in 0..n {
                        for sg in 0..n {
                            let ab = t_tilde(rep, mu, nu, &t_tilde(rep, rho, sg, &phi)?)?;
                            let ba = t_tilde(rep, rho, sg, &t_tilde(rep, mu, nu, &phi)?)?;
                            let mut res = ab.sub(&ba)?;
                            if rho == nu {
                                res = res.sub(&t_tilde(rep, mu, sg, &phi)?)?;
                            }
                            if mu == sg {
                                res = res.add(&t_tilde(rep, rho, nu, &phi)?)?;
                            }
                            let m = res.max_abs_coefficient();
                            if m > worst {
                                worst = m;
                                witness = Some(format!(
                                    "T{}{} T{}{} on {}: {}",
                                    mu + 1,
                                    nu + 1,
                                    rho + 1,
                                    sg + 1,
                                    phi.monomial_name(e),
                                    res.witness().unwrap_or_default()
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((worst, witness))
}
