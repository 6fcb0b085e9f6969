//! Curvatures of a connection as operator-valued polynomials, with direct
//! commutator checks.

use crate::connection::{cov_deriv_s, cov_deriv_x, GerbeConnection};
use crate::error::Result;
use crate::generator::{gauge_action, t_tilde};
use crate::module::ModuleRep;
use crate::poly::JetPoly;

/// `R^κ_λ T̃^λ_κ + F_a J^a`, with `r[κ * n + λ] = R^κ_λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    pub n: usize,
    pub r: Vec<JetPoly>,
    pub f: Vec<JetPoly>,
}

impl Curvature {
    pub fn r(&self, kappa: usize, lambda: usize) -> &JetPoly {
        &self.r[kappa * self.n + lambda]
    }

    pub fn is_zero(&self) -> bool {
        self.r.iter().chain(&self.f).all(|p| p.is_zero())
    }

    pub fn apply(&self, rep: &ModuleRep, phi: &JetPoly) -> Result<JetPoly> {
        let mut out = gauge_action(rep, &self.f, phi)?;
        for k in 0..self.n {
            for l in 0..self.n {
                let c = self.r(k, l);
                if !c.is_zero() {
                    out.add_assign(&c.mul(&t_tilde(rep, l, k, phi)?)?)?;
                }
            }
        }
        Ok(out)
    }
}

fn f_pair(rep: &ModuleRep, x: &[JetPoly], y: &[JetPoly], c: usize) -> Result<JetPoly> {
    let mut out = JetPoly::zero(x[0].space(), 1);
    for a in 0..x.len() {
        for b in 0..y.len() {
            let f = &rep.f[a][b][c];
            if num_traits::Zero::is_zero(f) || x[a].is_zero() || y[b].is_zero() {
                continue;
            }
            out.add_assign(&x[a].mul(&y[b])?.scale(f))?;
        }
    }
    Ok(out)
}

/// `Γ^α_{βμ} E^β_α f`.
fn gamma_e(conn: &GerbeConnection, mu: usize, f: &JetPoly) -> Result<JetPoly> {
    let n = conn.space.n;
    let mut out = JetPoly::zero(f.space(), 1);
    for a in 0..n {
        for b in 0..n {
            let g = conn.gamma(a, b, mu);
            if !g.is_zero() {
                out.add_assign(&g.mul(&f.e_op(b, a)?)?)?;
            }
        }
    }
    Ok(out)
}

fn a_col(conn: &GerbeConnection, nu: usize) -> Vec<JetPoly> {
    (0..conn.dim_g).map(|a| conn.a(a, nu).clone()).collect()
}

fn b_col(conn: &GerbeConnection, s: &[usize]) -> Vec<JetPoly> {
    (0..conn.dim_g).map(|a| conn.b(a, s)).collect()
}

/// `[∇_μ, ∇_ν] = R_{μν} + F_{μν}` with
///
/// `R^κ_λ = ∂_μΓ^κ_{λν} − ∂_νΓ^κ_{λμ} + Γ_μ·EΓ^κ_{λν} − Γ_ν·EΓ^κ_{λμ} + Γ^α_{λμ}Γ^κ_{αν} − Γ^κ_{αμ}Γ^α_{λν}`,
/// `F_c = ∂_μA_{cν} − ∂_νA_{cμ} + Γ_μ·EA_{cν} − Γ_ν·EA_{cμ} + f^{ab}_c A_{aμ}A_{bν}`.
pub fn curvature_x(rep: &ModuleRep, conn: &GerbeConnection, mu: usize, nu: usize) -> Result<Curvature> {
    let n = conn.space.n;
    let mut r = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            let mut v = conn.gamma(k, l, nu).dx(mu).sub(&conn.gamma(k, l, mu).dx(nu))?;
            v.add_assign(&gamma_e(conn, mu, conn.gamma(k, l, nu))?)?;
            v = v.sub(&gamma_e(conn, nu, conn.gamma(k, l, mu))?)?;
            for a in 0..n {
                v.add_assign(&conn.gamma(a, l, mu).mul(conn.gamma(k, a, nu))?)?;
                v = v.sub(&conn.gamma(k, a, mu).mul(conn.gamma(a, l, nu))?)?;
            }
            r.push(v);
        }
    }
    let (am, an) = (a_col(conn, mu), a_col(conn, nu));
    let mut f = Vec::with_capacity(conn.dim_g);
    for c in 0..conn.dim_g {
        let mut v = an[c].dx(mu).sub(&am[c].dx(nu))?;
        v.add_assign(&gamma_e(conn, mu, &an[c])?)?;
        v = v.sub(&gamma_e(conn, nu, &am[c])?)?;
        v.add_assign(&f_pair(rep, &am, &an, c)?)?;
        f.push(v);
    }
    Ok(Curvature { n, r, f })
}

/// `[∇_μ, ∇_ν]φ − (R_{μν} + F_{μν})φ`.
pub fn curvature_x_residual(
    rep: &ModuleRep,
    conn: &GerbeConnection,
    mu: usize,
    nu: usize,
    phi: &JetPoly,
) -> Result<JetPoly> {
    let a = cov_deriv_x(rep, conn, &cov_deriv_x(rep, conn, phi, nu)?, mu)?;
    let b = cov_deriv_x(rep, conn, &cov_deriv_x(rep, conn, phi, mu)?, nu)?;
    a.sub(&b)?.sub(&curvature_x(rep, conn, mu, nu)?.apply(rep, phi)?)
}

/// `F_c = ð_M B_{cS} − ð_S B_{cM} + f^{ab}_c B_{aM} B_{bS}`, so `[Δ_M, Δ_S] = F_c J^c`.
pub fn curvature_s(rep: &ModuleRep, conn: &GerbeConnection, m: &[usize], s: &[usize]) -> Result<Vec<JetPoly>> {
    let (bm, bs) = (b_col(conn, m), b_col(conn, s));
    let mut f = Vec::with_capacity(conn.dim_g);
    for c in 0..conn.dim_g {
        let mut v = bs[c].eth(m).sub(&bm[c].eth(s))?;
        v.add_assign(&f_pair(rep, &bm, &bs, c)?)?;
        f.push(v);
    }
    Ok(f)
}

pub fn curvature_s_residual(
    rep: &ModuleRep,
    conn: &GerbeConnection,
    m: &[usize],
    s: &[usize],
    phi: &JetPoly,
) -> Result<JetPoly> {
    let a = cov_deriv_s(rep, conn, &cov_deriv_s(rep, conn, phi, s)?, m)?;
    let b = cov_deriv_s(rep, conn, &cov_deriv_s(rep, conn, phi, m)?, s)?;
    a.sub(&b)?.sub(&gauge_action(rep, &curvature_s(rep, conn, m, s)?, phi)?)
}

/// `[∇_μ, Δ_S]`. Besides a `T̃` part and a gauge part it contains a
/// first-order part, `Σ_v c_v ∂/∂v` over the s variables, coming from
/// `[E, ð_S] ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCurvature {
    pub n: usize,
    /// Coefficient of `T̃^λ_κ` at `κ * n + λ`: `−ð_S Γ^κ_{λμ}`.
    pub r: Vec<JetPoly>,
    /// Coefficient of `∂/∂v` for each s variable `v` (in variable order).
    pub first_order: Vec<JetPoly>,
    /// `∂_μB_{cS} − ð_S A_{cμ} + Γ_μ·EB_{cS} + f^{ab}_c A_{aμ} B_{bS}`.
    pub f: Vec<JetPoly>,
}

impl CrossCurvature {
    pub fn apply(&self, rep: &ModuleRep, phi: &JetPoly) -> Result<JetPoly> {
        let curv = Curvature { n: self.n, r: self.r.clone(), f: self.f.clone() };
        let mut out = curv.apply(rep, phi)?;
        for (k, c) in self.first_order.iter().enumerate() {
            if !c.is_zero() {
                out.add_assign(&c.mul(&phi.d_var(self.n + k))?)?;
            }
        }
        Ok(out)
    }
}

pub fn cross_curvature(rep: &ModuleRep, conn: &GerbeConnection, mu: usize, s: &[usize]) -> Result<CrossCurvature> {
    let sp = conn.space;
    let n = sp.n;
    let mut r = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            r.push(conn.gamma(k, l, mu).eth(s).neg());
        }
    }
    // Γ^σ_{τμ}[E^τ_σ, ð_S] = −Γ^σ_{τμ} Σ_v ð_S(E^τ_σ v) ∂_v
    let mut first_order = Vec::with_capacity(sp.num_s());
    for v in n..sp.num_vars() {
        let ev = JetPoly::var(sp, v);
        let mut c = JetPoly::zero(sp, 1);
        for sg in 0..n {
            for t in 0..n {
                let g = conn.gamma(sg, t, mu);
                if g.is_zero() {
                    continue;
                }
                let k = ev.e_op(t, sg)?.eth(s);
                if !k.is_zero() {
                    c = c.sub(&g.mul(&k)?)?;
                }
            }
        }
        first_order.push(c);
    }
    let (am, bs) = (a_col(conn, mu), b_col(conn, s));
    let mut f = Vec::with_capacity(conn.dim_g);
    for c in 0..conn.dim_g {
        let mut v = bs[c].dx(mu).sub(&am[c].eth(s))?;
        v.add_assign(&gamma_e(conn, mu, &bs[c])?)?;
        v.add_assign(&f_pair(rep, &am, &bs, c)?)?;
        f.push(v);
    }
    Ok(CrossCurvature { n, r, first_order, f })
}

pub fn cross_curvature_residual(
    rep: &ModuleRep,
    conn: &GerbeConnection,
    mu: usize,
    s: &[usize],
    phi: &JetPoly,
) -> Result<JetPoly> {
    let a = cov_deriv_x(rep, conn, &cov_deriv_s(rep, conn, phi, s)?, mu)?;
    let b = cov_deriv_s(rep, conn, &cov_deriv_x(rep, conn, phi, mu)?, s)?;
    a.sub(&b)?.sub(&cross_curvature(rep, conn, mu, s)?.apply(rep, phi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{JetSpace, DEFAULT_CAP};
    use crate::random::{random_connection, random_section, PolyShape};
    use pform_core::liealg::AlgebraKind;
    use pform_core::rational::{frac, int};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sp(n: usize, p: usize) -> JetSpace {
        JetSpace::new(n, p, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn flat_connection() {
        let s = sp(3, 2);
        let rep = ModuleRep::trivial(AlgebraKind::Sl2, 3, 2).unwrap();
        let conn = GerbeConnection::zero(s, 3);
        assert!(curvature_x(&rep, &conn, 0, 1).unwrap().is_zero());
        assert!(curvature_s(&rep, &conn, &[0, 1], &[1, 2]).unwrap().iter().all(|p| p.is_zero()));
    }

    #[test]
    fn pure_gauge_abelian_is_flat() {
        let s = sp(3, 2);
        let rep = ModuleRep::trivial(AlgebraKind::U1, 3, 2).unwrap();
        let x = JetPoly::x(s, 0)
            .mul(&JetPoly::x(s, 2))
            .unwrap()
            .mul(&JetPoly::s(s, &[0, 1]))
            .unwrap()
            .add(&JetPoly::s(s, &[1, 2]).mul(&JetPoly::s(s, &[0, 2])).unwrap())
            .unwrap();
        let mut conn = GerbeConnection::zero(s, 1);
        for nu in 0..3 {
            conn.set_a(0, nu, x.dx(nu)).unwrap();
        }
        for lab in s.s_indices() {
            conn.set_b(0, &lab, x.eth(&lab)).unwrap();
        }
        for m in 0..3 {
            for n in 0..3 {
                assert!(curvature_x(&rep, &conn, m, n).unwrap().is_zero());
            }
        }
        assert!(curvature_s(&rep, &conn, &[0, 1], &[0, 2]).unwrap()[0].is_zero());
        assert!(cross_curvature(&rep, &conn, 1, &[1, 2]).unwrap().f[0].is_zero());
    }

    #[test]
    fn constant_nonabelian_a_gives_commutator() {
        let s = sp(2, 2);
        let rep = ModuleRep::trivial(AlgebraKind::Sl2, 2, 2).unwrap();
        let mut conn = GerbeConnection::zero(s, 3);
        conn.set_a(0, 0, JetPoly::scalar(s, int(2))).unwrap();
        conn.set_a(1, 1, JetPoly::scalar(s, frac(1, 3))).unwrap();
        let c = curvature_x(&rep, &conn, 0, 1).unwrap();
        // [2e, f/3] = (2/3) h
        assert!(c.f[0].is_zero() && c.f[1].is_zero());
        assert_eq!(c.f[2], JetPoly::scalar(s, frac(2, 3)));
        let b = {
            let mut b = GerbeConnection::zero(s, 3);
            b.set_b(0, &[0, 1], JetPoly::scalar(s, int(1))).unwrap();
            b
        };
        assert!(curvature_s(&rep, &b, &[0, 1], &[1, 0]).unwrap().iter().all(|p| p.is_zero()));
    }

    #[test]
    fn commutator_checks_on_random_connections() {
        let s = sp(3, 2);
        let rep = ModuleRep::vector(AlgebraKind::Sl2, 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..3 {
            let conn = random_connection(s, 3, 2, 0.3, true, &mut rng);
            let phi = random_section(s, rep.wdim, PolyShape { terms: 2, max_deg: 2, x_only: false }, &mut rng);
            assert!(curvature_x_residual(&rep, &conn, 0, 2, &phi).unwrap().is_zero());
            assert!(curvature_s_residual(&rep, &conn, &[0, 1], &[2, 1], &phi).unwrap().is_zero());
            assert!(cross_curvature_residual(&rep, &conn, 1, &[0, 2], &phi).unwrap().is_zero());
        }
    }
}
