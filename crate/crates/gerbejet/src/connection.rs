//! Connections `(A, Γ, B)`, covariant derivatives and their transformation
//! laws.
//!
//! * `∇_ν φ = ∂_ν φ + Γ^σ_{τν} T̃^τ_σ φ + A_{aν} J^a φ`
//! * `Δ_S φ = ð_S φ + B_{aS} J^a φ`

use pform_core::rational::int;

use crate::error::{JetError, Result};
use crate::generator::{directional, gauge_action, operator, t_tilde, xi_s_part, Generator};
use crate::module::ModuleRep;
use crate::poly::{JetPoly, JetSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct GerbeConnection {
    pub space: JetSpace,
    pub dim_g: usize,
    /// `A_{aν}` at `a * n + ν`.
    a: Vec<JetPoly>,
    /// `Γ^σ_{τν}` at `(σ * n + τ) * n + ν`.
    gamma: Vec<JetPoly>,
    /// `B_{aS}` at `a * num_s + k` for canonical `S`.
    b: Vec<JetPoly>,
}

impl GerbeConnection {
    pub fn zero(space: JetSpace, dim_g: usize) -> Self {
        let n = space.n;
        let z = JetPoly::zero(space, 1);
        Self {
            space,
            dim_g,
            a: vec![z.clone(); dim_g * n],
            gamma: vec![z.clone(); n * n * n],
            b: vec![z; dim_g * space.num_s()],
        }
    }

    fn check(&self, p: &JetPoly) -> Result<()> {
        if p.space().n != self.space.n || p.space().p != self.space.p || p.wdim() != 1 {
            return Err(JetError::Incompatible("connection components must be scalar jets on the same space".into()));
        }
        Ok(())
    }

    pub fn a(&self, a: usize, nu: usize) -> &JetPoly {
        &self.a[a * self.space.n + nu]
    }

    pub fn set_a(&mut self, a: usize, nu: usize, v: JetPoly) -> Result<()> {
        self.check(&v)?;
        let n = self.space.n;
        self.a[a * n + nu] = v;
        Ok(())
    }

    pub fn gamma(&self, sigma: usize, tau: usize, nu: usize) -> &JetPoly {
        let n = self.space.n;
        &self.gamma[(sigma * n + tau) * n + nu]
    }

    pub fn set_gamma(&mut self, sigma: usize, tau: usize, nu: usize, v: JetPoly) -> Result<()> {
        self.check(&v)?;
        let n = self.space.n;
        self.gamma[(sigma * n + tau) * n + nu] = v;
        Ok(())
    }

    /// `B_{aS}` for any ordering of `S` (zero on repeated indices).
    pub fn b(&self, a: usize, s: &[usize]) -> JetPoly {
        match self.space.s_var(s) {
            None => JetPoly::zero(self.space, 1),
            Some((v, sign)) => self.b[a * self.space.num_s() + v - self.space.n].scale(&int(sign)),
        }
    }

    /// Set `B_{aS}`; the antisymmetric partner follows automatically.
    pub fn set_b(&mut self, a: usize, s: &[usize], v: JetPoly) -> Result<()> {
        self.check(&v)?;
        let (var, sign) = self
            .space
            .s_var(s)
            .ok_or_else(|| JetError::Pattern(format!("B needs distinct indices, got {s:?}")))?;
        let ns = self.space.num_s();
        self.b[a * ns + var - self.space.n] = v.scale(&int(sign));
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(&self.gamma).chain(&self.b).all(|p| p.is_zero())
    }

    pub fn has_gamma(&self) -> bool {
        self.gamma.iter().any(|p| !p.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.space.n != other.space.n || self.space.p != other.space.p || self.dim_g != other.dim_g {
            return Err(JetError::Incompatible("connections of different shapes".into()));
        }
        let zip = |x: &[JetPoly], y: &[JetPoly]| -> Result<Vec<JetPoly>> {
            x.iter().zip(y).map(|(p, q)| p.add(q)).collect()
        };
        Ok(Self {
            space: self.space,
            dim_g: self.dim_g,
            a: zip(&self.a, &other.a)?,
            gamma: zip(&self.gamma, &other.gamma)?,
            b: zip(&self.b, &other.b)?,
        })
    }

    /// All components, for reporting: `(label, poly)`.
    pub fn labelled(&self) -> Vec<(String, &JetPoly)> {
        let n = self.space.n;
        let mut out = Vec::new();
        for a in 0..self.dim_g {
            for nu in 0..n {
                out.push((format!("A[{a}][{nu}]"), self.a(a, nu)));
            }
        }
        for s in 0..n {
            for t in 0..n {
                for nu in 0..n {
                    out.push((format!("Gamma[{s}][{t}][{nu}]"), self.gamma(s, t, nu)));
                }
            }
        }
        let labels = self.space.s_indices();
        for a in 0..self.dim_g {
            for (k, s) in labels.iter().enumerate() {
                out.push((format!("B[{a}]{s:?}"), &self.b[a * labels.len() + k]));
            }
        }
        out
    }

    fn validate(&self, rep: &ModuleRep) -> Result<()> {
        if rep.n != self.space.n || rep.p != self.space.p || rep.dim_g() != self.dim_g {
            return Err(JetError::Incompatible("connection and module disagree on (n, p, dim g)".into()));
        }
        Ok(())
    }
}

/// `∇_ν φ`.
pub fn cov_deriv_x(rep: &ModuleRep, conn: &GerbeConnection, phi: &JetPoly, nu: usize) -> Result<JetPoly> {
    conn.validate(rep)?;
    let n = conn.space.n;
    let mut out = phi.dx(nu);
    for s in 0..n {
        for t in 0..n {
            let g = conn.gamma(s, t, nu);
            if g.is_zero() {
                continue;
            }
            out.add_assign(&g.mul(&t_tilde(rep, t, s, phi)?)?)?;
        }
    }
    let a: Vec<JetPoly> = (0..conn.dim_g).map(|a| conn.a(a, nu).clone()).collect();
    out.add_assign(&gauge_action(rep, &a, phi)?)?;
    Ok(out)
}

/// `Δ_S φ`.
pub fn cov_deriv_s(rep: &ModuleRep, conn: &GerbeConnection, phi: &JetPoly, s: &[usize]) -> Result<JetPoly> {
    conn.validate(rep)?;
    let b: Vec<JetPoly> = (0..conn.dim_g).map(|a| conn.b(a, s)).collect();
    phi.eth(s).add(&gauge_action(rep, &b, phi)?)
}

/// `Σ_{S ordered} s^S Δ_S φ`.
pub fn s_contracted(rep: &ModuleRep, conn: &GerbeConnection, phi: &JetPoly) -> Result<JetPoly> {
    let mut out = JetPoly::zero(phi.space(), phi.wdim());
    for s in conn.space.s_indices_ordered() {
        out.add_assign(&cov_deriv_s(rep, conn, phi, &s)?.mul_s(&s)?)?;
    }
    Ok(out)
}

fn f_term(rep: &ModuleRep, x: &[JetPoly], y: &[JetPoly], c: usize) -> Result<JetPoly> {
    let sp = x[0].space();
    let mut out = JetPoly::zero(sp, 1);
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

/// `Γ^σ_{τν} E^τ_σ f`.
fn gamma_e(conn: &GerbeConnection, nu: usize, f: &JetPoly) -> Result<JetPoly> {
    let n = conn.space.n;
    let mut out = JetPoly::zero(f.space(), f.wdim());
    for s in 0..n {
        for t in 0..n {
            let g = conn.gamma(s, t, nu);
            if g.is_zero() {
                continue;
            }
            out.add_assign(&g.mul(&f.e_op(t, s)?)?)?;
        }
    }
    Ok(out)
}

/// First-order variation of the connection under `g`. Rescalings are not
/// supported: the calculus has no transformation law for `(A, Γ, B)` under them.
pub fn transform_connection(rep: &ModuleRep, g: &Generator, conn: &GerbeConnection) -> Result<GerbeConnection> {
    conn.validate(rep)?;
    g.validate(conn.space, rep)?;
    let n = conn.space.n;
    let dim = conn.dim_g;
    let mut out = GerbeConnection::zero(conn.space, dim);
    match g {
        Generator::Gauge(x) => {
            for c in 0..dim {
                for nu in 0..n {
                    let a_nu: Vec<JetPoly> = (0..dim).map(|a| conn.a(a, nu).clone()).collect();
                    let v = x[c].dx(nu).sub(&f_term(rep, x, &a_nu, c)?)?.add(&gamma_e(conn, nu, &x[c])?)?;
                    out.set_a(c, nu, v)?;
                }
                for s in conn.space.s_indices() {
                    let b_s: Vec<JetPoly> = (0..dim).map(|a| conn.b(a, &s)).collect();
                    let v = x[c].eth(&s).sub(&f_term(rep, x, &b_s, c)?)?;
                    out.set_b(c, &s, v)?;
                }
            }
        }
        Generator::Vect(xi) => {
            let lie = |f: &JetPoly| -> Result<JetPoly> { directional(xi, f)?.add(&xi_s_part(xi, f)?) };
            for a in 0..dim {
                for nu in 0..n {
                    let mut v = lie(conn.a(a, nu))?.neg();
                    for mu in 0..n {
                        v = v.sub(&xi[mu].dx(nu).mul(conn.a(a, mu))?)?;
                    }
                    out.set_a(a, nu, v)?;
                }
                for s in conn.space.s_indices() {
                    let mut v = lie(&conn.b(a, &s))?.neg();
                    for pos in 0..s.len() {
                        for mu in 0..n {
                            let mut s2 = s.clone();
                            s2[pos] = mu;
                            let b2 = conn.b(a, &s2);
                            if b2.is_zero() {
                                continue;
                            }
                            v = v.sub(&xi[mu].dx(s[pos]).mul(&b2)?)?;
                        }
                    }
                    out.set_b(a, &s, v)?;
                }
            }
            for k in 0..n {
                for l in 0..n {
                    for nu in 0..n {
                        let mut v = xi[k].dx(l).dx(nu).sub(&lie(conn.gamma(k, l, nu))?)?;
                        for m in 0..n {
                            v = v.add(&conn.gamma(m, l, nu).mul(&xi[k].dx(m))?)?;
                            v = v.sub(&conn.gamma(k, m, nu).mul(&xi[m].dx(l))?)?;
                            v = v.sub(&xi[m].dx(nu).mul(conn.gamma(k, l, m))?)?;
                        }
                        out.set_gamma(k, l, nu, v)?;
                    }
                }
            }
        }
        Generator::Rescale(_) => {
            return Err(JetError::Unsupported("connection variation under rescalings".into()));
        }
    }
    Ok(out)
}

/// `(δΓ_ν T̃ + δA_ν J) φ` for a variation `d`.
fn variation_x(rep: &ModuleRep, d: &GerbeConnection, phi: &JetPoly, nu: usize) -> Result<JetPoly> {
    cov_deriv_x(rep, d, phi, nu)?.sub(&phi.dx(nu))
}

fn variation_s(rep: &ModuleRep, d: &GerbeConnection, phi: &JetPoly, s: &[usize]) -> Result<JetPoly> {
    cov_deriv_s(rep, d, phi, s)?.sub(&phi.eth(s))
}

/// Which covariant derivative a covariance check is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Direction {
    X(usize),
    S(Vec<usize>),
}

/// `δ_g(∇φ) − ∇'(δ_g φ)` to first order, where `∇φ` transforms as a tensor
/// with the index terms of `g` and `∇' = ∇ + δ∇`. Vanishes identically.
pub fn covariance_residual(
    rep: &ModuleRep,
    g: &Generator,
    conn: &GerbeConnection,
    phi: &JetPoly,
    dir: &Direction,
) -> Result<JetPoly> {
    let d = transform_connection(rep, g, conn)?;
    let delta_phi = operator(rep, g, phi)?.neg();
    let n = conn.space.n;
    match dir {
        Direction::X(nu) => {
            let nu = *nu;
            let mut lhs = operator(rep, g, &cov_deriv_x(rep, conn, phi, nu)?)?.neg();
            if let Generator::Vect(xi) = g {
                for mu in 0..n {
                    let c = xi[mu].dx(nu);
                    if !c.is_zero() {
                        lhs = lhs.sub(&c.mul(&cov_deriv_x(rep, conn, phi, mu)?)?)?;
                    }
                }
            }
            lhs.sub(&cov_deriv_x(rep, conn, &delta_phi, nu)?)?.sub(&variation_x(rep, &d, phi, nu)?)
        }
        Direction::S(s) => {
            let mut lhs = operator(rep, g, &cov_deriv_s(rep, conn, phi, s)?)?.neg();
            if let Generator::Vect(xi) = g {
                for pos in 0..s.len() {
                    for mu in 0..n {
                        let c = xi[mu].dx(s[pos]);
                        if c.is_zero() {
                            continue;
                        }
                        let mut s2 = s.clone();
                        s2[pos] = mu;
                        lhs = lhs.sub(&c.mul(&cov_deriv_s(rep, conn, phi, &s2)?)?)?;
                    }
                }
            }
            lhs.sub(&cov_deriv_s(rep, conn, &delta_phi, s)?)?.sub(&variation_s(rep, &d, phi, s)?)
        }
    }
}

/// `δ_g(s^S Δ_S φ)` as a section minus the same quantity rebuilt from
/// `δ_g φ` and `δB`. Vanishes identically.
pub fn scale_covariance_residual(
    rep: &ModuleRep,
    g: &Generator,
    conn: &GerbeConnection,
    phi: &JetPoly,
) -> Result<JetPoly> {
    let d = transform_connection(rep, g, conn)?;
    let composite = operator(rep, g, &s_contracted(rep, conn, phi)?)?.neg();
    let delta_phi = operator(rep, g, phi)?.neg();
    let mut rebuilt = s_contracted(rep, conn, &delta_phi)?;
    for s in conn.space.s_indices_ordered() {
        rebuilt.add_assign(&variation_s(rep, &d, phi, &s)?.mul_s(&s)?)?;
    }
    composite.sub(&rebuilt)
}
