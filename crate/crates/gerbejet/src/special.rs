//! Antisymmetric form fields, the special-gauge lift and the form
//! curvatures built from it.

use num_traits::{Signed, Zero};
use pform_core::rational::{frac, int, Rational};

use crate::connection::GerbeConnection;
use crate::curvature::curvature_x;
use crate::error::{JetError, Result};
use crate::generator::Generator;
use crate::module::ModuleRep;
use crate::poly::{JetPoly, JetSpace};

/// Sign of the permutation sorting `idx`, or `None` on a repeated index.
pub fn perm_sign(idx: &[usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] == idx[j] {
                return None;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    Some(sign)
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(r - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, r - 1);
            out.push(q);
        }
    }
    out
}

fn increasing(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Rank-`r` array of scalar jets per algebra index, `X_{a i1 … ir}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    pub space: JetSpace,
    pub rank: usize,
    pub dim_g: usize,
    data: Vec<JetPoly>,
}

impl FormField {
    pub fn zero(space: JetSpace, rank: usize, dim_g: usize) -> Self {
        let len = dim_g * space.n.pow(rank as u32);
        Self { space, rank, dim_g, data: vec![JetPoly::zero(space, 1); len] }
    }

    fn flat(&self, a: usize, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.rank);
        idx.iter().fold(a, |acc, &i| {
            assert!(i < self.space.n);
            acc * self.space.n + i
        })
    }

    pub fn get(&self, a: usize, idx: &[usize]) -> &JetPoly {
        &self.data[self.flat(a, idx)]
    }

    /// Set one entry without touching the others.
    pub fn set_raw(&mut self, a: usize, idx: &[usize], v: JetPoly) {
        let k = self.flat(a, idx);
        self.data[k] = v;
    }

    /// Set `X_{a idx}` and every permutation with its sign.
    pub fn set_antisymmetric(&mut self, a: usize, idx: &[usize], v: JetPoly) -> Result<()> {
        let s0 = perm_sign(idx).ok_or_else(|| JetError::Pattern(format!("repeated index in {idx:?}")))?;
        for p in permutations(self.rank) {
            let q: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
            let s = perm_sign(&q).expect("distinct") * s0;
            self.set_raw(a, &q, v.scale(&int(s)));
        }
        Ok(())
    }

    /// Build from the entries at increasing index tuples.
    pub fn from_increasing<I>(space: JetSpace, rank: usize, dim_g: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Vec<usize>, JetPoly)>,
    {
        let mut f = Self::zero(space, rank, dim_g);
        for (a, idx, v) in entries {
            if a >= dim_g || idx.len() != rank || idx.iter().any(|&i| i >= space.n) {
                return Err(JetError::Incompatible(format!("bad form index {a}, {idx:?}")));
            }
            f.set_antisymmetric(a, &idx, v)?;
        }
        Ok(f)
    }

    pub fn increasing_indices(&self) -> Vec<Vec<usize>> {
        increasing(self.space.n, self.rank)
    }

    fn all_indices(&self) -> Vec<Vec<usize>> {
        let n = self.space.n;
        let mut out = vec![vec![]];
        for _ in 0..self.rank {
            out = out
                .into_iter()
                .flat_map(|v: Vec<usize>| {
                    (0..n).map(move |i| {
                        let mut w = v.clone();
                        w.push(i);
                        w
                    })
                })
                .collect();
        }
        out
    }

    /// Total antisymmetry, which for rank 3 is the pattern
    /// `X_{μνρ} = X_{νρμ} = −X_{νμρ}`.
    pub fn check_antisymmetric(&self) -> Result<()> {
        for a in 0..self.dim_g {
            for idx in self.all_indices() {
                let v = self.get(a, &idx);
                match perm_sign(&idx) {
                    None => {
                        if !v.is_zero() {
                            return Err(JetError::Pattern(format!("component {a} {idx:?} with a repeated index is nonzero")));
                        }
                    }
                    Some(s) => {
                        let mut sorted = idx.clone();
                        sorted.sort_unstable();
                        if *v != self.get(a, &sorted).scale(&int(s)) {
                            return Err(JetError::Pattern(format!("component {a} {idx:?} breaks antisymmetry")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_x_only(&self) -> bool {
        self.data.iter().all(|p| p.is_x_only())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|p| p.is_zero())
    }

    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&JetPoly) -> Result<JetPoly>,
    {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self { data, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rank != other.rank || self.dim_g != other.dim_g {
            return Err(JetError::Incompatible("forms of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect::<Result<Vec<_>>>()?;
        Ok(Self { data, ..self.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.sub(&other.map(|p| Ok(p.neg()))?)
    }

    /// First nonzero entry as `"a [i..]: witness"`.
    pub fn witness(&self) -> Option<String> {
        for a in 0..self.dim_g {
            for idx in self.all_indices() {
                if let Some(w) = self.get(a, &idx).witness() {
                    return Some(format!("{a} {idx:?}: {w}"));
                }
            }
        }
        None
    }

    pub fn max_abs_coefficient(&self) -> Rational {
        self.data.iter().map(|p| p.max_abs_coefficient()).max().unwrap_or_else(Rational::zero)
    }

    /// Full antisymmetrization `(1/r!) Σ_π sign(π) X_{π(idx)}`.
    pub fn alt(&self) -> Result<Self> {
        let perms = permutations(self.rank);
        let norm = frac(1, perms.len() as i64);
        let mut out = Self::zero(self.space, self.rank, self.dim_g);
        for a in 0..self.dim_g {
            for idx in self.all_indices() {
                let mut acc = JetPoly::zero(self.space, 1);
                for p in &perms {
                    let q: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
                    let s = perm_sign(p).expect("permutation");
                    acc.add_assign(&self.get(a, &q).scale(&int(s)))?;
                }
                out.set_raw(a, &idx, acc.scale(&norm));
            }
        }
        Ok(out)
    }
}

fn check_form(rep: &ModuleRep, form: &FormField, rank: usize) -> Result<()> {
    if form.rank != rank {
        return Err(JetError::Incompatible(format!("expected a rank-{rank} form, got rank {}", form.rank)));
    }
    if form.dim_g != rep.dim_g() || form.space.n != rep.n || form.space.p != rep.p {
        return Err(JetError::Incompatible("form and module disagree on (n, p, dim g)".into()));
    }
    if !form.is_x_only() {
        return Err(JetError::Invalid("form coefficients must depend on x only".into()));
    }
    form.check_antisymmetric()
}

/// `Σ_{S ordered} s^S X_{a i S}` for each `a` and leading index `i`.
fn contract_s(form: &FormField, a: usize, lead: &[usize]) -> Result<JetPoly> {
    let mut out = JetPoly::zero(form.space, 1);
    for s in form.space.s_indices_ordered() {
        let mut idx = lead.to_vec();
        idx.extend(&s);
        let c = form.get(a, &idx);
        if !c.is_zero() {
            out.add_assign(&c.mul_s(&s)?)?;
        }
    }
    Ok(out)
}

/// `A_{aμ}(x, s) = A_{aμS}(x) s^S`, summed over ordered `S`; `Γ = B = 0`.
/// Takes a rank-3 form for `p = 2` and a rank-2 form for `p = 1`.
pub fn special_gauge_lift(rep: &ModuleRep, form: &FormField) -> Result<GerbeConnection> {
    check_form(rep, form, rep.p + 1)?;
    let mut conn = GerbeConnection::zero(form.space, form.dim_g);
    for a in 0..form.dim_g {
        for mu in 0..form.space.n {
            conn.set_a(a, mu, contract_s(form, a, &[mu])?)?;
        }
    }
    Ok(conn)
}

/// Curvature of a special-gauge form: `F = derivative + bracket`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormCurvature {
    /// `2 Σ_k (−1)^k ∂_{i_k} A_{i without k}`, depends on `x` only.
    pub derivative: FormField,
    /// `Σ_k ± [A_{i without k}, B_{i_k}]`, `B_ρ = s^S A_{ρS}`; linear in `s`.
    pub bracket: FormField,
}

impl FormCurvature {
    pub fn total(&self) -> Result<FormField> {
        self.derivative.add(&self.bracket)
    }

    /// Bracket evaluated at `s*` given per canonical s-index.
    pub fn at(&self, s_star: &[Rational]) -> Result<FormField> {
        self.derivative.add(&self.bracket.map(|p| p.eval_s(s_star))?)
    }
}

/// `F_{μνρσ}` for `p = 2` or `F_{μνρ}` for `p = 1`, keeping `s` symbolic in
/// the bracket term.
pub fn form_curvature(rep: &ModuleRep, form: &FormField) -> Result<FormCurvature> {
    check_form(rep, form, rep.p + 1)?;
    let sp = form.space;
    let r = rep.p + 2;
    let dim = form.dim_g;
    let mut b = vec![vec![JetPoly::zero(sp, 1); sp.n]; dim];
    for (a, row) in b.iter_mut().enumerate() {
        for (rho, e) in row.iter_mut().enumerate() {
            *e = contract_s(form, a, &[rho])?;
        }
    }
    let mut deriv = FormField::zero(sp, r, dim);
    let mut brack = FormField::zero(sp, r, dim);
    for c in 0..dim {
        for idx in increasing(sp.n, r) {
            let mut d = JetPoly::zero(sp, 1);
            let mut br = JetPoly::zero(sp, 1);
            for k in 0..r {
                let rest: Vec<usize> = idx.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, &i)| i).collect();
                let sd = if k % 2 == 0 { 1 } else { -1 };
                d.add_assign(&form.get(c, &rest).dx(idx[k]).scale(&int(2 * sd)))?;
                let sb = if (r - 1 - k) % 2 == 0 { 1 } else { -1 };
                for a in 0..dim {
                    for bb in 0..dim {
                        let f = &rep.f[a][bb][c];
                        if f.is_zero() {
                            continue;
                        }
                        let x = form.get(a, &rest);
                        if x.is_zero() || b[bb][idx[k]].is_zero() {
                            continue;
                        }
                        br.add_assign(&x.mul(&b[bb][idx[k]])?.scale(&(f * int(sb))))?;
                    }
                }
            }
            deriv.set_antisymmetric(c, &idx, d)?;
            brack.set_antisymmetric(c, &idx, br)?;
        }
    }
    Ok(FormCurvature { derivative: deriv, bracket: brack })
}

/// `p = 2` entry point.
pub fn curvature_fourform(rep: &ModuleRep, a3: &FormField) -> Result<FormCurvature> {
    if rep.p != 2 {
        return Err(JetError::Unsupported("the four-form curvature needs p = 2".into()));
    }
    form_curvature(rep, a3)
}

/// `p = 1` entry point.
pub fn curvature_threeform(rep: &ModuleRep, a2: &FormField) -> Result<FormCurvature> {
    if rep.p != 1 {
        return Err(JetError::Unsupported("the three-form curvature needs p = 1".into()));
    }
    form_curvature(rep, a2)
}

fn is_abelian(rep: &ModuleRep) -> bool {
    rep.f.iter().flatten().flatten().all(|c| c.is_zero())
}

/// Abelian comparison of the lifted connection's curvature with the form
/// curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct FsReport {
    /// `G_{μνS}` with `F_{μν}(x, s) = G_{μνS} s^S` (ordered sum).
    pub g: FormField,
    /// `Alt(G) − F/(p+2)`; identically zero.
    pub projected: FormField,
    /// `max |G − Alt(G)|`, the part of `G` that is not a form.
    pub remainder: Rational,
}

pub fn fs_consistency(rep: &ModuleRep, form: &FormField) -> Result<FsReport> {
    if !is_abelian(rep) {
        return Err(JetError::Unsupported("exact Fs comparison needs an abelian algebra".into()));
    }
    let sp = form.space;
    let conn = special_gauge_lift(rep, form)?;
    let curv = form_curvature(rep, form)?;
    let r = rep.p + 2;
    let mut g = FormField::zero(sp, r, form.dim_g);
    let zero_s = vec![Rational::zero(); sp.num_s()];
    let norm = frac(1, rep.p as i64);
    for mu in 0..sp.n {
        for nu in 0..sp.n {
            let c = curvature_x(rep, &conn, mu, nu)?;
            for a in 0..form.dim_g {
                for s in sp.s_indices_ordered() {
                    let coef = c.f[a].eth(&s).eval_s(&zero_s)?.scale(&norm);
                    let mut idx = vec![mu, nu];
                    idx.extend(&s);
                    g.set_raw(a, &idx, coef);
                }
            }
        }
    }
    let alt = g.alt()?;
    let scaled = curv.derivative.map(|p| Ok(p.scale(&frac(1, r as i64))))?;
    let projected = alt.sub(&scaled)?;
    let remainder = g.sub(&alt)?.max_abs_coefficient();
    Ok(FsReport { g, projected, remainder })
}

/// `[X, Y]` for s-linear gauge parameters `X_a = X_{aS}(x) s^S`; returns the
/// largest coefficient of its s-quadratic part, which is zero exactly when
/// the bracket stays in the s-linear family.
pub fn subalgebra_closure_defect(rep: &ModuleRep, x: &FormField, y: &FormField) -> Result<Rational> {
    check_form(rep, x, rep.p)?;
    check_form(rep, y, rep.p)?;
    let lift = |f: &FormField| -> Result<Vec<JetPoly>> { (0..f.dim_g).map(|a| contract_s(f, a, &[])).collect() };
    let g = crate::generator::bracket(rep, &Generator::Gauge(lift(x)?), &Generator::Gauge(lift(y)?))?;
    let Generator::Gauge(c) = g else { unreachable!("gauge bracket") };
    Ok(c.iter().map(|p| p.s_degree_part(2).max_abs_coefficient()).max().unwrap_or_else(Rational::zero))
}

/// `s_S ∂_ν F^{μνS}` with indices moved by the identity metric, for an
/// abelian form. One polynomial per `(a, μ)`, at `a * n + μ`.
pub fn ym_divergence_residual(rep: &ModuleRep, form: &FormField) -> Result<Vec<JetPoly>> {
    if !is_abelian(rep) {
        return Err(JetError::Unsupported("the divergence check is abelian".into()));
    }
    let sp = form.space;
    let f = form_curvature(rep, form)?.derivative;
    let mut out = Vec::with_capacity(form.dim_g * sp.n);
    for a in 0..form.dim_g {
        for mu in 0..sp.n {
            let mut acc = JetPoly::zero(sp, 1);
            for nu in 0..sp.n {
                for s in sp.s_indices_ordered() {
                    let mut idx = vec![mu, nu];
                    idx.extend(&s);
                    let d = f.get(a, &idx).dx(nu);
                    if !d.is_zero() {
                        acc.add_assign(&d.mul_s(&s)?)?;
                    }
                }
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// Whether every coefficient of a residual list is zero.
pub fn all_zero(ps: &[JetPoly]) -> bool {
    ps.iter().all(|p| p.is_zero())
}

/// Largest absolute coefficient of a residual list.
pub fn max_abs(ps: &[JetPoly]) -> Rational {
    ps.iter().map(|p| p.max_abs_coefficient().abs()).max().unwrap_or_else(Rational::zero)
}
