//! Rational matrices and the module data `(T, J, Λ, U)` acting on `W`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use pform_core::liealg::{build_algebra, rational_generators, AlgebraKind};
use pform_core::rational::{int, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{JetError, Result};

/// Sparse rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn scalar(n: usize, c: &Rational) -> Self {
        Self::identity(n).scale(c)
    }

    /// Matrix unit with a one at `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, Rational::one());
        m
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows && j < self.cols);
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    fn add_at(&mut self, i: usize, j: usize, v: &Rational) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_abs(&self) -> Rational {
        self.entries.values().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn apply(&self, w: &[Rational]) -> Vec<Rational> {
        assert_eq!(w.len(), self.cols);
        let mut out = vec![Rational::zero(); self.rows];
        for ((i, j), v) in &self.entries {
            if !w[*j].is_zero() {
                out[*i] += v * &w[*j];
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut by_row: BTreeMap<usize, Vec<(usize, &Rational)>> = BTreeMap::new();
        for ((k, j), v) in &other.entries {
            by_row.entry(*k).or_default().push((*j, v));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for ((i, k), a) in &self.entries {
            if let Some(row) = by_row.get(k) {
                for (j, b) in row {
                    out.add_at(*i, *j, &(a * *b));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for ((i, j), v) in &other.entries {
            out.add_at(*i, *j, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let entries = self.entries.iter().map(|(k, v)| (*k, v * c)).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Kronecker product, `(A ⊗ B)[(i,k),(j,l)] = A[i,j] B[k,l]`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for ((i, j), a) in &self.entries {
            for ((k, l), b) in &other.entries {
                out.set(i * other.rows + k, j * other.cols + l, a * b);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModuleKind {
    /// `W = V`, with `T = 0`.
    Trivial,
    /// `W = Q^n ⊗ V`, `T^μ_ν` the matrix unit `e_{μν}`.
    Vector,
    /// `W = (Q ⊕ tensors e_{ρ,S}) ⊗ V` with a nonzero `U` mapping the scalar
    /// line into the tensors.
    Graded,
}

impl std::str::FromStr for ModuleKind {
    type Err = JetError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trivial" => Ok(Self::Trivial),
            "vector" => Ok(Self::Vector),
            "graded" => Ok(Self::Graded),
            _ => Err(JetError::Invalid(format!("unknown module {s:?} (trivial, vector, graded)"))),
        }
    }
}

impl std::fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Trivial => "trivial",
            Self::Vector => "vector",
            Self::Graded => "graded",
        };
        f.write_str(s)
    }
}

/// Module `W` with its `gl(n)` action `T`, gauge action `J`, and the
/// rescaling data `Λ`, `U^ρ_S`.
#[derive(Debug, Clone)]
pub struct ModuleRep {
    pub kind: ModuleKind,
    pub algebra: AlgebraKind,
    pub n: usize,
    pub p: usize,
    pub wdim: usize,
    /// `f^{ab}_c` with `[J^a, J^b] = f^{ab}_c J^c`.
    pub f: Vec<Vec<Vec<Rational>>>,
    t: Vec<RatMatrix>,
    j: Vec<RatMatrix>,
    lambda: RatMatrix,
    /// Indexed by `ρ * num_s + k`, `k` the canonical s-index.
    u: Vec<RatMatrix>,
}

fn canonical_s(n: usize, p: usize) -> Vec<Vec<usize>> {
    if p == 1 {
        (0..n).map(|m| vec![m]).collect()
    } else {
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                out.push(vec![a, b]);
            }
        }
        out
    }
}

/// Position and sign of an s-index among the canonical ones.
fn s_position(n: usize, p: usize, s: &[usize]) -> Option<(usize, i64)> {
    if p == 1 {
        return Some((s[0], 1));
    }
    let (a, b) = (s[0], s[1]);
    if a == b {
        return None;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1) } else { (b, a, -1) };
    Some((lo * n - lo * (lo + 1) / 2 + (hi - lo - 1), sign))
}

impl ModuleRep {
    pub fn new(kind: ModuleKind, algebra: AlgebraKind, n: usize, p: usize, lambda0: Rational) -> Result<Self> {
        if !(p == 1 || p == 2) || n < p {
            return Err(JetError::Invalid(format!("module needs p in {{1,2}} and n >= p, got n={n}, p={p}")));
        }
        let (spec, _) = build_algebra(algebra)?;
        let gens = rational_generators(algebra)?;
        let d = gens[0].len();
        let jv: Vec<RatMatrix> = gens.iter().map(|g| RatMatrix::from_dense(g)).collect();
        let cs = canonical_s(n, p);
        let ns = cs.len();

        // the g-blind factor W0 with T0, Λ0, U0
        let (w0, t0, l0, u0) = match kind {
            ModuleKind::Trivial => {
                let t0 = vec![RatMatrix::zeros(1, 1); n * n];
                let u0 = vec![RatMatrix::zeros(1, 1); n * ns];
                (1, t0, RatMatrix::scalar(1, &lambda0), u0)
            }
            ModuleKind::Vector => {
                let mut t0 = Vec::with_capacity(n * n);
                for mu in 0..n {
                    for nu in 0..n {
                        t0.push(RatMatrix::unit(n, mu, nu));
                    }
                }
                let u0 = vec![RatMatrix::zeros(n, n); n * ns];
                (n, t0, RatMatrix::scalar(n, &lambda0), u0)
            }
            ModuleKind::Graded => {
                // basis: 0 = scalar line, 1 + ρ*ns + k = e_{ρ, cs[k]}
                let w0 = 1 + n * ns;
                let idx = |rho: usize, k: usize| 1 + rho * ns + k;
                let mut t0 = Vec::with_capacity(n * n);
                for mu in 0..n {
                    for nu in 0..n {
                        let mut m = RatMatrix::zeros(w0, w0);
                        for rho in 0..n {
                            for (k, s) in cs.iter().enumerate() {
                                let col = idx(rho, k);
                                if rho == nu {
                                    m.add_at(idx(mu, k), col, &Rational::one());
                                }
                                for pos in 0..p {
                                    if s[pos] != mu {
                                        continue;
                                    }
                                    let mut s2 = s.clone();
                                    s2[pos] = nu;
                                    if let Some((k2, sign)) = s_position(n, p, &s2) {
                                        m.add_at(idx(rho, k2), col, &int(-sign));
                                    }
                                }
                            }
                        }
                        t0.push(m);
                    }
                }
                let mut l0 = RatMatrix::scalar(w0, &(&lambda0 - int(p as i64)));
                l0.set(0, 0, lambda0.clone());
                let mut u0 = Vec::with_capacity(n * ns);
                for rho in 0..n {
                    for k in 0..ns {
                        let mut m = RatMatrix::zeros(w0, w0);
                        m.set(idx(rho, k), 0, Rational::one());
                        u0.push(m);
                    }
                }
                (w0, t0, l0, u0)
            }
        };
        let iv = RatMatrix::identity(d);
        let iw0 = RatMatrix::identity(w0);
        Ok(Self {
            kind,
            algebra,
            n,
            p,
            wdim: w0 * d,
            f: spec.f,
            t: t0.iter().map(|m| m.kron(&iv)).collect(),
            j: jv.iter().map(|m| iw0.kron(m)).collect(),
            lambda: l0.kron(&iv),
            u: u0.iter().map(|m| m.kron(&iv)).collect(),
        })
    }

    pub fn trivial(algebra: AlgebraKind, n: usize, p: usize) -> Result<Self> {
        Self::new(ModuleKind::Trivial, algebra, n, p, Rational::zero())
    }

    pub fn vector(algebra: AlgebraKind, n: usize, p: usize) -> Result<Self> {
        Self::new(ModuleKind::Vector, algebra, n, p, Rational::zero())
    }

    pub fn graded(algebra: AlgebraKind, n: usize, p: usize, lambda0: Rational) -> Result<Self> {
        Self::new(ModuleKind::Graded, algebra, n, p, lambda0)
    }

    pub fn dim_g(&self) -> usize {
        self.j.len()
    }

    pub fn num_s(&self) -> usize {
        canonical_s(self.n, self.p).len()
    }

    /// `T^μ_ν`.
    pub fn t(&self, mu: usize, nu: usize) -> &RatMatrix {
        &self.t[mu * self.n + nu]
    }

    /// Replace `T^μ_ν`; used to build deliberately broken modules.
    pub fn set_t(&mut self, mu: usize, nu: usize, m: RatMatrix) -> Result<()> {
        if m.rows() != self.wdim || m.cols() != self.wdim {
            return Err(JetError::Incompatible("T must act on W".into()));
        }
        self.t[mu * self.n + nu] = m;
        Ok(())
    }

    pub fn j(&self, a: usize) -> &RatMatrix {
        &self.j[a]
    }

    pub fn lambda(&self) -> &RatMatrix {
        &self.lambda
    }

    /// `U^ρ_S` for any ordering of `S`, as `(matrix, sign)`; `None` when `S`
    /// repeats an index.
    pub fn u(&self, rho: usize, s: &[usize]) -> Option<(&RatMatrix, i64)> {
        let (k, sign) = s_position(self.n, self.p, s)?;
        Some((&self.u[rho * self.num_s() + k], sign))
    }

    fn u_signed(&self, rho: usize, s: &[usize]) -> RatMatrix {
        match self.u(rho, s) {
            None => RatMatrix::zeros(self.wdim, self.wdim),
            Some((m, sign)) => m.scale(&int(sign)),
        }
    }

    pub fn has_rescaling_tensor(&self) -> bool {
        self.u.iter().any(|m| !m.is_zero())
    }

    /// Check every relation the calculus relies on. Returns the name of the
    /// first violated relation and its max-abs defect.
    pub fn check_relations(&self) -> std::result::Result<(), (String, Rational)> {
        let n = self.n;
        let w = self.wdim;
        let zero = RatMatrix::zeros(w, w);
        let fail = |name: String, m: &RatMatrix| -> std::result::Result<(), (String, Rational)> {
            if m.is_zero() {
                Ok(())
            } else {
                Err((name, m.max_abs()))
            }
        };
        for mu in 0..n {
            for nu in 0..n {
                for rho in 0..n {
                    for sg in 0..n {
                        let lhs = self.t(mu, nu).commutator(self.t(rho, sg));
                        let mut rhs = zero.clone();
                        if rho == nu {
                            rhs = rhs.add(self.t(mu, sg));
                        }
                        if mu == sg {
                            rhs = rhs.sub(self.t(rho, nu));
                        }
                        fail(format!("gl(n) [T{mu}{nu}, T{rho}{sg}]"), &lhs.sub(&rhs))?;
                    }
                }
                for a in 0..self.dim_g() {
                    fail(format!("[T{mu}{nu}, J{a}]"), &self.t(mu, nu).commutator(self.j(a)))?;
                }
                fail(format!("[Λ, T{mu}{nu}]"), &self.lambda.commutator(self.t(mu, nu)))?;
            }
        }
        for a in 0..self.dim_g() {
            for b in 0..self.dim_g() {
                let mut rhs = zero.clone();
                for c in 0..self.dim_g() {
                    rhs = rhs.add(&self.j(c).scale(&self.f[a][b][c]));
                }
                fail(format!("[J{a}, J{b}]"), &self.j(a).commutator(self.j(b)).sub(&rhs))?;
            }
            fail(format!("[Λ, J{a}]"), &self.lambda.commutator(self.j(a)))?;
        }
        let cs = canonical_s(n, self.p);
        let pp = int(self.p as i64);
        for rho in 0..n {
            for s in &cs {
                let u = self.u_signed(rho, s);
                fail(format!("[Λ, U{rho}{s:?}] + pU"), &self.lambda.commutator(&u).add(&u.scale(&pp)))?;
                for a in 0..self.dim_g() {
                    fail(format!("[U{rho}{s:?}, J{a}]"), &u.commutator(self.j(a)))?;
                }
                for rho2 in 0..n {
                    for s2 in &cs {
                        fail(format!("[U{rho}{s:?}, U{rho2}{s2:?}]"), &u.commutator(&self.u_signed(rho2, s2)))?;
                    }
                }
                for mu in 0..n {
                    for nu in 0..n {
                        // [T^μ_ν, U^ρ_S] = δ^ρ_ν U^μ_S − Σ_k δ^μ_{S_k} U^ρ_{S[k→ν]}
                        let mut rhs = zero.clone();
                        if rho == nu {
                            rhs = rhs.add(&self.u_signed(mu, s));
                        }
                        for pos in 0..self.p {
                            if s[pos] == mu {
                                let mut s2 = s.clone();
                                s2[pos] = nu;
                                rhs = rhs.sub(&self.u_signed(rho, &s2));
                            }
                        }
                        let lhs = self.t(mu, nu).commutator(&u);
                        fail(format!("[T{mu}{nu}, U{rho}{s:?}]"), &lhs.sub(&rhs))?;
                    }
                }
            }
        }
        Ok(())
    }
}
