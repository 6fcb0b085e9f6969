//! Polynomials in the base coordinates `x^μ` and the form coordinates `s`,
//! with exact rational coefficient vectors in a module `W`.
//!
//! For `p = 2` the stored `s` variables are `s^{μν}` with `μ < ν`; other
//! orderings are resolved through `s^{νμ} = −s^{μν}`. For `p = 1` they are
//! `s^μ`. Variables `0..n` are the `x^μ`, the rest are the `s`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use pform_core::rational::{int, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{JetError, Result};
use crate::module::RatMatrix;

pub const DEFAULT_CAP: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JetSpace {
    pub n: usize,
    pub p: usize,
    pub cap: u32,
}

impl JetSpace {
    pub fn new(n: usize, p: usize, cap: u32) -> Result<Self> {
        if !(p == 1 || p == 2) {
            return Err(JetError::Invalid(format!("form degree must be 1 or 2, got {p}")));
        }
        if n < p || n > 8 {
            return Err(JetError::Invalid(format!("base dimension {n} out of range for p = {p}")));
        }
        if cap == 0 || cap > 32 {
            return Err(JetError::Invalid(format!("degree cap {cap} out of range 1..=32")));
        }
        Ok(Self { n, p, cap })
    }

    pub fn num_s(&self) -> usize {
        if self.p == 1 {
            self.n
        } else {
            self.n * (self.n - 1) / 2
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n + self.num_s()
    }

    pub fn is_s_var(&self, v: usize) -> bool {
        v >= self.n
    }

    /// Canonical s-indices, in variable order.
    pub fn s_indices(&self) -> Vec<Vec<usize>> {
        if self.p == 1 {
            (0..self.n).map(|m| vec![m]).collect()
        } else {
            let mut out = Vec::new();
            for m in 0..self.n {
                for k in m + 1..self.n {
                    out.push(vec![m, k]);
                }
            }
            out
        }
    }

    /// Every s-index with distinct entries, both orders for `p = 2`.
    pub fn s_indices_ordered(&self) -> Vec<Vec<usize>> {
        if self.p == 1 {
            return self.s_indices();
        }
        let mut out = Vec::new();
        for m in 0..self.n {
            for k in 0..self.n {
                if m != k {
                    out.push(vec![m, k]);
                }
            }
        }
        out
    }

    /// Variable holding `s^S` and the sign relating them; `None` when `S`
    /// repeats an index (so `s^S = 0`).
    pub fn s_var(&self, s: &[usize]) -> Option<(usize, i64)> {
        assert_eq!(s.len(), self.p, "s-index has wrong length");
        if self.p == 1 {
            assert!(s[0] < self.n);
            return Some((self.n + s[0], 1));
        }
        let (a, b) = (s[0], s[1]);
        assert!(a < self.n && b < self.n);
        if a == b {
            return None;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1) } else { (b, a, -1) };
        let idx = lo * self.n - lo * (lo + 1) / 2 + (hi - lo - 1);
        Some((self.n + idx, sign))
    }

    /// Canonical s-index of an s variable.
    pub fn s_label(&self, v: usize) -> Vec<usize> {
        self.s_indices()[v - self.n].clone()
    }

    pub fn var_name(&self, v: usize) -> String {
        if v < self.n {
            format!("x{}", v + 1)
        } else {
            let idx: String = self.s_label(v).iter().map(|i| (i + 1).to_string()).collect();
            format!("s{idx}")
        }
    }

    fn check_compatible(&self, other: &JetSpace) -> Result<()> {
        if self.n != other.n || self.p != other.p {
            return Err(JetError::Incompatible(format!(
                "jet spaces (n={}, p={}) and (n={}, p={})",
                self.n, self.p, other.n, other.p
            )));
        }
        Ok(())
    }
}

pub type Exponents = Vec<u8>;

fn degree_of(e: &[u8]) -> u32 {
    e.iter().map(|&k| k as u32).sum()
}

fn s_degree_of(space: &JetSpace, e: &[u8]) -> u32 {
    e[space.n..].iter().map(|&k| k as u32).sum()
}

/// A polynomial with values in `Q^wdim`. Zero coefficient vectors are never
/// stored, and no stored monomial exceeds the degree cap.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoly {
    space: JetSpace,
    wdim: usize,
    terms: BTreeMap<Exponents, Vec<Rational>>,
}

impl JetPoly {
    pub fn zero(space: JetSpace, wdim: usize) -> Self {
        Self { space, wdim, terms: BTreeMap::new() }
    }

    pub fn constant(space: JetSpace, w: Vec<Rational>) -> Self {
        let mut p = Self::zero(space, w.len());
        if w.iter().any(|c| !c.is_zero()) {
            p.terms.insert(vec![0; space.num_vars()], w);
        }
        p
    }

    pub fn scalar(space: JetSpace, c: Rational) -> Self {
        Self::constant(space, vec![c])
    }

    pub fn one(space: JetSpace) -> Self {
        Self::scalar(space, Rational::one())
    }

    pub fn var(space: JetSpace, v: usize) -> Self {
        assert!(v < space.num_vars());
        let mut e = vec![0; space.num_vars()];
        e[v] = 1;
        let mut p = Self::zero(space, 1);
        p.terms.insert(e, vec![Rational::one()]);
        p
    }

    pub fn x(space: JetSpace, mu: usize) -> Self {
        assert!(mu < space.n);
        Self::var(space, mu)
    }

    /// `s^S` as a scalar polynomial, with the antisymmetric sign resolved.
    pub fn s(space: JetSpace, s: &[usize]) -> Self {
        match space.s_var(s) {
            None => Self::zero(space, 1),
            Some((v, sign)) => Self::var(space, v).scale(&int(sign)),
        }
    }

    /// Single term `c · Π vars^e`.
    pub fn monomial(space: JetSpace, e: Exponents, w: Vec<Rational>) -> Result<Self> {
        Self::from_terms(space, w.len(), [(e, w)])
    }

    pub fn from_terms<I>(space: JetSpace, wdim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Vec<Rational>)>,
    {
        let mut p = Self::zero(space, wdim);
        for (e, w) in terms {
            if e.len() != space.num_vars() || w.len() != wdim {
                return Err(JetError::Incompatible("term shape does not match the jet space".into()));
            }
            p.accumulate(e, &w, &Rational::one());
        }
        p.check_cap()?;
        Ok(p)
    }

    pub fn space(&self) -> JetSpace {
        self.space
    }

    pub fn wdim(&self) -> usize {
        self.wdim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Vec<Rational>)> {
        self.terms.iter()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| degree_of(e)).max().unwrap_or(0)
    }

    pub fn is_x_only(&self) -> bool {
        self.terms.keys().all(|e| s_degree_of(&self.space, e) == 0)
    }

    pub fn max_abs_coefficient(&self) -> Rational {
        let mut m = Rational::zero();
        for w in self.terms.values() {
            for c in w {
                if c.abs() > m {
                    m = c.abs();
                }
            }
        }
        m
    }

    /// The part of the polynomial whose s-degree equals `k`.
    pub fn s_degree_part(&self, k: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| s_degree_of(&self.space, e) == k)
            .map(|(e, w)| (e.clone(), w.clone()))
            .collect();
        Self { space: self.space, wdim: self.wdim, terms }
    }

    fn accumulate(&mut self, e: Exponents, w: &[Rational], factor: &Rational) {
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                let val: Vec<Rational> = w.iter().map(|b| factor * b).collect();
                if val.iter().any(|c| !c.is_zero()) {
                    slot.insert(val);
                }
            }
            Entry::Occupied(mut slot) => {
                for (a, b) in slot.get_mut().iter_mut().zip(w) {
                    *a += factor * b;
                }
                if slot.get().iter().all(|c| c.is_zero()) {
                    slot.remove();
                }
            }
        }
    }

    fn check_cap(&self) -> Result<()> {
        let d = self.degree();
        if d > self.space.cap {
            return Err(JetError::Overflow { degree: d, cap: self.space.cap });
        }
        Ok(())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        self.space.check_compatible(&other.space)?;
        if self.wdim != other.wdim {
            return Err(JetError::Incompatible(format!("module dimensions {} and {}", self.wdim, other.wdim)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, w) in &other.terms {
            out.accumulate(e.clone(), w, &Rational::one());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        let m1 = -Rational::one();
        for (e, w) in &other.terms {
            out.accumulate(e.clone(), w, &m1);
        }
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_same(other)?;
        for (e, w) in &other.terms {
            self.accumulate(e.clone(), w, &Rational::one());
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.space, self.wdim);
        }
        let terms = self.terms.iter().map(|(e, w)| (e.clone(), w.iter().map(|a| a * c).collect())).collect();
        Self { space: self.space, wdim: self.wdim, terms }
    }

    /// Product where at least one factor is scalar-valued (`wdim = 1`).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.space.check_compatible(&other.space)?;
        let (s, v) = if self.wdim == 1 {
            (self, other)
        } else if other.wdim == 1 {
            (other, self)
        } else {
            return Err(JetError::Incompatible("product of two module-valued polynomials".into()));
        };
        let mut out = Self::zero(self.space, v.wdim);
        for (e1, c) in &s.terms {
            for (e2, w) in &v.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.accumulate(e, w, &c[0]);
            }
        }
        out.check_cap()?;
        Ok(out)
    }

    /// `∂/∂v`, the raw variable derivative.
    pub fn d_var(&self, v: usize) -> Self {
        let mut out = Self::zero(self.space, self.wdim);
        for (e, w) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let k = int(e[v] as i64);
            let mut e2 = e.clone();
            e2[v] -= 1;
            out.accumulate(e2, w, &k);
        }
        out
    }

    pub fn dx(&self, mu: usize) -> Self {
        assert!(mu < self.space.n);
        self.d_var(mu)
    }

    /// `ð_S`, antisymmetric in the two indices for `p = 2`.
    pub fn eth(&self, s: &[usize]) -> Self {
        match self.space.s_var(s) {
            None => Self::zero(self.space, self.wdim),
            Some((v, sign)) => self.d_var(v).scale(&int(sign)),
        }
    }

    pub fn mul_var(&self, v: usize) -> Result<Self> {
        Self::var(self.space, v).mul(self)
    }

    pub fn mul_s(&self, s: &[usize]) -> Result<Self> {
        Self::s(self.space, s).mul(self)
    }

    /// Pointwise `M φ` for a `rows × wdim` matrix.
    pub fn apply_matrix(&self, m: &RatMatrix) -> Result<Self> {
        if m.cols() != self.wdim {
            return Err(JetError::Incompatible(format!(
                "matrix with {} columns applied to module of dimension {}",
                m.cols(),
                self.wdim
            )));
        }
        let mut out = Self::zero(self.space, m.rows());
        for (e, w) in &self.terms {
            let mw = m.apply(w);
            if mw.iter().any(|c| !c.is_zero()) {
                out.accumulate(e.clone(), &mw, &Rational::one());
            }
        }
        Ok(out)
    }

    pub fn component(&self, k: usize) -> Self {
        let mut out = Self::zero(self.space, 1);
        for (e, w) in &self.terms {
            if !w[k].is_zero() {
                out.terms.insert(e.clone(), vec![w[k].clone()]);
            }
        }
        out
    }

    pub fn from_components(space: JetSpace, comps: &[JetPoly]) -> Result<Self> {
        let wdim = comps.len();
        let mut out = Self::zero(space, wdim);
        for (k, c) in comps.iter().enumerate() {
            space.check_compatible(&c.space)?;
            if c.wdim != 1 {
                return Err(JetError::Incompatible("components must be scalar".into()));
            }
            for (e, w) in &c.terms {
                let mut v = vec![Rational::zero(); wdim];
                v[k] = w[0].clone();
                out.accumulate(e.clone(), &v, &Rational::one());
            }
        }
        Ok(out)
    }

    /// Scalar polynomial times a fixed vector of `W`.
    pub fn tensor(&self, w: &[Rational]) -> Result<Self> {
        if self.wdim != 1 {
            return Err(JetError::Incompatible("tensor expects a scalar polynomial".into()));
        }
        self.mul(&Self::constant(self.space, w.to_vec()))
    }

    /// `Σ_v (∂_v φ) · f(v)` over the s variables, for a derivation whose
    /// value on each s variable is the scalar polynomial `f(v)`.
    pub fn s_derivation<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(usize) -> JetPoly,
    {
        let mut out = Self::zero(self.space, self.wdim);
        for v in self.space.n..self.space.num_vars() {
            let d = self.d_var(v);
            if d.is_zero() {
                continue;
            }
            let fv = f(v);
            if fv.is_zero() {
                continue;
            }
            out.add_assign(&fv.mul(&d)?)?;
        }
        Ok(out)
    }

    /// `E^μ_ν`: for `p = 2` the derivation `s^{μρ}ð_{νρ}`, for `p = 1` `s^μ ∂/∂s^ν`.
    pub fn e_op(&self, mu: usize, nu: usize) -> Result<Self> {
        let sp = self.space;
        self.s_derivation(|v| e_on_var(sp, mu, nu, v))
    }

    /// `Ξ = Σ_μ E^μ_μ`, which multiplies each term by `p` times its s-degree.
    pub fn xi_op(&self) -> Self {
        let mut out = Self::zero(self.space, self.wdim);
        for (e, w) in &self.terms {
            let k = s_degree_of(&self.space, e) as i64 * self.space.p as i64;
            if k != 0 {
                out.accumulate(e.clone(), w, &int(k));
            }
        }
        out
    }

    /// Evaluate every s variable at a rational point given per canonical
    /// s-index, leaving a polynomial in `x` only.
    pub fn eval_s(&self, point: &[Rational]) -> Result<Self> {
        if point.len() != self.space.num_s() {
            return Err(JetError::Incompatible(format!("expected {} s values", self.space.num_s())));
        }
        let n = self.space.n;
        let mut out = Self::zero(self.space, self.wdim);
        for (e, w) in &self.terms {
            let mut f = Rational::one();
            for (k, &ek) in e[n..].iter().enumerate() {
                for _ in 0..ek {
                    f *= &point[k];
                }
            }
            let mut e2 = e.clone();
            for ek in e2[n..].iter_mut() {
                *ek = 0;
            }
            out.accumulate(e2, w, &f);
        }
        Ok(out)
    }

    pub fn monomial_name(&self, e: &[u8]) -> String {
        let mut parts = Vec::new();
        for (v, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(self.space.var_name(v)),
                _ => parts.push(format!("{}^{k}", self.space.var_name(v))),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// First nonzero term, e.g. `"x1^2*s12 [w0 = 3/2]"`; used as a failure witness.
    pub fn witness(&self) -> Option<String> {
        let (e, w) = self.terms.iter().next()?;
        let (k, c) = w.iter().enumerate().find(|(_, c)| !c.is_zero())?;
        Some(format!("{} [w{k} = {c}]", self.monomial_name(e)))
    }
}

/// `E^μ_ν` on a single s variable.
fn e_on_var(sp: JetSpace, mu: usize, nu: usize, v: usize) -> JetPoly {
    let lab = sp.s_label(v);
    if sp.p == 1 {
        return if lab[0] == nu { JetPoly::s(sp, &[mu]) } else { JetPoly::zero(sp, 1) };
    }
    let (a, b) = (lab[0], lab[1]);
    let mut out = JetPoly::zero(sp, 1);
    if a == nu {
        out.add_assign(&JetPoly::s(sp, &[mu, b])).expect("same space");
    }
    if b == nu {
        out.add_assign(&JetPoly::s(sp, &[a, mu])).expect("same space");
    }
    out
}

impl fmt::Display for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, w) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = if self.wdim == 1 {
                format!("({})", w[0])
            } else {
                let s: Vec<String> = w.iter().map(|c| c.to_string()).collect();
                format!("[{}]", s.join(", "))
            };
            write!(f, "{coef}*{}", self.monomial_name(e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pform_core::rational::frac;

    fn sp(n: usize, p: usize) -> JetSpace {
        JetSpace::new(n, p, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn s_index_normalization() {
        let s = sp(4, 2);
        assert_eq!(s.num_s(), 6);
        assert_eq!(s.s_var(&[0, 1]), Some((4, 1)));
        assert_eq!(s.s_var(&[1, 0]), Some((4, -1)));
        assert_eq!(s.s_var(&[2, 3]), Some((9, 1)));
        assert_eq!(s.s_var(&[3, 1]), Some((8, -1)));
        assert_eq!(s.s_var(&[2, 2]), None);
        for (k, lab) in s.s_indices().iter().enumerate() {
            assert_eq!(s.s_var(lab), Some((4 + k, 1)));
        }
        assert_eq!(s.var_name(6), "s14");
        let a = JetPoly::s(s, &[2, 0]);
        let b = JetPoly::s(s, &[0, 2]);
        assert!(a.add(&b).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_on_s() {
        // [ð_{ρσ}, s^{μν}] = δ^μ_ρ δ^ν_σ − δ^μ_σ δ^ν_ρ on the constant 1
        let s = sp(3, 2);
        let one = JetPoly::one(s);
        for r in 0..3 {
            for t in 0..3 {
                for m in 0..3 {
                    for k in 0..3 {
                        let got = one.mul_s(&[m, k]).unwrap().eth(&[r, t]);
                        let want = (m == r && k == t) as i64 - (m == t && k == r) as i64;
                        assert_eq!(got, JetPoly::scalar(s, int(want)), "{r}{t} {m}{k}");
                    }
                }
            }
        }
    }

    #[test]
    fn overflow_is_an_error() {
        let s = JetSpace::new(2, 2, 3).unwrap();
        let x = JetPoly::x(s, 0);
        let x3 = x.mul(&x).unwrap().mul(&x).unwrap();
        assert_eq!(x3.degree(), 3);
        assert!(matches!(x3.mul(&x), Err(JetError::Overflow { degree: 4, cap: 3 })));
        // a cancelling product never exceeds the cap
        let z = x3.sub(&x3).unwrap();
        assert!(z.mul(&x).unwrap().is_zero());
    }

    #[test]
    fn e_op_on_s12() {
        // E^μ_ν s^{αβ} = δ^α_ν s^{μβ} + δ^β_ν s^{αμ}
        let s = sp(3, 2);
        let s12 = JetPoly::s(s, &[0, 1]);
        assert_eq!(s12.e_op(0, 0).unwrap(), s12);
        assert_eq!(s12.e_op(1, 1).unwrap(), s12);
        assert!(s12.e_op(2, 2).unwrap().is_zero());
        assert_eq!(s12.e_op(2, 0).unwrap(), JetPoly::s(s, &[2, 1]));
        assert_eq!(s12.e_op(2, 1).unwrap(), JetPoly::s(s, &[0, 2]));
        // hand expansion of s^{μρ}ð_{νρ} for μ=2, ν=0
        let mut direct = JetPoly::zero(s, 1);
        for r in 0..3 {
            direct = direct.add(&s12.eth(&[0, r]).mul_s(&[2, r]).unwrap()).unwrap();
        }
        assert_eq!(direct, s12.e_op(2, 0).unwrap());
    }

    #[test]
    fn xi_counts_weighted_s_degree() {
        for p in [1, 2] {
            let s = sp(3, p);
            let x = JetPoly::x(s, 1);
            let v = s.n;
            let f = JetPoly::var(s, v).mul(&JetPoly::var(s, v + 1)).unwrap().add(&x).unwrap();
            let mut sum = JetPoly::zero(s, 1);
            for m in 0..3 {
                sum = sum.add(&f.e_op(m, m).unwrap()).unwrap();
            }
            assert_eq!(sum, f.xi_op());
            let want = f.sub(&x).unwrap().scale(&int(2 * p as i64));
            assert_eq!(f.xi_op(), want);
        }
    }

    #[test]
    fn components_and_witness() {
        let s = sp(2, 1);
        let a = JetPoly::x(s, 0).scale(&frac(3, 2));
        let b = JetPoly::s(s, &[1]);
        let v = JetPoly::from_components(s, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(v.component(0), a);
        assert_eq!(v.component(1), b);
        assert_eq!(a.witness().unwrap(), "x1 [w0 = 3/2]");
        assert!(JetPoly::zero(s, 2).witness().is_none());
    }

    #[test]
    fn eval_s_point() {
        let s = sp(2, 2);
        let f = JetPoly::s(s, &[1, 0]).mul(&JetPoly::x(s, 0)).unwrap();
        let e = f.eval_s(&[int(3)]).unwrap();
        assert_eq!(e, JetPoly::x(s, 0).scale(&int(-3)));
    }
}
