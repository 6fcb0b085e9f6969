//! Finite-dimensional Lie algebras given by structure constants, their
//! defining matrix representations, invariant metrics and the quadratic
//! element `t = Σ (κ⁻¹)_{ab} J^a ⊗ J^b`.
//!
//! Conventions:
//! - `f[a][b][c]` is `f^{ab}_c` in `[J^a, J^b] = f^{ab}_c J^c`.
//! - `sl2` uses the Chevalley basis `(e, f, h)`: `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
//! - `su2` uses the anti-Hermitian basis `J^a = (i/2) σ_a`, which gives
//!   `f^{ab}_c = -ε_{abc}`.
//! - `gl_n` uses matrix units `E_{ij}` ordered row-major, `a = i*n + j`.
//!
//! The metric is the Killing form for `sl2` and `su2`. `u1` (Killing form
//! zero) declares the 1×1 identity instead and `gl_n` (degenerate Killing
//! form) declares the trace form `tr(E_a E_b)`. [`MetricKind`] records which one
//! is in use.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::multitensor::{kron, CMat, SitedOperator};
use crate::rational::{self, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraKind {
    U1,
    Sl2,
    Su2,
    GlN(usize),
}

impl FromStr for AlgebraKind {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "u1" | "u(1)" => Ok(Self::U1),
            "sl2" | "sl(2)" => Ok(Self::Sl2),
            "su2" | "su(2)" => Ok(Self::Su2),
            _ => {
                let n = t
                    .strip_prefix("gl_n(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| t.strip_prefix("gl(").and_then(|r| r.strip_suffix(')')))
                    .or_else(|| t.strip_prefix("gl"))
                    .and_then(|r| r.parse::<usize>().ok())
                    .ok_or_else(|| CoreError::UnknownAlgebra(s.to_string()))?;
                Ok(Self::GlN(n))
            }
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::U1 => write!(f, "u1"),
            Self::Sl2 => write!(f, "sl2"),
            Self::Su2 => write!(f, "su2"),
            Self::GlN(n) => write!(f, "gl{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Killing,
    /// A declared substitute, with the reason.
    Substitute(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieAlgebraSpec {
    pub name: String,
    pub dim: usize,
    #[serde(with = "rational::serde_rat_cube")]
    pub f: Vec<Vec<Vec<Rational>>>,
    #[serde(with = "rational::serde_rat_mat")]
    pub killing: Vec<Vec<Rational>>,
    pub metric: MetricKind,
}

/// Matrix representation. Rational representations also carry their exact
/// matrices so that identities can be checked for literal zero.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    pub algebra: Arc<LieAlgebraSpec>,
    pub d: usize,
    pub generators: Vec<CMat>,
    pub exact: Option<Vec<Vec<Vec<Rational>>>>,
}

fn zero_cube(dim: usize) -> Vec<Vec<Vec<Rational>>> {
    vec![vec![vec![Rational::zero(); dim]; dim]; dim]
}

fn to_complex(m: &[Vec<Rational>]) -> CMat {
    let d = m.len();
    CMat::from_fn(d, d, |r, c| Complex64::new(rational::to_f64(&m[r][c]), 0.0))
}

fn unit(n: usize, i: usize, j: usize) -> Vec<Vec<Rational>> {
    let mut m = vec![vec![Rational::zero(); n]; n];
    m[i][j] = Rational::one();
    m
}

/// `κ_ab = Σ_{c,d} f^{ac}_d f^{bd}_c`, i.e. `tr(ad_a ad_b)`.
pub fn killing_form(f: &[Vec<Vec<Rational>>]) -> Vec<Vec<Rational>> {
    let dim = f.len();
    let mut k = vec![vec![Rational::zero(); dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            let mut acc = Rational::zero();
            for c in 0..dim {
                for d in 0..dim {
                    if !f[a][c][d].is_zero() && !f[b][d][c].is_zero() {
                        acc += &f[a][c][d] * &f[b][d][c];
                    }
                }
            }
            k[a][b] = acc;
        }
    }
    k
}

/// Exact Gauss–Jordan inverse; `None` when singular.
pub fn invert_rational(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in 0..n {
                    let t = &factor * &a[col][j];
                    a[r][j] -= t;
                    let t = &factor * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

pub fn build_algebra(kind: AlgebraKind) -> Result<(LieAlgebraSpec, MatrixRep)> {
    let (spec, gens, exact) = match kind {
        AlgebraKind::U1 => {
            let spec = LieAlgebraSpec {
                name: kind.to_string(),
                dim: 1,
                f: zero_cube(1),
                killing: vec![vec![Rational::one()]],
                metric: MetricKind::Substitute("identity: the Killing form of u1 vanishes".into()),
            };
            let j = CMat::from_element(1, 1, Complex64::new(0.0, 1.0));
            (spec, vec![j], None)
        }
        AlgebraKind::Sl2 => {
            let mut f = zero_cube(3);
            // basis 0 = e, 1 = f, 2 = h
            f[2][0][0] = int(2);
            f[0][2][0] = int(-2);
            f[2][1][1] = int(-2);
            f[1][2][1] = int(2);
            f[0][1][2] = int(1);
            f[1][0][2] = int(-1);
            let killing = killing_form(&f);
            let mats = sl2_defining();
            let spec =
                LieAlgebraSpec { name: kind.to_string(), dim: 3, f, killing, metric: MetricKind::Killing };
            (spec, mats.iter().map(|m| to_complex(m)).collect(), Some(mats))
        }
        AlgebraKind::Su2 => {
            let mut f = zero_cube(3);
            for (a, b, c, s) in levi_civita() {
                f[a][b][c] = int(-s);
            }
            let killing = killing_form(&f);
            let i2 = Complex64::new(0.0, 0.5);
            let o = Complex64::new(0.0, 0.0);
            let one = Complex64::new(1.0, 0.0);
            let im = Complex64::new(0.0, 1.0);
            let sx = CMat::from_row_slice(2, 2, &[o, one, one, o]);
            let sy = CMat::from_row_slice(2, 2, &[o, -im, im, o]);
            let sz = CMat::from_row_slice(2, 2, &[one, o, o, -one]);
            let gens = vec![sx * i2, sy * i2, sz * i2];
            let spec =
                LieAlgebraSpec { name: kind.to_string(), dim: 3, f, killing, metric: MetricKind::Killing };
            (spec, gens, None)
        }
        AlgebraKind::GlN(n) => {
            if !(1..=4).contains(&n) {
                return Err(CoreError::InvalidParameter(format!("gl_n requires 1 <= n <= 4, got {n}")));
            }
            let dim = n * n;
            let mut f = zero_cube(dim);
            // [E_ij, E_kl] = δ_jk E_il − δ_li E_kj
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let a = i * n + j;
                            let b = k * n + l;
                            if j == k {
                                f[a][b][i * n + l] += Rational::one();
                            }
                            if l == i {
                                f[a][b][k * n + j] -= Rational::one();
                            }
                        }
                    }
                }
            }
            let mut killing = vec![vec![Rational::zero(); dim]; dim];
            for i in 0..n {
                for j in 0..n {
                    // tr(E_ij E_kl) = δ_jk δ_il
                    killing[i * n + j][j * n + i] = Rational::one();
                }
            }
            let mats: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| unit(n, i, j))).collect();
            let spec = LieAlgebraSpec {
                name: kind.to_string(),
                dim,
                f,
                killing,
                metric: MetricKind::Substitute("trace form tr(E_a E_b): the Killing form of gl_n is degenerate".into()),
            };
            (spec, mats.iter().map(|m| to_complex(m)).collect(), Some(mats))
        }
    };
    let d = gens[0].nrows();
    let rep = MatrixRep { algebra: Arc::new(spec.clone()), d, generators: gens, exact };
    Ok((spec, rep))
}

fn sl2_defining() -> Vec<Vec<Vec<Rational>>> {
    let z = Rational::zero;
    let o = Rational::one;
    vec![
        vec![vec![z(), o()], vec![z(), z()]],
        vec![vec![z(), z()], vec![o(), z()]],
        vec![vec![o(), z()], vec![z(), -o()]],
    ]
}

fn levi_civita() -> Vec<(usize, usize, usize, i64)> {
    vec![(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (1, 0, 2, -1), (2, 1, 0, -1), (0, 2, 1, -1)]
}

/// Exact rational realization used by the exact calculus. `u1` is realized
/// by `J = [1]`, which satisfies the (trivial) relations over the rationals.
pub fn rational_generators(kind: AlgebraKind) -> Result<Vec<Vec<Vec<Rational>>>> {
    match kind {
        AlgebraKind::U1 => Ok(vec![vec![vec![Rational::one()]]]),
        AlgebraKind::Su2 => Err(CoreError::InvalidParameter(
            "su2 defining representation is not rational; use sl2".into(),
        )),
        _ => Ok(build_algebra(kind)?.1.exact.expect("rational representation")),
    }
}

/// Max-norm of the Jacobi combination over all index quadruples.
pub fn jacobi_residual(spec: &LieAlgebraSpec) -> Rational {
    let f = &spec.f;
    let dim = spec.dim;
    let mut worst = Rational::zero();
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for e in 0..dim {
                    let mut acc = Rational::zero();
                    for d in 0..dim {
                        acc += &f[a][b][d] * &f[d][c][e];
                        acc += &f[b][c][d] * &f[d][a][e];
                        acc += &f[c][a][d] * &f[d][b][e];
                    }
                    let acc = acc.abs();
                    if acc > worst {
                        worst = acc;
                    }
                }
            }
        }
    }
    worst
}

/// Largest antisymmetry violation `|f^{ab}_c + f^{ba}_c|`.
pub fn antisymmetry_residual(spec: &LieAlgebraSpec) -> Rational {
    let mut worst = Rational::zero();
    for a in 0..spec.dim {
        for b in 0..spec.dim {
            for c in 0..spec.dim {
                let v = (&spec.f[a][b][c] + &spec.f[b][a][c]).abs();
                if v > worst {
                    worst = v;
                }
            }
        }
    }
    worst
}

fn rat_mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

impl MatrixRep {
    /// `max_{a,b} ‖[J^a,J^b] − f^{ab}_c J^c‖_max` in floating point.
    pub fn relation_residual(&self) -> f64 {
        let spec = &self.algebra;
        let mut worst = 0.0f64;
        for a in 0..spec.dim {
            for b in 0..spec.dim {
                let ja = &self.generators[a];
                let jb = &self.generators[b];
                let mut m = ja * jb - jb * ja;
                for c in 0..spec.dim {
                    let coef = rational::to_f64(&spec.f[a][b][c]);
                    if coef != 0.0 {
                        m -= &self.generators[c] * Complex64::new(coef, 0.0);
                    }
                }
                worst = worst.max(m.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Exact version of [`relation_residual`](Self::relation_residual); `None`
    /// for representations without rational matrices.
    pub fn exact_relation_residual(&self) -> Option<Rational> {
        let mats = self.exact.as_ref()?;
        let spec = &self.algebra;
        let d = self.d;
        let mut worst = Rational::zero();
        for a in 0..spec.dim {
            for b in 0..spec.dim {
                let ab = rat_mat_mul(&mats[a], &mats[b]);
                let ba = rat_mat_mul(&mats[b], &mats[a]);
                for r in 0..d {
                    for c in 0..d {
                        let mut v = &ab[r][c] - &ba[r][c];
                        for e in 0..spec.dim {
                            v -= &spec.f[a][b][e] * &mats[e][r][c];
                        }
                        let v = v.abs();
                        if v > worst {
                            worst = v;
                        }
                    }
                }
            }
        }
        Some(worst)
    }

    /// Inverse metric `(κ⁻¹)_{ab}`.
    pub fn inverse_metric(&self) -> Result<Vec<Vec<Rational>>> {
        invert_rational(&self.algebra.killing).ok_or(CoreError::SingularMetric)
    }
}

/// `t = Σ_{a,b} (κ⁻¹)_{ab} J^a ⊗ J^b` on `V⊗V`, slots (1,2).
pub fn casimir_tensor(rep: &MatrixRep) -> Result<SitedOperator> {
    let kinv = rep.inverse_metric()?;
    let d = rep.d;
    let mut t = CMat::zeros(d * d, d * d);
    for (a, row) in kinv.iter().enumerate() {
        for (b, k) in row.iter().enumerate() {
            if k.is_zero() {
                continue;
            }
            let coef = Complex64::new(rational::to_f64(k), 0.0);
            t += kron(&rep.generators[a], &rep.generators[b]) * coef;
        }
    }
    SitedOperator::full(vec![d, d], t)
}
