//! Dense operators on tensor products `V_1 ⊗ ... ⊗ V_k` that act non-trivially
//! only on a declared subset of slots.
//!
//! Slots are numbered from 1, so an operator "on slots (1,3)" of `V⊗V⊗V`
//! reads exactly like `A_13`. Storage is a dense complex matrix over the
//! support only, in row-major tensor order: the first support slot is the
//! most significant digit of the basis index. Identity on every other slot is
//! implicit and is materialised lazily when two operators are combined.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

pub type CMat = DMatrix<Complex64>;

/// Default absolute tolerance for floating-point operator identities.
pub const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SitedOperator {
    slot_dims: Vec<usize>,
    support: Vec<usize>,
    data: CMat,
}

fn support_size(slot_dims: &[usize], support: &[usize]) -> usize {
    support.iter().map(|&s| slot_dims[s - 1]).product()
}

/// Decode a flat index into digits for the given radices (most significant first).
fn decode(mut idx: usize, radices: &[usize], out: &mut [usize]) {
    for (slot, &r) in radices.iter().enumerate().rev() {
        out[slot] = idx % r;
        idx /= r;
    }
}

fn encode(digits: &[usize], radices: &[usize]) -> usize {
    digits.iter().zip(radices).fold(0, |acc, (&d, &r)| acc * r + d)
}

impl SitedOperator {
    pub fn new(slot_dims: Vec<usize>, support: Vec<usize>, data: CMat) -> Result<Self> {
        if slot_dims.iter().any(|&d| d == 0) {
            return Err(CoreError::DimMismatch("slot dimension must be positive".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::InvalidParameter(format!(
                "support must be strictly increasing, got {support:?}"
            )));
        }
        if support.iter().any(|&s| s == 0 || s > slot_dims.len()) {
            return Err(CoreError::InvalidParameter(format!(
                "support {support:?} out of range for {} slots",
                slot_dims.len()
            )));
        }
        let n = support_size(&slot_dims, &support);
        if data.nrows() != n || data.ncols() != n {
            return Err(CoreError::DimMismatch(format!(
                "data is {}x{}, support needs {n}x{n}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { slot_dims, support, data })
    }

    /// Operator on a single space with every slot in the support.
    pub fn full(slot_dims: Vec<usize>, data: CMat) -> Result<Self> {
        let support = (1..=slot_dims.len()).collect();
        Self::new(slot_dims, support, data)
    }

    /// The identity, with empty support.
    pub fn identity(slot_dims: Vec<usize>) -> Self {
        Self { slot_dims, support: Vec::new(), data: CMat::identity(1, 1) }
    }

    pub fn zero(slot_dims: Vec<usize>) -> Self {
        Self { slot_dims, support: Vec::new(), data: CMat::zeros(1, 1) }
    }

    pub fn slot_dims(&self) -> &[usize] {
        &self.slot_dims
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn data(&self) -> &CMat {
        &self.data
    }

    pub fn num_slots(&self) -> usize {
        self.slot_dims.len()
    }

    /// Place this operator into a larger product space.
    ///
    /// `placement[i]` is the (1-based) target slot that receives the i:th
    /// support slot of `self`. The placement need not be monotone; factors are
    /// permuted so that the result is stored in sorted slot order.
    pub fn embed(&self, target_dims: &[usize], placement: &[usize]) -> Result<Self> {
        if placement.len() != self.support.len() {
            return Err(CoreError::DimMismatch(format!(
                "placement has {} entries for a support of size {}",
                placement.len(),
                self.support.len()
            )));
        }
        let mut seen = placement.to_vec();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(CoreError::NonInjective(placement.to_vec()));
        }
        for (&src, &dst) in self.support.iter().zip(placement) {
            if dst == 0 || dst > target_dims.len() {
                return Err(CoreError::InvalidParameter(format!("target slot {dst} out of range")));
            }
            if target_dims[dst - 1] != self.slot_dims[src - 1] {
                return Err(CoreError::DimMismatch(format!(
                    "slot {src} has dim {} but target slot {dst} has dim {}",
                    self.slot_dims[src - 1],
                    target_dims[dst - 1]
                )));
            }
        }
        // order[j] = position (in self.support) of the factor landing at seen[j]
        let order: Vec<usize> = seen
            .iter()
            .map(|t| placement.iter().position(|p| p == t).expect("placement entry"))
            .collect();
        let src_radices: Vec<usize> = self.support.iter().map(|&s| self.slot_dims[s - 1]).collect();
        let dst_radices: Vec<usize> = seen.iter().map(|&s| target_dims[s - 1]).collect();
        let n = self.data.nrows();
        let mut perm = vec![0usize; n];
        let mut src_digits = vec![0usize; src_radices.len()];
        let mut dst_digits = vec![0usize; dst_radices.len()];
        for (idx, slot) in perm.iter_mut().enumerate() {
            decode(idx, &src_radices, &mut src_digits);
            for (j, &o) in order.iter().enumerate() {
                dst_digits[j] = src_digits[o];
            }
            *slot = encode(&dst_digits, &dst_radices);
        }
        let mut data = CMat::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                data[(perm[r], perm[c])] = self.data[(r, c)];
            }
        }
        Self::new(target_dims.to_vec(), seen, data)
    }

    /// Re-express the operator on a larger support (tensoring with identity).
    pub fn promote(&self, new_support: &[usize]) -> Result<Self> {
        if !self.support.iter().all(|s| new_support.contains(s)) {
            return Err(CoreError::InvalidParameter(format!(
                "{:?} is not a superset of {:?}",
                new_support, self.support
            )));
        }
        if new_support == self.support.as_slice() {
            return Ok(self.clone());
        }
        let radices: Vec<usize> = new_support.iter().map(|&s| self.slot_dims[s - 1]).collect();
        let old_pos: Vec<Option<usize>> = new_support
            .iter()
            .map(|s| self.support.iter().position(|t| t == s))
            .collect();
        let old_radices: Vec<usize> = self.support.iter().map(|&s| self.slot_dims[s - 1]).collect();
        let n: usize = radices.iter().product();
        // split each new basis index into (old-support index, spectator index)
        let mut old_idx = vec![0usize; n];
        let mut rest_idx = vec![0usize; n];
        let mut digits = vec![0usize; radices.len()];
        let mut old_digits = vec![0usize; old_radices.len()];
        for idx in 0..n {
            decode(idx, &radices, &mut digits);
            let mut rest = 0usize;
            for (k, pos) in old_pos.iter().enumerate() {
                match pos {
                    Some(p) => old_digits[*p] = digits[k],
                    None => rest = rest * radices[k] + digits[k],
                }
            }
            old_idx[idx] = encode(&old_digits, &old_radices);
            rest_idx[idx] = rest;
        }
        let mut data = CMat::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if rest_idx[r] == rest_idx[c] {
                    data[(r, c)] = self.data[(old_idx[r], old_idx[c])];
                }
            }
        }
        Self::new(self.slot_dims.clone(), new_support.to_vec(), data)
    }

    /// Dense matrix on the whole product space.
    pub fn to_full_matrix(&self) -> CMat {
        let all: Vec<usize> = (1..=self.slot_dims.len()).collect();
        self.promote(&all).expect("full support is a superset").data
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.slot_dims != other.slot_dims {
            return Err(CoreError::DimMismatch(format!(
                "slot dims {:?} vs {:?}",
                self.slot_dims, other.slot_dims
            )));
        }
        Ok(())
    }

    fn union_support(&self, other: &Self) -> Vec<usize> {
        let mut s: Vec<usize> = self.support.iter().chain(&other.support).copied().collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    fn aligned(&self, other: &Self) -> Result<(CMat, CMat, Vec<usize>)> {
        self.check_compatible(other)?;
        let support = self.union_support(other);
        let a = self.promote(&support)?.data;
        let b = other.promote(&support)?.data;
        Ok((a, b, support))
    }

    /// Composition `self ∘ other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let (a, b, support) = self.aligned(other)?;
        Self::new(self.slot_dims.clone(), support, a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b, support) = self.aligned(other)?;
        Self::new(self.slot_dims.clone(), support, a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let (a, b, support) = self.aligned(other)?;
        Self::new(self.slot_dims.clone(), support, a - b)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { slot_dims: self.slot_dims.clone(), support: self.support.clone(), data: &self.data * factor }
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let (a, b, support) = self.aligned(other)?;
        Self::new(self.slot_dims.clone(), support, &a * &b - &b * &a)
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.data.clone().try_inverse().ok_or(CoreError::NotInvertible)?;
        Self::new(self.slot_dims.clone(), self.support.clone(), inv)
    }

    /// Frobenius norm over the full product space.
    ///
    /// The support-only norm is multiplied by `sqrt` of the spectator dimension,
    /// since the operator is tensored with the identity there.
    pub fn frobenius_norm(&self) -> f64 {
        let spectator: usize = (1..=self.slot_dims.len())
            .filter(|s| !self.support.contains(s))
            .map(|s| self.slot_dims[s - 1])
            .product();
        self.data.norm() * (spectator as f64).sqrt()
    }

    /// Trace over the full product space.
    pub fn trace(&self) -> Complex64 {
        let spectator: usize = (1..=self.slot_dims.len())
            .filter(|s| !self.support.contains(s))
            .map(|s| self.slot_dims[s - 1])
            .product();
        self.data.trace() * spectator as f64
    }

    /// Apply to a vector of the full product space.
    pub fn apply(&self, v: &nalgebra::DVector<Complex64>) -> Result<nalgebra::DVector<Complex64>> {
        let m = self.to_full_matrix();
        if m.ncols() != v.len() {
            return Err(CoreError::DimMismatch(format!("vector length {} vs {}", v.len(), m.ncols())));
        }
        Ok(m * v)
    }
}

/// `‖a − b‖_F` after bringing both operators to their common support.
pub fn frobenius_distance(a: &SitedOperator, b: &SitedOperator) -> Result<f64> {
    Ok(a.sub(b)?.frobenius_norm())
}

/// Kronecker product of two dense matrices (first factor most significant).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Swap operator on `V⊗V`.
pub fn swap_matrix(d: usize) -> CMat {
    let mut p = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            p[(j * d + i, i * d + j)] = Complex64::new(1.0, 0.0);
        }
    }
    p
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    slot_dims: Vec<usize>,
    support: Vec<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for SitedOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.data.nrows();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                re.push(self.data[(r, c)].re);
                im.push(self.data[(r, c)].im);
            }
        }
        OperatorJson { slot_dims: self.slot_dims.clone(), support: self.support.clone(), re, im }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SitedOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = OperatorJson::deserialize(d)?;
        let n = support_size(&j.slot_dims, &j.support);
        if j.re.len() != n * n || j.im.len() != n * n {
            return Err(serde::de::Error::custom("re/im length does not match support"));
        }
        let data = CMat::from_fn(n, n, |r, c| Complex64::new(j.re[r * n + c], j.im[r * n + c]));
        SitedOperator::new(j.slot_dims, j.support, data).map_err(serde::de::Error::custom)
    }
}
