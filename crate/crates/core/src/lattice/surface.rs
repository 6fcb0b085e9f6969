//! Wilson surfaces: contraction of plaquette amplitudes over shared links.
//!
//! Every plaquette of a patch contributes one amplitude (see the orientation
//! table in [`super::plaquettes`]), viewed as a tensor with two in-legs and
//! two out-legs labelled by links. An interior link must be the out-leg of
//! exactly one plaquette and the in-leg of exactly one other; it is summed
//! over. Legs that remain open form the boundary.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::{LatticeGeometry, LinkId};
use super::plaquettes::{Amplitude, PlaquetteField};
use crate::error::{CoreError, Result};
use crate::multitensor::CMat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Leg {
    pub out: bool,
    pub link: LinkId,
}

/// Dense tensor with legs of common dimension `d`, row-major over `legs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTensor {
    pub d: usize,
    pub legs: Vec<Leg>,
    pub data: Vec<Complex64>,
}

/// One plaquette of a patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchPlaquette {
    pub base: usize,
    pub mu: usize,
    pub nu: usize,
    pub kind: Amplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePatch {
    pub plaquettes: Vec<PatchPlaquette>,
}

/// Result of a contraction: a map from the in-boundary to the out-boundary,
/// rows indexed by `out_links`, columns by `in_links`, both sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct WilsonSurface {
    pub in_links: Vec<LinkId>,
    pub out_links: Vec<LinkId>,
    pub matrix: CMat,
}

impl WilsonSurface {
    pub fn is_closed(&self) -> bool {
        self.in_links.is_empty() && self.out_links.is_empty()
    }

    pub fn scalar(&self) -> Option<Complex64> {
        self.is_closed().then(|| self.matrix[(0, 0)])
    }
}

fn strides(n: usize, d: usize) -> Vec<usize> {
    let mut s = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        s[i] = s[i + 1] * d;
    }
    s
}

impl LabeledTensor {
    pub fn scalar(v: Complex64, d: usize) -> Self {
        Self { d, legs: Vec::new(), data: vec![v] }
    }

    /// Build from an amplitude matrix on `(μ, ν)` slots.
    pub fn from_amplitude(d: usize, m: &CMat, out: [LinkId; 2], inp: [LinkId; 2]) -> Self {
        let legs = vec![
            Leg { out: true, link: out[0] },
            Leg { out: true, link: out[1] },
            Leg { out: false, link: inp[0] },
            Leg { out: false, link: inp[1] },
        ];
        let n = d * d;
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(m[(r, c)]);
            }
        }
        Self { d, legs, data }
    }

    fn check_legs(&self) -> Result<()> {
        let mut seen = self.legs.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            let l = seen.windows(2).find(|w| w[0] == w[1]).expect("duplicate")[0];
            return Err(CoreError::NonManifold(format!(
                "link {:?} used twice as {}",
                l.link,
                if l.out { "out-leg" } else { "in-leg" }
            )));
        }
        Ok(())
    }

    /// Contract every leg pair `(out, in)` sharing a link between `self` and `other`,
    /// then trace any pair left within the result.
    pub fn contract(&self, other: &Self) -> Result<Self> {
        let d = self.d;
        let mut pairs = Vec::new();
        for (i, a) in self.legs.iter().enumerate() {
            for (j, b) in other.legs.iter().enumerate() {
                if a.link == b.link {
                    if a.out == b.out {
                        return Err(CoreError::InconsistentOrientation(format!(
                            "link {:?} is an {} of two plaquettes",
                            a.link,
                            if a.out { "out-leg" } else { "in-leg" }
                        )));
                    }
                    pairs.push((i, j));
                }
            }
        }
        let free_a: Vec<usize> = (0..self.legs.len()).filter(|i| !pairs.iter().any(|p| p.0 == *i)).collect();
        let free_b: Vec<usize> = (0..other.legs.len()).filter(|j| !pairs.iter().any(|p| p.1 == *j)).collect();
        let legs: Vec<Leg> = free_a.iter().map(|&i| self.legs[i]).chain(free_b.iter().map(|&j| other.legs[j])).collect();
        let sa = strides(self.legs.len(), d);
        let sb = strides(other.legs.len(), d);
        let nr = legs.len();
        let nc = pairs.len();
        let rsize = d.pow(nr as u32);
        let csize = d.pow(nc as u32);
        let mut data = vec![Complex64::new(0.0, 0.0); rsize];
        let mut rdig = vec![0usize; nr];
        let mut cdig = vec![0usize; nc];
        // offsets of every summed index combination in each operand
        let mut offs = Vec::with_capacity(csize);
        for cidx in 0..csize {
            let mut t = cidx;
            for k in (0..nc).rev() {
                cdig[k] = t % d;
                t /= d;
            }
            let (mut ia, mut ib) = (0, 0);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                ia += cdig[k] * sa[i];
                ib += cdig[k] * sb[j];
            }
            offs.push((ia, ib));
        }
        for (r, slot) in data.iter_mut().enumerate() {
            let mut t = r;
            for k in (0..nr).rev() {
                rdig[k] = t % d;
                t /= d;
            }
            let mut base_a = 0;
            let mut base_b = 0;
            for (k, &i) in free_a.iter().enumerate() {
                base_a += rdig[k] * sa[i];
            }
            for (k, &j) in free_b.iter().enumerate() {
                base_b += rdig[free_a.len() + k] * sb[j];
            }
            *slot = offs.iter().map(|&(ia, ib)| self.data[base_a + ia] * other.data[base_b + ib]).sum();
        }
        let t = Self { d, legs, data };
        t.check_legs()?;
        t.self_trace()
    }

    fn self_trace(self) -> Result<Self> {
        let mut cur = self;
        loop {
            let pair = cur.legs.iter().enumerate().find_map(|(i, a)| {
                cur.legs.iter().position(|b| b.link == a.link && b.out != a.out).map(|j| (i, j))
            });
            let Some((i, j)) = pair else { return Ok(cur) };
            let d = cur.d;
            let s = strides(cur.legs.len(), d);
            let keep: Vec<usize> = (0..cur.legs.len()).filter(|&k| k != i && k != j).collect();
            let legs: Vec<Leg> = keep.iter().map(|&k| cur.legs[k]).collect();
            let n = d.pow(keep.len() as u32);
            let mut data = vec![Complex64::new(0.0, 0.0); n];
            for (r, slot) in data.iter_mut().enumerate() {
                let mut t = r;
                let mut base = 0;
                for &k in keep.iter().rev() {
                    base += (t % d) * s[k];
                    t /= d;
                }
                for x in 0..d {
                    *slot += cur.data[base + x * s[i] + x * s[j]];
                }
            }
            cur = Self { d, legs, data };
        }
    }

    /// Permute legs into canonical order (in-legs then out-legs, each sorted by link).
    pub fn canonical(&self) -> Self {
        let mut order: Vec<usize> = (0..self.legs.len()).collect();
        order.sort_by_key(|&k| self.legs[k]);
        let d = self.d;
        let s = strides(self.legs.len(), d);
        let legs: Vec<Leg> = order.iter().map(|&k| self.legs[k]).collect();
        let mut data = vec![Complex64::new(0.0, 0.0); self.data.len()];
        for (r, slot) in data.iter_mut().enumerate() {
            let mut t = r;
            let mut src = 0;
            for &k in order.iter().rev() {
                src += (t % d) * s[k];
                t /= d;
            }
            *slot = self.data[src];
        }
        Self { d, legs, data }
    }

    pub fn into_surface(self) -> WilsonSurface {
        let c = self.canonical();
        let in_links: Vec<LinkId> = c.legs.iter().filter(|l| !l.out).map(|l| l.link).collect();
        let out_links: Vec<LinkId> = c.legs.iter().filter(|l| l.out).map(|l| l.link).collect();
        let nin = c.d.pow(in_links.len() as u32);
        let nout = c.d.pow(out_links.len() as u32);
        // canonical order puts in-legs first: data index = in * nout + out
        let matrix = CMat::from_fn(nout, nin, |r, col| c.data[col * nout + r]);
        WilsonSurface { in_links, out_links, matrix }
    }
}

/// In/out links of a plaquette amplitude, each in `(μ, ν)` order.
pub fn amplitude_legs(g: &LatticeGeometry, p: &PatchPlaquette) -> ([LinkId; 2], [LinkId; 2]) {
    let b = p.base;
    let mu_lower = LinkId { axis: p.mu, site: b };
    let mu_upper = LinkId { axis: p.mu, site: g.fwd(b, p.nu) };
    let nu_lower = LinkId { axis: p.nu, site: b };
    let nu_upper = LinkId { axis: p.nu, site: g.fwd(b, p.mu) };
    let (mu_in_upper, nu_in_upper) = p.kind.in_levels();
    let pick = |upper: bool, lo: LinkId, hi: LinkId| if upper { (hi, lo) } else { (lo, hi) };
    let (mu_in, mu_out) = pick(mu_in_upper, mu_lower, mu_upper);
    let (nu_in, nu_out) = pick(nu_in_upper, nu_lower, nu_upper);
    ([mu_out, nu_out], [mu_in, nu_in])
}

fn plaquette_tensor(field: &PlaquetteField, p: &PatchPlaquette) -> Result<LabeledTensor> {
    let m = field.amplitude(p.kind, p.base, p.mu, p.nu)?;
    let (out, inp) = amplitude_legs(&field.geometry, p);
    Ok(LabeledTensor::from_amplitude(field.d, &m, out, inp))
}

impl SurfacePatch {
    /// `a × b` rectangle of NE amplitudes in the `(μ, ν)` plane, listed row by row
    /// (μ fastest).
    pub fn flat(g: &LatticeGeometry, base: usize, mu: usize, nu: usize, a: usize, b: usize) -> Result<Self> {
        g.check_site(base)?;
        g.plane_index(mu, nu)?;
        if a == 0 || b == 0 || a > g.extents()[mu] || b > g.extents()[nu] {
            return Err(CoreError::InvalidParameter(format!("flat patch {a}x{b} does not fit the lattice")));
        }
        let mut plaquettes = Vec::with_capacity(a * b);
        for j in 0..b {
            for i in 0..a {
                let site = g.shift(g.shift(base, mu, i as isize), nu, j as isize);
                plaquettes.push(PatchPlaquette { base: site, mu, nu, kind: Amplitude::NE });
            }
        }
        Ok(Self { plaquettes })
    }

    /// The same flat rectangle listed column by column (ν fastest).
    pub fn flat_by_columns(g: &LatticeGeometry, base: usize, mu: usize, nu: usize, a: usize, b: usize) -> Result<Self> {
        let rows = Self::flat(g, base, mu, nu, a, b)?;
        let mut plaquettes = Vec::with_capacity(a * b);
        for i in 0..a {
            for j in 0..b {
                plaquettes.push(rows.plaquettes[j * a + i]);
            }
        }
        Ok(Self { plaquettes })
    }

    /// Boundary of the cuboid with lowest corner `base` and extents `ext`
    /// along `axes` (increasing).
    ///
    /// On the face with normal `γ` at side `s` (0 = low, 1 = high), the in-edge
    /// along the face axis `α` sits at level `s XOR h`, where `h = 1` iff `γ`
    /// is the larger of the two axes other than `α`. This makes every edge of
    /// the boundary an in-leg of one face and an out-leg of the adjacent one.
    pub fn cuboid(g: &LatticeGeometry, base: usize, axes: [usize; 3], ext: [usize; 3]) -> Result<Self> {
        g.check_site(base)?;
        if !(axes[0] < axes[1] && axes[1] < axes[2] && axes[2] < g.dim()) {
            return Err(CoreError::InvalidParameter(format!("cuboid axes {axes:?} must be increasing")));
        }
        for k in 0..3 {
            if ext[k] == 0 || ext[k] >= g.extents()[axes[k]] {
                return Err(CoreError::NonManifold(format!(
                    "cuboid extent {} along axis {} must be in 1..{}",
                    ext[k],
                    axes[k],
                    g.extents()[axes[k]]
                )));
            }
        }
        let mut plaquettes = Vec::new();
        for gamma in 0..3 {
            let (alpha, beta) = match gamma {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let h = |a: usize| -> bool {
                let others: Vec<usize> = (0..3).filter(|&k| k != a).collect();
                gamma == others[1]
            };
            for side in [false, true] {
                let kind = Amplitude::from_in_levels(side ^ h(alpha), side ^ h(beta));
                let offset = if side { ext[gamma] as isize } else { 0 };
                let face_base = g.shift(base, axes[gamma], offset);
                for j in 0..ext[beta] {
                    for i in 0..ext[alpha] {
                        let site = g.shift(g.shift(face_base, axes[alpha], i as isize), axes[beta], j as isize);
                        plaquettes.push(PatchPlaquette { base: site, mu: axes[alpha], nu: axes[beta], kind });
                    }
                }
            }
        }
        Ok(Self { plaquettes })
    }
}

/// Contract the patch in the listed order.
pub fn wilson_surface(field: &PlaquetteField, patch: &SurfacePatch) -> Result<WilsonSurface> {
    let mut plaquettes = patch.plaquettes.iter();
    let first = plaquettes.next().ok_or_else(|| CoreError::InvalidParameter("empty patch".into()))?;
    let mut acc = plaquette_tensor(field, first)?;
    let mut pending: Vec<LabeledTensor> = Vec::new();
    for p in plaquettes {
        pending.push(plaquette_tensor(field, p)?);
    }
    // absorb the neighbour sharing the most links so the open boundary stays small
    while !pending.is_empty() {
        let shared = |t: &LabeledTensor| t.legs.iter().filter(|l| acc.legs.iter().any(|a| a.link == l.link)).count();
        let (pos, n) = pending
            .iter()
            .enumerate()
            .map(|(k, t)| (k, shared(t)))
            .fold((0, 0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if n == 0 {
            return Err(CoreError::NonManifold("patch is not connected".into()));
        }
        let t = pending.remove(pos);
        acc = acc.contract(&t)?;
    }
    check_manifold(field, patch)?;
    Ok(acc.into_surface())
}

fn check_manifold(field: &PlaquetteField, patch: &SurfacePatch) -> Result<()> {
    let mut uses: BTreeMap<Leg, usize> = BTreeMap::new();
    for p in &patch.plaquettes {
        let (out, inp) = amplitude_legs(&field.geometry, p);
        for l in out {
            *uses.entry(Leg { out: true, link: l }).or_default() += 1;
        }
        for l in inp {
            *uses.entry(Leg { out: false, link: l }).or_default() += 1;
        }
    }
    if let Some((leg, _)) = uses.iter().find(|(_, &n)| n > 1) {
        return Err(CoreError::NonManifold(format!("link {:?} glued more than twice", leg.link)));
    }
    Ok(())
}
