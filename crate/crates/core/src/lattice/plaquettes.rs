//! 2-form lattice gauge fields: amplitudes on plaquettes acting on the
//! tensor product of two link spaces.
//!
//! Orientation reference. A plaquette in the plane `μ<ν` with base (lowest
//! corner) `b` has four edges: the μ-edges at `b` ("lower") and `b+ν̂`
//! ("upper"), the ν-edges at `b` ("lower") and `b+μ̂` ("upper"). Each
//! amplitude maps an ordered pair of in-edges `(μ-edge, ν-edge)` to the
//! complementary out-edges, slot order `(μ, ν)`:
//!
//! | amplitude | in (μ, ν)      | out (μ, ν)     |
//! |-----------|----------------|----------------|
//! | NE        | lower, lower   | upper, upper   |
//! | NW        | lower, upper   | upper, lower   |
//! | SW = NE⁻¹ | upper, upper   | lower, lower   |
//! | SE = NW⁻¹ | upper, lower   | lower, upper   |
//!
//! A link gauge function `f_ℓ` acts on every amplitude as
//! `f_out⁻¹ (·) f_in`, tensored over the two slots.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::LatticeGeometry;
use super::links::{invert, random_gl};
use crate::error::{CoreError, Result};
use crate::multitensor::{kron, swap_matrix, CMat, SitedOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Amplitude {
    NE,
    NW,
    SW,
    SE,
}

impl Amplitude {
    /// Amplitude whose in-edges sit at the given levels (`false` = lower).
    pub fn from_in_levels(mu_upper: bool, nu_upper: bool) -> Self {
        match (mu_upper, nu_upper) {
            (false, false) => Self::NE,
            (false, true) => Self::NW,
            (true, true) => Self::SW,
            (true, false) => Self::SE,
        }
    }

    /// `(μ-edge upper?, ν-edge upper?)` of the in-edges.
    pub fn in_levels(self) -> (bool, bool) {
        match self {
            Self::NE => (false, false),
            Self::NW => (false, true),
            Self::SW => (true, true),
            Self::SE => (true, false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteField {
    pub geometry: LatticeGeometry,
    pub d: usize,
    ne: Vec<CMat>,
    nw: Vec<CMat>,
}

fn embed_positions(m: &CMat, d: usize, k: usize) -> CMat {
    // m acts on positions (k, k+1) of V⊗3
    let id = CMat::identity(d, d);
    if k == 0 {
        kron(m, &id)
    } else {
        kron(&id, m)
    }
}

impl PlaquetteField {
    fn slots(geometry: &LatticeGeometry) -> usize {
        geometry.num_sites() * geometry.num_planes()
    }

    pub fn identity(geometry: LatticeGeometry, d: usize) -> Self {
        let n = Self::slots(&geometry);
        let id = CMat::identity(d * d, d * d);
        Self { geometry, d, ne: vec![id.clone(); n], nw: vec![id; n] }
    }

    /// Every NE and NW amplitude set to the same operator `r` on `V⊗V`.
    pub fn homogeneous(geometry: LatticeGeometry, r: &CMat) -> Result<Self> {
        Self::homogeneous_pair(geometry, r, r)
    }

    pub fn homogeneous_pair(geometry: LatticeGeometry, ne: &CMat, nw: &CMat) -> Result<Self> {
        let d = (ne.nrows() as f64).sqrt().round() as usize;
        for m in [ne, nw] {
            if m.nrows() != d * d || m.ncols() != d * d {
                return Err(CoreError::DimMismatch("amplitudes act on V⊗V".into()));
            }
            invert(m)?;
        }
        let n = Self::slots(&geometry);
        Ok(Self { geometry, d, ne: vec![ne.clone(); n], nw: vec![nw.clone(); n] })
    }

    pub fn random<R: Rng + ?Sized>(geometry: LatticeGeometry, d: usize, rng: &mut R) -> Self {
        let n = Self::slots(&geometry);
        let ne = (0..n).map(|_| random_gl(rng, d * d)).collect();
        let nw = (0..n).map(|_| random_gl(rng, d * d)).collect();
        Self { geometry, d, ne, nw }
    }

    pub fn from_parts(geometry: LatticeGeometry, d: usize, ne: Vec<CMat>, nw: Vec<CMat>) -> Result<Self> {
        let n = Self::slots(&geometry);
        if ne.len() != n || nw.len() != n {
            return Err(CoreError::DimMismatch(format!("expected {n} amplitudes of each kind")));
        }
        for m in ne.iter().chain(&nw) {
            if m.nrows() != d * d || m.ncols() != d * d {
                return Err(CoreError::DimMismatch("amplitudes act on V⊗V".into()));
            }
            invert(m)?;
        }
        Ok(Self { geometry, d, ne, nw })
    }

    fn index(&self, base: usize, mu: usize, nu: usize) -> Result<usize> {
        self.geometry.check_site(base)?;
        Ok(base * self.geometry.num_planes() + self.geometry.plane_index(mu, nu)?)
    }

    pub fn ne(&self, base: usize, mu: usize, nu: usize) -> Result<&CMat> {
        Ok(&self.ne[self.index(base, mu, nu)?])
    }

    pub fn nw(&self, base: usize, mu: usize, nu: usize) -> Result<&CMat> {
        Ok(&self.nw[self.index(base, mu, nu)?])
    }

    pub fn set_ne(&mut self, base: usize, mu: usize, nu: usize, m: CMat) -> Result<()> {
        invert(&m)?;
        let i = self.index(base, mu, nu)?;
        self.ne[i] = m;
        Ok(())
    }

    pub fn set_nw(&mut self, base: usize, mu: usize, nu: usize, m: CMat) -> Result<()> {
        invert(&m)?;
        let i = self.index(base, mu, nu)?;
        self.nw[i] = m;
        Ok(())
    }

    /// Any of the four amplitudes; SW and SE are derived by inversion.
    pub fn amplitude(&self, kind: Amplitude, base: usize, mu: usize, nu: usize) -> Result<CMat> {
        match kind {
            Amplitude::NE => Ok(self.ne(base, mu, nu)?.clone()),
            Amplitude::NW => Ok(self.nw(base, mu, nu)?.clone()),
            Amplitude::SW => invert(self.ne(base, mu, nu)?),
            Amplitude::SE => invert(self.nw(base, mu, nu)?),
        }
    }

    /// Cube holonomy at `x` for directions `μ<ν<ρ`, principal orientation.
    pub fn cube_holonomy(&self, x: usize, axes: [usize; 3]) -> Result<SitedOperator> {
        self.cube_holonomy_signed(x, axes, [true; 3])
    }

    /// Cube holonomy for the diagonal selected by `signs` (`true` = +).
    ///
    /// A state is a monotone three-edge path crossing the cube from the
    /// corner with coordinate 0 on every `+` axis (1 on every `−` axis),
    /// stepping along `μ`, `ν`, `ρ` in that order. Two routes of face moves
    /// carry it to the reversed path: route A swaps adjacent steps at
    /// positions (1,2), (2,3), (1,2), route B at (2,3), (1,2), (2,3). The
    /// holonomy is route A followed by route B backwards, an operator on
    /// the three edge spaces of the initial path in step order.
    pub fn cube_holonomy_signed(&self, x: usize, axes: [usize; 3], signs: [bool; 3]) -> Result<SitedOperator> {
        let g = &self.geometry;
        g.check_site(x)?;
        if !(axes[0] < axes[1] && axes[1] < axes[2] && axes[2] < g.dim()) {
            return Err(CoreError::InvalidParameter(format!("cube directions {axes:?} must satisfy mu<nu<rho<n")));
        }
        let route = |swaps: [usize; 3]| -> Result<CMat> {
            let d = self.d;
            let mut order = [0usize, 1, 2];
            let mut m = CMat::identity(d * d * d, d * d * d);
            for k in swaps {
                let step = self.face_move(x, axes, signs, &order, k)?;
                m = embed_positions(&step, d, k) * m;
                order.swap(k, k + 1);
            }
            Ok(m)
        };
        let a = route([0, 1, 0])?;
        let b = route([1, 0, 1])?;
        let h = invert(&b)? * a;
        SitedOperator::full(vec![self.d; 3], h)
    }

    /// The operator on path positions `(k, k+1)` that exchanges the order of
    /// the two steps there.
    fn face_move(&self, x: usize, axes: [usize; 3], signs: [bool; 3], order: &[usize; 3], k: usize) -> Result<CMat> {
        let g = &self.geometry;
        // corner bits (local axes) of the start of the path
        let mut p: [u8; 3] = std::array::from_fn(|a| if signs[a] { 0 } else { 1 });
        for &a in &order[..k] {
            p[a] = if signs[a] { p[a] + 1 } else { p[a] - 1 };
        }
        let (i, j) = (order[k], order[k + 1]);
        let (alpha, beta) = if i < j { (i, j) } else { (j, i) };
        let third = 3 - alpha - beta;
        // in-edges: axis-i edge at p, axis-j edge at p ± e_i
        let mut after_i = p;
        after_i[i] = if signs[i] { p[i] + 1 } else { p[i] - 1 };
        let level_of = |axis: usize, other: usize| -> bool {
            // level (along `other`) of the in-edge running along `axis`
            let corner = if axis == i { p } else { after_i };
            corner[other] == 1
        };
        let kind = Amplitude::from_in_levels(level_of(alpha, beta), level_of(beta, alpha));
        let mut base = x;
        if p[third] == 1 {
            base = g.fwd(base, axes[third]);
        }
        let amp = self.amplitude(kind, base, axes[alpha], axes[beta])?;
        let swap = swap_matrix(self.d);
        let id = CMat::identity(self.d * self.d, self.d * self.d);
        // positions hold (i, j) on input and (j, i) on output; amplitude slots are (α, β)
        let s_in = if i == alpha { &id } else { &swap };
        let s_out = if j == alpha { &id } else { &swap };
        Ok(s_out * amp * s_in)
    }

    pub fn num_cubes(&self) -> usize {
        self.geometry.num_sites() * self.geometry.triples().len()
    }

    /// `S = −β Σ_cubes Σ_{8 diagonals} Re tr H`.
    pub fn action_cubes(&self, beta: f64) -> Result<f64> {
        let g = &self.geometry;
        if g.dim() < 3 {
            return Err(CoreError::InvalidParameter("cube action needs n >= 3".into()));
        }
        let mut s = 0.0;
        for x in 0..g.num_sites() {
            for axes in g.triples() {
                for bits in 0..8u8 {
                    let signs = [bits & 1 == 0, bits & 2 == 0, bits & 4 == 0];
                    s += self.cube_holonomy_signed(x, axes, signs)?.trace().re;
                }
            }
        }
        Ok(-beta * s)
    }

    /// Link gauge transformation; `f[geometry.link_index(x, μ)]` acts on the
    /// μ-link at `x`.
    pub fn gauge_transform(&self, f: &[CMat]) -> Result<Self> {
        let g = &self.geometry;
        if f.len() != g.num_links() {
            return Err(CoreError::DimMismatch(format!("{} gauge elements for {} links", f.len(), g.num_links())));
        }
        for m in f {
            if m.nrows() != self.d || m.ncols() != self.d {
                return Err(CoreError::DimMismatch("link gauge elements are d x d".into()));
            }
        }
        let finv: Vec<CMat> = f.iter().map(invert).collect::<Result<_>>()?;
        let l = |x: usize, a: usize| g.link_index(x, a);
        let mut out = self.clone();
        for b in 0..g.num_sites() {
            for (mu, nu) in g.planes() {
                let i = self.index(b, mu, nu)?;
                let bm = g.fwd(b, mu);
                let bn = g.fwd(b, nu);
                out.ne[i] = kron(&finv[l(bn, mu)], &finv[l(bm, nu)]) * &self.ne[i] * kron(&f[l(b, mu)], &f[l(b, nu)]);
                out.nw[i] = kron(&finv[l(bn, mu)], &finv[l(b, nu)]) * &self.nw[i] * kron(&f[l(b, mu)], &f[l(bm, nu)]);
            }
        }
        Ok(out)
    }
}

/// Random link gauge function with values in GL(d).
pub fn random_link_gauge<R: Rng + ?Sized>(rng: &mut R, geometry: &LatticeGeometry, d: usize) -> Vec<CMat> {
    (0..geometry.num_links()).map(|_| random_gl(rng, d)).collect()
}

/// `‖H − Id‖_F`.
pub fn distance_from_identity(h: &SitedOperator) -> f64 {
    let n = h.data().nrows();
    (h.data() - CMat::identity(n, n)).norm()
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }
    use super::*;
    use crate::simplex::{place_pair, qybe_residual};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geom3() -> LatticeGeometry {
        LatticeGeometry::new(vec![2, 2, 3]).unwrap()
    }

    fn qybe_of(r: &CMat) -> f64 {
        let op = SitedOperator::full(vec![2, 2], r.clone()).unwrap();
        let p = |i, j| place_pair(&op, 3, i, j).unwrap();
        qybe_residual(&p(1, 2), &p(1, 3), &p(2, 3)).unwrap()
    }

    #[test]
    fn identity_field() {
        let f = PlaquetteField::identity(geom3(), 2);
        let h = f.cube_holonomy(0, [0, 1, 2]).unwrap();
        assert!(distance_from_identity(&h) < 1e-15);
        let s = f.action_cubes(0.5).unwrap();
        assert!((s + 0.5 * 8.0 * f.num_cubes() as f64 * 8.0).abs() < 1e-9);
    }

    #[test]
    fn derived_views_invert_stored_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = PlaquetteField::random(geom3(), 2, &mut rng);
        let ne = f.amplitude(Amplitude::NE, 3, 0, 2).unwrap();
        let sw = f.amplitude(Amplitude::SW, 3, 0, 2).unwrap();
        assert!((ne * sw - CMat::identity(4, 4)).norm() < 1e-12);
        let nw = f.amplitude(Amplitude::NW, 3, 0, 2).unwrap();
        let se = f.amplitude(Amplitude::SE, 3, 0, 2).unwrap();
        assert!((se * nw - CMat::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn principal_term_uses_nw_factors() {
        // oracle for the +++ diagonal, written out by hand from the path construction
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = PlaquetteField::random(geom3(), 2, &mut rng);
        let g = &f.geometry;
        let x = 1;
        let p = swap_matrix(2);
        let id = CMat::identity(2, 2);
        let at = |m: CMat, k: usize| if k == 0 { kron(&m, &id) } else { kron(&id, &m) };
        let nw = |b: usize, m: usize, n: usize| f.nw(b, m, n).unwrap().clone();
        let r12 = nw(x, 0, 1);
        let r13 = nw(g.fwd(x, 1), 0, 2);
        let r23 = nw(x, 1, 2);
        let b23 = nw(g.fwd(x, 0), 1, 2);
        let b13 = nw(x, 0, 2);
        let b12 = nw(g.fwd(x, 2), 0, 1);
        let route_a = at(&p * r23, 0) * at(&p * r13, 1) * at(&p * r12, 0);
        let route_b = at(&p * b12, 1) * at(&p * b13, 0) * at(&p * b23, 1);
        let expect = route_b.try_inverse().unwrap() * route_a;
        let h = f.cube_holonomy(x, [0, 1, 2]).unwrap();
        assert!((h.data() - expect).norm() < 1e-10);
    }

    #[test]
    fn homogeneous_holonomy_is_identity_iff_qybe() {
        let g = geom3();
        let swap = swap_matrix(2);
        let f = PlaquetteField::homogeneous(g.clone(), &swap).unwrap();
        assert!(qybe_of(&swap) < 1e-12);
        assert!(distance_from_identity(&f.cube_holonomy(0, [0, 1, 2]).unwrap()) < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = random_gl(&mut rng, 4);
        let f = PlaquetteField::homogeneous(g.clone(), &r).unwrap();
        assert!(qybe_of(&r) > 1e-3);
        assert!(distance_from_identity(&f.cube_holonomy(0, [0, 1, 2]).unwrap()) > 1e-3);

        // a non-trivial solution: a diagonal R, whose embeddings commute
        let r = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(2.0), c(-0.5), c(3.0)]));
        let f = PlaquetteField::homogeneous(g, &r).unwrap();
        assert!(qybe_of(&r) < 1e-12);
        assert!(distance_from_identity(&f.cube_holonomy(0, [0, 1, 2]).unwrap()) < 1e-12);
    }

    #[test]
    fn commuting_homogeneous_field_matches_identity_action() {
        let g = geom3();
        // diagonal amplitudes commute after permutation only when they are scalars
        let r = CMat::identity(4, 4) * Complex64::from_polar(1.0, 0.3);
        let f = PlaquetteField::homogeneous(g.clone(), &r).unwrap();
        let id = PlaquetteField::identity(g, 2);
        assert!((f.action_cubes(1.0).unwrap() - id.action_cubes(1.0).unwrap()).abs() < 1e-9);
        assert!(distance_from_identity(&f.cube_holonomy(0, [0, 1, 2]).unwrap()) < 1e-12);
    }

    #[test]
    fn action_is_gauge_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = geom3();
        let f = PlaquetteField::random(g.clone(), 2, &mut rng);
        let h = random_link_gauge(&mut rng, &g, 2);
        let t = f.gauge_transform(&h).unwrap();
        let (s0, s1) = (f.action_cubes(0.8).unwrap(), t.action_cubes(0.8).unwrap());
        assert!((s0 - s1).abs() < 1e-9 * s0.abs().max(1.0), "{s0} vs {s1}");
        for bits in 0..8u8 {
            let signs = [bits & 1 == 0, bits & 2 == 0, bits & 4 == 0];
            let a = f.cube_holonomy_signed(2, [0, 1, 2], signs).unwrap().trace();
            let b = t.cube_holonomy_signed(2, [0, 1, 2], signs).unwrap().trace();
            assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
        }
    }

    #[test]
    fn identity_gauge_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = geom3();
        let f = PlaquetteField::random(g.clone(), 2, &mut rng);
        let t = f.gauge_transform(&vec![CMat::identity(2, 2); g.num_links()]).unwrap();
        assert_eq!(f, t);
    }

    #[test]
    fn two_dimensional_lattice_has_no_cube_action() {
        let f = PlaquetteField::identity(LatticeGeometry::new(vec![2, 2]).unwrap(), 2);
        assert!(f.action_cubes(1.0).is_err());
    }
}
