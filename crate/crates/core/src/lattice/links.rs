//! 1-form lattice gauge fields.
//!
//! Products of link matrices are written in transport order: the factor for
//! the first step of a path stands rightmost. With the gauge law
//! `U_μ(x) → f(x+μ̂)⁻¹ U_μ(x) f(x)` the product along any path from `x` to
//! `y` then transforms as `f(y)⁻¹ (…) f(x)`, and closed loops by conjugation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::LatticeGeometry;
use crate::error::{CoreError, Result};
use crate::multitensor::CMat;

const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeGroup {
    U1,
    SU2,
    GL(usize),
}

impl GaugeGroup {
    pub fn dim(&self) -> usize {
        match self {
            Self::U1 => 1,
            Self::SU2 => 2,
            Self::GL(d) => *d,
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Self::GL(_))
    }
}

impl FromStr for GaugeGroup {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "u1" | "u(1)" => Ok(Self::U1),
            "su2" | "su(2)" => Ok(Self::SU2),
            _ => t
                .strip_prefix("gl(")
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| t.strip_prefix("gl"))
                .and_then(|r| r.parse::<usize>().ok())
                .filter(|&d| d >= 1)
                .map(Self::GL)
                .ok_or_else(|| CoreError::InvalidParameter(format!("unknown gauge group {s:?}"))),
        }
    }
}

impl fmt::Display for GaugeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::U1 => write!(f, "u1"),
            Self::SU2 => write!(f, "su2"),
            Self::GL(d) => write!(f, "gl{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkData {
    Angles(Vec<f64>),
    Matrices(Vec<CMat>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkField {
    pub geometry: LatticeGeometry,
    pub group: GaugeGroup,
    data: LinkData,
}

/// One step of a lattice path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub axis: usize,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    pub start: usize,
    pub steps: Vec<Step>,
}

impl LatticePath {
    /// Counter-clockwise `a × b` rectangle in the `(μ, ν)` plane.
    pub fn rectangle(start: usize, mu: usize, nu: usize, a: usize, b: usize) -> Self {
        let mut steps = Vec::with_capacity(2 * (a + b));
        steps.extend(std::iter::repeat_n(Step { axis: mu, forward: true }, a));
        steps.extend(std::iter::repeat_n(Step { axis: nu, forward: true }, b));
        steps.extend(std::iter::repeat_n(Step { axis: mu, forward: false }, a));
        steps.extend(std::iter::repeat_n(Step { axis: nu, forward: false }, b));
        Self { start, steps }
    }
}

fn phase(theta: f64) -> CMat {
    CMat::from_element(1, 1, Complex64::from_polar(1.0, theta))
}

/// `arg` of a unit complex number, or an error if the modulus is not 1.
fn unit_angle(m: &CMat) -> Result<f64> {
    if m.nrows() != 1 || m.ncols() != 1 {
        return Err(CoreError::DimMismatch("U(1) elements are 1x1".into()));
    }
    let z = m[(0, 0)];
    if z.norm() == 0.0 {
        return Err(CoreError::NotInvertible);
    }
    if (z.norm() - 1.0).abs() > UNITARITY_TOL {
        return Err(CoreError::InvalidParameter(format!("U(1) element has modulus {}", z.norm())));
    }
    Ok(z.arg())
}

pub(crate) fn invert(m: &CMat) -> Result<CMat> {
    m.clone().try_inverse().ok_or(CoreError::NotInvertible)
}

fn check_member(group: GaugeGroup, m: &CMat) -> Result<()> {
    let d = group.dim();
    if m.nrows() != d || m.ncols() != d {
        return Err(CoreError::DimMismatch(format!("expected {d}x{d}, got {}x{}", m.nrows(), m.ncols())));
    }
    if group.is_unitary() {
        let dev = (m.adjoint() * m - CMat::identity(d, d)).norm();
        if dev > UNITARITY_TOL * (d as f64) * 10.0 {
            return Err(CoreError::InvalidParameter(format!("element of {group} is not unitary (deviation {dev:e})")));
        }
    } else if m.determinant().norm() < 1e-14 {
        return Err(CoreError::NotInvertible);
    }
    Ok(())
}

pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> CMat {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n2: f64 = q.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            let (a, b, c, d) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
            return CMat::from_row_slice(
                2,
                2,
                &[Complex64::new(a, b), Complex64::new(c, d), Complex64::new(-c, d), Complex64::new(a, -b)],
            );
        }
    }
}

/// Random element of GL(d), kept away from the singular locus.
pub fn random_gl<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    loop {
        let m = CMat::identity(d, d)
            + CMat::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)));
        if m.determinant().norm() > 1e-2 {
            return m;
        }
    }
}

pub fn random_element<R: Rng + ?Sized>(rng: &mut R, group: GaugeGroup) -> CMat {
    match group {
        GaugeGroup::U1 => phase(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)),
        GaugeGroup::SU2 => random_su2(rng),
        GaugeGroup::GL(d) => random_gl(rng, d),
    }
}

/// A random site-valued gauge function.
pub fn random_gauge<R: Rng + ?Sized>(rng: &mut R, geometry: &LatticeGeometry, group: GaugeGroup) -> Vec<CMat> {
    (0..geometry.num_sites()).map(|_| random_element(rng, group)).collect()
}

impl LinkField {
    pub fn identity(geometry: LatticeGeometry, group: GaugeGroup) -> Self {
        let n = geometry.num_links();
        let data = match group {
            GaugeGroup::U1 => LinkData::Angles(vec![0.0; n]),
            _ => LinkData::Matrices(vec![CMat::identity(group.dim(), group.dim()); n]),
        };
        Self { geometry, group, data }
    }

    pub fn random<R: Rng + ?Sized>(geometry: LatticeGeometry, group: GaugeGroup, rng: &mut R) -> Self {
        let n = geometry.num_links();
        let data = match group {
            GaugeGroup::U1 => LinkData::Angles(
                (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect(),
            ),
            _ => LinkData::Matrices((0..n).map(|_| random_element(rng, group)).collect()),
        };
        Self { geometry, group, data }
    }

    pub fn from_angles(geometry: LatticeGeometry, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != geometry.num_links() {
            return Err(CoreError::DimMismatch(format!(
                "{} angles for {} links",
                angles.len(),
                geometry.num_links()
            )));
        }
        Ok(Self { geometry, group: GaugeGroup::U1, data: LinkData::Angles(angles) })
    }

    pub fn from_matrices(geometry: LatticeGeometry, group: GaugeGroup, mats: Vec<CMat>) -> Result<Self> {
        if mats.len() != geometry.num_links() {
            return Err(CoreError::DimMismatch(format!("{} matrices for {} links", mats.len(), geometry.num_links())));
        }
        if group == GaugeGroup::U1 {
            let angles = mats.iter().map(unit_angle).collect::<Result<Vec<_>>>()?;
            return Self::from_angles(geometry, angles);
        }
        for m in &mats {
            check_member(group, m)?;
        }
        Ok(Self { geometry, group, data: LinkData::Matrices(mats) })
    }

    pub fn data(&self) -> &LinkData {
        &self.data
    }

    /// Angle of a U(1) link; `None` for matrix groups.
    pub fn angle(&self, site: usize, axis: usize) -> Option<f64> {
        match &self.data {
            LinkData::Angles(a) => Some(a[self.geometry.link_index(site, axis)]),
            LinkData::Matrices(_) => None,
        }
    }

    pub fn link(&self, site: usize, axis: usize) -> CMat {
        let i = self.geometry.link_index(site, axis);
        match &self.data {
            LinkData::Angles(a) => phase(a[i]),
            LinkData::Matrices(m) => m[i].clone(),
        }
    }

    /// Transport-ordered holonomy around the elementary square spanned by
    /// `μ` then `ν` at `x`:
    /// `U_ν(x)⁻¹ U_μ(x+ν̂)⁻¹ U_ν(x+μ̂) U_μ(x)`.
    pub fn plaquette_holonomy(&self, x: usize, mu: usize, nu: usize) -> Result<CMat> {
        let g = &self.geometry;
        g.check_site(x)?;
        g.check_axis(mu)?;
        g.check_axis(nu)?;
        if mu == nu {
            return Err(CoreError::InvalidParameter("plaquette needs two distinct directions".into()));
        }
        if let LinkData::Angles(_) = self.data {
            return Ok(phase(self.plaquette_angle(x, mu, nu)));
        }
        let u_mu = self.link(x, mu);
        let u_nu_right = self.link(g.fwd(x, mu), nu);
        let u_mu_top = invert(&self.link(g.fwd(x, nu), mu))?;
        let u_nu = invert(&self.link(x, nu))?;
        Ok(u_nu * u_mu_top * u_nu_right * u_mu)
    }

    /// `θ_μ(x) + θ_ν(x+μ̂) − θ_μ(x+ν̂) − θ_ν(x)` for U(1) fields, unwrapped.
    pub fn plaquette_angle(&self, x: usize, mu: usize, nu: usize) -> f64 {
        let g = &self.geometry;
        let a = |s, ax| self.angle(s, ax).expect("U(1) field");
        a(x, mu) + a(g.fwd(x, mu), nu) - a(g.fwd(x, nu), mu) - a(x, nu)
    }

    pub fn num_plaquettes(&self) -> usize {
        self.geometry.num_sites() * self.geometry.num_planes()
    }

    /// `S = −β Σ_{x, μ<ν} Re tr P_{μν}(x)`. The identity field gives
    /// `−β · #plaquettes · d`.
    pub fn wilson_action(&self, beta: f64) -> f64 {
        let g = &self.geometry;
        let mut s = 0.0;
        for x in 0..g.num_sites() {
            for (mu, nu) in g.planes() {
                s += match self.data {
                    LinkData::Angles(_) => self.plaquette_angle(x, mu, nu).cos(),
                    LinkData::Matrices(_) => {
                        self.plaquette_holonomy(x, mu, nu).expect("valid plaquette").trace().re
                    }
                };
            }
        }
        -beta * s
    }

    /// `U_μ(x) → f(x+μ̂)⁻¹ U_μ(x) f(x)`.
    pub fn gauge_transform(&self, f: &[CMat]) -> Result<Self> {
        let g = &self.geometry;
        if f.len() != g.num_sites() {
            return Err(CoreError::DimMismatch(format!("{} gauge elements for {} sites", f.len(), g.num_sites())));
        }
        for m in f {
            check_member(self.group, m)?;
        }
        let data = match &self.data {
            LinkData::Angles(a) => {
                let alpha: Vec<f64> = f.iter().map(unit_angle).collect::<Result<_>>()?;
                let mut out = a.clone();
                for x in 0..g.num_sites() {
                    for mu in 0..g.dim() {
                        out[g.link_index(x, mu)] += alpha[x] - alpha[g.fwd(x, mu)];
                    }
                }
                LinkData::Angles(out)
            }
            LinkData::Matrices(m) => {
                let finv: Vec<CMat> = f.iter().map(invert).collect::<Result<_>>()?;
                let mut out = m.clone();
                for x in 0..g.num_sites() {
                    for mu in 0..g.dim() {
                        let i = g.link_index(x, mu);
                        out[i] = &finv[g.fwd(x, mu)] * &m[i] * &f[x];
                    }
                }
                LinkData::Matrices(out)
            }
        };
        Ok(Self { geometry: g.clone(), group: self.group, data })
    }

    /// Trace of the transport-ordered product along a closed path. A backward
    /// step from `x` uses `U_μ(x−μ̂)⁻¹`.
    pub fn wilson_loop(&self, path: &LatticePath) -> Result<Complex64> {
        let g = &self.geometry;
        g.check_site(path.start)?;
        let d = self.group.dim();
        let mut m = CMat::identity(d, d);
        let mut x = path.start;
        for st in &path.steps {
            g.check_axis(st.axis)?;
            if st.forward {
                m = self.link(x, st.axis) * m;
                x = g.fwd(x, st.axis);
            } else {
                x = g.bwd(x, st.axis);
                m = invert(&self.link(x, st.axis))? * m;
            }
        }
        if x != path.start {
            return Err(CoreError::OpenPath);
        }
        Ok(m.trace())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn geom() -> LatticeGeometry {
        LatticeGeometry::new(vec![3, 3, 2]).unwrap()
    }

    #[test]
    fn identity_field_has_identity_plaquettes() {
        for group in [GaugeGroup::U1, GaugeGroup::SU2, GaugeGroup::GL(3)] {
            let f = LinkField::identity(geom(), group);
            let p = f.plaquette_holonomy(4, 0, 2).unwrap();
            let d = group.dim();
            assert!((p - CMat::identity(d, d)).norm() < 1e-15);
            let np = f.num_plaquettes() as f64;
            assert!((f.wilson_action(2.0) + 2.0 * np * d as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_gauge_links_are_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for group in [GaugeGroup::SU2, GaugeGroup::GL(2)] {
            let id = LinkField::identity(geom(), group);
            let f = random_gauge(&mut rng, &geom(), group);
            let pure = id.gauge_transform(&f).unwrap();
            // oracle: U_μ(x) = f(x+μ̂)⁻¹ f(x) built by hand
            let g = geom();
            let u = |x: usize, mu: usize| f[g.fwd(x, mu)].clone().try_inverse().unwrap() * &f[x];
            assert!((pure.link(5, 1) - u(5, 1)).norm() < 1e-12);
            for x in 0..g.num_sites() {
                let p = pure.plaquette_holonomy(x, 0, 1).unwrap();
                assert!((p - CMat::identity(group.dim(), group.dim())).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn u1_constant_angle_cancels() {
        let g = LatticeGeometry::new(vec![4, 4]).unwrap();
        let mut angles = vec![0.0; g.num_links()];
        for x in 0..g.num_sites() {
            angles[g.link_index(x, 0)] = 0.7;
        }
        let f = LinkField::from_angles(g, angles).unwrap();
        assert!(f.plaquette_angle(5, 0, 1).abs() < 1e-15);
    }

    #[test]
    fn single_plaquette_angle_pi_flips_contribution() {
        let g = LatticeGeometry::new(vec![2, 2]).unwrap();
        let mut angles = vec![0.0; g.num_links()];
        angles[g.link_index(0, 0)] = PI;
        let f = LinkField::from_angles(g.clone(), angles).unwrap();
        // link (0,0) enters P(0) with + and P(x−ν̂) = P(2) with −; on a 2×2 torus those are 2 of 4 plaquettes
        let beta = 1.5;
        let s = f.wilson_action(beta);
        assert!((s - (-beta * 2.0 + beta * 2.0)).abs() < 1e-12);
        assert!((f.plaquette_angle(0, 0, 1).cos() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauge_invariance_of_action_and_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for group in [GaugeGroup::U1, GaugeGroup::SU2, GaugeGroup::GL(2)] {
            let f = LinkField::random(geom(), group, &mut rng);
            let h = random_gauge(&mut rng, &geom(), group);
            let t = f.gauge_transform(&h).unwrap();
            assert!((f.wilson_action(1.3) - t.wilson_action(1.3)).abs() < 1e-9, "{group}");
            let path = LatticePath::rectangle(4, 0, 1, 2, 1);
            let w0 = f.wilson_loop(&path).unwrap();
            let w1 = t.wilson_loop(&path).unwrap();
            assert!((w0 - w1).norm() < 1e-10, "{group}");
        }
    }

    #[test]
    fn gauge_composition_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let group = GaugeGroup::GL(2);
        let u = LinkField::random(geom(), group, &mut rng);
        let f = random_gauge(&mut rng, &geom(), group);
        let h = random_gauge(&mut rng, &geom(), group);
        let fh: Vec<CMat> = f.iter().zip(&h).map(|(a, b)| a * b).collect();
        let two_step = u.gauge_transform(&f).unwrap().gauge_transform(&h).unwrap();
        let one_step = u.gauge_transform(&fh).unwrap();
        for x in 0..geom().num_sites() {
            for mu in 0..3 {
                assert!((two_step.link(x, mu) - one_step.link(x, mu)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn wilson_loop_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = LinkField::random(geom(), GaugeGroup::SU2, &mut rng);
        let trivial = LatticePath { start: 3, steps: vec![] };
        assert!((f.wilson_loop(&trivial).unwrap() - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let sq = LatticePath::rectangle(3, 1, 2, 1, 1);
        let p = f.plaquette_holonomy(3, 1, 2).unwrap();
        assert!((f.wilson_loop(&sq).unwrap() - p.trace()).norm() < 1e-12);
        let back_and_forth = LatticePath {
            start: 3,
            steps: vec![Step { axis: 0, forward: true }, Step { axis: 0, forward: false }],
        };
        assert!((f.wilson_loop(&back_and_forth).unwrap() - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let open = LatticePath { start: 3, steps: vec![Step { axis: 0, forward: true }] };
        assert_eq!(f.wilson_loop(&open), Err(CoreError::OpenPath));
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = LinkField::identity(geom(), GaugeGroup::SU2);
        assert!(f.plaquette_holonomy(0, 1, 1).is_err());
        assert!(f.plaquette_holonomy(0, 0, 3).is_err());
        let singular = vec![CMat::zeros(2, 2); geom().num_sites()];
        assert!(f.gauge_transform(&singular).is_err());
        assert!("gl0".parse::<GaugeGroup>().is_err());
        assert_eq!("gl(3)".parse::<GaugeGroup>().unwrap(), GaugeGroup::GL(3));
    }

    #[test]
    fn snapshot_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = LinkField::random(geom(), GaugeGroup::SU2, &mut rng);
        let s = serde_json::to_string(&f).unwrap();
        let back: LinkField = serde_json::from_str(&s).unwrap();
        assert_eq!(f, back);
    }
}
