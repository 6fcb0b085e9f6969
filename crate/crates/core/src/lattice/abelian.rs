//! Abelian 2-form fields: one angle per plaquette.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::LatticeGeometry;
use crate::error::{CoreError, Result};

/// Wrap into `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t <= -PI {
        t + 2.0 * PI
    } else {
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelianPlaquetteAngles {
    pub geometry: LatticeGeometry,
    theta: Vec<f64>,
    /// With `Some(N)` every angle is `2πk/N`; `k` is kept exactly.
    pub zn: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    k: Vec<i64>,
}

impl AbelianPlaquetteAngles {
    fn len(g: &LatticeGeometry) -> usize {
        g.num_sites() * g.num_planes()
    }

    pub fn zero(geometry: LatticeGeometry) -> Self {
        let n = Self::len(&geometry);
        Self { geometry, theta: vec![0.0; n], zn: None, k: Vec::new() }
    }

    pub fn from_angles(geometry: LatticeGeometry, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != Self::len(&geometry) {
            return Err(CoreError::DimMismatch(format!("expected {} angles", Self::len(&geometry))));
        }
        if theta.iter().any(|t| !(t.is_finite() && *t > -PI && *t <= PI)) {
            return Err(CoreError::InvalidParameter("angles must lie in (-pi, pi]".into()));
        }
        Ok(Self { geometry, theta, zn: None, k: Vec::new() })
    }

    pub fn from_zn(geometry: LatticeGeometry, n: u32, k: Vec<i64>) -> Result<Self> {
        if n < 2 {
            return Err(CoreError::InvalidParameter("Z_N needs N >= 2".into()));
        }
        if k.len() != Self::len(&geometry) {
            return Err(CoreError::DimMismatch(format!("expected {} values", Self::len(&geometry))));
        }
        let k: Vec<i64> = k.into_iter().map(|v| v.rem_euclid(n as i64)).collect();
        let theta = k.iter().map(|&v| wrap_angle(2.0 * PI * v as f64 / n as f64)).collect();
        Ok(Self { geometry, theta, zn: Some(n), k })
    }

    pub fn random<R: Rng + ?Sized>(geometry: LatticeGeometry, rng: &mut R) -> Self {
        let n = Self::len(&geometry);
        let theta = (0..n).map(|_| wrap_angle(rng.random_range(-PI..PI))).collect();
        Self { geometry, theta, zn: None, k: Vec::new() }
    }

    pub fn random_zn<R: Rng + ?Sized>(geometry: LatticeGeometry, n: u32, rng: &mut R) -> Result<Self> {
        let k = (0..Self::len(&geometry)).map(|_| rng.random_range(0..n as i64)).collect();
        Self::from_zn(geometry, n, k)
    }

    pub fn index(&self, x: usize, mu: usize, nu: usize) -> usize {
        x * self.geometry.num_planes() + self.geometry.plane_index(mu, nu).expect("mu < nu")
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    pub fn angle(&self, x: usize, mu: usize, nu: usize) -> f64 {
        self.theta[self.index(x, mu, nu)]
    }

    pub fn set_angle(&mut self, i: usize, theta: f64) {
        self.theta[i] = wrap_angle(theta);
    }

    pub fn zn_value(&self, x: usize, mu: usize, nu: usize) -> Option<i64> {
        self.zn.map(|_| self.k[self.index(x, mu, nu)])
    }

    /// Oriented sum of the six face angles of the cube at `x` spanned by
    /// `μ<ν<ρ` (unwrapped):
    /// `θ_νρ(x+μ̂) − θ_νρ(x) − θ_μρ(x+ν̂) + θ_μρ(x) + θ_μν(x+ρ̂) − θ_μν(x)`.
    pub fn cube_angle(&self, x: usize, axes: [usize; 3]) -> f64 {
        self.cube_sum(x, axes, |s, a, b| self.angle(s, a, b))
    }

    /// Integer version for Z_N fields.
    pub fn cube_zn(&self, x: usize, axes: [usize; 3]) -> Option<i64> {
        self.zn?;
        Some(self.cube_sum(x, axes, |s, a, b| self.zn_value(s, a, b).expect("Z_N")))
    }

    fn cube_sum<T, F>(&self, x: usize, [m, n, r]: [usize; 3], v: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
        F: Fn(usize, usize, usize) -> T,
    {
        let g = &self.geometry;
        v(g.fwd(x, m), n, r) - v(x, n, r) - v(g.fwd(x, n), m, r) + v(x, m, r) + v(g.fwd(x, r), m, n) - v(x, m, n)
    }

    /// Sum of the eight oriented cube angles bounding the 4-cell at `x`
    /// spanned by `axes`; each plaquette cancels against itself, so the
    /// result is 0 up to rounding.
    pub fn bianchi_sum(&self, x: usize, axes: [usize; 4]) -> f64 {
        self.bianchi(x, axes, |s, c| self.cube_angle(s, c))
    }

    pub fn bianchi_sum_zn(&self, x: usize, axes: [usize; 4]) -> Option<i64> {
        self.zn?;
        Some(self.bianchi(x, axes, |s, c| self.cube_zn(s, c).expect("Z_N")))
    }

    fn bianchi<T, F>(&self, x: usize, axes: [usize; 4], cube: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + Default,
        F: Fn(usize, [usize; 3]) -> T,
    {
        let g = &self.geometry;
        let mut acc = T::default();
        for drop in 0..4 {
            let rest: Vec<usize> = (0..4).filter(|&k| k != drop).map(|k| axes[k]).collect();
            let c = [rest[0], rest[1], rest[2]];
            let term = cube(g.fwd(x, axes[drop]), c) - cube(x, c);
            acc = if drop % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    /// `θ_μν(x) → θ_μν(x) + λ_μ(x) + λ_ν(x+μ̂) − λ_μ(x+ν̂) − λ_ν(x)`, with one
    /// angle `λ` per link, indexed like `geometry.link_index`.
    pub fn gauge_transform(&self, lambda: &[f64]) -> Result<Self> {
        let g = &self.geometry;
        if lambda.len() != g.num_links() {
            return Err(CoreError::DimMismatch(format!("expected {} link angles", g.num_links())));
        }
        let l = |x: usize, a: usize| lambda[g.link_index(x, a)];
        let mut theta = self.theta.clone();
        for x in 0..g.num_sites() {
            for (m, n) in g.planes() {
                let i = self.index(x, m, n);
                theta[i] = wrap_angle(theta[i] + l(x, m) + l(g.fwd(x, m), n) - l(g.fwd(x, n), m) - l(x, n));
            }
        }
        Ok(Self { geometry: g.clone(), theta, zn: None, k: Vec::new() })
    }

    pub fn num_cubes(&self) -> usize {
        self.geometry.num_sites() * self.geometry.triples().len()
    }

    /// `−β Σ_cubes cos θ_C`.
    pub fn action(&self, beta: f64) -> f64 {
        let g = &self.geometry;
        let mut s = 0.0;
        for x in 0..g.num_sites() {
            for c in g.triples() {
                s += self.cube_angle(x, c).cos();
            }
        }
        -beta * s
    }
}
