use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Periodic hypercubic lattice. Axis 0 is the fastest-varying coordinate of
/// the linear site index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    extents: Vec<usize>,
}

/// A link is the pair (site, direction).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkId {
    pub axis: usize,
    pub site: usize,
}

impl LatticeGeometry {
    pub fn new(extents: Vec<usize>) -> Result<Self> {
        if extents.len() < 2 {
            return Err(CoreError::InvalidParameter(format!(
                "lattice dimension must be at least 2, got {}",
                extents.len()
            )));
        }
        if extents.iter().any(|&l| l < 2) {
            return Err(CoreError::InvalidParameter(format!("all extents must be >= 2, got {extents:?}")));
        }
        Ok(Self { extents })
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn num_sites(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn num_links(&self) -> usize {
        self.num_sites() * self.dim()
    }

    pub fn link_index(&self, site: usize, axis: usize) -> usize {
        site * self.dim() + axis
    }

    pub fn coords(&self, mut site: usize) -> Vec<usize> {
        self.extents
            .iter()
            .map(|&l| {
                let c = site % l;
                site /= l;
                c
            })
            .collect()
    }

    pub fn site(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.extents).rev().fold(0, |acc, (&c, &l)| acc * l + c % l)
    }

    /// Site displaced by `steps` along `axis`, wrapping around.
    pub fn shift(&self, site: usize, axis: usize, steps: isize) -> usize {
        let l = self.extents[axis] as isize;
        let mut c = self.coords(site);
        c[axis] = (c[axis] as isize + steps).rem_euclid(l) as usize;
        self.site(&c)
    }

    pub fn fwd(&self, site: usize, axis: usize) -> usize {
        self.shift(site, axis, 1)
    }

    pub fn bwd(&self, site: usize, axis: usize) -> usize {
        self.shift(site, axis, -1)
    }

    pub fn parity(&self, site: usize) -> usize {
        self.coords(site).iter().sum::<usize>() % 2
    }

    /// Planes `(μ, ν)` with `μ < ν`, in lexicographic order.
    pub fn planes(&self) -> Vec<(usize, usize)> {
        let n = self.dim();
        (0..n).flat_map(|m| (m + 1..n).map(move |v| (m, v))).collect()
    }

    pub fn num_planes(&self) -> usize {
        let n = self.dim();
        n * (n - 1) / 2
    }

    pub fn plane_index(&self, mu: usize, nu: usize) -> Result<usize> {
        let n = self.dim();
        if mu >= nu || nu >= n {
            return Err(CoreError::InvalidParameter(format!("plane ({mu},{nu}) needs mu < nu < {n}")));
        }
        // planes before row mu, then offset inside the row
        Ok(mu * (2 * n - mu - 1) / 2 + (nu - mu - 1))
    }

    pub fn triples(&self) -> Vec<[usize; 3]> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    out.push([a, b, c]);
                }
            }
        }
        out
    }

    pub fn quadruples(&self) -> Vec<[usize; 4]> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
        out
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dim() {
            Ok(())
        } else {
            Err(CoreError::InvalidParameter(format!("direction {axis} out of range for dimension {}", self.dim())))
        }
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site < self.num_sites() {
            Ok(())
        } else {
            Err(CoreError::InvalidParameter(format!("site {site} out of range")))
        }
    }
}
