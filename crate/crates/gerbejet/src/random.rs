//! Seeded random polynomials, generators and connections for identity checks.

use num_traits::Zero;
use pform_core::rational::{frac, Rational};
use rand::Rng;

use crate::connection::GerbeConnection;
use crate::generator::Generator;
use crate::poly::{JetPoly, JetSpace};

/// Shape of a random polynomial.
#[derive(Debug, Clone, Copy)]
pub struct PolyShape {
    pub terms: usize,
    pub max_deg: u32,
    pub x_only: bool,
}

fn coefficient<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    loop {
        let num = rng.random_range(-4i64..=4);
        if num != 0 {
            return frac(num, rng.random_range(1i64..=3));
        }
    }
}

fn exponents<R: Rng + ?Sized>(space: JetSpace, shape: PolyShape, rng: &mut R) -> Vec<u8> {
    let nv = if shape.x_only { space.n } else { space.num_vars() };
    let mut e = vec![0u8; space.num_vars()];
    let d = rng.random_range(0..=shape.max_deg);
    for _ in 0..d {
        e[rng.random_range(0..nv)] += 1;
    }
    e
}

pub fn random_scalar<R: Rng + ?Sized>(space: JetSpace, shape: PolyShape, rng: &mut R) -> JetPoly {
    random_section(space, 1, shape, rng)
}

/// Module-valued polynomial; each term gets a random sparse vector.
pub fn random_section<R: Rng + ?Sized>(space: JetSpace, wdim: usize, shape: PolyShape, rng: &mut R) -> JetPoly {
    let mut terms = Vec::with_capacity(shape.terms);
    for _ in 0..shape.terms {
        let e = exponents(space, shape, rng);
        let mut w = vec![Rational::zero(); wdim];
        let k = rng.random_range(0..wdim);
        w[k] = coefficient(rng);
        if wdim > 1 && rng.random_bool(0.5) {
            let k2 = rng.random_range(0..wdim);
            w[k2] += coefficient(rng);
        }
        terms.push((e, w));
    }
    JetPoly::from_terms(space, wdim, terms).expect("degree within cap by construction")
}

pub fn random_vect<R: Rng + ?Sized>(space: JetSpace, max_deg: u32, rng: &mut R) -> Generator {
    let shape = PolyShape { terms: 2, max_deg, x_only: true };
    Generator::Vect((0..space.n).map(|_| random_scalar(space, shape, rng)).collect())
}

pub fn random_gauge<R: Rng + ?Sized>(space: JetSpace, dim_g: usize, max_deg: u32, rng: &mut R) -> Generator {
    let shape = PolyShape { terms: 2, max_deg, x_only: false };
    Generator::Gauge((0..dim_g).map(|_| random_scalar(space, shape, rng)).collect())
}

pub fn random_rescale<R: Rng + ?Sized>(space: JetSpace, max_deg: u32, rng: &mut R) -> Generator {
    Generator::Rescale(random_scalar(space, PolyShape { terms: 3, max_deg, x_only: true }, rng))
}

/// Sparse random connection: each component is nonzero with probability
/// `density`. `Γ` is left zero unless `with_gamma`.
pub fn random_connection<R: Rng + ?Sized>(
    space: JetSpace,
    dim_g: usize,
    max_deg: u32,
    density: f64,
    with_gamma: bool,
    rng: &mut R,
) -> GerbeConnection {
    let shape = PolyShape { terms: 2, max_deg, x_only: false };
    let n = space.n;
    let mut conn = GerbeConnection::zero(space, dim_g);
    let pick = |rng: &mut R| -> Option<JetPoly> {
        rng.random_bool(density).then(|| random_scalar(space, shape, rng))
    };
    for a in 0..dim_g {
        for nu in 0..n {
            if let Some(p) = pick(rng) {
                conn.set_a(a, nu, p).expect("shape");
            }
        }
        for s in space.s_indices() {
            if let Some(p) = pick(rng) {
                conn.set_b(a, &s, p).expect("shape");
            }
        }
    }
    if with_gamma {
        for s in 0..n {
            for t in 0..n {
                for nu in 0..n {
                    if let Some(p) = pick(rng) {
                        conn.set_gamma(s, t, nu, p).expect("shape");
                    }
                }
            }
        }
    }
    conn
}
