//! Metropolis sampling of abelian 1-form and 2-form lattice theories.
//!
//! Updates are organised in checkerboard sub-sweeps: one sub-sweep touches
//! all variables of one orientation (direction or plane) and one site parity,
//! none of which share a cell. Each variable draws from its own generator,
//! seeded from `(seed, sweep, sub-sweep, variable)`, so a chain does not
//! depend on the number of threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::abelian::wrap_angle;
use super::geometry::LatticeGeometry;
use crate::error::{CoreError, Result};
use crate::seed::stream_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub dims: Vec<usize>,
    pub form_degree: u8,
    pub beta: f64,
    pub sweeps: usize,
    pub burnin: usize,
    pub seed: u64,
    /// Keep every variable's value after each measured sweep.
    #[serde(default)]
    pub record_samples: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub mean_observable: f64,
    pub stderr: f64,
    pub acceptance: f64,
    pub proposal_width: f64,
    pub observable_history: Vec<f64>,
    pub action_history: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<f64>,
}

/// Cell structure of the 1-form (plaquette) or 2-form (cube) theory.
struct Model {
    g: LatticeGeometry,
    degree: u8,
}

impl Model {
    fn num_vars(&self) -> usize {
        match self.degree {
            1 => self.g.num_links(),
            _ => self.g.num_sites() * self.g.num_planes(),
        }
    }

    /// Variable blocks of one sub-sweep each.
    fn subsweeps(&self) -> Vec<Vec<usize>> {
        let g = &self.g;
        let orientations = if self.degree == 1 { g.dim() } else { g.num_planes() };
        let mut out = vec![Vec::new(); 2 * orientations];
        for x in 0..g.num_sites() {
            let p = g.parity(x);
            for o in 0..orientations {
                out[2 * o + p].push(x * orientations + o);
            }
        }
        out
    }

    /// The cells containing `var`, each as its `(variable, sign)` terms.
    fn cells_of(&self, var: usize) -> Vec<Vec<(usize, f64)>> {
        let g = &self.g;
        if self.degree == 1 {
            let (x, mu) = (var / g.dim(), var % g.dim());
            let mut out = Vec::new();
            for nu in (0..g.dim()).filter(|&n| n != mu) {
                let (a, b) = if mu < nu { (mu, nu) } else { (nu, mu) };
                out.push(self.plaquette(x, a, b));
                out.push(self.plaquette(g.bwd(x, nu), a, b));
            }
            out
        } else {
            let np = g.num_planes();
            let (x, pi) = (var / np, var % np);
            let (mu, nu) = g.planes()[pi];
            let mut out = Vec::new();
            for rho in (0..g.dim()).filter(|&r| r != mu && r != nu) {
                let mut t = [mu, nu, rho];
                t.sort_unstable();
                out.push(self.cube(x, t));
                out.push(self.cube(g.bwd(x, rho), t));
            }
            out
        }
    }

    fn plaquette(&self, x: usize, mu: usize, nu: usize) -> Vec<(usize, f64)> {
        let g = &self.g;
        let l = |s: usize, a: usize| g.link_index(s, a);
        vec![(l(x, mu), 1.0), (l(g.fwd(x, mu), nu), 1.0), (l(g.fwd(x, nu), mu), -1.0), (l(x, nu), -1.0)]
    }

    fn cube(&self, x: usize, [m, n, r]: [usize; 3]) -> Vec<(usize, f64)> {
        let g = &self.g;
        let np = g.num_planes();
        let p = |s: usize, a: usize, b: usize| s * np + g.plane_index(a, b).expect("ordered plane");
        vec![
            (p(g.fwd(x, m), n, r), 1.0),
            (p(x, n, r), -1.0),
            (p(g.fwd(x, n), m, r), -1.0),
            (p(x, m, r), 1.0),
            (p(g.fwd(x, r), m, n), 1.0),
            (p(x, m, n), -1.0),
        ]
    }

    fn all_cells(&self) -> Vec<Vec<(usize, f64)>> {
        let g = &self.g;
        let mut out = Vec::new();
        for x in 0..g.num_sites() {
            if self.degree == 1 {
                for (m, n) in g.planes() {
                    out.push(self.plaquette(x, m, n));
                }
            } else {
                for t in g.triples() {
                    out.push(self.cube(x, t));
                }
            }
        }
        out
    }
}

fn cell_angle(cell: &[(usize, f64)], theta: &[f64], var: usize, value: f64) -> f64 {
    cell.iter().map(|&(i, s)| s * if i == var { value } else { theta[i] }).sum()
}

pub fn mc_metropolis_abelian(cfg: &McConfig) -> Result<McResult> {
    let g = LatticeGeometry::new(cfg.dims.clone())?;
    if !(cfg.form_degree == 1 || cfg.form_degree == 2) {
        return Err(CoreError::InvalidParameter(format!("form degree must be 1 or 2, got {}", cfg.form_degree)));
    }
    if g.dim() < cfg.form_degree as usize + 1 {
        return Err(CoreError::InvalidParameter(format!(
            "a {}-form theory needs dimension >= {}",
            cfg.form_degree,
            cfg.form_degree + 1
        )));
    }
    if g.extents().iter().any(|l| l % 2 != 0) {
        return Err(CoreError::InvalidParameter("checkerboard updates need even extents".into()));
    }
    if !cfg.beta.is_finite() || cfg.sweeps == 0 {
        return Err(CoreError::InvalidParameter("beta must be finite and sweeps positive".into()));
    }
    let model = Model { g, degree: cfg.form_degree };
    let subsweeps = model.subsweeps();
    let var_cells: Vec<Vec<Vec<(usize, f64)>>> = (0..model.num_vars()).map(|v| model.cells_of(v)).collect();
    let all_cells = model.all_cells();
    let mut theta = vec![0.0f64; model.num_vars()];
    let mut width = PI;
    let beta = cfg.beta;

    let mut obs_hist = Vec::with_capacity(cfg.sweeps);
    let mut act_hist = Vec::with_capacity(cfg.sweeps);
    let mut samples = Vec::new();
    let mut accepted_total = 0usize;
    let mut proposed_total = 0usize;

    for sweep in 0..cfg.burnin + cfg.sweeps {
        let mut accepted = 0usize;
        for (sub, vars) in subsweeps.iter().enumerate() {
            let updates: Vec<(usize, f64, bool)> = vars
                .par_iter()
                .map(|&v| {
                    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, &[sweep as u64, sub as u64, v as u64]));
                    let old = theta[v];
                    let new = wrap_angle(old + rng.random_range(-width..width));
                    let mut ds = 0.0;
                    for cell in &var_cells[v] {
                        ds -= beta * (cell_angle(cell, &theta, v, new).cos() - cell_angle(cell, &theta, v, old).cos());
                    }
                    let u: f64 = rng.random();
                    let ok = ds <= 0.0 || u < (-ds).exp();
                    (v, new, ok)
                })
                .collect();
            for (v, new, ok) in updates {
                if ok {
                    theta[v] = new;
                    accepted += 1;
                }
            }
        }
        let rate = accepted as f64 / theta.len() as f64;
        if sweep < cfg.burnin {
            width = (width * (rate / 0.5).clamp(0.5, 2.0)).clamp(0.01, PI);
            continue;
        }
        accepted_total += accepted;
        proposed_total += theta.len();
        let sum_cos: f64 = all_cells.iter().map(|c| cell_angle(c, &theta, usize::MAX, 0.0).cos()).sum();
        obs_hist.push(sum_cos / all_cells.len() as f64);
        act_hist.push(-beta * sum_cos);
        if cfg.record_samples {
            samples.extend_from_slice(&theta);
        }
    }

    let mean = obs_hist.iter().sum::<f64>() / obs_hist.len() as f64;
    Ok(McResult {
        mean_observable: mean,
        stderr: blocked_stderr(&obs_hist, 20),
        acceptance: accepted_total as f64 / proposed_total as f64,
        proposal_width: width,
        observable_history: obs_hist,
        action_history: act_hist,
        samples,
    })
}

/// Standard error of the mean from `nblocks` consecutive block averages.
pub fn blocked_stderr(xs: &[f64], nblocks: usize) -> f64 {
    let nb = nblocks.min(xs.len());
    if nb < 2 {
        return 0.0;
    }
    let bs = xs.len() / nb;
    let means: Vec<f64> = (0..nb).map(|b| xs[b * bs..(b + 1) * bs].iter().sum::<f64>() / bs as f64).collect();
    let m = means.iter().sum::<f64>() / nb as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (nb - 1) as f64;
    (var / nb as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dims: Vec<usize>, degree: u8, beta: f64, sweeps: usize) -> McConfig {
        McConfig { dims, form_degree: degree, beta, sweeps, burnin: 20, seed: 7, record_samples: false }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(mc_metropolis_abelian(&cfg(vec![4, 4], 2, 1.0, 10)).is_err());
        assert!(mc_metropolis_abelian(&cfg(vec![4, 3], 1, 1.0, 10)).is_err());
        assert!(mc_metropolis_abelian(&cfg(vec![4, 4], 3, 1.0, 10)).is_err());
        assert!(mc_metropolis_abelian(&cfg(vec![4, 4], 1, 1.0, 0)).is_err());
    }

    #[test]
    fn same_seed_same_chain() {
        let c = cfg(vec![4, 4], 1, 1.0, 30);
        let a = mc_metropolis_abelian(&c).unwrap();
        let b = mc_metropolis_abelian(&c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chain_is_independent_of_thread_count() {
        let c = cfg(vec![4, 4, 2], 2, 0.7, 20);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_metropolis_abelian(&c)).unwrap();
        let b = four.install(|| mc_metropolis_abelian(&c)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn frozen_phase() {
        for degree in [1, 2] {
            let dims = if degree == 1 { vec![4, 4] } else { vec![2, 2, 2] };
            let r = mc_metropolis_abelian(&cfg(dims, degree, 50.0, 100)).unwrap();
            assert!(r.mean_observable > 0.95 && r.mean_observable < 1.0, "{}", r.mean_observable);
        }
    }

    #[test]
    fn disordered_phase() {
        let r = mc_metropolis_abelian(&cfg(vec![8, 8], 1, 0.0, 400)).unwrap();
        let se = r.stderr.max(1e-3);
        assert!(r.mean_observable.abs() < 3.0 * se + 0.01, "{} ± {}", r.mean_observable, r.stderr);
        assert!((r.proposal_width - PI).abs() < 1e-12);
    }

    #[test]
    fn blocking() {
        assert_eq!(blocked_stderr(&[1.0], 20), 0.0);
        let xs: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        assert!(blocked_stderr(&xs, 10) < 1e-12);
    }
}
