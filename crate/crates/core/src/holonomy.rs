//! Abelian gerbe holonomy over foliated closed 3-manifolds,
//! `W(Σ) = exp(i Φ)` with `Φ = ∫ d²σ dτ A_μ(x, s) ∂x^μ/∂τ` and the induced
//! surface element `s^{μν} = ε^{ij} ∂_i x^μ ∂_j x^ν`.
//!
//! Indices of coordinates and forms are 0-based here; `x^1` of the usual
//! notation is index 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub exps: Vec<u32>,
}

/// Real polynomial in the ambient coordinates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealPoly {
    pub terms: Vec<Monomial>,
}

impl RealPoly {
    pub fn constant(n: usize, c: f64) -> Self {
        Self { terms: vec![Monomial { coef: c, exps: vec![0; n] }] }
    }

    /// `c · Π x_i^{e_i}`.
    pub fn monomial(c: f64, exps: Vec<u32>) -> Self {
        Self { terms: vec![Monomial { coef: c, exps }] }
    }

    pub fn add(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn scale(mut self, c: f64) -> Self {
        for t in &mut self.terms {
            t.coef *= c;
        }
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.exps.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn derivative(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exps.get(i).copied().unwrap_or(0) > 0)
            .map(|t| {
                let mut exps = t.exps.clone();
                let e = exps[i];
                exps[i] -= 1;
                Monomial { coef: t.coef * e as f64, exps }
            })
            .collect();
        Self { terms }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.terms.iter().any(|t| t.exps.len() != n) {
            return Err(CoreError::DimMismatch(format!("polynomial exponents must have length {n}")));
        }
        Ok(())
    }
}

/// One term `coef(x) · s^{νρ}` (or `coef(x)` when `s_pair` is `None`) of `A_μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionTerm {
    pub mu: usize,
    pub coef: RealPoly,
    #[serde(default)]
    pub s_pair: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelianConnection {
    pub n: usize,
    pub terms: Vec<ConnectionTerm>,
}

/// Totally antisymmetric three-form, given by its components with
/// increasing indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeForm {
    pub n: usize,
    pub components: Vec<([usize; 3], RealPoly)>,
}

/// Gauge parameter `X = base(x) + Σ poly(x) s^{νρ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeParam {
    pub base: RealPoly,
    #[serde(default)]
    pub s_linear: Vec<((usize, usize), RealPoly)>,
}

impl AbelianConnection {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    /// `A_μ = ∂_μ X` with `s` held fixed.
    pub fn gradient(n: usize, x: &GaugeParam) -> Self {
        let mut terms = Vec::new();
        for mu in 0..n {
            terms.push(ConnectionTerm { mu, coef: x.base.derivative(mu), s_pair: None });
            for (pair, p) in &x.s_linear {
                terms.push(ConnectionTerm { mu, coef: p.derivative(mu), s_pair: Some(*pair) });
            }
        }
        Self { n, terms }
    }

    /// Special gauge `A_μ = Σ_{ν,ρ} A_{μνρ}(x) s^{νρ}`, summed over ordered pairs.
    pub fn special_gauge(form: &ThreeForm) -> Result<Self> {
        let mut terms = Vec::new();
        for ([a, b, c], p) in &form.components {
            if !(a < b && b < c && *c < form.n) {
                return Err(CoreError::InvalidParameter(format!("three-form indices {:?} must increase", [a, b, c])));
            }
            p.check(form.n)?;
            let perms = [([*a, *b, *c], 1.0), ([*b, *c, *a], 1.0), ([*c, *a, *b], 1.0), ([*b, *a, *c], -1.0), ([*a, *c, *b], -1.0), ([*c, *b, *a], -1.0)];
            for (idx, sign) in perms {
                terms.push(ConnectionTerm { mu: idx[0], coef: p.clone().scale(sign), s_pair: Some((idx[1], idx[2])) });
            }
        }
        Ok(Self { n: form.n, terms })
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { n: self.n, terms }
    }

    fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if t.mu >= self.n {
                return Err(CoreError::InvalidParameter(format!("connection component {} out of range", t.mu)));
            }
            if let Some((a, b)) = t.s_pair {
                if a >= self.n || b >= self.n {
                    return Err(CoreError::InvalidParameter("surface-element index out of range".into()));
                }
            }
            t.coef.check(self.n)?;
        }
        Ok(())
    }

    /// `A_μ(x, s) ∂_τ x^μ`.
    fn contract(&self, x: &[f64], s: &[Vec<f64>], dtau: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let sv = t.s_pair.map_or(1.0, |(a, b)| s[a][b]);
                t.coef.eval(x) * sv * dtau[t.mu]
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    /// Second-order central differences on the sampling grid.
    CentralDifference,
}

/// Closed 3-manifold sampled on a periodic grid over `[0, 2π)³`, with
/// parameters `(σ¹, σ², τ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedFoliation {
    pub embedding: Embedding,
    pub grid: [usize; 3],
    pub derivatives: DerivativeMode,
    /// Reparametrisation `τ → τ + ε sin τ` (monotone for `|ε| < 1`).
    #[serde(default)]
    pub tau_warp: f64,
    /// Traverse `τ` backwards.
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Embedding {
    /// `(cos σ¹, sin σ¹, cos σ², sin σ², cos τ, sin τ)` in ℝ⁶.
    Clifford3Torus,
}

impl Embedding {
    pub fn ambient_dim(&self) -> usize {
        6
    }

    fn point(&self, p: [f64; 3]) -> Vec<f64> {
        match self {
            Self::Clifford3Torus => {
                vec![p[0].cos(), p[0].sin(), p[1].cos(), p[1].sin(), p[2].cos(), p[2].sin()]
            }
        }
    }

    fn partial(&self, p: [f64; 3], i: usize) -> Vec<f64> {
        match self {
            Self::Clifford3Torus => {
                let mut v = vec![0.0; 6];
                v[2 * i] = -p[i].sin();
                v[2 * i + 1] = p[i].cos();
                v
            }
        }
    }
}

/// Samples of `x`, `∂_{σ¹}x`, `∂_{σ²}x`, `∂_τ x` at one grid point.
struct Frame {
    x: Vec<f64>,
    d: [Vec<f64>; 3],
}

impl EmbeddedFoliation {
    pub fn clifford(n: usize) -> Self {
        Self { embedding: Embedding::Clifford3Torus, grid: [n; 3], derivatives: DerivativeMode::Analytic, tau_warp: 0.0, reversed: false }
    }

    pub fn with_grid(&self, grid: [usize; 3]) -> Self {
        Self { grid, ..self.clone() }
    }

    pub fn with_derivatives(&self, mode: DerivativeMode) -> Self {
        Self { derivatives: mode, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.embedding.ambient_dim()
    }

    fn validate(&self) -> Result<()> {
        if self.grid.iter().any(|&g| g < 4) {
            return Err(CoreError::NonPeriodicGrid(format!("grid {:?} needs at least 4 samples per axis", self.grid)));
        }
        if self.tau_warp.abs() >= 1.0 || !self.tau_warp.is_finite() {
            return Err(CoreError::InvalidParameter("tau warp must satisfy |eps| < 1".into()));
        }
        // the sampled coordinates must close up after one period
        for i in 0..3 {
            let mut p = [0.3, 0.7, 1.1];
            let a = self.position(p);
            p[i] += 2.0 * PI;
            let b = self.position(p);
            if a.iter().zip(&b).any(|(u, v)| (u - v).abs() > 1e-12) {
                return Err(CoreError::NonPeriodicGrid(format!("embedding is not periodic in parameter {i}")));
            }
        }
        Ok(())
    }

    fn tau_map(&self, tau: f64) -> (f64, f64) {
        let t = tau + self.tau_warp * tau.sin();
        let dt = 1.0 + self.tau_warp * tau.cos();
        if self.reversed {
            (-t, -dt)
        } else {
            (t, dt)
        }
    }

    fn position(&self, p: [f64; 3]) -> Vec<f64> {
        let (t, _) = self.tau_map(p[2]);
        self.embedding.point([p[0], p[1], t])
    }

    fn frame(&self, idx: [usize; 3]) -> Frame {
        let p: [f64; 3] = std::array::from_fn(|k| 2.0 * PI * idx[k] as f64 / self.grid[k] as f64);
        let x = self.position(p);
        let d = match self.derivatives {
            DerivativeMode::Analytic => {
                let (t, dt) = self.tau_map(p[2]);
                let q = [p[0], p[1], t];
                let mut dtau = self.embedding.partial(q, 2);
                for v in &mut dtau {
                    *v *= dt;
                }
                [self.embedding.partial(q, 0), self.embedding.partial(q, 1), dtau]
            }
            DerivativeMode::CentralDifference => std::array::from_fn(|k| {
                let h = 2.0 * PI / self.grid[k] as f64;
                let mut fwd = p;
                let mut bwd = p;
                fwd[k] += h;
                bwd[k] -= h;
                self.position(fwd).iter().zip(self.position(bwd)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
            }),
        };
        Frame { x, d }
    }

    /// `s^{μν} = ∂_1 x^μ ∂_2 x^ν − ∂_2 x^μ ∂_1 x^ν`.
    fn surface_element(f: &Frame) -> Vec<Vec<f64>> {
        let n = f.x.len();
        (0..n).map(|m| (0..n).map(|v| f.d[0][m] * f.d[1][v] - f.d[1][m] * f.d[0][v]).collect()).collect()
    }

    /// Trapezoidal sum of `g(frame)` over the grid, times the cell volume.
    /// τ-slices are summed in parallel and combined in slice order.
    fn integrate<F>(&self, g: F) -> f64
    where
        F: Fn(&Frame) -> f64 + Sync,
    {
        let [n1, n2, n3] = self.grid;
        let slices: Vec<f64> = (0..n3)
            .into_par_iter()
            .map(|k| {
                let mut acc = 0.0;
                for i in 0..n1 {
                    for j in 0..n2 {
                        acc += g(&self.frame([i, j, k]));
                    }
                }
                acc
            })
            .collect();
        let vol = (2.0 * PI).powi(3) / (n1 * n2 * n3) as f64;
        slices.iter().sum::<f64>() * vol
    }
}

/// The phase `Φ` of `W = exp(iΦ)`.
pub fn holonomy_phase(a: &AbelianConnection, sigma: &EmbeddedFoliation) -> Result<f64> {
    sigma.validate()?;
    a.validate()?;
    if a.n != sigma.dim() {
        return Err(CoreError::DimMismatch(format!("connection in {} dims, embedding in {}", a.n, sigma.dim())));
    }
    Ok(sigma.integrate(|f| {
        let s = EmbeddedFoliation::surface_element(f);
        a.contract(&f.x, &s, &f.d[2])
    }))
}

pub fn holonomy_abelian(a: &AbelianConnection, sigma: &EmbeddedFoliation) -> Result<Complex64> {
    Ok(Complex64::from_polar(1.0, holonomy_phase(a, sigma)?))
}

/// `|δ log W|` under `A_μ → A_μ + ∂_μ X`.
pub fn gauge_invariance_probe(a: &AbelianConnection, x: &GaugeParam, sigma: &EmbeddedFoliation) -> Result<f64> {
    a.validate()?;
    x.base.check(sigma.dim())?;
    for (_, p) in &x.s_linear {
        p.check(sigma.dim())?;
    }
    let shift = AbelianConnection::gradient(a.n, x);
    Ok(holonomy_phase(&shift, sigma)?.abs())
}

/// `∫_Σ A = ∫ d³σ Σ_{μ<ν<ρ} A_{μνρ}(x) det ∂(x^μ, x^ν, x^ρ)/∂(σ¹, σ², τ)`.
pub fn pullback_integral(form: &ThreeForm, sigma: &EmbeddedFoliation) -> Result<f64> {
    sigma.validate()?;
    for (_, p) in &form.components {
        p.check(sigma.dim())?;
    }
    Ok(sigma.integrate(|f| {
        form.components
            .iter()
            .map(|([a, b, c], p)| {
                let m = |r: usize, k: usize| f.d[k][r];
                let det = m(*a, 0) * (m(*b, 1) * m(*c, 2) - m(*b, 2) * m(*c, 1))
                    - m(*a, 1) * (m(*b, 0) * m(*c, 2) - m(*b, 2) * m(*c, 0))
                    + m(*a, 2) * (m(*b, 0) * m(*c, 1) - m(*b, 1) * m(*c, 0));
                p.eval(&f.x) * det
            })
            .sum()
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantProbe {
    pub ratios: Vec<f64>,
    pub c_fit: f64,
    pub max_deviation: f64,
}

/// Ratio `log W / (i ∫_Σ A)` for each special-gauge connection; the spread of
/// the ratios measures whether the constant is form-independent.
pub fn special_gauge_constant_probe(forms: &[ThreeForm], sigma: &EmbeddedFoliation) -> Result<ConstantProbe> {
    if forms.len() < 2 {
        return Err(CoreError::InvalidParameter("need at least two three-forms".into()));
    }
    let mut ratios = Vec::with_capacity(forms.len());
    for form in forms {
        let den = pullback_integral(form, sigma)?;
        if den.abs() < 1e-12 {
            return Err(CoreError::VanishingDenominator);
        }
        let phi = holonomy_phase(&AbelianConnection::special_gauge(form)?, sigma)?;
        ratios.push(phi / den);
    }
    let c_fit = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let mut max_deviation: f64 = 0.0;
    for i in 0..ratios.len() {
        for j in i + 1..ratios.len() {
            max_deviation = max_deviation.max((ratios[i] - ratios[j]).abs());
        }
    }
    Ok(ConstantProbe { ratios, c_fit, max_deviation })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub grids: Vec<usize>,
    pub phases: Vec<f64>,
    pub extrapolated: f64,
    pub errors: Vec<f64>,
    /// `errors[k] / errors[k+1]`; ≈ 4 for second-order convergence.
    pub ratios: Vec<f64>,
}

/// Phases on the grids `n, 2n, 4n, …` (`levels` of them), with a Richardson
/// extrapolation from the two finest grids assuming `O(h²)` error.
pub fn grid_convergence(a: &AbelianConnection, sigma: &EmbeddedFoliation, n: usize, levels: usize) -> Result<ConvergenceReport> {
    if levels < 3 {
        return Err(CoreError::InvalidParameter("need at least three grid levels".into()));
    }
    let grids: Vec<usize> = (0..levels).map(|k| n << k).collect();
    let phases = grids
        .iter()
        .map(|&g| holonomy_phase(a, &sigma.with_grid([g; 3])))
        .collect::<Result<Vec<_>>>()?;
    let (fine, coarse) = (phases[levels - 1], phases[levels - 2]);
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    let errors: Vec<f64> = phases[..levels - 1].iter().map(|p| (p - extrapolated).abs()).collect();
    let ratios = errors.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(ConvergenceReport { grids, phases, extrapolated, errors, ratios })
}

/// Cubic probe three-forms with non-zero pullback on the Clifford torus.
pub fn clifford_probe_forms() -> Vec<ThreeForm> {
    let m = |e: [u32; 6]| RealPoly::monomial(1.0, e.to_vec());
    vec![
        ThreeForm { n: 6, components: vec![([0, 2, 4], m([0, 1, 0, 1, 0, 1]))] },
        ThreeForm { n: 6, components: vec![([1, 3, 5], m([1, 0, 1, 0, 1, 0]))] },
        ThreeForm { n: 6, components: vec![([0, 2, 5], m([0, 1, 0, 1, 1, 0]))] },
        ThreeForm {
            n: 6,
            components: vec![
                ([0, 2, 4], m([0, 1, 0, 1, 0, 1]).scale(0.5)),
                ([1, 3, 5], m([1, 0, 1, 0, 1, 0]).add(RealPoly::monomial(2.0, vec![3, 0, 1, 0, 1, 0]))),
            ],
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe_x() -> GaugeParam {
        GaugeParam {
            base: RealPoly::monomial(1.0, vec![2, 0, 1, 0, 0, 0])
                .add(RealPoly::monomial(-0.5, vec![0, 0, 0, 0, 1, 1]))
                .add(RealPoly::monomial(3.0, vec![0, 1, 0, 0, 0, 0])),
            s_linear: Vec::new(),
        }
    }

    #[test]
    fn poly_eval_and_derivative() {
        let p = RealPoly::monomial(2.0, vec![2, 1]).add(RealPoly::constant(2, 1.0));
        assert_eq!(p.eval(&[3.0, 2.0]), 37.0);
        assert_eq!(p.derivative(0).eval(&[3.0, 2.0]), 24.0);
        assert_eq!(p.derivative(1).eval(&[3.0, 2.0]), 18.0);
    }

    #[test]
    fn zero_connection_has_trivial_holonomy() {
        let w = holonomy_abelian(&AbelianConnection::zero(6), &EmbeddedFoliation::clifford(8)).unwrap();
        assert_eq!(w, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn surface_element_of_clifford_torus() {
        let s = EmbeddedFoliation::clifford(8);
        let f = s.frame([1, 3, 2]);
        let se = EmbeddedFoliation::surface_element(&f);
        let (s1, s2) = ((2.0 * PI / 8.0).sin(), (6.0 * PI / 8.0).sin());
        assert!((se[0][2] - s1 * s2).abs() < 1e-15);
        assert!((se[2][0] + se[0][2]).abs() < 1e-15);
        assert_eq!(se[0][1], 0.0);
    }

    #[test]
    fn pure_gauge_is_invisible() {
        let s = EmbeddedFoliation::clifford(32);
        let a = AbelianConnection::zero(6);
        let constant = GaugeParam { base: RealPoly::constant(6, 4.0), s_linear: Vec::new() };
        assert_eq!(gauge_invariance_probe(&a, &constant, &s).unwrap(), 0.0);
        assert!(gauge_invariance_probe(&a, &probe_x(), &s).unwrap() < 1e-8);
        let sdep = GaugeParam { base: RealPoly::default(), s_linear: vec![((0, 2), RealPoly::monomial(1.0, vec![0, 0, 0, 0, 1, 0]))] };
        assert!(gauge_invariance_probe(&a, &sdep, &s).unwrap() < 1e-6);
    }

    #[test]
    fn pullback_oracle_values() {
        // ∫ −sin²σ¹ sin²σ² sin²τ = −π³ for x²x⁴x⁶ dx¹dx³dx⁵ (1-based names)
        let s = EmbeddedFoliation::clifford(16);
        let forms = clifford_probe_forms();
        let v = pullback_integral(&forms[0], &s).unwrap();
        assert!((v + PI.powi(3)).abs() < 1e-10);
        let v = pullback_integral(&forms[1], &s).unwrap();
        assert!((v - PI.powi(3)).abs() < 1e-10);
    }

    #[test]
    fn special_gauge_constant_is_two() {
        let s = EmbeddedFoliation::clifford(16);
        let p = special_gauge_constant_probe(&clifford_probe_forms(), &s).unwrap();
        assert!(p.max_deviation < 1e-10);
        assert!((p.c_fit - 2.0).abs() < 1e-10);
    }

    #[test]
    fn proportional_forms_agree_and_zero_pullback_is_rejected() {
        let s = EmbeddedFoliation::clifford(12);
        let f = clifford_probe_forms()[0].clone();
        let mut g = f.clone();
        g.components[0].1 = g.components[0].1.clone().scale(3.0);
        let p = special_gauge_constant_probe(&[f, g], &s).unwrap();
        assert!(p.max_deviation < 1e-12);
        let constant = ThreeForm { n: 6, components: vec![([0, 1, 2], RealPoly::constant(6, 1.0))] };
        let other = clifford_probe_forms()[0].clone();
        assert_eq!(special_gauge_constant_probe(&[constant, other], &s), Err(CoreError::VanishingDenominator));
    }

    #[test]
    fn reparametrisation_and_reversal() {
        let a = AbelianConnection::special_gauge(&clifford_probe_forms()[3]).unwrap();
        let s = EmbeddedFoliation::clifford(24);
        let w = holonomy_abelian(&a, &s).unwrap();
        let warped = EmbeddedFoliation { tau_warp: 0.3, ..s.clone() };
        assert!((holonomy_abelian(&a, &warped).unwrap() - w).norm() < 1e-8);
        let rev = EmbeddedFoliation { reversed: true, ..s };
        assert!((holonomy_abelian(&a, &rev).unwrap() - w.conj()).norm() < 1e-10);
    }

    #[test]
    fn central_differences_converge_at_second_order() {
        let a = AbelianConnection::special_gauge(&clifford_probe_forms()[0]).unwrap();
        let s = EmbeddedFoliation::clifford(8).with_derivatives(DerivativeMode::CentralDifference);
        let r = grid_convergence(&a, &s, 8, 4).unwrap();
        for ratio in &r.ratios {
            assert!((ratio - 4.0).abs() < 0.5, "{:?}", r.ratios);
        }
        let exact = holonomy_phase(&a, &EmbeddedFoliation::clifford(16)).unwrap();
        assert!((r.extrapolated - exact).abs() < 1e-3 * exact.abs());
    }

    #[test]
    fn rejects_coarse_grid() {
        let s = EmbeddedFoliation::clifford(2);
        assert!(matches!(holonomy_phase(&AbelianConnection::zero(6), &s), Err(CoreError::NonPeriodicGrid(_))));
    }
}
