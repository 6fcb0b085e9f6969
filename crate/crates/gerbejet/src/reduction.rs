//! Flatness of a constant special-gauge connection reduces to the classical
//! simplex equations. Dense floating-point operators throughout.
//!
//! For `p = 1` (three directions) the bracket term of the curvature at
//! `s* = (1,1,1)` is `−2` times the CYBE combination; for `p = 2` (four
//! directions, every `s^{μν}* = 1`) it is `4` times the tetrahedron sum.

use num_complex::Complex64;
use pform_core::multitensor::{frobenius_distance, SitedOperator};
use pform_core::simplex::{cybe_combination, TetraFamily};
use serde::Serialize;

use crate::error::{JetError, Result};
use crate::special::perm_sign;

#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    pub p: usize,
    pub s_star: Vec<f64>,
    /// Frobenius norm of the bracket combination.
    pub residual: f64,
    /// Frobenius norm of the simplex combination.
    pub simplex_residual: f64,
    pub factor: f64,
    /// `‖combination − factor·simplex‖`, only at the all-ones point.
    pub cross_check: Option<f64>,
}

fn increasing(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// `components` are `A_I` for increasing `I` of length `p + 1` over `p + 2`
/// directions, in lexicographic order (`A12, A13, A23` or `A123, A124,
/// A134, A234`), all on one slot space. `s_star` holds one value per
/// increasing s-index.
pub fn homogeneous_flatness_reduction(
    p: usize,
    components: &[SitedOperator],
    s_star: &[f64],
) -> Result<(SitedOperator, ReductionReport)> {
    if !(p == 1 || p == 2) {
        return Err(JetError::Unsupported(format!("reduction for p = {p}")));
    }
    let n = p + 2;
    let tuples = increasing(n, p + 1);
    let s_tuples = increasing(n, p);
    if components.len() != tuples.len() {
        return Err(JetError::Incompatible(format!("expected {} components", tuples.len())));
    }
    if s_star.len() != s_tuples.len() {
        return Err(JetError::Incompatible(format!("expected {} values of s*", s_tuples.len())));
    }
    let dims = components[0].slot_dims().to_vec();
    let zero = SitedOperator::zero(dims.clone());
    let sorted_pos = |idx: &[usize], list: &[Vec<usize>]| -> Option<(usize, f64)> {
        let sign = perm_sign(idx)?;
        let mut s = idx.to_vec();
        s.sort_unstable();
        Some((list.iter().position(|t| *t == s)?, sign as f64))
    };
    let a = |idx: &[usize]| -> SitedOperator {
        match sorted_pos(idx, &tuples) {
            None => zero.clone(),
            Some((k, sign)) => components[k].scale(Complex64::new(sign, 0.0)),
        }
    };
    // B_ρ = Σ_{S ordered} s*^S A_{ρS}
    let mut b = Vec::with_capacity(n);
    for rho in 0..n {
        let mut acc = zero.clone();
        let all: Vec<Vec<usize>> = if p == 1 {
            (0..n).map(|i| vec![i]).collect()
        } else {
            (0..n).flat_map(|i| (0..n).map(move |j| vec![i, j])).collect()
        };
        for s in all {
            let Some((k, sign)) = sorted_pos(&s, &s_tuples) else { continue };
            let mut idx = vec![rho];
            idx.extend(&s);
            let coef = sign * s_star[k];
            if coef != 0.0 && perm_sign(&idx).is_some() {
                acc = acc.add(&a(&idx).scale(Complex64::new(coef, 0.0)))?;
            }
        }
        b.push(acc);
    }
    let r = n;
    let mut comb = zero.clone();
    for k in 0..r {
        let rest: Vec<usize> = (0..r).filter(|&j| j != k).collect();
        let sign = if (r - 1 - k) % 2 == 0 { 1.0 } else { -1.0 };
        comb = comb.add(&a(&rest).commutator(&b[k])?.scale(Complex64::new(sign, 0.0)))?;
    }
    let (simplex, factor) = if p == 1 {
        (cybe_combination(&components[0], &components[1], &components[2])?, -2.0)
    } else {
        let fam = TetraFamily::new([
            components[0].clone(),
            components[1].clone(),
            components[2].clone(),
            components[3].clone(),
        ])?;
        (fam.combination()?, 4.0)
    };
    let ones = s_star.iter().all(|&v| v == 1.0);
    let cross_check = if ones {
        Some(frobenius_distance(&comb, &simplex.scale(Complex64::new(factor, 0.0)))?)
    } else {
        None
    };
    let report = ReductionReport {
        p,
        s_star: s_star.to_vec(),
        residual: comb.frobenius_norm(),
        simplex_residual: simplex.frobenius_norm(),
        factor,
        cross_check,
    };
    Ok((comb, report))
}
