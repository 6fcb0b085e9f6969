use pform_core::holonomy::{
    clifford_probe_forms, gauge_invariance_probe, grid_convergence, holonomy_abelian, holonomy_phase,
    special_gauge_constant_probe, AbelianConnection, DerivativeMode, EmbeddedFoliation, GaugeParam, RealPoly,
};
use serde_json::json;

use crate::args::HolonomyArgs;
use crate::error::{CliError, Result};
use crate::report::{Check, Outcome};

pub const GAUGE_TOL: f64 = 1e-8;
pub const CONSTANT_TOL: f64 = 1e-6;
/// Allowed distance of successive error ratios from 4.
pub const RATIO_TOL: f64 = 0.5;
pub const CONVERGENCE_LEVELS: usize = 4;

/// `x₁²x₃x₅ − x₅x₆/2 + 3x₂`, with no `s` dependence.
pub fn probe_gauge() -> GaugeParam {
    GaugeParam {
        base: RealPoly::monomial(1.0, vec![2, 0, 1, 0, 1, 0])
            .add(RealPoly::monomial(-0.5, vec![0, 0, 0, 0, 1, 1]))
            .add(RealPoly::monomial(3.0, vec![0, 1, 0, 0, 0, 0])),
        s_linear: Vec::new(),
    }
}

/// `x₅ s¹³`.
pub fn probe_gauge_s_linear() -> GaugeParam {
    GaugeParam { base: RealPoly::default(), s_linear: vec![((0, 2), RealPoly::monomial(1.0, vec![0, 0, 0, 0, 1, 0]))] }
}

pub fn holonomy(a: &HolonomyArgs) -> Result<Outcome> {
    match a.embedding.as_deref().unwrap_or("clifford3torus") {
        "clifford3torus" => {}
        other => return Err(CliError::Config(format!("unknown embedding {other:?}; only clifford3torus is available"))),
    }
    let grid: [usize; 3] = match a.grid.as_deref() {
        None => [64; 3],
        Some(&[n]) => [n; 3],
        Some(&[a, b, c]) => [a, b, c],
        Some(g) => return Err(CliError::Config(format!("grid needs one or three sizes, got {g:?}"))),
    };
    let base = a.convergence_grid.unwrap_or(8);
    let conn = match &a.connection {
        Some(c) => c.clone(),
        None => AbelianConnection::special_gauge(&clifford_probe_forms()[0])?,
    };
    let sigma = EmbeddedFoliation::clifford(grid[0]).with_grid(grid);
    let w = holonomy_abelian(&conn, &sigma)?;
    let phase = holonomy_phase(&conn, &sigma)?;
    let half = grid.map(|g| (g / 2).max(4));
    let error_estimate = (phase - holonomy_phase(&conn, &sigma.with_grid(half))?).abs();

    let gauge = gauge_invariance_probe(&conn, &probe_gauge(), &sigma)?;
    let gauge_s = gauge_invariance_probe(&conn, &probe_gauge_s_linear(), &sigma)?;
    let forms = clifford_probe_forms();
    let constant = special_gauge_constant_probe(&forms, &sigma)?;
    let fd = sigma.with_derivatives(DerivativeMode::CentralDifference);
    let conv = grid_convergence(&conn, &fd, base, CONVERGENCE_LEVELS)?;
    let worst_ratio = conv.ratios.iter().map(|r| (r - 4.0).abs()).fold(0.0, f64::max);

    let checks = vec![
        Check::below("gauge-invariance", gauge, GAUGE_TOL),
        Check::diagnostic("gauge-invariance-s-linear", gauge_s),
        Check::holds("constant-probe-forms>=3", forms.len() >= 3),
        Check::below("special-gauge-constant-spread", constant.max_deviation, CONSTANT_TOL),
        Check::below("second-order-ratio-deviation", worst_ratio, RATIO_TOL),
    ];
    let results = json!({
        "embedding": "clifford3torus",
        "grid": grid,
        "W": { "re": w.re, "im": w.im },
        "phase": phase,
        "error_estimate": error_estimate,
        "probes": {
            "gauge_invariance": gauge,
            "gauge_invariance_s_linear": gauge_s,
            "constant": constant,
        },
        "convergence": conv,
    });
    Ok(Outcome { results, checks })
}
