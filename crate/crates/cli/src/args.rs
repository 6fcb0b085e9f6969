//! Command line and config files. Every verb has one parameter struct that
//! is both a clap argument group and the schema of its `--config` file;
//! flags given on the command line override keys from the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pform_core::holonomy::AbelianConnection;
use pform_gerbejet::io::{ConnectionSpec, FormSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "pform", version, about = "p-form lattice gauge theory and gerbe jet calculus checks")]
pub struct Cli {
    /// JSON file with parameters for the verb; unknown keys are rejected.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Append the report as one JSON line to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for Monte Carlo and batch sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Algebraic and simplex-equation checks.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Lattice gauge theory.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Exact jet calculus.
    #[command(subcommand)]
    Jet(JetCmd),
    /// Abelian holonomy over the Clifford 3-torus.
    Holonomy(HolonomyArgs),
}

#[derive(Debug, Subcommand)]
pub enum CheckCmd {
    /// Jacobi identity, representation relations and Casimir invariance.
    Algebra(AlgebraArgs),
    /// Classical or quantum Yang-Baxter residuals.
    Ybe(YbeArgs),
    /// Tetrahedron residual of the additive ansatz (reported, not judged).
    Tetra(TetraArgs),
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    /// Gauge invariance of actions, Wilson loops and surfaces; 2-form Bianchi identity.
    GaugeCheck(GaugeCheckArgs),
    /// Metropolis sampling of abelian 1-form or 2-form theories.
    Mc(McArgs),
}

#[derive(Debug, Subcommand)]
pub enum JetCmd {
    /// Run the exact identity suite.
    Verify(VerifyArgs),
    /// Curvatures of a connection, flatness reduction, closure defect, special gauge.
    Curvature(CurvatureArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgebraArgs {
    /// u1, sl2, su2 or glN.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct YbeArgs {
    /// cybe (trigonometric family) or qybe (constant R and cube holonomy).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equation: Option<String>,
    /// Algebra whose defining representation builds r(u, v).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rep: Option<String>,
    /// Spectral parameters, three per point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    /// Additional random spectral triples in [-10, 10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// For qybe: swap, identity or random.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
    /// For qybe: dimension of V.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TetraArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rep: Option<String>,
    /// Spectral parameters, four per point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    /// Additional random spectral points in [-10, 10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaugeCheckArgs {
    /// 1, 2 or bianchi; all three when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    /// Link group for the 1-form check: u1, su2 or glN.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    /// Dimension of V for the 2-form check.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Number of random (field, gauge) pairs.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McArgs {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    /// 1 (links, plaquette action) or 2 (plaquette angles, cube action).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<u8>,
    /// Only u1 is sampled.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burnin: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Write observable and action histories to this JSON file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Degree cap of the jet polynomials.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    /// trivial, vector or graded.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    /// Restrict to these identities.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identities: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurvatureArgs {
    /// connection, reduction, closure or special.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    /// Random probe sections (connection mode) or operator draws (reduction mode).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    /// Reduction operands: random or trig.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Connection (config file only); random when omitted.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionSpec>,
    /// Form of rank p + 1 for special mode (config file only); random when omitted.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<FormSpec>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolonomyArgs {
    /// Embedded surface; only clifford3torus.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding: Option<String>,
    /// Quadrature grid, one size or three comma-separated sizes.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
    /// Base grid of the convergence study; four levels, each doubling the last.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_grid: Option<usize>,
    /// Abelian connection (config file only); the special gauge of a probe
    /// three-form when omitted.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connection: Option<AbelianConnection>,
}

/// Overlay the flags that were given on top of the config file.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<Value>) -> Result<T, CliError> {
    let mut base = match config {
        None => Value::Object(Default::default()),
        Some(Value::Object(m)) => Value::Object(m),
        Some(_) => return Err(CliError::Config("the config file must hold a JSON object".into())),
    };
    let overlay = serde_json::to_value(flags).map_err(|e| CliError::Config(e.to_string()))?;
    if let (Value::Object(b), Value::Object(o)) = (&mut base, overlay) {
        b.extend(o);
    }
    serde_json::from_value(base).map_err(|e| CliError::Config(format!("config: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flags_override_file() {
        let flags = McArgs { beta: Some(2.0), ..Default::default() };
        let m = merge(&flags, Some(json!({"beta": 1.0, "dims": [4, 4]}))).unwrap();
        assert_eq!(m.beta, Some(2.0));
        assert_eq!(m.dims, Some(vec![4, 4]));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = merge(&McArgs::default(), Some(json!({"betta": 1.0}))).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(merge(&McArgs::default(), Some(json!([1]))).is_err());
    }

    #[test]
    fn parses_lists() {
        let cli = Cli::try_parse_from(["pform", "check", "ybe", "--u", "-0.3,1.7,2.9"]).unwrap();
        match cli.command {
            Command::Check(CheckCmd::Ybe(a)) => assert_eq!(a.u, Some(vec![-0.3, 1.7, 2.9])),
            other => panic!("{other:?}"),
        }
    }
}
