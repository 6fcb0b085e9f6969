//! One module per verb group. Each function takes the merged arguments and
//! returns an [`Outcome`](crate::report::Outcome).

pub mod check;
pub mod holonomy;
pub mod jet;
pub mod lattice;

use pform_core::lattice::GaugeGroup;
use pform_core::liealg::AlgebraKind;
use pform_core::rational::{self, Rational};

use crate::error::{CliError, Result};

pub fn parse_algebra(s: &str) -> Result<AlgebraKind> {
    s.parse().map_err(|e| CliError::Config(format!("{e}")))
}

pub fn parse_group(s: &str) -> Result<GaugeGroup> {
    s.parse().map_err(|e| CliError::Config(format!("{e}")))
}

pub fn rat_value(r: &Rational) -> String {
    rational::format(r)
}
