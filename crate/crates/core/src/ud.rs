//! Pearson correlation over a window and its ultrametric distance forms,
//! the linear-correlation baseline the power-law classes are compared
//! against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairs::{PairCell, PairMatrix};
use crate::panel::SeriesPanel;

/// The two normalizations in use: `Ms` maps into (0, 2), `Am` into
/// (0, 1). Zero means linearly correlated; for `Am`, sqrt(2)/2 marks the
/// absence of linear correlation and 1 anticorrelation. `Am` is the
/// default reported by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UdVariant {
    Ms,
    Am,
}

impl UdVariant {
    pub fn label(&self) -> &'static str {
        match self {
            UdVariant::Ms => "ms",
            UdVariant::Am => "am",
        }
    }
}

/// Product-moment correlation over the window, clamped to [-1, 1].
///
/// Population (1/N) moments are used; numerator and denominator share the
/// normalization, so the coefficient is identical to the sample-moment
/// form. Identical inputs short-circuit to exactly 1.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::Contract(format!(
            "need at least 2 observations, got {}",
            a.len()
        )));
    }
    let constant = |s: &[f64]| s.iter().all(|&v| v == s[0]);
    if constant(a) {
        return Err(Error::ZeroVariance { which: "first" });
    }
    if constant(b) {
        return Err(Error::ZeroVariance { which: "second" });
    }
    if a == b {
        return Ok(1.0);
    }

    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    Ok((cov / (var_a * var_b).sqrt()).clamp(-1.0, 1.0))
}

/// Map a correlation coefficient to an ultrametric distance.
///
/// A radicand pushed below zero by no more than 1e-12 of rounding is
/// clamped to zero; anything more negative signals a broken coefficient
/// and is a contract violation.
pub fn ud_from_pearson(p: f64, variant: UdVariant) -> Result<f64> {
    let radicand = match variant {
        UdVariant::Ms => 2.0 * (1.0 - p),
        UdVariant::Am => (1.0 - p) / 2.0,
    };
    if radicand < -1e-12 {
        return Err(Error::Contract(format!(
            "ultrametric radicand {radicand} below zero beyond rounding"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Ultrametric distance between two series.
pub fn ud(a: &[f64], b: &[f64], variant: UdVariant) -> Result<f64> {
    ud_from_pearson(pearson(a, b)?, variant)
}

/// Distance for every unordered pair of the panel; zero-variance cells
/// are marked degenerate.
pub fn ud_matrix(panel: &SeriesPanel, variant: UdVariant) -> Result<PairMatrix<f64>> {
    PairMatrix::build(panel.entities().to_vec(), |i, j| {
        match ud(panel.series(i), panel.series(j), variant) {
            Ok(v) => Ok(PairCell::Value(v)),
            Err(Error::ZeroVariance { .. }) => Ok(PairCell::Degenerate),
            Err(e) => Err(e),
        }
    })
}
