//! Power-law classification of a pair of series.
//!
//! The cumulative Manhattan distance between two equal-length series is a
//! nondecreasing function of the series length. Fitting it as a power law
//! on log-log axes gives a slope `alpha`; the correlation strength class
//! is `gamma = alpha - 1` (negative: converging series, zero: constant
//! offset, one: linear divergence, above one: strong divergence). The
//! two-sided p-value `beta` of the slope measures how stable the power
//! law, and hence the class, is over the window: smaller is more
//! stable.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pairs::{PairCell, PairMatrix};
use crate::panel::SeriesPanel;
use crate::stats::t_two_sided_p;

/// Running sum M(j) of |a_i - b_i| for j = 1..N. Nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeMd(Vec<f64>);

impl CumulativeMd {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total Manhattan distance, M(N).
    pub fn total(&self) -> f64 {
        *self.0.last().expect("nonempty by construction")
    }
}

/// How many of the largest-j log-log points enter the fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tail {
    /// Use every usable point.
    All,
    /// Use the `n` largest j (n >= 3).
    Points(usize),
}

/// Fit configuration.
///
/// The tail length is explicit configuration because different window
/// lengths call for different tails; the value actually used is recorded
/// in every [`FitResult`] so outputs are self-describing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlcsConfig {
    pub tail: Tail,
    /// Cumulative distances at or below this threshold are treated as
    /// zero and excluded before taking logs.
    pub min_md: f64,
}

impl Default for PlcsConfig {
    fn default() -> Self {
        Self {
            tail: Tail::Points(10),
            min_md: 1e-12,
        }
    }
}

/// Result of one log-log fit.
///
/// `intercept` is in natural-log units; slope and p-value are invariant
/// to the log base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    /// Fitted log-log slope.
    pub alpha: f64,
    /// Correlation strength class, always `alpha - 1`.
    pub gamma: f64,
    /// Two-sided p-value of the slope against zero; 0 for exact fits.
    pub beta: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Points actually used in the fit.
    pub tail_points: usize,
}

/// M(j) = sum_{i<=j} |a_i - b_i|, exact, no rescaling.
pub fn cumulative_md(a: &[f64], b: &[f64]) -> Result<CumulativeMd> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Contract("series must be nonempty".into()));
    }
    let mut sum = 0.0;
    let values = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            sum += (x - y).abs();
            sum
        })
        .collect();
    Ok(CumulativeMd(values))
}

/// The (ln j, ln M(j)) points entering the fit: the tail of the largest j
/// whose cumulative distance clears `min_md`.
pub fn loglog_points(m: &CumulativeMd, cfg: &PlcsConfig) -> Result<Vec<(f64, f64)>> {
    if let Tail::Points(n) = cfg.tail {
        if n < 3 {
            return Err(Error::Contract(format!("tail of {n} points, need at least 3")));
        }
    }
    let usable: Vec<(f64, f64)> = m
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > cfg.min_md)
        .map(|(idx, &v)| (((idx + 1) as f64).ln(), v.ln()))
        .collect();
    let keep = match cfg.tail {
        Tail::All => usable.len(),
        Tail::Points(n) => n.min(usable.len()),
    };
    if keep < 3 {
        return Err(Error::DegenerateSeries);
    }
    Ok(usable[usable.len() - keep..].to_vec())
}

/// Ordinary least squares on the log-log points.
///
/// `beta` is the two-sided p-value of t = alpha / SE(alpha) with n-2
/// degrees of freedom. A residual sum of squares at the floating-point
/// noise floor counts as an exact fit: beta = 0, r_squared = 1.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Contract(format!("{n} points, need at least 3")));
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let mut s_xx = 0.0;
    let mut s_xy = 0.0;
    for &(x, y) in points {
        s_xx += (x - mean_x) * (x - mean_x);
        s_xy += (x - mean_x) * (y - mean_y);
    }
    if s_xx == 0.0 {
        return Err(Error::Contract("all x values identical".into()));
    }
    let alpha = s_xy / s_xx;
    let intercept = mean_y - alpha * mean_x;

    let mut sse = 0.0;
    let mut sst = 0.0;
    for &(x, y) in points {
        let r = y - (alpha * x + intercept);
        sse += r * r;
        sst += (y - mean_y) * (y - mean_y);
    }

    // Residuals indistinguishable from rounding noise mean the points lie
    // on an exact power law; an honest t statistic would be infinite.
    let y_scale = points.iter().fold(1.0_f64, |m, p| m.max(p.1.abs()));
    let noise_floor = nf * (1e-13 * y_scale).powi(2);
    let (beta, r_squared) = if sse <= noise_floor {
        (0.0, 1.0)
    } else {
        let se = (sse / (nf - 2.0) / s_xx).sqrt();
        (t_two_sided_p(alpha / se, n - 2), 1.0 - sse / sst)
    };

    Ok(FitResult {
        alpha,
        gamma: alpha - 1.0,
        beta,
        intercept,
        r_squared,
        tail_points: n,
    })
}

/// The full classification of one pair: cumulative distance, log-log
/// tail, power-law fit.
pub fn plcs_pair(a: &[f64], b: &[f64], cfg: &PlcsConfig) -> Result<FitResult> {
    fit_power_law(&loglog_points(&cumulative_md(a, b)?, cfg)?)
}

/// Classify every unordered pair of the panel. Degenerate pairs (zero
/// cumulative distance, e.g. duplicated columns) are marked, not dropped.
pub fn plcs_matrix(panel: &SeriesPanel, cfg: &PlcsConfig) -> Result<PairMatrix<FitResult>> {
    PairMatrix::build(panel.entities().to_vec(), |i, j| {
        match plcs_pair(panel.series(i), panel.series(j), cfg) {
            Ok(fit) => Ok(PairCell::Value(fit)),
            Err(Error::DegenerateSeries) => Ok(PairCell::Degenerate),
            Err(e) => Err(e),
        }
    })
}
