//! Synthetic pairs with known correlation classes, plus the noise
//! robustness experiment comparing the power-law class with the
//! ultrametric distance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::error::{Error, Result};
use crate::plcs::{plcs_pair, FitResult, PlcsConfig};
use crate::ud::{ud, UdVariant};

/// The gamma targets exercised by the recovery fixture; the endpoints are
/// the most negative and the strongest observed classes.
pub const RECOVERY_TARGETS: [f64; 7] = [-0.76, -0.5, 0.0, 0.5, 1.0, 2.0, 4.8];

/// What kind of pair to generate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    /// Gap between the series grows so the cumulative distance follows
    /// `scale * j^(gamma_target + 1)` exactly: the increments are the
    /// telescoped differences of that power law. (A plain `i^gamma` gap
    /// leaves a constant in the partial sum that biases short tail fits
    /// well beyond recovery tolerance for strongly negative targets.)
    PowerLawGap { gamma_target: f64 },
    /// b = a + scale; the one case where class, stability and distance
    /// all agree exactly.
    LinearOffset,
    /// b = slope * a + offset.
    AffineLinked { slope: f64, offset: f64 },
    /// b = a + scale + Gaussian(0, noise_sigma), seeded.
    NoisyLinear,
}

/// Full description of a synthetic pair; identical specs produce
/// identical series down to the last bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    /// Scale c of the gap; must be positive.
    pub scale: f64,
    /// Series length N; at least 4.
    pub len: usize,
    /// Gaussian noise level for [`SynthKind::NoisyLinear`].
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.len < 4 {
            return Err(Error::Contract(format!(
                "series length {} below minimum 4",
                self.len
            )));
        }
        if self.scale <= 0.0 || self.scale.is_nan() {
            return Err(Error::Contract(format!("scale {} not positive", self.scale)));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::Contract(format!(
                "noise sigma {} negative",
                self.noise_sigma
            )));
        }
        if let SynthKind::PowerLawGap { gamma_target } = self.kind {
            if gamma_target <= -1.0 {
                return Err(Error::Contract(format!(
                    "gamma target {gamma_target} unsupported: at or below -1 the cumulative distance converges"
                )));
            }
        }
        Ok(())
    }
}

/// Derive a per-trial seed from a base seed (splitmix-style mix), so
/// trials are independent and may run concurrently.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed
        .wrapping_add((trial.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generate the pair described by `spec`. The base series is `a_i = i`
/// (smooth and positive); only the gap drives the cumulative distance,
/// so the base is immaterial to the classification.
pub fn generate_pair(spec: &SynthSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    spec.validate()?;
    let n = spec.len;
    let base: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let b = match spec.kind {
        SynthKind::PowerLawGap { gamma_target } => {
            let p = gamma_target + 1.0;
            base.iter()
                .zip(1..=n)
                .map(|(a, i)| {
                    let gap = spec.scale * ((i as f64).powf(p) - ((i - 1) as f64).powf(p));
                    a + gap
                })
                .collect()
        }
        SynthKind::LinearOffset => base.iter().map(|a| a + spec.scale).collect(),
        SynthKind::AffineLinked { slope, offset } => {
            base.iter().map(|a| slope * a + offset).collect()
        }
        SynthKind::NoisyLinear => {
            if spec.noise_sigma == 0.0 {
                base.iter().map(|a| a + spec.scale).collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                let normal = Normal::new(0.0, spec.noise_sigma)
                    .map_err(|e| Error::Contract(e.to_string()))?;
                base.iter()
                    .map(|a| a + spec.scale + rng.sample(normal))
                    .collect()
            }
        }
    };
    Ok((base, b))
}

/// One row of the robustness report: trial means at a given noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessRow {
    pub sigma: f64,
    pub mean_gamma: f64,
    pub mean_abs_gamma: f64,
    pub mean_ud: f64,
}

/// Result of [`robustness_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub trials: usize,
    pub rows: Vec<RobustnessRow>,
}

/// For noisy linear pairs, tabulate how the power-law class and the
/// ultrametric distance respond as noise grows. Fixed seeds make the
/// table reproducible bit for bit.
///
/// The class here is fitted over every usable point, not a short tail:
/// the question is whether the global trend survives the noise, and a
/// narrow tail fit answers a different question (its slope estimator is
/// dominated by local fluctuations).
pub fn robustness_experiment(
    sigmas: &[f64],
    trials: usize,
    base: &SynthSpec,
) -> Result<RobustnessReport> {
    assert!(trials >= 10, "need at least 10 trials");
    assert!(
        sigmas.windows(2).all(|w| w[0] < w[1]) && sigmas.first().is_some_and(|&s| s >= 0.0),
        "sigmas must be nonnegative and increasing"
    );
    let cfg = PlcsConfig {
        tail: crate::plcs::Tail::All,
        ..PlcsConfig::default()
    };
    let mut rows = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let mut sum_gamma = 0.0;
        let mut sum_abs = 0.0;
        let mut sum_ud = 0.0;
        for trial in 0..trials {
            let spec = SynthSpec {
                kind: SynthKind::NoisyLinear,
                noise_sigma: sigma,
                seed: trial_seed(base.seed, trial as u64),
                ..*base
            };
            let (a, b) = generate_pair(&spec)?;
            let fit = plcs_pair(&a, &b, &cfg)?;
            let dist = ud(&a, &b, UdVariant::Am)?;
            sum_gamma += fit.gamma;
            sum_abs += fit.gamma.abs();
            sum_ud += dist;
        }
        let t = trials as f64;
        rows.push(RobustnessRow {
            sigma,
            mean_gamma: sum_gamma / t,
            mean_abs_gamma: sum_abs / t,
            mean_ud: sum_ud / t,
        });
    }
    Ok(RobustnessReport { trials, rows })
}

/// Classify a generated pair for every target: the recovery fixture
/// backing both the test suite and the CLI export.
pub fn gamma_recovery(
    targets: &[f64],
    len: usize,
    cfg: &PlcsConfig,
) -> Result<Vec<(f64, FitResult)>> {
    targets
        .iter()
        .map(|&t| {
            let spec = SynthSpec {
                kind: SynthKind::PowerLawGap { gamma_target: t },
                scale: 1.0,
                len,
                noise_sigma: 0.0,
                seed: 0,
            };
            let (a, b) = generate_pair(&spec)?;
            Ok((t, plcs_pair(&a, &b, cfg)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(kind: SynthKind) -> SynthSpec {
        SynthSpec {
            kind,
            scale: 1.0,
            len: 200,
            noise_sigma: 0.0,
            seed: 42,
        }
    }

    #[test]
    fn linear_offset_agreement_chain() {
        // The unit-offset pair keeps every quantity exact: class zero,
        // maximal stability and zero distance simultaneously.
        let (a, b) = generate_pair(&spec(SynthKind::LinearOffset)).unwrap();
        let fit = plcs_pair(&a, &b, &PlcsConfig::default()).unwrap();
        assert_eq!(fit.gamma, 0.0);
        assert_eq!(fit.beta, 0.0);
        assert_eq!(ud(&a, &b, UdVariant::Am).unwrap(), 0.0);
    }

    #[test]
    fn linear_offset_any_scale() {
        let (a, b) = generate_pair(&SynthSpec {
            scale: 5.0,
            ..spec(SynthKind::LinearOffset)
        })
        .unwrap();
        let fit = plcs_pair(&a, &b, &PlcsConfig::default()).unwrap();
        assert_relative_eq!(fit.gamma, 0.0, epsilon = 1e-9);
        assert_eq!(fit.beta, 0.0);
    }

    #[test]
    fn power_law_gap_recovers_targets() {
        let table = gamma_recovery(&RECOVERY_TARGETS, 200, &PlcsConfig::default()).unwrap();
        for (target, fit) in table {
            assert!(
                (fit.gamma - target).abs() <= 0.05,
                "target {target}: got {}",
                fit.gamma
            );
        }
    }

    #[test]
    fn strongest_divergence_class() {
        let (a, b) = generate_pair(&spec(SynthKind::PowerLawGap { gamma_target: 4.8 })).unwrap();
        let fit = plcs_pair(&a, &b, &PlcsConfig::default()).unwrap();
        assert!((fit.gamma - 4.8).abs() <= 0.05);
    }

    #[test]
    fn gamma_at_or_below_minus_one_unsupported() {
        assert!(generate_pair(&spec(SynthKind::PowerLawGap { gamma_target: -1.0 })).is_err());
        assert!(generate_pair(&spec(SynthKind::PowerLawGap { gamma_target: -1.5 })).is_err());
    }

    #[test]
    fn identical_specs_reproduce_bitwise() {
        let s = SynthSpec {
            noise_sigma: 3.5,
            ..spec(SynthKind::NoisyLinear)
        };
        let (a1, b1) = generate_pair(&s).unwrap();
        let (a2, b2) = generate_pair(&s).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
    }

    #[test]
    fn zero_sigma_equals_linear_offset() {
        let noisy = generate_pair(&spec(SynthKind::NoisyLinear)).unwrap();
        let offset = generate_pair(&spec(SynthKind::LinearOffset)).unwrap();
        assert_eq!(noisy, offset);
    }

    #[test]
    fn base_is_immaterial_to_the_class() {
        let (a, b) = generate_pair(&spec(SynthKind::PowerLawGap { gamma_target: 0.5 })).unwrap();
        let cfg = PlcsConfig::default();
        let fit = plcs_pair(&a, &b, &cfg).unwrap();
        // transplant the same gap onto a different smooth base
        let a2: Vec<f64> = (1..=a.len()).map(|i| (i * i) as f64 / 3.0 + 7.0).collect();
        let b2: Vec<f64> = a2
            .iter()
            .zip(a.iter().zip(&b))
            .map(|(x, (a0, b0))| x + (b0 - a0))
            .collect();
        let fit2 = plcs_pair(&a2, &b2, &cfg).unwrap();
        assert_relative_eq!(fit.gamma, fit2.gamma, epsilon = 1e-9);
    }

    #[test]
    fn robustness_trend() {
        // scale 1 keeps the noiseless trial exact in f64
        let base = spec(SynthKind::NoisyLinear);
        let report = robustness_experiment(&[0.0, 2.0, 5.0, 10.0], 10, &base).unwrap();
        assert_eq!(report.rows.len(), 4);
        // noiseless row agrees exactly
        assert_eq!(report.rows[0].mean_gamma, 0.0);
        assert_eq!(report.rows[0].mean_ud, 0.0);
        // distance means strictly increase with noise
        for w in report.rows.windows(2) {
            assert!(w[1].mean_ud > w[0].mean_ud);
        }
    }

    #[test]
    fn trial_seeds_differ() {
        let s0 = trial_seed(42, 0);
        let s1 = trial_seed(42, 1);
        assert_ne!(s0, s1);
        assert_eq!(s0, trial_seed(42, 0));
    }
}
