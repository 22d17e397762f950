//! Stochastic channel models: Rayleigh block fading, reciprocal two-way
//! probing, and log-distance RSS with shadowing.
//!
//! Conventions used throughout the crate:
//!
//! ```text
//! h ~ CN(0, variance)                   block-fading coefficient
//! z_a = probe_b * h + n_a               uplink observation at Alice
//! z_b = probe_a * h + n_b               downlink observation at Bob
//! rss(d) = tx_power_db - 10 * exponent * log10(d) + N(0, shadowing_std_db^2)
//! ```
//!
//! The channel is reciprocal within a coherence block (both observations share
//! one `h`); the additive noise terms are independent.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Rayleigh block-fading model: `h ~ CN(0, variance)` per coherence block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingConfig {
    variance: f64,
}

impl FadingConfig {
    /// # Errors
    /// Rejects a variance that is not a positive finite number.
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::invalid(
                "variance",
                format!("must be positive and finite, got {variance}"),
            ));
        }
        Ok(FadingConfig { variance })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

/// One reciprocal probing exchange: the shared coefficient and what each end saw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    /// Fading coefficient of the block, common to both directions.
    pub h: Complex64,
    /// Alice's observation of Bob's probe.
    pub z_a: Complex64,
    /// Bob's observation of Alice's probe.
    pub z_b: Complex64,
    /// Per-observation complex noise variance used for this draw.
    pub noise_var: f64,
}

/// Independent fading coefficients for `count` coherence blocks.
///
/// # Panics
/// Panics if `count` is zero (contract violation, not a runtime condition).
pub fn sample_rayleigh(rng: &mut Rng, cfg: &FadingConfig, count: usize) -> Vec<Complex64> {
    assert!(count >= 1, "sample_rayleigh requires count >= 1");
    (0..count)
        .map(|_| rng.complex_gaussian(cfg.variance))
        .collect()
}

/// One two-way probing exchange over a shared coherence block.
///
/// Alice transmits `probe_a` (received by Bob), Bob transmits `probe_b`
/// (received by Alice); both directions see the same `h`, each receiver adds
/// its own `CN(0, noise_var)` term.
///
/// # Panics
/// Panics if `noise_var` is negative or non-finite.
pub fn probe_pair(
    rng: &mut Rng,
    cfg: &FadingConfig,
    noise_var: f64,
    probe_a: Complex64,
    probe_b: Complex64,
) -> ChannelDraw {
    assert!(
        noise_var.is_finite() && noise_var >= 0.0,
        "noise_var must be finite and non-negative"
    );
    let h = rng.complex_gaussian(cfg.variance);
    let n_a = rng.complex_gaussian(noise_var);
    let n_b = rng.complex_gaussian(noise_var);
    ChannelDraw {
        h,
        z_a: probe_b * h + n_a,
        z_b: probe_a * h + n_b,
        noise_var,
    }
}

/// Log-distance path loss with Gaussian shadowing (decibel domain).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    exponent: f64,
    shadowing_std_db: f64,
}

impl PathLossModel {
    /// Typical indoor/outdoor exponents lie in `[1.5, 6]`; values outside that
    /// range are rejected as configuration mistakes.
    ///
    /// # Errors
    /// Rejects a non-finite or out-of-range exponent and a negative or
    /// non-finite shadowing deviation.
    pub fn new(exponent: f64, shadowing_std_db: f64) -> Result<Self> {
        if !(exponent.is_finite() && (1.5..=6.0).contains(&exponent)) {
            return Err(Error::invalid(
                "exponent",
                format!("path-loss exponent must lie in [1.5, 6], got {exponent}"),
            ));
        }
        if !(shadowing_std_db.is_finite() && shadowing_std_db >= 0.0) {
            return Err(Error::invalid(
                "shadowing_std_db",
                format!("must be non-negative and finite, got {shadowing_std_db}"),
            ));
        }
        Ok(PathLossModel {
            exponent,
            shadowing_std_db,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn shadowing_std_db(&self) -> f64 {
        self.shadowing_std_db
    }
}

/// One received-signal-strength measurement, tagged with the model parameters
/// it was taken under so a verifier can replay the fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RssSample {
    /// Where the measurement was taken.
    pub position: [f64; 2],
    /// Received signal strength in dB.
    pub rss_db: f64,
    /// Path-loss exponent in force when the sample was recorded.
    pub pathloss_exponent: f64,
    /// Shadowing standard deviation in force when the sample was recorded.
    pub shadowing_std_db: f64,
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Received signal strength in dB at `rx_pos` for a transmitter at `tx_pos`.
///
/// # Errors
/// Returns [`Error::DegenerateGeometry`] when the positions coincide.
pub fn rss_at(
    rng: &mut Rng,
    tx_pos: [f64; 2],
    rx_pos: [f64; 2],
    tx_power_db: f64,
    model: &PathLossModel,
) -> Result<f64> {
    let d = distance(tx_pos, rx_pos);
    if d <= 0.0 {
        return Err(Error::DegenerateGeometry);
    }
    let shadow = rng.normal(model.shadowing_std_db);
    Ok(tx_power_db - 10.0 * model.exponent * d.log10() + shadow)
}

/// [`rss_at`] packaged as an [`RssSample`] recorded at `rx_pos`.
///
/// # Errors
/// Same conditions as [`rss_at`].
pub fn rss_sample(
    rng: &mut Rng,
    tx_pos: [f64; 2],
    rx_pos: [f64; 2],
    tx_power_db: f64,
    model: &PathLossModel,
) -> Result<RssSample> {
    let rss_db = rss_at(rng, tx_pos, rx_pos, tx_power_db, model)?;
    Ok(RssSample {
        position: rx_pos,
        rss_db,
        pathloss_exponent: model.exponent,
        shadowing_std_db: model.shadowing_std_db,
    })
}
