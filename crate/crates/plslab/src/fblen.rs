//! Finite-blocklength coding limits: normal approximations for point-to-point
//! codes and for wiretap codes with an explicit leakage budget.
//!
//! For a channel with capacity `C` and dispersion `V` (bits and bits², per
//! channel use):
//!
//! ```text
//! log M*(n, ε)      = n C  - sqrt(n V) Q⁻¹(ε)
//! R*(n, ε, δ)       = C_S  - sqrt(V / n) Q⁻¹(δ / (1 - ε))      (wiretap)
//! ```
//!
//! `Q` is the standard Gaussian tail, `ε` the decoding-error budget and `δ`
//! the information-leakage budget toward the eavesdropper. Capacities use the
//! real-channel convention `C = ½ log2(1 + snr)` so that snr = 0 dB gives
//! exactly half a bit per use.

use statrs::function::erf;

use crate::error::{Error, Result};
use crate::rng::Rng;

const LOG2_E: f64 = std::f64::consts::LOG2_E;
const LN_2: f64 = std::f64::consts::LN_2;

/// Standard Gaussian tail probability `Q(t) = P(Z > t)`.
pub fn q_tail(t: f64) -> f64 {
    0.5 * erf::erfc(t / std::f64::consts::SQRT_2)
}

/// Gaussian density at `t`.
fn phi(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (std::f64::consts::TAU).sqrt()
}

/// Inverse Gaussian tail `Q⁻¹(x)`, accurate to better than 1e-10 absolute
/// across `(0, 1)` (one Newton polish on top of the inverse erfc).
///
/// # Errors
/// [`Error::QInvDomain`] when `x` is outside the open unit interval.
pub fn q_inv(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0 && x < 1.0) {
        return Err(Error::QInvDomain(x));
    }
    let mut t = std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * x);
    // Newton on Q(t) - x; Q' = -phi.
    for _ in 0..2 {
        let dens = phi(t);
        if dens < 1e-300 {
            break;
        }
        t += (q_tail(t) - x) / dens;
    }
    Ok(t)
}

/// Binary entropy in bits; `h2(0) = h2(1) = 0` by continuity.
pub fn binary_entropy(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Channel family a finite-blocklength query runs against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    /// Real AWGN channel at linear SNR.
    RealAwgn { snr: f64 },
    /// Binary symmetric channel with crossover probability `p`.
    Bsc { p: f64 },
    /// Wiretap channel whose legitimate link is noiseless and whose
    /// eavesdropper sees a BSC with crossover `p_eve`.
    SemiDeterministicWiretap { p_eve: f64 },
    /// Degraded Gaussian wiretap channel, real-channel convention.
    GaussianWiretap { snr_bob: f64, snr_eve: f64 },
}

/// A channel kind together with its first- and second-order coding
/// coefficients (capacity or secrecy capacity, and dispersion).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    /// Capacity (point-to-point kinds) or secrecy capacity (wiretap kinds),
    /// bits per channel use.
    pub capacity: f64,
    /// Dispersion, bits² per channel use.
    pub dispersion: f64,
}

fn check_unit_open(name: &'static str, v: f64, hi: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0 && v < hi) {
        return Err(Error::invalid(
            name,
            format!("must lie in (0, {hi}), got {v}"),
        ));
    }
    Ok(())
}

impl ChannelSpec {
    /// Real AWGN channel: `C = ½ log2(1+snr)`,
    /// `V = (snr/2)(snr+2)/(snr+1)² (log2 e)²`.
    ///
    /// # Errors
    /// Rejects a non-positive or non-finite SNR.
    pub fn real_awgn(snr: f64) -> Result<Self> {
        if !(snr.is_finite() && snr > 0.0) {
            return Err(Error::invalid(
                "snr",
                format!("must be positive and finite, got {snr}"),
            ));
        }
        let capacity = 0.5 * (1.0 + snr).log2();
        let dispersion = 0.5 * snr * (snr + 2.0) / ((snr + 1.0) * (snr + 1.0)) * LOG2_E * LOG2_E;
        Ok(ChannelSpec {
            kind: ChannelKind::RealAwgn { snr },
            capacity,
            dispersion,
        })
    }

    /// Binary symmetric channel: `C = 1 - h2(p)`,
    /// `V = p(1-p) log2²((1-p)/p)`.
    ///
    /// # Errors
    /// Rejects `p` outside `(0, ½)`.
    pub fn bsc(p: f64) -> Result<Self> {
        check_unit_open("p", p, 0.5)?;
        Ok(ChannelSpec {
            kind: ChannelKind::Bsc { p },
            capacity: 1.0 - binary_entropy(p),
            dispersion: bsc_dispersion(p),
        })
    }

    /// Semi-deterministic wiretap channel (noiseless main link, BSC(p_eve)
    /// eavesdropper): `C_S = h2(p_eve)`; the dispersion is the variance of the
    /// leakage information density toward the eavesdropper, which coincides
    /// with the BSC(p_eve) dispersion.
    ///
    /// # Errors
    /// Rejects `p_eve` outside `(0, ½)`.
    pub fn semi_deterministic_wiretap(p_eve: f64) -> Result<Self> {
        check_unit_open("p_eve", p_eve, 0.5)?;
        Ok(ChannelSpec {
            kind: ChannelKind::SemiDeterministicWiretap { p_eve },
            capacity: binary_entropy(p_eve),
            dispersion: bsc_dispersion(p_eve),
        })
    }

    /// Degraded Gaussian wiretap channel. `C_S = ½ log2(1+snr_bob) -
    /// ½ log2(1+snr_eve)`; the dispersion is the Monte Carlo variance of the
    /// secrecy information density (difference of the two per-link densities,
    /// conditioned on a power-shell input, with the eavesdropper's noise built
    /// as the degraded sum), since no closed form is committed to.
    ///
    /// # Errors
    /// Rejects SNRs unless `snr_bob > snr_eve > 0`, and `mc_draws < 1000`.
    pub fn gaussian_wiretap(
        snr_bob: f64,
        snr_eve: f64,
        mc_draws: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        if !(snr_eve.is_finite() && snr_eve > 0.0 && snr_bob.is_finite() && snr_bob > snr_eve) {
            return Err(Error::invalid(
                "snr_bob/snr_eve",
                format!("need snr_bob > snr_eve > 0, got {snr_bob} and {snr_eve}"),
            ));
        }
        if mc_draws < 1000 {
            return Err(Error::invalid(
                "mc_draws",
                format!("need at least 1000 draws, got {mc_draws}"),
            ));
        }
        let capacity = 0.5 * ((1.0 + snr_bob).log2() - (1.0 + snr_eve).log2());
        let dispersion = secrecy_density_variance(snr_bob, snr_eve, mc_draws, rng);
        Ok(ChannelSpec {
            kind: ChannelKind::GaussianWiretap { snr_bob, snr_eve },
            capacity,
            dispersion,
        })
    }

    pub fn is_wiretap(&self) -> bool {
        matches!(
            self.kind,
            ChannelKind::SemiDeterministicWiretap { .. } | ChannelKind::GaussianWiretap { .. }
        )
    }
}

fn bsc_dispersion(p: f64) -> f64 {
    let lr = ((1.0 - p) / p).log2();
    p * (1.0 - p) * lr * lr
}

/// Sample variance of `i_bob - i_eve` where each `i` is the per-use Gaussian
/// information density given an input on the power shell (`x² = P`), and the
/// eavesdropper's noise is `n_eve = n_bob + n'` (degraded construction).
fn secrecy_density_variance(snr_bob: f64, snr_eve: f64, mc_draws: usize, rng: &mut Rng) -> f64 {
    let p = snr_bob;
    let var_e = p / snr_eve; // eavesdropper noise variance; >= 1 since snr_eve <= snr_bob
    let x = p.sqrt();
    let extra_std = (var_e - 1.0).max(0.0).sqrt();
    let half_log2e = 0.5 * LOG2_E;
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..mc_draws {
        let n_b = rng.standard_normal();
        let n_e = n_b + extra_std * rng.standard_normal();
        let y = x + n_b;
        let z = x + n_e;
        let dens_b = half_log2e * (y * y / (1.0 + p) - n_b * n_b);
        let dens_e = half_log2e * (z * z / (p + var_e) - n_e * n_e / var_e);
        let j = dens_b - dens_e;
        sum += j;
        sum_sq += j * j;
    }
    let n = mc_draws as f64;
    let mean = sum / n;
    (sum_sq / n - mean * mean) * n / (n - 1.0)
}

/// Blocklength / error-budget query. `delta` is only meaningful for wiretap
/// kinds and is attached with [`FblenQuery::with_leakage`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FblenQuery {
    pub n: usize,
    pub epsilon: f64,
    pub delta: Option<f64>,
}

impl FblenQuery {
    /// # Errors
    /// Rejects `n = 0` and `epsilon` outside `(0, 1)`.
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "blocklength must be at least 1"));
        }
        check_unit_open("epsilon", epsilon, 1.0)?;
        Ok(FblenQuery {
            n,
            epsilon,
            delta: None,
        })
    }

    /// Attach a leakage budget for secrecy queries.
    ///
    /// # Errors
    /// Rejects `delta` outside `(0, 1)`.
    pub fn with_leakage(mut self, delta: f64) -> Result<Self> {
        check_unit_open("delta", delta, 1.0)?;
        self.delta = Some(delta);
        Ok(self)
    }
}

/// Normal-approximation maximum log code size `n C - sqrt(n V) Q⁻¹(ε)`, bits.
///
/// # Errors
/// Wiretap kinds are rejected; use [`secrecy_rate_fblen`] for those.
pub fn max_log_code_size(spec: &ChannelSpec, q: &FblenQuery) -> Result<f64> {
    if spec.is_wiretap() {
        return Err(Error::ChannelKindMismatch {
            op: "max_log_code_size",
            expected: "point-to-point",
        });
    }
    let n = q.n as f64;
    Ok(n * spec.capacity - (n * spec.dispersion).sqrt() * q_inv(q.epsilon)?)
}

/// Second-order achievable secrecy rate
/// `C_S - sqrt(V/n) Q⁻¹(δ/(1-ε))`, bits per channel use.
///
/// # Errors
/// Point-to-point kinds are rejected; a missing `delta` is an invalid
/// parameter; a ratio `δ/(1-ε)` outside `(0, 1)` is an invalid leakage ratio.
pub fn secrecy_rate_fblen(spec: &ChannelSpec, q: &FblenQuery) -> Result<f64> {
    if !spec.is_wiretap() {
        return Err(Error::ChannelKindMismatch {
            op: "secrecy_rate_fblen",
            expected: "wiretap",
        });
    }
    let delta = q.delta.ok_or_else(|| {
        Error::invalid("delta", "secrecy queries need a leakage budget; call with_leakage")
    })?;
    let ratio = delta / (1.0 - q.epsilon);
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidLeakageRatio(ratio));
    }
    let n = q.n as f64;
    Ok(spec.capacity - (spec.dispersion / n).sqrt() * q_inv(ratio)?)
}

/// Natural-log helper used by tests and the CLI for rate conversions.
pub fn bits_to_nats(bits: f64) -> f64 {
    bits * LN_2
}
