//! Secrecy capacity and achievable rate regions for the Gaussian wiretap /
//! degraded broadcast setting.
//!
//! For a legitimate link at SNR `b` and an eavesdropper at SNR `e` (linear,
//! complex-channel convention):
//!
//! ```text
//! C_S          = max(0, log2(1 + b) - log2(1 + e))
//! secret(α)    = log2(1 + α b) - log2(1 + α e)
//! common(α)    = log2(1 + (1-α) e / (1 + α e))
//! ```
//!
//! `α` is the fraction of transmit power carried by the confidential layer of
//! the superposition code; the common layer must stay decodable by the weaker
//! receiver. The ergodic variant Monte-Carlo-averages the same per-realization
//! expressions over independent Rayleigh fades of both links, keeping only the
//! positive part of the per-realization secrecy difference.

use crate::error::{Error, Result};
use crate::rng::Rng;

const LN_2: f64 = std::f64::consts::LN_2;

/// `log2(1 + x)` computed via `ln_1p` for accuracy at small `x`.
fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Degraded Gaussian broadcast configuration (legitimate receiver stronger
/// than the eavesdropper, checked where required).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBroadcast {
    snr_bob_db: f64,
    snr_eve_db: f64,
}

impl GaussianBroadcast {
    /// # Errors
    /// Rejects non-finite SNRs.
    pub fn new(snr_bob_db: f64, snr_eve_db: f64) -> Result<Self> {
        for (name, v) in [("snr_bob_db", snr_bob_db), ("snr_eve_db", snr_eve_db)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        Ok(GaussianBroadcast {
            snr_bob_db,
            snr_eve_db,
        })
    }

    pub fn snr_bob_db(&self) -> f64 {
        self.snr_bob_db
    }

    pub fn snr_eve_db(&self) -> f64 {
        self.snr_eve_db
    }

    pub fn snr_bob(&self) -> f64 {
        db_to_linear(self.snr_bob_db)
    }

    pub fn snr_eve(&self) -> f64 {
        db_to_linear(self.snr_eve_db)
    }
}

/// One boundary point of an achievable (common, secret) rate pair, bits per
/// channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub common_rate: f64,
    pub secret_rate: f64,
}

/// Boundary of an achievable rate region, traced along a power-split grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    /// Boundary points, one per entry of `power_split_grid`.
    pub points: Vec<RatePoint>,
    /// Confidential-layer power fractions `α`, ascending from 0 to 1.
    pub power_split_grid: Vec<f64>,
}

impl RateRegion {
    /// The boundary must be a monotone tradeoff: moving along the grid, one
    /// coordinate never improves while the other worsens in the same step.
    pub fn is_monotone_tradeoff(&self) -> bool {
        const TOL: f64 = 1e-9;
        self.points.windows(2).all(|w| {
            let dc = w[1].common_rate - w[0].common_rate;
            let ds = w[1].secret_rate - w[0].secret_rate;
            dc <= TOL && ds >= -TOL
        })
    }

    /// Secret rate with all power on the confidential layer (`α = 1`).
    pub fn secret_endpoint(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.secret_rate)
    }

    /// Common rate with all power on the common layer (`α = 0`).
    pub fn common_endpoint(&self) -> f64 {
        self.points.first().map_or(0.0, |p| p.common_rate)
    }
}

/// Secrecy capacity of the Gaussian wiretap channel, bits per channel use.
/// Zero when the eavesdropper is at least as strong as the legitimate link.
pub fn secrecy_capacity_gaussian(bc: &GaussianBroadcast) -> f64 {
    (log2_1p(bc.snr_bob()) - log2_1p(bc.snr_eve())).max(0.0)
}

fn alpha_grid(grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(Error::invalid(
            "grid_size",
            format!("need at least 2 boundary points, got {grid_size}"),
        ));
    }
    Ok((0..grid_size)
        .map(|i| i as f64 / (grid_size - 1) as f64)
        .collect())
}

/// Boundary of the (common, secret) rate region of the static degraded
/// broadcast channel, traced over `grid_size` power splits.
///
/// # Errors
/// [`Error::RegionEmpty`] unless Bob's SNR strictly exceeds Eve's;
/// invalid-parameter error for `grid_size < 2`.
pub fn broadcast_region(bc: &GaussianBroadcast, grid_size: usize) -> Result<RateRegion> {
    if bc.snr_bob_db <= bc.snr_eve_db {
        return Err(Error::RegionEmpty);
    }
    let grid = alpha_grid(grid_size)?;
    let (b, e) = (bc.snr_bob(), bc.snr_eve());
    let points = grid
        .iter()
        .map(|&alpha| RatePoint {
            common_rate: log2_1p((1.0 - alpha) * e / (1.0 + alpha * e)),
            secret_rate: log2_1p(alpha * b) - log2_1p(alpha * e),
        })
        .collect();
    Ok(RateRegion {
        points,
        power_split_grid: grid,
    })
}

/// Ergodic (common, secret) region under independent Rayleigh fading of both
/// links, Monte Carlo averaged over `mc_draws` fading pairs.
///
/// Bob's mean channel power is 1, Eve's is `sigma2_eve`; both links share the
/// transmit-power-to-noise ratio `noise_snr_db`. Per realization the common
/// layer is decoded by the instantaneously weaker receiver and only positive
/// secrecy differences accumulate, so the secret endpoint stays positive even
/// at equal average SNRs.
///
/// # Errors
/// Invalid-parameter errors for `sigma2_eve <= 0`, `mc_draws < 1000`, or
/// `grid_size < 2`.
pub fn ergodic_region_rayleigh(
    noise_snr_db: f64,
    sigma2_eve: f64,
    grid_size: usize,
    mc_draws: usize,
    rng: &mut Rng,
) -> Result<RateRegion> {
    if !(sigma2_eve.is_finite() && sigma2_eve > 0.0) {
        return Err(Error::invalid(
            "sigma2_eve",
            format!("must be positive and finite, got {sigma2_eve}"),
        ));
    }
    if mc_draws < 1000 {
        return Err(Error::invalid(
            "mc_draws",
            format!("need at least 1000 draws for a stable average, got {mc_draws}"),
        ));
    }
    let grid = alpha_grid(grid_size)?;
    let snr = db_to_linear(noise_snr_db);

    let mut common = vec![0.0f64; grid.len()];
    let mut secret = vec![0.0f64; grid.len()];
    for _ in 0..mc_draws {
        // |CN(0, s)|^2 is exponential with mean s: instantaneous power gains.
        let g_b = rng.complex_gaussian(1.0).norm_sqr();
        let g_e = rng.complex_gaussian(sigma2_eve).norm_sqr();
        let s_b = snr * g_b;
        let s_e = snr * g_e;
        let s_min = s_b.min(s_e);
        for (i, &alpha) in grid.iter().enumerate() {
            let diff = log2_1p(alpha * s_b) - log2_1p(alpha * s_e);
            secret[i] += diff.max(0.0);
            common[i] += log2_1p((1.0 - alpha) * s_min / (1.0 + alpha * s_min));
        }
    }
    let scale = 1.0 / mc_draws as f64;
    let points = common
        .iter()
        .zip(&secret)
        .map(|(&c, &s)| RatePoint {
            common_rate: c * scale,
            secret_rate: s * scale,
        })
        .collect();
    Ok(RateRegion {
        points,
        power_split_grid: grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen by direct evaluation of the region formulas at 10 dB / 5 dB:
    //   log2(1 + 10) - log2(1 + 10^0.5)       = 1.4020584100305
    //   log2(1 + 5)  - log2(1 + 10^0.5 / 2)   = 1.2169547598753
    const SECRET_FULL_POWER_10_5: f64 = 1.4020584100305;
    const SECRET_HALF_POWER_10_5: f64 = 1.2169547598753;

    #[test]
    fn equal_snrs_give_zero_secrecy_capacity() {
        let bc = GaussianBroadcast::new(5.0, 5.0).unwrap();
        assert_eq!(secrecy_capacity_gaussian(&bc), 0.0);
    }

    #[test]
    fn stronger_eve_clamps_to_zero() {
        let bc = GaussianBroadcast::new(0.0, 10.0).unwrap();
        assert_eq!(secrecy_capacity_gaussian(&bc), 0.0);
    }

    #[test]
    fn boundary_endpoints_match_direct_evaluation() {
        let bc = GaussianBroadcast::new(10.0, 5.0).unwrap();
        let region = broadcast_region(&bc, 3).unwrap();
        // alpha = 0: all power on the common layer.
        assert!((region.points[0].secret_rate).abs() < 1e-12);
        assert!((region.common_endpoint() - log2_1p(bc.snr_eve())).abs() < 1e-12);
        // alpha = 1/2 and alpha = 1.
        assert!((region.points[1].secret_rate - SECRET_HALF_POWER_10_5).abs() < 1e-9);
        assert!((region.secret_endpoint() - SECRET_FULL_POWER_10_5).abs() < 1e-9);
        assert!((region.points[2].common_rate).abs() < 1e-12);
        assert!(
            (region.secret_endpoint() - secrecy_capacity_gaussian(&bc)).abs() < 1e-12,
            "full-power secret rate is the secrecy capacity"
        );
    }

    #[test]
    fn boundary_is_monotone_tradeoff() {
        let bc = GaussianBroadcast::new(12.0, 3.0).unwrap();
        let region = broadcast_region(&bc, 101).unwrap();
        assert!(region.is_monotone_tradeoff());
    }

    #[test]
    fn region_rejects_non_degraded_order_and_tiny_grid() {
        let bc = GaussianBroadcast::new(5.0, 5.0).unwrap();
        assert_eq!(broadcast_region(&bc, 10).unwrap_err(), Error::RegionEmpty);
        let bc = GaussianBroadcast::new(10.0, 5.0).unwrap();
        assert!(matches!(
            broadcast_region(&bc, 1).unwrap_err(),
            Error::InvalidParameter { name: "grid_size", .. }
        ));
    }

    #[test]
    fn fading_recovers_positive_secret_rate_at_equal_average_snrs() {
        let mut rng = Rng::new(20_000, 0);
        let region = ergodic_region_rayleigh(5.0, 1.0, 11, 50_000, &mut rng).unwrap();
        assert!(
            region.secret_endpoint() > 0.05,
            "secret endpoint {}",
            region.secret_endpoint()
        );
        assert!(region.is_monotone_tradeoff());
    }

    #[test]
    fn weak_eavesdropper_limit_approaches_bobs_ergodic_capacity() {
        let mut rng = Rng::new(99, 0);
        let snr_db = 5.0;
        let region = ergodic_region_rayleigh(snr_db, 1e-6, 5, 200_000, &mut rng).unwrap();
        // Independent estimate of E[log2(1 + snr * g)] over the same draw count.
        let mut rng2 = Rng::new(7, 1);
        let snr = 10f64.powf(snr_db / 10.0);
        let n = 200_000;
        let bob_capacity: f64 = (0..n)
            .map(|_| log2_1p(snr * rng2.complex_gaussian(1.0).norm_sqr()))
            .sum::<f64>()
            / n as f64;
        let rel = (region.secret_endpoint() - bob_capacity).abs() / bob_capacity;
        assert!(rel < 0.02, "endpoint {} vs capacity {bob_capacity}", region.secret_endpoint());
        assert!(
            region.common_endpoint() < 1e-4,
            "common endpoint {} should collapse",
            region.common_endpoint()
        );
    }

    #[test]
    fn ergodic_region_validates_inputs() {
        let mut rng = Rng::new(0, 0);
        assert!(ergodic_region_rayleigh(5.0, 0.0, 5, 10_000, &mut rng).is_err());
        assert!(ergodic_region_rayleigh(5.0, 1.0, 5, 10, &mut rng).is_err());
        assert!(ergodic_region_rayleigh(5.0, 1.0, 1, 10_000, &mut rng).is_err());
    }
}
