//! Delay-constrained power allocation and effective capacity.
//!
//! The effective capacity of a service process `C_D` under a delay exponent
//! `θ` is `E_C = -(1/α) log2(E[2^(-α C_D)])` with `α = θ T_f B / ln 2`
//! (frame duration `T_f`, bandwidth `B`). The allocator maximizes it over
//! per-subcarrier powers given imperfect gain estimates; its two limits are
//! water-filling (`θ → 0`) and total channel inversion (`θ → ∞`).

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Delay-exponent query: QoS parameters plus the estimated subcarrier gains.
#[derive(Debug, Clone, PartialEq)]
pub struct EffCapQuery {
    theta: f64,
    frame_duration: f64,
    bandwidth: f64,
    est_gains: Vec<f64>,
}

impl EffCapQuery {
    /// # Errors
    /// `theta` must be finite and ≥ 0, `frame_duration` and `bandwidth`
    /// positive and finite, and `est_gains` nonempty with positive finite
    /// entries.
    pub fn new(
        theta: f64,
        frame_duration: f64,
        bandwidth: f64,
        est_gains: Vec<f64>,
    ) -> Result<Self> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::invalid(
                "theta",
                format!("must be finite and nonnegative, got {theta}"),
            ));
        }
        if !(frame_duration.is_finite() && frame_duration > 0.0) {
            return Err(Error::invalid(
                "frame_duration",
                format!("must be positive and finite, got {frame_duration}"),
            ));
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::invalid(
                "bandwidth",
                format!("must be positive and finite, got {bandwidth}"),
            ));
        }
        if est_gains.is_empty() || est_gains.iter().any(|&g| !(g.is_finite() && g > 0.0)) {
            return Err(Error::invalid(
                "est_gains",
                "must be nonempty with positive finite entries",
            ));
        }
        Ok(EffCapQuery {
            theta,
            frame_duration,
            bandwidth,
            est_gains,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn est_gains(&self) -> &[f64] {
        &self.est_gains
    }

    /// Normalized delay exponent `α = θ T_f B / ln 2`.
    pub fn alpha(&self) -> f64 {
        self.theta * self.frame_duration * self.bandwidth / std::f64::consts::LN_2
    }
}

/// Allocation result; `all_zero` flags the degenerate case where no
/// subcarrier could be activated for the given budget.
#[derive(Debug, Clone, PartialEq)]
pub struct EffCapAllocation {
    pub powers: Vec<f64>,
    pub all_zero: bool,
}

/// Optimal delay-aware power allocation:
/// `p_i = (g0^{N/(α+N)} ĝ_i^{α/(α+N)})^{-1} - 1/ĝ_i`, clamped at zero, with
/// the cutoff `g0` bisected (in log domain) until the powers sum to `budget`.
/// Subcarrier `i` is active exactly when `g0 < ĝ_i`.
///
/// # Errors
/// `budget` must be positive and finite.
pub fn effcap_power_alloc(q: &EffCapQuery, budget: f64) -> Result<EffCapAllocation> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::invalid(
            "budget",
            format!("must be positive and finite, got {budget}"),
        ));
    }
    let n = q.est_gains.len() as f64;
    let alpha = q.alpha();
    let expo_g0 = n / (alpha + n);
    let expo_gi = alpha / (alpha + n);

    // Powers as a function of t = ln g0 (log domain keeps the θ → ∞ regime
    // representable, where the cutoff underflows f64).
    let powers_at = |t: f64| -> Vec<f64> {
        q.est_gains
            .iter()
            .map(|&g| {
                if t >= g.ln() {
                    0.0
                } else {
                    (-(expo_g0 * t + expo_gi * g.ln())).exp() - 1.0 / g
                }
            })
            .collect()
    };
    let sum_at = |t: f64| -> f64 { powers_at(t).iter().sum() };

    let mut hi = q
        .est_gains
        .iter()
        .fold(f64::NEG_INFINITY, |m, &g| m.max(g.ln()));
    let mut lo = hi - 1.0;
    let mut expansions = 0;
    while sum_at(lo).is_finite() && sum_at(lo) < budget {
        lo = hi - (hi - lo) * 2.0;
        expansions += 1;
        if expansions > 4000 {
            // The sum cannot reach the budget: degenerate allocation.
            return Ok(EffCapAllocation {
                powers: vec![0.0; q.est_gains.len()],
                all_zero: true,
            });
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if sum_at(mid) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let powers = powers_at(t);
    let spent: f64 = powers.iter().sum();
    if spent < budget * 1e-9 {
        return Ok(EffCapAllocation {
            powers: vec![0.0; q.est_gains.len()],
            all_zero: true,
        });
    }
    Ok(EffCapAllocation {
        powers,
        all_zero: false,
    })
}

/// Fading model for the effective-capacity Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainFading {
    /// Gains are exactly as given every frame (deterministic service).
    Static,
    /// Each frame multiplies every gain by an independent unit-mean
    /// exponential draw (Rayleigh power fading around the estimate).
    Rayleigh,
}

/// Monte Carlo estimate of the effective capacity
/// `E_C = -(1/α) log2(E[2^(-α C_D)])` where per frame
/// `C_D = Σ log2(1 + p_i g_i f_i)` with fading multipliers `f_i`.
///
/// `θ = 0` is the limit case: the plain expected rate. A degenerate (static)
/// service returns exactly `C_D` for every `α`.
///
/// # Errors
/// `powers` and `gains` must have equal lengths and `mc_draws ≥ 1`.
pub fn effective_capacity(
    q: &EffCapQuery,
    powers: &[f64],
    gains: &[f64],
    fading: GainFading,
    mc_draws: usize,
    rng: &mut Rng,
) -> Result<f64> {
    if powers.len() != gains.len() {
        return Err(Error::LengthMismatch {
            a: powers.len(),
            b: gains.len(),
        });
    }
    if mc_draws == 0 {
        return Err(Error::invalid("mc_draws", "must be at least 1"));
    }
    let alpha = q.alpha();
    let rate_of = |rng: &mut Rng| -> f64 {
        powers
            .iter()
            .zip(gains)
            .map(|(&p, &g)| {
                let f = match fading {
                    GainFading::Static => 1.0,
                    GainFading::Rayleigh => rng.exponential(1.0),
                };
                (1.0 + p * g * f).log2()
            })
            .sum()
    };
    let rates: Vec<f64> = (0..mc_draws).map(|_| rate_of(rng)).collect();
    if alpha == 0.0 {
        return Ok(rates.iter().sum::<f64>() / mc_draws as f64);
    }
    // E_C = -lse / (α ln 2) with lse = ln(mean(exp(-α ln2 · C_j))),
    // computed shift-stably.
    let ln2 = std::f64::consts::LN_2;
    let ts: Vec<f64> = rates.iter().map(|&c| -alpha * ln2 * c).collect();
    let m = ts.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mean_exp = ts.iter().map(|&t| (t - m).exp()).sum::<f64>() / mc_draws as f64;
    let lse = m + mean_exp.ln();
    Ok(-lse / (alpha * ln2))
}
