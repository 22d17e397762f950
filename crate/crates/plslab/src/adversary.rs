//! Active-attacker models for channel probing: a two-antenna injection
//! attack that manufactures common randomness, the probe-randomization
//! countermeasure that destroys it, and a reactive-jammer game.
//!
//! **Injection.** A two-antenna attacker who knows its channels to both
//! endpoints can precode one symbol so that the same value lands at Alice
//! and Bob simultaneously ([`build_precoder`]). During reciprocal probing
//! both parties then observe `X·H + W + noise` with a *common* injected term
//! `W`, which the attacker controls — manufactured "shared randomness" that
//! leaks the eventual key. Randomizing the probes and post-multiplying each
//! observation by the sender's own probe ([`counter_injection`]) leaves the
//! legitimate shared term `X·Y·H` intact while the attacker's contribution
//! picks up an independent uniform phase at each side, reducing the attack
//! to uncorrelated jamming.
//!
//! **Reactive jamming.** A jammer senses per-subcarrier transmit power
//! against a threshold and jams what it detects; the legitimate pair moves
//! first by committing to a power strategy ([`solve_stackelberg`]). Sensing
//! is modeled noiselessly against the true transmit power — a documented
//! simplification — and the game uses unit channel gains, so the follower's
//! equal-split jam-everything-sensed response is provably optimal.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::skg::skg_rate;

/// Precoder `(P1, P2)` that makes a two-antenna transmitter look identical
/// to two different receivers: with `P2 = 1` (scale normalization),
/// `P1 = (h_b[1] - h_a[1]) / (h_a[0] - h_b[0])`, which enforces
/// `h_a·P == h_b·P`.
///
/// # Errors
/// [`Error::PrecoderSingular`] when `h_a[0] == h_b[0]` — a zero-probability
/// event under continuous fading, but a division by zero if left unguarded.
pub fn build_precoder(h_a: [Complex64; 2], h_b: [Complex64; 2]) -> Result<[Complex64; 2]> {
    let denom = h_a[0] - h_b[0];
    if denom.norm_sqr() == 0.0 {
        return Err(Error::PrecoderSingular);
    }
    let p1 = (h_b[1] - h_a[1]) / denom;
    Ok([p1, Complex64::new(1.0, 0.0)])
}

/// One injection-attack geometry: the legitimate reciprocal channel, the
/// attacker's two-antenna channels toward each endpoint, the attacker's
/// symbol, and the precoder built for this geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectionScenario {
    pub h_ab: Complex64,
    pub h_a: [Complex64; 2],
    pub h_b: [Complex64; 2],
    pub x_j: Complex64,
    pub precoder: [Complex64; 2],
}

impl InjectionScenario {
    /// Build the scenario, deriving the precoder from the attacker channels.
    ///
    /// # Errors
    /// Propagates [`Error::PrecoderSingular`] from [`build_precoder`].
    pub fn new(
        h_ab: Complex64,
        h_a: [Complex64; 2],
        h_b: [Complex64; 2],
        x_j: Complex64,
    ) -> Result<Self> {
        let precoder = build_precoder(h_a, h_b)?;
        Ok(InjectionScenario {
            h_ab,
            h_a,
            h_b,
            x_j,
            precoder,
        })
    }

    /// The common injected term `W = (h_a · P) x_j` — identical at both
    /// receivers by the precoder identity.
    pub fn injected_value(&self) -> Complex64 {
        (self.h_a[0] * self.precoder[0] + self.h_a[1] * self.precoder[1]) * self.x_j
    }
}

/// One probing exchange under attack: Alice transmits `x`, Bob transmits
/// `y`, and each receives the other's probe through the reciprocal channel
/// plus the injected term and independent receiver noise:
///
/// ```text
/// z_a = y * h + W + n_a        z_b = x * h + W + n_b
/// ```
///
/// Deterministic pilots are the special case `x == y`.
///
/// # Errors
/// `noise_var` must be nonnegative and finite.
pub fn observe_under_attack(
    scn: &InjectionScenario,
    probes: (Complex64, Complex64),
    noise_var: f64,
    rng: &mut Rng,
) -> Result<(Complex64, Complex64)> {
    if !(noise_var.is_finite() && noise_var >= 0.0) {
        return Err(Error::invalid(
            "noise_var",
            format!("must be nonnegative and finite, got {noise_var}"),
        ));
    }
    let (x, y) = probes;
    let w = scn.injected_value();
    let n_a = rng.complex_gaussian(noise_var);
    let n_b = rng.complex_gaussian(noise_var);
    let z_a = y * scn.h_ab + w + n_a;
    let z_b = x * scn.h_ab + w + n_b;
    Ok((z_a, z_b))
}

/// The probe-randomization countermeasure: each side multiplies its
/// observation by its *own* transmitted probe,
/// `z̃_a = x·z_a = XYH + XW + XN_a` and `z̃_b = y·z_b = XYH + YW + YN_b`.
/// The legitimate term `XYH` stays common; the attacker term is carried by
/// independent per-side factors and decorrelates.
pub fn counter_injection(
    z_a: Complex64,
    z_b: Complex64,
    x: Complex64,
    y: Complex64,
) -> (Complex64, Complex64) {
    (x * z_a, y * z_b)
}

/// Plug-in mutual information, in bits, between two paired binary
/// sequences: the empirical joint 2×2 histogram plugged into
/// `I = Σ p(a,b) log2(p(a,b) / (p(a) p(b)))`. Zero-count cells contribute
/// zero. The plug-in estimator is biased upward by roughly
/// `(rows-1)(cols-1) / (2 N ln 2)` bits — negligible at the sample sizes
/// used here.
///
/// # Errors
/// The sequences must be nonempty, of equal length, and strictly 0/1.
pub fn binary_mutual_information(xs: &[u8], ys: &[u8]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            a: xs.len(),
            b: ys.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::invalid("xs", "must be nonempty"));
    }
    let mut joint = [[0usize; 2]; 2];
    for (&x, &y) in xs.iter().zip(ys) {
        if x > 1 || y > 1 {
            return Err(Error::invalid("bits", "entries must be 0 or 1"));
        }
        joint[x as usize][y as usize] += 1;
    }
    let n = xs.len() as f64;
    let px = [
        (joint[0][0] + joint[0][1]) as f64 / n,
        (joint[1][0] + joint[1][1]) as f64 / n,
    ];
    let py = [
        (joint[0][0] + joint[1][0]) as f64 / n,
        (joint[0][1] + joint[1][1]) as f64 / n,
    ];
    let mut mi = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let p = joint[a][b] as f64 / n;
            if p > 0.0 {
                mi += p * (p / (px[a] * py[b])).log2();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Leader (legitimate pair) power strategies in the jamming game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeaderStrategy {
    /// Equal power per subcarrier, clipped to stay at or below the sensing
    /// threshold: invisible to the jammer.
    BelowThresholdEqualPower,
    /// Full per-subcarrier budget everywhere, accepting detection.
    FullPowerAll,
}

impl std::fmt::Display for LeaderStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            LeaderStrategy::BelowThresholdEqualPower => "below_threshold_equal_power",
            LeaderStrategy::FullPowerAll => "full_power_all",
        };
        f.write_str(name)
    }
}

/// Zero-sum game between a key-generating pair (leader) and a reactive
/// jammer (follower) over `n_subcarriers` unit-gain subcarriers. The leader
/// commits to a power strategy; the jammer senses any subcarrier whose
/// transmit power strictly exceeds `threshold` and splits `p_jam` equally
/// over the subcarriers it jams. Payoff is the secret-key sum rate at unit
/// noise plus the jamming share.
#[derive(Debug, Clone, PartialEq)]
pub struct JammingGame {
    n_subcarriers: usize,
    p_leg: f64,
    p_jam: f64,
    threshold: f64,
}

impl JammingGame {
    /// # Errors
    /// `n_subcarriers >= 1`; `p_leg` and `p_jam` positive and finite;
    /// `threshold` nonnegative and finite.
    pub fn new(n_subcarriers: usize, p_leg: f64, p_jam: f64, threshold: f64) -> Result<Self> {
        if n_subcarriers == 0 {
            return Err(Error::invalid("n_subcarriers", "must be at least 1"));
        }
        if !(p_leg.is_finite() && p_leg > 0.0) {
            return Err(Error::invalid(
                "p_leg",
                format!("must be positive and finite, got {p_leg}"),
            ));
        }
        if !(p_jam.is_finite() && p_jam > 0.0) {
            return Err(Error::invalid(
                "p_jam",
                format!("must be positive and finite, got {p_jam}"),
            ));
        }
        if !(threshold.is_finite() && threshold >= 0.0) {
            return Err(Error::invalid(
                "threshold",
                format!("must be nonnegative and finite, got {threshold}"),
            ));
        }
        Ok(JammingGame {
            n_subcarriers,
            p_leg,
            p_jam,
            threshold,
        })
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Per-subcarrier transmit power under a leader strategy.
    pub fn leader_power(&self, strategy: LeaderStrategy) -> f64 {
        match strategy {
            LeaderStrategy::BelowThresholdEqualPower => self.p_leg.min(self.threshold),
            LeaderStrategy::FullPowerAll => self.p_leg,
        }
    }

    /// Subcarriers the jammer detects: power strictly above the threshold.
    pub fn sensed(&self, strategy: LeaderStrategy) -> Vec<usize> {
        if self.leader_power(strategy) > self.threshold {
            (0..self.n_subcarriers).collect()
        } else {
            Vec::new()
        }
    }

    /// Leader payoff (secret-key sum rate, bits) when the jammer spreads its
    /// budget equally over `jammed`.
    pub fn payoff(&self, strategy: LeaderStrategy, jammed: &[usize]) -> f64 {
        let power = self.leader_power(strategy);
        if power <= 0.0 {
            return 0.0;
        }
        let share = if jammed.is_empty() {
            0.0
        } else {
            self.p_jam / jammed.len() as f64
        };
        (0..self.n_subcarriers)
            .map(|j| {
                let noise = if jammed.contains(&j) { 1.0 + share } else { 1.0 };
                skg_rate(power, noise).expect("validated game parameters")
            })
            .sum()
    }

    /// Follower payoff: the game is zero-sum.
    pub fn follower_payoff(&self, strategy: LeaderStrategy, jammed: &[usize]) -> f64 {
        -self.payoff(strategy, jammed)
    }
}

/// Equilibrium outcome: the committed leader strategy, the follower's
/// response (exactly the sensed subcarriers), and the leader's payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct GameOutcome {
    pub leader_strategy: LeaderStrategy,
    pub follower_response: Vec<usize>,
    pub value: f64,
}

/// Leader-commits-first equilibrium. The follower's best response to any
/// committed strategy is to jam every sensed subcarrier with an equal split
/// (the per-subcarrier rate loss is convex in jamming power, so spreading
/// over all sensed subcarriers hurts the leader most). The leader therefore
/// compares its two strategies under those responses and keeps the better
/// one; exact ties go to the quiet below-threshold play.
pub fn solve_stackelberg(game: &JammingGame) -> GameOutcome {
    let quiet = LeaderStrategy::BelowThresholdEqualPower;
    let loud = LeaderStrategy::FullPowerAll;
    let quiet_response = game.sensed(quiet);
    let loud_response = game.sensed(loud);
    let quiet_value = game.payoff(quiet, &quiet_response);
    let loud_value = game.payoff(loud, &loud_response);
    if loud_value > quiet_value {
        GameOutcome {
            leader_strategy: loud,
            follower_response: loud_response,
            value: loud_value,
        }
    } else {
        GameOutcome {
            leader_strategy: quiet,
            follower_response: quiet_response,
            value: quiet_value,
        }
    }
}
