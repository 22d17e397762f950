//! Water-filling power allocation and its dual: the minimum total power that
//! reaches a given sum rate on parallel Gaussian subchannels.
//!
//! Rates are `Σ log2(1 + p_i γ_i)` over effective gains `γ_i` (per-subcarrier
//! gain times any SNR calibration factor). Both routines return allocations
//! aligned to the input order.

/// Result of a budgeted water-fill.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterFill {
    /// Per-subchannel powers, input order, zeros for inactive entries.
    pub powers: Vec<f64>,
    /// Achieved sum rate, bits.
    pub rate: f64,
    /// Water level `w` (active entries satisfy `p_i = w - 1/γ_i`).
    pub level: f64,
}

/// Maximize `Σ log2(1 + p_i γ_i)` subject to `Σ p_i ≤ budget`, `p_i ≥ 0`.
///
/// Degenerate inputs (no gains, zero budget) yield a zero-rate allocation.
/// Gains must be positive and finite; this is the caller's invariant.
pub fn waterfill(gains: &[f64], budget: f64) -> WaterFill {
    let n = gains.len();
    if n == 0 || budget <= 0.0 {
        return WaterFill {
            powers: vec![0.0; n],
            rate: 0.0,
            level: 0.0,
        };
    }
    debug_assert!(gains.iter().all(|&g| g > 0.0 && g.is_finite()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| gains[j].partial_cmp(&gains[i]).unwrap().then(i.cmp(&j)));

    // Start with every subchannel active; drop the weakest while its power
    // would be negative.
    let mut m = n;
    let mut inv_sum: f64 = order.iter().map(|&i| 1.0 / gains[i]).sum();
    let mut level = (budget + inv_sum) / m as f64;
    while m > 1 && level < 1.0 / gains[order[m - 1]] {
        inv_sum -= 1.0 / gains[order[m - 1]];
        m -= 1;
        level = (budget + inv_sum) / m as f64;
    }
    let mut powers = vec![0.0; n];
    let mut rate = 0.0;
    for &i in &order[..m] {
        let p = (level - 1.0 / gains[i]).max(0.0);
        powers[i] = p;
        rate += (1.0 + p * gains[i]).log2();
    }
    WaterFill {
        powers,
        rate,
        level,
    }
}

/// Result of a rate-constrained minimum-power allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct MinPower {
    /// Per-subchannel powers, input order.
    pub powers: Vec<f64>,
    /// Total power spent; `f64::INFINITY` when the rate is positive but no
    /// subchannels exist.
    pub total: f64,
}

/// Minimize `Σ p_i` subject to `Σ log2(1 + p_i γ_i) ≥ rate`, `p_i ≥ 0`.
///
/// The optimum water-fills the `m` strongest subchannels at the level
/// `w = (2^rate / Π γ_i)^(1/m)` for the largest `m` keeping the weakest
/// active entry nonnegative. A nonpositive rate costs nothing.
pub fn min_power_for_rate(gains: &[f64], rate: f64) -> MinPower {
    let n = gains.len();
    if rate <= 0.0 {
        return MinPower {
            powers: vec![0.0; n],
            total: 0.0,
        };
    }
    if n == 0 {
        return MinPower {
            powers: Vec::new(),
            total: f64::INFINITY,
        };
    }
    debug_assert!(gains.iter().all(|&g| g > 0.0 && g.is_finite()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| gains[j].partial_cmp(&gains[i]).unwrap().then(i.cmp(&j)));

    // Work in the log domain: ln w_m = (rate·ln2 - Σ ln γ)/m. Adding the
    // next-strongest subchannel helps exactly while w stays above 1/γ of the
    // newcomer, so take the largest valid m.
    let rate_nats = rate * std::f64::consts::LN_2;
    let mut ln_gain_sum = 0.0;
    let mut best: Option<(usize, f64)> = None; // (m, ln w)
    for m in 1..=n {
        ln_gain_sum += gains[order[m - 1]].ln();
        let ln_w = (rate_nats - ln_gain_sum) / m as f64;
        if ln_w >= -gains[order[m - 1]].ln() {
            best = Some((m, ln_w));
        } else {
            break;
        }
    }
    let (m, ln_w) = best.expect("m = 1 is always valid for a positive rate");
    let w = ln_w.exp();
    let mut powers = vec![0.0; n];
    let mut total = 0.0;
    for &i in &order[..m] {
        let p = (w - 1.0 / gains[i]).max(0.0);
        powers[i] = p;
        total += p;
    }
    MinPower { powers, total }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate_of(gains: &[f64], powers: &[f64]) -> f64 {
        gains
            .iter()
            .zip(powers)
            .map(|(&g, &p)| (1.0 + p * g).log2())
            .sum()
    }

    #[test]
    fn single_channel_gets_everything() {
        let wf = waterfill(&[2.0], 3.0);
        assert_eq!(wf.powers, vec![3.0]);
        assert!((wf.rate - (7.0f64).log2()).abs() < 1e-12);
    }

    #[test]
    fn budget_is_spent_exactly_and_kkt_holds() {
        let gains = [0.3, 2.5, 1.1, 0.9];
        let wf = waterfill(&gains, 4.0);
        let spent: f64 = wf.powers.iter().sum();
        assert!((spent - 4.0).abs() < 1e-10);
        // Active entries share the water level; inactive ones would need a
        // level above it.
        for (&g, &p) in gains.iter().zip(&wf.powers) {
            if p > 0.0 {
                assert!((p + 1.0 / g - wf.level).abs() < 1e-10);
            } else {
                assert!(1.0 / g >= wf.level - 1e-10);
            }
        }
    }

    #[test]
    fn beats_grid_search_on_two_channels() {
        let gains = [0.4, 3.0];
        let budget = 2.0;
        let wf = waterfill(&gains, budget);
        let mut best = 0.0f64;
        for i in 0..=10_000 {
            let p0 = budget * i as f64 / 10_000.0;
            best = best.max(rate_of(&gains, &[p0, budget - p0]));
        }
        assert!(wf.rate >= best - 1e-6, "wf {} vs grid {best}", wf.rate);
    }

    #[test]
    fn weak_channel_drops_out_under_small_budget() {
        let wf = waterfill(&[0.01, 10.0], 0.05);
        assert_eq!(wf.powers[0], 0.0);
        assert!(wf.powers[1] > 0.0);
    }

    #[test]
    fn min_power_hits_the_rate_exactly() {
        let gains = [0.7, 1.9, 0.2, 3.4];
        for rate in [0.1, 1.0, 4.0, 9.0] {
            let mp = min_power_for_rate(&gains, rate);
            assert!((rate_of(&gains, &mp.powers) - rate).abs() < 1e-9, "rate {rate}");
            assert!((mp.powers.iter().sum::<f64>() - mp.total).abs() < 1e-12);
        }
    }

    #[test]
    fn min_power_inverts_waterfill() {
        let gains = [0.5, 1.0, 2.0, 4.0, 0.25];
        let budget = 3.0;
        let wf = waterfill(&gains, budget);
        let mp = min_power_for_rate(&gains, wf.rate);
        assert!(
            (mp.total - budget).abs() < 1e-8,
            "min power {} for the water-filled rate should equal the budget {budget}",
            mp.total
        );
    }

    #[test]
    fn min_power_beats_equal_split() {
        let gains = [0.1, 5.0, 1.0];
        let rate = 3.0;
        let mp = min_power_for_rate(&gains, rate);
        // Find the equal-split power reaching the same rate by bisection.
        let (mut lo, mut hi) = (0.0f64, 1e6f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rate_of(&gains, &[mid / 3.0; 3]) < rate {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(mp.total < hi);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(waterfill(&[], 1.0).rate, 0.0);
        assert_eq!(waterfill(&[1.0], 0.0).rate, 0.0);
        assert_eq!(min_power_for_rate(&[], 0.0).total, 0.0);
        assert_eq!(min_power_for_rate(&[], 1.0).total, f64::INFINITY);
        assert_eq!(min_power_for_rate(&[1.0, 2.0], 0.0).total, 0.0);
    }
}
