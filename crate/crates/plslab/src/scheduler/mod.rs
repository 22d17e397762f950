//! Joint subcarrier partitioning and power allocation for running secret-key
//! generation alongside data transmission.
//!
//! A frame has `N` subcarriers. A plan splits them into a data set and a
//! reconciliation set: the data set carries the payload while the
//! reconciliation set transports the key-reconciliation syndrome produced by
//! the probing phase. Four couplings make the split nontrivial:
//!
//! ```text
//! C_SKG >= beta  * C_D      key material must keep up with data spending
//! C_R   >= kappa * C_SKG    the syndrome must fit on its subcarriers
//! sum p_j <= N * P          total power budget
//! C_D + C_R <= C            both rates live inside the channel capacity
//! ```
//!
//! `C_SKG` is a documented model choice: every subcarrier contributes
//! `skg_rate(probe_channel_var * g_j, probe_noise_var)` during probing, so
//! the key rate does not depend on the split. Solvers maximize `C_D`:
//!
//! * [`solve_brute_force`] enumerates every partition (small `N` oracle),
//! * [`solve_exact`] is a branch-and-bound search, optimal to within the
//!   documented rate quantization step,
//! * [`solve_heuristic`] scans prefixes of the gain-sorted order, assigning
//!   the weakest subcarriers to reconciliation duty.
//!
//! Inside a fixed partition the power allocation is classic: minimum-power
//! loading for the syndrome requirement, water-filling for the data set (see
//! [`waterfill`]). [`efficiency`] Monte Carlos the long-term data rate,
//! normalized to channel capacity, of this parallel scheme against a
//! sequential baseline that pays for reconciliation with dedicated
//! equal-power time slots. [`effcap`] holds the delay-constrained allocator.

pub mod effcap;
pub mod waterfill;

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::skg::skg_rate;
use waterfill::{min_power_for_rate, waterfill};

/// Optimality granularity of [`solve_exact`] in bits: the returned value is
/// within one step of the true optimum, and plans whose best data rate falls
/// below one step count as infeasible.
pub const DEFAULT_RATE_STEP: f64 = 1e-3;

/// Largest instance [`solve_exact`] accepts by default.
pub const DEFAULT_EXACT_BOUND: usize = 64;

/// Syndrome requirements below this many bits are treated as zero; the value
/// matches the feasibility slack tolerance used by plan validation.
const SYNDROME_FLOOR: f64 = 1e-9;

/// Hard ceiling on branch-and-bound nodes: enough to enumerate every split
/// of 20 subcarriers, so searches at or below that size are always
/// exhaustive. Larger instances that exhaust the budget keep the best plan
/// found (never worse than the heuristic seed).
const NODE_BUDGET: u64 = 1 << 21;

/// One scheduling problem: per-subcarrier gains, power budget, and the
/// coupling ratios between key generation, reconciliation, and data.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerInstance {
    gains: Vec<f64>,
    power_per_subcarrier: f64,
    beta: f64,
    kappa: f64,
    snr_scale: f64,
    probe_channel_var: f64,
    probe_noise_var: f64,
}

impl SchedulerInstance {
    /// Instance over `gains` with per-subcarrier budget parameter
    /// `power_per_subcarrier` (total budget is `N` times it), key-to-data
    /// ratio `beta`, syndrome-to-key ratio `kappa`, and a linear SNR scale
    /// applied to every gain for rate computations. Probing parameters
    /// default to unit channel and noise variance; see [`Self::with_probing`].
    ///
    /// # Errors
    /// `gains` must be nonempty and positive; `power_per_subcarrier`,
    /// `kappa`, and `snr_scale` positive; `beta` in `(0, 1]`.
    pub fn new(
        gains: Vec<f64>,
        power_per_subcarrier: f64,
        beta: f64,
        kappa: f64,
        snr_scale: f64,
    ) -> Result<Self> {
        if gains.is_empty() || gains.iter().any(|&g| !(g.is_finite() && g > 0.0)) {
            return Err(Error::invalid(
                "gains",
                "must be nonempty with positive finite entries",
            ));
        }
        if !(power_per_subcarrier.is_finite() && power_per_subcarrier > 0.0) {
            return Err(Error::invalid(
                "power_per_subcarrier",
                format!("must be positive and finite, got {power_per_subcarrier}"),
            ));
        }
        if !(beta.is_finite() && beta > 0.0 && beta <= 1.0) {
            return Err(Error::invalid(
                "beta",
                format!("must lie in (0, 1], got {beta}"),
            ));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid(
                "kappa",
                format!("must be positive and finite, got {kappa}"),
            ));
        }
        if !(snr_scale.is_finite() && snr_scale > 0.0) {
            return Err(Error::invalid(
                "snr_scale",
                format!("must be positive and finite, got {snr_scale}"),
            ));
        }
        Ok(SchedulerInstance {
            gains,
            power_per_subcarrier,
            beta,
            kappa,
            snr_scale,
            probe_channel_var: 1.0,
            probe_noise_var: 1.0,
        })
    }

    /// Override the probing-phase channel and noise variances that drive the
    /// key-rate model.
    ///
    /// # Errors
    /// Both variances must be positive and finite.
    pub fn with_probing(mut self, channel_var: f64, noise_var: f64) -> Result<Self> {
        if !(channel_var.is_finite() && channel_var > 0.0) {
            return Err(Error::invalid(
                "channel_var",
                format!("must be positive and finite, got {channel_var}"),
            ));
        }
        if !(noise_var.is_finite() && noise_var > 0.0) {
            return Err(Error::invalid(
                "noise_var",
                format!("must be positive and finite, got {noise_var}"),
            ));
        }
        self.probe_channel_var = channel_var;
        self.probe_noise_var = noise_var;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn power_per_subcarrier(&self) -> f64 {
        self.power_per_subcarrier
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn snr_scale(&self) -> f64 {
        self.snr_scale
    }

    /// Total power budget `N * P`.
    pub fn total_budget(&self) -> f64 {
        self.gains.len() as f64 * self.power_per_subcarrier
    }

    /// Gains with the SNR scale folded in: the effective SNR per unit power.
    pub fn eff_gains(&self) -> Vec<f64> {
        self.gains.iter().map(|&g| g * self.snr_scale).collect()
    }

    /// Key rate of the probing phase: the sum of per-subcarrier secret-key
    /// rates at the probing SNR. Independent of the subcarrier split.
    pub fn c_skg(&self) -> f64 {
        self.gains
            .iter()
            .map(|&g| {
                skg_rate(self.probe_channel_var * g, self.probe_noise_var)
                    .expect("probing parameters validated at construction")
            })
            .sum()
    }

    /// Syndrome rate the reconciliation set must carry: `kappa * C_SKG`.
    pub fn syndrome_requirement(&self) -> f64 {
        self.kappa * self.c_skg()
    }

    /// Largest data rate the key stream can sustain: `C_SKG / beta`.
    pub fn data_rate_cap(&self) -> f64 {
        self.c_skg() / self.beta
    }

    /// Same parameters, different gain draw (used by the Monte Carlo).
    fn with_gains(&self, gains: Vec<f64>) -> SchedulerInstance {
        SchedulerInstance {
            gains,
            ..self.clone()
        }
    }
}

/// Rates of an externally supplied plan. A power-budget violation is
/// reported through `power_ok` rather than an error so sweep drivers can
/// tabulate it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanRates {
    pub c_d: f64,
    pub c_r: f64,
    pub c_skg: f64,
    pub power_ok: bool,
}

/// Evaluate the data, reconciliation, and key rates of an arbitrary
/// assignment: subcarriers listed in `data_set` carry data, all others carry
/// the syndrome, each at its entry in `powers`.
///
/// # Errors
/// `powers` must match the instance length with nonnegative finite entries;
/// `data_set` must hold unique in-range indices.
pub fn rates_for_plan(
    inst: &SchedulerInstance,
    data_set: &[usize],
    powers: &[f64],
) -> Result<PlanRates> {
    let n = inst.n();
    if powers.len() != n {
        return Err(Error::LengthMismatch {
            a: powers.len(),
            b: n,
        });
    }
    if powers.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
        return Err(Error::invalid(
            "powers",
            "entries must be nonnegative and finite",
        ));
    }
    let mut in_data = vec![false; n];
    for &j in data_set {
        if j >= n {
            return Err(Error::invalid(
                "data_set",
                format!("index {j} out of range for {n} subcarriers"),
            ));
        }
        if in_data[j] {
            return Err(Error::invalid("data_set", format!("duplicate index {j}")));
        }
        in_data[j] = true;
    }
    let eff = inst.eff_gains();
    let mut c_d = 0.0;
    let mut c_r = 0.0;
    for j in 0..n {
        let rate = (1.0 + powers[j] * eff[j]).log2();
        if in_data[j] {
            c_d += rate;
        } else {
            c_r += rate;
        }
    }
    let spent: f64 = powers.iter().sum();
    let budget = inst.total_budget();
    Ok(PlanRates {
        c_d,
        c_r,
        c_skg: inst.c_skg(),
        power_ok: spent <= budget * (1.0 + 1e-12) + 1e-12,
    })
}

/// A feasible schedule: the data/reconciliation split, per-subcarrier
/// powers, and the three rates it achieves.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierPlan {
    pub data_set: Vec<usize>,
    pub recon_set: Vec<usize>,
    pub powers: Vec<f64>,
    pub c_d: f64,
    pub c_r: f64,
    pub c_skg: f64,
}

impl SubcarrierPlan {
    /// Slack of the four feasibility constraints, in order: key-to-data
    /// ratio, syndrome transport, power budget, total capacity. A valid plan
    /// has every slack above `-1e-9`.
    pub fn constraint_slacks(&self, inst: &SchedulerInstance) -> [f64; 4] {
        let budget = inst.total_budget();
        let c_total = waterfill(&inst.eff_gains(), budget).rate;
        let spent: f64 = self.powers.iter().sum();
        [
            self.c_skg - inst.beta() * self.c_d,
            self.c_r - inst.kappa() * self.c_skg,
            budget - spent,
            c_total - (self.c_d + self.c_r),
        ]
    }
}

/// Which requirement rules out every plan of an infeasible instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BindingConstraint {
    /// The key stream cannot sustain any meaningful data rate.
    KeyToDataRatio,
    /// The syndrome does not fit the power budget even using every subcarrier.
    SyndromeTransport,
    /// Syndrome transport is possible but exhausts the budget.
    PowerBudget,
}

impl fmt::Display for BindingConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            BindingConstraint::KeyToDataRatio => "key-to-data ratio",
            BindingConstraint::SyndromeTransport => "syndrome transport",
            BindingConstraint::PowerBudget => "power budget",
        };
        f.write_str(name)
    }
}

/// Result of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Feasible(SubcarrierPlan),
    Infeasible(BindingConstraint),
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible(_))
    }

    pub fn plan(&self) -> Option<&SubcarrierPlan> {
        match self {
            SolveOutcome::Feasible(p) => Some(p),
            SolveOutcome::Infeasible(_) => None,
        }
    }

    pub fn binding(&self) -> Option<BindingConstraint> {
        match self {
            SolveOutcome::Feasible(_) => None,
            SolveOutcome::Infeasible(b) => Some(*b),
        }
    }
}

/// Precomputed per-solve context shared by all solvers.
struct SolveCtx {
    eff: Vec<f64>,
    budget: f64,
    /// Syndrome requirement, floored to zero when below tolerance.
    s_req: f64,
    cap: f64,
    c_skg: f64,
}

impl SolveCtx {
    fn new(inst: &SchedulerInstance) -> SolveCtx {
        let c_skg = inst.c_skg();
        let raw = inst.kappa() * c_skg;
        SolveCtx {
            eff: inst.eff_gains(),
            budget: inst.total_budget(),
            s_req: if raw < SYNDROME_FLOOR { 0.0 } else { raw },
            cap: c_skg / inst.beta(),
            c_skg,
        }
    }
}

/// Best plan for a fixed split: minimum-power loading carries the syndrome
/// on the reconciliation set, the remaining budget is water-filled over the
/// data set, and the data rate is clamped at the key-stream cap (clamping
/// re-solves the data powers at the cap so surplus power is left unspent).
/// `None` when the syndrome cannot fit the budget on this split.
fn evaluate_split(ctx: &SolveCtx, in_data: &[bool]) -> Option<SubcarrierPlan> {
    let mut data_idx = Vec::new();
    let mut recon_idx = Vec::new();
    for (j, &d) in in_data.iter().enumerate() {
        if d {
            data_idx.push(j);
        } else {
            recon_idx.push(j);
        }
    }
    let recon_gains: Vec<f64> = recon_idx.iter().map(|&j| ctx.eff[j]).collect();
    let mp = min_power_for_rate(&recon_gains, ctx.s_req);
    if !(mp.total <= ctx.budget + 1e-12) {
        return None;
    }
    let leftover = (ctx.budget - mp.total).max(0.0);
    let data_gains: Vec<f64> = data_idx.iter().map(|&j| ctx.eff[j]).collect();
    let wf = waterfill(&data_gains, leftover);
    let (c_d, data_powers) = if wf.rate > ctx.cap {
        let clamped = min_power_for_rate(&data_gains, ctx.cap);
        (ctx.cap, clamped.powers)
    } else {
        (wf.rate, wf.powers)
    };
    let mut powers = vec![0.0; in_data.len()];
    for (slot, &j) in recon_idx.iter().enumerate() {
        powers[j] = mp.powers[slot];
    }
    for (slot, &j) in data_idx.iter().enumerate() {
        powers[j] = data_powers[slot];
    }
    Some(SubcarrierPlan {
        data_set: data_idx,
        recon_set: recon_idx,
        powers,
        c_d,
        c_r: ctx.s_req,
        c_skg: ctx.c_skg,
    })
}

/// Name the constraint that blocks an instance with no useful plan.
fn attribute_infeasibility(ctx: &SolveCtx, rate_step: f64) -> BindingConstraint {
    let all_mp = min_power_for_rate(&ctx.eff, ctx.s_req);
    if !(all_mp.total <= ctx.budget + 1e-12) {
        BindingConstraint::SyndromeTransport
    } else if ctx.cap < rate_step {
        BindingConstraint::KeyToDataRatio
    } else {
        BindingConstraint::PowerBudget
    }
}

fn finish(
    ctx: &SolveCtx,
    best: Option<SubcarrierPlan>,
    rate_step: f64,
) -> SolveOutcome {
    match best {
        Some(plan) if plan.c_d >= rate_step => SolveOutcome::Feasible(plan),
        _ => SolveOutcome::Infeasible(attribute_infeasibility(ctx, rate_step)),
    }
}

/// Exhaustive oracle: every one of the `2^N` splits is evaluated.
///
/// # Errors
/// Limited to `N <= 20` subcarriers.
pub fn solve_brute_force(inst: &SchedulerInstance) -> Result<SolveOutcome> {
    let n = inst.n();
    if n > 20 {
        return Err(Error::invalid(
            "n",
            format!("brute force is limited to 20 subcarriers, got {n}"),
        ));
    }
    let ctx = SolveCtx::new(inst);
    let mut best: Option<SubcarrierPlan> = None;
    let mut best_val = f64::NEG_INFINITY;
    for mask in 0u32..(1u32 << n) {
        let in_data: Vec<bool> = (0..n).map(|j| mask & (1 << j) != 0).collect();
        if let Some(plan) = evaluate_split(&ctx, &in_data) {
            if plan.c_d > best_val {
                best_val = plan.c_d;
                best = Some(plan);
            }
        }
    }
    Ok(finish(&ctx, best, DEFAULT_RATE_STEP))
}

/// Weakest-prefix scan: sort subcarriers by gain and hand the weakest `k` to
/// reconciliation duty, keeping the best data rate over all prefix lengths.
/// Stops early once the key-stream cap is reached, as no split can beat it.
pub fn solve_heuristic(inst: &SchedulerInstance) -> Result<SolveOutcome> {
    let n = inst.n();
    let ctx = SolveCtx::new(inst);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        ctx.eff[a]
            .partial_cmp(&ctx.eff[b])
            .expect("gains are finite")
            .then(a.cmp(&b))
    });
    let mut best: Option<SubcarrierPlan> = None;
    let mut best_val = f64::NEG_INFINITY;
    let k_start = if ctx.s_req == 0.0 { 0 } else { 1 };
    for k in k_start..=n {
        let mut in_data = vec![true; n];
        for &j in &order[..k] {
            in_data[j] = false;
        }
        if let Some(plan) = evaluate_split(&ctx, &in_data) {
            if plan.c_d > best_val {
                best_val = plan.c_d;
                best = Some(plan);
            }
            if best_val >= ctx.cap - 1e-12 {
                break;
            }
        }
    }
    Ok(finish(&ctx, best, DEFAULT_RATE_STEP))
}

/// Optimal split by branch-and-bound with the defaults
/// [`DEFAULT_EXACT_BOUND`] and [`DEFAULT_RATE_STEP`]; see
/// [`solve_exact_opts`].
pub fn solve_exact(inst: &SchedulerInstance) -> Result<SolveOutcome> {
    solve_exact_opts(inst, DEFAULT_EXACT_BOUND, DEFAULT_RATE_STEP)
}

/// Optimal split by depth-first branch-and-bound over subcarrier
/// assignments, seeded with the heuristic plan. Subcarriers are decided in
/// descending gain order; at each node the undecided tail is relaxed to
/// serve both sides at once, which upper-bounds every completion. The
/// returned value is within `rate_step` of the true optimum for every
/// instance of at most 20 subcarriers, and for larger ones whenever the
/// key-stream cap is reached (the search then terminates immediately).
/// Beyond that scale a hard internal node budget may stop the search early,
/// in which case the best plan found is returned.
///
/// # Errors
/// `inst.n()` must not exceed `max_n`, and `rate_step` must be positive.
pub fn solve_exact_opts(
    inst: &SchedulerInstance,
    max_n: usize,
    rate_step: f64,
) -> Result<SolveOutcome> {
    let n = inst.n();
    if n > max_n {
        return Err(Error::invalid(
            "n",
            format!("instance has {n} subcarriers but the exact solver is bounded at {max_n}"),
        ));
    }
    if !(rate_step.is_finite() && rate_step > 0.0) {
        return Err(Error::invalid(
            "rate_step",
            format!("must be positive and finite, got {rate_step}"),
        ));
    }
    let ctx = SolveCtx::new(inst);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        ctx.eff[b]
            .partial_cmp(&ctx.eff[a])
            .expect("gains are finite")
            .then(a.cmp(&b))
    });

    let mut best: Option<SubcarrierPlan> = None;
    let mut best_val = f64::NEG_INFINITY;
    if let SolveOutcome::Feasible(plan) = solve_heuristic(inst)? {
        best_val = plan.c_d;
        best = Some(plan);
    }

    let mut assigned: Vec<bool> = Vec::with_capacity(n);
    let mut nodes = 0u64;
    branch(
        &ctx,
        &order,
        &mut assigned,
        &mut best,
        &mut best_val,
        rate_step,
        &mut nodes,
    );
    Ok(finish(&ctx, best, rate_step))
}

/// One branch-and-bound node: `assigned[i]` records the data/reconciliation
/// decision for `order[i]`, positions `assigned.len()..` are undecided.
fn branch(
    ctx: &SolveCtx,
    order: &[usize],
    assigned: &mut Vec<bool>,
    best: &mut Option<SubcarrierPlan>,
    best_val: &mut f64,
    rate_step: f64,
    nodes: &mut u64,
) {
    // Nothing beats the key-stream cap; stop the whole search once reached.
    if *best_val >= ctx.cap - 1e-12 {
        return;
    }
    *nodes += 1;
    if *nodes > NODE_BUDGET {
        return;
    }
    let n = order.len();
    let d = assigned.len();

    // Relaxation: undecided subcarriers serve both sides simultaneously.
    let mut recon_pool = Vec::with_capacity(n - d + d);
    let mut data_pool = Vec::with_capacity(n - d + d);
    for (i, &flag) in assigned.iter().enumerate() {
        let g = ctx.eff[order[i]];
        if flag {
            data_pool.push(g);
        } else {
            recon_pool.push(g);
        }
    }
    for &j in &order[d..] {
        recon_pool.push(ctx.eff[j]);
        data_pool.push(ctx.eff[j]);
    }
    let mp = min_power_for_rate(&recon_pool, ctx.s_req);
    if !(mp.total <= ctx.budget + 1e-12) {
        return; // even full flexibility cannot carry the syndrome here
    }
    let ub = waterfill(&data_pool, ctx.budget - mp.total)
        .rate
        .min(ctx.cap);
    let incumbent_feasible = *best_val >= rate_step;
    if (incumbent_feasible && ub <= *best_val + rate_step) || ub < rate_step {
        return;
    }

    if d == n {
        let mut in_data = vec![false; n];
        for (i, &flag) in assigned.iter().enumerate() {
            in_data[order[i]] = flag;
        }
        if let Some(plan) = evaluate_split(ctx, &in_data) {
            if plan.c_d > *best_val {
                *best_val = plan.c_d;
                *best = Some(plan);
            }
        }
        return;
    }

    assigned.push(true);
    branch(ctx, order, assigned, best, best_val, rate_step, nodes);
    assigned.pop();
    assigned.push(false);
    branch(ctx, order, assigned, best, best_val, rate_step, nodes);
    assigned.pop();
}

/// How reconciliation traffic shares the frame with data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulingMode {
    /// Syndrome and data ride disjoint subcarrier sets simultaneously.
    Parallel,
    /// Dedicated equal-power slots carry the syndrome, then data gets the
    /// whole band for the remaining fraction of the frame.
    Sequential,
}

/// Which solver drives the parallel mode inside [`efficiency`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Exact,
    Heuristic,
}

/// Long-term spectral efficiency: the mean, over fading draws, of the data
/// rate achieved by `mode` normalized to the water-filled channel capacity
/// of the same draw. Infeasible draws contribute zero, as do draws whose
/// data rate falls below the rate quantization step.
///
/// # Errors
/// `sessions` must be at least 1; solver errors propagate.
pub fn efficiency(
    mode: SchedulingMode,
    solver: SolverChoice,
    inst: &SchedulerInstance,
    sessions: usize,
    rng: &mut Rng,
) -> Result<f64> {
    if sessions == 0 {
        return Err(Error::invalid("sessions", "must be at least 1"));
    }
    let mut acc = 0.0;
    for _ in 0..sessions {
        let drawn: Vec<f64> = inst
            .gains
            .iter()
            .map(|&g| g * rng.exponential(1.0))
            .collect();
        let di = inst.with_gains(drawn);
        let cwf = waterfill(&di.eff_gains(), di.total_budget()).rate;
        if cwf <= 0.0 {
            continue;
        }
        let eff = match mode {
            SchedulingMode::Parallel => {
                let outcome = match solver {
                    SolverChoice::Exact => solve_exact(&di)?,
                    SolverChoice::Heuristic => solve_heuristic(&di)?,
                };
                match outcome {
                    SolveOutcome::Feasible(plan) => plan.c_d / cwf,
                    SolveOutcome::Infeasible(_) => 0.0,
                }
            }
            SchedulingMode::Sequential => {
                let s_req = di.syndrome_requirement();
                let c_slot: f64 = di
                    .eff_gains()
                    .iter()
                    .map(|&g| (1.0 + di.power_per_subcarrier * g).log2())
                    .sum();
                if c_slot <= 0.0 {
                    continue;
                }
                let tau = s_req / c_slot;
                if tau >= 1.0 {
                    continue;
                }
                let c_d = ((1.0 - tau) * cwf).min(di.data_rate_cap());
                if c_d < DEFAULT_RATE_STEP {
                    continue;
                }
                c_d / cwf
            }
        };
        acc += eff;
    }
    Ok(acc / sessions as f64)
}
