//! The eight experiment subcommands.
//!
//! Each command resolves its parameters in three layers (built-in defaults,
//! then the `--config` key=value file, then explicit flags), drives the
//! library, and renders one CSV document. The document header records the
//! subcommand, seed, and every effective parameter, and all randomness flows
//! through fixed `(seed, stream)` pairs, so a rerun with identical inputs
//! reproduces the output byte for byte.

use std::path::PathBuf;

use clap::Args;
use plslab::adversary::{
    binary_mutual_information, counter_injection, observe_under_attack, solve_stackelberg,
    InjectionScenario, JammingGame,
};
use plslab::auth::{authenticate, enroll, proximity_fit, CrpDatabase, PufDevice, TicketStore};
use plslab::channel::{probe_pair, rss_sample, FadingConfig, PathLossModel};
use plslab::fblen::{max_log_code_size, secrecy_rate_fblen, ChannelSpec, FblenQuery};
use plslab::rng::Rng;
use plslab::scheduler::effcap::{effcap_power_alloc, effective_capacity, EffCapQuery, GainFading};
use plslab::scheduler::waterfill::waterfill;
use plslab::scheduler::{
    efficiency, solve_exact, solve_heuristic, SchedulerInstance, SchedulingMode, SolveOutcome,
    SolverChoice,
};
use plslab::secrecy::{broadcast_region, ergodic_region_rayleigh, GaussianBroadcast};
use plslab::skg::{run_session, BlockCode, Quantizer, SkgConfig};
use plslab::{Complex64, Error};

use crate::params::{num, sci, CliError, CliResult, CsvDoc, Resolver};

/// Flags every subcommand shares.
#[derive(Debug, Args)]
pub struct Common {
    /// Root seed; every random quantity in the run derives from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the CSV to this path instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value parameter file; explicit flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Common {
    fn resolver(&self) -> CliResult<Resolver> {
        Resolver::new(self.config.as_deref())
    }

    fn emit(&self, doc: CsvDoc) -> CliResult<()> {
        doc.write_out(self.out.as_deref())
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Inclusive linear grid with `steps` points (a single point when
/// `steps == 1`, pinned to `lo`).
fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

// ---------------------------------------------------------------------------
// region
// ---------------------------------------------------------------------------

/// Secrecy rate region of a two-layer Gaussian broadcast.
#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub common: Common,
    /// static (fixed SNRs) or ergodic (Rayleigh-faded eavesdropper).
    #[arg(long)]
    pub mode: Option<String>,
    /// Intended receiver SNR, dB (static mode).
    #[arg(long, allow_negative_numbers = true)]
    pub snr_bob_db: Option<f64>,
    /// Eavesdropper SNR, dB (static mode).
    #[arg(long, allow_negative_numbers = true)]
    pub snr_eve_db: Option<f64>,
    /// Both terminals' mean SNR, dB (ergodic mode).
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Eavesdropper fading variance (ergodic mode).
    #[arg(long, allow_negative_numbers = true)]
    pub sigma2_eve: Option<f64>,
    /// Number of power-split points along the boundary.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Monte Carlo draws per boundary point (ergodic mode).
    #[arg(long)]
    pub draws: Option<usize>,
}

pub fn run_region(args: &RegionArgs) -> CliResult<()> {
    let mut r = args.common.resolver()?;
    let mode = r.choice(
        "mode",
        args.mode.clone(),
        "static",
        &["static", "ergodic"],
    )?;
    let snr_bob_db = r.f64("snr_bob_db", args.snr_bob_db, 10.0)?;
    let snr_eve_db = r.f64("snr_eve_db", args.snr_eve_db, 5.0)?;
    let snr_db = r.f64("snr_db", args.snr_db, 5.0)?;
    let sigma2_eve = r.f64("sigma2_eve", args.sigma2_eve, 1.0)?;
    let grid = r.usize("grid", args.grid, 51)?;
    let draws = r.usize("draws", args.draws, 100_000)?;
    let resolved = r.finish()?;

    let region = match mode.as_str() {
        "static" => {
            let bc = GaussianBroadcast::new(snr_bob_db, snr_eve_db)?;
            broadcast_region(&bc, grid)?
        }
        _ => {
            let mut rng = Rng::new(args.common.seed, 0);
            ergodic_region_rayleigh(snr_db, sigma2_eve, grid, draws, &mut rng)?
        }
    };

    let mut doc = CsvDoc::new("region", args.common.seed, &resolved);
    doc.columns(&["alpha", "common_rate", "secret_rate"]);
    for (alpha, pt) in region.power_split_grid.iter().zip(&region.points) {
        doc.row(&[num(*alpha), num(pt.common_rate), num(pt.secret_rate)]);
    }
    args.common.emit(doc)
}

// ---------------------------------------------------------------------------
// fblen
// ---------------------------------------------------------------------------

/// Finite-blocklength rate versus blocklength for one channel.
#[derive(Debug, Args)]
pub struct FblenArgs {
    #[command(flatten)]
    pub common: Common,
    /// Channel family: awgn, bsc, semi_wiretap, or gaussian_wiretap.
    #[arg(long)]
    pub kind: Option<String>,
    /// SNR for the awgn kind, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Crossover probability for the bsc kind.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Eavesdropper crossover for the semi_wiretap kind.
    #[arg(long, allow_negative_numbers = true)]
    pub p_eve: Option<f64>,
    /// Intended receiver SNR for the gaussian_wiretap kind, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_bob_db: Option<f64>,
    /// Eavesdropper SNR for the gaussian_wiretap kind, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_eve_db: Option<f64>,
    /// Block error probability budget.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Leakage budget (wiretap kinds only).
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Smallest blocklength in the sweep.
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Largest blocklength in the sweep.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Blocklength increment.
    #[arg(long)]
    pub n_step: Option<usize>,
    /// Monte Carlo draws for the gaussian_wiretap dispersion estimate.
    #[arg(long)]
    pub draws: Option<usize>,
}

pub fn run_fblen(args: &FblenArgs) -> CliResult<()> {
    let mut r = args.common.resolver()?;
    let kind = r.choice(
        "kind",
        args.kind.clone(),
        "awgn",
        &["awgn", "bsc", "semi_wiretap", "gaussian_wiretap"],
    )?;
    let snr_db = r.f64("snr_db", args.snr_db, 0.0)?;
    let p = r.f64("p", args.p, 0.11)?;
    let p_eve = r.f64("p_eve", args.p_eve, 0.11)?;
    let snr_bob_db = r.f64("snr_bob_db", args.snr_bob_db, 3.0)?;
    let snr_eve_db = r.f64("snr_eve_db", args.snr_eve_db, -3.0)?;
    let epsilon = r.f64("epsilon", args.epsilon, 1e-3)?;
    let delta = r.f64("delta", args.delta, 1e-3)?;
    let n_min = r.usize("n_min", args.n_min, 100)?;
    let n_max = r.usize("n_max", args.n_max, 4000)?;
    let n_step = r.usize("n_step", args.n_step, 100)?;
    let draws = r.usize("draws", args.draws, 200_000)?;
    let resolved = r.finish()?;

    if n_step == 0 || n_min == 0 || n_max < n_min {
        return Err(CliError::Usage(
            "need n_min >= 1, n_step >= 1, n_max >= n_min".into(),
        ));
    }

    let spec = match kind.as_str() {
        "awgn" => ChannelSpec::real_awgn(db_to_linear(snr_db))?,
        "bsc" => ChannelSpec::bsc(p)?,
        "semi_wiretap" => ChannelSpec::semi_deterministic_wiretap(p_eve)?,
        _ => {
            let mut rng = Rng::new(args.common.seed, 0);
            ChannelSpec::gaussian_wiretap(
                db_to_linear(snr_bob_db),
                db_to_linear(snr_eve_db),
                draws,
                &mut rng,
            )?
        }
    };

    let mut doc = CsvDoc::new("fblen", args.common.seed, &resolved);
    doc.columns(&["n", "rate", "kind", "epsilon", "delta"]);
    let mut n = n_min;
    while n <= n_max {
        let rate = if spec.is_wiretap() {
            let q = FblenQuery::new(n, epsilon)?.with_leakage(delta)?;
            secrecy_rate_fblen(&spec, &q)?
        } else {
            let q = FblenQuery::new(n, epsilon)?;
            max_log_code_size(&spec, &q)? / n as f64
        };
        doc.row(&[
            n.to_string(),
            num(rate),
            kind.clone(),
            num(epsilon),
            num(delta),
        ]);
        n += n_step;
    }
    args.common.emit(doc)
}

// ---------------------------------------------------------------------------
// skg-fer
// ---------------------------------------------------------------------------

/// Key-agreement frame error rate across an SNR sweep.
#[derive(Debug, Args)]
pub struct SkgFerArgs {
    #[command(flatten)]
    pub common: Common,
    /// Lowest probing SNR, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_min_db: Option<f64>,
    /// Highest probing SNR, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_max_db: Option<f64>,
    /// Number of SNR points (inclusive, evenly spaced).
    #[arg(long)]
    pub snr_steps: Option<usize>,
    /// Key-agreement sessions per SNR point.
    #[arg(long)]
    pub sessions: Option<usize>,
    /// Channel probes per session.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Quantizer levels (power of two).
    #[arg(long)]
    pub levels: Option<usize>,
    /// Guard band fraction discarded around each quantizer boundary.
    #[arg(long, allow_negative_numbers = true)]
    pub guard: Option<f64>,
    /// Final key length, bits.
    #[arg(long)]
    pub key_bits: Option<usize>,
}

pub fn run_skg_fer(args: &SkgFerArgs) -> CliResult<()> {
    let mut r = args.common.resolver()?;
    let snr_min_db = r.f64("snr_min_db", args.snr_min_db, 0.0)?;
    let snr_max_db = r.f64("snr_max_db", args.snr_max_db, 20.0)?;
    let snr_steps = r.usize("snr_steps", args.snr_steps, 9)?;
    let sessions = r.usize("sessions", args.sessions, 200)?;
    let samples = r.usize("samples", args.samples, 512)?;
    let levels = r.usize("levels", args.levels, 2)?;
    let guard = r.f64("guard", args.guard, 0.1)?;
    let key_bits = r.usize("key_bits", args.key_bits, 32)?;
    let resolved = r.finish()?;

    if sessions == 0 || samples == 0 {
        return Err(CliError::Usage("need sessions >= 1 and samples >= 1".into()));
    }

    let cfg = SkgConfig::new(
        Quantizer::new(levels, guard)?,
        BlockCode::hamming_7_4(),
        key_bits,
        args.common.seed,
    )?;
    let fading = FadingConfig::new(1.0)?;
    let probe = Complex64::new(1.0, 0.0);

    let mut doc = CsvDoc::new("skg-fer", args.common.seed, &resolved);
    doc.columns(&["snr_db", "sessions", "fer", "undetected_rate"]);
    for (idx, snr_db) in linspace(snr_min_db, snr_max_db, snr_steps).iter().enumerate() {
        let noise_var = 1.0 / db_to_linear(*snr_db);
        let mut rng = Rng::new(args.common.seed, idx as u64);
        let mut failures = 0usize;
        let mut undetected = 0usize;
        for _ in 0..sessions {
            let mut za = Vec::with_capacity(samples);
            let mut zb = Vec::with_capacity(samples);
            for _ in 0..samples {
                let draw = probe_pair(&mut rng, &fading, noise_var, probe, probe);
                za.push(draw.z_a);
                zb.push(draw.z_b);
            }
            // A channel too poor to source a key at all is a failed frame,
            // not a broken experiment.
            let sess = match run_session(&za, &zb, &cfg) {
                Ok(sess) => sess,
                Err(
                    Error::InsufficientResidualEntropy { .. }
                    | Error::GuardBandTooWide
                    | Error::InvalidParameter { name: "samples", .. },
                ) => {
                    failures += 1;
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            if !sess.success() {
                failures += 1;
            } else if sess.bits_a() != sess.bits_b() {
                // Digest matched although the raw sequences differed: count
                // how often reconciliation repaired them silently vs. a true
                // undetected disagreement. A successful session reconciles
                // onto Alice's bits, so disagreement after success is only
                // possible if the corrected sequence still differs — which
                // the digest would catch; this counter should stay zero.
                let code = &cfg.code;
                let rec = plslab::skg::reconcile(sess.bits_a(), sess.bits_b(), code)?;
                if rec.bits_reconciled != sess.bits_a() {
                    undetected += 1;
                }
            }
        }
        doc.row(&[
            num(*snr_db),
            sessions.to_string(),
            num(failures as f64 / sessions as f64),
            num(undetected as f64 / sessions as f64),
        ]);
    }
    args.common.emit(doc)
}

// ---------------------------------------------------------------------------
// schedule
// ---------------------------------------------------------------------------

/// Pilot/data scheduling efficiency over the key-renewal grid.
#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of subcarriers.
    #[arg(long)]
    pub n: Option<usize>,
    /// Mean subcarrier SNR, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Per-subcarrier transmit power.
    #[arg(long, allow_negative_numbers = true)]
    pub power: Option<f64>,
    /// Key-consumption to key-generation ratio.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Comma-separated key-renewal fractions to sweep.
    #[arg(long)]
    pub beta: Option<String>,
    /// Fading sessions per efficiency estimate.
    #[arg(long)]
    pub sessions: Option<usize>,
    /// exact, heuristic, or both.
    #[arg(long)]
    pub solver: Option<String>,
    /// efficiency (fading average) or solve (nominal instance detail).
    #[arg(long)]
    pub mode: Option<String>,
}

pub fn run_schedule(args: &ScheduleArgs) -> CliResult<()> {
    let mut r = args.common.resolver()?;
    let n = r.usize("n", args.n, 64)?;
    let snr_db = r.f64("snr_db", args.snr_db, 10.0)?;
    let power = r.f64("power", args.power, 1.0)?;
    let kappa = r.f64("kappa", args.kappa, 2.0)?;
    let betas = r.f64_list("beta", args.beta.clone(), "0.25,0.5,0.75,1.0")?;
    let sessions = r.usize("sessions", args.sessions, 16)?;
    let solver = r.choice(
        "solver",
        args.solver.clone(),
        "both",
        &["exact", "heuristic", "both"],
    )?;
    let mode = r.choice(
        "mode",
        args.mode.clone(),
        "efficiency",
        &["efficiency", "solve"],
    )?;
    let resolved = r.finish()?;

    let solvers: Vec<(SolverChoice, &str)> = match solver.as_str() {
        "exact" => vec![(SolverChoice::Exact, "exact")],
        "heuristic" => vec![(SolverChoice::Heuristic, "heuristic")],
        _ => vec![
            (SolverChoice::Exact, "exact"),
            (SolverChoice::Heuristic, "heuristic"),
        ],
    };

    let mut doc = CsvDoc::new("schedule", args.common.seed, &resolved);
    doc.columns(&["beta", "mode", "efficiency", "solver"]);
    let snr_scale = db_to_linear(snr_db);
    for (idx, &beta) in betas.iter().enumerate() {
        let inst = SchedulerInstance::new(vec![1.0; n], power, beta, kappa, snr_scale)?;
        match mode.as_str() {
            "efficiency" => {
                // Every row of one beta re-seeds the same stream, so all
                // solver/mode variants face identical fading sessions.
                for (choice, name) in &solvers {
                    let mut rng = Rng::new(args.common.seed, idx as u64);
                    let eff =
                        efficiency(SchedulingMode::Parallel, *choice, &inst, sessions, &mut rng)?;
                    doc.row(&[num(beta), "parallel".into(), num(eff), (*name).into()]);
                }
                let mut rng = Rng::new(args.common.seed, idx as u64);
                let eff = efficiency(
                    SchedulingMode::Sequential,
                    solvers[0].0,
                    &inst,
                    sessions,
                    &mut rng,
                )?;
                doc.row(&[num(beta), "sequential".into(), num(eff), solvers[0].1.into()]);
            }
            _ => {
                // One-shot solve of the nominal instance; efficiency is the
                // achieved data rate over the water-filled capacity, or the
                // literal word "infeasible".
                let cwf = waterfill(&inst.eff_gains(), inst.total_budget()).rate;
                for (choice, name) in &solvers {
                    let outcome = match choice {
                        SolverChoice::Exact => solve_exact(&inst)?,
                        SolverChoice::Heuristic => solve_heuristic(&inst)?,
                    };
                    let cell = match &outcome {
                        SolveOutcome::Feasible(plan) if cwf > 0.0 => num(plan.c_d / cwf),
                        SolveOutcome::Feasible(_) => num(0.0),
                        SolveOutcome::Infeasible(_) => "infeasible".to_string(),
                    };
                    doc.row(&[num(beta), "solve".into(), cell, (*name).into()]);
                }
            }
        }
    }
    args.common.emit(doc)
}

// ---------------------------------------------------------------------------
// effcap
// ---------------------------------------------------------------------------

/// Delay-aware power allocation and its effective capacity.
#[derive(Debug, Args)]
pub struct EffCapArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated QoS exponents to sweep.
    #[arg(long)]
    pub theta: Option<String>,
    /// Number of subcarriers.
    #[arg(long)]
    pub n: Option<usize>,
    /// Total power budget.
    #[arg(long, allow_negative_numbers = true)]
    pub budget: Option<f64>,
    /// Frame duration, seconds.
    #[arg(long, allow_negative_numbers = true)]
    pub frame: Option<f64>,
    /// Subcarrier bandwidth, hertz.
    #[arg(long, allow_negative_numbers = true)]
    pub bandwidth: Option<f64>,
    /// static or rayleigh service fading in the Monte Carlo.
    #[arg(long)]
    pub fading: Option<String>,
    /// Monte Carlo frames for the effective-capacity estimate.
    #[arg(long)]
    pub draws: Option<usize>,
}

pub fn run_effcap(args: &EffCapArgs) -> CliResult<()> {
    let mut r = args.common.resolver()?;
    let thetas = r.f64_list("theta", args.theta.clone(), "0,0.001,0.01,0.1,1")?;
    let n = r.usize("n", args.n, 8)?;
    let budget = r.f64("budget", args.budget, 4.0)?;
    let frame = r.f64("frame", args.frame, 0.001)?;
    let bandwidth = r.f64("bandwidth", args.bandwidth, 100_000.0)?;
    let fading = r.choice(
        "fading",
        args.fading.clone(),
        "rayleigh",
        &["static", "rayleigh"],
    )?;
    let draws = r.usize("draws", args.draws, 20_000)?;
    let resolved = r.finish()?;

    if n == 0 {
        return Err(CliError::Usage("need n >= 1".into()));
    }
    let fading = match fading.as_str() {
        "static" => GainFading::Static,
        _ => GainFading::Rayleigh,
    };

    // One gain profile per run, drawn from its own stream so theta sweeps
    // see the same channel.
    let mut gain_rng = Rng::new(args.common.seed, 0);
    let est_gains: Vec<f64> = (0..n).map(|_| 0.5 + 3.5 * gain_rng.uniform()).collect();

    let mut doc = CsvDoc::new("effcap", args.common.seed, &resolved);
    doc.columns(&["theta", "subcarrier", "est_gain", "power", "eff_capacity"]);
    for (idx, &theta) in thetas.iter().enumerate() {
        let q = EffCapQuery::new(theta, frame, bandwidth, est_gains.clone())?;
        let alloc = effcap_power_alloc(&q, budget)?;
        let mut rng = Rng::new(args.common.seed, 1 + idx as u64);
        let ec = effective_capacity(&q, &alloc.powers, &est_gains, fading, draws, &mut rng)?;
        for (s, (&g, &p)) in est_gains.iter().zip(&alloc.powers).enumerate() {
            doc.row(&[num(theta), s.to_string(), num(g), num(p), num(ec)]);
        }
    }
    args.common.emit(doc)
}

// ---------------------------------------------------------------------------
// attack
// ---------------------------------------------------------------------------

/// Pilot-injection attack statistics with and without randomized probing.
#[derive(Debug, Args)]
pub struct AttackArgs {
    #[command(flatten)]
    pub common: Common,
    /// Channel geometries for the injection-identity check.
    #[arg(long)]
    pub channels: Option<usize>,
    /// Probing sessions for the correlation statistics.
    #[arg(long)]
    pub sessions: Option<usize>,
    /// Sessions for the key-bit mutual-information estimate.
    #[arg(long)]
    pub mi_sessions: Option<usize>,
    /// Receiver noise variance during probing.
    #[arg(long, allow_negative_numbers = true)]
    pub noise_var: Option<f64>,
}

fn draw_channels(rng: &mut Rng) -> ([Complex64; 2], [Complex64; 2]) {
    let h_a = [rng.complex_gaussian(1.0), rng.complex_gaussian(1.0)];
    let h_b = [rng.complex_gaussian(1.0), rng.complex_gaussian(1.0)];
    (h_a, h_b)
}

/// Geometry draws conditioned away from the near-singular precoder region,
/// where the injected term's power is heavy-tailed and sample statistics
/// need far more sessions to settle.
fn draw_channels_conditioned(rng: &mut Rng) -> ([Complex64; 2], [Complex64; 2]) {
    loop {
        let (h_a, h_b) = draw_channels(rng);
        if (h_a[0] - h_b[0]).norm() >= 0.3 {
            return (h_a, h_b);
        }
    }
}

pub fn run_attack(args: &AttackArgs) -> CliResult<()> {
    let mut r = args.common.resolver()?;
    let channels = r.usize("channels", args.channels, 10_000)?;
    let sessions = r.usize("sessions", args.sessions, 100_000)?;
    let mi_sessions = r.usize("mi_sessions", args.mi_sessions, 50_000)?;
    let noise_var = r.f64("noise_var", args.noise_var, 0.01)?;
    let resolved = r.finish()?;

    if channels == 0 || sessions == 0 || mi_sessions == 0 {
        return Err(CliError::Usage(
            "need channels, sessions, mi_sessions >= 1".into(),
        ));
    }

    // Identity: both victims receive the same injected value on every
    // non-singular geometry.
    let mut rng = Rng::new(args.common.seed, 0);
    let mut max_rel = 0.0f64;
    for _ in 0..channels {
        let (h_a, h_b) = draw_channels(&mut rng);
        let x_j = rng.complex_gaussian(1.0);
        let scn = match InjectionScenario::new(Complex64::new(0.0, 0.0), h_a, h_b, x_j) {
            Ok(s) => s,
            Err(Error::PrecoderSingular) => continue,
            Err(e) => return Err(e.into()),
        };
        let at_a = (h_a[0] * scn.precoder[0] + h_a[1] * scn.precoder[1]) * x_j;
        let at_b = (h_b[0] * scn.precoder[0] + h_b[1] * scn.precoder[1]) * x_j;
        let rel = (at_a - at_b).norm() / at_a.norm().max(1.0);
        max_rel = max_rel.max(rel);
    }

    // Correlation of the attacker-induced terms at one fixed geometry:
    // deterministic pilots leave the term identical at both victims,
    // uniform-phase probes with post-multiplication decorrelate it.
    let mut rng = Rng::new(args.common.seed, 1);
    let (h_a, h_b) = draw_channels_conditioned(&mut rng);
    let h = rng.complex_gaussian(1.0);
    let x_j = rng.complex_gaussian(1.0);
    let scn = InjectionScenario::new(h, h_a, h_b, x_j)?;
    let one = Complex64::new(1.0, 0.0);

    let mut det_cross = Complex64::new(0.0, 0.0);
    let (mut det_pa, mut det_pb) = (0.0f64, 0.0f64);
    let mut rand_cross = Complex64::new(0.0, 0.0);
    let (mut rand_pa, mut rand_pb) = (0.0f64, 0.0f64);
    let mut shared = Complex64::new(0.0, 0.0);
    for _ in 0..sessions {
        let (z_a, z_b) = observe_under_attack(&scn, (one, one), noise_var, &mut rng)?;
        let (da, db) = (z_a - h, z_b - h);
        det_cross += da * db.conj();
        det_pa += da.norm_sqr();
        det_pb += db.norm_sqr();

        let x = Complex64::from_polar(1.0, rng.uniform() * std::f64::consts::TAU);
        let y = Complex64::from_polar(1.0, rng.uniform() * std::f64::consts::TAU);
        let (z_a, z_b) = observe_under_attack(&scn, (x, y), noise_var, &mut rng)?;
        let (za, zb) = counter_injection(z_a, z_b, x, y);
        let shared_term = x * y * h;
        let (ra, rb) = (za - shared_term, zb - shared_term);
        rand_cross += ra * rb.conj();
        rand_pa += ra.norm_sqr();
        rand_pb += rb.norm_sqr();
        shared += za * zb.conj();
    }
    let det_corr = det_cross.norm() / (det_pa.sqrt() * det_pb.sqrt());
    let rand_corr = rand_cross.norm() / (rand_pa.sqrt() * rand_pb.sqrt());
    let shared_re = (shared / sessions as f64).re;

    // Key-bit leakage: attacker drives the common term to +/-3 on the real
    // axis; bits quantized from the countered observation against the
    // attacker's sign.
    let mut rng = Rng::new(args.common.seed, 2);
    let (h_a, h_b) = draw_channels_conditioned(&mut rng);
    let base = InjectionScenario::new(Complex64::new(0.0, 0.0), h_a, h_b, one)?;
    let carrier = base.injected_value();
    let mut attacker_bits = Vec::with_capacity(mi_sessions);
    let mut det_bits = Vec::with_capacity(mi_sessions);
    let mut rand_bits = Vec::with_capacity(mi_sessions);
    for _ in 0..mi_sessions {
        let h = rng.complex_gaussian(1.0);
        let sign = if rng.uniform() < 0.5 { 1.0 } else { -1.0 };
        let x_j = Complex64::new(3.0 * sign, 0.0) / carrier;
        let scn = InjectionScenario::new(h, h_a, h_b, x_j)?;
        attacker_bits.push(u8::from(sign > 0.0));

        let (z_a, _) = observe_under_attack(&scn, (one, one), noise_var, &mut rng)?;
        det_bits.push(u8::from(z_a.re >= 0.0));

        let x = Complex64::from_polar(1.0, rng.uniform() * std::f64::consts::TAU);
        let y = Complex64::from_polar(1.0, rng.uniform() * std::f64::consts::TAU);
        let (z_a, z_b) = observe_under_attack(&scn, (x, y), noise_var, &mut rng)?;
        let (za, _) = counter_injection(z_a, z_b, x, y);
        rand_bits.push(u8::from(za.re >= 0.0));
    }
    let mi_det = binary_mutual_information(&attacker_bits, &det_bits)?;
    let mi_rand = binary_mutual_information(&attacker_bits, &rand_bits)?;

    let mut doc = CsvDoc::new("attack", args.common.seed, &resolved);
    doc.columns(&["statistic", "value"]);
    let rows: [(&str, f64); 7] = [
        ("identity_max_rel_err", max_rel),
        ("corr_deterministic_pilots", det_corr),
        ("corr_randomized_probes", rand_corr),
        ("shared_term_re", shared_re),
        ("shared_term_expected", h.norm_sqr()),
        ("key_bit_mi_deterministic", mi_det),
        ("key_bit_mi_randomized", mi_rand),
    ];
    for (name, value) in rows {
        doc.row(&[name.to_string(), sci(value)]);
    }
    args.common.emit(doc)
}

// ---------------------------------------------------------------------------
// game
// ---------------------------------------------------------------------------

/// Stackelberg equilibrium of the sensing-threshold jamming game.
#[derive(Debug, Args)]
pub struct GameArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of subcarriers.
    #[arg(long)]
    pub n: Option<usize>,
    /// Legitimate pair's per-subcarrier power budget.
    #[arg(long, allow_negative_numbers = true)]
    pub p_leg: Option<f64>,
    /// Jammer's total power budget.
    #[arg(long, allow_negative_numbers = true)]
    pub p_jam: Option<f64>,
    /// Lowest sensing threshold in the sweep.
    #[arg(long, allow_negative_numbers = true)]
    pub thr_min: Option<f64>,
    /// Highest sensing threshold in the sweep.
    #[arg(long, allow_negative_numbers = true)]
    pub thr_max: Option<f64>,
    /// Number of threshold points.
    #[arg(long)]
    pub thr_steps: Option<usize>,
}

pub fn run_game(args: &GameArgs) -> CliResult<()> {
    let mut r = args.common.resolver()?;
    let n = r.usize("n", args.n, 8)?;
    let p_leg = r.f64("p_leg", args.p_leg, 1.0)?;
    let p_jam = r.f64("p_jam", args.p_jam, 4.0)?;
    let thr_min = r.f64("thr_min", args.thr_min, 0.0)?;
    let thr_max = r.f64("thr_max", args.thr_max, 2.0)?;
    let thr_steps = r.usize("thr_steps", args.thr_steps, 21)?;
    let resolved = r.finish()?;

    let mut doc = CsvDoc::new("game", args.common.seed, &resolved);
    doc.columns(&["threshold", "leader_strategy", "value"]);
    for &thr in &linspace(thr_min, thr_max, thr_steps) {
        let game = JammingGame::new(n, p_leg, p_jam, thr)?;
        let outcome = solve_stackelberg(&game);
        doc.row(&[
            num(thr),
            outcome.leader_strategy.to_string(),
            num(outcome.value),
        ]);
    }
    args.common.emit(doc)
}

// ---------------------------------------------------------------------------
// auth
// ---------------------------------------------------------------------------

/// Authentication experiments: fingerprint challenge-response, proximity
/// verification, and resumption-chain behavior.
#[derive(Debug, Args)]
pub struct AuthArgs {
    #[command(flatten)]
    pub common: Common,
    /// trials (summary rates), enroll, authenticate, or resume.
    #[arg(long)]
    pub mode: Option<String>,
    /// Challenge-response database file (enroll/authenticate modes).
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Trials per rate estimate (trials/authenticate modes).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Records to enroll (enroll mode).
    #[arg(long)]
    pub n_crps: Option<usize>,
    /// Device fingerprint cells.
    #[arg(long)]
    pub cells: Option<usize>,
    /// Device response noise, standard deviations of the latent value.
    #[arg(long, allow_negative_numbers = true)]
    pub noise_std: Option<f64>,
    /// Authenticate with a device other than the enrolled one.
    #[arg(long)]
    pub impostor: Option<usize>,
    /// Proximity acceptance confidence.
    #[arg(long, allow_negative_numbers = true)]
    pub confidence: Option<f64>,
    /// True transmitter offset for the spoofing trials, meters.
    #[arg(long, allow_negative_numbers = true)]
    pub spoof_distance: Option<f64>,
    /// Verifier probes around the claimed position.
    #[arg(long)]
    pub probes: Option<usize>,
    /// Probe ring radius, meters.
    #[arg(long, allow_negative_numbers = true)]
    pub ring_radius: Option<f64>,
    /// Log-normal shadowing, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub shadowing_db: Option<f64>,
    /// Path-loss exponent.
    #[arg(long, allow_negative_numbers = true)]
    pub exponent: Option<f64>,
    /// Resumption chain length (trials/resume modes).
    #[arg(long)]
    pub chain: Option<usize>,
    /// Ticket lifetime, clock ticks (resume mode).
    #[arg(long)]
    pub lifetime: Option<u64>,
}

pub fn run_auth(args: &AuthArgs) -> CliResult<()> {
    let mut r = args.common.resolver()?;
    let mode = r.choice(
        "mode",
        args.mode.clone(),
        "trials",
        &["trials", "enroll", "authenticate", "resume"],
    )?;
    let db_path = r.string(
        "db",
        args.db.clone().map(|p| p.display().to_string()),
        "",
    )?;
    let trials = r.usize("trials", args.trials, 500)?;
    let n_crps = r.usize("n_crps", args.n_crps, 100)?;
    let cells = r.usize("cells", args.cells, 256)?;
    let noise_std = r.f64("noise_std", args.noise_std, 0.015)?;
    let impostor = r.usize("impostor", args.impostor, 0)?;
    let confidence = r.f64("confidence", args.confidence, 0.99)?;
    let spoof_distance = r.f64("spoof_distance", args.spoof_distance, 50.0)?;
    let probes = r.usize("probes", args.probes, 8)?;
    let ring_radius = r.f64("ring_radius", args.ring_radius, 20.0)?;
    let shadowing_db = r.f64("shadowing_db", args.shadowing_db, 2.0)?;
    let exponent = r.f64("exponent", args.exponent, 3.0)?;
    let chain = r.usize("chain", args.chain, 10)?;
    let lifetime = r.f64("lifetime", args.lifetime.map(|v| v as f64), 100.0)? as u64;
    let resolved = r.finish()?;

    let seed = args.common.seed;
    let code = BlockCode::hamming_7_4();

    match mode.as_str() {
        "enroll" => {
            if db_path.is_empty() {
                return Err(CliError::Usage("enroll mode needs --db".into()));
            }
            // The device is reproducible from the seed, so a later
            // authenticate run with the same seed talks to the same device.
            let device = PufDevice::random(cells, noise_std, &mut Rng::new(seed, 0))?;
            let db = enroll(&device, n_crps, &code, &mut Rng::new(seed, 2))?;
            std::fs::write(&db_path, db.to_text())?;
            let mut doc = CsvDoc::new("auth", seed, &resolved);
            doc.columns(&["metric", "value"]);
            doc.row(&["enrolled".into(), db.len().to_string()]);
            doc.row(&["unused".into(), db.unused_count().to_string()]);
            args.common.emit(doc)
        }
        "authenticate" => {
            if db_path.is_empty() {
                return Err(CliError::Usage("authenticate mode needs --db".into()));
            }
            let text = std::fs::read_to_string(&db_path)?;
            let mut db = CrpDatabase::from_text(&text)?;
            let device = if impostor != 0 {
                PufDevice::random(cells, noise_std, &mut Rng::new(seed, 1))?
            } else {
                PufDevice::random(cells, noise_std, &mut Rng::new(seed, 0))?
            };
            let mut rng = Rng::new(seed, 3);
            let mut doc = CsvDoc::new("auth", seed, &resolved);
            doc.columns(&["trial", "accept", "unused_after"]);
            for t in 0..trials {
                let (accept, _) = authenticate(&device, &mut db, &code, &mut rng)?;
                doc.row(&[
                    t.to_string(),
                    u8::from(accept).to_string(),
                    db.unused_count().to_string(),
                ]);
            }
            std::fs::write(&db_path, db.to_text())?;
            args.common.emit(doc)
        }
        "resume" => {
            let mut store = TicketStore::new(lifetime)?;
            let mut rng = Rng::new(seed, 6);
            let mut key = [0u8; 32];
            rng.fill_bytes(&mut key);
            let mut ticket = store.issue_root(b"cli-root-secret", &key);
            let mut doc = CsvDoc::new("auth", seed, &resolved);
            doc.columns(&["step", "alias", "accepted"]);
            doc.row(&[0.to_string(), hex(ticket.alias_id()), 1.to_string()]);
            for step in 1..=chain {
                rng.fill_bytes(&mut key);
                ticket = store.resume_session(&ticket, &key)?;
                doc.row(&[step.to_string(), hex(ticket.alias_id()), 1.to_string()]);
            }
            args.common.emit(doc)
        }
        _ => {
            // Summary rates across all three factors.
            let genuine = PufDevice::random(cells, noise_std, &mut Rng::new(seed, 0))?;
            let impostor_dev = PufDevice::random(cells, noise_std, &mut Rng::new(seed, 1))?;
            let mut db_g = enroll(&genuine, trials, &code, &mut Rng::new(seed, 2))?;
            let mut db_i = enroll(&genuine, trials, &code, &mut Rng::new(seed, 4))?;
            let mut rng = Rng::new(seed, 3);
            let mut genuine_ok = 0usize;
            for _ in 0..trials {
                if authenticate(&genuine, &mut db_g, &code, &mut rng)?.0 {
                    genuine_ok += 1;
                }
            }
            let mut rng = Rng::new(seed, 5);
            let mut impostor_ok = 0usize;
            for _ in 0..trials {
                if authenticate(&impostor_dev, &mut db_i, &code, &mut rng)?.0 {
                    impostor_ok += 1;
                }
            }

            // Proximity: verifier probes on a ring around the claimed spot;
            // the honest transmitter sits at the claim, the spoofer at
            // spoof_distance along the x axis.
            let model = PathLossModel::new(exponent, shadowing_db)?;
            let claimed = [0.0, 0.0];
            let spoofer = [spoof_distance, 0.0];
            let prox_trials = trials.min(200).max(1);
            let mut spoof_rejects = 0usize;
            let mut honest_rejects = 0usize;
            for t in 0..prox_trials {
                let mut rng = Rng::new(seed, 1_000 + t as u64);
                let mut spoof_samples = Vec::with_capacity(probes);
                let mut honest_samples = Vec::with_capacity(probes);
                for k in 0..probes {
                    let ang = 0.31 + std::f64::consts::TAU * k as f64 / probes as f64;
                    let rx = [
                        claimed[0] + ring_radius * ang.cos(),
                        claimed[1] + ring_radius * ang.sin(),
                    ];
                    spoof_samples.push(rss_sample(&mut rng, spoofer, rx, 20.0, &model)?);
                    honest_samples.push(rss_sample(&mut rng, claimed, rx, 20.0, &model)?);
                }
                if !proximity_fit(claimed, &spoof_samples, &model, confidence)?.accept() {
                    spoof_rejects += 1;
                }
                if !proximity_fit(claimed, &honest_samples, &model, confidence)?.accept() {
                    honest_rejects += 1;
                }
            }

            // Resumption chain: all steps accepted, then an old ticket must
            // be recognized as replayed.
            let mut store = TicketStore::new(lifetime)?;
            let mut rng = Rng::new(seed, 6);
            let mut key = [0u8; 32];
            rng.fill_bytes(&mut key);
            let root = store.issue_root(b"cli-root-secret", &key);
            let mut ticket = root.clone();
            let mut chain_ok = true;
            for _ in 0..chain {
                rng.fill_bytes(&mut key);
                match store.resume_session(&ticket, &key) {
                    Ok(next) => ticket = next,
                    Err(_) => {
                        chain_ok = false;
                        break;
                    }
                }
            }
            rng.fill_bytes(&mut key);
            let replay_rejected = matches!(
                store.resume_session(&root, &key),
                Err(Error::TicketReplayed)
            );

            let mut doc = CsvDoc::new("auth", seed, &resolved);
            doc.columns(&["metric", "value"]);
            let rows: [(&str, f64); 6] = [
                ("puf_genuine_accept_rate", genuine_ok as f64 / trials as f64),
                ("puf_impostor_accept_rate", impostor_ok as f64 / trials as f64),
                (
                    "prox_spoof_reject_rate",
                    spoof_rejects as f64 / prox_trials as f64,
                ),
                (
                    "prox_honest_reject_rate",
                    honest_rejects as f64 / prox_trials as f64,
                ),
                ("resume_chain_accepted", f64::from(u8::from(chain_ok))),
                (
                    "resume_replay_rejected",
                    f64::from(u8::from(replay_rejected)),
                ),
            ];
            for (name, value) in rows {
                doc.row(&[name.to_string(), num(value)]);
            }
            args.common.emit(doc)
        }
    }
}
