//! `plslab` — physical-layer security experiments as reproducible CSV runs.
//!
//! Every subcommand accepts `--seed`, `--out`, and `--config <key=value
//! file>`; explicit flags override config entries, which override built-in
//! defaults. Exit codes: 0 on success, 2 for invocation errors (bad flags,
//! malformed or unknown config keys), 3 for runtime failures.

mod commands;
mod params;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "plslab",
    about = "Physical-layer security experiments",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Secrecy rate region of a two-layer Gaussian broadcast.
    Region(commands::RegionArgs),
    /// Finite-blocklength achievable rates against blocklength.
    Fblen(commands::FblenArgs),
    /// Secret-key-generation frame error rate across an SNR sweep.
    SkgFer(commands::SkgFerArgs),
    /// Pilot/data subcarrier scheduling efficiency.
    Schedule(commands::ScheduleArgs),
    /// Delay-aware power allocation and effective capacity.
    Effcap(commands::EffCapArgs),
    /// Pilot-injection attack and countermeasure statistics.
    Attack(commands::AttackArgs),
    /// Sensing-threshold jamming game equilibria.
    Game(commands::GameArgs),
    /// Device fingerprint, proximity, and resumption experiments.
    Auth(commands::AuthArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 2 on usage errors and 0 for --help/--version.
        Err(e) => e.exit(),
    };
    let result = match &cli.command {
        Command::Region(args) => commands::run_region(args),
        Command::Fblen(args) => commands::run_fblen(args),
        Command::SkgFer(args) => commands::run_skg_fer(args),
        Command::Schedule(args) => commands::run_schedule(args),
        Command::Effcap(args) => commands::run_effcap(args),
        Command::Attack(args) => commands::run_attack(args),
        Command::Game(args) => commands::run_game(args),
        Command::Auth(args) => commands::run_auth(args),
    };
    if let Err(e) = result {
        eprintln!("plslab: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
