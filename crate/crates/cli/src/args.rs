//! Command-line surface.

use std::net::IpAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mobius_bell::{AliceDecision, AlicePolicy, BobPolicy, Direction, Letter, Mode};

use crate::error::{usage, CliError};

#[derive(Debug, Parser)]
#[command(name = "mobius", version, about = "Möbius-strip Bell experiment simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo experiment and report the Bell statistics.
    Simulate(SimulateArgs),
    /// Enumerate the model and print exact expectations.
    Exact(ExactArgs),
    /// Tabulate exact and simulated S over a grid of acceptance probabilities.
    Sweep(SweepArgs),
    /// Walk the strip measuring A and A' in both orders.
    Noncommute,
    /// Serve interactive sessions over HTTP until interrupted.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable text.
    Text,
    /// One JSON document.
    Record,
    /// Comma-separated table with a fixed header row.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Standard,
    Nonlocal,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Standard => Mode::Standard,
            ModeArg::Nonlocal => Mode::Nonlocal,
        }
    }
}

/// Alice's acceptance behaviour. With no flag Alice always accepts.
#[derive(Debug, Clone, Default, Args)]
pub struct PolicyArgs {
    /// Acceptance probability on both sides.
    #[arg(long, conflicts_with_all = ["p_left", "p_right", "fatigue_p0", "fatigue_tau"])]
    pub p: Option<f64>,
    /// Acceptance probability when the plate is on the left.
    #[arg(long, requires = "p_right", conflicts_with_all = ["fatigue_p0", "fatigue_tau"])]
    pub p_left: Option<f64>,
    /// Acceptance probability when the plate is on the right.
    #[arg(long, requires = "p_left")]
    pub p_right: Option<f64>,
    /// Initial acceptance probability of a tiring Alice.
    #[arg(long, requires = "fatigue_tau")]
    pub fatigue_p0: Option<f64>,
    /// Number of rejections over which an arm tires.
    #[arg(long, requires = "fatigue_p0")]
    pub fatigue_tau: Option<f64>,
}

impl PolicyArgs {
    fn is_empty(&self) -> bool {
        self.p.is_none() && self.p_left.is_none() && self.fatigue_p0.is_none()
    }

    pub fn policy(&self, mode: Mode) -> Result<AlicePolicy, CliError> {
        let p = self.p.unwrap_or(1.0);
        let policy = match (self.p_left.zip(self.p_right), self.fatigue_p0.zip(self.fatigue_tau)) {
            (Some((left, right)), _) => AlicePolicy::SidedP { left, right },
            (None, Some((p0, tau))) => AlicePolicy::Fatigue { p0, tau },
            (None, None) if mode == Mode::Nonlocal => AlicePolicy::NonlocalOptimal(p),
            (None, None) => AlicePolicy::FixedP(p),
        };
        if mode == Mode::Nonlocal && !matches!(policy, AlicePolicy::NonlocalOptimal(_)) {
            return Err(usage("nonlocal mode takes --p only"));
        }
        policy.validate().map_err(usage)?;
        Ok(policy)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Number of trials.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// RNG seed; fresh entropy when absent. The seed used is always reported.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Alice's decisions, comma separated: accept, reject, reject+ or reject-
    /// (the last two walk towards increasing or decreasing cell index).
    #[arg(long, value_delimiter = ',', value_parser = parse_decision)]
    pub alice_script: Option<Vec<AliceDecision>>,
    /// Bob's letters, comma separated: B or B'.
    #[arg(long, value_delimiter = ',', value_parser = parse_bob_letter)]
    pub bob_script: Option<Vec<Letter>>,
    #[arg(long, value_enum, default_value_t = ModeArg::Standard)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the trial log to this file.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

impl SimulateArgs {
    pub fn alice_policy(&self) -> Result<AlicePolicy, CliError> {
        match &self.alice_script {
            Some(_) if !self.policy.is_empty() => Err(usage("--alice-script excludes the probability flags")),
            Some(script) => Ok(AlicePolicy::Scripted(script.clone())),
            None => self.policy.policy(self.mode.into()),
        }
    }

    pub fn bob_policy(&self) -> BobPolicy {
        match &self.bob_script {
            Some(script) => BobPolicy::Scripted(script.clone()),
            None => BobPolicy::UniformRandom,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Standard)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    pub p_from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 11)]
    pub steps: u32,
    /// Trials per grid point.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// RNG seed shared by every grid point; fresh entropy when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

impl SweepArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.steps < 2 {
            return Err(usage(format!("--steps must be at least 2, got {}", self.steps)));
        }
        if !(0.0 <= self.p_from && self.p_from <= self.p_to && self.p_to <= 1.0) {
            return Err(usage(format!("need 0 <= --p-from <= --p-to <= 1, got {} and {}", self.p_from, self.p_to)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    /// Port to listen on; 0 picks a free one.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: IpAddr,
}

pub fn parse_decision(s: &str) -> Result<AliceDecision, String> {
    match s.trim() {
        "accept" => Ok(AliceDecision::Accept),
        "reject" => Ok(AliceDecision::Reject),
        "reject+" => Ok(AliceDecision::RejectWithDirection(Direction::Increasing)),
        "reject-" => Ok(AliceDecision::RejectWithDirection(Direction::Decreasing)),
        other => Err(format!("unknown decision {other:?}; expected accept, reject, reject+ or reject-")),
    }
}

pub fn parse_bob_letter(s: &str) -> Result<Letter, String> {
    match s.parse::<Letter>()? {
        l if l.is_b_type() => Ok(l),
        l => Err(format!("Bob measures B or B', not {l}")),
    }
}
