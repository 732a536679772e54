//! Trial generation and seeded Monte Carlo runs.
//!
//! A run draws a serving, lets Bob pick a letter, lets Alice accept or reject
//! the suggested letter, and records both outcomes. One 64-bit seed expands
//! into three independent ChaCha streams (serving, Bob, Alice) so that a change
//! in how one party consumes randomness never shifts the others' draws.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{
    alice_measure, bob_measure, nonlocal_reject_direction, suggested_letter, AliceDecision, Direction,
};
use crate::strip::{all_configs, Letter, ServingConfig, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Standard,
    /// Bob's chosen letter is sent to Alice before she walks.
    Nonlocal,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Standard => "standard",
            Mode::Nonlocal => "nonlocal",
        })
    }
}

/// Which side of Alice the plate is put on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlateSide {
    Left,
    Right,
}

impl PlateSide {
    pub const BOTH: [PlateSide; 2] = [PlateSide::Left, PlateSide::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            PlateSide::Left => "left",
            PlateSide::Right => "right",
        }
    }
}

impl fmt::Display for PlateSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Serving {
    pub config: ServingConfig,
    pub side: PlateSide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlicePolicy {
    FixedP(f64),
    SidedP { left: f64, right: f64 },
    /// Acceptance rises with the number of rejections already made by the arm
    /// on the plate's side: `p0 + (1 - p0)(1 - exp(-n / tau))`.
    Fatigue { p0: f64, tau: f64 },
    Scripted(Vec<AliceDecision>),
    /// Decisions are supplied per trial by the caller.
    External,
    /// Accepts with probability `p`, otherwise rejects along the walk that
    /// maximises the Bell sum given Bob's communicated letter.
    NonlocalOptimal(f64),
}

impl AlicePolicy {
    pub fn validate(&self) -> Result<()> {
        let check = |p: f64| if (0.0..=1.0).contains(&p) { Ok(()) } else { Err(Error::InvalidProbability(p)) };
        match *self {
            AlicePolicy::FixedP(p) | AlicePolicy::NonlocalOptimal(p) => check(p),
            AlicePolicy::SidedP { left, right } => check(left).and(check(right)),
            AlicePolicy::Fatigue { p0, tau } => {
                check(p0)?;
                if tau > 0.0 && tau.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidTau(tau))
                }
            }
            AlicePolicy::Scripted(_) | AlicePolicy::External => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobPolicy {
    UniformRandom,
    Scripted(Vec<Letter>),
    External,
}

/// Rejections made so far by each arm.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FatigueState {
    pub rejections_left: u64,
    pub rejections_right: u64,
}

impl FatigueState {
    pub fn rejections(&self, side: PlateSide) -> u64 {
        match side {
            PlateSide::Left => self.rejections_left,
            PlateSide::Right => self.rejections_right,
        }
    }

    fn record_rejection(&mut self, side: PlateSide) {
        match side {
            PlateSide::Left => self.rejections_left += 1,
            PlateSide::Right => self.rejections_right += 1,
        }
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub config: ServingConfig,
    pub side: PlateSide,
    pub bob_letter: Letter,
    pub bob_value: Sign,
    pub alice_accepted: bool,
    pub alice_direction: Option<Direction>,
    pub alice_letter: Letter,
    pub alice_value: Sign,
}

impl TrialRecord {
    pub fn product(&self) -> Sign {
        self.alice_value * self.bob_value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub n_trials: u64,
    pub seed: u64,
    pub alice: AlicePolicy,
    pub bob: BobPolicy,
    pub mode: Mode,
}

impl ExperimentSpec {
    pub fn new(n_trials: u64, seed: u64, alice: AlicePolicy) -> Self {
        ExperimentSpec { n_trials, seed, alice, bob: BobPolicy::UniformRandom, mode: Mode::Standard }
    }

    pub fn with_bob(mut self, bob: BobPolicy) -> Self {
        self.bob = bob;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::NoTrials);
        }
        validate_policies(&self.alice, self.mode)
    }
}

fn validate_policies(alice: &AlicePolicy, mode: Mode) -> Result<()> {
    alice.validate()?;
    match (mode, alice) {
        (Mode::Nonlocal, AlicePolicy::NonlocalOptimal(_) | AlicePolicy::External) => Ok(()),
        (Mode::Nonlocal, _) => Err(Error::ModeMismatch("nonlocal mode needs a nonlocal-optimal or external Alice")),
        (Mode::Standard, AlicePolicy::NonlocalOptimal(_)) => {
            Err(Error::ModeMismatch("nonlocal-optimal Alice needs nonlocal mode"))
        }
        (Mode::Standard, _) => Ok(()),
    }
}

/// Independent random streams derived from one seed.
#[derive(Debug, Clone)]
pub struct Streams {
    pub serving: ChaCha8Rng,
    pub bob: ChaCha8Rng,
    pub alice: ChaCha8Rng,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        let stream = |id: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        Streams { serving: stream(0), bob: stream(1), alice: stream(2) }
    }
}

/// Uniform over the 8 configurations and 2 plate sides.
pub fn draw_serving<R: Rng + ?Sized>(rng: &mut R) -> Serving {
    let k = rng.random_range(0..16usize);
    let side = if k % 2 == 0 { PlateSide::Left } else { PlateSide::Right };
    Serving { config: all_configs()[k / 2], side }
}

/// Acceptance probability for a probabilistic policy. `None` for scripted and
/// external policies, which do not draw.
pub fn accept_probability(policy: &AlicePolicy, side: PlateSide, fatigue: &FatigueState) -> Option<f64> {
    match *policy {
        AlicePolicy::FixedP(p) | AlicePolicy::NonlocalOptimal(p) => Some(p),
        AlicePolicy::SidedP { left, right } => Some(match side {
            PlateSide::Left => left,
            PlateSide::Right => right,
        }),
        AlicePolicy::Fatigue { p0, tau } => {
            let n = fatigue.rejections(side) as f64;
            Some(p0 + (1.0 - p0) * (1.0 - (-n / tau).exp()))
        }
        AlicePolicy::Scripted(_) | AlicePolicy::External => None,
    }
}

/// Alice's side of a trial. It sees the serving and, in nonlocal mode only,
/// Bob's communicated letter; nothing else about Bob.
#[derive(Debug, Clone)]
struct AliceAgent {
    policy: AlicePolicy,
    fatigue: FatigueState,
    cursor: usize,
    rng: ChaCha8Rng,
}

impl AliceAgent {
    fn decide(
        &mut self,
        serving: &Serving,
        index: u64,
        communicated: Option<Letter>,
        external: Option<AliceDecision>,
    ) -> Result<AliceDecision> {
        let decision = match &self.policy {
            AlicePolicy::External => external.ok_or(Error::ExternalChoiceRequired("Alice"))?,
            AlicePolicy::Scripted(script) => {
                let d = *script.get(self.cursor).ok_or(Error::ScriptExhausted { policy: "Alice", index })?;
                self.cursor += 1;
                d
            }
            policy => {
                let p = accept_probability(policy, serving.side, &self.fatigue).expect("probabilistic policy");
                let u: f64 = self.rng.random();
                if u < p {
                    AliceDecision::Accept
                } else if let (AlicePolicy::NonlocalOptimal(_), Some(bob)) = (policy, communicated) {
                    AliceDecision::RejectWithDirection(nonlocal_reject_direction(serving.config, bob)?)
                } else {
                    AliceDecision::Reject
                }
            }
        };
        match (decision, communicated.is_some()) {
            (AliceDecision::RejectWithDirection(_), false) => {
                Err(Error::ModeMismatch("a directed rejection is only possible in nonlocal mode"))
            }
            (AliceDecision::Reject, true) => Err(Error::ModeMismatch("a nonlocal rejection needs a direction")),
            _ => Ok(decision),
        }
    }

    fn observe(&mut self, serving: &Serving, decision: AliceDecision) {
        if !decision.is_accept() {
            self.fatigue.record_rejection(serving.side);
        }
    }
}

#[derive(Debug, Clone)]
struct BobAgent {
    policy: BobPolicy,
    cursor: usize,
    rng: ChaCha8Rng,
}

impl BobAgent {
    fn choose(&mut self, index: u64, external: Option<Letter>) -> Result<Letter> {
        let letter = match &self.policy {
            BobPolicy::UniformRandom => {
                if self.rng.random::<bool>() {
                    Letter::B
                } else {
                    Letter::BPrime
                }
            }
            BobPolicy::Scripted(script) => {
                let l = *script.get(self.cursor).ok_or(Error::ScriptExhausted { policy: "Bob", index })?;
                self.cursor += 1;
                l
            }
            BobPolicy::External => external.ok_or(Error::ExternalChoiceRequired("Bob"))?,
        };
        if letter.is_b_type() {
            Ok(letter)
        } else {
            Err(Error::NotBType(letter))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    serving: Serving,
    bob: Option<Letter>,
}

/// A running experiment. Trials are played one at a time; the serving and
/// Bob's letter of the trial in progress can be inspected before Alice moves.
#[derive(Debug, Clone)]
pub struct Experiment {
    mode: Mode,
    serving_rng: ChaCha8Rng,
    alice: AliceAgent,
    bob: BobAgent,
    pending: Option<Pending>,
    next_index: u64,
}

impl Experiment {
    pub fn new(seed: u64, alice: AlicePolicy, bob: BobPolicy, mode: Mode) -> Result<Self> {
        validate_policies(&alice, mode)?;
        let streams = Streams::new(seed);
        Ok(Experiment {
            mode,
            serving_rng: streams.serving,
            alice: AliceAgent { policy: alice, fatigue: FatigueState::default(), cursor: 0, rng: streams.alice },
            bob: BobAgent { policy: bob, cursor: 0, rng: streams.bob },
            pending: None,
            next_index: 0,
        })
    }

    pub fn from_spec(spec: &ExperimentSpec) -> Result<Self> {
        spec.validate()?;
        Experiment::new(spec.seed, spec.alice.clone(), spec.bob.clone(), spec.mode)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of completed trials.
    pub fn trials_played(&self) -> u64 {
        self.next_index
    }

    pub fn fatigue(&self) -> FatigueState {
        self.alice.fatigue
    }

    /// Serving of the trial in progress, drawing a new one if none is pending.
    pub fn serve(&mut self) -> Serving {
        if let Some(p) = self.pending {
            return p.serving;
        }
        let serving = draw_serving(&mut self.serving_rng);
        self.pending = Some(Pending { serving, bob: None });
        serving
    }

    /// Fixes Bob's letter for the trial in progress. Once fixed, later calls
    /// return the same letter and ignore `external`.
    pub fn bob_letter(&mut self, external: Option<Letter>) -> Result<Letter> {
        self.serve();
        let index = self.next_index;
        let pending = self.pending.as_mut().expect("served");
        if let Some(l) = pending.bob {
            return Ok(l);
        }
        let l = self.bob.choose(index, external)?;
        pending.bob = Some(l);
        Ok(l)
    }

    /// Bob's letter for the trial in progress, if already chosen.
    pub fn pending_bob_letter(&self) -> Option<Letter> {
        self.pending.and_then(|p| p.bob)
    }

    /// Completes the trial in progress. External choices are used only by
    /// external policies.
    pub fn play(&mut self, bob: Option<Letter>, alice: Option<AliceDecision>) -> Result<TrialRecord> {
        let serving = self.serve();
        let bob_letter = self.bob_letter(bob)?;
        let communicated = match self.mode {
            Mode::Standard => None,
            Mode::Nonlocal => Some(bob_letter),
        };
        let index = self.next_index;
        let decision = self.alice.decide(&serving, index, communicated, alice)?;
        self.alice.observe(&serving, decision);

        let a = alice_measure(serving.config, decision);
        let b = bob_measure(serving.config, bob_letter)?;
        self.pending = None;
        self.next_index += 1;
        debug_assert_eq!(decision.is_accept(), a.letter == suggested_letter(serving.config));
        Ok(TrialRecord {
            index,
            config: serving.config,
            side: serving.side,
            bob_letter,
            bob_value: b.value,
            alice_accepted: decision.is_accept(),
            alice_direction: match decision {
                AliceDecision::RejectWithDirection(d) => Some(d),
                _ => None,
            },
            alice_letter: a.letter,
            alice_value: a.value,
        })
    }

    pub fn run_trial(&mut self) -> Result<TrialRecord> {
        self.play(None, None)
    }
}

/// Runs `spec.n_trials` trials. The log is a pure function of the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<TrialRecord>> {
    let mut experiment = Experiment::from_spec(spec)?;
    (0..spec.n_trials).map(|_| experiment.run_trial()).collect()
}
