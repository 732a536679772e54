//! Phase machine for one interactive session.
//!
//! A session serves strips one at a time. While a trial is awaiting choices
//! the human player(s) see only what is locally visible; once every human
//! choice is in, the simulated counterpart moves, both outcomes are revealed,
//! and the trial is counted. `advance` serves the next strip.

use serde::{Deserialize, Serialize};

use mobius_bell::statistics::RunningStats;
use mobius_bell::{
    local_view, log_to_string, suggested_letter, AliceDecision, AlicePolicy, BellReport, BobPolicy, Direction,
    Error as CoreError, Experiment, HandednessReport, Letter, Mode, PlateSide, Serving, Sign, Symbol, TrialRecord,
    DEFAULT_VERDICT_SIGMAS,
};

use crate::error::SessionError;

/// Who is played by a human.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanRole {
    HumanAlice,
    HumanBob,
    HumanBoth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Alice,
    Bob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    AwaitingChoice,
    Revealed,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub mode: HumanRole,
    pub experiment_mode: Mode,
    pub seed: u64,
    /// Acceptance probability of the simulated Alice when a human plays Bob.
    pub alice_p: f64,
}

/// What a player sees of the served strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialView {
    pub trial_index: u64,
    pub role: Role,
    pub front_symbol: Symbol,
    pub left_symbol: Symbol,
    pub right_symbol: Symbol,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plate_side: Option<PlateSide>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggested_letter: Option<Letter>,
    /// Nonlocal mode only: the letter Bob communicated to Alice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob_letter: Option<Letter>,
    /// The requesting player has already chosen and waits for the other.
    #[serde(default)]
    pub submitted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsView {
    pub trials: u64,
    pub phase: Phase,
    pub bell: BellReport<f64>,
    pub handedness: HandednessReport<f64>,
    pub served_left: u64,
    pub served_right: u64,
    pub accepted_left: u64,
    pub accepted_right: u64,
    pub accept_rate_left: Option<f64>,
    pub accept_rate_right: Option<f64>,
    pub defined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevealView {
    pub trial_index: u64,
    pub plate_side: PlateSide,
    pub alice_accepted: bool,
    pub alice_letter: Letter,
    pub alice_value: Sign,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice_direction: Option<Direction>,
    pub bob_letter: Letter,
    pub bob_value: Sign,
    pub product: Sign,
    pub stats: StatsView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SubmitOutcome {
    /// The choice is recorded; the other player has yet to choose.
    Waiting { trial_index: u64, waiting_for: Role },
    Revealed(Box<RevealView>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalReport {
    pub trials: u64,
    pub stats: StatsView,
    pub p_hat_left: Option<f64>,
    pub p_hat_right: Option<f64>,
    /// Trial log in the line-delimited format of [`mobius_bell::trial_log`].
    pub log: String,
}

/// A player's move as received from a client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Choice {
    Accept,
    Reject { clockwise: Option<bool> },
    Letter(Letter),
}

impl Choice {
    /// Parses `accept` / `reject` (with optional `cw` / `ccw`) or `B` / `B'`.
    pub fn parse(choice: &str, direction: Option<&str>) -> Result<Choice, SessionError> {
        let clockwise = match direction.map(str::trim) {
            None => None,
            Some("cw" | "clockwise") => Some(true),
            Some("ccw" | "counter_clockwise" | "counterclockwise") => Some(false),
            Some(other) => return Err(SessionError::BadChoice(format!("unknown direction {other:?}"))),
        };
        match choice.trim() {
            "accept" if clockwise.is_none() => Ok(Choice::Accept),
            "accept" => Err(SessionError::BadChoice("accepting takes no direction".into())),
            "reject" => Ok(Choice::Reject { clockwise }),
            other => match other.parse::<Letter>() {
                Ok(l) if l.is_b_type() && clockwise.is_none() => Ok(Choice::Letter(l)),
                _ => Err(SessionError::BadChoice(format!("unknown choice {other:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    config: SessionConfig,
    phase: Phase,
    experiment: Experiment,
    serving: Serving,
    pending_alice: Option<AliceDecision>,
    records: Vec<TrialRecord>,
    stats: RunningStats,
}

impl Session {
    pub fn new(config: SessionConfig) -> Result<Session, SessionError> {
        let (alice, bob) = match config.mode {
            HumanRole::HumanAlice => (AlicePolicy::External, BobPolicy::UniformRandom),
            HumanRole::HumanBob => {
                if config.experiment_mode == Mode::Nonlocal {
                    return Err(SessionError::ModeMismatch("nonlocal mode needs a human Alice".into()));
                }
                (AlicePolicy::FixedP(config.alice_p), BobPolicy::External)
            }
            HumanRole::HumanBoth => (AlicePolicy::External, BobPolicy::External),
        };
        let mut experiment = Experiment::new(config.seed, alice, bob, config.experiment_mode).map_err(|e| match e {
            CoreError::InvalidProbability(p) => SessionError::ModeMismatch(format!("alice_p {p} outside [0, 1]")),
            other => SessionError::ModeMismatch(other.to_string()),
        })?;
        let serving = experiment.serve();
        let mut session = Session {
            config,
            phase: Phase::AwaitingChoice,
            experiment,
            serving,
            pending_alice: None,
            records: Vec::new(),
            stats: RunningStats::default(),
        };
        session.draw_simulated_bob()?;
        Ok(session)
    }

    fn draw_simulated_bob(&mut self) -> Result<(), SessionError> {
        if self.config.mode == HumanRole::HumanAlice {
            self.experiment.bob_letter(None).map_err(internal)?;
        }
        Ok(())
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }

    /// Serving of the current trial; for tests and server-side tooling only.
    pub fn current_serving(&self) -> Serving {
        self.serving
    }

    /// Roles played by humans in this session.
    pub fn human_roles(&self) -> &'static [Role] {
        match self.config.mode {
            HumanRole::HumanAlice => &[Role::Alice],
            HumanRole::HumanBob => &[Role::Bob],
            HumanRole::HumanBoth => &[Role::Alice, Role::Bob],
        }
    }

    fn ensure_open(&self) -> Result<(), SessionError> {
        if self.phase == Phase::Closed {
            Err(SessionError::Gone)
        } else {
            Ok(())
        }
    }

    fn ensure_phase(&self, want: Phase) -> Result<(), SessionError> {
        self.ensure_open()?;
        if self.phase == want {
            Ok(())
        } else {
            Err(SessionError::WrongPhase(format!("session is {:?}, expected {want:?}", self.phase)))
        }
    }

    fn ensure_human(&self, role: Role) -> Result<(), SessionError> {
        if self.human_roles().contains(&role) {
            Ok(())
        } else {
            Err(SessionError::ModeMismatch(format!("{role:?} is not played by a human in this session")))
        }
    }

    fn has_submitted(&self, role: Role) -> bool {
        match role {
            Role::Alice => self.pending_alice.is_some(),
            Role::Bob => self.config.mode == HumanRole::HumanBoth && self.experiment.pending_bob_letter().is_some(),
        }
    }

    pub fn trial_view(&self, role: Role) -> Result<TrialView, SessionError> {
        self.ensure_phase(Phase::AwaitingChoice)?;
        self.ensure_human(role)?;
        let view = local_view(self.serving.config);
        let (plate_side, suggested, bob_letter) = match role {
            Role::Alice => (
                Some(self.serving.side),
                Some(suggested_letter(self.serving.config)),
                match self.config.experiment_mode {
                    Mode::Nonlocal => self.experiment.pending_bob_letter(),
                    Mode::Standard => None,
                },
            ),
            Role::Bob => (None, None, None),
        };
        Ok(TrialView {
            trial_index: self.records.len() as u64,
            role,
            front_symbol: view.front,
            left_symbol: view.left,
            right_symbol: view.right,
            plate_side,
            suggested_letter: suggested,
            bob_letter,
            submitted: self.has_submitted(role),
        })
    }

    pub fn submit(&mut self, role: Role, choice: Choice) -> Result<SubmitOutcome, SessionError> {
        self.ensure_phase(Phase::AwaitingChoice)?;
        self.ensure_human(role)?;
        if self.has_submitted(role) {
            return Err(SessionError::WrongPhase(format!("{role:?} has already chosen for this trial")));
        }
        let nonlocal = self.config.experiment_mode == Mode::Nonlocal;
        match (role, choice) {
            (Role::Alice, Choice::Accept) => self.pending_alice = Some(AliceDecision::Accept),
            (Role::Alice, Choice::Reject { clockwise }) => {
                let decision = match (nonlocal, clockwise) {
                    (false, None) => AliceDecision::Reject,
                    (false, Some(_)) => {
                        return Err(SessionError::BadChoice("walk direction is only chosen in nonlocal mode".into()))
                    }
                    (true, None) => return Err(SessionError::BadChoice("nonlocal rejection needs cw or ccw".into())),
                    (true, Some(cw)) => {
                        if self.experiment.pending_bob_letter().is_none() {
                            return Err(SessionError::WrongPhase("Bob's letter has not been communicated yet".into()));
                        }
                        AliceDecision::RejectWithDirection(Direction::from_turn(cw, self.serving.config.orientation()))
                    }
                };
                self.pending_alice = Some(decision);
            }
            (Role::Bob, Choice::Letter(l)) => {
                self.experiment.bob_letter(Some(l)).map_err(internal)?;
            }
            (Role::Alice, Choice::Letter(_)) => return Err(SessionError::BadChoice("Alice accepts or rejects".into())),
            (Role::Bob, _) => return Err(SessionError::BadChoice("Bob chooses B or B'".into())),
        }

        let alice_ready = self.config.mode == HumanRole::HumanBob || self.pending_alice.is_some();
        let bob_ready = self.experiment.pending_bob_letter().is_some();
        if !(alice_ready && bob_ready) {
            let waiting_for = if alice_ready { Role::Bob } else { Role::Alice };
            return Ok(SubmitOutcome::Waiting { trial_index: self.records.len() as u64, waiting_for });
        }

        let record = self.experiment.play(None, self.pending_alice.take()).map_err(internal)?;
        self.records.push(record);
        self.stats.push(&record);
        self.phase = Phase::Revealed;
        let reveal = RevealView {
            trial_index: record.index,
            plate_side: record.side,
            alice_accepted: record.alice_accepted,
            alice_letter: record.alice_letter,
            alice_value: record.alice_value,
            alice_direction: record.alice_direction,
            bob_letter: record.bob_letter,
            bob_value: record.bob_value,
            product: record.product(),
            stats: self.stats_view(),
        };
        Ok(SubmitOutcome::Revealed(Box::new(reveal)))
    }

    /// Serves the next strip.
    pub fn advance(&mut self) -> Result<(), SessionError> {
        self.ensure_phase(Phase::Revealed)?;
        self.serving = self.experiment.serve();
        self.draw_simulated_bob()?;
        self.phase = Phase::AwaitingChoice;
        Ok(())
    }

    fn stats_view(&self) -> StatsView {
        let bell = self.stats.bell::<f64>();
        StatsView {
            trials: self.records.len() as u64,
            phase: self.phase,
            bell,
            handedness: self.stats.handedness(DEFAULT_VERDICT_SIGMAS),
            served_left: self.stats.served_left,
            served_right: self.stats.served_right,
            accepted_left: self.stats.accepted_left,
            accepted_right: self.stats.accepted_right,
            accept_rate_left: self.stats.accept_rate(PlateSide::Left),
            accept_rate_right: self.stats.accept_rate(PlateSide::Right),
            defined: bell.is_defined(),
        }
    }

    pub fn stats(&self) -> Result<StatsView, SessionError> {
        self.ensure_open()?;
        Ok(self.stats_view())
    }

    pub fn close(&mut self) -> Result<FinalReport, SessionError> {
        self.ensure_open()?;
        self.phase = Phase::Closed;
        let stats = self.stats_view();
        Ok(FinalReport {
            trials: self.records.len() as u64,
            p_hat_left: stats.handedness.p_hat_left,
            p_hat_right: stats.handedness.p_hat_right,
            stats,
            log: log_to_string(&self.records),
        })
    }
}

fn internal(e: CoreError) -> SessionError {
    SessionError::Internal(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use mobius_bell::{bell_report, handedness, log_from_str, Cell, Orientation, PairCounts, ServingConfig};

    fn config(mode: HumanRole, experiment_mode: Mode, seed: u64) -> SessionConfig {
        SessionConfig { mode, experiment_mode, seed, alice_p: 1.0 }
    }

    fn reference_serving() -> ServingConfig {
        ServingConfig::new(Cell::new(2).unwrap(), Orientation::Normal).unwrap()
    }

    fn revealed(o: SubmitOutcome) -> RevealView {
        match o {
            SubmitOutcome::Revealed(r) => *r,
            other => panic!("expected a reveal, got {other:?}"),
        }
    }

    /// Plays until the reference serving comes up and returns the session there.
    fn session_at_reference(mode: HumanRole, experiment_mode: Mode) -> Session {
        for seed in 0.. {
            let s = Session::new(config(mode, experiment_mode, seed)).unwrap();
            if s.current_serving().config == reference_serving() {
                return s;
            }
        }
        unreachable!()
    }

    #[test]
    fn choices_parse() {
        assert_eq!(Choice::parse("accept", None), Ok(Choice::Accept));
        assert_eq!(Choice::parse("reject", Some("ccw")), Ok(Choice::Reject { clockwise: Some(false) }));
        assert_eq!(Choice::parse("B'", None), Ok(Choice::Letter(Letter::BPrime)));
        assert!(Choice::parse("A", None).is_err());
        assert!(Choice::parse("accept", Some("cw")).is_err());
        assert!(Choice::parse("reject", Some("up")).is_err());
        assert!(Choice::parse("maybe", None).is_err());
    }

    #[test]
    fn human_bob_cannot_run_nonlocal() {
        let err = Session::new(config(HumanRole::HumanBob, Mode::Nonlocal, 1)).unwrap_err();
        assert!(matches!(err, SessionError::ModeMismatch(_)));
        let mut bad = config(HumanRole::HumanBob, Mode::Standard, 1);
        bad.alice_p = 1.5;
        assert!(matches!(Session::new(bad), Err(SessionError::ModeMismatch(_))));
    }

    #[test]
    fn alice_view_of_the_reference_serving() {
        let s = session_at_reference(HumanRole::HumanAlice, Mode::Standard);
        let v = s.trial_view(Role::Alice).unwrap();
        assert_eq!((v.front_symbol.glyph(), v.left_symbol.glyph(), v.right_symbol.glyph()), ("A'-".into(), "B'+".into(), "B-".into()));
        assert_eq!(v.suggested_letter, Some(Letter::APrime));
        assert_eq!(v.bob_letter, None, "Bob's choice stays hidden in standard mode");
        assert_eq!(s.trial_view(Role::Alice).unwrap(), v);
        assert!(matches!(s.trial_view(Role::Bob), Err(SessionError::ModeMismatch(_))));
    }

    #[test]
    fn reference_serving_reveals() {
        let mut s = session_at_reference(HumanRole::HumanAlice, Mode::Standard);
        let r = revealed(s.submit(Role::Alice, Choice::Accept).unwrap());
        assert_eq!((r.alice_letter, r.alice_value), (Letter::APrime, Sign::Minus));
        let expected_bob = if r.bob_letter == Letter::B { Sign::Minus } else { Sign::Plus };
        assert_eq!(r.bob_value, expected_bob);

        let mut s = session_at_reference(HumanRole::HumanAlice, Mode::Standard);
        let r = revealed(s.submit(Role::Alice, Choice::Reject { clockwise: None }).unwrap());
        assert_eq!((r.alice_letter, r.alice_value), (Letter::A, Sign::Plus));
    }

    #[test]
    fn phase_machine() {
        let mut s = Session::new(config(HumanRole::HumanAlice, Mode::Standard, 4)).unwrap();
        assert!(matches!(s.advance(), Err(SessionError::WrongPhase(_))));
        s.submit(Role::Alice, Choice::Accept).unwrap();
        assert_eq!(s.phase(), Phase::Revealed);
        assert!(matches!(s.submit(Role::Alice, Choice::Accept), Err(SessionError::WrongPhase(_))));
        assert!(matches!(s.trial_view(Role::Alice), Err(SessionError::WrongPhase(_))));
        s.advance().unwrap();
        assert_eq!(s.trial_view(Role::Alice).unwrap().trial_index, 1);
        s.close().unwrap();
        assert_eq!(s.advance(), Err(SessionError::Gone));
        assert_eq!(s.submit(Role::Alice, Choice::Accept).unwrap_err(), SessionError::Gone);
        assert_eq!(s.stats().unwrap_err(), SessionError::Gone);
        assert_eq!(s.close().unwrap_err(), SessionError::Gone);
    }

    #[test]
    fn same_seed_same_servings() {
        let mut a = Session::new(config(HumanRole::HumanAlice, Mode::Standard, 77)).unwrap();
        let mut b = Session::new(config(HumanRole::HumanAlice, Mode::Standard, 77)).unwrap();
        for _ in 0..50 {
            assert_eq!(a.current_serving(), b.current_serving());
            a.submit(Role::Alice, Choice::Accept).unwrap();
            b.submit(Role::Alice, Choice::Reject { clockwise: None }).unwrap();
            a.advance().unwrap();
            b.advance().unwrap();
        }
    }

    #[test]
    fn human_bob_plays_against_obedient_alice() {
        let mut s = Session::new(config(HumanRole::HumanBob, Mode::Standard, 3)).unwrap();
        let v = s.trial_view(Role::Bob).unwrap();
        assert_eq!((v.plate_side, v.suggested_letter), (None, None));
        assert!(matches!(s.submit(Role::Bob, Choice::Accept), Err(SessionError::BadChoice(_))));
        for i in 0..400 {
            let l = if i % 3 == 0 { Letter::B } else { Letter::BPrime };
            let r = revealed(s.submit(Role::Bob, Choice::Letter(l)).unwrap());
            assert!(r.alice_accepted);
            assert_eq!(r.bob_letter, l);
            s.advance().unwrap();
        }
        assert_eq!(s.stats().unwrap().bell.s_value, Some(4.0));
    }

    #[test]
    fn both_humans_standard_any_order() {
        let mut s = Session::new(config(HumanRole::HumanBoth, Mode::Standard, 12)).unwrap();
        let w = s.submit(Role::Alice, Choice::Accept).unwrap();
        assert_eq!(w, SubmitOutcome::Waiting { trial_index: 0, waiting_for: Role::Bob });
        assert!(s.trial_view(Role::Alice).unwrap().submitted);
        assert!(!s.trial_view(Role::Bob).unwrap().submitted);
        assert!(matches!(s.submit(Role::Alice, Choice::Accept), Err(SessionError::WrongPhase(_))));
        let r = revealed(s.submit(Role::Bob, Choice::Letter(Letter::B)).unwrap());
        assert_eq!(r.bob_letter, Letter::B);
        s.advance().unwrap();
        let w = s.submit(Role::Bob, Choice::Letter(Letter::BPrime)).unwrap();
        assert_eq!(w, SubmitOutcome::Waiting { trial_index: 1, waiting_for: Role::Alice });
        assert_eq!(s.trial_view(Role::Alice).unwrap().bob_letter, None);
        let r = revealed(s.submit(Role::Alice, Choice::Reject { clockwise: None }).unwrap());
        assert_eq!(r.bob_letter, Letter::BPrime);
        assert!(!r.alice_accepted);
    }

    #[test]
    fn both_humans_nonlocal_signalling() {
        let mut s = Session::new(config(HumanRole::HumanBoth, Mode::Nonlocal, 12)).unwrap();
        assert!(matches!(s.submit(Role::Alice, Choice::Reject { clockwise: Some(true) }), Err(SessionError::WrongPhase(_))));
        s.submit(Role::Bob, Choice::Letter(Letter::B)).unwrap();
        assert_eq!(s.trial_view(Role::Alice).unwrap().bob_letter, Some(Letter::B));
        assert!(matches!(s.submit(Role::Alice, Choice::Reject { clockwise: None }), Err(SessionError::BadChoice(_))));
        let r = revealed(s.submit(Role::Alice, Choice::Reject { clockwise: Some(false) }).unwrap());
        assert!(r.alice_direction.is_some());
    }

    #[test]
    fn human_alice_nonlocal_sees_bob_letter() {
        let mut s = Session::new(config(HumanRole::HumanAlice, Mode::Nonlocal, 5)).unwrap();
        for _ in 0..300 {
            let v = s.trial_view(Role::Alice).unwrap();
            let bob = v.bob_letter.expect("communicated letter");
            // choose the walk that reaches the target product
            let config = s.current_serving().config;
            let best = mobius_bell::nonlocal_reject_direction(config, bob).unwrap();
            let cw = best.is_clockwise(config.orientation());
            s.submit(Role::Alice, Choice::Reject { clockwise: Some(cw) }).unwrap();
            s.advance().unwrap();
        }
        assert_eq!(s.stats().unwrap().bell.s_value, Some(4.0));
    }

    #[test]
    fn standard_alice_cannot_pick_direction() {
        let mut s = Session::new(config(HumanRole::HumanAlice, Mode::Standard, 5)).unwrap();
        assert!(matches!(s.submit(Role::Alice, Choice::Reject { clockwise: Some(true) }), Err(SessionError::BadChoice(_))));
        assert!(matches!(s.submit(Role::Alice, Choice::Letter(Letter::B)), Err(SessionError::BadChoice(_))));
        assert_eq!(s.phase(), Phase::AwaitingChoice);
    }

    #[test]
    fn stats_match_batch_and_replay() {
        let mut s = Session::new(config(HumanRole::HumanAlice, Mode::Standard, 21)).unwrap();
        for i in 0..500u64 {
            let v = s.trial_view(Role::Alice).unwrap();
            let choice = if v.plate_side == Some(PlateSide::Left) || i % 5 == 0 {
                Choice::Accept
            } else {
                Choice::Reject { clockwise: None }
            };
            s.submit(Role::Alice, choice).unwrap();
            let stats = s.stats().unwrap();
            let batch = bell_report::<f64>(&PairCounts::from_records(s.records()));
            assert_eq!(stats.bell, batch);
            s.advance().unwrap();
        }
        let report = s.close().unwrap();
        let log = log_from_str(&report.log).unwrap();
        assert_eq!(log, s.records());
        assert_eq!(report.stats.bell, bell_report::<f64>(&PairCounts::from_records(&log)));
        assert_eq!(report.stats.handedness, handedness::<f64>(&log, DEFAULT_VERDICT_SIGMAS));
    }

    #[test]
    fn empty_session_closes_undefined() {
        let mut s = Session::new(config(HumanRole::HumanAlice, Mode::Standard, 1)).unwrap();
        let stats = s.stats().unwrap();
        assert!(!stats.defined);
        assert_eq!(stats.bell.s_value, None);
        let r = s.close().unwrap();
        assert_eq!(r.trials, 0);
        assert!(log_from_str(&r.log).unwrap().is_empty());
        assert!(!r.stats.defined);
    }
}
