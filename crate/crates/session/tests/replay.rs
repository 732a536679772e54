use proptest::prelude::*;

use mobius_bell::{bell_report, handedness, log_from_str, Letter, Mode, PairCounts, DEFAULT_VERDICT_SIGMAS};
use mobius_session::{Choice, HumanRole, Role, Session, SessionConfig};

fn config(mode: HumanRole, seed: u64) -> SessionConfig {
    SessionConfig { mode, experiment_mode: Mode::Standard, seed, alice_p: 0.5 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_log_replays_to_final_stats(seed: u64, accepts in prop::collection::vec(any::<bool>(), 0..120)) {
        let mut s = Session::new(config(HumanRole::HumanAlice, seed)).unwrap();
        for &a in &accepts {
            let choice = if a { Choice::Accept } else { Choice::Reject { clockwise: None } };
            s.submit(Role::Alice, choice).unwrap();
            s.advance().unwrap();
        }
        let report = s.close().unwrap();
        let log = log_from_str(&report.log).unwrap();
        prop_assert_eq!(log.len(), accepts.len());
        prop_assert_eq!(report.stats.bell, bell_report::<f64>(&PairCounts::from_records(&log)));
        prop_assert_eq!(report.stats.handedness, handedness::<f64>(&log, DEFAULT_VERDICT_SIGMAS));
        let accepted: Vec<bool> = log.iter().map(|r| r.alice_accepted).collect();
        prop_assert_eq!(accepted, accepts);
    }

    #[test]
    fn human_bob_letters_are_recorded(seed: u64, primes in prop::collection::vec(any::<bool>(), 1..80)) {
        let mut s = Session::new(config(HumanRole::HumanBob, seed)).unwrap();
        for &p in &primes {
            let l = if p { Letter::BPrime } else { Letter::B };
            s.submit(Role::Bob, Choice::Letter(l)).unwrap();
            s.advance().unwrap();
        }
        let letters: Vec<bool> = s.records().iter().map(|r| r.bob_letter == Letter::BPrime).collect();
        prop_assert_eq!(letters, primes);
        let stats = s.stats().unwrap();
        prop_assert_eq!(stats.trials as usize, s.records().len());
        prop_assert_eq!(stats.served_left + stats.served_right, stats.trials);
    }
}
