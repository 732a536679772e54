//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p mobius-bell --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mobius_bell::{
    all_configs, alice_measure, bell_report, bob_measure, conditional_tables, exact_expectations, handedness,
    log_from_str, log_to_string, run_experiment, sequential_measure, AliceDecision, AlicePolicy, Cell, ExperimentSpec,
    Letter, Mode, Orientation, PairCounts, Rational, ServingConfig, StatelessPolicy, Verdict, WalkState,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const N_TRIALS: u64 = 100_000;
const SEED: u64 = 7;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn grid() -> impl Iterator<Item = Rational> {
    (0..=10).map(|k| q(k, 10))
}

fn exact_linear_law() -> Outcome {
    for p in grid() {
        let r = exact_expectations(&StatelessPolicy::FixedP(p), Mode::Standard).map_err(|e| e.to_string())?;
        ensure(r.overall.s_value == Some(p * 4), format!("p = {p}: S = {:?}", r.overall.s_value))?;
        ensure(r.overall.marginals() == [Some(q(0, 1)); 4], format!("p = {p}: marginals {:?}", r.overall.marginals()))?;
    }
    Ok("S = 4p and all marginals 0 in exact rationals on p = 0, 0.1, ..., 1".into())
}

fn accept_reject_tables() -> Outcome {
    let (acc, rej) = conditional_tables::<Rational>(Mode::Standard).map_err(|e| e.to_string())?;
    let one = Some(q(1, 1));
    ensure(acc.correlators() == [one, one, one, Some(q(-1, 1))], format!("accepted {:?}", acc.correlators()))?;
    ensure(rej.correlators() == [Some(q(0, 1)); 4], format!("rejected {:?}", rej.correlators()))?;
    Ok("given accept (1, 1, 1, -1); given reject (0, 0, 0, 0)".into())
}

fn monte_carlo_convergence() -> Outcome {
    let start = Instant::now();
    let log = run_experiment(&ExperimentSpec::new(N_TRIALS, SEED, AlicePolicy::FixedP(0.75))).map_err(|e| e.to_string())?;
    let r = bell_report::<f64>(&PairCounts::from_records(&log));
    let elapsed = start.elapsed();
    let s = r.s_value.ok_or("undefined report")?;
    ensure((s - 3.0).abs() <= 0.05, format!("p = 0.75: S = {s}"))?;

    let log = run_experiment(&ExperimentSpec::new(N_TRIALS, SEED, AlicePolicy::FixedP(1.0))).map_err(|e| e.to_string())?;
    let r1 = bell_report::<f64>(&PairCounts::from_records(&log));
    ensure(r1.s_value == Some(4.0), format!("p = 1: S = {:?}", r1.s_value))?;
    ensure(r1.s_stderr == Some(0.0), format!("p = 1: stderr = {:?}", r1.s_stderr))?;
    ensure(elapsed < Duration::from_secs(1), format!("100k trials took {elapsed:?}"))?;
    Ok(format!(
        "p = 0.75: S = {s:.4} ± {:.4} (|S - 3| <= 0.05); p = 1: S = 4 exactly; {elapsed:.2?}",
        r.s_stderr.unwrap_or(f64::NAN)
    ))
}

fn non_commutativity() -> Outcome {
    let start = WalkState { position: Cell::new(2).unwrap(), orientation: Orientation::Normal };
    let walk = |first, second| -> Result<(i8, i8), String> {
        let (a, s) = sequential_measure(start, first).map_err(|e| e.to_string())?;
        let (b, _) = sequential_measure(s, second).map_err(|e| e.to_string())?;
        Ok((a.value.value(), b.value.value()))
    };
    let primed_first = walk(Letter::APrime, Letter::A)?;
    let plain_first = walk(Letter::A, Letter::APrime)?;
    ensure(primed_first == (-1, 1), format!("(A', A) gave {primed_first:?}"))?;
    ensure(plain_first == (1, 1), format!("(A, A') gave {plain_first:?}"))?;
    Ok("(A', A) -> (-1, +1); (A, A') -> (+1, +1)".into())
}

fn orientation_invariances() -> Outcome {
    for front in [0, 2, 4, 6] {
        let n = ServingConfig::new(Cell::new(front).unwrap(), Orientation::Normal).unwrap();
        let u = ServingConfig::new(Cell::new(front).unwrap(), Orientation::UpsideDown).unwrap();
        for b in [Letter::B, Letter::BPrime] {
            ensure(bob_measure(n, b) == bob_measure(u, b), format!("Bob {b} differs at front {front}"))?;
        }
        ensure(
            alice_measure(n, AliceDecision::Accept) == alice_measure(u, AliceDecision::Accept),
            format!("accepted Alice differs at front {front}"),
        )?;
        let (rn, ru) = (alice_measure(n, AliceDecision::Reject), alice_measure(u, AliceDecision::Reject));
        ensure(rn.letter == ru.letter && rn.value == -ru.value, format!("rejected Alice does not flip at front {front}"))?;
    }
    Ok(format!("checked all {} servings", all_configs().len()))
}

fn nonlocal_ceiling() -> Outcome {
    for p in [q(0, 1), q(1, 2), q(1, 1)] {
        let r = exact_expectations(&StatelessPolicy::NonlocalOptimal(p), Mode::Nonlocal).map_err(|e| e.to_string())?;
        ensure(r.overall.s_value == Some(q(4, 1)), format!("exact p = {p}: S = {:?}", r.overall.s_value))?;
    }
    let spec = ExperimentSpec::new(N_TRIALS, SEED, AlicePolicy::NonlocalOptimal(0.3)).with_mode(Mode::Nonlocal);
    let log = run_experiment(&spec).map_err(|e| e.to_string())?;
    let r = bell_report::<f64>(&PairCounts::from_records(&log));
    ensure(r.s_value == Some(4.0), format!("Monte Carlo p = 0.3: S = {:?}", r.s_value))?;
    let (s_oracle, _, _) = common::chsh(0.3, 0.3, true);
    ensure(s_oracle == 4.0, format!("brute-force oracle gave {s_oracle}"))?;
    Ok("exact S = 4 at p = 0, 0.5, 1; Monte Carlo p = 0.3 gives S = 4 exactly".into())
}

fn handedness_detection() -> Outcome {
    let spec = ExperimentSpec::new(N_TRIALS, SEED, AlicePolicy::SidedP { left: 0.9, right: 0.6 });
    let log = run_experiment(&spec).map_err(|e| e.to_string())?;
    let h = handedness::<f64>(&log, 3.0);
    let sl = h.left.s_value.ok_or("left undefined")?;
    let sr = h.right.s_value.ok_or("right undefined")?;
    ensure((sl - 3.6).abs() <= 0.06, format!("S_left = {sl}"))?;
    ensure((sr - 2.4).abs() <= 0.08, format!("S_right = {sr}"))?;
    ensure(h.verdict == Verdict::LeftBiased, format!("verdict {:?}", h.verdict))?;
    Ok(format!("S_left = {sl:.4}, S_right = {sr:.4}, verdict left_biased"))
}

fn threshold_property() -> Outcome {
    for p in grid() {
        let s = exact_expectations(&StatelessPolicy::FixedP(p), Mode::Standard)
            .map_err(|e| e.to_string())?
            .overall
            .s_value
            .ok_or("undefined")?;
        ensure((s > q(2, 1)) == (p > q(1, 2)), format!("p = {p}: S = {s}"))?;
        if p == q(1, 2) {
            ensure(s == q(2, 1), format!("p = 1/2: S = {s}"))?;
        }
    }
    Ok("S > 2 exactly when p > 1/2; S = 2 at p = 1/2".into())
}

fn replay_equivalence() -> Outcome {
    let specs = [
        ExperimentSpec::new(N_TRIALS, SEED, AlicePolicy::FixedP(0.75)),
        ExperimentSpec::new(N_TRIALS, SEED, AlicePolicy::SidedP { left: 0.9, right: 0.6 }),
        ExperimentSpec::new(N_TRIALS, SEED, AlicePolicy::Fatigue { p0: 0.4, tau: 2_000.0 }),
        ExperimentSpec::new(N_TRIALS, SEED, AlicePolicy::NonlocalOptimal(0.3)).with_mode(Mode::Nonlocal),
    ];
    for spec in &specs {
        let log = run_experiment(spec).map_err(|e| e.to_string())?;
        let original = bell_report::<f64>(&PairCounts::from_records(&log));
        let replayed_log = log_from_str(&log_to_string(&log)).map_err(|e| e.to_string())?;
        let replayed = bell_report::<f64>(&PairCounts::from_records(&replayed_log));
        let bits = |r: &mobius_bell::BellReport<f64>| {
            let mut v: Vec<u64> = r
                .correlators()
                .iter()
                .flat_map(|e| [e.value, e.stderr])
                .chain([r.s_value, r.s_stderr, r.p_hat, r.violation_z])
                .map(|x| x.map_or(u64::MAX, f64::to_bits))
                .collect();
            v.push(r.n_trials);
            v
        };
        ensure(replayed == original && bits(&replayed) == bits(&original), format!("{:?} differs after replay", spec.alice))?;
    }
    Ok(format!("{} exported logs replay to bit-identical reports", specs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exact oracle linear law", exact_linear_law),
        ("accept/reject tables", accept_reject_tables),
        ("Monte Carlo convergence", monte_carlo_convergence),
        ("non-commutativity transcript", non_commutativity),
        ("orientation invariances", orientation_invariances),
        ("nonlocal ceiling", nonlocal_ceiling),
        ("handedness detection", handedness_detection),
        ("threshold property", threshold_property),
        ("replay equivalence", replay_equivalence),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
