//! Correlator estimates and the Bell statistic from trial logs.
//!
//! Every correlator is the mean of `alice_value * bob_value` over the trials
//! that measured that pair, with the plug-in binomial standard error
//! `sqrt((1 - v^2) / n)`. The four errors combine in quadrature for `S`.
//! A pair with no trials yields an undefined estimate rather than a zero.

use serde::{Deserialize, Serialize};

use crate::experiment::{PlateSide, TrialRecord};
use crate::scalar::Real;
use crate::strip::{Letter, Sign};

/// CHSH bound for local non-contextual models.
pub const CLASSICAL_BOUND: f64 = 2.0;

/// Default significance of the handedness verdict, in standard errors.
pub const DEFAULT_VERDICT_SIGMAS: f64 = 3.0;

/// Count and signed sum of ±1 values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tally {
    pub n: u64,
    pub sum: i64,
}

impl Tally {
    pub fn push(&mut self, value: Sign) {
        self.n += 1;
        self.sum += value.value() as i64;
    }

    pub fn merge(self, other: Tally) -> Tally {
        Tally { n: self.n + other.n, sum: self.sum + other.sum }
    }
}

/// Per-pair product tallies and per-observable marginal tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairCounts {
    /// Indexed `[alice slot][bob slot]`, slot 0 unprimed, 1 primed.
    pairs: [[Tally; 2]; 2],
    /// Indexed in `Letter::ALL` order.
    marginals: [Tally; 4],
}

fn letter_index(l: Letter) -> usize {
    Letter::ALL.iter().position(|x| *x == l).expect("letter in ALL")
}

impl PairCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a TrialRecord>) -> Self {
        records.into_iter().fold(PairCounts::new(), accumulate)
    }

    pub fn push(&mut self, record: &TrialRecord) {
        debug_assert!(record.alice_letter.is_a_type() && record.bob_letter.is_b_type());
        self.pairs[record.alice_letter.slot()][record.bob_letter.slot()].push(record.product());
        self.marginals[letter_index(record.alice_letter)].push(record.alice_value);
        self.marginals[letter_index(record.bob_letter)].push(record.bob_value);
    }

    pub fn pair(&self, alice: Letter, bob: Letter) -> Tally {
        self.pairs[alice.slot()][bob.slot()]
    }

    pub fn marginal(&self, letter: Letter) -> Tally {
        self.marginals[letter_index(letter)]
    }

    pub fn total(&self) -> u64 {
        self.pairs.iter().flatten().map(|t| t.n).sum()
    }

    /// Associative, commutative combination of two shards.
    pub fn merge(&self, other: &PairCounts) -> PairCounts {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.pairs[i][j] = self.pairs[i][j].merge(other.pairs[i][j]);
            }
        }
        for k in 0..4 {
            out.marginals[k] = self.marginals[k].merge(other.marginals[k]);
        }
        out
    }
}

/// Returns `counts` with `record` added.
pub fn accumulate(mut counts: PairCounts, record: &TrialRecord) -> PairCounts {
    counts.push(record);
    counts
}

/// Mean of ±1 values with its standard error; undefined when `n = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorEstimate<F> {
    pub n: u64,
    pub value: Option<F>,
    pub stderr: Option<F>,
}

impl<F: Real> CorrelatorEstimate<F> {
    pub fn from_tally(t: Tally) -> Self {
        if t.n == 0 {
            return CorrelatorEstimate { n: 0, value: None, stderr: None };
        }
        let n = F::from_u64(t.n).expect("count fits");
        let v = F::from_i64(t.sum).expect("sum fits") / n;
        let var = (F::one() - v * v).max(F::zero());
        CorrelatorEstimate { n: t.n, value: Some(v), stderr: Some((var / n).sqrt()) }
    }

    pub fn is_defined(&self) -> bool {
        self.value.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellReport<F> {
    pub n_trials: u64,
    pub correlator_ab: CorrelatorEstimate<F>,
    pub correlator_a_prime_b: CorrelatorEstimate<F>,
    pub correlator_ab_prime: CorrelatorEstimate<F>,
    pub correlator_a_prime_b_prime: CorrelatorEstimate<F>,
    pub marginal_a: CorrelatorEstimate<F>,
    pub marginal_a_prime: CorrelatorEstimate<F>,
    pub marginal_b: CorrelatorEstimate<F>,
    pub marginal_b_prime: CorrelatorEstimate<F>,
    pub s_value: Option<F>,
    pub s_stderr: Option<F>,
    pub p_hat: Option<F>,
    pub classical_bound: F,
    pub violation_z: Option<F>,
}

impl<F: Real> BellReport<F> {
    /// True when all four pairs have at least one trial.
    pub fn is_defined(&self) -> bool {
        self.s_value.is_some()
    }

    pub fn correlators(&self) -> [&CorrelatorEstimate<F>; 4] {
        [&self.correlator_ab, &self.correlator_a_prime_b, &self.correlator_ab_prime, &self.correlator_a_prime_b_prime]
    }
}

pub fn bell_report<F: Real>(counts: &PairCounts) -> BellReport<F> {
    use Letter::*;
    let est = |a, b| CorrelatorEstimate::<F>::from_tally(counts.pair(a, b));
    let marg = |l| CorrelatorEstimate::<F>::from_tally(counts.marginal(l));
    let (ab, apb, abp, apbp) = (est(A, B), est(APrime, B), est(A, BPrime), est(APrime, BPrime));
    let bound = F::from_f64(CLASSICAL_BOUND).expect("bound representable");

    let (mut s_value, mut s_stderr, mut p_hat, mut violation_z) = (None, None, None, None);
    if let (Some(v1), Some(v2), Some(v3), Some(v4)) = (ab.value, apb.value, abp.value, apbp.value) {
        let s = v1 + v2 + v3 - v4;
        let se = [ab, apb, abp, apbp]
            .iter()
            .map(|e| {
                let x = e.stderr.expect("defined");
                x * x
            })
            .fold(F::zero(), |acc, x| acc + x)
            .sqrt();
        s_value = Some(s);
        s_stderr = Some(se);
        p_hat = Some(s / F::from_u8(4).expect("4"));
        if se > F::zero() {
            violation_z = Some((s - bound) / se);
        }
    }

    BellReport {
        n_trials: counts.total(),
        correlator_ab: ab,
        correlator_a_prime_b: apb,
        correlator_ab_prime: abp,
        correlator_a_prime_b_prime: apbp,
        marginal_a: marg(A),
        marginal_a_prime: marg(APrime),
        marginal_b: marg(B),
        marginal_b_prime: marg(BPrime),
        s_value,
        s_stderr,
        p_hat,
        classical_bound: bound,
        violation_z,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    LeftBiased,
    RightBiased,
    Inconclusive,
}

/// Acceptance asymmetry between the two plate sides, read off the per-side
/// Bell averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandednessReport<F> {
    pub left: BellReport<F>,
    pub right: BellReport<F>,
    pub p_hat_left: Option<F>,
    pub p_hat_right: Option<F>,
    pub difference: Option<F>,
    pub difference_stderr: Option<F>,
    pub threshold_sigmas: F,
    pub verdict: Verdict,
    /// False when either side lacks a defined Bell report.
    pub defined: bool,
}

pub fn handedness_from_counts<F: Real>(left: &PairCounts, right: &PairCounts, sigmas: F) -> HandednessReport<F> {
    let (l, r) = (bell_report::<F>(left), bell_report::<F>(right));
    let mut report = HandednessReport {
        left: l,
        right: r,
        p_hat_left: l.p_hat,
        p_hat_right: r.p_hat,
        difference: None,
        difference_stderr: None,
        threshold_sigmas: sigmas,
        verdict: Verdict::Inconclusive,
        defined: false,
    };
    if let (Some(pl), Some(pr), Some(sl), Some(sr)) = (l.p_hat, r.p_hat, l.s_stderr, r.s_stderr) {
        let d = pl - pr;
        let se = (sl * sl + sr * sr).sqrt() / F::from_u8(4).expect("4");
        report.difference = Some(d);
        report.difference_stderr = Some(se);
        report.defined = true;
        if d.abs() > sigmas * se {
            report.verdict = if d > F::zero() { Verdict::LeftBiased } else { Verdict::RightBiased };
        }
    }
    report
}

pub fn handedness<'a, F: Real>(records: impl IntoIterator<Item = &'a TrialRecord>, sigmas: F) -> HandednessReport<F> {
    let mut left = PairCounts::new();
    let mut right = PairCounts::new();
    for r in records {
        match r.side {
            PlateSide::Left => left.push(r),
            PlateSide::Right => right.push(r),
        }
    }
    handedness_from_counts(&left, &right, sigmas)
}

/// Incremental statistics over a growing log: overall and per-side counts
/// plus per-side acceptance tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunningStats {
    pub all: PairCounts,
    pub left: PairCounts,
    pub right: PairCounts,
    pub served_left: u64,
    pub served_right: u64,
    pub accepted_left: u64,
    pub accepted_right: u64,
}

impl RunningStats {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a TrialRecord>) -> Self {
        let mut s = RunningStats::default();
        for r in records {
            s.push(r);
        }
        s
    }

    pub fn push(&mut self, r: &TrialRecord) {
        self.all.push(r);
        let accepted = r.alice_accepted as u64;
        match r.side {
            PlateSide::Left => {
                self.left.push(r);
                self.served_left += 1;
                self.accepted_left += accepted;
            }
            PlateSide::Right => {
                self.right.push(r);
                self.served_right += 1;
                self.accepted_right += accepted;
            }
        }
    }

    pub fn accept_rate(&self, side: PlateSide) -> Option<f64> {
        let (acc, served) = match side {
            PlateSide::Left => (self.accepted_left, self.served_left),
            PlateSide::Right => (self.accepted_right, self.served_right),
        };
        (served > 0).then(|| acc as f64 / served as f64)
    }

    pub fn bell<F: Real>(&self) -> BellReport<F> {
        bell_report(&self.all)
    }

    pub fn handedness<F: Real>(&self, sigmas: F) -> HandednessReport<F> {
        handedness_from_counts(&self.left, &self.right, sigmas)
    }
}
