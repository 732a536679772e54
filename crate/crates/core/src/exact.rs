//! Exact expectations by exhaustive enumeration.
//!
//! The outcome space of one trial is finite: 8 configurations, 2 plate sides,
//! 2 Bob letters and Alice's decision (with both walk directions in nonlocal
//! mode). Each outcome gets its exact probability weight and conditional
//! averages are ratios of weighted sums, so running in [`crate::Rational`]
//! gives results with no rounding at all.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{AlicePolicy, Mode, PlateSide};
use crate::measurement::{
    alice_measure, bob_measure, nonlocal_reject_direction, AliceDecision, Direction, MeasurementResult,
};
use crate::scalar::Scalar;
use crate::strip::{all_configs, Letter, ServingConfig};

/// Acceptance policies without history dependence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatelessPolicy<T> {
    FixedP(T),
    SidedP { left: T, right: T },
    NonlocalOptimal(T),
}

impl<T: Scalar> StatelessPolicy<T> {
    /// Converts a run policy. History-dependent policies are rejected.
    pub fn from_policy(policy: &AlicePolicy) -> Result<Self> {
        policy.validate()?;
        let conv = |p: f64| T::from_probability(p).ok_or(Error::InvalidProbability(p));
        Ok(match *policy {
            AlicePolicy::FixedP(p) => StatelessPolicy::FixedP(conv(p)?),
            AlicePolicy::SidedP { left, right } => StatelessPolicy::SidedP { left: conv(left)?, right: conv(right)? },
            AlicePolicy::NonlocalOptimal(p) => StatelessPolicy::NonlocalOptimal(conv(p)?),
            AlicePolicy::Fatigue { .. } | AlicePolicy::Scripted(_) | AlicePolicy::External => {
                return Err(Error::HistoryDependentPolicy)
            }
        })
    }

    pub fn accept_probability(&self, side: PlateSide) -> T {
        match self {
            StatelessPolicy::FixedP(p) | StatelessPolicy::NonlocalOptimal(p) => p.clone(),
            StatelessPolicy::SidedP { left, right } => match side {
                PlateSide::Left => left.clone(),
                PlateSide::Right => right.clone(),
            },
        }
    }

    fn validate(&self, mode: Mode) -> Result<()> {
        for side in PlateSide::BOTH {
            let p = self.accept_probability(side);
            if p < T::zero() || p > T::one() {
                return Err(Error::InvalidProbability(p.to_f64().unwrap_or(f64::NAN)));
            }
        }
        match (mode, self) {
            (Mode::Nonlocal, StatelessPolicy::NonlocalOptimal(_)) => Ok(()),
            (Mode::Nonlocal, _) => Err(Error::ModeMismatch("nonlocal mode needs a nonlocal-optimal Alice")),
            (Mode::Standard, StatelessPolicy::NonlocalOptimal(_)) => {
                Err(Error::ModeMismatch("nonlocal-optimal Alice needs nonlocal mode"))
            }
            (Mode::Standard, _) => Ok(()),
        }
    }
}

/// One point of the outcome space with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedOutcome<T> {
    pub weight: T,
    pub config: ServingConfig,
    pub side: PlateSide,
    pub decision: AliceDecision,
    pub alice: MeasurementResult,
    pub bob: MeasurementResult,
}

/// Every outcome of a single trial, weights summing to one.
pub fn enumerate_outcomes<T: Scalar>(policy: &StatelessPolicy<T>, mode: Mode) -> Result<Vec<WeightedOutcome<T>>> {
    policy.validate(mode)?;
    let base = T::ratio(1, 32);
    let mut out = Vec::with_capacity(96);
    for config in all_configs() {
        for side in PlateSide::BOTH {
            let p = policy.accept_probability(side);
            for bob_letter in Letter::B_TYPE {
                let bob = bob_measure(config, bob_letter)?;
                let mut branches = vec![(AliceDecision::Accept, p.clone())];
                match mode {
                    Mode::Standard => branches.push((AliceDecision::Reject, T::one() - p.clone())),
                    Mode::Nonlocal => {
                        let best = nonlocal_reject_direction(config, bob_letter)?;
                        for d in [Direction::Increasing, Direction::Decreasing] {
                            let w = if d == best { T::one() - p.clone() } else { T::zero() };
                            branches.push((AliceDecision::RejectWithDirection(d), w));
                        }
                    }
                }
                for (decision, w) in branches {
                    out.push(WeightedOutcome {
                        weight: base.clone() * w,
                        config,
                        side,
                        decision,
                        alice: alice_measure(config, decision),
                        bob,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Exact conditional averages over a slice of the outcome space. Entries are
/// `None` when the slice gives the conditioning event zero probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactBell<T> {
    pub mass: T,
    pub correlator_ab: Option<T>,
    pub correlator_a_prime_b: Option<T>,
    pub correlator_ab_prime: Option<T>,
    pub correlator_a_prime_b_prime: Option<T>,
    pub marginal_a: Option<T>,
    pub marginal_a_prime: Option<T>,
    pub marginal_b: Option<T>,
    pub marginal_b_prime: Option<T>,
    pub s_value: Option<T>,
    pub p_hat: Option<T>,
}

#[derive(Clone)]
struct Moments<T> {
    mass: T,
    sum: T,
}

impl<T: Scalar> Moments<T> {
    fn zero() -> Self {
        Moments { mass: T::zero(), sum: T::zero() }
    }

    fn add(&mut self, w: &T, value: i8) {
        self.mass = self.mass.clone() + w.clone();
        self.sum = self.sum.clone() + w.clone() * T::from_i8(value).expect("±1");
    }

    fn mean(&self) -> Option<T> {
        (!self.mass.is_zero()).then(|| self.sum.clone() / self.mass.clone())
    }
}

impl<T: Scalar> ExactBell<T> {
    pub fn from_outcomes<'a>(outcomes: impl IntoIterator<Item = &'a WeightedOutcome<T>>) -> Self
    where
        T: 'a,
    {
        let mut pairs: [[Moments<T>; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| Moments::zero()));
        let mut marginals: [Moments<T>; 4] = std::array::from_fn(|_| Moments::zero());
        let mut mass = T::zero();
        for o in outcomes {
            mass = mass + o.weight.clone();
            let product = (o.alice.value * o.bob.value).value();
            pairs[o.alice.letter.slot()][o.bob.letter.slot()].add(&o.weight, product);
            for m in [o.alice, o.bob] {
                let k = Letter::ALL.iter().position(|l| *l == m.letter).expect("letter");
                marginals[k].add(&o.weight, m.value.value());
            }
        }
        let [[ab, abp], [apb, apbp]] = pairs.map(|row| row.map(|m| m.mean()));
        let s_value = match (&ab, &apb, &abp, &apbp) {
            (Some(a), Some(b), Some(c), Some(d)) => Some(a.clone() + b.clone() + c.clone() - d.clone()),
            _ => None,
        };
        let p_hat = s_value.clone().map(|s| s / T::from_u8(4).expect("4"));
        let [ma, map, mb, mbp] = marginals.map(|m| m.mean());
        ExactBell {
            mass,
            correlator_ab: ab,
            correlator_a_prime_b: apb,
            correlator_ab_prime: abp,
            correlator_a_prime_b_prime: apbp,
            marginal_a: ma,
            marginal_a_prime: map,
            marginal_b: mb,
            marginal_b_prime: mbp,
            s_value,
            p_hat,
        }
    }

    /// Correlators in `(AB, A'B, AB', A'B')` order.
    pub fn correlators(&self) -> [Option<T>; 4] {
        [
            self.correlator_ab.clone(),
            self.correlator_a_prime_b.clone(),
            self.correlator_ab_prime.clone(),
            self.correlator_a_prime_b_prime.clone(),
        ]
    }

    /// Marginals in `(A, A', B, B')` order.
    pub fn marginals(&self) -> [Option<T>; 4] {
        [self.marginal_a.clone(), self.marginal_a_prime.clone(), self.marginal_b.clone(), self.marginal_b_prime.clone()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReport<T> {
    pub mode: Mode,
    pub policy: StatelessPolicy<T>,
    pub overall: ExactBell<T>,
    pub left: ExactBell<T>,
    pub right: ExactBell<T>,
    /// Conditioned on Alice accepting the suggestion.
    pub accepted: ExactBell<T>,
    /// Conditioned on Alice rejecting it.
    pub rejected: ExactBell<T>,
}

pub fn exact_expectations<T: Scalar>(policy: &StatelessPolicy<T>, mode: Mode) -> Result<ExactReport<T>> {
    let outcomes = enumerate_outcomes(policy, mode)?;
    let slice = |f: &dyn Fn(&WeightedOutcome<T>) -> bool| ExactBell::from_outcomes(outcomes.iter().filter(|o| f(o)));
    Ok(ExactReport {
        mode,
        policy: policy.clone(),
        overall: slice(&|_| true),
        left: slice(&|o| o.side == PlateSide::Left),
        right: slice(&|o| o.side == PlateSide::Right),
        accepted: slice(&|o| o.decision.is_accept()),
        rejected: slice(&|o| !o.decision.is_accept()),
    })
}

/// Conditional correlator tables given acceptance and given rejection, with
/// every serving and Bob letter equally weighted.
pub fn conditional_tables<T: Scalar>(mode: Mode) -> Result<(ExactBell<T>, ExactBell<T>)> {
    let half = T::ratio(1, 2);
    let policy = match mode {
        Mode::Standard => StatelessPolicy::FixedP(half),
        Mode::Nonlocal => StatelessPolicy::NonlocalOptimal(half),
    };
    let report = exact_expectations(&policy, mode)?;
    Ok((report.accepted, report.rejected))
}
