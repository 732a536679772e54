//! Readouts on a served strip.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strip::{symbol_at, traverse, Cell, Letter, Orientation, ServingConfig, Sign};

/// Segments walked when Alice rejects: the other A-type segment on the same
/// local side is always two cells away.
pub const REJECT_WALK: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasurementResult {
    pub letter: Letter,
    pub value: Sign,
}

impl fmt::Display for MeasurementResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.letter, self.value)
    }
}

/// Direction of a walk in cell-index terms, serialized as `1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn delta(self) -> i64 {
        match self {
            Direction::Increasing => 1,
            Direction::Decreasing => -1,
        }
    }

    /// Direction of the clockwise (`clockwise = true`) or counter-clockwise
    /// walk for a strip served with `orientation`.
    pub fn from_turn(clockwise: bool, orientation: Orientation) -> Direction {
        let step = crate::strip::clockwise_step(orientation) * if clockwise { 1 } else { -1 };
        if step > 0 {
            Direction::Increasing
        } else {
            Direction::Decreasing
        }
    }

    pub fn is_clockwise(self, orientation: Orientation) -> bool {
        self.delta() == crate::strip::clockwise_step(orientation)
    }
}

impl From<Direction> for i8 {
    fn from(d: Direction) -> i8 {
        d.delta() as i8
    }
}

impl TryFrom<i8> for Direction {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, Self::Error> {
        match v {
            1 => Ok(Direction::Increasing),
            -1 => Ok(Direction::Decreasing),
            _ => Err(format!("direction must be 1 or -1, got {v}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AliceDecision {
    Accept,
    Reject,
    /// Signalling mode only: reject and walk in the given direction.
    RejectWithDirection(Direction),
}

impl AliceDecision {
    pub fn is_accept(self) -> bool {
        matches!(self, AliceDecision::Accept)
    }
}

/// Position and serving of an observer walking the strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WalkState {
    pub position: Cell,
    pub orientation: Orientation,
}

impl From<ServingConfig> for WalkState {
    fn from(c: ServingConfig) -> Self {
        WalkState { position: c.front_cell(), orientation: c.orientation() }
    }
}

pub fn suggested_letter(config: ServingConfig) -> Letter {
    symbol_at(config.front_cell()).letter
}

fn read(cell: Cell) -> MeasurementResult {
    let s = symbol_at(cell);
    MeasurementResult { letter: s.letter, value: s.sign }
}

/// Alice's single measurement on a served strip.
pub fn alice_measure(config: ServingConfig, decision: AliceDecision) -> MeasurementResult {
    let front = config.front_cell();
    match decision {
        AliceDecision::Accept => read(front),
        AliceDecision::Reject => read(traverse(front, config.orientation(), REJECT_WALK)),
        AliceDecision::RejectWithDirection(d) => read(front.offset(REJECT_WALK as i64 * d.delta())),
    }
}

/// Bob reads whichever neighbour of the front cell carries `letter`.
pub fn bob_measure(config: ServingConfig, letter: Letter) -> Result<MeasurementResult> {
    if !letter.is_b_type() {
        return Err(Error::NotBType(letter));
    }
    let front = config.front_cell();
    let cell = [front.offset(1), front.offset(-1)]
        .into_iter()
        .find(|c| symbol_at(*c).letter == letter)
        .expect("both B-type letters neighbour every A-type cell");
    Ok(read(cell))
}

/// Measures an A-type letter in a multi-measurement walk. Reading the letter
/// under the observer leaves the state unchanged; the other letter moves the
/// observer two segments clockwise first.
pub fn sequential_measure(state: WalkState, letter: Letter) -> Result<(MeasurementResult, WalkState)> {
    if !letter.is_a_type() {
        return Err(Error::NotAType(letter));
    }
    if symbol_at(state.position).letter == letter {
        return Ok((read(state.position), state));
    }
    let moved = WalkState { position: traverse(state.position, state.orientation, REJECT_WALK), ..state };
    Ok((read(moved.position), moved))
}

/// Walk direction that maximises the Bell sum once Alice knows Bob's letter.
///
/// Alice rejects, so her letter is the other A-type one. The target product is
/// `-1` for the `(A', B')` pair and `+1` otherwise. The two landing cells are
/// antipodes, so exactly one direction hits the target.
pub fn nonlocal_reject_direction(config: ServingConfig, bob_letter: Letter) -> Result<Direction> {
    let bob = bob_measure(config, bob_letter)?;
    let alice_letter = suggested_letter(config).other_a()?;
    let target = if (alice_letter, bob_letter) == (Letter::APrime, Letter::BPrime) {
        Sign::Minus
    } else {
        Sign::Plus
    };
    let hits: Vec<Direction> = [Direction::Increasing, Direction::Decreasing]
        .into_iter()
        .filter(|d| alice_measure(config, AliceDecision::RejectWithDirection(*d)).value * bob.value == target)
        .collect();
    assert_eq!(hits.len(), 1, "landing cells of a rejection walk carry opposite signs");
    Ok(hits[0])
}
