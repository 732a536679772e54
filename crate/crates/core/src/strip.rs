//! The Möbius strip as an 8-cell double cover.
//!
//! Each of the four physical segments has two faces. Walking once around the
//! band lands on the opposite face, so the pair (segment, face) forms a single
//! 8-cycle: cell `i` is segment `i % 4` on face `i / 4`. Cells 0..4 hold the
//! printed sequence `A+ B'+ A'- B-`, cells 4..8 the same letters with every
//! sign reversed.

use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of cells on the double cover.
pub const CELLS: u8 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    #[serde(rename = "A")]
    A,
    #[serde(rename = "A'")]
    APrime,
    #[serde(rename = "B")]
    B,
    #[serde(rename = "B'")]
    BPrime,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::APrime, Letter::B, Letter::BPrime];
    pub const A_TYPE: [Letter; 2] = [Letter::A, Letter::APrime];
    pub const B_TYPE: [Letter; 2] = [Letter::B, Letter::BPrime];

    pub fn is_a_type(self) -> bool {
        matches!(self, Letter::A | Letter::APrime)
    }

    pub fn is_b_type(self) -> bool {
        !self.is_a_type()
    }

    /// The other A-type letter. Errors on B-type input.
    pub fn other_a(self) -> Result<Letter> {
        match self {
            Letter::A => Ok(Letter::APrime),
            Letter::APrime => Ok(Letter::A),
            other => Err(Error::NotAType(other)),
        }
    }

    /// Wire name: `A`, `A'`, `B` or `B'`.
    pub fn as_str(self) -> &'static str {
        match self {
            Letter::A => "A",
            Letter::APrime => "A'",
            Letter::B => "B",
            Letter::BPrime => "B'",
        }
    }

    /// Position within its own type (`A`/`B` are 0, primed letters 1).
    pub(crate) fn slot(self) -> usize {
        match self {
            Letter::A | Letter::B => 0,
            Letter::APrime | Letter::BPrime => 1,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Letter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "A" => Ok(Letter::A),
            "A'" | "A′" => Ok(Letter::APrime),
            "B" => Ok(Letter::B),
            "B'" | "B′" => Ok(Letter::BPrime),
            other => Err(format!("unknown letter {other:?}")),
        }
    }
}

/// A measured or printed sign, serialized as the integer `1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    fn glyph(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value()
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, Self::Error> {
        Sign::from_value(v.into()).ok_or_else(|| format!("sign must be 1 or -1, got {v}"))
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.value())
    }
}

/// A position on the double cover, always in `0..8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Cell(u8);

impl Cell {
    pub fn new(index: i64) -> Result<Cell> {
        if (0..CELLS as i64).contains(&index) {
            Ok(Cell(index as u8))
        } else {
            Err(Error::CellOutOfRange(index))
        }
    }

    /// Wraps any integer onto the cycle.
    pub fn wrapping(index: i64) -> Cell {
        Cell(index.rem_euclid(CELLS as i64) as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn segment(self) -> u8 {
        self.0 % 4
    }

    pub fn face(self) -> u8 {
        self.0 / 4
    }

    pub fn offset(self, delta: i64) -> Cell {
        Cell::wrapping(self.0 as i64 + delta)
    }

    pub fn is_a_type(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn all() -> impl Iterator<Item = Cell> {
        (0..CELLS).map(Cell)
    }
}

impl From<Cell> for u8 {
    fn from(c: Cell) -> u8 {
        c.0
    }
}

impl TryFrom<u8> for Cell {
    type Error = Error;

    fn try_from(v: u8) -> Result<Cell> {
        Cell::new(v.into())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub letter: Letter,
    pub sign: Sign,
}

impl Symbol {
    pub const fn new(letter: Letter, sign: Sign) -> Symbol {
        Symbol { letter, sign }
    }

    /// Printed form such as `A'-`.
    pub fn glyph(&self) -> String {
        format!("{}{}", self.letter, self.sign.glyph())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.glyph())
    }
}

#[derive(Serialize, Deserialize)]
struct SymbolWire {
    letter: Letter,
    sign: Sign,
    #[serde(default, skip_deserializing)]
    glyph: String,
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolWire { letter: self.letter, sign: self.sign, glyph: self.glyph() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = SymbolWire::deserialize(deserializer)?;
        Ok(Symbol::new(wire.letter, wire.sign))
    }
}

const TABLE: [Symbol; CELLS as usize] = [
    Symbol::new(Letter::A, Sign::Plus),
    Symbol::new(Letter::BPrime, Sign::Plus),
    Symbol::new(Letter::APrime, Sign::Minus),
    Symbol::new(Letter::B, Sign::Minus),
    Symbol::new(Letter::A, Sign::Minus),
    Symbol::new(Letter::BPrime, Sign::Minus),
    Symbol::new(Letter::APrime, Sign::Plus),
    Symbol::new(Letter::B, Sign::Plus),
];

pub fn symbol_at(cell: Cell) -> Symbol {
    TABLE[cell.0 as usize]
}

/// The same segment seen from the other face.
pub fn antipode(cell: Cell) -> Cell {
    cell.offset(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Normal,
    UpsideDown,
}

impl Orientation {
    pub const BOTH: [Orientation; 2] = [Orientation::Normal, Orientation::UpsideDown];

    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::Normal => Orientation::UpsideDown,
            Orientation::UpsideDown => Orientation::Normal,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Normal => "normal",
            Orientation::UpsideDown => "upside_down",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Cell-index step of one clockwise segment. The label `Normal` is the
/// serving in which rejecting from the front `A'-` cell lands on `A+`.
pub fn clockwise_step(orientation: Orientation) -> i64 {
    match orientation {
        Orientation::Normal => -1,
        Orientation::UpsideDown => 1,
    }
}

/// Walks `segments` steps clockwise.
pub fn traverse(start: Cell, orientation: Orientation, segments: u32) -> Cell {
    start.offset(segments as i64 * clockwise_step(orientation))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ServingWire", into = "ServingWire")]
pub struct ServingConfig {
    front: Cell,
    orientation: Orientation,
}

#[derive(Serialize, Deserialize)]
struct ServingWire {
    front_cell: u8,
    orientation: Orientation,
}

impl TryFrom<ServingWire> for ServingConfig {
    type Error = Error;

    fn try_from(w: ServingWire) -> Result<Self> {
        ServingConfig::new(Cell::new(w.front_cell.into())?, w.orientation)
    }
}

impl From<ServingConfig> for ServingWire {
    fn from(c: ServingConfig) -> Self {
        ServingWire { front_cell: c.front.0, orientation: c.orientation }
    }
}

impl ServingConfig {
    pub fn new(front: Cell, orientation: Orientation) -> Result<ServingConfig> {
        if front.is_a_type() {
            Ok(ServingConfig { front, orientation })
        } else {
            Err(Error::FrontNotAType(front.0))
        }
    }

    pub fn front_cell(&self) -> Cell {
        self.front
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn left_cell(&self) -> Cell {
        self.front.offset(clockwise_step(self.orientation))
    }

    pub fn right_cell(&self) -> Cell {
        self.front.offset(-clockwise_step(self.orientation))
    }
}

impl fmt::Display for ServingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.front, self.orientation)
    }
}

/// What an observer sees on a served strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalView {
    pub front: Symbol,
    pub left: Symbol,
    pub right: Symbol,
}

pub fn local_view(config: ServingConfig) -> LocalView {
    LocalView {
        front: symbol_at(config.front),
        left: symbol_at(config.left_cell()),
        right: symbol_at(config.right_cell()),
    }
}

/// All eight servings, front cell ascending, `Normal` before `UpsideDown`.
pub fn all_configs() -> Vec<ServingConfig> {
    Cell::all()
        .filter(|c| c.is_a_type())
        .flat_map(|front| Orientation::BOTH.into_iter().map(move |orientation| ServingConfig { front, orientation }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cell(i: i64) -> Cell {
        Cell::new(i).unwrap()
    }

    fn sym(letter: Letter, sign: Sign) -> Symbol {
        Symbol::new(letter, sign)
    }

    #[test]
    fn printed_layout() {
        assert_eq!(symbol_at(cell(0)), sym(Letter::A, Sign::Plus));
        assert_eq!(symbol_at(cell(2)), sym(Letter::APrime, Sign::Minus));
        assert_eq!(symbol_at(cell(6)), sym(Letter::APrime, Sign::Plus));
        let front: Vec<String> = (0..4).map(|i| symbol_at(cell(i)).glyph()).collect();
        assert_eq!(front, ["A+", "B'+", "A'-", "B-"]);
        let back: Vec<String> = (4..8).map(|i| symbol_at(cell(i)).glyph()).collect();
        assert_eq!(back, ["A-", "B'-", "A'+", "B+"]);
    }

    #[test]
    fn out_of_range_cells_rejected() {
        assert_eq!(Cell::new(8), Err(Error::CellOutOfRange(8)));
        assert_eq!(Cell::new(-1), Err(Error::CellOutOfRange(-1)));
        assert!(Cell::try_from(9u8).is_err());
    }

    #[test]
    fn antipodes() {
        assert_eq!(antipode(cell(0)), cell(4));
        assert_eq!(antipode(cell(7)), cell(3));
        for c in Cell::all() {
            assert_eq!(antipode(antipode(c)), c);
        }
    }

    #[test]
    fn signs_reverse_on_the_other_face() {
        for c in Cell::all() {
            let (s, t) = (symbol_at(c), symbol_at(antipode(c)));
            assert_eq!(t.letter, s.letter);
            assert_eq!(t.sign, -s.sign);
        }
    }

    #[test]
    fn letters_alternate_around_the_cover() {
        for c in Cell::all() {
            assert_eq!(symbol_at(c).letter.is_a_type(), c.is_a_type());
            assert_ne!(symbol_at(c).letter.is_a_type(), symbol_at(c.offset(1)).letter.is_a_type());
        }
    }

    #[test]
    fn clockwise_steps() {
        assert_eq!(clockwise_step(Orientation::Normal), -1);
        assert_eq!(clockwise_step(Orientation::UpsideDown), 1);
        assert_eq!(clockwise_step(Orientation::Normal), -clockwise_step(Orientation::UpsideDown));
    }

    #[test]
    fn traverse_examples() {
        assert_eq!(traverse(cell(2), Orientation::Normal, 2), cell(0));
        assert_eq!(traverse(cell(2), Orientation::UpsideDown, 2), cell(4));
        for c in Cell::all() {
            for o in Orientation::BOTH {
                assert_eq!(traverse(c, o, 8), c);
            }
        }
    }

    #[test]
    fn local_views() {
        let reference = ServingConfig::new(cell(2), Orientation::Normal).unwrap();
        let v = local_view(reference);
        assert_eq!((v.front.glyph(), v.left.glyph(), v.right.glyph()), ("A'-".into(), "B'+".into(), "B-".into()));

        let flipped = ServingConfig::new(cell(2), Orientation::UpsideDown).unwrap();
        let v = local_view(flipped);
        assert_eq!((v.front.glyph(), v.left.glyph(), v.right.glyph()), ("A'-".into(), "B-".into(), "B'+".into()));

        let v = local_view(ServingConfig::new(cell(0), Orientation::Normal).unwrap());
        assert_eq!((v.front.glyph(), v.left.glyph(), v.right.glyph()), ("A+".into(), "B+".into(), "B'+".into()));
    }

    #[test]
    fn view_flip_swaps_left_and_right() {
        for c in all_configs() {
            let flipped = ServingConfig::new(c.front_cell(), c.orientation().flipped()).unwrap();
            let (v, w) = (local_view(c), local_view(flipped));
            assert_eq!(v.front, w.front);
            assert_eq!((v.left, v.right), (w.right, w.left));
        }
    }

    #[test]
    fn eight_configs_in_stable_order() {
        let configs = all_configs();
        assert_eq!(configs.len(), 8);
        assert!(configs.iter().all(|c| symbol_at(c.front_cell()).letter.is_a_type()));
        assert!(configs.contains(&ServingConfig::new(cell(2), Orientation::Normal).unwrap()));
        let mut dedup = configs.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 8);
        assert_eq!(configs[0], ServingConfig::new(cell(0), Orientation::Normal).unwrap());
        assert_eq!(configs[1], ServingConfig::new(cell(0), Orientation::UpsideDown).unwrap());
        assert_eq!(configs[7], ServingConfig::new(cell(6), Orientation::UpsideDown).unwrap());
    }

    #[test]
    fn b_type_fronts_rejected() {
        assert_eq!(ServingConfig::new(cell(3), Orientation::Normal), Err(Error::FrontNotAType(3)));
    }

    #[test]
    fn other_a_is_an_involution() {
        for l in Letter::A_TYPE {
            assert_eq!(l.other_a().unwrap().other_a().unwrap(), l);
            assert_ne!(l.other_a().unwrap(), l);
        }
        assert_eq!(Letter::A.other_a(), Ok(Letter::APrime));
        assert!(Letter::B.other_a().is_err());
    }

    #[test]
    fn sign_algebra() {
        assert_eq!(-(-Sign::Plus), Sign::Plus);
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(Sign::Plus * Sign::Minus, Sign::Minus);
    }

    proptest! {
        #[test]
        fn traverse_composes(start in 0i64..8, up in any::<bool>(), n in 0u32..40, m in 0u32..40) {
            let o = if up { Orientation::UpsideDown } else { Orientation::Normal };
            let c = cell(start);
            prop_assert_eq!(traverse(traverse(c, o, n), o, m), traverse(c, o, n + m));
        }
    }
}
