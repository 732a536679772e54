//! Line-delimited trial logs.
//!
//! One header line, then one comma-separated record per trial:
//!
//! ```text
//! index,front_cell,orientation,side,bob_letter,bob_value,alice_accepted,alice_letter,alice_value,alice_direction
//! 0,2,normal,left,B,-1,true,A',-1,
//! ```
//!
//! `alice_direction` is `1` or `-1` for directed (signalling-mode) rejections
//! and empty otherwise. Reading a log checks every row against the strip, so a
//! replayed log is always one the model could have produced.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{PlateSide, TrialRecord};
use crate::measurement::{alice_measure, bob_measure, suggested_letter, AliceDecision, Direction};
use crate::strip::{Cell, Letter, Orientation, ServingConfig, Sign};

pub const HEADER: [&str; 10] = [
    "index",
    "front_cell",
    "orientation",
    "side",
    "bob_letter",
    "bob_value",
    "alice_accepted",
    "alice_letter",
    "alice_value",
    "alice_direction",
];

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    index: u64,
    front_cell: u8,
    orientation: Orientation,
    side: PlateSide,
    bob_letter: Letter,
    bob_value: Sign,
    alice_accepted: bool,
    alice_letter: Letter,
    alice_value: Sign,
    alice_direction: Option<Direction>,
}

impl From<&TrialRecord> for Row {
    fn from(r: &TrialRecord) -> Self {
        Row {
            index: r.index,
            front_cell: r.config.front_cell().index(),
            orientation: r.config.orientation(),
            side: r.side,
            bob_letter: r.bob_letter,
            bob_value: r.bob_value,
            alice_accepted: r.alice_accepted,
            alice_letter: r.alice_letter,
            alice_value: r.alice_value,
            alice_direction: r.alice_direction,
        }
    }
}

impl TryFrom<Row> for TrialRecord {
    type Error = Error;

    fn try_from(row: Row) -> Result<Self> {
        let bad = |msg: String| Error::Log(format!("trial {}: {msg}", row.index));
        let config = ServingConfig::new(Cell::new(row.front_cell.into())?, row.orientation)?;
        let decision = match (row.alice_accepted, row.alice_direction) {
            (true, None) => AliceDecision::Accept,
            (true, Some(_)) => return Err(bad("accepted trial carries a direction".into())),
            (false, None) => AliceDecision::Reject,
            (false, Some(d)) => AliceDecision::RejectWithDirection(d),
        };
        let alice = alice_measure(config, decision);
        if (alice.letter, alice.value) != (row.alice_letter, row.alice_value) {
            return Err(bad(format!("Alice outcome {}{} impossible for serving {config}", row.alice_letter, row.alice_value)));
        }
        let bob = bob_measure(config, row.bob_letter)?;
        if bob.value != row.bob_value {
            return Err(bad(format!("Bob outcome {} impossible for serving {config}", row.bob_value)));
        }
        debug_assert_eq!(row.alice_accepted, row.alice_letter == suggested_letter(config));
        Ok(TrialRecord {
            index: row.index,
            config,
            side: row.side,
            bob_letter: row.bob_letter,
            bob_value: row.bob_value,
            alice_accepted: row.alice_accepted,
            alice_direction: row.alice_direction,
            alice_letter: row.alice_letter,
            alice_value: row.alice_value,
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Log(e.to_string())
}

pub fn write_log<'a, W: Write>(out: W, records: impl IntoIterator<Item = &'a TrialRecord>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER).map_err(csv_err)?;
    for r in records {
        w.serialize(Row::from(r)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Log(e.to_string()))
}

pub fn log_to_string<'a>(records: impl IntoIterator<Item = &'a TrialRecord>) -> String {
    let mut buf = Vec::new();
    write_log(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("log is ASCII")
}

pub fn read_log<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(csv_err)?;
    if header.iter().ne(HEADER) {
        return Err(Error::Log(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    rdr.deserialize::<Row>().map(|row| TrialRecord::try_from(row.map_err(csv_err)?)).collect()
}

pub fn log_from_str(s: &str) -> Result<Vec<TrialRecord>> {
    read_log(s.as_bytes())
}
