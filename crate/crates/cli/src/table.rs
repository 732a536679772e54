//! Delimited-table output.
//!
//! Tables are comma separated with a fixed header row. Undefined values are
//! empty fields and floats are printed in shortest round-trip form, so
//! [`parse_report_table`] recovers exactly what [`report_table`] printed.

use mobius_bell::{BellReport, CorrelatorEstimate};

use crate::error::CliError;

const ESTIMATES: [&str; 8] = [
    "correlator_ab",
    "correlator_a_prime_b",
    "correlator_ab_prime",
    "correlator_a_prime_b_prime",
    "marginal_a",
    "marginal_a_prime",
    "marginal_b",
    "marginal_b_prime",
];

pub const SWEEP_HEADER: [&str; 5] = ["p", "s_exact", "s_mc", "s_stderr", "n"];

/// Header of the report table: `scope`, `n_trials`, then value, stderr and
/// count for each correlator and marginal, then the summary columns.
pub fn report_header() -> Vec<String> {
    let mut h = vec!["scope".to_owned(), "n_trials".to_owned()];
    for name in ESTIMATES {
        h.extend([name.to_owned(), format!("{name}_stderr"), format!("{name}_n")]);
    }
    h.extend(["s_value", "s_stderr", "p_hat", "classical_bound", "violation_z"].map(String::from));
    h
}

fn estimates(r: &BellReport<f64>) -> [&CorrelatorEstimate<f64>; 8] {
    [
        &r.correlator_ab,
        &r.correlator_a_prime_b,
        &r.correlator_ab_prime,
        &r.correlator_a_prime_b_prime,
        &r.marginal_a,
        &r.marginal_a_prime,
        &r.marginal_b,
        &r.marginal_b_prime,
    ]
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per `(scope, report)`, e.g. `all`, `left`, `right`.
pub fn report_table(rows: &[(&str, &BellReport<f64>)]) -> String {
    let mut out = report_header().join(",");
    out.push('\n');
    for (scope, r) in rows {
        let mut fields = vec![scope.to_string(), r.n_trials.to_string()];
        for e in estimates(r) {
            fields.extend([opt(e.value), opt(e.stderr), e.n.to_string()]);
        }
        fields.extend([opt(r.s_value), opt(r.s_stderr), opt(r.p_hat), r.classical_bound.to_string(), opt(r.violation_z)]);
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Runtime(format!("malformed table: {}", msg.into()))
}

fn parse_opt(s: &str) -> Result<Option<f64>, CliError> {
    if s.is_empty() {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|_| bad(format!("not a number: {s:?}")))
    }
}

fn parse_u64(s: &str) -> Result<u64, CliError> {
    s.parse().map_err(|_| bad(format!("not a count: {s:?}")))
}

fn lines_after_header<'a>(text: &'a str, header: &[String]) -> Result<impl Iterator<Item = Vec<&'a str>>, CliError> {
    let mut lines = text.lines();
    let first = lines.next().ok_or_else(|| bad("empty input"))?;
    if first.split(',').ne(header.iter().map(String::as_str)) {
        return Err(bad(format!("unexpected header {first:?}")));
    }
    Ok(lines.filter(|l| !l.is_empty()).map(|l| l.split(',').collect()))
}

pub fn parse_report_table(text: &str) -> Result<Vec<(String, BellReport<f64>)>, CliError> {
    let header = report_header();
    let mut rows = Vec::new();
    for f in lines_after_header(text, &header)? {
        if f.len() != header.len() {
            return Err(bad(format!("expected {} fields, got {}", header.len(), f.len())));
        }
        let est = |i: usize| -> Result<CorrelatorEstimate<f64>, CliError> {
            let at = 2 + 3 * i;
            Ok(CorrelatorEstimate { value: parse_opt(f[at])?, stderr: parse_opt(f[at + 1])?, n: parse_u64(f[at + 2])? })
        };
        let tail = 2 + 3 * ESTIMATES.len();
        let report = BellReport {
            n_trials: parse_u64(f[1])?,
            correlator_ab: est(0)?,
            correlator_a_prime_b: est(1)?,
            correlator_ab_prime: est(2)?,
            correlator_a_prime_b_prime: est(3)?,
            marginal_a: est(4)?,
            marginal_a_prime: est(5)?,
            marginal_b: est(6)?,
            marginal_b_prime: est(7)?,
            s_value: parse_opt(f[tail])?,
            s_stderr: parse_opt(f[tail + 1])?,
            p_hat: parse_opt(f[tail + 2])?,
            classical_bound: parse_opt(f[tail + 3])?.ok_or_else(|| bad("missing classical_bound"))?,
            violation_z: parse_opt(f[tail + 4])?,
        };
        rows.push((f[0].to_owned(), report));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub s_exact: f64,
    pub s_mc: Option<f64>,
    pub s_stderr: Option<f64>,
    pub n: u64,
}

pub fn sweep_table(rows: &[SweepRow]) -> String {
    let mut out = SWEEP_HEADER.join(",");
    out.push('\n');
    for r in rows {
        let fields = [r.p.to_string(), r.s_exact.to_string(), opt(r.s_mc), opt(r.s_stderr), r.n.to_string()];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_sweep_table(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let header = SWEEP_HEADER.map(String::from);
    lines_after_header(text, &header)?
        .map(|f| {
            if f.len() != SWEEP_HEADER.len() {
                return Err(bad(format!("expected {} fields, got {}", SWEEP_HEADER.len(), f.len())));
            }
            let req = |s: &str| parse_opt(s)?.ok_or_else(|| bad("missing value"));
            Ok(SweepRow { p: req(f[0])?, s_exact: req(f[1])?, s_mc: parse_opt(f[2])?, s_stderr: parse_opt(f[3])?, n: parse_u64(f[4])? })
        })
        .collect()
}
