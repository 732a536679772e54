//! Command implementations. Each writes its report to `out`.

use std::fs::File;
use std::io::{BufWriter, Write};

use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use mobius_bell::{
    exact_expectations, run_experiment, symbol_at, sequential_measure, write_log, AlicePolicy, BellReport, BobPolicy,
    Cell, CorrelatorEstimate, ExactBell, ExperimentSpec, HandednessReport, Letter, Mode, Orientation, PlateSide,
    Rational, RunningStats, Scalar, StatelessPolicy, Verdict, WalkState, DEFAULT_VERDICT_SIGMAS,
};

use crate::args::{ExactArgs, Format, ServeArgs, SimulateArgs, SweepArgs};
use crate::error::{runtime, usage, CliError};
use crate::table::{report_table, sweep_table, SweepRow};

type Out<'a> = &'a mut dyn Write;

fn io(e: std::io::Error) -> CliError {
    runtime(format!("cannot write output: {e}"))
}

fn write_json(out: Out, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(runtime)?;
    writeln!(out, "{text}").map_err(io)
}

fn describe(policy: &AlicePolicy) -> String {
    match policy {
        AlicePolicy::FixedP(p) => format!("p = {p}"),
        AlicePolicy::SidedP { left, right } => format!("p_left = {left}, p_right = {right}"),
        AlicePolicy::Fatigue { p0, tau } => format!("fatigue p0 = {p0}, tau = {tau}"),
        AlicePolicy::Scripted(s) => format!("scripted ({} decisions)", s.len()),
        AlicePolicy::External => "external".into(),
        AlicePolicy::NonlocalOptimal(p) => format!("nonlocal optimal, p = {p}"),
    }
}

fn describe_bob(policy: &BobPolicy) -> String {
    match policy {
        BobPolicy::UniformRandom => "uniform random".into(),
        BobPolicy::Scripted(s) => format!("scripted ({} letters)", s.len()),
        BobPolicy::External => "external".into(),
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::LeftBiased => "left_biased",
        Verdict::RightBiased => "right_biased",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn num(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".into(), |v| format!("{v:.4}"))
}

fn estimate(e: &CorrelatorEstimate<f64>) -> String {
    match (e.value, e.stderr) {
        (Some(v), Some(s)) => format!("{v:+.4} ± {s:.4}  (n = {})", e.n),
        _ => format!("undefined  (n = {})", e.n),
    }
}

fn s_line(r: &BellReport<f64>) -> String {
    match (r.s_value, r.s_stderr) {
        (Some(s), Some(se)) => {
            let z = r.violation_z.map_or_else(String::new, |z| format!(", z = {z:.2}"));
            format!("{s:.4} ± {se:.4}  (classical bound {}{z})", r.classical_bound)
        }
        _ => "undefined".into(),
    }
}

const LABELS: [&str; 8] = ["<AB>  ", "<A'B> ", "<AB'> ", "<A'B'>", "<A>  ", "<A'> ", "<B>  ", "<B'> "];

fn write_bell_text(out: Out, r: &BellReport<f64>) -> std::io::Result<()> {
    writeln!(out, "S = {}", s_line(r))?;
    writeln!(out, "p_hat = {}", num(r.p_hat))?;
    let [ab, apb, abp, apbp] = r.correlators();
    let marginals = [&r.marginal_a, &r.marginal_a_prime, &r.marginal_b, &r.marginal_b_prime];
    for (label, e) in LABELS.iter().zip([ab, apb, abp, apbp].into_iter().chain(marginals)) {
        writeln!(out, "  {label} = {}", estimate(e))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateRecord<'a> {
    command: &'static str,
    trials: u64,
    seed: u64,
    mode: Mode,
    alice: &'a AlicePolicy,
    bob: &'a BobPolicy,
    report: BellReport<f64>,
    accept_rate_left: Option<f64>,
    accept_rate_right: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    handedness: Option<HandednessReport<f64>>,
}

pub fn simulate(a: &SimulateArgs, out: Out) -> Result<(), CliError> {
    let seed = a.seed.unwrap_or_else(rand::random);
    let spec = ExperimentSpec::new(a.trials, seed, a.alice_policy()?).with_bob(a.bob_policy()).with_mode(a.mode.into());
    spec.validate().map_err(usage)?;
    let log = run_experiment(&spec).map_err(runtime)?;
    if let Some(path) = &a.log {
        let file = File::create(path).map_err(|e| runtime(format!("cannot create {}: {e}", path.display())))?;
        write_log(BufWriter::new(file), &log).map_err(runtime)?;
    }
    let stats = RunningStats::from_records(&log);
    let report = stats.bell::<f64>();
    let h = stats.handedness::<f64>(DEFAULT_VERDICT_SIGMAS);
    let handedness = (h.left.n_trials > 0 && h.right.n_trials > 0).then_some(h);
    let (rate_left, rate_right) = (stats.accept_rate(PlateSide::Left), stats.accept_rate(PlateSide::Right));

    match a.format {
        Format::Record => write_json(
            out,
            &SimulateRecord {
                command: "simulate",
                trials: a.trials,
                seed,
                mode: spec.mode,
                alice: &spec.alice,
                bob: &spec.bob,
                report,
                accept_rate_left: rate_left,
                accept_rate_right: rate_right,
                handedness,
            },
        ),
        Format::Table => {
            let mut rows = vec![("all", &report)];
            if let Some(h) = &handedness {
                rows.extend([("left", &h.left), ("right", &h.right)]);
            }
            out.write_all(report_table(&rows).as_bytes()).map_err(io)
        }
        Format::Text => (|| {
            writeln!(out, "trials {}  seed {seed}  mode {}", a.trials, spec.mode)?;
            writeln!(out, "alice: {}  bob: {}", describe(&spec.alice), describe_bob(&spec.bob))?;
            write_bell_text(out, &report)?;
            writeln!(out, "accept rate: left {}  right {}", num(rate_left), num(rate_right))?;
            if let Some(h) = &handedness {
                writeln!(out, "S_left = {}", s_line(&h.left))?;
                writeln!(out, "S_right = {}", s_line(&h.right))?;
                writeln!(
                    out,
                    "p_hat_left - p_hat_right = {} ± {}  verdict {} at {} sigma",
                    num(h.difference),
                    num(h.difference_stderr),
                    verdict_name(h.verdict),
                    h.threshold_sigmas
                )?;
            }
            Ok(())
        })()
        .map_err(io),
    }
}

fn exact_value(x: &Option<Rational>) -> Value {
    match x {
        Some(q) => json!({ "exact": q.to_string(), "value": q.to_f64() }),
        None => Value::Null,
    }
}

fn exact_fields(b: &ExactBell<Rational>) -> [(&'static str, &Option<Rational>); 10] {
    [
        ("s_value", &b.s_value),
        ("p_hat", &b.p_hat),
        ("correlator_ab", &b.correlator_ab),
        ("correlator_a_prime_b", &b.correlator_a_prime_b),
        ("correlator_ab_prime", &b.correlator_ab_prime),
        ("correlator_a_prime_b_prime", &b.correlator_a_prime_b_prime),
        ("marginal_a", &b.marginal_a),
        ("marginal_a_prime", &b.marginal_a_prime),
        ("marginal_b", &b.marginal_b),
        ("marginal_b_prime", &b.marginal_b_prime),
    ]
}

fn exact_json(b: &ExactBell<Rational>) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("mass".into(), exact_value(&Some(b.mass)));
    for (k, v) in exact_fields(b) {
        m.insert(k.into(), exact_value(v));
    }
    Value::Object(m)
}

fn policy_json(p: &StatelessPolicy<Rational>) -> Value {
    match p {
        StatelessPolicy::FixedP(p) => json!({ "fixed_p": p.to_string() }),
        StatelessPolicy::SidedP { left, right } => json!({ "sided_p": { "left": left.to_string(), "right": right.to_string() } }),
        StatelessPolicy::NonlocalOptimal(p) => json!({ "nonlocal_optimal": p.to_string() }),
    }
}

fn describe_exact(p: &StatelessPolicy<Rational>) -> String {
    match p {
        StatelessPolicy::FixedP(p) => format!("p = {p}"),
        StatelessPolicy::SidedP { left, right } => format!("p_left = {left}, p_right = {right}"),
        StatelessPolicy::NonlocalOptimal(p) => format!("nonlocal optimal, p = {p}"),
    }
}

fn exact_text(x: &Option<Rational>) -> String {
    match x {
        Some(q) => format!("{q} exact ({})", q.to_f64().unwrap_or(f64::NAN)),
        None => "undefined".into(),
    }
}

pub fn exact(a: &ExactArgs, out: Out) -> Result<(), CliError> {
    let mode: Mode = a.mode.into();
    let policy = StatelessPolicy::<Rational>::from_policy(&a.policy.policy(mode)?).map_err(usage)?;
    let r = exact_expectations(&policy, mode).map_err(runtime)?;
    let scopes = [("overall", &r.overall), ("left", &r.left), ("right", &r.right), ("accepted", &r.accepted), ("rejected", &r.rejected)];
    match a.format {
        Format::Record => {
            let mut doc = json!({ "command": "exact", "exact": true, "mode": mode, "policy": policy_json(&policy) });
            for (name, b) in scopes {
                doc[name] = exact_json(b);
            }
            write_json(out, &doc)
        }
        Format::Table => {
            let mut header = vec!["scope", "mass"];
            header.extend(exact_fields(&r.overall).map(|(k, _)| k));
            let mut text = header.join(",") + "\n";
            for (name, b) in scopes {
                let mut row = vec![name.to_owned(), b.mass.to_string()];
                row.extend(exact_fields(b).map(|(_, v)| v.map(|q| q.to_string()).unwrap_or_default()));
                text += &(row.join(",") + "\n");
            }
            out.write_all(text.as_bytes()).map_err(io)
        }
        Format::Text => (|| {
            writeln!(out, "exact expectations, {mode} mode, {}", describe_exact(&policy))?;
            for (label, b) in [("S", &r.overall), ("S_left", &r.left), ("S_right", &r.right)] {
                writeln!(out, "{label} = {}", exact_text(&b.s_value))?;
            }
            for (name, b) in scopes {
                writeln!(out, "{name}:")?;
                for (k, v) in exact_fields(b).into_iter().skip(1) {
                    writeln!(out, "  {k} = {}", exact_text(v))?;
                }
            }
            Ok(())
        })()
        .map_err(io),
    }
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    command: &'static str,
    seed: u64,
    trials: u64,
    rows: &'a [SweepRow],
}

pub fn sweep(a: &SweepArgs, out: Out) -> Result<(), CliError> {
    a.validate()?;
    let seed = a.seed.unwrap_or_else(rand::random);
    let exact_p = |p: f64| Rational::from_probability(p).ok_or_else(|| usage(format!("cannot represent p = {p}")));
    let (from, to) = (exact_p(a.p_from)?, exact_p(a.p_to)?);
    let last = i64::from(a.steps - 1);
    let mut rows = Vec::with_capacity(a.steps as usize);
    for i in 0..=last {
        let p = from + (to - from) * Rational::new(i, last);
        let exact = exact_expectations(&StatelessPolicy::FixedP(p), Mode::Standard).map_err(runtime)?;
        let s_exact = exact.overall.s_value.and_then(|s| s.to_f64()).ok_or_else(|| runtime("exact S undefined"))?;
        let p = p.to_f64().expect("rational in [0, 1]");
        let log = run_experiment(&ExperimentSpec::new(a.trials, seed, AlicePolicy::FixedP(p))).map_err(runtime)?;
        let mc = RunningStats::from_records(&log).bell::<f64>();
        rows.push(SweepRow { p, s_exact, s_mc: mc.s_value, s_stderr: mc.s_stderr, n: a.trials });
    }
    match a.format {
        Format::Record => write_json(out, &SweepRecord { command: "sweep", seed, trials: a.trials, rows: &rows }),
        Format::Table => out.write_all(sweep_table(&rows).as_bytes()).map_err(io),
        Format::Text => (|| {
            writeln!(out, "seed {seed}  trials per point {}", a.trials)?;
            writeln!(out, "{:>8}  {:>8}  {:>8}  {:>8}", "p", "exact S", "MC S", "stderr")?;
            for r in &rows {
                writeln!(out, "{:>8.4}  {:>8.4}  {:>8}  {:>8}", r.p, r.s_exact, num(r.s_mc), num(r.s_stderr))?;
            }
            Ok(())
        })()
        .map_err(io),
    }
}

pub fn noncommute(out: Out) -> Result<(), CliError> {
    let start = WalkState { position: Cell::new(2).map_err(runtime)?, orientation: Orientation::Normal };
    (|| -> Result<(), CliError> {
        writeln!(out, "start at cell {} ({}), orientation {}", start.position, symbol_at(start.position), start.orientation)
            .map_err(io)?;
        for order in [[Letter::APrime, Letter::A], [Letter::A, Letter::APrime]] {
            writeln!(out, "order {}, {}:", order[0], order[1]).map_err(io)?;
            let mut state = start;
            for letter in order {
                let (result, next) = sequential_measure(state, letter).map_err(runtime)?;
                writeln!(out, "  {result}  read at cell {} ({})", next.position, symbol_at(next.position)).map_err(io)?;
                state = next;
            }
        }
        Ok(())
    })()
}

pub fn serve(a: &ServeArgs, out: Out) -> Result<(), CliError> {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(runtime)?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((a.bind, a.port))
            .await
            .map_err(|e| runtime(format!("cannot bind {}:{}: {e}", a.bind, a.port)))?;
        let addr = listener.local_addr().map_err(runtime)?;
        writeln!(out, "listening on http://{addr}").map_err(io)?;
        out.flush().map_err(io)?;
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        mobius_session::serve(listener, shutdown).await.map_err(runtime)?;
        writeln!(out, "shut down").map_err(io)
    })
}
