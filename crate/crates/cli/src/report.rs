//! Text renderings of checker reports and simulation summaries.

use std::fmt::Write as _;

use resavg_core::robustness::{
    predicted_resilience_tests, predicted_strong_robustness_tests, QueryKind, RobustnessReport,
};
use resavg_core::simulator::{consensus_error, Role, SimulationTrace};

/// `key: value` lines; `predicted_tests` only when `audit` is set.
pub fn format_report(report: &RobustnessReport, n: usize, audit: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kind: {}", report.query.kind.as_str());
    let _ = writeln!(out, "params: {}", report.query.params());
    let _ = writeln!(out, "verdict: {}", report.verdict);
    match &report.witness {
        Some(w) => {
            let _ = writeln!(out, "witness: {w}");
        }
        None => out.push_str("witness: none\n"),
    }
    let _ = writeln!(out, "tests_counted: {}", report.counter.tests);
    if audit {
        if let Some(p) = predicted_tests(report.query.kind, n) {
            let _ = writeln!(out, "predicted_tests: {p}");
        }
    }
    out
}

/// Input-independent audit-mode count, for the kinds that have one.
pub fn predicted_tests(kind: QueryKind, n: usize) -> Option<u128> {
    match kind {
        QueryKind::StronglyRRobust => Some(predicted_strong_robustness_tests(n)),
        QueryKind::FResilient => Some(predicted_resilience_tests(n)),
        _ => None,
    }
}

/// Human-readable header followed by one machine-parseable line per node.
pub fn format_summary(trace: &SimulationTrace) -> String {
    let expected = trace.expected_average;
    let errors = consensus_error(trace, expected);
    let incomplete: Vec<String> =
        trace.retrieval.iter().filter(|(_, r)| r.is_none()).map(|(i, _)| i.to_string()).collect();
    let mode = match trace.mode {
        resavg_core::simulator::Mode::Sync => "sync",
        resavg_core::simulator::Mode::Async => "async",
    };

    let mut out = String::new();
    let _ = writeln!(out, "mode: {mode}");
    let _ = writeln!(out, "stopping_round: {}", trace.k_max);
    let _ = writeln!(out, "k_bar: {}", trace.k_bar);
    let _ = writeln!(out, "tau_bar: {}", trace.tau_bar);
    let _ = writeln!(out, "compliant: {}", trace.compliant);
    let _ = writeln!(out, "expected_average: {expected}");
    if incomplete.is_empty() {
        out.push_str("retrieval: complete\n");
    } else {
        let _ = writeln!(out, "retrieval: INCOMPLETE at nodes {}", incomplete.join(" "));
    }
    let max_err = errors.values().copied().fold(0.0, f64::max);
    let _ = writeln!(out, "max_error: {max_err}");
    let _ = writeln!(out, "suspicion_events: {}", trace.suspicions.len());
    for s in &trace.suspicions {
        let _ = writeln!(out, "suspicion round={} observer={} suspect={}", s.round, s.observer, s.suspect);
    }
    for (&i, role) in &trace.roles {
        match role {
            Role::Regular => {
                let at = trace.retrieval[&i].map_or_else(|| "never".to_string(), |k| k.to_string());
                let _ = writeln!(
                    out,
                    "node={i} role=regular final_x={} err={} retrieved_at={at}",
                    trace.final_states[&i].x(),
                    errors[&i]
                );
            }
            Role::Adversary => {
                let _ = writeln!(out, "node={i} role=adversary final_x=- err=- retrieved_at=-");
            }
        }
    }
    out
}
