//! Rendering of suite outcomes as text or JSON.

use opnl::kernel::Mode;
use serde_json::{json, Value};

use crate::inputs::SCHEMA;
use crate::suites::{Check, SuiteConfig};

/// Witnesses kept per check in a report.
const SHOWN: usize = 3;

pub struct SuiteOutcome {
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.report.passed())
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Plain => "plain",
        Mode::Pointed => "pointed",
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn config_json(c: &SuiteConfig) -> Value {
    json!({
        "levels": c.levels,
        "max_weight": c.max_weight,
        "arity": c.arity,
        "degrees": c.degrees,
        "samples": c.samples,
        "mode": mode_name(c.mode),
        "operad": c.operad.name(),
        "seed": c.seed,
        "inject_fault": c.inject_fault,
    })
}

pub fn to_json(outcomes: &[SuiteOutcome]) -> Value {
    let suites: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let checks: Vec<Value> = o
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "status": status(c.report.passed()),
                        "checked": c.report.checked,
                        "failures": c.report.failures,
                        "witnesses": c.report.witnesses.iter().take(SHOWN).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json!({
                "suite": o.config.suite.name(),
                "config": config_json(&o.config),
                "status": status(o.passed()),
                "checks": checks,
            })
        })
        .collect();
    json!({
        "schema": SCHEMA,
        "command": "verify",
        "status": status(outcomes.iter().all(SuiteOutcome::passed)),
        "suites": suites,
    })
}

pub fn to_text(outcomes: &[SuiteOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        let c = &o.config;
        out.push_str(&format!(
            "suite {}: levels {} max-weight {} arity {} degrees {} samples {} mode {} operad {} seed {}{}\n",
            c.suite.name(),
            c.levels,
            c.max_weight,
            c.arity,
            c.degrees,
            c.samples,
            mode_name(c.mode),
            c.operad.name(),
            c.seed,
            if c.inject_fault { " (fault injected)" } else { "" },
        ));
        for check in &o.checks {
            let r = &check.report;
            out.push_str(&format!("  {:4}  {}: {} checked", status(r.passed()), check.name, r.checked));
            if r.failures > 0 {
                out.push_str(&format!(", {} failed", r.failures));
            }
            out.push('\n');
            for w in r.witnesses.iter().take(SHOWN) {
                out.push_str(&format!(
                    "        at {} (arity {}): element {} gives {} vs {}\n",
                    w.diagram,
                    w.arity,
                    compact(&w.element),
                    compact(&w.lhs),
                    compact(&w.rhs)
                ));
            }
        }
        out.push_str(&format!("  result: {}\n", status(o.passed())));
    }
    if outcomes.len() > 1 {
        let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.config.suite.name()).collect();
        if failed.is_empty() {
            out.push_str("overall: pass\n");
        } else {
            out.push_str(&format!("overall: fail ({})\n", failed.join(", ")));
        }
    }
    out
}

/// One-line JSON for an element, cut to a readable length.
fn compact<T: serde::Serialize>(x: &T) -> String {
    let s = serde_json::to_string(x).unwrap_or_default();
    if s.chars().count() > 160 {
        format!("{}…", s.chars().take(160).collect::<String>())
    } else {
        s
    }
}
