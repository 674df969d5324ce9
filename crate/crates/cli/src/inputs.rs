//! Named built-in objects and versioned JSON files.

use std::path::Path;

use opnl::cosimpl::{constant_set, standard_simplex, TruncCosimplicial};
use opnl::kernel::Mode;
use opnl::nlev::{NLevObject, Oper};
use opnl::symseq::{ass, com, SymSeq};
use opnl::{Error, Result};
use serde_json::{json, Value};

use crate::suites::two_point_factor;

pub const SCHEMA: &str = "opnl/1";

/// Wraps a payload in the versioned envelope.
pub fn envelope(kind: &str, value: Value) -> Value {
    json!({ "schema": SCHEMA, "kind": kind, "value": value })
}

fn schema_error(path: &str, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

/// Reads a file holding either a bare payload or an envelope of the expected kind,
/// and the path prefix of the payload.
fn read_payload(path: &Path, kind: &str) -> Result<(Value, &'static str)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| schema_error("$", e.to_string()))?;
    let Some(obj) = v.as_object().filter(|o| o.contains_key("schema")) else {
        return Ok((v, "$"));
    };
    if obj["schema"] != SCHEMA {
        return Err(schema_error("$.schema", format!("expected {SCHEMA:?}, found {}", obj["schema"])));
    }
    match obj.get("kind") {
        Some(k) if k == kind => {}
        Some(k) => return Err(schema_error("$.kind", format!("expected {kind:?}, found {k}"))),
        None => return Err(schema_error("$", "missing field `kind`")),
    }
    let value = obj.get("value").cloned().ok_or_else(|| schema_error("$", "missing field `value`"))?;
    Ok((value, "$.value"))
}

fn from_file<T>(spec: &str, kind: &str, parse: impl Fn(&Value) -> Result<T>) -> Result<T> {
    let (payload, root) = read_payload(Path::new(spec), kind)?;
    parse(&payload).map_err(|e| match e {
        Error::Schema { path, message } => Error::Schema { path: path.replacen('$', root, 1), message },
        other => other,
    })
}

fn builtin_arg(spec: &str, name: &str) -> Option<Result<usize>> {
    let rest = spec.strip_prefix(name)?.strip_prefix(':')?;
    Some(rest.parse().map_err(|_| Error::Invalid(format!("{spec:?}: expected {name}:<number>"))))
}

/// `unit`, `sigma`, `zero`, `ass`, `com` or a JSON file.
pub fn symseq(spec: &str, mode: Mode, bound: usize) -> Result<SymSeq> {
    match spec {
        "unit" => Ok(SymSeq::unit(mode, bound)),
        "sigma" => Ok(SymSeq::sigma(mode, bound)),
        "zero" => Ok(SymSeq::zero(mode, bound)),
        "ass" => Ok(ass(mode, bound).carrier),
        "com" => Ok(com(mode, bound).carrier),
        _ => from_file(spec, "symseq", SymSeq::from_json),
    }
}

/// `simplex:K`, `const:N`, `unit`, `two-point` or a JSON file.
pub fn cosimplicial(spec: &str, mode: Mode, degrees: usize) -> Result<TruncCosimplicial> {
    if let Some(k) = builtin_arg(spec, "simplex") {
        return standard_simplex(mode, k?, degrees);
    }
    if let Some(n) = builtin_arg(spec, "const") {
        return constant_set(mode, n?, degrees);
    }
    match spec {
        "unit" => constant_set(mode, 1, degrees),
        "two-point" => two_point_factor(mode, degrees),
        _ => from_file(spec, "cosimplicial", TruncCosimplicial::from_json),
    }
}

/// `oper`, `unit` or a JSON file.
pub fn leveled(spec: &str, mode: Mode, levels: usize, weight: usize) -> Result<NLevObject> {
    match spec {
        "oper" => Oper::new(mode, levels, weight)?.object(),
        "unit" => Ok(NLevObject::unit(mode, weight, false)),
        _ => from_file(spec, "leveled", NLevObject::from_json),
    }
}
