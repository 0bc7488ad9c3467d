//! Human and structured renderings of command results.

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use lp_logic::entail::{Entailment, Interval};

/// Version of the structured output layout.
pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Structured,
}

/// Wraps a command's fields with the schema version and command name.
pub fn document(command: &str, fields: Value) -> String {
    let mut map = Map::new();
    map.insert("version".into(), json!(SCHEMA_VERSION));
    map.insert("command".into(), json!(command));
    if let Value::Object(rest) = fields {
        map.extend(rest);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("json values serialize");
    text.push('\n');
    text
}

pub fn interval_json(i: &Interval) -> Value {
    json!({
        "text": i.to_string(),
        "lo": i.lo.to_string(),
        "hi": i.hi.to_string(),
        "lo_open": i.lo_open,
        "hi_open": i.hi_open,
    })
}

pub fn entailment_json(e: &Entailment) -> Value {
    match e {
        Entailment::Bounds(i) => json!({ "result": "bounds", "interval": interval_json(i) }),
        Entailment::Infeasible => json!({ "result": "infeasible" }),
        Entailment::QueryUndefined => json!({ "result": "query-undefined" }),
    }
}

pub fn entailment_text(e: &Entailment) -> String {
    match e {
        Entailment::Bounds(i) => i.to_string(),
        Entailment::Infeasible => "infeasible".into(),
        Entailment::QueryUndefined => "undefined (the condition has probability 0 in every model)".into(),
    }
}
