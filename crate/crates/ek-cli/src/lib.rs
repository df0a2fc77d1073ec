//! Configuration loading, subcommands and JSON output for the `ek` binary.

pub mod commands;
pub mod config;

use serde_json::{json, Value};

use config::Setup;

/// The versioned JSON envelope around a command result.
pub fn envelope(command: &str, setup: Option<&Setup>, extra_hash: Option<String>, result: Value) -> Value {
    let mut v = json!({"schema": 1, "command": command, "result": result});
    if let Some(s) = setup {
        v["config_hash"] = json!(s.config.hash());
        v["config"] = s.config.canonical();
        v["embedding_choice"] = json!(s.config.embedding_choice);
        v["precision"] = json!(s.emb.precision());
    }
    if let Some(h) = extra_hash {
        v["inputs_hash"] = json!(h);
    }
    v
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
