//! Output envelope and rendering. Every command prints one document to
//! standard output: `{"ok": bool, "result": ..., "details": ...}` in
//! JSON mode, an indented key/value listing in text mode. Integers ride
//! as JSON numbers while they fit in 64 bits and as decimal strings
//! beyond that.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use fptrace_core::groupring::TwistedClassVector;
use fptrace_core::Result;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Json,
    Text,
}

pub struct Outcome {
    pub ok: bool,
    pub result: Value,
    pub details: String,
    /// Preformatted body for text mode; the generic renderer runs when
    /// this is empty.
    pub text: Option<String>,
}

impl Outcome {
    pub fn pass(result: Value, details: impl Into<String>) -> Self {
        Outcome { ok: true, result, details: details.into(), text: None }
    }

    pub fn verdict(ok: bool, result: Value, details: impl Into<String>) -> Self {
        Outcome { ok, result, details: details.into(), text: None }
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }
}

pub fn big(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(n) => json!(n),
        None => json!(v.to_string()),
    }
}

pub fn class_vector(v: &TwistedClassVector) -> Result<Value> {
    let mut classes = Map::new();
    for label in v.set().labels()? {
        classes.insert(v.set().label_name(&label), big(&v.coeff(&label)));
    }
    Ok(json!({
        "classes": classes,
        "class_count": classes.len(),
        "augment": big(&v.augment()),
    }))
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{}{}:\n", pad, k));
                        render_value(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{}{} = {}\n", pad, k, plain(val))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{}-\n", pad));
                        render_value(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{}- {}\n", pad, plain(item))),
                }
            }
        }
        _ => out.push_str(&format!("{}{}\n", pad, plain(v))),
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn emit(format: Format, outcome: &Outcome) {
    match format {
        Format::Json => {
            let doc = json!({
                "ok": outcome.ok,
                "result": outcome.result,
                "details": outcome.details,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        Format::Text => {
            println!("{}", if outcome.ok { "ok" } else { "FAILED" });
            if !outcome.details.is_empty() {
                println!("{}", outcome.details);
            }
            match &outcome.text {
                Some(body) => print!("{}", body),
                None if !outcome.result.is_null() => {
                    let mut buf = String::new();
                    render_value(&outcome.result, 0, &mut buf);
                    print!("{}", buf);
                }
                None => {}
            }
        }
    }
}
