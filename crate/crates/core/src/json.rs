//! Versioned JSON documents with canonical (sorted) key order.

use crate::error::{invalid, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

pub const VERSION: u64 = 1;

/// `value` as a top-level document: objects gain `"version": 1`, anything
/// else is wrapped as `{"version": 1, "value": …}`.
pub fn document<T: Serialize>(value: &T) -> Result<Value> {
    let v = serde_json::to_value(value).map_err(|e| invalid(e.to_string()))?;
    Ok(match v {
        Value::Object(mut m) => {
            m.insert("version".into(), VERSION.into());
            Value::Object(m)
        }
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m.insert("version".into(), VERSION.into());
            Value::Object(m)
        }
    })
}

/// Pretty-printed with sorted keys and a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonical(v.clone())).expect("values always serialize");
    s.push('\n');
    s
}

fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

pub fn to_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(render(&document(value)?))
}

/// Parses a document, accepting a missing version and unwrapping `value`
/// wrappers.
pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| invalid(format!("malformed JSON: {e}")))?;
    if let Value::Object(m) = &mut v {
        if let Some(ver) = m.remove("version") {
            if ver.as_u64() != Some(VERSION) {
                return Err(invalid(format!("unsupported document version {ver}")));
            }
            if m.len() == 1 {
                if let Some(inner) = m.remove("value") {
                    v = inner;
                }
            }
        }
    }
    serde_json::from_value(v).map_err(|e| invalid(e.to_string()))
}
