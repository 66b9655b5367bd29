//! Information records and the record exchange document format.
//!
//! A record document is a JSON object
//! `{ "pid": "<prefix/suffix>", "record": { "<attribute-pid>": <string | [string, ...]> } }`.
//! Values are always strings. Repeatable attributes serialize as arrays,
//! everything else as a plain string unless it carries several values.

mod engine;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub use engine::RecordEngine;
pub use engine::referencing_pairs;

use crate::pid::Pid;
use crate::types::TypeRegistry;
use crate::validation::ValidationOutcome;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecordError {
    #[error("malformed record document: {0}")]
    MalformedRecordDocument(String),
    #[error("record validation failed: {0}")]
    ValidationFailed(ValidationOutcome),
    #[error("profile {0} cannot be resolved")]
    UnknownProfile(String),
    #[error("profile {pid} is not a valid kernel information profile: {outcome}")]
    InvalidProfile { pid: String, outcome: ValidationOutcome },
    #[error("record is already registered as {0}")]
    AlreadyRegistered(String),
    #[error(transparent)]
    Registry(#[from] crate::registry::RegistryError),
}

impl RecordError {
    pub fn code(&self) -> &'static str {
        match self {
            RecordError::MalformedRecordDocument(_) => "MalformedRecordDocument",
            RecordError::ValidationFailed(_) => "ValidationFailed",
            RecordError::UnknownProfile(_) => "UnknownProfile",
            RecordError::InvalidProfile { .. } => "InvalidProfile",
            RecordError::AlreadyRegistered(_) => "AlreadyRegistered",
            RecordError::Registry(e) => e.code(),
        }
    }
}

/// A multiset of key/value pairs, optionally registered under a PID.
///
/// Pairs are grouped by key; the order of values under one key is kept so
/// that "first listed location" is well defined.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformationRecord {
    pub pid: Option<Pid>,
    entries: BTreeMap<String, Vec<String>>,
}

impl InformationRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_pid(mut self, pid: Pid) -> Self {
        self.pid = Some(pid);
        self
    }

    pub fn add(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.entries.entry(key.into()).or_default().push(value.into());
        self
    }

    pub fn set(&mut self, key: impl Into<String>, values: Vec<String>) -> &mut Self {
        let key = key.into();
        if values.is_empty() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, values);
        }
        self
    }

    pub fn remove(&mut self, key: &str) -> Option<Vec<String>> {
        self.entries.remove(key)
    }

    pub fn values(&self, key: &str) -> &[String] {
        self.entries.get(key).map(Vec::as_slice).unwrap_or_default()
    }

    pub fn first(&self, key: &str) -> Option<&str> {
        self.values(key).first().map(String::as_str)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// All pairs in key order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .flat_map(|(k, vs)| vs.iter().map(move |v| (k.as_str(), v.as_str())))
    }

    pub fn pair_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Side information carried by fixture snapshots of foreign records.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annotations {
    /// Location values known to point at human-oriented landing pages.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub landing_pages: Vec<String>,
}

impl Annotations {
    pub fn is_empty(&self) -> bool {
        self.landing_pages.is_empty()
    }
}

/// Parses a record exchange document. Unknown top-level fields and
/// non-string values are rejected.
pub fn parse_record(document: &str) -> Result<InformationRecord, RecordError> {
    let value: Value = serde_json::from_str(document).map_err(malformed)?;
    parse_record_value(&value, false).map(|(record, _)| record)
}

/// Parses a fixture snapshot: a record document that may also carry an
/// `annotations` object.
pub fn parse_snapshot(document: &str) -> Result<(InformationRecord, Annotations), RecordError> {
    let value: Value = serde_json::from_str(document).map_err(malformed)?;
    parse_record_value(&value, true)
}

pub fn parse_record_value(
    value: &Value,
    allow_annotations: bool,
) -> Result<(InformationRecord, Annotations), RecordError> {
    let Value::Object(top) = value else {
        return Err(RecordError::MalformedRecordDocument("document is not an object".into()));
    };
    let mut annotations = Annotations::default();
    for (field, content) in top {
        match field.as_str() {
            "pid" | "record" => {}
            "annotations" if allow_annotations => {
                annotations = serde_json::from_value(content.clone()).map_err(malformed)?;
            }
            other => {
                return Err(RecordError::MalformedRecordDocument(format!(
                    "unknown top-level field {other:?}"
                )))
            }
        }
    }

    let mut record = InformationRecord::new();
    match top.get("pid") {
        None | Some(Value::Null) => {}
        Some(Value::String(text)) => {
            record.pid = Some(Pid::parse(text).map_err(|e| malformed(e))?);
        }
        Some(_) => return Err(RecordError::MalformedRecordDocument("pid is not a string".into())),
    }

    let Some(Value::Object(pairs)) = top.get("record") else {
        return Err(RecordError::MalformedRecordDocument("missing record object".into()));
    };
    for (key, content) in pairs {
        match content {
            Value::String(s) => {
                record.add(key.clone(), s.clone());
            }
            Value::Array(items) if !items.is_empty() => {
                for item in items {
                    let Value::String(s) = item else {
                        return Err(RecordError::MalformedRecordDocument(format!(
                            "value under {key:?} is not a string"
                        )));
                    };
                    record.add(key.clone(), s.clone());
                }
            }
            Value::Array(_) => {
                return Err(RecordError::MalformedRecordDocument(format!(
                    "empty value list under {key:?}"
                )))
            }
            _ => {
                return Err(RecordError::MalformedRecordDocument(format!(
                    "value under {key:?} is not a string"
                )))
            }
        }
    }
    Ok((record, annotations))
}

/// Serializes a record into the exchange format, using the registry to
/// decide which attributes are repeatable.
pub fn serialize_record(record: &InformationRecord, types: &TypeRegistry) -> Value {
    let mut pairs = Map::new();
    for (key, values) in record.entries() {
        let repeatable = types.attribute(key).is_some_and(|a| a.repeatable);
        let content = if repeatable || values.len() > 1 {
            Value::Array(values.iter().cloned().map(Value::String).collect())
        } else {
            Value::String(values[0].clone())
        };
        pairs.insert(key.to_owned(), content);
    }
    let mut top = Map::new();
    if let Some(pid) = &record.pid {
        top.insert("pid".into(), Value::String(pid.to_string()));
    }
    top.insert("record".into(), Value::Object(pairs));
    Value::Object(top)
}

pub fn serialize_snapshot(
    record: &InformationRecord,
    annotations: &Annotations,
    types: &TypeRegistry,
) -> Value {
    let mut doc = serialize_record(record, types);
    if !annotations.is_empty() {
        doc["annotations"] = serde_json::to_value(annotations).expect("annotations serialize");
    }
    doc
}

fn malformed(e: impl std::fmt::Display) -> RecordError {
    RecordError::MalformedRecordDocument(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_strings_and_arrays() {
        let doc = r#"{"pid":"1.2/x","record":{"1.2/a":"v","1.2/b":["p","q"]}}"#;
        let r = parse_record(doc).unwrap();
        assert_eq!(r.pid.as_ref().unwrap().as_str(), "1.2/x");
        assert_eq!(r.values("1.2/b"), ["p", "q"]);
        assert_eq!(r.pair_count(), 3);
    }

    #[test]
    fn parse_rejects_non_strings_and_unknown_fields() {
        for bad in [
            r#"{"pid":"1.2/x","record":{"1.2/a":3}}"#,
            r#"{"pid":"1.2/x","record":{"1.2/a":["x",3]}}"#,
            r#"{"pid":"1.2/x","record":{"1.2/a":[]}}"#,
            r#"{"pid":"1.2/x","record":{},"extra":1}"#,
            r#"{"pid":"nope","record":{}}"#,
            r#"{"pid":"1.2/x"}"#,
            r#"[1,2]"#,
            "not json",
        ] {
            assert!(
                matches!(parse_record(bad), Err(RecordError::MalformedRecordDocument(_))),
                "{bad} accepted"
            );
        }
    }

    #[test]
    fn annotations_only_in_snapshots() {
        let doc = r#"{"pid":"1.2/x","record":{},"annotations":{"landing_pages":["https://x.org"]}}"#;
        assert!(parse_record(doc).is_err());
        let (_, ann) = parse_snapshot(doc).unwrap();
        assert_eq!(ann.landing_pages, ["https://x.org"]);
    }

    #[test]
    fn missing_pid_is_allowed() {
        let r = parse_record(r#"{"record":{"k":"v"}}"#).unwrap();
        assert!(r.pid.is_none());
        let v = serialize_record(&r, &TypeRegistry::new());
        assert!(v.get("pid").is_none());
    }

    #[test]
    fn multi_values_serialize_as_arrays_even_when_unknown() {
        let mut r = InformationRecord::new();
        r.add("k", "a").add("k", "b").add("j", "c");
        let v = serialize_record(&r, &TypeRegistry::new());
        assert_eq!(v["record"]["k"], serde_json::json!(["a", "b"]));
        assert_eq!(v["record"]["j"], serde_json::json!("c"));
    }
}
