use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::Value;

use super::RegistryError;
use crate::net::{HttpClient, NetError};
use crate::pid::Pid;
use crate::record::InformationRecord;

pub const DEFAULT_PROXY: &str = "https://hdl.handle.net";

// Administrative Handle value types that carry no kernel information.
const ADMIN_TYPES: &[&str] = &["HS_ADMIN", "HS_SECKEY", "HS_PUBKEY", "HS_VLIST", "HS_SITE", "HS_SERV"];

/// Client for a Handle proxy's REST API (`GET <base>/api/handles/{pid}`),
/// with a per-instance cache of normalized records.
#[derive(Debug)]
pub struct RemoteResolver {
    base: String,
    online: bool,
    client: HttpClient,
    cache: Mutex<HashMap<Pid, InformationRecord>>,
    fetches: AtomicUsize,
    cache_hits: AtomicUsize,
}

impl RemoteResolver {
    pub fn new(base: impl Into<String>, online: bool) -> Self {
        Self {
            base: base.into().trim_end_matches('/').to_owned(),
            online,
            client: HttpClient::default(),
            cache: Mutex::default(),
            fetches: AtomicUsize::new(0),
            cache_hits: AtomicUsize::new(0),
        }
    }

    pub fn offline() -> Self {
        Self::new(DEFAULT_PROXY, false)
    }

    pub fn is_online(&self) -> bool {
        self.online
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    /// Number of requests actually sent to the proxy.
    pub fn fetch_count(&self) -> usize {
        self.fetches.load(Ordering::SeqCst)
    }

    pub fn cache_hits(&self) -> usize {
        self.cache_hits.load(Ordering::SeqCst)
    }

    pub fn fetch(&self, pid: &Pid) -> Result<InformationRecord, RegistryError> {
        if !self.online {
            return Err(RegistryError::RemoteUnavailable("online mode is disabled".into()));
        }
        if let Some(hit) = self.cache.lock().expect("cache lock poisoned").get(pid) {
            self.cache_hits.fetch_add(1, Ordering::SeqCst);
            return Ok(hit.clone());
        }
        self.fetches.fetch_add(1, Ordering::SeqCst);
        let url = format!("{}/api/handles/{}", self.base, pid);
        let resp = self.client.get(&url).map_err(|e| match e {
            NetError::Status(404) => RegistryError::NotFound(pid.to_string()),
            other => RegistryError::RemoteUnavailable(other.to_string()),
        })?;
        let value: Value = serde_json::from_slice(&resp.body)
            .map_err(|e| RegistryError::RemoteUnavailable(format!("proxy returned invalid JSON: {e}")))?;
        let record = normalize_handle_record(pid, &value)?;
        self.cache.lock().expect("cache lock poisoned").insert(pid.clone(), record.clone());
        Ok(record)
    }
}

/// Maps a Handle REST record (`{"responseCode":1,"values":[...]}`) onto an
/// information record keyed by each value's `type`. Only string-formatted
/// values are kept; a type that occurs several times becomes a multi-value
/// key.
pub fn normalize_handle_record(pid: &Pid, value: &Value) -> Result<InformationRecord, RegistryError> {
    match value.get("responseCode").and_then(Value::as_i64) {
        Some(1) | None => {}
        Some(100) => return Err(RegistryError::NotFound(pid.to_string())),
        Some(code) => {
            return Err(RegistryError::RemoteUnavailable(format!("proxy response code {code}")))
        }
    }
    let Some(values) = value.get("values").and_then(Value::as_array) else {
        return Err(RegistryError::RemoteUnavailable("proxy record has no values".into()));
    };
    let mut indexed: Vec<(i64, &str, &str)> = Vec::new();
    for item in values {
        let Some(kind) = item.get("type").and_then(Value::as_str) else { continue };
        if ADMIN_TYPES.contains(&kind) {
            continue;
        }
        let index = item.get("index").and_then(Value::as_i64).unwrap_or(i64::MAX);
        let data = item.get("data");
        let text = match data {
            Some(Value::String(s)) => Some(s.as_str()),
            Some(Value::Object(obj)) if obj.get("format").and_then(Value::as_str) == Some("string") => {
                obj.get("value").and_then(Value::as_str)
            }
            _ => None,
        };
        if let Some(text) = text.filter(|t| !t.is_empty()) {
            indexed.push((index, kind, text));
        }
    }
    indexed.sort_by_key(|(index, _, _)| *index);
    let mut record = InformationRecord::new().with_pid(pid.clone());
    for (_, kind, text) in indexed {
        record.add(kind, text);
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn normalizes_string_values_only() {
        let pid = Pid::parse("21.T11148/b9b76f887845e32d29f7").unwrap();
        let doc = json!({
            "responseCode": 1,
            "handle": "21.T11148/b9b76f887845e32d29f7",
            "values": [
                {"index": 100, "type": "HS_ADMIN", "data": {"format": "admin", "value": {}}},
                {"index": 2, "type": "21.T11148/aa", "data": {"format": "string", "value": "second"}},
                {"index": 1, "type": "URL", "data": {"format": "string", "value": "https://dtr.example"}},
                {"index": 3, "type": "21.T11148/aa", "data": "third"},
                {"index": 4, "type": "EMPTY", "data": {"format": "string", "value": ""}}
            ]
        });
        let record = normalize_handle_record(&pid, &doc).unwrap();
        assert_eq!(record.values("URL"), ["https://dtr.example"]);
        assert_eq!(record.values("21.T11148/aa"), ["second", "third"]);
        assert!(!record.contains_key("HS_ADMIN"));
        assert!(!record.contains_key("EMPTY"));
    }

    #[test]
    fn response_code_100_is_not_found() {
        let pid = Pid::parse("1.2/x").unwrap();
        let err = normalize_handle_record(&pid, &json!({"responseCode": 100})).unwrap_err();
        assert!(matches!(err, RegistryError::NotFound(_)));
    }

    #[test]
    fn offline_never_touches_network() {
        let remote = RemoteResolver::offline();
        let pid = Pid::parse("21.T11148/b9b76f887845e32d29f7").unwrap();
        assert!(matches!(remote.fetch(&pid), Err(RegistryError::RemoteUnavailable(_))));
        assert_eq!(remote.fetch_count(), 0);
    }
}
