//! Conformance of Handle record snapshots to the FDO model, reported as a
//! five-row verdict matrix.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::net::HttpClient;
use crate::pid::Pid;
use crate::record::{parse_record_value, referencing_pairs, Annotations, InformationRecord};
use crate::registry::PidRegistry;
use crate::types::{MandatoryRole, TypeRegistry};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConformanceError {
    #[error("malformed record document: {0}")]
    MalformedRecordDocument(String),
}

impl ConformanceError {
    pub fn code(&self) -> &'static str {
        "MalformedRecordDocument"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    KipInstantiation,
    TypedAttributes,
    MandatorySet,
    BitSequenceAccess,
    PidTriples,
}

impl CheckId {
    pub const ALL: [CheckId; 5] = [
        CheckId::KipInstantiation,
        CheckId::TypedAttributes,
        CheckId::MandatorySet,
        CheckId::BitSequenceAccess,
        CheckId::PidTriples,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::KipInstantiation => "kip_instantiation",
            CheckId::TypedAttributes => "typed_attributes",
            CheckId::MandatorySet => "mandatory_set",
            CheckId::BitSequenceAccess => "bit_sequence_access",
            CheckId::PidTriples => "pid_triples",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    Partial,
    No,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::Partial => "partial",
            Verdict::No => "no",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceRow {
    pub check: CheckId,
    pub verdict: Verdict,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub record_pid: Option<String>,
    pub rows: Vec<ConformanceRow>,
    pub overall: bool,
}

impl ConformanceReport {
    pub fn verdict(&self, check: CheckId) -> Verdict {
        self.rows.iter().find(|r| r.check == check).map(|r| r.verdict).unwrap_or(Verdict::No)
    }

    pub fn verdicts(&self) -> [Verdict; 5] {
        CheckId::ALL.map(|c| self.verdict(c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Table,
    Document,
}

/// Evaluates records against the registered types, with a PID registry as
/// the context for resolving PID triples.
#[derive(Debug, Clone)]
pub struct ConformanceChecker {
    types: Arc<TypeRegistry>,
    context: Arc<PidRegistry>,
    probe: Option<HttpClient>,
}

impl ConformanceChecker {
    pub fn new(types: Arc<TypeRegistry>, context: Arc<PidRegistry>) -> Self {
        Self { types, context, probe: None }
    }

    /// Enables content-type probing of locations: `text/html` responses
    /// count as landing pages.
    pub fn with_probe(mut self, client: HttpClient) -> Self {
        self.probe = Some(client);
        self
    }

    /// Checks a record document. Unknown top-level fields are ignored and
    /// scalar values are taken as text.
    pub fn check_document(&self, document: &str) -> Result<ConformanceReport, ConformanceError> {
        let value: Value =
            serde_json::from_str(document).map_err(|e| ConformanceError::MalformedRecordDocument(e.to_string()))?;
        let (record, annotations) = lenient_parse(&value)?;
        Ok(self.check_record(&record, &annotations))
    }

    pub fn check_record(&self, record: &InformationRecord, annotations: &Annotations) -> ConformanceReport {
        let rows = vec![
            self.kip_instantiation(record),
            self.typed_attributes(record),
            self.mandatory_set(record),
            self.bit_sequence_access(record, annotations),
            self.pid_triples(record),
        ];
        let overall = rows.iter().all(|r| r.verdict == Verdict::Yes);
        ConformanceReport { record_pid: record.pid.as_ref().map(ToString::to_string), rows, overall }
    }

    fn is_typed(&self, key: &str) -> bool {
        self.types.attribute(key).is_some()
    }

    fn typed_role(&self, key: &str) -> Option<MandatoryRole> {
        if self.is_typed(key) {
            self.types.role_of_attribute(key)
        } else {
            None
        }
    }

    fn kip_instantiation(&self, record: &InformationRecord) -> ConformanceRow {
        let candidates: Vec<(&str, &str)> = record
            .pairs()
            .filter(|(key, value)| {
                let by_role = match self.typed_role(key) {
                    Some(role) => role == MandatoryRole::ProfileReference,
                    None => MandatoryRole::from_attribute_name(key) == Some(MandatoryRole::ProfileReference),
                };
                by_role || self.types.profile(value).is_some()
            })
            .collect();
        let resolvable: Vec<&str> =
            candidates.iter().map(|(_, v)| *v).filter(|v| self.types.profile(v).is_some()).collect();
        let (verdict, explanation) = match (candidates.len(), resolvable.len()) {
            (0, _) => (Verdict::No, "no kernel information profile is referenced".to_owned()),
            (1, 1) => (Verdict::Yes, format!("instantiates profile {}", resolvable[0])),
            (1, _) => (Verdict::Partial, format!("profile {} cannot be resolved", candidates[0].1)),
            (n, _) => (Verdict::Partial, format!("{n} profile references, exactly one is required")),
        };
        row(CheckId::KipInstantiation, verdict, explanation)
    }

    fn typed_attributes(&self, record: &InformationRecord) -> ConformanceRow {
        let untyped: Vec<&str> = record.keys().filter(|k| !self.is_typed(k)).collect();
        let total = record.keys().count();
        let (verdict, explanation) = if total > 0 && untyped.is_empty() {
            (Verdict::Yes, format!("all {total} attributes are typed"))
        } else if untyped.len() == total {
            (Verdict::No, "no attribute is identified by a registered PID".to_owned())
        } else {
            (Verdict::Partial, format!("untyped attributes: {}", untyped.join(", ")))
        };
        row(CheckId::TypedAttributes, verdict, explanation)
    }

    fn mandatory_set(&self, record: &InformationRecord) -> ConformanceRow {
        let present: BTreeSet<MandatoryRole> = record.keys().filter_map(|k| self.typed_role(k)).collect();
        let missing: Vec<&str> =
            MandatoryRole::ALL.iter().filter(|r| !present.contains(r)).map(|r| r.as_str()).collect();
        if missing.is_empty() {
            row(CheckId::MandatorySet, Verdict::Yes, "all mandatory attributes are present")
        } else {
            row(CheckId::MandatorySet, Verdict::No, format!("missing: {}", missing.join(", ")))
        }
    }

    fn bit_sequence_access(&self, record: &InformationRecord, annotations: &Annotations) -> ConformanceRow {
        let locations: Vec<&str> = record
            .entries()
            .filter(|(key, _)| self.typed_role(key) == Some(MandatoryRole::DigitalResourceLocation))
            .flat_map(|(_, values)| values.iter().map(String::as_str))
            .collect();
        if locations.is_empty() {
            return row(CheckId::BitSequenceAccess, Verdict::No, "digital resource location is missing");
        }
        let landing = locations.iter().filter(|l| self.is_landing_page(l, annotations)).count();
        if landing == 0 {
            row(CheckId::BitSequenceAccess, Verdict::Yes, format!("direct location {}", locations[0]))
        } else if landing == locations.len() {
            row(CheckId::BitSequenceAccess, Verdict::No, "provides a landing page as digital resource location")
        } else {
            row(
                CheckId::BitSequenceAccess,
                Verdict::Partial,
                format!("{landing} of {} locations are landing pages", locations.len()),
            )
        }
    }

    fn is_landing_page(&self, location: &str, annotations: &Annotations) -> bool {
        if annotations.landing_pages.iter().any(|l| l == location) {
            return true;
        }
        let Some(client) = &self.probe else { return false };
        match client.probe_content_type(location) {
            Ok(Some(ct)) => ct.trim().to_ascii_lowercase().starts_with("text/html"),
            _ => false,
        }
    }

    fn resolves_in_context(&self, value: &str) -> bool {
        Pid::parse(value).is_ok_and(|pid| self.context.resolve(&pid).is_ok())
    }

    fn pid_triples(&self, record: &InformationRecord) -> ConformanceRow {
        let pairs = referencing_pairs(&self.types, record);
        let outgoing: Vec<&str> =
            pairs.iter().filter(|(_, v)| self.resolves_in_context(v)).map(|(_, v)| *v).collect();
        if let Some(target) = outgoing.first() {
            return row(
                CheckId::PidTriples,
                Verdict::Yes,
                format!("{} PID triples, e.g. to {target}", outgoing.len()),
            );
        }
        if let Some(pid) = &record.pid {
            let referrers = self
                .context
                .entries()
                .into_iter()
                .filter(|e| e.pid != *pid)
                .filter(|e| referencing_pairs(&self.types, &e.record).iter().any(|(_, v)| *v == pid.as_str()))
                .count();
            if referrers > 0 {
                return row(CheckId::PidTriples, Verdict::Yes, format!("object of PID triples from {referrers} FDOs"));
            }
        }
        if pairs.is_empty() {
            row(CheckId::PidTriples, Verdict::No, "no typed referencing attributes")
        } else {
            row(CheckId::PidTriples, Verdict::Partial, "relations exist only through URLs or unresolvable PIDs")
        }
    }
}

fn row(check: CheckId, verdict: Verdict, explanation: impl Into<String>) -> ConformanceRow {
    ConformanceRow { check, verdict, explanation: explanation.into() }
}

fn lenient_parse(value: &Value) -> Result<(InformationRecord, Annotations), ConformanceError> {
    let malformed = |d: &str| ConformanceError::MalformedRecordDocument(d.to_owned());
    let top = value.as_object().ok_or_else(|| malformed("document is not an object"))?;
    let pairs = top.get("record").and_then(Value::as_object).ok_or_else(|| malformed("missing record object"))?;
    let mut cleaned = Map::new();
    for (key, content) in pairs {
        let text = |v: &Value| match v {
            Value::String(s) => Some(Value::String(s.clone())),
            Value::Null => None,
            other => Some(Value::String(other.to_string())),
        };
        let normalized = match content {
            Value::Array(items) => {
                let items: Vec<Value> = items.iter().filter_map(text).collect();
                (!items.is_empty()).then_some(Value::Array(items))
            }
            other => text(other),
        };
        if let Some(v) = normalized {
            cleaned.insert(key.clone(), v);
        }
    }
    let mut doc = Map::new();
    if let Some(pid) = top.get("pid") {
        doc.insert("pid".into(), pid.clone());
    }
    doc.insert("record".into(), Value::Object(cleaned));
    if let Some(a) = top.get("annotations") {
        doc.insert("annotations".into(), a.clone());
    }
    parse_record_value(&Value::Object(doc), true).map_err(|e| ConformanceError::MalformedRecordDocument(e.to_string()))
}

pub fn render_report(report: &ConformanceReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Document => serde_json::to_string_pretty(report).expect("report serializes"),
        ReportFormat::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "record {}", report.record_pid.as_deref().unwrap_or("(unregistered)"));
            let width = CheckId::ALL.iter().map(|c| c.as_str().len()).max().unwrap_or(0);
            for r in &report.rows {
                let _ = writeln!(out, "  {:<width$}  {:<7}  {}", r.check.as_str(), r.verdict.as_str(), r.explanation);
            }
            let _ = writeln!(out, "  {:<width$}  {}", "overall", if report.overall { "yes" } else { "no" });
            out
        }
    }
}

/// Renders several reports: tables separated by blank lines, or one JSON
/// array.
pub fn render_reports(reports: &[ConformanceReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Document => serde_json::to_string_pretty(reports).expect("reports serialize"),
        ReportFormat::Table => reports.iter().map(|r| render_report(r, format)).collect::<Vec<_>>().join("\n"),
    }
}
