//! The generic operations shipped with the engine.

use std::collections::BTreeMap;

use base64::Engine as _;
use chrono::{DateTime, FixedOffset};
use md5::Md5;
use serde_json::{json, Value};
use sha1::Sha1;
use sha2::{Digest, Sha256, Sha512};

use super::{
    AssociationCriterion, Executor, KeyValuePredicate, MatchKind, OperationDescriptor, OperationError,
    OperationOutcome, OperationStatus, OperationsEngine, Target,
};
use crate::bundled::helmholtz;
use crate::pid::Pid;
use crate::record::InformationRecord;
use crate::types::{parse_checksum, ChecksumAlgorithm};

pub const BUILTIN_NAMES: [&str; 6] = [
    "evaluate_license",
    "validate_checksum",
    "get_related_fdo",
    "get_digital_resource",
    "geographic_filter",
    "timestamp_filter",
];

pub const STAC_SCHEMA_PREFIX: &str = "https://schemas.stacspec.org";

/// Attribute PIDs the built-in criteria are keyed on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltinKeys {
    pub license: String,
    pub checksum: String,
    pub location: String,
    pub related: Vec<String>,
    pub schema: String,
    pub resource_type: String,
}

impl BuiltinKeys {
    pub fn helmholtz() -> Self {
        Self {
            license: helmholtz::LICENSE.into(),
            checksum: helmholtz::CHECKSUM.into(),
            location: helmholtz::DIGITAL_RESOURCE_LOCATION.into(),
            related: vec![helmholtz::HAS_METADATA.into(), helmholtz::IS_METADATA_FOR.into()],
            schema: helmholtz::HAS_SCHEMA.into(),
            resource_type: helmholtz::DIGITAL_RESOURCE_TYPE.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Builtin {
    EvaluateLicense { license: String },
    ValidateChecksum { checksum: String },
    GetRelatedFdo,
    GetDigitalResource,
    GeographicFilter,
    TimestampFilter,
}

pub fn builtin_descriptors(keys: &BuiltinKeys) -> Vec<OperationDescriptor> {
    let stac = || {
        AssociationCriterion::requiring([keys.location.as_str()])
            .with_predicate(KeyValuePredicate::new(&keys.schema, MatchKind::Prefix, STAC_SCHEMA_PREFIX))
            .with_predicate(KeyValuePredicate::new(&keys.resource_type, MatchKind::Exact, "application/json"))
    };
    let descriptor = |name: &str, criterion, target, builtin| OperationDescriptor {
        name: name.to_owned(),
        criterion,
        target,
        executor: Executor::Builtin(builtin),
    };
    vec![
        descriptor(
            "evaluate_license",
            AssociationCriterion::requiring([keys.license.as_str()]),
            Target::Metadata,
            Builtin::EvaluateLicense { license: keys.license.clone() },
        ),
        descriptor(
            "validate_checksum",
            AssociationCriterion::requiring([keys.checksum.as_str()]),
            Target::BitSequence,
            Builtin::ValidateChecksum { checksum: keys.checksum.clone() },
        ),
        descriptor(
            "get_related_fdo",
            AssociationCriterion::any_of(keys.related.iter().map(String::as_str)),
            Target::Metadata,
            Builtin::GetRelatedFdo,
        ),
        descriptor(
            "get_digital_resource",
            AssociationCriterion::requiring([keys.location.as_str()]),
            Target::BitSequence,
            Builtin::GetDigitalResource,
        ),
        descriptor("geographic_filter", stac(), Target::BitSequence, Builtin::GeographicFilter),
        descriptor("timestamp_filter", stac(), Target::BitSequence, Builtin::TimestampFilter),
    ]
}

impl Builtin {
    pub(super) fn run(
        &self,
        engine: &OperationsEngine,
        record: &InformationRecord,
        params: &Value,
    ) -> Result<OperationOutcome, OperationError> {
        match self {
            Builtin::EvaluateLicense { license } => Ok(evaluate_license(engine, record, license)),
            Builtin::ValidateChecksum { checksum } => validate_checksum(engine, record, checksum),
            Builtin::GetRelatedFdo => Ok(get_related_fdo(engine, record)),
            Builtin::GetDigitalResource => {
                let bits = engine.access_bit_sequence(record)?;
                Ok(OperationOutcome::ok(json!({
                    "source_location": bits.source_location,
                    "retrieved_at": bits.retrieved_at.to_rfc3339(),
                    "length": bits.bytes.len(),
                    "content_base64": base64::engine::general_purpose::STANDARD.encode(&bits.bytes),
                })))
            }
            Builtin::GeographicFilter => geographic_filter(engine, record, params),
            Builtin::TimestampFilter => timestamp_filter(engine, record, params),
        }
    }
}

/// License URLs mapped to SPDX identifiers.
#[derive(Debug, Clone)]
pub struct LicenseTable {
    by_url: BTreeMap<String, &'static str>,
}

const SPDX_URLS: &[(&str, &str)] = &[
    ("https://creativecommons.org/licenses/by/4.0", "CC-BY-4.0"),
    ("https://creativecommons.org/licenses/by/3.0", "CC-BY-3.0"),
    ("https://creativecommons.org/licenses/by-sa/4.0", "CC-BY-SA-4.0"),
    ("https://creativecommons.org/licenses/by-nc/4.0", "CC-BY-NC-4.0"),
    ("https://creativecommons.org/licenses/by-nd/4.0", "CC-BY-ND-4.0"),
    ("https://creativecommons.org/licenses/by-nc-sa/4.0", "CC-BY-NC-SA-4.0"),
    ("https://creativecommons.org/licenses/by-nc-nd/4.0", "CC-BY-NC-ND-4.0"),
    ("https://creativecommons.org/publicdomain/zero/1.0", "CC0-1.0"),
    ("https://opensource.org/licenses/mit", "MIT"),
    ("https://opensource.org/license/mit", "MIT"),
    ("https://opensource.org/licenses/apache-2.0", "Apache-2.0"),
    ("https://www.apache.org/licenses/license-2.0", "Apache-2.0"),
    ("https://www.apache.org/licenses/license-2.0.html", "Apache-2.0"),
    ("https://opensource.org/licenses/bsd-3-clause", "BSD-3-Clause"),
    ("https://opensource.org/licenses/bsd-2-clause", "BSD-2-Clause"),
    ("https://www.gnu.org/licenses/gpl-3.0.html", "GPL-3.0-only"),
    ("https://www.gnu.org/licenses/gpl-2.0.html", "GPL-2.0-only"),
    ("https://www.gnu.org/licenses/lgpl-3.0.html", "LGPL-3.0-only"),
    ("https://www.mozilla.org/en-us/mpl/2.0", "MPL-2.0"),
    ("https://opendatacommons.org/licenses/odbl/1-0", "ODbL-1.0"),
    ("https://spdx.org/licenses/cc-by-4.0.html", "CC-BY-4.0"),
    ("https://spdx.org/licenses/cc0-1.0.html", "CC0-1.0"),
    ("https://spdx.org/licenses/mit.html", "MIT"),
    ("https://spdx.org/licenses/apache-2.0.html", "Apache-2.0"),
];

impl LicenseTable {
    pub fn bundled() -> Self {
        Self { by_url: SPDX_URLS.iter().map(|(url, id)| (normalize_license_url(url), *id)).collect() }
    }

    /// SPDX identifier for a license URL. Scheme, case and a trailing
    /// slash are ignored.
    pub fn spdx_id(&self, url: &str) -> Option<&'static str> {
        self.by_url.get(&normalize_license_url(url)).copied()
    }
}

fn normalize_license_url(url: &str) -> String {
    let lower = url.trim().to_ascii_lowercase();
    let rest = lower
        .strip_prefix("https://")
        .or_else(|| lower.strip_prefix("http://"))
        .unwrap_or(&lower);
    rest.trim_end_matches('/').to_owned()
}

fn evaluate_license(engine: &OperationsEngine, record: &InformationRecord, key: &str) -> OperationOutcome {
    let licenses: Vec<Value> = record
        .values(key)
        .iter()
        .map(|url| {
            let spdx = engine.licenses().spdx_id(url);
            json!({ "license": url, "recognized": spdx.is_some(), "spdx_id": spdx })
        })
        .collect();
    let recognized = licenses.iter().all(|l| l["recognized"] == true);
    let first = licenses.first().cloned().unwrap_or(Value::Null);
    OperationOutcome::ok(json!({
        "license": first["license"],
        "spdx_id": first["spdx_id"],
        "recognized": recognized,
        "licenses": licenses,
    }))
}

pub fn digest_hex(algorithm: ChecksumAlgorithm, bytes: &[u8]) -> String {
    match algorithm {
        ChecksumAlgorithm::Md5 => hex::encode(Md5::digest(bytes)),
        ChecksumAlgorithm::Sha1 => hex::encode(Sha1::digest(bytes)),
        ChecksumAlgorithm::Sha256 => hex::encode(Sha256::digest(bytes)),
        ChecksumAlgorithm::Sha512 => hex::encode(Sha512::digest(bytes)),
    }
}

fn validate_checksum(
    engine: &OperationsEngine,
    record: &InformationRecord,
    key: &str,
) -> Result<OperationOutcome, OperationError> {
    let expected = record.first(key).unwrap_or_default();
    let (algorithm, expected_hex) = parse_checksum(expected)
        .ok_or_else(|| OperationError::Failed(format!("unrecognized checksum value {expected:?}")))?;
    let bits = engine.access_bit_sequence(record)?;
    let actual = digest_hex(algorithm, &bits.bytes);
    let status = if actual.eq_ignore_ascii_case(expected_hex) {
        OperationStatus::Match
    } else {
        OperationStatus::Mismatch
    };
    Ok(OperationOutcome {
        status,
        payload: json!({
            "algorithm": algorithm.tag(),
            "expected": expected_hex.to_ascii_lowercase(),
            "actual": actual,
            "source_location": bits.source_location,
            "length": bits.bytes.len(),
        }),
    })
}

fn get_related_fdo(engine: &OperationsEngine, record: &InformationRecord) -> OperationOutcome {
    let related: Vec<Value> = crate::record::referencing_pairs(engine.types(), record)
        .into_iter()
        .filter_map(|(key, value)| {
            let pid = Pid::parse(value).ok()?;
            engine.registry().lookup(&pid)?;
            Some(json!({ "attribute": key, "pid": pid.as_str() }))
        })
        .collect();
    OperationOutcome::ok(json!({ "related": related }))
}

fn stac_document(engine: &OperationsEngine, record: &InformationRecord) -> Result<Value, OperationError> {
    let bits = engine.access_bit_sequence(record)?;
    serde_json::from_slice(&bits.bytes)
        .map_err(|e| OperationError::Failed(format!("bit sequence is not STAC JSON: {e}")))
}

/// `bbox` of a STAC item, or the first spatial extent of a collection.
pub fn stac_bbox(doc: &Value) -> Option<[f64; 4]> {
    let raw = doc.get("bbox").or_else(|| doc.pointer("/extent/spatial/bbox/0"))?;
    let nums: Vec<f64> = raw.as_array()?.iter().map(Value::as_f64).collect::<Option<_>>()?;
    match nums.as_slice() {
        [w, s, e, n] => Some([*w, *s, *e, *n]),
        [w, s, _, e, n, _] => Some([*w, *s, *e, *n]),
        _ => None,
    }
}

type Interval = (Option<DateTime<FixedOffset>>, Option<DateTime<FixedOffset>>);

/// Temporal coverage of a STAC item (`datetime` or `start_datetime` /
/// `end_datetime`) or the first temporal extent of a collection. `None`
/// bounds are open.
pub fn stac_interval(doc: &Value) -> Option<Interval> {
    let parse = |v: Option<&Value>| v.and_then(Value::as_str).and_then(|s| DateTime::parse_from_rfc3339(s).ok());
    if let Some(props) = doc.get("properties") {
        if let Some(at) = parse(props.get("datetime")) {
            return Some((Some(at), Some(at)));
        }
        let (start, end) = (parse(props.get("start_datetime")), parse(props.get("end_datetime")));
        return (start.is_some() || end.is_some()).then_some((start, end));
    }
    let interval = doc.pointer("/extent/temporal/interval/0")?.as_array()?;
    match interval.as_slice() {
        [start, end] => Some((parse(Some(start)), parse(Some(end)))),
        _ => None,
    }
}

fn bbox_param(params: &Value) -> Result<Option<[f64; 4]>, OperationError> {
    let Some(raw) = params.get("bbox") else { return Ok(None) };
    let bad = || OperationError::InvalidParameters("bbox must be [west, south, east, north]".into());
    let nums: Vec<f64> = raw.as_array().ok_or_else(bad)?.iter().map(Value::as_f64).collect::<Option<_>>().ok_or_else(bad)?;
    match nums.as_slice() {
        [w, s, e, n] if w <= e && s <= n => Ok(Some([*w, *s, *e, *n])),
        _ => Err(bad()),
    }
}

fn geographic_filter(
    engine: &OperationsEngine,
    record: &InformationRecord,
    params: &Value,
) -> Result<OperationOutcome, OperationError> {
    let query = bbox_param(params)?;
    let doc = stac_document(engine, record)?;
    let bbox = stac_bbox(&doc).ok_or_else(|| OperationError::Failed("STAC document has no bbox".into()))?;
    let Some(q) = query else {
        return Ok(OperationOutcome::ok(json!({ "bbox": bbox })));
    };
    let intersects = bbox[0] <= q[2] && q[0] <= bbox[2] && bbox[1] <= q[3] && q[1] <= bbox[3];
    Ok(OperationOutcome {
        status: if intersects { OperationStatus::Match } else { OperationStatus::Mismatch },
        payload: json!({ "bbox": bbox, "query": q, "intersects": intersects }),
    })
}

fn time_param(params: &Value, name: &str) -> Result<Option<DateTime<FixedOffset>>, OperationError> {
    match params.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => DateTime::parse_from_rfc3339(s)
            .map(Some)
            .map_err(|e| OperationError::InvalidParameters(format!("{name}: {e}"))),
        Some(_) => Err(OperationError::InvalidParameters(format!("{name} must be an RFC 3339 string"))),
    }
}

fn timestamp_filter(
    engine: &OperationsEngine,
    record: &InformationRecord,
    params: &Value,
) -> Result<OperationOutcome, OperationError> {
    let (q_start, q_end) = (time_param(params, "start")?, time_param(params, "end")?);
    if let (Some(s), Some(e)) = (q_start, q_end) {
        if s > e {
            return Err(OperationError::InvalidParameters("start is after end".into()));
        }
    }
    let doc = stac_document(engine, record)?;
    let (start, end) =
        stac_interval(&doc).ok_or_else(|| OperationError::Failed("STAC document has no temporal extent".into()))?;
    let fmt = |t: Option<DateTime<FixedOffset>>| t.map(|t| t.to_rfc3339());
    let interval = json!([fmt(start), fmt(end)]);
    if q_start.is_none() && q_end.is_none() {
        return Ok(OperationOutcome::ok(json!({ "interval": interval })));
    }
    let overlaps = match (start, q_end) {
        (Some(s), Some(qe)) => s <= qe,
        _ => true,
    } && match (end, q_start) {
        (Some(e), Some(qs)) => qs <= e,
        _ => true,
    };
    Ok(OperationOutcome {
        status: if overlaps { OperationStatus::Match } else { OperationStatus::Mismatch },
        payload: json!({ "interval": interval, "query": [fmt(q_start), fmt(q_end)], "overlaps": overlaps }),
    })
}
