//! Operations on FDOs: association through typed attribute pairs,
//! bit-sequence access, applicability and execution.

mod builtins;
mod fetch;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use chrono::Utc;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use builtins::{
    builtin_descriptors, digest_hex, stac_bbox, stac_interval, Builtin, BuiltinKeys, LicenseTable, BUILTIN_NAMES,
    STAC_SCHEMA_PREFIX,
};
pub use fetch::{BitSequence, DefaultFetcher, ResourceFetcher};

use crate::record::InformationRecord;
use crate::registry::PidRegistry;
use crate::types::{MandatoryRole, TypeRegistry};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OperationError {
    #[error("operation {0:?} is already registered")]
    DuplicateOperationName(String),
    #[error("invalid association criterion: {0}")]
    InvalidCriterion(String),
    #[error("operation {0:?} is not registered")]
    UnknownOperation(String),
    #[error("operation {0:?} is not applicable to this record")]
    NotApplicable(String),
    #[error("record has no digital resource location")]
    MissingAccessKey,
    #[error("fetching the bit sequence failed: {0}")]
    FetchFailed(String),
    #[error("invalid operation parameters: {0}")]
    InvalidParameters(String),
    #[error("operation failed: {0}")]
    Failed(String),
}

impl OperationError {
    pub fn code(&self) -> &'static str {
        match self {
            OperationError::DuplicateOperationName(_) => "DuplicateOperationName",
            OperationError::InvalidCriterion(_) => "InvalidCriterion",
            OperationError::UnknownOperation(_) => "UnknownOperation",
            OperationError::NotApplicable(_) => "NotApplicable",
            OperationError::MissingAccessKey => "MissingAccessKey",
            OperationError::FetchFailed(_) => "FetchFailed",
            OperationError::InvalidParameters(_) => "InvalidParameters",
            OperationError::Failed(_) => "OperationFailed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Exact,
    Prefix,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KeyValuePredicate {
    pub attribute_pid: String,
    pub match_kind: MatchKind,
    pub expected: String,
}

impl KeyValuePredicate {
    pub fn new(attribute: &str, match_kind: MatchKind, expected: &str) -> Self {
        Self { attribute_pid: attribute.to_owned(), match_kind, expected: expected.to_owned() }
    }

    fn matches(&self, record: &InformationRecord) -> bool {
        record.values(&self.attribute_pid).iter().any(|v| match self.match_kind {
            MatchKind::Exact => *v == self.expected,
            MatchKind::Prefix => v.starts_with(&self.expected),
        })
    }
}

/// Which typed pairs a record needs for an operation to be associated.
///
/// All `required_keys` must be present, at least one of `any_of_keys` (when
/// non-empty) must be present, and every predicate must hold for some value
/// of its key.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationCriterion {
    #[serde(default)]
    pub required_keys: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub any_of_keys: BTreeSet<String>,
    #[serde(default)]
    pub key_value_predicates: Vec<KeyValuePredicate>,
}

impl AssociationCriterion {
    pub fn requiring<'a>(keys: impl IntoIterator<Item = &'a str>) -> Self {
        Self { required_keys: keys.into_iter().map(str::to_owned).collect(), ..Self::default() }
    }

    pub fn any_of<'a>(keys: impl IntoIterator<Item = &'a str>) -> Self {
        Self { any_of_keys: keys.into_iter().map(str::to_owned).collect(), ..Self::default() }
    }

    pub fn with_predicate(mut self, predicate: KeyValuePredicate) -> Self {
        self.key_value_predicates.push(predicate);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.required_keys.is_empty() && self.any_of_keys.is_empty() && self.key_value_predicates.is_empty()
    }

    pub fn referenced_keys(&self) -> impl Iterator<Item = &str> {
        self.required_keys
            .iter()
            .chain(&self.any_of_keys)
            .map(String::as_str)
            .chain(self.key_value_predicates.iter().map(|p| p.attribute_pid.as_str()))
    }

    pub fn matches(&self, record: &InformationRecord) -> bool {
        self.required_keys.iter().all(|k| record.contains_key(k))
            && (self.any_of_keys.is_empty() || self.any_of_keys.iter().any(|k| record.contains_key(k)))
            && self.key_value_predicates.iter().all(|p| p.matches(record))
    }
}

/// Whether an operation works on the information record or on the bit
/// sequence it describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Metadata,
    BitSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperationStatus {
    Ok,
    Match,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationOutcome {
    pub status: OperationStatus,
    pub payload: Value,
}

impl OperationOutcome {
    pub fn ok(payload: Value) -> Self {
        Self { status: OperationStatus::Ok, payload }
    }
}

/// Serialized result of running an operation on a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationResult {
    pub operation: String,
    pub record_pid: Option<String>,
    pub status: OperationStatus,
    pub payload: Value,
}

pub type ExtensionFn =
    dyn Fn(&OperationsEngine, &InformationRecord, &Value) -> Result<OperationOutcome, OperationError> + Send + Sync;

#[derive(Clone)]
pub enum Executor {
    Builtin(builtins::Builtin),
    Extension(Arc<ExtensionFn>),
}

impl fmt::Debug for Executor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Executor::Builtin(b) => write!(f, "Builtin({b:?})"),
            Executor::Extension(_) => f.write_str("Extension"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OperationDescriptor {
    pub name: String,
    pub criterion: AssociationCriterion,
    pub target: Target,
    #[serde(skip)]
    pub executor: Executor,
}

impl OperationDescriptor {
    pub fn extension<F>(name: &str, criterion: AssociationCriterion, target: Target, run: F) -> Self
    where
        F: Fn(&OperationsEngine, &InformationRecord, &Value) -> Result<OperationOutcome, OperationError>
            + Send
            + Sync
            + 'static,
    {
        Self { name: name.to_owned(), criterion, target, executor: Executor::Extension(Arc::new(run)) }
    }
}

/// Name-keyed store of operation descriptors.
#[derive(Debug, Default)]
pub struct OperationRegistry {
    ops: RwLock<BTreeMap<String, Arc<OperationDescriptor>>>,
}

impl OperationRegistry {
    pub fn register(&self, types: &TypeRegistry, descriptor: OperationDescriptor) -> Result<String, OperationError> {
        if descriptor.name.trim().is_empty() {
            return Err(OperationError::InvalidCriterion("operation name is empty".into()));
        }
        if descriptor.criterion.is_empty() {
            return Err(OperationError::InvalidCriterion(format!(
                "criterion of {} has no keys or predicates",
                descriptor.name
            )));
        }
        if let Some(unknown) = descriptor.criterion.referenced_keys().find(|k| types.attribute(k).is_none()) {
            return Err(OperationError::InvalidCriterion(format!(
                "{unknown} is not a registered attribute"
            )));
        }
        let mut ops = self.ops.write().expect("operation registry lock poisoned");
        if ops.contains_key(&descriptor.name) {
            return Err(OperationError::DuplicateOperationName(descriptor.name));
        }
        let name = descriptor.name.clone();
        ops.insert(name.clone(), Arc::new(descriptor));
        Ok(name)
    }

    pub fn get(&self, name: &str) -> Option<Arc<OperationDescriptor>> {
        self.ops.read().expect("operation registry lock poisoned").get(name).cloned()
    }

    pub fn all(&self) -> Vec<Arc<OperationDescriptor>> {
        self.ops.read().expect("operation registry lock poisoned").values().cloned().collect()
    }
}

/// Ties operations to the type system, the PID registry and a fetcher.
#[derive(Debug)]
pub struct OperationsEngine {
    types: Arc<TypeRegistry>,
    registry: Arc<PidRegistry>,
    operations: OperationRegistry,
    fetcher: Arc<dyn ResourceFetcher>,
    licenses: LicenseTable,
}

impl OperationsEngine {
    pub fn new(types: Arc<TypeRegistry>, registry: Arc<PidRegistry>, fetcher: Arc<dyn ResourceFetcher>) -> Self {
        Self {
            types,
            registry,
            operations: OperationRegistry::default(),
            fetcher,
            licenses: LicenseTable::bundled(),
        }
    }

    /// Registers the six shipped operations keyed on the given attributes.
    pub fn with_builtins(self, keys: &BuiltinKeys) -> Result<Self, OperationError> {
        for descriptor in builtin_descriptors(keys) {
            self.register_operation(descriptor)?;
        }
        Ok(self)
    }

    pub fn types(&self) -> &Arc<TypeRegistry> {
        &self.types
    }

    pub fn registry(&self) -> &Arc<PidRegistry> {
        &self.registry
    }

    pub fn licenses(&self) -> &LicenseTable {
        &self.licenses
    }

    pub fn register_operation(&self, descriptor: OperationDescriptor) -> Result<String, OperationError> {
        self.operations.register(&self.types, descriptor)
    }

    pub fn operation(&self, name: &str) -> Option<Arc<OperationDescriptor>> {
        self.operations.get(name)
    }

    pub fn operations(&self) -> Vec<Arc<OperationDescriptor>> {
        self.operations.all()
    }

    /// Descriptors whose criterion the record satisfies, sorted by name.
    pub fn associate(&self, record: &InformationRecord) -> Vec<Arc<OperationDescriptor>> {
        self.operations.all().into_iter().filter(|d| d.criterion.matches(record)).collect()
    }

    /// The first value of the record's digital-resource-location pair.
    pub fn access_key<'r>(&self, record: &'r InformationRecord) -> Option<&'r str> {
        record
            .entries()
            .find(|(key, _)| self.types.role_of_attribute(key) == Some(MandatoryRole::DigitalResourceLocation))
            .and_then(|(_, values)| values.first())
            .map(String::as_str)
    }

    pub fn access_bit_sequence(&self, record: &InformationRecord) -> Result<BitSequence, OperationError> {
        let location = self.access_key(record).ok_or(OperationError::MissingAccessKey)?;
        let bytes = self.fetcher.fetch(location).map_err(OperationError::FetchFailed)?;
        Ok(BitSequence { bytes, source_location: location.to_owned(), retrieved_at: Utc::now() })
    }

    pub fn applicable(&self, descriptor: &OperationDescriptor, record: &InformationRecord) -> bool {
        descriptor.criterion.matches(record)
            && match descriptor.target {
                Target::Metadata => true,
                Target::BitSequence => self.access_key(record).is_some(),
            }
    }

    pub fn execute(&self, name: &str, record: &InformationRecord) -> Result<OperationResult, OperationError> {
        self.execute_with(name, record, &Value::Null)
    }

    pub fn execute_with(
        &self,
        name: &str,
        record: &InformationRecord,
        params: &Value,
    ) -> Result<OperationResult, OperationError> {
        let descriptor = self.operation(name).ok_or_else(|| OperationError::UnknownOperation(name.to_owned()))?;
        if !descriptor.criterion.matches(record) {
            return Err(OperationError::NotApplicable(name.to_owned()));
        }
        if descriptor.target == Target::BitSequence && self.access_key(record).is_none() {
            return Err(OperationError::MissingAccessKey);
        }
        let outcome = match &descriptor.executor {
            Executor::Builtin(builtin) => builtin.run(self, record, params)?,
            Executor::Extension(run) => run(self, record, params)?,
        };
        Ok(OperationResult {
            operation: name.to_owned(),
            record_pid: record.pid.as_ref().map(ToString::to_string),
            status: outcome.status,
            payload: outcome.payload,
        })
    }
}
