use std::collections::BTreeMap;
use std::sync::Arc;

use super::{InformationRecord, RecordError};
use crate::pid::Pid;
use crate::registry::PidRegistry;
use crate::types::{KernelInformationProfile, TypeRegistry};
use crate::validation::{ValidationOutcome, Violation, ViolationCode};

/// Creates, validates and registers information records.
#[derive(Debug, Clone)]
pub struct RecordEngine {
    types: Arc<TypeRegistry>,
    registry: Arc<PidRegistry>,
}

impl RecordEngine {
    pub fn new(types: Arc<TypeRegistry>, registry: Arc<PidRegistry>) -> Self {
        Self { types, registry }
    }

    pub fn types(&self) -> &Arc<TypeRegistry> {
        &self.types
    }

    pub fn registry(&self) -> &Arc<PidRegistry> {
        &self.registry
    }

    /// Builds an unregistered record instantiating `profile_pid` from values
    /// keyed by attribute PID. The profile-reference pair is added
    /// automatically. Fails without side effects if the result is invalid.
    pub fn instantiate_profile(
        &self,
        profile_pid: &str,
        values: &BTreeMap<String, Vec<String>>,
    ) -> Result<InformationRecord, RecordError> {
        let profile = self.usable_profile(profile_pid)?;
        let ref_attr = profile
            .profile_reference_attribute()
            .expect("usable profiles bind roles")
            .to_string();

        let mut record = InformationRecord::new();
        record.add(ref_attr.clone(), profile.profile_pid.to_string());
        for (key, vs) in values {
            for v in vs {
                if *key == ref_attr && *v == profile.profile_pid.as_str() {
                    continue;
                }
                record.add(key.clone(), v.clone());
            }
        }

        let outcome = self.validate_against(&record, &profile);
        if outcome.valid {
            Ok(record)
        } else {
            Err(RecordError::ValidationFailed(outcome))
        }
    }

    /// Validates a record against `against`, or against the profile named
    /// by its own profile-reference pair.
    pub fn validate_record(
        &self,
        record: &InformationRecord,
        against: Option<&str>,
    ) -> Result<ValidationOutcome, RecordError> {
        if let Some(pid) = against {
            let profile =
                self.types.profile(pid).ok_or_else(|| RecordError::UnknownProfile(pid.to_owned()))?;
            return Ok(self.validate_against(record, &profile));
        }

        let ref_attrs = self.types.profile_reference_attributes();
        let references: Vec<&str> = record
            .entries()
            .filter(|(key, _)| ref_attrs.iter().any(|a| a.as_str() == *key))
            .flat_map(|(_, values)| values.iter().map(String::as_str))
            .collect();

        match references.as_slice() {
            [] => {
                let mut violations = vec![Violation::new(
                    ViolationCode::NoProfile,
                    None,
                    "record does not reference a kernel information profile",
                )];
                for key in record.keys() {
                    if self.types.attribute(key).is_none() {
                        violations.push(unknown_attribute(key, "not a registered typed attribute"));
                    }
                }
                Ok(ValidationOutcome::from_violations(violations))
            }
            [single] => {
                let profile = self
                    .types
                    .profile(single)
                    .ok_or_else(|| RecordError::UnknownProfile((*single).to_owned()))?;
                Ok(self.validate_against(record, &profile))
            }
            several => match several.iter().find_map(|p| self.types.profile(p)) {
                Some(profile) => Ok(self.validate_against(record, &profile)),
                None => Ok(ValidationOutcome::from_violations(vec![Violation::new(
                    ViolationCode::MultipleProfiles,
                    None,
                    format!("record references {} profiles", several.len()),
                )])),
            },
        }
    }

    /// Validates a fresh record and stores it under a newly minted PID. On
    /// success the PID is written back into `record`.
    pub fn register_record(&self, record: &mut InformationRecord) -> Result<Pid, RecordError> {
        if let Some(pid) = &record.pid {
            return Err(RecordError::AlreadyRegistered(pid.to_string()));
        }
        let outcome = self.validate_record(record, None)?;
        if !outcome.valid {
            return Err(RecordError::ValidationFailed(outcome));
        }
        let pid = self.registry.register_new(record.clone())?;
        record.pid = Some(pid.clone());
        Ok(pid)
    }

    /// Pairs whose attribute is typed as a Handle identifier or URL.
    pub fn referencing_pairs<'r>(&self, record: &'r InformationRecord) -> Vec<(&'r str, &'r str)> {
        referencing_pairs(&self.types, record)
    }

    fn usable_profile(&self, profile_pid: &str) -> Result<Arc<KernelInformationProfile>, RecordError> {
        let profile = self
            .types
            .profile(profile_pid)
            .ok_or_else(|| RecordError::UnknownProfile(profile_pid.to_owned()))?;
        let outcome = match &profile.roles {
            Some(roles) => self
                .types
                .validate_profile(&profile, roles)
                .map_err(|_| RecordError::UnknownProfile(profile_pid.to_owned()))?,
            None => ValidationOutcome::from_violations(vec![Violation::new(
                ViolationCode::MissingMandatory,
                None,
                "profile binds no mandatory roles",
            )]),
        };
        if outcome.valid {
            Ok(profile)
        } else {
            Err(RecordError::InvalidProfile { pid: profile_pid.to_owned(), outcome })
        }
    }

    fn validate_against(
        &self,
        record: &InformationRecord,
        profile: &KernelInformationProfile,
    ) -> ValidationOutcome {
        let ref_attr = profile.profile_reference_attribute().map(Pid::as_str);
        let mut violations = Vec::new();

        for attr in profile.attributes.iter().filter(|a| a.obligatory) {
            let key = attr.attribute_pid.as_str();
            if record.contains_key(key) {
                continue;
            }
            if Some(key) == ref_attr {
                violations.push(Violation::new(
                    ViolationCode::NoProfile,
                    Some(key),
                    "record does not reference a kernel information profile",
                ));
            } else {
                let label = profile
                    .role_of(key)
                    .map(|r| r.as_str().to_owned())
                    .unwrap_or_else(|| attr.human_name.clone());
                violations.push(Violation::new(ViolationCode::MissingMandatory, Some(key), label));
            }
        }

        for (key, values) in record.entries() {
            let Some(attr) = profile.attribute(key) else {
                let why = if self.types.attribute(key).is_some() {
                    format!("not part of profile {}", profile.profile_pid)
                } else {
                    "not a registered typed attribute".to_owned()
                };
                violations.push(unknown_attribute(key, &why));
                continue;
            };
            if values.len() > 1 {
                if Some(key) == ref_attr {
                    violations.push(Violation::new(
                        ViolationCode::MultipleProfiles,
                        Some(key),
                        format!("record references {} profiles", values.len()),
                    ));
                } else if !attr.repeatable {
                    violations.push(Violation::new(
                        ViolationCode::RepeatViolation,
                        Some(key),
                        format!("{} is not repeatable but has {} values", attr.human_name, values.len()),
                    ));
                }
            }
            for v in values {
                if v.is_empty() {
                    violations.push(Violation::new(
                        ViolationCode::EmptyValue,
                        Some(key),
                        format!("{} has an empty value", attr.human_name),
                    ));
                } else if !attr.value_type.validate(v) {
                    violations.push(Violation::new(
                        ViolationCode::TypeMismatch,
                        Some(key),
                        format!("{v:?} is not a valid {} for {}", attr.value_type, attr.human_name),
                    ));
                }
            }
        }
        ValidationOutcome::from_violations(violations)
    }
}

/// Pairs whose key is a registered attribute with a reference value type.
pub fn referencing_pairs<'r>(
    types: &TypeRegistry,
    record: &'r InformationRecord,
) -> Vec<(&'r str, &'r str)> {
    record
        .entries()
        .filter(|(key, _)| types.attribute(key).is_some_and(|a| a.value_type.is_reference()))
        .flat_map(|(key, values)| values.iter().map(move |v| (key, v.as_str())))
        .collect()
}

fn unknown_attribute(key: &str, why: &str) -> Violation {
    Violation::new(ViolationCode::UnknownAttribute, Some(key), why)
}
