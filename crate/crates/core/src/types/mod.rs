//! Typed attributes, Kernel Information Profiles and a local Data Type
//! Registry holding both.

mod value;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

pub use value::{parse_checksum, ChecksumAlgorithm, UnknownValueType, ValueType};

use crate::pid::Pid;
use crate::validation::{ValidationOutcome, Violation, ViolationCode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("invalid PID syntax: {0:?}")]
    InvalidPidSyntax(String),
    #[error("PID {0} is already registered with different content")]
    DuplicatePidConflict(String),
    #[error("attribute {0} is not registered")]
    UnknownAttributePid(String),
    #[error("profile {0} is not registered")]
    UnknownProfile(String),
    #[error("malformed profile snapshot: {0}")]
    MalformedSnapshot(String),
    #[error("invalid role map: {0}")]
    InvalidRoleMap(String),
    #[error("invalid attribute definition: {0}")]
    InvalidDefinition(String),
}

impl TypeError {
    pub fn code(&self) -> &'static str {
        match self {
            TypeError::InvalidPidSyntax(_) => "InvalidPidSyntax",
            TypeError::DuplicatePidConflict(_) => "DuplicatePidConflict",
            TypeError::UnknownAttributePid(_) => "UnknownAttributePid",
            TypeError::UnknownProfile(_) => "UnknownProfile",
            TypeError::MalformedSnapshot(_) => "MalformedSnapshot",
            TypeError::InvalidRoleMap(_) => "InvalidRoleMap",
            TypeError::InvalidDefinition(_) => "InvalidDefinition",
        }
    }
}

/// A PID-identified attribute with a value type. `human_name` is for
/// display only; records are always keyed by `attribute_pid`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypedAttributeDefinition {
    #[serde(rename = "pid")]
    pub attribute_pid: Pid,
    #[serde(rename = "name")]
    pub human_name: String,
    #[serde(rename = "valueType")]
    pub value_type: ValueType,
    pub obligatory: bool,
    pub repeatable: bool,
}

impl TypedAttributeDefinition {
    pub fn new(
        pid: &str,
        human_name: &str,
        value_type: ValueType,
        obligatory: bool,
        repeatable: bool,
    ) -> Result<Self, TypeError> {
        let attribute_pid = Pid::parse(pid).map_err(|e| TypeError::InvalidPidSyntax(e.0))?;
        Ok(Self {
            attribute_pid,
            human_name: human_name.to_owned(),
            value_type,
            obligatory,
            repeatable,
        })
    }
}

/// The six kinds of kernel information every valid record must carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MandatoryRole {
    ProfileReference,
    License,
    Checksum,
    DigitalResourceLocation,
    CreationDate,
    DigitalResourceType,
}

impl MandatoryRole {
    pub const ALL: [MandatoryRole; 6] = [
        MandatoryRole::ProfileReference,
        MandatoryRole::License,
        MandatoryRole::Checksum,
        MandatoryRole::DigitalResourceLocation,
        MandatoryRole::CreationDate,
        MandatoryRole::DigitalResourceType,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MandatoryRole::ProfileReference => "profile_reference",
            MandatoryRole::License => "license",
            MandatoryRole::Checksum => "checksum",
            MandatoryRole::DigitalResourceLocation => "digital_resource_location",
            MandatoryRole::CreationDate => "creation_date",
            MandatoryRole::DigitalResourceType => "digital_resource_type",
        }
    }

    /// Guesses the role of an attribute from its human-readable name.
    ///
    /// Used only when assessing foreign records, whose attribute PIDs are
    /// not standardized across communities.
    pub fn from_attribute_name(name: &str) -> Option<Self> {
        let norm: String = name
            .chars()
            .filter(char::is_ascii_alphanumeric)
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let role = match norm.as_str() {
            "kernelinformationprofile" | "kip" | "fdoprofile" | "profile" => {
                MandatoryRole::ProfileReference
            }
            "license" | "licence" => MandatoryRole::License,
            "checksum" => MandatoryRole::Checksum,
            "digitalresourcelocation" | "digitalobjectlocation" | "location" | "landingpage" => {
                MandatoryRole::DigitalResourceLocation
            }
            "datecreated" | "creationdate" => MandatoryRole::CreationDate,
            "digitalresourcetype" | "resourcetype" => MandatoryRole::DigitalResourceType,
            _ => return None,
        };
        Some(role)
    }
}

impl fmt::Display for MandatoryRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Total, injective binding of the six mandatory roles to attribute PIDs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct MandatoryRoleMap(BTreeMap<MandatoryRole, Pid>);

impl MandatoryRoleMap {
    pub fn new(map: BTreeMap<MandatoryRole, Pid>) -> Result<Self, TypeError> {
        if let Some(missing) = MandatoryRole::ALL.iter().find(|r| !map.contains_key(r)) {
            return Err(TypeError::InvalidRoleMap(format!("role {missing} is not mapped")));
        }
        let distinct: BTreeSet<&Pid> = map.values().collect();
        if distinct.len() != map.len() {
            return Err(TypeError::InvalidRoleMap("an attribute serves two roles".into()));
        }
        Ok(Self(map))
    }

    pub fn get(&self, role: MandatoryRole) -> &Pid {
        &self.0[&role]
    }

    pub fn role_of(&self, attribute: &str) -> Option<MandatoryRole> {
        self.0.iter().find(|(_, pid)| pid.as_str() == attribute).map(|(role, _)| *role)
    }

    pub fn iter(&self) -> impl Iterator<Item = (MandatoryRole, &Pid)> {
        self.0.iter().map(|(r, p)| (*r, p))
    }
}

impl<'de> Deserialize<'de> for MandatoryRoleMap {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<MandatoryRole, Pid>::deserialize(deserializer)?;
        MandatoryRoleMap::new(map).map_err(serde::de::Error::custom)
    }
}

/// A registered canonical set of typed attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelInformationProfile {
    pub profile_pid: Pid,
    pub name: String,
    pub attributes: Vec<TypedAttributeDefinition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<MandatoryRoleMap>,
}

impl KernelInformationProfile {
    pub fn attribute(&self, pid: &str) -> Option<&TypedAttributeDefinition> {
        self.attributes.iter().find(|a| a.attribute_pid.as_str() == pid)
    }

    /// The attribute holding the profile reference, when roles are bound.
    pub fn profile_reference_attribute(&self) -> Option<&Pid> {
        self.roles.as_ref().map(|r| r.get(MandatoryRole::ProfileReference))
    }

    pub fn role_of(&self, attribute: &str) -> Option<MandatoryRole> {
        self.roles.as_ref().and_then(|r| r.role_of(attribute))
    }

    fn check_unique(&self) -> Result<(), String> {
        let mut seen = BTreeSet::new();
        for a in &self.attributes {
            if !seen.insert(a.attribute_pid.as_str()) {
                return Err(format!("duplicate attribute PID {}", a.attribute_pid));
            }
        }
        Ok(())
    }
}

/// Local Data Type Registry. Definitions are immutable once registered;
/// the first writer of a PID wins and later conflicting writes fail.
#[derive(Debug, Default)]
pub struct TypeRegistry {
    attributes: RwLock<HashMap<Pid, Arc<TypedAttributeDefinition>>>,
    profiles: RwLock<HashMap<Pid, Arc<KernelInformationProfile>>>,
}

impl TypeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_attribute(&self, defn: TypedAttributeDefinition) -> Result<Pid, TypeError> {
        if defn.human_name.trim().is_empty() {
            return Err(TypeError::InvalidDefinition(format!(
                "attribute {} has an empty name",
                defn.attribute_pid
            )));
        }
        let mut attributes = self.attributes.write().expect("type registry lock poisoned");
        insert_immutable(&mut attributes, defn.attribute_pid.clone(), defn)
    }

    pub fn attribute(&self, pid: &str) -> Option<Arc<TypedAttributeDefinition>> {
        let pid = Pid::parse(pid).ok()?;
        self.attributes.read().expect("type registry lock poisoned").get(&pid).cloned()
    }

    pub fn profile(&self, pid: &str) -> Option<Arc<KernelInformationProfile>> {
        let pid = Pid::parse(pid).ok()?;
        self.profiles.read().expect("type registry lock poisoned").get(&pid).cloned()
    }

    pub fn profiles(&self) -> Vec<Arc<KernelInformationProfile>> {
        let mut all: Vec<_> =
            self.profiles.read().expect("type registry lock poisoned").values().cloned().collect();
        all.sort_by(|a, b| a.profile_pid.cmp(&b.profile_pid));
        all
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.read().expect("type registry lock poisoned").len()
    }

    /// Registers a profile whose member attributes are already registered
    /// with identical content.
    pub fn register_profile(&self, profile: KernelInformationProfile) -> Result<Pid, TypeError> {
        profile.check_unique().map_err(TypeError::MalformedSnapshot)?;
        {
            let attributes = self.attributes.read().expect("type registry lock poisoned");
            for a in &profile.attributes {
                match attributes.get(&a.attribute_pid) {
                    None => return Err(TypeError::UnknownAttributePid(a.attribute_pid.to_string())),
                    Some(existing) if **existing != *a => {
                        return Err(TypeError::DuplicatePidConflict(a.attribute_pid.to_string()))
                    }
                    Some(_) => {}
                }
            }
        }
        let mut profiles = self.profiles.write().expect("type registry lock poisoned");
        insert_immutable(&mut profiles, profile.profile_pid.clone(), profile)
    }

    /// Parses a profile snapshot document and registers the profile with
    /// all of its attribute definitions. Nothing is registered on failure.
    pub fn import_profile_snapshot(
        &self,
        document: &str,
    ) -> Result<Arc<KernelInformationProfile>, TypeError> {
        let profile: KernelInformationProfile = serde_json::from_str(document)
            .map_err(|e| TypeError::MalformedSnapshot(e.to_string()))?;
        if profile.attributes.is_empty() {
            return Err(TypeError::MalformedSnapshot("attribute list is empty".into()));
        }
        profile.check_unique().map_err(TypeError::MalformedSnapshot)?;
        if let Some(roles) = &profile.roles {
            for (role, pid) in roles.iter() {
                if profile.attribute(pid.as_str()).is_none() {
                    return Err(TypeError::MalformedSnapshot(format!(
                        "role {role} maps to {pid}, which is not a profile attribute"
                    )));
                }
            }
        }

        // Hold both locks so the import is atomic with respect to other writers.
        let mut attributes = self.attributes.write().expect("type registry lock poisoned");
        let mut profiles = self.profiles.write().expect("type registry lock poisoned");
        for a in &profile.attributes {
            if a.human_name.trim().is_empty() {
                return Err(TypeError::MalformedSnapshot(format!(
                    "attribute {} has an empty name",
                    a.attribute_pid
                )));
            }
            if attributes.get(&a.attribute_pid).is_some_and(|existing| **existing != *a) {
                return Err(TypeError::DuplicatePidConflict(a.attribute_pid.to_string()));
            }
        }
        if profiles.get(&profile.profile_pid).is_some_and(|existing| **existing != profile) {
            return Err(TypeError::DuplicatePidConflict(profile.profile_pid.to_string()));
        }
        for a in &profile.attributes {
            attributes.entry(a.attribute_pid.clone()).or_insert_with(|| Arc::new(a.clone()));
        }
        let stored = profiles
            .entry(profile.profile_pid.clone())
            .or_insert_with(|| Arc::new(profile))
            .clone();
        Ok(stored)
    }

    pub fn export_profile_snapshot(profile: &KernelInformationProfile) -> String {
        serde_json::to_string_pretty(profile).expect("profile serialization cannot fail")
    }

    /// Checks that `profile` binds all six mandatory roles through `roles`
    /// to obligatory member attributes.
    pub fn validate_profile(
        &self,
        profile: &KernelInformationProfile,
        roles: &MandatoryRoleMap,
    ) -> Result<ValidationOutcome, TypeError> {
        for a in &profile.attributes {
            if self.attribute(a.attribute_pid.as_str()).is_none() {
                return Err(TypeError::UnknownAttributePid(a.attribute_pid.to_string()));
            }
        }
        let mut violations = Vec::new();
        for (role, pid) in roles.iter() {
            match profile.attribute(pid.as_str()) {
                None => violations.push(Violation::new(
                    ViolationCode::MissingMandatory,
                    Some(pid.as_str()),
                    role.as_str(),
                )),
                Some(a) if !a.obligatory => violations.push(Violation::new(
                    ViolationCode::MissingMandatory,
                    Some(pid.as_str()),
                    format!("{role} is bound to a non-obligatory attribute"),
                )),
                Some(a) if role == MandatoryRole::ProfileReference && a.repeatable => {
                    violations.push(Violation::new(
                        ViolationCode::RepeatViolation,
                        Some(pid.as_str()),
                        "profile reference attribute must not be repeatable",
                    ))
                }
                Some(_) => {}
            }
        }
        Ok(ValidationOutcome::from_violations(violations))
    }

    /// Attribute PIDs bound to the profile-reference role in any profile.
    pub fn profile_reference_attributes(&self) -> BTreeSet<Pid> {
        self.profiles
            .read()
            .expect("type registry lock poisoned")
            .values()
            .filter_map(|p| p.profile_reference_attribute().cloned())
            .collect()
    }

    /// The mandatory role an attribute plays in any registered profile,
    /// falling back to its human-readable name.
    pub fn role_of_attribute(&self, attribute: &str) -> Option<MandatoryRole> {
        let profiles = self.profiles.read().expect("type registry lock poisoned");
        let mut ids: Vec<_> = profiles.keys().collect();
        ids.sort();
        ids.into_iter()
            .find_map(|id| profiles[id].role_of(attribute))
            .or_else(|| {
                drop(profiles);
                self.attribute(attribute)
                    .and_then(|a| MandatoryRole::from_attribute_name(&a.human_name))
            })
    }
}

fn insert_immutable<T: PartialEq>(
    map: &mut HashMap<Pid, Arc<T>>,
    key: Pid,
    value: T,
) -> Result<Pid, TypeError> {
    match map.get(&key) {
        Some(existing) if **existing == value => Ok(key),
        Some(_) => Err(TypeError::DuplicatePidConflict(key.to_string())),
        None => {
            map.insert(key.clone(), Arc::new(value));
            Ok(key)
        }
    }
}
