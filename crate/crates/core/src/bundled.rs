//! Profile snapshots compiled into the crate and paths to the fixture sets
//! shipped with the repository.

use std::path::{Path, PathBuf};

use crate::types::{TypeError, TypeRegistry};

pub const HELMHOLTZ_KIP: &str = include_str!("../../../fixtures/profiles/helmholtz-kip.json");
pub const PIDINST_PROFILE: &str = include_str!("../../../fixtures/profiles/pidinst-kip.json");
pub const DISSCO_PROFILE: &str = include_str!("../../../fixtures/profiles/dissco-digital-specimen.json");

/// Attribute PIDs of the Helmholtz KIP snapshot.
pub mod helmholtz {
    pub const PROFILE: &str = "21.T11148/b9b76f887845e32d29f7";
    pub const KERNEL_INFORMATION_PROFILE: &str = "21.T11148/076759916209e5d62bd5";
    pub const DIGITAL_RESOURCE_LOCATION: &str = "21.T11148/b8457812905b83046284";
    pub const DATE_CREATED: &str = "21.T11148/aafd5fb4c7222e2d950a";
    pub const DATE_MODIFIED: &str = "21.T11148/397d831aa3a9d18eb52c";
    pub const LICENSE: &str = "21.T11148/2f314c8fe5fb6a0063a8";
    pub const DIGITAL_RESOURCE_TYPE: &str = "21.T11148/1c699a5d1b4ad3ba4956";
    pub const CHECKSUM: &str = "21.T11148/92e200311a56800b3e47";
    pub const VERSION: &str = "21.T11148/c692273deb2772da307f";
    pub const HAS_METADATA: &str = "21.T11148/d0773859091aeb451528";
    pub const IS_METADATA_FOR: &str = "21.T11148/4fe7cde52629b61e3b82";
    pub const HAS_SCHEMA: &str = "21.T11148/7e4c2b87c6e1a3f5d9b0";
    pub const TOPIC: &str = "21.T11148/b415e16fbe4ca40f2270";
    pub const CONTACT: &str = "21.T11148/1a73af9e7ae00182733b";
    pub const IDENTIFIER: &str = "21.T11148/3fe31c3a7b0d4b9b6f3e";
    pub const LANGUAGE: &str = "21.T11148/d3b4a1e8c9f2067b5a41";
}

/// Registers the three bundled profile snapshots.
pub fn register_profiles(types: &TypeRegistry) -> Result<(), TypeError> {
    for doc in [HELMHOLTZ_KIP, PIDINST_PROFILE, DISSCO_PROFILE] {
        types.import_profile_snapshot(doc)?;
    }
    Ok(())
}

/// The repository's `fixtures/` directory.
pub fn fixtures_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_dir(name: &str) -> PathBuf {
    fixtures_root().join(name)
}
