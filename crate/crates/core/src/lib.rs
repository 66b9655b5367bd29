//! FAIR Digital Object toolkit: a typed attribute registry, PID registry,
//! record validation, operation association, PID-triple graphs and a
//! conformance checker for Handle records.

pub mod bundled;
pub mod config;
pub mod conformance;
pub mod graph;
pub mod net;
pub mod ops;
pub mod pid;
pub mod record;
pub mod registry;
pub mod service;
pub mod space;
pub mod types;
pub mod validation;

pub use pid::Pid;
pub use record::{InformationRecord, RecordEngine, RecordError};
pub use registry::{PidRegistry, RegistryEntry, RegistryError};
pub use space::{FdoSpace, SpaceError};
pub use types::{KernelInformationProfile, MandatoryRole, MandatoryRoleMap, TypeRegistry, TypedAttributeDefinition, ValueType};
pub use validation::{ValidationOutcome, Violation, ViolationCode};
