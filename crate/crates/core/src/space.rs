//! A configured FDO space: type registry, PID registry, record and
//! operations engines and the conformance checker wired together.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::config::Config;
use crate::conformance::ConformanceChecker;
use crate::graph::{build_graph, FdoGraph};
use crate::net::HttpClient;
use crate::ops::{BuiltinKeys, DefaultFetcher, OperationError, OperationsEngine, ResourceFetcher};
use crate::record::{InformationRecord, RecordEngine};
use crate::registry::{PidRegistry, RegistryError, RemoteResolver};
use crate::types::{KernelInformationProfile, TypeError, TypeRegistry};
use crate::{bundled, Pid};

#[derive(Debug, thiserror::Error)]
pub enum SpaceError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Operation(#[from] OperationError),
    #[error("{path}: {detail}")]
    Io { path: String, detail: String },
}

impl SpaceError {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        SpaceError::Io { path: path.display().to_string(), detail: e.to_string() }
    }
}

#[derive(Debug)]
pub struct FdoSpace {
    types: Arc<TypeRegistry>,
    registry: Arc<PidRegistry>,
    records: RecordEngine,
    ops: Arc<OperationsEngine>,
    conformance: ConformanceChecker,
    profile_dir: Option<PathBuf>,
    fixtures_loaded: usize,
}

/// Pieces an [`FdoSpace`] is assembled from.
#[derive(Debug, Default)]
pub struct SpaceBuilder {
    prefix: Option<String>,
    storage: Option<PathBuf>,
    fixtures: Vec<PathBuf>,
    remote: Option<RemoteResolver>,
    fetcher: Option<Arc<dyn ResourceFetcher>>,
    mirror: Option<PathBuf>,
    online: bool,
}

impl SpaceBuilder {
    pub fn prefix(mut self, prefix: impl Into<String>) -> Self {
        self.prefix = Some(prefix.into());
        self
    }

    /// Directory holding `profiles/` and `records/`.
    pub fn storage(mut self, dir: impl Into<PathBuf>) -> Self {
        self.storage = Some(dir.into());
        self
    }

    pub fn fixtures(mut self, dir: impl Into<PathBuf>) -> Self {
        self.fixtures.push(dir.into());
        self
    }

    pub fn remote(mut self, remote: RemoteResolver) -> Self {
        self.online = remote.is_online();
        self.remote = Some(remote);
        self
    }

    pub fn fetcher(mut self, fetcher: Arc<dyn ResourceFetcher>) -> Self {
        self.fetcher = Some(fetcher);
        self
    }

    pub fn mirror(mut self, manifest: impl Into<PathBuf>) -> Self {
        self.mirror = Some(manifest.into());
        self
    }

    pub fn build(self) -> Result<FdoSpace, SpaceError> {
        let types = Arc::new(TypeRegistry::new());
        bundled::register_profiles(&types)?;

        let profile_dir = self.storage.as_ref().map(|d| d.join("profiles"));
        if let Some(dir) = &profile_dir {
            fs::create_dir_all(dir).map_err(|e| SpaceError::io(dir, e))?;
            for file in json_files(dir)? {
                let text = fs::read_to_string(&file).map_err(|e| SpaceError::io(&file, e))?;
                types.import_profile_snapshot(&text)?;
            }
        }

        let mut registry = PidRegistry::new(self.prefix.as_deref().unwrap_or(crate::registry::DEFAULT_PREFIX))?;
        if let Some(dir) = &self.storage {
            registry = registry.with_storage(dir.join("records"), types.clone())?;
        }
        if let Some(remote) = self.remote {
            registry = registry.with_remote(remote);
        }
        let mut fixtures_loaded = 0;
        for dir in &self.fixtures {
            fixtures_loaded += registry.load_fixture_set(dir)?;
        }
        let registry = Arc::new(registry);

        let fetcher = match self.fetcher {
            Some(f) => f,
            None => {
                let mut f = DefaultFetcher::new();
                if let Some(manifest) = &self.mirror {
                    f = f.with_mirror_manifest(manifest).map_err(|e| SpaceError::io(manifest, e))?;
                }
                if self.online {
                    f = f.online(HttpClient::default());
                }
                Arc::new(f)
            }
        };
        let ops = OperationsEngine::new(types.clone(), registry.clone(), fetcher)
            .with_builtins(&BuiltinKeys::helmholtz())?;
        let mut conformance = ConformanceChecker::new(types.clone(), registry.clone());
        if self.online {
            conformance = conformance.with_probe(HttpClient::default());
        }
        Ok(FdoSpace {
            records: RecordEngine::new(types.clone(), registry.clone()),
            types,
            registry,
            ops: Arc::new(ops),
            conformance,
            profile_dir,
            fixtures_loaded,
        })
    }
}

impl FdoSpace {
    pub fn builder() -> SpaceBuilder {
        SpaceBuilder::default()
    }

    pub fn from_config(config: &Config) -> Result<Self, SpaceError> {
        let mut builder = Self::builder()
            .prefix(&config.pid_prefix)
            .storage(&config.registry_path)
            .remote(RemoteResolver::new(&config.proxy, config.online));
        for dir in &config.fixtures {
            builder = builder.fixtures(dir);
        }
        if let Some(manifest) = &config.mirror {
            builder = builder.mirror(manifest);
        }
        builder.build()
    }

    pub fn types(&self) -> &Arc<TypeRegistry> {
        &self.types
    }

    pub fn registry(&self) -> &Arc<PidRegistry> {
        &self.registry
    }

    pub fn records(&self) -> &RecordEngine {
        &self.records
    }

    pub fn ops(&self) -> &Arc<OperationsEngine> {
        &self.ops
    }

    pub fn conformance(&self) -> &ConformanceChecker {
        &self.conformance
    }

    pub fn fixtures_loaded(&self) -> usize {
        self.fixtures_loaded
    }

    /// Imports a profile snapshot and, with storage configured, persists it.
    pub fn import_profile(&self, snapshot: &str) -> Result<Arc<KernelInformationProfile>, SpaceError> {
        let profile = self.types.import_profile_snapshot(snapshot)?;
        if let Some(dir) = &self.profile_dir {
            let path = dir.join(crate::registry::file_name_for(&profile.profile_pid));
            fs::write(&path, TypeRegistry::export_profile_snapshot(&profile)).map_err(|e| SpaceError::io(&path, e))?;
        }
        Ok(profile)
    }

    pub fn all_records(&self) -> Vec<InformationRecord> {
        self.registry.entries().into_iter().map(|e| e.record.clone()).collect()
    }

    /// Graph over every record currently in the registry.
    pub fn graph(&self) -> FdoGraph {
        build_graph(&self.types, &self.all_records())
    }

    pub fn resolve(&self, pid: &Pid) -> Result<InformationRecord, RegistryError> {
        self.registry.resolve(pid).map(|e| e.record.clone())
    }
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, SpaceError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| SpaceError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}
