//! PID minting, storage and resolution of information records.

mod remote;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub use remote::{normalize_handle_record, RemoteResolver, DEFAULT_PROXY};

use crate::pid::{is_valid_prefix, Pid};
use crate::record::{parse_snapshot, serialize_snapshot, Annotations, InformationRecord};
use crate::types::TypeRegistry;

pub const DEFAULT_PREFIX: &str = "21.11152.test";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("PID {0} not found")]
    NotFound(String),
    #[error("remote resolution unavailable: {0}")]
    RemoteUnavailable(String),
    #[error("malformed record document {file}: {detail}")]
    MalformedRecordDocument { file: String, detail: String },
    #[error("entry {0} comes from a fixture or remote snapshot and cannot be overwritten")]
    ImmutableEntry(String),
    #[error("PID {0} is already registered")]
    AlreadyRegistered(String),
    #[error("invalid PID prefix {0:?}")]
    InvalidPrefix(String),
    #[error("I/O error on {path}: {detail}")]
    Io { path: String, detail: String },
}

impl RegistryError {
    pub fn code(&self) -> &'static str {
        match self {
            RegistryError::NotFound(_) => "NotFound",
            RegistryError::RemoteUnavailable(_) => "RemoteUnavailable",
            RegistryError::MalformedRecordDocument { .. } => "MalformedRecordDocument",
            RegistryError::ImmutableEntry(_) => "ImmutableEntry",
            RegistryError::AlreadyRegistered(_) => "AlreadyRegistered",
            RegistryError::InvalidPrefix(_) => "InvalidPrefix",
            RegistryError::Io { .. } => "Io",
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        RegistryError::Io { path: path.display().to_string(), detail: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntrySource {
    Local,
    Fixture,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegistryEntry {
    pub pid: Pid,
    pub record: InformationRecord,
    pub created_at: DateTime<Utc>,
    pub source: EntrySource,
    #[serde(skip_serializing_if = "Annotations::is_empty")]
    pub annotations: Annotations,
}

/// Thread-safe record store. Minting and inserting a new local record is a
/// single atomic step; fixture and remote entries are read-only.
#[derive(Debug)]
pub struct PidRegistry {
    prefix: String,
    entries: RwLock<HashMap<Pid, Arc<RegistryEntry>>>,
    minted: Mutex<HashSet<String>>,
    storage: Option<(PathBuf, Arc<TypeRegistry>)>,
    remote: Option<RemoteResolver>,
}

impl PidRegistry {
    pub fn new(prefix: &str) -> Result<Self, RegistryError> {
        if !is_valid_prefix(prefix) {
            return Err(RegistryError::InvalidPrefix(prefix.to_owned()));
        }
        Ok(Self {
            prefix: prefix.to_owned(),
            entries: RwLock::default(),
            minted: Mutex::default(),
            storage: None,
            remote: None,
        })
    }

    /// Persists local records as documents under `dir` and loads any that
    /// are already there.
    pub fn with_storage(mut self, dir: impl Into<PathBuf>, types: Arc<TypeRegistry>) -> Result<Self, RegistryError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| RegistryError::io(&dir, e))?;
        for (file, record, annotations) in read_documents(&dir)? {
            let pid = record.pid.clone().ok_or_else(|| RegistryError::MalformedRecordDocument {
                file: file.display().to_string(),
                detail: "stored record has no pid".into(),
            })?;
            self.minted.lock().expect("mint lock poisoned").insert(pid.to_string());
            self.insert_entry(pid, record, annotations, EntrySource::Local)?;
        }
        self.storage = Some((dir, types));
        Ok(self)
    }

    pub fn with_remote(mut self, remote: RemoteResolver) -> Self {
        self.remote = Some(remote);
        self
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn remote(&self) -> Option<&RemoteResolver> {
        self.remote.as_ref()
    }

    pub fn is_online(&self) -> bool {
        self.remote.as_ref().is_some_and(RemoteResolver::is_online)
    }

    /// Returns a PID this registry instance has never returned before.
    pub fn mint_pid(&self) -> Pid {
        let mut minted = self.minted.lock().expect("mint lock poisoned");
        loop {
            let suffix = uuid::Uuid::new_v4().hyphenated().to_string();
            let pid = Pid::from_parts(&self.prefix, &suffix).expect("prefix validated at construction");
            if minted.insert(pid.to_string()) {
                return pid;
            }
        }
    }

    /// Mints a PID and stores `record` under it in one step.
    pub fn register_new(&self, mut record: InformationRecord) -> Result<Pid, RegistryError> {
        let mut entries = self.entries.write().expect("registry lock poisoned");
        let pid = loop {
            let pid = self.mint_pid();
            if !entries.contains_key(&pid) {
                break pid;
            }
        };
        record.pid = Some(pid.clone());
        if let Some((dir, types)) = &self.storage {
            let path = dir.join(file_name_for(&pid));
            let doc = serialize_snapshot(&record, &Annotations::default(), types);
            let text = serde_json::to_string_pretty(&doc).expect("record serialization cannot fail");
            fs::write(&path, text + "\n").map_err(|e| RegistryError::io(&path, e))?;
        }
        entries.insert(
            pid.clone(),
            Arc::new(RegistryEntry {
                pid: pid.clone(),
                record,
                created_at: Utc::now(),
                source: EntrySource::Local,
                annotations: Annotations::default(),
            }),
        );
        Ok(pid)
    }

    /// Stores a record under an existing PID. Reloading identical fixture
    /// content is a no-op; anything else touching an existing PID fails.
    pub fn insert_entry(
        &self,
        pid: Pid,
        mut record: InformationRecord,
        annotations: Annotations,
        source: EntrySource,
    ) -> Result<Arc<RegistryEntry>, RegistryError> {
        record.pid = Some(pid.clone());
        let mut entries = self.entries.write().expect("registry lock poisoned");
        if let Some(existing) = entries.get(&pid) {
            return match existing.source {
                EntrySource::Fixture | EntrySource::Remote
                    if existing.record == record && existing.annotations == annotations =>
                {
                    Ok(existing.clone())
                }
                EntrySource::Fixture | EntrySource::Remote => {
                    Err(RegistryError::ImmutableEntry(pid.to_string()))
                }
                EntrySource::Local => Err(RegistryError::AlreadyRegistered(pid.to_string())),
            };
        }
        let entry = Arc::new(RegistryEntry {
            pid: pid.clone(),
            record,
            created_at: Utc::now(),
            source,
            annotations,
        });
        entries.insert(pid, entry.clone());
        Ok(entry)
    }

    /// Looks up a PID locally, then (online only) through the remote proxy.
    pub fn resolve(&self, pid: &Pid) -> Result<Arc<RegistryEntry>, RegistryError> {
        if let Some(entry) = self.lookup(pid) {
            return Ok(entry);
        }
        match &self.remote {
            Some(remote) if remote.is_online() => {
                let record = remote.fetch(pid)?;
                self.insert_entry(pid.clone(), record, Annotations::default(), EntrySource::Remote)
            }
            _ => Err(RegistryError::NotFound(pid.to_string())),
        }
    }

    /// Local lookup only; never touches the network.
    pub fn lookup(&self, pid: &Pid) -> Option<Arc<RegistryEntry>> {
        self.entries.read().expect("registry lock poisoned").get(pid).cloned()
    }

    pub fn contains(&self, pid: &str) -> bool {
        Pid::parse(pid).is_ok_and(|p| self.lookup(&p).is_some())
    }

    pub fn fetch_remote(&self, pid: &Pid) -> Result<InformationRecord, RegistryError> {
        match &self.remote {
            Some(remote) => remote.fetch(pid),
            None => Err(RegistryError::RemoteUnavailable("no remote proxy configured".into())),
        }
    }

    /// Loads every `*.json` record document in `path` as a fixture entry.
    pub fn load_fixture_set(&self, path: impl AsRef<Path>) -> Result<usize, RegistryError> {
        let documents = read_documents(path.as_ref())?;
        let mut count = 0;
        for (file, record, annotations) in documents {
            let pid = record.pid.clone().ok_or_else(|| RegistryError::MalformedRecordDocument {
                file: file.display().to_string(),
                detail: "fixture record has no pid".into(),
            })?;
            self.insert_entry(pid, record, annotations, EntrySource::Fixture)?;
            count += 1;
        }
        Ok(count)
    }

    /// All entries, sorted by PID.
    pub fn entries(&self) -> Vec<Arc<RegistryEntry>> {
        let mut all: Vec<_> = self.entries.read().expect("registry lock poisoned").values().cloned().collect();
        all.sort_by(|a, b| a.pid.cmp(&b.pid));
        all
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("registry lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `<suffix>.json`, with `/` in the suffix percent-encoded.
pub fn file_name_for(pid: &Pid) -> String {
    format!("{}.json", pid.suffix().replace('%', "%25").replace('/', "%2F"))
}

type Document = (PathBuf, InformationRecord, Annotations);

fn read_documents(dir: &Path) -> Result<Vec<Document>, RegistryError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| RegistryError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|file| {
            let text = fs::read_to_string(&file).map_err(|e| RegistryError::io(&file, e))?;
            let (record, annotations) =
                parse_snapshot(&text).map_err(|e| RegistryError::MalformedRecordDocument {
                    file: file.display().to_string(),
                    detail: e.to_string(),
                })?;
            Ok((file, record, annotations))
        })
        .collect()
}
