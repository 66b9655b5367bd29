//! Retrieval of bit sequences from resource locations.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};

use crate::net::HttpClient;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSequence {
    pub bytes: Vec<u8>,
    pub source_location: String,
    pub retrieved_at: DateTime<Utc>,
}

pub trait ResourceFetcher: Send + Sync + std::fmt::Debug {
    fn fetch(&self, location: &str) -> Result<Vec<u8>, String>;
}

/// Resolves locations through an offline mirror first, then `file://`
/// URLs, then HTTP(S) when online.
#[derive(Debug, Default)]
pub struct DefaultFetcher {
    mirror: HashMap<String, PathBuf>,
    http: Option<HttpClient>,
}

impl DefaultFetcher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn online(mut self, client: HttpClient) -> Self {
        self.http = Some(client);
        self
    }

    /// Adds the URL-to-file entries of a mirror manifest (a JSON object
    /// mapping location URLs to file names relative to the manifest).
    pub fn with_mirror_manifest(mut self, manifest: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(manifest).map_err(|e| format!("{}: {e}", manifest.display()))?;
        let entries: HashMap<String, String> =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", manifest.display()))?;
        let base = manifest.parent().unwrap_or(Path::new("."));
        for (url, file) in entries {
            self.mirror.insert(url, base.join(file));
        }
        Ok(self)
    }

    pub fn mirror(mut self, location: impl Into<String>, file: impl Into<PathBuf>) -> Self {
        self.mirror.insert(location.into(), file.into());
        self
    }
}

impl ResourceFetcher for DefaultFetcher {
    fn fetch(&self, location: &str) -> Result<Vec<u8>, String> {
        if let Some(path) = self.mirror.get(location) {
            return fs::read(path).map_err(|e| format!("{}: {e}", path.display()));
        }
        if let Some(rest) = location.strip_prefix("file://") {
            let path = percent_decode(rest.strip_prefix("localhost").unwrap_or(rest))?;
            return fs::read(&path).map_err(|e| format!("{path}: {e}"));
        }
        let lower = location.to_ascii_lowercase();
        if lower.starts_with("http://") || lower.starts_with("https://") {
            return match &self.http {
                Some(client) => client.get(location).map(|r| r.body).map_err(|e| e.to_string()),
                None => Err(format!("{location} is not mirrored and online mode is disabled")),
            };
        }
        Err(format!("unsupported location scheme: {location}"))
    }
}

fn percent_decode(text: &str) -> Result<String, String> {
    let bytes = text.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = text.get(i + 1..i + 3).ok_or("truncated percent escape")?;
            out.push(u8::from_str_radix(hex, 16).map_err(|e| e.to_string())?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|e| e.to_string())
}
