//! Minimal blocking HTTP client shared by remote resolution, bit-sequence
//! retrieval and landing-page probing.

use std::time::Duration;

/// Upper bound on downloaded bodies.
pub const MAX_BODY_BYTES: u64 = 512 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetError {
    /// The server answered with a non-success status.
    Status(u16),
    /// Connection, DNS, timeout or body errors.
    Transport(String),
}

impl std::fmt::Display for NetError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NetError::Status(code) => write!(f, "HTTP status {code}"),
            NetError::Transport(detail) => f.write_str(detail),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HttpClient {
    agent: ureq::Agent,
}

pub struct HttpResponse {
    pub content_type: Option<String>,
    pub body: Vec<u8>,
}

impl HttpClient {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        Self { agent: config.into() }
    }

    pub fn get(&self, url: &str) -> Result<HttpResponse, NetError> {
        let mut resp = self
            .agent
            .get(url)
            .call()
            .map_err(|e| NetError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(NetError::Status(status));
        }
        let content_type = content_type(resp.headers());
        let body = resp
            .body_mut()
            .with_config()
            .limit(MAX_BODY_BYTES)
            .read_to_vec()
            .map_err(|e| NetError::Transport(e.to_string()))?;
        Ok(HttpResponse { content_type, body })
    }

    /// Issues a HEAD request and reports the declared content type.
    pub fn probe_content_type(&self, url: &str) -> Result<Option<String>, NetError> {
        let resp = self
            .agent
            .head(url)
            .call()
            .map_err(|e| NetError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if !(200..400).contains(&status) {
            return Err(NetError::Status(status));
        }
        Ok(content_type(resp.headers()))
    }
}

impl Default for HttpClient {
    fn default() -> Self {
        Self::new(Duration::from_secs(20))
    }
}

fn content_type(headers: &ureq::http::HeaderMap) -> Option<String> {
    headers
        .get("content-type")
        .and_then(|v| v.to_str().ok())
        .map(str::to_owned)
}
