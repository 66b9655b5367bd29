//! Handle-style persistent identifiers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A Handle PID in canonical `prefix/suffix` form.
///
/// The prefix is a non-empty sequence of dot-separated ASCII alphanumeric
/// segments. The suffix is one or more printable, non-whitespace ASCII
/// characters and may itself contain `/`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pid {
    text: String,
    split: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid PID syntax: {0:?}")]
pub struct InvalidPidSyntax(pub String);

impl Pid {
    pub fn parse(text: &str) -> Result<Self, InvalidPidSyntax> {
        let split = text.find('/').ok_or_else(|| InvalidPidSyntax(text.to_owned()))?;
        let (prefix, suffix) = (&text[..split], &text[split + 1..]);
        if !is_valid_prefix(prefix) || !is_valid_suffix(suffix) {
            return Err(InvalidPidSyntax(text.to_owned()));
        }
        Ok(Self { text: text.to_owned(), split })
    }

    pub fn from_parts(prefix: &str, suffix: &str) -> Result<Self, InvalidPidSyntax> {
        Self::parse(&format!("{prefix}/{suffix}"))
    }

    pub fn prefix(&self) -> &str {
        &self.text[..self.split]
    }

    pub fn suffix(&self) -> &str {
        &self.text[self.split + 1..]
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// `true` if `prefix` is a dot-separated list of alphanumeric segments.
pub fn is_valid_prefix(prefix: &str) -> bool {
    !prefix.is_empty()
        && prefix
            .split('.')
            .all(|seg| !seg.is_empty() && seg.bytes().all(|b| b.is_ascii_alphanumeric()))
}

fn is_valid_suffix(suffix: &str) -> bool {
    !suffix.is_empty() && suffix.bytes().all(|b| b.is_ascii_graphic())
}

impl fmt::Display for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for Pid {
    type Err = InvalidPidSyntax;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl AsRef<str> for Pid {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

impl Serialize for Pid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Pid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Pid::parse(&text).map_err(serde::de::Error::custom)
    }
}
