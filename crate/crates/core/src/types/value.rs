//! Value types of typed attributes and their syntactic validation rules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::pid::Pid;

/// The flat enumeration of value types an attribute may declare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueType {
    HandleIdentifier,
    Url,
    DateTime,
    MediaType,
    Checksum,
    VersionNumber,
    LanguageCode,
    String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown value type {0:?}")]
pub struct UnknownValueType(pub String);

impl ValueType {
    pub const ALL: [ValueType; 8] = [
        ValueType::HandleIdentifier,
        ValueType::Url,
        ValueType::DateTime,
        ValueType::MediaType,
        ValueType::Checksum,
        ValueType::VersionNumber,
        ValueType::LanguageCode,
        ValueType::String,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ValueType::HandleIdentifier => "handle-identifier-ascii",
            ValueType::Url => "url",
            ValueType::DateTime => "date-time-rfc3339",
            ValueType::MediaType => "media-type-iana",
            ValueType::Checksum => "checksum-string",
            ValueType::VersionNumber => "version-number",
            ValueType::LanguageCode => "language-code-iso639-1",
            ValueType::String => "string",
        }
    }

    /// Types whose values point at another entity.
    pub fn is_reference(self) -> bool {
        matches!(self, ValueType::HandleIdentifier | ValueType::Url)
    }

    /// Checks `value` against the canonical rule for this type. Empty
    /// values are never valid.
    pub fn validate(self, value: &str) -> bool {
        if value.is_empty() {
            return false;
        }
        match self {
            ValueType::HandleIdentifier => Pid::parse(value).is_ok(),
            ValueType::Url => is_absolute_uri(value),
            ValueType::DateTime => is_rfc3339_date_time(value),
            ValueType::MediaType => is_media_type(value),
            ValueType::Checksum => parse_checksum(value).is_some(),
            ValueType::VersionNumber => is_version_number(value),
            ValueType::LanguageCode => {
                value.len() == 2 && value.bytes().all(|b| b.is_ascii_lowercase())
            }
            ValueType::String => true,
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ValueType {
    type Err = UnknownValueType;

    /// Accepts the canonical names case-insensitively, plus the spellings
    /// used in published profile tables (`Language-Codes-ISO-639-1`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let found = match lower.as_str() {
            "handle-identifier-ascii" => ValueType::HandleIdentifier,
            "url" => ValueType::Url,
            "date-time-rfc3339" => ValueType::DateTime,
            "media-type-iana" => ValueType::MediaType,
            "checksum-string" => ValueType::Checksum,
            "version-number" => ValueType::VersionNumber,
            "language-code-iso639-1" | "language-codes-iso-639-1" => ValueType::LanguageCode,
            "string" => ValueType::String,
            _ => return Err(UnknownValueType(s.to_owned())),
        };
        Ok(found)
    }
}

impl Serialize for ValueType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ValueType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Digest algorithms accepted in checksum strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChecksumAlgorithm {
    Md5,
    Sha1,
    Sha256,
    Sha512,
}

impl ChecksumAlgorithm {
    pub fn tag(self) -> &'static str {
        match self {
            ChecksumAlgorithm::Md5 => "md5",
            ChecksumAlgorithm::Sha1 => "sha1",
            ChecksumAlgorithm::Sha256 => "sha256",
            ChecksumAlgorithm::Sha512 => "sha512",
        }
    }

    pub fn hex_len(self) -> usize {
        match self {
            ChecksumAlgorithm::Md5 => 32,
            ChecksumAlgorithm::Sha1 => 40,
            ChecksumAlgorithm::Sha256 => 64,
            ChecksumAlgorithm::Sha512 => 128,
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "md5" => Some(ChecksumAlgorithm::Md5),
            "sha1" => Some(ChecksumAlgorithm::Sha1),
            "sha256" => Some(ChecksumAlgorithm::Sha256),
            "sha512" => Some(ChecksumAlgorithm::Sha512),
            _ => None,
        }
    }
}

/// Splits `alg:hex` into algorithm and digest text when the hex length
/// matches the algorithm.
pub fn parse_checksum(value: &str) -> Option<(ChecksumAlgorithm, &str)> {
    let (tag, hex) = value.split_once(':')?;
    let alg = ChecksumAlgorithm::from_tag(tag)?;
    (hex.len() == alg.hex_len() && hex.bytes().all(|b| b.is_ascii_hexdigit())).then_some((alg, hex))
}

fn is_version_number(value: &str) -> bool {
    let segments: Vec<&str> = value.split('.').collect();
    (1..=4).contains(&segments.len())
        && segments
            .iter()
            .all(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
}

// RFC 3986 absolute URI: scheme ":" hier-part [ "?" query ] [ "#" fragment ].
fn is_absolute_uri(value: &str) -> bool {
    let Some((scheme, rest)) = value.split_once(':') else {
        return false;
    };
    let mut scheme_bytes = scheme.bytes();
    match scheme_bytes.next() {
        Some(b) if b.is_ascii_alphabetic() => {}
        _ => return false,
    }
    if !scheme_bytes.all(|b| b.is_ascii_alphanumeric() || matches!(b, b'+' | b'-' | b'.')) {
        return false;
    }
    if rest.is_empty() {
        return false;
    }

    let (before_fragment, fragment) = match rest.split_once('#') {
        Some((head, frag)) => (head, Some(frag)),
        None => (rest, None),
    };
    if let Some(frag) = fragment {
        if !valid_uri_chars(frag, false) {
            return false;
        }
    }
    let (hier, query) = match before_fragment.split_once('?') {
        Some((head, q)) => (head, Some(q)),
        None => (before_fragment, None),
    };
    if let Some(q) = query {
        if !valid_uri_chars(q, false) {
            return false;
        }
    }
    if let Some(after) = hier.strip_prefix("//") {
        let (authority, path) = match after.find('/') {
            Some(i) => (&after[..i], &after[i..]),
            None => (after, ""),
        };
        valid_uri_chars(authority, true) && valid_uri_chars(path, false)
    } else {
        !hier.is_empty() && valid_uri_chars(hier, false)
    }
}

fn valid_uri_chars(text: &str, authority: bool) -> bool {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'%' => {
                if !(bytes.get(i + 1).is_some_and(u8::is_ascii_hexdigit)
                    && bytes.get(i + 2).is_some_and(u8::is_ascii_hexdigit))
                {
                    return false;
                }
                i += 3;
                continue;
            }
            b'[' | b']' if authority => {}
            b if b.is_ascii_alphanumeric() => {}
            b'-' | b'.' | b'_' | b'~' => {}
            b'!' | b'$' | b'&' | b'\'' | b'(' | b')' | b'*' | b'+' | b',' | b';' | b'=' => {}
            b':' | b'@' => {}
            b'/' | b'?' if !authority => {}
            _ => return false,
        }
        i += 1;
    }
    true
}

fn is_media_type(value: &str) -> bool {
    let mut parts = value.split(';');
    let essence = parts.next().unwrap_or_default();
    let Some((kind, subtype)) = essence.split_once('/') else {
        return false;
    };
    if !is_restricted_name(kind) || !is_restricted_name(subtype) {
        return false;
    }
    parts.all(|param| {
        let param = param.trim_matches(|c| c == ' ' || c == '\t');
        let Some((name, val)) = param.split_once('=') else {
            return false;
        };
        is_token(name) && (is_token(val) || is_quoted_string(val))
    })
}

// RFC 6838 section 4.2 restricted-name.
fn is_restricted_name(name: &str) -> bool {
    let bytes = name.as_bytes();
    !bytes.is_empty()
        && bytes.len() <= 127
        && bytes[0].is_ascii_alphanumeric()
        && bytes[1..].iter().all(|&b| {
            b.is_ascii_alphanumeric()
                || matches!(b, b'!' | b'#' | b'$' | b'&' | b'-' | b'^' | b'_' | b'.' | b'+')
        })
}

fn is_token(text: &str) -> bool {
    !text.is_empty()
        && text.bytes().all(|b| {
            b.is_ascii_alphanumeric()
                || matches!(
                    b,
                    b'!' | b'#' | b'$' | b'%' | b'&' | b'\'' | b'*' | b'+' | b'-' | b'.' | b'^'
                        | b'_' | b'`' | b'|' | b'~'
                )
        })
}

fn is_quoted_string(text: &str) -> bool {
    let Some(inner) = text.strip_prefix('"').and_then(|t| t.strip_suffix('"')) else {
        return false;
    };
    let mut escaped = false;
    for b in inner.bytes() {
        if escaped {
            escaped = false;
            continue;
        }
        match b {
            b'\\' => escaped = true,
            b'"' => return false,
            b'\t' | b' '..=b'~' => {}
            _ => return false,
        }
    }
    !escaped
}

fn is_rfc3339_date_time(value: &str) -> bool {
    let b = value.as_bytes();
    if b.len() < 20 {
        return false;
    }
    let digits = |range: std::ops::Range<usize>| -> Option<u32> {
        let slice = b.get(range)?;
        if !slice.iter().all(u8::is_ascii_digit) {
            return None;
        }
        Some(slice.iter().fold(0, |acc, d| acc * 10 + u32::from(d - b'0')))
    };

    let (Some(year), Some(month), Some(day)) = (digits(0..4), digits(5..7), digits(8..10)) else {
        return false;
    };
    if b[4] != b'-' || b[7] != b'-' || !matches!(b[10], b'T' | b't') {
        return false;
    }
    if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
        return false;
    }

    let (Some(hour), Some(minute), Some(second)) = (digits(11..13), digits(14..16), digits(17..19))
    else {
        return false;
    };
    if b[13] != b':' || b[16] != b':' || hour > 23 || minute > 59 || second > 60 {
        return false;
    }

    let mut i = 19;
    if b[i] == b'.' {
        let start = i + 1;
        i = start;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == start {
            return false;
        }
    }

    match &b[i..] {
        [b'Z' | b'z'] => true,
        [b'+' | b'-', ..] if b.len() - i == 6 => {
            let (Some(off_h), Some(off_m)) = (digits(i + 1..i + 3), digits(i + 4..i + 6)) else {
                return false;
            };
            b[i + 3] == b':' && off_h <= 23 && off_m <= 59
        }
        _ => false,
    }
}

fn days_in_month(year: u32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if (year % 4 == 0 && year % 100 != 0) || year % 400 == 0 => 29,
        _ => 28,
    }
}
