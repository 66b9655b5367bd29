#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use fdo_core::bundled::{self, helmholtz};
use fdo_core::{FdoSpace, InformationRecord, Pid};

/// The 18 energy-research fixture objects by their letter label.
pub const ENERGY: [(&str, &str); 18] = [
    ("A", "21.11152/e670f510-7e00-4d3a-9b90-3bac7a7c069e"),
    ("B", "21.11152/6ea60288-d895-414e-80c0-26c9fdd662b2"),
    ("C", "21.11152/58d43ddc-5e29-4980-8675-ae579b50a1e2"),
    ("D", "21.11152/6858a0b5-cc60-40e9-afef-8c2dd8b35e8e"),
    ("E", "21.11152/3ab9f444-05f6-445e-a691-62fae4021bea"),
    ("F", "21.11152/365fd8cf-8e86-41b8-9d0e-b816fdd01d29"),
    ("G", "21.11152/041a6111-644a-4617-afb3-3c421a88e8e3"),
    ("H", "21.11152/f48bf4e7-3879-4216-8f64-45a060b8f658"),
    ("I", "21.11152/7b58b3b5-75eb-4417-ac4d-abe025e159f6"),
    ("J", "21.11152/ba370aa3-6422-428c-9ff7-c2ef429df603"),
    ("K", "21.11152/09cb76fc-b8cb-4116-a22a-68c5bdfa77b0"),
    ("L", "21.11152/24a55398-b96b-43dd-b0fb-cd8ce302c7ce"),
    ("M", "21.11152/721234ac-4b5a-4d02-9944-82a08ef2db35"),
    ("N", "21.11152/ebaeb5bc-0514-47c9-bcd2-98f0253843d8"),
    ("O", "21.11152/9854677c-77c5-4a0b-916b-57dd9ec20198"),
    ("P", "21.11152/cfd0fc0e-f5ea-464e-a57f-28e882924860"),
    ("Q", "21.11152/976fcf28-f924-4a21-b53d-5d054ad8198d"),
    ("R", "21.11152/37833c54-1d36-42e4-858d-831447122863"),
];

/// The published triple set, with `a` = hasMetadata and `b` = isMetadataFor.
pub const TRIPLES: [(&str, char, &str); 11] = [
    ("A", 'a', "B"),
    ("C", 'b', "H"),
    ("D", 'a', "K"),
    ("E", 'a', "M"),
    ("F", 'a', "I"),
    ("G", 'a', "O"),
    ("J", 'b', "L"),
    ("N", 'b', "F"),
    ("P", 'a', "J"),
    ("Q", 'a', "J"),
    ("R", 'a', "J"),
];

pub const PIDINST: &str = "21.T11998/0000-001A-3905-1";
pub const DARIAH: &str = "21.11113/0000-000B-CA4C-D";
pub const DISSCO: &str = "10.3535/G0G-G7D-N5J";

/// 1 MiB payload and its digest as computed by `sha256sum`.
pub const BIG_PAYLOAD: &str = "drone_image_set_1.tif";
pub const BIG_PAYLOAD_SHA256: &str = "11b052e615642873ec9da278c7a05a4bb586c9a8d9b2eb2e340c2fbf22ad56f8";

pub fn pid(label: &str) -> Pid {
    let text = ENERGY.iter().find(|(l, _)| *l == label).map(|(_, p)| *p).unwrap_or(label);
    Pid::parse(text).unwrap()
}

pub fn label_of(pid: &Pid) -> String {
    ENERGY
        .iter()
        .find(|(_, p)| *p == pid.as_str())
        .map(|(l, _)| l.to_string())
        .unwrap_or_else(|| pid.to_string())
}

pub fn predicate(symbol: char) -> Pid {
    Pid::parse(match symbol {
        'a' => helmholtz::HAS_METADATA,
        'b' => helmholtz::IS_METADATA_FOR,
        _ => panic!("unknown predicate symbol"),
    })
    .unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    bundled::fixture_dir(name)
}

pub fn external_snapshot(pid: &str) -> String {
    let suffix = pid.split_once('/').unwrap().1;
    std::fs::read_to_string(fixture("external").join(format!("{suffix}.json"))).unwrap()
}

/// In-memory space with the energy fixtures, external snapshots and the
/// payload mirror loaded.
pub fn energy_space() -> FdoSpace {
    FdoSpace::builder()
        .fixtures(fixture("energy"))
        .fixtures(fixture("external"))
        .mirror(fixture("payloads").join("manifest.json"))
        .build()
        .unwrap()
}

pub fn energy_records(space: &FdoSpace) -> Vec<InformationRecord> {
    ENERGY.iter().map(|(l, _)| space.resolve(&pid(l)).unwrap()).collect()
}

/// Attribute values keyed by attribute PID for a fresh valid Helmholtz
/// record, without the profile reference.
pub fn valid_values() -> BTreeMap<String, Vec<String>> {
    [
        (helmholtz::LICENSE, "https://creativecommons.org/licenses/by/4.0/"),
        (helmholtz::CHECKSUM, "sha256:11b052e615642873ec9da278c7a05a4bb586c9a8d9b2eb2e340c2fbf22ad56f8"),
        (helmholtz::DIGITAL_RESOURCE_LOCATION, "https://example.org/data.bin"),
        (helmholtz::DATE_CREATED, "2024-05-01T12:00:00Z"),
        (helmholtz::DIGITAL_RESOURCE_TYPE, "application/octet-stream"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), vec![v.to_owned()]))
    .collect()
}

pub fn valid_record() -> InformationRecord {
    let mut record = InformationRecord::new();
    record.add(helmholtz::KERNEL_INFORMATION_PROFILE, helmholtz::PROFILE);
    for (k, vs) in valid_values() {
        for v in vs {
            record.add(k.clone(), v);
        }
    }
    record
}
