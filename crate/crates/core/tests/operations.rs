mod common;

use fdo_core::bundled::helmholtz;
use fdo_core::ops::{
    AssociationCriterion, KeyValuePredicate, MatchKind, OperationDescriptor, OperationError, OperationOutcome,
    OperationStatus, Target,
};
use serde_json::json;

use common::*;

#[test]
fn license_is_resolved_to_spdx() {
    let space = energy_space();
    let result = space.ops().execute("evaluate_license", &space.resolve(&pid("B")).unwrap()).unwrap();
    assert_eq!(result.status, OperationStatus::Ok);
    assert_eq!(result.payload["spdx_id"], "CC-BY-4.0");
}

#[test]
fn related_objects_follow_reference_keys() {
    let space = energy_space();
    let result = space.ops().execute("get_related_fdo", &space.resolve(&pid("P")).unwrap()).unwrap();
    let related: Vec<String> =
        result.payload["related"].as_array().unwrap().iter().map(|r| r["pid"].as_str().unwrap().to_owned()).collect();
    assert_eq!(related, [pid("J").to_string()]);
}

#[test]
fn digital_resource_is_returned_whole() {
    let space = energy_space();
    let result = space.ops().execute("get_digital_resource", &space.resolve(&pid("J")).unwrap()).unwrap();
    assert_eq!(result.status, OperationStatus::Ok);
    let bytes = std::fs::read(fixture("payloads").join("stac_collection.json")).unwrap();
    assert_eq!(result.payload["length"], bytes.len());
}

#[test]
fn geographic_and_time_filters() {
    let space = energy_space();
    let p = space.resolve(&pid("P")).unwrap();
    let ops = space.ops();
    let inside = ops.execute_with("geographic_filter", &p, &json!({"bbox": [8.0, 48.0, 9.0, 50.0]})).unwrap();
    assert_eq!(inside.status, OperationStatus::Match);
    let outside = ops.execute_with("geographic_filter", &p, &json!({"bbox": [0.0, 0.0, 1.0, 1.0]})).unwrap();
    assert_eq!(outside.status, OperationStatus::Mismatch);
    let extracted = ops.execute("geographic_filter", &p).unwrap();
    assert_eq!(extracted.status, OperationStatus::Ok);
    assert_eq!(extracted.payload["bbox"].as_array().unwrap().len(), 4);

    let year = |y: i32| json!({"start": format!("{y}-01-01T00:00:00Z"), "end": format!("{y}-12-31T23:59:59Z")});
    assert_eq!(ops.execute_with("timestamp_filter", &p, &year(2021)).unwrap().status, OperationStatus::Match);
    assert_eq!(ops.execute_with("timestamp_filter", &p, &year(2023)).unwrap().status, OperationStatus::Mismatch);
    let bad = ops.execute_with("timestamp_filter", &p, &json!({"start": "yesterday"}));
    assert!(matches!(bad, Err(OperationError::InvalidParameters(_))));
}

#[test]
fn execution_errors() {
    let space = energy_space();
    let ops = space.ops();
    let a = space.resolve(&pid("A")).unwrap();
    assert!(matches!(ops.execute("nope", &a), Err(OperationError::UnknownOperation(_))));
    assert!(matches!(ops.execute("timestamp_filter", &a), Err(OperationError::NotApplicable { .. })));
    let mut stripped = a.clone();
    stripped.remove(helmholtz::DIGITAL_RESOURCE_LOCATION);
    let err = ops.execute("validate_checksum", &stripped).unwrap_err();
    assert_eq!(err.code(), "MissingAccessKey");
}

#[test]
fn extensions_register_and_run() {
    let space = energy_space();
    let ops = space.ops();
    let count = OperationDescriptor::extension(
        "count_pairs",
        AssociationCriterion::requiring([helmholtz::CHECKSUM])
            .with_predicate(KeyValuePredicate::new(helmholtz::DIGITAL_RESOURCE_TYPE, MatchKind::Prefix, "image/")),
        Target::Metadata,
        |_, record, _| Ok(OperationOutcome::ok(json!({"pairs": record.pair_count()}))),
    );
    ops.register_operation(count.clone()).unwrap();
    assert!(matches!(ops.register_operation(count), Err(OperationError::DuplicateOperationName(_))));
    let a = space.resolve(&pid("A")).unwrap();
    assert!(ops.associate(&a).iter().any(|d| d.name == "count_pairs"));
    let result = ops.execute("count_pairs", &a).unwrap();
    assert_eq!(result.payload["pairs"], a.pair_count());
    assert!(!ops.associate(&space.resolve(&pid("J")).unwrap()).iter().any(|d| d.name == "count_pairs"));

    let empty = OperationDescriptor::extension("empty", AssociationCriterion::default(), Target::Metadata, |_, _, _| {
        Ok(OperationOutcome::ok(json!(null)))
    });
    assert!(matches!(ops.register_operation(empty), Err(OperationError::InvalidCriterion(_))));
    let unknown = OperationDescriptor::extension(
        "unknown_key",
        AssociationCriterion::requiring(["21.T11148/nowhere"]),
        Target::Metadata,
        |_, _, _| Ok(OperationOutcome::ok(json!(null))),
    );
    assert!(matches!(ops.register_operation(unknown), Err(OperationError::InvalidCriterion(_))));
}
