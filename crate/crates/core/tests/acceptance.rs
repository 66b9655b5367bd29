//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fdo_core::bundled::helmholtz;
use fdo_core::conformance::{CheckId, Verdict};
use fdo_core::graph::{build_graph, import_triples, FdoGraph, PidTriple};
use fdo_core::ops::{BuiltinKeys, OperationsEngine, ResourceFetcher, Target};
use fdo_core::record::{parse_record, serialize_record};
use fdo_core::registry::{PidRegistry, RemoteResolver};
use fdo_core::{FdoSpace, InformationRecord, Pid, RecordError, ViolationCode};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use common::*;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 graph reproduction", graph_reproduction),
        ("2 conformance matrix reproduction", conformance_matrix),
        ("3 model assertion properties", model_assertions),
        ("4 operation association", operation_association),
        ("5 checksum integrity", checksum_integrity),
        ("6 SCC oracle equivalence", scc_oracle),
        ("7 round trips", round_trips),
        ("8 service contract", service_contract),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn graph_reproduction() -> Outcome {
    let space = FdoSpace::builder().fixtures(fixture("energy")).build().map_err(|e| e.to_string())?;
    let records = energy_records(&space);
    let start = Instant::now();
    let graph = build_graph(space.types(), &records);
    let elapsed = start.elapsed();

    let expected: BTreeSet<PidTriple> =
        TRIPLES.iter().map(|(s, p, o)| PidTriple::new(pid(s), predicate(*p), pid(o))).collect();
    let nodes: BTreeSet<Pid> = ENERGY.iter().map(|(l, _)| pid(l)).collect();
    let predicates: BTreeSet<Pid> = [predicate('a'), predicate('b')].into();
    check(graph.nodes() == &nodes, format!("|nodes| = {}", graph.nodes().len()))?;
    check(graph.predicates() == &predicates, format!("predicates {:?}", graph.predicates()))?;
    check(graph.triples() == &expected, format!("triples differ: {:?}", graph.triples().symmetric_difference(&expected).collect::<Vec<_>>()))?;
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("18 nodes, 2 predicates, 11 triples, {elapsed:?}"))
}

fn conformance_matrix() -> Outcome {
    use Verdict::{No, Partial, Yes};
    let expected: [(&str, [Verdict; 5]); 3] = [
        (PIDINST, [Yes, Partial, No, No, Partial]),
        (DARIAH, [No, No, No, No, No]),
        (DISSCO, [Yes, Partial, No, No, Partial]),
    ];
    let space = FdoSpace::builder().build().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let mut matched = 0;
    for (pid, verdicts) in expected {
        let report = space.conformance().check_document(&external_snapshot(pid)).map_err(|e| e.to_string())?;
        for (i, (got, want)) in report.verdicts().iter().zip(verdicts).enumerate() {
            check(*got == want, format!("{pid} {}: got {got}, expected {want}", CheckId::ALL[i].as_str()))?;
            matched += 1;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("{matched}/15 verdicts, {elapsed:?}, offline"))
}

/// Hand-labelled value pools per value type: (valid, invalid).
fn pools(value_type: &str) -> (&'static [&'static str], &'static [&'static str]) {
    match value_type {
        "url" => (
            &["https://example.org/a", "http://x.y/z?q=1#f", "ftp://host/file.txt", "urn:isbn:0451450523", "mailto:someone@example.org"],
            &["example.org/no-scheme", "https://exa mple.org", "://missing", "1http://x", ""],
        ),
        "date-time-rfc3339" => (
            &["2024-05-01T12:00:00Z", "1999-12-31T23:59:59+01:00", "2020-02-29T00:00:00.123Z", "2022-08-25T09:15:00-05:30"],
            &["2021-02-29T00:00:00Z", "2024-05-01", "2024-13-01T00:00:00Z", "2024-05-01T25:00:00Z", "2024-05-01T12:00:00", ""],
        ),
        "media-type-iana" => (
            &["application/json", "image/tiff", "text/plain; charset=utf-8", "application/vnd.api+json"],
            &["json", "image/", "/tiff", "text plain", ""],
        ),
        "checksum-string" => (
            &[
                "sha256:11b052e615642873ec9da278c7a05a4bb586c9a8d9b2eb2e340c2fbf22ad56f8",
                "md5:d41d8cd98f00b204e9800998ecf8427e",
                "sha1:da39a3ee5e6b4b0d3255bfef95601890afd80709",
            ],
            &["sha256:abc", "crc32:deadbeef", "11b052e615642873ec9da278c7a05a4bb586c9a8d9b2eb2e340c2fbf22ad56f8", "md5:zz1d8cd98f00b204e9800998ecf8427e", ""],
        ),
        "version-number" => (&["1", "1.0", "2.10.3"], &["v1", "1..0", "1.0-beta", "1.2.3.4.5", ""]),
        "handle-identifier-ascii" => (&["21.11152/abc", "10.1234/xyz-1"], &["no-slash", "21 11/x", "21.11152/", ""]),
        "language-code-iso639-1" => (&["en", "de", "fr"], &["EN", "eng", "e", ""]),
        "string" => (&["anything", "Drone image set 1"], &[""]),
        other => panic!("no pool for {other}"),
    }
}

struct ProfileAttr {
    pid: String,
    value_type: String,
    obligatory: bool,
    repeatable: bool,
}

/// The Helmholtz profile's attribute table, read straight from the JSON.
fn profile_table() -> Vec<ProfileAttr> {
    let doc: Value = serde_json::from_str(fdo_core::bundled::HELMHOLTZ_KIP).unwrap();
    doc["attributes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| ProfileAttr {
            pid: a["pid"].as_str().unwrap().to_owned(),
            value_type: a["valueType"].as_str().unwrap().to_owned(),
            obligatory: a["obligatory"].as_bool().unwrap(),
            repeatable: a["repeatable"].as_bool().unwrap(),
        })
        .collect()
}

fn model_assertions() -> Outcome {
    let space = FdoSpace::builder().build().map_err(|e| e.to_string())?;
    let table = profile_table();
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let (mut accepts, mut rejects) = (0, 0);

    for case in 0..1000 {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut expect_valid = true;
        for attr in table.iter().filter(|a| a.pid != helmholtz::KERNEL_INFORMATION_PROFILE) {
            let include = if attr.obligatory { rng.gen_bool(0.93) } else { rng.gen_bool(0.4) };
            if !include {
                expect_valid &= !attr.obligatory;
                continue;
            }
            let count = if rng.gen_bool(0.1) { 2 } else { 1 };
            if count > 1 && !attr.repeatable {
                expect_valid = false;
            }
            let (good, bad) = pools(&attr.value_type);
            for _ in 0..count {
                let value = if rng.gen_bool(0.04) {
                    expect_valid = false;
                    bad[rng.gen_range(0..bad.len())]
                } else {
                    good[rng.gen_range(0..good.len())]
                };
                values.entry(attr.pid.clone()).or_default().push(value.to_owned());
            }
        }
        match space.records().instantiate_profile(helmholtz::PROFILE, &values) {
            Ok(_) if expect_valid => accepts += 1,
            Err(RecordError::ValidationFailed(_)) if !expect_valid => rejects += 1,
            Ok(_) => return Err(format!("case {case}: false accept of {values:?}")),
            Err(e) => return Err(format!("case {case}: false reject ({e}) of {values:?}")),
        }
    }

    let mut two = valid_record();
    two.add(helmholtz::KERNEL_INFORMATION_PROFILE, "21.T11148/5f3a7d0c2b9e6a14c8d7");
    let outcome = space.records().validate_record(&two, None).map_err(|e| e.to_string())?;
    check(outcome.has(ViolationCode::MultipleProfiles), "two profile references accepted")?;
    check(space.records().register_record(&mut two.clone()).is_err(), "registered a two-profile record")?;
    let mut none = valid_record();
    none.remove(helmholtz::KERNEL_INFORMATION_PROFILE);
    let outcome = space.records().validate_record(&none, None).map_err(|e| e.to_string())?;
    check(outcome.has(ViolationCode::NoProfile), "profile-less record accepted")?;

    let registry = PidRegistry::new("21.11152.test").map_err(|e| e.to_string())?;
    let mut seen = HashSet::with_capacity(100_000);
    for _ in 0..100_000 {
        check(seen.insert(registry.mint_pid()), "duplicate minted PID")?;
    }
    Ok(format!("1000 cases ({accepts} accepted, {rejects} rejected), one-profile rule, 100000 unique mints"))
}

fn operation_association() -> Outcome {
    let space = energy_space();
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("golden").join("associations.json")).unwrap()).unwrap();
    let mut checked = 0;
    for entry in golden["records"].as_array().unwrap() {
        let pid = Pid::parse(entry["pid"].as_str().unwrap()).unwrap();
        let want: BTreeSet<&str> = entry["operations"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        let record = space.resolve(&pid).map_err(|e| e.to_string())?;
        let got: BTreeSet<String> = space.ops().associate(&record).iter().map(|d| d.name.clone()).collect();
        let got: BTreeSet<&str> = got.iter().map(String::as_str).collect();
        check(got == want, format!("{}: got {got:?}, expected {want:?}", entry["label"]))?;

        let mut stripped = record.clone();
        stripped.remove(helmholtz::DIGITAL_RESOURCE_LOCATION);
        for d in space.ops().operations().iter().filter(|d| d.target == Target::BitSequence) {
            check(!space.ops().applicable(d, &stripped), format!("{} applicable without location", d.name))?;
        }
        checked += 1;
    }
    let dissco = space.resolve(&Pid::parse(DISSCO).unwrap()).map_err(|e| e.to_string())?;
    for d in space.ops().operations().iter().filter(|d| d.target == Target::BitSequence) {
        check(!space.ops().applicable(d, &dissco), format!("{} applicable to the DiSSCo snapshot", d.name))?;
    }
    check(checked == 18, format!("golden file lists {checked} records"))?;
    Ok("18 golden sets, no bit-sequence operation applicable without a location".into())
}

#[derive(Debug)]
struct MutatedFetcher {
    bytes: Vec<u8>,
}

impl ResourceFetcher for MutatedFetcher {
    fn fetch(&self, _location: &str) -> Result<Vec<u8>, String> {
        Ok(self.bytes.clone())
    }
}

fn checksum_integrity() -> Outcome {
    let space = energy_space();
    let a = space.resolve(&pid("A")).map_err(|e| e.to_string())?;
    check(
        a.first(helmholtz::CHECKSUM) == Some(&format!("sha256:{BIG_PAYLOAD_SHA256}")[..]),
        "fixture A does not carry the reference digest",
    )?;
    let result = space.ops().execute("validate_checksum", &a).map_err(|e| e.to_string())?;
    check(result.payload["length"] == 1_048_576, "payload is not 1 MiB")?;
    check(result.status == fdo_core::ops::OperationStatus::Match, format!("intact payload: {:?}", result.status))?;

    let original = std::fs::read(fixture("payloads").join(BIG_PAYLOAD)).unwrap();
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    for i in 0..100 {
        let mut bytes = original.clone();
        let at = rng.gen_range(0..bytes.len());
        bytes[at] ^= rng.gen_range(1..=255u8);
        let engine = OperationsEngine::new(
            space.types().clone(),
            space.registry().clone(),
            Arc::new(MutatedFetcher { bytes }),
        )
        .with_builtins(&BuiltinKeys::helmholtz())
        .map_err(|e| e.to_string())?;
        let result = engine.execute("validate_checksum", &a).map_err(|e| e.to_string())?;
        check(
            result.status == fdo_core::ops::OperationStatus::Mismatch,
            format!("mutation {i} at byte {at} still matches"),
        )?;
    }
    Ok("match on intact payload, 100/100 mutations detected".into())
}

/// Mutual reachability by transitive closure over an adjacency matrix.
fn brute_force_sccs(graph: &FdoGraph) -> Vec<Vec<Pid>> {
    let nodes: Vec<&Pid> = graph.nodes().iter().collect();
    let n = nodes.len();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for t in graph.triples() {
        let i = nodes.iter().position(|p| **p == t.subject).unwrap();
        let j = nodes.iter().position(|p| **p == t.object).unwrap();
        reach[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let members: Vec<Pid> = (0..n)
            .filter(|&j| reach[i][j] && reach[j][i])
            .inspect(|&j| seen[j] = true)
            .map(|j| nodes[j].clone())
            .collect();
        out.push(members);
    }
    out.sort();
    out
}

fn scc_oracle() -> Outcome {
    let space = FdoSpace::builder().fixtures(fixture("energy")).build().map_err(|e| e.to_string())?;
    let base = build_graph(space.types(), &energy_records(&space));
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let extra = [Pid::parse("21.11152/extra-1").unwrap(), Pid::parse("21.11152/extra-2").unwrap()];
    let mut non_trivial = 0;
    for variant in 0..200 {
        let mut nodes: Vec<Pid> = base.nodes().iter().cloned().collect();
        nodes.extend(extra.iter().take(rng.gen_range(0..=2)).cloned());
        let mut triples: BTreeSet<PidTriple> = base.triples().clone();
        for _ in 0..rng.gen_range(0..6) {
            if let Some(t) = triples.iter().nth(rng.gen_range(0..triples.len().max(1))).cloned() {
                triples.remove(&t);
            }
        }
        for _ in 0..rng.gen_range(0..12) {
            let s = nodes[rng.gen_range(0..nodes.len())].clone();
            let o = nodes[rng.gen_range(0..nodes.len())].clone();
            triples.insert(PidTriple::new(s, predicate(if rng.gen_bool(0.5) { 'a' } else { 'b' }), o));
        }
        let graph = FdoGraph::from_parts(nodes, triples);
        check(graph.nodes().len() <= 20, "variant exceeds 20 nodes")?;
        let got = graph.strongly_connected_components();
        let want = brute_force_sccs(&graph);
        check(got == want, format!("variant {variant}: {got:?} != {want:?}"))?;
        non_trivial += usize::from(got.iter().any(|c| c.len() > 1));
    }
    check(non_trivial > 20, format!("only {non_trivial} variants had a cycle"))?;
    Ok(format!("200 variants equal to the oracle, {non_trivial} with non-trivial components"))
}

fn random_record(rng: &mut StdRng) -> InformationRecord {
    let table = profile_table();
    let mut record = InformationRecord::new();
    if rng.gen_bool(0.5) {
        record.pid = Some(Pid::parse(&format!("21.11152/gen-{}", rng.gen::<u32>())).unwrap());
    }
    for attr in &table {
        if rng.gen_bool(0.5) {
            let (good, _) = pools(&attr.value_type);
            for _ in 0..rng.gen_range(1..=3) {
                record.add(attr.pid.clone(), good[rng.gen_range(0..good.len())]);
            }
        }
    }
    for _ in 0..rng.gen_range(0..3) {
        let key = format!("free-{}", rng.gen_range(0..5));
        let value: String = (0..rng.gen_range(0..12)).map(|_| rng.gen_range(' '..='~')).collect();
        record.add(key, format!("{value}\u{e9}\"\\"));
    }
    record
}

fn round_trips() -> Outcome {
    let space = energy_space();
    let mut count = 0;
    for entry in space.registry().entries() {
        let doc = serialize_record(&entry.record, space.types()).to_string();
        let back = parse_record(&doc).map_err(|e| e.to_string())?;
        check(back == entry.record, format!("{} does not round-trip", entry.pid))?;
        count += 1;
    }
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    for i in 0..1000 {
        let record = random_record(&mut rng);
        let doc = serialize_record(&record, space.types()).to_string();
        let back = parse_record(&doc).map_err(|e| format!("generated {i}: {e}"))?;
        check(back == record, format!("generated record {i} does not round-trip"))?;
    }
    let graph = space.graph();
    let reimported = import_triples(&graph.export_triples()).map_err(|e| e.to_string())?;
    check(&reimported == graph.triples(), "graph export/import differs")?;
    Ok(format!("{count} fixtures, 1000 generated records, graph triples"))
}

fn service_contract() -> Outcome {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        std::fs::write(
            dir.path().join("no-location.json"),
            json!({"pid": "21.11152/no-location", "record": {helmholtz::CHECKSUM: format!("sha256:{BIG_PAYLOAD_SHA256}")}}).to_string(),
        )
        .map_err(|e| e.to_string())?;
        let space = FdoSpace::builder()
            .fixtures(fixture("energy"))
            .fixtures(fixture("external"))
            .fixtures(dir.path())
            .mirror(fixture("payloads").join("manifest.json"))
            .build()
            .map_err(|e| e.to_string())?;
        let base = spawn(space).await;
        let dead = spawn(
            FdoSpace::builder().remote(RemoteResolver::new("http://127.0.0.1:9", true)).build().map_err(|e| e.to_string())?,
        )
        .await;
        let client = reqwest::Client::new();
        let mut covered = Vec::new();

        let status = |r: &reqwest::Response| r.status().as_u16();
        let record_doc = json!({"record": serialize_record(&valid_record(), &fdo_core::TypeRegistry::new())["record"]});

        let r = client.post(format!("{base}/records")).json(&record_doc).send().await.map_err(|e| e.to_string())?;
        check(status(&r) == 201, format!("POST /records -> {}", status(&r)))?;
        let created: Value = r.json().await.map_err(|e| e.to_string())?;
        let new_pid = Pid::parse(created["pid"].as_str().unwrap_or_default()).map_err(|e| e.to_string())?;
        let r = client.get(format!("{base}/records/{}/{}", new_pid.prefix(), new_pid.suffix())).send().await.map_err(|e| e.to_string())?;
        check(status(&r) == 200, "GET created record")?;
        covered.push("create+resolve");

        let mut invalid = record_doc.clone();
        invalid["record"].as_object_mut().unwrap().remove(helmholtz::LICENSE);
        let r = client.post(format!("{base}/records")).json(&invalid).send().await.map_err(|e| e.to_string())?;
        check(status(&r) == 422, format!("invalid record -> {}", status(&r)))?;
        covered.push("ValidationFailed=422");

        let r = client.get(format!("{base}/records/21.11152/does-not-exist")).send().await.map_err(|e| e.to_string())?;
        check(status(&r) == 404, format!("unknown PID -> {}", status(&r)))?;
        covered.push("NotFound=404");

        let r = client
            .post(format!("{base}/records/21.11152/no-location/operations/validate_checksum"))
            .send()
            .await
            .map_err(|e| e.to_string())?;
        check(status(&r) == 409, format!("missing access key -> {}", status(&r)))?;
        let body: Value = r.json().await.map_err(|e| e.to_string())?;
        check(body["code"] == "MissingAccessKey", format!("code {}", body["code"]))?;
        covered.push("MissingAccessKey=409");

        let r = client.get(format!("{dead}/records/21.11152/anything")).send().await.map_err(|e| e.to_string())?;
        check(status(&r) == 502, format!("unreachable proxy -> {}", status(&r)))?;
        covered.push("RemoteUnavailable=502");

        let r = client.post(format!("{base}/records")).body("{broken").send().await.map_err(|e| e.to_string())?;
        check(status(&r) == 400, format!("malformed body -> {}", status(&r)))?;
        covered.push("MalformedRecordDocument=400");

        let r = client.post(format!("{base}/records/validate")).json(&invalid).send().await.map_err(|e| e.to_string())?;
        let body: Value = r.json().await.map_err(|e| e.to_string())?;
        check(body["valid"] == false, "validate endpoint accepted an invalid record")?;
        covered.push("validate");

        let a = pid("A");
        let r = client.get(format!("{base}/records/{}/{}/operations", a.prefix(), a.suffix())).send().await.map_err(|e| e.to_string())?;
        let body: Value = r.json().await.map_err(|e| e.to_string())?;
        check(body["operations"].as_array().map(Vec::len) == Some(4), "A should have 4 operations")?;
        let r = client
            .post(format!("{base}/records/{}/{}/operations/validate_checksum", a.prefix(), a.suffix()))
            .send()
            .await
            .map_err(|e| e.to_string())?;
        let body: Value = r.json().await.map_err(|e| e.to_string())?;
        check(body["status"] == "match", format!("checksum over HTTP: {body}"))?;
        covered.push("operations");

        let r = client.get(format!("{base}/graph?format=triples")).send().await.map_err(|e| e.to_string())?;
        check(r.text().await.map_err(|e| e.to_string())?.lines().count() == 11, "GET /graph triples")?;
        let (n, i) = (pid("N"), pid("I"));
        let r = client.get(format!("{base}/graph/path?from={n}&to={i}")).send().await.map_err(|e| e.to_string())?;
        let body: Value = r.json().await.map_err(|e| e.to_string())?;
        check(body["path"].as_array().map(Vec::len) == Some(2), "N to I path")?;
        covered.push("graph");

        let r = client.post(format!("{base}/conformance")).body(external_snapshot(DARIAH)).send().await.map_err(|e| e.to_string())?;
        let body: Value = r.json().await.map_err(|e| e.to_string())?;
        check(body["rows"].as_array().is_some_and(|rows| rows.iter().all(|r| r["verdict"] == "no")), "DARIAH report")?;
        covered.push("conformance");

        let r = client.get(format!("{base}/healthz")).send().await.map_err(|e| e.to_string())?;
        check(status(&r) == 200, "healthz")?;
        covered.push("healthz");

        let mut tasks = Vec::new();
        for _ in 0..32 {
            let (client, base, doc) = (client.clone(), base.clone(), record_doc.clone());
            tasks.push(tokio::spawn(async move {
                let mut pids = Vec::new();
                for _ in 0..32 {
                    let r = client.post(format!("{base}/records")).json(&doc).send().await.unwrap();
                    assert_eq!(r.status().as_u16(), 201);
                    let v: Value = r.json().await.unwrap();
                    pids.push(v["pid"].as_str().unwrap().to_owned());
                }
                pids
            }));
        }
        let mut all = HashSet::new();
        for t in tasks {
            all.extend(t.await.map_err(|e| e.to_string())?);
        }
        check(all.len() == 1024, format!("{} distinct PIDs from 1024 creations", all.len()))?;
        covered.push("1024 concurrent creations");
        Ok(covered.join(", "))
    })
}

async fn spawn(space: FdoSpace) -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move {
        axum::serve(listener, fdo_core::service::router(Arc::new(space))).await.unwrap();
    });
    format!("http://{addr}")
}
