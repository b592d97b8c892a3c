//! Canonical JSON Lines form of a graph.
//!
//! Line 1 is a header; then one line per entity in id order, then one line
//! per link in (type, from, to) order. Keys are sorted and lines end in LF,
//! so equal graphs always serialise to equal bytes.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use kfind_core::{EntityRecord, Graph, LinkRecord, SCHEMA_VERSION};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unsupported schema version {0}")]
    UnsupportedVersion(u64),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn record_line(tag: &str, value: Value) -> String {
    let Value::Object(mut obj) = value else {
        unreachable!("records serialise to objects")
    };
    obj.insert("record".into(), Value::String(tag.into()));
    // serde_json's default map is ordered, so keys come out sorted.
    serde_json::to_string(&Value::Object(obj)).expect("serialisable")
}

pub fn to_canonical_bytes(graph: &Graph) -> Vec<u8> {
    let mut out = String::new();
    let mut header = Map::new();
    header.insert("schema_version".into(), Value::from(graph.schema_version()));
    out.push_str(&record_line("header", Value::Object(header)));
    out.push('\n');
    for e in graph.entities() {
        out.push_str(&record_line("entity", serde_json::to_value(e).expect("serialisable")));
        out.push('\n');
    }
    for l in graph.links() {
        out.push_str(&record_line("link", serde_json::to_value(l).expect("serialisable")));
        out.push('\n');
    }
    out.into_bytes()
}

/// Hex SHA-256 of snapshot bytes.
pub fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parses snapshot bytes. The graph is not validated here; callers decide
/// what to do with violations.
pub fn parse_snapshot(bytes: &[u8]) -> Result<Graph, SnapshotError> {
    let text = std::str::from_utf8(bytes).map_err(|e| SnapshotError::Parse {
        line: 1 + bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count(),
        reason: "not UTF-8".into(),
    })?;
    let mut schema_version = None;
    let mut entities = Vec::new();
    let mut seen = BTreeSet::new();
    let mut links = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |reason: String| SnapshotError::Parse { line, reason };
        if raw.trim().is_empty() {
            continue;
        }
        let mut obj = match serde_json::from_str::<Value>(raw) {
            Ok(Value::Object(obj)) => obj,
            Ok(_) => return Err(err("expected a JSON object".into())),
            Err(e) => return Err(err(e.to_string())),
        };
        let tag = match obj.remove("record") {
            Some(Value::String(s)) => s,
            _ => return Err(err("missing `record` tag".into())),
        };
        match (tag.as_str(), schema_version) {
            ("header", None) => {
                let v = obj
                    .get("schema_version")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| err("header without schema_version".into()))?;
                if v != u64::from(SCHEMA_VERSION) {
                    return Err(SnapshotError::UnsupportedVersion(v));
                }
                schema_version = Some(SCHEMA_VERSION);
            }
            (_, None) => return Err(err("first record must be the header".into())),
            ("header", Some(_)) => return Err(err("second header".into())),
            ("entity", Some(_)) => {
                let e: EntityRecord =
                    serde_json::from_value(Value::Object(obj)).map_err(|e| err(e.to_string()))?;
                if !seen.insert(e.id().clone()) {
                    return Err(err(format!("duplicate entity {}", e.id())));
                }
                entities.push(e);
            }
            ("link", Some(_)) => {
                let l: LinkRecord =
                    serde_json::from_value(Value::Object(obj)).map_err(|e| err(e.to_string()))?;
                links.push(l);
            }
            (other, Some(_)) => return Err(err(format!("unknown record `{other}`"))),
        }
    }
    let schema_version = schema_version.ok_or(SnapshotError::Parse {
        line: 1,
        reason: "empty snapshot".into(),
    })?;
    Ok(Graph::from_parts(schema_version, entities, links))
}

pub fn read_snapshot(path: &Path) -> Result<(Graph, Vec<u8>), SnapshotError> {
    let bytes = fs::read(path)?;
    let graph = parse_snapshot(&bytes)?;
    Ok((graph, bytes))
}

/// Writes the canonical bytes and returns their checksum.
pub fn write_snapshot(path: &Path, graph: &Graph) -> std::io::Result<String> {
    let bytes = to_canonical_bytes(graph);
    fs::write(path, &bytes)?;
    Ok(checksum(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use kfind_core::fixtures::demo_org;

    #[test]
    fn round_trip_is_byte_stable() {
        let bytes = to_canonical_bytes(&demo_org());
        let g = parse_snapshot(&bytes).unwrap();
        assert_eq!(g, demo_org());
        assert_eq!(to_canonical_bytes(&g), bytes);
    }

    #[test]
    fn layout() {
        let text = String::from_utf8(to_canonical_bytes(&demo_org())).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], r#"{"record":"header","schema_version":1}"#);
        assert!(lines[1].contains(r#""id":"output:o1""#));
        assert!(text.ends_with('\n') && !text.contains('\r'));
        let last = lines.last().unwrap();
        assert_eq!(*last, r#"{"from":"project:p1","record":"link","to":"unit:u2","type":"tasked_to"}"#);
    }

    #[test]
    fn rejects_bad_input() {
        let cases: [(&str, usize); 5] = [
            ("", 1),
            (r#"{"record":"entity"}"#, 1),
            ("{\"record\":\"header\",\"schema_version\":1}\nnot json\n", 2),
            ("{\"record\":\"header\",\"schema_version\":1}\n{\"record\":\"comment\"}\n", 2),
            ("{\"record\":\"header\",\"schema_version\":1}\n{\"record\":\"link\",\"type\":\"authored\",\"from\":\"staff:s1\"}\n", 2),
        ];
        for (text, line) in cases {
            match parse_snapshot(text.as_bytes()) {
                Err(SnapshotError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_snapshot(br#"{"record":"header","schema_version":7}"#),
            Err(SnapshotError::UnsupportedVersion(7))
        ));
    }
}
