//! Merge report as JSON Lines, written next to the snapshot.

use std::path::{Path, PathBuf};

use kfind_core::ingest::MergeReport;
use serde::Serialize;
use serde_json::{json, Value};

/// `<dir>/<stem>.report.jsonl` for snapshot `<dir>/<stem>.<ext>`.
pub fn report_path(snapshot: &Path) -> PathBuf {
    let stem = snapshot.file_stem().unwrap_or_default().to_string_lossy();
    snapshot.with_file_name(format!("{stem}.report.jsonl"))
}

fn tagged<T: Serialize>(tag: &str, item: &T) -> Value {
    let mut v = serde_json::to_value(item).expect("serialisable");
    if let Value::Object(obj) = &mut v {
        obj.insert("record".into(), Value::String(tag.into()));
    }
    v
}

/// One summary line, then one line per reported item.
pub fn report_lines(report: &MergeReport) -> Vec<Value> {
    let mut out = vec![json!({
        "record": "summary",
        "clusters_formed": report.clusters_formed,
        "conflicts_resolved": report.conflicts_resolved.len(),
        "unmatched_link_hints": report.unmatched_link_hints.len(),
        "violations": report.violations.len(),
        "invalid_values": report.invalid_values.len(),
        "dropped_clusters": report.dropped_clusters.len(),
        "missing_documents": report.missing_documents.len(),
    })];
    out.extend(report.conflicts_resolved.iter().map(|c| tagged("conflict", c)));
    out.extend(report.unmatched_link_hints.iter().map(|u| tagged("unmatched_link_hint", u)));
    out.extend(report.violations.iter().map(|v| tagged("violation", v)));
    out.extend(report.invalid_values.iter().map(|v| tagged("invalid_value", v)));
    out.extend(report.dropped_clusters.iter().map(|d| tagged("dropped_cluster", d)));
    out.extend(report.missing_documents.iter().map(|m| tagged("missing_document", m)));
    out.extend(
        report
            .provenance
            .iter()
            .map(|(id, fields)| json!({"record": "provenance", "entity": id, "fields": fields})),
    );
    out
}

pub fn write_report(path: &Path, report: &MergeReport) -> std::io::Result<()> {
    let mut text = String::new();
    for line in report_lines(report) {
        text.push_str(&line.to_string());
        text.push('\n');
    }
    std::fs::write(path, text)
}
