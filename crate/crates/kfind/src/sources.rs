//! Source wrappers: per-source record files read into [`SourceRecord`]s.
//!
//! A bundle is laid out as `<root>/<source>/<kind>.csv` or
//! `<root>/<source>/<kind>.jsonl`, with attached documents as plain text
//! somewhere under the corpus root.

use std::fs;
use std::path::{Path, PathBuf};

use kfind_core::ingest::{assemble, IngestError, MergeReport, SourceConfig, SourceRecord};
use kfind_core::{EntityKind, Graph};
use serde_json::Value;

use crate::corpus::DirStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn from_extension(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()? {
            "csv" => Some(Format::Csv),
            "jsonl" => Some(Format::Jsonl),
            _ => None,
        }
    }
}

/// One record file of one source.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceFile {
    pub source: String,
    pub kind: EntityKind,
    pub path: PathBuf,
    pub format: Format,
}

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: line {line}: {reason}", path.display())]
    Parse { path: PathBuf, line: usize, reason: String },
    #[error("{}: file name is not an entity kind", path.display())]
    UnknownKind { path: PathBuf },
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

/// Reads every row of `file` in order.
pub fn read_source(file: &SourceFile, config: &SourceConfig) -> Result<Vec<SourceRecord>, SourceError> {
    let parse = |line: usize, reason: String| SourceError::Parse { path: file.path.clone(), line, reason };
    let map = |row: &[(String, String)], line: usize| {
        config.map_row(&file.source, file.kind, row, line).map_err(|e| match e {
            IngestError::Parse { line, reason } => parse(line, reason),
            other => SourceError::Ingest(other),
        })
    };
    let io = |source| SourceError::Io { path: file.path.clone(), source };
    let mut out = Vec::new();
    match file.format {
        Format::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(true)
                .from_path(&file.path)
                .map_err(|e| parse(1, e.to_string()))?;
            let headers: Vec<String> = reader
                .headers()
                .map_err(|e| parse(1, e.to_string()))?
                .iter()
                .map(str::to_owned)
                .collect();
            for row in reader.records() {
                let row = row.map_err(|e| {
                    let line = e.position().map_or(0, |p| p.line() as usize);
                    parse(line, e.to_string())
                })?;
                let line = row.position().map_or(0, |p| p.line() as usize);
                let pairs: Vec<(String, String)> =
                    headers.iter().cloned().zip(row.iter().map(str::to_owned)).collect();
                out.push(map(&pairs, line)?);
            }
        }
        Format::Jsonl => {
            let text = fs::read_to_string(&file.path).map_err(io)?;
            for (i, raw) in text.lines().enumerate() {
                let line = i + 1;
                if raw.trim().is_empty() {
                    continue;
                }
                let Value::Object(obj) = serde_json::from_str(raw).map_err(|e| parse(line, e.to_string()))? else {
                    return Err(parse(line, "expected a JSON object".into()));
                };
                let mut pairs = Vec::with_capacity(obj.len());
                for (k, v) in obj {
                    if let Some(v) = cell_text(&v).map_err(|r| parse(line, format!("field `{k}`: {r}")))? {
                        pairs.push((k, v));
                    }
                }
                out.push(map(&pairs, line)?);
            }
        }
    }
    Ok(out)
}

/// Scalars become text; arrays of scalars become a `;`-separated list.
fn cell_text(v: &Value) -> Result<Option<String>, &'static str> {
    Ok(match v {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
        Value::Array(items) => {
            let mut parts = Vec::new();
            for item in items {
                match item {
                    Value::Array(_) | Value::Object(_) => return Err("nested value"),
                    other => parts.extend(cell_text(other)?),
                }
            }
            Some(parts.join(";"))
        }
        Value::Object(_) => return Err("nested object"),
    })
}

/// Lists the record files of a bundle, sorted. Directories that contain no
/// record files (such as the document corpus) are skipped.
pub fn discover_bundle(root: &Path) -> Result<Vec<SourceFile>, SourceError> {
    fn io(path: &Path) -> impl Fn(std::io::Error) -> SourceError + '_ {
        move |source| SourceError::Io { path: path.to_path_buf(), source }
    }
    let mut files = Vec::new();
    for dir in fs::read_dir(root).map_err(io(root))? {
        let dir = dir.map_err(io(root))?.path();
        if !dir.is_dir() {
            continue;
        }
        let Some(source) = dir.file_name().and_then(|n| n.to_str()).map(str::to_owned) else {
            continue;
        };
        for entry in fs::read_dir(&dir).map_err(io(&dir))? {
            let path = entry.map_err(io(&dir))?.path();
            let Some(format) = Format::from_extension(&path) else { continue };
            let kind = path
                .file_stem()
                .and_then(|s| s.to_str())
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| SourceError::UnknownKind { path: path.clone() })?;
            files.push(SourceFile { source: source.clone(), kind, path, format });
        }
    }
    files.sort();
    Ok(files)
}

/// Reads every file, then clusters, merges and links the records. Documents
/// are looked up under the configured corpus root.
pub fn ingest_all(files: &[SourceFile], config: &SourceConfig) -> Result<(Graph, MergeReport), SourceError> {
    config.validate()?;
    let mut records = Vec::new();
    for f in files {
        if config.rank(&f.source).is_none() {
            return Err(IngestError::UnknownSource(f.source.clone()).into());
        }
        records.extend(read_source(f, config)?);
    }
    let store = DirStore::new(&config.corpus_root);
    Ok(assemble(records, config, &store)?)
}
