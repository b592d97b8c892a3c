//! Command-line entry point.
//!
//! Machine output is JSON Lines on stdout; `--pretty` switches to plain
//! text tables. Failures print one JSON error object on stderr and exit
//! with 1 (data error), 2 (usage error) or 3 (I/O error).

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use kfind_core::search::build_index;
use serde_json::{json, Value};

use crate::api::{self, ApiError};
use crate::artifacts::{index_cache_path, write_index_cache, ApiSnapshot, LoadError};
use crate::config::{load_config, ConfigError};
use crate::corpus::DirStore;
use crate::report::{report_lines, report_path, write_report};
use crate::service::{serve_on, AppState};
use crate::snapshot::{checksum, parse_snapshot, to_canonical_bytes, write_snapshot, SnapshotError};
use crate::sources::{discover_bundle, ingest_all, SourceError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kfind", version, about = "Knowledge and expertise finder")]
struct Cli {
    /// Human-readable output instead of JSON Lines.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct SnapshotArgs {
    /// Snapshot file.
    #[arg(long, env = "KFIND_SNAPSHOT")]
    snapshot: PathBuf,
    /// Root that document paths are relative to. Defaults to the
    /// snapshot's directory.
    #[arg(long, env = "KFIND_CORPUS")]
    corpus: Option<PathBuf>,
}

impl SnapshotArgs {
    fn corpus_root(&self) -> PathBuf {
        self.corpus.clone().unwrap_or_else(|| {
            self.snapshot.parent().map(Path::to_path_buf).unwrap_or_default()
        })
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Jsonl,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reconcile a source bundle into a snapshot and merge report.
    Ingest {
        /// Bundle root holding `<source>/<kind>.{csv,jsonl}`.
        #[arg(long)]
        sources: PathBuf,
        /// Config file. Defaults to `<sources>/config.toml`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Treat more resolved conflicts than this as a data error.
        #[arg(long)]
        max_conflicts: Option<usize>,
    },
    /// Check a snapshot's integrity.
    Validate {
        #[arg(long, env = "KFIND_SNAPSHOT")]
        snapshot: PathBuf,
    },
    /// Build the search index and cache it beside the snapshot.
    Index {
        #[command(flatten)]
        snap: SnapshotArgs,
    },
    /// Run a query and print ranked hits.
    Query {
        #[command(flatten)]
        snap: SnapshotArgs,
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 0)]
        offset: usize,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Rank staff by expertise in the given terms.
    Experts {
        #[command(flatten)]
        snap: SnapshotArgs,
        #[arg(long)]
        q: String,
        #[arg(short = 'k', long = "k", default_value_t = api::DEFAULT_EXPERTS)]
        k: usize,
    },
    /// Serve the HTTP API.
    Serve {
        #[command(flatten)]
        snap: SnapshotArgs,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
    /// Re-emit a snapshot in canonical form.
    Export {
        #[arg(long, env = "KFIND_SNAPSHOT")]
        snapshot: PathBuf,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: ExportFormat,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with its exit code and error object.
#[derive(Debug)]
struct Failure {
    exit: i32,
    code: &'static str,
    message: String,
    detail: Value,
}

impl Failure {
    fn new(exit: i32, code: &'static str, message: impl ToString) -> Self {
        Failure { exit, code, message: message.to_string(), detail: Value::Null }
    }

    fn io(e: impl ToString) -> Self {
        Failure::new(EXIT_IO, "IoError", e)
    }

    fn to_json(&self) -> Value {
        json!({ "code": self.code, "message": self.message, "detail": self.detail })
    }
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        let exit = if e.status < 500 { EXIT_USAGE } else { EXIT_DATA };
        Failure { exit, code: e.code, message: e.message, detail: e.detail }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { .. } => Failure::io(e),
            LoadError::Snapshot(SnapshotError::Io(_)) => Failure::io(e),
            LoadError::Snapshot(_) => Failure::new(EXIT_DATA, "SnapshotInvalid", e),
            LoadError::Invalid(ref v) => Failure {
                detail: json!({ "violations": v }),
                ..Failure::new(EXIT_DATA, "SnapshotInvalid", &e)
            },
        }
    }
}

impl From<SnapshotError> for Failure {
    fn from(e: SnapshotError) -> Self {
        LoadError::from(e).into()
    }
}

type Outcome = Result<i32, Failure>;

struct Out<'a> {
    w: &'a mut dyn Write,
    pretty: bool,
}

impl Out<'_> {
    fn line(&mut self, v: &Value) -> Result<(), Failure> {
        writeln!(self.w, "{v}").map_err(Failure::io)
    }

    fn text(&mut self, s: &str) -> Result<(), Failure> {
        writeln!(self.w, "{s}").map_err(Failure::io)
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let f = Failure::new(EXIT_USAGE, "Usage", e.render().to_string().trim_end());
            let _ = writeln!(stderr, "{}", f.to_json());
            return EXIT_USAGE;
        }
    };
    let mut out = Out { w: stdout, pretty: cli.pretty };
    match dispatch(cli.command, &mut out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.to_json());
            f.exit
        }
    }
}

fn dispatch(command: Command, out: &mut Out) -> Outcome {
    match command {
        Command::Ingest { sources, config, out: path, max_conflicts } => {
            ingest(&sources, config.as_deref(), &path, max_conflicts, out)
        }
        Command::Validate { snapshot } => validate(&snapshot, out),
        Command::Index { snap } => index(&snap, out),
        Command::Query { snap, q, offset, limit } => query(&snap, &q, offset, limit, out),
        Command::Experts { snap, q, k } => experts(&snap, &q, k, out),
        Command::Serve { snap, port, host } => run_server(&snap, SocketAddr::new(host, port), out),
        Command::Export { snapshot, format: ExportFormat::Jsonl, out: target } => {
            export(&snapshot, target.as_deref(), out)
        }
    }
}

fn ingest(root: &Path, config: Option<&Path>, path: &Path, max_conflicts: Option<usize>, out: &mut Out) -> Outcome {
    let config_path = config.map_or_else(|| root.join("config.toml"), Path::to_path_buf);
    let config = load_config(&config_path).map_err(|e| match e {
        ConfigError::Io(_) => Failure::io(format!("{}: {e}", config_path.display())),
        _ => Failure::new(EXIT_USAGE, "ConfigError", format!("{}: {e}", config_path.display())),
    })?;
    let files = discover_bundle(root).map_err(source_failure)?;
    let (graph, report) = ingest_all(&files, &config).map_err(source_failure)?;
    let sum = write_snapshot(path, &graph).map_err(Failure::io)?;
    let rpath = report_path(path);
    write_report(&rpath, &report).map_err(Failure::io)?;
    let summary = &report_lines(&report)[0];
    if out.pretty {
        out.text(&format!("snapshot  {}  ({} entities, {} links)", path.display(), graph.entity_count(), graph.links().len()))?;
        out.text(&format!("report    {}", rpath.display()))?;
        for key in ["clusters_formed", "conflicts_resolved", "unmatched_link_hints", "violations", "invalid_values", "dropped_clusters", "missing_documents"] {
            out.text(&format!("{key:<22}{}", summary[key]))?;
        }
    } else {
        let mut line = summary.clone();
        line["snapshot"] = json!(path);
        line["report"] = json!(rpath);
        line["checksum"] = json!(sum);
        out.line(&line)?;
    }
    if !report.violations.is_empty() {
        return Err(Failure {
            detail: json!({ "violations": report.violations }),
            ..Failure::new(EXIT_DATA, "IntegrityViolation", format!("{} violation(s)", report.violations.len()))
        });
    }
    if let Some(max) = max_conflicts {
        if report.conflicts_resolved.len() > max {
            return Err(Failure::new(
                EXIT_DATA,
                "TooManyConflicts",
                format!("{} conflicts exceed the limit of {max}", report.conflicts_resolved.len()),
            ));
        }
    }
    Ok(EXIT_OK)
}

fn source_failure(e: SourceError) -> Failure {
    use kfind_core::ingest::IngestError;
    match e {
        SourceError::Io { .. } => Failure::io(e),
        SourceError::Parse { ref path, line, .. } => Failure {
            detail: json!({ "path": path, "line": line }),
            ..Failure::new(EXIT_DATA, "ParseError", &e)
        },
        SourceError::UnknownKind { .. } => Failure::new(EXIT_DATA, "ParseError", e),
        SourceError::Ingest(IngestError::UnknownSource(_)) => Failure::new(EXIT_USAGE, "UnknownSource", e),
        SourceError::Ingest(_) => Failure::new(EXIT_USAGE, "ConfigError", e),
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn validate(path: &Path, out: &mut Out) -> Outcome {
    let graph = parse_snapshot(&read_bytes(path)?)?;
    let violations = graph.validate();
    for v in &violations {
        if out.pretty {
            out.text(&format!("{:<18} {:<40} {}", v.code.as_str(), v.subject.to_string(), v.message))?;
        } else {
            out.line(&serde_json::to_value(v).expect("serialisable"))?;
        }
    }
    if out.pretty {
        out.text(&format!("{} violation(s)", violations.len()))?;
    } else {
        out.line(&json!({ "record": "summary", "violations": violations.len() }))?;
    }
    Ok(if violations.is_empty() { EXIT_OK } else { EXIT_DATA })
}

fn index(args: &SnapshotArgs, out: &mut Out) -> Outcome {
    let bytes = read_bytes(&args.snapshot)?;
    let graph = parse_snapshot(&bytes)?;
    let violations = graph.validate();
    if !violations.is_empty() {
        return Err(LoadError::Invalid(violations).into());
    }
    let index = build_index(&graph, &DirStore::new(args.corpus_root()));
    let cache = index_cache_path(&args.snapshot);
    write_index_cache(&cache, &checksum(&bytes), &index).map_err(Failure::io)?;
    for w in index.warnings() {
        if out.pretty {
            out.text(&format!("warning: {}", serde_json::to_string(w).expect("serialisable")))?;
        } else {
            out.line(&json!({ "record": "warning", "warning": w }))?;
        }
    }
    let summary = json!({
        "record": "summary",
        "index": cache,
        "documents": index.doc_count(),
        "avg_doc_len": index.avg_doc_len(),
        "warnings": index.warnings().len(),
    });
    if out.pretty {
        out.text(&format!("indexed {} entities into {}", index.doc_count(), cache.display()))?;
    } else {
        out.line(&summary)?;
    }
    Ok(EXIT_OK)
}

fn load(args: &SnapshotArgs) -> Result<ApiSnapshot, Failure> {
    Ok(ApiSnapshot::load(&args.snapshot, &args.corpus_root())?)
}

fn query(args: &SnapshotArgs, q: &str, offset: usize, limit: Option<usize>, out: &mut Out) -> Outcome {
    let snap = load(args)?;
    let (canonical, hits) = api::run_query(&snap, q)?;
    let shown = hits.iter().skip(offset).take(limit.unwrap_or(usize::MAX));
    if out.pretty {
        out.text(&format!("query: {canonical}  ({} hits)", hits.len()))?;
        for h in shown {
            let title = snap.graph.get(&h.entity).map(|e| e.display_title()).unwrap_or_default();
            out.text(&format!("{:>10.4}  {:<16} {}", h.score, h.entity.to_string(), title))?;
        }
    } else {
        for h in shown {
            out.line(&api::hit_json(&snap.graph, h))?;
        }
    }
    Ok(EXIT_OK)
}

fn experts(args: &SnapshotArgs, q: &str, k: usize, out: &mut Out) -> Outcome {
    if k == 0 || k > api::MAX_EXPERTS {
        return Err(Failure::new(EXIT_USAGE, "BadParam", format!("k must be between 1 and {}", api::MAX_EXPERTS)));
    }
    let snap = load(args)?;
    let ranked = api::rank_experts(&snap, q, k)?;
    for (rank, e) in ranked.iter().enumerate() {
        if out.pretty {
            let terms: Vec<&str> = e["top_terms"]
                .as_array()
                .into_iter()
                .flatten()
                .filter_map(|t| t["term"].as_str())
                .collect();
            out.text(&format!(
                "{:>3}. {:>10.4}  {:<14} {:<24} {}",
                rank + 1,
                e["score"].as_f64().unwrap_or_default(),
                e["id"].as_str().unwrap_or_default(),
                e["name"].as_str().unwrap_or_default(),
                terms.join(", ")
            ))?;
        } else {
            out.line(e)?;
        }
    }
    Ok(EXIT_OK)
}

fn run_server(args: &SnapshotArgs, addr: SocketAddr, out: &mut Out) -> Outcome {
    let snap = load(args)?;
    let state = AppState::new(snap, args.corpus_root());
    let runtime = tokio::runtime::Runtime::new().map_err(Failure::io)?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(Failure::io)?;
        let bound = listener.local_addr().map_err(Failure::io)?;
        if out.pretty {
            out.text(&format!("listening on http://{bound}"))?;
        } else {
            out.line(&json!({ "record": "listening", "addr": bound.to_string() }))?;
        }
        out.w.flush().map_err(Failure::io)?;
        serve_on(state, listener).await.map_err(Failure::io)
    })?;
    Ok(EXIT_OK)
}

fn export(path: &Path, target: Option<&Path>, out: &mut Out) -> Outcome {
    let bytes = to_canonical_bytes(&parse_snapshot(&read_bytes(path)?)?);
    match target {
        Some(t) => std::fs::write(t, &bytes).map_err(|e| Failure::io(format!("{}: {e}", t.display())))?,
        None => out.w.write_all(&bytes).map_err(Failure::io)?,
    }
    Ok(EXIT_OK)
}
