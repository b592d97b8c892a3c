//! Core of the kfind knowledge and expertise finder.
//!
//! Everything here is pure computation over in-memory values: the typed
//! entity graph, source reconciliation, the query language, the inverted
//! index and its evaluator, theme rollups and expertise profiles. File
//! formats, the HTTP service and the command line live in the `kfind` crate.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod browse;
pub mod expertise;
pub mod fixtures;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod query;
pub mod search;
pub mod themes;
pub mod view;

pub use graph::{Graph, GraphError, Violation, ViolationCode, ViolationSubject};
pub use model::{
    Document, DocType, EntityId, EntityKind, EntityRecord, Facet, LinkRecord, LinkType,
    Milestone, ModelError, Output, Project, ProjectStatus, Staff, Theme, Unit,
};
pub use view::{entity_view, Direction, EntityView, Panel, Summary};

/// Current version of the graph schema written into snapshot headers.
pub const SCHEMA_VERSION: u32 = 1;
