use alloc::vec::Vec;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// Structured fields that can be constrained with `name:value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldName {
    Id,
    Name,
    Site,
    Status,
    Title,
    Type,
    Unit,
    Year,
}

impl FieldName {
    pub const ALL: [FieldName; 8] = [
        FieldName::Id,
        FieldName::Name,
        FieldName::Site,
        FieldName::Status,
        FieldName::Title,
        FieldName::Type,
        FieldName::Unit,
        FieldName::Year,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FieldName::Id => "id",
            FieldName::Name => "name",
            FieldName::Site => "site",
            FieldName::Status => "status",
            FieldName::Title => "title",
            FieldName::Type => "type",
            FieldName::Unit => "unit",
            FieldName::Year => "year",
        }
    }
}

impl fmt::Display for FieldName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldName {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        FieldName::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or(())
    }
}

/// Parsed query. `And`/`Or` always hold at least two children and never
/// directly contain a node of their own kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryAst {
    Term(String),
    Phrase(Vec<String>),
    Field { name: FieldName, value: String },
    ThemeRef(String),
    And(Vec<QueryAst>),
    Or(Vec<QueryAst>),
}

impl QueryAst {
    /// Joins nodes with AND, flattening nested ANDs. A single node is
    /// returned unchanged.
    pub fn and(children: impl IntoIterator<Item = QueryAst>) -> QueryAst {
        Self::combine(children, true)
    }

    pub fn or(children: impl IntoIterator<Item = QueryAst>) -> QueryAst {
        Self::combine(children, false)
    }

    fn combine(children: impl IntoIterator<Item = QueryAst>, conjunction: bool) -> QueryAst {
        let mut flat = Vec::new();
        for child in children {
            match child {
                QueryAst::And(inner) if conjunction => flat.extend(inner),
                QueryAst::Or(inner) if !conjunction => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            return flat.pop().expect("one child");
        }
        if conjunction {
            QueryAst::And(flat)
        } else {
            QueryAst::Or(flat)
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            QueryAst::And(c) | QueryAst::Or(c) => 1 + c.iter().map(QueryAst::depth).max().unwrap_or(0),
            _ => 1,
        }
    }

    /// Free-text tokens appearing in term and phrase leaves.
    pub fn terms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            QueryAst::Term(t) => out.push(t),
            QueryAst::Phrase(ts) => out.extend(ts.iter().map(String::as_str)),
            QueryAst::And(c) | QueryAst::Or(c) => c.iter().for_each(|n| n.collect_terms(out)),
            QueryAst::Field { .. } | QueryAst::ThemeRef(_) => {}
        }
    }
}
