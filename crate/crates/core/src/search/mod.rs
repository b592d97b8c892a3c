//! Inverted index over entity text and structured fields, the ranked
//! evaluator, and an index-free reference evaluator.

mod eval;
mod index;
mod oracle;

pub use eval::{evaluate, RankedHit};
pub use index::{build_index, DocUnit, Index, IndexWarning, Posting};
pub use oracle::oracle_evaluate;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::EntityId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("no theme matches `{0}`")]
    UnknownTheme(String),
}

/// Source of attached document text, addressed by corpus-relative path.
pub trait DocumentStore {
    fn read(&self, path: &str) -> Option<String>;

    fn exists(&self, path: &str) -> bool {
        self.read(path).is_some()
    }
}

impl DocumentStore for BTreeMap<String, String> {
    fn read(&self, path: &str) -> Option<String> {
        self.get(path).cloned()
    }
}

impl<T: DocumentStore + ?Sized> DocumentStore for &T {
    fn read(&self, path: &str) -> Option<String> {
        (**self).read(path)
    }

    fn exists(&self, path: &str) -> bool {
        (**self).exists(path)
    }
}

/// A store without documents; every lookup misses.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoDocuments;

impl DocumentStore for NoDocuments {
    fn read(&self, _path: &str) -> Option<String> {
        None
    }
}

/// Lower-cases and splits on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

/// Normal form of a structured field value: its tokens joined by one space.
pub fn normalize_value(text: &str) -> String {
    tokenize(text).join(" ")
}

/// BM25 parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25 {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25 {
    fn default() -> Self {
        Bm25 { k1: 1.2, b: 0.75 }
    }
}

impl Bm25 {
    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`
    pub fn idf(doc_count: usize, doc_freq: u32) -> f64 {
        let n = doc_count as f64;
        let df = f64::from(doc_freq);
        libm::log(1.0 + (n - df + 0.5) / (df + 0.5))
    }

    pub fn score(&self, tf: u32, doc_len: usize, avg_doc_len: f64, doc_count: usize, doc_freq: u32) -> f64 {
        let tf = f64::from(tf);
        let norm = if avg_doc_len > 0.0 {
            1.0 - self.b + self.b * doc_len as f64 / avg_doc_len
        } else {
            1.0
        };
        Self::idf(doc_count, doc_freq) * tf * (self.k1 + 1.0) / (tf + self.k1 * norm)
    }
}

/// Resolves a theme reference: a canonical id (`theme:t1`), a bare local
/// id (`t1`), or a `/`-separated label path that must end at the theme and
/// follow its parents upwards, compared on normalised labels
/// (`st/sensors/radar`, `sensors/radar` and `radar` all name a theme
/// labelled "Radar" under "Sensors" under "ST"). Several matches resolve to
/// the smallest id.
pub(crate) fn resolve_theme_ref<'a, I>(themes: I, reference: &str) -> Option<EntityId>
where
    I: IntoIterator<Item = (&'a EntityId, &'a str, Option<&'a EntityId>)>,
{
    let themes: BTreeMap<&EntityId, (String, Option<&EntityId>)> = themes
        .into_iter()
        .map(|(id, label, parent)| (id, (normalize_value(label), parent)))
        .collect();
    let reference = reference.trim();
    if let Ok(id) = reference.parse::<EntityId>() {
        if themes.contains_key(&id) {
            return Some(id);
        }
    }
    if let Ok(id) = EntityId::new(crate::model::EntityKind::Theme, reference) {
        if themes.contains_key(&id) {
            return Some(id);
        }
    }
    let segments: Vec<String> = reference.split('/').map(normalize_value).collect();
    if segments.iter().any(String::is_empty) {
        return None;
    }
    themes
        .keys()
        .find(|&&candidate| {
            let mut cur = Some(candidate);
            for seg in segments.iter().rev() {
                match cur.and_then(|c| themes.get(c).map(|t| (c, t))) {
                    Some((_, (label, parent))) if label == seg => cur = *parent,
                    _ => return false,
                }
            }
            true
        })
        .map(|id| (*id).clone())
}
