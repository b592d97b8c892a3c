//! Staff expertise profiles derived from the work linked to each person.
//!
//! A staff member's term weights add up, over every project they contribute
//! to and every output they authored, the term frequency in that entity's
//! indexed text times the corpus-wide inverse document frequency. Their own
//! bio and interests count as one more document. Theme scores count linked
//! entities tagged with the theme or any theme below it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::model::{EntityId, EntityKind, EntityRecord, LinkType};
use crate::search::{tokenize, Bm25, Index};
use crate::view::Direction;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpertiseError {
    #[error("no query terms")]
    EmptyQuery,
    #[error("k must be at least 1")]
    ZeroK,
}

/// How one occurrence count turns into a weight.
pub trait TermWeighting {
    fn weight(&self, tf: u32, doc_freq: u32, doc_count: usize) -> f64;
}

/// `tf * ln(1 + (N - df + 0.5) / (df + 0.5))`, the idf the search index uses.
#[derive(Debug, Clone, Copy, Default)]
pub struct TfIdf;

impl TermWeighting for TfIdf {
    fn weight(&self, tf: u32, doc_freq: u32, doc_count: usize) -> f64 {
        f64::from(tf) * Bm25::idf(doc_count, doc_freq)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertiseProfile {
    pub staff: EntityId,
    pub term_weights: BTreeMap<String, f64>,
    pub theme_scores: BTreeMap<EntityId, f64>,
}

impl ExpertiseProfile {
    /// The `k` heaviest terms, ties broken by term.
    pub fn top_terms(&self, k: usize) -> Vec<(String, f64)> {
        let mut terms: Vec<(String, f64)> = self.term_weights.iter().map(|(t, w)| (t.clone(), *w)).collect();
        terms.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
        terms.truncate(k);
        terms
    }
}

/// Same as [`ExpertiseProfile::top_terms`].
pub fn profile_summary(profile: &ExpertiseProfile, k: usize) -> Vec<(String, f64)> {
    profile.top_terms(k)
}

/// Projects and outputs credited to a staff member.
pub fn linked_work<'a>(graph: &'a Graph, staff: &'a EntityId) -> impl Iterator<Item = &'a EntityId> + 'a {
    graph
        .neighbor_iter(staff, LinkType::ContributesTo, Direction::Outgoing)
        .chain(graph.neighbor_iter(staff, LinkType::Authored, Direction::Outgoing))
}

pub fn build_profiles(graph: &Graph, index: &Index) -> BTreeMap<EntityId, ExpertiseProfile> {
    build_profiles_with(graph, index, &TfIdf)
}

pub fn build_profiles_with(
    graph: &Graph,
    index: &Index,
    weighting: &dyn TermWeighting,
) -> BTreeMap<EntityId, ExpertiseProfile> {
    let n = index.doc_count();
    let add = |weights: &mut BTreeMap<String, f64>, term: &str, tf: u32| {
        let w = weighting.weight(tf, index.doc_freq(term), n);
        if w > 0.0 {
            *weights.entry(term.into()).or_insert(0.0) += w;
        }
    };

    // Themes each entity counts towards: its tags and their ancestors.
    let mut tag_closure: BTreeMap<&EntityId, BTreeSet<&EntityId>> = BTreeMap::new();
    for l in graph.links().iter().filter(|l| l.link_type == LinkType::Tagged) {
        let set = tag_closure.entry(&l.from).or_default();
        let mut cur = Some(&l.to);
        while let Some(t) = cur {
            if !set.insert(t) {
                break;
            }
            cur = graph.get(t).and_then(EntityRecord::parent);
        }
    }

    let mut profiles = BTreeMap::new();
    for s in graph.entities_of(EntityKind::Staff) {
        let mut profile = ExpertiseProfile {
            staff: s.id().clone(),
            term_weights: BTreeMap::new(),
            theme_scores: BTreeMap::new(),
        };
        for work in linked_work(graph, s.id()) {
            if let Some(doc) = index.doc(work) {
                for (term, &tf) in &doc.term_freqs {
                    add(&mut profile.term_weights, term, tf);
                }
            }
            for theme in tag_closure.get(work).into_iter().flatten() {
                *profile.theme_scores.entry((*theme).clone()).or_insert(0.0) += 1.0;
            }
        }
        if let EntityRecord::Staff(staff) = s {
            let mut own: BTreeMap<String, u32> = BTreeMap::new();
            for text in [&staff.bio, &staff.interests].into_iter().flatten() {
                for tok in tokenize(text) {
                    *own.entry(tok).or_insert(0) += 1;
                }
            }
            for (term, tf) in own {
                add(&mut profile.term_weights, &term, tf);
            }
        }
        profiles.insert(s.id().clone(), profile);
    }
    profiles
}

/// Staff ranked by the summed weight of the query terms.
pub fn find_experts(
    profiles: &BTreeMap<EntityId, ExpertiseProfile>,
    query_terms: &[String],
    k: usize,
) -> Result<Vec<(EntityId, f64)>, ExpertiseError> {
    if query_terms.is_empty() {
        return Err(ExpertiseError::EmptyQuery);
    }
    if k == 0 {
        return Err(ExpertiseError::ZeroK);
    }
    let mut ranked: Vec<(EntityId, f64)> = profiles
        .values()
        .filter_map(|p| {
            let score: f64 = query_terms.iter().filter_map(|t| p.term_weights.get(t)).sum();
            (score > 0.0).then(|| (p.staff.clone(), score))
        })
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    Ok(ranked)
}
