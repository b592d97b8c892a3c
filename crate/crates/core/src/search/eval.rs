use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Index, SearchError};
use crate::model::EntityId;
use crate::query::QueryAst;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedHit {
    pub entity: EntityId,
    pub score: f64,
}

type Scores = BTreeMap<EntityId, f64>;

/// Evaluates a query against the index.
///
/// Terms score with BM25; field and theme leaves score 1.0. AND keeps
/// entities present in every child, OR in any child, and both add up the
/// child scores an entity has. Hits are ordered by score descending, then id.
pub fn evaluate(index: &Index, ast: &QueryAst) -> Result<Vec<RankedHit>, SearchError> {
    let scores = eval_node(index, ast)?;
    let mut hits: Vec<RankedHit> = scores
        .into_iter()
        .map(|(entity, score)| RankedHit { entity, score })
        .collect();
    hits.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.entity.cmp(&b.entity))
    });
    Ok(hits)
}

fn eval_node(index: &Index, ast: &QueryAst) -> Result<Scores, SearchError> {
    Ok(match ast {
        QueryAst::Term(t) => term_scores(index, t),
        QueryAst::Phrase(tokens) => intersect(tokens.iter().map(|t| Ok(term_scores(index, t))))?,
        QueryAst::Field { name, value } => constant(index.structured_matches(*name, value).into_iter().flatten()),
        QueryAst::ThemeRef(reference) => {
            let theme = index
                .resolve_theme(reference)
                .ok_or_else(|| SearchError::UnknownTheme(String::from(reference.as_str())))?;
            constant(index.theme_members(&theme).into_iter().flatten())
        }
        QueryAst::And(children) => intersect(children.iter().map(|c| eval_node(index, c)))?,
        QueryAst::Or(children) => {
            let mut acc = Scores::new();
            for c in children {
                for (id, s) in eval_node(index, c)? {
                    *acc.entry(id).or_insert(0.0) += s;
                }
            }
            acc
        }
    })
}

fn term_scores(index: &Index, term: &str) -> Scores {
    let df = index.doc_freq(term);
    index
        .postings(term)
        .map(|(id, tf)| {
            let len = index.doc(id).map_or(0, |d| d.token_count);
            let score = index.bm25.score(tf, len, index.avg_doc_len, index.doc_count(), df);
            (id.clone(), score)
        })
        .collect()
}

fn constant<'a>(ids: impl Iterator<Item = &'a EntityId>) -> Scores {
    ids.map(|id| (id.clone(), 1.0)).collect()
}

fn intersect(children: impl Iterator<Item = Result<Scores, SearchError>>) -> Result<Scores, SearchError> {
    let mut acc: Option<Scores> = None;
    for child in children {
        let child = child?;
        acc = Some(match acc {
            None => child,
            Some(prev) => prev
                .into_iter()
                .filter_map(|(id, s)| child.get(&id).map(|c| (id, s + c)))
                .collect(),
        });
    }
    Ok(acc.unwrap_or_default())
}
