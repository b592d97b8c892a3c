use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::normalize_name;
use super::record::{LinkHint, SourceRecord};
use super::SourceConfig;
use crate::model::EntityKind;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchKey {
    pub kind: EntityKind,
    pub key: String,
}

/// The name key of a record, if its name is not empty after normalising.
pub fn match_key(record: &SourceRecord) -> Option<MatchKey> {
    let key = normalize_name(record.name()?);
    (!key.is_empty()).then_some(MatchKey { kind: record.kind, key })
}

type MemberKey<'a> = (usize, &'a str, &'a BTreeMap<String, String>, &'a [LinkHint]);

/// Sort key of a record inside a cluster: source priority, then source id,
/// then content so that identical positions never depend on input order.
pub(crate) fn member_key<'a>(config: &SourceConfig, r: &'a SourceRecord) -> MemberKey<'a> {
    (
        config.rank(&r.source).unwrap_or(usize::MAX),
        &r.source_local_id,
        &r.fields,
        &r.link_hints,
    )
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Groups records that share a kind and either an `xref_id` or a non-empty
/// name key, closed transitively.
///
/// Members are ordered by source priority then source id; clusters by kind,
/// then by their first member.
pub fn cluster_records(records: Vec<SourceRecord>, config: &SourceConfig) -> Vec<Vec<SourceRecord>> {
    let mut sets = DisjointSet((0..records.len()).collect());
    let mut by_xref: BTreeMap<(EntityKind, &str), usize> = BTreeMap::new();
    let mut by_name: BTreeMap<MatchKey, usize> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        if let Some(x) = r.xref() {
            match by_xref.get(&(r.kind, x)) {
                Some(&j) => sets.union(i, j),
                None => {
                    by_xref.insert((r.kind, x), i);
                }
            }
        }
        if let Some(k) = match_key(r) {
            match by_name.get(&k) {
                Some(&j) => sets.union(i, j),
                None => {
                    by_name.insert(k, i);
                }
            }
        }
    }
    let roots: Vec<usize> = (0..records.len()).map(|i| sets.find(i)).collect();
    let mut groups: BTreeMap<usize, Vec<SourceRecord>> = BTreeMap::new();
    for (r, root) in records.into_iter().zip(roots) {
        groups.entry(root).or_default().push(r);
    }
    let mut clusters: Vec<Vec<SourceRecord>> = groups.into_values().collect();
    for c in &mut clusters {
        c.sort_by(|a, b| member_key(config, a).cmp(&member_key(config, b)));
    }
    clusters.sort_by(|a, b| {
        (a[0].kind, member_key(config, &a[0])).cmp(&(b[0].kind, member_key(config, &b[0])))
    });
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    pub(crate) fn rec(source: &str, id: &str, kind: EntityKind, fields: &[(&str, &str)]) -> SourceRecord {
        SourceRecord {
            source: source.into(),
            source_local_id: id.into(),
            kind,
            fields: fields.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            link_hints: vec![],
        }
    }

    fn config() -> SourceConfig {
        SourceConfig {
            priority: vec!["a".into(), "b".into()],
            ..Default::default()
        }
    }

    fn sizes(c: &[Vec<SourceRecord>]) -> Vec<usize> {
        c.iter().map(Vec::len).collect()
    }

    #[test]
    fn name_variants_collide() {
        let c = cluster_records(
            vec![
                rec("b", "9", EntityKind::Staff, &[("full_name", "Ada Lovelace")]),
                rec("a", "1", EntityKind::Staff, &[("full_name", "LOVELACE, Ada")]),
            ],
            &config(),
        );
        assert_eq!(sizes(&c), vec![2]);
        assert_eq!(c[0][0].source, "a");
    }

    #[test]
    fn distinct_people_stay_apart() {
        let c = cluster_records(
            vec![
                rec("a", "1", EntityKind::Staff, &[("full_name", "alan turing")]),
                rec("a", "2", EntityKind::Staff, &[("full_name", "ada lovelace")]),
            ],
            &config(),
        );
        assert_eq!(sizes(&c), vec![1, 1]);
    }

    #[test]
    fn empty_names_never_match() {
        let c = cluster_records(
            vec![
                rec("a", "1", EntityKind::Staff, &[("full_name", " ")]),
                rec("b", "2", EntityKind::Staff, &[]),
            ],
            &config(),
        );
        assert_eq!(sizes(&c), vec![1, 1]);
    }

    #[test]
    fn xref_and_name_close_transitively() {
        // 1 ~ 2 by xref, 2 ~ 3 by name; 4 has the same name but another kind.
        let c = cluster_records(
            vec![
                rec("a", "1", EntityKind::Project, &[("title", "Alpha"), ("xref_id", "P-1")]),
                rec("b", "2", EntityKind::Project, &[("title", "Beta"), ("xref_id", "P-1")]),
                rec("b", "3", EntityKind::Project, &[("title", "beta")]),
                rec("b", "4", EntityKind::Output, &[("title", "Beta")]),
            ],
            &config(),
        );
        assert_eq!(sizes(&c), vec![1, 3]);
        assert_eq!(c[0][0].kind, EntityKind::Output);
    }
}
