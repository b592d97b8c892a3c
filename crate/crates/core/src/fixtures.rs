//! Small hand-built organisation used by tests, examples and docs.
//!
//! The demo organisation has two staff, one project, one output, two units
//! and four themes:
//!
//! ```text
//! unit:u1 "Division A"          theme:t_st "ST" (science_tech)
//!   unit:u2 "Branch B"            theme:t_sensors "Sensors"
//!                                   theme:t_radar "Radar"
//!                               theme:t_maritime "Maritime" (client)
//! ```
//!
//! `staff:s1` contributes to `project:p1` and authored `output:o1`, which was
//! produced by `project:p1`. Both are tagged with `theme:t_radar`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Graph;
use crate::model::*;

/// Parses a canonical id; panics on malformed input.
pub fn id(text: &str) -> EntityId {
    text.parse().expect("fixture id")
}

pub fn staff(local: &str, full_name: &str) -> EntityRecord {
    EntityRecord::Staff(Staff {
        id: EntityId::new(EntityKind::Staff, local).expect("fixture id"),
        full_name: full_name.into(),
        email: None,
        phone: None,
        site: None,
        bio: None,
        interests: None,
    })
}

pub fn theme(local: &str, label: &str, facet: Facet, parent: Option<&str>) -> EntityRecord {
    EntityRecord::Theme(Theme {
        id: EntityId::new(EntityKind::Theme, local).expect("fixture id"),
        label: label.into(),
        facet,
        parent: parent.map(id),
    })
}

pub fn unit(local: &str, name: &str, parent: Option<&str>) -> EntityRecord {
    EntityRecord::Unit(Unit {
        id: EntityId::new(EntityKind::Unit, local).expect("fixture id"),
        name: name.into(),
        parent: parent.map(id),
        head: None,
        admin_contacts: vec![],
    })
}

pub fn link(link_type: LinkType, from: &str, to: &str) -> LinkRecord {
    LinkRecord::new(link_type, id(from), id(to))
}

pub const DEMO_O1_DOC: &str = "docs/o1.txt";

/// Attached document text of the demo organisation, keyed by path.
pub fn demo_documents() -> BTreeMap<String, String> {
    let mut docs = BTreeMap::new();
    docs.insert(
        DEMO_O1_DOC.into(),
        "Synthetic aperture radar imaging trials were run over the range. \
         The radar returns were focused with a new autofocus method."
            .into(),
    );
    docs
}

pub fn demo_org() -> Graph {
    let mut g = Graph::new();
    let entities: Vec<EntityRecord> = vec![
        EntityRecord::Staff(Staff {
            id: id("staff:s1"),
            full_name: "Ada Lovelace".into(),
            email: Some("ada.lovelace@example.org".into()),
            phone: Some("02 6000 0001".into()),
            site: Some("Fern Hill".into()),
            bio: Some("Signal processing researcher working on radar imaging.".into()),
            interests: Some("autofocus, sparse reconstruction".into()),
        }),
        EntityRecord::Staff(Staff {
            id: id("staff:s2"),
            full_name: "Alan Turing".into(),
            email: Some("alan.turing@example.org".into()),
            phone: None,
            site: Some("Edinburgh".into()),
            bio: Some("Cryptanalysis and computing machinery.".into()),
            interests: None,
        }),
        EntityRecord::Project(Project {
            id: id("project:p1"),
            title: "Radar Signal Processing".into(),
            abstract_text: Some("Develops synthetic aperture radar processing chains.".into()),
            overview: Some("Airborne trials and ground processing.".into()),
            background: None,
            milestones: vec![Milestone {
                name: "Flight trial".into(),
                date: "2005-06-30".into(),
            }],
            deliverables: vec!["Processing chain design".into()],
            status: ProjectStatus::Active,
        }),
        EntityRecord::Output(Output {
            id: id("output:o1"),
            title: "SAR Imaging Trial Report".into(),
            abstract_text: Some("Results of the radar imaging trials.".into()),
            venue: None,
            year: Some(2005),
            doc_type: DocType::Report,
            documents: vec![Document {
                path: DEMO_O1_DOC.into(),
                media_type: "text/plain".into(),
            }],
        }),
        unit("u1", "Division A", None),
        EntityRecord::Unit(Unit {
            id: id("unit:u2"),
            name: "Branch B".into(),
            parent: Some(id("unit:u1")),
            head: Some(id("staff:s1")),
            admin_contacts: vec!["branch.b.admin@example.org".into()],
        }),
        theme("t_st", "ST", Facet::ScienceTech, None),
        theme("t_sensors", "Sensors", Facet::ScienceTech, Some("theme:t_st")),
        theme("t_radar", "Radar", Facet::ScienceTech, Some("theme:t_sensors")),
        theme("t_maritime", "Maritime", Facet::Client, None),
    ];
    for e in entities {
        g.add_entity(e).expect("fixture entity");
    }
    use LinkType::*;
    let links = [
        link(ContributesTo, "staff:s1", "project:p1"),
        link(Authored, "staff:s1", "output:o1"),
        link(ProducedBy, "output:o1", "project:p1"),
        link(MemberOf, "staff:s1", "unit:u2"),
        link(MemberOf, "staff:s2", "unit:u1"),
        link(TaskedTo, "project:p1", "unit:u2"),
        link(Tagged, "project:p1", "theme:t_radar"),
        link(Tagged, "output:o1", "theme:t_radar"),
        link(Tagged, "staff:s2", "theme:t_maritime"),
    ];
    for l in links {
        g.add_link(l).expect("fixture link");
    }
    g
}
