//! Seeded synthetic organisation for tests and benchmarks.
//!
//! [`synth_org`] builds the graph and its documents directly.
//! [`synth_bundle`] describes the same organisation as three overlapping
//! sources (`hr`, `projects`, `library`) with name variants, lower-priority
//! disagreements and relations spread across sources; ingesting the bundle
//! yields exactly the graph from [`synth_org`].

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use kfind_core::{
    DocType, Document, EntityId, EntityKind, EntityRecord, Facet, Graph, LinkRecord, LinkType,
    Milestone, Output, Project, ProjectStatus, Staff, Theme, Unit,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STAFF: usize = 50;
pub const PROJECTS: usize = 20;
pub const OUTPUTS: usize = 80;
pub const UNITS: usize = 8;

const GIVEN: [&str; 10] = [
    "Ada", "Alan", "Grace", "Claude", "Edsger", "Barbara", "Donald", "Frances", "Katherine", "Tony",
];
const SURNAMES: [&str; 10] = [
    "Lovelace", "Turing", "Hopper", "Shannon", "Dijkstra", "Liskov", "Knuth", "Allen", "Johnson", "Hoare",
];
const SITES: [&str; 4] = ["Fern Hill", "Edinburgh", "Harbour Point", "Westmoor"];
const UNIT_NAMES: [&str; UNITS] = [
    "Sensors Division",
    "Systems Division",
    "Radar Branch",
    "Sonar Branch",
    "Optics Branch",
    "Networks Branch",
    "Autonomy Branch",
    "Analysis Branch",
];
const UNIT_PARENT: [Option<usize>; UNITS] = [None, None, Some(0), Some(0), Some(0), Some(1), Some(1), Some(1)];

/// Theme label, facet, parent index and topic words.
type ThemeDef = (&'static str, Facet, Option<usize>, [&'static str; 4]);

const ST: Facet = Facet::ScienceTech;
const CL: Facet = Facet::Client;

const THEMES: [ThemeDef; 25] = [
    ("Sensing", ST, None, ["detection", "signal", "sensor", "measurement"]),
    ("Radar", ST, Some(0), ["doppler", "clutter", "antenna", "pulse"]),
    ("Sonar", ST, Some(0), ["acoustic", "hydrophone", "array", "echo"]),
    ("Optics", ST, Some(0), ["infrared", "lens", "imaging", "laser"]),
    ("Hyperspectral", ST, Some(3), ["spectral", "band", "reflectance", "pixel"]),
    ("Computing", ST, None, ["software", "algorithm", "processor", "compute"]),
    ("Networks", ST, Some(5), ["routing", "protocol", "bandwidth", "latency"]),
    ("Autonomy", ST, Some(5), ["planning", "robot", "navigation", "control"]),
    ("Learning", ST, Some(5), ["training", "classifier", "neural", "dataset"]),
    ("Fusion", ST, Some(8), ["tracking", "association", "bayesian", "estimate"]),
    ("Materials", ST, None, ["composite", "alloy", "coating", "fatigue"]),
    ("Armour", ST, Some(10), ["ballistic", "ceramic", "penetration", "plate"]),
    ("Energetics", ST, Some(10), ["propellant", "explosive", "combustion", "yield"]),
    ("Corrosion", ST, Some(10), ["oxidation", "salt", "inhibitor", "surface"]),
    ("Nanotech", ST, Some(13), ["nanoparticle", "graphene", "film", "lattice"]),
    ("Maritime", CL, None, ["naval", "ship", "harbour", "fleet"]),
    ("Submarines", CL, Some(15), ["submarine", "stealth", "depth", "hull"]),
    ("Surface", CL, Some(15), ["frigate", "destroyer", "deck", "mast"]),
    ("Littoral", CL, Some(15), ["coastal", "shallow", "landing", "beach"]),
    ("Mines", CL, Some(18), ["mine", "countermeasure", "sweep", "seabed"]),
    ("Land", CL, None, ["army", "vehicle", "terrain", "soldier"]),
    ("Infantry", CL, Some(20), ["patrol", "weapon", "load", "section"]),
    ("Armoured", CL, Some(20), ["tank", "turret", "track", "crew"]),
    ("Logistics", CL, Some(20), ["supply", "fuel", "transport", "depot"]),
    ("Engineers", CL, Some(23), ["bridge", "obstacle", "construction", "route"]),
];

const FILLER: [&str; 24] = [
    "the", "of", "and", "results", "study", "trial", "analysis", "performance", "system", "model",
    "report", "test", "method", "evaluation", "design", "data", "field", "review", "new", "approach",
    "baseline", "phase", "improved", "assessment",
];

const STATUSES: [ProjectStatus; 3] = [ProjectStatus::Planned, ProjectStatus::Active, ProjectStatus::Completed];

/// The organisation as a graph plus attached document text.
#[derive(Debug, Clone)]
pub struct SynthOrg {
    pub graph: Graph,
    pub documents: BTreeMap<String, String>,
}

fn id(kind: EntityKind, n: usize) -> EntityId {
    EntityId::new(kind, format!("{}{}", kind.id_prefix(), n + 1)).expect("valid id")
}

fn words(rng: &mut ChaCha8Rng, topics: &[&str], n: usize) -> String {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.4) {
                *topics.choose(rng).expect("topics")
            } else {
                *FILLER.choose(rng).expect("filler")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn capitalise(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

fn topics_of(themes: &[usize]) -> Vec<&'static str> {
    themes
        .iter()
        .flat_map(|&t| {
            let (label, _, _, words) = &THEMES[t];
            std::iter::once(*label).chain(words.iter().copied())
        })
        .collect()
}

/// Everything drawn from the generator, shared by both representations.
struct Plan {
    names: Vec<(usize, usize)>,
    sites: Vec<usize>,
    staff_units: Vec<Vec<usize>>,
    staff_themes: Vec<Vec<usize>>,
    bios: Vec<Option<String>>,
    unit_heads: Vec<Option<usize>>,
    project_titles: Vec<String>,
    project_abstracts: Vec<String>,
    project_status: Vec<ProjectStatus>,
    project_unit: Vec<usize>,
    project_team: Vec<Vec<usize>>,
    project_themes: Vec<Vec<usize>>,
    project_milestones: Vec<Vec<(String, String)>>,
    related: Vec<(usize, usize)>,
    output_titles: Vec<String>,
    output_abstracts: Vec<String>,
    output_year: Vec<i32>,
    output_type: Vec<DocType>,
    output_project: Vec<usize>,
    output_authors: Vec<Vec<usize>>,
    output_themes: Vec<usize>,
    output_docs: Vec<Vec<(String, String)>>,
    /// Emails the `projects` source disagrees on.
    stale_emails: BTreeMap<usize, String>,
}

fn plan(seed: u64) -> Plan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut combos: Vec<(usize, usize)> = (0..GIVEN.len()).flat_map(|g| (0..SURNAMES.len()).map(move |s| (g, s))).collect();
    combos.shuffle(&mut rng);
    let names: Vec<(usize, usize)> = combos[..STAFF].to_vec();
    let sites = (0..STAFF).map(|_| rng.gen_range(0..SITES.len())).collect();
    let branches: Vec<usize> = (0..UNITS).filter(|u| UNIT_PARENT[*u].is_some()).collect();
    let staff_units: Vec<Vec<usize>> = (0..STAFF)
        .map(|_| {
            let mut u = vec![*branches.choose(&mut rng).expect("branches")];
            if rng.gen_bool(0.2) {
                let other = rng.gen_range(0..UNITS);
                if !u.contains(&other) {
                    u.push(other);
                }
            }
            u.sort();
            u
        })
        .collect();
    let staff_themes: Vec<Vec<usize>> = (0..STAFF)
        .map(|_| if rng.gen_bool(0.4) { vec![rng.gen_range(0..THEMES.len())] } else { vec![] })
        .collect();
    let bios = (0..STAFF)
        .map(|i| {
            rng.gen_bool(0.6).then(|| {
                let mut topics = topics_of(&staff_themes[i]);
                topics.push("research");
                words(&mut rng, &topics, 12)
            })
        })
        .collect();
    let unit_heads = (0..UNITS).map(|_| rng.gen_bool(0.75).then(|| rng.gen_range(0..STAFF))).collect();

    let mut project_titles = Vec::new();
    let mut project_themes = Vec::new();
    for p in 0..PROJECTS {
        let mut themes = vec![rng.gen_range(0..THEMES.len())];
        if rng.gen_bool(0.5) {
            let t = rng.gen_range(0..THEMES.len());
            if t != themes[0] {
                themes.push(t);
            }
        }
        themes.sort();
        let topic = THEMES[themes[0]].3.choose(&mut rng).expect("words");
        project_titles.push(format!("{} {} Programme {}", THEMES[themes[0]].0, capitalise(topic), p + 1));
        project_themes.push(themes);
    }
    let project_abstracts = project_themes.iter().map(|t| words(&mut rng, &topics_of(t), 25)).collect();
    let project_status = (0..PROJECTS).map(|_| *STATUSES.choose(&mut rng).expect("status")).collect();
    let project_unit = (0..PROJECTS).map(|_| rng.gen_range(0..UNITS)).collect();
    let project_team: Vec<Vec<usize>> = (0..PROJECTS)
        .map(|_| {
            let mut team: Vec<usize> = (0..STAFF).collect();
            team.shuffle(&mut rng);
            team.truncate(rng.gen_range(2..=3));
            team.sort();
            team
        })
        .collect();
    let project_milestones = (0..PROJECTS)
        .map(|p| {
            (0..rng.gen_range(0..3))
                .map(|m| {
                    let date = format!("20{:02}-{:02}-{:02}", rng.gen_range(5..25), rng.gen_range(1..13), rng.gen_range(1..29));
                    (format!("Milestone {} of {}", m + 1, p + 1), date)
                })
                .collect()
        })
        .collect();
    let mut related = Vec::new();
    while related.len() < 6 {
        let (a, b) = (rng.gen_range(0..PROJECTS), rng.gen_range(0..PROJECTS));
        if a != b && !related.contains(&(a, b)) {
            related.push((a, b));
        }
    }
    related.sort();

    let doc_types = DocType::ALL;
    let mut output_titles = Vec::new();
    let mut output_abstracts = Vec::new();
    let mut output_year = Vec::new();
    let mut output_type = Vec::new();
    let mut output_project = Vec::new();
    let mut output_authors = Vec::new();
    let mut output_themes = Vec::new();
    let mut output_docs = Vec::new();
    for o in 0..OUTPUTS {
        let project = rng.gen_range(0..PROJECTS);
        let team = &project_team[project];
        let mut authors: Vec<usize> = team.clone();
        authors.shuffle(&mut rng);
        authors.truncate(if rng.gen_bool(0.3) { 2 } else { 1 });
        authors.sort();
        let theme = *project_themes[project].choose(&mut rng).expect("themes");
        let topics = topics_of(&[theme]);
        let doc_type = *doc_types.choose(&mut rng).expect("types");
        let topic = topics.choose(&mut rng).expect("topics");
        output_titles.push(format!("{} {} {}", capitalise(topic), capitalise(doc_type.as_str()), o + 1));
        output_abstracts.push(words(&mut rng, &topics, 15));
        output_year.push(rng.gen_range(1998..2025));
        output_type.push(doc_type);
        output_project.push(project);
        output_authors.push(authors);
        output_themes.push(theme);
        // About 2.5 documents per output.
        let n = if o % 2 == 0 { 2 } else { 3 };
        let docs = (0..n)
            .map(|d| {
                let len = rng.gen_range(40..120);
                (format!("docs/o{}-{}.txt", o + 1, d + 1), words(&mut rng, &topics, len))
            })
            .collect();
        output_docs.push(docs);
    }
    let mut stale_emails = BTreeMap::new();
    for s in 0..STAFF {
        if rng.gen_bool(0.2) {
            stale_emails.insert(s, format!("old.mail{}@legacy.example", s + 1));
        }
    }
    Plan {
        names,
        sites,
        staff_units,
        staff_themes,
        bios,
        unit_heads,
        project_titles,
        project_abstracts,
        project_status,
        project_unit,
        project_team,
        project_themes,
        project_milestones,
        related,
        output_titles,
        output_abstracts,
        output_year,
        output_type,
        output_project,
        output_authors,
        output_themes,
        output_docs,
        stale_emails,
    }
}

impl Plan {
    fn full_name(&self, s: usize) -> String {
        let (g, n) = self.names[s];
        format!("{} {}", GIVEN[g], SURNAMES[n])
    }

    /// "SURNAME, Given": same match key, different text.
    fn variant_name(&self, s: usize) -> String {
        let (g, n) = self.names[s];
        format!("{}, {}", SURNAMES[n].to_uppercase(), GIVEN[g])
    }

    fn email(&self, s: usize) -> String {
        let (g, n) = self.names[s];
        format!("{}.{}@example.org", GIVEN[g].to_lowercase(), SURNAMES[n].to_lowercase())
    }

    fn interests(&self, s: usize) -> Option<String> {
        let labels: Vec<&str> = self.staff_themes[s].iter().map(|t| THEMES[*t].0).collect();
        (!labels.is_empty()).then(|| labels.join(", "))
    }
}

/// Builds the synthetic organisation for `seed`.
pub fn synth_org(seed: u64) -> SynthOrg {
    let p = plan(seed);
    let mut entities = Vec::new();
    let mut links = Vec::new();
    let mut documents = BTreeMap::new();
    let link = |t, a, b| LinkRecord::new(t, a, b);
    for s in 0..STAFF {
        entities.push(EntityRecord::Staff(Staff {
            id: id(EntityKind::Staff, s),
            full_name: p.full_name(s),
            email: Some(p.email(s)),
            phone: Some(format!("+44 1632 {:06}", 100 + s)),
            site: Some(SITES[p.sites[s]].into()),
            bio: p.bios[s].clone(),
            interests: p.interests(s),
        }));
        for u in &p.staff_units[s] {
            links.push(link(LinkType::MemberOf, id(EntityKind::Staff, s), id(EntityKind::Unit, *u)));
        }
        for t in &p.staff_themes[s] {
            links.push(link(LinkType::Tagged, id(EntityKind::Staff, s), id(EntityKind::Theme, *t)));
        }
    }
    for u in 0..UNITS {
        entities.push(EntityRecord::Unit(Unit {
            id: id(EntityKind::Unit, u),
            name: UNIT_NAMES[u].into(),
            parent: UNIT_PARENT[u].map(|x| id(EntityKind::Unit, x)),
            head: p.unit_heads[u].map(|s| id(EntityKind::Staff, s)),
            admin_contacts: vec![format!("office{}@example.org", u + 1)],
        }));
    }
    for (t, (label, facet, parent, _)) in THEMES.iter().enumerate() {
        entities.push(EntityRecord::Theme(Theme {
            id: id(EntityKind::Theme, t),
            label: (*label).into(),
            facet: *facet,
            parent: parent.map(|x| id(EntityKind::Theme, x)),
        }));
    }
    for j in 0..PROJECTS {
        entities.push(EntityRecord::Project(Project {
            id: id(EntityKind::Project, j),
            title: p.project_titles[j].clone(),
            abstract_text: Some(p.project_abstracts[j].clone()),
            overview: None,
            background: None,
            milestones: p.project_milestones[j]
                .iter()
                .map(|(name, date)| Milestone { name: name.clone(), date: date.clone() })
                .collect(),
            deliverables: vec![format!("Final report {}", j + 1)],
            status: p.project_status[j],
        }));
        links.push(link(LinkType::TaskedTo, id(EntityKind::Project, j), id(EntityKind::Unit, p.project_unit[j])));
        for s in &p.project_team[j] {
            links.push(link(LinkType::ContributesTo, id(EntityKind::Staff, *s), id(EntityKind::Project, j)));
        }
        for t in &p.project_themes[j] {
            links.push(link(LinkType::Tagged, id(EntityKind::Project, j), id(EntityKind::Theme, *t)));
        }
    }
    for (a, b) in &p.related {
        links.push(link(LinkType::RelatedTo, id(EntityKind::Project, *a), id(EntityKind::Project, *b)));
    }
    for o in 0..OUTPUTS {
        entities.push(EntityRecord::Output(Output {
            id: id(EntityKind::Output, o),
            title: p.output_titles[o].clone(),
            abstract_text: Some(p.output_abstracts[o].clone()),
            venue: None,
            year: Some(p.output_year[o]),
            doc_type: p.output_type[o],
            documents: p.output_docs[o]
                .iter()
                .map(|(path, _)| Document { path: path.clone(), media_type: "text/plain".into() })
                .collect(),
        }));
        for (path, text) in &p.output_docs[o] {
            documents.insert(path.clone(), text.clone());
        }
        links.push(link(LinkType::ProducedBy, id(EntityKind::Output, o), id(EntityKind::Project, p.output_project[o])));
        links.push(link(LinkType::Tagged, id(EntityKind::Output, o), id(EntityKind::Theme, p.output_themes[o])));
        for s in &p.output_authors[o] {
            links.push(link(LinkType::Authored, id(EntityKind::Staff, *s), id(EntityKind::Output, o)));
        }
    }
    SynthOrg {
        graph: Graph::from_parts(kfind_core::SCHEMA_VERSION, entities, links),
        documents,
    }
}

/// One record file of a bundle: header row plus data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleFile {
    pub source: &'static str,
    pub kind: EntityKind,
    pub jsonl: bool,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl BundleFile {
    pub fn file_name(&self) -> String {
        format!("{}.{}", self.kind, if self.jsonl { "jsonl" } else { "csv" })
    }
}

/// A source bundle: config text, record files and documents.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub config: String,
    pub files: Vec<BundleFile>,
    pub documents: BTreeMap<String, String>,
}

pub const BUNDLE_CONFIG: &str = r#"priority = ["hr", "projects", "library"]

[sources.hr]
id_column = "emp_no"
[sources.hr.columns]
name = "full_name"
email = "email"
phone = "phone"
site = "site"
units = "@member_of"
[sources.hr.kinds.staff]
emp_no = "xref_id"
[sources.hr.kinds.unit]
code = "xref_id"
name = "name"
parent = "@parent"
head = "@head"
contacts = "admin_contacts"

[sources.projects]
id_column = "pid"
[sources.projects.columns]
pid = "xref_id"
title = "title"
summary = "abstract"
status = "status"
milestones = "milestones"
deliverables = "deliverables"
team = "@contributes_to"
unit = "@tasked_to"
themes = "@tagged"
related = "@related_to"
[sources.projects.kinds.theme]
label = "label"
facet = "facet"
parent = "@parent"
[sources.projects.kinds.staff]
name = "full_name"
email = "email"
bio = "bio"
interests = "interests"
expertise = "@tagged"

[sources.library]
id_column = "ref"
[sources.library.columns]
title = "title"
abstract = "abstract"
year = "year"
type = "doc_type"
files = "documents"
project = "@produced_by"
authors = "@authored"
theme = "@tagged"
name = "full_name"
site = "site"
"#;

fn row(cells: &[&str]) -> Vec<String> {
    cells.iter().map(|c| (*c).to_owned()).collect()
}

/// Builds the three-source bundle for `seed`.
pub fn synth_bundle(seed: u64) -> Bundle {
    let p = plan(seed);
    let emp = |s: usize| format!("E{:03}", s + 1);
    let unit_code = |u: usize| format!("U{:02}", u + 1);
    let theme_code = |t: usize| format!("T{:02}", t + 1);
    let pid = |j: usize| format!("P{:02}", j + 1);

    let hr_staff = BundleFile {
        source: "hr",
        kind: EntityKind::Staff,
        jsonl: false,
        columns: vec!["emp_no", "name", "email", "phone", "site", "units"],
        rows: (0..STAFF)
            .map(|s| {
                let units: Vec<String> = p.staff_units[s].iter().map(|u| unit_code(*u)).collect();
                row(&[
                    &emp(s),
                    &p.full_name(s),
                    &p.email(s),
                    &format!("+44 1632 {:06}", 100 + s),
                    SITES[p.sites[s]],
                    &units.join(";"),
                ])
            })
            .collect(),
    };
    let hr_units = BundleFile {
        source: "hr",
        kind: EntityKind::Unit,
        jsonl: false,
        columns: vec!["emp_no", "code", "name", "parent", "head", "contacts"],
        rows: (0..UNITS)
            .map(|u| {
                row(&[
                    &format!("UNIT{}", u + 1),
                    &unit_code(u),
                    UNIT_NAMES[u],
                    &UNIT_PARENT[u].map(unit_code).unwrap_or_default(),
                    &p.unit_heads[u].map(emp).unwrap_or_default(),
                    &format!("office{}@example.org", u + 1),
                ])
            })
            .collect(),
    };
    let projects = BundleFile {
        source: "projects",
        kind: EntityKind::Project,
        jsonl: true,
        columns: vec!["pid", "title", "summary", "status", "milestones", "deliverables", "team", "unit", "themes", "related"],
        rows: (0..PROJECTS)
            .map(|j| {
                let ms: Vec<String> = p.project_milestones[j].iter().map(|(n, d)| format!("{n}@{d}")).collect();
                let team: Vec<String> = p.project_team[j].iter().map(|s| p.variant_name(*s)).collect();
                let themes: Vec<String> = p.project_themes[j].iter().map(|t| theme_code(*t)).collect();
                let related: Vec<String> = p.related.iter().filter(|(a, _)| *a == j).map(|(_, b)| pid(*b)).collect();
                row(&[
                    &pid(j),
                    &p.project_titles[j],
                    &p.project_abstracts[j],
                    // Mixed case on purpose: canonical forms agree.
                    &if j % 3 == 0 { p.project_status[j].as_str().to_uppercase() } else { p.project_status[j].as_str().to_owned() },
                    &ms.join(";"),
                    &format!("Final report {}", j + 1),
                    &team.join(";"),
                    &unit_code(p.project_unit[j]),
                    &themes.join(";"),
                    &related.join(";"),
                ])
            })
            .collect(),
    };
    let themes = BundleFile {
        source: "projects",
        kind: EntityKind::Theme,
        jsonl: false,
        columns: vec!["pid", "label", "facet", "parent"],
        rows: THEMES
            .iter()
            .enumerate()
            .map(|(t, (label, facet, parent, _))| {
                row(&[&theme_code(t), label, facet.as_str(), &parent.map(theme_code).unwrap_or_default()])
            })
            .collect(),
    };
    let project_staff = BundleFile {
        source: "projects",
        kind: EntityKind::Staff,
        jsonl: true,
        columns: vec!["pid", "name", "email", "bio", "interests", "expertise"],
        rows: (0..STAFF)
            .map(|s| {
                let email = p.stale_emails.get(&s).cloned().unwrap_or_else(|| p.email(s));
                let expertise: Vec<String> = p.staff_themes[s].iter().map(|t| theme_code(*t)).collect();
                row(&[
                    &format!("C{:03}", s + 1),
                    &p.variant_name(s),
                    &email,
                    p.bios[s].as_deref().unwrap_or(""),
                    &p.interests(s).unwrap_or_default(),
                    &expertise.join(";"),
                ])
            })
            .collect(),
    };
    let outputs = BundleFile {
        source: "library",
        kind: EntityKind::Output,
        jsonl: false,
        columns: vec!["ref", "title", "abstract", "year", "type", "files", "project", "authors", "theme"],
        rows: (0..OUTPUTS)
            .map(|o| {
                let files: Vec<&str> = p.output_docs[o].iter().map(|(path, _)| path.as_str()).collect();
                let authors: Vec<String> = p.output_authors[o].iter().map(|s| p.variant_name(*s)).collect();
                row(&[
                    &format!("L{:03}", o + 1),
                    &p.output_titles[o],
                    &p.output_abstracts[o],
                    &p.output_year[o].to_string(),
                    p.output_type[o].as_str(),
                    &files.join(";"),
                    &p.project_titles[p.output_project[o]],
                    &authors.join(";"),
                    THEMES[p.output_themes[o]].0,
                ])
            })
            .collect(),
    };
    // Library author records: name variants, and an older site for some.
    let mut library_staff_rows = Vec::new();
    for s in 0..STAFF {
        if s % 3 == 0 {
            let site = if s % 2 == 0 { SITES[(p.sites[s] + 1) % SITES.len()] } else { SITES[p.sites[s]] };
            library_staff_rows.push(row(&[&format!("A{:03}", s + 1), &p.full_name(s).to_uppercase(), site]));
        }
    }
    let library_staff = BundleFile {
        source: "library",
        kind: EntityKind::Staff,
        jsonl: false,
        columns: vec!["ref", "name", "site"],
        rows: library_staff_rows,
    };
    let mut documents = BTreeMap::new();
    for docs in &p.output_docs {
        for (path, text) in docs {
            documents.insert(path.clone(), text.clone());
        }
    }
    Bundle {
        config: BUNDLE_CONFIG.into(),
        files: vec![hr_staff, hr_units, projects, themes, project_staff, outputs, library_staff],
        documents,
    }
}

impl Bundle {
    /// Writes `config.toml`, `<source>/<kind>.<ext>` and the documents.
    pub fn write_to(&self, root: &Path) -> std::io::Result<()> {
        fs::create_dir_all(root)?;
        fs::write(root.join("config.toml"), &self.config)?;
        for f in &self.files {
            let dir = root.join(f.source);
            fs::create_dir_all(&dir)?;
            let path = dir.join(f.file_name());
            if f.jsonl {
                let mut text = String::new();
                for r in &f.rows {
                    let obj: serde_json::Map<String, serde_json::Value> = f
                        .columns
                        .iter()
                        .zip(r)
                        .filter(|(_, v)| !v.is_empty())
                        .map(|(k, v)| ((*k).to_owned(), serde_json::Value::String(v.clone())))
                        .collect();
                    text.push_str(&serde_json::Value::Object(obj).to_string());
                    text.push('\n');
                }
                fs::write(path, text)?;
            } else {
                let mut w = csv::Writer::from_path(path)?;
                w.write_record(&f.columns)?;
                for r in &f.rows {
                    w.write_record(r)?;
                }
                w.flush()?;
            }
        }
        for (path, text) in &self.documents {
            let full = root.join(path);
            if let Some(parent) = full.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(full, text)?;
        }
        Ok(())
    }

    /// Shuffles rows within every file and the order of files.
    pub fn shuffle(&mut self, rng: &mut impl Rng) {
        for f in &mut self.files {
            f.rows.shuffle(rng);
        }
        self.files.shuffle(rng);
    }
}
