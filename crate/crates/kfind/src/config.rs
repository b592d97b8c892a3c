//! Ingest configuration file.
//!
//! ```toml
//! priority = ["hr", "projects", "library"]
//! corpus_root = "."               # relative to this file (the default)
//!
//! [sources.hr]
//! id_column = "emp_no"            # default "id"
//! [sources.hr.columns]
//! name = "full_name"
//! unit = "@member_of"             # relation column, `;` separates targets
//! [sources.hr.kinds.unit]         # overrides for one kind
//! name = "name"
//! parent = "@parent"
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use kfind_core::ingest::{FieldMap, SourceConfig};
use kfind_core::EntityKind;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Syntax(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    priority: Vec<String>,
    #[serde(default)]
    corpus_root: Option<String>,
    #[serde(default)]
    sources: BTreeMap<String, SourceSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceSection {
    #[serde(default)]
    id_column: Option<String>,
    #[serde(default)]
    columns: BTreeMap<String, String>,
    #[serde(default)]
    kinds: BTreeMap<String, BTreeMap<String, String>>,
}

/// Parses config text. A relative `corpus_root` is resolved against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<SourceConfig, ConfigError> {
    let file: ConfigFile = toml::from_str(text)?;
    let mut field_maps = BTreeMap::new();
    for (name, section) in file.sources {
        let mut map = FieldMap {
            columns: section.columns,
            ..FieldMap::default()
        };
        if let Some(id) = section.id_column {
            map.id_column = id;
        }
        for (kind, columns) in section.kinds {
            let kind: EntityKind = kind
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("sources.{name}: unknown kind `{kind}`")))?;
            map.kind_columns.insert(kind, columns);
        }
        field_maps.insert(name, map);
    }
    let root = file.corpus_root.as_deref().unwrap_or(".");
    let corpus_root: PathBuf = base.join(root);
    let config = SourceConfig {
        priority: file.priority,
        field_maps,
        corpus_root: corpus_root.to_string_lossy().into_owned(),
    };
    config.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<SourceConfig, ConfigError> {
    let text = fs::read_to_string(path)?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let text = r#"
priority = ["hr", "library"]
corpus_root = "corpus"
[sources.hr]
id_column = "emp"
[sources.hr.columns]
name = "full_name"
[sources.hr.kinds.unit]
name = "name"
"#;
        let c = parse_config(text, Path::new("/data")).unwrap();
        assert_eq!(c.priority, ["hr", "library"]);
        assert_eq!(c.corpus_root, "/data/corpus");
        let hr = &c.field_maps["hr"];
        assert_eq!(hr.id_column, "emp");
        assert_eq!(hr.kind_columns[&EntityKind::Unit]["name"], "name");
        assert!(!c.field_maps.contains_key("library"));
    }

    #[test]
    fn rejects_bad_config() {
        let base = Path::new(".");
        assert!(matches!(parse_config("priority = [\"a\", \"a\"]", base), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config("priority = [\"a\"]\n[sources.b]", base), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config("priority = [\"a\"]\nextra = 1", base), Err(ConfigError::Syntax(_))));
        assert!(matches!(
            parse_config("priority = [\"a\"]\n[sources.a.kinds.widget]\nx = \"name\"", base),
            Err(ConfigError::Invalid(_))
        ));
    }
}
