//! Loading, validating and compiling presentation configs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::chart::shape::icon_from_path;
use crate::chart::{ingest_csv, ChartModel, DataTable, IconSet};
use crate::widget::{validate, Diagnostic, Operation, Presentation, Widget, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema version {found} is not supported (expected {SCHEMA_VERSION})")]
    SchemaVersionMismatch { found: u64 },
    #[error("validation failed: {}", first(.0))]
    ValidationFailed(Vec<Diagnostic>),
}

fn first(d: &[Diagnostic]) -> String {
    match d {
        [] => "unknown error".into(),
        [one] => one.to_string(),
        [one, rest @ ..] => format!("{one} (and {} more)", rest.len()),
    }
}

impl ProjectError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            ProjectError::ValidationFailed(d) => d.clone(),
            other => vec![Diagnostic::new("", other.to_string())],
        }
    }
}

fn invalid(reason: impl Into<String>) -> ProjectError {
    ProjectError::ValidationFailed(vec![Diagnostic::new("", reason)])
}

/// Parses a config, checking the schema version before the structure.
pub fn parse_presentation(text: &str) -> Result<Presentation, ProjectError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| invalid(format!("malformed config: {e}")))?;
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        Some(found) => return Err(ProjectError::SchemaVersionMismatch { found }),
        None => return Err(invalid("missing or non-integer `version`")),
    }
    let p: Presentation = serde_json::from_value(value).map_err(|e| invalid(format!("malformed config: {e}")))?;
    let diags = validate(&p);
    if diags.is_empty() {
        Ok(p)
    } else {
        Err(ProjectError::ValidationFailed(diags))
    }
}

pub fn load_presentation(path: &Path) -> Result<Presentation, ProjectError> {
    let text = fs::read_to_string(path).map_err(|source| ProjectError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_presentation(&text)
}

pub fn presentation_to_string(p: &Presentation) -> String {
    let mut s = serde_json::to_string_pretty(p).expect("presentations always serialize");
    s.push('\n');
    s
}

pub fn save_presentation(p: &Presentation, path: &Path) -> Result<(), ProjectError> {
    fs::write(path, presentation_to_string(p)).map_err(|source| ProjectError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A validated presentation with its tables ingested and charts built.
#[derive(Debug)]
pub struct Project {
    pub presentation: Presentation,
    pub base_dir: PathBuf,
    pub tables: BTreeMap<String, DataTable>,
    pub icons: IconSet,
    pub charts: BTreeMap<String, Arc<ChartModel>>,
    /// Annotations revealed by a gesture; hidden until triggered.
    pub gated_annotations: BTreeSet<String>,
}

impl Project {
    pub fn load(path: &Path) -> Result<Self, ProjectError> {
        let p = load_presentation(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::compile(p, &base)
    }

    pub fn compile(presentation: Presentation, base_dir: &Path) -> Result<Self, ProjectError> {
        let diags = validate(&presentation);
        if !diags.is_empty() {
            return Err(ProjectError::ValidationFailed(diags));
        }
        let mut errors = Vec::new();
        let mut tables = BTreeMap::new();
        for (name, r) in &presentation.data_tables {
            let bytes = match (&r.csv, &r.path) {
                (Some(inline), _) => inline.clone().into_bytes(),
                (None, Some(rel)) => match fs::read(base_dir.join(rel)) {
                    Ok(b) => b,
                    Err(e) => {
                        errors.push(Diagnostic::new(name, format!("cannot read `{rel}`: {e}")));
                        continue;
                    }
                },
                (None, None) => continue,
            };
            match ingest_csv(&bytes, &r.bindings) {
                Ok(t) => {
                    tables.insert(name.clone(), t);
                }
                Err(e) => errors.push(Diagnostic::new(name, e.to_string())),
            }
        }
        let mut icons = IconSet::builtin();
        for (name, rel) in &presentation.icons {
            let parsed = fs::read_to_string(base_dir.join(rel))
                .map_err(|e| e.to_string())
                .and_then(|d| icon_from_path(&d).map_err(|e| e.to_string()));
            match parsed {
                Ok(shape) => icons.insert(name, shape),
                Err(e) => errors.push(Diagnostic::new(name, format!("icon `{rel}`: {e}"))),
            }
        }
        if !errors.is_empty() {
            return Err(ProjectError::ValidationFailed(errors));
        }
        let mut charts = BTreeMap::new();
        for w in &presentation.widgets {
            if let Widget::Chart(spec) = w {
                match ChartModel::new(spec.clone(), &tables[&spec.table], &icons) {
                    Ok(m) => {
                        charts.insert(spec.id.clone(), Arc::new(m));
                    }
                    Err(d) => errors.extend(d),
                }
            }
        }
        if !errors.is_empty() {
            return Err(ProjectError::ValidationFailed(errors));
        }
        let gated_annotations = presentation
            .widgets
            .iter()
            .filter_map(|w| match w {
                Widget::Gesture(g) if g.operation == Operation::Annotation => Some(g.target_widget.clone()),
                _ => None,
            })
            .collect();
        Ok(Self {
            presentation,
            base_dir: base_dir.to_path_buf(),
            tables,
            icons,
            charts,
            gated_annotations,
        })
    }
}
