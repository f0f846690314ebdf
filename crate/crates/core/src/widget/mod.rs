//! Presentation data model, widget bindings and config validation.

pub mod activation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use activation::{
    step_activation, ActivationEvent, ActivationState, ActivationStep, EventKind, Feedback,
    GestureAnchor, Phase, DROPOUT_GRACE_MS,
};

use crate::chart::{ChartSpec, TableBindings};
use crate::foreshadow::{AnnotationWidget, ForeshadowSpec};
use crate::landmark::NormRect;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Presentation {
    pub version: u32,
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub data_tables: BTreeMap<String, DataTableRef>,
    pub widgets: Vec<Widget>,
    /// Extra icon outlines by name, as paths to path-data files.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub icons: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: String,
    pub name: String,
    /// Layer order: later entries draw on top.
    pub widgets: Vec<String>,
}

/// Where a table's CSV lives: a path relative to the config file, or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTableRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(flatten)]
    pub bindings: TableBindings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Widget {
    Chart(ChartSpec),
    Annotation(AnnotationWidget),
    Gesture(GestureWidget),
}

impl Widget {
    pub fn id(&self) -> &str {
        match self {
            Widget::Chart(c) => &c.id,
            Widget::Annotation(a) => &a.id,
            Widget::Gesture(g) => &g.id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GestureKind {
    OpenHand,
    Pointing,
    RectangularFraming,
    RangeFraming,
    Dialling,
}

impl GestureKind {
    pub const ALL: [GestureKind; 5] = [
        GestureKind::OpenHand,
        GestureKind::Pointing,
        GestureKind::RectangularFraming,
        GestureKind::RangeFraming,
        GestureKind::Dialling,
    ];

    pub fn is_bimanual(self) -> bool {
        matches!(self, GestureKind::RectangularFraming | GestureKind::RangeFraming)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum HandPreference {
    Left,
    Right,
    #[default]
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operation {
    Selection,
    Foreshadowing,
    Playback,
    Annotation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationParams {
    /// Hit radius for point selection, in display units.
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_dim")]
    pub dim_opacity: f64,
    #[serde(default)]
    pub foreshadow: ForeshadowSpec,
    /// Keyframes advanced by a one-shot playback trigger.
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_radius() -> f64 {
    0.05
}
fn default_dim() -> f64 {
    0.25
}
fn default_step() -> f64 {
    1.0
}

impl Default for OperationParams {
    fn default() -> Self {
        Self {
            radius: default_radius(),
            dim_opacity: default_dim(),
            foreshadow: ForeshadowSpec::default(),
            step: default_step(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GestureWidget {
    pub id: String,
    pub region: NormRect,
    pub gesture: GestureKind,
    #[serde(default = "default_recognition")]
    pub recognition_duration_ms: i64,
    #[serde(default = "default_redetection")]
    pub redetection_interval_ms: i64,
    #[serde(default)]
    pub hand: HandPreference,
    pub operation: Operation,
    pub target_widget: String,
    #[serde(default)]
    pub operation_params: OperationParams,
    /// Shown on the presenter's bounding box; defaults to the id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn default_recognition() -> i64 {
    500
}
fn default_redetection() -> i64 {
    1000
}

impl GestureWidget {
    pub fn new(id: &str, region: NormRect, gesture: GestureKind, operation: Operation, target: &str) -> Self {
        Self {
            id: id.into(),
            region,
            gesture,
            recognition_duration_ms: default_recognition(),
            redetection_interval_ms: default_redetection(),
            hand: HandPreference::Either,
            operation,
            target_widget: target.into(),
            operation_params: OperationParams::default(),
            label: None,
        }
    }

    /// Streams updates while held rather than firing once.
    pub fn is_continuous(&self) -> bool {
        self.gesture == GestureKind::Dialling
            || (self.operation == Operation::Foreshadowing && self.gesture.is_bimanual())
    }

    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub widget_id: String,
    pub reason: String,
}

impl Diagnostic {
    pub fn new(widget_id: &str, reason: impl Into<String>) -> Self {
        Self {
            widget_id: widget_id.to_string(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.widget_id.is_empty() {
            write!(f, "{}", self.reason)
        } else {
            write!(f, "{}: {}", self.widget_id, self.reason)
        }
    }
}

impl Presentation {
    pub fn widget(&self, id: &str) -> Option<&Widget> {
        self.widgets.iter().find(|w| w.id() == id)
    }

    pub fn segment(&self, id: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.id == id)
    }
}

fn unit_rect(r: &NormRect) -> bool {
    r.w >= 0.0 && r.h >= 0.0 && r.x >= 0.0 && r.y >= 0.0 && r.x + r.w <= 1.0 + 1e-9 && r.y + r.h <= 1.0 + 1e-9
}

/// Structural checks that need no table data. Empty iff the presentation is
/// well formed.
pub fn validate(p: &Presentation) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if p.version != SCHEMA_VERSION {
        out.push(Diagnostic::new("", format!("unsupported version {}", p.version)));
    }
    if p.segments.is_empty() {
        out.push(Diagnostic::new("", "presentation needs at least one segment"));
    }
    let mut ids = BTreeSet::new();
    for w in &p.widgets {
        if !ids.insert(w.id()) {
            out.push(Diagnostic::new(w.id(), "duplicate widget id"));
        }
    }
    let mut seg_ids = BTreeSet::new();
    for s in &p.segments {
        if !seg_ids.insert(s.id.as_str()) {
            out.push(Diagnostic::new(&s.id, "duplicate segment id"));
        }
        let mut seen = BTreeSet::new();
        for w in &s.widgets {
            if !seen.insert(w.as_str()) {
                out.push(Diagnostic::new(w, format!("listed twice in segment `{}`", s.id)));
            }
            if !ids.contains(w.as_str()) {
                out.push(Diagnostic::new(w, format!("segment `{}` references unknown widget", s.id)));
            }
        }
    }
    for (name, t) in &p.data_tables {
        if t.path.is_none() == t.csv.is_none() {
            out.push(Diagnostic::new(name, "data table needs exactly one of `path` or `csv`"));
        }
    }
    for w in &p.widgets {
        match w {
            Widget::Chart(c) => {
                if !p.data_tables.contains_key(&c.table) {
                    out.push(Diagnostic::new(&c.id, format!("unknown data table `{}`", c.table)));
                }
                if !unit_rect(&c.frame) {
                    out.push(Diagnostic::new(&c.id, "frame outside the unit square"));
                }
            }
            Widget::Annotation(a) => out.extend(a.diagnostics()),
            Widget::Gesture(g) => validate_gesture(p, g, &mut out),
        }
    }
    out
}

fn validate_gesture(p: &Presentation, g: &GestureWidget, out: &mut Vec<Diagnostic>) {
    let diag = |reason: &str| Diagnostic::new(&g.id, reason);
    if g.recognition_duration_ms <= 0 {
        out.push(diag("recognition_duration_ms must be > 0"));
    }
    if g.redetection_interval_ms < 0 {
        out.push(diag("redetection_interval_ms must be >= 0"));
    }
    if !unit_rect(&g.region) {
        out.push(diag("region outside the unit square"));
    }
    if g.gesture == GestureKind::Dialling && g.operation != Operation::Playback {
        out.push(diag("dialling requires the playback operation"));
    }
    let params = &g.operation_params;
    if !(params.radius >= 0.0) || !(0.0..=1.0).contains(&params.dim_opacity) {
        out.push(diag("selection parameters out of range"));
    }
    if params.foreshadow.horizon == Some(0) || params.foreshadow.pulse_period_ms <= 0 || params.foreshadow.fade_out_ms < 0 {
        out.push(diag("foreshadow parameters out of range"));
    }
    match p.widget(&g.target_widget) {
        None => out.push(diag("unresolved target")),
        Some(target) => {
            let ok = match g.operation {
                Operation::Annotation => matches!(target, Widget::Annotation(_)),
                Operation::Selection | Operation::Foreshadowing | Operation::Playback => {
                    matches!(target, Widget::Chart(_))
                }
            };
            if !ok {
                out.push(diag("operation/target mismatch"));
            }
        }
    }
}
