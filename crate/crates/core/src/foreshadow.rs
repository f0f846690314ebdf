//! Selection hit-testing, highlight dimming, point and trajectory
//! foreshadowing, and annotation reveal.
//!
//! Nothing here touches playback: foreshadowing reads future keyframe states
//! but never moves the chart.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::chart::{ease, ChartModel, ChartType, Easing, MarkState};
use crate::gesture::FramingRegion;
use crate::landmark::{Landmark, NormRect};
use crate::widget::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionSource {
    Point,
    Rect,
    Range,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub chart_id: String,
    pub keys: BTreeSet<String>,
    pub source: SelectionSource,
}

impl Selection {
    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Marks whose display-space center lies within `radius` of `tip`.
pub fn select_point(chart_id: &str, frame: &NormRect, marks: &[MarkState], tip: Landmark, radius: f64) -> Selection {
    let keys = marks
        .iter()
        .filter(|m| {
            let (x, y) = m.display_center(frame);
            (x - tip.x).hypot(y - tip.y) <= radius
        })
        .map(|m| m.key.clone())
        .collect();
    Selection {
        chart_id: chart_id.to_string(),
        keys,
        source: SelectionSource::Point,
    }
}

/// Marks whose display-space center lies inside a framing region. Intervals
/// test the x coordinate only. Edges are inclusive.
pub fn select_region(chart_id: &str, frame: &NormRect, marks: &[MarkState], region: &FramingRegion) -> Selection {
    let (source, keys) = match region {
        FramingRegion::Rect(r) => (
            SelectionSource::Rect,
            marks
                .iter()
                .filter(|m| {
                    let (x, y) = m.display_center(frame);
                    r.contains_xy(x, y)
                })
                .map(|m| m.key.clone())
                .collect(),
        ),
        FramingRegion::Interval { x0, x1 } => (
            SelectionSource::Range,
            marks
                .iter()
                .filter(|m| {
                    let x = m.display_center(frame).0;
                    x0.min(*x1) <= x && x <= x0.max(*x1)
                })
                .map(|m| m.key.clone())
                .collect(),
        ),
    };
    Selection {
        chart_id: chart_id.to_string(),
        keys,
        source,
    }
}

/// Brightens selected marks and dims the rest. An empty selection leaves
/// every mark untouched.
pub fn apply_highlight(mut marks: Vec<MarkState>, selection: &Selection, dim_opacity: f64) -> Vec<MarkState> {
    if selection.is_empty() {
        return marks;
    }
    for m in &mut marks {
        m.opacity = if selection.keys.contains(&m.key) {
            1.0
        } else {
            dim_opacity
        };
    }
    marks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ForeshadowMode {
    Point,
    #[default]
    Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForeshadowSpec {
    #[serde(default)]
    pub mode: ForeshadowMode,
    /// Keyframes to look ahead; absent means through the final keyframe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default = "default_pulse")]
    pub pulse_period_ms: i64,
    #[serde(default = "default_fade")]
    pub fade_out_ms: i64,
}

fn default_pulse() -> i64 {
    1000
}
fn default_fade() -> i64 {
    500
}

impl Default for ForeshadowSpec {
    fn default() -> Self {
        Self {
            mode: ForeshadowMode::default(),
            horizon: None,
            pulse_period_ms: default_pulse(),
            fade_out_ms: default_fade(),
        }
    }
}

impl ForeshadowSpec {
    /// Future keyframe range `(from, to)` for playback position `p`, or
    /// `None` when `p` is already at the final keyframe.
    pub fn span(&self, model: &ChartModel, p: f64) -> Option<(usize, usize)> {
        let last = model.keyframe_count() - 1;
        let from = (p.max(0.0).floor() as usize).min(last);
        let horizon = self.horizon.unwrap_or(last).max(1);
        let to = from.saturating_add(horizon).min(last);
        (to > from).then_some((from, to))
    }
}

/// Opacity of a pulsing ghost `t_ms` after foreshadowing began.
pub fn pulse_opacity(t_ms: f64, period_ms: f64) -> f64 {
    0.3 + 0.4 * (0.5 + 0.5 * (TAU * t_ms / period_ms).sin())
}

/// Linear fade from 1 to 0 over `fade_out_ms` after release.
pub fn fade_envelope(ms_since_release: i64, fade_out_ms: i64) -> f64 {
    if fade_out_ms <= 0 {
        return if ms_since_release < 0 { 1.0 } else { 0.0 };
    }
    (1.0 - ms_since_release as f64 / fade_out_ms as f64).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ghost {
    /// The mark's state at the future keyframe, with pulsing opacity.
    pub mark: MarkState,
    /// Bar races draw the ghost as an outline at the future slot.
    pub outline: bool,
}

pub fn foreshadow_point(
    model: &ChartModel,
    spec: &ForeshadowSpec,
    p: f64,
    selection: &Selection,
    elapsed_ms: i64,
) -> Vec<Ghost> {
    let Some((_, to)) = spec.span(model, p) else {
        return Vec::new();
    };
    let opacity = pulse_opacity(elapsed_ms as f64, spec.pulse_period_ms as f64);
    selection
        .keys
        .iter()
        .filter_map(|key| model.keyframe_mark(to, key))
        .map(|m| Ghost {
            mark: MarkState { opacity, ..m.clone() },
            outline: model.chart_type() == ChartType::BarChartRace,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub key: String,
    /// Scatter: mark centers normalized within the chart frame.
    /// Bar race: `(step, slot)` pairs for the bump chart.
    pub points: Vec<[f64; 2]>,
    /// Bar race only: rank slot at each step.
    pub slots: Vec<u32>,
    pub color: String,
}

pub fn foreshadow_trajectory(model: &ChartModel, spec: &ForeshadowSpec, p: f64, selection: &Selection) -> Vec<Trajectory> {
    let Some((from, to)) = spec.span(model, p) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for key in &selection.keys {
        let mut t = Trajectory {
            key: key.clone(),
            points: Vec::new(),
            slots: Vec::new(),
            color: String::new(),
        };
        for (step, k) in (from..=to).enumerate() {
            match model.chart_type() {
                ChartType::Scatterplot => {
                    if let Some(m) = model.keyframe_mark(k, key) {
                        t.color = m.color.clone();
                        t.points.push([m.x, m.y]);
                    }
                }
                ChartType::BarChartRace => {
                    if let Some(rank) = model.rank_at_keyframe(k, key) {
                        if let Some(m) = model.keyframe_mark(k, key) {
                            t.color = m.color.clone();
                        }
                        t.points.push([step as f64, rank as f64]);
                        t.slots.push(rank);
                    }
                }
            }
        }
        if t.points.len() >= 2 {
            out.push(t);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnnotationKind {
    Text,
    Circle,
    Rect,
    Arrow,
    Line,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationWidget {
    pub id: String,
    pub kind: AnnotationKind,
    /// Bounding box for text, circles and rectangles. Arrows and lines run
    /// from the top-left corner to the bottom-right corner unless
    /// `endpoints` is given.
    pub geometry: NormRect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoints: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    pub text: String,
    #[serde(default = "default_annotation_color")]
    pub color: String,
    #[serde(default = "default_one")]
    pub base_opacity: f64,
    #[serde(default = "default_reveal")]
    pub reveal_duration_ms: i64,
    #[serde(default = "default_reveal_easing")]
    pub reveal_easing: Easing,
    #[serde(default = "default_font")]
    pub font_size: f64,
}

fn default_annotation_color() -> String {
    "#ffffff".into()
}
fn default_one() -> f64 {
    1.0
}
fn default_reveal() -> i64 {
    1000
}
fn default_reveal_easing() -> Easing {
    Easing::Linear
}
fn default_font() -> f64 {
    0.04
}

impl AnnotationWidget {
    pub fn text(id: &str, geometry: NormRect, text: &str) -> Self {
        Self {
            id: id.into(),
            kind: AnnotationKind::Text,
            geometry,
            endpoints: None,
            text: text.into(),
            color: default_annotation_color(),
            base_opacity: 1.0,
            reveal_duration_ms: default_reveal(),
            reveal_easing: default_reveal_easing(),
            font_size: default_font(),
        }
    }

    pub fn line_endpoints(&self) -> [[f64; 2]; 2] {
        self.endpoints.unwrap_or([
            [self.geometry.x, self.geometry.y],
            [self.geometry.x + self.geometry.w, self.geometry.y + self.geometry.h],
        ])
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if !(0.0..=1.0).contains(&self.base_opacity) {
            out.push(Diagnostic::new(&self.id, "base_opacity outside [0,1]"));
        }
        if self.reveal_duration_ms < 0 {
            out.push(Diagnostic::new(&self.id, "reveal_duration_ms must be >= 0"));
        }
        if self.geometry.w < 0.0 || self.geometry.h < 0.0 {
            out.push(Diagnostic::new(&self.id, "geometry has negative extent"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnotationReveal {
    pub opacity: f64,
    pub scale: f64,
}

pub fn annotation_state(w: &AnnotationWidget, ms_since_trigger: i64) -> AnnotationReveal {
    let u = if w.reveal_duration_ms <= 0 {
        1.0
    } else {
        (ms_since_trigger as f64 / w.reveal_duration_ms as f64).clamp(0.0, 1.0)
    };
    let e = ease(w.reveal_easing, u);
    AnnotationReveal {
        opacity: w.base_opacity * e,
        scale: 0.9 + 0.1 * e,
    }
}
