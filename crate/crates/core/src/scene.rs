//! Render-agnostic scene graph: per-view node lists and their canonical
//! text encoding.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::Value;

use crate::chart::scale::tick_label;
use crate::chart::{lerp, slot_center, slot_height, ChartModel, ChartType, MarkState, Polyline64};
use crate::foreshadow::{AnnotationKind, AnnotationReveal, AnnotationWidget, Ghost, Trajectory};
use crate::landmark::NormRect;
use crate::widget::{Feedback, GestureWidget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum View {
    Presenter,
    Audience,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextAnchor {
    Start,
    Middle,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisOrientation {
    X,
    Y,
}

/// A mark outline: the chart's base shape by name, or explicit points
/// while morphing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MarkShape {
    Named(String),
    Points(Polyline64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeGeometry {
    Rect(NormRect),
    Segment([[f64; 2]; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeStyle {
    pub stroke: String,
    pub width: f64,
    pub opacity: f64,
    /// Reveal scale about the geometry center.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum NodeKind {
    Mark {
        key: String,
        shape64: MarkShape,
        fill: String,
        opacity: f64,
        /// Display-space center.
        position: [f64; 2],
        /// Display-space width and height.
        size: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        outline: bool,
    },
    Path {
        key: String,
        points: Vec<[f64; 2]>,
        stroke: String,
        dash: bool,
        opacity: f64,
        width: f64,
    },
    Text {
        content: String,
        position: [f64; 2],
        anchor: TextAnchor,
        size: f64,
        color: String,
        opacity: f64,
    },
    Shape {
        kind: AnnotationKind,
        geometry: ShapeGeometry,
        style: ShapeStyle,
    },
    Axis {
        orientation: AxisOrientation,
        line: [[f64; 2]; 2],
        ticks: Vec<[f64; 2]>,
        labels: Vec<String>,
        color: String,
    },
    FeedbackBox {
        widget: String,
        rect: NormRect,
        label: String,
        color: String,
        matched: bool,
    },
    ProgressBubble {
        widget: String,
        center: [f64; 2],
        radius: f64,
        progress: f64,
        color: String,
    },
}

impl NodeKind {
    pub fn is_presenter_only(&self) -> bool {
        matches!(self, NodeKind::FeedbackBox { .. } | NodeKind::ProgressBubble { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneNode {
    pub z: i64,
    #[serde(flatten)]
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFrame {
    pub t_ms: i64,
    pub view: View,
    pub nodes: Vec<SceneNode>,
}

/// Style constants shared by every frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theme {
    pub feedback_box: String,
    pub progress_bubble: String,
    pub bubble_r0: f64,
    pub bubble_r1: f64,
    pub axis: String,
    pub text: String,
    pub label_size: f64,
    pub trajectory_width: f64,
    pub tick_count: usize,
}

impl Default for Theme {
    fn default() -> Self {
        Self {
            feedback_box: "#2f6bff".into(),
            progress_bubble: "#2ecc40".into(),
            bubble_r0: 0.01,
            bubble_r1: 0.04,
            axis: "#c8c8c8".into(),
            text: "#ffffff".into(),
            label_size: 0.022,
            trajectory_width: 0.004,
            tick_count: 5,
        }
    }
}

pub struct ChartLayer<'a> {
    pub model: &'a ChartModel,
    pub position: f64,
    /// Current marks with any highlight already applied.
    pub marks: Vec<MarkState>,
    pub ghosts: Vec<Ghost>,
    /// Trajectories with their current opacity.
    pub trajectories: Vec<(Trajectory, f64)>,
}

pub struct AnnotationLayer<'a> {
    pub widget: &'a AnnotationWidget,
    pub reveal: AnnotationReveal,
}

pub struct GestureLayer<'a> {
    pub widget: &'a GestureWidget,
    pub feedback: Feedback,
}

pub enum Layer<'a> {
    Chart(ChartLayer<'a>),
    /// `None` while a gated annotation is still hidden.
    Annotation(Option<AnnotationLayer<'a>>),
    Gesture(GestureLayer<'a>),
}

/// One tick's worth of layer state, in segment widget order.
pub struct Snapshot<'a> {
    pub t_ms: i64,
    pub layers: Vec<Layer<'a>>,
}

const LAYER_STRIDE: i64 = 10;
const OVERLAY_BASE: i64 = 1_000_000;

pub fn compose_frame(snapshot: &Snapshot<'_>, view: View, theme: &Theme) -> SceneFrame {
    let mut nodes = Vec::new();
    for (i, layer) in snapshot.layers.iter().enumerate() {
        let z = i as i64 * LAYER_STRIDE;
        match layer {
            Layer::Chart(c) => chart_nodes(c, z, theme, &mut nodes),
            Layer::Annotation(Some(a)) => annotation_nodes(a, z, theme, &mut nodes),
            Layer::Annotation(None) => {}
            Layer::Gesture(g) => {
                if view == View::Presenter {
                    feedback_nodes(g, OVERLAY_BASE + 2 * i as i64, theme, &mut nodes);
                }
            }
        }
    }
    nodes.sort_by_key(|n| n.z);
    SceneFrame {
        t_ms: snapshot.t_ms,
        view,
        nodes,
    }
}

/// Radius of the priming bubble at `progress`.
pub fn bubble_radius(theme: &Theme, progress: f64) -> f64 {
    theme.bubble_r0 + progress.clamp(0.0, 1.0) * (theme.bubble_r1 - theme.bubble_r0)
}

fn feedback_nodes(g: &GestureLayer<'_>, z: i64, theme: &Theme, out: &mut Vec<SceneNode>) {
    out.push(SceneNode {
        z,
        kind: NodeKind::FeedbackBox {
            widget: g.widget.id.clone(),
            rect: g.widget.region,
            label: g.widget.display_label().to_string(),
            color: theme.feedback_box.clone(),
            matched: g.feedback.matched,
        },
    });
    if let Some(progress) = g.feedback.progress {
        let (cx, cy) = g.widget.region.center();
        out.push(SceneNode {
            z: z + 1,
            kind: NodeKind::ProgressBubble {
                widget: g.widget.id.clone(),
                center: [cx, cy],
                radius: bubble_radius(theme, progress),
                progress,
                color: theme.progress_bubble.clone(),
            },
        });
    }
}

fn annotation_nodes(a: &AnnotationLayer<'_>, z: i64, theme: &Theme, out: &mut Vec<SceneNode>) {
    let w = a.widget;
    let _ = theme;
    let kind = match w.kind {
        AnnotationKind::Text => {
            let (cx, cy) = w.geometry.center();
            NodeKind::Text {
                content: w.text.clone(),
                position: [cx, cy],
                anchor: TextAnchor::Middle,
                size: w.font_size * a.reveal.scale,
                color: w.color.clone(),
                opacity: a.reveal.opacity,
            }
        }
        kind => {
            let geometry = match kind {
                AnnotationKind::Arrow | AnnotationKind::Line => ShapeGeometry::Segment(w.line_endpoints()),
                _ => ShapeGeometry::Rect(w.geometry),
            };
            NodeKind::Shape {
                kind,
                geometry,
                style: ShapeStyle {
                    stroke: w.color.clone(),
                    width: 0.004,
                    opacity: a.reveal.opacity,
                    scale: a.reveal.scale,
                },
            }
        }
    };
    out.push(SceneNode { z, kind });
    if w.kind != AnnotationKind::Text && !w.text.is_empty() {
        let (cx, _) = w.geometry.center();
        out.push(SceneNode {
            z,
            kind: NodeKind::Text {
                content: w.text.clone(),
                position: [cx, w.geometry.y - 0.01],
                anchor: TextAnchor::Middle,
                size: w.font_size,
                color: w.color.clone(),
                opacity: a.reveal.opacity,
            },
        });
    }
}

fn to_display(frame: &NormRect, x: f64, y: f64) -> [f64; 2] {
    [frame.x + x * frame.w, frame.y + y * frame.h]
}

fn mark_node(model: &ChartModel, m: &MarkState, z: i64, outline: bool) -> SceneNode {
    let frame = model.frame();
    let (shape64, size, label) = match model.chart_type() {
        ChartType::Scatterplot => {
            let shape = if m.shape.ptr_eq(model.base_shape()) {
                MarkShape::Named("circle".into())
            } else {
                MarkShape::Points(m.shape.clone())
            };
            (shape, [2.0 * m.size, 2.0 * m.size], None)
        }
        ChartType::BarChartRace => {
            let shape = if m.shape.ptr_eq(model.base_shape()) {
                MarkShape::Named("square".into())
            } else {
                MarkShape::Points(m.shape.clone())
            };
            let h = slot_height(model.spec.top_n as u32) * frame.h * 0.8;
            (shape, [m.size * frame.w, h], Some(m.label.clone()))
        }
    };
    SceneNode {
        z,
        kind: NodeKind::Mark {
            key: m.key.clone(),
            shape64,
            fill: m.color.clone(),
            opacity: m.opacity,
            position: to_display(&frame, m.x, m.y),
            size,
            label,
            outline,
        },
    }
}

/// Interpolated time label for playback position `p`.
pub fn time_label(model: &ChartModel, p: f64) -> String {
    let (k, t) = model.transition(p);
    let kf = &model.spec.keyframes;
    let v = lerp(kf[k], kf[k + 1], t);
    format!("{:.0}", v)
}

fn chart_nodes(c: &ChartLayer<'_>, z: i64, theme: &Theme, out: &mut Vec<SceneNode>) {
    let model = c.model;
    let frame = model.frame();
    let bottom = frame.y + frame.h;
    let ticks_x = model.x_scale.ticks(theme.tick_count);
    out.push(SceneNode {
        z,
        kind: NodeKind::Axis {
            orientation: AxisOrientation::X,
            line: [[frame.x, bottom], [frame.x + frame.w, bottom]],
            ticks: ticks_x
                .iter()
                .map(|v| [frame.x + model.x_scale.apply_or_floor(*v) * frame.w, bottom])
                .collect(),
            labels: ticks_x.iter().map(|v| tick_label(*v)).collect(),
            color: theme.axis.clone(),
        },
    });
    if model.chart_type() == ChartType::Scatterplot {
        let ticks_y = model.y_scale.ticks(theme.tick_count);
        out.push(SceneNode {
            z,
            kind: NodeKind::Axis {
                orientation: AxisOrientation::Y,
                line: [[frame.x, frame.y], [frame.x, bottom]],
                ticks: ticks_y
                    .iter()
                    .map(|v| [frame.x, bottom - model.y_scale.apply_or_floor(*v) * frame.h])
                    .collect(),
                labels: ticks_y.iter().map(|v| tick_label(*v)).collect(),
                color: theme.axis.clone(),
            },
        });
    }
    out.push(SceneNode {
        z,
        kind: NodeKind::Text {
            content: time_label(model, c.position),
            position: [frame.x + frame.w, bottom - 0.02],
            anchor: TextAnchor::End,
            size: 2.0 * theme.label_size,
            color: theme.text.clone(),
            opacity: 0.6,
        },
    });

    for m in &c.marks {
        out.push(mark_node(model, m, z + 1, false));
        if model.chart_type() == ChartType::BarChartRace {
            let [x, y] = to_display(&frame, m.size, m.y);
            out.push(SceneNode {
                z: z + 1,
                kind: NodeKind::Text {
                    content: m.label.clone(),
                    position: [x + 0.005, y],
                    anchor: TextAnchor::Start,
                    size: theme.label_size,
                    color: theme.text.clone(),
                    opacity: m.opacity,
                },
            });
        }
    }

    let top_n = model.spec.top_n as u32;
    for (t, opacity) in &c.trajectories {
        let points = match model.chart_type() {
            ChartType::Scatterplot => t.points.iter().map(|p| to_display(&frame, p[0], p[1])).collect(),
            ChartType::BarChartRace => {
                let steps = (t.points.len().max(2) - 1) as f64;
                let last_step = t.points.last().map_or(steps, |p| p[0]).max(1.0);
                t.points
                    .iter()
                    .map(|p| {
                        let slot = p[1].min(top_n as f64 + 0.5);
                        to_display(&frame, 0.8 + 0.18 * p[0] / last_step, slot_center(slot, top_n))
                    })
                    .collect()
            }
        };
        out.push(SceneNode {
            z: z + 2,
            kind: NodeKind::Path {
                key: t.key.clone(),
                points,
                stroke: t.color.clone(),
                dash: model.chart_type() == ChartType::Scatterplot,
                opacity: *opacity,
                width: theme.trajectory_width,
            },
        });
    }
    for g in &c.ghosts {
        out.push(mark_node(model, &g.mark, z + 3, g.outline));
    }
}

/// Rounds to six decimals and folds negative zero.
pub fn round6(v: f64) -> f64 {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn canonicalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(f) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round6(f)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

/// Compact JSON with every float written with exactly six decimals.
struct FixedFormatter;

impl Formatter for FixedFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{:.6}", round6(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        CompactFormatter.begin_array(w)
    }
}

/// Canonical encoding of any serializable value: sorted keys, no
/// whitespace, floats rounded to six decimals.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("scene values are always representable");
    canonicalize(&mut v);
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFormatter);
    v.serialize(&mut ser).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("JSON output is UTF-8")
}

pub fn serialize_frame(f: &SceneFrame) -> String {
    canonical_json(f)
}

pub fn deserialize_frame(s: &str) -> Result<SceneFrame, serde_json::Error> {
    serde_json::from_str(s)
}

/// First difference between two encoded frames beyond `tolerance`, as a
/// dotted field path with a short description.
pub fn diff_values(a: &Value, b: &Value, tolerance: f64) -> Option<String> {
    fn walk(a: &Value, b: &Value, tol: f64, path: &mut String) -> Option<String> {
        match (a, b) {
            (Value::Number(x), Value::Number(y)) => {
                let (x, y) = (x.as_f64()?, y.as_f64()?);
                ((x - y).abs() > tol).then(|| format!("{path}: {x} != {y}"))
            }
            (Value::Array(xs), Value::Array(ys)) => {
                if xs.len() != ys.len() {
                    return Some(format!("{path}: length {} != {}", xs.len(), ys.len()));
                }
                for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
                    let len = path.len();
                    path.push_str(&format!("[{i}]"));
                    if let Some(d) = walk(x, y, tol, path) {
                        return Some(d);
                    }
                    path.truncate(len);
                }
                None
            }
            (Value::Object(xs), Value::Object(ys)) => {
                for key in xs.keys().chain(ys.keys().filter(|k| !xs.contains_key(*k))) {
                    let len = path.len();
                    if !path.is_empty() {
                        path.push('.');
                    }
                    path.push_str(key);
                    let d = match (xs.get(key), ys.get(key)) {
                        (Some(x), Some(y)) => walk(x, y, tol, path),
                        (Some(_), None) => Some(format!("{path}: missing on the right")),
                        (None, _) => Some(format!("{path}: missing on the left")),
                    };
                    if d.is_some() {
                        return d;
                    }
                    path.truncate(len);
                }
                None
            }
            _ => (a != b).then(|| format!("{path}: {a} != {b}")),
        }
    }
    walk(a, b, tolerance, &mut String::new())
}
