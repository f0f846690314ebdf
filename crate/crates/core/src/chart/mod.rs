//! Animated scatterplots and bar chart races over keyframed time series.

pub mod easing;
pub mod playback;
pub mod scale;
pub mod shape;
pub mod table;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use easing::{ease, AffectPreset, AffectProfile, Easing, MorphDirection, MorphSpec};
pub use playback::{playback_step, seek, PlaybackState};
pub use scale::{AxisScale, ScaleError, ScaleKind, SizeScale};
pub use shape::{align_to, morph_envelope, morph_shape, IconSet, Polyline64};
pub use table::{ingest_csv, DataTable, IngestError, Record, TableBindings};

use crate::landmark::NormRect;
use crate::widget::Diagnostic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartType {
    Scatterplot,
    BarChartRace,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChartBindings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisSpec {
    #[serde(default)]
    pub kind: ScaleKind,
    /// Defaults to the min/max of the bound field over the keyframes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(default = "default_max_radius")]
    pub max_radius: f64,
}

impl Default for SizeSpec {
    fn default() -> Self {
        Self {
            domain: None,
            max_radius: default_max_radius(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorSpec {
    /// Category → CSS color. Unmapped categories take the palette entry for
    /// their sorted position.
    #[serde(default)]
    pub map: BTreeMap<String, String>,
    #[serde(default = "default_color")]
    pub default: String,
}

impl Default for ColorSpec {
    fn default() -> Self {
        Self {
            map: BTreeMap::new(),
            default: default_color(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScalesSpec {
    #[serde(default)]
    pub x: AxisSpec,
    #[serde(default)]
    pub y: AxisSpec,
    #[serde(default)]
    pub size: SizeSpec,
    #[serde(default)]
    pub color: ColorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub id: String,
    pub chart_type: ChartType,
    pub frame: NormRect,
    /// Name of an entry in the presentation's data tables.
    pub table: String,
    pub bindings: ChartBindings,
    #[serde(default)]
    pub scales: ScalesSpec,
    pub keyframes: Vec<f64>,
    #[serde(default = "default_top_n")]
    pub top_n: usize,
    /// One profile per keyframe transition; empty means neutral throughout.
    #[serde(default)]
    pub affect_per_transition: Vec<AffectProfile>,
    #[serde(default = "default_base_opacity")]
    pub base_opacity: f64,
    #[serde(default = "default_revolution_span")]
    pub revolution_span: f64,
}

fn default_max_radius() -> f64 {
    0.03
}
fn default_color() -> String {
    "#4c78a8".into()
}
fn default_top_n() -> usize {
    10
}
fn default_base_opacity() -> f64 {
    0.8
}
fn default_revolution_span() -> f64 {
    1.0
}

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

/// Radius used when a scatterplot has no size binding.
pub const DEFAULT_RADIUS: f64 = 0.012;

/// Animated state of one mark. `x`/`y` are the mark center normalized
/// within the chart frame (y down). `size` is a radius in display units for
/// scatter marks and the bar length as a fraction of the frame width for
/// bars.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkState {
    pub key: String,
    pub x: f64,
    pub y: f64,
    pub size: f64,
    pub shape: Polyline64,
    pub opacity: f64,
    pub color: String,
    pub label: String,
    pub rank: Option<u32>,
}

impl MarkState {
    pub fn display_center(&self, frame: &NormRect) -> (f64, f64) {
        (frame.x + self.x * frame.w, frame.y + self.y * frame.h)
    }
}

/// Linear interpolation exact at both ends; for `u` in `[0, 1]` the result
/// never leaves the closed interval between `a` and `b`.
pub fn lerp(a: f64, b: f64, u: f64) -> f64 {
    if u == 0.0 {
        return a;
    }
    if u == 1.0 {
        return b;
    }
    let v = a + u * (b - a);
    if (0.0..=1.0).contains(&u) {
        v.clamp(a.min(b), a.max(b))
    } else {
        v
    }
}

/// A chart bound to its table, with resolved scales, per-keyframe rows and
/// ranks, and icons pre-aligned to the base mark shape.
#[derive(Debug, Clone)]
pub struct ChartModel {
    pub spec: ChartSpec,
    pub x_scale: AxisScale,
    pub y_scale: AxisScale,
    pub size_scale: Option<SizeScale>,
    entities: Vec<String>,
    colors: Vec<String>,
    /// `[keyframe][entity]` → bound values `(x, y, size)` for scatterplots
    /// or `(value, 0, 0)` for bar races.
    rows: Vec<Vec<Option<[f64; 3]>>>,
    ranks: Vec<Vec<Option<u32>>>,
    affects: Vec<AffectProfile>,
    morph_targets: Vec<Option<Polyline64>>,
    base_shape: Polyline64,
    /// `state_at(k)` for every keyframe, in entity order.
    keyframe_states: Vec<Vec<MarkState>>,
}

impl ChartModel {
    pub fn new(spec: ChartSpec, table: &DataTable, icons: &IconSet) -> Result<Self, Vec<Diagnostic>> {
        let id = spec.id.clone();
        let diag = |reason: String| Diagnostic::new(&id, reason);
        let mut errors = Vec::new();
        let n = spec.keyframes.len();
        if n < 2 {
            errors.push(diag("at least 2 keyframes required".into()));
        }
        if spec.keyframes.windows(2).any(|w| !(w[0] < w[1])) {
            errors.push(diag("keyframes must be strictly increasing".into()));
        }
        for k in &spec.keyframes {
            if !table.has_time(*k) {
                errors.push(diag(format!("keyframe {k} not present in table `{}`", spec.table)));
            }
        }
        if !spec.affect_per_transition.is_empty() && spec.affect_per_transition.len() + 1 != n {
            errors.push(diag(format!(
                "affect_per_transition has {} entries, expected {}",
                spec.affect_per_transition.len(),
                n.saturating_sub(1)
            )));
        }
        for a in &spec.affect_per_transition {
            if a.duration_ms <= 0 {
                errors.push(diag("affect duration_ms must be > 0".into()));
            }
            if let Some(m) = &a.morph {
                if !icons.contains(&m.icon) {
                    errors.push(diag(format!("unknown icon `{}`", m.icon)));
                }
                if m.threshold < 0.0 {
                    errors.push(diag("morph threshold must be >= 0".into()));
                }
            }
        }
        if !(0.0..=1.0).contains(&spec.base_opacity) {
            errors.push(diag("base_opacity outside [0,1]".into()));
        }
        if !(spec.revolution_span > 0.0) {
            errors.push(diag("revolution_span must be > 0".into()));
        }

        let field = |name: &Option<String>, role: &str, errors: &mut Vec<Diagnostic>| -> Option<usize> {
            match name {
                None => {
                    errors.push(diag(format!("missing `{role}` binding")));
                    None
                }
                Some(f) => {
                    let idx = table.field_index(f);
                    if idx.is_none() {
                        errors.push(diag(format!("bound field `{f}` is not a value field of `{}`", spec.table)));
                    }
                    idx
                }
            }
        };
        let cols: [Option<usize>; 3] = match spec.chart_type {
            ChartType::Scatterplot => {
                let x = field(&spec.bindings.x, "x", &mut errors);
                let y = field(&spec.bindings.y, "y", &mut errors);
                let size = match &spec.bindings.size {
                    None => None,
                    s => field(s, "size", &mut errors),
                };
                [x, y, size]
            }
            ChartType::BarChartRace => {
                if spec.top_n == 0 {
                    errors.push(diag("top_n must be >= 1".into()));
                }
                [field(&spec.bindings.value, "value", &mut errors), None, None]
            }
        };
        if !errors.is_empty() {
            return Err(errors);
        }

        let mut entities: Vec<String> = spec
            .keyframes
            .iter()
            .flat_map(|k| table.at_time(*k).map(|r| r.key.clone()))
            .collect();
        entities.sort();
        entities.dedup();
        let entity_index: BTreeMap<&str, usize> =
            entities.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();

        let mut rows = vec![vec![None; entities.len()]; n];
        let mut categories: BTreeMap<usize, String> = BTreeMap::new();
        for (k, time) in spec.keyframes.iter().enumerate() {
            for r in table.at_time(*time) {
                let e = entity_index[r.key.as_str()];
                let pick = |c: Option<usize>| c.map_or(0.0, |c| r.values[c]);
                rows[k][e] = Some([pick(cols[0]), pick(cols[1]), pick(cols[2])]);
                if let Some(c) = &r.color {
                    categories.entry(e).or_insert_with(|| c.clone());
                }
            }
        }
        let mut sorted_categories: Vec<&String> = categories.values().collect();
        sorted_categories.sort();
        sorted_categories.dedup();
        let colors = (0..entities.len())
            .map(|e| match categories.get(&e) {
                None => spec.scales.color.default.clone(),
                Some(cat) => spec.scales.color.map.get(cat).cloned().unwrap_or_else(|| {
                    let i = sorted_categories.iter().position(|c| *c == cat).unwrap_or(0);
                    PALETTE[i % PALETTE.len()].to_string()
                }),
            })
            .collect();

        let extent = |dim: usize| -> [f64; 2] {
            let vals = rows.iter().flatten().flatten().map(|r| r[dim]);
            let lo = vals.clone().fold(f64::INFINITY, f64::min);
            let hi = vals.fold(f64::NEG_INFINITY, f64::max);
            [lo, hi]
        };
        let axis = |spec: &AxisSpec, dim: usize| AxisScale {
            kind: spec.kind,
            domain: spec.domain.unwrap_or_else(|| extent(dim)),
        };
        let (x_scale, y_scale, size_scale) = match spec.chart_type {
            ChartType::Scatterplot => (
                axis(&spec.scales.x, 0),
                axis(&spec.scales.y, 1),
                cols[2].map(|_| SizeScale {
                    domain: spec.scales.size.domain.unwrap_or_else(|| [0.0, extent(2)[1]]),
                    max_radius: spec.scales.size.max_radius,
                }),
            ),
            ChartType::BarChartRace => (
                AxisScale {
                    kind: spec.scales.x.kind,
                    domain: spec.scales.x.domain.unwrap_or_else(|| [0.0, extent(0)[1]]),
                },
                AxisScale::linear(0.0, 1.0),
                None,
            ),
        };
        let mut errors = Vec::new();
        for (name, s) in [("x", &x_scale), ("y", &y_scale)] {
            if s.kind == ScaleKind::Log10 {
                if s.domain.iter().any(|d| *d <= 0.0) {
                    errors.push(diag(format!("log10 {name} domain must be strictly positive")));
                }
                let dim = if name == "x" { 0 } else { 1 };
                if rows.iter().flatten().flatten().any(|r| r[dim] <= 0.0) {
                    errors.push(diag(format!("log10 {name} scale over non-positive values")));
                }
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }

        let ranks = rows.iter().map(|row| rank_values(row, &entities)).collect();
        let affects = if spec.affect_per_transition.is_empty() {
            vec![AffectProfile::default(); n - 1]
        } else {
            spec.affect_per_transition.clone()
        };
        let base_shape = match spec.chart_type {
            ChartType::Scatterplot => Polyline64::circle(),
            ChartType::BarChartRace => Polyline64::square(),
        };
        let morph_targets = affects
            .iter()
            .map(|a| {
                a.morph
                    .as_ref()
                    .and_then(|m| icons.get(&m.icon))
                    .map(|icon| align_to(&base_shape, icon))
            })
            .collect();

        let mut model = Self {
            spec,
            x_scale,
            y_scale,
            size_scale,
            entities,
            colors,
            rows,
            ranks,
            affects,
            morph_targets,
            base_shape,
            keyframe_states: Vec::new(),
        };
        model.keyframe_states = (0..n).map(|k| model.state_at(k as f64)).collect();
        Ok(model)
    }

    /// The mark for `key` exactly at keyframe `k`, if the entity has a row
    /// there and is drawn.
    pub fn keyframe_mark(&self, k: usize, key: &str) -> Option<&MarkState> {
        let e = self.entities.binary_search_by(|x| x.as_str().cmp(key)).ok()?;
        self.rows.get(k)?[e]?;
        let states = &self.keyframe_states[k];
        states
            .binary_search_by(|m| m.key.as_str().cmp(key))
            .ok()
            .map(|i| &states[i])
    }

    pub fn id(&self) -> &str {
        &self.spec.id
    }

    pub fn chart_type(&self) -> ChartType {
        self.spec.chart_type
    }

    pub fn frame(&self) -> NormRect {
        self.spec.frame
    }

    pub fn keyframe_count(&self) -> usize {
        self.spec.keyframes.len()
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn affect(&self, transition: usize) -> &AffectProfile {
        &self.affects[transition]
    }

    pub fn base_shape(&self) -> &Polyline64 {
        &self.base_shape
    }

    pub fn initial_playback(&self) -> PlaybackState {
        PlaybackState::new(self.keyframe_count(), self.spec.revolution_span)
    }

    /// 1-based rank of each entity at keyframe `k`, if present there.
    pub fn rank_at_keyframe(&self, k: usize, key: &str) -> Option<u32> {
        let e = self.entities.binary_search_by(|x| x.as_str().cmp(key)).ok()?;
        self.ranks.get(k)?[e]
    }

    /// Splits `p` into a transition index and the raw fraction through it.
    pub fn transition(&self, p: f64) -> (usize, f64) {
        let last = self.keyframe_count() - 2;
        let p = p.clamp(0.0, (last + 1) as f64);
        let k = (p.floor() as usize).min(last);
        (k, p - k as f64)
    }

    pub fn state_at(&self, p: f64) -> Vec<MarkState> {
        match self.spec.chart_type {
            ChartType::Scatterplot => scatter_state_at(self, p),
            ChartType::BarChartRace => barrace_state_at(self, p),
        }
    }

    fn shape_for(&self, k: usize, t: f64, from: f64, to: f64) -> Polyline64 {
        if let (Some(morph), Some(target)) = (&self.affects[k].morph, &self.morph_targets[k]) {
            if morph.applies(from, to) {
                return morph_shape(&self.base_shape, target, morph_envelope(t));
            }
        }
        self.base_shape.clone()
    }
}

/// Descending-value ranks with ties broken by ascending key.
fn rank_values(row: &[Option<[f64; 3]>], entities: &[String]) -> Vec<Option<u32>> {
    let mut present: Vec<(usize, f64)> = row
        .iter()
        .enumerate()
        .filter_map(|(e, r)| r.map(|r| (e, r[0])))
        .collect();
    present.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| entities[a.0].cmp(&entities[b.0])));
    let mut ranks = vec![None; row.len()];
    for (i, (e, _)) in present.iter().enumerate() {
        ranks[*e] = Some(i as u32 + 1);
    }
    ranks
}

/// Interpolated bound values for one entity across transition `k`, plus
/// the presence fade.
fn blend(a: Option<[f64; 3]>, b: Option<[f64; 3]>, u: f64, t: f64) -> Option<([f64; 3], f64)> {
    match (a, b) {
        (Some(a), Some(b)) => Some((
            [lerp(a[0], b[0], u), lerp(a[1], b[1], u), lerp(a[2], b[2], u)],
            1.0,
        )),
        (Some(a), None) => Some((a, 1.0 - t)),
        (None, Some(b)) => Some((b, t)),
        (None, None) => None,
    }
}

pub fn scatter_state_at(model: &ChartModel, p: f64) -> Vec<MarkState> {
    let (k, t) = model.transition(p);
    let u = ease(model.affects[k].easing, t);
    let base = model.spec.base_opacity;
    let mut out = Vec::with_capacity(model.entities.len());
    for (e, key) in model.entities.iter().enumerate() {
        let (a, b) = (model.rows[k][e], model.rows[k + 1][e]);
        let Some((v, presence)) = blend(a, b, u, t) else {
            continue;
        };
        let shape = match (a, b) {
            (Some(a), Some(b)) => model.shape_for(k, t, a[1], b[1]),
            _ => model.base_shape.clone(),
        };
        out.push(MarkState {
            key: key.clone(),
            x: model.x_scale.apply_or_floor(v[0]),
            y: 1.0 - model.y_scale.apply_or_floor(v[1]),
            size: model.size_scale.map_or(DEFAULT_RADIUS, |s| s.apply(v[2])),
            shape,
            opacity: base * presence,
            color: model.colors[e].clone(),
            label: key.clone(),
            rank: None,
        });
    }
    out
}

/// Live rank of every entity present at either end of the current
/// transition, by interpolated value. Always a permutation of `1..=m`.
pub fn barrace_ranks_at(model: &ChartModel, p: f64) -> Vec<(String, u32)> {
    let (k, t) = model.transition(p);
    let u = ease(model.affects[k].easing, t);
    let mut live: Vec<(usize, f64)> = (0..model.entities.len())
        .filter_map(|e| blend(model.rows[k][e], model.rows[k + 1][e], u, t).map(|(v, _)| (e, v[0])))
        .collect();
    live.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| model.entities[a.0].cmp(&model.entities[b.0]))
    });
    live.iter()
        .enumerate()
        .map(|(i, (e, _))| (model.entities[*e].clone(), i as u32 + 1))
        .collect()
}

pub fn barrace_state_at(model: &ChartModel, p: f64) -> Vec<MarkState> {
    let (k, t) = model.transition(p);
    let u = ease(model.affects[k].easing, t);
    let top_n = model.spec.top_n as u32;
    let base = model.spec.base_opacity;
    let below = |k: usize| model.ranks[k].iter().flatten().count() as u32 + 1;
    let live: BTreeMap<String, u32> = barrace_ranks_at(model, p).into_iter().collect();
    let mut out = Vec::new();
    for (e, key) in model.entities.iter().enumerate() {
        let (a, b) = (model.rows[k][e], model.rows[k + 1][e]);
        let Some((v, presence)) = blend(a, b, u, t) else {
            continue;
        };
        let r0 = model.ranks[k][e].unwrap_or_else(|| below(k));
        let r1 = model.ranks[k + 1][e].unwrap_or_else(|| below(k + 1));
        if r0 > top_n && r1 > top_n {
            continue;
        }
        let slot = lerp(r0 as f64, r1 as f64, u);
        let length = model.x_scale.apply_or_floor(v[0]);
        let shape = match (a, b) {
            (Some(a), Some(b)) => model.shape_for(k, t, a[0], b[0]),
            _ => model.base_shape.clone(),
        };
        out.push(MarkState {
            key: key.clone(),
            x: length / 2.0,
            y: slot_center(slot, top_n),
            size: length,
            shape,
            opacity: base * presence,
            color: model.colors[e].clone(),
            label: key.clone(),
            rank: live.get(key).copied(),
        });
    }
    out
}

/// Vertical center of a 1-based rank slot, normalized within the frame.
pub fn slot_center(slot: f64, top_n: u32) -> f64 {
    (slot - 0.5) / top_n as f64
}

/// Height of one bar slot, normalized within the frame.
pub fn slot_height(top_n: u32) -> f64 {
    1.0 / top_n as f64
}

/// Shared handle for models referenced from several places.
pub type SharedChart = Arc<ChartModel>;
