//! The per-session engine: landmark frames in, presenter and audience
//! scene frames out.

pub mod project;
pub mod protocol;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

pub use project::{load_presentation, parse_presentation, presentation_to_string, save_presentation, Project, ProjectError};
pub use protocol::{encode_message, handle_message, parse_message, ErrorCode, Message, Outbound, Recipient, Role};

use crate::chart::{playback_step, seek, ChartModel, PlaybackState};
use crate::foreshadow::{
    annotation_state, apply_highlight, fade_envelope, foreshadow_point, foreshadow_trajectory, pulse_opacity,
    select_point, select_region, AnnotationReveal, ForeshadowMode, ForeshadowSpec, Selection,
};
use crate::gesture::classify_frame;
use crate::landmark::{FrameViolation, LandmarkFrame, LandmarkTrace};
use crate::scene::{
    compose_frame, AnnotationLayer, ChartLayer, GestureLayer, Layer, SceneFrame, Snapshot, Theme, View,
};
use crate::widget::{
    step_activation, ActivationEvent, ActivationState, EventKind, Feedback, GestureAnchor, GestureWidget, Operation,
    Widget,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("stale frame: t_ms {t_ms} is before the session clock {clock}")]
    StaleFrame { t_ms: i64, clock: i64 },
    #[error("invalid frame: {0}")]
    InvalidFrame(#[from] FrameViolation),
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("unknown segment `{0}`")]
    UnknownSegment(String),
}

/// Keyframe-by-keyframe animation started by a one-shot playback trigger.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Tween {
    from: f64,
    to: f64,
    start_ms: i64,
}

#[derive(Debug, Clone, PartialEq)]
struct Highlight {
    selection: Selection,
    dim_opacity: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Foreshadow {
    chart_id: String,
    spec: ForeshadowSpec,
    dim_opacity: f64,
    selection: Selection,
    started_ms: i64,
    /// When the fade-out began, once released.
    released_ms: Option<i64>,
}

impl Foreshadow {
    fn envelope(&self, t_ms: i64) -> f64 {
        match self.released_ms {
            Some(r) if t_ms >= r => fade_envelope(t_ms - r, self.spec.fade_out_ms),
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    project: Arc<Project>,
    active_segment: usize,
    activations: BTreeMap<String, ActivationState>,
    feedback: BTreeMap<String, Feedback>,
    playback: BTreeMap<String, PlaybackState>,
    tweens: BTreeMap<String, Tween>,
    highlights: BTreeMap<String, Highlight>,
    foreshadows: BTreeMap<String, Foreshadow>,
    reveals: BTreeMap<String, i64>,
    clock: Option<i64>,
    theme: Theme,
}

/// Both views of one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TickFrames {
    pub presenter: SceneFrame,
    pub audience: SceneFrame,
    pub events: Vec<ActivationEvent>,
}

impl Session {
    pub fn new(id: &str, project: Arc<Project>) -> Self {
        let playback = project
            .charts
            .iter()
            .map(|(id, m)| (id.clone(), m.initial_playback()))
            .collect();
        Self {
            id: id.to_string(),
            project,
            active_segment: 0,
            activations: BTreeMap::new(),
            feedback: BTreeMap::new(),
            playback,
            tweens: BTreeMap::new(),
            highlights: BTreeMap::new(),
            foreshadows: BTreeMap::new(),
            reveals: BTreeMap::new(),
            clock: None,
            theme: Theme::default(),
        }
    }

    pub fn project(&self) -> &Arc<Project> {
        &self.project
    }

    pub fn clock(&self) -> Option<i64> {
        self.clock
    }

    pub fn active_segment(&self) -> &str {
        &self.project.presentation.segments[self.active_segment].id
    }

    pub fn playback(&self, chart_id: &str) -> Option<PlaybackState> {
        self.playback.get(chart_id).copied()
    }

    pub fn activation(&self, widget_id: &str) -> ActivationState {
        self.activations.get(widget_id).cloned().unwrap_or_default()
    }

    /// Replaces the compiled project, resetting all interaction state.
    pub fn replace_project(&mut self, project: Arc<Project>) {
        let clock = self.clock;
        *self = Session::new(&self.id, project);
        self.clock = clock;
    }

    /// Swaps in a recompiled project while keeping interaction state for
    /// widgets that still exist.
    pub fn update_project(&mut self, project: Arc<Project>) {
        let segment = self.active_segment().to_string();
        self.project = project;
        self.active_segment = self
            .project
            .presentation
            .segments
            .iter()
            .position(|s| s.id == segment)
            .unwrap_or(0);
        let charts = &self.project.charts;
        let mut playback = BTreeMap::new();
        for (id, m) in charts {
            let fresh = m.initial_playback();
            let kept = self.playback.get(id).map_or(fresh, |p| seek(fresh, p.position));
            playback.insert(id.clone(), kept);
        }
        self.playback = playback;
        self.tweens.retain(|id, _| charts.contains_key(id));
        self.highlights.retain(|id, _| charts.contains_key(id));
        self.foreshadows.retain(|_, f| charts.contains_key(&f.chart_id));
        let p = &self.project.presentation;
        self.activations.retain(|id, _| matches!(p.widget(id), Some(Widget::Gesture(_))));
    }

    pub fn select_segment(&mut self, segment_id: &str) -> Result<(), SessionError> {
        let idx = self
            .project
            .presentation
            .segments
            .iter()
            .position(|s| s.id == segment_id)
            .ok_or_else(|| SessionError::UnknownSegment(segment_id.to_string()))?;
        if idx != self.active_segment {
            self.active_segment = idx;
            self.activations.clear();
            self.feedback.clear();
        }
        Ok(())
    }

    pub fn seek(&mut self, chart_id: &str, p: f64) -> Result<(), SessionError> {
        let state = self
            .playback
            .get_mut(chart_id)
            .ok_or_else(|| SessionError::UnknownChart(chart_id.to_string()))?;
        *state = seek(*state, if p.is_finite() { p } else { 0.0 });
        self.tweens.remove(chart_id);
        Ok(())
    }

    /// Advances the engine by one landmark frame. A frame older than the
    /// session clock is rejected and leaves the session untouched.
    pub fn tick(&mut self, frame: &LandmarkFrame) -> Result<TickFrames, SessionError> {
        if let Some(clock) = self.clock {
            if frame.t_ms < clock {
                return Err(SessionError::StaleFrame { t_ms: frame.t_ms, clock });
            }
        }
        frame.validate()?;
        let t = frame.t_ms;
        let dt = self.clock.map_or(0, |c| t - c);
        self.clock = Some(t);

        let poses = classify_frame(frame);
        let project = Arc::clone(&self.project);
        let mut events = Vec::new();
        for w in self.segment_gestures(&project) {
            let state = self.activations.remove(&w.id).unwrap_or_default();
            let step = step_activation(w, state, t, &poses, dt);
            self.activations.insert(w.id.clone(), step.state);
            self.feedback.insert(w.id.clone(), step.feedback);
            for e in &step.events {
                self.route(w, e, t);
            }
            events.extend(step.events);
        }
        self.advance_tweens(t);
        self.foreshadows
            .retain(|_, f| !matches!(f.released_ms, Some(r) if t - r >= f.spec.fade_out_ms));

        let (presenter, audience) = self.compose(t);
        Ok(TickFrames {
            presenter,
            audience,
            events,
        })
    }

    fn segment_gestures<'p>(&self, project: &'p Project) -> Vec<&'p GestureWidget> {
        let p = &project.presentation;
        p.segments[self.active_segment]
            .widgets
            .iter()
            .filter_map(|id| match p.widget(id) {
                Some(Widget::Gesture(g)) => Some(g),
                _ => None,
            })
            .collect()
    }

    fn chart(&self, id: &str) -> Option<Arc<ChartModel>> {
        self.project.charts.get(id).cloned()
    }

    fn position(&self, chart_id: &str) -> f64 {
        self.playback.get(chart_id).map_or(0.0, |p| p.position)
    }

    fn hit_test(&self, model: &ChartModel, w: &GestureWidget, anchor: &GestureAnchor) -> Selection {
        let marks = model.state_at(self.position(model.id()));
        match anchor {
            GestureAnchor::Point { at } => {
                select_point(model.id(), &model.frame(), &marks, *at, w.operation_params.radius)
            }
            GestureAnchor::Region { region } => select_region(model.id(), &model.frame(), &marks, region),
        }
    }

    fn route(&mut self, w: &GestureWidget, e: &ActivationEvent, t: i64) {
        let target = w.target_widget.as_str();
        match w.operation {
            Operation::Annotation => {
                if let EventKind::Triggered { .. } = e.kind {
                    self.reveals.entry(target.to_string()).or_insert(t);
                }
            }
            Operation::Playback => {
                let Some(model) = self.chart(target) else { return };
                match e.kind {
                    EventKind::Triggered { .. } if !w.is_continuous() => {
                        let from = self.position(target);
                        let max = (model.keyframe_count() - 1) as f64;
                        let to = (from + w.operation_params.step).clamp(0.0, max);
                        if to != from {
                            self.tweens.insert(target.to_string(), Tween { from, to, start_ms: t });
                        }
                    }
                    EventKind::ContinuousUpdate {
                        delta_revolutions: Some(d),
                        ..
                    } => {
                        self.tweens.remove(target);
                        if let Some(p) = self.playback.get_mut(target) {
                            *p = playback_step(*p, d);
                        }
                    }
                    _ => {}
                }
            }
            Operation::Selection => {
                let Some(model) = self.chart(target) else { return };
                if let EventKind::Triggered { anchor } | EventKind::ContinuousUpdate { anchor, .. } = &e.kind {
                    let selection = self.hit_test(&model, w, anchor);
                    self.highlights.insert(
                        target.to_string(),
                        Highlight {
                            selection,
                            dim_opacity: w.operation_params.dim_opacity,
                        },
                    );
                }
            }
            Operation::Foreshadowing => {
                let Some(model) = self.chart(target) else { return };
                let spec = w.operation_params.foreshadow.clone();
                match &e.kind {
                    EventKind::Triggered { anchor } => {
                        let selection = self.hit_test(&model, w, anchor);
                        let released_ms = (!w.is_continuous()).then_some(t + spec.pulse_period_ms);
                        self.foreshadows.insert(
                            w.id.clone(),
                            Foreshadow {
                                chart_id: target.to_string(),
                                spec,
                                dim_opacity: w.operation_params.dim_opacity,
                                selection,
                                started_ms: t,
                                released_ms,
                            },
                        );
                    }
                    EventKind::ContinuousUpdate { anchor, .. } => {
                        let selection = self.hit_test(&model, w, anchor);
                        if let Some(f) = self.foreshadows.get_mut(&w.id) {
                            f.selection = selection;
                        }
                    }
                    EventKind::Released => {
                        if let Some(f) = self.foreshadows.get_mut(&w.id) {
                            f.released_ms.get_or_insert(t);
                        }
                    }
                }
            }
        }
    }

    fn advance_tweens(&mut self, t: i64) {
        let mut done = Vec::new();
        for (id, tw) in &self.tweens {
            let Some(model) = self.project.charts.get(id) else { continue };
            let p = tween_position(model, tw.from, tw.to, t - tw.start_ms);
            if let Some(state) = self.playback.get_mut(id) {
                *state = seek(*state, p);
            }
            if p == tw.to {
                done.push(id.clone());
            }
        }
        for id in done {
            self.tweens.remove(&id);
        }
    }

    /// Presenter and audience frames for the current state at `t_ms`.
    pub fn compose(&self, t_ms: i64) -> (SceneFrame, SceneFrame) {
        let p = &self.project.presentation;
        let mut layers = Vec::new();
        for id in &p.segments[self.active_segment].widgets {
            match p.widget(id) {
                Some(Widget::Chart(_)) => {
                    if let Some(model) = self.project.charts.get(id) {
                        layers.push(Layer::Chart(self.chart_layer(model, t_ms)));
                    }
                }
                Some(Widget::Annotation(a)) => {
                    let reveal = if self.project.gated_annotations.contains(id) {
                        self.reveals.get(id).map(|t0| annotation_state(a, t_ms - t0))
                    } else {
                        Some(AnnotationReveal {
                            opacity: a.base_opacity,
                            scale: 1.0,
                        })
                    };
                    layers.push(Layer::Annotation(reveal.map(|reveal| AnnotationLayer { widget: a, reveal })));
                }
                Some(Widget::Gesture(g)) => layers.push(Layer::Gesture(GestureLayer {
                    widget: g,
                    feedback: self.feedback.get(id).copied().unwrap_or_default(),
                })),
                None => {}
            }
        }
        let snapshot = Snapshot { t_ms, layers };
        let presenter = compose_frame(&snapshot, View::Presenter, &self.theme);
        let audience = SceneFrame {
            t_ms,
            view: View::Audience,
            nodes: presenter
                .nodes
                .iter()
                .filter(|n| !n.kind.is_presenter_only())
                .cloned()
                .collect(),
        };
        (presenter, audience)
    }

    /// Frames for the current state at the session clock.
    pub fn current_frames(&self) -> (SceneFrame, SceneFrame) {
        self.compose(self.clock.unwrap_or(0))
    }

    fn chart_layer<'a>(&self, model: &'a ChartModel, t_ms: i64) -> ChartLayer<'a> {
        let position = self.position(model.id());
        let mut marks = model.state_at(position);
        let active: Vec<&Foreshadow> = self
            .foreshadows
            .values()
            .filter(|f| f.chart_id == model.id() && f.envelope(t_ms) > 0.0)
            .collect();
        if let Some(f) = active.last() {
            marks = apply_highlight(marks, &f.selection, f.dim_opacity);
        } else if let Some(h) = self.highlights.get(model.id()) {
            marks = apply_highlight(marks, &h.selection, h.dim_opacity);
        }
        let mut ghosts = Vec::new();
        let mut trajectories = Vec::new();
        for f in active {
            let fade = f.envelope(t_ms);
            match f.spec.mode {
                ForeshadowMode::Point => {
                    for mut g in foreshadow_point(model, &f.spec, position, &f.selection, t_ms - f.started_ms) {
                        g.mark.opacity *= fade;
                        ghosts.push(g);
                    }
                }
                ForeshadowMode::Trajectory => {
                    let pulse = pulse_opacity((t_ms - f.started_ms) as f64, f.spec.pulse_period_ms as f64);
                    for tr in foreshadow_trajectory(model, &f.spec, position, &f.selection) {
                        trajectories.push((tr, pulse * fade));
                    }
                }
            }
        }
        ChartLayer {
            model,
            position,
            marks,
            ghosts,
            trajectories,
        }
    }

    /// Runs every frame of `trace` through `tick`, handing each pair of
    /// frames to `sink`.
    pub fn replay<F>(&mut self, trace: &LandmarkTrace, mut sink: F) -> Result<(), SessionError>
    where
        F: FnMut(&TickFrames),
    {
        for frame in &trace.frames {
            let out = self.tick(frame)?;
            sink(&out);
        }
        Ok(())
    }
}

/// Playback position `elapsed_ms` into a tween from `from` to `to`, with
/// each keyframe transition taking its affect duration.
pub fn tween_position(model: &ChartModel, from: f64, to: f64, elapsed_ms: i64) -> f64 {
    let mut remaining = elapsed_ms.max(0) as f64;
    let mut p = from;
    let dir = if to >= from { 1.0 } else { -1.0 };
    while p != to {
        let transition = if dir > 0.0 {
            model.transition(p).0
        } else {
            model.transition((p - 1e-12).max(0.0)).0
        };
        let duration = model.affect(transition).duration_ms.max(1) as f64;
        let boundary = if dir > 0.0 {
            (transition + 1) as f64
        } else {
            transition as f64
        };
        let boundary = if dir > 0.0 { boundary.min(to) } else { boundary.max(to) };
        let needed = (boundary - p).abs() * duration;
        if remaining >= needed {
            remaining -= needed;
            p = boundary;
        } else {
            return p + dir * remaining / duration;
        }
    }
    to
}
