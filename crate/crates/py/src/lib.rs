//! Python bindings. Frames and presentations cross the boundary as canonical
//! JSON strings; small numeric helpers take and return plain values.

use std::path::PathBuf;
use std::sync::Arc;

use gesturecast_core::chart::{ease as core_ease, Easing};
use gesturecast_core::gesture::{classify_hand as core_classify, dial_step as core_dial_step, DialState};
use gesturecast_core::landmark::{parse_frame_record, parse_trace, LANDMARK_COUNT};
use gesturecast_core::scene::serialize_frame;
use gesturecast_core::session::{Project, Session as CoreSession};
use gesturecast_core::{HandFrame, Handedness, Landmark};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn easing_from(name: &str) -> PyResult<Easing> {
    Easing::ALL
        .into_iter()
        .find(|k| format!("{k:?}") == name)
        .ok_or_else(|| value_err(format!("unknown easing `{name}`")))
}

/// Names of every easing curve.
#[pyfunction]
fn easing_kinds() -> Vec<String> {
    Easing::ALL.iter().map(|k| format!("{k:?}")).collect()
}

#[pyfunction]
fn ease(kind: &str, u: f64) -> PyResult<f64> {
    Ok(core_ease(easing_from(kind)?, u))
}

/// `(widget_id, reason)` for every problem in the config; empty when valid.
#[pyfunction]
fn validate(config: PathBuf) -> Vec<(String, String)> {
    match Project::load(&config) {
        Ok(_) => Vec::new(),
        Err(e) => e.diagnostics().into_iter().map(|d| (d.widget_id, d.reason)).collect(),
    }
}

/// Pose of one hand given 21 `(x, y, z)` landmarks.
#[pyfunction]
#[pyo3(signature = (landmarks, handedness = "Right"))]
fn classify_hand(landmarks: Vec<(f64, f64, f64)>, handedness: &str) -> PyResult<String> {
    if landmarks.len() != LANDMARK_COUNT {
        return Err(value_err(format!("expected {LANDMARK_COUNT} landmarks, got {}", landmarks.len())));
    }
    let handedness = match handedness {
        "Left" => Handedness::Left,
        "Right" => Handedness::Right,
        other => return Err(value_err(format!("unknown handedness `{other}`"))),
    };
    let mut points = [Landmark::planar(0.0, 0.0); LANDMARK_COUNT];
    for (p, (x, y, z)) in points.iter_mut().zip(landmarks) {
        *p = Landmark::new(x, y, z);
    }
    let hand = HandFrame {
        handedness,
        confidence: 1.0,
        landmarks: points,
    };
    Ok(format!("{:?}", core_classify(&hand).kind))
}

/// One dial sample. Returns `(delta_revolutions, last_angle, accumulated)`.
#[pyfunction]
#[pyo3(signature = (center, tip, last_angle = None, accumulated = 0.0))]
fn dial_step(center: (f64, f64), tip: (f64, f64), last_angle: Option<f64>, accumulated: f64) -> (f64, Option<f64>, f64) {
    let state = DialState {
        center: Landmark::planar(center.0, center.1),
        last_angle,
        accumulated,
    };
    let step = core_dial_step(state, Landmark::planar(tip.0, tip.1));
    (step.delta_revolutions, step.state.last_angle, step.state.accumulated)
}

fn load_project(config: &PathBuf) -> PyResult<Arc<Project>> {
    Project::load(config).map(Arc::new).map_err(value_err)
}

/// Replays a trace file and returns one canonical frame per tick for `view`.
#[pyfunction]
#[pyo3(signature = (config, trace, view = "presenter"))]
fn replay(config: PathBuf, trace: PathBuf, view: &str) -> PyResult<Vec<String>> {
    let presenter = match view {
        "presenter" => true,
        "audience" => false,
        other => return Err(value_err(format!("unknown view `{other}`"))),
    };
    let bytes = std::fs::read(&trace).map_err(|e| PyIOError::new_err(format!("{}: {e}", trace.display())))?;
    let trace = parse_trace(&bytes).map_err(value_err)?;
    let mut session = CoreSession::new("default", load_project(&config)?);
    let mut out = Vec::with_capacity(trace.frames.len());
    session
        .replay(&trace, |t| {
            out.push(serialize_frame(if presenter { &t.presenter } else { &t.audience }));
        })
        .map_err(value_err)?;
    Ok(out)
}

/// A live session fed one landmark frame at a time.
#[pyclass]
struct Session {
    inner: CoreSession,
}

#[pymethods]
impl Session {
    #[new]
    fn new(config: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: CoreSession::new("default", load_project(&config)?),
        })
    }

    /// Feeds one frame record; returns `(presenter_json, audience_json)`.
    fn tick(&mut self, frame: &str) -> PyResult<(String, String)> {
        let frame = parse_frame_record(frame).map_err(value_err)?;
        let out = self.inner.tick(&frame).map_err(value_err)?;
        Ok((serialize_frame(&out.presenter), serialize_frame(&out.audience)))
    }

    fn playback(&self, chart_id: &str) -> Option<f64> {
        self.inner.playback(chart_id).map(|p| p.position)
    }

    fn seek(&mut self, chart_id: &str, p: f64) -> PyResult<()> {
        self.inner.seek(chart_id, p).map_err(value_err)
    }

    fn select_segment(&mut self, segment_id: &str) -> PyResult<()> {
        self.inner.select_segment(segment_id).map_err(value_err)
    }

    #[getter]
    fn active_segment(&self) -> String {
        self.inner.active_segment().to_string()
    }

    #[getter]
    fn clock(&self) -> Option<i64> {
        self.inner.clock()
    }
}

#[pymodule]
fn gesturecast(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(easing_kinds, m)?)?;
    m.add_function(wrap_pyfunction!(ease, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(classify_hand, m)?)?;
    m.add_function(wrap_pyfunction!(dial_step, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add_class::<Session>()?;
    Ok(())
}
