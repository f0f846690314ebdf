//! Hand-landmark value types and the line-delimited trace format.
//!
//! Coordinates are normalized display space: origin top-left, +x right,
//! +y down, already mirrored so that the presenter's on-screen hand lines up
//! with overlaid content.
//!
//! Landmark indices follow the common 21-point hand topology:
//!
//! | finger | MCP | PIP / IP | DIP | TIP |
//! |--------|-----|----------|-----|-----|
//! | wrist  | 0   |          |     |     |
//! | thumb  | 2 (CMC = 1) | 3 | | 4 |
//! | index  | 5   | 6        | 7   | 8   |
//! | middle | 9   | 10       | 11  | 12  |
//! | ring   | 13  | 14       | 15  | 16  |
//! | pinky  | 17  | 18       | 19  | 20  |

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const LANDMARK_COUNT: usize = 21;
pub const WRIST: usize = 0;
pub const INDEX_MCP: usize = 5;
pub const INDEX_TIP: usize = 8;
pub const PINKY_MCP: usize = 17;

/// One detector keypoint. Serialized as `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Landmark {
    pub x: f64,
    pub y: f64,
    /// Relative depth, negative toward the camera. Carried, not classified.
    pub z: f64,
}

impl Landmark {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn planar(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    pub fn distance(&self, other: &Landmark) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 3]> for Landmark {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Self { x, y, z }
    }
}

impl From<Landmark> for [f64; 3] {
    fn from(l: Landmark) -> Self {
        [l.x, l.y, l.z]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Handedness {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandFrame {
    pub handedness: Handedness,
    pub confidence: f64,
    pub landmarks: [Landmark; LANDMARK_COUNT],
}

impl HandFrame {
    pub fn landmark(&self, index: usize) -> Landmark {
        self.landmarks[index]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkFrame {
    pub t_ms: i64,
    pub mirrored: bool,
    pub hands: Vec<HandFrame>,
}

impl LandmarkFrame {
    pub fn empty(t_ms: i64) -> Self {
        Self {
            t_ms,
            mirrored: true,
            hands: Vec::new(),
        }
    }

    pub fn hand(&self, handedness: Handedness) -> Option<&HandFrame> {
        self.hands.iter().find(|h| h.handedness == handedness)
    }

    /// Checks every per-frame invariant except time monotonicity, which is a
    /// property of the surrounding trace.
    pub fn validate(&self) -> Result<(), FrameViolation> {
        if !self.mirrored {
            return Err(FrameViolation::NotMirrored);
        }
        if self.hands.len() > 2 {
            return Err(FrameViolation::Malformed(format!(
                "{} hands in one frame, at most 2 allowed",
                self.hands.len()
            )));
        }
        if self.hands.len() == 2 && self.hands[0].handedness == self.hands[1].handedness {
            return Err(FrameViolation::Malformed(format!(
                "duplicate handedness {:?}",
                self.hands[0].handedness
            )));
        }
        for hand in &self.hands {
            if !(0.0..=1.0).contains(&hand.confidence) {
                return Err(FrameViolation::Range(format!(
                    "confidence {} outside [0,1]",
                    hand.confidence
                )));
            }
            for (i, l) in hand.landmarks.iter().enumerate() {
                if !(0.0..=1.0).contains(&l.x) || !(0.0..=1.0).contains(&l.y) {
                    return Err(FrameViolation::Range(format!(
                        "landmark {i} at ({}, {}) outside [0,1]",
                        l.x, l.y
                    )));
                }
                if !l.z.is_finite() {
                    return Err(FrameViolation::Range(format!("landmark {i} has non-finite z")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameViolation {
    #[error("malformed frame: {0}")]
    Malformed(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("frame is not mirrored into display space")]
    NotMirrored,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkTrace {
    pub frames: Vec<LandmarkFrame>,
    /// Metadata only. Inferred from the median frame spacing when parsing.
    pub nominal_fps: f64,
}

impl LandmarkTrace {
    pub fn new(frames: Vec<LandmarkFrame>) -> Self {
        let nominal_fps = infer_fps(&frames);
        Self { frames, nominal_fps }
    }

    pub fn duration_ms(&self) -> i64 {
        match (self.frames.first(), self.frames.last()) {
            (Some(a), Some(b)) => b.t_ms - a.t_ms,
            _ => 0,
        }
    }
}

const DEFAULT_FPS: f64 = 30.0;

fn infer_fps(frames: &[LandmarkFrame]) -> f64 {
    let mut gaps: Vec<i64> = frames
        .windows(2)
        .map(|w| w[1].t_ms - w[0].t_ms)
        .filter(|&d| d > 0)
        .collect();
    if gaps.is_empty() {
        return DEFAULT_FPS;
    }
    gaps.sort_unstable();
    1000.0 / gaps[gaps.len() / 2] as f64
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}: malformed record: {detail}")]
    MalformedRecord { line: usize, detail: String },
    #[error("line {line}: {detail}")]
    RangeError { line: usize, detail: String },
    #[error("line {line}: t_ms {t_ms} precedes previous {previous}")]
    NonMonotoneTime { line: usize, previous: i64, t_ms: i64 },
    #[error("line {line}: record is not mirrored into display space")]
    NotMirrored { line: usize },
}

/// Parses a line-delimited trace. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn parse_trace(bytes: &[u8]) -> Result<LandmarkTrace, TraceError> {
    let text = std::str::from_utf8(bytes).map_err(|e| TraceError::MalformedRecord {
        line: 0,
        detail: format!("not UTF-8: {e}"),
    })?;
    let mut frames: Vec<LandmarkFrame> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let frame = parse_frame_record(raw).map_err(|v| match v {
            FrameViolation::Malformed(detail) => TraceError::MalformedRecord { line, detail },
            FrameViolation::Range(detail) => TraceError::RangeError { line, detail },
            FrameViolation::NotMirrored => TraceError::NotMirrored { line },
        })?;
        if let Some(prev) = frames.last() {
            if frame.t_ms < prev.t_ms {
                return Err(TraceError::NonMonotoneTime {
                    line,
                    previous: prev.t_ms,
                    t_ms: frame.t_ms,
                });
            }
        }
        frames.push(frame);
    }
    Ok(LandmarkTrace::new(frames))
}

/// Parses and validates a single record.
pub fn parse_frame_record(record: &str) -> Result<LandmarkFrame, FrameViolation> {
    let frame: LandmarkFrame =
        serde_json::from_str(record).map_err(|e| FrameViolation::Malformed(e.to_string()))?;
    frame.validate()?;
    Ok(frame)
}

pub fn serialize_frame_record(frame: &LandmarkFrame) -> String {
    serde_json::to_string(frame).expect("landmark frames always serialize")
}

pub fn serialize_trace(trace: &LandmarkTrace) -> String {
    let mut out = String::new();
    for frame in &trace.frames {
        out.push_str(&serialize_frame_record(frame));
        out.push('\n');
    }
    out
}

/// Axis-aligned rectangle in normalized display coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormRect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl NormRect {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    /// Rectangle spanned by two corner points, in either order.
    pub fn spanning(a: (f64, f64), b: (f64, f64)) -> Self {
        let x0 = a.0.min(b.0);
        let y0 = a.1.min(b.1);
        Self {
            x: x0,
            y: y0,
            w: a.0.max(b.0) - x0,
            h: a.1.max(b.1) - y0,
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        self.x <= x && x <= self.x + self.w && self.y <= y && y <= self.y + self.h
    }
}

/// Inclusive-edge containment.
pub fn point_in_rect(p: &Landmark, r: &NormRect) -> bool {
    r.contains_xy(p.x, p.y)
}
