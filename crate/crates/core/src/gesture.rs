//! Planar geometric classification of single-hand and bimanual poses, and the
//! angular tracker behind the dialling gesture.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::landmark::{
    HandFrame, Handedness, Landmark, LandmarkFrame, NormRect, INDEX_MCP, INDEX_TIP, PINKY_MCP,
    WRIST,
};

/// Interior PIP angle at or above which a finger counts as straight.
pub const NO_CURL_MIN_DEG: f64 = 130.0;
/// Interior PIP angle below which a finger counts as fully folded.
pub const HALF_CURL_MIN_DEG: f64 = 60.0;
/// Segments shorter than this make the PIP angle undefined.
pub const MIN_SEGMENT_LEN: f64 = 1e-6;
/// Radius around the dial center inside which angles are not tracked.
pub const DIAL_DEAD_ZONE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Finger {
    Thumb,
    Index,
    Middle,
    Ring,
    Pinky,
}

impl Finger {
    pub const ALL: [Finger; 5] = [
        Finger::Thumb,
        Finger::Index,
        Finger::Middle,
        Finger::Ring,
        Finger::Pinky,
    ];

    /// `(mcp, pip, tip)` landmark indices. For the thumb the MCP/IP/TIP chain
    /// is used, skipping the CMC joint.
    pub const fn joints(self) -> (usize, usize, usize) {
        match self {
            Finger::Thumb => (2, 3, 4),
            Finger::Index => (5, 6, 8),
            Finger::Middle => (9, 10, 12),
            Finger::Ring => (13, 14, 16),
            Finger::Pinky => (17, 18, 20),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FingerCurl {
    NoCurl,
    HalfCurl,
    FullCurl,
}

impl FingerCurl {
    pub fn is_bent(self) -> bool {
        !matches!(self, FingerCurl::NoCurl)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("degenerate geometry")]
    Degenerate,
}

/// Interior angle in degrees at `vertex` between the rays toward `a` and `b`.
pub fn interior_angle_deg(vertex: Landmark, a: Landmark, b: Landmark) -> Result<f64, GeometryError> {
    let (ux, uy) = (a.x - vertex.x, a.y - vertex.y);
    let (vx, vy) = (b.x - vertex.x, b.y - vertex.y);
    if ux.hypot(uy) < MIN_SEGMENT_LEN || vx.hypot(vy) < MIN_SEGMENT_LEN {
        return Err(GeometryError::Degenerate);
    }
    let cross = ux * vy - uy * vx;
    let dot = ux * vx + uy * vy;
    Ok(cross.abs().atan2(dot).to_degrees())
}

pub fn curl_from_angle(alpha_deg: f64) -> FingerCurl {
    if alpha_deg >= NO_CURL_MIN_DEG {
        FingerCurl::NoCurl
    } else if alpha_deg >= HALF_CURL_MIN_DEG {
        FingerCurl::HalfCurl
    } else {
        FingerCurl::FullCurl
    }
}

pub fn finger_curl(hand: &HandFrame, finger: Finger) -> Result<FingerCurl, GeometryError> {
    let (mcp, pip, tip) = finger.joints();
    let alpha = interior_angle_deg(hand.landmark(pip), hand.landmark(mcp), hand.landmark(tip))?;
    Ok(curl_from_angle(alpha))
}

fn all_curls(hand: &HandFrame) -> Result<[FingerCurl; 5], GeometryError> {
    let mut out = [FingerCurl::NoCurl; 5];
    for (slot, finger) in out.iter_mut().zip(Finger::ALL) {
        *slot = finger_curl(hand, finger)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HandPoseKind {
    OpenHand,
    Pointing,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandPose {
    pub kind: HandPoseKind,
    pub handedness: Handedness,
    pub index_tip: Landmark,
    pub palm_center: Landmark,
    pub confidence: f64,
}

/// Centroid of the wrist, index MCP and pinky MCP.
pub fn palm_center(hand: &HandFrame) -> Landmark {
    let pts = [hand.landmark(WRIST), hand.landmark(INDEX_MCP), hand.landmark(PINKY_MCP)];
    Landmark::new(
        pts.iter().map(|p| p.x).sum::<f64>() / 3.0,
        pts.iter().map(|p| p.y).sum::<f64>() / 3.0,
        pts.iter().map(|p| p.z).sum::<f64>() / 3.0,
    )
}

pub fn classify_hand(hand: &HandFrame) -> HandPose {
    let index_tip = hand.landmark(INDEX_TIP);
    let palm_center = palm_center(hand);
    let (kind, confidence) = match all_curls(hand) {
        Err(GeometryError::Degenerate) => (HandPoseKind::Other, 0.0),
        Ok(curls) => {
            let [_thumb, index, middle, ring, pinky] = curls;
            let kind = if curls.iter().all(|c| *c == FingerCurl::NoCurl) {
                HandPoseKind::OpenHand
            } else if index == FingerCurl::NoCurl
                && middle.is_bent()
                && ring.is_bent()
                && pinky.is_bent()
            {
                HandPoseKind::Pointing
            } else {
                HandPoseKind::Other
            };
            (kind, hand.confidence)
        }
    };
    HandPose {
        kind,
        handedness: hand.handedness,
        index_tip,
        palm_center,
        confidence,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BimanualKind {
    RectangularFraming,
    RangeFraming,
    None,
}

/// Region spanned by a framing pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FramingRegion {
    Rect(NormRect),
    Interval { x0: f64, x1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BimanualPose {
    pub kind: BimanualKind,
    pub region: Option<FramingRegion>,
    /// Palm centers of both hands, ordered by x.
    pub palm_centers: [Landmark; 2],
    pub confidence: f64,
}

impl BimanualPose {
    fn none(a: &HandFrame, b: &HandFrame) -> Self {
        Self {
            kind: BimanualKind::None,
            region: None,
            palm_centers: ordered_by_x(palm_center(a), palm_center(b)),
            confidence: 0.0,
        }
    }
}

fn ordered_by_x(a: Landmark, b: Landmark) -> [Landmark; 2] {
    if (b.x, b.y) < (a.x, a.y) {
        [b, a]
    } else {
        [a, b]
    }
}

/// z-component of the palm normal, from wrist→index MCP × wrist→pinky MCP.
pub fn palm_normal_z(hand: &HandFrame) -> f64 {
    let w = hand.landmark(WRIST);
    let i = hand.landmark(INDEX_MCP);
    let p = hand.landmark(PINKY_MCP);
    (i.x - w.x) * (p.y - w.y) - (i.y - w.y) * (p.x - w.x)
}

pub fn palms_facing(a: &HandFrame, b: &HandFrame) -> bool {
    let (na, nb) = (palm_normal_z(a), palm_normal_z(b));
    na != 0.0 && nb != 0.0 && na.signum() != nb.signum()
}

pub fn classify_bimanual(left: &HandFrame, right: &HandFrame) -> BimanualPose {
    if !palms_facing(left, right) {
        return BimanualPose::none(left, right);
    }
    let (Ok(cl), Ok(cr)) = (all_curls(left), all_curls(right)) else {
        return BimanualPose::none(left, right);
    };
    let palm_centers = ordered_by_x(palm_center(left), palm_center(right));
    let confidence = left.confidence.min(right.confidence);
    let index = Finger::Index as usize;
    if cl[index].is_bent() && cr[index].is_bent() {
        let a = left.landmark(INDEX_TIP);
        let b = right.landmark(INDEX_TIP);
        return BimanualPose {
            kind: BimanualKind::RectangularFraming,
            region: Some(FramingRegion::Rect(NormRect::spanning((a.x, a.y), (b.x, b.y)))),
            palm_centers,
            confidence,
        };
    }
    if cl.iter().chain(cr.iter()).all(|c| *c == FingerCurl::NoCurl) {
        return BimanualPose {
            kind: BimanualKind::RangeFraming,
            region: Some(FramingRegion::Interval {
                x0: palm_centers[0].x,
                x1: palm_centers[1].x,
            }),
            palm_centers,
            confidence,
        };
    }
    BimanualPose::none(left, right)
}

/// Poses for every hand of one frame, classified once and shared by all
/// widgets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FramePoses {
    pub hands: Vec<HandPose>,
    pub bimanual: Option<BimanualPose>,
}

pub fn classify_frame(frame: &LandmarkFrame) -> FramePoses {
    let hands = frame.hands.iter().map(classify_hand).collect();
    let bimanual = match (frame.hand(Handedness::Left), frame.hand(Handedness::Right)) {
        (Some(l), Some(r)) => Some(classify_bimanual(l, r)),
        _ => None,
    };
    FramePoses { hands, bimanual }
}

/// Wraps an angle difference into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut w = theta.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

/// Angular state of a dial. Positive angles are screen-clockwise (y points
/// down), which advances playback.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DialState {
    pub center: Landmark,
    pub last_angle: Option<f64>,
    pub accumulated: f64,
}

impl DialState {
    pub fn new(center: Landmark) -> Self {
        Self {
            center,
            last_angle: None,
            accumulated: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DialStep {
    pub state: DialState,
    pub delta_revolutions: f64,
    /// Set when the fingertip was inside the dead zone.
    pub dead_zone: bool,
}

/// Advances the dial by one fingertip sample. Inside the dead zone the delta
/// is zero and the reference angle is cleared, so re-entry starts fresh.
pub fn dial_step(state: DialState, index_tip: Landmark) -> DialStep {
    let dx = index_tip.x - state.center.x;
    let dy = index_tip.y - state.center.y;
    if dx.hypot(dy) < DIAL_DEAD_ZONE {
        return DialStep {
            state: DialState {
                last_angle: None,
                ..state
            },
            delta_revolutions: 0.0,
            dead_zone: true,
        };
    }
    let theta = dy.atan2(dx);
    let delta = state.last_angle.map_or(0.0, |last| wrap_angle(theta - last));
    DialStep {
        state: DialState {
            center: state.center,
            last_angle: Some(theta),
            accumulated: state.accumulated + delta,
        },
        delta_revolutions: delta / TAU,
        dead_zone: false,
    }
}
