//! Per-widget gestural activation: hold to trigger, tolerate brief detector
//! dropouts, then cool down before the widget can prime again.
//!
//! ```text
//! Idle --match--> Priming --held >= duration--> Triggered
//!                   |  ^                          |-- discrete ----> Cooldown
//!       dropout > grace                           `-- continuous --> Active
//!                   v                                   | loss > grace
//!                 Idle <------ remaining <= 0 ------- Cooldown <-- Released
//! ```

use serde::{Deserialize, Serialize};

use crate::gesture::{dial_step, BimanualKind, DialState, FramePoses, FramingRegion, HandPoseKind};
use crate::landmark::{point_in_rect, Handedness, Landmark};
use crate::widget::{GestureKind, GestureWidget, HandPreference};

/// Unmatched time tolerated before priming or an active hold is abandoned.
pub const DROPOUT_GRACE_MS: i64 = 150;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase")]
pub enum Phase {
    Idle,
    Priming { held_ms: i64, dropout_ms: i64 },
    Active { dropout_ms: i64 },
    Cooldown { remaining_ms: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivationState {
    pub phase: Phase,
    pub dial: Option<DialState>,
}

impl Default for ActivationState {
    fn default() -> Self {
        Self {
            phase: Phase::Idle,
            dial: None,
        }
    }
}

/// The keypoint or region that satisfied a widget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GestureAnchor {
    Point { at: Landmark },
    Region { region: FramingRegion },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventKind {
    Triggered {
        anchor: GestureAnchor,
    },
    ContinuousUpdate {
        anchor: GestureAnchor,
        /// Dial movement since the previous update, for dialling widgets.
        delta_revolutions: Option<f64>,
    },
    Released,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivationEvent {
    pub widget_id: String,
    pub kind: EventKind,
    pub t_ms: i64,
}

/// What the presenter overlay shows for a widget.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Feedback {
    /// Hold progress in `[0, 1]` while priming.
    pub progress: Option<f64>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivationStep {
    pub state: ActivationState,
    pub events: Vec<ActivationEvent>,
    pub feedback: Feedback,
}

fn hand_allowed(pref: HandPreference, h: Handedness) -> bool {
    match pref {
        HandPreference::Either => true,
        HandPreference::Left => h == Handedness::Left,
        HandPreference::Right => h == Handedness::Right,
    }
}

/// The anchor of the first pose in `poses` that satisfies `w`, if any.
pub fn match_pose(w: &GestureWidget, poses: &FramePoses) -> Option<GestureAnchor> {
    let single = |kind: HandPoseKind, use_tip: bool| {
        poses
            .hands
            .iter()
            .filter(|p| p.kind == kind && hand_allowed(w.hand, p.handedness))
            .map(|p| if use_tip { p.index_tip } else { p.palm_center })
            .find(|pt| point_in_rect(pt, &w.region))
            .map(|at| GestureAnchor::Point { at })
    };
    match w.gesture {
        GestureKind::OpenHand => single(HandPoseKind::OpenHand, false),
        GestureKind::Pointing | GestureKind::Dialling => single(HandPoseKind::Pointing, true),
        GestureKind::RectangularFraming | GestureKind::RangeFraming => {
            let want = if w.gesture == GestureKind::RectangularFraming {
                BimanualKind::RectangularFraming
            } else {
                BimanualKind::RangeFraming
            };
            let pose = poses.bimanual.as_ref()?;
            let inside = pose.palm_centers.iter().all(|c| point_in_rect(c, &w.region));
            match (pose.kind == want && inside, pose.region) {
                (true, Some(region)) => Some(GestureAnchor::Region { region }),
                _ => None,
            }
        }
    }
}

fn anchor_point(anchor: &GestureAnchor) -> Option<Landmark> {
    match anchor {
        GestureAnchor::Point { at } => Some(*at),
        GestureAnchor::Region { .. } => None,
    }
}

/// Advances one widget by one frame. Pure: the result depends only on the
/// arguments.
pub fn step_activation(
    w: &GestureWidget,
    s: ActivationState,
    t_ms: i64,
    poses: &FramePoses,
    dt_ms: i64,
) -> ActivationStep {
    let dt = dt_ms.max(0);
    let matched = match_pose(w, poses);
    let mut events = Vec::new();
    let mut emit = |kind: EventKind| {
        events.push(ActivationEvent {
            widget_id: w.id.clone(),
            kind,
            t_ms,
        })
    };
    let duration = w.recognition_duration_ms.max(1);
    let cooldown = Phase::Cooldown {
        remaining_ms: w.redetection_interval_ms.max(0),
    };

    let mut dial = s.dial;
    let mut progress = None;
    let phase = match (s.phase, matched) {
        (Phase::Idle, None) => Phase::Idle,
        (Phase::Idle, Some(_)) => {
            progress = Some(0.0);
            Phase::Priming {
                held_ms: 0,
                dropout_ms: 0,
            }
        }
        (Phase::Priming { held_ms, .. }, Some(anchor)) => {
            let held = (held_ms + dt).min(duration);
            if held >= duration {
                emit(EventKind::Triggered { anchor });
                if w.is_continuous() {
                    if w.gesture == GestureKind::Dialling {
                        let center = w.region.center();
                        let start = DialState::new(Landmark::planar(center.0, center.1));
                        dial = anchor_point(&anchor).map(|tip| dial_step(start, tip).state);
                    }
                    Phase::Active { dropout_ms: 0 }
                } else {
                    cooldown
                }
            } else {
                progress = Some(held as f64 / duration as f64);
                Phase::Priming {
                    held_ms: held,
                    dropout_ms: 0,
                }
            }
        }
        (Phase::Priming { held_ms, dropout_ms }, None) => {
            let dropout = dropout_ms + dt;
            if dropout > DROPOUT_GRACE_MS {
                Phase::Idle
            } else {
                progress = Some(held_ms as f64 / duration as f64);
                Phase::Priming {
                    held_ms,
                    dropout_ms: dropout,
                }
            }
        }
        (Phase::Active { .. }, Some(anchor)) => {
            let mut delta = None;
            if w.gesture == GestureKind::Dialling {
                if let (Some(state), Some(tip)) = (dial, anchor_point(&anchor)) {
                    let step = dial_step(state, tip);
                    dial = Some(step.state);
                    delta = Some(step.delta_revolutions);
                }
            }
            emit(EventKind::ContinuousUpdate {
                anchor,
                delta_revolutions: delta,
            });
            Phase::Active { dropout_ms: 0 }
        }
        (Phase::Active { dropout_ms }, None) => {
            let dropout = dropout_ms + dt;
            if dropout > DROPOUT_GRACE_MS {
                emit(EventKind::Released);
                dial = None;
                cooldown
            } else {
                Phase::Active { dropout_ms: dropout }
            }
        }
        (Phase::Cooldown { remaining_ms }, _) => {
            let remaining = remaining_ms - dt;
            if remaining <= 0 {
                Phase::Idle
            } else {
                Phase::Cooldown {
                    remaining_ms: remaining,
                }
            }
        }
    };

    ActivationStep {
        state: ActivationState { phase, dial },
        events,
        feedback: Feedback {
            progress,
            matched: matched.is_some(),
        },
    }
}
