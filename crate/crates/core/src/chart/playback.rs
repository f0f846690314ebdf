use serde::{Deserialize, Serialize};

/// Continuous playback position in keyframe units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaybackState {
    pub position: f64,
    /// Keyframe units advanced per full dial revolution.
    pub revolution_span: f64,
    /// `n - 1` for a chart with `n` keyframes.
    pub max_position: f64,
}

impl PlaybackState {
    pub fn new(keyframe_count: usize, revolution_span: f64) -> Self {
        Self {
            position: 0.0,
            revolution_span,
            max_position: keyframe_count.saturating_sub(1) as f64,
        }
    }
}

pub fn playback_step(state: PlaybackState, delta_revolutions: f64) -> PlaybackState {
    seek(state, state.position + delta_revolutions * state.revolution_span)
}

pub fn seek(state: PlaybackState, target: f64) -> PlaybackState {
    PlaybackState {
        position: target.clamp(0.0, state.max_position),
        ..state
    }
}
