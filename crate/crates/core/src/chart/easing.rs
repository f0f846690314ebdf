//! Easing curves and the affect profiles that select them per transition.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Easing {
    Linear,
    EaseInCubic,
    EaseOutCubic,
    EaseInOutCubic,
    EaseOutBounce,
    EaseOutElastic,
    SlowInLong,
}

impl Easing {
    pub const ALL: [Easing; 7] = [
        Easing::Linear,
        Easing::EaseInCubic,
        Easing::EaseOutCubic,
        Easing::EaseInOutCubic,
        Easing::EaseOutBounce,
        Easing::EaseOutElastic,
        Easing::SlowInLong,
    ];

    /// Curves that never leave `[0, 1]` and never decrease.
    pub fn is_monotone(self) -> bool {
        !matches!(self, Easing::EaseOutBounce | Easing::EaseOutElastic)
    }
}

/// Decay rate of the elastic tail. Keeps the first overshoot under 25%.
const ELASTIC_DECAY: f64 = 15.0;

/// Evaluates `kind` at `u`, clamping `u` into `[0, 1]`. Endpoints are exact.
pub fn ease(kind: Easing, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    match kind {
        Easing::Linear => u,
        Easing::EaseInCubic | Easing::SlowInLong => u * u * u,
        Easing::EaseOutCubic => 1.0 - (1.0 - u).powi(3),
        Easing::EaseInOutCubic => {
            if u < 0.5 {
                4.0 * u * u * u
            } else {
                1.0 - (-2.0 * u + 2.0).powi(3) / 2.0
            }
        }
        Easing::EaseOutBounce => bounce_out(u),
        Easing::EaseOutElastic => {
            2f64.powf(-ELASTIC_DECAY * u) * ((10.0 * u - 0.75) * (TAU / 3.0)).sin() + 1.0
        }
    }
}

fn bounce_out(u: f64) -> f64 {
    const N1: f64 = 7.5625;
    const D1: f64 = 2.75;
    if u < 1.0 / D1 {
        N1 * u * u
    } else if u < 2.0 / D1 {
        let v = u - 1.5 / D1;
        N1 * v * v + 0.75
    } else if u < 2.5 / D1 {
        let v = u - 2.25 / D1;
        N1 * v * v + 0.9375
    } else {
        let v = u - 2.625 / D1;
        N1 * v * v + 0.984375
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorphDirection {
    OnDecrease,
    OnIncrease,
    Always,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorphSpec {
    pub icon: String,
    pub direction: MorphDirection,
    #[serde(default)]
    pub threshold: f64,
}

impl MorphSpec {
    /// Whether a mark whose bound value moves `from → to` morphs.
    pub fn applies(&self, from: f64, to: f64) -> bool {
        let delta = to - from;
        match self.direction {
            MorphDirection::OnDecrease => delta < 0.0 && -delta >= self.threshold,
            MorphDirection::OnIncrease => delta > 0.0 && delta >= self.threshold,
            MorphDirection::Always => delta.abs() >= self.threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AffectPreset {
    Positive,
    Neutral,
    Negative,
}

/// Easing, duration and optional icon morph for one keyframe transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "AffectRepr")]
pub struct AffectProfile {
    pub easing: Easing,
    pub duration_ms: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morph: Option<MorphSpec>,
}

impl AffectProfile {
    pub fn preset(preset: AffectPreset) -> Self {
        let (easing, duration_ms) = match preset {
            AffectPreset::Positive => (Easing::EaseOutBounce, 900),
            AffectPreset::Neutral => (Easing::Linear, 1000),
            AffectPreset::Negative => (Easing::SlowInLong, 2500),
        };
        Self {
            easing,
            duration_ms,
            morph: None,
        }
    }
}

impl Default for AffectProfile {
    fn default() -> Self {
        Self::preset(AffectPreset::Neutral)
    }
}

/// Config form: either a preset name or a full profile.
#[derive(Deserialize)]
#[serde(untagged)]
enum AffectRepr {
    Preset(AffectPreset),
    Full {
        easing: Easing,
        duration_ms: i64,
        #[serde(default)]
        morph: Option<MorphSpec>,
    },
}

impl From<AffectRepr> for AffectProfile {
    fn from(r: AffectRepr) -> Self {
        match r {
            AffectRepr::Preset(p) => AffectProfile::preset(p),
            AffectRepr::Full {
                easing,
                duration_ms,
                morph,
            } => AffectProfile {
                easing,
                duration_ms,
                morph,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        for kind in Easing::ALL {
            assert_eq!(ease(kind, 0.0), 0.0, "{kind:?}");
            assert_eq!(ease(kind, 1.0), 1.0, "{kind:?}");
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(ease(Easing::Linear, 0.5), 0.5);
        assert_eq!(ease(Easing::EaseInCubic, 0.5), 0.125);
        assert_eq!(ease(Easing::SlowInLong, 0.5), 0.125);
        assert_eq!(ease(Easing::EaseInOutCubic, 0.5), 0.5);
        assert_eq!(ease(Easing::EaseOutCubic, 0.5), 0.875);
    }

    #[test]
    fn overshoot_is_bounded() {
        for kind in [Easing::EaseOutBounce, Easing::EaseOutElastic] {
            for i in 0..=10_000 {
                let v = ease(kind, i as f64 / 10_000.0);
                assert!((-0.25..=1.25).contains(&v), "{kind:?} {v}");
            }
        }
    }

    #[test]
    fn affect_from_preset_or_object() {
        let p: AffectProfile = serde_json::from_str(r#""negative""#).unwrap();
        assert_eq!(p.easing, Easing::SlowInLong);
        let p: AffectProfile = serde_json::from_str(
            r#"{"easing":"EaseOutElastic","duration_ms":700,"morph":{"icon":"down-arrow","direction":"on_decrease","threshold":2.0}}"#,
        )
        .unwrap();
        assert_eq!(p.duration_ms, 700);
        let m = p.morph.unwrap();
        assert!(m.applies(70.0, 60.0));
        assert!(!m.applies(70.0, 69.0));
        assert!(!m.applies(60.0, 70.0));
    }
}
