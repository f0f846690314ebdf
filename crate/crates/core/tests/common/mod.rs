//! Shared oracles and generators for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gesturecast_core::chart::{
    AffectProfile, AxisSpec, ChartBindings, ChartModel, ChartSpec, ChartType, DataTable, Easing, IconSet, Record,
    ScaleKind, ScalesSpec, TableBindings,
};
use gesturecast_core::gesture::classify_frame;
use gesturecast_core::session::{Project, Session};
use gesturecast_core::synth::{facing_pair_palms, frame, pointing_at, HandBuilder, ALPHA_FOLDED, ALPHA_HALF, ALPHA_STRAIGHT};
use gesturecast_core::widget::{step_activation, ActivationState, EventKind, GestureKind, GestureWidget, Operation};
use gesturecast_core::{HandFrame, Handedness, LandmarkFrame, NormRect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_project() -> Arc<Project> {
    Arc::new(Project::load(&fixtures_dir().join("scenario.cfg")).expect("fixture loads"))
}

pub fn fixture_session() -> Session {
    Session::new("default", fixture_project())
}

pub fn fixture_trace(name: &str) -> gesturecast_core::LandmarkTrace {
    let text = std::fs::read(fixtures_dir().join(name)).expect("trace fixture");
    gesturecast_core::landmark::parse_trace(text.as_slice()).expect("trace parses")
}

/// The fixture project with one segment's widget list replaced.
pub fn fixture_with_segment(segment: &str, widgets: Vec<String>) -> Arc<Project> {
    let mut p = fixture_project().presentation.clone();
    p.segments.iter_mut().find(|s| s.id == segment).expect("segment").widgets = widgets;
    Arc::new(Project::compile(p, &fixtures_dir()).expect("compiles"))
}

// ---------------------------------------------------------------------------
// Activation reference machine, written from the rules rather than the code.

pub const GRACE_MS: i64 = 150;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Triggered,
    Update,
    Released,
}

#[derive(Clone, Copy)]
enum RefPhase {
    Idle,
    Priming { held: i64, dropout: i64 },
    Active { dropout: i64 },
    Cooldown { remaining: i64 },
}

/// Events a widget must emit given, per frame, its time and whether the
/// presenter's pose satisfied it.
pub fn oracle_events(duration: i64, cooldown: i64, continuous: bool, frames: &[(i64, bool)]) -> Vec<(i64, Expected)> {
    let mut out = Vec::new();
    let mut phase = RefPhase::Idle;
    let mut last = frames.first().map_or(0, |f| f.0);
    for &(t, m) in frames {
        let dt = t - last;
        last = t;
        phase = match phase {
            RefPhase::Idle if m => RefPhase::Priming { held: 0, dropout: 0 },
            RefPhase::Idle => RefPhase::Idle,
            RefPhase::Priming { held, .. } if m => {
                if held + dt >= duration {
                    out.push((t, Expected::Triggered));
                    if continuous {
                        RefPhase::Active { dropout: 0 }
                    } else {
                        RefPhase::Cooldown { remaining: cooldown }
                    }
                } else {
                    RefPhase::Priming {
                        held: held + dt,
                        dropout: 0,
                    }
                }
            }
            RefPhase::Priming { held, dropout } => {
                if dropout + dt > GRACE_MS {
                    RefPhase::Idle
                } else {
                    RefPhase::Priming {
                        held,
                        dropout: dropout + dt,
                    }
                }
            }
            RefPhase::Active { .. } if m => {
                out.push((t, Expected::Update));
                RefPhase::Active { dropout: 0 }
            }
            RefPhase::Active { dropout } => {
                if dropout + dt > GRACE_MS {
                    out.push((t, Expected::Released));
                    RefPhase::Cooldown { remaining: cooldown }
                } else {
                    RefPhase::Active { dropout: dropout + dt }
                }
            }
            RefPhase::Cooldown { remaining } => {
                if remaining - dt <= 0 {
                    RefPhase::Idle
                } else {
                    RefPhase::Cooldown { remaining: remaining - dt }
                }
            }
        };
    }
    out
}

/// Runs one widget over `frames` through the engine.
pub fn engine_events(w: &GestureWidget, frames: &[LandmarkFrame]) -> Vec<(i64, Expected)> {
    let mut s = ActivationState::default();
    let mut out = Vec::new();
    let mut last = frames.first().map_or(0, |f| f.t_ms);
    for f in frames {
        let step = step_activation(w, s, f.t_ms, &classify_frame(f), f.t_ms - last);
        last = f.t_ms;
        s = step.state;
        out.extend(step.events.iter().map(|e| {
            let kind = match e.kind {
                EventKind::Triggered { .. } => Expected::Triggered,
                EventKind::ContinuousUpdate { .. } => Expected::Update,
                EventKind::Released => Expected::Released,
            };
            (e.t_ms, kind)
        }));
    }
    out
}

// ---------------------------------------------------------------------------
// Synthetic gesture suite.

pub const SUITE_REGION: NormRect = NormRect::new(0.3, 0.25, 0.4, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Center,
    InsideEdge,
    OutsideEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dropout {
    None,
    OneFrame,
    WithinGrace,
    BeyondGrace,
}

impl Dropout {
    pub const ALL: [Dropout; 4] = [Dropout::None, Dropout::OneFrame, Dropout::WithinGrace, Dropout::BeyondGrace];

    /// Missing frames inserted mid-hold at 30 fps.
    fn frames(self) -> usize {
        match self {
            Dropout::None => 0,
            Dropout::OneFrame => 1,
            Dropout::WithinGrace => 4,
            Dropout::BeyondGrace => 7,
        }
    }
}

pub struct Case {
    pub name: String,
    pub widget: GestureWidget,
    pub frames: Vec<LandmarkFrame>,
    /// Whether the constructed pose satisfies the widget, per frame.
    pub matched: Vec<bool>,
    /// Every keypoint of every hand lies outside the widget region.
    pub fully_outside: bool,
}

impl Case {
    pub fn expected(&self) -> Vec<(i64, Expected)> {
        let timeline: Vec<(i64, bool)> = self.frames.iter().map(|f| f.t_ms).zip(self.matched.iter().copied()).collect();
        oracle_events(
            self.widget.recognition_duration_ms,
            self.widget.redetection_interval_ms,
            self.widget.is_continuous(),
            &timeline,
        )
    }

    pub fn actual(&self) -> Vec<(i64, Expected)> {
        engine_events(&self.widget, &self.frames)
    }
}

pub const SUITE_KINDS: [GestureKind; 5] = [
    GestureKind::OpenHand,
    GestureKind::Pointing,
    GestureKind::Dialling,
    GestureKind::RectangularFraming,
    GestureKind::RangeFraming,
];

fn suite_widget(kind: GestureKind) -> GestureWidget {
    let op = match kind {
        GestureKind::OpenHand => Operation::Annotation,
        GestureKind::Pointing => Operation::Selection,
        GestureKind::Dialling => Operation::Playback,
        GestureKind::RectangularFraming => Operation::Foreshadowing,
        GestureKind::RangeFraming => Operation::Selection,
    };
    GestureWidget::new("suite", SUITE_REGION, kind, op, "target")
}

/// Anchor point for a placement, sliding along the region's left edge.
fn anchor(p: Placement) -> (f64, f64) {
    let r = SUITE_REGION;
    match p {
        Placement::Center => r.center(),
        Placement::InsideEdge => (r.x + 0.01, r.y + r.h / 2.0),
        Placement::OutsideEdge => (r.x - 0.01, r.y + r.h / 2.0),
    }
}

/// Hands forming `kind` with their anchor at `at`, and whether the anchor
/// lies in the suite region.
fn pose_hands(kind: GestureKind, at: (f64, f64), phase: f64) -> Vec<HandFrame> {
    match kind {
        GestureKind::OpenHand => vec![HandBuilder::new(Handedness::Right).at(at.0, at.1).build()],
        GestureKind::Pointing => vec![pointing_at(Handedness::Right, at)],
        GestureKind::Dialling => {
            let (x, y) = (at.0 + 0.03 * phase.cos(), at.1 + 0.03 * phase.sin());
            vec![pointing_at(Handedness::Right, (x, y))]
        }
        // The left palm sits at the anchor, the right one inside the region.
        GestureKind::RectangularFraming | GestureKind::RangeFraming => {
            let alpha = if kind == GestureKind::RectangularFraming {
                ALPHA_HALF
            } else {
                ALPHA_STRAIGHT
            };
            let (l, r) = facing_pair_palms(at, (0.6, at.1), alpha);
            vec![l, r]
        }
    }
}

fn anchor_inside(kind: GestureKind, at: (f64, f64), phase: f64) -> bool {
    let pt = match kind {
        GestureKind::Dialling => (at.0 + 0.03 * phase.cos(), at.1 + 0.03 * phase.sin()),
        _ => at,
    };
    SUITE_REGION.contains_xy(pt.0, pt.1)
}

const FRAME_MS: f64 = 1000.0 / 30.0;

fn t_of(i: usize) -> i64 {
    (i as f64 * FRAME_MS).round() as i64
}

/// One trace: idle lead-in, a hold of `hold_frames` with a dropout burst a
/// third of the way in, then idle frames long enough to release.
pub fn hold_case(kind: GestureKind, placement: Placement, hold_frames: usize, dropout: Dropout) -> Case {
    let widget = suite_widget(kind);
    let at = anchor(placement);
    let mut frames = Vec::new();
    let mut matched = Vec::new();
    let mut i = 0;
    let mut push = |hands: Vec<HandFrame>, m: bool, frames: &mut Vec<LandmarkFrame>| {
        frames.push(frame(t_of(i), hands));
        matched.push(m);
        i += 1;
    };
    for _ in 0..5 {
        push(vec![], false, &mut frames);
    }
    let gap_at = hold_frames / 3;
    for h in 0..hold_frames {
        if h == gap_at {
            for _ in 0..dropout.frames() {
                push(vec![], false, &mut frames);
            }
        }
        let phase = h as f64 * 0.2;
        push(pose_hands(kind, at, phase), anchor_inside(kind, at, phase), &mut frames);
    }
    for _ in 0..15 {
        push(vec![], false, &mut frames);
    }
    Case {
        name: format!("{kind:?}/{placement:?}/{hold_frames}f/{dropout:?}"),
        widget,
        frames,
        matched,
        fully_outside: false,
    }
}

/// Traces that must never trigger: wrong poses inside the region, and
/// matching poses moving entirely outside it.
pub fn distractor_cases() -> Vec<Case> {
    let mut cases = Vec::new();
    let center = SUITE_REGION.center();
    let wrong: [(GestureKind, fn((f64, f64)) -> Vec<HandFrame>); 5] = [
        (GestureKind::OpenHand, |p| {
            vec![HandBuilder::new(Handedness::Right).at(p.0, p.1).curl_all(ALPHA_FOLDED).build()]
        }),
        (GestureKind::OpenHand, |p| vec![pointing_at(Handedness::Right, p)]),
        (GestureKind::Pointing, |p| vec![HandBuilder::new(Handedness::Right).index_tip_at(p.0, p.1).build()]),
        (GestureKind::RectangularFraming, |p| {
            vec![
                HandBuilder::new(Handedness::Left).at(p.0 - 0.05, p.1).mirrored(false).curl_all(ALPHA_HALF).build(),
                HandBuilder::new(Handedness::Right).at(p.0 + 0.1, p.1).curl_all(ALPHA_HALF).build(),
            ]
        }),
        (GestureKind::RangeFraming, |p| {
            let (l, r) = facing_pair_palms((p.0 - 0.05, p.1), (p.0 + 0.1, p.1), ALPHA_FOLDED);
            vec![l, r]
        }),
    ];
    for (n, (kind, make)) in wrong.iter().enumerate() {
        for j in 0..5 {
            let p = (center.0 + 0.02 * j as f64 - 0.04, center.1 + 0.03 * j as f64 - 0.06);
            let frames: Vec<LandmarkFrame> = (0..40).map(|i| frame(t_of(i), make(p))).collect();
            cases.push(Case {
                name: format!("wrong-pose-{n}/{j}"),
                widget: suite_widget(*kind),
                matched: vec![false; frames.len()],
                frames,
                fully_outside: false,
            });
        }
    }
    for (n, kind) in SUITE_KINDS.iter().enumerate() {
        for j in 0..5 {
            // Sweep vertically through the strip right of the region.
            let x = 0.84 + 0.01 * j as f64 - 0.02 * (n % 2) as f64;
            let frames: Vec<LandmarkFrame> = (0..45)
                .map(|i| {
                    let y = 0.2 + 0.5 * i as f64 / 44.0;
                    let hands = match kind {
                        GestureKind::RectangularFraming | GestureKind::RangeFraming => {
                            let alpha = if *kind == GestureKind::RectangularFraming {
                                ALPHA_HALF
                            } else {
                                ALPHA_STRAIGHT
                            };
                            let (l, r) = facing_pair_palms((x - 0.04, y), (x + 0.04, y), alpha);
                            vec![l, r]
                        }
                        _ => pose_hands(*kind, (x, y), 0.0),
                    };
                    frame(t_of(i), hands)
                })
                .collect();
            let outside = frames.iter().all(|f| {
                f.hands
                    .iter()
                    .all(|h| h.landmarks.iter().all(|l| !SUITE_REGION.contains_xy(l.x, l.y)))
            });
            cases.push(Case {
                name: format!("outside-{kind:?}/{j}"),
                widget: suite_widget(*kind),
                matched: vec![false; frames.len()],
                frames,
                fully_outside: outside,
            });
        }
    }
    cases
}

pub const HOLD_FRAMES: [usize; 3] = [10, 16, 30];
pub const PLACEMENTS: [Placement; 3] = [Placement::Center, Placement::InsideEdge, Placement::OutsideEdge];

pub fn gesture_suite() -> Vec<Case> {
    let mut cases = Vec::new();
    for kind in SUITE_KINDS {
        for placement in PLACEMENTS {
            for hold in HOLD_FRAMES {
                for dropout in Dropout::ALL {
                    cases.push(hold_case(kind, placement, hold, dropout));
                }
            }
        }
    }
    cases
}

// ---------------------------------------------------------------------------
// Random chart tables.

pub struct RandomTable {
    pub keys: Vec<String>,
    pub times: Vec<f64>,
    /// `values[k][e]`, `None` where the entity is absent.
    pub values: Vec<Vec<Option<f64>>>,
}

pub fn random_table(rng: &mut ChaCha8Rng) -> RandomTable {
    let n_keys = rng.random_range(2..16);
    let n_times = rng.random_range(2..6);
    let keys: Vec<String> = (0..n_keys).map(|i| format!("k{:02}", (i * 7 + 3) % 97)).collect();
    let times: Vec<f64> = (0..n_times).map(|t| 2000.0 + t as f64).collect();
    let values = (0..n_times)
        .map(|_| {
            (0..n_keys)
                .map(|_| {
                    if rng.random_bool(0.1) {
                        None
                    } else if rng.random_bool(0.2) {
                        // Coarse values so ties occur.
                        Some(rng.random_range(0..5) as f64 * 10.0)
                    } else {
                        Some(rng.random_range(0.0..1000.0))
                    }
                })
                .collect()
        })
        .collect();
    RandomTable { keys, times, values }
}

impl RandomTable {
    pub fn data_table(&self, value_fields: usize) -> DataTable {
        let bindings = TableBindings {
            key_field: "key".into(),
            time_field: "time".into(),
            value_fields: (0..value_fields).map(|i| format!("v{i}")).collect(),
            color_field: None,
        };
        let mut records = Vec::new();
        for (k, t) in self.times.iter().enumerate() {
            for (e, key) in self.keys.iter().enumerate() {
                if let Some(v) = self.values[k][e] {
                    records.push(Record {
                        key: key.clone(),
                        time: *t,
                        values: (0..value_fields).map(|i| v + 1.0 + i as f64 * 3.0).collect(),
                        color: None,
                    });
                }
            }
        }
        DataTable::from_records(bindings, records).expect("valid random table")
    }

    /// Keyframes where at least one entity is present.
    pub fn usable(&self) -> bool {
        self.values.iter().all(|row| row.iter().any(Option::is_some))
    }

    pub fn barrace(&self, top_n: usize, easing: Easing) -> ChartModel {
        let spec = ChartSpec {
            id: "race".into(),
            chart_type: ChartType::BarChartRace,
            frame: NormRect::new(0.1, 0.1, 0.8, 0.8),
            table: "t".into(),
            bindings: ChartBindings {
                value: Some("v0".into()),
                ..Default::default()
            },
            scales: ScalesSpec::default(),
            keyframes: self.times.clone(),
            top_n,
            affect_per_transition: (1..self.times.len())
                .map(|_| AffectProfile {
                    easing,
                    duration_ms: 1000,
                    morph: None,
                })
                .collect(),
            base_opacity: 0.8,
            revolution_span: 1.0,
        };
        ChartModel::new(spec, &self.data_table(1), &IconSet::builtin()).expect("valid bar race")
    }

    pub fn scatter(&self, easing: Easing, log_x: bool) -> ChartModel {
        let spec = ChartSpec {
            id: "scatter".into(),
            chart_type: ChartType::Scatterplot,
            frame: NormRect::new(0.1, 0.1, 0.8, 0.8),
            table: "t".into(),
            bindings: ChartBindings {
                x: Some("v0".into()),
                y: Some("v1".into()),
                size: Some("v2".into()),
                value: None,
            },
            scales: ScalesSpec {
                x: AxisSpec {
                    kind: if log_x { ScaleKind::Log10 } else { ScaleKind::Linear },
                    domain: Some(if log_x { [1.0, 2000.0] } else { [0.0, 1100.0] }),
                },
                y: AxisSpec {
                    kind: ScaleKind::Linear,
                    domain: Some([0.0, 1100.0]),
                },
                ..Default::default()
            },
            keyframes: self.times.clone(),
            top_n: 10,
            affect_per_transition: (1..self.times.len())
                .map(|_| AffectProfile {
                    easing,
                    duration_ms: 1000,
                    morph: None,
                })
                .collect(),
            base_opacity: 0.8,
            revolution_span: 1.0,
        };
        ChartModel::new(spec, &self.data_table(3), &IconSet::builtin()).expect("valid scatter")
    }

    /// Brute-force ranks at keyframe `k`: count entities strictly ahead.
    pub fn oracle_ranks(&self, k: usize) -> BTreeMap<String, u32> {
        let row = &self.values[k];
        let mut out = BTreeMap::new();
        for (e, v) in row.iter().enumerate() {
            let Some(v) = v else { continue };
            let ahead = row
                .iter()
                .enumerate()
                .filter(|(o, w)| match w {
                    Some(w) => w > v || (w == v && self.keys[*o] < self.keys[e]),
                    None => false,
                })
                .count();
            out.insert(self.keys[e].clone(), ahead as u32 + 1);
        }
        out
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
