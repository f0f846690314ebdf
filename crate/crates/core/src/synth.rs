//! Synthetic planar hands and traces.
//!
//! Hands are built from a canonical upright skeleton where each finger's PIP
//! interior angle is set directly, then mirrored, rotated, scaled and
//! translated so that a chosen anchor (palm center or index tip) lands on a
//! given point. Used for tests, benchmarks and fixture generation.

use std::f64::consts::TAU;

use crate::gesture::Finger;
use crate::landmark::{HandFrame, Handedness, Landmark, LandmarkFrame, LandmarkTrace, LANDMARK_COUNT};
use crate::templates::{inline_tables, template, TemplateKind};
use crate::widget::Presentation;

pub const ALPHA_STRAIGHT: f64 = 180.0;
pub const ALPHA_HALF: f64 = 90.0;
pub const ALPHA_FOLDED: f64 = 30.0;
pub const DEFAULT_HAND_SCALE: f64 = 0.08;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Anchor {
    Palm(f64, f64),
    IndexTip(f64, f64),
}

#[derive(Debug, Clone)]
pub struct HandBuilder {
    handedness: Handedness,
    anchor: Anchor,
    rotation: f64,
    scale: f64,
    mirror: bool,
    confidence: f64,
    alphas: [f64; 5],
}

type P = (f64, f64);

fn rot(v: P, a: f64) -> P {
    let (s, c) = a.sin_cos();
    (v.0 * c - v.1 * s, v.0 * s + v.1 * c)
}

fn add(a: P, b: P, k: f64) -> P {
    (a.0 + b.0 * k, a.1 + b.1 * k)
}

fn unit(v: P) -> P {
    let n = v.0.hypot(v.1);
    (v.0 / n, v.1 / n)
}

impl HandBuilder {
    /// Open hand with its palm centered on screen. Left hands are mirrored so
    /// that a default left/right pair faces each other.
    pub fn new(handedness: Handedness) -> Self {
        Self {
            handedness,
            anchor: Anchor::Palm(0.5, 0.5),
            rotation: 0.0,
            scale: DEFAULT_HAND_SCALE,
            mirror: handedness == Handedness::Left,
            confidence: 0.95,
            alphas: [ALPHA_STRAIGHT; 5],
        }
    }

    /// Places the palm center.
    pub fn at(mut self, x: f64, y: f64) -> Self {
        self.anchor = Anchor::Palm(x, y);
        self
    }

    pub fn index_tip_at(mut self, x: f64, y: f64) -> Self {
        self.anchor = Anchor::IndexTip(x, y);
        self
    }

    pub fn rotate(mut self, radians: f64) -> Self {
        self.rotation = radians;
        self
    }

    pub fn scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn mirrored(mut self, mirror: bool) -> Self {
        self.mirror = mirror;
        self
    }

    pub fn confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    pub fn curl(mut self, finger: Finger, alpha_deg: f64) -> Self {
        self.alphas[finger as usize] = alpha_deg;
        self
    }

    pub fn curl_all(mut self, alpha_deg: f64) -> Self {
        self.alphas = [alpha_deg; 5];
        self
    }

    /// Index straight, the other four fingers folded.
    pub fn pointing(self) -> Self {
        self.curl_all(ALPHA_FOLDED).curl(Finger::Index, ALPHA_STRAIGHT)
    }

    fn skeleton(&self) -> [P; LANDMARK_COUNT] {
        let mut pts = [(0.0, 0.0); LANDMARK_COUNT];
        // Thumb: CMC, then MCP/IP/TIP chain.
        pts[1] = (-0.35, -0.25);
        pts[2] = (-0.55, -0.45);
        let thumb_dir = unit((-0.6, -0.8));
        let thumb_mcp = pts[2];
        self.chain(&mut pts, Finger::Thumb, thumb_mcp, thumb_dir, 0.35, 0.35);
        let bases: [(Finger, P, P); 4] = [
            (Finger::Index, (-0.32, -1.0), (-0.08, -1.0)),
            (Finger::Middle, (-0.1, -1.05), (0.0, -1.0)),
            (Finger::Ring, (0.12, -1.0), (0.06, -1.0)),
            (Finger::Pinky, (0.32, -0.9), (0.14, -1.0)),
        ];
        for (finger, mcp, dir) in bases {
            self.chain(&mut pts, finger, mcp, unit(dir), 0.45, 0.5);
        }
        pts
    }

    fn chain(&self, pts: &mut [P; LANDMARK_COUNT], finger: Finger, mcp: P, dir: P, l1: f64, l2: f64) {
        let (mcp_i, pip_i, tip_i) = finger.joints();
        let pip = add(mcp, dir, l1);
        let back = (-dir.0, -dir.1);
        let tip_dir = rot(back, self.alphas[finger as usize].to_radians());
        pts[mcp_i] = mcp;
        pts[pip_i] = pip;
        // DIP sits halfway along PIP→TIP; for the thumb pip_i + 1 == tip_i.
        if tip_i - pip_i == 2 {
            pts[pip_i + 1] = add(pip, tip_dir, l2 * 0.5);
        }
        pts[tip_i] = add(pip, tip_dir, l2);
    }

    pub fn build(&self) -> HandFrame {
        let local = self.skeleton();
        let placed: Vec<P> = local
            .iter()
            .map(|&(x, y)| {
                let x = if self.mirror { -x } else { x };
                let (x, y) = rot((x, y), self.rotation);
                (x * self.scale, y * self.scale)
            })
            .collect();
        let anchor_local = match self.anchor {
            Anchor::Palm(..) => {
                let idx = [0usize, 5, 17];
                (
                    idx.iter().map(|&i| placed[i].0).sum::<f64>() / 3.0,
                    idx.iter().map(|&i| placed[i].1).sum::<f64>() / 3.0,
                )
            }
            Anchor::IndexTip(..) => placed[8],
        };
        let target = match self.anchor {
            Anchor::Palm(x, y) | Anchor::IndexTip(x, y) => (x, y),
        };
        let mut landmarks = [Landmark::default(); LANDMARK_COUNT];
        for (l, p) in landmarks.iter_mut().zip(&placed) {
            *l = Landmark::planar(p.0 - anchor_local.0 + target.0, p.1 - anchor_local.1 + target.1);
        }
        HandFrame {
            handedness: self.handedness,
            confidence: self.confidence,
            landmarks,
        }
    }
}

/// Facing left/right hands with all fingers at `alpha_deg`, palm centers at
/// the given points.
pub fn facing_pair_palms(a: P, b: P, alpha_deg: f64) -> (HandFrame, HandFrame) {
    (
        HandBuilder::new(Handedness::Left).at(a.0, a.1).curl_all(alpha_deg).build(),
        HandBuilder::new(Handedness::Right).at(b.0, b.1).curl_all(alpha_deg).build(),
    )
}

/// Facing hands with bent index fingers whose tips sit at `a` and `b`.
pub fn facing_pair_index_tips(a: P, b: P) -> (HandFrame, HandFrame) {
    (
        HandBuilder::new(Handedness::Left)
            .index_tip_at(a.0, a.1)
            .curl(Finger::Index, ALPHA_HALF)
            .build(),
        HandBuilder::new(Handedness::Right)
            .index_tip_at(b.0, b.1)
            .curl(Finger::Index, ALPHA_HALF)
            .build(),
    )
}

/// Timestamp of frame `i` at `fps`, rounded to whole milliseconds.
pub fn frame_time(i: usize, fps: f64) -> i64 {
    (i as f64 * 1000.0 / fps).round() as i64
}

pub fn frame(t_ms: i64, hands: Vec<HandFrame>) -> LandmarkFrame {
    LandmarkFrame {
        t_ms,
        mirrored: true,
        hands,
    }
}

/// Pointing right hand whose index tip traces `revolutions` turns around
/// `center`, sampled `steps_per_rev` times per turn, starting at angle
/// `start_angle`. Positive revolutions are screen-clockwise.
pub fn dial_tip_path(
    center: P,
    radius: f64,
    start_angle: f64,
    revolutions: f64,
    steps_per_rev: usize,
) -> Vec<(f64, f64)> {
    let steps = (revolutions.abs() * steps_per_rev as f64).round() as usize;
    let dir = revolutions.signum();
    (0..=steps)
        .map(|i| {
            let a = start_angle + dir * TAU * i as f64 / steps_per_rev as f64;
            (center.0 + radius * a.cos(), center.1 + radius * a.sin())
        })
        .collect()
}

pub fn pointing_at(handedness: Handedness, tip: P) -> HandFrame {
    HandBuilder::new(handedness)
        .index_tip_at(tip.0, tip.1)
        .pointing()
        .build()
}

/// Scatter presentation over `n_marks` synthetic entities and three years,
/// with the data inlined.
pub fn stress_presentation(n_marks: usize) -> Presentation {
    let (p, _) = template(TemplateKind::Scatter);
    let frac = |v: f64| v - v.floor();
    let mut csv = String::from("country,year,gdp,life,population,region\n");
    let regions = ["North", "South", "East", "West"];
    for i in 0..n_marks {
        for (j, year) in [2000, 2010, 2020].into_iter().enumerate() {
            let u = frac(i as f64 * 0.618_033_988_75 + j as f64 * 0.071);
            let v = frac(i as f64 * 0.414_213_562_37 + j as f64 * 0.053);
            let gdp = 300.0 * (50_000.0f64 / 300.0).powf(u);
            let life = 40.0 + 45.0 * v;
            let pop = 1.0 + (i % 97) as f64;
            csv.push_str(&format!("e{i:05},{year},{gdp:.3},{life:.3},{pop},{}\n", regions[i % 4]));
        }
    }
    inline_tables(p, &csv)
}

/// Two-hand trace for [`stress_presentation`]: alternating spells of a
/// framing pair over the chart and a pointing hand plus a dialling hand.
pub fn stress_trace(n_frames: usize) -> LandmarkTrace {
    let frames = (0..n_frames)
        .map(|i| {
            let t = frame_time(i, 30.0);
            let phase = i % 150;
            let wobble = 0.02 * (i as f64 * 0.1).sin();
            let hands = if phase < 60 {
                let (l, r) = facing_pair_index_tips((0.2 + wobble, 0.3), (0.6, 0.75 + wobble));
                vec![l, r]
            } else {
                let a = TAU * (phase - 60) as f64 / 45.0;
                vec![
                    pointing_at(Handedness::Left, (0.35 + wobble, 0.5)),
                    pointing_at(Handedness::Right, (0.84 + 0.05 * a.cos(), 0.7 + 0.05 * a.sin())),
                ]
            };
            frame(t, hands)
        })
        .collect();
    LandmarkTrace::new(frames)
}
