//! Regenerates the traces and golden frame streams under `fixtures/`.
//!
//! ```text
//! cargo run -p gesturecast-core --example make_fixtures -- fixtures
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use gesturecast_core::landmark::serialize_trace;
use gesturecast_core::scene::{serialize_frame, NodeKind};
use gesturecast_core::session::{Project, Session};
use gesturecast_core::synth::{dial_tip_path, facing_pair_index_tips, frame, pointing_at, HandBuilder};
use gesturecast_core::widget::EventKind;
use gesturecast_core::{HandFrame, Handedness, LandmarkFrame, LandmarkTrace};

const FPS: f64 = 30.0;
const DIAL_CENTER: (f64, f64) = (0.84, 0.70);
const DIAL_RADIUS: f64 = 0.05;

struct Script {
    frames: Vec<LandmarkFrame>,
}

impl Script {
    fn push(&mut self, hands: Vec<HandFrame>) {
        let t = (self.frames.len() as f64 * 1000.0 / FPS).round() as i64;
        self.frames.push(frame(t, hands));
    }

    fn hold(&mut self, n: usize, hands: &[HandFrame]) {
        for _ in 0..n {
            self.push(hands.to_vec());
        }
    }

    fn dial(&mut self, revolutions: f64) {
        let start = (DIAL_CENTER.0 + DIAL_RADIUS, DIAL_CENTER.1);
        self.hold(20, &[pointing_at(Handedness::Right, start)]);
        for tip in dial_tip_path(DIAL_CENTER, DIAL_RADIUS, 0.0, revolutions, 60) {
            self.push(vec![pointing_at(Handedness::Right, tip)]);
        }
    }
}

fn mark_position(session: &Session, key: &str) -> (f64, f64) {
    let (_, audience) = session.current_frames();
    audience
        .nodes
        .iter()
        .find_map(|n| match &n.kind {
            NodeKind::Mark { key: k, position, .. } if k == key => Some((position[0], position[1])),
            _ => None,
        })
        .unwrap_or_else(|| panic!("no mark `{key}`"))
}

fn scenario(session: &Session) -> LandmarkTrace {
    let mut s = Script { frames: Vec::new() };
    s.hold(30, &[]);
    s.hold(45, &[HandBuilder::new(Handedness::Right).at(0.87, 0.25).build()]);
    s.hold(10, &[]);
    let uk = mark_position(session, "United Kingdom");
    s.hold(30, &[pointing_at(Handedness::Right, uk)]);
    s.hold(10, &[]);
    let (l, r) = facing_pair_index_tips((0.22, 0.35), (0.55, 0.7));
    s.hold(40, &[l, r]);
    s.hold(20, &[]);
    s.dial(6.0);
    s.hold(30, &[]);
    LandmarkTrace::new(s.frames)
}

fn dial_circle() -> LandmarkTrace {
    let mut s = Script { frames: Vec::new() };
    s.dial(1.0);
    LandmarkTrace::new(s.frames)
}

fn write_frames(project: &Arc<Project>, trace: &LandmarkTrace, presenter: &Path, audience: &Path) {
    let mut session = Session::new("default", project.clone());
    let (mut p, mut a) = (String::new(), String::new());
    session
        .replay(trace, |out| {
            for e in &out.events {
                if !matches!(e.kind, EventKind::ContinuousUpdate { .. }) {
                    println!("{:>6} ms  {:<18} {:?}", e.t_ms, e.widget_id, e.kind);
                }
            }
            p.push_str(&serialize_frame(&out.presenter));
            p.push('\n');
            a.push_str(&serialize_frame(&out.audience));
            a.push('\n');
        })
        .expect("trace replays");
    let end = session.playback("wealth").map(|pb| pb.position);
    println!("final playback position: {end:?}");
    fs::write(presenter, p).unwrap();
    fs::write(audience, a).unwrap();
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    let project = Arc::new(Project::load(&dir.join("scenario.cfg")).expect("fixture config loads"));
    let session = Session::new("default", project.clone());

    let trace = scenario(&session);
    fs::write(dir.join("scenario.trace"), serialize_trace(&trace)).unwrap();
    write_frames(
        &project,
        &trace,
        &dir.join("scenario.presenter.frames"),
        &dir.join("scenario.audience.frames"),
    );

    let dial = dial_circle();
    fs::write(dir.join("dial_circle.trace"), serialize_trace(&dial)).unwrap();
    println!(
        "scenario: {} frames, dial_circle: {} frames",
        trace.frames.len(),
        dial.frames.len()
    );
}
