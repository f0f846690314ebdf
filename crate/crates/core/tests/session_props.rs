mod common;

use common::{fixture_project, fixture_session, fixture_trace, fixture_with_segment};
use gesturecast_core::foreshadow::fade_envelope;
use gesturecast_core::scene::{serialize_frame, NodeKind};
use gesturecast_core::session::{handle_message, ErrorCode, Message, Recipient, Role, Session, SessionError};
use gesturecast_core::synth::{frame, pointing_at, HandBuilder};
use gesturecast_core::widget::EventKind;
use gesturecast_core::{Handedness, LandmarkFrame};
use proptest::prelude::*;

fn hand_frame(t_ms: i64, kind: u8, x: f64, y: f64) -> LandmarkFrame {
    let hands = match kind {
        0 => vec![],
        1 => vec![pointing_at(Handedness::Right, (x, y))],
        _ => vec![HandBuilder::new(Handedness::Right).at(x, y).build()],
    };
    frame(t_ms, hands)
}

fn synthetic_frames() -> impl Strategy<Value = Vec<LandmarkFrame>> {
    prop::collection::vec((10i64..60, 0u8..3, 0.15..0.85f64, 0.2..0.8f64), 1..150).prop_map(|steps| {
        let mut t = 0;
        steps
            .into_iter()
            .map(|(gap, kind, x, y)| {
                t += gap;
                hand_frame(t, kind, x, y)
            })
            .collect()
    })
}

fn audience_message() -> impl Strategy<Value = Message> {
    prop_oneof![
        (0i64..100_000, 0.2..0.8f64).prop_map(|(t, x)| Message::Landmarks { frame: hand_frame(t, 1, x, 0.5) }),
        (prop::sample::select(vec!["wealth", "race", "nope"]), -2.0..10.0f64)
            .prop_map(|(c, p)| Message::Seek { chart_id: c.into(), p }),
        prop::sample::select(vec!["story", "race"]).prop_map(|s| Message::SelectSegment { segment_id: s.into() }),
        Just(Message::Load { presentation: fixture_project().presentation.clone() }),
    ]
}

fn fingerprint(s: &Session) -> (String, String, Option<i64>, String) {
    let (p, a) = s.current_frames();
    (serialize_frame(&p), serialize_frame(&a), s.clock(), s.active_segment().to_string())
}

proptest! {
    #[test]
    fn audience_cannot_change_state(frames in synthetic_frames(), noise in prop::collection::vec((any::<prop::sample::Index>(), audience_message()), 0..20)) {
        let mut quiet = fixture_session();
        let mut noisy = fixture_session();
        let mut noise = noise;
        noise.sort_by_key(|(i, _)| i.index(frames.len()));
        let mut pending = noise.into_iter().peekable();
        for (i, f) in frames.iter().enumerate() {
            while let Some((at, msg)) = pending.peek() {
                if at.index(frames.len()) != i {
                    break;
                }
                let out = handle_message(&mut noisy, msg.clone(), Role::Audience);
                prop_assert_eq!(out.len(), 1);
                prop_assert_eq!(out[0].to, Recipient::Sender);
                let unauthorized = matches!(out[0].message, Message::Error { code: ErrorCode::Unauthorized, .. });
                prop_assert!(unauthorized);
                pending.next();
            }
            let a = handle_message(&mut quiet, Message::Landmarks { frame: f.clone() }, Role::Presenter);
            let b = handle_message(&mut noisy, Message::Landmarks { frame: f.clone() }, Role::Presenter);
            prop_assert_eq!(a, b);
        }
        prop_assert_eq!(fingerprint(&quiet), fingerprint(&noisy));
    }

    #[test]
    fn replay_is_deterministic(frames in synthetic_frames()) {
        let run = || {
            let mut s = fixture_session();
            let mut out = Vec::new();
            for f in &frames {
                let t = s.tick(f).unwrap();
                out.push((serialize_frame(&t.presenter), serialize_frame(&t.audience), t.events.len()));
            }
            out
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn stale_frames_leave_state_untouched(frames in synthetic_frames(), back in 1i64..500) {
        let mut s = fixture_session();
        for f in &frames {
            s.tick(f).unwrap();
        }
        let before = fingerprint(&s);
        let clock = s.clock().unwrap();
        let stale = hand_frame(clock - back, 1, 0.5, 0.5);
        let is_stale = matches!(s.tick(&stale), Err(SessionError::StaleFrame { .. }));
        prop_assert!(is_stale);
        let out = handle_message(&mut s, Message::Landmarks { frame: stale }, Role::Presenter);
        let is_stale_reply = matches!(out[0].message, Message::Error { code: ErrorCode::StaleFrame, .. });
        prop_assert!(is_stale_reply);
        prop_assert_eq!(fingerprint(&s), before);
        // An equal timestamp is not stale.
        prop_assert!(s.tick(&hand_frame(clock, 0, 0.5, 0.5)).is_ok());
    }
}

#[test]
fn foreshadowing_never_moves_playback() {
    let trace = fixture_trace("scenario.trace");
    let mut with = fixture_session();
    let story = fixture_project().presentation.segments[0].widgets.clone();
    let without_ids = story.into_iter().filter(|w| w != "frame-foreshadow").collect();
    let mut without = Session::new("default", fixture_with_segment("story", without_ids));
    let mut foreshadowed = 0;
    for f in &trace.frames {
        let a = with.tick(f).unwrap();
        let b = without.tick(f).unwrap();
        assert_eq!(with.playback("wealth"), without.playback("wealth"), "t={}", f.t_ms);
        let positions = |nodes: &[gesturecast_core::scene::SceneNode]| -> Vec<(String, [f64; 2])> {
            nodes
                .iter()
                .filter_map(|n| match &n.kind {
                    NodeKind::Mark { key, position, outline: false, .. } => Some((key.clone(), *position)),
                    _ => None,
                })
                .collect()
        };
        assert_eq!(positions(&a.audience.nodes), positions(&b.audience.nodes), "t={}", f.t_ms);
        if a.audience.nodes.iter().any(|n| matches!(n.kind, NodeKind::Path { .. })) {
            foreshadowed += 1;
        }
    }
    assert!(foreshadowed > 10, "{foreshadowed}");
}

#[test]
fn released_trajectories_fade_out() {
    let project = fixture_project();
    let fade = match project.presentation.widget("frame-foreshadow") {
        Some(gesturecast_core::widget::Widget::Gesture(g)) => g.operation_params.foreshadow.fade_out_ms,
        _ => panic!("missing widget"),
    };
    let mut s = fixture_session();
    let mut released = None;
    let mut checked = 0;
    s.replay(&fixture_trace("scenario.trace"), |out| {
        for e in &out.events {
            if e.widget_id == "frame-foreshadow" && matches!(e.kind, EventKind::Released) {
                released = Some(out.presenter.t_ms);
            }
        }
        let Some(r) = released else { return };
        let t = out.presenter.t_ms;
        for n in &out.audience.nodes {
            if let NodeKind::Path { opacity, .. } = n.kind {
                assert!(opacity <= 0.7 * fade_envelope(t - r, fade) + 1e-9, "t={t} opacity={opacity}");
                checked += 1;
            }
        }
        if t - r >= fade {
            assert!(!out.audience.nodes.iter().any(|n| matches!(n.kind, NodeKind::Path { .. })), "t={t}");
        }
    })
    .unwrap();
    assert!(released.is_some());
    assert!(checked > 0, "fade window produced no trajectory frames");
}
