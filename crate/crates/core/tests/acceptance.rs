//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use common::{distractor_cases, fixture_project, fixture_session, fixture_trace, gesture_suite, random_table, rng};
use gesturecast_core::chart::shape::SHAPE_POINTS;
use gesturecast_core::chart::{align_to, ease, morph_envelope, morph_shape, Easing, IconSet, Polyline64};
use gesturecast_core::foreshadow::{foreshadow_trajectory, ForeshadowSpec, Selection, SelectionSource};
use gesturecast_core::gesture::{dial_step, DialState};
use gesturecast_core::scene::{serialize_frame, NodeKind};
use gesturecast_core::session::{Project, Session};
use gesturecast_core::synth::{dial_tip_path, frame, frame_time, pointing_at, stress_presentation, stress_trace};
use gesturecast_core::{Handedness, Landmark, LandmarkFrame, LandmarkTrace};
use rand::Rng;
use sha2::{Digest, Sha256};

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, fail: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

/// Presenter and audience streams, one canonical frame per line.
fn replay_streams(trace: &LandmarkTrace) -> (String, String) {
    let mut s = fixture_session();
    let (mut p, mut a) = (String::new(), String::new());
    s.replay(trace, |out| {
        p.push_str(&serialize_frame(&out.presenter));
        p.push('\n');
        a.push_str(&serialize_frame(&out.audience));
        a.push('\n');
    })
    .expect("fixture replays");
    (p, a)
}

fn sha(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn replay_determinism() -> Outcome {
    let trace = fixture_trace("scenario.trace");
    let runs: Vec<(String, String)> = (0..5).map(|_| replay_streams(&trace)).collect();
    let digests: Vec<String> = runs.iter().map(|(p, a)| sha(&format!("{p}{a}"))).collect();
    if digests.iter().any(|d| *d != digests[0]) {
        return Err(format!("digests differ across runs: {digests:?}"));
    }
    let dir = common::fixtures_dir();
    let golden_p = std::fs::read_to_string(dir.join("scenario.presenter.frames")).unwrap_or_default();
    let golden_a = std::fs::read_to_string(dir.join("scenario.audience.frames")).unwrap_or_default();
    if runs[0].0 != golden_p || runs[0].1 != golden_a {
        return Err("stream differs from the shipped golden frames".into());
    }

    // Three minutes at 30 fps, tiled from the fixture.
    let n = 180 * 30;
    let frames: Vec<LandmarkFrame> = (0..n)
        .map(|i| {
            let src = &trace.frames[i % trace.frames.len()];
            LandmarkFrame {
                t_ms: frame_time(i, 30.0),
                ..src.clone()
            }
        })
        .collect();
    let long = LandmarkTrace::new(frames);
    let start = Instant::now();
    let (p, _) = replay_streams(&long);
    let secs = start.elapsed().as_secs_f64();
    check(
        secs < 10.0 && p.lines().count() == n,
        format!("5 runs sha256 {}, golden match, 3-min trace {secs:.2} s", &digests[0][..16]),
        format!("3-min trace took {secs:.2} s"),
    )
}

fn gesture_suite_criterion() -> Outcome {
    let mut cases = gesture_suite();
    let n_suite = cases.len();
    cases.extend(distractor_cases());
    let mut mismatches = Vec::new();
    let mut outside_activations = 0;
    let mut outside = 0;
    for c in &cases {
        let actual = c.actual();
        if actual != c.expected() {
            mismatches.push(c.name.clone());
        }
        if c.fully_outside {
            outside += 1;
            outside_activations += actual.len();
        }
    }
    check(
        cases.len() >= 200 && mismatches.is_empty() && outside_activations == 0 && outside > 0,
        format!(
            "{} traces ({n_suite} suite + {} distractors), 100% oracle match, 0 activations on {outside} out-of-bounds traces",
            cases.len(),
            cases.len() - n_suite
        ),
        format!("{} mismatches {:?}, {outside_activations} out-of-bounds activations", mismatches.len(), mismatches.iter().take(5).collect::<Vec<_>>()),
    )
}

/// A pointing hand that holds at the start of the circle, then dials.
fn dial_frames(revs: &[f64]) -> LandmarkTrace {
    let (center, radius) = ((0.84, 0.70), 0.05);
    let mut tips = vec![(center.0 + radius, center.1); 20];
    let mut angle = 0.0;
    for r in revs {
        tips.extend(dial_tip_path(center, radius, angle, *r, 60).into_iter().skip(1));
        angle += r * TAU;
    }
    let frames = tips
        .into_iter()
        .enumerate()
        .map(|(i, tip)| frame(frame_time(i, 30.0), vec![pointing_at(Handedness::Right, tip)]))
        .collect();
    LandmarkTrace::new(frames)
}

fn dial_position(trace: &LandmarkTrace) -> f64 {
    let mut s = fixture_session();
    s.replay(trace, |_| {}).expect("replays");
    s.playback("wealth").expect("wealth chart").position
}

fn dialling() -> Outcome {
    let span = fixture_project().charts["wealth"].spec.revolution_span;
    let circle = dial_position(&fixture_trace("dial_circle.trace"));
    let there_and_back = dial_position(&dial_frames(&[1.5, -1.5]));

    let mut r = rng(7);
    let mut worst_jump: f64 = 0.0;
    let mut worst_total: f64 = 0.0;
    for _ in 0..500 {
        let (cx, cy) = (r.random_range(0.3..0.7), r.random_range(0.3..0.7));
        let radius = r.random_range(0.02..0.2);
        let dir = if r.random_bool(0.5) { 1.0 } else { -1.0 };
        // Start just short of the cut at pi and sweep across it.
        let start = PI - dir * r.random_range(0.01..0.5);
        let sweep = r.random_range(0.6..3.0);
        let steps = r.random_range(5..80);
        let mut state = DialState::new(Landmark::planar(cx, cy));
        let mut prev = 0.0;
        for i in 0..=steps {
            let a = start + dir * sweep * i as f64 / steps as f64;
            let step = dial_step(state, Landmark::planar(cx + radius * a.cos(), cy + radius * a.sin()));
            worst_jump = worst_jump.max((step.state.accumulated - prev).abs());
            prev = step.state.accumulated;
            state = step.state;
        }
        worst_total = worst_total.max((state.accumulated - dir * sweep).abs());
    }
    check(
        (circle - span).abs() <= 1e-6 && there_and_back.abs() <= 1e-6 && worst_jump <= PI && worst_total < 1e-9,
        format!(
            "circle advances {circle:.9} (span {span}), round trip {there_and_back:.1e}, 500 branch-cut sweeps max step {worst_jump:.3} rad"
        ),
        format!("circle {circle}, round trip {there_and_back}, max step {worst_jump}, sweep error {worst_total}"),
    )
}

fn bar_race() -> Outcome {
    let mut tables = 0;
    let mut checks = 0;
    let mut mismatches = 0;
    let mut seed = 0u64;
    while tables < 1000 {
        let t = random_table(&mut rng(seed));
        seed += 1;
        if !t.usable() {
            continue;
        }
        tables += 1;
        let m = t.barrace(10, Easing::Linear);
        for k in 0..t.times.len() {
            for (key, rank) in t.oracle_ranks(k) {
                checks += 1;
                if m.rank_at_keyframe(k, &key) != Some(rank) {
                    mismatches += 1;
                }
            }
        }
    }
    let project = fixture_project();
    let race = &project.charts["race"];
    let ranks: Vec<Option<u32>> = (0..4).map(|k| race.rank_at_keyframe(k, "Peru")).collect();
    let sel = Selection {
        chart_id: "race".into(),
        keys: ["Peru".to_string()].into(),
        source: SelectionSource::Point,
    };
    let bump = foreshadow_trajectory(race, &ForeshadowSpec::default(), 0.0, &sel);
    let slots = bump.first().map(|b| b.slots.clone()).unwrap_or_default();
    check(
        mismatches == 0 && ranks == [Some(6), Some(6), Some(5), Some(5)] && slots == [6, 6, 5, 5],
        format!("{tables} random tables, {checks} keyframe ranks match; Peru bump {slots:?}"),
        format!("{mismatches}/{checks} rank mismatches; Peru ranks {ranks:?}, bump {slots:?}"),
    )
}

fn easing() -> Outcome {
    let endpoints = Easing::ALL.iter().all(|k| ease(*k, 0.0) == 0.0 && ease(*k, 1.0) == 1.0);

    let mut r = rng(11);
    let mut samples = 0;
    let mut escapes = 0;
    let mut inexact = 0;
    while samples < 100_000 {
        let t = random_table(&mut rng(r.random()));
        if !t.usable() {
            continue;
        }
        let kind = Easing::ALL[r.random_range(0..Easing::ALL.len())];
        let m = t.scatter(kind, r.random_bool(0.5));
        for k in 0..t.times.len() {
            for mark in m.state_at(k as f64) {
                let e = t.keys.iter().position(|x| *x == mark.key).unwrap();
                if let Some(v) = t.values[k][e] {
                    if mark.x.to_bits() != m.x_scale.apply(v + 1.0).unwrap().to_bits() {
                        inexact += 1;
                    }
                }
            }
        }
        if !kind.is_monotone() {
            continue;
        }
        let last = t.times.len() - 1;
        for _ in 0..50 {
            let k = r.random_range(0..last);
            let u: f64 = r.random();
            let (a, b) = (m.state_at(k as f64), m.state_at((k + 1) as f64));
            for mark in m.state_at(k as f64 + u) {
                let (Some(ma), Some(mb)) = (a.iter().find(|x| x.key == mark.key), b.iter().find(|x| x.key == mark.key)) else {
                    continue;
                };
                if ma.opacity == 0.0 || mb.opacity == 0.0 {
                    continue;
                }
                samples += 1;
                let inside = |v: f64, p: f64, q: f64| v >= p.min(q) && v <= p.max(q);
                if !inside(mark.x, ma.x, mb.x) || !inside(mark.y, ma.y, mb.y) || !inside(mark.size, ma.size, mb.size) {
                    escapes += 1;
                }
            }
        }
    }
    check(
        endpoints && escapes == 0 && inexact == 0,
        format!("exact endpoints for {} kinds, integer positions exact, {samples} monotone samples in interval", Easing::ALL.len()),
        format!("endpoints {endpoints}, {inexact} inexact keyframes, {escapes}/{samples} escapes"),
    )
}

fn morphing() -> Outcome {
    let icons = IconSet::builtin();
    let names = ["down-arrow", "up-arrow", "cross", "heart"];
    let mut r = rng(13);
    let mut failures = 0;
    let trials = 10_000;
    for _ in 0..trials {
        let a = Polyline64::circle();
        let b = align_to(&a, icons.get(names[r.random_range(0..names.len())]).unwrap());
        let ok_ends = morph_shape(&a, &b, 0.0).points() == a.points() && morph_shape(&a, &b, 1.0).points() == b.points();
        let u = r.random_range(0.9..=1.0);
        let settled = morph_envelope(u) == 0.0 && morph_shape(&a, &b, morph_envelope(u)).points() == a.points();
        if !ok_ends || !settled {
            failures += 1;
        }
    }

    // The fixture's falling-life-expectancy transition: shapes morph mid-way
    // and are back to circles from u = 0.9 on.
    let project = fixture_project();
    let wealth = &project.charts["wealth"];
    let base = *wealth.base_shape().points();
    let morphed = wealth.state_at(1.55).iter().filter(|m| *m.shape.points() != base).count();
    let mut leftover = 0;
    for _ in 0..200 {
        let u = r.random_range(0.9..=1.0);
        leftover += wealth.state_at(1.0 + u).iter().filter(|m| *m.shape.points() != base).count();
    }
    check(
        failures == 0 && morphed > 0 && leftover == 0,
        format!("{trials} random transitions exact at ends and settled by u=0.9; fixture morphs {morphed} marks mid-way, 0 after"),
        format!("{failures} failures, {morphed} morphed mid-way, {leftover} not settled ({SHAPE_POINTS} points)"),
    )
}

fn view_discipline() -> Outcome {
    let mut s = fixture_session();
    let mut frames = 0;
    let mut violations = 0;
    s.replay(&fixture_trace("scenario.trace"), |out| {
        frames += 1;
        let mut pool: BTreeMap<String, i64> = BTreeMap::new();
        for n in &out.presenter.nodes {
            *pool.entry(serde_json::to_string(n).unwrap()).or_default() += 1;
        }
        for n in &out.audience.nodes {
            let entry = pool.entry(serde_json::to_string(n).unwrap()).or_default();
            *entry -= 1;
            if *entry < 0 || n.kind.is_presenter_only() {
                violations += 1;
            }
        }
        for n in &out.presenter.nodes {
            let left = pool.get(&serde_json::to_string(n).unwrap()).copied().unwrap_or(0);
            if left > 0 && !matches!(n.kind, NodeKind::FeedbackBox { .. } | NodeKind::ProgressBubble { .. }) {
                violations += 1;
            }
        }
    })
    .expect("fixture replays");
    check(
        violations == 0,
        format!("{frames} frame pairs, 0 violations"),
        format!("{violations} violations over {frames} frame pairs"),
    )
}

fn performance() -> Outcome {
    let project = Project::compile(stress_presentation(1000), Path::new(".")).map_err(|e| e.to_string())?;
    let marks = project.charts.values().next().map_or(0, |m| m.state_at(0.0).len());
    let mut s = Session::new("bench", Arc::new(project));
    let trace = stress_trace(3000);
    let mut ms = Vec::with_capacity(trace.frames.len());
    for f in &trace.frames {
        let start = Instant::now();
        let out = s.tick(f).map_err(|e| e.to_string())?;
        ms.push(start.elapsed().as_secs_f64() * 1e3);
        std::hint::black_box(out);
    }
    ms.sort_by(f64::total_cmp);
    let median = ms[ms.len() / 2];
    let p99 = ms[(ms.len() as f64 * 0.99) as usize];
    check(
        marks == 1000 && median < 5.0 && p99 < 15.0,
        format!("{marks} marks, 2 hands, {} ticks: median {median:.3} ms, p99 {p99:.3} ms", ms.len()),
        format!("{marks} marks: median {median:.3} ms, p99 {p99:.3} ms"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("replay determinism", replay_determinism),
        ("gesture suite", gesture_suite_criterion),
        ("dialling", dialling),
        ("bar race correctness", bar_race),
        ("easing/interpolation", easing),
        ("morphing", morphing),
        ("view discipline", view_discipline),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
