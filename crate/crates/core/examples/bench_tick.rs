//! Tick latency on a large scatterplot driven by two synthetic hands.
//!
//! `cargo run --release -p gesturecast-core --example bench_tick -- [marks] [frames]`

use std::sync::Arc;
use std::time::Instant;

use gesturecast_core::scene::serialize_frame;
use gesturecast_core::session::{Project, Session};
use gesturecast_core::synth::{stress_presentation, stress_trace};

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

fn main() {
    let mut args = std::env::args().skip(1);
    let marks: usize = args.next().map_or(1000, |a| a.parse().expect("marks"));
    let frames: usize = args.next().map_or(3000, |a| a.parse().expect("frames"));

    let project = Project::compile(stress_presentation(marks), std::path::Path::new(".")).expect("stress project");
    let mut session = Session::new("bench", Arc::new(project));
    let trace = stress_trace(frames);

    let mut tick_ms = Vec::with_capacity(frames);
    let mut encode_ms = Vec::with_capacity(frames);
    let mut nodes = 0usize;
    for f in &trace.frames {
        let start = Instant::now();
        let out = session.tick(f).expect("tick");
        tick_ms.push(start.elapsed().as_secs_f64() * 1e3);
        let start = Instant::now();
        let text = serialize_frame(&out.presenter);
        encode_ms.push(start.elapsed().as_secs_f64() * 1e3);
        nodes = nodes.max(out.presenter.nodes.len());
        std::hint::black_box(text);
    }
    tick_ms.sort_by(f64::total_cmp);
    encode_ms.sort_by(f64::total_cmp);
    println!("marks={marks} frames={frames} max_nodes={nodes}");
    println!(
        "tick   median {:.3} ms  p99 {:.3} ms  max {:.3} ms",
        percentile(&tick_ms, 0.5),
        percentile(&tick_ms, 0.99),
        tick_ms[tick_ms.len() - 1]
    );
    println!(
        "encode median {:.3} ms  p99 {:.3} ms",
        percentile(&encode_ms, 0.5),
        percentile(&encode_ms, 0.99)
    );
}
