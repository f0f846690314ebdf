//! `gesturecast`: validate presentations, replay landmark traces into frame
//! streams, diff frame streams, serve live sessions, scaffold new configs.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gesturecast_core::landmark::parse_trace;
use gesturecast_core::scene::{diff_values, serialize_frame};
use gesturecast_core::session::{presentation_to_string, Project, ProjectError, Session};
use gesturecast_core::templates::{template, TemplateKind};
use gesturecast_server::{serve, ServeConfig, DEFAULT_SESSION};

#[derive(Parser)]
#[command(name = "gesturecast", version, about = "Gesture-driven presentation engine")]
struct Cli {
    /// Log filter (error, warn, info, debug, trace).
    #[arg(long, global = true, env = "GESTURECAST_LOG", default_value = "warn")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a presentation config, its tables and charts.
    Validate { config: PathBuf },
    /// Run a landmark trace through the engine and write one frame per line.
    Replay {
        config: PathBuf,
        trace: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ViewArg::Audience)]
        view: ViewArg,
    },
    /// Compare two frame streams field by field.
    Diff {
        frames_a: PathBuf,
        frames_b: PathBuf,
        /// Per-field absolute tolerance.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Serve sessions over WebSocket until interrupted.
    Serve {
        config: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Replay this trace into the session instead of waiting for live landmarks.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value = DEFAULT_SESSION)]
        session: String,
    },
    /// Write a starter config and sample CSV into a directory.
    New {
        #[arg(long, value_enum)]
        template: TemplateArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    Presenter,
    Audience,
}

#[derive(Clone, Copy, ValueEnum)]
enum TemplateArg {
    Scatter,
    Barrace,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log_level).init();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Validate { config } => validate(&config),
        Command::Replay {
            config,
            trace,
            out,
            view,
        } => replay(&config, &trace, out.as_deref(), view).map(|()| ExitCode::SUCCESS),
        Command::Diff {
            frames_a,
            frames_b,
            tolerance,
        } => diff(&frames_a, &frames_b, tolerance),
        Command::Serve {
            config,
            addr,
            trace,
            session,
        } => {
            let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
            let cfg = ServeConfig {
                addr,
                config,
                trace,
                session_id: session,
            };
            rt.block_on(serve(cfg, async {
                let _ = tokio::signal::ctrl_c().await;
            }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::New { template, out } => scaffold(template, &out).map(|()| ExitCode::SUCCESS),
    }
}

fn validate(config: &Path) -> Result<ExitCode> {
    match Project::load(config) {
        Ok(p) => {
            println!(
                "ok: {} segments, {} widgets, {} charts",
                p.presentation.segments.len(),
                p.presentation.widgets.len(),
                p.charts.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(ProjectError::Io { path, source }) => bail!("cannot read {}: {source}", path.display()),
        Err(e) => {
            for d in e.diagnostics() {
                eprintln!("{d}");
            }
            Ok(ExitCode::FAILURE)
        }
    }
}

fn replay(config: &Path, trace: &Path, out: Option<&Path>, view: ViewArg) -> Result<()> {
    let project = Project::load(config).with_context(|| format!("loading {}", config.display()))?;
    let bytes = fs::read(trace).with_context(|| format!("reading {}", trace.display()))?;
    let trace = parse_trace(&bytes).with_context(|| format!("parsing {}", trace.display()))?;
    let mut writer: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut session = Session::new(DEFAULT_SESSION, Arc::new(project));
    let mut result = Ok(());
    session.replay(&trace, |frames| {
        if result.is_ok() {
            let f = match view {
                ViewArg::Presenter => &frames.presenter,
                ViewArg::Audience => &frames.audience,
            };
            result = writeln!(writer, "{}", serialize_frame(f));
        }
    })?;
    result.context("writing frames")?;
    writer.flush().context("writing frames")?;
    log::info!("replayed {} frames", trace.frames.len());
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    BufReader::new(f)
        .lines()
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .collect::<io::Result<_>>()
        .with_context(|| format!("reading {}", path.display()))
}

fn diff(a: &Path, b: &Path, tolerance: f64) -> Result<ExitCode> {
    let (la, lb) = (read_lines(a)?, read_lines(b)?);
    for (i, (x, y)) in la.iter().zip(&lb).enumerate() {
        let vx: serde_json::Value =
            serde_json::from_str(x).with_context(|| format!("{} frame {i} is not valid JSON", a.display()))?;
        let vy: serde_json::Value =
            serde_json::from_str(y).with_context(|| format!("{} frame {i} is not valid JSON", b.display()))?;
        if let Some(d) = diff_values(&vx, &vy, tolerance) {
            println!("frame {i}: {d}");
            return Ok(ExitCode::FAILURE);
        }
    }
    if la.len() != lb.len() {
        println!("frame count differs: {} vs {}", la.len(), lb.len());
        return Ok(ExitCode::FAILURE);
    }
    println!("identical: {} frames", la.len());
    Ok(ExitCode::SUCCESS)
}

fn scaffold(kind: TemplateArg, out: &Path) -> Result<()> {
    let kind = match kind {
        TemplateArg::Scatter => TemplateKind::Scatter,
        TemplateArg::Barrace => TemplateKind::BarRace,
    };
    let (presentation, csv) = template(kind);
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let cfg = out.join("presentation.cfg");
    let data = out.join("data.csv");
    for p in [&cfg, &data] {
        if p.exists() {
            bail!("{} already exists", p.display());
        }
    }
    fs::write(&cfg, presentation_to_string(&presentation)).with_context(|| format!("writing {}", cfg.display()))?;
    fs::write(&data, csv).with_context(|| format!("writing {}", data.display()))?;
    println!("wrote {} and {}", cfg.display(), data.display());
    Ok(())
}
