//! WebSocket session service.
//!
//! Clients connect to `/ws` and greet with a `Hello` naming their role and
//! session. Presenters may then stream `Landmarks` and control messages;
//! every state change fans out `Frame` messages, presenter frames to
//! presenter connections and audience frames to audience connections.
//! `GET /health` answers `ok` and `GET /sessions` lists session ids.

pub mod hub;

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message as WsMessage, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::{Json, Router};
use futures::{SinkExt, StreamExt};
use gesturecast_core::landmark::parse_trace;
use gesturecast_core::session::{encode_message, parse_message, ErrorCode, Message, Project, Role, Session};
use gesturecast_core::LandmarkTrace;
use thiserror::Error;
use tokio::net::TcpListener;
use tokio::sync::{broadcast, mpsc};

pub use hub::{Encoded, Hub, SessionHandle};

pub const DEFAULT_SESSION: &str = "default";

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Project(#[from] gesturecast_core::session::ProjectError),
    #[error("cannot read trace {path}: {detail}")]
    Trace { path: PathBuf, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub addr: SocketAddr,
    pub config: PathBuf,
    /// Replays this trace into the session at its recorded pace.
    pub trace: Option<PathBuf>,
    pub session_id: String,
}

pub fn router(hub: Arc<Hub>) -> Router {
    Router::new()
        .route("/ws", get(ws_upgrade))
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", get(list_sessions))
        .with_state(hub)
}

async fn list_sessions(State(hub): State<Arc<Hub>>) -> Json<Vec<String>> {
    Json(hub.session_ids())
}

async fn ws_upgrade(ws: WebSocketUpgrade, State(hub): State<Arc<Hub>>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| connection(socket, hub))
}

fn error_text(code: ErrorCode, detail: impl Into<String>) -> String {
    encode_message(&Message::Error {
        code,
        detail: detail.into(),
    })
}

async fn connection(socket: WebSocket, hub: Arc<Hub>) {
    let (mut sink, mut stream) = socket.split();

    let (role, handle, hello) = loop {
        let Some(Ok(frame)) = stream.next().await else { return };
        let text = match frame {
            WsMessage::Text(t) => t,
            WsMessage::Close(_) => return,
            _ => continue,
        };
        match parse_message(text.as_str()) {
            Ok(Message::Hello { role, session_id }) => match hub.session(&session_id) {
                Some(h) => break (role, h, Message::Hello { role, session_id }),
                None => {
                    let msg = error_text(ErrorCode::UnknownSession, format!("no session `{session_id}`"));
                    let _ = sink.send(WsMessage::Text(msg.into())).await;
                }
            },
            Ok(_) => {
                let msg = error_text(ErrorCode::BadMessage, "expected Hello first");
                let _ = sink.send(WsMessage::Text(msg.into())).await;
            }
            Err(e) => {
                let _ = sink.send(WsMessage::Text(error_text(ErrorCode::BadMessage, e.to_string()).into())).await;
            }
        }
    };
    log::info!("{role:?} joined session {}", handle.id);

    let mut feed = handle.subscribe(role);
    let (reply_tx, mut replies) = mpsc::unbounded_channel::<Encoded>();
    if !handle.send(role, hello, reply_tx.clone()).await {
        return;
    }

    loop {
        tokio::select! {
            incoming = stream.next() => {
                let text = match incoming {
                    Some(Ok(WsMessage::Text(t))) => t,
                    Some(Ok(WsMessage::Close(_))) | None | Some(Err(_)) => break,
                    Some(Ok(_)) => continue,
                };
                match parse_message(text.as_str()) {
                    Ok(msg) => {
                        if !handle.send(role, msg, reply_tx.clone()).await {
                            break;
                        }
                    }
                    Err(e) => {
                        let _ = reply_tx.send(error_text(ErrorCode::BadMessage, e.to_string()).into());
                    }
                }
            }
            Some(out) = replies.recv() => {
                if sink.send(WsMessage::Text(out.as_ref().into())).await.is_err() {
                    break;
                }
            }
            fanned = feed.recv() => match fanned {
                Ok(out) => {
                    if sink.send(WsMessage::Text(out.as_ref().into())).await.is_err() {
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(n)) => log::warn!("{role:?} client skipped {n} frames"),
                Err(broadcast::error::RecvError::Closed) => break,
            },
        }
    }
    log::info!("{role:?} left session {}", handle.id);
}

/// Feeds `trace` into a session as presenter landmarks, sleeping between
/// frames by their recorded gaps.
pub async fn replay_into(handle: SessionHandle, trace: LandmarkTrace) {
    let (reply_tx, mut replies) = mpsc::unbounded_channel::<Encoded>();
    tokio::spawn(async move {
        while let Some(r) = replies.recv().await {
            log::debug!("replay reply: {r}");
        }
    });
    let mut last: Option<i64> = None;
    for frame in trace.frames {
        if let Some(prev) = last {
            let gap = (frame.t_ms - prev).max(0) as u64;
            tokio::time::sleep(Duration::from_millis(gap)).await;
        }
        last = Some(frame.t_ms);
        if !handle.send(Role::Presenter, Message::Landmarks { frame }, reply_tx.clone()).await {
            return;
        }
    }
    log::info!("trace replay finished");
}

/// Runs the service until `shutdown` resolves.
pub async fn serve(config: ServeConfig, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), ServeError> {
    let project = Arc::new(Project::load(&config.config)?);
    let trace = match &config.trace {
        None => None,
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| ServeError::Trace {
                path: path.clone(),
                detail: e.to_string(),
            })?;
            Some(parse_trace(&bytes).map_err(|e| ServeError::Trace {
                path: path.clone(),
                detail: e.to_string(),
            })?)
        }
    };
    let hub = Hub::new();
    let handle = hub.spawn_session(Session::new(&config.session_id, project));
    if let Some(trace) = trace {
        tokio::spawn(replay_into(handle, trace));
    }
    let listener = TcpListener::bind(config.addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(hub)).with_graceful_shutdown(shutdown).await?;
    Ok(())
}
