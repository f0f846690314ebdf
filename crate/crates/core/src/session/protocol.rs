//! Socket message protocol and role-gated message handling.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Project, Session, SessionError};
use crate::landmark::LandmarkFrame;
use crate::scene::{canonical_json, SceneFrame};
use crate::widget::{Presentation, Widget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Presenter,
    Audience,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorCode {
    Unauthorized,
    UnknownSession,
    BadMessage,
    StaleFrame,
    ValidationFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Message {
    Hello { role: Role, session_id: String },
    Load { presentation: Presentation },
    Landmarks { frame: LandmarkFrame },
    Seek { chart_id: String, p: f64 },
    SelectSegment { segment_id: String },
    WidgetUpdate { widget: Widget },
    Frame { frame: SceneFrame },
    Error { code: ErrorCode, detail: String },
}

impl Message {
    fn error(code: ErrorCode, detail: impl Into<String>) -> Self {
        Message::Error {
            code,
            detail: detail.into(),
        }
    }
}

/// Who an outbound message is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Recipient {
    Sender,
    Presenters,
    Audience,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outbound {
    pub to: Recipient,
    pub message: Message,
}

pub fn parse_message(text: &str) -> Result<Message, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn encode_message(m: &Message) -> String {
    canonical_json(m)
}

fn reply(message: Message) -> Vec<Outbound> {
    vec![Outbound {
        to: Recipient::Sender,
        message,
    }]
}

fn broadcast(presenter: SceneFrame, audience: SceneFrame) -> Vec<Outbound> {
    vec![
        Outbound {
            to: Recipient::Presenters,
            message: Message::Frame { frame: presenter },
        },
        Outbound {
            to: Recipient::Audience,
            message: Message::Frame { frame: audience },
        },
    ]
}

fn rebroadcast(session: &Session) -> Vec<Outbound> {
    let (p, a) = session.current_frames();
    broadcast(p, a)
}

/// Applies one inbound message from a client with `role`. Audience clients
/// may only greet; anything else they send is refused without touching the
/// session.
pub fn handle_message(session: &mut Session, msg: Message, role: Role) -> Vec<Outbound> {
    match msg {
        Message::Hello { session_id, role: claimed } => {
            if session_id != session.id {
                return reply(Message::error(ErrorCode::UnknownSession, format!("no session `{session_id}`")));
            }
            let (p, a) = session.current_frames();
            let frame = if claimed == Role::Presenter && role == Role::Presenter { p } else { a };
            reply(Message::Frame { frame })
        }
        Message::Frame { .. } | Message::Error { .. } => {
            reply(Message::error(ErrorCode::BadMessage, "clients may not send frames or errors"))
        }
        _ if role == Role::Audience => {
            reply(Message::error(ErrorCode::Unauthorized, "audience clients are read-only"))
        }
        Message::Landmarks { frame } => match session.tick(&frame) {
            Ok(out) => broadcast(out.presenter, out.audience),
            Err(SessionError::StaleFrame { t_ms, clock }) => reply(Message::error(
                ErrorCode::StaleFrame,
                format!("t_ms {t_ms} is before the session clock {clock}"),
            )),
            Err(e) => reply(Message::error(ErrorCode::BadMessage, e.to_string())),
        },
        Message::Seek { chart_id, p } => match session.seek(&chart_id, p) {
            Ok(()) => rebroadcast(session),
            Err(e) => reply(Message::error(ErrorCode::BadMessage, e.to_string())),
        },
        Message::SelectSegment { segment_id } => match session.select_segment(&segment_id) {
            Ok(()) => rebroadcast(session),
            Err(e) => reply(Message::error(ErrorCode::BadMessage, e.to_string())),
        },
        Message::Load { presentation } => {
            let base = session.project().base_dir.clone();
            match Project::compile(presentation, &base) {
                Ok(project) => {
                    session.replace_project(Arc::new(project));
                    rebroadcast(session)
                }
                Err(e) => reply(validation_error(e)),
            }
        }
        Message::WidgetUpdate { widget } => {
            let mut presentation = session.project().presentation.clone();
            match presentation.widgets.iter_mut().find(|w| w.id() == widget.id()) {
                Some(slot) => *slot = widget,
                None => presentation.widgets.push(widget),
            }
            let base = session.project().base_dir.clone();
            match Project::compile(presentation, &base) {
                Ok(project) => {
                    session.update_project(Arc::new(project));
                    rebroadcast(session)
                }
                Err(e) => reply(validation_error(e)),
            }
        }
    }
}

fn validation_error(e: super::ProjectError) -> Message {
    let detail = e
        .diagnostics()
        .first()
        .map_or_else(|| e.to_string(), ToString::to_string);
    Message::error(ErrorCode::ValidationFailed, detail)
}
