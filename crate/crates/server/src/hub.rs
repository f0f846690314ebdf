//! Session registry and the single-writer loop behind each session.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use gesturecast_core::session::{encode_message, handle_message, Message, Recipient, Role, Session};
use tokio::sync::{broadcast, mpsc};

/// Encoded message shared by every subscriber it fans out to.
pub type Encoded = Arc<str>;

const INBOX_DEPTH: usize = 256;
const FANOUT_DEPTH: usize = 64;

pub struct Inbound {
    pub role: Role,
    pub message: Message,
    pub reply: mpsc::UnboundedSender<Encoded>,
}

/// Cheap handle to a running session loop.
#[derive(Clone)]
pub struct SessionHandle {
    pub id: String,
    inbox: mpsc::Sender<Inbound>,
    presenters: broadcast::Sender<Encoded>,
    audience: broadcast::Sender<Encoded>,
}

impl SessionHandle {
    pub fn subscribe(&self, role: Role) -> broadcast::Receiver<Encoded> {
        match role {
            Role::Presenter => self.presenters.subscribe(),
            Role::Audience => self.audience.subscribe(),
        }
    }

    /// Queues a message; replies meant for the sender arrive on `reply`.
    /// Returns false once the session loop has stopped.
    pub async fn send(&self, role: Role, message: Message, reply: mpsc::UnboundedSender<Encoded>) -> bool {
        self.inbox.send(Inbound { role, message, reply }).await.is_ok()
    }
}

#[derive(Default)]
pub struct Hub {
    sessions: Mutex<BTreeMap<String, SessionHandle>>,
}

impl Hub {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    /// Moves `session` onto its own task and registers it under its id.
    pub fn spawn_session(&self, session: Session) -> SessionHandle {
        let (inbox, rx) = mpsc::channel(INBOX_DEPTH);
        let (presenters, _) = broadcast::channel(FANOUT_DEPTH);
        let (audience, _) = broadcast::channel(FANOUT_DEPTH);
        let handle = SessionHandle {
            id: session.id.clone(),
            inbox,
            presenters: presenters.clone(),
            audience: audience.clone(),
        };
        tokio::spawn(run_session(session, rx, presenters, audience));
        self.sessions
            .lock()
            .expect("hub lock poisoned")
            .insert(handle.id.clone(), handle.clone());
        handle
    }

    pub fn session(&self, id: &str) -> Option<SessionHandle> {
        self.sessions.lock().expect("hub lock poisoned").get(id).cloned()
    }

    pub fn session_ids(&self) -> Vec<String> {
        self.sessions.lock().expect("hub lock poisoned").keys().cloned().collect()
    }
}

async fn run_session(
    mut session: Session,
    mut rx: mpsc::Receiver<Inbound>,
    presenters: broadcast::Sender<Encoded>,
    audience: broadcast::Sender<Encoded>,
) {
    while let Some(inbound) = rx.recv().await {
        for out in handle_message(&mut session, inbound.message, inbound.role) {
            let encoded: Encoded = encode_message(&out.message).into();
            match out.to {
                Recipient::Sender => {
                    let _ = inbound.reply.send(encoded);
                }
                // No subscribers is not an error.
                Recipient::Presenters => {
                    let _ = presenters.send(encoded);
                }
                Recipient::Audience => {
                    let _ = audience.send(encoded);
                }
            }
        }
    }
    log::info!("session {} stopped", session.id);
}
