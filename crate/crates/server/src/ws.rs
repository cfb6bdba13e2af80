use std::net::SocketAddr;
use std::sync::Arc;

use airwrite_core::ocr::TemplateSet;
use airwrite_core::pipeline::PipelineConfig;
use futures_util::{SinkExt, StreamExt};
use tokio::net::{TcpListener, TcpStream, ToSocketAddrs};
use tokio_tungstenite::tungstenite::Message;

use crate::protocol::{ErrorCode, ServerEvent};
use crate::session::LiveSession;

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] airwrite_core::Error),
}

/// A bound listener plus the configuration every session starts from.
pub struct Server {
    listener: TcpListener,
    cfg: PipelineConfig,
    templates: Arc<TemplateSet>,
}

impl Server {
    /// Validates the configuration and loads templates before binding.
    pub async fn bind(addr: impl ToSocketAddrs, cfg: PipelineConfig) -> Result<Self, ServerError> {
        cfg.validate()?;
        let templates = cfg.load_templates()?;
        let listener = TcpListener::bind(addr).await?;
        Ok(Self {
            listener,
            cfg,
            templates,
        })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections until the task is dropped.
    pub async fn run(self) -> Result<(), ServerError> {
        loop {
            let (stream, _) = self.listener.accept().await?;
            let session = LiveSession::new(self.cfg.clone(), self.templates.clone());
            tokio::spawn(async move {
                // a broken connection only ends its own session
                let _ = connection(stream, session).await;
            });
        }
    }
}

/// Binds `0.0.0.0:port` and serves until terminated.
pub async fn serve(port: u16, cfg: PipelineConfig) -> Result<(), ServerError> {
    Server::bind(("0.0.0.0", port), cfg).await?.run().await
}

async fn connection(
    stream: TcpStream,
    mut session: LiveSession,
) -> Result<(), tokio_tungstenite::tungstenite::Error> {
    let mut ws = tokio_tungstenite::accept_async(stream).await?;
    while let Some(msg) = ws.next().await {
        let events = match msg? {
            Message::Text(text) => {
                // frame processing is CPU-bound; keep it off the reactor threads
                let text = text.to_string();
                let (back, events) = tokio::task::spawn_blocking(move || {
                    let events = session.handle_text(&text);
                    (session, events)
                })
                .await
                .expect("session handler panicked");
                session = back;
                events
            }
            Message::Binary(_) => vec![ServerEvent::error(
                ErrorCode::InvalidMessage,
                "expected a text message",
            )],
            Message::Close(_) => break,
            _ => continue,
        };
        for event in events {
            ws.send(Message::text(event.to_json())).await?;
        }
        if session.is_closed() {
            ws.close(None).await?;
            break;
        }
    }
    Ok(())
}
