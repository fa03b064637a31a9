//! Read-only HTTP/JSON service over the current fosgraph snapshot.
//!
//! The service watches a snapshot directory and swaps in a new snapshot
//! whenever its version changes. Until a snapshot exists every data
//! endpoint answers `503 snapshot_missing`.

mod config;
mod error;
mod routes;
mod state;

pub use config::ServerConfig;
pub use error::ApiError;
pub use routes::router;
pub use state::AppState;

use std::future::Future;
use std::net::SocketAddr;

use thiserror::Error;
use tokio::net::TcpListener;

use fosgraph_core::store::StoreError;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
    #[error("cannot load snapshot: {0}")]
    Snapshot(#[from] StoreError),
    #[error("server failure: {0}")]
    Io(#[from] std::io::Error),
}

pub struct Server {
    listener: TcpListener,
    state: AppState,
    config: ServerConfig,
}

impl Server {
    /// Binds the listener and loads the snapshot if one is present.
    pub async fn bind(config: ServerConfig) -> Result<Self, ServeError> {
        let state = AppState::new(&config);
        let s = state.clone();
        tokio::task::spawn_blocking(move || s.refresh())
            .await
            .expect("snapshot loader panicked")?;
        let listener = TcpListener::bind(config.bind)
            .await
            .map_err(|source| ServeError::Bind {
                addr: config.bind,
                source,
            })?;
        Ok(Server {
            listener,
            state,
            config,
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener
            .local_addr()
            .expect("bound listener has an address")
    }

    pub fn state(&self) -> AppState {
        self.state.clone()
    }

    /// Serves until `shutdown` resolves, polling for new snapshots.
    pub async fn run_until<F>(self, shutdown: F) -> Result<(), ServeError>
    where
        F: Future<Output = ()> + Send + 'static,
    {
        let watcher = tokio::spawn(watch(self.state.clone(), self.config.reload_interval));
        let app = router(self.state.clone(), &self.config);
        tracing::info!(addr = %self.local_addr(), dir = %self.config.snapshot_dir.display(), "serving");
        let result = axum::serve(self.listener, app)
            .with_graceful_shutdown(shutdown)
            .await;
        watcher.abort();
        Ok(result?)
    }

    /// Serves until Ctrl-C.
    pub async fn run(self) -> Result<(), ServeError> {
        self.run_until(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
    }
}

async fn watch(state: AppState, every: std::time::Duration) {
    let mut tick = tokio::time::interval(every);
    tick.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Skip);
    loop {
        tick.tick().await;
        let s = state.clone();
        match tokio::task::spawn_blocking(move || s.refresh()).await {
            Ok(Ok(true)) => tracing::info!(version = ?state.version(), "snapshot swapped"),
            Ok(Ok(false)) => {}
            Ok(Err(e)) => tracing::warn!(error = %e, "snapshot reload failed; keeping current"),
            Err(e) => tracing::error!(error = %e, "snapshot reload panicked"),
        }
    }
}
