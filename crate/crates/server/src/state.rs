use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use fosgraph_core::store::{load_snapshot, read_version, StoreError};
use fosgraph_core::Snapshot;

use crate::config::ServerConfig;

/// Shared handle to the snapshot currently being served.
#[derive(Clone)]
pub struct AppState {
    current: Arc<RwLock<Option<Arc<Snapshot>>>>,
    dir: PathBuf,
    pub trend_window: i64,
}

impl AppState {
    pub fn new(config: &ServerConfig) -> Self {
        AppState {
            current: Arc::default(),
            dir: config.snapshot_dir.clone(),
            trend_window: config.trend_window,
        }
    }

    pub fn current(&self) -> Option<Arc<Snapshot>> {
        self.current.read().expect("snapshot lock poisoned").clone()
    }

    pub fn version(&self) -> Option<u64> {
        self.current().map(|s| s.version())
    }

    /// Replaces the served snapshot in one step.
    pub fn install(&self, snapshot: Snapshot) {
        *self.current.write().expect("snapshot lock poisoned") = Some(Arc::new(snapshot));
    }

    /// Loads the on-disk snapshot if its version differs from the served
    /// one. Returns whether a swap happened.
    pub fn refresh(&self) -> Result<bool, StoreError> {
        let Some(on_disk) = read_version(&self.dir)? else {
            return Ok(false);
        };
        if self.version() == Some(on_disk) {
            return Ok(false);
        }
        match load_snapshot(&self.dir) {
            Ok(snapshot) => {
                self.install(snapshot);
                Ok(true)
            }
            // mid-swap; retried on the next poll
            Err(StoreError::Missing(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }
}
