use std::env;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

pub const ENV_BIND: &str = "FOSGRAPH_BIND";
pub const ENV_SNAPSHOT_DIR: &str = "FOSGRAPH_SNAPSHOT_DIR";
pub const ENV_CORS_ORIGIN: &str = "FOSGRAPH_CORS_ORIGIN";
pub const ENV_TREND_WINDOW: &str = "FOSGRAPH_TREND_WINDOW";

#[derive(Debug, Clone, PartialEq)]
pub struct ServerConfig {
    pub bind: SocketAddr,
    pub snapshot_dir: PathBuf,
    /// `None` or `*` allows any origin.
    pub cors_origin: Option<String>,
    /// Years in the default trend window.
    pub trend_window: i64,
    pub reload_interval: Duration,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            snapshot_dir: PathBuf::from("snapshot"),
            cors_origin: None,
            trend_window: 10,
            reload_interval: Duration::from_secs(1),
        }
    }
}

impl ServerConfig {
    /// Overrides fields from `FOSGRAPH_*` environment variables.
    pub fn with_env(mut self) -> Result<Self, String> {
        if let Ok(v) = env::var(ENV_BIND) {
            self.bind = v.parse().map_err(|e| format!("{ENV_BIND}={v}: {e}"))?;
        }
        if let Ok(v) = env::var(ENV_SNAPSHOT_DIR) {
            self.snapshot_dir = v.into();
        }
        if let Ok(v) = env::var(ENV_CORS_ORIGIN) {
            self.cors_origin = Some(v);
        }
        if let Ok(v) = env::var(ENV_TREND_WINDOW) {
            self.trend_window = v
                .parse()
                .map_err(|e| format!("{ENV_TREND_WINDOW}={v}: {e}"))?;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(1..=fosgraph_core::analytics::MAX_YEAR_SPAN).contains(&self.trend_window) {
            return Err(format!(
                "trend window must be 1..={}",
                fosgraph_core::analytics::MAX_YEAR_SPAN
            ));
        }
        Ok(())
    }
}
