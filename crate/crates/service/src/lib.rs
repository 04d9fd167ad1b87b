//! HTTP JSON API over the elicitation engine.
//!
//! Every accepted command is persisted before the response is sent, so the
//! process holds no state beyond a per-session lock table. Writes to one
//! session are serialized; distinct sessions proceed in parallel.

pub mod config;
pub mod error;
mod routes;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::http::{HeaderValue, Method};
use axum::Router;
use elicit_core::session::{FileStore, SessionRecord};
use elicit_core::ElicitError;
use time::OffsetDateTime;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::trace::TraceLayer;

pub use config::Config;
pub use error::{AppError, ApiResult};

type Clock = Arc<dyn Fn() -> OffsetDateTime + Send + Sync>;

pub struct AppState {
    pub config: Config,
    store: FileStore,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
    clock: Clock,
}

impl AppState {
    pub fn new(config: Config) -> elicit_core::Result<Self> {
        Self::with_clock(config, Arc::new(OffsetDateTime::now_utc))
    }

    /// Uses `clock` for event timestamps (fixed clocks make exports reproducible).
    pub fn with_clock(config: Config, clock: Clock) -> elicit_core::Result<Self> {
        let store = FileStore::open(&config.data_dir)?;
        Ok(AppState { config, store, locks: Mutex::new(HashMap::new()), clock })
    }

    pub fn store(&self) -> &FileStore {
        &self.store
    }

    fn lock_for(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|p| p.into_inner());
        locks.entry(id.to_string()).or_default().clone()
    }

    /// Runs `f` on the stored session under its write lock and persists the
    /// result when the history grew.
    pub(crate) async fn mutate<T, F>(self: &Arc<Self>, id: String, f: F) -> ApiResult<T>
    where
        F: FnOnce(&mut SessionRecord, OffsetDateTime) -> elicit_core::Result<T> + Send + 'static,
        T: Send + 'static,
    {
        let lock = self.lock_for(&id);
        let _guard = lock.lock().await;
        let state = Arc::clone(self);
        blocking(move || {
            let mut record = state.store.load(&id)?;
            let before = record.history.len();
            let out = f(&mut record, (state.clock)())?;
            if record.history.len() != before {
                state.store.save(&record)?;
            }
            Ok(out)
        })
        .await
    }

    /// Stores a new record unless the id is already taken.
    pub(crate) async fn insert(self: &Arc<Self>, record: SessionRecord) -> ApiResult<SessionRecord> {
        let lock = self.lock_for(&record.id);
        let _guard = lock.lock().await;
        let state = Arc::clone(self);
        blocking(move || {
            if state.store.exists(&record.id) {
                return Err(ElicitError::State(format!("session '{}' already exists", record.id)));
            }
            state.store.save(&record)?;
            Ok(record)
        })
        .await
    }

    pub(crate) fn now(&self) -> OffsetDateTime {
        (self.clock)()
    }
}

pub(crate) async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> elicit_core::Result<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| AppError(ElicitError::Io(format!("worker failed: {e}"))))?
        .map_err(AppError)
}

fn cors(origins: &[String]) -> CorsLayer {
    let allow = if origins.iter().any(|o| o == "*") {
        AllowOrigin::from(Any)
    } else {
        AllowOrigin::list(origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers(Any)
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = cors(&state.config.cors_origins);
    routes::routes()
        .with_state(state)
        .layer(TraceLayer::new_for_http())
        .layer(cors)
}
