use std::net::SocketAddr;
use std::path::PathBuf;

use clap::Parser;

/// Runtime configuration, from flags or `ELICIT_*` environment variables.
#[derive(Debug, Clone, Parser)]
#[command(name = "elicit-service", version, about = "HTTP JSON API for prior elicitation sessions")]
pub struct Config {
    #[arg(long, env = "ELICIT_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,

    /// Directory holding one `<id>.json` document per session.
    #[arg(long, env = "ELICIT_DATA_DIR", default_value = "sessions")]
    pub data_dir: PathBuf,

    /// Parameter draws per feedback request unless the request overrides it.
    #[arg(long = "default-k", env = "ELICIT_DEFAULT_K", default_value_t = 300)]
    pub default_k: usize,

    /// Grid points per feedback request unless the request overrides it.
    #[arg(long = "default-j", env = "ELICIT_DEFAULT_J", default_value_t = 300)]
    pub default_j: usize,

    /// Largest K accepted over the API; bigger runs belong to the CLI.
    #[arg(long = "max-k", env = "ELICIT_MAX_K", default_value_t = 10_000)]
    pub max_k: usize,

    /// Origins allowed by CORS, comma separated; `*` allows any.
    #[arg(long = "cors-origin", env = "ELICIT_CORS_ORIGINS", value_delimiter = ',')]
    pub cors_origins: Vec<String>,

    /// Emit request logs as JSON lines.
    #[arg(long, env = "ELICIT_LOG_JSON")]
    pub log_json: bool,
}

impl Config {
    /// Defaults for embedding and tests, storing sessions in `data_dir`.
    pub fn with_data_dir(data_dir: impl Into<PathBuf>) -> Self {
        Config {
            listen: ([127, 0, 0, 1], 8080).into(),
            data_dir: data_dir.into(),
            default_k: 300,
            default_j: 300,
            max_k: 10_000,
            cors_origins: Vec::new(),
            log_json: false,
        }
    }
}
