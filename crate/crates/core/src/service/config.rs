use std::path::{Path, PathBuf};
use std::time::Duration;

use super::StartupError;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";
pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(3600);

/// Service settings, read from a flat `key = value` file.
///
/// ```text
/// # comments and blank lines are ignored
/// ontology_uri = data/traffic.kb
/// store_path = data/sample_store.json
/// listen_address = 127.0.0.1:8080
/// session_ttl = 3600
/// ```
///
/// Relative paths are resolved against the directory holding the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// A file path, `file://` URI or `http(s)://` URL of the core ontology.
    pub ontology_uri: String,
    pub store_path: PathBuf,
    pub listen_address: String,
    pub session_ttl: Duration,
}

impl Config {
    pub fn new(ontology_uri: impl Into<String>, store_path: impl Into<PathBuf>) -> Self {
        Config {
            ontology_uri: ontology_uri.into(),
            store_path: store_path.into(),
            listen_address: DEFAULT_LISTEN.to_string(),
            session_ttl: DEFAULT_SESSION_TTL,
        }
    }

    pub fn parse(text: &str, base: &Path) -> Result<Config, StartupError> {
        let mut uri = None;
        let mut store = None;
        let mut listen = None;
        let mut ttl = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |why: &str| StartupError::Config(format!("line {}: {why}", n + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let value = value.trim().to_string();
            match key.trim() {
                "ontology_uri" => uri = Some(value),
                "store_path" => store = Some(value),
                "listen_address" => listen = Some(value),
                "session_ttl" => {
                    let secs: u64 = value.parse().map_err(|_| bad("session_ttl must be a number of seconds"))?;
                    ttl = Some(Duration::from_secs(secs));
                }
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        let uri = uri.ok_or_else(|| StartupError::Config("missing ontology_uri".into()))?;
        let store = store.ok_or_else(|| StartupError::Config("missing store_path".into()))?;
        let ontology_uri = if is_url(&uri) || Path::new(&uri).is_absolute() {
            uri
        } else {
            base.join(uri).to_string_lossy().into_owned()
        };
        Ok(Config {
            ontology_uri,
            store_path: base.join(store),
            listen_address: listen.unwrap_or_else(|| DEFAULT_LISTEN.to_string()),
            session_ttl: ttl.unwrap_or(DEFAULT_SESSION_TTL),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Config, StartupError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| StartupError::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

fn is_url(s: &str) -> bool {
    s.starts_with("http://") || s.starts_with("https://") || s.starts_with("file://")
}

/// Fetches the ontology document named by `uri`.
pub fn fetch_ontology(uri: &str) -> Result<String, StartupError> {
    let fail = |reason: String| StartupError::Ontology {
        uri: uri.to_string(),
        reason,
    };
    if uri.starts_with("http://") || uri.starts_with("https://") {
        let resp = ureq::get(uri).call().map_err(|e| fail(e.to_string()))?;
        return resp.into_string().map_err(|e| fail(e.to_string()));
    }
    let path = uri.strip_prefix("file://").unwrap_or(uri);
    std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))
}
