//! The traffic-danger query service.
//!
//! Readers work on an immutable [`Snapshot`] (synchronized knowledge base,
//! reasoner and taxonomy) held by the [`KbCache`]. A sync builds a complete new
//! snapshot off to the side and swaps it in with one pointer store, so a
//! request sees either the old generation or the new one, never a blend.

mod config;
mod http;

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use rand::RngCore;
use serde::Serialize;
use thiserror::Error;

pub use config::{fetch_ontology, Config, DEFAULT_LISTEN, DEFAULT_SESSION_TTL};
pub use http::{router, serve};

use crate::model::{is_defined_class, ConceptExpr, KnowledgeBase, RoleExpr};
use crate::rdfxml::import_rdfxml;
use crate::reasoner::{Reasoner, ReasonerError, Taxonomy};
use crate::store::{load_store, postal_individual, save_store, synchronize, update_assignments, Store, StoreError};
use crate::syntax::{parse_text, serialize_text};

pub const LANGUAGES: [&str; 2] = ["en", "pl"];

#[derive(Debug, Error)]
pub enum StartupError {
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("cannot load ontology from {uri}: {reason}")]
    Ontology { uri: String, reason: String },
    #[error("cannot bind {address}: {source}")]
    Bind {
        address: String,
        #[source]
        source: std::io::Error,
    },
}

/// Request-level failures, each mapped to one HTTP status.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    NotFound(String),
    #[error("missing or invalid session token")]
    Unauthorized,
    #[error("unknown user or wrong password")]
    BadCredentials,
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Internal(String),
}

impl From<ReasonerError> for ServiceError {
    fn from(e: ReasonerError) -> Self {
        ServiceError::Internal(e.to_string())
    }
}

impl From<StoreError> for ServiceError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownId { .. } => ServiceError::NotFound(e.to_string()),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

/// Parses a core ontology document, sniffing RDF/XML by a leading `<`.
pub fn parse_ontology(text: &str) -> Result<KnowledgeBase, String> {
    if text.trim_start().starts_with('<') {
        import_rdfxml(text).map_err(|e| e.to_string())
    } else {
        parse_text(text).map_err(|e| e.to_string())
    }
}

/// One synchronized generation of the knowledge base.
#[derive(Debug)]
pub struct Snapshot {
    pub generation: u64,
    pub store: Store,
    pub reasoner: Reasoner,
    pub taxonomy: Taxonomy,
}

impl Snapshot {
    /// Synchronizes and classifies. Fails when the result is inconsistent.
    pub fn build(core: &KnowledgeBase, store: Store, generation: u64) -> Result<Snapshot, ServiceError> {
        let kb = synchronize(core, &store).map_err(|e| ServiceError::Internal(e.to_string()))?;
        let reasoner = Reasoner::new(&kb);
        let taxonomy = reasoner.classify().map_err(|e| match e {
            ReasonerError::InconsistentKB => ServiceError::Internal("synchronized ontology is inconsistent".into()),
            other => other.into(),
        })?;
        Ok(Snapshot {
            generation,
            store,
            reasoner,
            taxonomy,
        })
    }

    pub fn kb(&self) -> &KnowledgeBase {
        self.reasoner.kb()
    }

    /// Individual naming a location, if it exists in this snapshot's store.
    pub fn location_individual(&self, scope: Scope, name: &str) -> Option<String> {
        let s = &self.store;
        match scope {
            Scope::PostalCode => s.postal_code_by_value(name).map(|p| postal_individual(&p.value)),
            Scope::Street => s.streets.iter().find(|x| x.name == name).map(|x| x.name.clone()),
            Scope::District => s.districts.iter().find(|x| x.name == name).map(|x| x.name.clone()),
        }
    }

    /// Dangers that can occur at a location: named subclasses and equivalents
    /// of `TrafficDanger ⊓ ∃hasCondition.∃hasLocation.{loc}`, Bottom excluded.
    pub fn dangers(&self, scope: Scope, name: &str, lang: &str) -> Result<Vec<Labelled>, ServiceError> {
        let loc = self
            .location_individual(scope, name)
            .ok_or_else(|| ServiceError::NotFound(format!("unknown {} {name}", scope.as_str())))?;
        let answer = self.reasoner.dl_query(&danger_query(&loc), &self.taxonomy)?;
        let bottom = self.taxonomy.names(Taxonomy::BOTTOM);
        let names: BTreeSet<String> = answer
            .all_subclasses
            .union(&answer.equivalents)
            .filter(|n| !bottom.contains(*n))
            .cloned()
            .collect();
        Ok(names.into_iter().map(|n| self.labelled(n, lang)).collect())
    }

    /// For each defined class of `core`, its inferred strict named subclasses.
    pub fn questions(&self, core: &KnowledgeBase, lang: &str) -> Vec<Question> {
        let bottom = self.taxonomy.names(Taxonomy::BOTTOM);
        core.concept_names()
            .iter()
            .filter(|c| is_defined_class(c, core))
            .map(|c| {
                let answers: Vec<Labelled> = self
                    .taxonomy
                    .all_subclasses(c)
                    .into_iter()
                    .filter(|a| !bottom.contains(a))
                    .map(|a| self.labelled(a, lang))
                    .collect();
                Question {
                    question_class: c.clone(),
                    label: self.kb().label(c, lang).to_string(),
                    answers: answers.iter().map(|a| a.class_name.clone()).collect(),
                    answer_labels: answers.into_iter().map(|a| a.label).collect(),
                }
            })
            .collect()
    }

    fn labelled(&self, class_name: String, lang: &str) -> Labelled {
        let label = self.kb().label(&class_name, lang).to_string();
        Labelled { class_name, label }
    }
}

/// `TrafficDanger ⊓ ∃hasCondition.∃hasLocation.{loc}`
pub fn danger_query(location: &str) -> ConceptExpr {
    ConceptExpr::and(vec![
        ConceptExpr::atomic("TrafficDanger"),
        ConceptExpr::some(
            "hasCondition",
            ConceptExpr::some(RoleExpr::named("hasLocation"), ConceptExpr::one_of([location])),
        ),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    PostalCode,
    Street,
    District,
}

impl Scope {
    pub fn parse(s: &str) -> Option<Scope> {
        match s {
            "postal_code" => Some(Scope::PostalCode),
            "street" => Some(Scope::Street),
            "district" => Some(Scope::District),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scope::PostalCode => "postal_code",
            Scope::Street => "street",
            Scope::District => "district",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Labelled {
    pub class_name: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Question {
    pub question_class: String,
    pub label: String,
    pub answers: Vec<String>,
    pub answer_labels: Vec<String>,
}

/// The current snapshot plus the number of successful syncs so far.
#[derive(Debug, Default)]
pub struct KbCache {
    current: RwLock<Option<Arc<Snapshot>>>,
}

impl KbCache {
    pub fn current(&self) -> Option<Arc<Snapshot>> {
        self.current.read().expect("cache lock").clone()
    }

    pub fn generation(&self) -> u64 {
        self.current().map_or(0, |s| s.generation)
    }

    fn install(&self, snap: Snapshot) -> Arc<Snapshot> {
        let snap = Arc::new(snap);
        *self.current.write().expect("cache lock") = Some(snap.clone());
        snap
    }
}

#[derive(Debug, Clone)]
struct Session {
    username: String,
    expires: Instant,
}

/// Shared service state.
#[derive(Debug)]
pub struct AppState {
    pub core: KnowledgeBase,
    core_text: String,
    pub store_path: PathBuf,
    pub cache: KbCache,
    session_ttl: Duration,
    sessions: Mutex<HashMap<String, Session>>,
    /// Serializes syncs and store writes.
    writer: Mutex<()>,
}

impl AppState {
    pub fn new(core: KnowledgeBase, store_path: impl Into<PathBuf>, session_ttl: Duration) -> AppState {
        AppState {
            core_text: serialize_text(&core),
            core,
            store_path: store_path.into(),
            cache: KbCache::default(),
            session_ttl,
            sessions: Mutex::new(HashMap::new()),
            writer: Mutex::new(()),
        }
    }

    /// Loads the core ontology named by the config. The store is read on demand.
    pub fn from_config(config: &Config) -> Result<AppState, StartupError> {
        let text = fetch_ontology(&config.ontology_uri)?;
        let core = parse_ontology(&text).map_err(|reason| StartupError::Ontology {
            uri: config.ontology_uri.clone(),
            reason,
        })?;
        Ok(AppState::new(core, &config.store_path, config.session_ttl))
    }

    pub fn load_store(&self) -> Result<Store, ServiceError> {
        Ok(load_store(&self.store_path)?)
    }

    /// Re-reads the store, synchronizes, classifies and installs the result as
    /// the next generation. On failure the previous snapshot stays in place.
    pub fn sync(&self) -> Result<Arc<Snapshot>, ServiceError> {
        let _w = self.writer.lock().expect("writer lock");
        let store = self.load_store()?;
        let snap = Snapshot::build(&self.core, store, self.cache.generation() + 1)?;
        Ok(self.cache.install(snap))
    }

    /// The current snapshot, synchronizing first if there is none yet.
    pub fn snapshot(&self) -> Result<Arc<Snapshot>, ServiceError> {
        if let Some(s) = self.cache.current() {
            return Ok(s);
        }
        let _w = self.writer.lock().expect("writer lock");
        if let Some(s) = self.cache.current() {
            return Ok(s);
        }
        let snap = Snapshot::build(&self.core, self.load_store()?, 1)?;
        Ok(self.cache.install(snap))
    }

    /// Native-text rendering of the core or synchronized ontology.
    pub fn ontology(&self, variant: &str) -> Result<String, ServiceError> {
        match variant {
            "core" => Ok(self.core_text.clone()),
            "synchronized" => self
                .cache
                .current()
                .map(|s| serialize_text(s.kb()))
                .ok_or_else(|| ServiceError::Conflict("no synchronized ontology yet; run a sync first".into())),
            other => Err(ServiceError::BadRequest(format!("unknown variant {other}"))),
        }
    }

    pub fn login(&self, username: &str, password: &str) -> Result<String, ServiceError> {
        let store = self.load_store()?;
        if !crate::store::verify_credentials(&store, username, password) {
            return Err(ServiceError::BadCredentials);
        }
        let mut bytes = [0u8; 32];
        rand::thread_rng().fill_bytes(&mut bytes);
        let token = hex::encode(bytes);
        let mut sessions = self.sessions.lock().expect("session lock");
        let now = Instant::now();
        sessions.retain(|_, s| s.expires > now);
        sessions.insert(
            token.clone(),
            Session {
                username: username.to_string(),
                expires: now + self.session_ttl,
            },
        );
        Ok(token)
    }

    /// Username of a live session.
    pub fn authenticate(&self, token: &str) -> Result<String, ServiceError> {
        let mut sessions = self.sessions.lock().expect("session lock");
        match sessions.get(token) {
            Some(s) if s.expires > Instant::now() => Ok(s.username.clone()),
            Some(_) => {
                sessions.remove(token);
                Err(ServiceError::Unauthorized)
            }
            None => Err(ServiceError::Unauthorized),
        }
    }

    /// Replaces the conditions assigned to a postal code and persists the
    /// store. The cached snapshot is left alone until the next sync.
    pub fn assign_conditions(&self, postal_code: &str, condition_names: &[String]) -> Result<Vec<String>, ServiceError> {
        let _w = self.writer.lock().expect("writer lock");
        let store = self.load_store()?;
        let code = store
            .postal_code_by_value(postal_code)
            .ok_or_else(|| ServiceError::NotFound(format!("unknown postal_code {postal_code}")))?
            .id;
        let mut ids = BTreeSet::new();
        for name in condition_names {
            let c = store
                .condition_by_name(name)
                .ok_or_else(|| ServiceError::NotFound(format!("unknown condition {name}")))?;
            ids.insert(c.id);
        }
        let next = update_assignments(&store, code, &ids)?;
        save_store(&next, &self.store_path)?;
        let mut names: Vec<String> = condition_names.to_vec();
        names.sort();
        names.dedup();
        Ok(names)
    }
}
