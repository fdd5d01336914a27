//! A real HTTP server on an ephemeral port, plus the sync atomicity probe.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde_json::Value;
use trafficdl::service::{router, AppState};
use trafficdl::store::{save_store, ConditionAssignment, Store};
use trafficdl::syntax::parse_text;

pub const CORE: &str = include_str!("../../data/traffic.kb");
pub const SAMPLE: &str = include_str!("../../data/sample_store.json");

pub struct Reply {
    pub status: u16,
    pub generation: Option<u64>,
    pub body: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.body).unwrap()
    }

    pub fn class_names(&self) -> Vec<String> {
        self.json()
            .as_array()
            .unwrap()
            .iter()
            .map(|d| d["class_name"].as_str().unwrap().to_string())
            .collect()
    }
}

pub struct LiveServer {
    pub base: String,
    pub store_path: PathBuf,
    pub state: Arc<AppState>,
    _dir: tempfile::TempDir,
    _rt: tokio::runtime::Runtime,
}

impl LiveServer {
    pub fn start(store: &Store) -> LiveServer {
        let dir = tempfile::tempdir().unwrap();
        let store_path = dir.path().join("store.json");
        save_store(store, &store_path).unwrap();
        let state = Arc::new(AppState::new(parse_text(CORE).unwrap(), &store_path, Duration::from_secs(600)));
        let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().unwrap();
        let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let app = router(state.clone());
        rt.spawn(async move { axum::serve(listener, app).await });
        LiveServer {
            base,
            store_path,
            state,
            _dir: dir,
            _rt: rt,
        }
    }

    pub fn request(&self, method: &str, path: &str, body: Option<&Value>, token: Option<&str>) -> Reply {
        let mut req = ureq::request(method, &format!("{}{path}", self.base));
        if let Some(t) = token {
            req = req.set("Authorization", &format!("Bearer {t}"));
        }
        let result = match body {
            Some(v) => req.set("Content-Type", "application/json").send_string(&v.to_string()),
            None => req.call(),
        };
        let resp = match result {
            Ok(r) => r,
            Err(ureq::Error::Status(_, r)) => r,
            Err(e) => panic!("{method} {path}: {e}"),
        };
        let status = resp.status();
        let generation = resp.header("x-kb-generation").map(|g| g.parse().unwrap());
        Reply {
            status,
            generation,
            body: resp.into_string().unwrap(),
        }
    }

    pub fn get(&self, path: &str) -> Reply {
        self.request("GET", path, None, None)
    }

    pub fn post(&self, path: &str, body: Option<&Value>, token: Option<&str>) -> Reply {
        self.request("POST", path, body, token)
    }
}

pub fn sample() -> Store {
    Store::from_json(SAMPLE).unwrap()
}

/// The sample store with rain and damaged drainage at 30-020 instead of
/// heavy congestion, so StareMiasto answers differently.
pub fn rainy_sample() -> Store {
    let mut store = sample();
    store.traffic_condition_2_postal_code = [7, 11]
        .map(|c| ConditionAssignment {
            traffic_condition_id: c,
            postal_code_id: 2,
        })
        .to_vec();
    store
}

#[derive(Debug, Default)]
pub struct AtomicityReport {
    pub iterations: usize,
    pub passed: usize,
    pub reads: usize,
    pub failures: Vec<String>,
}

/// Alternates the store between two versions and syncs once per iteration
/// while reader threads keep querying StareMiasto. Every answer must be the
/// answer of the generation named in its header; an iteration passes when
/// all of its reads do and at least one read saw the new generation.
pub fn sync_atomicity(iterations: usize, readers: usize) -> AtomicityReport {
    let versions = [sample(), rainy_sample()];
    let expected_for: Vec<Vec<String>> = versions
        .iter()
        .map(|s| {
            let snap = trafficdl::service::Snapshot::build(&parse_text(CORE).unwrap(), s.clone(), 0).unwrap();
            snap.dangers(trafficdl::service::Scope::District, "StareMiasto", "en")
                .unwrap()
                .into_iter()
                .map(|l| l.class_name)
                .collect()
        })
        .collect();
    assert_ne!(expected_for[0], expected_for[1]);

    let server = LiveServer::start(&versions[0]);
    let first = server.post("/api/sync", None, None).json()["generation"].as_u64().unwrap();
    let generations = Mutex::new(BTreeMap::from([(first, 0usize)]));
    let mut report = AtomicityReport {
        iterations,
        ..Default::default()
    };
    let query = "/api/dangers?scope=district&name=StareMiasto&lang=en";
    for i in 0..iterations {
        let version = (i + 1) % 2;
        save_store(&versions[version], &server.store_path).unwrap();
        let done = AtomicBool::new(false);
        let seen: Vec<Vec<(u64, Vec<String>)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..readers)
                .map(|_| {
                    scope.spawn(|| {
                        let mut seen = Vec::new();
                        loop {
                            let last = done.load(Ordering::SeqCst);
                            let r = server.get(query);
                            seen.push((r.generation.unwrap(), r.class_names()));
                            if last {
                                return seen;
                            }
                        }
                    })
                })
                .collect();
            let g = server.post("/api/sync", None, None).json()["generation"].as_u64().unwrap();
            generations.lock().unwrap().insert(g, version);
            done.store(true, Ordering::SeqCst);
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let generations = generations.lock().unwrap();
        let newest = *generations.keys().last().unwrap();
        let mut ok = true;
        let mut saw_new = false;
        for (g, names) in seen.iter().flatten() {
            report.reads += 1;
            saw_new |= *g == newest;
            match generations.get(g) {
                Some(&v) if expected_for[v] == *names => {}
                other => {
                    ok = false;
                    report.failures.push(format!("iteration {i}: generation {g} (version {other:?}) answered {names:?}"));
                }
            }
        }
        if ok && saw_new {
            report.passed += 1;
        }
    }
    report
}
