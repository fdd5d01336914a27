use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use super::{AppState, Config, Scope, ServiceError, Snapshot, StartupError, LANGUAGES};

/// Response header carrying the generation a read was answered from.
pub const GENERATION_HEADER: &str = "x-kb-generation";

type Shared = Arc<AppState>;
type Params = Query<HashMap<String, String>>;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self {
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Unauthorized | ServiceError::BadCredentials => StatusCode::UNAUTHORIZED,
            ServiceError::Conflict(_) => StatusCode::CONFLICT,
            ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/locations", get(locations))
        .route("/api/dangers", get(dangers))
        .route("/api/questions", get(questions))
        .route("/api/sync", post(sync))
        .route("/api/ontology", get(ontology))
        .route("/api/login", post(login))
        .route("/api/conditions", get(conditions).post(update_conditions))
        .with_state(state)
}

/// Loads the configured ontology, binds and serves until Ctrl-C.
pub async fn serve(config: &Config) -> Result<(), StartupError> {
    let state = Arc::new(AppState::from_config(config)?);
    let bind_err = |source| StartupError::Bind {
        address: config.listen_address.clone(),
        source,
    };
    let listener = tokio::net::TcpListener::bind(&config.listen_address).await.map_err(bind_err)?;
    eprintln!("listening on {}", listener.local_addr().map_err(bind_err)?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(bind_err)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::Internal(e.to_string()))?
}

fn with_generation(snap: &Snapshot, body: impl IntoResponse) -> Response {
    let mut resp = body.into_response();
    resp.headers_mut()
        .insert(GENERATION_HEADER, HeaderValue::from(snap.generation));
    resp
}

fn lang(params: &HashMap<String, String>) -> Result<String, ServiceError> {
    let lang = params.get("lang").map(String::as_str).unwrap_or("en");
    if LANGUAGES.contains(&lang) {
        Ok(lang.to_string())
    } else {
        Err(ServiceError::BadRequest(format!("unsupported lang {lang}")))
    }
}

async fn locations(State(app): State<Shared>) -> Result<Response, ServiceError> {
    let store = blocking(move || app.load_store()).await?;
    let streets: BTreeMap<i64, &str> = store.streets.iter().map(|s| (s.id, s.name.as_str())).collect();
    let districts: BTreeMap<i64, &str> = store.districts.iter().map(|d| (d.id, d.name.as_str())).collect();
    let codes: BTreeMap<i64, &str> = store.postal_codes.iter().map(|p| (p.id, p.value.as_str())).collect();
    let body = json!({
        "districts": store.districts.iter().map(|d| &d.name).collect::<Vec<_>>(),
        "streets": store.streets.iter().map(|s| &s.name).collect::<Vec<_>>(),
        "postal_codes": store.postal_codes.iter().map(|p| &p.value).collect::<Vec<_>>(),
        "mappings": {
            "street_2_district": store.street_2_district.iter()
                .map(|j| json!({ "street": streets[&j.street_id], "district": districts[&j.district_id] }))
                .collect::<Vec<_>>(),
            "street_2_postal_code": store.street_2_postal_code.iter()
                .map(|j| json!({ "street": streets[&j.street_id], "postal_code": codes[&j.postal_code_id] }))
                .collect::<Vec<_>>(),
        },
    });
    Ok(Json(body).into_response())
}

async fn dangers(State(app): State<Shared>, Query(params): Params) -> Result<Response, ServiceError> {
    let scope = params.get("scope").map(String::as_str).unwrap_or_default();
    let scope = Scope::parse(scope).ok_or_else(|| ServiceError::BadRequest(format!("unsupported scope `{scope}`")))?;
    let lang = lang(&params)?;
    let name = params
        .get("name")
        .cloned()
        .ok_or_else(|| ServiceError::BadRequest("missing name".into()))?;
    let (snap, list) = blocking(move || {
        let snap = app.snapshot()?;
        let list = snap.dangers(scope, &name, &lang)?;
        Ok((snap, list))
    })
    .await?;
    Ok(with_generation(&snap, Json(list)))
}

async fn questions(State(app): State<Shared>, Query(params): Params) -> Result<Response, ServiceError> {
    let lang = lang(&params)?;
    let (snap, list) = blocking(move || {
        let snap = app.snapshot()?;
        let list = snap.questions(&app.core, &lang);
        Ok((snap, list))
    })
    .await?;
    Ok(with_generation(&snap, Json(list)))
}

async fn sync(State(app): State<Shared>) -> Result<Response, ServiceError> {
    let snap = blocking(move || app.sync()).await?;
    Ok(with_generation(&snap, Json(json!({ "generation": snap.generation }))))
}

async fn ontology(State(app): State<Shared>, Query(params): Params) -> Result<Response, ServiceError> {
    let variant = params.get("variant").map(String::as_str).unwrap_or("core");
    let text = app.ontology(variant)?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

#[derive(Deserialize)]
struct LoginRequest {
    username: String,
    password: String,
}

async fn login(State(app): State<Shared>, Json(req): Json<LoginRequest>) -> Result<Response, ServiceError> {
    let token = blocking(move || app.login(&req.username, &req.password)).await?;
    Ok(Json(json!({ "token": token })).into_response())
}

fn bearer(headers: &HeaderMap) -> Result<&str, ServiceError> {
    headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(str::trim)
        .ok_or(ServiceError::Unauthorized)
}

/// The condition forest and the current assignments, for the control panel.
async fn conditions(State(app): State<Shared>, Query(params): Params) -> Result<Response, ServiceError> {
    let lang = lang(&params)?;
    let core_labels = app.clone();
    let store = blocking(move || app.load_store()).await?;
    let codes: BTreeMap<i64, &str> = store.postal_codes.iter().map(|p| (p.id, p.value.as_str())).collect();
    let names: BTreeMap<i64, &str> = store.traffic_conditions.iter().map(|c| (c.id, c.name.as_str())).collect();
    let mut assigned: BTreeMap<&str, Vec<&str>> = codes.values().map(|&v| (v, Vec::new())).collect();
    for a in &store.traffic_condition_2_postal_code {
        assigned
            .entry(codes[&a.postal_code_id])
            .or_default()
            .push(names[&a.traffic_condition_id]);
    }
    let forest: Vec<_> = store
        .traffic_conditions
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "parent_id": c.parent_id,
                "name": c.name,
                "description": c.description,
                "label": core_labels.core.label(&c.name, &lang),
            })
        })
        .collect();
    Ok(Json(json!({ "conditions": forest, "assignments": assigned })).into_response())
}

#[derive(Deserialize)]
struct ConditionUpdate {
    postal_code: String,
    condition_names: Vec<String>,
}

async fn update_conditions(State(app): State<Shared>, headers: HeaderMap, body: Bytes) -> Result<Response, ServiceError> {
    let user = app.authenticate(bearer(&headers)?)?;
    let req: ConditionUpdate =
        serde_json::from_slice(&body).map_err(|e| ServiceError::BadRequest(format!("bad request body: {e}")))?;
    let postal_code = req.postal_code.clone();
    let names = blocking(move || app.assign_conditions(&req.postal_code, &req.condition_names)).await?;
    Ok(Json(json!({ "postal_code": postal_code, "condition_names": names, "updated_by": user })).into_response())
}
