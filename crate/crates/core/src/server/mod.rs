//! JSON-over-HTTP API for authoring tools.
//!
//! Datasets are immutable and addressed by content hash. Sessions hold the
//! mutable authoring state (cut, options, panel spans, caption edits) and are
//! written to the dataset store after every change. Each mutation bumps the
//! session version; a request carrying a stale `version` gets 409.

mod error;

pub use error::{parse_body, ApiError};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::cors::CorsLayer;

use crate::api::{community_view_from, cut_view, metrics_view, CutView, DendrogramView};
use crate::clustering::{CutCriterion, Dendrogram, Scope};
use crate::comic::{assemble_comic, edit_timeline, generate_comic, ComicOptions};
use crate::community::{CommunityMethod, CommunityTimeline, EvolutionConfig};
use crate::graph::{AggregationPolicy, DynamicGraph, EgoLevel, MetricKind, Span};
use crate::io::{from_json_str, load_csv_str, CsvOptions, DatasetStore};
use crate::layout::{CanvasConfig, LayoutMode, Viewport};
use crate::narrative::CaptionTemplates;
use crate::render::{render, ComicTemplate, HullOverlay, StyleOverride};

pub const VERSION_HEADER: &str = "x-session-version";

type DendroKey = (String, String, AggregationPolicy);

struct Inner {
    store: DatasetStore,
    templates: CaptionTemplates,
    datasets: RwLock<HashMap<String, Arc<DynamicGraph>>>,
    dendrograms: RwLock<HashMap<DendroKey, Arc<Dendrogram>>>,
    communities: RwLock<HashMap<(String, String), Arc<CommunityTimeline>>>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next_session: AtomicU64,
}

/// Shared service state; cheap to clone.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

/// Authoring state of one comic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub dataset: String,
    pub version: u64,
    pub scope: String,
    pub cut: Option<CutCriterion>,
    /// Panel spans in time order.
    pub spans: Vec<Span>,
    pub options: ComicOptions,
    /// Caption text edits by panel index.
    pub captions: BTreeMap<usize, String>,
    pub template: Option<ComicTemplate>,
}

impl AppState {
    pub fn new(store: DatasetStore, templates: CaptionTemplates) -> Self {
        // continue numbering after sessions persisted by earlier runs
        let next = store
            .session_ids()
            .iter()
            .filter_map(|id| id.strip_prefix('s')?.parse::<u64>().ok())
            .max()
            .map_or(1, |n| n + 1);
        Self(Arc::new(Inner {
            store,
            templates,
            datasets: RwLock::default(),
            dendrograms: RwLock::default(),
            communities: RwLock::default(),
            sessions: Mutex::default(),
            next_session: AtomicU64::new(next),
        }))
    }

    pub fn store(&self) -> &DatasetStore {
        &self.0.store
    }

    fn dataset(&self, id: &str) -> Result<Arc<DynamicGraph>, ApiError> {
        if let Some(dg) = self.0.datasets.read().unwrap().get(id) {
            return Ok(dg.clone());
        }
        let dg = Arc::new(self.0.store.get(id)?);
        self.0.datasets.write().unwrap().insert(id.to_owned(), dg.clone());
        Ok(dg)
    }

    fn dendrogram(
        &self,
        id: &str,
        dg: &DynamicGraph,
        scope: &Scope,
        agg: AggregationPolicy,
    ) -> Result<Arc<Dendrogram>, ApiError> {
        let key = (id.to_owned(), scope.to_string(), agg);
        if let Some(d) = self.0.dendrograms.read().unwrap().get(&key) {
            return Ok(d.clone());
        }
        let d = Arc::new(crate::clustering::build_dendrogram(dg, scope, agg)?);
        self.0.dendrograms.write().unwrap().insert(key, d.clone());
        Ok(d)
    }

    fn community(
        &self,
        id: &str,
        dg: &DynamicGraph,
        method: &CommunityMethod,
    ) -> Result<Arc<CommunityTimeline>, ApiError> {
        let key = (id.to_owned(), method.to_string());
        if let Some(t) = self.0.communities.read().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(CommunityTimeline::detect(dg, method, EvolutionConfig::default())?);
        self.0.communities.write().unwrap().insert(key, t.clone());
        Ok(t)
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let mut sessions = self.0.sessions.lock().unwrap();
        if let Some(s) = sessions.get(id) {
            return Ok(s.clone());
        }
        let s: Session = self
            .0
            .store
            .get_session(id)?
            .ok_or_else(|| ApiError::not_found(format!("unknown session `{id}`")))?;
        let s = Arc::new(Mutex::new(s));
        sessions.insert(id.to_owned(), s.clone());
        Ok(s)
    }

    /// Rebuild the session's template from its spans and options.
    fn rebuild(&self, s: &Session) -> Result<ComicTemplate, ApiError> {
        let dg = self.dataset(&s.dataset)?;
        let scope = parse_scope(&s.scope, None)?;
        let d = self.dendrogram(&s.dataset, &dg, &scope, s.options.aggregation)?;
        let mut t = assemble_comic(&dg, &d, &s.spans, &s.options, &self.0.templates)?;
        for (&i, text) in &s.captions {
            if let Some(p) = t.panels.get_mut(i) {
                p.caption.text = text.clone();
            }
        }
        Ok(t)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/datasets", post(upload_dataset).get(list_datasets))
        .route("/datasets/{id}", get(get_dataset))
        .route("/datasets/{id}/dendrogram", get(get_dendrogram))
        .route("/datasets/{id}/nodes/{node}/metrics", get(get_metrics))
        .route("/datasets/{id}/community", get(get_community))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/cut", post(post_cut))
        .route("/sessions/{id}/comic", post(post_comic))
        .route("/sessions/{id}/panels/{p}/timeline", post(post_timeline))
        .route("/sessions/{id}/style", post(post_style))
        .route("/sessions/{id}/export", post(post_export))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serve until the process is stopped.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn json<T: Serialize>(value: &T) -> Response {
    json_response(StatusCode::OK, serde_json::to_string(value).expect("response serialises"))
}

fn with_version(mut r: Response, version: u64) -> Response {
    r.headers_mut()
        .insert(VERSION_HEADER, HeaderValue::from_str(&version.to_string()).unwrap());
    r
}

fn parse_scope(scope: &str, level: Option<&str>) -> Result<Scope, ApiError> {
    let mut s: Scope = scope.parse().map_err(|e: String| ApiError::bad(e).at("scope"))?;
    if let (Scope::Ego { level: l, .. }, Some(text)) = (&mut s, level) {
        *l = text.parse().map_err(|e: String| ApiError::bad(e).at("level"))?;
    }
    Ok(s)
}

fn parse_agg(q: &BTreeMap<String, String>) -> Result<AggregationPolicy, ApiError> {
    q.get("agg")
        .map_or(Ok(AggregationPolicy::Sum), |a| a.parse().map_err(|e: String| ApiError::bad(e).at("agg")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CsvUpload {
    edges_csv: String,
    #[serde(default)]
    nodes_csv: Option<String>,
    #[serde(default)]
    directed: bool,
    #[serde(default)]
    name: Option<String>,
}

/// `text/csv` edge list, a JSON object with `edges_csv` (and optionally
/// `nodes_csv`, `directed`, `name`), or the canonical JSON dataset.
async fn upload_dataset(State(st): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("");
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad("body is not UTF-8"))?;
    let dg = if content_type.starts_with("text/csv") {
        load_csv_str(text, None, &CsvOptions::default())?
    } else {
        let v: Value = serde_json::from_str(text).map_err(|e| ApiError::bad(e.to_string()))?;
        if v.get("times").is_some() {
            from_json_str(text)?
        } else {
            let u: CsvUpload = parse_body(&body)?;
            let opts = CsvOptions {
                directed: u.directed,
                name: u.name,
            };
            load_csv_str(&u.edges_csv, u.nodes_csv.as_deref(), &opts)?
        }
    };
    let manifest = st.store().put(&dg)?;
    st.0.datasets.write().unwrap().insert(manifest.id.clone(), Arc::new(dg));
    Ok(json_response(StatusCode::CREATED, serde_json::to_string(&manifest).unwrap()))
}

async fn list_datasets(State(st): State<AppState>) -> Result<Response, ApiError> {
    Ok(json(&st.store().list()?))
}

async fn get_dataset(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(json(&st.store().manifest(&id)?))
}

async fn get_dendrogram(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<BTreeMap<String, String>>,
) -> Result<Response, ApiError> {
    let dg = st.dataset(&id)?;
    let scope = parse_scope(q.get("scope").map_or("whole", String::as_str), q.get("level").map(String::as_str))?;
    if let Scope::Ego { node, .. } = &scope {
        if !dg.all_node_ids().contains(node.as_str()) {
            return Err(ApiError::not_found(format!("unknown node `{node}`")).at("scope"));
        }
    }
    let agg = parse_agg(&q)?;
    let d = st.dendrogram(&id, &dg, &scope, agg)?;
    Ok(json(&DendrogramView {
        scope: scope.to_string(),
        labels: dg.labels().map(str::to_owned).collect(),
        dendrogram: (*d).clone(),
    }))
}

async fn get_metrics(
    State(st): State<AppState>,
    Path((id, node)): Path<(String, String)>,
    Query(q): Query<BTreeMap<String, String>>,
) -> Result<Response, ApiError> {
    let dg = st.dataset(&id)?;
    if !dg.all_node_ids().contains(node.as_str()) {
        return Err(ApiError::not_found(format!("unknown node `{node}`")));
    }
    let metric: MetricKind = q
        .get("metric")
        .map_or(Ok(MetricKind::Degree), |m| m.parse())
        .map_err(|e: String| ApiError::bad(e).at("metric"))?;
    let level: EgoLevel = q
        .get("level")
        .map_or(Ok(EgoLevel::default()), |l| l.parse())
        .map_err(|e: String| ApiError::bad(e).at("level"))?;
    Ok(json(&metrics_view(&dg, &node, metric, level)))
}

async fn get_community(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<BTreeMap<String, String>>,
) -> Result<Response, ApiError> {
    let dg = st.dataset(&id)?;
    let method: CommunityMethod = q.get("method").map_or("louvain", String::as_str).parse()?;
    let chars: Vec<String> = q
        .get("chars")
        .map(|c| c.split(',').filter(|s| !s.is_empty()).map(str::to_owned).collect())
        .unwrap_or_default();
    let timeline = st.community(&id, &dg, &method)?;
    Ok(json(&community_view_from(&dg, &method, (*timeline).clone(), &chars)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewSession {
    dataset: String,
    #[serde(default)]
    scope: Option<String>,
    #[serde(default)]
    level: Option<EgoLevel>,
}

async fn create_session(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: NewSession = parse_body(&body)?;
    let dg = st
        .dataset(&req.dataset)
        .map_err(|e| if e.status == StatusCode::NOT_FOUND { e.at("dataset") } else { e })?;
    let level = req.level.map(|l| l.to_string());
    let scope = parse_scope(req.scope.as_deref().unwrap_or("whole"), level.as_deref())?;
    if let Scope::Ego { node, .. } = &scope {
        if !dg.all_node_ids().contains(node.as_str()) {
            return Err(ApiError::bad(format!("unknown node `{node}`")).at("scope"));
        }
    }
    let n = st.0.next_session.fetch_add(1, Ordering::SeqCst);
    let session = Session {
        id: format!("s{n:06}"),
        dataset: req.dataset,
        version: 0,
        scope: scope.to_string(),
        cut: None,
        spans: Vec::new(),
        options: ComicOptions::default(),
        captions: BTreeMap::new(),
        template: None,
    };
    st.store().put_session(&session.id, &session)?;
    let r = json_response(StatusCode::CREATED, serde_json::to_string(&session).unwrap());
    let version = session.version;
    st.0
        .sessions
        .lock()
        .unwrap()
        .insert(session.id.clone(), Arc::new(Mutex::new(session)));
    Ok(with_version(r, version))
}

async fn get_session(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.session(&id)?;
    let s = s.lock().unwrap();
    Ok(with_version(json(&*s), s.version))
}

/// Run `f` on a copy of the session; commit and persist it only on success.
fn mutate<T>(
    st: &AppState,
    id: &str,
    expected: Option<u64>,
    f: impl FnOnce(&mut Session) -> Result<T, ApiError>,
) -> Result<(T, u64), ApiError> {
    let s = st.session(id)?;
    let mut guard = s.lock().unwrap();
    if let Some(v) = expected {
        if v != guard.version {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                format!("session is at version {}, request was based on {v}", guard.version),
            )
            .at("version"));
        }
    }
    let mut next = guard.clone();
    let out = f(&mut next)?;
    next.version += 1;
    st.store().put_session(&next.id, &next)?;
    *guard = next;
    Ok((out, guard.version))
}

fn criterion(level: Option<f64>, k: Option<usize>) -> Result<Option<CutCriterion>, ApiError> {
    match (level, k) {
        (Some(_), Some(_)) => Err(ApiError::bad("give either `level` or `k`, not both").at("k")),
        (Some(l), None) => Ok(Some(CutCriterion::Level(l))),
        (None, Some(k)) => Ok(Some(CutCriterion::K(k))),
        (None, None) => Ok(None),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CutRequest {
    #[serde(default)]
    level: Option<f64>,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    ego: Option<EgoLevel>,
    #[serde(default)]
    version: Option<u64>,
}

#[derive(Serialize)]
struct CutResponse {
    version: u64,
    #[serde(flatten)]
    cut: CutView,
}

async fn post_cut(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: CutRequest = parse_body(&body)?;
    let crit = criterion(req.level, req.k)?.ok_or_else(|| ApiError::bad("`level` or `k` is required").at("k"))?;
    let (view, version) = mutate(&st, &id, req.version, |s| {
        let dg = st.dataset(&s.dataset)?;
        let scope = parse_scope(&s.scope, None)?;
        let d = st.dendrogram(&s.dataset, &dg, &scope, s.options.aggregation)?;
        let view = cut_view(&dg, &d, crit, req.ego.unwrap_or(s.options.ego), s.options.aggregation)?;
        s.cut = Some(crit);
        s.spans = view.clusters.iter().map(|c| c.span).collect();
        s.captions.clear();
        s.template = None;
        Ok(view)
    })?;
    Ok(with_version(json(&CutResponse { version, cut: view }), version))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComicRequest {
    #[serde(default)]
    level: Option<f64>,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    ego: Option<EgoLevel>,
    #[serde(default)]
    top: Option<f64>,
    #[serde(default)]
    highlight: Option<f64>,
    #[serde(default)]
    layout: Option<LayoutMode>,
    #[serde(default)]
    mains: Option<Vec<String>>,
    #[serde(default)]
    mains_per_panel: Option<usize>,
    #[serde(default)]
    aggregation: Option<AggregationPolicy>,
    #[serde(default)]
    canvas: Option<CanvasConfig>,
    #[serde(default)]
    viewport: Option<Viewport>,
    #[serde(default)]
    hulls: Option<Vec<HullOverlay>>,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    version: Option<u64>,
}

/// Template JSON exactly as the command line writes it.
fn template_response(t: &ComicTemplate, version: u64) -> Response {
    with_version(json_response(StatusCode::OK, t.to_json()), version)
}

async fn post_comic(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: ComicRequest = parse_body(&body)?;
    let crit = criterion(req.level, req.k)?;
    let (t, version) = mutate(&st, &id, req.version, |s| {
        let o = &mut s.options;
        if let Some(v) = req.ego {
            o.ego = v;
        }
        if let Some(v) = req.top {
            o.top = v;
        }
        if let Some(v) = req.highlight {
            o.highlight = v;
        }
        if let Some(v) = req.layout {
            o.layout = v;
        }
        if let Some(v) = req.mains {
            o.mains = v;
        }
        if let Some(v) = req.mains_per_panel {
            o.mains_per_panel = v;
        }
        if let Some(v) = req.aggregation {
            o.aggregation = v;
        }
        if let Some(v) = req.canvas {
            o.canvas = v;
        }
        if let Some(v) = req.viewport {
            o.viewport = v;
        }
        if let Some(v) = req.hulls {
            o.hulls = v;
        }
        if req.title.is_some() {
            o.title = req.title;
        }
        let t = match crit.or(if s.spans.is_empty() { s.cut } else { None }) {
            Some(c) => {
                let dg = st.dataset(&s.dataset)?;
                let scope = parse_scope(&s.scope, None)?;
                let d = st.dendrogram(&s.dataset, &dg, &scope, s.options.aggregation)?;
                let t = generate_comic(&dg, &d, c, &s.options, &st.0.templates)?;
                s.cut = Some(c);
                s.spans = t.panels.iter().map(|p| p.span).collect();
                s.captions.clear();
                t
            }
            None if s.spans.is_empty() => {
                return Err(ApiError::bad("no cut yet; give `level` or `k`").at("k"));
            }
            None => st.rebuild(s)?,
        };
        s.template = Some(t.clone());
        Ok(t)
    })?;
    Ok(template_response(&t, version))
}

/// A time given as its label, either as a string or a number.
#[derive(Deserialize)]
#[serde(untagged)]
enum TimeRef {
    Label(String),
    Number(serde_json::Number),
}

#[derive(Deserialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "lowercase")]
enum TimelineMode {
    Add,
    Replace,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TimelineRequest {
    mode: TimelineMode,
    times: Vec<TimeRef>,
    #[serde(default)]
    version: Option<u64>,
}

#[derive(Serialize)]
struct PanelSummary {
    span: Span,
    label: String,
}

#[derive(Serialize)]
struct TimelineResponse {
    version: u64,
    panels: Vec<PanelSummary>,
    template: ComicTemplate,
}

async fn post_timeline(
    State(st): State<AppState>,
    Path((id, p)): Path<(String, usize)>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: TimelineRequest = parse_body(&body)?;
    let ((panels, template), version) = mutate(&st, &id, req.version, |s| {
        let dg = st.dataset(&s.dataset)?;
        let times = req
            .times
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let label = match r {
                    TimeRef::Label(l) => l.clone(),
                    TimeRef::Number(n) => n.to_string(),
                };
                dg.time_of_label(&label)
                    .ok_or_else(|| ApiError::bad(format!("no time point labelled `{label}`")).at(format!("times[{i}]")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        s.spans = edit_timeline(&s.spans, p, &times, req.mode == TimelineMode::Replace, dg.last_time())?;
        // caption edits are tied to panel positions, which just moved
        s.captions.clear();
        let t = st.rebuild(s)?;
        s.template = Some(t.clone());
        let panels = s
            .spans
            .iter()
            .map(|&span| PanelSummary {
                span,
                label: dg.span_label(span),
            })
            .collect();
        Ok((panels, t))
    })?;
    Ok(with_version(
        json(&TimelineResponse {
            version,
            panels,
            template,
        }),
        version,
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StyleRequest {
    #[serde(default)]
    hidden: Option<BTreeSet<String>>,
    #[serde(default)]
    overrides: Option<BTreeMap<String, StyleOverride>>,
    /// Replacement caption text by panel index; `null` restores the generated text.
    #[serde(default)]
    captions: Option<BTreeMap<usize, Option<String>>>,
    #[serde(default)]
    layout: Option<LayoutMode>,
    #[serde(default)]
    version: Option<u64>,
}

async fn post_style(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: StyleRequest = parse_body(&body)?;
    let (t, version) = mutate(&st, &id, req.version, |s| {
        if s.spans.is_empty() {
            return Err(ApiError::bad("generate a comic first").at("panels"));
        }
        if let Some(h) = req.hidden {
            s.options.hidden = h;
        }
        if let Some(o) = req.overrides {
            s.options.style.overrides = o;
        }
        if let Some(l) = req.layout {
            s.options.layout = l;
        }
        if let Some(c) = req.captions {
            for (i, text) in c {
                if i >= s.spans.len() {
                    return Err(ApiError::bad(format!("there is no panel {i}")).at(format!("captions.{i}")));
                }
                match text {
                    Some(text) => s.captions.insert(i, text),
                    None => s.captions.remove(&i),
                };
            }
        }
        let t = st.rebuild(s)?;
        s.template = Some(t.clone());
        Ok(t)
    })?;
    Ok(template_response(&t, version))
}

async fn post_export(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.session(&id)?;
    let s = s.lock().unwrap();
    let t = s
        .template
        .as_ref()
        .ok_or_else(|| ApiError::bad("no comic generated yet").at("template"))?;
    let svg = render(t)?;
    Ok(with_version(
        ([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response(),
        s.version,
    ))
}
