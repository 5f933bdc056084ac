use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::header::CONTENT_TYPE;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use geckograph::diff::{annotate_with, diff};
use geckograph::game::{AttemptStatus, Experience, Group, Level, Session, DEFINITION_NAME};
use geckograph::infer::{infer, parse_definition, parse_expr, subsumes, Definition};
use geckograph::layout::layout;
use geckograph::render::{to_ansi, to_svg, Mode, RenderOptions};
use geckograph::syntax::{parse_scheme, print_scheme, Scheme};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::{ApiError, AppState};

type St = State<Arc<AppState>>;
type ApiResult<T> = Result<T, ApiError>;

pub const SVG: &str = "image/svg+xml";
pub const TEXT: &str = "text/plain; charset=utf-8";
const DEFAULT_TERM_WIDTH: usize = 120;

/// The route table.
pub fn routes(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/attempts", post(attempt))
        .route("/sessions/{id}/skip", post(skip))
        .route("/levels", get(list_levels))
        .route("/levels/{n}", get(get_level))
        .route("/infer", post(infer_code))
        .route("/render", get(render_get).post(render_post))
        .route("/diff", get(diff_get).post(diff_post))
        .with_state(state)
}

/// Parses a JSON body into our own error shape rather than axum's.
fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::BadRequest {
        kind: "bad_json",
        offset: None,
        message: e.to_string(),
    })
}

fn scheme(text: &str) -> ApiResult<Scheme> {
    Ok(parse_scheme(text)?)
}

fn signature(state: &AppState, name: Option<&str>, s: &Scheme, shown: bool) -> Value {
    let mut v = json!({"signature": print_scheme(s)});
    if let Some(n) = name {
        v["name"] = json!(n);
    }
    if shown {
        v["svg"] = json!(state.svg(s, name));
    }
    v
}

fn level_view(state: &AppState, level: &Level, shown: bool) -> Value {
    json!({
        "number": level.number,
        "title": level.title,
        "target": signature(state, Some(DEFINITION_NAME), &level.target, shown),
        "available": level.available.iter().map(|(n, s)| signature(state, Some(n), s, shown)).collect::<Vec<_>>(),
        "gecko_shown": shown,
    })
}

fn session_view(state: &AppState, s: &Session) -> Value {
    let level = state.game.current_level(s).map(|l| level_view(state, l, state.shown(s, l.number)));
    json!({"session": s, "complete": s.is_complete(), "level": level})
}

#[derive(Deserialize)]
struct NewSession {
    group: Option<Group>,
    experience: Experience,
}

async fn create_session(State(st): St, bytes: Bytes) -> ApiResult<Json<Value>> {
    let req: NewSession = body(&bytes)?;
    let s = st.create_session(req.group, req.experience)?;
    let mut v = session_view(&st, &s);
    v["session_id"] = json!(s.id);
    Ok(Json(v))
}

async fn get_session(State(st): St, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    Ok(Json(session_view(&st, &st.get_session(&id)?)))
}

#[derive(Deserialize)]
struct AttemptReq {
    code: String,
}

async fn attempt(State(st): St, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Json<Value>> {
    let req: AttemptReq = body(&bytes)?;
    let (level, result, s) = st.attempt(&id, &req.code)?;
    let mut v = serde_json::to_value(&result).map_err(|e| ApiError::Internal(e.to_string()))?;
    if result.status != AttemptStatus::Success && st.shown(&s, level) {
        if let Some(report) = &result.diff {
            let (l, r) = annotate_with(report, &st.layout);
            let o = RenderOptions::default();
            v["diff_svgs"] = json!({"left": to_svg(&l, &o), "right": to_svg(&r, &o)});
        }
    }
    v["level"] = json!(level);
    v["session"] = session_view(&st, &s);
    Ok(Json(v))
}

async fn skip(State(st): St, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    Ok(Json(session_view(&st, &st.skip(&id)?)))
}

async fn list_levels(State(st): St) -> Json<Value> {
    let items: Vec<Value> = (0..st.game.levels.len())
        .filter_map(|i| st.game.levels.by_index(i))
        .map(|l| json!({"number": l.number, "title": l.title}))
        .collect();
    Json(json!(items))
}

#[derive(Deserialize)]
struct LevelQuery {
    session: Option<String>,
    group: Option<u8>,
}

/// Renderings follow the treatment of the given session or group; a bare
/// request (a level browser outside any study) gets them.
async fn get_level(State(st): St, Path(n): Path<u32>, Query(q): Query<LevelQuery>) -> ApiResult<Json<Value>> {
    let level = st.level(n)?;
    let shown = match (&q.session, q.group) {
        (Some(id), _) => st.shown(&st.get_session(id)?, n),
        (None, Some(g)) => {
            let group = Group::try_from(g).map_err(|m| ApiError::bad("bad_group", m))?;
            geckograph::game::treatment(group, n, st.game.mode)
        }
        (None, None) => true,
    };
    Ok(Json(level_view(&st, level, shown)))
}

#[derive(Deserialize)]
struct InferReq {
    code: String,
    level: u32,
    session: Option<String>,
}

/// Code with `=` is a full definition; a bare expression has its unbound
/// names turned into parameters, in alphabetical order.
fn definition(code: &str, level: &Level) -> ApiResult<Definition> {
    let fx = level.fixities();
    if code.contains('=') {
        return Ok(parse_definition(code, &fx)?);
    }
    let body = parse_expr(code, &fx)?;
    let env = level.env();
    let params = body.names().into_iter().filter(|n| !env.contains_key(n)).collect();
    Ok(Definition { name: DEFINITION_NAME.into(), params, body })
}

async fn infer_code(State(st): St, bytes: Bytes) -> ApiResult<Json<Value>> {
    let req: InferReq = body(&bytes)?;
    let level = st.level(req.level)?;
    let shown = match &req.session {
        Some(id) => st.shown(&st.get_session(id)?, level.number),
        None => true,
    };
    let def = definition(&req.code, level)?;
    Ok(Json(match infer(&def, &level.env()) {
        Ok(s) => {
            let mut v = json!({
                "definition": def.to_string(),
                "inferred": print_scheme(&s),
                "matches_target": subsumes(&s, &level.target),
            });
            if shown {
                v["svg"] = json!(st.svg(&s, None));
            }
            v
        }
        Err(e) => json!({"definition": def.to_string(), "inferred": null, "error": e.to_json()}),
    }))
}

#[derive(Deserialize)]
struct RenderReq {
    #[serde(rename = "type")]
    ty: Option<String>,
    mode: Option<String>,
    format: Option<String>,
    width: Option<usize>,
    legend: Option<String>,
}

fn render(st: &AppState, req: RenderReq) -> ApiResult<Response> {
    let ty = req.ty.ok_or_else(|| ApiError::bad("missing_parameter", "`type` is required"))?;
    let mode = match req.mode.as_deref() {
        None | Some("full") => Mode::Full,
        Some("compact") => Mode::Compact,
        Some(m) => return Err(ApiError::bad("bad_parameter", format!("unknown mode `{m}`"))),
    };
    let node = layout(&scheme(&ty)?, &st.layout);
    let opts = RenderOptions { mode, legend: req.legend, ..RenderOptions::default() };
    match req.format.as_deref() {
        None | Some("svg") => Ok(([(CONTENT_TYPE, SVG)], to_svg(&node, &opts)).into_response()),
        Some("ansi") => {
            let out = to_ansi(&node, &opts, req.width.unwrap_or(DEFAULT_TERM_WIDTH))
                .map_err(|e| ApiError::bad("render_error", e.to_string()))?;
            Ok(([(CONTENT_TYPE, TEXT)], out).into_response())
        }
        Some(f) => Err(ApiError::bad("bad_parameter", format!("unknown format `{f}`"))),
    }
}

async fn render_get(State(st): St, Query(q): Query<RenderReq>) -> ApiResult<Response> {
    render(&st, q)
}

async fn render_post(State(st): St, bytes: Bytes) -> ApiResult<Response> {
    render(&st, body(&bytes)?)
}

#[derive(Deserialize)]
struct DiffReq {
    left: Option<String>,
    right: Option<String>,
}

fn diff_json(st: &AppState, req: DiffReq) -> ApiResult<Json<Value>> {
    let missing = |n: &str| ApiError::bad("missing_parameter", format!("`{n}` is required"));
    let left = scheme(&req.left.ok_or_else(|| missing("left"))?)?;
    let right = scheme(&req.right.ok_or_else(|| missing("right"))?)?;
    let report = diff(&left, &right);
    let (l, r) = annotate_with(&report, &st.layout);
    let o = RenderOptions::default();
    let mut v = Map::new();
    v.insert("report".into(), report.to_json());
    v.insert("left_svg".into(), json!(to_svg(&l, &o)));
    v.insert("right_svg".into(), json!(to_svg(&r, &o)));
    Ok(Json(Value::Object(v)))
}

async fn diff_get(State(st): St, Query(q): Query<DiffReq>) -> ApiResult<Json<Value>> {
    diff_json(&st, q)
}

async fn diff_post(State(st): St, bytes: Bytes) -> ApiResult<Json<Value>> {
    diff_json(&st, body(&bytes)?)
}
