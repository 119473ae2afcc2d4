//! Read-only HTTP API over solutions computed or loaded at startup.
//!
//! Documents are rendered once, up front, so identical requests get
//! identical bytes and handlers never touch the solver.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use riskgame_core::analysis::extract_thresholds;
use riskgame_core::game::Position;
use riskgame_core::interval::Solution;
use serde_json::json;
use tower_http::cors::CorsLayer;

use crate::document::{to_canonical_json, PolicyDocument, StateAnswer};
use crate::table::TableDocument;

struct Served {
    solution: Solution,
    policy_json: String,
    table_json: String,
}

#[derive(Clone)]
pub struct AppState {
    targets: Arc<BTreeMap<u32, Served>>,
}

impl AppState {
    pub fn new(solutions: impl IntoIterator<Item = Solution>) -> Self {
        let targets = solutions
            .into_iter()
            .map(|solution| {
                let policy_json = PolicyDocument::from_solution(&solution).to_canonical_json();
                let table_json =
                    to_canonical_json(&TableDocument::new(&extract_thresholds(&solution)));
                (
                    solution.n(),
                    Served {
                        solution,
                        policy_json,
                        table_json,
                    },
                )
            })
            .collect();
        AppState {
            targets: Arc::new(targets),
        }
    }

    pub fn targets(&self) -> impl Iterator<Item = u32> + '_ {
        self.targets.keys().copied()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/healthz", get(healthz))
        .route("/api/v1/policy/{n}", get(policy))
        .route("/api/v1/table/{n}", get(table))
        .route("/api/v1/state", get(state_answer))
        .fallback(|| async { error(StatusCode::NOT_FOUND, "no such endpoint") })
        .layer(CorsLayer::permissive())
        .with_state(state)
}

pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn json_body(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    json_body(
        status,
        to_canonical_json(&json!({ "error": message.into() })),
    )
}

async fn healthz() -> Response {
    json_body(
        StatusCode::OK,
        to_canonical_json(&json!({ "status": "ok" })),
    )
}

/// Status and message for a request that cannot be answered.
type Rejection = (StatusCode, String);

fn reject(rejection: Rejection) -> Response {
    error(rejection.0, rejection.1)
}

fn lookup<'a>(state: &'a AppState, n: &str) -> Result<&'a Served, Rejection> {
    let n: u32 = n.parse().map_err(|_| {
        (
            StatusCode::BAD_REQUEST,
            format!("n must be a non-negative integer, got {n:?}"),
        )
    })?;
    state.targets.get(&n).ok_or_else(|| {
        (
            StatusCode::NOT_FOUND,
            format!("no solution loaded for n = {n}"),
        )
    })
}

async fn policy(State(state): State<AppState>, Path(n): Path<String>) -> Response {
    match lookup(&state, &n) {
        Ok(served) => json_body(StatusCode::OK, served.policy_json.clone()),
        Err(rejection) => reject(rejection),
    }
}

async fn table(State(state): State<AppState>, Path(n): Path<String>) -> Response {
    match lookup(&state, &n) {
        Ok(served) => json_body(StatusCode::OK, served.table_json.clone()),
        Err(rejection) => reject(rejection),
    }
}

async fn state_answer(
    State(state): State<AppState>,
    Query(query): Query<BTreeMap<String, String>>,
) -> Response {
    let field = |name: &str| -> Result<&str, Rejection> {
        query.get(name).map(String::as_str).ok_or_else(|| {
            (
                StatusCode::BAD_REQUEST,
                format!("missing query parameter {name}"),
            )
        })
    };
    let coord = |name: &str| -> Result<u32, Rejection> {
        let raw = field(name)?;
        raw.parse().map_err(|_| {
            (
                StatusCode::BAD_REQUEST,
                format!("{name} must be a non-negative integer, got {raw:?}"),
            )
        })
    };
    let answer = (|| {
        let served = lookup(&state, field("n")?)?;
        let pos = Position::new(coord("a")?, coord("b")?, coord("c")?);
        StateAnswer::new(&served.solution, pos).ok_or_else(|| {
            (
                StatusCode::NOT_FOUND,
                format!("{pos} is not a live position"),
            )
        })
    })();
    match answer {
        Ok(answer) => json_body(StatusCode::OK, to_canonical_json(&answer)),
        Err(rejection) => reject(rejection),
    }
}
