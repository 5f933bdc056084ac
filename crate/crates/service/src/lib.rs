//! HTTP API over the notation and the game.
//!
//! Every route answers JSON except `GET /render`, which returns the raw
//! SVG (`image/svg+xml`) or ANSI text. Malformed input is a 400 carrying
//! `{kind, offset, message}`; a failed attempt is a 200 whose `status`
//! says why.

mod config;
mod error;
mod routes;
mod state;

use std::sync::Arc;

use axum::http::{HeaderValue, Method};
use axum::Router;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub use config::{ApiConfig, DEFAULT_BIND};
pub use error::{ApiError, ServiceError};
pub use routes::{routes, SVG, TEXT};
pub use state::AppState;

fn cors(origins: &[String]) -> Result<Option<CorsLayer>, ServiceError> {
    if origins.is_empty() {
        return Ok(None);
    }
    let layer = CorsLayer::new().allow_methods([Method::GET, Method::POST]).allow_headers(Any);
    if origins.iter().any(|o| o == "*") {
        return Ok(Some(layer.allow_origin(Any)));
    }
    let list = origins
        .iter()
        .map(|o| HeaderValue::from_str(o).map_err(|_| ServiceError::Config(format!("bad CORS origin `{o}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(layer.allow_origin(AllowOrigin::list(list))))
}

/// Builds the application: state, routes, and CORS per the config.
pub fn app(config: &ApiConfig) -> Result<Router, ServiceError> {
    let router = routes(Arc::new(AppState::new(config)?));
    Ok(match cors(&config.cors_origins)? {
        Some(layer) => router.layer(layer),
        None => router,
    })
}

/// Serves until the process is stopped.
pub fn serve(config: &ApiConfig) -> Result<(), ServiceError> {
    let router = app(config)?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| ServiceError::Config(e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(&config.bind)
            .await
            .map_err(|e| ServiceError::Config(format!("cannot bind {}: {e}", config.bind)))?;
        axum::serve(listener, router).await.map_err(|e| ServiceError::Config(e.to_string()))
    })
}
