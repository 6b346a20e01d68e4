//! HTTP front end over [`Service`]: `GET|POST /wms`, `GET /gen-sld`, and
//! optional static assets at `/`.

use std::net::{SocketAddr, TcpListener};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::body::Bytes;
use axum::extract::{RawQuery, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use tokio::sync::oneshot;
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;
use tracing::{error, info, warn};

use contourwms::wms::{load_config, query_params, Service, WmsResponse};

use crate::{gen_sld_xml, CliError};

pub const SLD_CONTENT_TYPE: &str = "application/vnd.ogc.sld+xml";

fn into_http(resp: WmsResponse) -> Response {
    let status = StatusCode::from_u16(resp.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, resp.content_type)], resp.body).into_response()
}

async fn run_blocking(f: impl FnOnce() -> WmsResponse + Send + 'static) -> Response {
    match tokio::task::spawn_blocking(f).await {
        Ok(resp) => into_http(resp),
        Err(e) => {
            error!(error = %e, "request handler panicked");
            StatusCode::INTERNAL_SERVER_ERROR.into_response()
        }
    }
}

async fn wms_get(State(service): State<Arc<Service>>, RawQuery(query): RawQuery) -> Response {
    run_blocking(move || service.handle_get(&query.unwrap_or_default())).await
}

async fn wms_post(State(service): State<Arc<Service>>, body: Bytes) -> Response {
    run_blocking(move || service.handle_post(&body)).await
}

/// `?levels=450,475&start=%230000FF&end=%23FF0000&label_mode=all&layer=contours`
async fn gen_sld(RawQuery(query): RawQuery) -> Response {
    let params = query_params(&query.unwrap_or_default());
    let get = |k: &str, default: &str| params.get(k).cloned().unwrap_or_else(|| default.to_string());
    let Some(levels) = params.get("LEVELS") else {
        return (StatusCode::BAD_REQUEST, "missing parameter: levels\n").into_response();
    };
    match gen_sld_xml(
        levels,
        &get("START", "#0000FF"),
        &get("END", "#FF0000"),
        &get("LABEL_MODE", "index-only"),
        &get("LAYER", contourwms::contour::DEFAULT_RAMP_LAYER),
    ) {
        Ok(xml) => ([(header::CONTENT_TYPE, SLD_CONTENT_TYPE)], xml).into_response(),
        Err(e) => (StatusCode::BAD_REQUEST, format!("{e}\n")).into_response(),
    }
}

pub fn router(service: Arc<Service>, assets: Option<PathBuf>) -> Router {
    let mut app = Router::new()
        .route("/wms", get(wms_get).post(wms_post))
        .route("/gen-sld", get(gen_sld))
        .with_state(service);
    if let Some(dir) = assets {
        app = app.fallback_service(ServeDir::new(dir));
    }
    app.layer(TraceLayer::new_for_http())
}

/// A server running on its own thread; dropped or [`stop`](Self::stop)ped
/// servers shut down gracefully.
pub struct RunningServer {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<Result<(), CliError>>>,
}

impl RunningServer {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn stop(mut self) -> Result<(), CliError> {
        self.shutdown_and_join()
    }

    fn shutdown_and_join(&mut self) -> Result<(), CliError> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        match self.thread.take().map(JoinHandle::join) {
            Some(Ok(r)) => r,
            Some(Err(_)) => Err(CliError::Serve(std::io::Error::other("server thread panicked"))),
            None => Ok(()),
        }
    }
}

impl Drop for RunningServer {
    fn drop(&mut self) {
        let _ = self.shutdown_and_join();
    }
}

fn bind(addr: &str) -> Result<TcpListener, CliError> {
    let listener = TcpListener::bind(addr).map_err(|source| CliError::Bind {
        addr: addr.to_string(),
        source,
    })?;
    listener.set_nonblocking(true).map_err(CliError::Serve)?;
    Ok(listener)
}

async fn serve_until(listener: TcpListener, app: Router, stop: impl std::future::Future<Output = ()> + Send + 'static) -> Result<(), CliError> {
    let listener = tokio::net::TcpListener::from_std(listener).map_err(CliError::Serve)?;
    axum::serve(listener, app)
        .with_graceful_shutdown(stop)
        .await
        .map_err(CliError::Serve)
}

fn runtime() -> Result<tokio::runtime::Runtime, CliError> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(CliError::Serve)
}

/// Binds `addr` (port 0 picks a free port) and serves on a background thread.
pub fn start(service: Arc<Service>, assets: Option<PathBuf>, addr: &str) -> Result<RunningServer, CliError> {
    let listener = bind(addr)?;
    let local = listener.local_addr().map_err(CliError::Serve)?;
    let rt = runtime()?;
    let (tx, rx) = oneshot::channel::<()>();
    let app = router(service, assets);
    let thread = std::thread::spawn(move || {
        rt.block_on(serve_until(listener, app, async {
            let _ = rx.await;
        }))
    });
    Ok(RunningServer {
        addr: local,
        shutdown: Some(tx),
        thread: Some(thread),
    })
}

/// The `serve` command: load the config, bind, serve until Ctrl-C.
pub fn serve(config: &Path, host: &str, port: Option<u16>) -> Result<(), CliError> {
    let loaded = load_config(config)?;
    let port = port.unwrap_or(loaded.config.port);
    let assets = loaded.assets_dir();
    if let Some(dir) = &assets {
        if !dir.is_dir() {
            warn!(dir = %dir.display(), "assets directory does not exist");
        }
    }
    let service = Arc::new(Service::from_config(&loaded));
    let listener = bind(&format!("{host}:{port}"))?;
    let local = listener.local_addr().map_err(CliError::Serve)?;
    info!(layers = service.catalog().layer_names().count(), "catalog loaded");
    println!("listening on http://{local}");
    runtime()?.block_on(serve_until(listener, router(service, assets), async {
        let _ = tokio::signal::ctrl_c().await;
        info!("shutting down");
    }))
}
