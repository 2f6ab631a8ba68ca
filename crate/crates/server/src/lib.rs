//! HTTP/JSON front end for `weaklab-core`.
//!
//! Numerical work runs on the blocking thread pool so that slow benchmarks
//! do not stall the listener. Fitted models live in memory, keyed by a
//! random UUID, until the process exits or they are deleted.

mod error;
mod generate;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::net::{TcpListener, ToSocketAddrs};
use tokio::sync::RwLock;
use tokio::task::JoinHandle;
use uuid::Uuid;

use weaklab_api::{
    BenchRequest, BenchResponse, DecodeRequest, DecodeResponse, DecomposeRequest, DecomposeResponse,
    DisambiguateRequest, FitRequest, FitResponse, GenerateRequest, Health, ModelRef, PredictRequest,
    PredictResponse,
};
use weaklab_core::data::Dataset;
use weaklab_core::disambig::DisambiguationResult;
use weaklab_core::error::{Error, Result as CoreResult};
use weaklab_core::loss::{quadratic_decomposition, LossSpec};
use weaklab_core::model::{disambiguate, Model, ModelFile};

pub use error::{status_of, ApiError};
pub use generate::generate;

/// Request bodies above this size are rejected.
pub const BODY_LIMIT: usize = 256 * 1024 * 1024;

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Default)]
pub struct AppState {
    models: RwLock<HashMap<Uuid, Arc<Model>>>,
}

impl AppState {
    pub async fn model_count(&self) -> usize {
        self.models.read().await.len()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route(weaklab_api::HEALTH, get(health))
        .route(weaklab_api::DECOMPOSE, post(decompose))
        .route(weaklab_api::DECODE, post(decode))
        .route(weaklab_api::GENERATE, post(generate_handler))
        .route(weaklab_api::DISAMBIGUATE, post(disambiguate_handler))
        .route(weaklab_api::FIT, post(fit))
        .route(weaklab_api::PREDICT, post(predict))
        .route(&format!("{}/{{id}}", weaklab_api::MODELS), get(get_model).delete(delete_model))
        .route(weaklab_api::BENCH, post(bench))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

pub fn app() -> Router {
    router(Arc::new(AppState::default()))
}

pub async fn serve(listener: TcpListener) -> std::io::Result<()> {
    axum::serve(listener, app()).await
}

/// Binds `addr` and serves in a background task. Returns the bound address,
/// which is useful with port 0.
pub async fn spawn(addr: impl ToSocketAddrs) -> std::io::Result<(SocketAddr, JoinHandle<std::io::Result<()>>)> {
    let listener = TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    Ok((local, tokio::spawn(serve(listener))))
}

/// Runs CPU-bound work off the async workers.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce() -> CoreResult<T> + Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(res) => res.map_err(ApiError::from),
        Err(e) => Err(ApiError::internal(format!("worker failed: {e}"))),
    }
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    Ok(payload?.0)
}

fn loss_for(dataset: &Dataset, loss: Option<LossSpec>) -> CoreResult<LossSpec> {
    match loss {
        Some(l) if l.space() != &dataset.space => Err(Error::domain(format!(
            "loss is defined on {} but the dataset lives in {}",
            l.space(),
            dataset.space
        ))),
        Some(l) => Ok(l),
        None => LossSpec::default_for(&dataset.space),
    }
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        service: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
    })
}

async fn decompose(payload: Result<Json<DecomposeRequest>, JsonRejection>) -> ApiResult<DecomposeResponse> {
    let req = body(payload)?;
    blocking(move || {
        let q = quadratic_decomposition(&req.matrix)?;
        let m = req.matrix.len();
        let mut max_error = 0f64;
        for y in 0..m {
            for z in 0..m {
                max_error = max_error.max((q.reconstruct(y, z) - req.matrix[y][z]).abs());
            }
        }
        Ok(DecomposeResponse { dim: q.dim(), psi: q.psi, phi: q.phi, norm_const: q.norm_const, max_error })
    })
    .await
    .map(Json)
}

async fn decode(payload: Result<Json<DecodeRequest>, JsonRejection>) -> ApiResult<DecodeResponse> {
    let req = body(payload)?;
    blocking(move || {
        let best = req.loss.minimize_psi(&req.g)?;
        Ok(DecodeResponse { label: best.label, value: best.value })
    })
    .await
    .map(Json)
}

async fn generate_handler(payload: Result<Json<GenerateRequest>, JsonRejection>) -> ApiResult<Dataset> {
    let req = body(payload)?;
    blocking(move || generate(&req)).await.map(Json)
}

async fn disambiguate_handler(
    payload: Result<Json<DisambiguateRequest>, JsonRejection>,
) -> ApiResult<DisambiguationResult> {
    let req = body(payload)?;
    blocking(move || {
        let loss = loss_for(&req.dataset, req.loss)?;
        let weights = req.weights.fit(req.dataset.inputs())?;
        disambiguate(&weights, &loss, &req.dataset.sets(), req.solver)
    })
    .await
    .map(Json)
}

async fn fit(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<FitRequest>, JsonRejection>,
) -> ApiResult<FitResponse> {
    let req = body(payload)?;
    let (model, disambiguation) = blocking(move || {
        let loss = loss_for(&req.dataset, req.loss)?;
        Model::train(req.method, &req.weights, loss, req.dataset.inputs(), req.dataset.sets(), req.solver)
    })
    .await?;
    let file = model.to_file();
    let id = Uuid::new_v4();
    state.models.write().await.insert(id, Arc::new(model));
    tracing::info!(%id, method = %file.method, n = file.inputs.len(), "model fitted");
    Ok(Json(FitResponse { model_id: id, model: file, disambiguation }))
}

async fn lookup(state: &AppState, id: &Uuid) -> Result<Arc<Model>, ApiError> {
    state.models.read().await.get(id).cloned().ok_or_else(|| Error::State(format!("no model with id {id}")).into())
}

async fn predict(
    State(state): State<Arc<AppState>>,
    payload: Result<Json<PredictRequest>, JsonRejection>,
) -> ApiResult<PredictResponse> {
    let req = body(payload)?;
    enum Source {
        Held(Arc<Model>),
        File(Box<ModelFile>),
    }
    let source = match req.model {
        ModelRef::Id { model_id } => Source::Held(lookup(&state, &model_id).await?),
        ModelRef::Inline { model } => Source::File(model),
    };
    let inputs = req.inputs;
    blocking(move || {
        let model = match source {
            Source::Held(m) => m,
            Source::File(file) => Arc::new(Model::from_file(*file)?),
        };
        Ok(PredictResponse { labels: model.predict_batch(&inputs)? })
    })
    .await
    .map(Json)
}

async fn get_model(State(state): State<Arc<AppState>>, Path(id): Path<Uuid>) -> ApiResult<ModelFile> {
    let model = lookup(&state, &id).await?;
    Ok(Json(model.to_file()))
}

async fn delete_model(State(state): State<Arc<AppState>>, Path(id): Path<Uuid>) -> Result<StatusCode, ApiError> {
    match state.models.write().await.remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(Error::State(format!("no model with id {id}")).into()),
    }
}

async fn bench(payload: Result<Json<BenchRequest>, JsonRejection>) -> ApiResult<BenchResponse> {
    let req = body(payload)?;
    let name = req.experiment.name();
    let started = std::time::Instant::now();
    let report = blocking(move || req.experiment.run()).await?;
    tracing::info!(task = name, rows = report.table.len(), elapsed = ?started.elapsed(), "benchmark finished");
    Ok(Json(report))
}
