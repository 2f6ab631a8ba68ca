//! Thin async client for the weaklab service.

use reqwest::{Response, Url};
use serde::de::DeserializeOwned;
use serde::Serialize;
use uuid::Uuid;

use weaklab_api::weaklab_core::bench::{Experiment, Report};
use weaklab_api::weaklab_core::data::Dataset;
use weaklab_api::weaklab_core::disambig::DisambiguationResult;
use weaklab_api::weaklab_core::model::ModelFile;
use weaklab_api::{
    BenchRequest, DecodeRequest, DecodeResponse, DecomposeRequest, DecomposeResponse, DisambiguateRequest,
    ErrorBody, FitRequest, FitResponse, GenerateRequest, Health, ModelRef, PredictRequest, PredictResponse,
};

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("invalid server url `{0}`")]
    Url(String),
    #[error(transparent)]
    Http(#[from] reqwest::Error),
    /// The server answered with an error body.
    #[error("{kind} error ({status}): {message}")]
    Api { status: u16, kind: String, message: String },
}

pub type Result<T> = std::result::Result<T, ClientError>;

#[derive(Clone, Debug)]
pub struct Client {
    base: Url,
    http: reqwest::Client,
}

impl Client {
    pub fn new(base: &str) -> Result<Self> {
        let base = Url::parse(base).map_err(|_| ClientError::Url(base.to_owned()))?;
        if base.cannot_be_a_base() {
            return Err(ClientError::Url(base.to_string()));
        }
        Ok(Client { base, http: reqwest::Client::new() })
    }

    pub fn base_url(&self) -> &Url {
        &self.base
    }

    fn url(&self, path: &str) -> Result<Url> {
        self.base.join(path).map_err(|_| ClientError::Url(format!("{}{path}", self.base)))
    }

    async fn decode<T: DeserializeOwned>(resp: Response) -> Result<T> {
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.json().await?);
        }
        let code = status.as_u16();
        let text = resp.text().await?;
        Err(match serde_json::from_str::<ErrorBody>(&text) {
            Ok(b) => ClientError::Api { status: code, kind: b.kind, message: b.message },
            Err(_) => ClientError::Api { status: code, kind: "http".into(), message: text },
        })
    }

    async fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<T> {
        let resp = self.http.post(self.url(path)?).json(body).send().await?;
        Self::decode(resp).await
    }

    pub async fn health(&self) -> Result<Health> {
        Self::decode(self.http.get(self.url(weaklab_api::HEALTH)?).send().await?).await
    }

    pub async fn decompose(&self, matrix: Vec<Vec<f64>>) -> Result<DecomposeResponse> {
        self.post(weaklab_api::DECOMPOSE, &DecomposeRequest { matrix }).await
    }

    pub async fn decode_scores(&self, req: &DecodeRequest) -> Result<DecodeResponse> {
        self.post(weaklab_api::DECODE, req).await
    }

    pub async fn generate(&self, req: &GenerateRequest) -> Result<Dataset> {
        self.post(weaklab_api::GENERATE, req).await
    }

    pub async fn disambiguate(&self, req: &DisambiguateRequest) -> Result<DisambiguationResult> {
        self.post(weaklab_api::DISAMBIGUATE, req).await
    }

    pub async fn fit(&self, req: &FitRequest) -> Result<FitResponse> {
        self.post(weaklab_api::FIT, req).await
    }

    pub async fn predict(&self, model: ModelRef, inputs: Vec<Vec<f64>>) -> Result<PredictResponse> {
        self.post(weaklab_api::PREDICT, &PredictRequest { model, inputs }).await
    }

    pub async fn model(&self, id: Uuid) -> Result<ModelFile> {
        let url = self.url(&format!("{}/{id}", weaklab_api::MODELS))?;
        Self::decode(self.http.get(url).send().await?).await
    }

    pub async fn delete_model(&self, id: Uuid) -> Result<()> {
        let url = self.url(&format!("{}/{id}", weaklab_api::MODELS))?;
        let resp = self.http.delete(url).send().await?;
        if resp.status().is_success() {
            return Ok(());
        }
        Self::decode::<serde::de::IgnoredAny>(resp).await.map(|_| ())
    }

    pub async fn bench(&self, experiment: Experiment) -> Result<Report> {
        self.post(weaklab_api::BENCH, &BenchRequest { experiment }).await
    }
}
