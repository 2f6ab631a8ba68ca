//! Request and response bodies of the weaklab HTTP service.
//!
//! Every body is JSON. Domain objects (label spaces, weak sets, losses,
//! weight schemes, solvers, experiments) use the serde forms defined in
//! `weaklab-core`, so a model file or dataset round-trips unchanged.

use serde::{Deserialize, Serialize};
use uuid::Uuid;

use weaklab_core::baselines::Method;
use weaklab_core::bench::{Experiment, Report};
use weaklab_core::data::{BlobSpec, Dataset};
use weaklab_core::disambig::DisambiguationResult;
use weaklab_core::loss::LossSpec;
use weaklab_core::model::{ModelFile, Solver};
use weaklab_core::space::Label;
use weaklab_core::weights::WeightScheme;

pub use weaklab_core;

pub const HEALTH: &str = "/health";
pub const DECOMPOSE: &str = "/v1/loss/decompose";
pub const DECODE: &str = "/v1/decode";
pub const GENERATE: &str = "/v1/generate";
pub const DISAMBIGUATE: &str = "/v1/disambiguate";
pub const FIT: &str = "/v1/fit";
pub const PREDICT: &str = "/v1/predict";
pub const MODELS: &str = "/v1/models";
pub const BENCH: &str = "/v1/bench";

/// Body of every non-2xx response.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    /// Machine-readable class: `validation`, `domain`, `config`, `capability`,
    /// `state`, `parse`, `io` or `internal`.
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub service: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposeRequest {
    /// Square loss matrix, `matrix[y][z] = l(z, y)`.
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposeResponse {
    pub dim: usize,
    pub psi: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
    /// Common norm of every `psi` and `phi` row.
    pub norm_const: f64,
    /// Largest absolute gap between the matrix and its reconstruction.
    pub max_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeRequest {
    pub loss: LossSpec,
    /// Score vector in the loss embedding.
    pub g: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeResponse {
    pub label: Label,
    pub value: f64,
}

/// What `/v1/generate` should draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum GenerateRequest {
    /// Gaussian blobs (or given labels) under skewed pair corruption of level
    /// `corruption`; the anchor defaults to the majority class.
    Classification {
        #[serde(flatten)]
        data: ClassificationSource,
        corruption: f64,
        #[serde(default)]
        anchor: Option<usize>,
        #[serde(default)]
        seed: u64,
    },
    IntervalRegression {
        n: usize,
        omega: f64,
        r: f64,
        gamma: f64,
        /// Label grid `(lo, hi, count)` of the resulting dataset.
        grid: (f64, f64, usize),
        #[serde(default)]
        seed: u64,
    },
    /// Random ranking lines with each observed pair dropped with probability `p`.
    Ranking {
        m: usize,
        n: usize,
        p: f64,
        #[serde(default)]
        seed: u64,
    },
    SemisupCircles {
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ClassificationSource {
    Blobs(BlobSpec),
    Inline { x: Vec<Vec<f64>>, y: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisambiguateRequest {
    pub dataset: Dataset,
    pub weights: WeightScheme,
    /// Defaults to the natural loss of the dataset's label space.
    #[serde(default)]
    pub loss: Option<LossSpec>,
    #[serde(default)]
    pub solver: Solver,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRequest {
    pub dataset: Dataset,
    pub method: Method,
    pub weights: WeightScheme,
    #[serde(default)]
    pub loss: Option<LossSpec>,
    #[serde(default)]
    pub solver: Solver,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResponse {
    /// Handle of the model kept by the server.
    pub model_id: Uuid,
    /// The model itself, ready to be written as a `WLB1` file.
    pub model: ModelFile,
    /// Present for the `df` method.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disambiguation: Option<DisambiguationResult>,
}

/// A model held by the server, or one carried in the request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Id { model_id: Uuid },
    Inline { model: Box<ModelFile> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictRequest {
    #[serde(flatten)]
    pub model: ModelRef,
    pub inputs: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub labels: Vec<Label>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRequest {
    pub experiment: Experiment,
}

pub type BenchResponse = Report;
