//! Training entry point and the `WLB1` model file.
//!
//! A model file is the line `WLB1` followed by a JSON document holding the
//! method, weight scheme, loss, training inputs and either the training
//! surrogates (plug-in predictors) or the training sets (infimum loss).

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{average_candidates, InfimumLossPredictor, Method};
use crate::disambig::{
    alternating_minimization, iqp_disambiguation, wellbehaved_inits, AmOptions, DisambiguationResult, IqpOptions,
};
use crate::error::{Error, Result};
use crate::infer::{Predictor, Targets};
use crate::loss::LossSpec;
use crate::space::Label;
use crate::weak::WeakSet;
use crate::weights::{FittedWeights, WeightMatrix, WeightScheme};

pub const MODEL_MAGIC: &str = "WLB1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solver {
    Am(AmOptions),
    Iqp(IqpOptions),
}

impl Default for Solver {
    fn default() -> Self {
        Solver::Am(AmOptions::default())
    }
}

/// Disambiguates `sets` under the weights fitted on the training inputs.
pub fn disambiguate(weights: &FittedWeights, loss: &LossSpec, sets: &[WeakSet], solver: Solver) -> Result<DisambiguationResult> {
    disambiguate_matrix(&weights.weight_matrix(), loss, sets, solver)
}

/// Same as [`disambiguate`] for an already computed weight matrix.
pub fn disambiguate_matrix(a: &WeightMatrix, loss: &LossSpec, sets: &[WeakSet], solver: Solver) -> Result<DisambiguationResult> {
    match solver {
        Solver::Am(opts) => alternating_minimization(a, loss, sets, wellbehaved_inits(loss, sets)?, opts),
        Solver::Iqp(opts) => iqp_disambiguation(a, loss, sets, opts),
    }
}

#[derive(Clone, Debug)]
pub enum Model {
    Plugin { method: Method, predictor: Predictor },
    InfimumLoss(InfimumLossPredictor),
}

impl Model {
    /// Fits `method` on weakly labelled inputs. Disambiguation results are
    /// returned for the `df` method.
    pub fn train(
        method: Method,
        scheme: &WeightScheme,
        loss: LossSpec,
        x: Vec<Vec<f64>>,
        sets: Vec<WeakSet>,
        solver: Solver,
    ) -> Result<(Model, Option<DisambiguationResult>)> {
        let weights = scheme.fit(x)?;
        Self::train_with(method, weights, loss, sets, solver)
    }

    pub fn train_with(
        method: Method,
        weights: FittedWeights,
        loss: LossSpec,
        sets: Vec<WeakSet>,
        solver: Solver,
    ) -> Result<(Model, Option<DisambiguationResult>)> {
        if sets.len() != weights.n() {
            return Err(Error::validation(format!("{} sets for {} training inputs", sets.len(), weights.n())));
        }
        match method {
            Method::Df => {
                let res = disambiguate(&weights, &loss, &sets, solver)?;
                let predictor = Predictor::new(weights, loss, Targets::Labels(res.labels.clone()))?;
                Ok((Model::Plugin { method, predictor }, Some(res)))
            }
            Method::Ac => {
                let xi = average_candidates(&loss, &sets)?;
                let predictor = Predictor::new(weights, loss, Targets::Surrogates(xi))?;
                Ok((Model::Plugin { method, predictor }, None))
            }
            Method::Il => Ok((Model::InfimumLoss(InfimumLossPredictor::with_weights(weights, loss, sets)?), None)),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            Model::Plugin { method, .. } => *method,
            Model::InfimumLoss(_) => Method::Il,
        }
    }

    pub fn loss(&self) -> &LossSpec {
        match self {
            Model::Plugin { predictor, .. } => predictor.loss(),
            Model::InfimumLoss(p) => p.loss(),
        }
    }

    pub fn weights(&self) -> &FittedWeights {
        match self {
            Model::Plugin { predictor, .. } => predictor.weights(),
            Model::InfimumLoss(p) => p.weights(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        match self {
            Model::Plugin { predictor, .. } => predictor.predict(x),
            Model::InfimumLoss(p) => p.predict(x),
        }
    }

    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Label>> {
        match self {
            Model::Plugin { predictor, .. } => predictor.predict_batch(xs),
            Model::InfimumLoss(p) => p.predict_batch(xs),
        }
    }

    pub fn to_file(&self) -> ModelFile {
        let w = self.weights();
        let payload = match self {
            Model::Plugin { predictor, .. } => ModelPayload::Surrogates(predictor.train_xi().to_vec()),
            Model::InfimumLoss(p) => ModelPayload::Sets(p.sets().to_vec()),
        };
        ModelFile {
            method: self.method(),
            weights: w.scheme().clone(),
            loss: self.loss().clone(),
            inputs: w.inputs().to_vec(),
            payload,
        }
    }

    pub fn from_file(file: ModelFile) -> Result<Self> {
        let weights = file.weights.fit(file.inputs)?;
        match (file.method, file.payload) {
            (Method::Il, ModelPayload::Sets(sets)) => {
                Ok(Model::InfimumLoss(InfimumLossPredictor::with_weights(weights, file.loss, sets)?))
            }
            (method @ (Method::Df | Method::Ac), ModelPayload::Surrogates(xi)) => {
                Ok(Model::Plugin { method, predictor: Predictor::new(weights, file.loss, Targets::Surrogates(xi))? })
            }
            (method, _) => Err(Error::validation(format!("model payload does not match method {method}"))),
        }
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        self.to_file().write_to(out)
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        Self::from_file(ModelFile::read_from(input)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelPayload {
    Surrogates(Vec<Vec<f64>>),
    Sets(Vec<WeakSet>),
}

/// Serialized form of a [`Model`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub method: Method,
    pub weights: WeightScheme,
    pub loss: LossSpec,
    pub inputs: Vec<Vec<f64>>,
    pub payload: ModelPayload,
}

impl ModelFile {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{MODEL_MAGIC}")?;
        serde_json::to_writer(&mut out, self)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut input: R) -> Result<Self> {
        let mut header = String::new();
        input.read_line(&mut header)?;
        if header.trim_end() != MODEL_MAGIC {
            return Err(Error::Parse { line: 1, message: format!("not a model file (expected `{MODEL_MAGIC}` header)") });
        }
        Ok(serde_json::from_reader(input)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Vec<Vec<f64>>, Vec<WeakSet>) {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64 / 12.0]).collect();
        let sets = (0..12)
            .map(|i| if i % 3 == 0 { WeakSet::classes([0, i / 4]).unwrap() } else { WeakSet::classes([i / 4]).unwrap() })
            .collect();
        (x, sets)
    }

    #[test]
    fn every_method_survives_a_round_trip() {
        let (x, sets) = toy();
        let queries: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 / 29.0]).collect();
        for method in [Method::Df, Method::Il, Method::Ac] {
            let (model, res) = Model::train(
                method,
                &WeightScheme::Knn { k: 3 },
                LossSpec::zero_one(3).unwrap(),
                x.clone(),
                sets.clone(),
                Solver::default(),
            )
            .unwrap();
            assert_eq!(res.is_some(), method == Method::Df);
            let mut buf = Vec::new();
            model.write_to(&mut buf).unwrap();
            assert!(buf.starts_with(b"WLB1\n"));
            let back = Model::read_from(buf.as_slice()).unwrap();
            assert_eq!(back.method(), method);
            assert_eq!(back.predict_batch(&queries).unwrap(), model.predict_batch(&queries).unwrap());
        }
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(matches!(Model::read_from("{}".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(Model::read_from("WLB1\n{\"method\":\"df\"}".as_bytes()).is_err());
    }
}
