//! Plug-in prediction: average training surrogates with the smoothing weights,
//! then decode `argmin_z <psi(z), g(x)>`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use crate::arcset::{feedback_arcset_decode, greedy_arcset, MAX_EXACT_ITEMS};
use crate::error::{Error, Result};
use crate::loss::LossSpec;
use crate::space::Label;
use crate::weights::{FittedWeights, WeightMatrix, WeightScheme};

/// `argmin_z <psi(z), g>`; ties go to the smallest label.
pub fn decode(loss: &LossSpec, g: &[f64]) -> Result<Label> {
    Ok(loss.minimize_psi(g)?.label)
}

/// What a predictor averages: completed labels or raw surrogate vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Targets {
    Labels(Vec<Label>),
    Surrogates(Vec<Vec<f64>>),
}

#[derive(Clone, Debug)]
pub struct Predictor {
    weights: FittedWeights,
    loss: LossSpec,
    train_xi: Vec<Vec<f64>>,
}

pub fn fit_predictor(scheme: &WeightScheme, loss: LossSpec, x: Vec<Vec<f64>>, targets: Targets) -> Result<Predictor> {
    let weights = scheme.fit(x)?;
    Predictor::new(weights, loss, targets)
}

impl Predictor {
    pub fn new(weights: FittedWeights, loss: LossSpec, targets: Targets) -> Result<Self> {
        let train_xi = match targets {
            Targets::Labels(labels) => labels.iter().map(|y| loss.phi(y)).collect::<Result<Vec<_>>>()?,
            Targets::Surrogates(xi) => xi,
        };
        if train_xi.len() != weights.n() {
            return Err(Error::validation(format!(
                "{} targets for {} training inputs",
                train_xi.len(),
                weights.n()
            )));
        }
        let dim = loss.dim();
        if train_xi.iter().any(|v| v.len() != dim || v.iter().any(|e| !e.is_finite())) {
            return Err(Error::validation(format!("training surrogates must be finite vectors of dimension {dim}")));
        }
        Ok(Predictor { weights, loss, train_xi })
    }

    pub fn weights(&self) -> &FittedWeights {
        &self.weights
    }

    pub fn loss(&self) -> &LossSpec {
        &self.loss
    }

    pub fn train_xi(&self) -> &[Vec<f64>] {
        &self.train_xi
    }

    /// `g(x) = sum_i alpha_i(x) xi_i`.
    pub fn surrogate_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        let alpha = self.weights.weights_at(x)?;
        Ok(self.combine(&alpha))
    }

    fn combine(&self, alpha: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.loss.dim()];
        for (a, xi) in alpha.iter().zip(&self.train_xi) {
            if *a != 0.0 {
                for (o, v) in g.iter_mut().zip(xi) {
                    *o += a * v;
                }
            }
        }
        g
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        decode(&self.loss, &self.surrogate_at(x)?)
    }

    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Label>> {
        self.predict_with_weights(&self.weights.weights_batch(xs)?)
    }

    /// Predictions from precomputed query weights (one row per query).
    pub fn predict_with_weights(&self, w: &WeightMatrix) -> Result<Vec<Label>> {
        if w.ncols() != self.train_xi.len() {
            return Err(Error::validation("query weights do not match the training sample"));
        }
        (0..w.nrows())
            .into_par_iter()
            .map(|q| decode(&self.loss, &w.row_combination(q, &self.train_xi)))
            .collect()
    }
}
