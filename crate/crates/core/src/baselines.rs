//! Comparison methods: the infimum-loss predictor and averaging candidates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infer::{Predictor, Targets};
use crate::loss::{argmin_lowest, LossSpec};
use crate::space::{Label, LabelSpace};
use crate::weak::WeakSet;
use crate::weights::{FittedWeights, WeightMatrix, WeightScheme};

/// Largest ranking size for the infimum-loss predictor, which scans all orders.
pub const IL_MAX_ITEMS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Disambiguate first, then plug-in prediction.
    Df,
    /// Infimum loss.
    Il,
    /// Averaging candidates.
    Ac,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Df => "df",
            Method::Il => "il",
            Method::Ac => "ac",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "df" => Ok(Method::Df),
            "il" => Ok(Method::Il),
            "ac" => Ok(Method::Ac),
            other => Err(Error::config(format!("unknown method `{other}` (expected df, il or ac)"))),
        }
    }
}

/// Infimum-loss predictor: `argmin_z sum_i alpha_i(x) inf_{y in s_i} l(z, y)`,
/// with the infimum replaced by a supremum where `alpha_i(x) < 0`.
#[derive(Clone, Debug)]
pub struct InfimumLossPredictor {
    weights: FittedWeights,
    loss: LossSpec,
    sets: Vec<WeakSet>,
    candidates: Vec<Label>,
    /// `inf[i * c + z]` and `sup[i * c + z]` over the candidate outputs.
    inf: Vec<f64>,
    sup: Vec<f64>,
}

impl InfimumLossPredictor {
    pub fn fit(scheme: &WeightScheme, loss: LossSpec, x: Vec<Vec<f64>>, sets: Vec<WeakSet>) -> Result<Self> {
        Self::with_weights(scheme.fit(x)?, loss, sets)
    }

    pub fn with_weights(weights: FittedWeights, loss: LossSpec, sets: Vec<WeakSet>) -> Result<Self> {
        if sets.len() != weights.n() {
            return Err(Error::validation(format!("{} sets for {} training inputs", sets.len(), weights.n())));
        }
        sets.iter().try_for_each(|s| s.validate_for(loss.space()))?;
        if let LabelSpace::Permutations { m } = *loss.space() {
            if m > IL_MAX_ITEMS {
                return Err(Error::Capability(format!(
                    "the infimum-loss predictor scans every order and is limited to {IL_MAX_ITEMS} items, got {m}"
                )));
            }
        }
        let candidates = loss.space().labels();
        let c = candidates.len();
        let rows = sets
            .par_iter()
            .map(|s| {
                let mut inf = Vec::with_capacity(c);
                let mut sup = Vec::with_capacity(c);
                for z in &candidates {
                    inf.push(loss.infimum_over_set(z, s)?.0);
                    sup.push(loss.supremum_over_set(z, s)?.0);
                }
                Ok((inf, sup))
            })
            .collect::<Result<Vec<_>>>()?;
        let (inf, sup): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        Ok(InfimumLossPredictor { weights, loss, sets, candidates, inf: inf.concat(), sup: sup.concat() })
    }

    pub fn loss(&self) -> &LossSpec {
        &self.loss
    }

    pub fn sets(&self) -> &[WeakSet] {
        &self.sets
    }

    pub fn weights(&self) -> &FittedWeights {
        &self.weights
    }

    /// `sum_i alpha_i inf/sup_{y in s_i} l(z, y)` for the candidate `z`.
    pub fn risk(&self, alpha: &[f64], z: usize) -> f64 {
        let c = self.candidates.len();
        alpha
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, &a)| if a >= 0.0 { a * self.inf[i * c + z] } else { a * self.sup[i * c + z] })
            .sum()
    }

    fn predict_alpha(&self, alpha: &[f64]) -> Label {
        let (z, _, _) = argmin_lowest((0..self.candidates.len()).map(|z| self.risk(alpha, z)));
        self.candidates[z].clone()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(self.predict_alpha(&self.weights.weights_at(x)?))
    }

    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Label>> {
        self.predict_with_weights(&self.weights.weights_batch(xs)?)
    }

    pub fn predict_with_weights(&self, w: &WeightMatrix) -> Result<Vec<Label>> {
        if w.ncols() != self.sets.len() {
            return Err(Error::validation("query weights do not match the training sample"));
        }
        Ok((0..w.nrows()).into_par_iter().map(|q| self.predict_alpha(w.row(q))).collect())
    }
}

/// The averaging-candidates surrogates `xi_i = mean_{y in s_i} phi(y)`.
pub fn average_candidates(loss: &LossSpec, sets: &[WeakSet]) -> Result<Vec<Vec<f64>>> {
    sets.iter().map(|s| loss.wellbehaved_init(s)).collect()
}

/// Plug-in predictor trained on the averaged candidates.
pub fn ac_fit(scheme: &WeightScheme, loss: LossSpec, x: Vec<Vec<f64>>, sets: &[WeakSet]) -> Result<Predictor> {
    let xi = average_candidates(&loss, sets)?;
    Predictor::new(scheme.fit(x)?, loss, Targets::Surrogates(xi))
}

/// Either baseline behind one prediction interface.
#[derive(Clone, Debug)]
pub enum BaselinePredictor {
    InfimumLoss(InfimumLossPredictor),
    AverageCandidates(Predictor),
}

impl BaselinePredictor {
    pub fn fit(method: Method, scheme: &WeightScheme, loss: LossSpec, x: Vec<Vec<f64>>, sets: Vec<WeakSet>) -> Result<Self> {
        match method {
            Method::Il => Ok(BaselinePredictor::InfimumLoss(InfimumLossPredictor::fit(scheme, loss, x, sets)?)),
            Method::Ac => Ok(BaselinePredictor::AverageCandidates(ac_fit(scheme, loss, x, &sets)?)),
            Method::Df => Err(Error::config("df is not a baseline")),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        match self {
            BaselinePredictor::InfimumLoss(p) => p.predict(x),
            BaselinePredictor::AverageCandidates(p) => p.predict(x),
        }
    }

    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Label>> {
        match self {
            BaselinePredictor::InfimumLoss(p) => p.predict_batch(xs),
            BaselinePredictor::AverageCandidates(p) => p.predict_batch(xs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infer::fit_predictor;

    fn simplex() -> LossSpec {
        LossSpec::from_matrix(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 2.0], vec![1.0, 2.0, 0.0]]).unwrap()
    }

    #[test]
    fn singletons_reduce_to_supervised() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![(i as f64 * 0.37).sin(), i as f64 * 0.1]).collect();
        let labels: Vec<Label> = (0..8).map(|i| Label::Class((i * 5) % 3)).collect();
        let sets: Vec<WeakSet> = labels.iter().cloned().map(WeakSet::singleton).collect();
        let scheme = WeightScheme::Knn { k: 3 };
        let sup = fit_predictor(&scheme, simplex(), x.clone(), Targets::Labels(labels)).unwrap();
        let il = InfimumLossPredictor::fit(&scheme, simplex(), x.clone(), sets.clone()).unwrap();
        let ac = ac_fit(&scheme, simplex(), x.clone(), &sets).unwrap();
        let queries: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64 * 0.11).cos(), i as f64 * 0.05]).collect();
        let expected = sup.predict_batch(&queries).unwrap();
        assert_eq!(il.predict_batch(&queries).unwrap(), expected);
        assert_eq!(ac.predict_batch(&queries).unwrap(), expected);
    }

    #[test]
    fn interval_infimum_clamps() {
        let loss = LossSpec::square(-6.0, 6.0, 1000).unwrap();
        let il = InfimumLossPredictor::fit(
            &WeightScheme::Knn { k: 1 },
            loss,
            vec![vec![0.0]],
            vec![WeakSet::interval(1.0, 2.0).unwrap()],
        )
        .unwrap();
        let z = il.predict(&[0.3]).unwrap().as_real().unwrap();
        assert!((1.0..=2.0).contains(&z));
    }

    #[test]
    fn ac_averages_pairs() {
        let ac = ac_fit(&WeightScheme::Knn { k: 1 }, simplex(), vec![vec![0.0]], &[WeakSet::classes([0, 1]).unwrap()])
            .unwrap();
        assert_eq!(ac.train_xi()[0], vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn il_ranking_is_capped() {
        let loss = LossSpec::kendall(7).unwrap();
        let r = InfimumLossPredictor::fit(&WeightScheme::Knn { k: 1 }, loss, vec![vec![0.0]], vec![WeakSet::Full]);
        assert!(matches!(r, Err(Error::Capability(_))));
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Df, Method::Il, Method::Ac] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("xx".parse::<Method>().is_err());
    }
}
