//! Experiment harness: metrics, folds, hyperparameter grids, the five
//! experiments and their CSV/SVG output.

mod experiments;
pub mod svg;
pub mod table;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::rng;
use crate::error::{Error, Result};
use crate::loss::LossSpec;
use crate::space::Label;
use crate::weights::WeightScheme;

pub use experiments::{
    classification, interval_regression, log_linear_slope, ranking, rate_curve, rate_trial, ring_grid,
    semisup_circles, CirclesConfig, ClassificationConfig, ClassificationData, IntervalConfig, RankingConfig,
    RateConfig,
};
pub use svg::{render_svg, PlotSpec};
pub use table::{Table, Value};

/// Mean loss over a prediction set with its standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl Metrics {
    /// Mean and population standard deviation of `values`.
    pub fn of(values: &[f64]) -> Metrics {
        let count = values.len();
        if count == 0 {
            return Metrics { mean: f64::NAN, std: f64::NAN, count };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
        Metrics { mean, std: var.sqrt(), count }
    }
}

/// Scores `predictions` against `hidden` labels with `loss(prediction, truth)`.
///
/// Under the 0-1 loss this is the error rate, under the square loss the MSE
/// and under the Kendall loss the mean number of discordant ordered pairs.
pub fn evaluate(predictions: &[Label], hidden: &[Label], loss: &LossSpec) -> Result<Metrics> {
    if predictions.len() != hidden.len() {
        return Err(Error::validation(format!(
            "{} predictions for {} labels",
            predictions.len(),
            hidden.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::validation("nothing to evaluate"));
    }
    let per_sample = predictions.iter().zip(hidden).map(|(z, y)| loss.eval(z, y)).collect::<Result<Vec<_>>>()?;
    Ok(Metrics::of(&per_sample))
}

/// Shuffled partition of `0..n` into `folds` nearly equal parts.
pub fn fold_indices(n: usize, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::config(format!("need at least 2 folds, got {folds}")));
    }
    if folds > n {
        return Err(Error::config(format!("{folds} folds for {n} samples")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng(seed));
    let mut out = vec![Vec::with_capacity(n / folds + 1); folds];
    for (pos, i) in idx.into_iter().enumerate() {
        out[pos % folds].push(i);
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

/// Indices outside `fold`, in increasing order.
pub fn complement(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut held = vec![false; n];
    for &i in fold {
        held[i] = true;
    }
    (0..n).filter(|&i| !held[i]).collect()
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent seed for one work item.
pub fn mix_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(seed), |acc, &p| splitmix(acc ^ splitmix(p)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    #[default]
    Krr,
    Knn,
    NadarayaWatson,
}

/// Hyperparameter grid for one weight family. Missing lists take defaults
/// that scale with the sample size `n` and input dimension `d`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeightGrid {
    pub kind: WeightKind,
    /// Kernel bandwidths; defaults to `d * {1, 0.1, 0.01}`.
    pub sigma: Option<Vec<f64>>,
    /// Ridge parameters; defaults to `n^{-1/2} * {1, 1e-3, 1e-6}`.
    pub lambda: Option<Vec<f64>>,
    /// Neighbour counts; defaults to `{1, 5, 10}` capped at `n`.
    pub k: Option<Vec<usize>>,
    /// Nadaraya-Watson bandwidths; defaults to `{1, 0.1, 0.01}`.
    pub h: Option<Vec<f64>>,
}

impl WeightGrid {
    pub fn krr(sigma: Vec<f64>, lambda: Vec<f64>) -> Self {
        WeightGrid { kind: WeightKind::Krr, sigma: Some(sigma), lambda: Some(lambda), ..Default::default() }
    }

    pub fn knn(k: Vec<usize>) -> Self {
        WeightGrid { kind: WeightKind::Knn, k: Some(k), ..Default::default() }
    }

    pub fn schemes(&self, n: usize, d: usize) -> Result<Vec<WeightScheme>> {
        fn nonempty<T: Clone>(name: &str, list: &Option<Vec<T>>, default: Vec<T>) -> Result<Vec<T>> {
            match list {
                Some(v) if v.is_empty() => Err(Error::config(format!("the {name} grid is empty"))),
                Some(v) => Ok(v.clone()),
                None => Ok(default),
            }
        }
        let out: Vec<WeightScheme> = match self.kind {
            WeightKind::Krr => {
                let d = d.max(1) as f64;
                let root = (n.max(1) as f64).sqrt();
                let sigma = nonempty("sigma", &self.sigma, vec![d, 0.1 * d, 0.01 * d])?;
                let lambda = nonempty("lambda", &self.lambda, vec![1.0 / root, 1e-3 / root, 1e-6 / root])?;
                sigma
                    .iter()
                    .flat_map(|&s| lambda.iter().map(move |&l| WeightScheme::Krr { lambda: l, sigma: s }))
                    .collect()
            }
            WeightKind::Knn => {
                let k = nonempty("k", &self.k, [1, 5, 10].into_iter().map(|k| k.min(n.max(1))).collect())?;
                let mut k = k;
                k.dedup();
                k.into_iter().map(|k| WeightScheme::Knn { k }).collect()
            }
            WeightKind::NadarayaWatson => nonempty("h", &self.h, vec![1.0, 0.1, 0.01])?
                .into_iter()
                .map(|h| WeightScheme::NadarayaWatson { h, normalized: true })
                .collect(),
        };
        out.iter().try_for_each(WeightScheme::validate)?;
        Ok(out)
    }
}

/// Parses `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| Error::config(format!("`{s}` is not a number in grid `{text}`")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let out = match parts.as_slice() {
        [start, step, stop] => {
            let (a, h, b) = (num(start)?, num(step)?, num(stop)?);
            if !(h > 0.0) || b < a {
                return Err(Error::config(format!("grid `{text}` needs a positive step and start <= stop")));
            }
            let count = ((b - a) / h + 1e-9).floor() as usize + 1;
            // Rounded so that 0:0.1:1 gives 0.3 rather than 0.30000000000000004.
            (0..count).map(|i| ((a + i as f64 * h) * 1e12).round() / 1e12).collect()
        }
        [_] => text.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::config(format!("cannot read grid `{text}`"))),
    };
    if out.is_empty() {
        return Err(Error::config("empty grid"));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Svg,
}

impl Format {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("svg") => Format::Svg,
            _ => Format::Csv,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(Error::config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Renders `table` as CSV or as an SVG plot laid out by `plot`.
pub fn render(table: &Table, plot: &PlotSpec, format: Format) -> Result<String> {
    if table.is_empty() {
        return Err(Error::validation("refusing to emit an empty table"));
    }
    match format {
        Format::Csv => Ok(table.to_csv_string()),
        Format::Svg => render_svg(table, plot),
    }
}

pub fn emit(table: &Table, plot: &PlotSpec, format: Format, path: impl AsRef<Path>) -> Result<()> {
    let text = render(table, plot, format)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// One experiment with its settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Experiment {
    Classification(ClassificationConfig),
    IntervalRegression(IntervalConfig),
    SemisupCircles(CirclesConfig),
    Ranking(RankingConfig),
    RateCurve(RateConfig),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Classification(_) => "classification",
            Experiment::IntervalRegression(_) => "interval_regression",
            Experiment::SemisupCircles(_) => "semisup_circles",
            Experiment::Ranking(_) => "ranking",
            Experiment::RateCurve(_) => "rate_curve",
        }
    }

    /// Default settings for a task name (`rate` and `circles` are accepted).
    pub fn default_for(task: &str) -> Result<Experiment> {
        Ok(match task {
            "classification" => Experiment::Classification(Default::default()),
            "interval_regression" | "interval" => Experiment::IntervalRegression(Default::default()),
            "semisup_circles" | "circles" => Experiment::SemisupCircles(Default::default()),
            "ranking" => Experiment::Ranking(Default::default()),
            "rate_curve" | "rate" => Experiment::RateCurve(Default::default()),
            other => return Err(Error::config(format!("unknown task `{other}`"))),
        })
    }

    /// Overrides every seed of the experiment, keeping the number of seeds.
    pub fn set_seed(&mut self, seed: u64) {
        fn reseed(seeds: &mut Vec<u64>, seed: u64) {
            let k = seeds.len().max(1) as u64;
            *seeds = (0..k).map(|i| seed.wrapping_add(i)).collect();
        }
        match self {
            Experiment::Classification(c) => reseed(&mut c.seeds, seed),
            Experiment::IntervalRegression(c) => reseed(&mut c.seeds, seed),
            Experiment::SemisupCircles(c) => c.seed = seed,
            Experiment::Ranking(c) => reseed(&mut c.seeds, seed),
            Experiment::RateCurve(c) => c.seed = seed,
        }
    }

    pub fn run(&self) -> Result<Report> {
        match self {
            Experiment::Classification(c) => classification(c),
            Experiment::IntervalRegression(c) => interval_regression(c),
            Experiment::SemisupCircles(c) => semisup_circles(c),
            Experiment::Ranking(c) => ranking(c),
            Experiment::RateCurve(c) => rate_curve(c),
        }
    }
}

/// Output of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Every configuration that was run.
    pub table: Table,
    /// Best hyperparameters per method and level, when a grid was searched.
    pub best: Option<Table>,
    /// Headline numbers.
    pub summary: BTreeMap<String, f64>,
    /// How the headline table is plotted.
    pub plot: PlotSpec,
}

impl Report {
    /// The table that is plotted: the best rows when available.
    pub fn headline(&self) -> &Table {
        self.best.as_ref().unwrap_or(&self.table)
    }
}
