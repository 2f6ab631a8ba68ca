use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{complement, evaluate, fold_indices, mix_seed, Metrics, PlotSpec, Report, Table, Value, WeightGrid};
use crate::baselines::{average_candidates, InfimumLossPredictor, Method};
use crate::data::{
    corrupt_classification, corrupt_ordering_with, gen_blobs, gen_concentric_circles, gen_interval_regression,
    gen_ranking_lines, majority_label, parse_libsvm, rng, BlobSpec,
};
use crate::error::{Error, Result};
use crate::infer::{Predictor, Targets};
use crate::loss::LossSpec;
use crate::model::{disambiguate_matrix, Solver};
use crate::space::Label;
use crate::weak::WeakSet;
use crate::weights::{FittedWeights, WeightMatrix, WeightScheme};

fn all_methods() -> Vec<Method> {
    vec![Method::Df, Method::Il, Method::Ac]
}

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

fn pick<T: Clone>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i].clone()).collect()
}

fn check_nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::config(format!("`{name}` must not be empty")));
    }
    Ok(())
}

/// Predictions of `method` at the test points behind `w_test`.
///
/// `a` is the weight matrix of `weights` on its own training inputs.
fn predict_method(
    method: Method,
    weights: &FittedWeights,
    a: &WeightMatrix,
    w_test: &WeightMatrix,
    loss: &LossSpec,
    sets: &[WeakSet],
    solver: Solver,
) -> Result<Vec<Label>> {
    match method {
        Method::Df => {
            let res = disambiguate_matrix(a, loss, sets, solver)?;
            Predictor::new(weights.clone(), loss.clone(), Targets::Labels(res.labels))?.predict_with_weights(w_test)
        }
        Method::Ac => {
            let xi = average_candidates(loss, sets)?;
            Predictor::new(weights.clone(), loss.clone(), Targets::Surrogates(xi))?.predict_with_weights(w_test)
        }
        Method::Il => {
            InfimumLossPredictor::with_weights(weights.clone(), loss.clone(), sets.to_vec())?.predict_with_weights(w_test)
        }
    }
}

/// Aggregates `(level, method, scheme) -> errors` into the full table and the
/// best scheme per `(method, level)`.
fn grid_tables(
    results: BTreeMap<(usize, usize, usize), Vec<f64>>,
    levels: &[f64],
    methods: &[Method],
    schemes: &[WeightScheme],
    summary: &mut BTreeMap<String, f64>,
) -> Result<(Table, Table)> {
    let columns = ["method", "corruption", "weights", "error", "std"];
    let mut table = Table::new(columns);
    let mut best: BTreeMap<(usize, usize), (usize, Metrics)> = BTreeMap::new();
    for (&(li, mi, hi), errs) in &results {
        let m = Metrics::of(errs);
        table.push(vec![
            methods[mi].to_string().into(),
            levels[li].into(),
            schemes[hi].to_string().into(),
            m.mean.into(),
            m.std.into(),
        ])?;
        let entry = best.entry((li, mi)).or_insert((hi, m));
        if m.mean < entry.1.mean {
            *entry = (hi, m);
        }
    }
    let mut best_table = Table::new(columns);
    for (&(li, mi), &(hi, m)) in &best {
        best_table.push(vec![
            methods[mi].to_string().into(),
            levels[li].into(),
            schemes[hi].to_string().into(),
            m.mean.into(),
            m.std.into(),
        ])?;
        summary.insert(format!("{}_error_{}", methods[mi], levels[li]), m.mean);
    }
    Ok((table, best_table))
}

fn error_plot(title: &str, y_label: &str) -> PlotSpec {
    PlotSpec {
        title: title.into(),
        x_label: "corruption".into(),
        y_label: y_label.into(),
        x: "corruption".into(),
        y: "error".into(),
        err: Some("std".into()),
        series: Some("method".into()),
    }
}

/// Where classification data comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ClassificationData {
    /// Synthetic blobs, redrawn for every seed.
    Blobs(BlobSpec),
    /// A LIBSVM file on the machine running the experiment.
    Libsvm { path: String },
    Inline { x: Vec<Vec<f64>>, y: Vec<usize> },
}

impl Default for ClassificationData {
    fn default() -> Self {
        ClassificationData::Blobs(BlobSpec { n: 400, proportions: vec![0.57, 0.3, 0.13], separation: 2.5, noise: 1.0 })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassificationConfig {
    pub data: ClassificationData,
    pub methods: Vec<Method>,
    /// Corruption levels; a level `c` keeps the true label alone with probability `1 - c`.
    pub corruption: Vec<f64>,
    pub folds: usize,
    pub seeds: Vec<u64>,
    pub weights: WeightGrid,
    pub solver: Solver,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        ClassificationConfig {
            data: ClassificationData::default(),
            methods: all_methods(),
            corruption: (0..=10).map(|i| i as f64 / 10.0).collect(),
            folds: 8,
            seeds: default_seeds(),
            weights: WeightGrid::default(),
            solver: Solver::default(),
        }
    }
}

/// Cross-validated 0-1 error of each method under skewed corruption.
pub fn classification(cfg: &ClassificationConfig) -> Result<Report> {
    check_nonempty("methods", &cfg.methods)?;
    check_nonempty("corruption", &cfg.corruption)?;
    check_nonempty("seeds", &cfg.seeds)?;
    if cfg.corruption.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(Error::config("corruption levels must lie in [0, 1]"));
    }
    let fixed = match &cfg.data {
        ClassificationData::Blobs(_) => None,
        ClassificationData::Libsvm { path } => {
            let d = parse_libsvm(path)?;
            Some((d.x, d.y))
        }
        ClassificationData::Inline { x, y } => {
            if x.len() != y.len() {
                return Err(Error::validation(format!("{} inputs for {} labels", x.len(), y.len())));
            }
            Some((x.clone(), y.clone()))
        }
    };

    struct SeedData {
        x: Vec<Vec<f64>>,
        y: Vec<usize>,
        folds: Vec<Vec<usize>>,
        sets: Vec<Vec<WeakSet>>,
    }
    let per_seed = cfg
        .seeds
        .iter()
        .map(|&seed| {
            let (x, y) = match (&cfg.data, &fixed) {
                (ClassificationData::Blobs(spec), _) => gen_blobs(spec, mix_seed(seed, &[0]))?,
                (_, Some((x, y))) => (x.clone(), y.clone()),
                (_, None) => unreachable!("non-synthetic data is loaded above"),
            };
            let anchor = majority_label(&y).ok_or_else(|| Error::validation("empty dataset"))?;
            let folds = fold_indices(x.len(), cfg.folds, mix_seed(seed, &[1]))?;
            let sets = cfg
                .corruption
                .iter()
                .map(|&c| corrupt_classification(&y, 1.0 - c, anchor, mix_seed(seed, &[2, c.to_bits()])))
                .collect::<Result<Vec<_>>>()?;
            Ok(SeedData { x, y, folds, sets })
        })
        .collect::<Result<Vec<_>>>()?;

    let m = per_seed.iter().flat_map(|s| s.y.iter()).max().map_or(0, |c| c + 1).max(2);
    let loss = LossSpec::zero_one(m)?;
    let n_train = per_seed[0].x.len() - per_seed[0].x.len().div_ceil(cfg.folds);
    let schemes = cfg.weights.schemes(n_train, per_seed[0].x[0].len())?;

    let h = schemes.len();
    let items: Vec<(usize, usize, usize)> = (0..per_seed.len())
        .flat_map(|si| (0..cfg.folds).flat_map(move |fi| (0..h).map(move |hi| (si, fi, hi))))
        .collect();
    let outcomes = items
        .par_iter()
        .map(|&(si, fi, hi)| {
            let d = &per_seed[si];
            let test = &d.folds[fi];
            let train = complement(d.x.len(), test);
            let weights = schemes[hi].fit(pick(&d.x, &train))?;
            let a = weights.weight_matrix();
            let w_test = weights.weights_batch(&pick(&d.x, test))?;
            let truth: Vec<Label> = test.iter().map(|&i| Label::Class(d.y[i])).collect();
            let mut out = Vec::new();
            for (li, sets) in d.sets.iter().enumerate() {
                let train_sets = pick(sets, &train);
                for (mi, &method) in cfg.methods.iter().enumerate() {
                    let preds = predict_method(method, &weights, &a, &w_test, &loss, &train_sets, cfg.solver)?;
                    out.push(((li, mi, hi), evaluate(&preds, &truth, &loss)?.mean));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut results: BTreeMap<(usize, usize, usize), Vec<f64>> = BTreeMap::new();
    for (key, err) in outcomes.into_iter().flatten() {
        results.entry(key).or_default().push(err);
    }
    let mut summary = BTreeMap::new();
    let (table, best) = grid_tables(results, &cfg.corruption, &cfg.methods, &schemes, &mut summary)?;
    Ok(Report {
        table,
        best: Some(best),
        summary,
        plot: error_plot("Cross-validated classification error under skewed corruption", "0-1 error"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntervalConfig {
    pub n: usize,
    pub omega: f64,
    pub r: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub lambda: Vec<f64>,
    /// Output grid `[lo, hi]` with `count` points, used for decoding.
    pub grid: (f64, f64, usize),
    pub test_points: usize,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub solver: Solver,
}

impl Default for IntervalConfig {
    fn default() -> Self {
        IntervalConfig {
            n: 10,
            omega: 10.0,
            r: 1.0,
            gamma: 1.0 / 3.0,
            sigma: 0.1,
            lambda: vec![1e-1, 1e-3, 1e-6],
            grid: (-6.0, 6.0, 1000),
            test_points: 200,
            methods: vec![Method::Df, Method::Il],
            seeds: default_seeds(),
            solver: Solver::default(),
        }
    }
}

/// Test MSE against `sin(omega x)` of each method, per seed and ridge parameter.
pub fn interval_regression(cfg: &IntervalConfig) -> Result<Report> {
    check_nonempty("methods", &cfg.methods)?;
    check_nonempty("lambda", &cfg.lambda)?;
    check_nonempty("seeds", &cfg.seeds)?;
    if cfg.test_points < 2 {
        return Err(Error::config("need at least two test points"));
    }
    let loss = LossSpec::square(cfg.grid.0, cfg.grid.1, cfg.grid.2)?;
    let xs: Vec<Vec<f64>> = (0..cfg.test_points).map(|i| vec![i as f64 / (cfg.test_points - 1) as f64]).collect();
    let truth: Vec<Label> = xs.iter().map(|x| Label::Real((cfg.omega * x[0]).sin())).collect();

    let items: Vec<(usize, usize)> =
        (0..cfg.seeds.len()).flat_map(|si| (0..cfg.lambda.len()).map(move |li| (si, li))).collect();
    let outcomes = items
        .par_iter()
        .map(|&(si, li)| {
            let samples = gen_interval_regression(cfg.n, cfg.omega, cfg.r, cfg.gamma, cfg.seeds[si])?;
            let x: Vec<Vec<f64>> = samples.iter().map(|s| s.x.clone()).collect();
            let sets: Vec<WeakSet> = samples.iter().map(|s| s.s.clone()).collect();
            let weights = WeightScheme::Krr { lambda: cfg.lambda[li], sigma: cfg.sigma }.fit(x)?;
            let a = weights.weight_matrix();
            let w_test = weights.weights_batch(&xs)?;
            cfg.methods
                .iter()
                .map(|&method| {
                    let preds = predict_method(method, &weights, &a, &w_test, &loss, &sets, cfg.solver)?;
                    Ok(evaluate(&preds, &truth, &loss)?.mean)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let columns = ["seed", "method", "lambda", "mse"];
    let mut table = Table::new(columns);
    let mut best: BTreeMap<(usize, usize), (usize, f64)> = BTreeMap::new();
    for (&(si, li), mses) in items.iter().zip(&outcomes) {
        for (mi, &mse) in mses.iter().enumerate() {
            table.push(vec![
                (cfg.seeds[si] as f64).into(),
                cfg.methods[mi].to_string().into(),
                cfg.lambda[li].into(),
                mse.into(),
            ])?;
            let e = best.entry((si, mi)).or_insert((li, mse));
            if mse < e.1 {
                *e = (li, mse);
            }
        }
    }
    let mut best_table = Table::new(columns);
    let mut per_method: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (&(si, mi), &(li, mse)) in &best {
        best_table.push(vec![
            (cfg.seeds[si] as f64).into(),
            cfg.methods[mi].to_string().into(),
            cfg.lambda[li].into(),
            mse.into(),
        ])?;
        per_method.entry(mi).or_default().push(mse);
    }
    let mut summary = BTreeMap::new();
    for (mi, v) in &per_method {
        summary.insert(format!("{}_mse", cfg.methods[*mi]), Metrics::of(v).mean);
    }
    let (df, il) = (
        cfg.methods.iter().position(|m| *m == Method::Df),
        cfg.methods.iter().position(|m| *m == Method::Il),
    );
    if let (Some(df), Some(il)) = (df, il) {
        let wins = (0..cfg.seeds.len()).filter(|&si| best[&(si, df)].1 <= best[&(si, il)].1).count();
        summary.insert("df_wins".into(), wins as f64);
    }
    Ok(Report {
        table,
        best: Some(best_table),
        summary,
        plot: PlotSpec {
            title: "Interval regression test error per seed".into(),
            x_label: "seed".into(),
            y_label: "test MSE".into(),
            x: "seed".into(),
            y: "mse".into(),
            err: None,
            series: Some("method".into()),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CirclesConfig {
    pub seed: u64,
    /// Neighbours used by the disambiguation weights.
    pub k: usize,
    /// Nadaraya-Watson bandwidth used at inference.
    pub h: f64,
    /// Evaluation grid is `grid x grid` over `[-4.5, 4.5]^2`.
    pub grid: usize,
    /// Only grid points this close to a ring are scored.
    pub band: f64,
    pub methods: Vec<Method>,
    pub solver: Solver,
}

impl Default for CirclesConfig {
    fn default() -> Self {
        CirclesConfig {
            seed: 0,
            k: 20,
            h: 0.08,
            grid: 50,
            band: 0.1,
            methods: vec![Method::Df, Method::Il],
            solver: Solver::default(),
        }
    }
}

/// Grid points within `band` of a ring, with the class of the nearest ring.
pub fn ring_grid(grid: usize, band: f64) -> (Vec<Vec<f64>>, Vec<Label>) {
    let step = if grid > 1 { 9.0 / (grid - 1) as f64 } else { 0.0 };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let p = [-4.5 + i as f64 * step, -4.5 + j as f64 * step];
            let radius = p[0].hypot(p[1]);
            let ring = radius.round().clamp(1.0, 4.0);
            if (radius - ring).abs() <= band {
                xs.push(p.to_vec());
                ys.push(Label::Class(ring as usize - 1));
            }
        }
    }
    (xs, ys)
}

/// Semi-supervised concentric circles: four labelled points among 2000.
pub fn semisup_circles(cfg: &CirclesConfig) -> Result<Report> {
    check_nonempty("methods", &cfg.methods)?;
    let samples = gen_concentric_circles(cfg.seed)?;
    let x: Vec<Vec<f64>> = samples.iter().map(|s| s.x.clone()).collect();
    let sets: Vec<WeakSet> = samples.iter().map(|s| s.s.clone()).collect();
    let hidden: Vec<Label> = samples.iter().map(|s| s.hidden_y.clone().expect("generated with labels")).collect();
    let loss = LossSpec::zero_one(4)?;
    let (grid_x, grid_y) = ring_grid(cfg.grid, cfg.band);
    if grid_x.is_empty() {
        return Err(Error::config("no evaluation point lies near a ring"));
    }
    let inference = WeightScheme::NadarayaWatson { h: cfg.h, normalized: true }.fit(x.clone())?;
    let w_grid = inference.weights_batch(&grid_x)?;

    let mut summary = BTreeMap::new();
    let mut table = Table::new(["method", "h", "accuracy", "points"]);
    for &method in &cfg.methods {
        let preds = match method {
            Method::Df => {
                let a = WeightScheme::Knn { k: cfg.k }.fit(x.clone())?.weight_matrix();
                let res = disambiguate_matrix(&a, &loss, &sets, cfg.solver)?;
                let recovered = evaluate(&res.labels, &hidden, &loss)?;
                summary.insert("df_disambiguation_accuracy".into(), 1.0 - recovered.mean);
                Predictor::new(inference.clone(), loss.clone(), Targets::Labels(res.labels))?.predict_with_weights(&w_grid)?
            }
            Method::Il => {
                InfimumLossPredictor::with_weights(inference.clone(), loss.clone(), sets.clone())?.predict_with_weights(&w_grid)?
            }
            Method::Ac => Predictor::new(inference.clone(), loss.clone(), Targets::Surrogates(average_candidates(&loss, &sets)?))?
                .predict_with_weights(&w_grid)?,
        };
        let acc = 1.0 - evaluate(&preds, &grid_y, &loss)?.mean;
        summary.insert(format!("{method}_accuracy"), acc);
        table.push(vec![method.to_string().into(), cfg.h.into(), acc.into(), grid_x.len().into()])?;
    }
    Ok(Report {
        table,
        best: None,
        summary,
        plot: PlotSpec {
            title: "Ring classification accuracy from four labelled points".into(),
            x_label: "inference bandwidth h".into(),
            y_label: "accuracy".into(),
            x: "h".into(),
            y: "accuracy".into(),
            err: None,
            series: Some("method".into()),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RankingConfig {
    pub m: usize,
    pub n: usize,
    pub test_points: usize,
    /// Probability of dropping each pairwise comparison.
    pub corruption: Vec<f64>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub weights: WeightGrid,
    pub solver: Solver,
}

impl Default for RankingConfig {
    fn default() -> Self {
        RankingConfig {
            m: 4,
            n: 200,
            test_points: 200,
            corruption: vec![0.0, 0.2, 0.4, 0.6, 0.8, 0.9],
            methods: all_methods(),
            seeds: default_seeds(),
            weights: WeightGrid::default(),
            solver: Solver::default(),
        }
    }
}

/// Held-out Kendall loss when pairwise comparisons are dropped at random.
pub fn ranking(cfg: &RankingConfig) -> Result<Report> {
    check_nonempty("methods", &cfg.methods)?;
    check_nonempty("corruption", &cfg.corruption)?;
    check_nonempty("seeds", &cfg.seeds)?;
    if cfg.n == 0 || cfg.test_points == 0 {
        return Err(Error::config("ranking needs training and test points"));
    }
    let loss = LossSpec::kendall(cfg.m)?;
    let schemes = cfg.weights.schemes(cfg.n, 1)?;
    let items: Vec<(usize, usize)> =
        (0..cfg.seeds.len()).flat_map(|si| (0..schemes.len()).map(move |hi| (si, hi))).collect();
    let outcomes = items
        .par_iter()
        .map(|&(si, hi)| {
            let seed = cfg.seeds[si];
            let (x, y, _) = gen_ranking_lines(cfg.m, cfg.n + cfg.test_points, seed)?;
            let (train_x, test_x) = x.split_at(cfg.n);
            let truth: Vec<Label> = y[cfg.n..].iter().cloned().map(Label::Perm).collect();
            let weights = schemes[hi].fit(train_x.to_vec())?;
            let a = weights.weight_matrix();
            let w_test = weights.weights_batch(test_x)?;
            let mut out = Vec::new();
            for (li, &p) in cfg.corruption.iter().enumerate() {
                let mut g = rng(mix_seed(seed, &[3, p.to_bits()]));
                let sets = y[..cfg.n].iter().map(|yi| corrupt_ordering_with(yi, p, &mut g)).collect::<Result<Vec<_>>>()?;
                for (mi, &method) in cfg.methods.iter().enumerate() {
                    let preds = predict_method(method, &weights, &a, &w_test, &loss, &sets, cfg.solver)?;
                    out.push(((li, mi, hi), evaluate(&preds, &truth, &loss)?.mean));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut results: BTreeMap<(usize, usize, usize), Vec<f64>> = BTreeMap::new();
    for (key, err) in outcomes.into_iter().flatten() {
        results.entry(key).or_default().push(err);
    }
    let mut summary = BTreeMap::new();
    let (table, best) = grid_tables(results, &cfg.corruption, &cfg.methods, &schemes, &mut summary)?;
    Ok(Report {
        table,
        best: Some(best),
        summary,
        plot: error_plot("Ranking with dropped pairwise comparisons", "Kendall loss"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RateConfig {
    pub eta: f64,
    /// Neighbours as a fraction of the sample size.
    pub k0: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub test_points: usize,
    pub solver: Solver,
}

impl Default for RateConfig {
    fn default() -> Self {
        RateConfig {
            eta: 0.5,
            k0: 0.2,
            n_grid: vec![25, 35, 50, 71, 100, 141, 200, 283, 400],
            trials: 50,
            seed: 0,
            test_points: 1000,
            solver: Solver::default(),
        }
    }
}

/// Support of the rate problem: class `c` lives on `[0.4 c, 0.4 c + 0.2]`.
fn rate_point(c: usize, u: f64) -> f64 {
    0.4 * c as f64 + 0.2 * u
}

/// Excess 0-1 risk of one disambiguate-then-predict run on `n` samples.
pub fn rate_trial(cfg: &RateConfig, n: usize, seed: u64) -> Result<f64> {
    let mut g = rng(seed);
    let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let x: Vec<Vec<f64>> = labels.iter().map(|&c| vec![rate_point(c, g.random())]).collect();
    let sets = corrupt_classification(&labels, 1.0 - cfg.eta, 0, g.random())?;
    let k = ((cfg.k0 * n as f64).ceil() as usize).clamp(1, n);
    let loss = LossSpec::zero_one(3)?;
    let weights = WeightScheme::Knn { k }.fit(x)?;
    let res = disambiguate_matrix(&weights.weight_matrix(), &loss, &sets, cfg.solver)?;
    let predictor = Predictor::new(weights, loss.clone(), Targets::Labels(res.labels))?;
    let t = cfg.test_points;
    let (xs, truth): (Vec<Vec<f64>>, Vec<Label>) = (0..t)
        .map(|j| {
            let u = 3.0 * (j as f64 + 0.5) / t as f64;
            let c = (u.floor() as usize).min(2);
            (vec![rate_point(c, u - c as f64)], Label::Class(c))
        })
        .unzip();
    Ok(evaluate(&predictor.predict_batch(&xs)?, &truth, &loss)?.mean)
}

/// Least-squares slope of `ln(risk)` against `n` over the points with positive risk.
pub fn log_linear_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0).map(|&(n, r)| (n, r.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Mean excess risk of disambiguation with `k = ceil(k0 n)` neighbours as `n` grows.
pub fn rate_curve(cfg: &RateConfig) -> Result<Report> {
    if !(0.0..1.0).contains(&cfg.eta) {
        return Err(Error::config(format!("eta must lie in [0, 1), got {}", cfg.eta)));
    }
    if !(cfg.k0 > 0.0 && cfg.k0 <= 1.0) {
        return Err(Error::config("k0 must lie in (0, 1]"));
    }
    check_nonempty("n_grid", &cfg.n_grid)?;
    if cfg.n_grid.windows(2).any(|w| w[0] >= w[1]) || cfg.n_grid[0] == 0 {
        return Err(Error::config("n_grid must be positive and increasing"));
    }
    if cfg.trials == 0 || cfg.test_points == 0 {
        return Err(Error::config("need at least one trial and one test point"));
    }
    let items: Vec<(usize, usize)> =
        (0..cfg.n_grid.len()).flat_map(|ni| (0..cfg.trials).map(move |t| (ni, t))).collect();
    let risks = items
        .par_iter()
        .map(|&(ni, t)| rate_trial(cfg, cfg.n_grid[ni], mix_seed(cfg.seed, &[cfg.n_grid[ni] as u64, t as u64])))
        .collect::<Result<Vec<f64>>>()?;

    let mut table = Table::new(["n", "k", "risk", "se"]);
    let mut curve = Vec::new();
    for (ni, &n) in cfg.n_grid.iter().enumerate() {
        let r = &risks[ni * cfg.trials..(ni + 1) * cfg.trials];
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        let se = if r.len() > 1 {
            (r.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r.len() - 1) as f64 / r.len() as f64).sqrt()
        } else {
            0.0
        };
        let k = ((cfg.k0 * n as f64).ceil() as usize).clamp(1, n);
        table.push(vec![Value::from(n), Value::from(k), mean.into(), se.into()])?;
        curve.push((n as f64, mean));
    }
    let mut summary = BTreeMap::new();
    if let Some(s) = log_linear_slope(&curve) {
        summary.insert("slope".into(), s);
    }
    summary.insert("first_risk".into(), curve[0].1);
    summary.insert("last_risk".into(), curve[curve.len() - 1].1);
    let monotone = curve.windows(2).all(|w| w[1].1 <= w[0].1);
    summary.insert("non_increasing".into(), if monotone { 1.0 } else { 0.0 });
    Ok(Report {
        table,
        best: None,
        summary,
        plot: PlotSpec {
            title: "Excess risk of disambiguation as the sample grows".into(),
            x_label: "number of samples n".into(),
            y_label: "excess 0-1 risk".into(),
            x: "n".into(),
            y: "risk".into(),
            err: Some("se".into()),
            series: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_grid_labels_nearest_ring() {
        let (xs, ys) = ring_grid(50, 0.1);
        assert!(!xs.is_empty());
        for (x, y) in xs.iter().zip(&ys) {
            let r = x[0].hypot(x[1]);
            assert_eq!(y.as_class().unwrap(), r.round() as usize - 1);
            assert!((r - r.round()).abs() <= 0.1);
        }
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 30.0].iter().map(|&n| (n, (-0.1 * n as f64).exp())).collect();
        assert!((log_linear_slope(&pts).unwrap() + 0.1).abs() < 1e-12);
        assert!(log_linear_slope(&[(1.0, 0.5), (2.0, 0.0)]).is_none());
    }

    #[test]
    fn unambiguous_rate_problem_has_no_excess_risk() {
        let cfg = RateConfig { eta: 0.0, n_grid: vec![30, 60], trials: 3, test_points: 300, ..Default::default() };
        let rep = rate_curve(&cfg).unwrap();
        assert_eq!(rep.summary["first_risk"], 0.0);
        assert_eq!(rep.summary["last_risk"], 0.0);
    }

    #[test]
    fn rate_config_is_checked() {
        assert!(rate_curve(&RateConfig { eta: 1.0, ..Default::default() }).is_err());
        assert!(rate_curve(&RateConfig { n_grid: vec![50, 25], ..Default::default() }).is_err());
    }

    #[test]
    fn too_many_folds_is_a_config_error() {
        let cfg = ClassificationConfig {
            data: ClassificationData::Inline { x: vec![vec![0.0], vec![1.0]], y: vec![0, 1] },
            folds: 3,
            ..Default::default()
        };
        assert!(matches!(classification(&cfg), Err(Error::Config(_))));
    }

    fn separable() -> ClassificationConfig {
        ClassificationConfig {
            data: ClassificationData::Blobs(BlobSpec { n: 120, proportions: vec![0.5, 0.3, 0.2], separation: 4.0, noise: 0.5 }),
            corruption: vec![0.0],
            folds: 2,
            seeds: vec![3],
            weights: WeightGrid::knn(vec![5]),
            ..Default::default()
        }
    }

    #[test]
    fn separable_blobs_are_learned() {
        let rep = classification(&separable()).unwrap();
        for m in ["df", "il", "ac"] {
            assert!(rep.summary[&format!("{m}_error_0")] < 0.05, "{m}: {:?}", rep.summary);
        }
    }

    #[test]
    fn classification_tables_are_reproducible() {
        let a = classification(&separable()).unwrap();
        let b = classification(&separable()).unwrap();
        assert_eq!(a.table.to_csv_string(), b.table.to_csv_string());
        assert_eq!(a.best.unwrap().columns, vec!["method", "corruption", "weights", "error", "std"]);
    }
}
