//! Turns `weaklab bench` flags and config files into an experiment.

use std::path::Path;

use anyhow::{bail, Context, Result};

use weaklab_core::baselines::Method;
use weaklab_core::bench::{parse_grid, ClassificationData, Experiment, WeightGrid, WeightKind};
use weaklab_core::data::parse_libsvm;
use weaklab_core::model::Solver;
use weaklab_core::disambig::IqpOptions;

use crate::args::{BenchArgs, BenchTask, SolverArg, WeightKindArg};

fn task_name(task: BenchTask) -> &'static str {
    match task {
        BenchTask::Classification => "classification",
        BenchTask::Interval => "interval_regression",
        BenchTask::Circles => "semisup_circles",
        BenchTask::Ranking => "ranking",
        BenchTask::Rate => "rate_curve",
    }
}

pub fn load_config(path: &Path) -> Result<Experiment> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn methods(text: &str) -> Result<Vec<Method>> {
    let out = text.split(',').map(|m| m.trim().parse::<Method>()).collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() {
        bail!("no methods given");
    }
    Ok(out)
}

fn usizes(flag: &str, text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|v| v.trim().parse::<usize>().with_context(|| format!("--{flag}: `{v}` is not a count")))
        .collect()
}

fn single<T: Copy>(flag: &str, values: &[T]) -> Result<T> {
    match values {
        [v] => Ok(*v),
        _ => bail!("--{flag} takes a single value for this task"),
    }
}

fn solver(kind: SolverArg) -> Solver {
    match kind {
        SolverArg::Am => Solver::default(),
        SolverArg::Iqp => Solver::Iqp(IqpOptions::default()),
    }
}

fn seeds(start: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| start.wrapping_add(i)).collect()
}

/// Flags that only some tasks understand. Each task takes what it uses and
/// anything left over is reported.
#[derive(Default)]
struct Overrides<'a> {
    data: Option<&'a Path>,
    methods: Option<Vec<Method>>,
    corruption: Option<Vec<f64>>,
    folds: Option<usize>,
    repeats: Option<usize>,
    weights: Option<WeightKindArg>,
    k: Option<&'a str>,
    lambda: Option<&'a str>,
    sigma: Option<&'a str>,
    h: Option<&'a str>,
    eta: Option<f64>,
    k0: Option<f64>,
    trials: Option<usize>,
    n_grid: Option<&'a str>,
}

impl Overrides<'_> {
    fn leftover(&self) -> Option<&'static str> {
        [
            (self.data.is_some(), "data"),
            (self.methods.is_some(), "method"),
            (self.corruption.is_some(), "corruption"),
            (self.folds.is_some(), "folds"),
            (self.repeats.is_some(), "repeats"),
            (self.weights.is_some(), "weights"),
            (self.k.is_some(), "k"),
            (self.lambda.is_some(), "lambda"),
            (self.sigma.is_some(), "sigma"),
            (self.h.is_some(), "h"),
            (self.eta.is_some(), "eta"),
            (self.k0.is_some(), "k0"),
            (self.trials.is_some(), "trials"),
            (self.n_grid.is_some(), "n-grid"),
        ]
        .into_iter()
        .find_map(|(set, name)| set.then_some(name))
    }

    fn weight_grid(&mut self, grid: &mut WeightGrid) -> Result<()> {
        if let Some(kind) = self.weights.take() {
            *grid = WeightGrid {
                kind: match kind {
                    WeightKindArg::Knn => WeightKind::Knn,
                    WeightKindArg::Krr => WeightKind::Krr,
                    WeightKindArg::Nw => WeightKind::NadarayaWatson,
                },
                ..Default::default()
            };
        }
        if let Some(k) = self.k.take() {
            grid.k = Some(usizes("k", k)?);
        }
        if let Some(l) = self.lambda.take() {
            grid.lambda = Some(parse_grid(l)?);
        }
        if let Some(s) = self.sigma.take() {
            grid.sigma = Some(parse_grid(s)?);
        }
        if let Some(h) = self.h.take() {
            grid.h = Some(parse_grid(h)?);
        }
        Ok(())
    }
}

fn repeat(seeds_: &mut Vec<u64>, repeats: Option<usize>) -> Result<()> {
    if let Some(r) = repeats {
        if r == 0 {
            bail!("--repeats must be positive");
        }
        *seeds_ = seeds(seeds_.first().copied().unwrap_or(0), r);
    }
    Ok(())
}

/// The experiment described by the config file (or the task defaults) with
/// command-line flags applied on top. The seed flag (or `WEAKLAB_SEED`) wins
/// over the file.
pub fn build_experiment(args: &BenchArgs) -> Result<Experiment> {
    let mut exp = match (&args.config, args.task) {
        (Some(path), task) => {
            let exp = load_config(path)?;
            if let Some(t) = task {
                if Experiment::default_for(task_name(t))?.name() != exp.name() {
                    bail!("--task {} conflicts with task `{}` in {}", task_name(t), exp.name(), path.display());
                }
            }
            exp
        }
        (None, Some(t)) => Experiment::default_for(task_name(t))?,
        (None, None) => bail!("give --task or --config"),
    };

    let mut o = Overrides {
        data: args.data.as_deref(),
        methods: args.method.as_deref().map(methods).transpose()?,
        corruption: args.corruption.as_deref().map(parse_grid).transpose()?,
        folds: args.folds,
        repeats: args.repeats,
        weights: args.weights,
        k: args.k.as_deref(),
        lambda: args.lambda.as_deref(),
        sigma: args.sigma.as_deref(),
        h: args.h.as_deref(),
        eta: args.eta,
        k0: args.k0,
        trials: args.trials,
        n_grid: args.n_grid.as_deref(),
    };

    match &mut exp {
        Experiment::Classification(c) => {
            if let Some(path) = o.data.take() {
                // Read here so that the file does not have to exist where the
                // service runs.
                let d = parse_libsvm(path).with_context(|| format!("reading {}", path.display()))?;
                c.data = ClassificationData::Inline { x: d.x, y: d.y };
            }
            if let Some(m) = o.methods.take() {
                c.methods = m;
            }
            if let Some(v) = o.corruption.take() {
                c.corruption = v;
            }
            if let Some(f) = o.folds.take() {
                c.folds = f;
            }
            repeat(&mut c.seeds, o.repeats.take())?;
            o.weight_grid(&mut c.weights)?;
            if let Some(s) = args.solver {
                c.solver = solver(s);
            }
        }
        Experiment::IntervalRegression(c) => {
            if let Some(m) = o.methods.take() {
                c.methods = m;
            }
            if let Some(l) = o.lambda.take() {
                c.lambda = parse_grid(l)?;
            }
            if let Some(s) = o.sigma.take() {
                c.sigma = single("sigma", &parse_grid(s)?)?;
            }
            repeat(&mut c.seeds, o.repeats.take())?;
            if let Some(s) = args.solver {
                c.solver = solver(s);
            }
        }
        Experiment::SemisupCircles(c) => {
            if let Some(m) = o.methods.take() {
                c.methods = m;
            }
            if let Some(k) = o.k.take() {
                c.k = single("k", &usizes("k", k)?)?;
            }
            if let Some(h) = o.h.take() {
                c.h = single("h", &parse_grid(h)?)?;
            }
            if let Some(s) = args.solver {
                c.solver = solver(s);
            }
        }
        Experiment::Ranking(c) => {
            if let Some(m) = o.methods.take() {
                c.methods = m;
            }
            if let Some(v) = o.corruption.take() {
                c.corruption = v;
            }
            repeat(&mut c.seeds, o.repeats.take())?;
            o.weight_grid(&mut c.weights)?;
            if let Some(s) = args.solver {
                c.solver = solver(s);
            }
        }
        Experiment::RateCurve(c) => {
            if let Some(e) = o.eta.take() {
                c.eta = e;
            }
            if let Some(k) = o.k0.take() {
                c.k0 = k;
            }
            if let Some(t) = o.trials.take() {
                c.trials = t;
            }
            if let Some(g) = o.n_grid.take() {
                c.n_grid = usizes("n-grid", g)?;
            }
            if let Some(s) = args.solver {
                c.solver = solver(s);
            }
        }
    }
    if let Some(flag) = o.leftover() {
        bail!("--{flag} does not apply to the {} task", exp.name());
    }
    if let Some(seed) = args.seed {
        exp.set_seed(seed);
    }
    Ok(exp)
}
