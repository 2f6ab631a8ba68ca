mod args;
mod bench;
mod io;

use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use clap::Parser;

use weaklab_api::{ClassificationSource, DisambiguateRequest, FitRequest, GenerateRequest, ModelRef};
use weaklab_client::Client;
use weaklab_core::bench::{render, ClassificationData, Format};
use weaklab_core::data::{parse_libsvm, Dataset};
use weaklab_core::loss::read_loss_matrix;
use weaklab_core::model::ModelFile;

use args::{Cli, Command, GenTask, GenerateArgs};

fn load_dataset(path: &Path) -> Result<Dataset> {
    Dataset::load(path).with_context(|| format!("reading {}", path.display()))
}

fn generate_request(args: &GenerateArgs) -> Result<GenerateRequest> {
    Ok(match args.task {
        GenTask::Classification => {
            let data = match &args.data {
                Some(path) => {
                    let d = parse_libsvm(path).with_context(|| format!("reading {}", path.display()))?;
                    ClassificationSource::Inline { x: d.x, y: d.y }
                }
                None => {
                    let ClassificationData::Blobs(mut spec) = ClassificationData::default() else {
                        unreachable!("default classification data is synthetic")
                    };
                    if let Some(n) = args.n {
                        spec.n = n;
                    }
                    ClassificationSource::Blobs(spec)
                }
            };
            GenerateRequest::Classification { data, corruption: args.corruption, anchor: None, seed: args.seed }
        }
        GenTask::Interval => GenerateRequest::IntervalRegression {
            n: args.n.unwrap_or(10),
            omega: 10.0,
            r: 1.0,
            gamma: 1.0 / 3.0,
            grid: (-6.0, 6.0, 1000),
            seed: args.seed,
        },
        GenTask::Ranking => {
            GenerateRequest::Ranking { m: args.m, n: args.n.unwrap_or(200), p: args.corruption, seed: args.seed }
        }
        GenTask::Circles => GenerateRequest::SemisupCircles { seed: args.seed },
    })
}

async fn run(client: &Client, command: Command) -> Result<()> {
    match command {
        Command::Serve { .. } => unreachable!("handled before a client exists"),
        Command::Generate(args) => {
            let dataset = client.generate(&generate_request(&args)?).await?;
            let mut out = io::output(args.out.as_deref())?;
            dataset.write_csv(&mut out)?;
            out.flush()?;
            eprintln!("{} samples in {}", dataset.len(), dataset.space);
        }
        Command::Decompose { loss } => {
            let matrix = read_loss_matrix(&loss).with_context(|| format!("reading {}", loss.display()))?;
            let q = client.decompose(matrix).await?;
            println!("dim {}", q.dim);
            println!("norm_const {}", q.norm_const);
            println!("max_error {:e}", q.max_error);
        }
        Command::Disambiguate(args) => {
            let req = DisambiguateRequest {
                dataset: load_dataset(&args.data)?,
                weights: args.weights.scheme(),
                loss: args.loss.as_deref().map(io::read_loss).transpose()?,
                solver: args.solver.solver(),
            };
            let res = client.disambiguate(&req).await?;
            let mut out = io::output(args.out.as_deref())?;
            io::write_labels(&mut out, &res.labels)?;
            match &args.trace {
                Some(path) => io::write_trace(io::output(Some(path))?, &res)?,
                None => {
                    writeln!(out)?;
                    io::write_trace(&mut out, &res)?;
                }
            }
            out.flush()?;
            let status = if res.converged { "converged" } else { "not converged" };
            eprintln!("objective {} after {} iterations ({status})", res.objective, res.iterations);
        }
        Command::Fit(args) => {
            let req = FitRequest {
                dataset: load_dataset(&args.data)?,
                method: args.method.parse()?,
                weights: args.weights.scheme(),
                loss: args.loss.as_deref().map(io::read_loss).transpose()?,
                solver: args.solver.solver(),
            };
            let fit = client.fit(&req).await?;
            let out = std::fs::File::create(&args.model).with_context(|| format!("creating {}", args.model.display()))?;
            fit.model.write_to(std::io::BufWriter::new(out))?;
            if let Some(d) = &fit.disambiguation {
                eprintln!("disambiguation objective {} after {} iterations", d.objective, d.iterations);
            }
            eprintln!("wrote {} model to {}", fit.model.method, args.model.display());
        }
        Command::Predict { model, input, out } => {
            let file = ModelFile::read_from(std::io::BufReader::new(
                std::fs::File::open(&model).with_context(|| format!("opening {}", model.display()))?,
            ))
            .with_context(|| format!("reading {}", model.display()))?;
            let text = std::fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let inputs = io::read_features(&text)?;
            let pred = client.predict(ModelRef::Inline { model: Box::new(file) }, inputs).await?;
            let mut w = io::output(out.as_deref())?;
            io::write_labels(&mut w, &pred.labels)?;
            w.flush()?;
        }
        Command::Bench(args) => {
            let exp = bench::build_experiment(&args)?;
            let report = client.bench(exp).await?;
            let table = if args.all { &report.table } else { report.headline() };
            let format = args.out.as_deref().map(Format::from_path).unwrap_or_default();
            let text = render(table, &report.plot, format)?;
            let mut out = io::output(args.out.as_deref())?;
            out.write_all(text.as_bytes())?;
            out.flush()?;
            for (k, v) in &report.summary {
                eprintln!("{k} = {v}");
            }
        }
    }
    Ok(())
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    if let Command::Serve { addr } = cli.command {
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        eprintln!("weaklab listening on {}", listener.local_addr()?);
        weaklab_server::serve(listener).await?;
        return Ok(());
    }
    let client = match &cli.server {
        Some(url) => Client::new(url)?,
        None => {
            let (addr, _) = weaklab_server::spawn("127.0.0.1:0").await?;
            tracing::debug!(%addr, "started in-process server");
            Client::new(&format!("http://{addr}"))?
        }
    };
    run(&client, cli.command).await
}
