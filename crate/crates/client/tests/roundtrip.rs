use weaklab_api::weaklab_core::bench::{Experiment, RateConfig};
use weaklab_api::weaklab_core::data::BlobSpec;
use weaklab_api::weaklab_core::baselines::Method;
use weaklab_api::weaklab_core::model::Solver;
use weaklab_api::weaklab_core::weights::WeightScheme;
use weaklab_api::{ClassificationSource, DisambiguateRequest, FitRequest, GenerateRequest, ModelRef};
use weaklab_client::{Client, ClientError};

async fn client() -> Client {
    let (addr, _) = weaklab_server::spawn("127.0.0.1:0").await.unwrap();
    Client::new(&format!("http://{addr}")).unwrap()
}

fn blobs(corruption: f64) -> GenerateRequest {
    GenerateRequest::Classification {
        data: ClassificationSource::Blobs(BlobSpec { n: 80, proportions: vec![0.6, 0.4], separation: 4.0, noise: 1.0 }),
        corruption,
        anchor: None,
        seed: 11,
    }
}

#[tokio::test]
async fn generate_fit_predict() {
    let c = client().await;
    assert_eq!(c.health().await.unwrap().status, "ok");
    let data = c.generate(&blobs(0.3)).await.unwrap();
    let hidden = data.hidden().unwrap();
    let x = data.inputs();

    let res = c
        .disambiguate(&DisambiguateRequest {
            dataset: data.clone(),
            weights: WeightScheme::Knn { k: 5 },
            loss: None,
            solver: Solver::default(),
        })
        .await
        .unwrap();
    let recovered = res.labels.iter().zip(&hidden).filter(|(a, b)| a == b).count();
    assert!(recovered >= 70, "{recovered}/80 labels recovered");

    for method in [Method::Df, Method::Il, Method::Ac] {
        let fit = c
            .fit(&FitRequest {
                dataset: data.clone(),
                method,
                weights: WeightScheme::Knn { k: 5 },
                loss: None,
                solver: Solver::default(),
            })
            .await
            .unwrap();
        assert_eq!(fit.disambiguation.is_some(), method == Method::Df);
        let by_id = c.predict(ModelRef::Id { model_id: fit.model_id }, x.clone()).await.unwrap();
        let stored = c.model(fit.model_id).await.unwrap();
        assert_eq!(stored, fit.model);
        let inline = c.predict(ModelRef::Inline { model: Box::new(stored) }, x.clone()).await.unwrap();
        assert_eq!(by_id, inline, "{method}");
        c.delete_model(fit.model_id).await.unwrap();
    }
}

#[tokio::test]
async fn api_errors_are_decoded() {
    let c = client().await;
    let err = c.model(uuid::Uuid::new_v4()).await.unwrap_err();
    match err {
        ClientError::Api { status, kind, .. } => {
            assert_eq!(status, 404);
            assert_eq!(kind, "state");
        }
        other => panic!("unexpected {other:?}"),
    }
    let err = c.generate(&blobs(1.5)).await.unwrap_err();
    assert!(matches!(err, ClientError::Api { status: 422, ref kind, .. } if kind == "validation"), "{err}");
}

#[tokio::test]
async fn bench_report_comes_back_typed() {
    let c = client().await;
    let exp = Experiment::RateCurve(RateConfig { n_grid: vec![20, 40], trials: 2, test_points: 50, ..Default::default() });
    let report = c.bench(exp).await.unwrap();
    assert_eq!(report.table.len(), 2);
    assert!(report.summary.contains_key("first_risk"));
}

#[test]
fn rejects_bad_urls() {
    assert!(matches!(Client::new("not a url"), Err(ClientError::Url(_))));
}
