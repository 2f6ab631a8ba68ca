use serde_json::{json, Value};
use weaklab_core::loss::LossSpec;
use weaklab_core::space::{Label, Permutation};

async fn start() -> String {
    let (addr, _handle) = weaklab_server::spawn("127.0.0.1:0").await.unwrap();
    format!("http://{addr}")
}

async fn post(base: &str, path: &str, body: Value) -> (u16, Value) {
    let resp = reqwest::Client::new().post(format!("{base}{path}")).json(&body).send().await.unwrap();
    let status = resp.status().as_u16();
    (status, resp.json().await.unwrap())
}

fn toy_dataset() -> Value {
    json!({
        "space": {"kind": "classes", "m": 2},
        "samples": [
            {"x": [0.0], "s": {"explicit": [0]}, "hidden_y": 0},
            {"x": [0.1], "s": {"explicit": [0, 1]}, "hidden_y": 0},
            {"x": [1.0], "s": {"explicit": [1]}, "hidden_y": 1},
            {"x": [1.1], "s": {"explicit": [0, 1]}, "hidden_y": 1}
        ]
    })
}

#[tokio::test]
async fn health_reports_ok() {
    let base = start().await;
    let body: Value = reqwest::get(format!("{base}/health")).await.unwrap().json().await.unwrap();
    assert_eq!(body["status"], "ok");
    assert_eq!(body["service"], "weaklab-server");
}

#[tokio::test]
async fn fit_then_predict_by_id_and_inline() {
    let base = start().await;
    let (status, fit) = post(
        &base,
        "/v1/fit",
        json!({"dataset": toy_dataset(), "method": "df", "weights": {"kind": "knn", "k": 2}}),
    )
    .await;
    assert_eq!(status, 200, "{fit}");
    assert_eq!(fit["disambiguation"]["labels"], json!([0, 0, 1, 1]));

    let id = fit["model_id"].as_str().unwrap();
    let (status, pred) = post(&base, "/v1/predict", json!({"model_id": id, "inputs": [[0.05], [1.05]]})).await;
    assert_eq!(status, 200, "{pred}");
    assert_eq!(pred["labels"], json!([0, 1]));

    let (status, inline) = post(&base, "/v1/predict", json!({"model": fit["model"], "inputs": [[0.05], [1.05]]})).await;
    assert_eq!(status, 200, "{inline}");
    assert_eq!(inline["labels"], pred["labels"]);

    let client = reqwest::Client::new();
    let got = client.get(format!("{base}/v1/models/{id}")).send().await.unwrap();
    assert_eq!(got.status().as_u16(), 200);
    let gone = client.delete(format!("{base}/v1/models/{id}")).send().await.unwrap();
    assert_eq!(gone.status().as_u16(), 204);
    let again = client.get(format!("{base}/v1/models/{id}")).send().await.unwrap();
    assert_eq!(again.status().as_u16(), 404);
}

#[tokio::test]
async fn unknown_model_is_a_state_error() {
    let base = start().await;
    let (status, body) = post(
        &base,
        "/v1/predict",
        json!({"model_id": "00000000-0000-4000-8000-000000000000", "inputs": [[0.0]]}),
    )
    .await;
    assert_eq!(status, 404);
    assert_eq!(body["kind"], "state");
}

#[tokio::test]
async fn errors_carry_kind_and_status() {
    let base = start().await;
    let (status, body) = post(&base, "/v1/loss/decompose", json!({"matrix": [[0.0, 1.0], [2.0, 0.0]]})).await;
    assert_eq!(status, 422);
    assert_eq!(body["kind"], "validation");

    let (status, body) = post(&base, "/v1/fit", json!({"dataset": toy_dataset(), "method": "df", "weights": {"kind": "knn", "k": 0}})).await;
    assert_eq!(status, 400);
    assert_eq!(body["kind"], "config");

    let (status, body) = post(&base, "/v1/fit", json!({"method": "zz"})).await;
    assert!(status == 400 || status == 422, "{status}");
    assert_eq!(body["kind"], "parse");
}

#[tokio::test]
async fn decompose_reconstructs_zero_one() {
    let base = start().await;
    let (status, body) = post(
        &base,
        "/v1/loss/decompose",
        json!({"matrix": [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]}),
    )
    .await;
    assert_eq!(status, 200, "{body}");
    assert_eq!(body["dim"], 6);
    assert!(body["max_error"].as_f64().unwrap() < 1e-9);
}

#[tokio::test]
async fn decode_ranking_scores() {
    let base = start().await;
    let loss = LossSpec::kendall(4).unwrap();
    let y = Label::Perm(Permutation::from_ranks(vec![2, 0, 3, 1]).unwrap());
    // Scoring with the embedding of `y` makes `y` the unique minimizer.
    let g = loss.phi(&y).unwrap();
    let (status, body) = post(&base, "/v1/decode", json!({"loss": loss, "g": g})).await;
    assert_eq!(status, 200, "{body}");
    assert_eq!(body["label"], json!([2, 0, 3, 1]));
    assert!(body["value"].as_f64().unwrap().abs() < 1e-9);
}

#[tokio::test]
async fn generate_and_disambiguate() {
    let base = start().await;
    let (status, data) = post(
        &base,
        "/v1/generate",
        json!({"task": "classification", "source": "blobs", "n": 60, "proportions": [0.5, 0.5],
               "separation": 4.0, "noise": 1.0, "corruption": 0.5, "seed": 7}),
    )
    .await;
    assert_eq!(status, 200, "{data}");
    assert_eq!(data["samples"].as_array().unwrap().len(), 60);

    let (status, res) = post(
        &base,
        "/v1/disambiguate",
        json!({"dataset": data, "weights": {"kind": "knn", "k": 5}, "solver": {"kind": "iqp", "steps": 50, "step_rule": "harmonic", "gap_tol": 1e-9}}),
    )
    .await;
    assert_eq!(status, 200, "{res}");
    assert_eq!(res["labels"].as_array().unwrap().len(), 60);
    assert!(!res["objective_trace"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn bench_runs_a_small_experiment() {
    let base = start().await;
    let (status, report) = post(
        &base,
        "/v1/bench",
        json!({"experiment": {"task": "rate_curve", "n_grid": [20, 40], "trials": 3, "test_points": 50}}),
    )
    .await;
    assert_eq!(status, 200, "{report}");
    assert_eq!(report["table"]["columns"], json!(["n", "k", "risk", "se"]));
}
