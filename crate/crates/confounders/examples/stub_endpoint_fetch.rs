//! Fetch scores over real HTTP against an in-process stub endpoint,
//! demonstrating the chat-completions wire format without an API key or
//! network access.
//!
//! The stub answers `POST /chat/completions` with a likelihood derived
//! from the prompt it received; point `--provider-url` at any
//! OpenAI-compatible service to do this for real.
//!
//! ```bash
//! cargo run -p confounders --example stub_endpoint_fetch
//! ```

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;

use confounders::dataset::load_dataset;
use confounders::llm::{fetch_scores, Condition, ProviderConfig, ScoreStore};

/// Serve `n_requests` chat-completions requests, then exit.
fn serve_stub(listener: TcpListener, n_requests: usize) {
    for stream in listener.incoming().take(n_requests) {
        let Ok(mut stream) = stream else { continue };
        let mut reader = BufReader::new(stream.try_clone().expect("clone stream"));
        let mut content_length = 0usize;
        loop {
            let mut line = String::new();
            if reader.read_line(&mut line).unwrap_or(0) == 0 {
                return;
            }
            let line = line.trim_end().to_ascii_lowercase();
            if line.is_empty() {
                break;
            }
            if let Some(v) = line.strip_prefix("content-length:") {
                content_length = v.trim().parse().unwrap_or(0);
            }
        }
        let mut body = vec![0u8; content_length];
        if reader.read_exact(&mut body).is_err() {
            return;
        }
        let request: serde_json::Value = serde_json::from_slice(&body).unwrap_or_default();
        let prompt = request["messages"][0]["content"].as_str().unwrap_or("");

        // a toy "model": likelihood from the prompt's BMI value
        let bmi: f64 = prompt
            .lines()
            .find_map(|l| l.trim().strip_prefix("- BMI: "))
            .and_then(|rest| rest.split_whitespace().next())
            .and_then(|v| v.parse().ok())
            .unwrap_or(25.0);
        let likelihood = 1.0 / (1.0 + (-(bmi - 27.0) / 5.0f64).exp());
        let content = format!("The estimated likelihood is {likelihood:.3}.");

        let reply_body = serde_json::json!({
            "choices": [{"message": {"role": "assistant", "content": content}}]
        })
        .to_string();
        let response = format!(
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply_body}",
            reply_body.len()
        );
        let _ = stream.write_all(response.as_bytes());
    }
}

fn main() -> confounders::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/coimbra.csv");
    let full = load_dataset(path)?;
    // keep the demo small: first six patients
    let dataset = confounders::Dataset::from_records(
        full.records()[..6]
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, mut r)| {
                r.id = i;
                r
            })
            .collect(),
    )?;

    let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub");
    let endpoint = format!("http://{}", listener.local_addr().unwrap());
    let n_requests = dataset.len() * Condition::ALL.len();
    let server = std::thread::spawn(move || serve_stub(listener, n_requests));

    std::env::set_var("STUB_DEMO_KEY", "local-demo-key");
    let provider = ProviderConfig {
        api_key_env: "STUB_DEMO_KEY".to_string(),
        max_concurrent: 3,
        ..ProviderConfig::new(&endpoint, "stub-bmi-model")
    };

    let cache_dir = tempfile::tempdir().expect("temp dir");
    let cache_path = cache_dir.path().join("scores.jsonl");
    let mut store = ScoreStore::open(&cache_path)?;
    let report = fetch_scores(&dataset, &Condition::ALL, &provider, &mut store)?;
    server.join().expect("stub server");

    println!(
        "fetched {} scores from {endpoint} ({} retries)\n",
        report.fetched, report.retries
    );
    println!("cached scores (patient, condition, value, raw response):");
    for score in store.iter() {
        println!(
            "  ({}, {:<13}) {:.3}  {:?}",
            score.patient_id,
            score.condition.to_string(),
            score.value,
            score.raw_response
        );
    }
    Ok(())
}
