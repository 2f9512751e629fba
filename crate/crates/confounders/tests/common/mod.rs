//! Shared test support: a scriptable chat-completions stub endpoint and a
//! synthetic cohort generator.

#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use confounders::dataset::{Dataset, Label, PatientRecord};
use confounders::llm::{mock_score, Condition};

/// One scripted stub reply.
#[derive(Debug, Clone)]
pub enum StubReply {
    /// 200 response whose `choices[0].message.content` is this text.
    Content(String),
    /// Bare HTTP status with an empty body.
    Status(u16),
}

/// Minimal HTTP/1.1 server emulating `POST /chat/completions`.
///
/// Replies are served in request order from the script; once the script is
/// exhausted every request gets `default_content`. Connections are handled
/// sequentially so scripted order is deterministic even with concurrent
/// clients.
pub struct StubServer {
    addr: std::net::SocketAddr,
    requests: Arc<Mutex<Vec<serde_json::Value>>>,
    served: Arc<AtomicUsize>,
    shutdown: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn start(script: Vec<StubReply>, default_content: &str) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
        let addr = listener.local_addr().unwrap();
        let requests: Arc<Mutex<Vec<serde_json::Value>>> = Arc::default();
        let served = Arc::new(AtomicUsize::new(0));
        let shutdown = Arc::new(AtomicBool::new(false));

        let script = Arc::new(Mutex::new(std::collections::VecDeque::from(script)));
        let default_content = default_content.to_string();
        let handle = {
            let requests = requests.clone();
            let served = served.clone();
            let shutdown = shutdown.clone();
            std::thread::spawn(move || {
                for stream in listener.incoming() {
                    if shutdown.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    if let Some(body) = read_request(&stream) {
                        requests.lock().unwrap().push(body);
                        served.fetch_add(1, Ordering::SeqCst);
                        let reply = script
                            .lock()
                            .unwrap()
                            .pop_front()
                            .unwrap_or_else(|| StubReply::Content(default_content.clone()));
                        write_reply(stream, &reply);
                    }
                }
            })
        };

        StubServer {
            addr,
            requests,
            served,
            shutdown,
            handle: Some(handle),
        }
    }

    /// Endpoint base URL to pass as `--provider-url`.
    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Requests served so far.
    pub fn request_count(&self) -> usize {
        self.served.load(Ordering::SeqCst)
    }

    /// Parsed JSON bodies of every request, in served order.
    pub fn request_bodies(&self) -> Vec<serde_json::Value> {
        self.requests.lock().unwrap().clone()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr); // unblock accept
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn read_request(stream: &TcpStream) -> Option<serde_json::Value> {
    let mut reader = BufReader::new(stream);
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).ok()? == 0 {
            return None;
        }
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some(v) = line
            .to_ascii_lowercase()
            .strip_prefix("content-length:")
            .map(|v| v.trim().to_string())
        {
            content_length = v.parse().ok()?;
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body).ok()?;
    serde_json::from_slice(&body).ok()
}

fn write_reply(mut stream: TcpStream, reply: &StubReply) {
    let (status, body) = match reply {
        StubReply::Content(content) => (
            "200 OK".to_string(),
            serde_json::json!({
                "choices": [{"message": {"role": "assistant", "content": content}}]
            })
            .to_string(),
        ),
        StubReply::Status(code) => (format!("{code} Stub Error"), String::new()),
    };
    let response = format!(
        "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    let _ = stream.write_all(response.as_bytes());
}

/// Synthetic cohort whose label depends on the mock confounder signals:
/// cancer when at least two of the three mock likelihoods exceed 0.55,
/// with 8% label noise.
pub fn synthetic_cohort(n: usize, seed: u64) -> Dataset {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let records: Vec<PatientRecord> = (0..n)
        .map(|i| {
            let age = rng.gen_range(25.0..80.0f64);
            let bmi = rng.gen_range(18.0..42.0f64);
            let glucose = rng.gen_range(70.0..160.0f64);
            let insulin = rng.gen_range(2.0..30.0f64);
            let homa = glucose / 18.0182 * insulin / 22.5;
            let leptin = (1.1 * bmi - 4.0 + rng.gen_range(-8.0..8.0)).clamp(4.0, 90.0);
            let adiponectin = rng.gen_range(2.0..30.0f64);
            let resistin = rng.gen_range(3.0..40.0f64);
            let mcp1 = rng.gen_range(50.0..1200.0f64);

            let mut record = PatientRecord {
                id: i,
                age,
                bmi,
                glucose,
                insulin,
                homa,
                leptin,
                adiponectin,
                resistin,
                mcp1,
                label: Label::Healthy,
            };
            let votes = confounders::llm::Condition::CONFOUNDERS
                .iter()
                .filter(|&&c| mock_score(&record, c) > 0.55)
                .count();
            let p_cancer = if votes >= 2 { 0.92 } else { 0.08 };
            record.label = if rng.gen_bool(p_cancer) {
                Label::Cancer
            } else {
                Label::Healthy
            };
            record
        })
        .collect();
    Dataset::from_records(records).unwrap()
}

/// Write a dataset to `dir/name` and return the path.
pub fn write_dataset_csv(
    dataset: &Dataset,
    dir: &std::path::Path,
    name: &str,
) -> std::path::PathBuf {
    let path = dir.join(name);
    confounders::dataset::write_csv(dataset, &path).unwrap();
    path
}

/// Path to the bundled Coimbra CSV, overridable via `COIMBRA_CSV`.
pub fn coimbra_path() -> std::path::PathBuf {
    if let Ok(p) = std::env::var("COIMBRA_CSV") {
        return p.into();
    }
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/coimbra.csv")
}

/// A two-patient dataset with valid measurements.
pub fn tiny_dataset() -> Dataset {
    let base = PatientRecord {
        id: 0,
        age: 48.0,
        bmi: 23.5,
        glucose: 70.0,
        insulin: 2.707,
        homa: 0.467408667,
        leptin: 8.8071,
        adiponectin: 9.7024,
        resistin: 7.99585,
        mcp1: 417.114,
        label: Label::Healthy,
    };
    let second = PatientRecord {
        id: 1,
        age: 62.0,
        bmi: 31.2,
        glucose: 118.0,
        insulin: 9.3,
        homa: 118.0 / 18.0182 * 9.3 / 22.5,
        label: Label::Cancer,
        ..base.clone()
    };
    Dataset::from_records(vec![base, second]).unwrap()
}

/// All four conditions for every patient, useful for stub scripting.
pub fn pair_count(dataset: &Dataset) -> usize {
    dataset.len() * Condition::ALL.len()
}
