//! OpenAI-compatible chat-completions client and the fetch loop that fills
//! a [`ScoreStore`].
//!
//! Wire shape: `POST <endpoint>/chat/completions` with body
//! `{"model": ..., "temperature": ..., "messages": [{"role": "user",
//! "content": ...}]}`, `Authorization: Bearer <key>`; the score is parsed
//! from `choices[0].message.content`.

use std::sync::atomic::{AtomicBool, AtomicU32, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, PatientRecord};
use crate::error::{Error, Result};

use super::{build_prompt, parse_score, Condition, LikelihoodScore, ProviderConfig, ScoreStore};

/// Anything that can answer a scoring prompt. Implemented by the live HTTP
/// client and by the offline mock.
pub trait ScoreProvider: Sync {
    fn model_id(&self) -> &str;

    /// Return the raw response text for one (patient, condition) request.
    fn complete(
        &self,
        prompt: &str,
        patient: &PatientRecord,
        condition: Condition,
    ) -> Result<String>;
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    temperature: f64,
    messages: Vec<ChatMessage<'a>>,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatChoiceMessage,
}

#[derive(Deserialize)]
struct ChatChoiceMessage {
    content: String,
}

/// Blocking HTTP client for one provider endpoint.
pub struct ChatClient {
    config: ProviderConfig,
    api_key: String,
    http: reqwest::blocking::Client,
    url: String,
}

impl ChatClient {
    /// Reads the API key from the environment variable named in the config.
    pub fn new(config: ProviderConfig) -> Result<Self> {
        config.validate()?;
        let api_key = std::env::var(&config.api_key_env)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| Error::MissingApiKey {
                name: config.api_key_env.clone(),
            })?;
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()?;
        let url = format!("{}/chat/completions", config.endpoint.trim_end_matches('/'));
        Ok(ChatClient {
            config,
            api_key,
            http,
            url,
        })
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }
}

impl ScoreProvider for ChatClient {
    fn model_id(&self) -> &str {
        &self.config.model_id
    }

    fn complete(
        &self,
        prompt: &str,
        _patient: &PatientRecord,
        _condition: Condition,
    ) -> Result<String> {
        let body = ChatRequest {
            model: &self.config.model_id,
            temperature: self.config.temperature,
            messages: vec![ChatMessage {
                role: "user",
                content: prompt,
            }],
        };
        let response = self
            .http
            .post(&self.url)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()?;
        let status = response.status();
        if !status.is_success() {
            let text = response.text().unwrap_or_default();
            return Err(Error::InvalidParam {
                reason: format!("HTTP {status}: {text}"),
            });
        }
        let parsed: ChatResponse = response.json()?;
        let choice = parsed
            .choices
            .into_iter()
            .next()
            .ok_or(Error::InvalidParam {
                reason: "response has no choices".to_string(),
            })?;
        Ok(choice.message.content)
    }
}

/// Outcome counters for one fetch run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FetchReport {
    /// Pairs that were missing when the run started.
    pub requested: usize,
    /// Pairs fetched and persisted by this run.
    pub fetched: usize,
    /// Retries performed across all pairs.
    pub retries: u32,
}

/// Fill `store` with every missing (patient, condition) score using a live
/// endpoint. Already-cached pairs are never re-requested.
pub fn fetch_scores(
    dataset: &Dataset,
    conditions: &[Condition],
    provider: &ProviderConfig,
    store: &mut ScoreStore,
) -> Result<FetchReport> {
    let client = ChatClient::new(provider.clone())?;
    fetch_scores_with(
        dataset,
        conditions,
        &client,
        provider.max_retries,
        provider.max_concurrent,
        store,
    )
}

/// Fetch loop over any [`ScoreProvider`]. Issues at most `max_concurrent`
/// requests in flight; each completed score is appended to the store before
/// the next is started on that worker, so partial progress is persisted
/// even when the run ultimately fails. The final store contents do not
/// depend on completion order.
pub fn fetch_scores_with(
    dataset: &Dataset,
    conditions: &[Condition],
    provider: &dyn ScoreProvider,
    max_retries: u32,
    max_concurrent: usize,
    store: &mut ScoreStore,
) -> Result<FetchReport> {
    let model_id = provider.model_id().to_string();
    let work = store.missing_for(dataset, conditions, &model_id);
    let report_requested = work.len();
    if work.is_empty() {
        return Ok(FetchReport::default());
    }

    let next = AtomicUsize::new(0);
    let cancelled = AtomicBool::new(false);
    let retries = AtomicU32::new(0);
    let fetched = AtomicUsize::new(0);
    let store_lock = Mutex::new(store);
    let first_error: Mutex<Option<Error>> = Mutex::new(None);
    let workers = max_concurrent.max(1).min(work.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if cancelled.load(Ordering::SeqCst) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(patient_id, condition)) = work.get(i) else {
                    break;
                };
                let patient = &dataset.records()[patient_id];
                let prompt = build_prompt(patient, condition);

                let mut attempt = 0u32;
                let outcome = loop {
                    let result = provider
                        .complete(&prompt, patient, condition)
                        .and_then(|raw| parse_score(&raw).map(|value| (raw, value)));
                    match result {
                        Ok(ok) => break Ok(ok),
                        Err(e) => {
                            attempt += 1;
                            if attempt > max_retries {
                                break Err(Error::RequestFailed {
                                    patient_id,
                                    condition,
                                    attempts: attempt,
                                    message: e.to_string(),
                                });
                            }
                            retries.fetch_add(1, Ordering::SeqCst);
                            log::warn!(
                                "retry {attempt}/{max_retries} for patient {patient_id}, {condition}: {e}"
                            );
                            std::thread::sleep(backoff(attempt));
                        }
                    }
                };

                match outcome {
                    Ok((raw, value)) => {
                        let score = LikelihoodScore {
                            patient_id,
                            condition,
                            value,
                            model_id: model_id.clone(),
                            raw_response: raw,
                        };
                        let insert = store_lock.lock().unwrap().insert(score);
                        match insert {
                            Ok(()) => {
                                fetched.fetch_add(1, Ordering::SeqCst);
                            }
                            Err(e) => {
                                first_error.lock().unwrap().get_or_insert(e);
                                cancelled.store(true, Ordering::SeqCst);
                                break;
                            }
                        }
                    }
                    Err(e) => {
                        first_error.lock().unwrap().get_or_insert(e);
                        cancelled.store(true, Ordering::SeqCst);
                        break;
                    }
                }
            });
        }
    });

    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }
    Ok(FetchReport {
        requested: report_requested,
        fetched: fetched.into_inner(),
        retries: retries.into_inner(),
    })
}

fn backoff(attempt: u32) -> Duration {
    let ms = 100u64.saturating_mul(1 << attempt.min(5));
    Duration::from_millis(ms.min(2_000))
}
