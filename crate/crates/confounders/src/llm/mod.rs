//! Condition-likelihood scoring: prompt construction, an OpenAI-compatible
//! chat-completions client, response parsing, a JSON-lines score cache, and
//! a deterministic offline mock provider.

mod client;
mod mock;
mod prompt;
mod store;

pub use client::{fetch_scores, fetch_scores_with, ChatClient, FetchReport, ScoreProvider};
pub use mock::{mock_provider, mock_score, MockClient, MOCK_MODEL_ID};
pub use prompt::{build_prompt, parse_score};
pub use store::ScoreStore;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The conditions scored per patient. The first three are the confounders;
/// breast cancer itself is scored as a benchmark feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    Diabetes,
    Obesity,
    #[serde(rename = "CVD")]
    Cvd,
    BreastCancer,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::Diabetes,
        Condition::Obesity,
        Condition::Cvd,
        Condition::BreastCancer,
    ];

    pub const CONFOUNDERS: [Condition; 3] =
        [Condition::Diabetes, Condition::Obesity, Condition::Cvd];

    /// Name used in prompts.
    pub fn full_name(self) -> &'static str {
        match self {
            Condition::Diabetes => "Type-2 Diabetes",
            Condition::Obesity => "Obesity",
            Condition::Cvd => "Cardiovascular Disease",
            Condition::BreastCancer => "Breast Cancer",
        }
    }

    /// Stable lowercase token used in CLI arguments and file names.
    pub fn token(self) -> &'static str {
        match self {
            Condition::Diabetes => "diabetes",
            Condition::Obesity => "obesity",
            Condition::Cvd => "cvd",
            Condition::BreastCancer => "breast-cancer",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Condition::Diabetes => "Diabetes",
            Condition::Obesity => "Obesity",
            Condition::Cvd => "CVD",
            Condition::BreastCancer => "BreastCancer",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "diabetes" => Ok(Condition::Diabetes),
            "obesity" => Ok(Condition::Obesity),
            "cvd" => Ok(Condition::Cvd),
            "breast-cancer" | "breastcancer" | "bc" => Ok(Condition::BreastCancer),
            other => Err(Error::InvalidParam {
                reason: format!("unknown condition {other:?}"),
            }),
        }
    }
}

/// One inferred probability for a (patient, condition) pair, with the
/// verbatim response retained for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodScore {
    pub patient_id: usize,
    pub condition: Condition,
    pub value: f64,
    pub model_id: String,
    pub raw_response: String,
}

/// Connection settings for an OpenAI-compatible chat-completions endpoint.
///
/// The API key is never stored here; `api_key_env` names the environment
/// variable it is read from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    /// Base URL; requests go to `<endpoint>/chat/completions`.
    pub endpoint: String,
    pub model_id: String,
    pub api_key_env: String,
    pub temperature: f64,
    pub max_retries: u32,
    pub timeout_secs: u64,
    pub max_concurrent: usize,
}

impl ProviderConfig {
    pub fn new(endpoint: impl Into<String>, model_id: impl Into<String>) -> Self {
        ProviderConfig {
            endpoint: endpoint.into(),
            model_id: model_id.into(),
            api_key_env: "OPENAI_API_KEY".to_string(),
            temperature: 0.0,
            max_retries: 3,
            timeout_secs: 30,
            max_concurrent: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::InvalidParam { reason });
        if self.temperature < 0.0 {
            return fail(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            ));
        }
        if self.max_concurrent < 1 {
            return fail("max_concurrent must be >= 1".to_string());
        }
        if self.endpoint.is_empty() {
            return fail("endpoint must not be empty".to_string());
        }
        Ok(())
    }
}
