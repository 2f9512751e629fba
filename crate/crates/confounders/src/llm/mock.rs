//! Offline mock provider: deterministic pseudo-likelihoods from fixed
//! logistic rules over the patient's own features. Enables end-to-end runs
//! with no network or API key.
//!
//! The rules (all values are fixed constants):
//!
//! - Obesity:      sigmoid(0.35 * (bmi - 30))
//! - Diabetes:     sigmoid(0.07 * (glucose - 100) + 0.50 * (homa - 2.5))
//! - CVD:          sigmoid(0.055 * (age - 55) + 0.12 * (bmi - 30))
//! - BreastCancer: sigmoid(0.045 * (glucose - 100) + 0.07 * (resistin - 15)
//!   + 0.02 * (bmi - 28) + 0.01 * (age - 57))

use crate::dataset::PatientRecord;
use crate::error::Result;

use super::{Condition, ScoreProvider};

/// Model identifier recorded for mock-generated scores.
pub const MOCK_MODEL_ID: &str = "mock-logistic-v1";

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// The underlying pseudo-likelihood, before wire formatting.
pub fn mock_score(patient: &PatientRecord, condition: Condition) -> f64 {
    match condition {
        Condition::Obesity => sigmoid(0.35 * (patient.bmi - 30.0)),
        Condition::Diabetes => {
            sigmoid(0.07 * (patient.glucose - 100.0) + 0.50 * (patient.homa - 2.5))
        }
        Condition::Cvd => sigmoid(0.055 * (patient.age - 55.0) + 0.12 * (patient.bmi - 30.0)),
        Condition::BreastCancer => sigmoid(
            0.045 * (patient.glucose - 100.0)
                + 0.07 * (patient.resistin - 15.0)
                + 0.02 * (patient.bmi - 28.0)
                + 0.01 * (patient.age - 57.0),
        ),
    }
}

/// Response text the mock "model" returns; parsed by the same path as live
/// responses.
pub fn mock_provider(patient: &PatientRecord, condition: Condition) -> String {
    format!("{:.9}", mock_score(patient, condition))
}

/// [`ScoreProvider`] wrapper around [`mock_provider`].
#[derive(Debug, Default, Clone, Copy)]
pub struct MockClient;

impl ScoreProvider for MockClient {
    fn model_id(&self) -> &str {
        MOCK_MODEL_ID
    }

    fn complete(
        &self,
        _prompt: &str,
        patient: &PatientRecord,
        condition: Condition,
    ) -> Result<String> {
        Ok(mock_provider(patient, condition))
    }
}
