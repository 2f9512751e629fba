//! Prompt template and response parsing.

use regex::Regex;
use std::sync::OnceLock;

use crate::dataset::PatientRecord;
use crate::error::{Error, Result};

use super::Condition;

/// Build the per-(patient, condition) prompt. Pure: identical inputs give
/// byte-identical text.
pub fn build_prompt(patient: &PatientRecord, condition: Condition) -> String {
    format!(
        "You are a clinical risk assessment assistant. Based on a patient's routine \
         blood test results, estimate the likelihood that the patient has {name}.\n\
         \n\
         Patient clinical features:\n\
         - Age: {age} years\n\
         - BMI: {bmi} kg/m2\n\
         - Glucose: {glucose} mg/dL\n\
         - Insulin: {insulin} uU/mL\n\
         - HOMA: {homa} (insulin-resistance index)\n\
         - Leptin: {leptin} ng/mL\n\
         - Adiponectin: {adiponectin} ug/mL\n\
         - Resistin: {resistin} ng/mL\n\
         - MCP-1: {mcp1} pg/dL\n\
         \n\
         Respond with a single decimal number between 0 and 1 giving the likelihood \
         that this patient has {name}. Output only the number, with no other text.",
        name = condition.full_name(),
        age = patient.age,
        bmi = patient.bmi,
        glucose = patient.glucose,
        insulin = patient.insulin,
        homa = patient.homa,
        leptin = patient.leptin,
        adiponectin = patient.adiponectin,
        resistin = patient.resistin,
        mcp1 = patient.mcp1,
    )
}

fn number_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?").unwrap())
}

/// Extract the first decimal-number token and require it to lie in [0, 1].
pub fn parse_score(text: &str) -> Result<f64> {
    let m = number_regex()
        .find(text)
        .ok_or_else(|| Error::NoNumberFound {
            raw: text.to_string(),
        })?;
    let value: f64 = m.as_str().parse().map_err(|_| Error::NoNumberFound {
        raw: text.to_string(),
    })?;
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            value,
            raw: text.to_string(),
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Label;

    fn patient() -> PatientRecord {
        PatientRecord {
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
        }
    }

    #[test]
    fn prompt_contains_features_condition_and_format_rule() {
        let p = build_prompt(&patient(), Condition::Diabetes);
        assert!(p.contains("BMI: 23.5"));
        assert!(p.contains("Type-2 Diabetes"));
        assert!(p.contains("between 0 and 1"));
        assert!(p.contains("Age: 48 years"));
        assert!(p.contains("MCP-1: 417.114 pg/dL"));
    }

    #[test]
    fn prompts_differ_only_in_condition_clause() {
        let a = build_prompt(&patient(), Condition::Obesity);
        let b = build_prompt(&patient(), Condition::Diabetes);
        assert_ne!(a, b);
        assert_eq!(
            a.replace("Obesity", "<cond>"),
            b.replace("Type-2 Diabetes", "<cond>")
        );
    }

    #[test]
    fn prompt_is_pure() {
        assert_eq!(
            build_prompt(&patient(), Condition::Cvd),
            build_prompt(&patient(), Condition::Cvd)
        );
    }

    #[test]
    fn parses_bare_number() {
        assert_eq!(parse_score("0.73").unwrap(), 0.73);
    }

    #[test]
    fn parses_first_number_in_sentence() {
        assert_eq!(parse_score("The likelihood is 0.85.").unwrap(), 0.85);
    }

    #[test]
    fn rejects_out_of_range() {
        match parse_score("1.2") {
            Err(Error::OutOfRange { value, .. }) => assert_eq!(value, 1.2),
            other => panic!("expected OutOfRange, got {other:?}"),
        }
        assert!(matches!(
            parse_score("the answer is -0.2"),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_text_without_numbers() {
        match parse_score("I cannot answer that.") {
            Err(Error::NoNumberFound { raw }) => assert!(raw.contains("cannot")),
            other => panic!("expected NoNumberFound, got {other:?}"),
        }
    }

    #[test]
    fn accepts_leading_dot_and_boundaries() {
        assert_eq!(parse_score("likelihood: .9").unwrap(), 0.9);
        assert_eq!(parse_score("0").unwrap(), 0.0);
        assert_eq!(parse_score("1").unwrap(), 1.0);
    }
}
