use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    WilksIndividual,
    WilksAggregated,
    Anova,
    Friedman,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::WilksIndividual,
        Method::WilksAggregated,
        Method::Anova,
        Method::Friedman,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::WilksIndividual => "wilks-individual",
            Method::WilksAggregated => "wilks-aggregated",
            Method::Anova => "anova",
            Method::Friedman => "friedman",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown method {s:?} (expected one of wilks-individual, wilks-aggregated, anova, friedman)"
                ))
            })
    }
}

/// Per-group decision; the integer codes are those of the rejection matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Fail,
    Reject,
    TrivialZero,
    NotTestable,
}

impl Decision {
    pub fn code(self) -> u8 {
        match self {
            Decision::Fail => 0,
            Decision::Reject => 1,
            Decision::TrivialZero => 2,
            Decision::NotTestable => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Decision::Fail),
            1 => Some(Decision::Reject),
            2 => Some(Decision::TrivialZero),
            3 => Some(Decision::NotTestable),
            _ => None,
        }
    }
}

/// Result of one method on one group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub group_id: usize,
    pub method: Method,
    #[serde(with = "extended_float")]
    pub statistic: f64,
    /// Degrees of freedom; the numerator df for ANOVA.
    pub df: usize,
    /// Denominator df, ANOVA only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub df2: Option<usize>,
    pub p_value: Option<f64>,
    pub decision: Decision,
    /// Fraction of graphs rejecting the group, for averaged individual tests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejection_rate: Option<f64>,
}

impl TestOutcome {
    pub(crate) fn not_testable(group_id: usize, method: Method) -> Self {
        TestOutcome {
            group_id,
            method,
            statistic: 0.0,
            df: 0,
            df2: None,
            p_value: None,
            decision: Decision::NotTestable,
            rejection_rate: None,
        }
    }

    pub(crate) fn trivial_zero(group_id: usize, method: Method, df: usize) -> Self {
        TestOutcome {
            decision: Decision::TrivialZero,
            df,
            ..Self::not_testable(group_id, method)
        }
    }

    /// A computed test awaiting its multiple-testing decision (`Fail` until then).
    pub(crate) fn tested(group_id: usize, method: Method, statistic: f64, df: usize, df2: Option<usize>, p: f64) -> Self {
        TestOutcome {
            group_id,
            method,
            statistic,
            df,
            df2,
            p_value: Some(p.clamp(0.0, 1.0)),
            decision: Decision::Fail,
            rejection_rate: None,
        }
    }

    /// Has a p-value and so takes part in the multiple-testing step.
    pub fn is_tested(&self) -> bool {
        self.p_value.is_some()
    }
}

/// One point of a p-profile: the `rank`-th smallest p-value and the BH line there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub p: f64,
    pub bh_line: f64,
}

/// Writes non-finite floats as the strings `"inf"`, `"-inf"` and `"nan"`.
pub(crate) mod extended_float {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("invalid number {other:?}"))),
            },
        }
    }
}
