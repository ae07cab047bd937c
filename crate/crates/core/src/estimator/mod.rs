//! Skolem function counting: the stopping-rule mean estimator, the
//! sampling-based approximate counter, the enumeration baseline and a
//! brute-force reference.

mod baseline;
mod brute;
mod params;
mod skolemfc;
mod stopping;

pub use baseline::{baseline, BaselineRun};
pub use brute::{brute_force_output_counts, brute_force_skolem_count, BRUTE_FORCE_MAX_INPUTS};
pub use params::{derive_params, ParamSet, EPS_C};
pub use skolemfc::{skolemfc, AbortCheck, Oracles, SkolemConfig, SkolemRun};
pub use stopping::{stopping_rule, stopping_threshold, StoppingRule};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::count::log2_big;
use crate::error::LimitKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    E,
    Two,
}

impl LogBase {
    /// Converts a base-2 logarithm into this base.
    pub fn from_log2(self, log2: f64) -> f64 {
        match self {
            LogBase::E => log2 * std::f64::consts::LN_2,
            LogBase::Two => log2,
        }
    }

    pub fn to_log2(self, value: f64) -> f64 {
        match self {
            LogBase::E => value / std::f64::consts::LN_2,
            LogBase::Two => value,
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::E => "e",
            LogBase::Two => "2",
        })
    }
}

impl FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "e" | "ln" => Ok(LogBase::E),
            "2" | "log2" => Ok(LogBase::Two),
            other => Err(format!("unknown log base `{other}` (expected `e` or `2`)")),
        }
    }
}

/// Logarithm of a Skolem-function count, optionally with the exact count.
#[derive(Debug, Clone, PartialEq)]
pub struct LogCount {
    pub value: f64,
    pub base: LogBase,
    pub exact: Option<BigUint>,
}

impl LogCount {
    pub fn from_log2(log2: f64, base: LogBase) -> Self {
        LogCount {
            value: base.from_log2(log2),
            base,
            exact: None,
        }
    }

    pub fn from_exact(count: BigUint, base: LogBase) -> Self {
        let log2 = log2_big(&count).max(0.0);
        LogCount {
            value: base.from_log2(log2),
            base,
            exact: Some(count),
        }
    }

    pub fn zero(base: LogBase) -> Self {
        Self::from_exact(BigUint::from(1u32), base)
    }

    pub fn log2(&self) -> f64 {
        self.base.to_log2(self.value)
    }

    pub fn ln(&self) -> f64 {
        LogBase::E.from_log2(self.log2())
    }
}

/// Counters collected over one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    /// Loop iterations (samples drawn).
    pub t: u64,
    /// Accumulated normalized log-counts.
    pub x: f64,
    pub sat_calls: u64,
    pub count_calls: u64,
    pub sample_calls: u64,
    /// Per-input counts that fell outside `[2, 2^m]` and were clamped.
    pub clamp_events: u64,
    pub wall_time_s: f64,
    pub aborted: Option<String>,
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Estimate(LogCount),
    /// The counting-error check failed; `estimate` is the value that would
    /// otherwise have been returned.
    Abort {
        estimate: LogCount,
    },
    Limit(LimitKind),
}

impl Outcome {
    pub fn estimate(&self) -> Option<&LogCount> {
        match self {
            Outcome::Estimate(e) => Some(e),
            _ => None,
        }
    }
}
