use crate::error::{Error, Result};

/// `s = 4 ln(2/δ)(1+ε)/ε²`.
pub fn stopping_threshold(epsilon: f64, delta: f64) -> f64 {
    4.0 * (2.0 / delta).ln() * (1.0 + epsilon) / (epsilon * epsilon)
}

/// Running state of the stopping rule: add draws in `[0,1]` until their sum
/// reaches `s`, then estimate the mean as `s/t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    threshold: f64,
    t: u64,
    x: f64,
}

impl StoppingRule {
    pub fn new(threshold: f64) -> Self {
        StoppingRule {
            threshold,
            t: 0,
            x: 0.0,
        }
    }

    pub fn for_tolerance(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 2.0) {
            return Err(Error::Parameter(format!(
                "epsilon must lie in (0, 2], got {epsilon}"
            )));
        }
        if delta.is_nan() || delta <= 0.0 {
            return Err(Error::Parameter(format!(
                "delta must be positive, got {delta}"
            )));
        }
        Ok(Self::new(stopping_threshold(epsilon, delta)))
    }

    pub fn is_done(&self) -> bool {
        self.x >= self.threshold
    }

    /// Adds one draw.
    pub fn push(&mut self, z: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::Parameter(format!(
                "stopping-rule draw {z} outside [0, 1]"
            )));
        }
        self.t += 1;
        self.x += z;
        Ok(())
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// `s/t`; meaningful once [`StoppingRule::is_done`].
    pub fn estimate(&self) -> f64 {
        self.threshold / self.t as f64
    }
}

/// Estimates the mean `μ > 0` of i.i.d. draws in `[0,1]`: with probability
/// above `1-δ` the result lies in `[μ(1-ε), μ(1+ε)]`. Returns the estimate
/// and the number of draws consumed. Never terminates if `μ = 0`.
pub fn stopping_rule<F>(epsilon: f64, delta: f64, mut next_rv: F) -> Result<(f64, u64)>
where
    F: FnMut() -> f64,
{
    let mut rule = StoppingRule::for_tolerance(epsilon, delta)?;
    while !rule.is_done() {
        rule.push(next_rv())?;
    }
    Ok((rule.estimate(), rule.t()))
}
