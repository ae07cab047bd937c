use crate::error::{Error, Result};

/// Tolerance of the per-input counting oracle, `4√2 − 1`.
pub const EPS_C: f64 = 4.0 * std::f64::consts::SQRT_2 - 1.0;

/// Oracle tolerances and confidences derived from the user's `(ε, δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    pub eps_f: f64,
    pub delta_f: f64,
    /// Stopping-rule threshold `s`.
    pub s_threshold: f64,
    pub eps_s: f64,
    pub delta_c: f64,
    pub eps_c: f64,
    pub eps_g: f64,
    pub delta_g: f64,
}

/// Splits the error budget: 60% of ε and 40% of δ to the stopping rule,
/// 20% of ε to sampling, 10% of ε and δ to counting the doubled formula,
/// and 40% of δ spread over the per-input counts.
pub fn derive_params(epsilon: f64, delta: f64, m: usize) -> Result<ParamSet> {
    if !(epsilon > 0.0 && epsilon <= 2.0) {
        return Err(Error::Parameter(format!(
            "epsilon must lie in (0, 2], got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if m == 0 {
        return Err(Error::Parameter("the specification has no outputs".into()));
    }
    let eps_f = 0.6 * epsilon;
    let delta_f = 0.4 * delta;
    let s_threshold = 4.0 * (2.0 / delta_f).ln() * (1.0 + eps_f) / (eps_f * eps_f);
    Ok(ParamSet {
        eps_f,
        delta_f,
        s_threshold,
        eps_s: 0.2 * epsilon,
        delta_c: 0.4 * delta / (m as f64 * s_threshold),
        eps_c: EPS_C,
        eps_g: 0.1 * epsilon,
        delta_g: 0.1 * delta,
    })
}
