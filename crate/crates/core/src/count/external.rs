use num_bigint::BigUint;
use num_traits::FromPrimitive;
use rand::RngCore;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::formula::ProjectedFormula;
use crate::parse::to_projected_dimacs;
use crate::sat::external::{run_process, split_command};

use super::{check_tolerances, CountResult, Counter};

/// Runs an external projected counter: DIMACS with a `c ind` line on
/// stdin, a single number on stdout. The process is trusted to honour the
/// requested tolerance.
#[derive(Debug, Clone)]
pub struct ExternalCounter {
    program: String,
    args: Vec<String>,
}

impl ExternalCounter {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ExternalCounter {
            program: program.into(),
            args,
        }
    }

    pub fn from_command_line(cmd: &str) -> Result<Self> {
        let (program, args) = split_command(cmd)?;
        Ok(Self::new(program, args))
    }
}

/// The last whitespace-separated token that reads as a non-negative number.
pub(crate) fn parse_count(stdout: &str) -> Result<BigUint> {
    for tok in stdout.split_whitespace().rev() {
        if let Ok(n) = tok.parse::<BigUint>() {
            return Ok(n);
        }
        if let Ok(x) = tok.parse::<f64>() {
            if x.is_finite() && x >= 0.0 {
                return Ok(BigUint::from_f64(x.round()).expect("finite non-negative"));
            }
        }
    }
    Err(Error::External("counter printed no count".into()))
}

impl Counter for ExternalCounter {
    fn count(
        &mut self,
        pf: &ProjectedFormula,
        epsilon: f64,
        delta: f64,
        _rng: &mut dyn RngCore,
        budget: &Budget,
    ) -> Result<CountResult> {
        check_tolerances(epsilon, delta)?;
        budget.check_deadline()?;
        let (code, stdout) = run_process(&self.program, &self.args, &to_projected_dimacs(pf))?;
        if code != 0 {
            return Err(Error::External(format!(
                "`{}` exited with code {code}",
                self.program
            )));
        }
        Ok(CountResult {
            count: parse_count(&stdout)?,
            exact: false,
            epsilon,
            delta,
            calls: 0,
        })
    }

    fn name(&self) -> &'static str {
        "external"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_formats() {
        assert_eq!(
            parse_count("c done\ns mc 42\n").unwrap(),
            BigUint::from(42u32)
        );
        assert_eq!(parse_count("1.5e3").unwrap(), BigUint::from(1500u32));
        assert_eq!(
            parse_count("123456789012345678901234567890")
                .unwrap()
                .to_string(),
            "123456789012345678901234567890"
        );
        assert!(parse_count("nothing here").is_err());
    }
}
