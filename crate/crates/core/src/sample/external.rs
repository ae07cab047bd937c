use rand::RngCore;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::formula::{Assignment, Literal, ProjectedFormula};
use crate::parse::to_projected_dimacs;
use crate::sat::external::{run_process, split_command};
use crate::sat::{SatStatus, Solver};

use super::{SampleResult, Sampler};

/// Runs an external sampler: DIMACS with a `c ind` line on stdin, one
/// projected model per output line as DIMACS literals (optionally prefixed
/// by `v`, optionally `0`-terminated). The first line is used. Exit code 20
/// or an empty output means the formula is unsatisfiable.
///
/// The draw is checked: it must bind every projection variable and extend
/// to a model of the formula.
#[derive(Debug, Clone)]
pub struct ExternalSampler {
    program: String,
    args: Vec<String>,
}

impl ExternalSampler {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ExternalSampler {
            program: program.into(),
            args,
        }
    }

    pub fn from_command_line(cmd: &str) -> Result<Self> {
        let (program, args) = split_command(cmd)?;
        Ok(Self::new(program, args))
    }
}

pub(crate) fn parse_model_line(line: &str) -> Result<Vec<Literal>> {
    let body = line.trim().trim_start_matches('v');
    body.split_whitespace()
        .map(|tok| {
            tok.parse::<i32>()
                .map_err(|_| Error::External(format!("bad literal `{tok}` in sample")))
        })
        .filter(|r| !matches!(r, Ok(0)))
        .map(|r| r.map(|n| Literal::from_dimacs(n).expect("non-zero")))
        .collect()
}

impl Sampler for ExternalSampler {
    fn sample(
        &mut self,
        pf: &ProjectedFormula,
        _epsilon_s: f64,
        _rng: &mut dyn RngCore,
        budget: &Budget,
    ) -> Result<SampleResult> {
        budget.check_deadline()?;
        let (code, stdout) = run_process(&self.program, &self.args, &to_projected_dimacs(pf))?;
        let line = stdout
            .lines()
            .find(|l| !l.trim().is_empty() && !l.starts_with('c'));
        let line = match (code, line) {
            (20, _) | (0 | 10, None) => return Err(Error::Unsatisfiable),
            (0 | 10, Some(l)) => l,
            (other, _) => {
                return Err(Error::External(format!(
                    "`{}` exited with code {other}",
                    self.program
                )))
            }
        };
        let assignment: Assignment = parse_model_line(line)?
            .iter()
            .filter(|l| pf.projection.contains(&l.var))
            .map(|l| (l.var, !l.negated))
            .collect();
        if !assignment.is_total_over(&pf.projection) {
            return Err(Error::External(
                "sample does not bind every projection variable".into(),
            ));
        }
        let before = budget.sat_calls();
        budget.charge()?;
        let mut solver = Solver::from_cnf(&pf.cnf);
        let lits: Vec<Literal> = assignment.literals().collect();
        if solver.solve_with(&lits)? != SatStatus::Sat {
            return Err(Error::External("sample is not a projected model".into()));
        }
        Ok(SampleResult {
            assignment,
            calls: budget.sat_calls() - before,
        })
    }

    fn name(&self) -> &'static str {
        "external"
    }
}
