//! Delegates satisfiability checks to an external solver process that reads
//! DIMACS on stdin, prints `v` model lines and exits with 10 (SAT) or 20
//! (UNSAT).

use std::io::Write;
use std::process::{Command, Stdio};

use crate::error::{Error, Result};
use crate::formula::{Assignment, Clause, Cnf, Literal, VarId};
use crate::parse::to_dimacs;

use super::{SatBackend, SatStatus, SolveResult};

#[derive(Debug, Clone)]
pub struct ExternalSolver {
    program: String,
    args: Vec<String>,
}

impl ExternalSolver {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ExternalSolver {
            program: program.into(),
            args,
        }
    }

    /// Splits a command line on whitespace into program and arguments.
    pub fn from_command_line(cmd: &str) -> Result<Self> {
        let (program, args) = split_command(cmd)?;
        Ok(Self::new(program, args))
    }
}

pub(crate) fn split_command(cmd: &str) -> Result<(String, Vec<String>)> {
    let mut parts = cmd.split_whitespace().map(str::to_owned);
    let program = parts
        .next()
        .ok_or_else(|| Error::External("empty command".into()))?;
    Ok((program, parts.collect()))
}

/// Runs `program args…` with `input` on stdin, returning exit code and stdout.
pub(crate) fn run_process(program: &str, args: &[String], input: &str) -> Result<(i32, String)> {
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::External(format!("cannot start `{program}`: {e}")))?;
    child
        .stdin
        .take()
        .expect("stdin is piped")
        .write_all(input.as_bytes())?;
    let output = child.wait_with_output()?;
    let code = output
        .status
        .code()
        .ok_or_else(|| Error::External(format!("`{program}` terminated by a signal")))?;
    let stdout = String::from_utf8(output.stdout)
        .map_err(|_| Error::External(format!("`{program}` wrote non-UTF-8 output")))?;
    Ok((code, stdout))
}

/// Parses the literals of every `v` line.
pub(crate) fn parse_value_lines(stdout: &str) -> Result<Vec<Literal>> {
    let mut lits = Vec::new();
    for line in stdout.lines().filter_map(|l| l.trim().strip_prefix('v')) {
        for tok in line.split_whitespace() {
            let n: i32 = tok
                .parse()
                .map_err(|_| Error::External(format!("bad literal `{tok}` in model")))?;
            if n != 0 {
                lits.push(Literal::from_dimacs(n).expect("non-zero"));
            }
        }
    }
    Ok(lits)
}

impl SatBackend for ExternalSolver {
    fn solve(&mut self, cnf: &Cnf, assumptions: &[Literal]) -> Result<SolveResult> {
        let mut with_units = cnf.clone();
        for &a in assumptions {
            with_units.add_clause(Clause::unit(a));
        }
        let (code, stdout) = run_process(&self.program, &self.args, &to_dimacs(&with_units))?;
        match code {
            10 => {
                let mut model: Assignment = (1..=with_units.num_vars)
                    .map(|i| (VarId::from_index(i), false))
                    .collect();
                for lit in parse_value_lines(&stdout)? {
                    if lit.var.index() <= with_units.num_vars {
                        model.set(lit.var, !lit.negated);
                    }
                }
                if !with_units.is_satisfied_by(&model) {
                    return Err(Error::External(
                        "solver reported SAT with a non-satisfying model".into(),
                    ));
                }
                Ok(SolveResult {
                    status: SatStatus::Sat,
                    model: Some(model),
                })
            }
            20 => Ok(SolveResult {
                status: SatStatus::Unsat,
                model: None,
            }),
            other => Err(Error::External(format!(
                "`{}` exited with unexpected code {other}",
                self.program
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lines() {
        let lits = parse_value_lines("s SATISFIABLE\nv 1 -2\nv 3 0\n").unwrap();
        assert_eq!(
            lits.iter().map(|l| l.to_dimacs()).collect::<Vec<_>>(),
            vec![1, -2, 3]
        );
    }

    #[test]
    fn missing_program_is_external_error() {
        let mut s = ExternalSolver::new("/nonexistent/solver", vec![]);
        let err = s.solve(&Cnf::new(0), &[]).unwrap_err();
        assert!(matches!(err, Error::External(_)));
    }

    #[test]
    fn empty_command_rejected() {
        assert!(ExternalSolver::from_command_line("   ").is_err());
    }
}
