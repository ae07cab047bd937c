//! Satisfiability checking, model production and projected enumeration.

mod enumerate;
pub mod external;
mod solver;

pub use enumerate::{enumerate_projected, enumerate_projected_with, Enumeration};
pub use external::ExternalSolver;
pub use solver::{SatStatus, Solver, SolverStats};

use crate::error::Result;
use crate::formula::{Assignment, Cnf, Literal};

/// Result of a satisfiability query. `model` is present iff `status` is
/// `Sat`, and then binds every variable `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SatStatus,
    pub model: Option<Assignment>,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        self.status == SatStatus::Sat
    }
}

/// Something that can decide a CNF under assumptions.
pub trait SatBackend {
    fn solve(&mut self, cnf: &Cnf, assumptions: &[Literal]) -> Result<SolveResult>;
}

/// The built-in CDCL engine as a one-shot backend.
#[derive(Debug, Default, Clone, Copy)]
pub struct InternalSolver;

impl SatBackend for InternalSolver {
    fn solve(&mut self, cnf: &Cnf, assumptions: &[Literal]) -> Result<SolveResult> {
        solve(cnf, assumptions)
    }
}

/// Decides `cnf` under `assumptions` with a fresh internal solver.
pub fn solve(cnf: &Cnf, assumptions: &[Literal]) -> Result<SolveResult> {
    let mut solver = Solver::from_cnf(cnf);
    solver.ensure_vars(cnf.num_vars);
    let status = solver.solve_with(assumptions)?;
    let model = (status == SatStatus::Sat).then(|| solver.model());
    Ok(SolveResult { status, model })
}
