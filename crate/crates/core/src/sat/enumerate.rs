use crate::budget::Budget;
use crate::error::Result;
use crate::formula::{Assignment, Literal, ProjectedFormula, VarId};

use super::solver::{SatStatus, Solver};

/// Distinct projected models found by blocking-clause enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Enumeration {
    pub models: Vec<Assignment>,
    /// True when more than `limit` projected models exist.
    pub overflow: bool,
}

impl Enumeration {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

/// Enumerates the models of `pf` projected on its projection set: solve,
/// record the projection, block exactly that projection, repeat.
///
/// At most `limit` models are returned; if another exists, `overflow` is
/// set. Every solver call is charged to `budget`.
pub fn enumerate_projected(
    pf: &ProjectedFormula,
    limit: Option<usize>,
    budget: &Budget,
) -> Result<Enumeration> {
    let mut solver = Solver::from_cnf(&pf.cnf);
    solver.set_deadline(budget.deadline());
    let projection = pf.projection_vec();
    enumerate_projected_with(&mut solver, &projection, &[], None, limit, budget)
}

/// Enumeration on an existing solver. When `activation` is given, every
/// blocking clause is guarded by its negation and the literal is assumed
/// during the search, so the caller can later retire the blocking clauses
/// by adding the unit `!activation`.
pub fn enumerate_projected_with(
    solver: &mut Solver,
    projection: &[VarId],
    assumptions: &[Literal],
    activation: Option<Literal>,
    limit: Option<usize>,
    budget: &Budget,
) -> Result<Enumeration> {
    let mut assumed = assumptions.to_vec();
    assumed.extend(activation);
    let mut out = Enumeration::default();
    loop {
        budget.charge()?;
        if solver.solve_with(&assumed)? == SatStatus::Unsat {
            return Ok(out);
        }
        if limit.is_some_and(|l| out.models.len() >= l) {
            out.overflow = true;
            return Ok(out);
        }
        let model: Assignment = projection
            .iter()
            .map(|&v| (v, solver.model_value(v).unwrap_or(false)))
            .collect();
        let mut block: Vec<Literal> = model.iter().map(|(v, b)| v.literal(!b)).collect();
        block.extend(activation.map(|a| !a));
        out.models.push(model);
        if !solver.add_clause(&block) {
            return Ok(out);
        }
    }
}
