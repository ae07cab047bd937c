//! Formula constructions over a specification: the doubled formula whose
//! input projection is the set of inputs with two or more outputs, and
//! input cofactors.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::formula::{Assignment, Clause, Cnf, ProjectedFormula, Specification, VarId};

/// `F(X,Y) ∧ F(X,Y') ∧ (Y ≠ Y')`, projected on `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubledFormula {
    pub formula: ProjectedFormula,
    /// Each output variable mapped to its primed copy.
    pub y_map: BTreeMap<VarId, VarId>,
    /// One disequality selector per output bit.
    pub aux: BTreeSet<VarId>,
}

impl DoubledFormula {
    pub fn cnf(&self) -> &Cnf {
        &self.formula.cnf
    }
}

/// Number of clauses the disequality encoding adds for `m` outputs.
pub const fn disequality_clause_count(m: usize) -> usize {
    4 * m + 1
}

/// Copies `cnf`, replacing each variable of `vars` by a fresh variable.
/// Fresh variables are allocated contiguously above `cnf.num_vars`, in
/// increasing order of the variables they replace.
pub fn fresh_rename(cnf: &Cnf, vars: &BTreeSet<VarId>) -> (Cnf, BTreeMap<VarId, VarId>) {
    let mut renamed = Cnf::new(cnf.num_vars);
    let map: BTreeMap<VarId, VarId> = vars.iter().map(|&v| (v, renamed.fresh_var())).collect();
    for clause in &cnf.clauses {
        renamed.add_clause(
            clause
                .literals
                .iter()
                .map(|l| match map.get(&l.var) {
                    Some(&nv) => crate::formula::Literal::new(nv, l.negated),
                    None => *l,
                })
                .collect(),
        );
    }
    (renamed, map)
}

/// Builds the doubled formula. Its models projected on the inputs are
/// exactly the inputs admitting at least two distinct outputs.
pub fn build_g(spec: &Specification) -> DoubledFormula {
    let (primed, y_map) = fresh_rename(&spec.cnf, &spec.outputs);
    let mut cnf = Cnf::new(primed.num_vars);
    cnf.clauses.extend(spec.cnf.clauses.iter().cloned());
    cnf.clauses.extend(primed.clauses);

    let mut aux = BTreeSet::new();
    let mut any_differs = Vec::with_capacity(y_map.len());
    for (&y, &y2) in &y_map {
        let d = cnf.fresh_var();
        aux.insert(d);
        // d <-> (y xor y')
        cnf.add_literals([d.negative(), y.positive(), y2.positive()]);
        cnf.add_literals([d.negative(), y.negative(), y2.negative()]);
        cnf.add_literals([d.positive(), y.negative(), y2.positive()]);
        cnf.add_literals([d.positive(), y.positive(), y2.negative()]);
        any_differs.push(d.positive());
    }
    cnf.add_clause(Clause::new(any_differs));

    DoubledFormula {
        formula: ProjectedFormula::new(cnf, spec.inputs.clone()),
        y_map,
        aux,
    }
}

/// `F ∧ (X = σ)`: the specification's CNF with one unit clause per input.
pub fn cofactor(spec: &Specification, sigma: &Assignment) -> Result<Cnf> {
    if let Some(missing) = spec.inputs.iter().find(|v| sigma.get(**v).is_none()) {
        return Err(Error::PartialAssignment(missing.index()));
    }
    let mut cnf = spec.cnf.clone();
    for &x in &spec.inputs {
        let value = sigma.get(x).expect("checked above");
        cnf.add_clause(Clause::unit(x.literal(value)));
    }
    Ok(cnf)
}

/// The cofactor projected on the outputs; its projected count is
/// `|Sol_σ ↓ Y|`.
pub fn cofactor_on_outputs(spec: &Specification, sigma: &Assignment) -> Result<ProjectedFormula> {
    Ok(ProjectedFormula::new(
        cofactor(spec, sigma)?,
        spec.outputs.clone(),
    ))
}
