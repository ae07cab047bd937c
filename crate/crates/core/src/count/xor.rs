//! Random parity constraints over a projection set, eliminated over GF(2)
//! and chain-encoded as clauses.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};

use crate::budget::Budget;
use crate::error::Result;
use crate::formula::{ProjectedFormula, VarId};
use crate::sat::{enumerate_projected_with, Enumeration, Solver};

/// `vars[0] ⊕ … ⊕ vars[r-1] = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorConstraint {
    pub vars: Vec<VarId>,
    pub rhs: bool,
}

impl XorConstraint {
    /// Each variable included with probability 1/2; uniform right-hand side.
    pub fn random(vars: &[VarId], rng: &mut dyn RngCore) -> Self {
        XorConstraint {
            vars: vars
                .iter()
                .copied()
                .filter(|_| rng.random_bool(0.5))
                .collect(),
            rhs: rng.random_bool(0.5),
        }
    }
}

/// Rows of a parity system over `n` variables as bitsets.
struct Gf2Rows {
    words: usize,
    rows: Vec<(Vec<u64>, bool)>,
}

impl Gf2Rows {
    fn new(n: usize) -> Self {
        Gf2Rows {
            words: n.div_ceil(64).max(1),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, bits: impl IntoIterator<Item = usize>, rhs: bool) {
        let mut row = vec![0u64; self.words];
        for i in bits {
            row[i / 64] ^= 1 << (i % 64);
        }
        self.rows.push((row, rhs));
    }

    /// Reduced row echelon form: each remaining row has a pivot no other
    /// row mentions. Returns `None` if the system is inconsistent.
    fn reduce(mut self) -> Option<Vec<(Vec<usize>, bool)>> {
        let mut done = 0;
        for col in 0..self.words * 64 {
            let (w, b) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (done..self.rows.len()).find(|&r| self.rows[r].0[w] & b != 0) else {
                continue;
            };
            self.rows.swap(done, p);
            let (pivot, prhs) = self.rows[done].clone();
            for (r, (row, rhs)) in self.rows.iter_mut().enumerate() {
                if r != done && row[w] & b != 0 {
                    row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
                    *rhs ^= prhs;
                }
            }
            done += 1;
        }
        if self.rows[done..].iter().any(|(_, rhs)| *rhs) {
            return None;
        }
        self.rows.truncate(done);
        Some(
            self.rows
                .into_iter()
                .map(|(row, rhs)| {
                    let cols = (0..self.words * 64)
                        .filter(|&c| row[c / 64] & (1 << (c % 64)) != 0)
                        .collect();
                    (cols, rhs)
                })
                .collect(),
        )
    }
}

/// A formula plus a stack of parity constraints; [`HashedSolver::cell`]
/// enumerates the models satisfying any prefix of the stack.
///
/// Each prefix is brought to reduced row echelon form before encoding, so
/// every constraint owns a variable no other constraint mentions and the
/// parity part alone never conflicts.
pub struct HashedSolver {
    formula: ProjectedFormula,
    projection: Vec<VarId>,
    xors: Vec<XorConstraint>,
    deadline: Option<std::time::Instant>,
}

impl HashedSolver {
    pub fn new(pf: &ProjectedFormula, xors: &[XorConstraint], budget: &Budget) -> Self {
        HashedSolver {
            formula: pf.clone(),
            projection: pf.projection_vec(),
            xors: xors.to_vec(),
            deadline: budget.deadline(),
        }
    }

    pub fn num_constraints(&self) -> usize {
        self.xors.len()
    }

    /// Enumerates the projected models satisfying the first `k`
    /// constraints, stopping after `limit`.
    pub fn cell(&mut self, k: usize, limit: Option<usize>, budget: &Budget) -> Result<Enumeration> {
        let index: BTreeMap<VarId, usize> = self
            .projection
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let mut system = Gf2Rows::new(self.projection.len());
        for xor in &self.xors[..k] {
            // variables outside the projection cannot be hashed on
            system.push(
                xor.vars.iter().filter_map(|v| index.get(v).copied()),
                xor.rhs,
            );
        }
        let Some(rows) = system.reduce() else {
            return Ok(Enumeration {
                models: Vec::new(),
                overflow: false,
            });
        };
        let mut solver = Solver::from_cnf(&self.formula.cnf);
        solver.ensure_vars(self.formula.cnf.num_vars);
        solver.set_deadline(self.deadline);
        let mut next_var = self.formula.cnf.num_vars;
        for (cols, rhs) in rows {
            // pivot is the first column; put it last so it is propagated
            let mut vars: Vec<VarId> = cols[1..].iter().map(|&c| self.projection[c]).collect();
            vars.push(self.projection[cols[0]]);
            let out = encode_parity(&mut solver, &mut next_var, &vars);
            solver.add_clause(&[out.literal(rhs)]);
        }
        enumerate_projected_with(&mut solver, &self.projection, &[], None, limit, budget)
    }
}

/// Chain encoding: `t_1 = v_1`, `t_j = t_{j-1} ⊕ v_j`. Returns a variable
/// equal to the parity of the non-empty `vars`.
fn encode_parity(solver: &mut Solver, next_var: &mut u32, vars: &[VarId]) -> VarId {
    let (&first, rest) = vars.split_first().expect("reduced rows are non-empty");
    let mut acc = first;
    for &v in rest {
        *next_var += 1;
        solver.ensure_vars(*next_var);
        let t = VarId::from_index(*next_var);
        solver.add_clause(&[t.negative(), acc.positive(), v.positive()]);
        solver.add_clause(&[t.negative(), acc.negative(), v.negative()]);
        solver.add_clause(&[t.positive(), acc.negative(), v.positive()]);
        solver.add_clause(&[t.positive(), acc.positive(), v.negative()]);
        acc = t;
    }
    acc
}
