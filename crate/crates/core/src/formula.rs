//! CNF formulas, input/output partitions and assignments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Not;

use crate::error::{Error, Result};

/// A propositional variable, 1-based as in DIMACS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(u32);

impl VarId {
    /// Returns `None` for index 0.
    pub fn new(index: u32) -> Option<Self> {
        (index >= 1).then_some(VarId(index))
    }

    /// # Panics
    /// If `index` is 0.
    pub fn from_index(index: u32) -> Self {
        Self::new(index).expect("variable indices are 1-based")
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn positive(self) -> Literal {
        Literal::new(self, false)
    }

    pub fn negative(self) -> Literal {
        Literal::new(self, true)
    }

    pub fn literal(self, value: bool) -> Literal {
        Literal::new(self, !value)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: VarId,
    pub negated: bool,
}

impl Literal {
    pub fn new(var: VarId, negated: bool) -> Self {
        Literal { var, negated }
    }

    pub fn from_dimacs(lit: i32) -> Option<Self> {
        let var = VarId::new(lit.unsigned_abs())?;
        Some(Literal::new(var, lit < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var.0);
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// Truth value of the literal under a value for its variable.
    pub fn eval(self, value: bool) -> bool {
        value != self.negated
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal::new(self.var, !self.negated)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Self {
        Clause { literals }
    }

    pub fn unit(lit: Literal) -> Self {
        Clause {
            literals: vec![lit],
        }
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_tautology(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.literals.iter().any(|l| {
            seen.insert(*l);
            seen.contains(&!*l)
        })
    }

    pub fn has_duplicate(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.literals.iter().any(|l| !seen.insert(*l))
    }

    /// Removes repeated literals, keeping first occurrences in order.
    pub fn dedup(&mut self) {
        let mut seen = BTreeSet::new();
        self.literals.retain(|l| seen.insert(*l));
    }

    /// `None` when some literal's variable is unassigned.
    pub fn eval(&self, assignment: &Assignment) -> Option<bool> {
        let mut all_bound = true;
        for lit in &self.literals {
            match assignment.get(lit.var) {
                Some(v) if lit.eval(v) => return Some(true),
                Some(_) => {}
                None => all_bound = false,
            }
        }
        all_bound.then_some(false)
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        Clause::new(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Self {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    /// Adds a clause, growing `num_vars` to cover its literals.
    pub fn add_clause(&mut self, clause: Clause) {
        if let Some(max) = clause.literals.iter().map(|l| l.var.0).max() {
            self.num_vars = self.num_vars.max(max);
        }
        self.clauses.push(clause);
    }

    pub fn add_literals<I: IntoIterator<Item = Literal>>(&mut self, lits: I) {
        self.add_clause(lits.into_iter().collect());
    }

    /// Allocates a fresh variable above every existing one.
    pub fn fresh_var(&mut self) -> VarId {
        self.num_vars += 1;
        VarId(self.num_vars)
    }

    /// Variables that occur in at least one clause.
    pub fn occurring_vars(&self) -> BTreeSet<VarId> {
        self.clauses
            .iter()
            .flat_map(|c| c.literals.iter().map(|l| l.var))
            .collect()
    }

    /// `Some(true)` iff every clause is satisfied by a (possibly partial)
    /// assignment, `Some(false)` iff some clause is falsified.
    pub fn eval(&self, assignment: &Assignment) -> Option<bool> {
        let mut undecided = false;
        for clause in &self.clauses {
            match clause.eval(assignment) {
                Some(false) => return Some(false),
                None => undecided = true,
                Some(true) => {}
            }
        }
        (!undecided).then_some(true)
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.eval(assignment) == Some(true)
    }
}

/// A partial or total mapping from variables to truth values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Assignment {
    bindings: BTreeMap<VarId, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: VarId) -> Option<bool> {
        self.bindings.get(&var).copied()
    }

    pub fn set(&mut self, var: VarId, value: bool) {
        self.bindings.insert(var, value);
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, bool)> + '_ {
        self.bindings.iter().map(|(v, b)| (*v, *b))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.bindings.keys().copied()
    }

    /// True iff the assignment binds exactly `vars`.
    pub fn is_total_over(&self, vars: &BTreeSet<VarId>) -> bool {
        self.bindings.len() == vars.len() && vars.iter().all(|v| self.bindings.contains_key(v))
    }

    pub fn restrict(&self, vars: &BTreeSet<VarId>) -> Assignment {
        self.bindings
            .iter()
            .filter(|(v, _)| vars.contains(v))
            .map(|(v, b)| (*v, *b))
            .collect()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.iter().map(|(v, b)| v.literal(b))
    }

    /// Reads the bound variables of `vars` as an unsigned integer, least
    /// significant bit first. Unbound variables read as 0.
    pub fn to_uint(&self, vars: &[VarId]) -> u64 {
        vars.iter()
            .enumerate()
            .filter(|(_, v)| self.get(**v) == Some(true))
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }

    /// Binds `vars` to the bits of `value`, least significant bit first.
    pub fn from_uint(vars: &[VarId], value: u64) -> Assignment {
        vars.iter()
            .enumerate()
            .map(|(i, v)| (*v, (value >> i) & 1 == 1))
            .collect()
    }
}

impl FromIterator<(VarId, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (VarId, bool)>>(iter: I) -> Self {
        Assignment {
            bindings: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for lit in self.literals() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{lit}")?;
        }
        Ok(())
    }
}

/// A CNF together with the set of variables its models are projected onto.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjectedFormula {
    pub cnf: Cnf,
    pub projection: BTreeSet<VarId>,
}

impl ProjectedFormula {
    /// # Panics
    /// If a projection variable exceeds `cnf.num_vars`.
    pub fn new(cnf: Cnf, projection: BTreeSet<VarId>) -> Self {
        assert!(
            projection.iter().all(|v| v.0 <= cnf.num_vars),
            "projection variable out of range"
        );
        ProjectedFormula { cnf, projection }
    }

    pub fn projection_vec(&self) -> Vec<VarId> {
        self.projection.iter().copied().collect()
    }

    /// A 64-bit hash of clauses and projection, used as a memo key. One
    /// multiply-rotate step per literal keeps it cheap enough to compute on
    /// every oracle call.
    pub fn fingerprint(&self) -> u64 {
        fn mix(h: u64, x: u64) -> u64 {
            (h ^ x).wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(27)
        }
        // four independent lanes so the multiplies overlap
        let mut lanes = [1u64, 2, 3, 4].map(|i| mix(i, u64::from(self.cnf.num_vars)));
        for (i, clause) in self.cnf.clauses.iter().enumerate() {
            let lane = &mut lanes[i % 4];
            for lit in &clause.literals {
                *lane = mix(*lane, lit.to_dimacs() as u64);
            }
            *lane = mix(*lane, 0);
        }
        let mut h = lanes.iter().fold(u64::MAX, |h, &l| mix(h, l));
        for v in &self.projection {
            h = mix(h, u64::from(v.0));
        }
        // splitmix64 finalizer
        h ^= h >> 30;
        h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 27;
        h = h.wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^ (h >> 31)
    }
}

/// A violated [`Specification`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    EmptyOutputs,
    LiteralOutOfRange { clause: usize, var: u32 },
    OverlappingPartition(VarId),
    Unpartitioned(VarId),
    PartitionOutOfRange(VarId),
    Tautology { clause: usize },
    DuplicateLiteral { clause: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EmptyOutputs => f.write_str("empty output set"),
            Diagnostic::LiteralOutOfRange { clause, var } => {
                write!(f, "literal out of range (clause {clause}, variable {var})")
            }
            Diagnostic::OverlappingPartition(v) => {
                write!(f, "variable {v} is both input and output")
            }
            Diagnostic::Unpartitioned(v) => {
                write!(f, "variable {v} is neither input nor output")
            }
            Diagnostic::PartitionOutOfRange(v) => {
                write!(f, "partition variable {v} exceeds the variable count")
            }
            Diagnostic::Tautology { clause } => write!(f, "clause {clause} is tautological"),
            Diagnostic::DuplicateLiteral { clause } => {
                write!(f, "clause {clause} repeats a literal")
            }
        }
    }
}

/// A relational specification `∃Y. F(X, Y)`: a CNF with its variables split
/// into inputs `X` and outputs `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specification {
    pub cnf: Cnf,
    pub inputs: BTreeSet<VarId>,
    pub outputs: BTreeSet<VarId>,
}

impl Specification {
    /// Builds a specification, rejecting it if any invariant fails.
    pub fn new(cnf: Cnf, inputs: BTreeSet<VarId>, outputs: BTreeSet<VarId>) -> Result<Self> {
        let spec = Self::from_parts(cnf, inputs, outputs);
        let diags = validate(&spec);
        if diags.is_empty() {
            Ok(spec)
        } else {
            Err(Error::Invalid(diags))
        }
    }

    /// Builds a specification without checking invariants.
    pub fn from_parts(cnf: Cnf, inputs: BTreeSet<VarId>, outputs: BTreeSet<VarId>) -> Self {
        Specification {
            cnf,
            inputs,
            outputs,
        }
    }

    /// `n`, the number of inputs.
    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    /// `m`, the number of outputs.
    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn input_vec(&self) -> Vec<VarId> {
        self.inputs.iter().copied().collect()
    }

    pub fn output_vec(&self) -> Vec<VarId> {
        self.outputs.iter().copied().collect()
    }

    pub fn projected_on_inputs(&self) -> ProjectedFormula {
        ProjectedFormula::new(self.cnf.clone(), self.inputs.clone())
    }

    pub fn projected_on_outputs(&self) -> ProjectedFormula {
        ProjectedFormula::new(self.cnf.clone(), self.outputs.clone())
    }
}

/// Checks every [`Specification`] invariant, one diagnostic per violation.
pub fn validate(spec: &Specification) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if spec.outputs.is_empty() {
        diags.push(Diagnostic::EmptyOutputs);
    }
    for v in spec.inputs.intersection(&spec.outputs) {
        diags.push(Diagnostic::OverlappingPartition(*v));
    }
    for v in spec.inputs.iter().chain(&spec.outputs) {
        if v.0 > spec.cnf.num_vars {
            diags.push(Diagnostic::PartitionOutOfRange(*v));
        }
    }
    let mut unpartitioned = BTreeSet::new();
    for (i, clause) in spec.cnf.clauses.iter().enumerate() {
        for lit in &clause.literals {
            if lit.var.0 > spec.cnf.num_vars {
                diags.push(Diagnostic::LiteralOutOfRange {
                    clause: i,
                    var: lit.var.0,
                });
            } else if !spec.inputs.contains(&lit.var) && !spec.outputs.contains(&lit.var) {
                unpartitioned.insert(lit.var);
            }
        }
        if clause.is_tautology() {
            diags.push(Diagnostic::Tautology { clause: i });
        } else if clause.has_duplicate() {
            diags.push(Diagnostic::DuplicateLiteral { clause: i });
        }
    }
    diags.extend(unpartitioned.into_iter().map(Diagnostic::Unpartitioned));
    diags
}
