//! Readers and writers for QDIMACS, partition-annotated DIMACS and
//! projected DIMACS (`c ind` lines).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::formula::{Clause, Cnf, Literal, ProjectedFormula, Specification, VarId};

/// A non-fatal oddity found while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// A clause with both polarities of a variable was dropped.
    TautologyDropped {
        line: usize,
    },
    DuplicateLiteral {
        line: usize,
    },
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseWarning::TautologyDropped { line } => {
                write!(f, "line {line}: tautological clause dropped")
            }
            ParseWarning::DuplicateLiteral { line } => {
                write!(f, "line {line}: repeated literal removed")
            }
        }
    }
}

struct Header {
    num_vars: u32,
    num_clauses: usize,
}

fn parse_header(line_no: usize, line: &str) -> Result<Header> {
    let mut it = line.split_whitespace();
    let (Some("p"), Some("cnf"), Some(v), Some(c), None) =
        (it.next(), it.next(), it.next(), it.next(), it.next())
    else {
        return Err(Error::parse(line_no, "malformed header"));
    };
    let num_vars = v
        .parse()
        .map_err(|_| Error::parse(line_no, "malformed header"))?;
    let num_clauses = c
        .parse()
        .map_err(|_| Error::parse(line_no, "malformed header"))?;
    Ok(Header {
        num_vars,
        num_clauses,
    })
}

fn parse_int(line_no: usize, tok: &str) -> Result<i64> {
    tok.parse()
        .map_err(|_| Error::parse(line_no, format!("expected an integer, found `{tok}`")))
}

/// Parses a `0`-terminated list of positive variable ids.
fn parse_var_list<'a>(
    line_no: usize,
    toks: impl Iterator<Item = &'a str>,
    num_vars: Option<u32>,
) -> Result<Vec<VarId>> {
    let mut vars = Vec::new();
    let mut terminated = false;
    for tok in toks {
        if terminated {
            return Err(Error::parse(line_no, "tokens after terminating 0"));
        }
        let n = parse_int(line_no, tok)?;
        if n == 0 {
            terminated = true;
            continue;
        }
        let var = u32::try_from(n)
            .ok()
            .and_then(VarId::new)
            .ok_or_else(|| Error::parse(line_no, format!("invalid variable `{tok}`")))?;
        if num_vars.is_some_and(|max| var.index() > max) {
            return Err(Error::parse(line_no, "literal out of range"));
        }
        vars.push(var);
    }
    if !terminated {
        return Err(Error::parse(line_no, "variable list not terminated by 0"));
    }
    Ok(vars)
}

/// Accumulates `0`-terminated clauses that may span lines.
struct ClauseReader {
    num_vars: u32,
    current: Vec<Literal>,
    current_line: usize,
    cnf: Cnf,
    warnings: Vec<ParseWarning>,
}

impl ClauseReader {
    fn new(num_vars: u32) -> Self {
        ClauseReader {
            num_vars,
            current: Vec::new(),
            current_line: 0,
            cnf: Cnf::new(num_vars),
            warnings: Vec::new(),
        }
    }

    fn feed(&mut self, line_no: usize, line: &str) -> Result<()> {
        for tok in line.split_whitespace() {
            let n = parse_int(line_no, tok)?;
            if self.current.is_empty() {
                self.current_line = line_no;
            }
            if n == 0 {
                self.finish_clause();
                continue;
            }
            let lit = i32::try_from(n)
                .ok()
                .and_then(Literal::from_dimacs)
                .filter(|l| l.var.index() <= self.num_vars)
                .ok_or_else(|| Error::parse(line_no, "literal out of range"))?;
            self.current.push(lit);
        }
        Ok(())
    }

    fn finish_clause(&mut self) {
        let mut clause = Clause::new(std::mem::take(&mut self.current));
        let line = self.current_line;
        if clause.is_tautology() {
            self.warnings.push(ParseWarning::TautologyDropped { line });
            return;
        }
        if clause.has_duplicate() {
            clause.dedup();
            self.warnings.push(ParseWarning::DuplicateLiteral { line });
        }
        self.cnf.clauses.push(clause);
    }

    fn finish(self, header: &Header, line_no: usize) -> Result<(Cnf, Vec<ParseWarning>)> {
        if !self.current.is_empty() {
            return Err(Error::parse(line_no, "last clause not terminated by 0"));
        }
        let dropped = self
            .warnings
            .iter()
            .filter(|w| matches!(w, ParseWarning::TautologyDropped { .. }))
            .count();
        if self.cnf.clauses.len() + dropped != header.num_clauses {
            return Err(Error::parse(
                line_no,
                format!(
                    "header declares {} clauses, found {}",
                    header.num_clauses,
                    self.cnf.clauses.len() + dropped
                ),
            ));
        }
        Ok((self.cnf, self.warnings))
    }
}

/// Parses a 2QBF in QDIMACS form: universal variables become inputs,
/// existential variables outputs, and free variables occurring in clauses
/// become inputs.
pub fn parse_qdimacs(text: &str) -> Result<Specification> {
    parse_qdimacs_reporting(text).map(|(spec, _)| spec)
}

pub fn parse_qdimacs_reporting(text: &str) -> Result<(Specification, Vec<ParseWarning>)> {
    #[derive(PartialEq)]
    enum Block {
        None,
        Universal,
        Existential,
    }

    let mut header = None;
    let mut reader: Option<ClauseReader> = None;
    let mut universal = BTreeSet::new();
    let mut existential = BTreeSet::new();
    let mut block = Block::None;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let Some(h) = &header else {
            if !line.starts_with('p') {
                return Err(Error::parse(line_no, "malformed header: expected `p cnf`"));
            }
            let parsed = parse_header(line_no, line)?;
            reader = Some(ClauseReader::new(parsed.num_vars));
            header = Some(parsed);
            continue;
        };
        let reader = reader.as_mut().expect("reader exists once header is read");
        let mut toks = line.split_whitespace();
        let first = toks.next().unwrap_or_default();
        if first == "a" || first == "e" {
            if !reader.cnf.clauses.is_empty() || !reader.current.is_empty() {
                return Err(Error::parse(line_no, "quantifier line after clauses"));
            }
            if first == "a" {
                if block == Block::Existential {
                    return Err(Error::parse(
                        line_no,
                        "only one universal block followed by one existential block is supported",
                    ));
                }
                block = Block::Universal;
            } else {
                block = Block::Existential;
            }
            for var in parse_var_list(line_no, toks, Some(h.num_vars))? {
                if universal.contains(&var) || existential.contains(&var) {
                    return Err(Error::parse(
                        line_no,
                        format!("variable quantified twice ({var})"),
                    ));
                }
                if block == Block::Universal {
                    universal.insert(var);
                } else {
                    existential.insert(var);
                }
            }
        } else if first == "p" {
            return Err(Error::parse(
                line_no,
                "malformed header: duplicate `p` line",
            ));
        } else {
            reader.feed(line_no, line)?;
        }
    }

    let header =
        header.ok_or_else(|| Error::parse(last_line, "malformed header: missing `p cnf`"))?;
    let reader = reader.expect("reader exists once header is read");
    let (cnf, warnings) = reader.finish(&header, last_line)?;
    if existential.is_empty() {
        return Err(Error::parse(last_line, "empty output set"));
    }
    let mut inputs = universal;
    for var in cnf.occurring_vars() {
        if !existential.contains(&var) {
            inputs.insert(var);
        }
    }
    let spec = Specification::new(cnf, inputs, existential)?;
    Ok((spec, warnings))
}

/// Parses plain DIMACS whose partition is declared by `c x … 0` and
/// `c y … 0` comment lines.
pub fn parse_dimacs_annotated(text: &str) -> Result<Specification> {
    parse_dimacs_annotated_reporting(text).map(|(spec, _)| spec)
}

pub fn parse_dimacs_annotated_reporting(text: &str) -> Result<(Specification, Vec<ParseWarning>)> {
    let mut header = None;
    let mut reader: Option<ClauseReader> = None;
    let mut inputs = BTreeSet::new();
    let mut outputs = BTreeSet::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            let mut toks = rest.split_whitespace();
            let target = match toks.next() {
                Some("x") => &mut inputs,
                Some("y") => &mut outputs,
                _ => continue,
            };
            for var in parse_var_list(line_no, toks, None)? {
                target.insert(var);
            }
            continue;
        }
        match &header {
            None => {
                let parsed = parse_header(line_no, line)?;
                reader = Some(ClauseReader::new(parsed.num_vars));
                header = Some(parsed);
            }
            Some(_) => reader
                .as_mut()
                .expect("reader exists once header is read")
                .feed(line_no, line)?,
        }
    }

    let header =
        header.ok_or_else(|| Error::parse(last_line, "malformed header: missing `p cnf`"))?;
    let (cnf, warnings) = reader
        .expect("reader exists once header is read")
        .finish(&header, last_line)?;
    if let Some(v) = inputs.intersection(&outputs).next() {
        return Err(Error::parse(
            last_line,
            format!("overlapping declarations (variable {v})"),
        ));
    }
    if let Some(v) = cnf
        .occurring_vars()
        .into_iter()
        .find(|v| !inputs.contains(v) && !outputs.contains(v))
    {
        return Err(Error::parse(last_line, format!("undeclared variable {v}")));
    }
    if let Some(v) = inputs
        .iter()
        .chain(&outputs)
        .find(|v| v.index() > cnf.num_vars)
    {
        return Err(Error::parse(
            last_line,
            format!("declared variable {v} exceeds the header count"),
        ));
    }
    let spec = Specification::new(cnf, inputs, outputs)?;
    Ok((spec, warnings))
}

/// Parses DIMACS with optional `c ind … 0` projection lines. Without any
/// `c ind` line the projection is every variable up to the header count.
pub fn parse_projected_dimacs(text: &str) -> Result<ProjectedFormula> {
    let mut header = None;
    let mut reader: Option<ClauseReader> = None;
    let mut projection: Option<BTreeSet<VarId>> = None;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            let mut toks = rest.split_whitespace();
            if toks.next() == Some("ind") {
                projection
                    .get_or_insert_with(BTreeSet::new)
                    .extend(parse_var_list(line_no, toks, None)?);
            }
            continue;
        }
        match &header {
            None => {
                let parsed = parse_header(line_no, line)?;
                reader = Some(ClauseReader::new(parsed.num_vars));
                header = Some(parsed);
            }
            Some(_) => reader
                .as_mut()
                .expect("reader exists once header is read")
                .feed(line_no, line)?,
        }
    }
    let header =
        header.ok_or_else(|| Error::parse(last_line, "malformed header: missing `p cnf`"))?;
    let (cnf, _) = reader
        .expect("reader exists once header is read")
        .finish(&header, last_line)?;
    let projection =
        projection.unwrap_or_else(|| (1..=cnf.num_vars).map(VarId::from_index).collect());
    if projection.iter().any(|v| v.index() > cnf.num_vars) {
        return Err(Error::parse(last_line, "projection variable out of range"));
    }
    Ok(ProjectedFormula::new(cnf, projection))
}

fn write_var_line(out: &mut String, prefix: &str, vars: &BTreeSet<VarId>) {
    out.push_str(prefix);
    for v in vars {
        let _ = write!(out, " {v}");
    }
    out.push_str(" 0\n");
}

fn write_clauses(out: &mut String, cnf: &Cnf) {
    for clause in &cnf.clauses {
        for lit in &clause.literals {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
}

/// Serializes a specification as QDIMACS (`a` block for inputs, `e` block
/// for outputs).
pub fn to_qdimacs(spec: &Specification) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p cnf {} {}",
        spec.cnf.num_vars,
        spec.cnf.clauses.len()
    );
    if !spec.inputs.is_empty() {
        write_var_line(&mut out, "a", &spec.inputs);
    }
    write_var_line(&mut out, "e", &spec.outputs);
    write_clauses(&mut out, &spec.cnf);
    out
}

pub fn to_annotated_dimacs(spec: &Specification) -> String {
    let mut out = String::new();
    write_var_line(&mut out, "c x", &spec.inputs);
    write_var_line(&mut out, "c y", &spec.outputs);
    let _ = writeln!(
        out,
        "p cnf {} {}",
        spec.cnf.num_vars,
        spec.cnf.clauses.len()
    );
    write_clauses(&mut out, &spec.cnf);
    out
}

/// Serializes a projected formula as DIMACS with a `c ind` line.
pub fn to_projected_dimacs(pf: &ProjectedFormula) -> String {
    let mut out = String::new();
    write_var_line(&mut out, "c ind", &pf.projection);
    let _ = writeln!(out, "p cnf {} {}", pf.cnf.num_vars, pf.cnf.clauses.len());
    write_clauses(&mut out, &pf.cnf);
    out
}

/// Plain DIMACS for a CNF.
pub fn to_dimacs(cnf: &Cnf) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len());
    write_clauses(&mut out, cnf);
    out
}
