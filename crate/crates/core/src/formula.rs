//! CNF formulas: literals, clauses, the DIMACS reader/writer and the
//! per-literal occurrence index shared by every solver.

use std::fmt;
use std::io::{self, BufRead};

use thiserror::Error;

/// A propositional variable, stored 0-based. DIMACS numbering is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(index: usize) -> Self {
        Var(index as u32)
    }

    /// Builds a variable from its 1-based DIMACS number.
    pub fn from_dimacs(number: usize) -> Self {
        assert!(number >= 1, "DIMACS variables are numbered from 1");
        Var((number - 1) as u32)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn to_dimacs(self) -> usize {
        self.0 as usize + 1
    }

    pub fn lit(self, positive: bool) -> Lit {
        Lit((self.0 << 1) | (!positive) as u32)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.to_dimacs())
    }
}

/// A literal, encoded as `2 * var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    /// Converts a nonzero DIMACS integer into a literal.
    pub fn from_dimacs(value: i64) -> Self {
        assert!(value != 0, "0 is the DIMACS clause terminator, not a literal");
        Var::from_dimacs(value.unsigned_abs() as usize).lit(value > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().to_dimacs() as i64;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index usable to address per-literal tables of size `2 * num_variables`.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    /// Truth value of the literal under a value for its variable.
    #[inline]
    pub fn eval(self, var_value: bool) -> bool {
        var_value == self.is_positive()
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals. Duplicate literals are kept as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    lits: Vec<Lit>,
    tautology: bool,
}

impl Clause {
    fn new(lits: Vec<Lit>) -> Self {
        let tautology = lits.iter().any(|&l| lits.contains(&!l));
        Clause { lits, tautology }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// True when the clause contains both `v` and `¬v` for some variable.
    pub fn is_tautology(&self) -> bool {
        self.tautology
    }

    pub fn has_duplicate_literals(&self) -> bool {
        self.lits
            .iter()
            .enumerate()
            .any(|(i, l)| self.lits[i + 1..].contains(l))
    }

    pub fn is_satisfied_by(&self, values: &[bool]) -> bool {
        self.lits.iter().any(|l| l.eval(values[l.var().index()]))
    }
}

/// Structural problems with clause content that are legal but worth reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClauseWarning {
    DuplicateLiteral { clause: usize },
    Tautology { clause: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("literal {literal} in clause {clause} exceeds the {num_variables} declared variables")]
    LiteralOutOfRange {
        clause: usize,
        literal: i64,
        num_variables: usize,
    },
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: invalid token `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: literal {literal} out of range (declared {num_variables} variables)")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        num_variables: usize,
    },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// An immutable unweighted CNF instance.
///
/// Besides the clauses it keeps, for every literal, the list of clauses it
/// occurs in (one entry per occurrence, so a duplicated literal contributes
/// its clause twice, in adjacent positions) and per-variable positive and
/// negative occurrence totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    num_variables: usize,
    clauses: Vec<Clause>,
    occurrences: Vec<Vec<u32>>,
    pos_count: Vec<u32>,
    neg_count: Vec<u32>,
}

impl Formula {
    /// Builds a formula from DIMACS-style integer clauses.
    pub fn from_dimacs_clauses<I, C>(num_variables: usize, clauses: I) -> Result<Self, FormulaError>
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[i64]>,
    {
        let mut out = Vec::new();
        for (idx, clause) in clauses.into_iter().enumerate() {
            let raw = clause.as_ref();
            if raw.is_empty() {
                return Err(FormulaError::EmptyClause { clause: idx });
            }
            let mut lits = Vec::with_capacity(raw.len());
            for &value in raw {
                if value == 0 || value.unsigned_abs() as usize > num_variables {
                    return Err(FormulaError::LiteralOutOfRange {
                        clause: idx,
                        literal: value,
                        num_variables,
                    });
                }
                lits.push(Lit::from_dimacs(value));
            }
            out.push(lits);
        }
        Ok(Self::from_lits(num_variables, out))
    }

    fn from_lits(num_variables: usize, clauses: Vec<Vec<Lit>>) -> Self {
        let clauses: Vec<Clause> = clauses.into_iter().map(Clause::new).collect();
        let (occurrences, pos_count, neg_count) = build_index(num_variables, &clauses);
        Formula {
            num_variables,
            clauses,
            occurrences,
            pos_count,
            neg_count,
        }
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, index: usize) -> &Clause {
        &self.clauses[index]
    }

    /// Clause indices containing `lit`, one entry per occurrence.
    #[inline]
    pub fn occurrences(&self, lit: Lit) -> &[u32] {
        &self.occurrences[lit.code()]
    }

    pub fn pos_count(&self, var: Var) -> u32 {
        self.pos_count[var.index()]
    }

    pub fn neg_count(&self, var: Var) -> u32 {
        self.neg_count[var.index()]
    }

    pub fn occurrence_count(&self, var: Var) -> u32 {
        self.pos_count(var) + self.neg_count(var)
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> {
        (0..self.num_variables).map(Var::new)
    }

    /// Rebuilds the occurrence index from the clause list and compares it with
    /// the stored one.
    pub fn index_is_consistent(&self) -> bool {
        let (occ, pos, neg) = build_index(self.num_variables, &self.clauses);
        occ == self.occurrences && pos == self.pos_count && neg == self.neg_count
    }

    /// Duplicate literals and tautological clauses, in clause order.
    pub fn warnings(&self) -> Vec<ClauseWarning> {
        let mut out = Vec::new();
        for (i, c) in self.clauses.iter().enumerate() {
            if c.has_duplicate_literals() {
                out.push(ClauseWarning::DuplicateLiteral { clause: i });
            }
            if c.is_tautology() {
                out.push(ClauseWarning::Tautology { clause: i });
            }
        }
        out
    }

    /// Number of clauses falsified by a complete assignment, by direct scan.
    pub fn count_unsat(&self, values: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| !c.is_satisfied_by(values))
            .count()
    }

    pub fn parse_dimacs_str(text: &str) -> Result<Self, ParseError> {
        parse_dimacs(text.as_bytes())
    }

    /// Canonical DIMACS text: header, then clauses and literals in stored order.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_variables, self.clauses.len());
        for c in &self.clauses {
            for l in c.lits() {
                out.push_str(&l.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

fn build_index(num_variables: usize, clauses: &[Clause]) -> (Vec<Vec<u32>>, Vec<u32>, Vec<u32>) {
    let mut occurrences = vec![Vec::new(); 2 * num_variables];
    let mut pos = vec![0u32; num_variables];
    let mut neg = vec![0u32; num_variables];
    for (ci, clause) in clauses.iter().enumerate() {
        for &l in clause.lits() {
            occurrences[l.code()].push(ci as u32);
            if l.is_positive() {
                pos[l.var().index()] += 1;
            } else {
                neg[l.var().index()] += 1;
            }
        }
    }
    (occurrences, pos, neg)
}

/// Reads a DIMACS CNF stream.
///
/// Comment lines start with `c`. A line holding only `%` ends the clause
/// section (some legacy benchmark files have trailing garbage after it).
pub fn parse_dimacs<R: BufRead>(reader: R) -> Result<Formula, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed == "%" {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::MalformedHeader {
                    line: lineno,
                    reason: "duplicate header".into(),
                });
            }
            header = Some(parse_header(trimmed, lineno)?);
            continue;
        }
        let Some((num_variables, _)) = header else {
            return Err(ParseError::MalformedHeader {
                line: lineno,
                reason: "clause data before `p cnf` header".into(),
            });
        };
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| ParseError::InvalidToken {
                line: lineno,
                token: token.to_string(),
            })?;
            if value == 0 {
                if current.is_empty() {
                    return Err(ParseError::EmptyClause { line: lineno });
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if value.unsigned_abs() as usize > num_variables {
                    return Err(ParseError::LiteralOutOfRange {
                        line: lineno,
                        literal: value,
                        num_variables,
                    });
                }
                current.push(Lit::from_dimacs(value));
            }
        }
    }

    let Some((num_variables, declared)) = header else {
        return Err(ParseError::MalformedHeader {
            line: 0,
            reason: "missing `p cnf` header".into(),
        });
    };
    if !current.is_empty() {
        return Err(ParseError::UnterminatedClause);
    }
    if clauses.len() != declared {
        return Err(ParseError::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        });
    }
    Ok(Formula::from_lits(num_variables, clauses))
}

fn parse_header(line: &str, lineno: usize) -> Result<(usize, usize), ParseError> {
    let malformed = |reason: &str| ParseError::MalformedHeader {
        line: lineno,
        reason: reason.to_string(),
    };
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 4 || tokens[0] != "p" {
        return Err(malformed("expected `p cnf <vars> <clauses>`"));
    }
    if tokens[1] != "cnf" {
        return Err(malformed("only the `cnf` format is supported"));
    }
    let vars = tokens[2]
        .parse()
        .map_err(|_| malformed("variable count is not a non-negative integer"))?;
    let clauses = tokens[3]
        .parse()
        .map_err(|_| malformed("clause count is not a non-negative integer"))?;
    Ok((vars, clauses))
}
