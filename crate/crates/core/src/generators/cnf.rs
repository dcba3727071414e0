//! CNF formulas with the occurrence restriction the reductions rely on.

use std::fmt;

use crate::error::{invalid, Result};

/// Variables are `1..=n_vars`; a literal `v` means `x_v`, `-v` means `not x_v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CnfFormula {
    n_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    /// Each clause must hold 1..=3 literals over distinct variables, and each
    /// variable may occur at most twice positively and twice negatively.
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        let mut pos = vec![0usize; n_vars + 1];
        let mut neg = vec![0usize; n_vars + 1];
        for (j, c) in clauses.iter().enumerate() {
            if c.is_empty() || c.len() > 3 {
                return Err(invalid(format!("clause {j} has {} literals", c.len())));
            }
            let mut vars: Vec<usize> = Vec::with_capacity(c.len());
            for &lit in c {
                let v = lit.unsigned_abs() as usize;
                if lit == 0 || v > n_vars {
                    return Err(invalid(format!("clause {j}: literal {lit} out of range")));
                }
                if vars.contains(&v) {
                    return Err(invalid(format!("clause {j} mentions variable {v} twice")));
                }
                vars.push(v);
                if lit > 0 {
                    pos[v] += 1;
                } else {
                    neg[v] += 1;
                }
            }
        }
        if let Some(v) = (1..=n_vars).find(|&v| pos[v] > 2 || neg[v] > 2) {
            return Err(invalid(format!(
                "variable {v} occurs {} times positively and {} times negatively (limit 2 each)",
                pos[v], neg[v]
            )));
        }
        Ok(CnfFormula { n_vars, clauses })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// `assignment[v - 1]` is the value of `x_v`.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&lit| assignment[lit.unsigned_abs() as usize - 1] == (lit > 0))
        })
    }

    /// Exhaustive truth-table check.
    pub fn is_satisfiable(&self) -> bool {
        (0u64..1 << self.n_vars).any(|mask| {
            let a: Vec<bool> = (0..self.n_vars).map(|i| mask >> i & 1 == 1).collect();
            self.evaluate(&a)
        })
    }

    /// Reads DIMACS-style text: `c` comment lines, an optional
    /// `p cnf <vars> <clauses>` header, and clauses terminated by `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut declared_vars: Option<usize> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i32> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(invalid(format!("bad header line {line:?}")));
                }
                declared_vars = Some(
                    parts[1]
                        .parse()
                        .map_err(|_| invalid(format!("bad variable count in {line:?}")))?,
                );
                continue;
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok
                    .parse()
                    .map_err(|_| invalid(format!("bad literal {tok:?}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let used = clauses
            .iter()
            .flatten()
            .map(|l: &i32| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        CnfFormula::new(declared_vars.unwrap_or(used), clauses)
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.n_vars, self.clauses.len())?;
        for c in &self.clauses {
            for lit in c {
                write!(f, "{lit} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}
