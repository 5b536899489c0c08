//! CNF formulas over 1-based integer variables.
//!
//! A [`Cnf`] is an immutable value: conditioning and propagation return new
//! formulas. Every clause remembers the position it had in the input so that
//! residual formulas reached along different search paths can be compared
//! clause by clause (see [`crate::compiler::CacheKey`]).

use std::collections::HashMap;
use std::fmt;
use std::ops::Not;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

/// Largest universe [`Cnf::brute_force_count`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("literal 0 is not a valid literal")]
    ZeroLiteral,
    #[error("variable {var} exceeds the declared universe of {num_vars} variables")]
    VariableOutOfRange { var: u32, num_vars: u32 },
    #[error("refusing to enumerate 2^{num_vars} assignments (limit is {limit} variables)")]
    TooManyVariables { num_vars: u32, limit: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(u32);

impl Variable {
    pub fn new(index: u32) -> Option<Self> {
        (index >= 1 && index <= i32::MAX as u32).then_some(Variable(index))
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn positive(self) -> Literal {
        Literal(self.0 as i32)
    }

    pub fn negative(self) -> Literal {
        Literal(-(self.0 as i32))
    }

    pub fn literal(self, polarity: bool) -> Literal {
        if polarity {
            self.positive()
        } else {
            self.negative()
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal in DIMACS convention: `v` or `-v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(i32);

impl Literal {
    pub fn from_dimacs(code: i32) -> Option<Self> {
        (code != 0 && code != i32::MIN).then_some(Literal(code))
    }

    pub fn new(var: Variable, polarity: bool) -> Self {
        var.literal(polarity)
    }

    pub fn var(self) -> Variable {
        Variable(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// Truth value of the literal when its variable takes `value`.
    pub fn eval(self, value: bool) -> bool {
        self.is_positive() == value
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal(-self.0)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A disjunction of literals tagged with its position in the source formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    index: usize,
    // shared between a formula and the residuals that leave the clause intact
    lits: Arc<[Literal]>,
}

impl Clause {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.lits.contains(&lit)
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.lits
            .iter()
            .any(|l| l.eval(assignment[l.var().index() as usize - 1]))
    }
}

/// Normalizes a raw literal list: drops duplicates, keeps first occurrences in
/// order. Returns `None` for a tautology.
fn normalize_clause(lits: impl IntoIterator<Item = Literal>) -> Option<Vec<Literal>> {
    let mut out: Vec<Literal> = Vec::new();
    for lit in lits {
        if out.contains(&!lit) {
            return None;
        }
        if !out.contains(&lit) {
            out.push(lit);
        }
    }
    Some(out)
}

/// A conjunction of clauses over the universe `1..=num_vars`.
///
/// Clauses are kept sorted by their original index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Clause>,
}

/// Result of [`Cnf::unit_propagate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Propagation {
    pub residual: Cnf,
    pub implied: Vec<Literal>,
    pub conflict: bool,
}

/// A parsed DIMACS file together with sanitation statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimacs {
    pub cnf: Cnf,
    pub tautologies_dropped: usize,
}

impl Cnf {
    /// The empty conjunction over `num_vars` variables.
    pub fn new(num_vars: u32) -> Self {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    /// Builds a formula from signed DIMACS literals. Tautologous clauses are
    /// dropped and duplicate literals merged, as in [`parse_dimacs`].
    pub fn from_clauses<I, C>(num_vars: u32, clauses: I) -> Result<Self, CnfError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = i32>,
    {
        let mut cnf = Cnf::new(num_vars);
        for (index, raw) in clauses.into_iter().enumerate() {
            let mut lits = Vec::new();
            for code in raw {
                let lit = Literal::from_dimacs(code).ok_or(CnfError::ZeroLiteral)?;
                if lit.var().index() > num_vars {
                    return Err(CnfError::VariableOutOfRange {
                        var: lit.var().index(),
                        num_vars,
                    });
                }
                lits.push(lit);
            }
            if let Some(lits) = normalize_clause(lits) {
                cnf.clauses.push(Clause {
                    index,
                    lits: lits.into(),
                });
            }
        }
        Ok(cnf)
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    /// True when no clauses survive (the formula is the constant 1).
    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    /// Returns a copy with one more clause appended after all existing ones.
    pub fn with_clause(&self, lits: &[Literal]) -> Result<Self, CnfError> {
        let mut out = self.clone();
        for lit in lits {
            if lit.var().index() > self.num_vars {
                return Err(CnfError::VariableOutOfRange {
                    var: lit.var().index(),
                    num_vars: self.num_vars,
                });
            }
        }
        if let Some(lits) = normalize_clause(lits.iter().copied()) {
            let index = self.clauses.last().map_or(0, |c| c.index + 1);
            out.clauses.push(Clause {
                index,
                lits: lits.into(),
            });
        }
        Ok(out)
    }

    /// Sorted, duplicate-free list of variables occurring in some clause.
    pub fn variables(&self) -> Vec<Variable> {
        let mut vars: Vec<Variable> = self
            .clauses
            .iter()
            .flat_map(|c| c.lits.iter().map(|l| l.var()))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// `Δ|lit`: drops clauses satisfied by `lit` and removes `¬lit` from the
    /// rest. Clauses emptied this way are kept.
    pub fn condition(&self, lit: Literal) -> Cnf {
        let clauses = self
            .clauses
            .iter()
            .filter(|c| !c.contains(lit))
            .map(|c| {
                if c.contains(!lit) {
                    Clause {
                        index: c.index,
                        lits: c.lits.iter().copied().filter(|&l| l != !lit).collect::<Vec<_>>().into(),
                    }
                } else {
                    c.clone()
                }
            })
            .collect();
        Cnf {
            num_vars: self.num_vars,
            clauses,
        }
    }

    /// Conditions on every literal of a consistent set at once.
    pub fn condition_all(&self, lits: &[Literal]) -> Cnf {
        if lits.is_empty() {
            return self.clone();
        }
        let mut value = vec![0u8; self.num_vars as usize + 1];
        for l in lits {
            value[l.var().index() as usize] = 1 + l.is_positive() as u8;
        }
        self.restrict(&value)
    }

    /// `value[v]` is 0 when unassigned, 1 for false and 2 for true.
    fn restrict(&self, value: &[u8]) -> Cnf {
        let mut clauses = Vec::with_capacity(self.clauses.len());
        'clauses: for c in &self.clauses {
            let mut touched = false;
            for &l in c.lits.iter() {
                match value[l.var().index() as usize] {
                    0 => {}
                    v if l.eval(v == 2) => continue 'clauses,
                    _ => touched = true,
                }
            }
            let lits = if touched {
                c.lits
                    .iter()
                    .copied()
                    .filter(|l| value[l.var().index() as usize] == 0)
                    .collect::<Vec<_>>()
                    .into()
            } else {
                c.lits.clone()
            };
            clauses.push(Clause { index: c.index, lits });
        }
        Cnf {
            num_vars: self.num_vars,
            clauses,
        }
    }

    /// Repeatedly conditions on unit clauses until none remain or an empty
    /// clause appears.
    pub fn unit_propagate(&self) -> Propagation {
        if !self.has_empty_clause() && self.clauses.iter().all(|c| c.lits.len() > 1) {
            return Propagation {
                residual: self.clone(),
                implied: Vec::new(),
                conflict: false,
            };
        }
        let (value, implied, conflict) = self.propagate();
        Propagation {
            residual: if conflict {
                self.condition_all(&implied)
            } else {
                self.restrict(&value)
            },
            implied,
            conflict,
        }
    }

    /// Whether unit propagation derives the empty clause.
    pub fn propagation_conflict(&self) -> bool {
        if self.has_empty_clause() {
            return true;
        }
        if self.clauses.iter().all(|c| c.lits.len() > 1) {
            return false;
        }
        self.propagate().2
    }

    fn propagate(&self) -> (Vec<u8>, Vec<Literal>, bool) {
        let code = |l: Literal| 2 * l.var().index() as usize + l.is_positive() as usize;
        let slots = 2 * self.num_vars as usize + 2;
        let mut start = vec![0u32; slots + 1];
        for c in &self.clauses {
            for &l in c.lits.iter() {
                start[code(l) + 1] += 1;
            }
        }
        for i in 0..slots {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut occurs = vec![0u32; start[slots] as usize];
        for (i, c) in self.clauses.iter().enumerate() {
            for &l in c.lits.iter() {
                let k = code(l);
                occurs[fill[k] as usize] = i as u32;
                fill[k] += 1;
            }
        }
        let occ = |l: Literal| {
            let k = code(l);
            &occurs[start[k] as usize..start[k + 1] as usize]
        };

        let mut value = vec![0u8; self.num_vars as usize + 1];
        let mut implied: Vec<Literal> = Vec::new();
        let mut falsified = vec![0u32; self.clauses.len()];
        let mut satisfied = vec![false; self.clauses.len()];
        let mut conflict = self.has_empty_clause();

        // Returns false on a contradicting assignment.
        let assign = |l: Literal, value: &mut [u8], implied: &mut Vec<Literal>| match value[l.var().index() as usize] {
            0 => {
                value[l.var().index() as usize] = 1 + l.is_positive() as u8;
                implied.push(l);
                true
            }
            v => l.eval(v == 2),
        };
        if !conflict {
            for c in &self.clauses {
                if c.lits.len() == 1 && !assign(c.lits[0], &mut value, &mut implied) {
                    conflict = true;
                    break;
                }
            }
        }
        let mut head = 0;
        while !conflict && head < implied.len() {
            let lit = implied[head];
            head += 1;
            for &i in occ(lit) {
                satisfied[i as usize] = true;
            }
            for &i in occ(!lit) {
                let i = i as usize;
                if satisfied[i] {
                    continue;
                }
                falsified[i] += 1;
                let c = &self.clauses[i];
                let len = c.lits.len() as u32;
                if falsified[i] == len {
                    conflict = true;
                    break;
                }
                if falsified[i] + 1 == len {
                    let open = c.lits.iter().copied().find(|l| match value[l.var().index() as usize] {
                        0 => true,
                        v => l.eval(v == 2),
                    });
                    match open {
                        Some(l) if value[l.var().index() as usize] == 0 => {
                            assign(l, &mut value, &mut implied);
                        }
                        Some(_) => satisfied[i] = true,
                        None => {
                            conflict = true;
                            break;
                        }
                    }
                }
            }
        }
        (value, implied, conflict)
    }

    /// Connected components of the clause/variable incidence graph, ordered
    /// by their smallest clause index. Expects no empty clause.
    pub fn components(&self) -> Vec<Cnf> {
        if self.clauses.is_empty() {
            return Vec::new();
        }
        let mut slot: HashMap<Variable, usize> = HashMap::new();
        let mut parent: Vec<usize> = Vec::new();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut first_of_clause = Vec::with_capacity(self.clauses.len());
        for c in &self.clauses {
            let mut first = None;
            for l in c.lits.iter() {
                let next = parent.len();
                let s = *slot.entry(l.var()).or_insert_with(|| {
                    parent.push(next);
                    next
                });
                match first {
                    None => first = Some(s),
                    Some(f) => {
                        let (a, b) = (find(&mut parent, f), find(&mut parent, s));
                        if a != b {
                            parent[b] = a;
                        }
                    }
                }
            }
            first_of_clause.push(first);
        }
        let mut part_of_root: HashMap<usize, usize> = HashMap::new();
        let mut parts: Vec<Cnf> = Vec::new();
        for (c, first) in self.clauses.iter().zip(first_of_clause) {
            let root = match first {
                Some(f) => find(&mut parent, f),
                // An empty clause shares no variables; keep it on its own.
                None => usize::MAX - parts.len(),
            };
            let idx = *part_of_root.entry(root).or_insert_with(|| {
                parts.push(Cnf::new(self.num_vars));
                parts.len() - 1
            });
            parts[idx].clauses.push(c.clone());
        }
        parts
    }

    /// Evaluates the formula under a total assignment (`assignment[v - 1]`).
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied_by(assignment))
    }

    /// Number of total assignments over `1..=num_vars` satisfying every
    /// clause, by exhaustive enumeration.
    pub fn brute_force_count(&self) -> Result<BigUint, CnfError> {
        if self.num_vars > BRUTE_FORCE_LIMIT {
            return Err(CnfError::TooManyVariables {
                num_vars: self.num_vars,
                limit: BRUTE_FORCE_LIMIT,
            });
        }
        let masks: Vec<(u32, u32)> = self
            .clauses
            .iter()
            .map(|c| {
                c.lits.iter().fold((0u32, 0u32), |(pos, neg), l| {
                    let bit = 1u32 << (l.var().index() - 1);
                    if l.is_positive() {
                        (pos | bit, neg)
                    } else {
                        (pos, neg | bit)
                    }
                })
            })
            .collect();
        let total: u64 = 1 << self.num_vars;
        let count = (0..total)
            .filter(|&a| {
                let a = a as u32;
                masks.iter().all(|&(pos, neg)| a & pos != 0 || !a & neg != 0)
            })
            .count();
        Ok(BigUint::from(count))
    }
}

impl fmt::Display for Cnf {
    /// DIMACS rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for c in &self.clauses {
            for l in c.lits.iter() {
                write!(f, "{l} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// A consistent partial assignment, kept sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Term {
    lits: Vec<Literal>,
}

impl Term {
    /// Returns `None` if the literals assign some variable both ways.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Option<Self> {
        let mut lits: Vec<Literal> = lits.into_iter().collect();
        lits.sort_unstable_by_key(|l| (l.var(), l.is_positive()));
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return None;
        }
        Some(Term { lits })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn value_of(&self, var: Variable) -> Option<bool> {
        self.lits
            .binary_search_by_key(&var, |l| l.var())
            .ok()
            .map(|i| self.lits[i].is_positive())
    }

    /// True when the total assignment agrees with every literal.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.lits
            .iter()
            .all(|l| l.eval(assignment[l.var().index() as usize - 1]))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.lits {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses DIMACS CNF text. Comment lines start with `c`; a line starting with
/// `%` ends the input (SATLIB convention).
pub fn parse_dimacs(text: &str) -> Result<Dimacs, CnfError> {
    let mut header: Option<(u32, usize)> = None;
    let mut cnf = Cnf::new(0);
    let mut tautologies_dropped = 0;
    let mut current: Vec<Literal> = Vec::new();
    let mut index = 0usize;
    let mut last_line = 0;

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        last_line = lineno;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(lineno, "duplicate header"));
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(parse_err(lineno, "expected `p cnf <vars> <clauses>`"));
            }
            let n = fields[2]
                .parse::<u32>()
                .map_err(|_| parse_err(lineno, "bad variable count"))?;
            if n > i32::MAX as u32 {
                return Err(parse_err(lineno, "variable count too large"));
            }
            let m = fields[3]
                .parse::<usize>()
                .map_err(|_| parse_err(lineno, "bad clause count"))?;
            header = Some((n, m));
            cnf.num_vars = n;
            continue;
        }
        let (n, _) = header.ok_or_else(|| parse_err(lineno, "clause before header"))?;
        for tok in trimmed.split_whitespace() {
            let code: i64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, &format!("bad literal `{tok}`")))?;
            if code == 0 {
                match normalize_clause(current.drain(..)) {
                    Some(lits) => cnf.clauses.push(Clause {
                        index,
                        lits: lits.into(),
                    }),
                    None => tautologies_dropped += 1,
                }
                index += 1;
                continue;
            }
            if code.unsigned_abs() > n as u64 {
                return Err(parse_err(
                    lineno,
                    &format!("variable {} exceeds declared {}", code.unsigned_abs(), n),
                ));
            }
            current.push(Literal(code as i32));
        }
    }

    let (_, m) = header.ok_or_else(|| parse_err(last_line.max(1), "missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(parse_err(last_line, "last clause is missing its 0 terminator"));
    }
    if index != m {
        log::warn!("header declares {m} clauses but {index} were read");
    }
    if tautologies_dropped > 0 {
        log::warn!("dropped {tautologies_dropped} tautologous clause(s)");
    }
    Ok(Dimacs {
        cnf,
        tautologies_dropped,
    })
}

fn parse_err(line: usize, msg: &str) -> CnfError {
    CnfError::Parse {
        line,
        msg: msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUNNING: &str = "p cnf 3 3\n1 2 0\n1 -2 -3 0\n-1 2 -3 0\n";

    fn lit(c: i32) -> Literal {
        Literal::from_dimacs(c).unwrap()
    }

    fn clause_sets(cnf: &Cnf) -> Vec<Vec<i32>> {
        cnf.clauses()
            .iter()
            .map(|c| c.literals().iter().map(|l| l.to_dimacs()).collect())
            .collect()
    }

    #[test]
    fn parses_running_formula() {
        let d = parse_dimacs(RUNNING).unwrap();
        assert_eq!(d.cnf.num_vars(), 3);
        assert_eq!(d.cnf.len(), 3);
        assert_eq!(d.tautologies_dropped, 0);
        assert_eq!(clause_sets(&d.cnf), vec![vec![1, 2], vec![1, -2, -3], vec![-1, 2, -3]]);
    }

    #[test]
    fn parses_empty_formula_and_drops_tautology() {
        let d = parse_dimacs("p cnf 1 0\n").unwrap();
        assert_eq!((d.cnf.num_vars(), d.cnf.len()), (1, 0));
        let d = parse_dimacs("p cnf 2 1\n1 -1 0\n").unwrap();
        assert_eq!(d.cnf.len(), 0);
        assert_eq!(d.tautologies_dropped, 1);
    }

    #[test]
    fn parse_handles_comments_multiline_clauses_and_percent_trailer() {
        let text = "c hello\np cnf 3 2\n1 2\n 3 0 -1\n0\n%\n0\n";
        let d = parse_dimacs(text).unwrap();
        assert_eq!(clause_sets(&d.cnf), vec![vec![1, 2, 3], vec![-1]]);
        let d = parse_dimacs("p cnf 2 1\n1 1 -2 0\n").unwrap();
        assert_eq!(clause_sets(&d.cnf), vec![vec![1, -2]]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_dimacs("p cnf x 1\n").unwrap_err();
        assert!(matches!(e, CnfError::Parse { line: 1, .. }));
        let e = parse_dimacs("p cnf 2 1\n1 3 0\n").unwrap_err();
        assert!(matches!(e, CnfError::Parse { line: 2, .. }));
        let e = parse_dimacs("p cnf 2 1\n1 2\n").unwrap_err();
        assert!(matches!(e, CnfError::Parse { line: 2, .. }));
        let e = parse_dimacs("1 2 0\n").unwrap_err();
        assert!(matches!(e, CnfError::Parse { line: 1, .. }));
    }

    #[test]
    fn conditioning_running_formula() {
        let cnf = parse_dimacs(RUNNING).unwrap().cnf;
        let pos = cnf.condition(lit(1));
        assert_eq!(clause_sets(&pos), vec![vec![2, -3]]);
        assert_eq!(pos.clauses()[0].index(), 2);
        let neg = cnf.condition(lit(-1));
        assert_eq!(clause_sets(&neg), vec![vec![2], vec![-2, -3]]);
        let absent = Cnf::from_clauses(4, [vec![1, 2]]).unwrap();
        assert_eq!(absent.condition(lit(4)), absent);
    }

    #[test]
    fn conditioning_keeps_empty_clause() {
        let cnf = Cnf::from_clauses(1, [vec![1]]).unwrap();
        let out = cnf.condition(lit(-1));
        assert_eq!(out.len(), 1);
        assert!(out.has_empty_clause());
    }

    #[test]
    fn unit_propagation_examples() {
        let chain = Cnf::from_clauses(2, [vec![1], vec![-1, 2]]).unwrap();
        let p = chain.unit_propagate();
        assert!(!p.conflict);
        assert_eq!(p.implied, vec![lit(1), lit(2)]);
        assert!(p.residual.is_empty());

        let contra = Cnf::from_clauses(1, [vec![1], vec![-1]]).unwrap();
        let p = contra.unit_propagate();
        assert!(p.conflict);
        assert_eq!(p.implied, vec![lit(1)]);
        assert!(p.residual.has_empty_clause());

        let cnf = parse_dimacs(RUNNING).unwrap().cnf;
        let p = cnf.unit_propagate();
        assert!(!p.conflict);
        assert!(p.implied.is_empty());
        assert_eq!(p.residual, cnf);
    }

    #[test]
    fn component_examples() {
        let two = Cnf::from_clauses(4, [vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(two.components().len(), 2);
        let cnf = parse_dimacs(RUNNING).unwrap().cnf;
        assert_eq!(cnf.components().len(), 1);
        assert!(Cnf::new(3).components().is_empty());

        let mixed = Cnf::from_clauses(6, [vec![3, 4], vec![1, 2], vec![4, 5], vec![2, 6]]).unwrap();
        let parts = mixed.components();
        assert_eq!(parts.len(), 2);
        assert_eq!(clause_sets(&parts[0]), vec![vec![3, 4], vec![4, 5]]);
        assert_eq!(clause_sets(&parts[1]), vec![vec![1, 2], vec![2, 6]]);
    }

    #[test]
    fn brute_force_examples() {
        let cnf = parse_dimacs(RUNNING).unwrap().cnf;
        assert_eq!(cnf.brute_force_count().unwrap(), BigUint::from(4u32));
        assert_eq!(Cnf::new(5).brute_force_count().unwrap(), BigUint::from(32u32));
        let contra = Cnf::from_clauses(1, [vec![1], vec![-1]]).unwrap();
        assert_eq!(contra.brute_force_count().unwrap(), BigUint::from(0u32));
        assert!(matches!(
            Cnf::new(25).brute_force_count(),
            Err(CnfError::TooManyVariables { .. })
        ));
    }

    #[test]
    fn terms_reject_inconsistency() {
        assert!(Term::new([lit(1), lit(-1)]).is_none());
        let t = Term::new([lit(3), lit(-1), lit(3)]).unwrap();
        assert_eq!(t.literals(), &[lit(-1), lit(3)]);
        assert_eq!(t.value_of(Variable::new(3).unwrap()), Some(true));
        assert_eq!(t.value_of(Variable::new(2).unwrap()), None);
    }
}
