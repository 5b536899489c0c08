//! Truth-table oracles and random instance generators shared by the
//! integration tests. The oracles work on raw DIMACS clause lists and do not
//! call into the library.

#![allow(dead_code)]

use kctrace::cnf::{Cnf, Literal, Term, Variable};
use kctrace::compiler::VarOrder;
use rand::seq::SliceRandom;
use rand::Rng;

pub type RawCnf = Vec<Vec<i32>>;

pub const RUNNING: [&[i32]; 3] = [&[1, 2], &[1, -2, -3], &[-1, 2, -3]];

pub fn running_raw() -> RawCnf {
    RUNNING.iter().map(|c| c.to_vec()).collect()
}

pub fn lit_holds(lit: i32, bits: u32) -> bool {
    let on = bits >> (lit.unsigned_abs() - 1) & 1 == 1;
    on == (lit > 0)
}

pub fn clause_holds(clause: &[i32], bits: u32) -> bool {
    clause.iter().any(|&l| lit_holds(l, bits))
}

pub fn term_holds(term: &[i32], bits: u32) -> bool {
    term.iter().all(|&l| lit_holds(l, bits))
}

/// Every satisfying assignment as a bitmask (bit `v - 1` is variable `v`).
pub fn models(n: u32, clauses: &[Vec<i32>]) -> Vec<u32> {
    (0..1u32 << n)
        .filter(|&bits| clauses.iter().all(|c| clause_holds(c, bits)))
        .collect()
}

pub fn entails(models: &[u32], clause: &[i32]) -> bool {
    models.iter().all(|&m| clause_holds(clause, m))
}

/// Whether every assignment extending the term is a model.
pub fn implies(n: u32, models: &[u32], term: &[i32]) -> bool {
    let consistent = !term.iter().any(|l| term.contains(&-l));
    if !consistent {
        return true;
    }
    let extending = (0..1u32 << n).filter(|&b| term_holds(term, b)).count();
    models.iter().filter(|&&m| term_holds(term, m)).count() == extending
}

pub fn to_cnf(n: u32, clauses: &[Vec<i32>]) -> Cnf {
    Cnf::from_clauses(n, clauses.iter().cloned()).expect("valid clauses")
}

pub fn lits(raw: &[i32]) -> Vec<Literal> {
    raw.iter().map(|&x| Literal::from_dimacs(x).expect("nonzero")).collect()
}

pub fn term(raw: &[i32]) -> Term {
    Term::new(lits(raw)).expect("consistent term")
}

pub fn assignment(n: u32, bits: u32) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

/// Random CNF with `n` in `1..=max_vars`, up to `max_clauses` clauses of
/// 1 to `max_len` distinct variables.
pub fn random_cnf(rng: &mut impl Rng, max_vars: u32, max_clauses: usize, max_len: usize) -> (u32, RawCnf) {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_clauses);
    let vars: Vec<i32> = (1..=n as i32).collect();
    let clauses = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.min(n as usize));
            vars.choose_multiple(rng, len)
                .map(|&v| if rng.gen() { v } else { -v })
                .collect()
        })
        .collect();
    (n, clauses)
}

/// Every literal set over `1..=n` that mentions each variable at most once.
pub fn all_literal_sets(n: u32) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for v in 1..=n as i32 {
        out = out
            .into_iter()
            .flat_map(|s| {
                let mut pos = s.clone();
                pos.push(v);
                let mut neg = s.clone();
                neg.push(-v);
                [s, pos, neg]
            })
            .collect();
    }
    out
}

/// A random set of literals over `1..=n` with distinct variables.
pub fn random_literal_set(rng: &mut impl Rng, n: u32) -> Vec<i32> {
    let vars: Vec<i32> = (1..=n as i32).collect();
    let len = rng.gen_range(0..=n.min(4) as usize);
    vars.choose_multiple(rng, len)
        .map(|&v| if rng.gen() { v } else { -v })
        .collect()
}

pub fn random_order(rng: &mut impl Rng, n: u32) -> VarOrder {
    let mut vars: Vec<Variable> = (1..=n).map(|i| Variable::new(i).expect("nonzero")).collect();
    vars.shuffle(rng);
    VarOrder::new(vars).expect("a permutation")
}
