//! Queries over compiled circuits: consistency, validity, clausal entailment,
//! implicants, model counting and enumeration, conditioning, and a randomized
//! equivalence test.
//!
//! Compiled circuits are not smooth: a variable may be missing from one side
//! of a decision. Counting compensates with the size of the variable sets
//! below each node (see [`VarSets`]).

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cnf::{Literal, Term, Variable};
use crate::nnf::{Circuit, NnfStore, Node, NodeId};

/// Modulus of the equivalence test, the Mersenne prime 2^61 - 1.
pub const FIELD_PRIME: u64 = (1 << 61) - 1;

pub const DEFAULT_ROUNDS: u32 = 5;

/// A structural fault that makes counting unsound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Two children of an and-node both mention `var`.
    SharedVariable { node: NodeId, var: Variable },
    /// A decision node on `var` has `var` below it.
    RepeatedVariable { node: NodeId, var: Variable },
}

impl Violation {
    pub fn node(&self) -> NodeId {
        match *self {
            Violation::SharedVariable { node, .. } | Violation::RepeatedVariable { node, .. } => node,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SharedVariable { node, var } => {
                write!(f, "children of and-node {node} share {var}")
            }
            Violation::RepeatedVariable { node, var } => {
                write!(f, "decision node {node} on {var} mentions {var} below it")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("circuit is not a decision-DNNF: {0}")]
    Precondition(Violation),
    #[error("universe mismatch: {0} vs {1} variables")]
    UniverseMismatch(u32, u32),
    #[error("circuit mentions {mentioned} variables but its universe has only {universe}")]
    UniverseTooSmall { universe: u32, mentioned: usize },
}

/// Variables occurring at or below each reachable node.
#[derive(Debug, Clone)]
pub struct VarSets {
    sets: Vec<FixedBitSet>,
    reach: Vec<NodeId>,
}

impl VarSets {
    pub fn new(c: &Circuit) -> Self {
        let reach = c.reachable();
        let bits = max_variable(c) as usize + 1;
        let mut sets = vec![FixedBitSet::new(); c.root().index() + 1];
        for &id in &reach {
            let mut set = FixedBitSet::with_capacity(bits);
            match c.node(id) {
                Node::False | Node::True => {}
                Node::Literal(l) => set.insert(l.var().index() as usize),
                Node::Decision { var, low, high } => {
                    set.insert(var.index() as usize);
                    set.union_with(&sets[low.index()]);
                    set.union_with(&sets[high.index()]);
                }
                Node::And(ch) => {
                    for k in ch.iter() {
                        set.union_with(&sets[k.index()]);
                    }
                }
            }
            sets[id.index()] = set;
        }
        VarSets { sets, reach }
    }

    /// Reachable ids in ascending order.
    pub fn reachable(&self) -> &[NodeId] {
        &self.reach
    }

    pub fn get(&self, id: NodeId) -> &FixedBitSet {
        &self.sets[id.index()]
    }

    pub fn count(&self, id: NodeId) -> usize {
        self.sets[id.index()].count_ones(..)
    }

    pub fn contains(&self, id: NodeId, var: Variable) -> bool {
        self.sets[id.index()].contains(var.index() as usize)
    }

    /// First violation of decomposability or of the decision form, scanning
    /// from the sinks upwards.
    pub fn violation(&self, c: &Circuit) -> Option<Violation> {
        for &id in &self.reach {
            match c.node(id) {
                Node::Decision { var, low, high } => {
                    if self.contains(*low, *var) || self.contains(*high, *var) {
                        return Some(Violation::RepeatedVariable { node: id, var: *var });
                    }
                }
                Node::And(ch) => {
                    let mut seen = FixedBitSet::with_capacity(self.sets[id.index()].len());
                    for k in ch.iter() {
                        let set = self.get(*k);
                        if let Some(v) = seen.intersection(set).next() {
                            let var = Variable::new(v as u32).expect("variables start at 1");
                            return Some(Violation::SharedVariable { node: id, var });
                        }
                        seen.union_with(set);
                    }
                }
                _ => {}
            }
        }
        None
    }
}

/// Largest variable index mentioned by the circuit, 0 for a constant.
pub fn max_variable(c: &Circuit) -> u32 {
    c.reachable()
        .iter()
        .filter_map(|&id| match c.node(id) {
            Node::Literal(l) => Some(l.var().index()),
            Node::Decision { var, .. } => Some(var.index()),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

fn checked(c: &Circuit) -> Result<VarSets, QueryError> {
    let vs = VarSets::new(c);
    if let Some(v) = vs.violation(c) {
        return Err(QueryError::Precondition(v));
    }
    let mentioned = vs.count(c.root());
    if mentioned > c.universe() as usize {
        return Err(QueryError::UniverseTooSmall {
            universe: c.universe(),
            mentioned,
        });
    }
    Ok(vs)
}

/// Number of models over the circuit's universe.
pub fn model_count(c: &Circuit) -> Result<BigUint, QueryError> {
    let vs = checked(c)?;
    let mut count: Vec<BigUint> = vec![BigUint::zero(); c.root().index() + 1];
    for &id in vs.reachable() {
        let n = match c.node(id) {
            Node::False => BigUint::zero(),
            Node::True | Node::Literal(_) => BigUint::one(),
            Node::Decision { low, high, .. } => {
                let below = vs.count(id) - 1;
                (&count[low.index()] << (below - vs.count(*low))) + (&count[high.index()] << (below - vs.count(*high)))
            }
            Node::And(ch) => ch.iter().map(|k| &count[k.index()]).product(),
        };
        count[id.index()] = n;
    }
    let root = std::mem::take(&mut count[c.root().index()]);
    Ok(root << (c.universe() as usize - vs.count(c.root())))
}

/// Satisfiability, assuming decomposability.
pub fn is_consistent(c: &Circuit) -> bool {
    let mut sat = vec![false; c.root().index() + 1];
    for id in c.reachable() {
        sat[id.index()] = match c.node(id) {
            Node::False => false,
            Node::True | Node::Literal(_) => true,
            Node::Decision { low, high, .. } => sat[low.index()] || sat[high.index()],
            Node::And(ch) => ch.iter().all(|k| sat[k.index()]),
        };
    }
    sat[c.root().index()]
}

/// Whether every assignment of the universe is a model.
pub fn is_valid(c: &Circuit) -> Result<bool, QueryError> {
    if c.root() == NodeId::TRUE {
        return Ok(true);
    }
    Ok(model_count(c)? == BigUint::one() << c.universe() as usize)
}

/// Whether the circuit implies the clause `lits`.
pub fn entails_clause(c: &Circuit, lits: &[Literal]) -> bool {
    match Term::new(lits.iter().map(|&l| !l)) {
        Some(negation) => !is_consistent(&condition_circuit(c, &negation)),
        None => true,
    }
}

/// Whether the term implies the circuit.
pub fn is_implicant(t: &Term, c: &Circuit) -> Result<bool, QueryError> {
    is_valid(&condition_circuit(c, t))
}

/// Replaces every variable of `t` by its value. The result lives in a fresh
/// store and its universe shrinks by the size of `t`.
pub fn condition_circuit(c: &Circuit, t: &Term) -> Circuit {
    let mut store = NnfStore::new();
    let mut map = vec![NodeId::FALSE; c.root().index() + 1];
    for id in c.reachable() {
        map[id.index()] = match c.node(id) {
            Node::False => NodeId::FALSE,
            Node::True => NodeId::TRUE,
            Node::Literal(l) => match t.value_of(l.var()) {
                Some(v) if l.eval(v) => NodeId::TRUE,
                Some(_) => NodeId::FALSE,
                None => store.literal(*l),
            },
            Node::Decision { var, low, high } => match t.value_of(*var) {
                Some(true) => map[high.index()],
                Some(false) => map[low.index()],
                None => store.get_node(*var, map[low.index()], map[high.index()]),
            },
            Node::And(ch) => store
                .get_and_node(ch.iter().map(|k| map[k.index()]))
                .unwrap_or(NodeId::FALSE),
        };
    }
    let universe = c.universe().saturating_sub(t.len() as u32);
    Circuit::new(Arc::new(store), map[c.root().index()], universe)
}

/// Streams disjoint terms covering exactly the models of a decision-DNNF.
pub fn enumerate_models(c: &Circuit) -> Result<Models<'_>, QueryError> {
    checked(c)?;
    let mut sat = vec![false; c.root().index() + 1];
    for id in c.reachable() {
        sat[id.index()] = match c.node(id) {
            Node::False => false,
            Node::True | Node::Literal(_) => true,
            Node::Decision { low, high, .. } => sat[low.index()] || sat[high.index()],
            Node::And(ch) => ch.iter().all(|k| sat[k.index()]),
        };
    }
    let stack = if sat[c.root().index()] {
        vec![Frame {
            lits: Vec::new(),
            agenda: vec![c.root()],
        }]
    } else {
        Vec::new()
    };
    Ok(Models { circuit: c, sat, stack })
}

struct Frame {
    lits: Vec<Literal>,
    agenda: Vec<NodeId>,
}

pub struct Models<'a> {
    circuit: &'a Circuit,
    sat: Vec<bool>,
    stack: Vec<Frame>,
}

impl Iterator for Models<'_> {
    type Item = Term;

    fn next(&mut self) -> Option<Term> {
        'frames: while let Some(mut frame) = self.stack.pop() {
            while let Some(id) = frame.agenda.pop() {
                match self.circuit.node(id) {
                    Node::False => continue 'frames,
                    Node::True => {}
                    Node::Literal(l) => frame.lits.push(*l),
                    Node::Decision { var, low, high } => {
                        if self.sat[high.index()] {
                            let mut lits = frame.lits.clone();
                            lits.push(var.positive());
                            let mut agenda = frame.agenda.clone();
                            agenda.push(*high);
                            self.stack.push(Frame { lits, agenda });
                        }
                        if !self.sat[low.index()] {
                            continue 'frames;
                        }
                        frame.lits.push(var.negative());
                        frame.agenda.push(*low);
                    }
                    Node::And(ch) => frame.agenda.extend(ch.iter().rev()),
                }
            }
            return Some(Term::new(frame.lits).expect("decomposable circuits yield consistent terms"));
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqOutcome {
    EquivalentProbably,
    NotEquivalent,
}

impl fmt::Display for EqOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EqOutcome::EquivalentProbably => "equivalent-probably",
            EqOutcome::NotEquivalent => "not-equivalent",
        })
    }
}

/// Outcome of [`prob_equiv`]. A `NotEquivalent` verdict is certain; an
/// `EquivalentProbably` verdict is wrong with probability at most
/// `(variables / prime)^rounds`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EqVerdict {
    pub outcome: EqOutcome,
    /// Rounds evaluated before the verdict was reached.
    pub rounds: u32,
    pub prime: u64,
    /// Degree bound of the compared polynomials.
    pub variables: u32,
}

impl EqVerdict {
    pub fn error_bound(&self) -> f64 {
        match self.outcome {
            EqOutcome::NotEquivalent => 0.0,
            EqOutcome::EquivalentProbably => (self.variables as f64 / self.prime as f64).powi(self.rounds as i32),
        }
    }
}

impl fmt::Display for EqVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} rounds={} error_bound={:e}",
            self.outcome,
            self.rounds,
            self.error_bound()
        )
    }
}

fn add(a: u64, b: u64) -> u64 {
    (a + b) % FIELD_PRIME
}

fn sub(a: u64, b: u64) -> u64 {
    (a + FIELD_PRIME - b) % FIELD_PRIME
}

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % FIELD_PRIME as u128) as u64
}

/// Value of the circuit's network polynomial at `point` (indexed by
/// variable), modulo [`FIELD_PRIME`].
pub fn evaluate_polynomial(c: &Circuit, point: &[u64]) -> u64 {
    let r = |v: Variable| point[v.index() as usize];
    let mut value = vec![0u64; c.root().index() + 1];
    for id in c.reachable() {
        value[id.index()] = match c.node(id) {
            Node::False => 0,
            Node::True => 1,
            Node::Literal(l) if l.is_positive() => r(l.var()),
            Node::Literal(l) => sub(1, r(l.var())),
            Node::Decision { var, low, high } => add(
                mul(sub(1, r(*var)), value[low.index()]),
                mul(r(*var), value[high.index()]),
            ),
            Node::And(ch) => ch.iter().fold(1, |acc, k| mul(acc, value[k.index()])),
        };
    }
    value[c.root().index()]
}

/// Randomized equivalence test of two decision-DNNFs over the same universe.
pub fn prob_equiv(a: &Circuit, b: &Circuit, seed: u64, rounds: u32) -> Result<EqVerdict, QueryError> {
    if a.universe() != b.universe() {
        return Err(QueryError::UniverseMismatch(a.universe(), b.universe()));
    }
    checked(a)?;
    checked(b)?;
    let top = max_variable(a).max(max_variable(b)) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verdict = EqVerdict {
        outcome: EqOutcome::EquivalentProbably,
        rounds: 0,
        prime: FIELD_PRIME,
        variables: a.universe(),
    };
    for _ in 0..rounds {
        verdict.rounds += 1;
        let point: Vec<u64> = (0..=top).map(|_| rng.gen_range(0..FIELD_PRIME)).collect();
        if evaluate_polynomial(a, &point) != evaluate_polynomial(b, &point) {
            verdict.outcome = EqOutcome::NotEquivalent;
            break;
        }
    }
    Ok(verdict)
}
