//! Exhaustive DPLL whose recorded trace is the compiled circuit.
//!
//! One search loop serves all three target languages; the mode only changes
//! how the next step is chosen:
//!
//! * [`Mode::Free`]: branch on any variable picked by the heuristic (FBDD).
//! * [`Mode::Ordered`]: branch on the first variable of a fixed order that
//!   still occurs in the residual formula (OBDD).
//! * [`Mode::Decomposed`]: split the residual into variable-disjoint
//!   components before branching (decision-DNNF).
//!
//! The search runs on an explicit work stack so that deep formulas do not
//! exhaust the call stack.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::cnf::{Cnf, Literal, Variable};
use crate::nnf::{Circuit, NnfStore, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid variable order: {0}")]
    InvalidOrder(String),
    #[error("formula mentions no variable to branch on")]
    NoVariables,
    #[error("time limit exceeded")]
    Timeout,
    #[error("node limit of {0} exceeded")]
    NodeLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Free,
    Ordered,
    Decomposed,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Free => "fbdd",
            Mode::Ordered => "obdd",
            Mode::Decomposed => "decision-dnnf",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    /// Variable occurring in the most clauses; ties go to the smallest index.
    #[default]
    MaxOccurrence,
    /// Smallest variable index occurring in the formula.
    MinIndex,
}

/// A total order over the variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarOrder {
    order: Vec<Variable>,
    // rank[v] for v in 1..=n; rank[0] unused
    rank: Vec<u32>,
}

impl VarOrder {
    pub fn new(order: Vec<Variable>) -> Result<Self, CompileError> {
        let n = order.len();
        let mut rank = vec![u32::MAX; n + 1];
        for (pos, v) in order.iter().enumerate() {
            let i = v.index() as usize;
            if i > n {
                return Err(CompileError::InvalidOrder(format!("{v} is outside 1..={n}")));
            }
            if rank[i] != u32::MAX {
                return Err(CompileError::InvalidOrder(format!("{v} listed twice")));
            }
            rank[i] = pos as u32;
        }
        Ok(VarOrder { order, rank })
    }

    /// `x1 < x2 < … < xn`.
    pub fn natural(n: u32) -> Self {
        VarOrder::new((1..=n).map(|i| Variable::new(i).unwrap()).collect()).expect("identity is a permutation")
    }

    /// Parses whitespace-separated variable indices; lines starting with `c`
    /// are comments.
    pub fn parse(text: &str) -> Result<Self, CompileError> {
        let mut order = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.starts_with('c') {
                continue;
            }
            for tok in line.split_whitespace() {
                let v = tok
                    .parse::<u32>()
                    .ok()
                    .and_then(Variable::new)
                    .ok_or_else(|| CompileError::InvalidOrder(format!("bad variable `{tok}`")))?;
                order.push(v);
            }
        }
        VarOrder::new(order)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.order
    }

    /// Position of `var` in the order, if it belongs to the universe.
    pub fn rank(&self, var: Variable) -> Option<usize> {
        self.rank
            .get(var.index() as usize)
            .filter(|&&r| r != u32::MAX)
            .map(|&r| r as usize)
    }

    /// First variable of the order occurring in `delta`.
    pub fn first_in(&self, delta: &Cnf) -> Option<Variable> {
        delta
            .clauses()
            .iter()
            .flat_map(|c| c.literals().iter().map(|l| l.var()))
            .min_by_key(|&v| self.rank(v).unwrap_or(usize::MAX))
    }
}

impl fmt::Display for VarOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.order.iter().map(|v| v.index().to_string()).collect();
        f.write_str(&strs.join(" "))
    }
}

#[derive(Debug, Clone)]
pub struct CompileConfig {
    pub mode: Mode,
    pub caching: bool,
    pub unit_propagation: bool,
    pub heuristic: Heuristic,
    pub order: Option<VarOrder>,
    pub time_limit: Option<Duration>,
    /// Upper bound on store size, used as a memory budget.
    pub node_limit: Option<usize>,
}

impl CompileConfig {
    fn with_mode(mode: Mode, order: Option<VarOrder>) -> Self {
        CompileConfig {
            mode,
            caching: true,
            unit_propagation: true,
            heuristic: Heuristic::default(),
            order,
            time_limit: None,
            node_limit: None,
        }
    }

    pub fn free() -> Self {
        Self::with_mode(Mode::Free, None)
    }

    pub fn ordered(order: VarOrder) -> Self {
        Self::with_mode(Mode::Ordered, Some(order))
    }

    pub fn decomposed() -> Self {
        Self::with_mode(Mode::Decomposed, None)
    }

    pub fn caching(mut self, on: bool) -> Self {
        self.caching = on;
        self
    }

    pub fn unit_propagation(mut self, on: bool) -> Self {
        self.unit_propagation = on;
        self
    }

    pub fn heuristic(mut self, h: Heuristic) -> Self {
        self.heuristic = h;
        self
    }

    pub fn time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn node_limit(mut self, limit: usize) -> Self {
        self.node_limit = Some(limit);
        self
    }

    fn validate(&self, delta: &Cnf) -> Result<(), CompileError> {
        match (self.mode, &self.order) {
            (Mode::Ordered, None) => Err(CompileError::InvalidConfig(
                "ordered compilation needs a variable order".into(),
            )),
            (Mode::Ordered, Some(order)) if order.len() != delta.num_vars() as usize => {
                Err(CompileError::InvalidOrder(format!(
                    "order has {} variables, formula has {}",
                    order.len(),
                    delta.num_vars()
                )))
            }
            (Mode::Free | Mode::Decomposed, Some(_)) => Err(CompileError::InvalidConfig(format!(
                "a variable order only applies to ordered compilation, not {}",
                self.mode
            ))),
            _ => Ok(()),
        }
    }
}

/// Fingerprint of a residual formula: every surviving clause's original
/// index followed by its surviving literals. Two residuals of the same input
/// share a key exactly when they have the same surviving clauses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey(Box<[u32]>);

pub fn compute_key(delta: &Cnf) -> CacheKey {
    let size: usize = delta.clauses().iter().map(|c| c.len() + 2).sum();
    let mut words = Vec::with_capacity(size);
    for c in delta.clauses() {
        words.push(c.index() as u32);
        words.push(c.len() as u32);
        words.extend(c.literals().iter().map(|l| l.to_dimacs() as u32));
    }
    CacheKey(words.into_boxed_slice())
}

/// Formula cache. Lookups compare whole keys.
#[derive(Debug, Default)]
pub struct Cache {
    entries: FxHashMap<CacheKey, NodeId>,
    pub hits: u64,
    pub misses: u64,
}

impl Cache {
    pub fn lookup(&mut self, key: &CacheKey) -> Option<NodeId> {
        let hit = self.entries.get(key).copied();
        if hit.is_some() {
            self.hits += 1;
        } else {
            self.misses += 1;
        }
        hit
    }

    pub fn insert(&mut self, key: CacheKey, result: NodeId) {
        self.entries.insert(key, result);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Picks the branching variable for `delta`.
pub fn select_variable(delta: &Cnf, heuristic: Heuristic) -> Result<Variable, CompileError> {
    let vars = delta
        .clauses()
        .iter()
        .flat_map(|c| c.literals().iter().map(|l| l.var()));
    match heuristic {
        Heuristic::MinIndex => vars.min().ok_or(CompileError::NoVariables),
        Heuristic::MaxOccurrence => {
            let mut counts: HashMap<Variable, u32> = HashMap::new();
            for v in vars {
                *counts.entry(v).or_default() += 1;
            }
            counts
                .into_iter()
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .map(|(v, _)| v)
                .ok_or(CompileError::NoVariables)
        }
    }
}

/// Hooks into the search, for instrumentation and tests.
pub trait SearchObserver {
    fn branched(&mut self, _delta: &Cnf, _var: Variable) {}
    fn decomposed(&mut self, _delta: &Cnf, _parts: &[Cnf]) {}
}

struct NoObserver;
impl SearchObserver for NoObserver {}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub branches: u64,
    pub decompositions: u64,
    pub cache_hits: u64,
    pub cache_misses: u64,
}

#[derive(Debug, Clone)]
pub struct Compilation {
    pub circuit: Circuit,
    pub stats: SearchStats,
    pub elapsed: Duration,
}

enum Task {
    /// Entry point for a (sub)formula.
    Solve(Cnf),
    /// Entry point for `parent|lit`, conditioned when popped.
    SolveBranch(Arc<Cnf>, Literal),
    /// Decomposed mode after propagation.
    Split(Cnf),
    Emit(NodeId),
    Decide {
        var: Variable,
        key: Option<CacheKey>,
    },
    Conjoin {
        arity: usize,
        extra: Vec<NodeId>,
    },
}

struct Search<'a> {
    cfg: &'a CompileConfig,
    store: NnfStore,
    cache: Cache,
    stats: SearchStats,
    tasks: Vec<Task>,
    results: Vec<NodeId>,
}

impl Search<'_> {
    fn branch(&mut self, delta: Cnf, var: Variable, key: Option<CacheKey>, obs: &mut dyn SearchObserver) {
        obs.branched(&delta, var);
        self.stats.branches += 1;
        let parent = Arc::new(delta);
        self.tasks.push(Task::Decide { var, key });
        self.tasks.push(Task::SolveBranch(parent.clone(), var.positive()));
        self.tasks.push(Task::SolveBranch(parent, var.negative()));
    }

    fn probe(&mut self, delta: &Cnf) -> Result<Option<CacheKey>, NodeId> {
        if !self.cfg.caching {
            return Ok(None);
        }
        let key = compute_key(delta);
        match self.cache.lookup(&key) {
            Some(hit) => Err(hit),
            None => Ok(Some(key)),
        }
    }

    fn solve(&mut self, delta: Cnf, obs: &mut dyn SearchObserver) {
        if delta.has_empty_clause() {
            return self.results.push(NodeId::FALSE);
        }
        if delta.is_empty() {
            return self.results.push(NodeId::TRUE);
        }
        match self.cfg.mode {
            Mode::Free => {
                let key = match self.probe(&delta) {
                    Ok(k) => k,
                    Err(hit) => return self.results.push(hit),
                };
                let unit = if self.cfg.unit_propagation {
                    delta.clauses().iter().find(|c| c.len() == 1).map(|c| c.literals()[0])
                } else {
                    None
                };
                match unit {
                    // The falsifying branch is an immediate contradiction.
                    Some(lit) => {
                        obs.branched(&delta, lit.var());
                        self.stats.branches += 1;
                        let forced = delta.condition(lit);
                        self.tasks.push(Task::Decide { var: lit.var(), key });
                        if lit.is_positive() {
                            self.tasks.push(Task::Solve(forced));
                            self.tasks.push(Task::Emit(NodeId::FALSE));
                        } else {
                            self.tasks.push(Task::Emit(NodeId::FALSE));
                            self.tasks.push(Task::Solve(forced));
                        }
                    }
                    None => {
                        let var = select_variable(&delta, self.cfg.heuristic).expect("non-empty formula");
                        self.branch(delta, var, key, obs);
                    }
                }
            }
            Mode::Ordered => {
                if self.cfg.unit_propagation && delta.propagation_conflict() {
                    return self.results.push(NodeId::FALSE);
                }
                let key = match self.probe(&delta) {
                    Ok(k) => k,
                    Err(hit) => return self.results.push(hit),
                };
                let order = self.cfg.order.as_ref().expect("validated");
                let var = order.first_in(&delta).expect("non-empty formula");
                self.branch(delta, var, key, obs);
            }
            Mode::Decomposed => {
                if !self.cfg.unit_propagation {
                    return self.split(delta, obs);
                }
                let prop = delta.unit_propagate();
                if prop.conflict {
                    return self.results.push(NodeId::FALSE);
                }
                if prop.implied.is_empty() {
                    return self.split(prop.residual, obs);
                }
                let extra: Vec<NodeId> = prop.implied.iter().map(|&l| self.store.literal(l)).collect();
                self.tasks.push(Task::Conjoin { arity: 1, extra });
                self.tasks.push(Task::Split(prop.residual));
            }
        }
    }

    fn split(&mut self, delta: Cnf, obs: &mut dyn SearchObserver) {
        if delta.has_empty_clause() {
            return self.results.push(NodeId::FALSE);
        }
        if delta.is_empty() {
            return self.results.push(NodeId::TRUE);
        }
        let parts = delta.components();
        if parts.len() > 1 {
            obs.decomposed(&delta, &parts);
            self.stats.decompositions += 1;
            self.tasks.push(Task::Conjoin {
                arity: parts.len(),
                extra: Vec::new(),
            });
            self.tasks.extend(parts.into_iter().rev().map(Task::Solve));
            return;
        }
        let key = match self.probe(&delta) {
            Ok(k) => k,
            Err(hit) => return self.results.push(hit),
        };
        let var = select_variable(&delta, self.cfg.heuristic).expect("non-empty formula");
        self.branch(delta, var, key, obs);
    }

    fn check_limits(&self, deadline: Option<Instant>) -> Result<(), CompileError> {
        if deadline.is_some_and(|d| Instant::now() > d) {
            return Err(CompileError::Timeout);
        }
        match self.cfg.node_limit {
            Some(limit) if self.store.len() > limit => Err(CompileError::NodeLimit(limit)),
            _ => Ok(()),
        }
    }

    fn run(&mut self, obs: &mut dyn SearchObserver) -> Result<NodeId, CompileError> {
        let deadline = self.cfg.time_limit.map(|d| Instant::now() + d);
        let mut steps: u64 = 0;
        while let Some(task) = self.tasks.pop() {
            if steps.is_multiple_of(1024) {
                self.check_limits(deadline)?;
            }
            steps += 1;
            match task {
                Task::Solve(delta) => self.solve(delta, obs),
                Task::SolveBranch(parent, lit) => self.solve(parent.condition(lit), obs),
                Task::Split(delta) => self.split(delta, obs),
                Task::Emit(id) => self.results.push(id),
                Task::Decide { var, key } => {
                    let high = self.results.pop().expect("high child");
                    let low = self.results.pop().expect("low child");
                    let id = self.store.get_node(var, low, high);
                    if let Some(key) = key {
                        self.cache.insert(key, id);
                    }
                    self.results.push(id);
                }
                Task::Conjoin { arity, extra } => {
                    let at = self.results.len() - arity;
                    let kids: Vec<NodeId> = self.results.drain(at..).collect();
                    let id = if kids.contains(&NodeId::FALSE) {
                        NodeId::FALSE
                    } else {
                        self.store
                            .get_and_node(kids.into_iter().chain(extra))
                            .expect("no false conjunct")
                    };
                    self.results.push(id);
                }
            }
        }
        self.check_limits(deadline)?;
        debug_assert_eq!(self.results.len(), 1);
        Ok(self.results.pop().expect("root result"))
    }
}

/// Compiles `delta` in the mode selected by `cfg`.
pub fn compile(delta: &Cnf, cfg: &CompileConfig) -> Result<Compilation, CompileError> {
    compile_observed(delta, cfg, &mut NoObserver)
}

pub fn compile_observed(
    delta: &Cnf,
    cfg: &CompileConfig,
    obs: &mut dyn SearchObserver,
) -> Result<Compilation, CompileError> {
    cfg.validate(delta)?;
    let start = Instant::now();
    let mut search = Search {
        cfg,
        store: NnfStore::new(),
        cache: Cache::default(),
        stats: SearchStats::default(),
        tasks: vec![Task::Solve(delta.clone())],
        results: Vec::new(),
    };
    let root = search.run(obs)?;
    let stats = SearchStats {
        cache_hits: search.cache.hits,
        cache_misses: search.cache.misses,
        ..search.stats
    };
    log::debug!(
        "{} compilation: {} store nodes, {:?}",
        cfg.mode,
        search.store.len(),
        stats
    );
    Ok(Compilation {
        circuit: Circuit::new(Arc::new(search.store), root, delta.num_vars()),
        stats,
        elapsed: start.elapsed(),
    })
}

/// FBDD compilation (free variable choice).
pub fn compile_free(delta: &Cnf, cfg: &CompileConfig) -> Result<Circuit, CompileError> {
    expect_mode(cfg, Mode::Free)?;
    compile(delta, cfg).map(|c| c.circuit)
}

/// OBDD compilation under `order`; `cfg.order` is ignored.
pub fn compile_ordered(delta: &Cnf, order: &VarOrder, cfg: &CompileConfig) -> Result<Circuit, CompileError> {
    expect_mode(cfg, Mode::Ordered)?;
    let cfg = CompileConfig {
        order: Some(order.clone()),
        ..cfg.clone()
    };
    compile(delta, &cfg).map(|c| c.circuit)
}

/// Decision-DNNF compilation (dynamic decomposition).
pub fn compile_decomposed(delta: &Cnf, cfg: &CompileConfig) -> Result<Circuit, CompileError> {
    expect_mode(cfg, Mode::Decomposed)?;
    compile(delta, cfg).map(|c| c.circuit)
}

fn expect_mode(cfg: &CompileConfig, mode: Mode) -> Result<(), CompileError> {
    if cfg.mode != mode {
        return Err(CompileError::InvalidConfig(format!(
            "expected mode {mode}, got {}",
            cfg.mode
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nnf::Node;

    fn running() -> Cnf {
        Cnf::from_clauses(3, [vec![1, 2], vec![1, -2, -3], vec![-1, 2, -3]]).unwrap()
    }

    fn v(i: u32) -> Variable {
        Variable::new(i).unwrap()
    }

    fn all_configs(delta: &Cnf) -> Vec<CompileConfig> {
        let mut out = Vec::new();
        for caching in [false, true] {
            for up in [false, true] {
                for h in [Heuristic::MaxOccurrence, Heuristic::MinIndex] {
                    out.push(CompileConfig::free().caching(caching).unit_propagation(up).heuristic(h));
                    out.push(
                        CompileConfig::decomposed()
                            .caching(caching)
                            .unit_propagation(up)
                            .heuristic(h),
                    );
                }
                out.push(
                    CompileConfig::ordered(VarOrder::natural(delta.num_vars()))
                        .caching(caching)
                        .unit_propagation(up),
                );
            }
        }
        out
    }

    fn assert_equivalent(delta: &Cnf, c: &Circuit) {
        let n = delta.num_vars();
        for a in 0..1u32 << n {
            let asg: Vec<bool> = (0..n).map(|i| a >> i & 1 == 1).collect();
            assert_eq!(c.evaluate(&asg), delta.evaluate(&asg), "assignment {a:b}");
        }
    }

    #[test]
    fn keys_fingerprint_surviving_clauses() {
        let f = running();
        assert_eq!(compute_key(&f), compute_key(&f.clone()));
        assert_ne!(
            compute_key(&f.condition(v(1).negative())),
            compute_key(&f.condition(v(1).positive()))
        );
        // Extra clause satisfied by the same literal leaves the same survivors.
        let g = f.with_clause(&[v(1).positive()]).unwrap();
        assert_eq!(
            compute_key(&g.condition(v(1).positive())),
            compute_key(&f.condition(v(1).positive()))
        );
        // Reordering input clauses changes original indices but the same
        // clause set in the same input order hashes the same.
        let a = Cnf::from_clauses(2, [vec![1], vec![2]]).unwrap();
        let b = Cnf::from_clauses(2, [vec![1], vec![2]]).unwrap();
        assert_eq!(compute_key(&a), compute_key(&b));
    }

    #[test]
    fn select_variable_examples() {
        assert_eq!(select_variable(&running(), Heuristic::MinIndex).unwrap(), v(1));
        let f = Cnf::from_clauses(3, [vec![2, 3], vec![3]]).unwrap();
        assert_eq!(select_variable(&f, Heuristic::MaxOccurrence).unwrap(), v(3));
        let u = Cnf::from_clauses(1, [vec![1]]).unwrap();
        assert_eq!(select_variable(&u, Heuristic::MaxOccurrence).unwrap(), v(1));
        assert_eq!(select_variable(&u, Heuristic::MinIndex).unwrap(), v(1));
        assert_eq!(
            select_variable(&Cnf::new(2), Heuristic::MinIndex),
            Err(CompileError::NoVariables)
        );
    }

    #[test]
    fn sink_cases() {
        let empty = Cnf::new(3);
        let contra = Cnf::from_clauses(1, [vec![1]]).unwrap().condition(v(1).negative());
        for cfg in all_configs(&empty) {
            assert_eq!(compile(&empty, &cfg).unwrap().circuit.root(), NodeId::TRUE);
        }
        for cfg in all_configs(&contra) {
            assert_eq!(compile(&contra, &cfg).unwrap().circuit.root(), NodeId::FALSE);
        }
    }

    #[test]
    fn running_formula_all_configs_equivalent() {
        let f = running();
        for cfg in all_configs(&f) {
            let c = compile(&f, &cfg).unwrap().circuit;
            assert_equivalent(&f, &c);
            c.store().audit().unwrap();
        }
    }

    #[test]
    fn ordered_running_formula_shape() {
        let f = running();
        let c = compile_ordered(&f, &VarOrder::natural(3), &CompileConfig::ordered(VarOrder::natural(3))).unwrap();
        let s = c.stats();
        assert_eq!((s.nodes, s.edges), (6, 8));
        match c.node(c.root()) {
            Node::Decision { var, .. } => assert_eq!(*var, v(1)),
            other => panic!("root is {other:?}"),
        }
    }

    #[test]
    fn decomposed_splits_independent_clauses() {
        let f = Cnf::from_clauses(4, [vec![1, 2], vec![3, 4]]).unwrap();
        let c = compile_decomposed(&f, &CompileConfig::decomposed()).unwrap();
        match c.node(c.root()) {
            Node::And(ch) => assert_eq!(ch.len(), 2),
            other => panic!("root is {other:?}"),
        }
        assert_equivalent(&f, &c);
    }

    #[test]
    fn decomposed_unit_becomes_literal() {
        let f = Cnf::from_clauses(1, [vec![1]]).unwrap();
        let c = compile_decomposed(&f, &CompileConfig::decomposed()).unwrap();
        assert_eq!(c.node(c.root()), &Node::Literal(v(1).positive()));
        let c = compile_decomposed(&f, &CompileConfig::decomposed().unit_propagation(false)).unwrap();
        assert_eq!(
            c.node(c.root()),
            &Node::Decision {
                var: v(1),
                low: NodeId::FALSE,
                high: NodeId::TRUE
            }
        );
    }

    #[test]
    fn free_mode_never_emits_literal_nodes() {
        let f = Cnf::from_clauses(3, [vec![1], vec![-1, 2], vec![2, 3]]).unwrap();
        let c = compile_free(&f, &CompileConfig::free()).unwrap();
        assert!(c
            .reachable()
            .iter()
            .all(|&id| !matches!(c.node(id), Node::Literal(_) | Node::And(_))));
        assert_equivalent(&f, &c);
    }

    #[test]
    fn config_validation() {
        let f = running();
        let mut cfg = CompileConfig::ordered(VarOrder::natural(3));
        cfg.order = None;
        assert!(matches!(compile(&f, &cfg), Err(CompileError::InvalidConfig(_))));
        let cfg = CompileConfig::ordered(VarOrder::natural(2));
        assert!(matches!(compile(&f, &cfg), Err(CompileError::InvalidOrder(_))));
        assert!(compile_free(&f, &CompileConfig::decomposed()).is_err());
    }

    #[test]
    fn var_order_parsing() {
        let o = VarOrder::parse("c order\n3 1\n2\n").unwrap();
        assert_eq!(o.rank(v(3)), Some(0));
        assert_eq!(o.rank(v(2)), Some(2));
        assert_eq!(o.to_string(), "3 1 2");
        assert!(VarOrder::parse("1 1").is_err());
        assert!(VarOrder::parse("1 3").is_err());
        assert!(VarOrder::parse("1 x").is_err());
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        // x1 -> x2 -> ... -> xn forces a search path of depth n.
        let n = 2_000u32;
        let clauses: Vec<Vec<i32>> = (1..n as i32).map(|i| vec![-i, i + 1]).collect();
        let f = Cnf::from_clauses(n, clauses).unwrap();
        let cfg = CompileConfig::ordered(VarOrder::natural(n)).unit_propagation(false);
        let c = compile(&f, &cfg).unwrap().circuit;
        assert_eq!(c.stats().nodes, 2 * n as usize);
    }

    #[test]
    fn time_limit_is_enforced() {
        let n = 60u32;
        let clauses: Vec<Vec<i32>> = (1..=n as i32).step_by(2).map(|i| vec![i, i + 1]).collect();
        let f = Cnf::from_clauses(n, clauses).unwrap();
        let cfg = CompileConfig::free()
            .caching(false)
            .heuristic(Heuristic::MinIndex)
            .time_limit(Duration::ZERO);
        assert_eq!(compile(&f, &cfg).unwrap_err(), CompileError::Timeout);
    }
}
