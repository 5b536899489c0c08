//! Language membership checks, the clause script of a circuit, guided
//! recompilation from that script, and structural isomorphism.
//!
//! A circuit `G` in decision form maps to a CNF `Δ(G)` that records, in the
//! order of its literals, the decisions leading to the 0-sink. Literals added
//! for an and-node carry one fresh color per conjunct, so compiling `Δ(G)`
//! while following the colors (split) and first literals (branch) rebuilds a
//! circuit isomorphic to `G`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::cnf::{Cnf, CnfError, Literal, Variable};
use crate::compiler::{Mode, VarOrder};
use crate::nnf::{Circuit, NnfStore, Node, NodeId};
use crate::queries::{max_variable, VarSets, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    Fbdd,
    Obdd,
    DecisionDnnf,
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::Fbdd => "fbdd",
            Language::Obdd => "obdd",
            Language::DecisionDnnf => "decision-dnnf",
        })
    }
}

impl From<Mode> for Language {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Free => Language::Fbdd,
            Mode::Ordered => Language::Obdd,
            Mode::Decomposed => Language::DecisionDnnf,
        }
    }
}

/// One node on a witness path; `var` is `None` for and-nodes and sinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStep {
    pub node: NodeId,
    pub var: Option<Variable>,
}

/// Evidence that a circuit is outside a language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A node kind the language does not allow.
    ForeignNode { node: NodeId, kind: &'static str },
    /// A path from the root testing `var` twice.
    RepeatedVariable { var: Variable, path: Vec<PathStep> },
    /// Two children of an and-node mentioning the same variable.
    SharedVariable {
        node: NodeId,
        left: NodeId,
        right: NodeId,
        var: Variable,
    },
    /// A decision on `above` with a decision child on `below`, against the order.
    OrderViolation {
        parent: NodeId,
        child: NodeId,
        above: Variable,
        below: Variable,
    },
    /// A variable tested by the circuit but absent from the order.
    Unordered { node: NodeId, var: Variable },
    /// Variables forced to precede each other in a cycle, first repeated last.
    OrderCycle(Vec<Variable>),
    /// A failed reduction audit.
    NotReduced(String),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::ForeignNode { node, kind } => write!(f, "{kind}-node:{node}"),
            Witness::RepeatedVariable { var, path } => {
                write!(f, "repeated:{var}:path:")?;
                for (i, step) in path.iter().enumerate() {
                    if i > 0 {
                        f.write_str(">")?;
                    }
                    match step.var {
                        Some(v) => write!(f, "{}({v})", step.node)?,
                        None => write!(f, "{}", step.node)?,
                    }
                }
                Ok(())
            }
            Witness::SharedVariable { node, left, right, var } => {
                write!(f, "shared:{var}:and:{node}:children:{left},{right}")
            }
            Witness::OrderViolation {
                parent,
                child,
                above,
                below,
            } => write!(f, "order:{parent}({above})>{child}({below})"),
            Witness::Unordered { node, var } => write!(f, "unordered:{node}({var})"),
            Witness::OrderCycle(vars) => {
                let strs: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
                write!(f, "cycle:{}", strs.join("<"))
            }
            Witness::NotReduced(msg) => write!(f, "unreduced:{}", msg.replace(' ', "_")),
        }
    }
}

/// Verdict of a membership check. `order` holds the order a successful OBDD
/// check used or recovered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReport {
    pub language: Language,
    pub witness: Option<Witness>,
    pub order: Option<VarOrder>,
}

impl MembershipReport {
    fn pass(language: Language) -> Self {
        MembershipReport {
            language,
            witness: None,
            order: None,
        }
    }

    fn fail(language: Language, witness: Witness) -> Self {
        MembershipReport {
            language,
            witness: Some(witness),
            order: None,
        }
    }

    pub fn verdict(&self) -> bool {
        self.witness.is_none()
    }
}

impl fmt::Display for MembershipReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "verdict={} language={} witness=", self.verdict(), self.language)?;
        match &self.witness {
            Some(w) => write!(f, "{w}"),
            None => f.write_str("none"),
        }
    }
}

/// Shortest path from the root to `target`.
fn path_to(c: &Circuit, target: NodeId) -> Vec<NodeId> {
    let mut parent: HashMap<NodeId, NodeId> = HashMap::new();
    let mut queue = VecDeque::from([c.root()]);
    parent.insert(c.root(), c.root());
    while let Some(id) = queue.pop_front() {
        if id == target {
            break;
        }
        for k in c.node(id).child_ids() {
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(k) {
                e.insert(id);
                queue.push_back(k);
            }
        }
    }
    let mut path = vec![target];
    let mut cur = target;
    while cur != c.root() {
        cur = parent[&cur];
        path.push(cur);
    }
    path.reverse();
    path
}

fn step(c: &Circuit, node: NodeId) -> PathStep {
    let var = match c.node(node) {
        Node::Decision { var, .. } => Some(*var),
        Node::Literal(l) => Some(l.var()),
        _ => None,
    };
    PathStep { node, var }
}

fn witness_for(c: &Circuit, vs: &VarSets, violation: Violation) -> Witness {
    match violation {
        Violation::RepeatedVariable { node, var } => {
            let mut path = path_to(c, node);
            let mut cur = node;
            loop {
                let next = c.node(cur).child_ids().find(|&k| vs.contains(k, var));
                let Some(next) = next else { break };
                path.push(next);
                if step(c, next).var == Some(var) {
                    break;
                }
                cur = next;
            }
            Witness::RepeatedVariable {
                var,
                path: path.into_iter().map(|id| step(c, id)).collect(),
            }
        }
        Violation::SharedVariable { node, var } => {
            let mut holders = c.node(node).child_ids().filter(|&k| vs.contains(k, var));
            let left = holders.next().expect("shared variable has a first holder");
            let right = holders.next().expect("shared variable has a second holder");
            Witness::SharedVariable { node, left, right, var }
        }
    }
}

fn structural_witness(c: &Circuit) -> Option<Witness> {
    let vs = VarSets::new(c);
    if let Some(v) = vs.violation(c) {
        return Some(witness_for(c, &vs, v));
    }
    c.store().audit().err().map(Witness::NotReduced)
}

/// Sinks and decision nodes only, each variable tested at most once per path.
pub fn check_fbdd(c: &Circuit) -> MembershipReport {
    for id in c.reachable() {
        let kind = match c.node(id) {
            Node::Literal(_) => "literal",
            Node::And(_) => "and",
            _ => continue,
        };
        return MembershipReport::fail(Language::Fbdd, Witness::ForeignNode { node: id, kind });
    }
    match structural_witness(c) {
        Some(w) => MembershipReport::fail(Language::Fbdd, w),
        None => MembershipReport::pass(Language::Fbdd),
    }
}

/// An FBDD whose decisions follow `order`, or some order recovered from the
/// circuit when `order` is `None`.
pub fn check_obdd(c: &Circuit, order: Option<&VarOrder>) -> MembershipReport {
    let fbdd = check_fbdd(c);
    if let Some(w) = fbdd.witness {
        return MembershipReport::fail(Language::Obdd, w);
    }
    let mut edges: Vec<(NodeId, NodeId, Variable, Variable)> = Vec::new();
    for id in c.reachable() {
        if let Node::Decision { var, low, high } = c.node(id) {
            for k in [*low, *high] {
                if let Node::Decision { var: below, .. } = c.node(k) {
                    edges.push((id, k, *var, *below));
                }
            }
        }
    }
    let order = match order {
        Some(order) => order.clone(),
        None => match recover_order(c, &edges) {
            Ok(order) => order,
            Err(cycle) => return MembershipReport::fail(Language::Obdd, Witness::OrderCycle(cycle)),
        },
    };
    for id in c.reachable() {
        if let Node::Decision { var, .. } = c.node(id) {
            if order.rank(*var).is_none() {
                return MembershipReport::fail(Language::Obdd, Witness::Unordered { node: id, var: *var });
            }
        }
    }
    for (parent, child, above, below) in edges {
        if order.rank(above) >= order.rank(below) {
            return MembershipReport::fail(
                Language::Obdd,
                Witness::OrderViolation {
                    parent,
                    child,
                    above,
                    below,
                },
            );
        }
    }
    MembershipReport {
        order: Some(order),
        ..MembershipReport::pass(Language::Obdd)
    }
}

/// Topological order of the precedence constraints, smallest index first
/// among ready variables, padded with untested variables.
fn recover_order(c: &Circuit, edges: &[(NodeId, NodeId, Variable, Variable)]) -> Result<VarOrder, Vec<Variable>> {
    let n = max_variable(c).max(c.universe());
    let mut succ: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n as usize + 1];
    for &(_, _, a, b) in edges {
        succ[a.index() as usize].insert(b.index());
    }
    let mut indegree = vec![0usize; n as usize + 1];
    for s in &succ {
        for &b in s {
            indegree[b as usize] += 1;
        }
    }
    let mut ready: BTreeSet<u32> = (1..=n).filter(|&v| indegree[v as usize] == 0).collect();
    let mut order = Vec::with_capacity(n as usize);
    while let Some(v) = ready.pop_first() {
        order.push(Variable::new(v).expect("nonzero"));
        for &b in &succ[v as usize] {
            indegree[b as usize] -= 1;
            if indegree[b as usize] == 0 {
                ready.insert(b);
            }
        }
    }
    if order.len() == n as usize {
        return Ok(VarOrder::new(order).expect("a permutation of 1..=n"));
    }
    // Every remaining variable has a remaining predecessor: walk backwards
    // until a variable repeats.
    let remaining: Vec<u32> = (1..=n).filter(|&v| indegree[v as usize] > 0).collect();
    let mut pred: HashMap<u32, u32> = HashMap::new();
    for &a in &remaining {
        for &b in &succ[a as usize] {
            if indegree[b as usize] > 0 {
                pred.entry(b).or_insert(a);
            }
        }
    }
    let mut walk = vec![remaining[0]];
    let mut pos: HashMap<u32, usize> = HashMap::from([(remaining[0], 0)]);
    loop {
        let p = pred[walk.last().expect("nonempty")];
        if let Some(&start) = pos.get(&p) {
            let mut cycle: Vec<Variable> = walk[start..]
                .iter()
                .rev()
                .map(|&v| Variable::new(v).expect("nonzero"))
                .collect();
            let smallest = (0..cycle.len()).min_by_key(|&i| cycle[i]).expect("nonempty");
            cycle.rotate_left(smallest);
            cycle.push(cycle[0]);
            return Err(cycle);
        }
        pos.insert(p, walk.len());
        walk.push(p);
    }
}

/// Decision-form disjunctions, decomposable conjunctions, and no variable
/// tested below its own decision.
pub fn check_decision_dnnf(c: &Circuit) -> MembershipReport {
    match structural_witness(c) {
        Some(w) => MembershipReport::fail(Language::DecisionDnnf, w),
        None => MembershipReport::pass(Language::DecisionDnnf),
    }
}

pub fn check(c: &Circuit, language: Language, order: Option<&VarOrder>) -> MembershipReport {
    match language {
        Language::Fbdd => check_fbdd(c),
        Language::Obdd => check_obdd(c, order),
        Language::DecisionDnnf => check_decision_dnnf(c),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GuidedError {
    #[error("circuit is not a decision-DNNF: {0}")]
    NotDecisionDnnf(Witness),
    #[error("first literals mix colored and uncolored clauses")]
    MixedColors,
    #[error("clauses start with different variables {0} and {1}")]
    DisagreeingVariables(Variable, Variable),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// A literal with the colors attached to its position, head first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredLiteral {
    pub lit: Literal,
    pub colors: Vec<u32>,
}

/// A clause as an ordered sequence of colored literals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GuidedClause {
    pub lits: Vec<ColoredLiteral>,
}

impl GuidedClause {
    fn prepend(&self, lit: Literal) -> GuidedClause {
        let mut lits = Vec::with_capacity(self.lits.len() + 1);
        lits.push(ColoredLiteral {
            lit,
            colors: Vec::new(),
        });
        lits.extend(self.lits.iter().cloned());
        GuidedClause { lits }
    }

    fn paint(&self, color: u32) -> GuidedClause {
        let mut out = self.clone();
        if let Some(first) = out.lits.first_mut() {
            first.colors.insert(0, color);
        }
        out
    }
}

/// A CNF together with the script that steers its compilation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuidedCnf {
    pub num_vars: u32,
    /// A sequence, so repeated clauses stay aligned with the script.
    pub clauses: Vec<GuidedClause>,
}

impl GuidedCnf {
    /// The clauses without colors or order.
    pub fn base(&self) -> Result<Cnf, CnfError> {
        Cnf::from_clauses(
            self.num_vars,
            self.clauses
                .iter()
                .map(|c| c.lits.iter().map(|l| l.lit.to_dimacs()).collect::<Vec<_>>()),
        )
    }

    pub fn is_colored(&self) -> bool {
        self.clauses.iter().any(|c| c.lits.iter().any(|l| !l.colors.is_empty()))
    }
}

/// The clause script `Δ(G)` of a decision-DNNF. Literal nodes are read as
/// decisions between the two sinks.
pub fn circuit_to_cnf(c: &Circuit) -> Result<GuidedCnf, GuidedError> {
    if let Some(w) = check_decision_dnnf(c).witness {
        return Err(GuidedError::NotDecisionDnnf(w));
    }
    let mut next_color = 0u32;
    let empty = Arc::new(Vec::new());
    let mut delta: Vec<Arc<Vec<GuidedClause>>> = vec![empty.clone(); c.root().index() + 1];
    let decide = |var: Variable, low: &[GuidedClause], high: &[GuidedClause]| {
        low.iter()
            .map(|cl| cl.prepend(var.positive()))
            .chain(high.iter().map(|cl| cl.prepend(var.negative())))
            .collect::<Vec<_>>()
    };
    let bottom = vec![GuidedClause::default()];
    for id in c.reachable() {
        let clauses = match c.node(id) {
            Node::False => bottom.clone(),
            Node::True => Vec::new(),
            Node::Literal(l) if l.is_positive() => decide(l.var(), &bottom, &[]),
            Node::Literal(l) => decide(l.var(), &[], &bottom),
            Node::Decision { var, low, high } => decide(*var, &delta[low.index()], &delta[high.index()]),
            Node::And(ch) => {
                let mut out = Vec::new();
                for k in ch.iter() {
                    let color = next_color;
                    next_color += 1;
                    out.extend(delta[k.index()].iter().map(|cl| cl.paint(color)));
                }
                out
            }
        };
        delta[id.index()] = Arc::new(clauses);
    }
    let clauses = Arc::try_unwrap(std::mem::take(&mut delta[c.root().index()])).unwrap_or_else(|a| (*a).clone());
    Ok(GuidedCnf {
        num_vars: max_variable(c).max(c.universe()),
        clauses,
    })
}

/// Position inside one clause of the script: current literal and the next
/// unconsumed color of that literal.
#[derive(Debug, Clone, Copy)]
struct Cursor {
    clause: usize,
    lit: usize,
    color: usize,
}

struct Guided<'a> {
    g: &'a GuidedCnf,
    store: NnfStore,
}

impl Guided<'_> {
    fn first(&self, cur: Cursor) -> Option<&ColoredLiteral> {
        self.g.clauses[cur.clause].lits.get(cur.lit)
    }

    fn head_color(&self, cur: Cursor) -> Option<u32> {
        self.first(cur).and_then(|l| l.colors.get(cur.color).copied())
    }

    fn run(&mut self, cursors: Vec<Cursor>) -> Result<NodeId, GuidedError> {
        if cursors.iter().any(|&c| self.first(c).is_none()) {
            return Ok(NodeId::FALSE);
        }
        if cursors.is_empty() {
            return Ok(NodeId::TRUE);
        }
        let colored = cursors.iter().filter(|&&c| self.head_color(c).is_some()).count();
        if colored == cursors.len() {
            let mut parts: Vec<(u32, Vec<Cursor>)> = Vec::new();
            for &c in &cursors {
                let color = self.head_color(c).expect("colored");
                let popped = Cursor {
                    color: c.color + 1,
                    ..c
                };
                match parts.iter_mut().find(|(k, _)| *k == color) {
                    Some((_, part)) => part.push(popped),
                    None => parts.push((color, vec![popped])),
                }
            }
            let mut kids = Vec::with_capacity(parts.len());
            for (_, part) in parts {
                let kid = self.run(part)?;
                if kid == NodeId::FALSE {
                    return Ok(NodeId::FALSE);
                }
                kids.push(kid);
            }
            return Ok(self.store.get_and_node(kids).expect("no false conjunct"));
        }
        if colored > 0 {
            return Err(GuidedError::MixedColors);
        }
        let var = self.first(cursors[0]).expect("nonempty").lit.var();
        let mut low = Vec::new();
        let mut high = Vec::new();
        for &c in &cursors {
            let lit = self.first(c).expect("nonempty").lit;
            if lit.var() != var {
                return Err(GuidedError::DisagreeingVariables(var, lit.var()));
            }
            let next = Cursor {
                lit: c.lit + 1,
                color: 0,
                ..c
            };
            // x = 0 keeps the clauses starting with x, x = 1 those with -x.
            if lit.is_positive() {
                low.push(next);
            } else {
                high.push(next);
            }
        }
        let low = self.run(low)?;
        let high = self.run(high)?;
        Ok(self.store.get_node(var, low, high))
    }
}

/// Compiles a clause script, splitting where colors say so and otherwise
/// branching on the shared first variable.
pub fn compile_guided(g: &GuidedCnf) -> Result<Circuit, GuidedError> {
    let mut run = Guided {
        g,
        store: NnfStore::new(),
    };
    let cursors = (0..g.clauses.len())
        .map(|clause| Cursor {
            clause,
            lit: 0,
            color: 0,
        })
        .collect();
    let root = run.run(cursors)?;
    Ok(Circuit::new(Arc::new(run.store), root, g.num_vars))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Shape {
    Decision(Variable, u32, u32),
    And(Vec<u32>),
}

/// Structural equality of two circuits, possibly in different stores. A
/// literal node matches the decision between the two sinks it stands for.
pub fn isomorphic(a: &Circuit, b: &Circuit) -> bool {
    const FALSE: u32 = 0;
    const TRUE: u32 = 1;
    let mut table: HashMap<Shape, u32> = HashMap::new();
    let mut classify = |c: &Circuit| {
        let mut class = vec![FALSE; c.root().index() + 1];
        for id in c.reachable() {
            let shape = match c.node(id) {
                Node::False => {
                    class[id.index()] = FALSE;
                    continue;
                }
                Node::True => {
                    class[id.index()] = TRUE;
                    continue;
                }
                Node::Literal(l) if l.is_positive() => Shape::Decision(l.var(), FALSE, TRUE),
                Node::Literal(l) => Shape::Decision(l.var(), TRUE, FALSE),
                Node::Decision { var, low, high } => Shape::Decision(*var, class[low.index()], class[high.index()]),
                Node::And(ch) => {
                    let mut kids: Vec<u32> = ch.iter().map(|k| class[k.index()]).collect();
                    kids.sort_unstable();
                    Shape::And(kids)
                }
            };
            let fresh = table.len() as u32 + 2;
            class[id.index()] = *table.entry(shape).or_insert(fresh);
        }
        class[c.root().index()]
    };
    classify(a) == classify(b)
}
