//! Hash-consed NNF DAG store.
//!
//! ```text
//!   nodes: Vec<Node>                unique: HashMap<Node, NodeId>
//!   [0] False                       Decision(x, lo, hi) -> id
//!   [1] True                        And([c1, .., ck])   -> id
//!   [2..] literals, decisions, ands Literal(l)          -> id
//! ```
//!
//! Nodes are only ever created through [`NnfStore::get_node`],
//! [`NnfStore::get_and_node`] and [`NnfStore::literal`], which apply the
//! reduction rules on the way in: a decision with equal children is its child,
//! and a structure that already exists is returned instead of duplicated. A
//! child is always created before its parent, so ids are a topological order.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::cnf::{Literal, Variable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NnfError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("the 0-sink cannot be a conjunct of an and-node")]
    FalseConjunct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const FALSE: NodeId = NodeId(0);
    pub const TRUE: NodeId = NodeId(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_sink(self) -> bool {
        self.0 < 2
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    False,
    True,
    Literal(Literal),
    Decision {
        var: Variable,
        low: NodeId,
        high: NodeId,
    },
    /// Children sorted by id, at least two, none constant or an and-node.
    And(Box<[NodeId]>),
}

impl Node {
    /// Child ids in order (low before high for decisions).
    pub fn child_ids(&self) -> ChildIter<'_> {
        match self {
            Node::Decision { low, high, .. } => ChildIter::Pair([*low, *high], 0),
            Node::And(ch) => ChildIter::Slice(ch.iter()),
            _ => ChildIter::Pair([NodeId::FALSE; 2], 2),
        }
    }

    pub fn edge_count(&self) -> usize {
        match self {
            Node::Decision { .. } => 2,
            Node::And(ch) => ch.len(),
            _ => 0,
        }
    }
}

pub enum ChildIter<'a> {
    Pair([NodeId; 2], usize),
    Slice(std::slice::Iter<'a, NodeId>),
}

impl Iterator for ChildIter<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        match self {
            ChildIter::Pair(ids, pos) => {
                let out = ids.get(*pos).copied();
                *pos += 1;
                out
            }
            ChildIter::Slice(it) => it.next().copied(),
        }
    }
}

/// Arena of NNF nodes with a unique table.
#[derive(Debug, Clone)]
pub struct NnfStore {
    nodes: Vec<Node>,
    unique: FxHashMap<Node, NodeId>,
}

impl Default for NnfStore {
    fn default() -> Self {
        Self::new()
    }
}

impl NnfStore {
    pub fn new() -> Self {
        NnfStore {
            nodes: vec![Node::False, Node::True],
            unique: FxHashMap::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = NodeId(u32::try_from(self.nodes.len()).expect("node arena overflow"));
        self.nodes.push(node.clone());
        self.unique.insert(node, id);
        id
    }

    /// Decision node on `var` with the given low (`var = 0`) and high
    /// (`var = 1`) children.
    pub fn get_node(&mut self, var: Variable, low: NodeId, high: NodeId) -> NodeId {
        debug_assert!(low.index() < self.nodes.len() && high.index() < self.nodes.len());
        if low == high {
            return low;
        }
        self.intern(Node::Decision { var, low, high })
    }

    pub fn literal(&mut self, lit: Literal) -> NodeId {
        self.intern(Node::Literal(lit))
    }

    /// Conjunction of `children` in canonical form: constants absorbed, nested
    /// conjunctions inlined, duplicates removed, sorted by id.
    pub fn get_and_node(&mut self, children: impl IntoIterator<Item = NodeId>) -> Result<NodeId, NnfError> {
        let mut flat: Vec<NodeId> = Vec::new();
        for child in children {
            match &self.nodes[child.index()] {
                Node::False => return Err(NnfError::FalseConjunct),
                Node::True => {}
                Node::And(grand) => flat.extend_from_slice(grand),
                _ => flat.push(child),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        Ok(match flat.len() {
            0 => NodeId::TRUE,
            1 => flat[0],
            _ => self.intern(Node::And(flat.into_boxed_slice())),
        })
    }

    /// Ids reachable from `root`, ascending (children before parents).
    pub fn reachable(&self, root: NodeId) -> Vec<NodeId> {
        let mut mark = vec![false; root.index() + 1];
        mark[root.index()] = true;
        for i in (0..=root.index()).rev() {
            if mark[i] {
                for c in self.nodes[i].child_ids() {
                    mark[c.index()] = true;
                }
            }
        }
        mark.iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| NodeId(i as u32))
            .collect()
    }

    /// Independent post-hoc scan for violations of the reduction invariants.
    pub fn audit(&self) -> Result<(), String> {
        let mut seen: HashSet<&Node> = HashSet::with_capacity(self.nodes.len());
        for (i, node) in self.nodes.iter().enumerate() {
            if !seen.insert(node) {
                return Err(format!("node #{i} duplicates an earlier node: {node:?}"));
            }
            match node {
                Node::False if i != 0 => return Err(format!("stray 0-sink at #{i}")),
                Node::True if i != 1 => return Err(format!("stray 1-sink at #{i}")),
                Node::Decision { low, high, .. } => {
                    if low == high {
                        return Err(format!("decision #{i} has identical children"));
                    }
                    if low.index() >= i || high.index() >= i {
                        return Err(format!("decision #{i} points forward"));
                    }
                }
                Node::And(ch) => {
                    if ch.len() < 2 {
                        return Err(format!("and-node #{i} has {} children", ch.len()));
                    }
                    if ch.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(format!("and-node #{i} children not strictly sorted"));
                    }
                    for c in ch.iter() {
                        if c.index() >= i {
                            return Err(format!("and-node #{i} points forward"));
                        }
                        match self.nodes[c.index()] {
                            Node::False | Node::True => return Err(format!("and-node #{i} has a constant child")),
                            Node::And(_) => return Err(format!("and-node #{i} has a nested and child")),
                            _ => {}
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// A rooted view into a frozen store, with the size of the variable universe
/// the circuit is interpreted over.
#[derive(Debug, Clone)]
pub struct Circuit {
    store: Arc<NnfStore>,
    root: NodeId,
    universe: u32,
}

/// Reachable node and edge counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stats {
    pub nodes: usize,
    pub edges: usize,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nodes={} edges={}", self.nodes, self.edges)
    }
}

impl Circuit {
    pub fn new(store: Arc<NnfStore>, root: NodeId, universe: u32) -> Self {
        assert!(root.index() < store.len(), "root {root} is not in the store");
        Circuit { store, root, universe }
    }

    /// A circuit consisting of one sink in a fresh store.
    pub fn constant(value: bool, universe: u32) -> Self {
        let root = if value { NodeId::TRUE } else { NodeId::FALSE };
        Circuit::new(Arc::new(NnfStore::new()), root, universe)
    }

    pub fn store(&self) -> &NnfStore {
        &self.store
    }

    pub fn shared_store(&self) -> &Arc<NnfStore> {
        &self.store
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn node(&self, id: NodeId) -> &Node {
        self.store.node(id)
    }

    pub fn reachable(&self) -> Vec<NodeId> {
        self.store.reachable(self.root)
    }

    pub fn stats(&self) -> Stats {
        let reach = self.reachable();
        Stats {
            nodes: reach.len(),
            edges: reach.iter().map(|&id| self.node(id).edge_count()).sum(),
        }
    }

    /// Evaluates the circuit under a total assignment (`assignment[v - 1]`).
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        let reach = self.reachable();
        let mut value = vec![false; self.root.index() + 1];
        for id in reach {
            value[id.index()] = match self.node(id) {
                Node::False => false,
                Node::True => true,
                Node::Literal(l) => l.eval(assignment[l.var().index() as usize - 1]),
                Node::Decision { var, low, high } => {
                    if assignment[var.index() as usize - 1] {
                        value[high.index()]
                    } else {
                        value[low.index()]
                    }
                }
                Node::And(ch) => ch.iter().all(|c| value[c.index()]),
            };
        }
        value[self.root.index()]
    }

    /// Renders the circuit in the `.nnf` text format. Decision nodes are
    /// expanded to `O j 2 a b` where `a` conjoins `-j` with the low child and
    /// `b` conjoins `j` with the high child.
    pub fn serialize(&self) -> String {
        let mut w = NnfWriter::default();
        let mut line_of: HashMap<NodeId, usize> = HashMap::new();
        for id in self.reachable() {
            let line = match self.node(id) {
                // Sinks below a decision are folded into its branches.
                Node::False if id == self.root => w.false_line(),
                Node::True if id == self.root => w.true_line(),
                Node::False | Node::True => continue,
                Node::Literal(l) => w.literal_line(*l),
                Node::And(ch) => {
                    let kids: Vec<usize> = ch.iter().map(|c| line_of[c]).collect();
                    w.push_and(&kids)
                }
                Node::Decision { var, low, high } => {
                    let a = w.branch_line(var.negative(), *low, &line_of);
                    let b = w.branch_line(var.positive(), *high, &line_of);
                    w.push(format!("O {} 2 {a} {b}", var.index()), 2)
                }
            };
            line_of.insert(id, line);
        }
        // A conditioned circuit can mention variables beyond its universe size.
        let max_var = w.literals.keys().map(|l| l.var().index()).max().unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "nnf {} {} {}", w.lines.len(), w.edges, self.universe.max(max_var));
        for l in &w.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

#[derive(Default)]
struct NnfWriter {
    lines: Vec<String>,
    edges: usize,
    false_line: Option<usize>,
    true_line: Option<usize>,
    literals: HashMap<Literal, usize>,
    branches: HashMap<(Literal, NodeId), usize>,
}

impl NnfWriter {
    fn push(&mut self, line: String, edges: usize) -> usize {
        self.lines.push(line);
        self.edges += edges;
        self.lines.len() - 1
    }

    fn false_line(&mut self) -> usize {
        if let Some(l) = self.false_line {
            return l;
        }
        let l = self.push("O 0 0".into(), 0);
        self.false_line = Some(l);
        l
    }

    fn true_line(&mut self) -> usize {
        if let Some(l) = self.true_line {
            return l;
        }
        let l = self.push("A 0".into(), 0);
        self.true_line = Some(l);
        l
    }

    fn literal_line(&mut self, lit: Literal) -> usize {
        if let Some(&l) = self.literals.get(&lit) {
            return l;
        }
        let l = self.push(format!("L {lit}"), 0);
        self.literals.insert(lit, l);
        l
    }

    fn push_and(&mut self, kids: &[usize]) -> usize {
        let mut s = format!("A {}", kids.len());
        for k in kids {
            let _ = write!(s, " {k}");
        }
        self.push(s, kids.len())
    }

    fn branch_line(&mut self, lit: Literal, child: NodeId, line_of: &HashMap<NodeId, usize>) -> usize {
        match child {
            NodeId::FALSE => self.false_line(),
            NodeId::TRUE => self.literal_line(lit),
            _ => {
                if let Some(&l) = self.branches.get(&(lit, child)) {
                    return l;
                }
                let lit_line = self.literal_line(lit);
                let l = self.push_and(&[lit_line, line_of[&child]]);
                self.branches.insert((lit, child), l);
                l
            }
        }
    }
}

#[derive(Debug, Clone)]
enum RawLine {
    Literal(Literal),
    And(Vec<usize>),
    False,
    Or(u32, Vec<usize>),
}

/// One side of a recognized decision pattern.
#[derive(Debug, Clone)]
enum Branch {
    False,
    /// Conjunction of the decision literal with the listed lines (empty = 1).
    With(Literal, Vec<usize>),
}

/// Parses the `.nnf` format produced by [`Circuit::serialize`] into a fresh
/// store. The last node line is the root.
pub fn parse_nnf(text: &str) -> Result<Circuit, NnfError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'));

    let (hline, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "nnf" {
        return Err(perr(hline, "expected `nnf <nodes> <edges> <vars>`"));
    }
    let num = |s: &str, what: &str| -> Result<usize, NnfError> {
        s.parse::<usize>()
            .map_err(|_| perr(hline, &format!("bad {what} count")))
    };
    let declared_nodes = num(h[1], "node")?;
    let declared_edges = num(h[2], "edge")?;
    let universe = u32::try_from(num(h[3], "variable")?).map_err(|_| perr(hline, "universe too large"))?;

    let mut raw: Vec<RawLine> = Vec::with_capacity(declared_nodes);
    let mut line_no: Vec<usize> = Vec::with_capacity(declared_nodes);
    let mut edges = 0usize;
    for (ln, line) in lines {
        let idx = raw.len();
        if idx >= declared_nodes {
            return Err(perr(ln, "more node lines than declared"));
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let int =
            |s: &str| -> Result<i64, NnfError> { s.parse::<i64>().map_err(|_| perr(ln, &format!("bad number `{s}`"))) };
        let child = |s: &str| -> Result<usize, NnfError> {
            let c = int(s)?;
            if c < 0 || c as usize >= declared_nodes {
                return Err(perr(ln, &format!("dangling reference to node {c}")));
            }
            if c as usize >= idx {
                return Err(perr(ln, &format!("reference to node {c} is not topological")));
            }
            Ok(c as usize)
        };
        let node = match f.first().copied() {
            Some("L") if f.len() == 2 => {
                let code = int(f[1])?;
                let lit = i32::try_from(code)
                    .ok()
                    .and_then(Literal::from_dimacs)
                    .ok_or_else(|| perr(ln, "bad literal"))?;
                RawLine::Literal(lit)
            }
            Some("A") if f.len() >= 2 => {
                let k = int(f[1])?;
                if k < 0 || f.len() != 2 + k as usize {
                    return Err(perr(ln, "and-node child count mismatch"));
                }
                let kids = f[2..].iter().map(|s| child(s)).collect::<Result<Vec<_>, _>>()?;
                edges += kids.len();
                RawLine::And(kids)
            }
            Some("O") if f.len() >= 3 => {
                let j = int(f[1])?;
                let k = int(f[2])?;
                if j < 0 || j > i32::MAX as i64 || k < 0 || f.len() != 3 + k as usize {
                    return Err(perr(ln, "or-node field mismatch"));
                }
                let kids = f[3..].iter().map(|s| child(s)).collect::<Result<Vec<_>, _>>()?;
                edges += kids.len();
                if k == 0 {
                    RawLine::False
                } else if j == 0 || k != 2 {
                    return Err(perr(ln, "only decision or-nodes `O j 2 a b` are supported"));
                } else {
                    RawLine::Or(j as u32, kids)
                }
            }
            _ => return Err(perr(ln, &format!("malformed node line `{line}`"))),
        };
        raw.push(node);
        line_no.push(ln);
    }
    if raw.len() != declared_nodes {
        return Err(perr(
            hline,
            &format!("declared {declared_nodes} nodes, found {}", raw.len()),
        ));
    }
    if edges != declared_edges {
        return Err(perr(hline, &format!("declared {declared_edges} edges, found {edges}")));
    }
    if raw.is_empty() {
        return Err(perr(hline, "no nodes"));
    }

    // Recognize decision patterns first so auxiliary lines are never built.
    let mut decisions: HashMap<usize, (Variable, Branch, Branch)> = HashMap::new();
    for (i, r) in raw.iter().enumerate() {
        if let RawLine::Or(j, kids) = r {
            let var = Variable::new(*j).expect("checked above");
            let d = recognize_decision(&raw, var, kids[0], kids[1])
                .ok_or_else(|| perr(line_no[i], &format!("or-node is not a decision on variable {j}")))?;
            decisions.insert(i, (var, d.0, d.1));
        }
    }

    let root_line = raw.len() - 1;
    let mut needed = vec![false; raw.len()];
    needed[root_line] = true;
    for i in (0..raw.len()).rev() {
        if !needed[i] {
            continue;
        }
        match &raw[i] {
            RawLine::And(kids) => kids.iter().for_each(|&k| needed[k] = true),
            RawLine::Or(..) => {
                let (_, lo, hi) = &decisions[&i];
                for b in [lo, hi] {
                    if let Branch::With(_, rest) = b {
                        rest.iter().for_each(|&k| needed[k] = true);
                    }
                }
            }
            _ => {}
        }
    }

    let mut store = NnfStore::new();
    let mut sem: Vec<NodeId> = vec![NodeId::FALSE; raw.len()];
    for i in 0..raw.len() {
        if !needed[i] {
            continue;
        }
        sem[i] = match &raw[i] {
            RawLine::False => NodeId::FALSE,
            RawLine::Literal(l) => store.literal(*l),
            RawLine::And(kids) => conjoin(&mut store, kids.iter().map(|&k| sem[k])),
            RawLine::Or(..) => {
                let (var, lo, hi) = &decisions[&i];
                let mut side = |b: &Branch| match b {
                    Branch::False => NodeId::FALSE,
                    Branch::With(_, rest) => conjoin(&mut store, rest.iter().map(|&k| sem[k])),
                };
                let low = side(lo);
                let high = side(hi);
                store.get_node(*var, low, high)
            }
        };
    }
    Ok(Circuit::new(Arc::new(store), sem[root_line], universe))
}

fn conjoin(store: &mut NnfStore, kids: impl Iterator<Item = NodeId>) -> NodeId {
    let kids: Vec<NodeId> = kids.collect();
    if kids.contains(&NodeId::FALSE) {
        return NodeId::FALSE;
    }
    store.get_and_node(kids).expect("false conjuncts filtered")
}

fn recognize_decision(raw: &[RawLine], var: Variable, a: usize, b: usize) -> Option<(Branch, Branch)> {
    let classify = |line: usize| -> Option<Branch> {
        match &raw[line] {
            RawLine::False => Some(Branch::False),
            RawLine::Literal(l) if l.var() == var => Some(Branch::With(*l, Vec::new())),
            RawLine::And(kids) => {
                let mut lit = None;
                let mut rest = Vec::new();
                for &k in kids {
                    match &raw[k] {
                        RawLine::Literal(l) if l.var() == var => {
                            if lit.replace(*l).is_some() {
                                return None;
                            }
                        }
                        _ => rest.push(k),
                    }
                }
                lit.map(|l| Branch::With(l, rest))
            }
            _ => None,
        }
    };
    let (ca, cb) = (classify(a)?, classify(b)?);
    let polarity = |br: &Branch| match br {
        Branch::With(l, _) => Some(l.is_positive()),
        Branch::False => None,
    };
    match (polarity(&ca), polarity(&cb)) {
        (Some(false), Some(true)) | (Some(false), None) | (None, Some(true)) | (None, None) => Some((ca, cb)),
        (Some(true), Some(false)) | (Some(true), None) | (None, Some(false)) => Some((cb, ca)),
        _ => None,
    }
}

fn perr(line: usize, msg: &str) -> NnfError {
    NnfError::Parse {
        line,
        msg: msg.to_string(),
    }
}
