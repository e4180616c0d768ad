//! The diagram model: layered nodes with low/high slots and two terminals.
//!
//! Layers are numbered from 1. Variable `x_i` is tested on layer `i`, and the
//! terminals always sit on layer `num_vars + 1`. A [`Diagram`] is an arbitrary
//! candidate; a [`Bdd`] is a diagram that passed [`Diagram::validate`].

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Index of a node inside its diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Outgoing edge slot of an internal node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Low,
    High,
}

impl Slot {
    pub const BOTH: [Slot; 2] = [Slot::Low, Slot::High];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Slot::Low => 0,
            Slot::High => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Terminal(bool),
    Internal { low: NodeId, high: NodeId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub layer: u32,
    pub kind: NodeKind,
}

impl Node {
    pub fn terminal(layer: u32, value: bool) -> Self {
        Node { layer, kind: NodeKind::Terminal(value) }
    }

    pub fn internal(layer: u32, low: NodeId, high: NodeId) -> Self {
        Node { layer, kind: NodeKind::Internal { low, high } }
    }

    #[inline]
    pub fn children(&self) -> Option<[NodeId; 2]> {
        match self.kind {
            NodeKind::Internal { low, high } => Some([low, high]),
            NodeKind::Terminal(_) => None,
        }
    }

    #[inline]
    pub fn child(&self, slot: Slot) -> Option<NodeId> {
        self.children().map(|c| c[slot.index()])
    }

    #[inline]
    pub fn terminal_value(&self) -> Option<bool> {
        match self.kind {
            NodeKind::Terminal(v) => Some(v),
            NodeKind::Internal { .. } => None,
        }
    }

    #[inline]
    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, NodeKind::Terminal(_))
    }
}

/// An unvalidated collection of nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub num_vars: u32,
    pub nodes: Vec<Node>,
    pub root: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Empty,
    NoVariables,
    RootOutOfRange(NodeId),
    DanglingReference { node: NodeId, slot: Slot, target: NodeId },
    LayerOutOfRange { node: NodeId, layer: u32 },
    TerminalOffLastLayer(NodeId),
    InternalOnLastLayer(NodeId),
    NotLayered { from: NodeId, to: NodeId },
    TerminalCount { zeros: usize, ones: usize },
    TwoNodes,
    SingleNodeNotTerminal(NodeId),
    Redundant(NodeId),
    DuplicateTriple(NodeId, NodeId),
    RootHasParent(NodeId),
    Unreachable(NodeId),
}

impl Violation {
    /// Stable short name of the violated rule.
    pub fn rule(&self) -> &'static str {
        match self {
            Violation::Empty => "empty",
            Violation::NoVariables => "no-variables",
            Violation::RootOutOfRange(_) => "root-out-of-range",
            Violation::DanglingReference { .. } => "dangling-reference",
            Violation::LayerOutOfRange { .. } => "layer-out-of-range",
            Violation::TerminalOffLastLayer(_) => "terminal-off-last-layer",
            Violation::InternalOnLastLayer(_) => "internal-on-last-layer",
            Violation::NotLayered { .. } => "not-layered",
            Violation::TerminalCount { .. } => "terminal-count",
            Violation::TwoNodes => "two-nodes",
            Violation::SingleNodeNotTerminal(_) => "single-node-not-terminal",
            Violation::Redundant(_) => "redundant-node",
            Violation::DuplicateTriple(..) => "duplicate-triple",
            Violation::RootHasParent(_) => "root-has-parent",
            Violation::Unreachable(_) => "unreachable",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.rule())?;
        match self {
            Violation::RootOutOfRange(n)
            | Violation::TerminalOffLastLayer(n)
            | Violation::InternalOnLastLayer(n)
            | Violation::SingleNodeNotTerminal(n)
            | Violation::Redundant(n)
            | Violation::RootHasParent(n)
            | Violation::Unreachable(n) => write!(f, " at {n}"),
            Violation::DanglingReference { node, slot, target } => {
                write!(f, " at {node} ({slot:?} -> {target})")
            }
            Violation::LayerOutOfRange { node, layer } => write!(f, " at {node} (layer {layer})"),
            Violation::NotLayered { from, to } => write!(f, " on edge {from} -> {to}"),
            Violation::TerminalCount { zeros, ones } => {
                write!(f, " ({zeros} zero, {ones} one)")
            }
            Violation::DuplicateTriple(a, b) => write!(f, " between {a} and {b}"),
            Violation::Empty | Violation::NoVariables | Violation::TwoNodes => Ok(()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule() == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl Diagram {
    /// Checks every structural rule of a reduced ordered BDD and lists all
    /// violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let n = self.nodes.len();
        if n == 0 {
            out.push(Violation::Empty);
            return ValidationReport { violations: out };
        }
        if self.num_vars == 0 {
            out.push(Violation::NoVariables);
        }
        if n == 2 {
            out.push(Violation::TwoNodes);
        }
        let last = self.num_vars.saturating_add(1);
        let root_ok = self.root.index() < n;
        if !root_ok {
            out.push(Violation::RootOutOfRange(self.root));
        }

        let mut refs_ok = true;
        let mut zeros = 0usize;
        let mut ones = 0usize;
        for (i, node) in self.nodes.iter().enumerate() {
            let id = NodeId(i as u32);
            if node.layer == 0 || node.layer > last {
                out.push(Violation::LayerOutOfRange { node: id, layer: node.layer });
            }
            match node.kind {
                NodeKind::Terminal(v) => {
                    if v {
                        ones += 1;
                    } else {
                        zeros += 1;
                    }
                    if node.layer != last {
                        out.push(Violation::TerminalOffLastLayer(id));
                    }
                }
                NodeKind::Internal { low, high } => {
                    if node.layer == last {
                        out.push(Violation::InternalOnLastLayer(id));
                    }
                    for (slot, target) in [(Slot::Low, low), (Slot::High, high)] {
                        if target.index() >= n {
                            refs_ok = false;
                            out.push(Violation::DanglingReference { node: id, slot, target });
                        } else if self.nodes[target.index()].layer <= node.layer {
                            out.push(Violation::NotLayered { from: id, to: target });
                        }
                    }
                    if low == high {
                        out.push(Violation::Redundant(id));
                    }
                }
            }
        }

        if n == 1 {
            if root_ok && !self.nodes[0].is_terminal() {
                out.push(Violation::SingleNodeNotTerminal(NodeId(0)));
            }
        } else if zeros != 1 || ones != 1 {
            out.push(Violation::TerminalCount { zeros, ones });
        }

        let layered = !out.iter().any(|v| {
            matches!(v, Violation::LayerOutOfRange { .. } | Violation::NotLayered { .. } | Violation::DanglingReference { .. })
        });
        let seq = layered.then(|| self.layer_sequence());
        self.find_duplicates(seq.as_deref(), &mut out);

        if root_ok && refs_ok {
            let mut has_parent = vec![false; n];
            for node in &self.nodes {
                if let Some(children) = node.children() {
                    for c in children {
                        has_parent[c.index()] = true;
                    }
                }
            }
            if has_parent[self.root.index()] {
                out.push(Violation::RootHasParent(self.root));
            }
            let mut reached = vec![false; n];
            reached[self.root.index()] = true;
            let mark = |u: NodeId, reached: &mut Vec<bool>, stack: &mut Vec<NodeId>| {
                if let Some(children) = self.nodes[u.index()].children() {
                    for c in children {
                        if !reached[c.index()] {
                            reached[c.index()] = true;
                            stack.push(c);
                        }
                    }
                }
            };
            let mut stack = Vec::new();
            match &seq {
                // edges only point downwards, so one top-down sweep suffices
                Some(seq) => {
                    for &u in seq {
                        if reached[u.index()] {
                            mark(u, &mut reached, &mut stack);
                        }
                    }
                }
                None => {
                    stack.push(self.root);
                    while let Some(u) = stack.pop() {
                        mark(u, &mut reached, &mut stack);
                    }
                }
            }
            for (i, r) in reached.iter().enumerate() {
                if !r {
                    out.push(Violation::Unreachable(NodeId(i as u32)));
                }
            }
        }

        ValidationReport { violations: out }
    }
}

impl Diagram {
    /// Node ids grouped by ascending layer, stable within a layer. Requires
    /// every layer to be in `1..=num_vars + 1`.
    fn layer_sequence(&self) -> Vec<NodeId> {
        let mut start = vec![0usize; self.num_vars as usize + 3];
        for node in &self.nodes {
            start[node.layer as usize + 1] += 1;
        }
        for i in 1..start.len() {
            start[i] += start[i - 1];
        }
        let mut seq = vec![NodeId(0); self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            let slot = &mut start[node.layer as usize];
            seq[*slot] = NodeId(i as u32);
            *slot += 1;
        }
        seq
    }

    /// Reports nodes sharing `(layer, low, high)` with an earlier node. With a
    /// layer-grouped sequence the lookup table only ever holds one layer.
    fn find_duplicates(&self, grouped: Option<&[NodeId]>, out: &mut Vec<Violation>) {
        let all: Vec<NodeId>;
        let seq = match grouped {
            Some(seq) => seq,
            None => {
                all = (0..self.nodes.len() as u32).map(NodeId).collect();
                &all
            }
        };
        let mut seen: HashMap<(u32, NodeId, NodeId), NodeId> = HashMap::new();
        let mut current = None;
        for &id in seq {
            let node = &self.nodes[id.index()];
            let NodeKind::Internal { low, high } = node.kind else { continue };
            if grouped.is_some() && current != Some(node.layer) {
                seen.clear();
                current = Some(node.layer);
            }
            match seen.entry((node.layer, low, high)) {
                Entry::Occupied(first) => out.push(Violation::DuplicateTriple(*first.get(), id)),
                Entry::Vacant(slot) => {
                    slot.insert(id);
                }
            }
        }
    }
}

/// A complete assignment to `x_1..x_n`; `values[i]` is the value of `x_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    /// Assignment number `index` of `2^n`, with `x_1` as the most significant bit.
    pub fn from_index(num_vars: u32, index: u64) -> Self {
        Assignment(
            (0..num_vars)
                .map(|i| (index >> (num_vars - 1 - i)) & 1 == 1)
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A validated reduced ordered BDD. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bdd {
    diagram: Diagram,
}

impl TryFrom<Diagram> for Bdd {
    type Error = Error;

    fn try_from(diagram: Diagram) -> Result<Self> {
        let report = diagram.validate();
        if !report.is_valid() {
            if report.violations.contains(&Violation::TwoNodes) {
                return Err(Error::TwoNodeDiagram);
            }
            return Err(Error::Invalid(report));
        }
        Ok(Bdd { diagram })
    }
}

impl Bdd {
    /// Wraps a diagram that is known to be valid. Checked in debug builds.
    pub(crate) fn from_valid(diagram: Diagram) -> Self {
        debug_assert!(diagram.validate().is_valid(), "{}", diagram.validate());
        Bdd { diagram }
    }

    /// The diagram consisting of a single terminal.
    pub fn constant(num_vars: u32, value: bool) -> Self {
        Bdd::from_valid(Diagram {
            num_vars,
            nodes: vec![Node::terminal(num_vars + 1, value)],
            root: NodeId(0),
        })
    }

    /// The diagram for the single variable `x_var` (1-based).
    pub fn variable(num_vars: u32, var: u32) -> Result<Self> {
        if var == 0 || var > num_vars {
            return Err(Error::Parameter(format!("variable {var} not in 1..={num_vars}")));
        }
        Ok(Bdd::from_valid(Diagram {
            num_vars,
            nodes: vec![
                Node::internal(var, NodeId(1), NodeId(2)),
                Node::terminal(num_vars + 1, false),
                Node::terminal(num_vars + 1, true),
            ],
            root: NodeId(0),
        }))
    }

    pub fn num_vars(&self) -> u32 {
        self.diagram.num_vars
    }

    pub fn terminal_layer(&self) -> u32 {
        self.diagram.num_vars + 1
    }

    pub fn len(&self) -> usize {
        self.diagram.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> NodeId {
        self.diagram.root
    }

    pub fn nodes(&self) -> &[Node] {
        &self.diagram.nodes
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node {
        &self.diagram.nodes[id.index()]
    }

    #[inline]
    pub fn layer(&self, id: NodeId) -> u32 {
        self.diagram.nodes[id.index()].layer
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn into_diagram(self) -> Diagram {
        self.diagram
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.diagram.nodes.len() as u32).map(NodeId)
    }

    /// All edges as `(source, slot, target)`, grouped by source node.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, Slot, NodeId)> + '_ {
        self.diagram.nodes.iter().enumerate().flat_map(|(i, node)| {
            node.children()
                .into_iter()
                .flat_map(move |[lo, hi]| [(NodeId(i as u32), Slot::Low, lo), (NodeId(i as u32), Slot::High, hi)])
        })
    }

    pub fn edge_count(&self) -> usize {
        self.diagram.nodes.iter().filter(|n| !n.is_terminal()).count() * 2
    }

    pub fn in_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.len()];
        for (_, _, v) in self.edges() {
            deg[v.index()] += 1;
        }
        deg
    }

    /// The terminal with the given value, if present.
    pub fn terminal(&self, value: bool) -> Option<NodeId> {
        self.node_ids()
            .find(|&id| self.node(id).terminal_value() == Some(value))
    }

    /// Follows `assignment` from the root; skipped layers accept either value.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool> {
        if assignment.len() != self.num_vars() as usize {
            return Err(Error::AssignmentLength {
                expected: self.num_vars() as usize,
                got: assignment.len(),
            });
        }
        let mut at = self.root();
        loop {
            let node = self.node(at);
            match node.kind {
                NodeKind::Terminal(v) => return Ok(v),
                NodeKind::Internal { low, high } => {
                    at = if assignment.0[node.layer as usize - 1] { high } else { low };
                }
            }
        }
    }

    /// Number of satisfying assignments over all `num_vars` variables.
    pub fn count_solutions(&self) -> BigUint {
        let n = self.len();
        let mut by_layer: Vec<Vec<NodeId>> = vec![Vec::new(); self.terminal_layer() as usize + 1];
        for id in self.node_ids() {
            by_layer[self.layer(id) as usize].push(id);
        }
        // counts[v] = satisfying completions of variables layer(v)..n reaching 1 from v
        let mut counts: Vec<BigUint> = vec![BigUint::zero(); n];
        for layer in by_layer.iter().rev() {
            for &id in layer {
                let node = self.node(id);
                counts[id.index()] = match node.kind {
                    NodeKind::Terminal(true) => BigUint::one(),
                    NodeKind::Terminal(false) => BigUint::zero(),
                    NodeKind::Internal { low, high } => {
                        let part = |c: NodeId| {
                            let skipped = self.layer(c) - node.layer - 1;
                            &counts[c.index()] << skipped as usize
                        };
                        part(low) + part(high)
                    }
                };
            }
        }
        let above_root = self.layer(self.root()) - 1;
        &counts[self.root().index()] << above_root as usize
    }

    /// Compares two diagrams up to renumbering of nodes. Returns the first
    /// point of disagreement found by a simultaneous walk from both roots.
    pub fn structural_diff(&self, other: &Bdd) -> Option<Mismatch> {
        if self.num_vars() != other.num_vars() {
            return Some(Mismatch::VarCount(self.num_vars(), other.num_vars()));
        }
        if self.len() != other.len() {
            return Some(Mismatch::NodeCount(self.len(), other.len()));
        }
        let mut map: Vec<Option<NodeId>> = vec![None; self.len()];
        let mut used = vec![false; other.len()];
        let mut stack = vec![(self.root(), other.root())];
        map[self.root().index()] = Some(other.root());
        used[other.root().index()] = true;
        while let Some((a, b)) = stack.pop() {
            let (na, nb) = (self.node(a), other.node(b));
            if na.layer != nb.layer {
                return Some(Mismatch::Node { left: a, right: b, reason: "layer differs" });
            }
            match (na.kind, nb.kind) {
                (NodeKind::Terminal(x), NodeKind::Terminal(y)) => {
                    if x != y {
                        return Some(Mismatch::Node { left: a, right: b, reason: "terminal value differs" });
                    }
                }
                (NodeKind::Internal { low: la, high: ha }, NodeKind::Internal { low: lb, high: hb }) => {
                    for (ca, cb) in [(la, lb), (ha, hb)] {
                        match map[ca.index()] {
                            Some(m) if m == cb => {}
                            Some(_) => {
                                return Some(Mismatch::Node { left: a, right: b, reason: "child differs" })
                            }
                            None => {
                                if used[cb.index()] {
                                    return Some(Mismatch::Node { left: a, right: b, reason: "child differs" });
                                }
                                map[ca.index()] = Some(cb);
                                used[cb.index()] = true;
                                stack.push((ca, cb));
                            }
                        }
                    }
                }
                _ => return Some(Mismatch::Node { left: a, right: b, reason: "node kind differs" }),
            }
        }
        None
    }

    pub fn is_isomorphic(&self, other: &Bdd) -> bool {
        self.structural_diff(other).is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    VarCount(u32, u32),
    NodeCount(usize, usize),
    Node { left: NodeId, right: NodeId, reason: &'static str },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::VarCount(a, b) => write!(f, "variable count {a} vs {b}"),
            Mismatch::NodeCount(a, b) => write!(f, "node count {a} vs {b}"),
            Mismatch::Node { left, right, reason } => write!(f, "{reason} at {left} / {right}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_node() -> Diagram {
        Diagram {
            num_vars: 1,
            nodes: vec![
                Node::internal(1, NodeId(1), NodeId(2)),
                Node::terminal(2, false),
                Node::terminal(2, true),
            ],
            root: NodeId(0),
        }
    }

    #[test]
    fn single_terminal_is_valid() {
        let d = Diagram { num_vars: 1, nodes: vec![Node::terminal(2, true)], root: NodeId(0) };
        assert!(d.validate().is_valid());
    }

    #[test]
    fn smallest_nontrivial_is_valid() {
        assert!(three_node().validate().is_valid());
    }

    #[test]
    fn duplicate_triple_reported() {
        // x1 ? a : b with a and b both testing x2 the same way.
        let d = Diagram {
            num_vars: 2,
            nodes: vec![
                Node::internal(1, NodeId(1), NodeId(2)),
                Node::internal(2, NodeId(3), NodeId(4)),
                Node::internal(2, NodeId(3), NodeId(4)),
                Node::terminal(3, false),
                Node::terminal(3, true),
            ],
            root: NodeId(0),
        };
        let report = d.validate();
        assert!(report.contains_rule("duplicate-triple"), "{report}");
        assert!(report
            .violations
            .contains(&Violation::DuplicateTriple(NodeId(1), NodeId(2))));
    }

    #[test]
    fn structural_faults_reported() {
        let mut d = three_node();
        d.nodes[0] = Node::internal(1, NodeId(1), NodeId(1));
        let r = d.validate();
        assert!(r.contains_rule("redundant-node"));
        assert!(r.contains_rule("unreachable"));

        let mut d = three_node();
        d.nodes[0] = Node::internal(1, NodeId(1), NodeId(7));
        assert!(d.validate().contains_rule("dangling-reference"));

        let mut d = three_node();
        d.nodes[1].layer = 1;
        let r = d.validate();
        assert!(r.contains_rule("not-layered"));
        assert!(r.contains_rule("terminal-off-last-layer"));

        let d = Diagram { num_vars: 1, nodes: vec![Node::terminal(2, false), Node::terminal(2, true)], root: NodeId(0) };
        assert!(d.validate().contains_rule("two-nodes"));
        assert!(matches!(Bdd::try_from(d), Err(Error::TwoNodeDiagram)));
    }

    #[test]
    fn evaluate_and_count() {
        let b = Bdd::try_from(three_node()).unwrap();
        assert!(!b.evaluate(&Assignment(vec![false])).unwrap());
        assert!(b.evaluate(&Assignment(vec![true])).unwrap());
        assert!(b.evaluate(&Assignment(vec![])).is_err());
        assert_eq!(b.count_solutions(), BigUint::from(1u32));

        let t = Bdd::constant(4, true);
        assert!(t.evaluate(&Assignment::from_index(4, 5)).unwrap());
        assert_eq!(t.count_solutions(), BigUint::from(16u32));
        assert_eq!(Bdd::constant(4, false).count_solutions(), BigUint::zero());
    }

    #[test]
    fn long_edges_count_skipped_layers() {
        // x1 alone over three variables: both edges skip layers 2 and 3.
        let x1 = Bdd::variable(3, 1).unwrap();
        assert_eq!(x1.count_solutions(), BigUint::from(4u32));
        // x3 alone: the root sits on layer 3, two layers above it are free.
        let x3 = Bdd::variable(3, 3).unwrap();
        assert_eq!(x3.count_solutions(), BigUint::from(4u32));
    }

    #[test]
    fn structural_diff_finds_swapped_children() {
        let a = Bdd::try_from(three_node()).unwrap();
        let mut d = three_node();
        d.nodes[0] = Node::internal(1, NodeId(2), NodeId(1));
        let b = Bdd::try_from(d).unwrap();
        assert!(a.is_isomorphic(&a.clone()));
        assert!(matches!(a.structural_diff(&b), Some(Mismatch::Node { .. })));
    }
}
