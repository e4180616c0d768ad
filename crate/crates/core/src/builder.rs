//! Hash-consed construction: reduction, binary apply and truth tables.

use std::collections::HashMap;

use crate::bdd::{Bdd, Diagram, Node, NodeId, NodeKind, Violation};
use crate::error::{Error, Result};

/// Largest variable count accepted by [`from_truth_table`].
pub const MAX_TRUTH_TABLE_VARS: u32 = 20;

/// Node store with a per-layer unique table. Slots 0 and 1 hold the
/// 0- and 1-terminal.
pub struct Builder {
    num_vars: u32,
    nodes: Vec<Node>,
    unique: Vec<HashMap<(NodeId, NodeId), NodeId>>,
}

impl Builder {
    pub const FALSE: NodeId = NodeId(0);
    pub const TRUE: NodeId = NodeId(1);

    pub fn new(num_vars: u32) -> Self {
        let last = num_vars + 1;
        Builder {
            num_vars,
            nodes: vec![Node::terminal(last, false), Node::terminal(last, true)],
            unique: vec![HashMap::new(); num_vars as usize + 1],
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    #[inline]
    pub fn constant(value: bool) -> NodeId {
        if value {
            Self::TRUE
        } else {
            Self::FALSE
        }
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    /// Returns the canonical node testing `layer` with the given children.
    pub fn mk(&mut self, layer: u32, low: NodeId, high: NodeId) -> NodeId {
        debug_assert!(layer >= 1 && layer <= self.num_vars);
        debug_assert!(self.nodes[low.index()].layer > layer && self.nodes[high.index()].layer > layer);
        if low == high {
            return low;
        }
        let next = NodeId(self.nodes.len() as u32);
        let id = *self.unique[layer as usize].entry((low, high)).or_insert(next);
        if id == next {
            self.nodes.push(Node::internal(layer, low, high));
        }
        id
    }

    /// Extracts the sub-diagram reachable from `root`, numbered in DFS
    /// preorder (low before high).
    pub fn finish(&self, root: NodeId) -> Bdd {
        let mut map: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            if map[u.index()].is_some() {
                continue;
            }
            map[u.index()] = Some(NodeId(order.len() as u32));
            order.push(u);
            if let Some([lo, hi]) = self.nodes[u.index()].children() {
                stack.push(hi);
                stack.push(lo);
            }
        }
        let nodes = order
            .iter()
            .map(|&u| {
                let node = self.nodes[u.index()];
                match node.kind {
                    NodeKind::Terminal(_) => node,
                    NodeKind::Internal { low, high } => Node::internal(
                        node.layer,
                        map[low.index()].expect("reached"),
                        map[high.index()].expect("reached"),
                    ),
                }
            })
            .collect();
        Bdd::from_valid(Diagram { num_vars: self.num_vars, nodes, root: NodeId(0) })
    }

    /// Copies `bdd` into this store and returns the id of its root.
    pub fn import(&mut self, bdd: &Bdd) -> Result<NodeId> {
        if bdd.num_vars() != self.num_vars {
            return Err(Error::VarCountMismatch(self.num_vars, bdd.num_vars()));
        }
        let mut map = vec![NodeId(0); bdd.len()];
        for id in nodes_bottom_up(bdd.diagram()) {
            let node = bdd.node(id);
            map[id.index()] = match node.kind {
                NodeKind::Terminal(v) => Self::constant(v),
                NodeKind::Internal { low, high } => self.mk(node.layer, map[low.index()], map[high.index()]),
            };
        }
        Ok(map[bdd.root().index()])
    }
}

/// Node ids of `diagram` sorted by decreasing layer.
fn nodes_bottom_up(diagram: &Diagram) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = (0..diagram.nodes.len() as u32).map(NodeId).collect();
    ids.sort_by_key(|id| std::cmp::Reverse(diagram.nodes[id.index()].layer));
    ids
}

/// Canonicalizes an ordered layered diagram: removes redundant tests, merges
/// duplicate nodes and terminals, and drops nodes unreachable from the root.
pub fn reduce(diagram: &Diagram) -> Result<Bdd> {
    let last = diagram.num_vars + 1;
    let n = diagram.nodes.len();
    let mut layering = Vec::new();
    if n == 0 {
        layering.push(Violation::Empty);
    }
    if diagram.root.index() >= n && n > 0 {
        layering.push(Violation::RootOutOfRange(diagram.root));
    }
    for (i, node) in diagram.nodes.iter().enumerate() {
        let id = NodeId(i as u32);
        if node.layer == 0 || node.layer > last {
            layering.push(Violation::LayerOutOfRange { node: id, layer: node.layer });
        }
        match node.kind {
            NodeKind::Terminal(_) if node.layer != last => layering.push(Violation::TerminalOffLastLayer(id)),
            NodeKind::Internal { .. } if node.layer == last => layering.push(Violation::InternalOnLastLayer(id)),
            NodeKind::Internal { low, high } => {
                for (slot, t) in [(crate::Slot::Low, low), (crate::Slot::High, high)] {
                    if t.index() >= n {
                        layering.push(Violation::DanglingReference { node: id, slot, target: t });
                    } else if diagram.nodes[t.index()].layer <= node.layer {
                        layering.push(Violation::NotLayered { from: id, to: t });
                    }
                }
            }
            NodeKind::Terminal(_) => {}
        }
    }
    if !layering.is_empty() {
        return Err(Error::Invalid(crate::bdd::ValidationReport { violations: layering }));
    }

    let mut b = Builder::new(diagram.num_vars);
    let mut map = vec![NodeId(0); n];
    for id in nodes_bottom_up(diagram) {
        let node = diagram.nodes[id.index()];
        map[id.index()] = match node.kind {
            NodeKind::Terminal(v) => Builder::constant(v),
            NodeKind::Internal { low, high } => b.mk(node.layer, map[low.index()], map[high.index()]),
        };
    }
    Ok(b.finish(map[diagram.root.index()]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    Xor,
}

impl BoolOp {
    #[inline]
    pub fn eval(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a && b,
            BoolOp::Or => a || b,
            BoolOp::Xor => a != b,
        }
    }
}

struct ApplyCtx<'a> {
    op: BoolOp,
    builder: &'a mut Builder,
    memo: HashMap<(NodeId, NodeId), NodeId>,
}

impl ApplyCtx<'_> {
    fn short_circuit(&self, a: NodeId, b: NodeId) -> Option<NodeId> {
        let ta = self.builder.node(a).terminal_value();
        let tb = self.builder.node(b).terminal_value();
        match (self.op, ta, tb) {
            (op, Some(x), Some(y)) => Some(Builder::constant(op.eval(x, y))),
            (BoolOp::And, Some(false), _) | (BoolOp::And, _, Some(false)) => Some(Builder::FALSE),
            (BoolOp::And, Some(true), _) => Some(b),
            (BoolOp::And, _, Some(true)) => Some(a),
            (BoolOp::Or, Some(true), _) | (BoolOp::Or, _, Some(true)) => Some(Builder::TRUE),
            (BoolOp::Or, Some(false), _) => Some(b),
            (BoolOp::Or, _, Some(false)) => Some(a),
            (BoolOp::Xor, Some(false), _) => Some(b),
            (BoolOp::Xor, _, Some(false)) => Some(a),
            (BoolOp::And | BoolOp::Or, None, None) if a == b => Some(a),
            (BoolOp::Xor, None, None) if a == b => Some(Builder::FALSE),
            _ => None,
        }
    }

    fn run(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if let Some(r) = self.short_circuit(a, b) {
            return r;
        }
        // all supported operators are commutative
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let na = *self.builder.node(a);
        let nb = *self.builder.node(b);
        let top = na.layer.min(nb.layer);
        let cof = |n: &Node, id: NodeId| match n.kind {
            NodeKind::Internal { low, high } if n.layer == top => (low, high),
            _ => (id, id),
        };
        let (al, ah) = cof(&na, a);
        let (bl, bh) = cof(&nb, b);
        let low = self.run(al, bl);
        let high = self.run(ah, bh);
        let r = self.builder.mk(top, low, high);
        self.memo.insert(key, r);
        r
    }
}

/// Applies `op` to two nodes living in the same builder.
pub fn apply_in(builder: &mut Builder, op: BoolOp, a: NodeId, b: NodeId) -> NodeId {
    let mut ctx = ApplyCtx { op, builder, memo: HashMap::new() };
    ctx.run(a, b)
}

/// `op(a, b)` as a fresh reduced diagram.
pub fn apply(op: BoolOp, a: &Bdd, b: &Bdd) -> Result<Bdd> {
    if a.num_vars() != b.num_vars() {
        return Err(Error::VarCountMismatch(a.num_vars(), b.num_vars()));
    }
    let mut builder = Builder::new(a.num_vars());
    let ra = builder.import(a)?;
    let rb = builder.import(b)?;
    let r = apply_in(&mut builder, op, ra, rb);
    Ok(builder.finish(r))
}

/// Complement: swaps the two terminals.
pub fn negate(bdd: &Bdd) -> Bdd {
    let mut d = bdd.diagram().clone();
    for node in &mut d.nodes {
        if let NodeKind::Terminal(v) = node.kind {
            node.kind = NodeKind::Terminal(!v);
        }
    }
    Bdd::from_valid(d)
}

/// Builds the reduced diagram of `table`, where entry `i` is the value under
/// [`Assignment::from_index`](crate::Assignment::from_index)`(num_vars, i)`.
pub fn from_truth_table(num_vars: u32, table: &[bool]) -> Result<Bdd> {
    if num_vars == 0 || num_vars > MAX_TRUTH_TABLE_VARS {
        return Err(Error::TooManyVariables(num_vars));
    }
    let expected = 1usize << num_vars;
    if table.len() != expected {
        return Err(Error::TruthTableLength { expected, got: table.len() });
    }
    let mut b = Builder::new(num_vars);
    let mut level: Vec<NodeId> = table.iter().map(|&v| Builder::constant(v)).collect();
    for var in (1..=num_vars).rev() {
        level = level.chunks_exact(2).map(|pair| b.mk(var, pair[0], pair[1])).collect();
    }
    Ok(b.finish(level[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdd::Assignment;

    fn truth(b: &Bdd) -> Vec<bool> {
        (0..1u64 << b.num_vars())
            .map(|i| b.evaluate(&Assignment::from_index(b.num_vars(), i)).unwrap())
            .collect()
    }

    #[test]
    fn truth_table_identity_and_parity() {
        let id = from_truth_table(1, &[false, true]).unwrap();
        assert_eq!(id.len(), 3);
        let parity = from_truth_table(2, &[false, true, true, false]).unwrap();
        // root, one node per polarity on layer 2, two terminals
        assert_eq!(parity.len(), 5);
        assert_eq!(truth(&parity), vec![false, true, true, false]);
    }

    #[test]
    fn truth_table_guards() {
        assert!(matches!(from_truth_table(21, &[]), Err(Error::TooManyVariables(21))));
        assert!(matches!(from_truth_table(2, &[true]), Err(Error::TruthTableLength { .. })));
    }

    #[test]
    fn reduce_removes_redundant_and_duplicates() {
        // root -> (a, b), a and b identical; c tests x3 with equal children.
        let d = Diagram {
            num_vars: 3,
            nodes: vec![
                Node::internal(1, NodeId(1), NodeId(2)),
                Node::internal(2, NodeId(3), NodeId(5)),
                Node::internal(2, NodeId(3), NodeId(5)),
                Node::internal(3, NodeId(4), NodeId(4)),
                Node::terminal(4, true),
                Node::terminal(4, false),
            ],
            root: NodeId(0),
        };
        let r = reduce(&d).unwrap();
        // Everything collapses onto x2 ? 0 : 1
        assert_eq!(r.len(), 3);
        assert_eq!(r.layer(r.root()), 2);
        let again = reduce(r.diagram()).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn reduce_rejects_unordered() {
        let d = Diagram {
            num_vars: 1,
            nodes: vec![Node::internal(1, NodeId(0), NodeId(1)), Node::terminal(2, true)],
            root: NodeId(0),
        };
        assert!(reduce(&d).is_err());
    }

    #[test]
    fn apply_basics() {
        let x1 = Bdd::variable(1, 1).unwrap();
        let not_x1 = negate(&x1);
        let r = apply(BoolOp::And, &x1, &not_x1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.node(r.root()).terminal_value(), Some(false));

        let t = Bdd::constant(1, true);
        assert_eq!(apply(BoolOp::And, &x1, &t).unwrap(), x1);
        assert_eq!(apply(BoolOp::Or, &x1, &x1).unwrap(), x1);
        assert!(apply(BoolOp::And, &x1, &Bdd::constant(2, true)).is_err());
    }

    #[test]
    fn apply_matches_pointwise_op() {
        let f: Vec<bool> = (0..16).map(|i| (i * 7 + 3) % 5 < 2).collect();
        let g: Vec<bool> = (0..16).map(|i| i % 3 == 1 || i == 14).collect();
        let a = from_truth_table(4, &f).unwrap();
        let b = from_truth_table(4, &g).unwrap();
        for op in [BoolOp::And, BoolOp::Or, BoolOp::Xor] {
            let r = apply(op, &a, &b).unwrap();
            let want: Vec<bool> = f.iter().zip(&g).map(|(&x, &y)| op.eval(x, y)).collect();
            assert_eq!(truth(&r), want, "{op:?}");
            assert!(r.is_isomorphic(&from_truth_table(4, &want).unwrap()));
        }
    }
}
