//! Node numberings: BFS over a spanning tree, layer order over the full
//! diagram, and the layer order the codec uses on both sides.

use crate::bdd::{Bdd, NodeId};
use crate::spanning::SpanningTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderKind {
    /// Breadth-first over the spanning tree, low child first.
    Bfs,
    /// Layer by layer; within a layer by DFS preorder over the whole diagram.
    DagLayer,
    /// Layer by layer; within a layer by tree BFS rank, except that the
    /// 0-terminal precedes the 1-terminal.
    CodecLayer,
}

/// A bijection between nodes and ranks `1..=len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeOrdering {
    kind: OrderKind,
    by_rank: Vec<NodeId>,
    rank_of: Vec<u32>,
}

impl NodeOrdering {
    fn from_sequence(kind: OrderKind, by_rank: Vec<NodeId>) -> Self {
        let mut rank_of = vec![0u32; by_rank.len()];
        for (i, id) in by_rank.iter().enumerate() {
            rank_of[id.index()] = i as u32 + 1;
        }
        NodeOrdering { kind, by_rank, rank_of }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    /// Rank of `id`, starting at 1.
    #[inline]
    pub fn rank(&self, id: NodeId) -> u32 {
        self.rank_of[id.index()]
    }

    /// Node holding rank `rank` (1-based).
    #[inline]
    pub fn node_at(&self, rank: u32) -> NodeId {
        self.by_rank[rank as usize - 1]
    }

    pub fn len(&self) -> usize {
        self.by_rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_rank.is_empty()
    }

    /// Nodes in rank order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.by_rank.iter().copied()
    }

    pub fn is_bijection(&self) -> bool {
        let n = self.by_rank.len();
        let mut seen = vec![false; n];
        for &id in &self.by_rank {
            if id.index() >= n || seen[id.index()] {
                return false;
            }
            seen[id.index()] = true;
        }
        self.by_rank.iter().enumerate().all(|(i, &id)| self.rank_of[id.index()] == i as u32 + 1)
    }
}

/// BFS over the tree from its root, enqueueing the low child before the high one.
pub fn bfs_order(tree: &SpanningTree) -> NodeOrdering {
    let mut seq = Vec::with_capacity(tree.len());
    seq.push(tree.root());
    let mut head = 0;
    while head < seq.len() {
        let u = seq[head];
        head += 1;
        seq.extend(tree.tree_children(u).into_iter().flatten());
    }
    NodeOrdering::from_sequence(OrderKind::Bfs, seq)
}

/// Stable counting sort of `seq` by layer.
fn sort_by_layer(seq: &[NodeId], layers: &[u32]) -> Vec<NodeId> {
    let max = layers.iter().copied().max().unwrap_or(0) as usize;
    let mut start = vec![0usize; max + 2];
    for id in seq {
        start[layers[id.index()] as usize + 1] += 1;
    }
    for l in 1..start.len() {
        start[l] += start[l - 1];
    }
    let mut out = vec![NodeId(0); seq.len()];
    for &id in seq {
        let at = &mut start[layers[id.index()] as usize];
        out[*at] = id;
        *at += 1;
    }
    out
}

/// Layer order over the full diagram: nodes grouped by layer, ties broken by
/// first visit of a DFS from the root that explores low edges first.
pub fn dag_layer_order(bdd: &Bdd) -> NodeOrdering {
    let layers: Vec<u32> = bdd.nodes().iter().map(|n| n.layer).collect();
    let seq = sort_by_layer(&dag_preorder(bdd).0, &layers);
    NodeOrdering::from_sequence(OrderKind::DagLayer, seq)
}

/// DFS preorder from the root, low edges first, and each node's 1-based
/// position in it.
pub(crate) fn dag_preorder(bdd: &Bdd) -> (Vec<NodeId>, Vec<u32>) {
    let mut position = vec![0u32; bdd.len()];
    let mut preorder = Vec::with_capacity(bdd.len());
    let mut stack = vec![bdd.root()];
    while let Some(u) = stack.pop() {
        if position[u.index()] != 0 {
            continue;
        }
        preorder.push(u);
        position[u.index()] = preorder.len() as u32;
        if let Some([lo, hi]) = bdd.node(u).children() {
            for c in [hi, lo] {
                if position[c.index()] == 0 {
                    stack.push(c);
                }
            }
        }
    }
    (preorder, position)
}

/// The codec's layer order. Encoder and decoder both compute it from the
/// tree, the per-node layers and the identity of the 0-terminal.
pub fn codec_layer_order(tree: &SpanningTree, layers: &[u32], zero_terminal: Option<NodeId>) -> NodeOrdering {
    codec_layer_order_from_bfs(&bfs_order(tree), layers, zero_terminal)
}

pub(crate) fn codec_layer_order_from_bfs(
    bfs: &NodeOrdering,
    layers: &[u32],
    zero_terminal: Option<NodeId>,
) -> NodeOrdering {
    let mut seq = sort_by_layer(&bfs.by_rank, layers);
    if let Some(z) = zero_terminal {
        let layer = layers[z.index()];
        let begin = seq.partition_point(|id| layers[id.index()] < layer);
        if let Some(pos) = seq[begin..].iter().position(|&id| id == z) {
            seq[begin..=begin + pos].rotate_right(1);
        }
    }
    NodeOrdering::from_sequence(OrderKind::CodecLayer, seq)
}
