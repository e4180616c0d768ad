//! The shortest-edge spanning tree and the facts derived from it.

use std::collections::BTreeSet;

use crate::bdd::{Bdd, NodeId, Slot};
use crate::order::{bfs_order, dag_layer_order, dag_preorder, NodeOrdering};

/// One in-edge per non-root node, recorded as `(parent, slot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    root: NodeId,
    parent_of: Vec<Option<(NodeId, Slot)>>,
    children: Vec<[Option<NodeId>; 2]>,
}

impl SpanningTree {
    /// Builds a tree from parent links. Callers guarantee that every non-root
    /// node has a parent and no slot is used twice.
    pub(crate) fn from_parents(root: NodeId, parent_of: Vec<Option<(NodeId, Slot)>>) -> Self {
        let mut children = vec![[None, None]; parent_of.len()];
        for (v, p) in parent_of.iter().enumerate() {
            if let Some((u, slot)) = *p {
                debug_assert!(children[u.index()][slot.index()].is_none());
                children[u.index()][slot.index()] = Some(NodeId(v as u32));
            }
        }
        SpanningTree { root, parent_of, children }
    }

    /// Builds a tree from child links, as produced by the tree stream decoder.
    pub(crate) fn from_children(root: NodeId, children: Vec<[Option<NodeId>; 2]>) -> Self {
        let mut parent_of = vec![None; children.len()];
        for (u, pair) in children.iter().enumerate() {
            for slot in Slot::BOTH {
                if let Some(v) = pair[slot.index()] {
                    parent_of[v.index()] = Some((NodeId(u as u32), slot));
                }
            }
        }
        SpanningTree { root, parent_of, children }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.parent_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent_of.is_empty()
    }

    #[inline]
    pub fn parent(&self, v: NodeId) -> Option<(NodeId, Slot)> {
        self.parent_of[v.index()]
    }

    #[inline]
    pub fn tree_children(&self, u: NodeId) -> [Option<NodeId>; 2] {
        self.children[u.index()]
    }

    /// Whether the edge leaving `u` through `slot` belongs to the tree.
    #[inline]
    pub fn is_tree_slot(&self, u: NodeId, slot: Slot) -> bool {
        self.children[u.index()][slot.index()].is_some()
    }

    pub fn edge_count(&self) -> usize {
        self.parent_of.iter().filter(|p| p.is_some()).count()
    }

    /// True if `a` lies on the tree path from the root to `v` (a node is its
    /// own ancestor).
    pub fn is_ancestor(&self, a: NodeId, mut v: NodeId) -> bool {
        loop {
            if v == a {
                return true;
            }
            match self.parent_of[v.index()] {
                Some((p, _)) => v = p,
                None => return false,
            }
        }
    }
}

/// For every non-root node, keeps the in-edge whose source is on the deepest
/// layer; ties go to the source with the smallest [`dag_layer_order`] rank.
pub fn build_spanning_tree(bdd: &Bdd) -> SpanningTree {
    // Within a layer, preorder positions compare like dag_layer_order ranks.
    let (_, position) = dag_preorder(bdd);
    // Smaller key wins: deepest source layer first, then smallest position.
    let mut best: Vec<(u64, Option<(NodeId, Slot)>)> = vec![(u64::MAX, None); bdd.len()];
    for (i, node) in bdd.nodes().iter().enumerate() {
        let Some(children) = node.children() else { continue };
        let u = NodeId(i as u32);
        let key = ((u32::MAX - node.layer) as u64) << 32 | position[i] as u64;
        for slot in Slot::BOTH {
            let entry = &mut best[children[slot.index()].index()];
            if key < entry.0 {
                *entry = (key, Some((u, slot)));
            }
        }
    }
    SpanningTree::from_parents(bdd.root(), best.into_iter().map(|(_, p)| p).collect())
}

/// A tree edge spanning two or more layers, located by its endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LongEdgeInfo {
    pub endpoint: NodeId,
    pub length: u32,
}

/// Long tree edges in BFS order of their endpoints.
pub fn long_tree_edges(bdd: &Bdd, tree: &SpanningTree) -> Vec<LongEdgeInfo> {
    long_tree_edges_in(bdd, tree, &bfs_order(tree))
}

pub(crate) fn long_tree_edges_in(bdd: &Bdd, tree: &SpanningTree, bfs: &NodeOrdering) -> Vec<LongEdgeInfo> {
    // Scan in id order and file lengths by BFS rank; 0 marks a short edge.
    let mut length_at = vec![0u32; bfs.len()];
    for (i, node) in bdd.nodes().iter().enumerate() {
        let v = NodeId(i as u32);
        if let Some((p, _)) = tree.parent(v) {
            let length = node.layer - bdd.layer(p);
            if length >= 2 {
                length_at[bfs.rank(v) as usize - 1] = length;
            }
        }
    }
    bfs.iter()
        .zip(length_at)
        .filter(|&(_, length)| length != 0)
        .map(|(endpoint, length)| LongEdgeInfo { endpoint, length })
        .collect()
}

/// Number of non-root nodes whose in-edges are all long; no spanning tree
/// can have fewer long edges.
pub fn min_long_edge_count(bdd: &Bdd) -> usize {
    let mut deepest_parent = vec![0u32; bdd.len()];
    for (u, _, v) in bdd.edges() {
        deepest_parent[v.index()] = deepest_parent[v.index()].max(bdd.layer(u));
    }
    bdd.node_ids()
        .filter(|&v| v != bdd.root() && bdd.layer(v) - deepest_parent[v.index()] >= 2)
        .count()
}

/// Tree children of the nodes to the right of `u` on its layer. A nontree
/// edge leaving `u` can never end in this set.
pub fn forbidden_children(bdd: &Bdd, tree: &SpanningTree, u: NodeId) -> BTreeSet<NodeId> {
    forbidden_children_in(bdd, tree, &dag_layer_order(bdd), u)
}

/// [`forbidden_children`] with a precomputed [`dag_layer_order`].
pub fn forbidden_children_in(bdd: &Bdd, tree: &SpanningTree, id_l: &NodeOrdering, u: NodeId) -> BTreeSet<NodeId> {
    let layer = bdd.layer(u);
    let mut out = BTreeSet::new();
    let mut rank = id_l.rank(u) + 1;
    while rank as usize <= id_l.len() {
        let w = id_l.node_at(rank);
        if bdd.layer(w) != layer {
            break;
        }
        out.extend(tree.tree_children(w).into_iter().flatten());
        rank += 1;
    }
    out
}
