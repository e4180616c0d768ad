//! Encoding of the edges left out of the spanning tree.
//!
//! The sources of nontree edges are implied by the tree, so only targets are
//! written. They are enumerated by source in codec layer order, low slot
//! first. Targets with large in-degree are written in place; the rest are
//! deferred and either recovered from an edge length (forward edges) or
//! listed in the tail stream.

use crate::bdd::{Bdd, NodeId, Slot};
use crate::order::NodeOrdering;
use crate::spanning::SpanningTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NontreeEdge {
    pub source: NodeId,
    pub slot: Slot,
    pub target: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncompleteSplit {
    /// One entry per nontree edge: the target's codec rank when its
    /// in-degree exceeds the threshold, else 0.
    pub sh: Vec<u32>,
    /// Edges marked 0 in `sh`, in the same order.
    pub deferred: Vec<NontreeEdge>,
}

/// Nontree edges in the order the decoder will rediscover their sources.
pub fn nontree_edges(bdd: &Bdd, tree: &SpanningTree, order: &NodeOrdering) -> Vec<NontreeEdge> {
    let mut out = Vec::with_capacity(bdd.len().saturating_sub(3));
    for u in order.iter() {
        if let Some(children) = bdd.node(u).children() {
            for slot in Slot::BOTH {
                if !tree.is_tree_slot(u, slot) {
                    out.push(NontreeEdge { source: u, slot, target: children[slot.index()] });
                }
            }
        }
    }
    out
}

pub fn split_incomplete_children(
    bdd: &Bdd,
    tree: &SpanningTree,
    order: &NodeOrdering,
    threshold: u32,
) -> IncompleteSplit {
    split_with_indegrees(bdd, tree, order, &bdd.in_degrees(), threshold)
}

pub(crate) fn split_with_indegrees(
    bdd: &Bdd,
    tree: &SpanningTree,
    order: &NodeOrdering,
    indeg: &[u32],
    threshold: u32,
) -> IncompleteSplit {
    let mut sh = Vec::with_capacity(bdd.len().saturating_sub(3));
    let mut deferred = Vec::new();
    for u in order.iter() {
        let Some(children) = bdd.node(u).children() else { continue };
        for slot in Slot::BOTH {
            if tree.is_tree_slot(u, slot) {
                continue;
            }
            let target = children[slot.index()];
            if indeg[target.index()] > threshold {
                sh.push(order.rank(target));
            } else {
                sh.push(0);
                deferred.push(NontreeEdge { source: u, slot, target });
            }
        }
    }
    IncompleteSplit { sh, deferred }
}

/// For every layer, the first node in codec order whose in-degree is not
/// above the threshold. Indexed by layer; `None` when every node on the
/// layer is written in place.
pub(crate) fn first_deferrable_per_layer(
    order: &NodeOrdering,
    layers: &[u32],
    is_high: &[bool],
) -> Vec<Option<NodeId>> {
    let max = layers.iter().copied().max().unwrap_or(0) as usize;
    let mut first = vec![None; max + 1];
    for v in order.iter() {
        let slot = &mut first[layers[v.index()] as usize];
        if slot.is_none() && !is_high[v.index()] {
            *slot = Some(v);
        }
    }
    first
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForwardSelection {
    /// One flag per deferred edge; empty when nothing was selected.
    pub marks: Vec<bool>,
    /// Lengths of the selected edges, in deferred order.
    pub lengths: Vec<u32>,
    /// Deferred edges that were not selected.
    pub remaining: Vec<NontreeEdge>,
}

/// Picks the deferred edges whose target the decoder can recover from the
/// source and the edge length alone: edges spanning at least two layers whose
/// target is the first node, in codec order, on the target layer that is not
/// written in place. If fewer than `min_count` qualify none are selected.
pub fn select_forward_edges(
    bdd: &Bdd,
    order: &NodeOrdering,
    deferred: &[NontreeEdge],
    threshold: u32,
    min_count: u32,
) -> ForwardSelection {
    let is_high: Vec<bool> = bdd.in_degrees().iter().map(|&d| d > threshold).collect();
    let layers: Vec<u32> = bdd.nodes().iter().map(|n| n.layer).collect();
    select_forward_with(order, deferred, &layers, &is_high, min_count)
}

pub(crate) fn select_forward_with(
    order: &NodeOrdering,
    deferred: &[NontreeEdge],
    layers: &[u32],
    is_high: &[bool],
    min_count: u32,
) -> ForwardSelection {
    let first = first_deferrable_per_layer(order, layers, is_high);

    let picked: Vec<bool> = deferred
        .iter()
        .map(|e| {
            let (lu, lv) = (layers[e.source.index()], layers[e.target.index()]);
            lv - lu >= 2 && first[lv as usize] == Some(e.target)
        })
        .collect();
    let count = picked.iter().filter(|&&p| p).count();
    if count == 0 || (count as u64) < min_count as u64 {
        return ForwardSelection { marks: Vec::new(), lengths: Vec::new(), remaining: deferred.to_vec() };
    }
    let mut lengths = Vec::with_capacity(count);
    let mut remaining = Vec::with_capacity(deferred.len() - count);
    for (e, &p) in deferred.iter().zip(&picked) {
        if p {
            lengths.push(layers[e.target.index()] - layers[e.source.index()]);
        } else {
            remaining.push(*e);
        }
    }
    ForwardSelection { marks: picked, lengths, remaining }
}

/// `(i1, i2 - i1, ..., ik - ik-1)`
pub fn delta_encode(ids: &[i64]) -> Vec<i64> {
    let mut prev = 0i64;
    ids.iter()
        .map(|&v| {
            let d = v.wrapping_sub(prev);
            prev = v;
            d
        })
        .collect()
}

pub fn delta_decode(deltas: &[i64]) -> Vec<i64> {
    let mut acc = 0i64;
    deltas
        .iter()
        .map(|&d| {
            acc = acc.wrapping_add(d);
            acc
        })
        .collect()
}
