//! Two bits per node for the spanning tree, plus the layer corrections for
//! tree edges that skip layers.

use crate::bdd::{NodeId, Slot};
use crate::error::{Error, Result};
use crate::order::{bfs_order, NodeOrdering};
use crate::spanning::SpanningTree;

/// For each node in BFS order, one bit per slot telling whether that slot
/// holds a tree edge. Terminals and tree leaves emit `00`.
pub fn encode_tree(tree: &SpanningTree, bfs: &NodeOrdering) -> Vec<bool> {
    let mut bits = Vec::with_capacity(2 * bfs.len());
    for u in bfs.iter() {
        bits.extend(Slot::BOTH.map(|s| tree.is_tree_slot(u, s)));
    }
    bits
}

/// Rebuilds the tree shape from its bit string. Node `i` of the result is
/// the node with BFS rank `i + 1`.
pub fn decode_tree(bits: &[bool], count: usize) -> Result<SpanningTree> {
    if count == 0 {
        return Err(Error::inconsistent("tree with zero nodes"));
    }
    if bits.len() < 2 * count {
        return Err(Error::Truncated("tree bits"));
    }
    let mut children: Vec<[Option<NodeId>; 2]> = vec![[None, None]; count];
    let mut created = 1usize;
    for (u, pair) in bits.chunks_exact(2).take(count).enumerate() {
        if u >= created {
            return Err(Error::inconsistent(format!("tree describes {created} nodes, header says {count}")));
        }
        for slot in Slot::BOTH {
            if pair[slot.index()] {
                if created == count {
                    return Err(Error::inconsistent(format!("tree describes more than {count} nodes")));
                }
                children[u][slot.index()] = Some(NodeId(created as u32));
                created += 1;
            }
        }
    }
    if created != count {
        return Err(Error::inconsistent(format!("tree describes {created} nodes, header says {count}")));
    }
    Ok(SpanningTree::from_children(NodeId(0), children))
}

/// Assigns layers top-down: one below the parent, or `length` below for
/// nodes flagged in `marks` (indexed by BFS rank). An empty `marks` means no
/// long tree edges.
pub fn restore_layers(
    tree: &SpanningTree,
    root_layer: u32,
    marks: &[bool],
    lengths: &[u32],
    num_vars: u32,
) -> Result<Vec<u32>> {
    let bfs = bfs_order(tree);
    if bfs.len() != tree.len() {
        return Err(Error::inconsistent("tree is not connected"));
    }
    if !marks.is_empty() && marks.len() != tree.len() {
        return Err(Error::inconsistent("long-edge bitvector length differs from node count"));
    }
    let last = num_vars as u64 + 1;
    if root_layer == 0 || root_layer as u64 > last {
        return Err(Error::inconsistent(format!("root layer {root_layer} outside 1..={last}")));
    }
    let mut layers = vec![0u32; tree.len()];
    let mut next_length = lengths.iter();
    for (i, v) in bfs.iter().enumerate() {
        let marked = marks.get(i).copied().unwrap_or(false);
        let layer = match tree.parent(v) {
            None => {
                if marked {
                    return Err(Error::inconsistent("root flagged as long-edge endpoint"));
                }
                root_layer as u64
            }
            Some((p, _)) => {
                let step = if marked {
                    let len = *next_length
                        .next()
                        .ok_or_else(|| Error::inconsistent("fewer long-edge lengths than flags"))?;
                    if len < 2 {
                        return Err(Error::inconsistent("long edge shorter than two layers"));
                    }
                    len as u64
                } else {
                    1
                };
                layers[p.index()] as u64 + step
            }
        };
        if layer > last {
            return Err(Error::inconsistent(format!("node at BFS rank {} lands on layer {layer} > {last}", i + 1)));
        }
        layers[v.index()] = layer as u32;
    }
    if next_length.next().is_some() {
        return Err(Error::inconsistent("more long-edge lengths than flags"));
    }
    Ok(layers)
}
