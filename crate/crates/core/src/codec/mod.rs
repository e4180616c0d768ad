//! The spanning-tree codec.
//!
//! Encoding runs in six steps: build the shortest-edge spanning tree, write
//! it with two bits per node, record which terminal the tree reaches first,
//! record the long tree edges, write the nontree edges, and compress
//! everything after the header with a general-purpose backend.

mod backend;
mod container;
mod nontree;
mod tree;
pub mod varint;

pub use backend::{Backend, MAX_DECOMPRESSED};
pub use container::{pack_bits, unpack_bits, MAGIC};
pub use nontree::{
    delta_decode, delta_encode, nontree_edges, select_forward_edges, split_incomplete_children, ForwardSelection,
    IncompleteSplit, NontreeEdge,
};
pub use tree::{decode_tree, encode_tree, restore_layers};

use crate::bdd::{Bdd, Diagram, Node, NodeId, NodeKind, Slot};
use crate::error::{Error, Result};
use crate::order::{bfs_order, codec_layer_order_from_bfs};
use crate::spanning::{build_spanning_tree, long_tree_edges_in};
use nontree::{select_forward_with, split_with_indegrees};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodecConfig {
    /// Targets with in-degree above this are written in place.
    pub indegree_threshold: u32,
    /// Forward edges are only used when at least this many qualify.
    pub forward_min_count: u32,
    /// Write the tail stream as differences instead of raw ranks.
    pub delta_enabled: bool,
    pub backend: Backend,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig { indegree_threshold: 5, forward_min_count: 4, delta_enabled: true, backend: Backend::Lzma }
    }
}

/// Every logical section of an encoded diagram, before serialization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedStreams {
    pub backend: Backend,
    pub num_vars: u32,
    pub node_count: usize,
    pub root_layer: u32,
    /// Set when the tree reaches the 1-terminal before the 0-terminal in BFS order.
    pub terminal_order: bool,
    pub delta_enabled: bool,
    /// Kind of the lone terminal when `node_count == 1`.
    pub single_terminal: bool,
    pub tree_bits: Vec<bool>,
    /// Indexed by BFS rank; empty when there are no long tree edges.
    pub long_tree_marks: Vec<bool>,
    pub long_tree_lengths: Vec<u32>,
    pub sh: Vec<u32>,
    /// One flag per zero in `sh`; empty when no forward edges are used.
    pub forward_marks: Vec<bool>,
    pub forward_lengths: Vec<u32>,
    /// Codec ranks of the remaining targets, delta coded when enabled.
    pub tail: Vec<i64>,
}

impl EncodedStreams {
    pub fn to_bytes(&self) -> Vec<u8> {
        container::write(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        container::read(bytes)
    }
}

/// Runs encoding steps 1 through 5.
pub fn encode_streams(bdd: &Bdd, config: &CodecConfig) -> Result<EncodedStreams> {
    if config.indegree_threshold == 0 {
        return Err(Error::Parameter("in-degree threshold must be at least 1".into()));
    }
    let mut s = EncodedStreams {
        backend: config.backend,
        num_vars: bdd.num_vars(),
        node_count: bdd.len(),
        root_layer: bdd.layer(bdd.root()),
        terminal_order: false,
        delta_enabled: config.delta_enabled,
        single_terminal: false,
        tree_bits: Vec::new(),
        long_tree_marks: Vec::new(),
        long_tree_lengths: Vec::new(),
        sh: Vec::new(),
        forward_marks: Vec::new(),
        forward_lengths: Vec::new(),
        tail: Vec::new(),
    };
    if bdd.len() == 1 {
        s.single_terminal = bdd.node(bdd.root()).terminal_value().unwrap_or(false);
        return Ok(s);
    }

    let tree = build_spanning_tree(bdd);
    let bfs = bfs_order(&tree);
    s.tree_bits = encode_tree(&tree, &bfs);
    s.terminal_order = bfs
        .iter()
        .find_map(|v| bdd.node(v).terminal_value())
        .expect("a diagram with internal nodes has terminals");

    let long = long_tree_edges_in(bdd, &tree, &bfs);
    if !long.is_empty() {
        s.long_tree_marks = vec![false; bdd.len()];
        for e in &long {
            s.long_tree_marks[bfs.rank(e.endpoint) as usize - 1] = true;
        }
        s.long_tree_lengths = long.iter().map(|e| e.length).collect();
    }

    let layers: Vec<u32> = bdd.nodes().iter().map(|n| n.layer).collect();
    let order = codec_layer_order_from_bfs(&bfs, &layers, bdd.terminal(false));
    let indeg = bdd.in_degrees();
    let split = split_with_indegrees(bdd, &tree, &order, &indeg, config.indegree_threshold);
    let is_high: Vec<bool> = indeg.iter().map(|&d| d > config.indegree_threshold).collect();
    let fwd = select_forward_with(&order, &split.deferred, &layers, &is_high, config.forward_min_count);
    s.sh = split.sh;
    s.forward_marks = fwd.marks;
    s.forward_lengths = fwd.lengths;
    let ids: Vec<i64> = fwd.remaining.iter().map(|e| order.rank(e.target) as i64).collect();
    s.tail = if config.delta_enabled { delta_encode(&ids) } else { ids };
    Ok(s)
}

/// Encodes `bdd` into a self-describing container.
pub fn encode(bdd: &Bdd, config: &CodecConfig) -> Result<Vec<u8>> {
    encode_streams(bdd, config).map(|s| s.to_bytes())
}

/// Inverts [`encode`]. The result is numbered in codec layer order.
pub fn decode(bytes: &[u8]) -> Result<Bdd> {
    decode_streams(&EncodedStreams::from_bytes(bytes)?)
}

pub fn decode_streams(s: &EncodedStreams) -> Result<Bdd> {
    let n = s.num_vars;
    let last = n as u64 + 1;
    if s.node_count == 1 {
        if s.root_layer as u64 != last {
            return Err(Error::inconsistent("lone terminal must sit on the last layer"));
        }
        return Ok(Bdd::constant(n, s.single_terminal));
    }
    let count = s.node_count;
    if count < 3 {
        return Err(Error::inconsistent(format!("node count {count} is not representable")));
    }

    let tree = decode_tree(&s.tree_bits, count)?;
    let layers = restore_layers(&tree, s.root_layer, &s.long_tree_marks, &s.long_tree_lengths, n)?;

    // Decoded ids are BFS ranks minus one, so the first terminal found is the BFS-first one.
    let terminals: Vec<NodeId> = (0..count as u32).map(NodeId).filter(|v| layers[v.index()] as u64 == last).collect();
    if terminals.len() != 2 {
        return Err(Error::inconsistent(format!("{} nodes on the terminal layer", terminals.len())));
    }
    for &t in &terminals {
        if tree.tree_children(t) != [None, None] {
            return Err(Error::inconsistent("terminal with tree children"));
        }
    }
    let (zero, one) = if s.terminal_order { (terminals[1], terminals[0]) } else { (terminals[0], terminals[1]) };
    let order = codec_layer_order_from_bfs(&bfs_order(&tree), &layers, Some(zero));

    let mut children: Vec<[Option<NodeId>; 2]> = (0..count as u32).map(|u| tree.tree_children(NodeId(u))).collect();
    let mut sources = Vec::with_capacity(count - 3);
    for u in order.iter() {
        if layers[u.index()] as u64 == last {
            continue;
        }
        for slot in Slot::BOTH {
            if children[u.index()][slot.index()].is_none() {
                sources.push((u, slot));
            }
        }
    }
    if sources.len() != s.sh.len() {
        return Err(Error::inconsistent(format!(
            "{} nontree edges implied by the tree, {} in the stream",
            sources.len(),
            s.sh.len()
        )));
    }

    let resolve = |rank: i64| -> Result<NodeId> {
        if rank < 1 || rank as u64 > count as u64 {
            return Err(Error::inconsistent(format!("node rank {rank} outside 1..={count}")));
        }
        Ok(order.node_at(rank as u32))
    };

    let mut is_high = vec![false; count];
    let mut deferred = Vec::new();
    for (&(u, slot), &rank) in sources.iter().zip(&s.sh) {
        if rank == 0 {
            deferred.push((u, slot));
        } else {
            let v = resolve(rank as i64)?;
            is_high[v.index()] = true;
            children[u.index()][slot.index()] = Some(v);
        }
    }

    let mut remaining = Vec::with_capacity(deferred.len());
    if s.forward_marks.is_empty() {
        if !s.forward_lengths.is_empty() {
            return Err(Error::inconsistent("forward lengths without flags"));
        }
        remaining = deferred;
    } else {
        if s.forward_marks.len() != deferred.len() {
            return Err(Error::inconsistent("forward bitvector length differs from deferred count"));
        }
        let first = nontree::first_deferrable_per_layer(&order, &layers, &is_high);
        let mut lengths = s.forward_lengths.iter();
        for (&(u, slot), &marked) in deferred.iter().zip(&s.forward_marks) {
            if !marked {
                remaining.push((u, slot));
                continue;
            }
            let len = *lengths.next().ok_or_else(|| Error::inconsistent("fewer forward lengths than flags"))?;
            let target_layer = layers[u.index()] as u64 + len as u64;
            if len < 2 || target_layer > last {
                return Err(Error::inconsistent(format!("forward edge of length {len} leaves the diagram")));
            }
            let v = first[target_layer as usize].ok_or_else(|| Error::inconsistent("forward edge into a full layer"))?;
            children[u.index()][slot.index()] = Some(v);
        }
        if lengths.next().is_some() {
            return Err(Error::inconsistent("more forward lengths than flags"));
        }
    }

    if remaining.len() != s.tail.len() {
        return Err(Error::inconsistent("tail length differs from remaining edge count"));
    }
    let ranks = if s.delta_enabled { delta_decode(&s.tail) } else { s.tail.clone() };
    for (&(u, slot), &rank) in remaining.iter().zip(&ranks) {
        children[u.index()][slot.index()] = Some(resolve(rank)?);
    }

    // Renumber so that node i has codec rank i + 1.
    let nodes = order
        .iter()
        .map(|u| {
            let layer = layers[u.index()];
            if u == zero || u == one {
                return Node::terminal(layer, u == one);
            }
            let [lo, hi] = children[u.index()].map(|c| NodeId(order.rank(c.expect("all slots filled")) - 1));
            Node { layer, kind: NodeKind::Internal { low: lo, high: hi } }
        })
        .collect();
    Bdd::try_from(Diagram { num_vars: n, nodes, root: NodeId(order.rank(tree.root()) - 1) })
}
