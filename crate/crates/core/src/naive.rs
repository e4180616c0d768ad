//! Baseline encoder: layer sizes followed by explicit child lists.
//!
//! Layout: `"BDN1" | backend id | n | backend( n+1 layer sizes | first terminal kind | children )`.
//! Children are codec ranks, low then high, for every internal node in codec
//! layer order. Layers are implied by the sizes.

use crate::bdd::{Bdd, Diagram, Node, NodeId};
use crate::codec::varint::{write_varint, ByteReader};
use crate::codec::Backend;
use crate::error::{Error, Result};
use crate::order::{codec_layer_order, NodeOrdering};
use crate::spanning::build_spanning_tree;

pub const NAIVE_MAGIC: &[u8; 4] = b"BDN1";

pub(crate) fn canonical_order(bdd: &Bdd) -> NodeOrdering {
    let tree = build_spanning_tree(bdd);
    let layers: Vec<u32> = bdd.nodes().iter().map(|n| n.layer).collect();
    codec_layer_order(&tree, &layers, bdd.terminal(false))
}

pub fn naive_encode(bdd: &Bdd, backend: Backend) -> Vec<u8> {
    let order = canonical_order(bdd);
    let n = bdd.num_vars();
    let mut sizes = vec![0u64; n as usize + 1];
    for node in bdd.nodes() {
        sizes[node.layer as usize - 1] += 1;
    }
    let mut payload = Vec::new();
    for &s in &sizes {
        write_varint(&mut payload, s);
    }
    let first_terminal = order.iter().find_map(|v| bdd.node(v).terminal_value()).unwrap_or(false);
    payload.push(first_terminal as u8);
    for v in order.iter() {
        if let Some(children) = bdd.node(v).children() {
            for c in children {
                write_varint(&mut payload, order.rank(c) as u64);
            }
        }
    }

    let mut out = Vec::with_capacity(payload.len() / 2 + 16);
    out.extend_from_slice(NAIVE_MAGIC);
    out.push(backend.id());
    write_varint(&mut out, n as u64);
    out.extend(backend.compress(&payload));
    out
}

pub fn naive_decode(bytes: &[u8]) -> Result<Bdd> {
    let mut r = ByteReader::new(bytes);
    if r.read_bytes(4, "magic").ok() != Some(&NAIVE_MAGIC[..]) {
        return Err(Error::BadMagic);
    }
    let backend = Backend::from_id(r.read_u8("backend id")?)?;
    let n = r.read_varint("variable count")?;
    if n == 0 || n >= u32::MAX as u64 {
        return Err(Error::inconsistent(format!("variable count {n} out of range")));
    }
    let payload = backend.decompress(r.rest())?;
    let mut p = ByteReader::new(&payload);
    if n + 1 > p.remaining() as u64 {
        return Err(Error::Truncated("layer sizes"));
    }
    let mut layer_of_rank = Vec::new();
    for layer in 1..=n + 1 {
        let size = p.read_varint("layer size")?;
        // each internal node needs at least two child bytes
        if (layer_of_rank.len() as u64).saturating_add(size) > 2 + p.remaining() as u64 {
            return Err(Error::Truncated("child lists"));
        }
        layer_of_rank.extend(std::iter::repeat_n(layer as u32, size as usize));
    }
    let total = layer_of_rank.len();
    let last = n as u32 + 1;
    let terminal_count = layer_of_rank.iter().filter(|&&l| l == last).count();
    let kind = match p.read_u8("terminal kind")? {
        0 => false,
        1 => true,
        other => return Err(Error::inconsistent(format!("terminal kind byte {other}"))),
    };
    if total == 1 {
        if terminal_count != 1 || p.remaining() != 0 {
            return Err(Error::inconsistent("single-node diagram must be one terminal"));
        }
        return Ok(Bdd::constant(n as u32, kind));
    }
    if terminal_count != 2 {
        return Err(Error::inconsistent(format!("{terminal_count} nodes on the terminal layer")));
    }

    let mut nodes = Vec::with_capacity(total);
    for (i, &layer) in layer_of_rank.iter().enumerate() {
        if layer == last {
            let first = i == total - 2;
            nodes.push(Node::terminal(layer, if first { kind } else { !kind }));
            continue;
        }
        let mut child = || -> Result<NodeId> {
            let rank = p.read_varint("child id")?;
            if rank == 0 || rank > total as u64 {
                return Err(Error::inconsistent(format!("child id {rank} outside 1..={total}")));
            }
            Ok(NodeId(rank as u32 - 1))
        };
        let low = child()?;
        let high = child()?;
        nodes.push(Node::internal(layer, low, high));
    }
    if p.remaining() != 0 {
        return Err(Error::inconsistent(format!("{} trailing payload bytes", p.remaining())));
    }
    Bdd::try_from(Diagram { num_vars: n as u32, nodes, root: NodeId(0) })
}
