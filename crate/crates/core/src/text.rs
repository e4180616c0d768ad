//! Plain-text interchange format.
//!
//! ```text
//! bdd <node-count> <var-count> <root-id>
//! <id> <layer> <low-id> <high-id>
//! <id> <layer> T0
//! <id> <layer> T1
//! ```
//!
//! Ids are arbitrary distinct decimal integers. Blank lines and lines starting
//! with `#` are ignored. The writer numbers nodes 1..=|V| in codec layer order.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::bdd::{Bdd, Diagram, Node, NodeId, NodeKind};
use crate::error::{Error, Result};
use crate::naive::canonical_order;

pub fn write_bdd_text(bdd: &Bdd) -> String {
    let order = canonical_order(bdd);
    let mut out = String::with_capacity(bdd.len() * 16);
    let _ = writeln!(out, "bdd {} {} {}", bdd.len(), bdd.num_vars(), order.rank(bdd.root()));
    for v in order.iter() {
        let node = bdd.node(v);
        let _ = match node.kind {
            NodeKind::Terminal(value) => writeln!(out, "{} {} T{}", order.rank(v), node.layer, value as u8),
            NodeKind::Internal { low, high } => {
                writeln!(out, "{} {} {} {}", order.rank(v), node.layer, order.rank(low), order.rank(high))
            }
        };
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} {tok:?}")))
}

pub fn read_bdd_text(text: &str) -> Result<Bdd> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 4 || tok[0] != "bdd" {
        return Err(parse_err(hline, "expected `bdd <node-count> <var-count> <root-id>`"));
    }
    let count: usize = number(tok[1], hline, "node count")?;
    let num_vars: u32 = number(tok[2], hline, "variable count")?;
    let root_id: u64 = number(tok[3], hline, "root id")?;

    struct Pending {
        line: usize,
        layer: u32,
        children: Option<(u64, u64)>,
        terminal: bool,
    }
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut pending = Vec::new();
    for (line, l) in lines {
        let tok: Vec<&str> = l.split_whitespace().collect();
        let (id, layer) = match tok.as_slice() {
            [id, layer, ..] => (number::<u64>(id, line, "node id")?, number::<u32>(layer, line, "layer")?),
            _ => return Err(parse_err(line, "expected `<id> <layer> ...`")),
        };
        let (children, terminal) = match tok.as_slice() {
            [_, _, "T0"] => (None, false),
            [_, _, "T1"] => (None, true),
            [_, _, lo, hi] => (Some((number(lo, line, "node id")?, number(hi, line, "node id")?)), false),
            _ => return Err(parse_err(line, "expected `<low-id> <high-id>`, `T0` or `T1`")),
        };
        if index.insert(id, pending.len()).is_some() {
            return Err(parse_err(line, format!("duplicate node id {id}")));
        }
        pending.push(Pending { line, layer, children, terminal });
    }
    if pending.len() != count {
        return Err(parse_err(hline, format!("header declares {count} nodes, found {}", pending.len())));
    }
    let root = *index.get(&root_id).ok_or_else(|| parse_err(hline, format!("undefined root id {root_id}")))?;

    let mut nodes = Vec::with_capacity(pending.len());
    for p in &pending {
        let node = match p.children {
            None => Node::terminal(p.layer, p.terminal),
            Some((lo, hi)) => {
                let resolve = |id: u64| {
                    index
                        .get(&id)
                        .map(|&i| NodeId(i as u32))
                        .ok_or_else(|| parse_err(p.line, format!("undefined node id {id}")))
                };
                Node::internal(p.layer, resolve(lo)?, resolve(hi)?)
            }
        };
        nodes.push(node);
    }
    Bdd::try_from(Diagram { num_vars, nodes, root: NodeId(root as u32) })
}
