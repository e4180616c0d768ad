//! Instance generators: n-queens, rook placements and random diagrams.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bdd::{Bdd, Diagram, Node, NodeId};
use crate::builder::{apply_in, BoolOp, Builder};
use crate::error::{Error, Result};

/// Builds the cube `!x_a & !x_b & ...` bottom-up.
fn negative_cube(b: &mut Builder, mut vars: Vec<u32>) -> NodeId {
    vars.sort_unstable_by(|a, b| b.cmp(a));
    vars.dedup();
    vars.into_iter().fold(Builder::TRUE, |acc, v| b.mk(v, acc, Builder::FALSE))
}

fn literal(b: &mut Builder, var: u32, positive: bool) -> NodeId {
    if positive {
        b.mk(var, Builder::FALSE, Builder::TRUE)
    } else {
        b.mk(var, Builder::TRUE, Builder::FALSE)
    }
}

/// Non-attacking placement of `n` queens on an `n x n` board, one variable
/// per square in row-major order, built by conjoining row, column and
/// diagonal constraints.
pub fn queens(n: u32) -> Result<Bdd> {
    if n == 0 || n > 12 {
        return Err(Error::Parameter(format!("queens board size {n} outside 1..=12")));
    }
    let var = |r: u32, c: u32| r * n + c + 1;
    let mut b = Builder::new(n * n);
    let mut acc = Builder::TRUE;
    for r in 0..n {
        let mut row = Builder::FALSE;
        for c in (0..n).rev() {
            let lit = literal(&mut b, var(r, c), true);
            row = apply_in(&mut b, BoolOp::Or, lit, row);
        }
        acc = apply_in(&mut b, BoolOp::And, acc, row);
        for c in 0..n {
            let mut attacked = Vec::new();
            for r2 in 0..n {
                for c2 in 0..n {
                    if (r2, c2) == (r, c) {
                        continue;
                    }
                    let same_line = r2 == r || c2 == c;
                    let diagonal = r2.abs_diff(r) == c2.abs_diff(c);
                    if same_line || diagonal {
                        attacked.push(var(r2, c2));
                    }
                }
            }
            let cube = negative_cube(&mut b, attacked);
            let not_here = literal(&mut b, var(r, c), false);
            let implication = apply_in(&mut b, BoolOp::Or, not_here, cube);
            acc = apply_in(&mut b, BoolOp::And, acc, implication);
        }
    }
    Ok(b.finish(acc))
}

/// `rows` non-attacking rooks on a `rows x cols` board with exactly one rook
/// per row, one variable per square in row-major order.
pub fn rook(rows: u32, cols: u32) -> Result<Bdd> {
    if rows == 0 || cols == 0 || rows > cols || cols > 24 {
        return Err(Error::Parameter(format!("rook board {rows}x{cols}: need 1 <= rows <= cols <= 24")));
    }
    struct Walk {
        rows: u32,
        cols: u32,
        memo: HashMap<(u32, u32, bool), NodeId>,
    }
    impl Walk {
        // `used` marks occupied columns, `placed` whether the current row has its rook
        fn node(&mut self, b: &mut Builder, k: u32, used: u32, placed: bool) -> NodeId {
            if k == self.rows * self.cols {
                return Builder::TRUE;
            }
            if let Some(&id) = self.memo.get(&(k, used, placed)) {
                return id;
            }
            let c = k % self.cols;
            let row_end = c + 1 == self.cols;
            let low = if row_end && !placed {
                Builder::FALSE
            } else {
                self.node(b, k + 1, used, placed && !row_end)
            };
            let high = if placed || used & (1 << c) != 0 {
                Builder::FALSE
            } else {
                self.node(b, k + 1, used | (1 << c), !row_end)
            };
            let id = b.mk(k + 1, low, high);
            self.memo.insert((k, used, placed), id);
            id
        }
    }
    let mut b = Builder::new(rows * cols);
    let mut walk = Walk { rows, cols, memo: HashMap::new() };
    let root = walk.node(&mut b, 0, 0, false);
    Ok(b.finish(root))
}

/// Random reduced diagram with roughly `target_nodes` nodes, deterministic
/// for a given seed.
pub fn random_bdd_seeded(seed: u64, num_vars: u32, target_nodes: usize) -> Result<Bdd> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_bdd(&mut rng, num_vars, target_nodes)
}

/// Layer sizes such that every node can get a parent and every layer has
/// enough distinct child pairs below it.
fn layer_sizes<R: Rng>(rng: &mut R, n: usize, internal: usize) -> (usize, Vec<usize>) {
    let root_layer = if n > 1 && rng.random_bool(0.2) { rng.random_range(1..=n.min(3)) } else { 1 };
    let mut k = vec![0usize; n + 2];
    k[root_layer] = 1;
    let mut above = 1usize;
    for (left, slot) in (1..=n - root_layer).rev().zip(&mut k[root_layer + 1..=n]) {
        let want = internal.saturating_sub(above).div_ceil(left);
        let jitter = rng.random_range(0.5..1.5);
        let mut size = ((want as f64) * jitter).round() as usize;
        if rng.random_bool(0.05) {
            size = 0;
        }
        *slot = size.min(above + 1);
        above += *slot;
    }
    loop {
        let mut changed = false;
        let mut below = 2usize;
        for i in (root_layer..=n).rev() {
            let cap = below.saturating_mul(below - 1);
            if k[i] > cap {
                k[i] = cap;
                changed = true;
            }
            below += k[i];
        }
        let mut above = 0usize;
        for size in &mut k[root_layer..=n] {
            if *size > above + 1 {
                *size = above + 1;
                changed = true;
            }
            above += *size;
        }
        if !changed {
            break;
        }
    }
    (root_layer, k)
}

pub fn random_bdd<R: Rng>(rng: &mut R, num_vars: u32, target_nodes: usize) -> Result<Bdd> {
    if num_vars == 0 {
        return Err(Error::Parameter("random diagram needs at least one variable".into()));
    }
    if target_nodes <= 2 {
        return Ok(Bdd::constant(num_vars, rng.random_bool(0.5)));
    }
    let n = num_vars as usize;
    let (root_layer, sizes) = layer_sizes(rng, n, target_nodes - 2);
    let last = num_vars + 1;

    let mut nodes = vec![Node::terminal(last, false), Node::terminal(last, true)];
    let mut has_parent = vec![false, false];
    let mut orphans: Vec<NodeId> = vec![NodeId(0), NodeId(1)];
    // nodes on the layer directly below the one being built
    let mut prev_layer: Vec<NodeId> = vec![NodeId(0), NodeId(1)];
    let mut capacity_above: usize = 1 + sizes[root_layer..].iter().sum::<usize>();

    for layer in (root_layer..=n).rev() {
        let k = sizes[layer];
        if k == 0 {
            continue;
        }
        capacity_above -= k;
        let deeper = nodes.len();
        orphans.retain(|o| !has_parent[o.index()]);
        let o = orphans.len();
        let absorb_min = (o + k).saturating_sub(capacity_above);
        let absorb_max = o.min(2 * k);
        debug_assert!(absorb_min <= absorb_max);
        let mut made = None;
        for attempt in 0..256 {
            let absorb = if attempt < 16 { rng.random_range(absorb_min..=absorb_max) } else { absorb_min };
            made = try_layer(rng, k, &mut orphans, absorb, deeper, &prev_layer);
            if made.is_some() {
                break;
            }
        }
        let made = made.ok_or_else(|| Error::Parameter(format!("could not fill layer {layer}")))?;
        let first_new = nodes.len();
        for (lo, hi) in made {
            has_parent[lo.index()] = true;
            has_parent[hi.index()] = true;
            nodes.push(Node::internal(layer as u32, lo, hi));
            has_parent.push(false);
        }
        prev_layer = (first_new as u32..nodes.len() as u32).map(NodeId).collect();
        orphans.extend(prev_layer.iter().copied());
    }

    orphans.retain(|o| !has_parent[o.index()]);
    debug_assert_eq!(orphans.len(), 1);
    let root = orphans[0];
    // Renumber top-down so the root is node 0.
    let len = nodes.len() as u32;
    let flip = |id: NodeId| NodeId(len - 1 - id.0);
    let nodes: Vec<Node> = nodes
        .into_iter()
        .rev()
        .map(|node| match node.children() {
            Some([lo, hi]) => Node::internal(node.layer, flip(lo), flip(hi)),
            None => node,
        })
        .collect();
    Bdd::try_from(Diagram { num_vars, nodes, root: flip(root) })
}

/// Child pairs for one layer of `k` nodes that adopt `absorb` of the
/// orphans, or `None` when the random slot assignment is infeasible.
fn try_layer<R: Rng>(
    rng: &mut R,
    k: usize,
    orphans: &mut [NodeId],
    absorb: usize,
    deeper: usize,
    prev_layer: &[NodeId],
) -> Option<Vec<(NodeId, NodeId)>> {
    orphans.shuffle(rng);
    let mut slots: Vec<Option<NodeId>> = vec![None; 2 * k];
    let mut positions: Vec<usize> = (0..2 * k).collect();
    positions.shuffle(rng);
    for (&pos, &orphan) in positions.iter().zip(&orphans[..absorb]) {
        slots[pos] = Some(orphan);
    }
    let pick = |rng: &mut R| -> NodeId {
        if rng.random_bool(0.6) {
            prev_layer[rng.random_range(0..prev_layer.len())]
        } else {
            NodeId(rng.random_range(0..deeper as u32))
        }
    };
    let mut pairs: HashSet<(NodeId, NodeId)> = HashSet::with_capacity(k);
    // nodes with both slots forced first, so their pairs are reserved
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by_key(|&i| slots[2 * i].is_none() as u8 + slots[2 * i + 1].is_none() as u8);
    let mut made = vec![(NodeId(0), NodeId(0)); k];
    for i in idx {
        let (fl, fh) = (slots[2 * i], slots[2 * i + 1]);
        let mut tries = 0;
        let pair = loop {
            let lo = fl.unwrap_or_else(|| pick(rng));
            let hi = fh.unwrap_or_else(|| pick(rng));
            if lo != hi && !pairs.contains(&(lo, hi)) {
                break (lo, hi);
            }
            tries += 1;
            if tries > 64 {
                break exhaustive_pair(fl, fh, deeper, &pairs)?;
            }
        };
        pairs.insert(pair);
        made[i] = pair;
    }
    Some(made)
}

fn exhaustive_pair(
    fl: Option<NodeId>,
    fh: Option<NodeId>,
    deeper: usize,
    pairs: &HashSet<(NodeId, NodeId)>,
) -> Option<(NodeId, NodeId)> {
    let all = || (0..deeper as u32).map(NodeId);
    let lows: Vec<NodeId> = fl.map(|l| vec![l]).unwrap_or_else(|| all().collect());
    for &lo in &lows {
        for hi in fh.map(|h| vec![h]).unwrap_or_else(|| all().collect()) {
            if lo != hi && !pairs.contains(&(lo, hi)) {
                return Some((lo, hi));
            }
        }
    }
    None
}
