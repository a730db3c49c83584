//! Decomposition of oversize repositories into independent subgraphs.
//!
//! Weakly connected components are binned greedily up to the size cap. A
//! single component over the cap is split at the cut with the fewest
//! crossing edges whose sides respect the cap — found exhaustively for small
//! components, by a deterministic greedy for large ones — and the split
//! recurses until every piece fits.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::pack::deps::DepGraph;

/// Exhaustive cut search is used up to this many nodes.
const EXACT_CUT_LIMIT: usize = 20;

#[derive(Debug, Clone)]
pub struct Subgraph {
    /// Node indices into the parent graph, sorted.
    pub nodes: Vec<usize>,
    pub size: u64,
    /// A single file larger than the cap is emitted alone and flagged.
    pub oversize: bool,
}

/// Splits the graph into subgraphs whose estimated sizes fit `cap`.
/// `sizes` maps node index to its token estimate.
pub fn decompose_oversize(graph: &DepGraph, sizes: &[u64], cap: u64) -> Result<Vec<Subgraph>> {
    if cap == 0 {
        return Err(Error::config("size cap must be positive"));
    }
    if graph.nodes.len() != sizes.len() {
        return Err(Error::invalid("sizes must cover every graph node"));
    }

    // Weakly connected components via union-find, ordered by smallest member.
    let n = graph.nodes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in &graph.edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        components.entry(r).or_default().push(v);
    }

    // Oversize components split recursively into cap-sized pieces.
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    for nodes in components.into_values() {
        split_recursive(graph, sizes, cap, nodes, &mut pieces);
    }

    // Greedy first-fit binning of the pieces, in deterministic order.
    let mut bins: Vec<Subgraph> = Vec::new();
    for piece in pieces {
        let size: u64 = piece.iter().map(|&v| sizes[v]).sum();
        if size > cap {
            // A single node can exceed the cap; flag and emit alone.
            debug_assert_eq!(piece.len(), 1);
            bins.push(Subgraph { nodes: piece, size, oversize: true });
            continue;
        }
        match bins
            .iter_mut()
            .find(|b| !b.oversize && b.size + size <= cap)
        {
            Some(bin) => {
                bin.nodes.extend(&piece);
                bin.size += size;
            }
            None => bins.push(Subgraph { nodes: piece, size, oversize: false }),
        }
    }
    for bin in &mut bins {
        bin.nodes.sort_unstable();
    }
    Ok(bins)
}

fn split_recursive(
    graph: &DepGraph,
    sizes: &[u64],
    cap: u64,
    nodes: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let total: u64 = nodes.iter().map(|&v| sizes[v]).sum();
    if total <= cap || nodes.len() == 1 {
        out.push(nodes);
        return;
    }
    let (a, b) = best_cut(graph, sizes, cap, &nodes);
    split_recursive(graph, sizes, cap, a, out);
    split_recursive(graph, sizes, cap, b, out);
}

/// The two-way cut minimizing crossing edges, preferring cuts whose sides
/// both fit the cap. Exhaustive for small components, greedy beyond.
pub fn best_cut(
    graph: &DepGraph,
    sizes: &[u64],
    cap: u64,
    nodes: &[usize],
) -> (Vec<usize>, Vec<usize>) {
    let local_edges: Vec<(usize, usize)> = {
        let set: BTreeSet<usize> = nodes.iter().copied().collect();
        graph
            .edges
            .iter()
            .filter(|(a, b)| set.contains(a) && set.contains(b))
            .map(|&(a, b)| {
                let ai = nodes.iter().position(|&v| v == a).unwrap();
                let bi = nodes.iter().position(|&v| v == b).unwrap();
                (ai, bi)
            })
            .collect()
    };
    let local_sizes: Vec<u64> = nodes.iter().map(|&v| sizes[v]).collect();

    let assignment = if nodes.len() <= EXACT_CUT_LIMIT {
        exact_cut(&local_edges, &local_sizes, cap)
    } else {
        greedy_cut(&local_sizes)
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, &v) in nodes.iter().enumerate() {
        if assignment[i] {
            b.push(v);
        } else {
            a.push(v);
        }
    }
    (a, b)
}

/// Enumerates every 2-partition (node n-1 pinned to side A, which loses no
/// cuts since sides are symmetric) and picks the one minimizing
/// (#sides over cap, crossing edges, mask value). Returns side-B membership.
fn exact_cut(edges: &[(usize, usize)], sizes: &[u64], cap: u64) -> Vec<bool> {
    let n = sizes.len();
    let total: u64 = sizes.iter().sum();
    let mut best: Option<(usize, usize, u64)> = None;
    for mask in 1u64..(1u64 << (n - 1)) {
        let size_b: u64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| sizes[i]).sum();
        let size_a = total - size_b;
        if size_b == 0 || size_a == 0 {
            continue;
        }
        let over = usize::from(size_a > cap) + usize::from(size_b > cap);
        let crossing = edges
            .iter()
            .filter(|(a, b)| (mask >> a) & 1 != (mask >> b) & 1)
            .count();
        let key = (over, crossing, mask);
        if best.map(|b| key < b).unwrap_or(true) {
            best = Some(key);
        }
    }
    let mask = best.map(|(_, _, mask)| mask).unwrap_or(1);
    (0..n).map(|i| mask & (1 << i) != 0).collect()
}

/// Deterministic fallback for big components: walk nodes in order and fill
/// side A up to half the total. Returns side-B membership.
fn greedy_cut(sizes: &[u64]) -> Vec<bool> {
    let total: u64 = sizes.iter().sum();
    let mut acc = 0u64;
    let mut side_b: Vec<bool> = sizes
        .iter()
        .map(|&s| {
            if acc + s <= total / 2 {
                acc += s;
                false
            } else {
                true
            }
        })
        .collect();
    if side_b.iter().all(|b| !b) {
        *side_b.last_mut().expect("component has nodes") = true;
    }
    side_b
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}
