//! Topological file ordering: imported files precede their importers.
//!
//! Cycles are collapsed into a single super-node whose files stay adjacent in
//! path order; the condensation is ordered by Kahn's algorithm with a
//! smallest-representative-path heap, so output is deterministic.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::pack::deps::DepGraph;

/// Returns all node paths in dependency order (imported before importer).
pub fn topo_order(graph: &DepGraph) -> Vec<String> {
    let n = graph.nodes.len();
    if n == 0 {
        return Vec::new();
    }
    let comp = strongly_connected(graph);
    let comp_count = comp.iter().copied().max().unwrap_or(0) + 1;

    // Members per component, kept in path order (nodes are sorted).
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); comp_count];
    for (node, &c) in comp.iter().enumerate() {
        members[c].push(node);
    }
    // Representative path per component: its smallest member path.
    let repr: Vec<&str> = members
        .iter()
        .map(|m| graph.nodes[m[0]].as_str())
        .collect();

    // Condensation edges run imported-component -> importer-component so the
    // ready set is "everything whose imports are emitted".
    let mut out_edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comp_count];
    let mut in_degree = vec![0usize; comp_count];
    for &(importer, imported) in &graph.edges {
        let (ci, cj) = (comp[importer], comp[imported]);
        if ci != cj && out_edges[cj].insert(ci) {
            in_degree[ci] += 1;
        }
    }

    let mut ready: BinaryHeap<Reverse<(&str, usize)>> = (0..comp_count)
        .filter(|&c| in_degree[c] == 0)
        .map(|c| Reverse((repr[c], c)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, c))) = ready.pop() {
        for &node in &members[c] {
            order.push(graph.nodes[node].clone());
        }
        for &next in &out_edges[c] {
            in_degree[next] -= 1;
            if in_degree[next] == 0 {
                ready.push(Reverse((repr[next], next)));
            }
        }
    }
    debug_assert_eq!(order.len(), n, "condensation must be acyclic");
    order
}

/// Iterative Tarjan SCC; returns the component id of each node.
fn strongly_connected(graph: &DepGraph) -> Vec<usize> {
    let n = graph.nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &graph.edges {
        adj[a].push(b);
    }

    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut comp_count = 0usize;

    for start in 0..n {
        if index[start] != UNSET {
            continue;
        }
        // (node, next child position) call frames.
        let mut frames: Vec<(usize, usize)> = vec![(start, 0)];
        while let Some(&(v, child)) = frames.last() {
            if index[v] == UNSET {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if child < adj[v].len() {
                let w = adj[v][child];
                frames.last_mut().unwrap().1 += 1;
                if index[w] == UNSET {
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }
    comp
}

/// Independent validity check used by tests and callers: every edge
/// (importer, imported) must place the imported file earlier, unless the two
/// share a collapsed cycle.
pub fn verify_topological(graph: &DepGraph, order: &[String]) -> bool {
    let pos: std::collections::HashMap<&str, usize> =
        order.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    if pos.len() != graph.nodes.len() {
        return false;
    }
    let comp = strongly_connected(graph);
    for &(importer, imported) in &graph.edges {
        if comp[importer] == comp[imported] {
            continue;
        }
        let pi = pos[graph.nodes[importer].as_str()];
        let pj = pos[graph.nodes[imported].as_str()];
        if pj >= pi {
            return false;
        }
    }
    true
}
