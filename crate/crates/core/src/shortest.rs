//! Label-setting shortest paths with nonnegative weights.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Scalar;

#[derive(Clone, Copy)]
struct Entry<S> {
    cost: S,
    node: usize,
}

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Entry<S> {}

impl<S: Scalar> Ord for Entry<S> {
    // Min-heap on cost; ties resolved toward the smaller node index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.partial_cmp(&self.cost).unwrap_or(Ordering::Equal).then_with(|| other.node.cmp(&self.node))
    }
}

impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over nodes `0..node_count`.
///
/// `neighbors(u, out)` appends `(v, w)` pairs for the edges leaving `u`. The
/// search stops as soon as `target` is settled. Returns the settled distances
/// (`None` for nodes never reached).
pub(crate) fn dijkstra<S, F>(
    node_count: usize,
    source: usize,
    target: Option<usize>,
    mut neighbors: F,
) -> Vec<Option<S>>
where
    S: Scalar,
    F: FnMut(usize, &mut Vec<(usize, S)>),
{
    let mut dist: Vec<Option<S>> = vec![None; node_count];
    let mut settled = vec![false; node_count];
    let mut heap = BinaryHeap::new();
    let mut out = Vec::with_capacity(8);

    dist[source] = Some(S::zero());
    heap.push(Entry { cost: S::zero(), node: source });

    while let Some(Entry { cost, node }) = heap.pop() {
        if settled[node] {
            continue;
        }
        settled[node] = true;
        if Some(node) == target {
            break;
        }
        out.clear();
        neighbors(node, &mut out);
        for &(next, w) in &out {
            if settled[next] {
                continue;
            }
            let candidate = cost + w;
            let better = match dist[next] {
                None => true,
                Some(d) => candidate < d,
            };
            if better {
                dist[next] = Some(candidate);
                heap.push(Entry { cost: candidate, node: next });
            }
        }
    }
    dist
}
