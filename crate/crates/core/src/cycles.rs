//! Simple-cycle enumeration in small undirected multigraphs.

use std::collections::BTreeSet;

/// Enumerate simple cycles (distinct nodes, distinct arcs) with at most
/// `max_len` arcs.  Arcs are (id, a, b); parallel arcs give 2-cycles and
/// self-loops give 1-cycles.  Returns (arc path, node path) pairs, deduped
/// by arc set, plus a completeness flag (false when the cap pruned paths).
pub(crate) fn simple_cycles(
    num_nodes: usize,
    arcs: &[(usize, usize, usize)],
    max_len: usize,
) -> (Vec<(Vec<usize>, Vec<usize>)>, bool) {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_nodes];
    let mut out = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for &(id, a, b) in arcs {
        if a == b {
            if max_len >= 1 && seen.insert(vec![id]) {
                out.push((vec![id], vec![a]));
            }
            continue;
        }
        adj[a].push((id, b));
        adj[b].push((id, a));
    }
    for v in adj.iter_mut() {
        v.sort_unstable();
    }

    let mut truncated = false;
    for s in 0..num_nodes {
        let mut path_nodes = vec![s];
        let mut path_arcs: Vec<usize> = Vec::new();
        dfs(
            s,
            s,
            &adj,
            max_len,
            &mut path_nodes,
            &mut path_arcs,
            &mut |arcs_seq, nodes_seq| {
                let mut key = arcs_seq.to_vec();
                key.sort_unstable();
                if seen.insert(key) {
                    out.push((arcs_seq.to_vec(), nodes_seq.to_vec()));
                }
            },
            &mut truncated,
        );
    }
    (out, !truncated)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    start: usize,
    node: usize,
    adj: &[Vec<(usize, usize)>],
    max_len: usize,
    path_nodes: &mut Vec<usize>,
    path_arcs: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize], &[usize]),
    truncated: &mut bool,
) {
    for &(arc, next) in &adj[node] {
        if path_arcs.contains(&arc) {
            continue;
        }
        if next == start && !path_arcs.is_empty() {
            let mut arcs_seq = path_arcs.clone();
            arcs_seq.push(arc);
            emit(&arcs_seq, path_nodes);
            continue;
        }
        if next <= start || path_nodes.contains(&next) {
            continue;
        }
        if path_arcs.len() + 1 >= max_len {
            *truncated = true;
            continue;
        }
        path_nodes.push(next);
        path_arcs.push(arc);
        dfs(start, next, adj, max_len, path_nodes, path_arcs, emit, truncated);
        path_nodes.pop();
        path_arcs.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_cycle_census() {
        // K4: 4 triangles + 3 quadrilaterals.
        let arcs = [
            (0, 0, 1),
            (1, 0, 2),
            (2, 0, 3),
            (3, 1, 2),
            (4, 1, 3),
            (5, 2, 3),
        ];
        let (cycles, complete) = simple_cycles(4, &arcs, 12);
        assert!(complete);
        assert_eq!(cycles.iter().filter(|(a, _)| a.len() == 3).count(), 4);
        assert_eq!(cycles.iter().filter(|(a, _)| a.len() == 4).count(), 3);
        assert_eq!(cycles.len(), 7);
    }

    #[test]
    fn parallel_arcs_and_loops() {
        let arcs = [(7, 0, 1), (8, 0, 1), (9, 1, 1)];
        let (cycles, complete) = simple_cycles(2, &arcs, 12);
        assert!(complete);
        assert_eq!(cycles.len(), 2);
        assert!(cycles.iter().any(|(a, _)| a == &vec![9]));
        assert!(cycles.iter().any(|(a, _)| {
            let mut s = a.clone();
            s.sort_unstable();
            s == vec![7, 8]
        }));
    }

    #[test]
    fn truncation_flag() {
        // 6-cycle graph: the only cycle has length 6.
        let arcs: Vec<(usize, usize, usize)> =
            (0..6).map(|i| (i, i, (i + 1) % 6)).collect();
        let (cycles, complete) = simple_cycles(6, &arcs, 5);
        assert!(cycles.is_empty());
        assert!(!complete);
        let (cycles, complete) = simple_cycles(6, &arcs, 6);
        assert_eq!(cycles.len(), 1);
        assert!(complete);
    }
}
