//! Cycle-structure statistics: the maximum number of cyclic components over
//! all edge subsets, and maximum packings of vertex-disjoint cycles of a
//! fixed length. Both are exact, by exhaustive search, and guarded by budgets.

use super::{Graph, GraphError, UnionFind};

pub const DEFAULT_EDGE_BUDGET: usize = 22;

/// Maximum over all edge subsets `A` of the number of connected components of
/// `(V, A)` that contain a cycle.
pub fn cyclic_components_max(g: &Graph) -> Result<usize, GraphError> {
    cyclic_components_max_with_budget(g, DEFAULT_EDGE_BUDGET)
}

pub fn cyclic_components_max_with_budget(
    g: &Graph,
    edge_budget: usize,
) -> Result<usize, GraphError> {
    let m = g.m();
    if m > edge_budget.min(31) {
        return Err(GraphError::BudgetExceeded {
            what: "edges",
            size: m,
            limit: edge_budget.min(31),
        });
    }
    let edges = g.edges();
    let mut uf = UnionFind::new(g.n());
    // edge count per component root, reused across subsets
    let mut extra = vec![0u32; g.n()];
    let mut best = 0usize;
    for mask in 0u32..(1u32 << m) {
        // each cyclic component needs at least 3 edges, so a subset with
        // popcount/3 <= best cannot improve on the best found so far
        let bits = mask.count_ones() as usize;
        if bits / 3 <= best {
            continue;
        }
        uf.reset();
        let mut rest = mask;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let (u, v) = edges[e];
            if !uf.union(u, v) {
                extra[uf.find(u)] += 1;
            }
        }
        // components with more edges than a tree allows contain a cycle;
        // every such root is reachable from some subset edge, and zeroing
        // as we count leaves `extra` clean for the next subset
        let mut count = 0usize;
        let mut rest = mask;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let r = uf.find(edges[e].0);
            if extra[r] > 0 {
                count += 1;
                extra[r] = 0;
            }
        }
        best = best.max(count);
    }
    Ok(best)
}

const CYCLE_VERTEX_BUDGET: usize = 24;
const CYCLE_LIST_BUDGET: usize = 200_000;

/// Maximum number of vertex-disjoint cycles of length exactly `len`.
///
/// Lengths below 3 return 0: simple graphs have no 1- or 2-cycles, so those
/// terms of the decomposition bound vanish identically.
pub fn disjoint_cycles_max(g: &Graph, len: usize) -> Result<usize, GraphError> {
    if len < 3 {
        return Ok(0);
    }
    if g.n() > CYCLE_VERTEX_BUDGET {
        return Err(GraphError::BudgetExceeded {
            what: "vertices",
            size: g.n(),
            limit: CYCLE_VERTEX_BUDGET,
        });
    }
    let cycles = enumerate_cycles(g, len)?;
    if cycles.is_empty() {
        return Ok(0);
    }
    let cap = g.n() / len;
    let mut best = 0usize;
    pack(&cycles, 0, 0u32, 0, cap, &mut best);
    Ok(best)
}

/// All simple cycles of length `len`, each as a vertex bitmask. Canonical
/// form: the start is the smallest vertex and its first neighbour on the
/// cycle is smaller than its last, so each cycle appears exactly once.
fn enumerate_cycles(g: &Graph, len: usize) -> Result<Vec<u32>, GraphError> {
    let adj = g.adjacency();
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(len);
    for start in 0..g.n() {
        path.push(start);
        dfs_cycles(&adj, start, start, len, 1u32 << start, &mut path, &mut out)?;
        path.pop();
    }
    Ok(out)
}

fn dfs_cycles(
    adj: &[Vec<usize>],
    start: usize,
    current: usize,
    len: usize,
    visited: u32,
    path: &mut Vec<usize>,
    out: &mut Vec<u32>,
) -> Result<(), GraphError> {
    if path.len() == len {
        if adj[current].contains(&start) && path[1] < *path.last().unwrap() {
            out.push(visited);
            if out.len() > CYCLE_LIST_BUDGET {
                return Err(GraphError::BudgetExceeded {
                    what: "cycles",
                    size: out.len(),
                    limit: CYCLE_LIST_BUDGET,
                });
            }
        }
        return Ok(());
    }
    for &next in &adj[current] {
        if next <= start || visited & (1u32 << next) != 0 {
            continue;
        }
        path.push(next);
        dfs_cycles(adj, start, next, len, visited | (1u32 << next), path, out)?;
        path.pop();
    }
    Ok(())
}

fn pack(cycles: &[u32], from: usize, used: u32, picked: usize, cap: usize, best: &mut usize) {
    *best = (*best).max(picked);
    if picked >= cap || *best >= cap {
        return;
    }
    for i in from..cycles.len() {
        if cycles[i] & used == 0 {
            pack(cycles, i + 1, used | cycles[i], picked + 1, cap, best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{gen_gnm, gen_random_tree};

    fn triangle() -> Graph {
        Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn k4() -> Graph {
        Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn forests_have_no_cyclic_components() {
        for seed in 0..5 {
            let t = gen_random_tree(7, seed).unwrap();
            assert_eq!(cyclic_components_max(&t).unwrap(), 0);
        }
        let isolated = Graph::new(4, vec![]).unwrap();
        assert_eq!(cyclic_components_max(&isolated).unwrap(), 0);
    }

    #[test]
    fn triangle_and_disjoint_triangles() {
        assert_eq!(cyclic_components_max(&triangle()).unwrap(), 1);
        let two = triangle().disjoint_union(&triangle());
        assert_eq!(cyclic_components_max(&two).unwrap(), 2);
    }

    #[test]
    fn disjoint_union_additivity() {
        let g = gen_gnm(5, 7, 11).unwrap();
        let h = gen_gnm(4, 5, 12).unwrap();
        let gu = cyclic_components_max(&g).unwrap();
        let hu = cyclic_components_max(&h).unwrap();
        assert_eq!(cyclic_components_max(&g.disjoint_union(&h)).unwrap(), gu + hu);
    }

    #[test]
    fn budget_is_enforced() {
        let g = gen_gnm(10, 23, 0).unwrap();
        assert!(matches!(
            cyclic_components_max(&g),
            Err(GraphError::BudgetExceeded { .. })
        ));
        assert!(cyclic_components_max_with_budget(&g, 23).is_ok());
    }

    #[test]
    fn cycle_packing_examples() {
        assert_eq!(disjoint_cycles_max(&triangle(), 3).unwrap(), 1);
        assert_eq!(disjoint_cycles_max(&triangle(), 4).unwrap(), 0);
        // any two triangles of K4 share a vertex
        assert_eq!(disjoint_cycles_max(&k4(), 3).unwrap(), 1);
        assert_eq!(disjoint_cycles_max(&k4(), 4).unwrap(), 1);
        let two = triangle().disjoint_union(&triangle());
        assert_eq!(disjoint_cycles_max(&two, 3).unwrap(), 2);
        // 2-cycles vanish by convention
        assert_eq!(disjoint_cycles_max(&k4(), 2).unwrap(), 0);
    }

    #[test]
    fn decomposition_bound_holds() {
        // L(G) <= n/k + sum_{i=3}^{k-1} L_i(G), as integers: k*L <= n + k*sum
        for seed in 0..20u64 {
            let g = gen_gnm(8, 12, seed).unwrap();
            let l = cyclic_components_max(&g).unwrap();
            for k in [4usize, 5] {
                let sum: usize = (3..k)
                    .map(|i| disjoint_cycles_max(&g, i).unwrap())
                    .sum();
                assert!(
                    k * l <= g.n() + k * sum,
                    "seed {seed} k {k}: L={l} n={} sum={sum}",
                    g.n()
                );
            }
        }
    }
}
