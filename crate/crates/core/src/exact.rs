//! Exact tree-cut width for small graphs.
//!
//! Root an optimal decomposition anywhere. A node whose subtree holds the
//! vertex set `S` sees its bag `X`, the vertex sets of its child subtrees,
//! and everything outside `S` as one contracted vertex. So the best width of
//! a subtree decomposition depends only on `S`:
//!
//! `f(S) = min over X ⊆ S and partitions {S_i} of S \ X of
//!         max(torso(X, {S_i}, V \ S), max_i max(f(S_i), |δ(S_i)|))`
//!
//! and `tcw(G) = f(V)`. Empty nodes with fewer than two children never help
//! and are skipped.

use crate::decomposition::{width, TreeCutDecomposition};
use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, Vertex, VertexSet};

pub const DEFAULT_EXACT_CAP: usize = 8;
pub const MAX_EXACT_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub tcw: u64,
    pub witness: TreeCutDecomposition,
    /// Vertex subsets evaluated.
    pub subsets: u64,
    /// Complete (bag, partition) candidates whose torso was evaluated.
    pub candidates: u64,
}

#[derive(Clone, Default)]
struct Choice {
    bag: u32,
    blocks: Vec<u32>,
}

struct Solver {
    n: usize,
    edges: Vec<(usize, usize, u32)>,
    cut: Vec<u32>,
    f: Vec<u32>,
    choice: Vec<Choice>,
    candidates: u64,
}

impl Solver {
    fn new(g: &Multigraph) -> (Self, Vec<Vertex>) {
        let (h, ids) = g.compact();
        let n = h.vertex_count();
        let edges: Vec<(usize, usize, u32)> = h.edges().map(|(u, v, c)| (u as usize, v as usize, c)).collect();
        let cut = (0..1u32 << n)
            .map(|m| {
                edges
                    .iter()
                    .filter(|&&(u, v, _)| (m >> u & 1) != (m >> v & 1))
                    .map(|&(_, _, c)| c)
                    .sum()
            })
            .collect();
        let solver = Solver {
            n,
            edges,
            cut,
            f: vec![u32::MAX; 1 << n],
            choice: vec![Choice::default(); 1 << n],
            candidates: 0,
        };
        (solver, ids)
    }

    /// `|V(3-center)|` of the torso with bag `bag`, contracted `blocks`, and
    /// the rest of the graph outside `s` contracted to one vertex.
    fn torso(&self, s: u32, bag: u32, blocks: &[u32]) -> u32 {
        let mut group = [usize::MAX; 32];
        let mut k = 0;
        for v in 0..self.n {
            if bag >> v & 1 == 1 {
                group[v] = k;
                k += 1;
            }
        }
        let protected = k;
        for &b in blocks {
            for v in 0..self.n {
                if b >> v & 1 == 1 {
                    group[v] = k;
                }
            }
            k += 1;
        }
        let full = (1u32 << self.n) - 1;
        if s != full {
            for v in 0..self.n {
                if s >> v & 1 == 0 {
                    group[v] = k;
                }
            }
            k += 1;
        }
        let mut m = vec![0u32; k * k];
        for &(u, v, c) in &self.edges {
            let (a, b) = (group[u], group[v]);
            if a != b {
                m[a * k + b] += c;
                m[b * k + a] += c;
            }
        }
        three_center_size(&mut m, k, protected)
    }

    fn solve_subset(&mut self, s: u32) {
        let mut best = u32::MAX;
        let mut best_choice = Choice::default();
        // X = S first: a cheap upper bound for pruning
        let mut x = s;
        loop {
            if x.count_ones() < best {
                let rest = s & !x;
                let mut blocks = Vec::new();
                self.partitions(s, x, rest, &mut blocks, 0, &mut best, &mut best_choice);
            }
            if x == 0 {
                break;
            }
            x = (x - 1) & s;
        }
        self.f[s as usize] = best;
        self.choice[s as usize] = best_choice;
    }

    #[allow(clippy::too_many_arguments)]
    fn partitions(
        &mut self,
        s: u32,
        bag: u32,
        rest: u32,
        blocks: &mut Vec<u32>,
        inner: u32,
        best: &mut u32,
        best_choice: &mut Choice,
    ) {
        if rest == 0 {
            if bag == 0 && blocks.len() < 2 {
                return;
            }
            self.candidates += 1;
            let t = self.torso(s, bag, blocks);
            let value = t.max(inner);
            if value < *best {
                *best = value;
                *best_choice = Choice {
                    bag,
                    blocks: blocks.clone(),
                };
            }
            return;
        }
        let low = rest & rest.wrapping_neg();
        let others = rest & !low;
        let mut sub = others;
        loop {
            let block = sub | low;
            if !(bag == 0 && block == s) {
                let v = self.f[block as usize].max(self.cut[block as usize]);
                if v < *best {
                    blocks.push(block);
                    self.partitions(s, bag, rest & !block, blocks, inner.max(v), best, best_choice);
                    blocks.pop();
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
    }

    fn build(&self, s: u32, ids: &[Vertex], d: &mut TreeCutDecomposition) -> usize {
        let c = &self.choice[s as usize];
        let bag: VertexSet = (0..self.n).filter(|&v| c.bag >> v & 1 == 1).map(|v| ids[v]).collect();
        let t = d.add_node(bag);
        for &b in &c.blocks {
            let child = self.build(b, ids, d);
            d.add_edge(t, child);
        }
        t
    }
}

/// Number of surviving vertices after the 3-center reduction of the dense
/// multigraph `m` (`k × k`), where vertices `0..protected` are kept.
fn three_center_size(m: &mut [u32], k: usize, protected: usize) -> u32 {
    let mut alive = vec![true; k];
    let mut changed = true;
    while changed {
        changed = false;
        for v in protected..k {
            if !alive[v] {
                continue;
            }
            let row = &m[v * k..(v + 1) * k];
            let degree: u32 = row.iter().sum();
            if degree > 2 {
                continue;
            }
            let nbrs: Vec<usize> = (0..k).filter(|&u| row[u] > 0).collect();
            if nbrs.len() <= 1 {
                for &u in &nbrs {
                    m[u * k + v] = 0;
                    m[v * k + u] = 0;
                }
                alive[v] = false;
                changed = true;
            } else if degree == 2 {
                let (a, b) = (nbrs[0], nbrs[1]);
                m[a * k + v] = 0;
                m[v * k + a] = 0;
                m[b * k + v] = 0;
                m[v * k + b] = 0;
                m[a * k + b] += 1;
                m[b * k + a] += 1;
                alive[v] = false;
                changed = true;
            }
        }
    }
    alive.iter().filter(|&&a| a).count() as u32
}

/// Exact tree-cut width with a witness decomposition. Fails on graphs with
/// more than `cap` vertices (and `cap` is clamped to [`MAX_EXACT_CAP`]).
pub fn exact_tcw(g: &Multigraph, cap: usize) -> Result<OracleResult> {
    let cap = cap.min(MAX_EXACT_CAP);
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::TooLarge { size: n, cap });
    }
    if n == 0 {
        return Ok(OracleResult {
            tcw: 0,
            witness: TreeCutDecomposition::new(vec![VertexSet::new()], vec![]),
            subsets: 0,
            candidates: 0,
        });
    }
    let (mut solver, ids) = Solver::new(g);
    let mut order: Vec<u32> = (1..1u32 << n).collect();
    order.sort_by_key(|s| s.count_ones());
    for &s in &order {
        solver.solve_subset(s);
    }
    let full = (1u32 << n) - 1;
    let mut witness = TreeCutDecomposition::default();
    solver.build(full, &ids, &mut witness);
    let tcw = solver.f[full as usize] as u64;
    let check = width(g, &witness)?.width;
    if check != tcw {
        return Err(Error::Internal(format!(
            "exact witness verifies to {check}, expected {tcw}"
        )));
    }
    Ok(OracleResult {
        tcw,
        witness,
        subsets: order.len() as u64,
        candidates: solver.candidates,
    })
}

/// `tcw(g) <= w`.
pub fn exact_tcw_decision(g: &Multigraph, w: u64) -> Result<bool> {
    Ok(exact_tcw(g, MAX_EXACT_CAP)?.tcw <= w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::LeafRule;
    use crate::instances::{all_graphs_up_to_iso, gen_random};

    fn tcw(g: &Multigraph) -> u64 {
        exact_tcw(g, DEFAULT_EXACT_CAP).unwrap().tcw
    }

    fn graph(n: u32, e: &[(u32, u32, u32)]) -> Multigraph {
        Multigraph::from_edges(n, e).unwrap()
    }

    fn clique(n: u32) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b, 1).unwrap();
            }
        }
        g
    }

    fn cycle(n: u32) -> Multigraph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
        graph(n, &e)
    }

    #[test]
    fn fixture_values() {
        assert_eq!(tcw(&Multigraph::with_vertices(1)), 1);
        assert_eq!(tcw(&graph(2, &[(0, 1, 1)])), 1);
        assert_eq!(tcw(&clique(3)), 2);
        assert_eq!(tcw(&clique(4)), 4);
        assert_eq!(tcw(&clique(5)), 5);
        assert_eq!(tcw(&cycle(4)), 2);
        assert_eq!(tcw(&cycle(5)), 2);
        assert_eq!(tcw(&graph(3, &[(0, 1, 1), (1, 2, 1)])), 1);
        assert_eq!(tcw(&graph(2, &[(0, 1, 2)])), 2);
        let mut k4 = clique(4);
        k4.add_edge(0, 1, 1).unwrap();
        assert_eq!(tcw(&k4), 4);
        let k23 = graph(5, &[(0, 2, 1), (0, 3, 1), (0, 4, 1), (1, 2, 1), (1, 3, 1), (1, 4, 1)]);
        assert_eq!(tcw(&k23), 2);
        let w4 = graph(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1), (4, 0, 1), (4, 1, 1), (4, 2, 1), (4, 3, 1)]);
        assert_eq!(tcw(&w4), 4);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Multigraph::with_vertices(9);
        assert_eq!(exact_tcw(&g, 8).unwrap_err(), Error::TooLarge { size: 9, cap: 8 });
    }

    #[test]
    fn witness_is_valid() {
        for seed in 0..30 {
            let g = gen_random(7, 12, 2, seed).unwrap();
            let r = exact_tcw(&g, 8).unwrap();
            r.witness.validate(&g, LeafRule::Strict).unwrap();
            assert_eq!(width(&g, &r.witness).unwrap().width, r.tcw);
        }
    }

    /// Every labeled tree on `p + aux` nodes, parts on the first `p` nodes.
    fn tcw_by_trees(g: &Multigraph) -> u64 {
        let vs: Vec<Vertex> = g.vertices().collect();
        let mut best = u64::MAX;
        for parts in set_partitions(&vs) {
            let p = parts.len();
            let max_aux = p.saturating_sub(2);
            for aux in 0..=max_aux {
                let nodes = p + aux;
                for edges in labeled_trees(nodes) {
                    let mut bags = parts.clone();
                    bags.resize(nodes, VertexSet::new());
                    let d = TreeCutDecomposition::new(bags, edges);
                    best = best.min(width(g, &d).unwrap().width);
                }
            }
        }
        best
    }

    fn set_partitions(vs: &[Vertex]) -> Vec<Vec<VertexSet>> {
        let Some((&first, rest)) = vs.split_first() else {
            return vec![vec![]];
        };
        let mut out = Vec::new();
        for p in set_partitions(rest) {
            for i in 0..p.len() {
                let mut q = p.clone();
                q[i].insert(first);
                out.push(q);
            }
            let mut q = p;
            q.push(VertexSet::from([first]));
            out.push(q);
        }
        out
    }

    fn labeled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
        if n == 1 {
            return vec![vec![]];
        }
        if n == 2 {
            return vec![vec![(0, 1)]];
        }
        let mut out = Vec::new();
        let total = n.pow(n as u32 - 2);
        for code in 0..total {
            let mut seq = Vec::with_capacity(n - 2);
            let mut c = code;
            for _ in 0..n - 2 {
                seq.push(c % n);
                c /= n;
            }
            let mut degree = vec![1; n];
            for &x in &seq {
                degree[x] += 1;
            }
            let mut edges = Vec::new();
            for &x in &seq {
                let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
                edges.push((leaf, x));
                degree[leaf] -= 1;
                degree[x] -= 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
            edges.push((rest[0], rest[1]));
            out.push(edges);
        }
        out
    }

    #[test]
    fn agrees_with_tree_enumeration() {
        for n in 1..=4 {
            for g in all_graphs_up_to_iso(n) {
                assert_eq!(tcw(&g), tcw_by_trees(&g), "{:?}", g.edges().collect::<Vec<_>>());
            }
        }
        for seed in 0..4 {
            let g = gen_random(4, 4, 3, seed).unwrap();
            assert_eq!(tcw(&g), tcw_by_trees(&g));
        }
    }

    #[test]
    fn monotone_under_edge_deletion() {
        for seed in 0..40 {
            let g = gen_random(6, 9, 2, seed).unwrap();
            let t = tcw(&g);
            for (u, v, c) in g.edges() {
                let mut h = Multigraph::with_vertices(6);
                for (a, b, d) in g.edges() {
                    let m = if (a, b) == (u, v) { d - 1 } else { d };
                    if m > 0 {
                        h.add_edge(a, b, m).unwrap();
                    }
                }
                let _ = c;
                assert!(tcw(&h) <= t, "seed {seed}");
            }
        }
    }

    #[test]
    fn never_above_a_supplied_decomposition() {
        for seed in 0..30 {
            let g = gen_random(6, 8, 2, seed).unwrap();
            let t = tcw(&g);
            assert!(t <= width(&g, &TreeCutDecomposition::trivial(&g)).unwrap().width);
            let star = TreeCutDecomposition::star(VertexSet::new(), g.vertices().map(|v| VertexSet::from([v])).collect());
            assert!(t <= width(&g, &star).unwrap().width);
        }
    }

    #[test]
    fn dense_three_center_matches_graph_version() {
        use crate::decomposition::three_center;
        for seed in 0..50 {
            let g = gen_random(6, 9, 3, seed).unwrap();
            let k = 6;
            let mut m = vec![0u32; k * k];
            for (u, v, c) in g.edges() {
                m[u as usize * k + v as usize] = c;
                m[v as usize * k + u as usize] = c;
            }
            let protected = (seed % 3) as usize;
            let x: VertexSet = (0..protected as u32).collect();
            assert_eq!(
                three_center_size(&mut m, k, protected) as usize,
                three_center(&g, &x).vertex_count()
            );
        }
    }
}
