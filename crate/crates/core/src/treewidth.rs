//! Tree decompositions, exact and greedy treewidth, and nice tree
//! decompositions with edge-introduce nodes.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, Vertex, VertexSet};

pub const DEFAULT_TW_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<VertexSet>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Largest bag size minus one; 0 when every bag is empty.
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn validate(&self, g: &Multigraph) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTreeDecomposition(m));
        let n = self.bags.len();
        if n == 0 {
            return bad("no nodes".into());
        }
        if self.edges.len() != n - 1 {
            return bad(format!("{} nodes but {} tree edges", n, self.edges.len()));
        }
        if let Some(&(a, b)) = self.edges.iter().find(|&&(a, b)| a >= n || b >= n || a == b) {
            return bad(format!("bad tree edge ({a}, {b})"));
        }
        let adj = self.adjacency();
        if reach(&adj, 0, |_| true).len() != n {
            return bad("tree is not connected".into());
        }
        for v in g.vertices() {
            let holders: BTreeSet<usize> = (0..n).filter(|&t| self.bags[t].contains(&v)).collect();
            let Some(&first) = holders.iter().next() else {
                return bad(format!("vertex {v} is in no bag"));
            };
            if reach(&adj, first, |t| holders.contains(&t)).len() != holders.len() {
                return bad(format!("bags holding vertex {v} are not connected"));
            }
        }
        for bag in &self.bags {
            if let Some(v) = bag.iter().find(|&&v| !g.contains(v)) {
                return bad(format!("vertex {v} is not in the graph"));
            }
        }
        for (u, v, _) in g.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return bad(format!("edge {u}-{v} is in no bag"));
            }
        }
        Ok(())
    }
}

fn reach(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if allowed(y) && seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Bitmask adjacency of the simple skeleton over compacted indices.
fn skeleton(g: &Multigraph) -> (Vec<Vertex>, Vec<u32>) {
    let ids: Vec<Vertex> = g.vertices().collect();
    let index: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj = ids
        .iter()
        .map(|&v| g.neighbors(v).fold(0u32, |m, (u, _)| m | 1 << index[&u]))
        .collect();
    (ids, adj)
}

/// Vertices outside `s ∪ {v}` reachable from `v` through `s`.
fn q_size(adj: &[u32], s: u32, v: usize) -> u32 {
    let mut visited = 1u32 << v;
    let mut frontier = 1u32 << v;
    let mut out = 0u32;
    while frontier != 0 {
        let x = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let nb = adj[x] & !visited;
        visited |= nb;
        out |= nb & !s;
        frontier |= nb & s;
    }
    out.count_ones()
}

/// Exact treewidth by dynamic programming over vertex subsets, with a witness
/// decomposition of that width.
pub fn exact_treewidth(g: &Multigraph) -> Result<(usize, TreeDecomposition)> {
    exact_treewidth_capped(g, DEFAULT_TW_CAP)
}

pub fn exact_treewidth_capped(g: &Multigraph, cap: usize) -> Result<(usize, TreeDecomposition)> {
    let n = g.vertex_count();
    if n > cap.min(DEFAULT_TW_CAP) {
        return Err(Error::TooLarge {
            size: n,
            cap: cap.min(DEFAULT_TW_CAP),
        });
    }
    let (ids, adj) = skeleton(g);
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut tw = vec![u8::MAX; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            if tw[prev as usize] >= best {
                continue;
            }
            let q = q_size(&adj, prev, v) as u8;
            best = best.min(tw[prev as usize].max(q));
        }
        tw[s as usize] = best;
    }
    // walk back to an optimal elimination order
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let mut rest = s;
        loop {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            if tw[prev as usize].max(q_size(&adj, prev, v) as u8) == tw[s as usize] {
                order.push(v);
                s = prev;
                break;
            }
        }
    }
    order.reverse();
    let order: Vec<Vertex> = order.into_iter().map(|i| ids[i]).collect();
    let d = from_elimination_order(g, &order);
    Ok((tw[full as usize] as usize, d))
}

/// Greedy min-fill elimination (ties by degree, then vertex id).
pub fn heuristic_ub(g: &Multigraph) -> (usize, TreeDecomposition) {
    let mut nb: BTreeMap<Vertex, BTreeSet<Vertex>> = g
        .vertices()
        .map(|v| (v, g.neighbors(v).map(|(u, _)| u).collect()))
        .collect();
    let mut order = Vec::with_capacity(nb.len());
    while !nb.is_empty() {
        let v = *nb
            .iter()
            .min_by_key(|(&v, ns)| {
                let ns: Vec<_> = ns.iter().collect();
                let mut fill = 0usize;
                for (i, a) in ns.iter().enumerate() {
                    for b in &ns[i + 1..] {
                        if !nb[a].contains(b) {
                            fill += 1;
                        }
                    }
                }
                (fill, ns.len(), v)
            })
            .unwrap()
            .0;
        let ns = nb.remove(&v).unwrap();
        for &a in &ns {
            let e = nb.get_mut(&a).unwrap();
            e.remove(&v);
            e.extend(ns.iter().copied().filter(|&b| b != a));
        }
        order.push(v);
    }
    let d = from_elimination_order(g, &order);
    (d.width(), d)
}

/// Tree decomposition induced by eliminating vertices in `order`.
pub fn from_elimination_order(g: &Multigraph, order: &[Vertex]) -> TreeDecomposition {
    if order.is_empty() {
        return TreeDecomposition {
            bags: vec![VertexSet::new()],
            edges: vec![],
        };
    }
    let pos: BTreeMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut nb: BTreeMap<Vertex, BTreeSet<Vertex>> = g
        .vertices()
        .map(|v| (v, g.neighbors(v).map(|(u, _)| u).collect()))
        .collect();
    let mut bags = Vec::with_capacity(order.len());
    let mut edges = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let ns = nb.remove(&v).unwrap();
        for &a in &ns {
            let e = nb.get_mut(&a).unwrap();
            e.remove(&v);
            e.extend(ns.iter().copied().filter(|&b| b != a));
        }
        let parent = match ns.iter().min_by_key(|u| pos[u]) {
            Some(u) => Some(pos[u]),
            None if i + 1 < order.len() => Some(i + 1),
            None => None,
        };
        if let Some(p) = parent {
            edges.push((i, p));
        }
        let mut bag = ns;
        bag.insert(v);
        bags.push(bag);
    }
    TreeDecomposition { bags, edges }
}

/// `tw <= 2 t^2 + 3 t` for a graph of tree-cut width `tcw`.
pub fn treewidth_bound_check(g: &Multigraph, tcw: u64) -> Result<bool> {
    let (tw, _) = exact_treewidth(g)?;
    Ok(tw as u64 <= 2 * tcw * tcw + 3 * tcw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce(Vertex),
    Forget(Vertex),
    /// Both endpoints are in the bag; carries the full multiplicity.
    IntroduceEdge(Vertex, Vertex, u32),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted.
    pub bag: Vec<Vertex>,
    pub children: Vec<usize>,
}

/// Nodes are stored children-first, so index order is a valid bottom-up
/// processing order. The root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn validate(&self, g: &Multigraph) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTreeDecomposition(m));
        if self.nodes.is_empty() {
            return bad("no nodes".into());
        }
        if !self.nodes[self.root()].bag.is_empty() {
            return bad("root bag is not empty".into());
        }
        let mut parent = vec![None; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                if c >= i || parent[c].is_some() {
                    return bad(format!("node {i} has a bad child {c}"));
                }
                parent[c] = Some(i);
            }
            let child_bag = |k: usize| &self.nodes[node.children[k]].bag;
            let ok = match node.kind {
                NiceKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NiceKind::Introduce(v) => {
                    node.children.len() == 1 && {
                        let c = child_bag(0);
                        !c.contains(&v) && with(c, v) == node.bag
                    }
                }
                NiceKind::Forget(v) => {
                    node.children.len() == 1 && {
                        let c = child_bag(0);
                        c.contains(&v) && without(c, v) == node.bag
                    }
                }
                NiceKind::IntroduceEdge(u, v, c) => {
                    node.children.len() == 1
                        && *child_bag(0) == node.bag
                        && node.bag.contains(&u)
                        && node.bag.contains(&v)
                        && u != v
                        && c > 0
                }
                NiceKind::Join => {
                    node.children.len() == 2 && *child_bag(0) == node.bag && *child_bag(1) == node.bag
                }
            };
            if !ok {
                return bad(format!("node {i} ({:?}) is malformed", node.kind));
            }
        }
        if parent[..self.root()].iter().any(|p| p.is_none()) {
            return bad("some node has no parent".into());
        }
        // each vertex is forgotten exactly once, and is in the graph
        let mut forgotten = BTreeMap::new();
        let mut edges: BTreeMap<(Vertex, Vertex), u32> = BTreeMap::new();
        for node in &self.nodes {
            match node.kind {
                NiceKind::Forget(v) => *forgotten.entry(v).or_insert(0) += 1,
                NiceKind::IntroduceEdge(u, v, c)
                    if edges.insert((u.min(v), u.max(v)), c).is_some() => {
                        return bad(format!("edge {u}-{v} introduced twice"));
                    }
                _ => {}
            }
        }
        let verts: BTreeMap<Vertex, i32> = g.vertices().map(|v| (v, 1)).collect();
        if forgotten != verts {
            return bad("vertices are not each forgotten exactly once".into());
        }
        let expected: BTreeMap<(Vertex, Vertex), u32> = g.edges().map(|(u, v, c)| ((u, v), c)).collect();
        if edges != expected {
            return bad("introduced edges differ from the graph".into());
        }
        Ok(())
    }
}

fn with(bag: &[Vertex], v: Vertex) -> Vec<Vertex> {
    let mut b = bag.to_vec();
    let i = b.binary_search(&v).unwrap_err();
    b.insert(i, v);
    b
}

fn without(bag: &[Vertex], v: Vertex) -> Vec<Vertex> {
    bag.iter().copied().filter(|&x| x != v).collect()
}

struct NiceBuilder<'a> {
    g: &'a Multigraph,
    nodes: Vec<NiceNode>,
    introduced: BTreeSet<(Vertex, Vertex)>,
}

impl NiceBuilder<'_> {
    fn push(&mut self, kind: NiceKind, bag: Vec<Vertex>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    fn introduce(&mut self, mut top: usize, v: Vertex) -> usize {
        let bag = with(&self.nodes[top].bag, v);
        top = self.push(NiceKind::Introduce(v), bag, vec![top]);
        top
    }

    /// Introduces every pending edge at `u` to the current bag, then forgets `u`.
    fn forget(&mut self, mut top: usize, u: Vertex) -> usize {
        let bag = self.nodes[top].bag.clone();
        for &x in &bag {
            let key = (u.min(x), u.max(x));
            let m = self.g.multiplicity(u, x);
            if x != u && m > 0 && self.introduced.insert(key) {
                top = self.push(NiceKind::IntroduceEdge(key.0, key.1, m), bag.clone(), vec![top]);
            }
        }
        self.push(NiceKind::Forget(u), without(&bag, u), vec![top])
    }

    fn transform(&mut self, mut top: usize, target: &VertexSet) -> usize {
        let current = self.nodes[top].bag.clone();
        for &u in current.iter().filter(|u| !target.contains(u)) {
            top = self.forget(top, u);
        }
        let current: BTreeSet<Vertex> = self.nodes[top].bag.iter().copied().collect();
        for &v in target.difference(&current) {
            top = self.introduce(top, v);
        }
        top
    }
}

/// Nice tree decomposition of the same width as `d`, rooted at node 0 of `d`.
pub fn to_nice(g: &Multigraph, d: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    d.validate(g)?;
    let adj = d.adjacency();
    let mut b = NiceBuilder {
        g,
        nodes: Vec::new(),
        introduced: BTreeSet::new(),
    };
    // iterative post-order from node 0
    let mut order = Vec::new();
    let mut parent = vec![usize::MAX; d.bags.len()];
    let mut stack = vec![0];
    parent[0] = 0;
    while let Some(t) = stack.pop() {
        order.push(t);
        for &c in &adj[t] {
            if parent[c] == usize::MAX {
                parent[c] = t;
                stack.push(c);
            }
        }
    }
    let mut top = vec![usize::MAX; d.bags.len()];
    for &t in order.iter().rev() {
        let children: Vec<usize> = adj[t].iter().copied().filter(|&c| c != 0 && parent[c] == t).collect();
        let mut branches = Vec::new();
        for c in children {
            branches.push(b.transform(top[c], &d.bags[t]));
        }
        if branches.is_empty() {
            let leaf = b.push(NiceKind::Leaf, vec![], vec![]);
            branches.push(b.transform(leaf, &d.bags[t]));
        }
        let mut acc = branches[0];
        for &other in &branches[1..] {
            let bag = b.nodes[acc].bag.clone();
            acc = b.push(NiceKind::Join, bag, vec![acc, other]);
        }
        top[t] = acc;
    }
    b.transform(top[0], &VertexSet::new());
    Ok(NiceTreeDecomposition { nodes: b.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{all_graphs_up_to_iso, gen_hw, gen_random};
    use crate::multigraph::vset;

    fn clique(n: u32) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b, 1).unwrap();
            }
        }
        g
    }

    /// Minimum over all elimination orders, by enumerating permutations.
    fn tw_by_permutations(g: &Multigraph) -> usize {
        let vs: Vec<Vertex> = g.vertices().collect();
        itertools::Itertools::permutations(vs.iter().copied(), vs.len())
            .map(|p| from_elimination_order(g, &p).width())
            .min()
            .unwrap_or(0)
    }

    #[test]
    fn exact_examples() {
        let path = Multigraph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        assert_eq!(exact_treewidth(&path).unwrap().0, 1);
        let star = Multigraph::from_edges(5, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 2)]).unwrap();
        assert_eq!(exact_treewidth(&star).unwrap().0, 1);
        assert_eq!(exact_treewidth(&clique(5)).unwrap().0, 4);
        let (tw, d) = exact_treewidth(&gen_hw(3)).unwrap();
        assert_eq!(tw, 2);
        d.validate(&gen_hw(3)).unwrap();
        assert_eq!(d.width(), 2);
    }

    #[test]
    fn exact_matches_permutation_search() {
        for n in 1..=6 {
            for seed in 0..6 {
                let m = (seed as usize * 3 + n as usize) % (n as usize * (n as usize - 1) / 2 + 1);
                let g = gen_random(n, m, 2, seed).unwrap();
                let (tw, d) = exact_treewidth(&g).unwrap();
                d.validate(&g).unwrap();
                assert_eq!(d.width(), tw);
                assert_eq!(tw, tw_by_permutations(&g));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = Multigraph::with_vertices(21);
        assert_eq!(
            exact_treewidth(&g).unwrap_err(),
            Error::TooLarge { size: 21, cap: 20 }
        );
    }

    #[test]
    fn heuristic_bounds_exact() {
        for g in all_graphs_up_to_iso(5) {
            let (ub, d) = heuristic_ub(&g);
            d.validate(&g).unwrap();
            assert!(ub >= exact_treewidth(&g).unwrap().0);
        }
        assert_eq!(heuristic_ub(&clique(6)).0, 5);
        let path = Multigraph::from_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert_eq!(heuristic_ub(&path).0, 1);
    }

    #[test]
    fn nice_single_edge() {
        let g = Multigraph::from_edges(2, &[(0, 1, 1)]).unwrap();
        let d = TreeDecomposition {
            bags: vec![vset([0, 1])],
            edges: vec![],
        };
        let nice = to_nice(&g, &d).unwrap();
        nice.validate(&g).unwrap();
        let kinds: Vec<NiceKind> = nice.nodes.iter().map(|n| n.kind).collect();
        assert_eq!(
            kinds,
            vec![
                NiceKind::Leaf,
                NiceKind::Introduce(0),
                NiceKind::Introduce(1),
                NiceKind::IntroduceEdge(0, 1, 1),
                NiceKind::Forget(0),
                NiceKind::Forget(1),
            ]
        );
    }

    #[test]
    fn nice_triangle_and_double_edge() {
        let g = clique(3);
        let d = TreeDecomposition {
            bags: vec![vset([0, 1, 2])],
            edges: vec![],
        };
        let nice = to_nice(&g, &d).unwrap();
        nice.validate(&g).unwrap();
        let count = nice
            .nodes
            .iter()
            .filter(|n| matches!(n.kind, NiceKind::IntroduceEdge(..)))
            .count();
        assert_eq!(count, 3);

        let dbl = Multigraph::from_edges(2, &[(0, 1, 2)]).unwrap();
        let d = TreeDecomposition {
            bags: vec![vset([0, 1])],
            edges: vec![],
        };
        let nice = to_nice(&dbl, &d).unwrap();
        let edges: Vec<NiceKind> = nice
            .nodes
            .iter()
            .map(|n| n.kind)
            .filter(|k| matches!(k, NiceKind::IntroduceEdge(..)))
            .collect();
        assert_eq!(edges, vec![NiceKind::IntroduceEdge(0, 1, 2)]);
    }

    #[test]
    fn nice_preserves_width_and_multiplicity() {
        for seed in 0..40 {
            let g = gen_random(8, 14, 3, seed).unwrap();
            let (tw, d) = heuristic_ub(&g);
            let nice = to_nice(&g, &d).unwrap();
            nice.validate(&g).unwrap();
            assert_eq!(nice.width(), tw);
            let total: u64 = nice
                .nodes
                .iter()
                .filter_map(|n| match n.kind {
                    NiceKind::IntroduceEdge(_, _, c) => Some(c as u64),
                    _ => None,
                })
                .sum();
            assert_eq!(total, g.edge_count());
        }
    }

    #[test]
    fn nice_rejects_invalid_decomposition() {
        let g = clique(3);
        let d = TreeDecomposition {
            bags: vec![vset([0, 1]), vset([2])],
            edges: vec![(0, 1)],
        };
        assert!(matches!(to_nice(&g, &d), Err(Error::InvalidTreeDecomposition(_))));
    }

    #[test]
    fn bound_holds_on_small_cases() {
        assert!(treewidth_bound_check(&clique(4), 4).unwrap());
        assert!(treewidth_bound_check(&gen_hw(3), 3).unwrap());
        let e = Multigraph::from_edges(2, &[(0, 1, 1)]).unwrap();
        assert!(treewidth_bound_check(&e, 1).unwrap());
    }
}
