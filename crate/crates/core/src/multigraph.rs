//! Loopless undirected multigraphs with cut, dissolve and identification
//! primitives.
//!
//! Parallel edges are stored as a multiplicity per unordered vertex pair. Every
//! cut size reported by this module is a multiplicity sum.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

pub type Vertex = u32;
pub type VertexSet = BTreeSet<Vertex>;

/// A loopless undirected multigraph with stable vertex ids.
///
/// Equality compares vertices and edges only.
#[derive(Debug, Clone, Default)]
pub struct Multigraph {
    adj: BTreeMap<Vertex, BTreeMap<Vertex, u32>>,
    // High-water mark for ids; ids below it are never handed out again.
    next_id: Vertex,
}

impl PartialEq for Multigraph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for Multigraph {}

/// The edges between two disjoint vertex sets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeCut {
    pub size: u64,
    /// `(x, y, multiplicity)` with `x` on the first side and `y` on the second.
    pub edges: Vec<(Vertex, Vertex, u32)>,
}

/// A bipartition side whose cut has at most two edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallCut {
    pub side: VertexSet,
    pub size: u64,
}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph on vertices `0..n` without edges.
    pub fn with_vertices(n: u32) -> Self {
        let mut g = Self::new();
        for v in 0..n {
            g.adj.insert(v, BTreeMap::new());
        }
        g.next_id = n;
        g
    }

    /// Graph on `0..n` with the given `(u, v, multiplicity)` edges. Repeated
    /// pairs accumulate.
    pub fn from_edges(n: u32, edges: &[(Vertex, Vertex, u32)]) -> Result<Self> {
        let mut g = Self::with_vertices(n);
        for &(u, v, c) in edges {
            g.add_edge(u, v, c)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex) -> Result<()> {
        if self.adj.contains_key(&v) {
            return Err(Error::DuplicateVertex(v));
        }
        self.adj.insert(v, BTreeMap::new());
        self.next_id = self.next_id.max(v + 1);
        Ok(())
    }

    /// Adds `mult` parallel edges between `u` and `v`.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex, mult: u32) -> Result<()> {
        if u == v {
            return Err(Error::Loop(u));
        }
        if mult == 0 {
            return Err(Error::ZeroMultiplicity(u, v));
        }
        for x in [u, v] {
            if !self.adj.contains_key(&x) {
                return Err(Error::MissingVertex(x));
            }
        }
        *self.adj.get_mut(&u).unwrap().entry(v).or_insert(0) += mult;
        *self.adj.get_mut(&v).unwrap().entry(u).or_insert(0) += mult;
        Ok(())
    }

    pub(crate) fn remove_vertex_mut(&mut self, v: Vertex) {
        if let Some(nbrs) = self.adj.remove(&v) {
            for u in nbrs.keys() {
                if let Some(m) = self.adj.get_mut(u) {
                    m.remove(&v);
                }
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Total edge multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edges().map(|(_, _, c)| c as u64).sum()
    }

    /// Number of adjacent vertex pairs.
    pub fn pair_count(&self) -> usize {
        self.adj.values().map(|m| m.len()).sum::<usize>() / 2
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.adj.keys().copied().collect()
    }

    /// Edges as `(u, v, multiplicity)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, u32)> + '_ {
        self.adj.iter().flat_map(|(&u, m)| {
            m.range(u + 1..).map(move |(&v, &c)| (u, v, c))
        })
    }

    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> u32 {
        self.adj
            .get(&u)
            .and_then(|m| m.get(&v))
            .copied()
            .unwrap_or(0)
    }

    pub fn degree(&self, v: Vertex) -> u64 {
        self.adj
            .get(&v)
            .map(|m| m.values().map(|&c| c as u64).sum())
            .unwrap_or(0)
    }

    /// Distinct neighbors with the multiplicity of the joining edge.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = (Vertex, u32)> + '_ {
        self.adj
            .get(&v)
            .into_iter()
            .flat_map(|m| m.iter().map(|(&u, &c)| (u, c)))
    }

    pub fn neighbor_count(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, |m| m.len())
    }

    pub fn max_vertex(&self) -> Option<Vertex> {
        self.adj.keys().next_back().copied()
    }

    /// An id that has never been used in this graph.
    pub fn fresh_vertex(&self) -> Vertex {
        self.next_id
    }

    pub(crate) fn reserve_ids(&mut self, above: Vertex) {
        self.next_id = self.next_id.max(above);
    }

    /// `δ(x, y)`: all edges with one endpoint in `x` and the other in `y`.
    pub fn delta(&self, x: &VertexSet, y: &VertexSet) -> Result<EdgeCut> {
        if let Some(&v) = x.intersection(y).next() {
            return Err(Error::Overlap(v));
        }
        let mut cut = EdgeCut::default();
        for &u in x {
            for (v, c) in self.neighbors(u) {
                if y.contains(&v) {
                    cut.size += c as u64;
                    cut.edges.push((u, v, c));
                }
            }
        }
        Ok(cut)
    }

    /// `|δ(x, V∖x)|`.
    pub fn cut_size(&self, x: &VertexSet) -> u64 {
        x.iter()
            .flat_map(|&u| self.neighbors(u))
            .filter(|(v, _)| !x.contains(v))
            .map(|(_, c)| c as u64)
            .sum()
    }

    /// Vertices of `x` with a neighbor outside `x`.
    pub fn boundary(&self, x: &VertexSet) -> VertexSet {
        x.iter()
            .copied()
            .filter(|&u| self.neighbors(u).any(|(v, _)| !x.contains(&v)))
            .collect()
    }

    /// Removes a degree-2 vertex with two distinct neighbors and joins them.
    pub fn dissolve(&self, v: Vertex) -> Result<Multigraph> {
        let mut g = self.clone();
        g.dissolve_mut(v)?;
        Ok(g)
    }

    pub(crate) fn dissolve_mut(&mut self, v: Vertex) -> Result<(Vertex, Vertex)> {
        let nbrs = self.adj.get(&v).ok_or(Error::MissingVertex(v))?;
        let degree: u64 = nbrs.values().map(|&c| c as u64).sum();
        if degree != 2 || nbrs.len() != 2 {
            return Err(Error::NotDissolvable {
                vertex: v,
                degree,
                neighbors: nbrs.len(),
            });
        }
        let mut it = nbrs.keys().copied();
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        self.remove_vertex_mut(v);
        self.add_edge(a, b, 1)?;
        Ok((a, b))
    }

    /// Replaces `z` by the single vertex `fresh`. Edges inside `z` vanish,
    /// edges leaving `z` are reattached to `fresh` with their multiplicity.
    pub fn identify(&self, z: &VertexSet, fresh: Vertex) -> Result<Multigraph> {
        if z.is_empty() {
            return Err(Error::EmptySet);
        }
        for &v in z {
            if !self.contains(v) {
                return Err(Error::MissingVertex(v));
            }
        }
        if self.contains(fresh) && !z.contains(&fresh) {
            return Err(Error::FreshInUse(fresh));
        }
        let mut outside: BTreeMap<Vertex, u32> = BTreeMap::new();
        for &u in z {
            for (v, c) in self.neighbors(u) {
                if !z.contains(&v) {
                    *outside.entry(v).or_insert(0) += c;
                }
            }
        }
        let mut g = self.clone();
        for &u in z {
            g.remove_vertex_mut(u);
        }
        g.add_vertex(fresh)?;
        for (v, c) in outside {
            g.add_edge(fresh, v, c)?;
        }
        g.next_id = g.next_id.max(self.next_id);
        Ok(g)
    }

    /// The subgraph induced by `s`; ids outside the graph are ignored.
    pub fn induced(&self, s: &VertexSet) -> Multigraph {
        let mut adj = BTreeMap::new();
        for &u in s {
            if let Some(m) = self.adj.get(&u) {
                let kept: BTreeMap<Vertex, u32> = m
                    .iter()
                    .filter(|(v, _)| s.contains(v))
                    .map(|(&v, &c)| (v, c))
                    .collect();
                adj.insert(u, kept);
            }
        }
        Multigraph {
            adj,
            next_id: self.next_id,
        }
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen.contains(&s) {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::from([s]);
            seen.insert(s);
            while let Some(u) = queue.pop_front() {
                comp.insert(u);
                for (v, _) in self.neighbors(u) {
                    if seen.insert(v) {
                        queue.push_back(v);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// A minimal cut with at most two edges, or `None` when the graph is
    /// 3-edge-connected. The returned side is the one without the smallest
    /// vertex.
    pub fn min_cut_le2(&self) -> Result<Option<SmallCut>> {
        if self.vertex_count() < 2 {
            return Err(Error::TooSmall(2));
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.small_cut_separating(&self.vertex_set()))
    }

    /// The smallest cut of size at most two that separates two vertices of
    /// `terminals`, if any. Both sides of the returned cut induce connected
    /// subgraphs when the graph is connected.
    pub(crate) fn small_cut_separating(&self, terminals: &VertexSet) -> Option<SmallCut> {
        let mut it = terminals.iter().copied();
        let s = it.next()?;
        let net = FlowNetwork::new(self);
        let mut best: Option<SmallCut> = None;
        for t in it {
            let (flow, source_side) = net.max_flow_capped(s, t, 3);
            if flow <= 2 && best.as_ref().is_none_or(|b| flow < b.size) {
                let side: VertexSet = self
                    .vertices()
                    .filter(|v| !source_side.contains(v))
                    .collect();
                best = Some(SmallCut { side, size: flow });
                if flow == 0 {
                    break;
                }
            }
        }
        best.map(|cut| shrink_to_connected(self, cut))
    }

    /// Applies `f` to every vertex id. `f` must be injective on the vertex set.
    pub fn relabel(&self, f: impl Fn(Vertex) -> Vertex) -> Result<Multigraph> {
        let mut g = Multigraph::new();
        for v in self.vertices() {
            g.add_vertex(f(v))?;
        }
        for (u, v, c) in self.edges() {
            g.add_edge(f(u), f(v), c)?;
        }
        Ok(g)
    }

    /// Relabels vertices to `0..n` in increasing order; returns the new graph
    /// and the old id of each new id.
    pub fn compact(&self) -> (Multigraph, Vec<Vertex>) {
        let old: Vec<Vertex> = self.vertices().collect();
        let index: BTreeMap<Vertex, Vertex> = old
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as Vertex))
            .collect();
        let g = self.relabel(|v| index[&v]).expect("relabel is injective");
        (g, old)
    }
}

// Keep the sink side connected: a component not touching the source side
// could be moved over and would shrink the cut.
fn shrink_to_connected(g: &Multigraph, cut: SmallCut) -> SmallCut {
    let sub = g.induced(&cut.side);
    let comps = sub.components();
    if comps.len() <= 1 {
        return cut;
    }
    let side = comps
        .into_iter()
        .min_by_key(|c| (g.cut_size(c), c.iter().next().copied()))
        .unwrap();
    let size = g.cut_size(&side);
    SmallCut { side, size }
}

/// Unit-capacity flow network with one arc pair per adjacent vertex pair.
struct FlowNetwork {
    index: BTreeMap<Vertex, usize>,
    verts: Vec<Vertex>,
    // (head, capacity, reverse arc)
    arcs: Vec<Vec<(usize, i64, usize)>>,
}

impl FlowNetwork {
    fn new(g: &Multigraph) -> Self {
        let verts: Vec<Vertex> = g.vertices().collect();
        let index: BTreeMap<Vertex, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut arcs: Vec<Vec<(usize, i64, usize)>> = vec![Vec::new(); verts.len()];
        for (u, v, c) in g.edges() {
            let (a, b) = (index[&u], index[&v]);
            let ra = arcs[b].len();
            let rb = arcs[a].len();
            arcs[a].push((b, c as i64, ra));
            arcs[b].push((a, c as i64, rb));
        }
        FlowNetwork { index, verts, arcs }
    }

    /// Max flow from `s` to `t`, stopping once it reaches `cap`. Also returns
    /// the vertices reachable from `s` in the final residual network.
    fn max_flow_capped(&self, s: Vertex, t: Vertex, cap: u64) -> (u64, VertexSet) {
        let (s, t) = (self.index[&s], self.index[&t]);
        let mut res = self.arcs.clone();
        let mut flow = 0;
        loop {
            let reach = bfs(&res, s);
            if reach[t].is_none() || flow >= cap {
                let side = reach
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.is_some())
                    .map(|(i, _)| self.verts[i])
                    .collect();
                return (flow, side);
            }
            let mut x = t;
            while x != s {
                let (prev, arc) = reach[x].unwrap();
                res[prev][arc].1 -= 1;
                let (_, _, rev) = res[prev][arc];
                res[x][rev].1 += 1;
                x = prev;
            }
            flow += 1;
        }
    }
}

fn bfs(res: &[Vec<(usize, i64, usize)>], s: usize) -> Vec<Option<(usize, usize)>> {
    let mut pred = vec![None; res.len()];
    pred[s] = Some((s, usize::MAX));
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for (i, &(v, cap, _)) in res[u].iter().enumerate() {
            if cap > 0 && pred[v].is_none() {
                pred[v] = Some((u, i));
                queue.push_back(v);
            }
        }
    }
    pred
}

pub fn vset<I: IntoIterator<Item = Vertex>>(it: I) -> VertexSet {
    it.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Multigraph {
        Multigraph::from_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap()
    }

    fn triangle() -> Multigraph {
        Multigraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap()
    }

    fn k4() -> Multigraph {
        let mut e = vec![];
        for a in 0..4 {
            for b in a + 1..4 {
                e.push((a, b, 1));
            }
        }
        Multigraph::from_edges(4, &e).unwrap()
    }

    fn c4() -> Multigraph {
        Multigraph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)]).unwrap()
    }

    #[test]
    fn rejects_loops_and_unknown_vertices() {
        let mut g = Multigraph::with_vertices(2);
        assert_eq!(g.add_edge(1, 1, 1), Err(Error::Loop(1)));
        assert_eq!(g.add_edge(0, 5, 1), Err(Error::MissingVertex(5)));
        assert_eq!(g.add_edge(0, 1, 0), Err(Error::ZeroMultiplicity(0, 1)));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(path3().delta(&vset([0]), &vset([2])).unwrap().size, 0);
        assert_eq!(triangle().delta(&vset([0]), &vset([1, 2])).unwrap().size, 2);
        let dbl = Multigraph::from_edges(2, &[(0, 1, 2)]).unwrap();
        assert_eq!(dbl.delta(&vset([0]), &vset([1])).unwrap().size, 2);
        assert_eq!(
            triangle().delta(&vset([0, 1]), &vset([1])),
            Err(Error::Overlap(1))
        );
    }

    #[test]
    fn boundary_examples() {
        assert!(triangle().boundary(&vset([0, 1, 2])).is_empty());
        assert_eq!(path3().boundary(&vset([0, 1])), vset([1]));
        assert_eq!(triangle().boundary(&vset([0, 1])), vset([0, 1]));
    }

    #[test]
    fn dissolve_examples() {
        let g = path3().dissolve(1).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2, 1)]);

        let g = triangle().dissolve(0).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 2, 2)]);

        let g = c4().dissolve(1).unwrap();
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 2, 1), (0, 3, 1), (2, 3, 1)]
        );

        assert!(matches!(
            k4().dissolve(0),
            Err(Error::NotDissolvable { degree: 3, .. })
        ));
        let dbl = Multigraph::from_edges(2, &[(0, 1, 2)]).unwrap();
        assert!(matches!(
            dbl.dissolve(0),
            Err(Error::NotDissolvable { neighbors: 1, .. })
        ));
    }

    #[test]
    fn identify_examples() {
        let g = triangle().identify(&vset([1, 2]), 9).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 9, 2)]);

        let g = triangle().identify(&vset([0, 1, 2]), 7).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);

        // star centered at 0 with leaves 1, 2, 3
        let star = Multigraph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap();
        let g = star.identify(&vset([1, 2]), 10).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 3, 1), (0, 10, 2)]);

        assert_eq!(triangle().identify(&vset([]), 5), Err(Error::EmptySet));
        assert_eq!(triangle().identify(&vset([1]), 0), Err(Error::FreshInUse(0)));
    }

    #[test]
    fn fresh_ids_are_not_reused() {
        let g = triangle().identify(&vset([1, 2]), 9).unwrap();
        assert!(g.fresh_vertex() >= 10);
        let h = g.induced(&vset([0]));
        assert!(h.fresh_vertex() >= 10);
    }

    #[test]
    fn min_cut_examples() {
        let mut e = vec![(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)];
        e.push((2, 3, 1));
        let bridged = Multigraph::from_edges(6, &e).unwrap();
        let cut = bridged.min_cut_le2().unwrap().unwrap();
        assert_eq!(cut.size, 1);
        assert_eq!(cut.side, vset([3, 4, 5]));

        assert_eq!(k4().min_cut_le2().unwrap(), None);
        assert_eq!(c4().min_cut_le2().unwrap().unwrap().size, 2);

        let split = Multigraph::from_edges(3, &[(0, 1, 1)]).unwrap();
        assert_eq!(split.min_cut_le2(), Err(Error::Disconnected));
    }

    #[test]
    fn min_cut_sides_are_connected() {
        // two triangles sharing nothing, joined by two parallel bridges 0-3
        let g = Multigraph::from_edges(
            6,
            &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1), (0, 3, 2)],
        )
        .unwrap();
        let cut = g.min_cut_le2().unwrap().unwrap();
        assert_eq!(cut.size, 2);
        let other: VertexSet = g.vertex_set().difference(&cut.side).copied().collect();
        assert!(g.induced(&cut.side).is_connected());
        assert!(g.induced(&other).is_connected());
    }

    #[test]
    fn compact_relabels_in_order() {
        let g = triangle().identify(&vset([1, 2]), 9).unwrap();
        let (h, old) = g.compact();
        assert_eq!(old, vec![0, 9]);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1, 2)]);
    }
}
