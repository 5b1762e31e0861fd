//! Tree-cut decompositions: data model, torsos, 3-centers and the width
//! verifier.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, Vertex, VertexSet};

pub type NodeId = usize;

/// A tree whose nodes carry pairwise disjoint, possibly empty bags.
///
/// Nodes are `0..node_count()`. The tree structure is only checked by
/// [`TreeCutDecomposition::validate`]; constructors accept anything so that
/// intermediate objects can be built up freely.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeCutDecomposition {
    bags: Vec<VertexSet>,
    edges: Vec<(NodeId, NodeId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoNodes,
    EdgeOutOfRange(NodeId, NodeId),
    SelfLoop(NodeId),
    NotConnected,
    NotAcyclic,
    UnknownVertex { vertex: Vertex, node: NodeId },
    Overlap { vertex: Vertex, nodes: (NodeId, NodeId) },
    Uncovered(Vertex),
    EmptyLeaf(NodeId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoNodes => write!(f, "tree has no nodes"),
            Violation::EdgeOutOfRange(a, b) => write!(f, "tree edge ({a}, {b}) names a missing node"),
            Violation::SelfLoop(a) => write!(f, "tree edge ({a}, {a}) is a loop"),
            Violation::NotConnected => write!(f, "tree is not connected"),
            Violation::NotAcyclic => write!(f, "tree has a cycle"),
            Violation::UnknownVertex { vertex, node } => {
                write!(f, "bag of node {node} holds vertex {vertex} which is not in the graph")
            }
            Violation::Overlap { vertex, nodes } => {
                write!(f, "vertex {vertex} is in bags {} and {}", nodes.0, nodes.1)
            }
            Violation::Uncovered(v) => write!(f, "vertex {v} is in no bag"),
            Violation::EmptyLeaf(t) => write!(f, "leaf {t} has an empty bag"),
        }
    }
}

/// How strictly [`TreeCutDecomposition::validate`] treats empty leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafRule {
    /// Every leaf bag must be non-empty.
    Strict,
    /// Empty leaves are allowed (intermediate objects).
    Lax,
}

/// Which quantity attains the width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthWitness {
    Adhesion(NodeId, NodeId),
    Torso(NodeId),
    /// Empty graph, nothing attains a positive value.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthReport {
    pub width: u64,
    pub internal_width: u64,
    pub max_adhesion: u64,
    /// Adhesion size per tree edge, in tree-edge order.
    pub adhesions: Vec<((NodeId, NodeId), u64)>,
    /// `|V(3-center of the torso)|` per node.
    pub torso_sizes: Vec<u64>,
    pub witness: WidthWitness,
}

/// A torso together with the contracted vertex of each non-empty component
/// of `T - t`, keyed by the neighbor of `t` in that component.
#[derive(Debug, Clone)]
pub struct Torso {
    pub graph: Multigraph,
    pub contracted: BTreeMap<NodeId, Vertex>,
}

impl TreeCutDecomposition {
    pub fn new(bags: Vec<VertexSet>, edges: Vec<(NodeId, NodeId)>) -> Self {
        TreeCutDecomposition { bags, edges }
    }

    /// One node holding every vertex.
    pub fn trivial(g: &Multigraph) -> Self {
        Self::new(vec![g.vertex_set()], vec![])
    }

    /// A star: node 0 holds `center`, node `i` holds `leaves[i - 1]`.
    pub fn star(center: VertexSet, leaves: Vec<VertexSet>) -> Self {
        let edges = (1..=leaves.len()).map(|i| (0, i)).collect();
        let mut bags = vec![center];
        bags.extend(leaves);
        Self::new(bags, edges)
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn bags(&self) -> &[VertexSet] {
        &self.bags
    }

    pub fn bag(&self, t: NodeId) -> &VertexSet {
        &self.bags[t]
    }

    pub fn bag_mut(&mut self, t: NodeId) -> &mut VertexSet {
        &mut self.bags[t]
    }

    pub fn tree_edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn add_node(&mut self, bag: VertexSet) -> NodeId {
        self.bags.push(bag);
        self.bags.len() - 1
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId) {
        self.edges.push((a, b));
    }

    pub fn degree(&self, t: NodeId) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == t || b == t).count()
    }

    pub fn is_leaf(&self, t: NodeId) -> bool {
        self.degree(t) <= 1
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        let adj = self.adjacency();
        (0..self.node_count()).filter(|&t| adj[t].len() <= 1).collect()
    }

    pub fn nonempty_bag_count(&self) -> usize {
        self.bags.iter().filter(|b| !b.is_empty()).count()
    }

    /// At most one non-empty bag.
    pub fn is_trivial(&self) -> bool {
        self.nonempty_bag_count() <= 1
    }

    pub fn node_of(&self, v: Vertex) -> Option<NodeId> {
        self.bags.iter().position(|b| b.contains(&v))
    }

    pub fn adjacency(&self) -> Vec<Vec<NodeId>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for &(a, b) in &self.edges {
            if a < adj.len() && b < adj.len() {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Disjoint union; node ids of `other` are shifted by `self.node_count()`.
    /// Returns the shift.
    pub fn absorb(&mut self, other: &TreeCutDecomposition) -> usize {
        let offset = self.node_count();
        self.bags.extend(other.bags.iter().cloned());
        self.edges
            .extend(other.edges.iter().map(|&(a, b)| (a + offset, b + offset)));
        offset
    }

    /// Deletes `nodes` and every incident tree edge, renumbering the rest in
    /// order.
    pub fn remove_nodes(&mut self, nodes: &BTreeSet<NodeId>) {
        let mut new_id = vec![usize::MAX; self.node_count()];
        let mut bags = Vec::new();
        for (t, bag) in self.bags.drain(..).enumerate() {
            if !nodes.contains(&t) {
                new_id[t] = bags.len();
                bags.push(bag);
            }
        }
        self.bags = bags;
        self.edges = self
            .edges
            .iter()
            .filter(|(a, b)| !nodes.contains(a) && !nodes.contains(b))
            .map(|&(a, b)| (new_id[a], new_id[b]))
            .collect();
    }

    /// Repeatedly deletes leaves with empty bags (keeping at least one node).
    pub fn prune_empty_leaves(&mut self) {
        loop {
            if self.node_count() <= 1 {
                return;
            }
            let adj = self.adjacency();
            let doomed: BTreeSet<NodeId> = (0..self.node_count())
                .filter(|&t| adj[t].len() <= 1 && self.bags[t].is_empty())
                .collect();
            if doomed.is_empty() {
                return;
            }
            if doomed.len() == self.node_count() {
                let keep = *doomed.iter().next().unwrap();
                let rest = doomed.into_iter().filter(|&t| t != keep).collect();
                self.remove_nodes(&rest);
                return;
            }
            self.remove_nodes(&doomed);
        }
    }

    /// Sorted copy: tree edges as `(min, max)` pairs in lexicographic order.
    pub fn normalized(&self) -> Self {
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        Self::new(self.bags.clone(), edges)
    }

    /// Checks the decomposition against `g`. Every violation found is listed.
    pub fn validate(&self, g: &Multigraph, leaves: LeafRule) -> std::result::Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let n = self.node_count();
        if n == 0 {
            return Err(vec![Violation::NoNodes]);
        }
        let mut tree_ok = true;
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                out.push(Violation::EdgeOutOfRange(a, b));
                tree_ok = false;
            } else if a == b {
                out.push(Violation::SelfLoop(a));
                tree_ok = false;
            }
        }
        if tree_ok {
            if self.edges.len() != n - 1 {
                if self.edges.len() >= n {
                    out.push(Violation::NotAcyclic);
                }
                if !self.tree_connected() {
                    out.push(Violation::NotConnected);
                }
            } else if !self.tree_connected() {
                // n - 1 edges and disconnected means a cycle somewhere too
                out.push(Violation::NotConnected);
                out.push(Violation::NotAcyclic);
            }
        }
        let mut owner: HashMap<Vertex, NodeId> = HashMap::new();
        for (t, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if !g.contains(v) {
                    out.push(Violation::UnknownVertex { vertex: v, node: t });
                }
                if let Some(&s) = owner.get(&v) {
                    out.push(Violation::Overlap { vertex: v, nodes: (s, t) });
                } else {
                    owner.insert(v, t);
                }
            }
        }
        for v in g.vertices() {
            if !owner.contains_key(&v) {
                out.push(Violation::Uncovered(v));
            }
        }
        if leaves == LeafRule::Strict && n > 1 {
            let adj = self.adjacency();
            for t in 0..n {
                if adj[t].len() <= 1 && self.bags[t].is_empty() {
                    out.push(Violation::EmptyLeaf(t));
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    fn tree_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Nodes on the `a` side after deleting tree edge `(a, b)`.
    fn side_of(&self, adj: &[Vec<NodeId>], a: NodeId, b: NodeId) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([a]);
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !(x == a && y == b) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    fn union_of(&self, nodes: &BTreeSet<NodeId>) -> VertexSet {
        nodes.iter().flat_map(|&t| self.bags[t].iter().copied()).collect()
    }

    /// DOT rendering of the tree with bag contents as labels.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph decomposition {\n");
        for (t, bag) in self.bags.iter().enumerate() {
            let items: Vec<String> = bag.iter().map(|v| v.to_string()).collect();
            s.push_str(&format!("  n{t} [label=\"{t}: {{{}}}\"];\n", items.join(",")));
        }
        for &(a, b) in &self.edges {
            s.push_str(&format!("  n{a} -- n{b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// `δ^T(e)` for the tree edge `e = (a, b)`.
pub fn adhesion(
    g: &Multigraph,
    d: &TreeCutDecomposition,
    e: (NodeId, NodeId),
) -> Result<crate::multigraph::EdgeCut> {
    let (a, b) = e;
    if !d
        .tree_edges()
        .iter()
        .any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    {
        return Err(Error::NotTreeEdge(a, b));
    }
    let adj = d.adjacency();
    let side_a = d.side_of(&adj, a, b);
    let side_b = d.side_of(&adj, b, a);
    g.delta(&d.union_of(&side_a), &d.union_of(&side_b))
}

/// The 3-center of `(h, x)`: repeatedly dissolve vertices outside `x` with
/// degree 2 and two neighbors, and delete vertices outside `x` with degree at
/// most 2 and at most one neighbor.
pub fn three_center(h: &Multigraph, x: &VertexSet) -> Multigraph {
    let mut g = h.clone();
    let mut work: BTreeSet<Vertex> = g.vertices().filter(|v| !x.contains(v)).collect();
    while let Some(v) = work.pop_first() {
        if !g.contains(v) {
            continue;
        }
        let degree = g.degree(v);
        let nbrs = g.neighbor_count(v);
        if degree <= 2 && nbrs <= 1 {
            let touched: Vec<Vertex> = g.neighbors(v).map(|(u, _)| u).collect();
            g.remove_vertex_mut(v);
            work.extend(touched.into_iter().filter(|u| !x.contains(u)));
        } else if degree == 2 && nbrs == 2 {
            let (a, b) = g.dissolve_mut(v).expect("degree-2 vertex with two neighbors");
            work.extend([a, b].into_iter().filter(|u| !x.contains(u)));
        }
    }
    g
}

/// The torso at `t`: each non-empty bag union of a component of `T - t` is
/// identified into one fresh vertex.
pub fn torso(g: &Multigraph, d: &TreeCutDecomposition, t: NodeId) -> Result<Torso> {
    if t >= d.node_count() {
        return Err(Error::UnknownNode(t));
    }
    let adj = d.adjacency();
    let mut h = g.clone();
    let mut contracted = BTreeMap::new();
    let mut fresh = g.fresh_vertex().max(g.max_vertex().map_or(0, |m| m + 1));
    for &nb in &adj[t] {
        let comp = d.side_of(&adj, nb, t);
        let z = d.union_of(&comp);
        if z.is_empty() {
            continue;
        }
        h = h.identify(&z, fresh)?;
        contracted.insert(nb, fresh);
        fresh += 1;
    }
    Ok(Torso { graph: h, contracted })
}

/// `|X_t|` plus the number of components of `T - t` with a non-empty bag
/// union. Equals the 3-center size of the torso when `g` is
/// 3-edge-connected and has at least two vertices; an empty bag facing a
/// single non-empty side leaves one isolated vertex, which the 3-center drops.
pub fn torso_size_3ec(d: &TreeCutDecomposition, t: NodeId) -> Result<u64> {
    if t >= d.node_count() {
        return Err(Error::UnknownNode(t));
    }
    let adj = d.adjacency();
    let comps = adj[t]
        .iter()
        .filter(|&&nb| !d.union_of(&d.side_of(&adj, nb, t)).is_empty())
        .count();
    if d.bag(t).is_empty() && comps == 1 {
        return Ok(0);
    }
    Ok((d.bag(t).len() + comps) as u64)
}

/// Width and internal width of a valid decomposition.
///
/// Each graph edge is routed along the tree path between the bags of its
/// endpoints: it counts towards the adhesion of every tree edge on the path
/// and shows up in the torso of every node on the path. Torsos are assembled
/// from those contributions only, which keeps the cost proportional to the
/// total path length instead of one graph copy per node.
pub fn width(g: &Multigraph, d: &TreeCutDecomposition) -> Result<WidthReport> {
    d.validate(g, LeafRule::Lax).map_err(Error::InvalidDecomposition)?;
    let n = d.node_count();
    let adj = d.adjacency();

    // root at 0
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([0]);
    parent[0] = 0;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                depth[y] = depth[x] + 1;
                queue.push_back(y);
            }
        }
    }

    let mut node_of: HashMap<Vertex, NodeId> = HashMap::new();
    for (t, bag) in d.bags().iter().enumerate() {
        for &v in bag {
            node_of.insert(v, t);
        }
    }

    // nonempty[t]: does the subtree rooted at t hold a vertex
    let mut sub_count = vec![0usize; n];
    for &t in order.iter().rev() {
        sub_count[t] += d.bag(t).len();
        if t != 0 {
            let c = sub_count[t];
            sub_count[parent[t]] += c;
        }
    }
    let total = g.vertex_count();

    // adhesion of the edge between t and parent[t], stored at t
    let mut up_adhesion = vec![0u64; n];
    let mut torso_edges: Vec<Vec<(TorsoVertex, TorsoVertex, u32)>> = vec![Vec::new(); n];

    for (u, v, c) in g.edges() {
        let (mut a, mut b) = (node_of[&u], node_of[&v]);
        if a == b {
            torso_edges[a].push((TorsoVertex::Vertex(u), TorsoVertex::Vertex(v), c));
            continue;
        }
        // climb to the lowest common ancestor, collecting both half-paths
        let mut left = vec![a];
        let mut right = vec![b];
        while depth[a] > depth[b] {
            up_adhesion[a] += c as u64;
            a = parent[a];
            left.push(a);
        }
        while depth[b] > depth[a] {
            up_adhesion[b] += c as u64;
            b = parent[b];
            right.push(b);
        }
        while a != b {
            up_adhesion[a] += c as u64;
            up_adhesion[b] += c as u64;
            a = parent[a];
            b = parent[b];
            left.push(a);
            right.push(b);
        }
        right.pop();
        right.reverse();
        let path: Vec<NodeId> = left.into_iter().chain(right).collect();
        let k = path.len() - 1;
        for i in 0..=k {
            let from = if i == 0 {
                TorsoVertex::Vertex(u)
            } else {
                TorsoVertex::Component(path[i - 1])
            };
            let to = if i == k {
                TorsoVertex::Vertex(v)
            } else {
                TorsoVertex::Component(path[i + 1])
            };
            torso_edges[path[i]].push((from, to, c));
        }
    }

    let mut adhesions = Vec::with_capacity(d.tree_edges().len());
    for &(a, b) in d.tree_edges() {
        let child = if parent[a] == b && a != 0 { a } else { b };
        adhesions.push(((a, b), up_adhesion[child]));
    }

    let mut torso_sizes = vec![0u64; n];
    for t in 0..n {
        let mut ids: BTreeMap<TorsoVertex, Vertex> = BTreeMap::new();
        let mut h = Multigraph::new();
        let mut protected = VertexSet::new();
        for &v in d.bag(t) {
            let id = ids.len() as Vertex;
            ids.insert(TorsoVertex::Vertex(v), id);
            h.add_vertex(id)?;
            protected.insert(id);
        }
        // contracted vertices without edges are erased by the 3-center, so
        // only components reached by some edge need to be materialized
        for &(x, y, c) in &torso_edges[t] {
            let mut get = |tv: TorsoVertex, h: &mut Multigraph| -> Result<Vertex> {
                if let Some(&id) = ids.get(&tv) {
                    return Ok(id);
                }
                let id = ids.len() as Vertex;
                ids.insert(tv, id);
                h.add_vertex(id)?;
                Ok(id)
            };
            let xi = get(x, &mut h)?;
            let yi = get(y, &mut h)?;
            if xi != yi {
                h.add_edge(xi, yi, c)?;
            }
        }
        torso_sizes[t] = three_center(&h, &protected).vertex_count() as u64;
    }
    let _ = (sub_count, total);

    let max_adhesion = adhesions.iter().map(|&(_, s)| s).max().unwrap_or(0);
    let mut width = 0;
    let mut witness = WidthWitness::None;
    for &(e, s) in &adhesions {
        if s > width {
            width = s;
            witness = WidthWitness::Adhesion(e.0, e.1);
        }
    }
    for (t, &s) in torso_sizes.iter().enumerate() {
        if s > width {
            width = s;
            witness = WidthWitness::Torso(t);
        }
    }
    let internal_width = if d.is_trivial() {
        0
    } else {
        let inner = (0..n)
            .filter(|&t| adj[t].len() > 1)
            .map(|t| torso_sizes[t])
            .max()
            .unwrap_or(0);
        inner.max(max_adhesion)
    };
    Ok(WidthReport {
        width,
        internal_width,
        max_adhesion,
        adhesions,
        torso_sizes,
        witness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum TorsoVertex {
    Vertex(Vertex),
    /// The component of `T - t` containing this neighbor of `t`.
    Component(NodeId),
}
