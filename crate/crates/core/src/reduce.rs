//! Reduction to 3-edge-connected pieces and the way back.
//!
//! `reduce_degree` strips vertices of degree at most two, `split_3ec` cuts
//! along edge cuts of size at most two, replacing the far side by a marker
//! vertex. `recombine` and `lift_degree` turn decompositions of the pieces
//! into one of the input graph.

use std::collections::{BTreeSet, HashMap};

use crate::decomposition::{LeafRule, NodeId, TreeCutDecomposition};
use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, Vertex, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionStep {
    /// `v` had degree at most two and at most one neighbor.
    Remove { v: Vertex, neighbor: Option<Vertex>, mult: u32 },
    /// `v` had degree two with distinct neighbors `a` and `b`.
    Dissolve { v: Vertex, a: Vertex, b: Vertex },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionLog {
    pub steps: Vec<ReductionStep>,
}

/// Removes and dissolves low-degree vertices until every vertex has degree at
/// least three. Vertices are handled smallest id first.
pub fn reduce_degree(g: &Multigraph) -> (Multigraph, ReductionLog) {
    let mut h = g.clone();
    let mut log = ReductionLog::default();
    let mut work: BTreeSet<Vertex> = h.vertices().filter(|&v| h.degree(v) <= 2).collect();
    while let Some(v) = work.pop_first() {
        if !h.contains(v) || h.degree(v) > 2 {
            continue;
        }
        let nbrs: Vec<(Vertex, u32)> = h.neighbors(v).collect();
        match nbrs.as_slice() {
            [] => {
                h.remove_vertex_mut(v);
                log.steps.push(ReductionStep::Remove { v, neighbor: None, mult: 0 });
            }
            [(u, c)] => {
                let (u, c) = (*u, *c);
                h.remove_vertex_mut(v);
                log.steps.push(ReductionStep::Remove { v, neighbor: Some(u), mult: c });
                if h.degree(u) <= 2 {
                    work.insert(u);
                }
            }
            _ => {
                let (a, b) = h.dissolve_mut(v).expect("degree two with two neighbors");
                log.steps.push(ReductionStep::Dissolve { v, a, b });
                work.extend([a, b].into_iter().filter(|&x| h.degree(x) <= 2));
            }
        }
    }
    (h, log)
}

/// Re-inserts the vertices recorded in `log`, newest first, each as a
/// singleton leaf next to the node holding its (first) neighbor.
pub fn lift_degree(g_original: &Multigraph, log: &ReductionLog, d: &TreeCutDecomposition) -> Result<TreeCutDecomposition> {
    let mut d = d.clone();
    let mut node_of: HashMap<Vertex, NodeId> = HashMap::new();
    for (t, bag) in d.bags().iter().enumerate() {
        for &v in bag {
            node_of.insert(v, t);
        }
    }
    for step in log.steps.iter().rev() {
        let (v, anchor) = match *step {
            ReductionStep::Remove { v, neighbor, .. } => (v, neighbor),
            ReductionStep::Dissolve { v, a, .. } => (v, Some(a)),
        };
        if node_of.is_empty() && d.node_count() == 1 {
            d.bag_mut(0).insert(v);
            node_of.insert(v, 0);
            continue;
        }
        let at = match anchor {
            Some(u) => *node_of
                .get(&u)
                .ok_or_else(|| Error::Internal(format!("vertex {u} is missing while lifting {v}")))?,
            None => 0,
        };
        let t = d.add_node(VertexSet::from([v]));
        d.add_edge(at, t);
        node_of.insert(v, t);
    }
    d.validate(g_original, LeafRule::Lax)
        .map_err(Error::InvalidDecomposition)?;
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub graph: Multigraph,
    /// Marker vertices standing in for the far side of a cut.
    pub markers: VertexSet,
}

/// One cut of size at most two. `left_marker` lives in the left subtree and
/// stands for the right side; `right_marker` the other way round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRecord {
    pub size: u64,
    pub left_marker: Vertex,
    pub right_marker: Vertex,
    pub edges: Vec<(Vertex, Vertex, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitTree {
    Leaf(usize),
    Split {
        record: SplitRecord,
        left: Box<SplitTree>,
        right: Box<SplitTree>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceSet {
    pub pieces: Vec<Piece>,
    pub tree: SplitTree,
}

impl PieceSet {
    pub fn is_identity(&self) -> bool {
        matches!(self.tree, SplitTree::Leaf(_))
    }

    pub fn records(&self) -> Vec<&SplitRecord> {
        let mut out = Vec::new();
        let mut stack = vec![&self.tree];
        while let Some(t) = stack.pop() {
            if let SplitTree::Split { record, left, right } = t {
                out.push(record);
                stack.push(right);
                stack.push(left);
            }
        }
        out
    }
}

/// Splits `g` along edge cuts of size at most two until no such cut separates
/// two non-marker vertices of a piece. Components are split apart first, as
/// cuts of size zero.
pub fn split_3ec(g: &Multigraph) -> PieceSet {
    let mut next = g.fresh_vertex().max(g.max_vertex().map_or(0, |m| m + 1));
    let mut pieces = Vec::new();
    let tree = split_rec(g.clone(), VertexSet::new(), &mut next, &mut pieces);
    PieceSet { pieces, tree }
}

fn split_rec(g: Multigraph, markers: VertexSet, next: &mut Vertex, pieces: &mut Vec<Piece>) -> SplitTree {
    let plain: VertexSet = g.vertices().filter(|v| !markers.contains(v)).collect();
    let mut live: Vec<VertexSet> = g
        .components()
        .into_iter()
        .filter(|c| c.iter().any(|v| plain.contains(v)))
        .collect();
    let side = if live.len() > 1 {
        Some(live.swap_remove(0))
    } else if let Some(comp) = live.pop() {
        // isolated markers left over from earlier splits stay on the far side
        g.induced(&comp).small_cut_separating(&plain).map(|c| c.side)
    } else {
        None
    };
    let Some(a) = side else {
        pieces.push(Piece { graph: g, markers });
        return SplitTree::Leaf(pieces.len() - 1);
    };
    let b: VertexSet = g.vertices().filter(|v| !a.contains(v)).collect();
    let cut = g.delta(&a, &b).expect("sides are disjoint");
    let (m1, m2) = (*next, *next + 1);
    *next += 2;
    let mut left = g.identify(&b, m1).expect("fresh marker");
    let mut right = g.identify(&a, m2).expect("fresh marker");
    left.reserve_ids(*next);
    right.reserve_ids(*next);
    let mut lm: VertexSet = markers.intersection(&a).copied().collect();
    lm.insert(m1);
    let mut rm: VertexSet = markers.intersection(&b).copied().collect();
    rm.insert(m2);
    let record = SplitRecord {
        size: cut.size,
        left_marker: m1,
        right_marker: m2,
        edges: cut.edges,
    };
    let left = split_rec(left, lm, next, pieces);
    let right = split_rec(right, rm, next, pieces);
    SplitTree::Split {
        record,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Joins piece decompositions back together along the split tree: markers are
/// deleted from their bags and the two nodes that held them are connected.
pub fn recombine(pieces: &PieceSet, decomps: &[TreeCutDecomposition]) -> Result<TreeCutDecomposition> {
    if decomps.len() != pieces.pieces.len() {
        return Err(Error::InvalidArgument(format!(
            "{} decompositions for {} pieces",
            decomps.len(),
            pieces.pieces.len()
        )));
    }
    let mut d = recombine_rec(&pieces.tree, decomps)?;
    d.prune_empty_leaves();
    Ok(d)
}

fn recombine_rec(tree: &SplitTree, decomps: &[TreeCutDecomposition]) -> Result<TreeCutDecomposition> {
    match tree {
        SplitTree::Leaf(i) => Ok(decomps[*i].clone()),
        SplitTree::Split { record, left, right } => {
            let mut l = recombine_rec(left, decomps)?;
            let r = recombine_rec(right, decomps)?;
            let find = |d: &TreeCutDecomposition, m: Vertex| {
                d.node_of(m)
                    .ok_or_else(|| Error::Internal(format!("marker {m} is in no bag")))
            };
            let t1 = find(&l, record.left_marker)?;
            let t2 = find(&r, record.right_marker)?;
            let offset = l.absorb(&r);
            l.bag_mut(t1).remove(&record.left_marker);
            l.bag_mut(t2 + offset).remove(&record.right_marker);
            l.add_edge(t1, t2 + offset);
            Ok(l)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::width;
    use crate::instances::gen_random;
    use crate::multigraph::vset;

    fn k4_on(base: Vertex) -> Vec<(Vertex, Vertex, u32)> {
        let mut e = vec![];
        for a in 0..4 {
            for b in a + 1..4 {
                e.push((base + a, base + b, 1));
            }
        }
        e
    }

    fn two_k4s(bridges: &[(Vertex, Vertex, u32)]) -> Multigraph {
        let mut e = k4_on(0);
        e.extend(k4_on(4));
        e.extend_from_slice(bridges);
        Multigraph::from_edges(8, &e).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let tree = Multigraph::from_edges(5, &[(0, 1, 1), (1, 2, 1), (1, 3, 1), (3, 4, 1)]).unwrap();
        assert!(reduce_degree(&tree).0.is_empty());
        for n in 3..8 {
            let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
            let c = Multigraph::from_edges(n, &e).unwrap();
            assert!(reduce_degree(&c).0.is_empty(), "C_{n}");
        }
        let k4 = Multigraph::from_edges(4, &k4_on(0)).unwrap();
        let (h, log) = reduce_degree(&k4);
        assert_eq!(h, k4);
        assert!(log.steps.is_empty());
    }

    #[test]
    fn reduce_leaves_min_degree_three() {
        for seed in 0..100 {
            let g = gen_random(8, 12, 2, seed).unwrap();
            let (h, log) = reduce_degree(&g);
            assert!(h.vertices().all(|v| h.degree(v) >= 3));
            assert_eq!(h.vertex_count() + log.steps.len(), g.vertex_count());
        }
    }

    #[test]
    fn lift_restores_a_valid_decomposition() {
        for seed in 0..100 {
            let g = gen_random(8, 11, 2, seed).unwrap();
            let (h, log) = reduce_degree(&g);
            let d = TreeCutDecomposition::trivial(&h);
            let lifted = lift_degree(&g, &log, &d).unwrap();
            lifted.validate(&g, LeafRule::Strict).unwrap();
            let before = width(&h, &d).unwrap().width;
            let after = width(&g, &lifted).unwrap().width;
            assert!(after <= before.max(2), "seed {seed}: {after} > max({before}, 2)");
        }
    }

    #[test]
    fn split_identity_on_3ec() {
        let k4 = Multigraph::from_edges(4, &k4_on(0)).unwrap();
        let p = split_3ec(&k4);
        assert!(p.is_identity());
        assert_eq!(p.pieces.len(), 1);
        assert_eq!(p.pieces[0].graph, k4);
        assert!(p.pieces[0].markers.is_empty());
        let d = TreeCutDecomposition::trivial(&k4);
        assert_eq!(recombine(&p, std::slice::from_ref(&d)).unwrap(), d);
    }

    #[test]
    fn split_two_k4s_on_a_2_cut() {
        let g = two_k4s(&[(0, 4, 1), (1, 5, 1)]);
        let p = split_3ec(&g);
        assert_eq!(p.pieces.len(), 2);
        for piece in &p.pieces {
            assert_eq!(piece.graph.vertex_count(), 5);
            assert_eq!(piece.markers.len(), 1);
            let m = *piece.markers.iter().next().unwrap();
            assert_eq!(piece.graph.degree(m), 2);
        }
        assert_eq!(p.records()[0].size, 2);

        let decomps: Vec<_> = p
            .pieces
            .iter()
            .map(|pc| {
                let m = *pc.markers.iter().next().unwrap();
                let rest: VertexSet = pc.graph.vertices().filter(|&v| v != m).collect();
                TreeCutDecomposition::star(rest, vec![vset([m])])
            })
            .collect();
        let piece_width = p
            .pieces
            .iter()
            .zip(&decomps)
            .map(|(pc, d)| width(&pc.graph, d).unwrap().width)
            .max()
            .unwrap();
        let d = recombine(&p, &decomps).unwrap();
        d.validate(&g, LeafRule::Strict).unwrap();
        assert_eq!(width(&g, &d).unwrap().width, piece_width);
    }

    #[test]
    fn recombine_single_bags() {
        let g = two_k4s(&[(0, 4, 1)]);
        let p = split_3ec(&g);
        assert_eq!(p.pieces.len(), 2);
        let decomps: Vec<_> = p.pieces.iter().map(|pc| TreeCutDecomposition::trivial(&pc.graph)).collect();
        let d = recombine(&p, &decomps).unwrap();
        assert_eq!(d.node_count(), 2);
        let r = width(&g, &d).unwrap();
        assert_eq!(r.max_adhesion, 1);
    }

    #[test]
    fn split_handles_components() {
        let mut e = k4_on(0);
        e.extend(k4_on(4));
        let g = Multigraph::from_edges(8, &e).unwrap();
        let p = split_3ec(&g);
        assert_eq!(p.pieces.len(), 2);
        assert_eq!(p.records()[0].size, 0);
    }

    #[test]
    fn missing_marker_is_an_error() {
        let g = two_k4s(&[(0, 4, 1), (1, 5, 1)]);
        let p = split_3ec(&g);
        let wrong: Vec<_> = p
            .pieces
            .iter()
            .map(|pc| {
                let vs: VertexSet = pc.graph.vertices().filter(|v| !pc.markers.contains(v)).collect();
                TreeCutDecomposition::new(vec![vs], vec![])
            })
            .collect();
        assert!(matches!(recombine(&p, &wrong), Err(Error::Internal(_))));
    }

    #[test]
    fn reduced_pieces_are_3_edge_connected() {
        for seed in 0..60 {
            let g = gen_random(9, 16, 2, seed).unwrap();
            let (h, _) = reduce_degree(&g);
            for piece in split_3ec(&h).pieces {
                let (r, _) = reduce_degree(&piece.graph);
                if r.vertex_count() >= 2 {
                    assert_eq!(r.min_cut_le2().unwrap(), None, "seed {seed}");
                }
            }
        }
    }
}
