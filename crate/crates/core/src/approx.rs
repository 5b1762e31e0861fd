//! The 2-approximation: either a decomposition of width at most `2w` or a
//! certificate that the tree-cut width exceeds `w`.

use std::fmt;

use crate::decomposition::{width, LeafRule, NodeId, TreeCutDecomposition, WidthReport};
use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, VertexSet};
use crate::reduce::{lift_degree, recombine, reduce_degree, split_3ec};
use crate::starcut::{make_instance, solve, verify_solution, StarCutSolution};
use crate::treewidth::{exact_treewidth, heuristic_ub, to_nice, DEFAULT_TW_CAP};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// `G[bag]` has treewidth above `2w^2 + 3w`.
    TreewidthExceeded { bag: VertexSet, treewidth: usize, bound: u64 },
    /// The star-cut instance of this large leaf has no solution.
    StarCutInfeasible { bag: VertexSet },
    /// `w = 0` and the graph has a vertex.
    NonEmptyGraph,
    /// `w = 1` and the graph has a cycle or a parallel edge.
    NotAForest,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |b: &VertexSet| b.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Certificate::TreewidthExceeded { bag, treewidth, bound } => {
                write!(f, "treewidth-exceeded tw={treewidth} bound={bound} bag={{{}}}", list(bag))
            }
            Certificate::StarCutInfeasible { bag } => write!(f, "starcut-infeasible bag={{{}}}", list(bag)),
            Certificate::NonEmptyGraph => write!(f, "non-empty-graph"),
            Certificate::NotAForest => write!(f, "not-a-forest"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApproxOutcome {
    Decomposition(TreeCutDecomposition, WidthReport),
    TooWide(Certificate),
}

/// Runs the approximation for width parameter `w`.
pub fn approx_tcw(g: &Multigraph, w: u64) -> Result<ApproxOutcome> {
    if w <= 1 {
        return small_w(g, w);
    }
    let (h, log) = reduce_degree(g);
    let pieces = split_3ec(&h);
    let mut decomps = Vec::with_capacity(pieces.pieces.len());
    for piece in &pieces.pieces {
        let (core, plog) = reduce_degree(&piece.graph);
        let d = match refine_until_small(&core, w)? {
            Ok(d) => d,
            Err(cert) => return Ok(ApproxOutcome::TooWide(cert)),
        };
        decomps.push(lift_degree(&piece.graph, &plog, &d)?);
    }
    let joined = recombine(&pieces, &decomps)?;
    let mut d = lift_degree(g, &log, &joined)?;
    d.prune_empty_leaves();
    finish(g, d, w)
}

fn finish(g: &Multigraph, d: TreeCutDecomposition, w: u64) -> Result<ApproxOutcome> {
    d.validate(g, LeafRule::Strict).map_err(Error::InvalidDecomposition)?;
    let report = width(g, &d)?;
    if report.width > 2 * w {
        return Err(Error::Internal(format!(
            "output width {} exceeds 2w = {}",
            report.width,
            2 * w
        )));
    }
    Ok(ApproxOutcome::Decomposition(d, report))
}

/// `w = 0` admits only the empty graph; `w = 1` exactly the simple forests.
fn small_w(g: &Multigraph, w: u64) -> Result<ApproxOutcome> {
    if w == 0 {
        if !g.is_empty() {
            return Ok(ApproxOutcome::TooWide(Certificate::NonEmptyGraph));
        }
        return finish(g, TreeCutDecomposition::trivial(g), w);
    }
    let simple = g.edges().all(|(_, _, c)| c == 1);
    let acyclic = g.pair_count() + g.components().len() == g.vertex_count();
    if !simple || !acyclic {
        return Ok(ApproxOutcome::TooWide(Certificate::NotAForest));
    }
    // one singleton bag per vertex, tree edges along the forest, components
    // chained through their smallest vertices
    if g.is_empty() {
        return finish(g, TreeCutDecomposition::trivial(g), w);
    }
    let vs: Vec<_> = g.vertices().collect();
    let node = |v| vs.binary_search(&v).unwrap();
    let bags = vs.iter().map(|&v| VertexSet::from([v])).collect();
    let mut edges: Vec<_> = g.edges().map(|(u, v, _)| (node(u), node(v))).collect();
    let roots: Vec<_> = g.components().iter().map(|c| node(*c.iter().next().unwrap())).collect();
    edges.extend(roots.windows(2).map(|p| (p[0], p[1])));
    finish(g, TreeCutDecomposition::new(bags, edges), w)
}

fn large_leaf(d: &TreeCutDecomposition, w: u64) -> Option<NodeId> {
    d.leaves()
        .into_iter()
        .filter(|&t| d.bag(t).len() as u64 >= 2 * w)
        .min_by_key(|&t| (std::cmp::Reverse(d.bag(t).len()), d.bag(t).iter().next().copied()))
}

/// Refines large leaves of a decomposition of the 3-edge-connected graph `g`
/// until none is left, keeping the internal width at most `2w`.
pub fn refine_until_small(g: &Multigraph, w: u64) -> Result<std::result::Result<TreeCutDecomposition, Certificate>> {
    let mut d = TreeCutDecomposition::trivial(g);
    while let Some(leaf) = large_leaf(&d, w) {
        let bag = d.bag(leaf).clone();
        let inst = make_instance(&bag, g, w)?;
        let bound = 2 * w * w + 3 * w;
        let td = if bag.len() <= DEFAULT_TW_CAP {
            let (tw, td) = exact_treewidth(&inst.g)?;
            if tw as u64 > bound {
                return Ok(Err(Certificate::TreewidthExceeded { bag, treewidth: tw, bound }));
            }
            td
        } else {
            heuristic_ub(&inst.g).1
        };
        let nice = to_nice(&inst.g, &td)?;
        let Some(sol) = solve(&inst, &nice)? else {
            return Ok(Err(Certificate::StarCutInfeasible { bag }));
        };
        d = refine(g, &d, leaf, &sol, w)?;
        let inner = width(g, &d)?.internal_width;
        if inner > 2 * w {
            return Err(Error::Internal(format!(
                "internal width {inner} exceeds 2w = {} after a refinement",
                2 * w
            )));
        }
    }
    Ok(Ok(d))
}

/// Replaces `leaf` by the star of `sol`: the leaf keeps its tree edge and
/// takes the center bag, each part becomes a new leaf below it.
pub fn refine(
    g: &Multigraph,
    d: &TreeCutDecomposition,
    leaf: NodeId,
    sol: &StarCutSolution,
    w: u64,
) -> Result<TreeCutDecomposition> {
    if leaf >= d.node_count() {
        return Err(Error::UnknownNode(leaf));
    }
    if !d.is_leaf(leaf) {
        return Err(Error::InvalidArgument(format!("node {leaf} is not a leaf")));
    }
    let inst = make_instance(d.bag(leaf), g, w)?;
    if let Err(v) = verify_solution(&inst, sol) {
        let msg: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        return Err(Error::InvalidArgument(format!("rejected star-cut solution: {}", msg.join("; "))));
    }
    let mut out = d.clone();
    *out.bag_mut(leaf) = sol.center.clone();
    for part in &sol.parts {
        let t = out.add_node(part.clone());
        out.add_edge(leaf, t);
    }
    debug_assert!(out.nonempty_bag_count() > d.nonempty_bag_count());
    Ok(out)
}
