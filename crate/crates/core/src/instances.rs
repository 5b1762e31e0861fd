//! Generators for the clique-matching family `H_w`, its bramble, the
//! Min Bisection reduction graph, and seeded random multigraphs.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::TreeCutDecomposition;
use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, Vertex, VertexSet};

/// Vertex id of `(i, j)` in `H_w`, with `i, j` in `1..=w`.
pub fn hw_id(w: u32, i: u32, j: u32) -> Vertex {
    (i - 1) * w + (j - 1)
}

/// `w` disjoint cliques `Q_1..Q_w` of size `w`, with `(i, j)` joined to
/// `(j, i)` for every `i != j`.
pub fn gen_hw(w: u32) -> Multigraph {
    assert!(w >= 1, "gen_hw needs w >= 1");
    let mut g = Multigraph::with_vertices(w * w);
    for i in 1..=w {
        for j in 1..=w {
            for k in j + 1..=w {
                g.add_edge(hw_id(w, i, j), hw_id(w, i, k), 1).unwrap();
            }
        }
    }
    for i in 1..=w {
        for j in i + 1..=w {
            g.add_edge(hw_id(w, i, j), hw_id(w, j, i), 1).unwrap();
        }
    }
    g
}

/// Star with an empty center and one leaf per clique.
pub fn hw_witness(w: u32) -> TreeCutDecomposition {
    let leaves = (1..=w)
        .map(|i| (1..=w).map(|j| hw_id(w, i, j)).collect())
        .collect();
    TreeCutDecomposition::star(VertexSet::new(), leaves)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bramble {
    pub elements: Vec<VertexSet>,
}

/// All sets `B(i, Z) = {(i, j), (j, i) : j in Z}` with `|Z| = w / 2`,
/// `i` not in `Z`.
pub fn gen_bramble(w: u32) -> Result<Bramble> {
    if w == 0 || w % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "bramble construction needs a positive even w, got {w}"
        )));
    }
    let mut elements = Vec::new();
    for i in 1..=w {
        let others: Vec<u32> = (1..=w).filter(|&j| j != i).collect();
        for z in itertools::Itertools::combinations(others.iter(), (w / 2) as usize) {
            let set = z
                .into_iter()
                .flat_map(|&j| [hw_id(w, i, j), hw_id(w, j, i)])
                .collect();
            elements.push(set);
        }
    }
    Ok(Bramble { elements })
}

fn touches(g: &Multigraph, a: &VertexSet, b: &VertexSet) -> bool {
    a.iter()
        .any(|&x| b.contains(&x) || g.neighbors(x).any(|(y, _)| b.contains(&y)))
}

/// Every element is non-empty, lies in `g`, induces a connected subgraph, and
/// every two elements touch.
pub fn is_bramble(g: &Multigraph, br: &Bramble) -> bool {
    for e in &br.elements {
        if e.is_empty() || e.iter().any(|&v| !g.contains(v)) || !g.induced(e).is_connected() {
            return false;
        }
    }
    for (i, a) in br.elements.iter().enumerate() {
        for b in &br.elements[i + 1..] {
            if !touches(g, a, b) {
                return false;
            }
        }
    }
    true
}

/// Minimum hitting set size, by branch and bound. Only vertices occurring in
/// some element matter, and there may be at most `cap` of those.
pub fn bramble_order(br: &Bramble, cap: usize) -> Result<usize> {
    let universe: BTreeSet<Vertex> = br.elements.iter().flatten().copied().collect();
    if universe.len() > cap.min(64) {
        return Err(Error::TooLarge {
            size: universe.len(),
            cap: cap.min(64),
        });
    }
    let index: BTreeMap<Vertex, usize> = universe.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let masks: Vec<u64> = br
        .elements
        .iter()
        .map(|e| e.iter().fold(0u64, |m, v| m | 1 << index[v]))
        .collect();
    if masks.contains(&0) {
        return Err(Error::InvalidArgument("bramble has an empty element".into()));
    }
    let mut best = universe.len();
    hit(&masks, 0, 0, &mut best);
    Ok(best)
}

fn hit(masks: &[u64], chosen: u64, size: usize, best: &mut usize) {
    if size >= *best {
        return;
    }
    // branch on the unhit element with the fewest members
    let Some(&m) = masks
        .iter()
        .filter(|&&m| m & chosen == 0)
        .min_by_key(|m| m.count_ones())
    else {
        *best = size;
        return;
    };
    if size + 1 >= *best {
        return;
    }
    let mut rest = m;
    while rest != 0 {
        let bit = rest & rest.wrapping_neg();
        rest ^= bit;
        hit(masks, chosen | bit, size + 1, best);
    }
}

/// The graph `G'` of the Min Bisection reduction together with its parts.
#[derive(Debug, Clone)]
pub struct BisectionInstance {
    pub graph: Multigraph,
    pub w: u64,
    /// Number of vertices of the source graph; they keep ids `0..n`.
    pub n: u32,
    pub q: VertexSet,
    /// One set per unordered pair `{x, y}` of `Q`, keyed by `(x, y)`, `x < y`.
    pub c: BTreeMap<(Vertex, Vertex), VertexSet>,
}

/// Builds `G'` with `w = n^3 / 2 + k`: the source graph on `0..n`, a vertex
/// set `Q` of size `w - 2`, a set `C_{x,y}` of `w + 1` vertices adjacent to
/// both `x` and `y` for each pair of `Q`, and each source vertex joined to the
/// `n^2` lowest ids of `Q`.
pub fn gen_bisection_instance(g: &Multigraph, k: u64) -> Result<BisectionInstance> {
    let (g, _) = g.compact();
    let n = g.vertex_count() as u64;
    if n % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "the source graph needs an even number of vertices, got {n}"
        )));
    }
    let w = n * n * n / 2 + k;
    if w < 2 || n * n > w - 2 {
        return Err(Error::InvalidArgument(format!(
            "infeasible: n^2 = {} must be at most w - 2 = {}",
            n * n,
            w as i64 - 2
        )));
    }
    let qn = w - 2;
    let pairs = qn * (qn - 1) / 2;
    let total = n + qn + pairs * (w + 1);
    if total > u32::MAX as u64 / 2 {
        return Err(Error::TooLarge {
            size: total as usize,
            cap: u32::MAX as usize / 2,
        });
    }
    let mut h = g.clone();
    let q_ids: Vec<Vertex> = (n..n + qn).map(|v| v as Vertex).collect();
    for &q in &q_ids {
        h.add_vertex(q)?;
    }
    for x in 0..n as Vertex {
        for &q in &q_ids[..(n * n) as usize] {
            h.add_edge(x, q, 1)?;
        }
    }
    let mut next = (n + qn) as Vertex;
    let mut c = BTreeMap::new();
    for (i, &x) in q_ids.iter().enumerate() {
        for &y in &q_ids[i + 1..] {
            let mut set = VertexSet::new();
            for _ in 0..=w {
                h.add_vertex(next)?;
                h.add_edge(next, x, 1)?;
                h.add_edge(next, y, 1)?;
                set.insert(next);
                next += 1;
            }
            c.insert((x, y), set);
        }
    }
    Ok(BisectionInstance {
        graph: h,
        w,
        n: n as u32,
        q: q_ids.into_iter().collect(),
        c,
    })
}

/// Nodes `t1`, `t2`, `q` in a path `t1 - q - t2` with `X_{t_i} = V_i` and
/// `X_q = Q`; every vertex of a `C` set forms a singleton leaf under `q`.
pub fn bisection_witness(inst: &BisectionInstance, v1: &VertexSet) -> Result<TreeCutDecomposition> {
    let all: VertexSet = (0..inst.n).collect();
    if !v1.is_subset(&all) || v1.len() * 2 != inst.n as usize {
        return Err(Error::InvalidArgument(
            "the first side must hold exactly half of the source vertices".into(),
        ));
    }
    let v2: VertexSet = all.difference(v1).copied().collect();
    let mut d = TreeCutDecomposition::new(vec![inst.q.clone(), v1.clone(), v2], vec![(0, 1), (0, 2)]);
    for set in inst.c.values() {
        for &v in set {
            let t = d.add_node(VertexSet::from([v]));
            d.add_edge(0, t);
        }
    }
    Ok(d)
}

/// `m` distinct vertex pairs on `n` vertices with multiplicities drawn from
/// `1..=max_mult`, deterministic in `seed`.
pub fn gen_random(n: u32, m: usize, max_mult: u32, seed: u64) -> Result<Multigraph> {
    let pairs = n as usize * (n as usize).saturating_sub(1) / 2;
    if m > pairs {
        return Err(Error::InvalidArgument(format!(
            "{m} edges requested but only {pairs} vertex pairs exist"
        )));
    }
    if m > 0 && max_mult == 0 {
        return Err(Error::InvalidArgument("max multiplicity must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Multigraph::with_vertices(n);
    let mut all: Vec<(Vertex, Vertex)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    for i in 0..m {
        let j = rng.gen_range(i..all.len());
        all.swap(i, j);
        let (a, b) = all[i];
        g.add_edge(a, b, rng.gen_range(1..=max_mult))?;
    }
    Ok(g)
}

/// One representative per isomorphism class of simple graphs on `n`
/// vertices (`n <= 7`), each with vertices `0..n`.
pub fn all_graphs_up_to_iso(n: u32) -> Vec<Multigraph> {
    assert!(n <= 7, "graph enumeration is limited to 7 vertices");
    let pairs: Vec<(u32, u32)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let perms: Vec<Vec<u32>> = itertools::Itertools::permutations(0..n, n as usize).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let canon = perms
            .iter()
            .map(|p| {
                let mut m = 0u64;
                for (i, &(a, b)) in pairs.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        let (x, y) = (p[a as usize].min(p[b as usize]), p[a as usize].max(p[b as usize]));
                        let idx = pairs.iter().position(|&e| e == (x, y)).unwrap();
                        m |= 1 << idx;
                    }
                }
                m
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &(a, b))| (a, b, 1))
                .collect();
            out.push(Multigraph::from_edges(n, &edges).unwrap());
        }
    }
    out
}
