//! Constrained star-cut decompositions.
//!
//! Given `(G, w, B, γ)`, find a non-trivial star decomposition of `G` with
//! center bag `X_0` and leaf bags `X_1..X_l` such that `|X_0| + l <= w`,
//! `γ(B ∩ X_i) <= w` and `|δ(X_i, V \ X_i)| <= w` for every leaf. The solver
//! is a dynamic program over a nice tree decomposition; a brute-force search
//! and a direct verifier back it up.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::decomposition::{width, TreeCutDecomposition};
use crate::error::{Error, Result};
use crate::multigraph::{Multigraph, Vertex, VertexSet};
use crate::treewidth::{NiceKind, NiceTreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarCutInstance {
    pub g: Multigraph,
    pub w: u64,
    pub b: VertexSet,
    pub gamma: BTreeMap<Vertex, u64>,
}

impl StarCutInstance {
    pub fn new(g: Multigraph, w: u64, gamma: BTreeMap<Vertex, u64>) -> Result<Self> {
        if let Some(&v) = gamma.keys().find(|&&v| !g.contains(v)) {
            return Err(Error::MissingVertex(v));
        }
        Ok(StarCutInstance {
            g,
            w,
            b: gamma.keys().copied().collect(),
            gamma,
        })
    }

    fn gamma_of(&self, v: Vertex) -> u64 {
        self.gamma.get(&v).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarCutSolution {
    pub center: VertexSet,
    pub parts: Vec<VertexSet>,
}

impl StarCutSolution {
    /// Node 0 is the center, node `i` holds part `i - 1`.
    pub fn to_decomposition(&self) -> TreeCutDecomposition {
        TreeCutDecomposition::star(self.center.clone(), self.parts.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionViolation {
    NoParts,
    EmptyPart(usize),
    Overlap(Vertex),
    Uncovered(Vertex),
    UnknownVertex(Vertex),
    Trivial,
    CenterTooLarge { center: usize, parts: usize },
    WeightTooLarge { part: usize, weight: u64 },
    CutTooLarge { part: usize, cut: u64 },
    InternalWidth(u64),
}

impl fmt::Display for SolutionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionViolation::NoParts => write!(f, "no leaf parts"),
            SolutionViolation::EmptyPart(i) => write!(f, "part {i} is empty"),
            SolutionViolation::Overlap(v) => write!(f, "vertex {v} is assigned twice"),
            SolutionViolation::Uncovered(v) => write!(f, "vertex {v} is unassigned"),
            SolutionViolation::UnknownVertex(v) => write!(f, "vertex {v} is not in the graph"),
            SolutionViolation::Trivial => write!(f, "fewer than two non-empty bags"),
            SolutionViolation::CenterTooLarge { center, parts } => {
                write!(f, "center size {center} plus {parts} parts exceeds w")
            }
            SolutionViolation::WeightTooLarge { part, weight } => {
                write!(f, "part {part} has boundary weight {weight}")
            }
            SolutionViolation::CutTooLarge { part, cut } => write!(f, "part {part} has cut {cut}"),
            SolutionViolation::InternalWidth(x) => write!(f, "internal width {x} exceeds w"),
        }
    }
}

/// `I(S, G)`: the subgraph induced by `s`, with every vertex of `s` that has
/// edges leaving `s` weighted by the number of such edges.
pub fn make_instance(s: &VertexSet, g: &Multigraph, w: u64) -> Result<StarCutInstance> {
    if let Some(&v) = s.iter().find(|&&v| !g.contains(v)) {
        return Err(Error::MissingVertex(v));
    }
    let mut gamma = BTreeMap::new();
    for &x in s {
        let out: u64 = g
            .neighbors(x)
            .filter(|(y, _)| !s.contains(y))
            .map(|(_, c)| c as u64)
            .sum();
        if out > 0 {
            gamma.insert(x, out);
        }
    }
    StarCutInstance::new(g.induced(s), w, gamma)
}

/// Checks every condition of a solution directly, including the internal
/// width of the literal star decomposition.
pub fn verify_solution(inst: &StarCutInstance, sol: &StarCutSolution) -> std::result::Result<(), Vec<SolutionViolation>> {
    let mut out = Vec::new();
    let w = inst.w;
    if sol.parts.is_empty() {
        out.push(SolutionViolation::NoParts);
    }
    let mut seen = VertexSet::new();
    for &v in sol.center.iter().chain(sol.parts.iter().flatten()) {
        if !inst.g.contains(v) {
            out.push(SolutionViolation::UnknownVertex(v));
        }
        if !seen.insert(v) {
            out.push(SolutionViolation::Overlap(v));
        }
    }
    for v in inst.g.vertices() {
        if !seen.contains(&v) {
            out.push(SolutionViolation::Uncovered(v));
        }
    }
    for (i, p) in sol.parts.iter().enumerate() {
        if p.is_empty() {
            out.push(SolutionViolation::EmptyPart(i));
            continue;
        }
        let weight: u64 = p.iter().map(|&v| inst.gamma_of(v)).sum();
        if weight > w {
            out.push(SolutionViolation::WeightTooLarge { part: i, weight });
        }
        let cut = inst.g.cut_size(p);
        if cut > w {
            out.push(SolutionViolation::CutTooLarge { part: i, cut });
        }
    }
    let nonempty = sol.parts.iter().filter(|p| !p.is_empty()).count() + usize::from(!sol.center.is_empty());
    if nonempty < 2 {
        out.push(SolutionViolation::Trivial);
    }
    if (sol.center.len() + sol.parts.len()) as u64 > w {
        out.push(SolutionViolation::CenterTooLarge {
            center: sol.center.len(),
            parts: sol.parts.len(),
        });
    }
    if out.is_empty() {
        match width(&inst.g, &sol.to_decomposition()) {
            Ok(r) if r.internal_width > w => out.push(SolutionViolation::InternalWidth(r.internal_width)),
            Ok(_) => {}
            Err(_) => out.push(SolutionViolation::Trivial),
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

pub const BRUTE_FORCE_CAP: usize = 10;

/// Exhaustive search over all assignments of vertices to the center or to
/// parts (parts numbered by first use).
pub fn brute_force(inst: &StarCutInstance) -> Result<Option<StarCutSolution>> {
    let n = inst.g.vertex_count();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge {
            size: n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let vs: Vec<Vertex> = inst.g.vertices().collect();
    let mut labels = vec![0usize; n];
    Ok(brute_rec(inst, &vs, &mut labels, 0, 0, 0))
}

fn brute_rec(
    inst: &StarCutInstance,
    vs: &[Vertex],
    labels: &mut [usize],
    i: usize,
    center: u64,
    parts: u64,
) -> Option<StarCutSolution> {
    if i == vs.len() {
        let sol = StarCutSolution {
            center: (0..vs.len()).filter(|&j| labels[j] == 0).map(|j| vs[j]).collect(),
            parts: (1..=parts as usize)
                .map(|p| (0..vs.len()).filter(|&j| labels[j] == p).map(|j| vs[j]).collect())
                .collect(),
        };
        return verify_solution(inst, &sol).is_ok().then_some(sol);
    }
    let w = inst.w;
    for label in 0..=parts as usize + 1 {
        let (c, p) = match label {
            0 => (center + 1, parts),
            l if l as u64 == parts + 1 => (center, parts + 1),
            _ => (center, parts),
        };
        if c + p > w {
            continue;
        }
        labels[i] = label;
        if let Some(s) = brute_rec(inst, vs, labels, i + 1, c, p) {
            return Some(s);
        }
    }
    None
}

type Val = u16;

/// A partial solution restricted to the vertices seen so far below a node.
///
/// `phi[i]` labels the `i`-th bag vertex: 0 for the center, `j + 1` for part
/// `j`. Parts that still meet the bag ("open") come first, ordered by first
/// appearance in `phi`; the remaining ("closed") parts follow sorted by
/// `(alpha, beta)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct State {
    phi: Vec<Val>,
    center: Val,
    /// `(alpha, beta)`: boundary weight and cut size so far.
    parts: Vec<(Val, Val)>,
}

#[derive(Debug, Clone)]
enum Back {
    Leaf,
    /// `map[i]` is the parent index of child part `i`; `assign` is the label
    /// given to an introduced vertex.
    Unary { child: usize, map: Vec<Val>, assign: Option<Val> },
    Join { left: usize, right: usize, lmap: Vec<Val>, rmap: Vec<Val> },
}

#[derive(Default)]
struct Table {
    states: Vec<State>,
    back: Vec<Back>,
    index: HashMap<State, usize>,
}

impl Table {
    fn insert(&mut self, s: State, b: Back) {
        if !self.index.contains_key(&s) {
            self.index.insert(s.clone(), self.states.len());
            self.states.push(s);
            self.back.push(b);
        }
    }
}

/// Relabels parts into canonical order. Returns the state and, for each raw
/// part index, its canonical index.
fn canonicalize(phi: Vec<Val>, center: Val, parts: Vec<(Val, Val)>) -> (State, Vec<Val>) {
    let mut perm = vec![Val::MAX; parts.len()];
    let mut next: Val = 0;
    let phi: Vec<Val> = phi
        .into_iter()
        .map(|l| {
            if l == 0 {
                return 0;
            }
            let raw = (l - 1) as usize;
            if perm[raw] == Val::MAX {
                perm[raw] = next;
                next += 1;
            }
            perm[raw] + 1
        })
        .collect();
    let mut closed: Vec<usize> = (0..parts.len()).filter(|&i| perm[i] == Val::MAX).collect();
    closed.sort_by_key(|&i| parts[i]);
    for i in closed {
        perm[i] = next;
        next += 1;
    }
    let mut out = vec![(0, 0); parts.len()];
    for (i, &p) in parts.iter().enumerate() {
        out[perm[i] as usize] = p;
    }
    (State { phi, center, parts: out }, perm)
}

fn open_count(phi: &[Val]) -> usize {
    phi.iter().copied().max().unwrap_or(0) as usize
}

/// Solves the instance with the dynamic program over `nice`.
pub fn solve(inst: &StarCutInstance, nice: &NiceTreeDecomposition) -> Result<Option<StarCutSolution>> {
    nice.validate(&inst.g)?;
    let w = inst.w;
    if w > 1000 {
        return Err(Error::InvalidArgument(format!("w = {w} is too large for the star-cut solver")));
    }
    if w <= 1 || inst.g.vertex_count() <= 1 {
        return Ok(None);
    }
    let w = w as Val;
    let gamma = |v: Vertex| inst.gamma_of(v) as Val;
    let mut tables: Vec<Table> = Vec::with_capacity(nice.nodes.len());
    for node in &nice.nodes {
        let mut t = Table::default();
        match node.kind {
            NiceKind::Leaf => t.insert(
                State {
                    phi: vec![],
                    center: 0,
                    parts: vec![],
                },
                Back::Leaf,
            ),
            NiceKind::Introduce(v) => {
                let child = &tables[node.children[0]];
                let p = node.bag.binary_search(&v).unwrap();
                let gv = gamma(v);
                for (ci, s) in child.states.iter().enumerate() {
                    let k = s.parts.len() as Val;
                    let with_label = |l: Val| {
                        let mut phi = s.phi.clone();
                        phi.insert(p, l);
                        phi
                    };
                    if s.center + 1 + k <= w {
                        let (st, perm) = canonicalize(with_label(0), s.center + 1, s.parts.clone());
                        t.insert(st, Back::Unary { child: ci, map: perm, assign: Some(0) });
                    }
                    let open = open_count(&s.phi);
                    for j in 0..s.parts.len() {
                        if j > open && s.parts[j] == s.parts[j - 1] {
                            continue;
                        }
                        if s.parts[j].0 + gv > w {
                            continue;
                        }
                        let mut parts = s.parts.clone();
                        parts[j].0 += gv;
                        let (st, perm) = canonicalize(with_label(j as Val + 1), s.center, parts);
                        let assign = perm[j] + 1;
                        t.insert(st, Back::Unary { child: ci, map: perm, assign: Some(assign) });
                    }
                    if s.center + k < w && gv <= w {
                        let mut parts = s.parts.clone();
                        parts.push((gv, 0));
                        let (st, mut perm) = canonicalize(with_label(k + 1), s.center, parts);
                        let assign = perm.pop().unwrap() + 1;
                        t.insert(st, Back::Unary { child: ci, map: perm, assign: Some(assign) });
                    }
                }
            }
            NiceKind::IntroduceEdge(u, v, c) => {
                let child = &tables[node.children[0]];
                let pu = node.bag.binary_search(&u).unwrap();
                let pv = node.bag.binary_search(&v).unwrap();
                let c = c.min(Val::MAX as u32) as Val;
                'states: for (ci, s) in child.states.iter().enumerate() {
                    let (lu, lv) = (s.phi[pu], s.phi[pv]);
                    let mut st = s.clone();
                    if lu != lv {
                        for l in [lu, lv] {
                            if l > 0 {
                                let beta = &mut st.parts[l as usize - 1].1;
                                *beta = beta.saturating_add(c);
                                if *beta > w {
                                    continue 'states;
                                }
                            }
                        }
                    }
                    let map = (0..s.parts.len() as Val).collect();
                    t.insert(st, Back::Unary { child: ci, map, assign: None });
                }
            }
            NiceKind::Forget(v) => {
                let child = &tables[node.children[0]];
                let p = nice.nodes[node.children[0]].bag.binary_search(&v).unwrap();
                for (ci, s) in child.states.iter().enumerate() {
                    let mut phi = s.phi.clone();
                    phi.remove(p);
                    let (st, perm) = canonicalize(phi, s.center, s.parts.clone());
                    t.insert(st, Back::Unary { child: ci, map: perm, assign: None });
                }
            }
            NiceKind::Join => {
                let (left, right) = (&tables[node.children[0]], &tables[node.children[1]]);
                let mut by_phi: HashMap<&[Val], Vec<usize>> = HashMap::new();
                for (ri, s) in right.states.iter().enumerate() {
                    by_phi.entry(&s.phi).or_default().push(ri);
                }
                for (li, s1) in left.states.iter().enumerate() {
                    let Some(matches) = by_phi.get(s1.phi.as_slice()) else {
                        continue;
                    };
                    let open = open_count(&s1.phi);
                    let shared_center = s1.phi.iter().filter(|&&l| l == 0).count() as Val;
                    let mut shared_mass = vec![0 as Val; open];
                    for (i, &l) in s1.phi.iter().enumerate() {
                        if l > 0 {
                            shared_mass[l as usize - 1] += gamma(node.bag[i]);
                        }
                    }
                    for &ri in matches {
                        let s2 = &right.states[ri];
                        let center = s1.center + s2.center - shared_center;
                        if center + open as Val > w {
                            continue;
                        }
                        let mut merged = Vec::with_capacity(open);
                        let mut ok = true;
                        for j in 0..open {
                            let a = s1.parts[j].0 + s2.parts[j].0 - shared_mass[j];
                            let b = s1.parts[j].1 + s2.parts[j].1;
                            if a > w || b > w {
                                ok = false;
                                break;
                            }
                            merged.push((a, b));
                        }
                        if !ok {
                            continue;
                        }
                        let c1 = &s1.parts[open..];
                        let c2 = &s2.parts[open..];
                        let budget = (w - center) as usize;
                        let mut m = Matcher {
                            c1,
                            c2,
                            w,
                            used: vec![false; c2.len()],
                            pairing: vec![None; c1.len()],
                            out: Vec::new(),
                            budget,
                            open,
                        };
                        m.run(0);
                        for pairing in m.out {
                            let mut parts = merged.clone();
                            let mut lmap: Vec<Val> = (0..open as Val).collect();
                            let mut rmap: Vec<Val> = (0..open as Val).collect();
                            rmap.resize(s2.parts.len(), Val::MAX);
                            for (i, pr) in pairing.iter().enumerate() {
                                let idx = parts.len() as Val;
                                match *pr {
                                    Some(j) => {
                                        parts.push((c1[i].0 + c2[j].0, c1[i].1 + c2[j].1));
                                        rmap[open + j] = idx;
                                    }
                                    None => parts.push(c1[i]),
                                }
                                lmap.push(idx);
                            }
                            for j in 0..c2.len() {
                                if rmap[open + j] == Val::MAX {
                                    rmap[open + j] = parts.len() as Val;
                                    parts.push(c2[j]);
                                }
                            }
                            let (st, perm) = canonicalize(s1.phi.clone(), center, parts);
                            let lmap = lmap.iter().map(|&i| perm[i as usize]).collect();
                            let rmap = rmap.iter().map(|&i| perm[i as usize]).collect();
                            t.insert(st, Back::Join { left: li, right: ri, lmap, rmap });
                        }
                    }
                }
            }
        }
        tables.push(t);
    }

    let root = nice.root();
    let accepted = tables[root].states.iter().position(|s| {
        let k = s.parts.len();
        k >= 1 && (k >= 2 || s.center >= 1)
    });
    let Some(si) = accepted else {
        return Ok(None);
    };
    let sol = reconstruct(nice, &tables, root, si);
    if let Err(v) = verify_solution(inst, &sol) {
        let msg: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        return Err(Error::Internal(format!("star-cut reconstruction failed: {}", msg.join("; "))));
    }
    Ok(Some(sol))
}

/// Enumerates partial matchings between the closed parts of two join
/// children, skipping pairings that only differ by swapping equal values.
struct Matcher<'a> {
    c1: &'a [(Val, Val)],
    c2: &'a [(Val, Val)],
    w: Val,
    used: Vec<bool>,
    pairing: Vec<Option<usize>>,
    out: Vec<Vec<Option<usize>>>,
    budget: usize,
    open: usize,
}

impl Matcher<'_> {
    fn run(&mut self, i: usize) {
        if i == self.c1.len() {
            let matched = self.pairing.iter().filter(|p| p.is_some()).count();
            let total = self.open + self.c1.len() + self.c2.len() - matched;
            if total <= self.budget {
                self.out.push(self.pairing.clone());
            }
            return;
        }
        // the part count can only drop by matching the remaining c1 parts
        let matched = self.pairing[..i].iter().filter(|p| p.is_some()).count();
        let best_total = self.open + self.c1.len() + self.c2.len() - matched - (self.c1.len() - i).min(self.c2.len() - matched);
        if best_total > self.budget {
            return;
        }
        self.pairing[i] = None;
        self.run(i + 1);
        let mut last: Option<(Val, Val)> = None;
        for j in 0..self.c2.len() {
            if self.used[j] || last == Some(self.c2[j]) {
                continue;
            }
            last = Some(self.c2[j]);
            let (a, b) = (self.c1[i].0 + self.c2[j].0, self.c1[i].1 + self.c2[j].1);
            if a > self.w || b > self.w {
                continue;
            }
            self.used[j] = true;
            self.pairing[i] = Some(j);
            self.run(i + 1);
            self.pairing[i] = None;
            self.used[j] = false;
        }
    }
}

fn reconstruct(nice: &NiceTreeDecomposition, tables: &[Table], root: usize, si: usize) -> StarCutSolution {
    let k = tables[root].states[si].parts.len();
    let mut parts = vec![VertexSet::new(); k];
    let mut center = VertexSet::new();
    let mut stack = vec![(root, si, (0..k).collect::<Vec<usize>>())];
    while let Some((node, s, global)) = stack.pop() {
        match &tables[node].back[s] {
            Back::Leaf => {}
            Back::Unary { child, map, assign } => {
                if let (NiceKind::Introduce(v), Some(label)) = (nice.nodes[node].kind, assign) {
                    if *label == 0 {
                        center.insert(v);
                    } else {
                        parts[global[*label as usize - 1]].insert(v);
                    }
                }
                let g: Vec<usize> = map.iter().map(|&i| global[i as usize]).collect();
                stack.push((nice.nodes[node].children[0], *child, g));
            }
            Back::Join { left, right, lmap, rmap } => {
                let gl = lmap.iter().map(|&i| global[i as usize]).collect();
                let gr = rmap.iter().map(|&i| global[i as usize]).collect();
                stack.push((nice.nodes[node].children[0], *left, gl));
                stack.push((nice.nodes[node].children[1], *right, gr));
            }
        }
    }
    StarCutSolution { center, parts }
}
