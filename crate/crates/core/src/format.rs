//! Text formats.
//!
//! Graph:
//! ```text
//! tcwgraph <n> <m>
//! <u> <v> <mult>        m lines, u < v, sorted
//! ```
//! Decomposition:
//! ```text
//! tcwdecomp <nodes> <tedges>
//! b <id> <k> <v1> ... <vk>   one per node, in id order
//! t <a> <b>                  a < b, sorted
//! ```
//! Star-cut instance: `starcut <n> <m> <w> <|B|>`, the graph lines, then
//! `g <v> <gamma>` lines sorted by vertex. A star-cut solution is written as a
//! decomposition whose node 0 is the center.
//!
//! Vertices are `0..n`. Blank lines are ignored when reading.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::decomposition::TreeCutDecomposition;
use crate::error::{parse_err, Error, Result};
use crate::multigraph::{Multigraph, Vertex, VertexSet};
use crate::starcut::{StarCutInstance, StarCutSolution};

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty()),
        );
        Lines {
            inner: it.peekable(),
            last: 0,
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l.split_whitespace().collect()))
            }
            None => Err(parse_err(self.last + 1, format!("unexpected end of input, expected {what}"))),
        }
    }

    fn finish(mut self) -> Result<()> {
        match self.inner.next() {
            Some((n, _)) => Err(parse_err(n, "unexpected trailing line")),
            None => Ok(()),
        }
    }
}

fn num<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected {what}, found '{tok}'")))
}

fn header<'a>(lines: &mut Lines<'a>, tag: &str, fields: usize) -> Result<(usize, Vec<&'a str>)> {
    let (n, toks) = lines.next(&format!("'{tag}' header"))?;
    if toks.first() != Some(&tag) || toks.len() != fields + 1 {
        return Err(parse_err(n, format!("expected '{tag}' followed by {fields} numbers")));
    }
    Ok((n, toks))
}

fn check_contiguous(g: &Multigraph) -> Result<()> {
    match g.max_vertex() {
        Some(m) if m as usize + 1 != g.vertex_count() => Err(Error::InvalidArgument(
            "vertex ids must be 0..n to be written; compact the graph first".into(),
        )),
        _ => Ok(()),
    }
}

fn write_edges(out: &mut String, g: &Multigraph) {
    for (u, v, c) in g.edges() {
        writeln!(out, "{u} {v} {c}").unwrap();
    }
}

pub fn write_graph(g: &Multigraph) -> Result<String> {
    check_contiguous(g)?;
    let mut out = format!("tcwgraph {} {}\n", g.vertex_count(), g.pair_count());
    write_edges(&mut out, g);
    Ok(out)
}

fn read_edges(lines: &mut Lines, n: u32, m: usize) -> Result<Multigraph> {
    let mut g = Multigraph::with_vertices(n);
    let mut prev: Option<(Vertex, Vertex)> = None;
    for _ in 0..m {
        let (ln, toks) = lines.next("an edge line")?;
        if toks.len() != 3 {
            return Err(parse_err(ln, "expected '<u> <v> <mult>'"));
        }
        let u: Vertex = num(ln, toks[0], "a vertex")?;
        let v: Vertex = num(ln, toks[1], "a vertex")?;
        let c: u32 = num(ln, toks[2], "a multiplicity")?;
        if u >= n || v >= n {
            return Err(parse_err(ln, format!("vertex out of range 0..{n}")));
        }
        if u == v {
            return Err(parse_err(ln, "loops are not allowed"));
        }
        if u > v {
            return Err(parse_err(ln, "edge endpoints must satisfy u < v"));
        }
        if c == 0 {
            return Err(parse_err(ln, "multiplicity must be positive"));
        }
        if let Some(p) = prev {
            if p == (u, v) {
                return Err(parse_err(ln, "duplicate edge line"));
            }
            if p > (u, v) {
                return Err(parse_err(ln, "edge lines must be sorted"));
            }
        }
        prev = Some((u, v));
        g.add_edge(u, v, c).map_err(|e| parse_err(ln, e.to_string()))?;
    }
    Ok(g)
}

pub fn parse_graph(text: &str) -> Result<Multigraph> {
    let mut lines = Lines::new(text);
    let (ln, toks) = header(&mut lines, "tcwgraph", 2)?;
    let n: u32 = num(ln, toks[1], "a vertex count")?;
    let m: usize = num(ln, toks[2], "an edge count")?;
    let g = read_edges(&mut lines, n, m)?;
    lines.finish()?;
    Ok(g)
}

pub fn write_decomposition(d: &TreeCutDecomposition) -> String {
    let d = d.normalized();
    let mut out = format!("tcwdecomp {} {}\n", d.node_count(), d.tree_edges().len());
    for (t, bag) in d.bags().iter().enumerate() {
        write!(out, "b {t} {}", bag.len()).unwrap();
        for v in bag {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    for &(a, b) in d.tree_edges() {
        writeln!(out, "t {a} {b}").unwrap();
    }
    out
}

/// Reads a decomposition. Only the syntax is checked; use
/// [`TreeCutDecomposition::validate`] against a graph for the rest.
pub fn parse_decomposition(text: &str) -> Result<TreeCutDecomposition> {
    let mut lines = Lines::new(text);
    let (ln, toks) = header(&mut lines, "tcwdecomp", 2)?;
    let nodes: usize = num(ln, toks[1], "a node count")?;
    let tedges: usize = num(ln, toks[2], "a tree-edge count")?;
    let mut bags = Vec::with_capacity(nodes);
    for t in 0..nodes {
        let (ln, toks) = lines.next("a bag line")?;
        if toks.len() < 3 || toks[0] != "b" {
            return Err(parse_err(ln, "expected 'b <id> <k> <v1> ... <vk>'"));
        }
        let id: usize = num(ln, toks[1], "a node id")?;
        if id != t {
            return Err(parse_err(ln, format!("expected bag of node {t}, found {id}")));
        }
        let k: usize = num(ln, toks[2], "a bag size")?;
        if toks.len() != k + 3 {
            return Err(parse_err(ln, format!("bag size {k} does not match {} listed vertices", toks.len() - 3)));
        }
        let mut bag = VertexSet::new();
        for tok in &toks[3..] {
            let v: Vertex = num(ln, tok, "a vertex")?;
            if !bag.insert(v) {
                return Err(parse_err(ln, format!("vertex {v} repeated in bag")));
            }
        }
        bags.push(bag);
    }
    let mut edges = Vec::with_capacity(tedges);
    for _ in 0..tedges {
        let (ln, toks) = lines.next("a tree-edge line")?;
        if toks.len() != 3 || toks[0] != "t" {
            return Err(parse_err(ln, "expected 't <a> <b>'"));
        }
        let a: usize = num(ln, toks[1], "a node id")?;
        let b: usize = num(ln, toks[2], "a node id")?;
        if a >= b {
            return Err(parse_err(ln, "tree edges must satisfy a < b"));
        }
        if b >= nodes {
            return Err(parse_err(ln, format!("node {b} out of range 0..{nodes}")));
        }
        if let Some(&p) = edges.last() {
            if p >= (a, b) {
                return Err(parse_err(ln, "tree-edge lines must be sorted and distinct"));
            }
        }
        edges.push((a, b));
    }
    lines.finish()?;
    Ok(TreeCutDecomposition::new(bags, edges))
}

pub fn write_starcut(inst: &StarCutInstance) -> Result<String> {
    check_contiguous(&inst.g)?;
    let mut out = format!(
        "starcut {} {} {} {}\n",
        inst.g.vertex_count(),
        inst.g.pair_count(),
        inst.w,
        inst.gamma.len()
    );
    write_edges(&mut out, &inst.g);
    for (v, c) in &inst.gamma {
        writeln!(out, "g {v} {c}").unwrap();
    }
    Ok(out)
}

pub fn parse_starcut(text: &str) -> Result<StarCutInstance> {
    let mut lines = Lines::new(text);
    let (ln, toks) = header(&mut lines, "starcut", 4)?;
    let n: u32 = num(ln, toks[1], "a vertex count")?;
    let m: usize = num(ln, toks[2], "an edge count")?;
    let w: u64 = num(ln, toks[3], "a width")?;
    let nb: usize = num(ln, toks[4], "a boundary size")?;
    let g = read_edges(&mut lines, n, m)?;
    let mut gamma = BTreeMap::new();
    for _ in 0..nb {
        let (ln, toks) = lines.next("a 'g' line")?;
        if toks.len() != 3 || toks[0] != "g" {
            return Err(parse_err(ln, "expected 'g <v> <gamma>'"));
        }
        let v: Vertex = num(ln, toks[1], "a vertex")?;
        let c: u64 = num(ln, toks[2], "a weight")?;
        if v >= n {
            return Err(parse_err(ln, format!("vertex out of range 0..{n}")));
        }
        if gamma.keys().next_back().is_some_and(|&last| last >= v) {
            return Err(parse_err(ln, "'g' lines must be sorted and distinct"));
        }
        gamma.insert(v, c);
    }
    lines.finish()?;
    StarCutInstance::new(g, w, gamma)
}

pub fn write_solution(sol: &StarCutSolution) -> String {
    write_decomposition(&sol.to_decomposition())
}

/// Reads a solution: a star centered at node 0.
pub fn parse_solution(text: &str) -> Result<StarCutSolution> {
    let d = parse_decomposition(text)?;
    let n = d.node_count();
    let star: Vec<(usize, usize)> = (1..n).map(|i| (0, i)).collect();
    if n == 0 || d.tree_edges() != star.as_slice() {
        return Err(Error::InvalidArgument("a solution must be a star centered at node 0".into()));
    }
    Ok(StarCutSolution {
        center: d.bag(0).clone(),
        parts: d.bags()[1..].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_hw, gen_random, hw_witness};
    use proptest::prelude::*;

    #[test]
    fn graph_text() {
        let g = Multigraph::from_edges(3, &[(0, 1, 2), (1, 2, 1)]).unwrap();
        let s = write_graph(&g).unwrap();
        assert_eq!(s, "tcwgraph 3 2\n0 1 2\n1 2 1\n");
        assert_eq!(parse_graph(&s).unwrap(), g);
    }

    #[test]
    fn graph_errors_are_line_numbered() {
        let cases = [
            ("tcwgraph 3 1\n0 0 1\n", 2),
            ("tcwgraph 3 1\n0 3 1\n", 2),
            ("tcwgraph 3 2\n1 2 1\n0 1 1\n", 3),
            ("tcwgraph 3 2\n0 1 1\n0 1 1\n", 3),
            ("tcwgraph 3 1\n1 0 1\n", 2),
            ("tcwgraph 3 1\n0 1 0\n", 2),
            ("tcwgraph 3 1\n0 1 x\n", 2),
            ("tcwgraph 3 2\n0 1 1\n", 3),
            ("tcwgraph 3 1\n0 1 1\n0 2 1\n", 3),
            ("graph 3 1\n", 1),
        ];
        for (text, line) in cases {
            match parse_graph(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn decomposition_text() {
        let d = hw_witness(2);
        let s = write_decomposition(&d);
        assert_eq!(s, "tcwdecomp 3 2\nb 0 0\nb 1 2 0 1\nb 2 2 2 3\nt 0 1\nt 0 2\n");
        assert_eq!(parse_decomposition(&s).unwrap(), d);
        assert!(matches!(
            parse_decomposition("tcwdecomp 2 1\nb 0 1 0\nb 1 1 1\nt 1 0\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(
            parse_decomposition("tcwdecomp 1 0\nb 0 2 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn starcut_text() {
        let g = Multigraph::from_edges(3, &[(0, 1, 1), (1, 2, 3)]).unwrap();
        let inst = StarCutInstance::new(g, 3, BTreeMap::from([(0, 2), (2, 1)])).unwrap();
        let s = write_starcut(&inst).unwrap();
        assert_eq!(s, "starcut 3 2 3 2\n0 1 1\n1 2 3\ng 0 2\ng 2 1\n");
        assert_eq!(parse_starcut(&s).unwrap(), inst);
        assert!(matches!(
            parse_starcut("starcut 3 0 3 2\ng 2 1\ng 0 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn solution_text() {
        let sol = StarCutSolution {
            center: VertexSet::from([0]),
            parts: vec![VertexSet::from([1, 2])],
        };
        assert_eq!(parse_solution(&write_solution(&sol)).unwrap(), sol);
        assert!(parse_solution(&write_decomposition(&TreeCutDecomposition::new(
            vec![VertexSet::new(), VertexSet::new(), VertexSet::new()],
            vec![(0, 1), (1, 2)]
        )))
        .is_err());
    }

    #[test]
    fn sparse_ids_are_refused() {
        let mut g = Multigraph::new();
        g.add_vertex(3).unwrap();
        assert!(write_graph(&g).is_err());
        assert_eq!(parse_graph(&write_graph(&g.compact().0).unwrap()).unwrap().vertex_count(), 1);
    }

    #[test]
    fn hw4_round_trip() {
        let g = gen_hw(4);
        assert_eq!(parse_graph(&write_graph(&g).unwrap()).unwrap(), g);
    }

    proptest! {
        #[test]
        fn graphs_round_trip(n in 0u32..9, density in 0usize..100, mult in 1u32..4, seed in any::<u64>()) {
            let m = density * (n as usize * n.saturating_sub(1) as usize / 2) / 100;
            let g = gen_random(n, m, mult, seed).unwrap();
            let s = write_graph(&g).unwrap();
            prop_assert_eq!(parse_graph(&s).unwrap(), g);
            prop_assert_eq!(write_graph(&parse_graph(&s).unwrap()).unwrap(), s);
        }

        #[test]
        fn decompositions_round_trip(n in 1u32..9, seed in any::<u64>()) {
            let g = gen_random(n, 0, 1, seed).unwrap();
            let star = TreeCutDecomposition::star(VertexSet::new(), g.vertices().map(|v| VertexSet::from([v])).collect());
            let s = write_decomposition(&star);
            prop_assert_eq!(parse_decomposition(&s).unwrap(), star.normalized());
        }
    }
}
