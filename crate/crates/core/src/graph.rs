//! Intersection graphs and the exact decisions made on them: girth,
//! k-colorability, chromatic number, and label-bijection equality.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::BudgetExhausted;
use crate::geom::Box3;
use crate::geom::Line3;
use crate::plucker::{Incidence, PluckerLine};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("objects {0} and {1} are identical lines")]
    IdenticalLines(usize, usize),
    #[error("vertex count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("bijection is not total or not injective at vertex {0}")]
    BadBijection(usize),
    #[error("DIMACS parse error on line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
}

/// Simple undirected graph whose vertices carry labels of their source objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeoGraph {
    labels: Vec<String>,
    adj: Vec<Vec<usize>>,
}

impl GeoGraph {
    pub fn empty(labels: Vec<String>) -> Self {
        let n = labels.len();
        GeoGraph {
            labels,
            adj: vec![Vec::new(); n],
        }
    }

    pub fn unlabeled(n: usize) -> Self {
        GeoGraph::empty((0..n).map(|i| i.to_string()).collect())
    }

    /// Builds a graph from an edge list; loops and repeated edges are dropped.
    pub fn from_edges(labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = GeoGraph::empty(labels);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        GeoGraph::from_edges(
            (0..n).map(|i| format!("c{i}")).collect(),
            (0..n).map(|i| (i, (i + 1) % n)),
        )
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        if let Err(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(pos, v);
            let pos = self.adj[v].binary_search(&u).unwrap_err();
            self.adj[v].insert(pos, u);
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn induced(&self, vertices: &[usize]) -> GeoGraph {
        let mut pos = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let labels = vertices.iter().map(|&v| self.labels[v].clone()).collect();
        let mut g = GeoGraph::empty(labels);
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                if pos[w] != usize::MAX && i < pos[w] {
                    g.add_edge(i, pos[w]);
                }
            }
        }
        g
    }

    pub fn is_proper_coloring(&self, colors: &[usize]) -> bool {
        colors.len() == self.n() && self.edges().all(|(u, v)| colors[u] != colors[v])
    }

    /// DIMACS `edge` format, 1-indexed, vertices in family order.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.n(), self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<GeoGraph, GraphError> {
        let mut g: Option<GeoGraph> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: &str| GraphError::Dimacs {
                line: i + 1,
                msg: msg.to_string(),
            };
            let mut parts = line.split_whitespace();
            match parts.next() {
                None | Some("c") => {}
                Some("p") => {
                    if parts.next() != Some("edge") {
                        return Err(err("expected 'p edge n m'"));
                    }
                    let n: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err("bad vertex count"))?;
                    g = Some(GeoGraph::unlabeled(n));
                }
                Some("e") => {
                    let g = g.as_mut().ok_or_else(|| err("edge before header"))?;
                    let mut end = || -> Result<usize, GraphError> {
                        let v: usize = parts
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| err("bad endpoint"))?;
                        if v == 0 || v > g.n() {
                            return Err(err("endpoint out of range"));
                        }
                        Ok(v - 1)
                    };
                    let u = end()?;
                    let v = end()?;
                    g.add_edge(u, v);
                }
                Some(_) => return Err(err("unknown record")),
            }
        }
        g.ok_or(GraphError::Dimacs {
            line: 0,
            msg: "missing header".into(),
        })
    }

    /// Sidecar document mapping DIMACS vertex indices to labels.
    pub fn label_sidecar(&self) -> LabelSidecar {
        LabelSidecar {
            vertices: self
                .labels
                .iter()
                .enumerate()
                .map(|(i, l)| VertexLabel {
                    index: i + 1,
                    label: l.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSidecar {
    pub vertices: Vec<VertexLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLabel {
    pub index: usize,
    pub label: String,
}

/// Intersection graph of closed boxes, via a sweep over sorted x-extents.
pub fn box_intersection_graph(boxes: &[Box3], labels: Vec<String>) -> GeoGraph {
    let mut g = GeoGraph::empty(labels);
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| boxes[a].x.lo().cmp(boxes[b].x.lo()).then(a.cmp(&b)));
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if boxes[b].x.lo() > boxes[a].x.hi() {
                break;
            }
            if boxes[a].intersects(&boxes[b]) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// Intersection graph of lines; identical lines are an invariant violation.
pub fn line_intersection_graph(lines: &[Line3], labels: Vec<String>) -> Result<GeoGraph, GraphError> {
    let keys: Vec<PluckerLine> = lines.iter().map(PluckerLine::new).collect();
    let mut g = GeoGraph::empty(labels);
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            match keys[i].classify(&keys[j]) {
                Incidence::Meet => g.add_edge(i, j),
                Incidence::Identical => return Err(GraphError::IdenticalLines(i, j)),
                Incidence::Skew | Incidence::ParallelDisjoint => {}
            }
        }
    }
    Ok(g)
}

/// Girth: `None` means infinite (the graph is a forest).
pub fn girth(g: &GeoGraph) -> Option<usize> {
    shortest_cycle(g).map(|c| c.len())
}

/// A shortest cycle as a vertex sequence, found by a breadth-first scan from
/// every vertex.
pub fn shortest_cycle(g: &GeoGraph) -> Option<Vec<usize>> {
    let n = g.n();
    let mut best = usize::MAX;
    let mut best_at: Option<(Vec<usize>, usize, usize)> = None;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        dist.fill(usize::MAX);
        parent.fill(usize::MAX);
        queue.clear();
        dist[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            if 2 * dist[u] >= best {
                break;
            }
            for &v in g.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if parent[u] != v {
                    let len = dist[u] + dist[v] + 1;
                    if len < best {
                        best = len;
                        best_at = Some((parent.clone(), u, v));
                    }
                }
            }
        }
    }
    let (parent, u, v) = best_at?;
    let path = |mut x: usize| {
        let mut p = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            p.push(x);
        }
        p
    };
    let pu = path(u);
    let pv = path(v);
    let on_pv: BTreeSet<usize> = pv.iter().copied().collect();
    let lca_pos = pu.iter().position(|x| on_pv.contains(x)).expect("common root");
    let lca = pu[lca_pos];
    let mut cycle: Vec<usize> = pu[..=lca_pos].to_vec();
    let lca_in_v = pv.iter().position(|&x| x == lca).expect("lca on path");
    cycle.extend(pv[..lca_in_v].iter().rev());
    Some(cycle)
}

/// Outcome of a k-colorability search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ColoringCertificate {
    Colorable {
        k: usize,
        assignment: Vec<usize>,
        nodes: u64,
    },
    Refuted {
        k: usize,
        nodes: u64,
    },
}

impl ColoringCertificate {
    pub fn is_colorable(&self) -> bool {
        matches!(self, ColoringCertificate::Colorable { .. })
    }

    pub fn nodes(&self) -> u64 {
        match self {
            ColoringCertificate::Colorable { nodes, .. } | ColoringCertificate::Refuted { nodes, .. } => *nodes,
        }
    }
}

struct Dsatur<'a> {
    g: &'a GeoGraph,
    k: usize,
    colors: Vec<usize>,
    // neighbour colour counts, row-major n x k
    seen: Vec<u32>,
    saturation: Vec<usize>,
    uncolored_degree: Vec<usize>,
    nodes: u64,
    budget: u64,
}

const NONE: usize = usize::MAX;

impl<'a> Dsatur<'a> {
    fn new(g: &'a GeoGraph, k: usize, budget: u64) -> Self {
        let n = g.n();
        Dsatur {
            g,
            k,
            colors: vec![NONE; n],
            seen: vec![0; n * k],
            saturation: vec![0; n],
            uncolored_degree: (0..n).map(|v| g.degree(v)).collect(),
            nodes: 0,
            budget,
        }
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for v in 0..self.g.n() {
            if self.colors[v] != NONE {
                continue;
            }
            best = match best {
                None => Some(v),
                Some(b) => {
                    let key_v = (self.saturation[v], self.uncolored_degree[v]);
                    let key_b = (self.saturation[b], self.uncolored_degree[b]);
                    if key_v > key_b {
                        Some(v)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.colors[v] = c;
        for &w in self.g.neighbors(v) {
            self.uncolored_degree[w] -= 1;
            let slot = &mut self.seen[w * self.k + c];
            if *slot == 0 {
                self.saturation[w] += 1;
            }
            *slot += 1;
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colors[v];
        self.colors[v] = NONE;
        for &w in self.g.neighbors(v) {
            self.uncolored_degree[w] += 1;
            let slot = &mut self.seen[w * self.k + c];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[w] -= 1;
            }
        }
    }

    fn search(&mut self, used: usize) -> Result<bool, BudgetExhausted> {
        let Some(v) = self.pick() else {
            return Ok(true);
        };
        if self.saturation[v] >= self.k {
            return Ok(false);
        }
        // colours above `used` are interchangeable, so only the first is tried
        let limit = (used + 1).min(self.k);
        for c in 0..limit {
            if self.seen[v * self.k + c] != 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(BudgetExhausted { budget: self.budget });
            }
            self.assign(v, c);
            if self.search(used.max(c + 1))? {
                return Ok(true);
            }
            self.unassign(v);
        }
        Ok(false)
    }
}

/// Decides k-colorability by saturation-ordered backtracking with colour
/// symmetry breaking. `budget` bounds the number of colour assignments tried.
pub fn is_k_colorable(g: &GeoGraph, k: usize, budget: u64) -> Result<ColoringCertificate, BudgetExhausted> {
    if g.n() == 0 {
        return Ok(ColoringCertificate::Colorable {
            k,
            assignment: Vec::new(),
            nodes: 0,
        });
    }
    if k == 0 {
        return Ok(ColoringCertificate::Refuted { k, nodes: 0 });
    }
    let mut s = Dsatur::new(g, k, budget);
    if s.search(0)? {
        debug_assert!(g.is_proper_coloring(&s.colors));
        Ok(ColoringCertificate::Colorable {
            k,
            assignment: s.colors,
            nodes: s.nodes,
        })
    } else {
        Ok(ColoringCertificate::Refuted { k, nodes: s.nodes })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChromaticNumber {
    pub chi: usize,
    pub coloring: Vec<usize>,
    /// The refutation at `chi - 1`; absent when `chi == 0`.
    pub refutation: Option<ColoringCertificate>,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ChromaticOutcome {
    Exact(ChromaticNumber),
    Inconclusive { lower: usize, upper: usize, nodes: u64 },
}

impl ChromaticOutcome {
    pub fn exact(&self) -> Option<usize> {
        match self {
            ChromaticOutcome::Exact(c) => Some(c.chi),
            ChromaticOutcome::Inconclusive { .. } => None,
        }
    }

    /// Best proven lower bound.
    pub fn lower(&self) -> usize {
        match self {
            ChromaticOutcome::Exact(c) => c.chi,
            ChromaticOutcome::Inconclusive { lower, .. } => *lower,
        }
    }
}

/// Greedy colouring in saturation order; an upper bound on the chromatic number.
pub fn greedy_coloring(g: &GeoGraph) -> Vec<usize> {
    let n = g.n();
    let mut s = Dsatur::new(g, n.max(1), u64::MAX);
    while let Some(v) = s.pick() {
        let c = (0..n).find(|&c| s.seen[v * s.k + c] == 0).expect("n colours suffice");
        s.assign(v, c);
    }
    s.colors
}

/// Exact chromatic number, refuting each k in turn before trying k + 1.
/// `budget` is shared across all the colourability searches.
pub fn chromatic_number(g: &GeoGraph, budget: u64) -> ChromaticOutcome {
    if g.n() == 0 {
        return ChromaticOutcome::Exact(ChromaticNumber {
            chi: 0,
            coloring: Vec::new(),
            refutation: None,
            nodes: 0,
        });
    }
    let upper = greedy_coloring(g).iter().max().map_or(0, |c| c + 1);
    let mut spent = 0u64;
    let mut refutation = Some(ColoringCertificate::Refuted { k: 0, nodes: 0 });
    for k in 1..=upper {
        match is_k_colorable(g, k, budget.saturating_sub(spent)) {
            Ok(cert) => {
                spent += cert.nodes();
                match cert {
                    ColoringCertificate::Colorable { assignment, .. } => {
                        return ChromaticOutcome::Exact(ChromaticNumber {
                            chi: k,
                            coloring: assignment,
                            refutation,
                            nodes: spent,
                        });
                    }
                    r @ ColoringCertificate::Refuted { .. } => refutation = Some(r),
                }
            }
            Err(_) => {
                return ChromaticOutcome::Inconclusive {
                    lower: k,
                    upper,
                    nodes: budget,
                };
            }
        }
    }
    unreachable!("greedy colouring with {upper} colours exists")
}

/// First disagreement between a graph and its expected counterpart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum GraphMatch {
    Equal,
    /// Expected edge absent from the graph (indices in the graph).
    Missing {
        u: usize,
        v: usize,
    },
    /// Edge present in the graph but not expected.
    Spurious {
        u: usize,
        v: usize,
    },
}

/// Compares `g` with `expected` under `bijection` (vertex of `g` -> vertex of `expected`).
pub fn graph_equals_expected(g: &GeoGraph, expected: &GeoGraph, bijection: &[usize]) -> Result<GraphMatch, GraphError> {
    if g.n() != expected.n() {
        return Err(GraphError::SizeMismatch(g.n(), expected.n()));
    }
    if bijection.len() != g.n() {
        return Err(GraphError::BadBijection(bijection.len()));
    }
    let mut inverse = vec![usize::MAX; g.n()];
    for (v, &w) in bijection.iter().enumerate() {
        if w >= g.n() || inverse[w] != usize::MAX {
            return Err(GraphError::BadBijection(v));
        }
        inverse[w] = v;
    }
    for (u, v) in g.edges() {
        if !expected.has_edge(bijection[u], bijection[v]) {
            return Ok(GraphMatch::Spurious { u, v });
        }
    }
    for (a, b) in expected.edges() {
        let (u, v) = (inverse[a], inverse[b]);
        if !g.has_edge(u, v) {
            return Ok(GraphMatch::Missing {
                u: u.min(v),
                v: u.max(v),
            });
        }
    }
    Ok(GraphMatch::Equal)
}
