//! Brute-force reference implementations used to cross-check the library.
//! Nothing here calls the library's graph or predicate code.
#![allow(dead_code)]

use std::collections::VecDeque;

use geogirth::structure::RecursionLayout;
use geogirth::{Box3, Line3, Rat};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Edges = Vec<(usize, usize)>;

pub fn matrix(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for &(u, v) in edges {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

/// Shortest cycle through removing each edge in turn and asking for the
/// shortest remaining path between its ends.
pub fn girth(n: usize, edges: &[(usize, usize)]) -> Option<usize> {
    let m = matrix(n, edges);
    let mut best: Option<usize> = None;
    for &(s, t) in edges {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for w in 0..n {
                if !m[v][w] || (v == s && w == t) || dist[w] != usize::MAX {
                    continue;
                }
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
        if dist[t] != usize::MAX {
            let len = dist[t] + 1;
            best = Some(best.map_or(len, |b| b.min(len)));
        }
    }
    best
}

/// Girth for large sparse graphs: the same edge-removal idea over adjacency lists.
pub fn girth_sparse(n: usize, edges: &[(usize, usize)]) -> Option<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n];
    for &(s, t) in edges {
        let mut touched = vec![s];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        'bfs: while let Some(v) = q.pop_front() {
            if best.is_some_and(|b| dist[v] + 2 >= b) {
                break;
            }
            for &w in &adj[v] {
                if (v == s && w == t) || dist[w] != usize::MAX {
                    continue;
                }
                dist[w] = dist[v] + 1;
                touched.push(w);
                if w == t {
                    break 'bfs;
                }
                q.push_back(w);
            }
        }
        if dist[t] != usize::MAX {
            let len = dist[t] + 1;
            best = Some(best.map_or(len, |b| b.min(len)));
        }
        for v in touched {
            dist[v] = usize::MAX;
        }
    }
    best
}

/// Smallest k with a proper k-colouring, by plain backtracking in vertex order.
pub fn chromatic(n: usize, edges: &[(usize, usize)]) -> usize {
    let m = matrix(n, edges);
    (0..=n).find(|&k| colorable(&m, k)).expect("n colours always suffice")
}

fn colorable(m: &[Vec<bool>], k: usize) -> bool {
    fn go(i: usize, m: &[Vec<bool>], k: usize, c: &mut Vec<usize>) -> bool {
        if i == m.len() {
            return true;
        }
        for col in 0..k {
            if (0..i).all(|j| !m[i][j] || c[j] != col) {
                c.push(col);
                if go(i + 1, m, k, c) {
                    return true;
                }
                c.pop();
            }
        }
        false
    }
    if m.is_empty() {
        return true;
    }
    go(0, m, k, &mut Vec::new())
}

pub fn is_cycle(n: usize, edges: &[(usize, usize)]) -> bool {
    if n < 3 || edges.len() != n {
        return false;
    }
    let m = matrix(n, edges);
    if (0..n).any(|v| m[v].iter().filter(|&&b| b).count() != 2) {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut seen[v], true) {
            continue;
        }
        stack.extend((0..n).filter(|&w| m[v][w] && !seen[w]));
    }
    seen.iter().all(|&b| b)
}

fn closed_overlap(a_lo: &Rat, a_hi: &Rat, b_lo: &Rat, b_hi: &Rat) -> bool {
    let lo = if a_lo > b_lo { a_lo } else { b_lo };
    let hi = if a_hi < b_hi { a_hi } else { b_hi };
    lo <= hi
}

pub fn boxes_meet(a: &Box3, b: &Box3) -> bool {
    closed_overlap(a.x.lo(), a.x.hi(), b.x.lo(), b.x.hi())
        && closed_overlap(a.y.lo(), a.y.hi(), b.y.lo(), b.y.hi())
        && closed_overlap(a.z.lo(), a.z.hi(), b.z.lo(), b.z.hi())
}

/// A line as `p / d + t * dir` with integer `p`, `d` and `dir`.
#[derive(Clone, Debug)]
pub struct IntLine {
    d: BigInt,
    p: [BigInt; 3],
    dir: [BigInt; 3],
}

fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}

fn cross(a: &[BigInt; 3], b: &[BigInt; 3]) -> [BigInt; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot(a: &[BigInt; 3], b: &[BigInt; 3]) -> BigInt {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn scaled(c: [&Rat; 3], den: &BigInt) -> [BigInt; 3] {
    c.map(|v| v.numer() * (den / v.denom()))
}

impl IntLine {
    pub fn new(l: &Line3) -> Self {
        let b = l.base.coords();
        let v = l.dir.vector().coords();
        let d = b.iter().fold(BigInt::from(1), |acc, r| lcm(&acc, r.denom()));
        let dd = v.iter().fold(BigInt::from(1), |acc, r| lcm(&acc, r.denom()));
        IntLine {
            p: scaled(b, &d),
            dir: scaled(v, &dd),
            d,
        }
    }

    /// Meeting in a point or coinciding.
    pub fn meets(&self, o: &IntLine) -> bool {
        let w: [BigInt; 3] = std::array::from_fn(|i| &o.p[i] * &self.d - &self.p[i] * &o.d);
        let n = cross(&self.dir, &o.dir);
        if n.iter().all(Zero::is_zero) {
            return cross(&w, &self.dir).iter().all(Zero::is_zero);
        }
        dot(&w, &n).is_zero()
    }
}

pub fn box_edges(boxes: &[Box3]) -> Edges {
    all_pairs(boxes.len(), |i, j| boxes_meet(&boxes[i], &boxes[j]))
}

pub fn line_edges(lines: &[Line3]) -> Edges {
    let il: Vec<IntLine> = lines.iter().map(IntLine::new).collect();
    all_pairs(il.len(), |i, j| il[i].meets(&il[j]))
}

fn all_pairs(n: usize, meets: impl Fn(usize, usize) -> bool) -> Edges {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if meets(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Every structural clause of a recursion step, checked pair by pair on a
/// brute-force adjacency matrix.
pub fn structure(n: usize, edges: &[(usize, usize)], layout: &RecursionLayout) -> Result<(), String> {
    let m = matrix(n, edges);
    let mut owner = vec![None; n];
    for (b, block) in layout.blocks.iter().enumerate() {
        for &v in &block.members {
            owner[v] = Some(b);
        }
    }
    let mut covered: Vec<usize> = layout.ground.clone();
    covered.extend(layout.blocks.iter().flat_map(|b| b.members.iter().copied()));
    covered.sort_unstable();
    if covered != (0..n).collect::<Vec<_>>() {
        return Err("layout is not a partition of the objects".into());
    }
    for (i, &a) in layout.ground.iter().enumerate() {
        for &b in &layout.ground[i + 1..] {
            if m[a][b] {
                return Err(format!("ground objects {a} and {b} meet"));
            }
        }
    }
    for block in &layout.blocks {
        for (&v, &t) in block.members.iter().zip(&block.targets) {
            let hits: Vec<usize> = layout.ground.iter().copied().filter(|&gnd| m[v][gnd]).collect();
            if hits != vec![layout.ground[t]] {
                return Err(format!(
                    "copy object {v} meets ground objects {hits:?}, expected only {}",
                    layout.ground[t]
                ));
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if let (Some(x), Some(y)) = (owner[a], owner[b]) {
                if x != y && m[a][b] {
                    return Err(format!("objects {a} and {b} from copies {x} and {y} meet"));
                }
            }
        }
    }
    Ok(())
}

/// Edges inside `members`, renumbered by position.
pub fn induced(edges: &[(usize, usize)], members: &[usize]) -> Edges {
    let pos = |v: usize| members.iter().position(|&m| m == v);
    let mut out: Edges = edges
        .iter()
        .filter_map(|&(u, v)| Some((pos(u)?, pos(v)?)))
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    out.sort_unstable();
    out
}

pub fn normalized(edges: &[(usize, usize)]) -> Edges {
    let mut out: Edges = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// All graphs on `n` labelled vertices.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Edges> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let count = 1u64 << pairs.len();
    (0..count).map(move |mask| {
        pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect()
    })
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Edges {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(p))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Whether `colors[i]` (colour of `x[i]`) leaves some three-term progression
/// of `x` monochromatic.
pub fn has_mono_ap3(x: &[i64], colors: &[usize]) -> bool {
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let third = 2 * x[j] - x[i];
            if let Some(k) = x.iter().position(|&v| v == third) {
                if colors[i] == colors[j] && colors[j] == colors[k] {
                    return true;
                }
            }
        }
    }
    false
}

/// Three-term progressions inside `x`, each as sorted values.
pub fn ap3s(x: &[i64]) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for (i, &a) in x.iter().enumerate() {
        for &b in &x[i + 1..] {
            if x.contains(&(2 * b - a)) {
                out.push([a, b, 2 * b - a]);
            }
        }
    }
    out
}
