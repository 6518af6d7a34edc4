//! Line families in R³: the double shift system and the recursion that raises
//! the chromatic number of a line intersection graph while keeping its girth.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gallai::{GallaiError, GallaiProvider, GroundSet, HomotheticCopy};
use crate::geom::{
    line_line_relation, line_plane_meet, perp_in_plane, Dir3, Homothety3D, Line3, LineRelation, Plane3, PlaneRelation,
    Point3,
};
use crate::graph::{graph_equals_expected, line_intersection_graph, GeoGraph, GraphError, GraphMatch};
use crate::rat::Rat;
use crate::structure::{
    check_parent, check_structure, vertex_labels, CertificateSummary, CopyBlock, Provenance, RecursionLayout,
    StructuralViolation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("shift line needs a < b < c, got ({0}, {1}, {2})")]
    Unordered(Rat, Rat, Rat),
    #[error("shift systems need n >= 3, got {0}")]
    TooFewValues(usize),
    #[error("shift values must be distinct and positive")]
    BadShiftValues,
    #[error("shift system on {s:?} does not realize the double shift graph: {detail:?}")]
    NotDoubleShift { s: Vec<Rat>, detail: GraphMatch },
    #[error("lines {a} and {b} meet away from the shift point")]
    WrongMeetPoint { a: usize, b: usize },
    #[error("no valid shift values after {attempts} samples, last tried {last:?}")]
    ResampleExhausted { attempts: usize, last: Vec<Rat> },
    #[error("odd cycle length must be odd and at least 5, got {0}")]
    BadCycleLength(usize),
    #[error("no frame within {tried} candidates; most frequent failure: {condition:?}")]
    NoFrame { tried: usize, condition: FrameCondition },
    #[error("no translation found for copy {copy} among {tried} candidates")]
    NoTranslation { copy: usize, tried: usize },
    #[error("parent family refused: {0}")]
    ParentRejected(String),
    #[error("certificate unusable: {0}")]
    CertificateUnusable(String),
    #[error(transparent)]
    Provider(#[from] GallaiError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("structural check failed: {0}")]
    Structure(#[from] StructuralViolation),
    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<LineError>,
    },
}

/// `L_(a,b,c)(t) = (ab + bc + t, abc + bt, ab²c + (ab + bc)t)`.
pub fn shift_line(a: &Rat, b: &Rat, c: &Rat) -> Result<Line3, LineError> {
    if !(a < b && b < c) {
        return Err(LineError::Unordered(a.clone(), b.clone(), c.clone()));
    }
    let ab = a * b;
    let bc = b * c;
    let lead = &ab + &bc;
    let base = Point3::new(lead.clone(), &ab * c, &ab * b * c);
    let dir = Dir3::new(Point3::new(Rat::one(), b.clone(), lead)).expect("first coordinate is 1");
    Ok(Line3::new(base, dir))
}

/// Increasing index triples `i < j < k` of `0..n`, in lexicographic order.
pub fn index_triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push([i, j, k]);
            }
        }
    }
    out
}

fn triple_label(t: &[usize; 3]) -> String {
    format!("({},{},{})", t[0] + 1, t[1] + 1, t[2] + 1)
}

/// `G_n`: increasing triples of `1..=n`, with `(a,b,c) ~ (b,c,f)`.
pub fn double_shift_graph(n: usize) -> GeoGraph {
    let triples = index_triples(n);
    let pos: BTreeMap<[usize; 3], usize> = triples.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let mut g = GeoGraph::empty(triples.iter().map(triple_label).collect());
    for (i, &[a, b, c]) in triples.iter().enumerate() {
        let _ = a;
        for f in c + 1..n {
            g.add_edge(i, pos[&[b, c, f]]);
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftSystem {
    #[serde(rename = "S")]
    pub s: Vec<Rat>,
    /// Index triples into `s`, parallel to `lines`.
    pub triples: Vec<[usize; 3]>,
    pub lines: Vec<Line3>,
    /// Value sets sampled and discarded before `s`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rejected: Vec<Vec<Rat>>,
}

impl ShiftSystem {
    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn labels(&self) -> Vec<String> {
        self.triples.iter().map(triple_label).collect()
    }

    pub fn graph(&self) -> Result<GeoGraph, GraphError> {
        line_intersection_graph(&self.lines, self.labels())
    }

    pub fn line(&self, t: [usize; 3]) -> Option<&Line3> {
        self.triples.iter().position(|x| *x == t).map(|i| &self.lines[i])
    }
}

/// The shift system on explicit values, checked exactly against `G_n`.
pub fn shift_system_from(values: &[Rat]) -> Result<ShiftSystem, LineError> {
    let mut s = values.to_vec();
    s.sort();
    s.dedup();
    if s.len() != values.len() || s.first().is_some_and(|v| !v.is_positive()) {
        return Err(LineError::BadShiftValues);
    }
    if s.len() < 3 {
        return Err(LineError::TooFewValues(s.len()));
    }
    let triples = index_triples(s.len());
    let lines = triples
        .iter()
        .map(|&[i, j, k]| shift_line(&s[i], &s[j], &s[k]))
        .collect::<Result<Vec<_>, _>>()?;
    let sys = ShiftSystem {
        s,
        triples,
        lines,
        rejected: Vec::new(),
    };
    let expected = double_shift_graph(sys.n());
    let actual = sys.graph().map_err(|_| LineError::NotDoubleShift {
        s: sys.s.clone(),
        detail: GraphMatch::Spurious { u: 0, v: 0 },
    })?;
    let id: Vec<usize> = (0..sys.lines.len()).collect();
    let detail = graph_equals_expected(&actual, &expected, &id)?;
    if detail != GraphMatch::Equal {
        return Err(LineError::NotDoubleShift {
            s: sys.s.clone(),
            detail,
        });
    }
    for (u, v) in expected.edges() {
        if shift_meet_point(&sys, u, v) != line_line_relation(&sys.lines[u], &sys.lines[v]) {
            return Err(LineError::WrongMeetPoint { a: u, b: v });
        }
    }
    Ok(sys)
}

/// For adjacent `(a,b,c)` and `(b,c,d)`: the point `L_(a,b,c)(cd) = L_(b,c,d)(ab)`.
fn shift_meet_point(sys: &ShiftSystem, u: usize, v: usize) -> LineRelation {
    let (first, second) = if sys.triples[u] < sys.triples[v] {
        (u, v)
    } else {
        (v, u)
    };
    let [a, b, c] = sys.triples[first];
    let d = sys.triples[second][2];
    debug_assert_eq!(sys.triples[second][..2], [b, c]);
    let s = &sys.s;
    let p = sys.lines[first].at(&(&s[c] * &s[d]));
    let q = sys.lines[second].at(&(&s[a] * &s[b]));
    if p == q {
        LineRelation::Meet(p)
    } else {
        LineRelation::Skew
    }
}

/// Maximum number of value sets tried by [`build_shift_system`].
pub const SHIFT_RESAMPLE_LIMIT: usize = 64;

/// Positive rationals `p / q` from a seeded stream, verified exactly.
///
/// Spurious meetings happen only on finitely many algebraic conditions, so a
/// few draws suffice in practice; every rejected set is kept on the result.
pub fn build_shift_system(n: usize, seed: u64) -> Result<ShiftSystem, LineError> {
    if n < 3 {
        return Err(LineError::TooFewValues(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = Vec::new();
    for _ in 0..SHIFT_RESAMPLE_LIMIT {
        let mut set = BTreeSet::new();
        while set.len() < n {
            let p: i64 = rng.gen_range(1..=997);
            let q: i64 = rng.gen_range(1..=31);
            set.insert(Rat::new(p, q));
        }
        let values: Vec<Rat> = set.into_iter().collect();
        match shift_system_from(&values) {
            Ok(mut sys) => {
                sys.rejected = rejected;
                return Ok(sys);
            }
            Err(LineError::NotDoubleShift { .. } | LineError::WrongMeetPoint { .. }) => rejected.push(values),
            Err(e) => return Err(e),
        }
    }
    Err(LineError::ResampleExhausted {
        attempts: SHIFT_RESAMPLE_LIMIT,
        last: rejected.pop().unwrap_or_default(),
    })
}

/// A plane `P`, a line `L` in it, and the direction `u` in `P` perpendicular to `L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalFrame {
    pub plane: Plane3,
    pub line: Line3,
    pub u: Dir3,
}

impl TransversalFrame {
    pub fn new(plane: Plane3, line: Line3) -> Result<Self, crate::error::GeomError> {
        let u = perp_in_plane(&plane, &line)?;
        Ok(TransversalFrame { plane, line, u })
    }

    /// Parameter of the orthogonal projection of `p` onto `L`.
    pub fn param(&self, p: &Point3) -> Rat {
        let d = self.line.dir.vector();
        p.sub(&self.line.base).dot(d) / d.dot(d)
    }

    /// Where each line crosses `P`, or `None` if some line does not cross it once.
    pub fn traces(&self, lines: &[Line3]) -> Option<Vec<Point3>> {
        lines
            .iter()
            .map(|l| match line_plane_meet(l, &self.plane) {
                PlaneRelation::Meet(p) => Some(p),
                _ => None,
            })
            .collect()
    }

    /// Projection parameters of the traces of `lines`.
    pub fn trace_params(&self, lines: &[Line3]) -> Option<Vec<Rat>> {
        self.traces(lines).map(|ts| ts.iter().map(|p| self.param(p)).collect())
    }
}

/// The conditions a frame must satisfy against a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameCondition {
    /// Every line crosses `P` in exactly one point.
    Transversal,
    /// No two lines cross `P` at the same point.
    DistinctTraces,
    /// No two trace points share a perpendicular to `L` within `P`.
    DistinctProjections,
    /// `u . (dS x dS*) != 0` for every non-parallel pair of directions, so
    /// translating along `u` moves any two such lines off each other.
    GenericPairs,
}

fn distinct_directions(lines: &[Line3]) -> Vec<Point3> {
    let set: BTreeSet<Point3> = lines.iter().map(|l| l.dir.vector().clone()).collect();
    set.into_iter().collect()
}

fn has_duplicates<T: Ord + Clone>(v: &[T]) -> bool {
    let mut s = v.to_vec();
    s.sort();
    s.windows(2).any(|w| w[0] == w[1])
}

fn plane_violation(plane: &Plane3, lines: &[Line3]) -> Option<FrameCondition> {
    let mut traces = Vec::with_capacity(lines.len());
    for l in lines {
        match line_plane_meet(l, plane) {
            PlaneRelation::Meet(p) => traces.push(p),
            _ => return Some(FrameCondition::Transversal),
        }
    }
    has_duplicates(&traces).then_some(FrameCondition::DistinctTraces)
}

fn line_violation(frame: &TransversalFrame, traces: &[Point3], dirs: &[Point3]) -> Option<FrameCondition> {
    let params: Vec<Rat> = traces.iter().map(|p| frame.param(p)).collect();
    if has_duplicates(&params) {
        return Some(FrameCondition::DistinctProjections);
    }
    let u = frame.u.vector();
    for (i, a) in dirs.iter().enumerate() {
        for b in &dirs[i + 1..] {
            // distinct canonical directions are never parallel
            if u.dot(&a.cross(b)).is_zero() {
                return Some(FrameCondition::GenericPairs);
            }
        }
    }
    None
}

/// The first failed condition of `frame` against `lines`, if any.
pub fn frame_violation(frame: &TransversalFrame, lines: &[Line3]) -> Option<FrameCondition> {
    if let Some(c) = plane_violation(&frame.plane, lines) {
        return Some(c);
    }
    let traces = frame.traces(lines).expect("transversal");
    line_violation(frame, &traces, &distinct_directions(lines))
}

/// Primitive integer vectors of max-norm `h` with canonical sign, in lexicographic order.
fn vectors_of_height<const D: usize>(h: i64) -> Vec<[i64; D]> {
    let mut out = Vec::new();
    let mut v = [-h; D];
    loop {
        let height = v.iter().map(|x| x.abs()).max().unwrap_or(0);
        let lead_positive = v.iter().find(|x| **x != 0).is_some_and(|x| *x > 0);
        let primitive = v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x)) == 1;
        if height == h && lead_positive && primitive {
            out.push(v);
        }
        let mut i = D;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if v[i] < h {
                v[i] += 1;
                break;
            }
            v[i] = -h;
        }
    }
}

/// `0, 1, -1, 2, -2, ...`
pub fn zigzag(i: usize) -> i64 {
    let half = i.div_ceil(2) as i64;
    if i % 2 == 1 {
        half
    } else {
        -half
    }
}

/// How many (plane, line) candidates [`choose_frame`] may look at.
pub const DEFAULT_FRAME_BUDGET: usize = 20_000;

const OFFSETS_PER_NORMAL: usize = 9;
const LINE_HEIGHT_LIMIT: i64 = 3;

/// Deterministic search for a frame: plane normals by height, offsets
/// `0, 1, -1, ...`, then directions of `L` in the plane's basis by height.
pub fn choose_frame(lines: &[Line3], budget: usize) -> Result<TransversalFrame, LineError> {
    let dirs = distinct_directions(lines);
    let mut tried = 0usize;
    let mut failures: BTreeMap<FrameCondition, usize> = BTreeMap::new();
    for h in 1.. {
        for n in vectors_of_height::<3>(h) {
            let normal = Point3::ints(n[0], n[1], n[2]);
            for o in 0..OFFSETS_PER_NORMAL {
                tried += 1;
                if tried > budget {
                    let condition = failures
                        .iter()
                        .max_by_key(|(_, c)| **c)
                        .map(|(k, _)| *k)
                        .unwrap_or(FrameCondition::Transversal);
                    return Err(LineError::NoFrame {
                        tried: budget,
                        condition,
                    });
                }
                let plane = Plane3::new(normal.clone(), Rat::from_int(zigzag(o))).expect("nonzero normal");
                if let Some(c) = plane_violation(&plane, lines) {
                    *failures.entry(c).or_default() += 1;
                    // a non-transversal normal fails for every offset
                    if c == FrameCondition::Transversal {
                        break;
                    }
                    continue;
                }
                let traces = TransversalFrame {
                    plane: plane.clone(),
                    line: Line3::new(plane.anchor(), Dir3::ints(1, 0, 0).expect("nonzero")),
                    u: Dir3::ints(1, 0, 0).expect("nonzero"),
                }
                .traces(lines)
                .expect("transversal");
                let (e1, e2) = plane.basis();
                for lh in 1..=LINE_HEIGHT_LIMIT {
                    for [a, b] in vectors_of_height::<2>(lh) {
                        let d = e1.scale(&Rat::from_int(a)).add(&e2.scale(&Rat::from_int(b)));
                        let line = Line3::new(plane.anchor(), Dir3::new(d).expect("independent basis"));
                        let frame = TransversalFrame::new(plane.clone(), line).expect("line lies in plane");
                        match line_violation(&frame, &traces, &dirs) {
                            None => return Ok(frame),
                            Some(c) => *failures.entry(c).or_default() += 1,
                        }
                    }
                }
            }
        }
    }
    unreachable!("height loop is unbounded")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineFamily {
    pub lines: Vec<Line3>,
    pub claimed_girth: usize,
    pub claimed_chromatic: usize,
    pub provenance: Provenance,
}

impl LineFamily {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        vertex_labels(&self.provenance, self.lines.len())
    }

    pub fn graph(&self) -> Result<GeoGraph, GraphError> {
        line_intersection_graph(&self.lines, self.labels())
    }

    /// The frame used to build this family from its parent, if any.
    pub fn frame(&self) -> Option<&TransversalFrame> {
        match &self.provenance {
            Provenance::Step { frame, .. } => frame.as_ref(),
            _ => None,
        }
    }
}

pub fn single_line() -> LineFamily {
    LineFamily {
        lines: vec![Line3::new(Point3::origin(), Dir3::ints(1, 0, 0).expect("nonzero"))],
        claimed_girth: usize::MAX,
        claimed_chromatic: 1,
        provenance: Provenance::Single,
    }
}

/// The x- and y-axes.
pub fn pair_lines() -> LineFamily {
    LineFamily {
        lines: vec![
            Line3::new(Point3::origin(), Dir3::ints(1, 0, 0).expect("nonzero")),
            Line3::new(Point3::origin(), Dir3::ints(0, 1, 0).expect("nonzero")),
        ],
        claimed_girth: usize::MAX,
        claimed_chromatic: 2,
        provenance: Provenance::Pair,
    }
}

/// Lines through consecutive vertices of the closed polygon with vertices
/// `(i, i² + i³, z_i)`, where `z_i` alternates `1, -1, ...` and the last vertex
/// sits at height 3. Every edge crosses `z = 0` at a point with denominator at
/// most 4, which keeps the ground sets of later recursion steps small.
/// Non-adjacent edges are skew for every odd `n >= 5`; the tests sweep this.
pub fn realize_odd_cycle_lines(n: usize) -> Result<LineFamily, LineError> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(LineError::BadCycleLength(n));
    }
    let pts: Vec<Point3> = (0..n as i64)
        .map(|i| {
            let z = if i == n as i64 - 1 { 3 } else { 1 - 2 * (i % 2) };
            Point3::ints(i, i * i * (1 + i), z)
        })
        .collect();
    // line i carries vertices i and i+1, so it meets lines i-1 and i+1
    let lines = (0..n)
        .map(|i| Line3::through(&pts[i], &pts[(i + 1) % n]).expect("distinct points"))
        .collect();
    Ok(LineFamily {
        lines,
        claimed_girth: n,
        claimed_chromatic: 3,
        provenance: Provenance::OddCycle { n },
    })
}

/// `S_x`: the line through the point of `L` at parameter `x`, in direction `u`.
pub fn make_ground_lines(xs: &[Rat], frame: &TransversalFrame) -> Vec<Line3> {
    xs.iter()
        .map(|x| Line3::new(frame.line.at(x), frame.u.clone()))
        .collect()
}

/// The map taking the parent into the plane-preserving position of one copy:
/// a homothety about the fixed point of the copy's map on `L`, or a shift
/// along `L` when the scale is 1.
pub fn copy_homothety(frame: &TransversalFrame, copy: &HomotheticCopy) -> Homothety3D {
    match copy.map.fixed_point() {
        Some(p) => Homothety3D::about(&frame.line.at(&p), copy.map.scale.clone()).expect("positive scale"),
        None => Homothety3D::translation(frame.line.dir.vector().scale(&copy.map.shift)),
    }
}

/// The parent's image under the copy's homothety followed by `tau * u`.
pub fn embed_copy_lines(parent: &[Line3], frame: &TransversalFrame, copy: &HomotheticCopy, tau: &Rat) -> Vec<Line3> {
    let h = Homothety3D::translation(frame.u.vector().scale(tau)).compose(&copy_homothety(frame, copy));
    parent.iter().map(|l| h.apply_line(l)).collect()
}

/// Values of `tau` at which `a + tau * u` meets or coincides with `b`.
#[cfg(test)]
fn forbidden_tau(a: &Line3, b: &Line3, u: &Point3) -> Option<Rat> {
    let da = a.dir.vector();
    let db = b.dir.vector();
    let w = b.base.sub(&a.base);
    if a.dir == b.dir {
        // a + tau u = b as sets iff w - tau u is parallel to d
        let ud = u.cross(da);
        let tau = w.cross(da).dot(&ud) / ud.dot(&ud);
        return w.sub(&u.scale(&tau)).cross(da).is_zero().then_some(tau);
    }
    // coplanar iff (w - tau u) . (da x db) = 0
    let n = da.cross(db);
    let coef = u.dot(&n);
    if coef.is_zero() {
        return w.dot(&n).is_zero().then(Rat::zero);
    }
    Some(w.dot(&n) / coef)
}

/// Incremental form of a pairwise forbidden-`tau` scan for copies of one parent: every
/// copy line has one of the parent's directions, so the dot products with
/// `d_i x d_j` and the parallel-pair offsets can be cached per placed line.
struct TauSweep {
    dirs: Vec<Point3>,
    /// `u . (d_i x d_j)`
    coef: Vec<Vec<Rat>>,
    /// `u x d_i` and its squared length
    ud: Vec<(Point3, Rat)>,
    placed: Vec<PlacedLine>,
}

struct PlacedLine {
    dir: usize,
    /// `base . (d_i x d_dir)` for every `i`
    dots: Vec<Rat>,
    /// `base x d = alpha (u x d) + residual`
    alpha: Rat,
    residual: Point3,
}

impl TauSweep {
    fn new(parent: &[Line3], u: &Point3) -> Self {
        let dirs = distinct_directions(parent);
        let coef = dirs
            .iter()
            .map(|a| dirs.iter().map(|b| u.dot(&a.cross(b))).collect())
            .collect();
        let ud = dirs
            .iter()
            .map(|d| {
                let v = u.cross(d);
                let n = v.dot(&v);
                (v, n)
            })
            .collect();
        TauSweep {
            dirs,
            coef,
            ud,
            placed: Vec::new(),
        }
    }

    fn dir_index(&self, l: &Line3) -> usize {
        self.dirs
            .binary_search(l.dir.vector())
            .expect("copy lines keep parent directions")
    }

    fn describe(&self, l: &Line3) -> PlacedLine {
        let j = self.dir_index(l);
        let dj = &self.dirs[j];
        let dots = self.dirs.iter().map(|di| l.base.dot(&di.cross(dj))).collect();
        let (v, n) = &self.ud[j];
        let m = l.base.cross(dj);
        let alpha = m.dot(v) / n;
        let residual = m.sub(&v.scale(&alpha));
        PlacedLine {
            dir: j,
            dots,
            alpha,
            residual,
        }
    }

    fn add(&mut self, lines: &[Line3]) {
        for l in lines {
            let p = self.describe(l);
            self.placed.push(p);
        }
    }

    /// Integer `tau` at which some of `lines + tau u` meets a placed line.
    fn forbidden(&self, lines: &[Line3]) -> BTreeSet<Rat> {
        let mut out = BTreeSet::new();
        for l in lines {
            let a = self.describe(l);
            let i = a.dir;
            for b in &self.placed {
                let j = b.dir;
                let tau = if i == j {
                    if a.residual != b.residual {
                        continue;
                    }
                    &b.alpha - &a.alpha
                } else {
                    // (b - a - tau u) . (d_i x d_j) = 0, with base . (d_i x d_j) = -(base . (d_j x d_i))
                    (&b.dots[i] + &a.dots[j]) / &self.coef[i][j]
                };
                if tau.is_integer() {
                    out.insert(tau);
                }
            }
        }
        out
    }
}

/// Options shared by the line constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LineStepOptions {
    pub parent_chroma_budget: u64,
    pub frame_budget: usize,
    pub tau_candidates: usize,
}

impl Default for LineStepOptions {
    fn default() -> Self {
        LineStepOptions {
            parent_chroma_budget: 2_000_000,
            frame_budget: DEFAULT_FRAME_BUDGET,
            tau_candidates: 1_000_000,
        }
    }
}

/// One recursion step on lines; mirrors [`crate::boxworld::recursion_step_boxes`]
/// with a transversal plane in place of the plane `x = y`.
pub fn recursion_step_lines(
    parent: &LineFamily,
    k: usize,
    g: usize,
    provider: &dyn GallaiProvider,
    opts: LineStepOptions,
) -> Result<LineFamily, LineError> {
    let parent_graph = parent.graph()?;
    check_parent(&parent_graph, k, g, opts.parent_chroma_budget).map_err(LineError::ParentRejected)?;
    let (sorted, frame) = prepare_parent_lines(parent, opts.frame_budget)?;
    let params = frame.trace_params(&sorted.lines).expect("frame is transversal");
    let cert = provider.certificate(&GroundSet::new(params)?, k, g)?;
    if !cert.is_usable() {
        return Err(LineError::CertificateUnusable(format!("{:?}", cert.flags)));
    }
    assemble_lines(&sorted, &frame, &cert, opts.tau_candidates)
}

/// A frame for the parent and the parent reordered by trace parameter, so
/// line `i` corresponds to the `i`-th point of the ground set.
pub fn prepare_parent_lines(
    parent: &LineFamily,
    frame_budget: usize,
) -> Result<(LineFamily, TransversalFrame), LineError> {
    let frame = choose_frame(&parent.lines, frame_budget)?;
    let params = frame.trace_params(&parent.lines).expect("frame is transversal");
    let mut order: Vec<usize> = (0..parent.len()).collect();
    order.sort_by(|&a, &b| params[a].cmp(&params[b]));
    let sorted = LineFamily {
        lines: order.iter().map(|&i| parent.lines[i].clone()).collect(),
        ..parent.clone()
    };
    Ok((sorted, frame))
}

/// Ground lines for `cert.points` and one translated copy of `sorted` per
/// copy in the certificate, followed by the exact structural checks.
pub fn assemble_lines(
    sorted: &LineFamily,
    frame: &TransversalFrame,
    cert: &crate::gallai::GallaiCertificate,
    tau_candidates: usize,
) -> Result<LineFamily, LineError> {
    let params = frame.trace_params(&sorted.lines).ok_or(LineError::NoFrame {
        tried: 0,
        condition: FrameCondition::Transversal,
    })?;
    if cert.ground.points() != params.as_slice() {
        return Err(LineError::CertificateUnusable(
            "ground set differs from the parent's traces".into(),
        ));
    }
    let sorted_graph = line_intersection_graph(&sorted.lines, vec![String::new(); sorted.len()])?;
    let mut lines = make_ground_lines(&cert.points, frame);
    let ground: Vec<usize> = (0..lines.len()).collect();
    let u = frame.u.vector().clone();
    let mut blocks = Vec::with_capacity(cert.copies.len());
    let mut sweep = TauSweep::new(&sorted.lines, &u);
    for (ci, copy) in cert.copies.iter().enumerate() {
        let at_zero = embed_copy_lines(&sorted.lines, frame, copy, &Rat::zero());
        let forbidden = sweep.forbidden(&at_zero);
        let tau = (0..tau_candidates.max(1))
            .map(|i| Rat::from_int(zigzag(i)))
            .find(|t| !forbidden.contains(t))
            .ok_or(LineError::NoTranslation {
                copy: ci,
                tried: tau_candidates,
            })?;
        let shift = u.scale(&tau);
        let start = lines.len();
        let placed: Vec<Line3> = at_zero
            .into_iter()
            .map(|l| Line3::new(l.base.add(&shift), l.dir))
            .collect();
        sweep.add(&placed);
        lines.extend(placed);
        let targets = copy
            .image
            .iter()
            .map(|x| cert.points.binary_search(x).expect("copy inside X"))
            .collect();
        blocks.push(CopyBlock {
            members: (start..lines.len()).collect(),
            targets,
        });
    }
    let layout = RecursionLayout { ground, blocks };
    let out = LineFamily {
        lines,
        claimed_girth: cert.g,
        claimed_chromatic: cert.k + 1,
        provenance: Provenance::Step {
            level: sorted.provenance.depth() + 1,
            parent_size: sorted.len(),
            certificate: CertificateSummary::from(cert),
            layout: layout.clone(),
            frame: Some(frame.clone()),
            parent: Box::new(sorted.provenance.clone()),
        },
    };
    check_structure(&out.graph()?, &layout, Some(&sorted_graph))?;
    Ok(out)
}

/// Lines whose intersection graph has girth at least `g` and chromatic
/// number at least `k`, with the same base choices as the box construction.
pub fn build_line_family(
    g: usize,
    k: usize,
    provider: &crate::gallai::ProviderPolicy,
    opts: LineStepOptions,
) -> Result<LineFamily, LineError> {
    let at = |level: usize| {
        move |e: LineError| LineError::AtLevel {
            level,
            source: Box::new(e),
        }
    };
    let odd = {
        let n = g.max(5);
        n + (1 - n % 2)
    };
    let mut fam = match k {
        0 | 1 => return Ok(single_line()),
        2 => return Ok(pair_lines()),
        _ if *provider == crate::gallai::ProviderPolicy::Pigeonhole && (6..=8).contains(&g) => {
            recursion_step_lines(&pair_lines(), 2, g, provider, opts).map_err(at(1))?
        }
        _ => realize_odd_cycle_lines(odd)?,
    };
    for level_k in 3..k {
        let level = fam.provenance.depth() + 1;
        fam = recursion_step_lines(&fam, level_k, g, provider, opts).map_err(at(level))?;
    }
    Ok(fam)
}
