//! Grounded square boxes and the recursion that raises the chromatic number
//! of their intersection graph by one while keeping the girth.
//!
//! A box is *grounded* when it touches the plane `x = y` exactly along one
//! vertical edge and lies in the half-space `x >= y`; it is *square* when its
//! horizontal cross-section is a square. Such a box is determined by its
//! trace `t` (the x-coordinate of that edge), its side `s`, and its z-extent:
//! `[t, t + s] x [t - s, t] x z`. Two of them meet iff `|t1 - t2| <= min(s1, s2)`
//! and their z-extents meet.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gallai::{GallaiCertificate, GallaiError, GallaiProvider, GroundSet, HomotheticCopy};
use crate::geom::{AxisMap3, Box3, Homothety1D, Interval};
use crate::graph::{box_intersection_graph, GeoGraph, GraphMatch};
use crate::rat::Rat;
use crate::structure::{
    check_parent, check_structure, vertex_labels, CertificateSummary, CopyBlock, Provenance, RecursionLayout,
    StructuralViolation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoxError {
    #[error("box {0:?} is not a grounded square box")]
    NotGrounded(Box<Box3>),
    #[error("odd cycle length must be odd and at least 5, got {0}")]
    BadCycleLength(usize),
    #[error("epsilon {eps} must lie strictly between 0 and the smallest gap {gap}")]
    EpsilonOutOfRange { eps: Rat, gap: Rat },
    #[error("copy maps {expected} ground points but the parent has {actual} traces")]
    DomainMismatch { expected: usize, actual: usize },
    #[error("parent family refused: {0}")]
    ParentRejected(String),
    #[error("certificate unusable: {0}")]
    CertificateUnusable(String),
    #[error(transparent)]
    Provider(#[from] GallaiError),
    #[error("structural check failed: {0}")]
    Structure(#[from] StructuralViolation),
    #[error("normalization changed the intersection graph: {0:?}")]
    NormalizationBroke(GraphMatch),
    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<BoxError>,
    },
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Box3", into = "Box3")]
pub struct GroundedSquareBox(Box3);

impl GroundedSquareBox {
    pub fn new(b: Box3) -> Result<Self, BoxError> {
        let grounded = b.x.lo() == b.y.hi();
        let square = b.x.width() == b.y.width() && b.x.width().is_positive();
        if grounded && square {
            Ok(GroundedSquareBox(b))
        } else {
            Err(BoxError::NotGrounded(Box::new(b)))
        }
    }

    /// `[t, t + side] x [t - side, t] x z`.
    pub fn from_trace(trace: &Rat, side: &Rat, z: Interval) -> Result<Self, BoxError> {
        let x = Interval::new(trace.clone(), trace + side).map_err(|_| bad_side(trace, side, &z))?;
        let y = Interval::new(trace - side, trace.clone()).map_err(|_| bad_side(trace, side, &z))?;
        GroundedSquareBox::new(Box3::new(x, y, z))
    }

    pub fn trace(&self) -> &Rat {
        self.0.x.lo()
    }

    pub fn side(&self) -> Rat {
        self.0.x.width()
    }

    pub fn z(&self) -> &Interval {
        &self.0.z
    }

    pub fn as_box(&self) -> &Box3 {
        &self.0
    }
}

fn bad_side(trace: &Rat, side: &Rat, z: &Interval) -> BoxError {
    BoxError::NotGrounded(Box::new(Box3::new(
        Interval::new(trace.clone(), trace.clone()).expect("point"),
        Interval::new(trace.clone(), trace.clone()).expect("point"),
        Interval::new(side.clone(), side.clone()).unwrap_or_else(|_| z.clone()),
    )))
}

impl TryFrom<Box3> for GroundedSquareBox {
    type Error = BoxError;
    fn try_from(b: Box3) -> Result<Self, BoxError> {
        GroundedSquareBox::new(b)
    }
}

impl From<GroundedSquareBox> for Box3 {
    fn from(b: GroundedSquareBox) -> Box3 {
        b.0
    }
}

impl std::fmt::Debug for GroundedSquareBox {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub fn ground_trace(b: &GroundedSquareBox) -> Rat {
    b.trace().clone()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxFamily {
    pub boxes: Vec<GroundedSquareBox>,
    pub claimed_girth: usize,
    pub claimed_chromatic: usize,
    pub provenance: Provenance,
}

impl BoxFamily {
    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn raw_boxes(&self) -> Vec<Box3> {
        self.boxes.iter().map(|b| b.as_box().clone()).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        vertex_labels(&self.provenance, self.boxes.len())
    }

    pub fn graph(&self) -> GeoGraph {
        box_intersection_graph(&self.raw_boxes(), self.labels())
    }

    pub fn traces(&self) -> Vec<Rat> {
        self.boxes.iter().map(|b| b.trace().clone()).collect()
    }
}

pub fn single_box() -> BoxFamily {
    let b = GroundedSquareBox::from_trace(&Rat::zero(), &Rat::one(), Interval::ints(0, 1)).expect("valid");
    BoxFamily {
        boxes: vec![b],
        claimed_girth: usize::MAX,
        claimed_chromatic: 1,
        provenance: Provenance::Single,
    }
}

/// `[0,2] x [-2,0] x [0,1]` and `[1,3] x [-1,1] x [0,1]`.
pub fn pair_boxes() -> BoxFamily {
    let mk = |t: i64| {
        GroundedSquareBox::from_trace(&Rat::from_int(t), &Rat::from_int(2), Interval::ints(0, 1)).expect("valid")
    };
    BoxFamily {
        boxes: vec![mk(0), mk(1)],
        claimed_girth: usize::MAX,
        claimed_chromatic: 2,
        provenance: Provenance::Pair,
    }
}

/// Grounded square boxes realizing the cycle `C_n`.
///
/// Vertices `0..n-1` form a path with traces `10i`: consecutive traces are
/// 10 apart, and interior sides are 10, so only path neighbours overlap
/// horizontally. The two path ends get side `5(n-2)` and the closing box sits
/// at their midpoint with a slightly larger side, so horizontally it reaches
/// both ends (and possibly some interior boxes). The z-extents separate it
/// from the interior: ends `[0,20]`, interior `[0,10]`, closing box `[15,20]`.
pub fn realize_odd_cycle_boxes(n: usize) -> Result<BoxFamily, BoxError> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(BoxError::BadCycleLength(n));
    }
    let m = n as i64 - 1; // path length
    let reach = 5 * (m - 1);
    let mut boxes = Vec::with_capacity(n);
    for i in 0..m {
        let (side, z) = if i == 0 || i == m - 1 {
            (reach, Interval::ints(0, 20))
        } else {
            (10, Interval::ints(0, 10))
        };
        boxes.push(GroundedSquareBox::from_trace(
            &Rat::from_int(10 * i),
            &Rat::from_int(side),
            z,
        )?);
    }
    boxes.push(GroundedSquareBox::from_trace(
        &Rat::from_int(reach),
        &Rat::from_int(reach + 5),
        Interval::ints(15, 20),
    )?);
    Ok(BoxFamily {
        boxes,
        claimed_girth: n,
        claimed_chromatic: 3,
        provenance: Provenance::OddCycle { n },
    })
}

/// Smallest positive difference among a set of values, if any.
fn min_positive_gap(values: &mut Vec<Rat>) -> Option<Rat> {
    values.sort();
    values.dedup();
    values.windows(2).map(|w| &w[1] - &w[0]).min()
}

/// Makes all traces pairwise distinct without changing the intersection graph.
///
/// When duplicates exist, every box is first widened by half the smallest
/// positive gap between its x-endpoints (and y-endpoints) and any other box's,
/// growing away from the trace edge. That turns every face contact at a trace
/// edge into a proper overlap. Then all but the first box of each group of
/// equal traces is shifted along the diagonal by a distinct amount below a
/// quarter of the new smallest gap, widening it so its far faces stay put or
/// move out by at most twice the shift.
pub fn normalize_traces(fam: &BoxFamily) -> Result<BoxFamily, BoxError> {
    let mut groups: BTreeMap<Rat, Vec<usize>> = BTreeMap::new();
    for (i, b) in fam.boxes.iter().enumerate() {
        groups.entry(b.trace().clone()).or_default().push(i);
    }
    if groups.values().all(|g| g.len() == 1) {
        return Ok(fam.clone());
    }
    let before = fam.graph();

    let endpoint_gap = |boxes: &[GroundedSquareBox]| -> Rat {
        let mut xs: Vec<Rat> = boxes
            .iter()
            .flat_map(|b| [b.as_box().x.lo().clone(), b.as_box().x.hi().clone()])
            .collect();
        let mut ys: Vec<Rat> = boxes
            .iter()
            .flat_map(|b| [b.as_box().y.lo().clone(), b.as_box().y.hi().clone()])
            .collect();
        let gx = min_positive_gap(&mut xs);
        let gy = min_positive_gap(&mut ys);
        match (gx, gy) {
            (Some(a), Some(b)) => Rat::min_of(&a, &b).clone(),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => Rat::one(),
        }
    };

    let widen = endpoint_gap(&fam.boxes) / Rat::from_int(2);
    let mut boxes: Vec<GroundedSquareBox> = fam
        .boxes
        .iter()
        .map(|b| GroundedSquareBox::from_trace(b.trace(), &(b.side() + &widen), b.z().clone()))
        .collect::<Result<_, _>>()?;

    let step = endpoint_gap(&boxes) / Rat::from_int(4);
    for members in groups.values().filter(|g| g.len() > 1) {
        let parts = Rat::from_int(members.len() as i64);
        for (j, &i) in members.iter().enumerate().skip(1) {
            let shift = &step * Rat::from_int(j as i64) / &parts;
            let b = &boxes[i];
            let moved = GroundedSquareBox::from_trace(&(b.trace() + &shift), &(b.side() + &shift), b.z().clone())?;
            boxes[i] = moved;
        }
    }

    let out = BoxFamily {
        boxes,
        claimed_girth: fam.claimed_girth,
        claimed_chromatic: fam.claimed_chromatic,
        provenance: fam.provenance.clone(),
    };
    let identity: Vec<usize> = (0..out.len()).collect();
    let check = crate::graph::graph_equals_expected(&out.graph(), &before, &identity).expect("same vertex count");
    if check != GraphMatch::Equal {
        return Err(BoxError::NormalizationBroke(check));
    }
    Ok(out)
}

/// `B_x = [x, x + eps] x [x - eps, x] x [0, 1]` for each `x`.
pub fn make_ground_boxes(xs: &[Rat], eps: &Rat) -> Result<Vec<GroundedSquareBox>, BoxError> {
    let mut sorted = xs.to_vec();
    let gap = min_positive_gap(&mut sorted);
    let in_range = eps.is_positive() && gap.as_ref().is_none_or(|g| eps < g);
    if !in_range {
        return Err(BoxError::EpsilonOutOfRange {
            eps: eps.clone(),
            gap: gap.unwrap_or_else(Rat::zero),
        });
    }
    xs.iter()
        .map(|x| GroundedSquareBox::from_trace(x, eps, Interval::ints(0, 1)))
        .collect()
}

/// Placement of one copy of the parent: horizontal map from the certificate,
/// vertical map into the copy's private z-slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyEmbedding {
    pub copy: HomotheticCopy,
    pub z_slot: Interval,
    pub map: AxisMap3,
}

/// Slot `j` of `count`: the j-th equal part of `[0, 1]`, shrunk by a quarter
/// part-width... more precisely by `1 / (4 count)` at each end.
pub fn z_slot(j: usize, count: usize) -> Interval {
    let m = Rat::from_int(count as i64);
    let j = Rat::from_int(j as i64);
    let margin = Rat::one() / (Rat::from_int(4) * &m);
    Interval::new(&j / &m + &margin, (&j + Rat::one()) / &m - &margin).expect("non-empty slot")
}

/// Embeddings for every copy in the certificate, with pairwise disjoint z-slots.
pub fn plan_embeddings(parent: &BoxFamily, cert: &GallaiCertificate) -> Vec<CopyEmbedding> {
    let hull = parent
        .boxes
        .iter()
        .map(|b| b.z().clone())
        .reduce(|a, b| a.hull(&b))
        .expect("non-empty parent");
    let count = cert.copies.len();
    cert.copies
        .iter()
        .enumerate()
        .map(|(j, copy)| {
            let slot = z_slot(j, count);
            let vertical = if hull.width().is_zero() {
                Homothety1D::new(Rat::one(), slot.lo() - hull.lo()).expect("unit scale")
            } else {
                Homothety1D::between(hull.lo(), hull.hi(), slot.lo(), slot.hi()).expect("non-degenerate")
            };
            CopyEmbedding {
                copy: copy.clone(),
                z_slot: slot,
                map: AxisMap3::new(copy.map.clone(), vertical),
            }
        })
        .collect()
}

/// The image of the parent under one embedding, in parent order.
pub fn embed_copy_boxes(parent: &BoxFamily, emb: &CopyEmbedding) -> Result<Vec<GroundedSquareBox>, BoxError> {
    if emb.copy.image.len() != parent.len() {
        return Err(BoxError::DomainMismatch {
            expected: emb.copy.image.len(),
            actual: parent.len(),
        });
    }
    parent
        .boxes
        .iter()
        .map(|b| GroundedSquareBox::new(emb.map.apply_box(b.as_box())))
        .collect()
}

/// Budgets for the checks a recursion step performs on its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOptions {
    pub parent_chroma_budget: u64,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            parent_chroma_budget: 2_000_000,
        }
    }
}

/// One recursion step: a certificate for the parent's traces, ground boxes
/// at the certificate's points, and one embedded copy of the parent per
/// homothetic copy of the traces. The structural clauses are checked on the
/// exact intersection graph before the family is returned.
pub fn recursion_step_boxes(
    parent: &BoxFamily,
    k: usize,
    g: usize,
    provider: &dyn GallaiProvider,
    opts: StepOptions,
) -> Result<BoxFamily, BoxError> {
    let parent_graph = parent.graph();
    check_parent(&parent_graph, k, g, opts.parent_chroma_budget).map_err(BoxError::ParentRejected)?;
    let sorted = prepare_parent_boxes(parent)?;
    let ground_set = GroundSet::new(sorted.traces()).map_err(BoxError::Provider)?;
    let cert = provider.certificate(&ground_set, k, g)?;
    if !cert.is_usable() {
        return Err(BoxError::CertificateUnusable(format!("{:?}", cert.flags)));
    }
    assemble_boxes(&sorted, &cert)
}

/// The parent with distinct traces, reordered by increasing trace. Box `i`
/// of the result corresponds to the `i`-th point of the ground set.
pub fn prepare_parent_boxes(parent: &BoxFamily) -> Result<BoxFamily, BoxError> {
    Ok(GroundedSquareBox::sort_by_trace(&normalize_traces(parent)?))
}

/// Ground boxes for `cert.points` and one embedded copy of `sorted` per copy
/// in the certificate, followed by the exact structural checks. Nothing here
/// depends on the colouring property of the certificate.
pub fn assemble_boxes(sorted: &BoxFamily, cert: &GallaiCertificate) -> Result<BoxFamily, BoxError> {
    if cert.ground.points() != sorted.traces().as_slice() {
        return Err(BoxError::DomainMismatch {
            expected: cert.ground.len(),
            actual: sorted.len(),
        });
    }
    let mut xs = cert.points.clone();
    let gap = min_positive_gap(&mut xs).unwrap_or_else(Rat::one);
    let eps = gap / Rat::from_int(3);
    let ground = make_ground_boxes(&cert.points, &eps)?;

    let mut boxes = ground;
    let layout_ground: Vec<usize> = (0..boxes.len()).collect();
    let mut blocks = Vec::with_capacity(cert.copies.len());
    for emb in plan_embeddings(sorted, cert) {
        let images = embed_copy_boxes(sorted, &emb)?;
        let start = boxes.len();
        let targets = emb
            .copy
            .image
            .iter()
            .map(|x| cert.points.binary_search(x).expect("copy inside X"))
            .collect();
        boxes.extend(images);
        blocks.push(CopyBlock {
            members: (start..boxes.len()).collect(),
            targets,
        });
    }
    let layout = RecursionLayout {
        ground: layout_ground,
        blocks,
    };
    let out = BoxFamily {
        boxes,
        claimed_girth: cert.g,
        claimed_chromatic: cert.k + 1,
        provenance: Provenance::Step {
            level: sorted.provenance.depth() + 1,
            parent_size: sorted.len(),
            certificate: CertificateSummary::from(cert),
            layout: layout.clone(),
            frame: None,
            parent: Box::new(sorted.provenance.clone()),
        },
    };
    check_structure(&out.graph(), &layout, Some(&sorted.graph()))?;
    Ok(out)
}

impl GroundedSquareBox {
    /// The family reordered by increasing trace.
    fn sort_by_trace(fam: &BoxFamily) -> BoxFamily {
        let mut boxes = fam.boxes.clone();
        boxes.sort_by(|a, b| a.trace().cmp(b.trace()));
        BoxFamily { boxes, ..fam.clone() }
    }
}

/// Builds a family with girth at least `g` and chromatic number at least `k`.
///
/// Bases: one box (k <= 1), two meeting boxes (k = 2), an odd cycle of length
/// at least `max(5, g)` (k = 3). With the pigeonhole provider and `6 <= g <= 8`,
/// the k = 3 level is instead one step up from the two-box base (a 9-cycle). Each further
/// level is one recursion step.
pub fn build_box_family(
    g: usize,
    k: usize,
    provider: &crate::gallai::ProviderPolicy,
    opts: StepOptions,
) -> Result<BoxFamily, BoxError> {
    let at = |level: usize| {
        move |e: BoxError| BoxError::AtLevel {
            level,
            source: Box::new(e),
        }
    };
    let odd = |g: usize| {
        let n = g.max(5);
        if n.is_multiple_of(2) {
            n + 1
        } else {
            n
        }
    };
    let mut fam = match k {
        0 | 1 => return Ok(single_box()),
        2 => return Ok(pair_boxes()),
        _ if *provider == crate::gallai::ProviderPolicy::Pigeonhole && (6..=8).contains(&g) => {
            recursion_step_boxes(&pair_boxes(), 2, g, provider, opts).map_err(at(1))?
        }
        _ => realize_odd_cycle_boxes(odd(g))?,
    };
    for level_k in 3..k {
        let level = fam.provenance.depth() + 1;
        fam = recursion_step_boxes(&fam, level_k, g, provider, opts).map_err(at(level))?;
    }
    fam.claimed_girth = fam.claimed_girth.max(g);
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallai::ProviderPolicy;
    use crate::graph::{chromatic_number, girth};
    use crate::rat::rat;

    fn trace_side(fam: &BoxFamily) -> Vec<(i64, i64)> {
        fam.boxes
            .iter()
            .map(|b| (b.trace().to_i64().unwrap(), b.side().to_i64().unwrap()))
            .collect()
    }

    #[test]
    fn grounded_invariants() {
        let b = GroundedSquareBox::from_trace(&rat(10), &rat(15), Interval::ints(0, 20)).unwrap();
        assert_eq!(b.as_box().y, Interval::ints(-5, 10));
        assert_eq!(ground_trace(&b), rat(10));
        let raw = Box3::new(Interval::ints(0, 2), Interval::ints(-2, 0), Interval::ints(0, 1));
        assert_eq!(ground_trace(&GroundedSquareBox::new(raw).unwrap()), rat(0));
        let skewed = Box3::new(Interval::ints(0, 2), Interval::ints(-1, 0), Interval::ints(0, 1));
        assert!(GroundedSquareBox::new(skewed).is_err());
        let off = Box3::new(Interval::ints(1, 3), Interval::ints(-2, 0), Interval::ints(0, 1));
        assert!(GroundedSquareBox::new(off).is_err());
    }

    #[test]
    fn pentagon_parameters() {
        let fam = realize_odd_cycle_boxes(5).unwrap();
        assert_eq!(trace_side(&fam), vec![(0, 15), (10, 10), (20, 10), (30, 15), (15, 20)]);
        let zs: Vec<_> = fam.boxes.iter().map(|b| b.z().clone()).collect();
        assert_eq!(
            zs,
            vec![
                Interval::ints(0, 20),
                Interval::ints(0, 10),
                Interval::ints(0, 10),
                Interval::ints(0, 20),
                Interval::ints(15, 20)
            ]
        );
        assert_eq!(girth(&fam.graph()), Some(5));
        assert!(realize_odd_cycle_boxes(4).is_err());
        assert!(realize_odd_cycle_boxes(3).is_err());
    }

    #[test]
    fn odd_cycles_realized() {
        for n in (5..=21).step_by(2) {
            let fam = realize_odd_cycle_boxes(n).unwrap();
            let id: Vec<usize> = (0..n).collect();
            assert_eq!(
                crate::graph::graph_equals_expected(&fam.graph(), &GeoGraph::cycle(n), &id).unwrap(),
                GraphMatch::Equal,
                "n = {n}"
            );
            let mut t = fam.traces();
            t.sort();
            t.dedup();
            assert_eq!(t.len(), n);
        }
    }

    #[test]
    fn ground_boxes() {
        let xs: Vec<Rat> = (1..=3).map(Rat::from_int).collect();
        let g = make_ground_boxes(&xs, &rat((1, 3))).unwrap();
        assert_eq!(
            g[0].as_box(),
            &Box3::new(
                Interval::new(rat(1), rat((4, 3))).unwrap(),
                Interval::new(rat((2, 3)), rat(1)).unwrap(),
                Interval::ints(0, 1)
            )
        );
        assert_eq!(
            box_intersection_graph(
                &g.iter().map(|b| b.as_box().clone()).collect::<Vec<_>>(),
                vec!["".into(); 3]
            )
            .edge_count(),
            0
        );
        assert_eq!(make_ground_boxes(&[rat(0)], &rat(5)).unwrap().len(), 1);
        assert!(matches!(
            make_ground_boxes(&[rat(0), rat(1)], &rat(1)),
            Err(BoxError::EpsilonOutOfRange { .. })
        ));
        assert!(make_ground_boxes(&[rat(0)], &rat(0)).is_err());
    }

    fn family(boxes: Vec<GroundedSquareBox>) -> BoxFamily {
        BoxFamily {
            boxes,
            claimed_girth: 3,
            claimed_chromatic: 1,
            provenance: Provenance::Single,
        }
    }

    #[test]
    fn normalize_leaves_distinct_traces_alone() {
        let fam = realize_odd_cycle_boxes(7).unwrap();
        assert_eq!(normalize_traces(&fam).unwrap(), fam);
    }

    #[test]
    fn normalize_separates_equal_traces() {
        let disjoint = family(vec![
            GroundedSquareBox::from_trace(&rat(0), &rat(2), Interval::ints(0, 1)).unwrap(),
            GroundedSquareBox::from_trace(&rat(0), &rat(3), Interval::ints(2, 3)).unwrap(),
        ]);
        let meeting = family(vec![
            GroundedSquareBox::from_trace(&rat(0), &rat(2), Interval::ints(0, 1)).unwrap(),
            GroundedSquareBox::from_trace(&rat(0), &rat(3), Interval::ints(1, 3)).unwrap(),
        ]);
        for fam in [disjoint, meeting] {
            let out = normalize_traces(&fam).unwrap();
            assert_ne!(out.boxes[0].trace(), out.boxes[1].trace());
            assert_eq!(
                out.graph().edges().collect::<Vec<_>>(),
                fam.graph().edges().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn normalize_handles_face_contacts_on_both_sides() {
        // box 1 shares trace 4 with box 0; box 2 touches at x = 4 from the left
        // and box 3 touches at y = 4 from above
        let fam = family(vec![
            GroundedSquareBox::from_trace(&rat(4), &rat(2), Interval::ints(0, 1)).unwrap(),
            GroundedSquareBox::from_trace(&rat(4), &rat(3), Interval::ints(0, 1)).unwrap(),
            GroundedSquareBox::from_trace(&rat(3), &rat(1), Interval::ints(0, 1)).unwrap(),
            GroundedSquareBox::from_trace(&rat(5), &rat(1), Interval::ints(0, 1)).unwrap(),
        ]);
        let out = normalize_traces(&fam).unwrap();
        let mut t = out.traces();
        t.sort();
        t.dedup();
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn embedding_maps_into_slot() {
        let parent = pair_boxes();
        let xs: Vec<Rat> = (1..=3).map(Rat::from_int).collect();
        let t = GroundSet::new(parent.traces()).unwrap();
        let copies = crate::gallai::enumerate_copies(&t, &xs);
        let copy = copies.iter().find(|c| c.image == vec![rat(1), rat(2)]).unwrap().clone();
        let slot = Interval::new(rat(0), rat((1, 4))).unwrap();
        let emb = CopyEmbedding {
            copy: copy.clone(),
            z_slot: slot.clone(),
            map: AxisMap3::new(copy.map.clone(), Homothety1D::new(rat((1, 4)), rat(0)).unwrap()),
        };
        let imgs = embed_copy_boxes(&parent, &emb).unwrap();
        assert_eq!(
            imgs.iter().map(|b| b.trace().clone()).collect::<Vec<_>>(),
            vec![rat(1), rat(2)]
        );
        assert!(imgs.iter().all(|b| slot.contains_interval(b.z())));
        let ground = make_ground_boxes(&xs, &rat((1, 3))).unwrap();
        for img in &imgs {
            let hits = ground.iter().filter(|gb| gb.as_box().intersects(img.as_box())).count();
            assert_eq!(hits, 1);
        }

        let identity = CopyEmbedding {
            copy: HomotheticCopy {
                map: Homothety1D::identity(),
                image: parent.traces(),
            },
            z_slot: Interval::ints(0, 1),
            map: AxisMap3::new(Homothety1D::identity(), Homothety1D::identity()),
        };
        assert_eq!(embed_copy_boxes(&parent, &identity).unwrap(), parent.boxes);

        let wrong = CopyEmbedding {
            copy: HomotheticCopy {
                map: Homothety1D::identity(),
                image: vec![rat(0), rat(1), rat(2)],
            },
            ..identity
        };
        assert!(matches!(
            embed_copy_boxes(&parent, &wrong),
            Err(BoxError::DomainMismatch { .. })
        ));
    }

    #[test]
    fn scaled_pentagon_copy_keeps_its_graph() {
        let parent = realize_odd_cycle_boxes(5).unwrap();
        let map = Homothety1D::new(rat((1, 100)), rat(7)).unwrap();
        let emb = CopyEmbedding {
            copy: HomotheticCopy {
                map: map.clone(),
                image: parent.traces().iter().map(|t| map.apply(t)).collect(),
            },
            z_slot: Interval::ints(0, 1),
            map: AxisMap3::new(map, Homothety1D::new(rat((1, 20)), rat(0)).unwrap()),
        };
        let imgs = family(embed_copy_boxes(&parent, &emb).unwrap());
        let id: Vec<usize> = (0..5).collect();
        assert_eq!(
            crate::graph::graph_equals_expected(&imgs.graph(), &GeoGraph::cycle(5), &id).unwrap(),
            GraphMatch::Equal
        );
    }

    #[test]
    fn pair_step_gives_nine_cycle() {
        let out =
            recursion_step_boxes(&pair_boxes(), 2, 6, &ProviderPolicy::Pigeonhole, StepOptions::default()).unwrap();
        assert_eq!(out.len(), 9);
        let g = out.graph();
        assert_eq!(g.edge_count(), 9);
        assert!((0..9).all(|v| g.degree(v) == 2));
        assert_eq!(girth(&g), Some(9));
        assert_eq!(chromatic_number(&g, 100_000).exact(), Some(3));
    }

    #[test]
    fn duplicate_trace_parent_is_normalized_first() {
        let dup = BoxFamily {
            boxes: vec![
                GroundedSquareBox::from_trace(&rat(0), &rat(2), Interval::ints(0, 1)).unwrap(),
                GroundedSquareBox::from_trace(&rat(0), &rat(3), Interval::ints(1, 2)).unwrap(),
            ],
            claimed_girth: usize::MAX,
            claimed_chromatic: 2,
            provenance: Provenance::Pair,
        };
        let out = recursion_step_boxes(&dup, 2, 6, &ProviderPolicy::Pigeonhole, StepOptions::default()).unwrap();
        assert_eq!(out.len(), 9);
        assert_eq!(girth(&out.graph()), Some(9));
    }

    #[test]
    fn unverified_parent_is_refused() {
        let apart = family(vec![
            GroundedSquareBox::from_trace(&rat(0), &rat(1), Interval::ints(0, 1)).unwrap(),
            GroundedSquareBox::from_trace(&rat(5), &rat(1), Interval::ints(0, 1)).unwrap(),
        ]);
        assert!(matches!(
            recursion_step_boxes(&apart, 2, 6, &ProviderPolicy::Pigeonhole, StepOptions::default()),
            Err(BoxError::ParentRejected(_))
        ));
    }

    #[test]
    fn build_entry_points() {
        let opts = StepOptions::default();
        assert_eq!(
            build_box_family(3, 1, &ProviderPolicy::Pigeonhole, opts).unwrap().len(),
            1
        );
        let vdw = ProviderPolicy::Vdw {
            length_hint: None,
            verify_budget: 1000,
        };
        assert_eq!(
            build_box_family(5, 3, &vdw, opts).unwrap().provenance,
            Provenance::OddCycle { n: 5 }
        );
        assert_eq!(
            build_box_family(6, 3, &vdw, opts).unwrap().provenance,
            Provenance::OddCycle { n: 7 }
        );
        assert_eq!(
            build_box_family(6, 3, &ProviderPolicy::Pigeonhole, opts).unwrap().len(),
            9
        );
        // the pigeonhole provider cannot go past a two-point ground set
        let err = build_box_family(6, 4, &ProviderPolicy::Pigeonhole, opts).unwrap_err();
        assert!(matches!(err, BoxError::AtLevel { level: 2, .. }), "{err}");
    }
}
