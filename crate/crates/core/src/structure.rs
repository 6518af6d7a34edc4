//! Layout of one recursion step and the structural facts both geometries must
//! satisfy: ground objects pairwise disjoint, each copy object meeting exactly
//! its own ground object, no contact between distinct copies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gallai::{CertificateFlags, GallaiCertificate};
use crate::graph::{girth, graph_equals_expected, GeoGraph, GraphMatch};

/// One homothetic copy of the parent family inside the output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyBlock {
    /// Output indices, in parent order.
    pub members: Vec<usize>,
    /// For each member, the position in [`RecursionLayout::ground`] it must meet.
    pub targets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecursionLayout {
    /// Output indices of the ground objects, in the order of `X`.
    pub ground: Vec<usize>,
    pub blocks: Vec<CopyBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum StructuralViolation {
    #[error("layout does not cover objects 0..{n} exactly once")]
    BadLayout { n: usize },
    #[error("ground objects {a} and {b} intersect")]
    GroundPairMeets { a: usize, b: usize },
    #[error("copy object {object} misses its ground object {ground}")]
    MissesOwnGround { object: usize, ground: usize },
    #[error("copy object {object} meets foreign ground object {ground}")]
    MeetsForeignGround { object: usize, ground: usize },
    #[error("objects {a} and {b} from different copies intersect")]
    CrossCopy { a: usize, b: usize },
    #[error("copy block {block} is not a faithful copy of the parent graph: {detail:?}")]
    NotACopy { block: usize, detail: GraphMatch },
}

/// Counts of the pairs each structural clause was checked on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub ground_pairs: usize,
    pub copy_objects: usize,
    pub cross_copy_edges_checked: usize,
    pub blocks_compared: usize,
}

/// Checks every structural clause against an exact intersection graph.
///
/// Because each copy object must meet exactly its own ground object, the
/// same sweep also rules out any object meeting two ground objects.
pub fn check_structure(
    g: &GeoGraph,
    layout: &RecursionLayout,
    parent: Option<&GeoGraph>,
) -> Result<StructureReport, StructuralViolation> {
    let n = g.n();
    let mut block_of = vec![usize::MAX; n];
    let mut ground_pos = vec![usize::MAX; n];
    let mut seen = 0usize;
    for (p, &v) in layout.ground.iter().enumerate() {
        if v >= n || ground_pos[v] != usize::MAX {
            return Err(StructuralViolation::BadLayout { n });
        }
        ground_pos[v] = p;
        seen += 1;
    }
    for (b, block) in layout.blocks.iter().enumerate() {
        if block.targets.len() != block.members.len() {
            return Err(StructuralViolation::BadLayout { n });
        }
        for &v in &block.members {
            if v >= n || block_of[v] != usize::MAX || ground_pos[v] != usize::MAX {
                return Err(StructuralViolation::BadLayout { n });
            }
            block_of[v] = b;
            seen += 1;
        }
    }
    if seen != n {
        return Err(StructuralViolation::BadLayout { n });
    }

    let mut report = StructureReport::default();
    for (i, &a) in layout.ground.iter().enumerate() {
        for &b in &layout.ground[i + 1..] {
            report.ground_pairs += 1;
            if g.has_edge(a, b) {
                return Err(StructuralViolation::GroundPairMeets {
                    a: a.min(b),
                    b: a.max(b),
                });
            }
        }
    }
    for block in &layout.blocks {
        for (&v, &target) in block.members.iter().zip(&block.targets) {
            report.copy_objects += 1;
            let own = *layout.ground.get(target).ok_or(StructuralViolation::BadLayout { n })?;
            if !g.has_edge(v, own) {
                return Err(StructuralViolation::MissesOwnGround { object: v, ground: own });
            }
            for &w in g.neighbors(v) {
                if ground_pos[w] != usize::MAX && w != own {
                    return Err(StructuralViolation::MeetsForeignGround { object: v, ground: w });
                }
                if block_of[w] != usize::MAX {
                    report.cross_copy_edges_checked += 1;
                    if block_of[w] != block_of[v] {
                        return Err(StructuralViolation::CrossCopy {
                            a: v.min(w),
                            b: v.max(w),
                        });
                    }
                }
            }
        }
    }
    let reference = match parent {
        Some(p) => Some(p.clone()),
        None => layout.blocks.first().map(|b| g.induced(&b.members)),
    };
    if let Some(reference) = reference {
        let identity: Vec<usize> = (0..reference.n()).collect();
        for (b, block) in layout.blocks.iter().enumerate() {
            let sub = g.induced(&block.members);
            let detail =
                graph_equals_expected(&sub, &reference, &identity).unwrap_or(GraphMatch::Missing { u: 0, v: 0 });
            if detail != GraphMatch::Equal {
                return Err(StructuralViolation::NotACopy { block: b, detail });
            }
            report.blocks_compared += 1;
        }
    }
    Ok(report)
}

/// Lower bound `min(parent girth, 3 * ceil(g / 3))` on the girth of a step's output.
pub fn girth_lift_bound(parent_girth: Option<usize>, g: usize) -> Option<usize> {
    let ground_bound = 3 * g.div_ceil(3);
    match parent_girth {
        None => Some(ground_bound),
        Some(p) => Some(p.min(ground_bound)),
    }
}

/// Whether `out_girth` (None = infinite) meets [`girth_lift_bound`].
pub fn girth_lift_holds(parent_girth: Option<usize>, out_girth: Option<usize>, g: usize) -> bool {
    match (out_girth, girth_lift_bound(parent_girth, g)) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(o), Some(b)) => o >= b,
    }
}

/// What a scene records about the certificate behind a step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub ground_size: usize,
    pub points: usize,
    pub copies: usize,
    pub k: usize,
    pub g: usize,
    pub flags: CertificateFlags,
}

impl From<&GallaiCertificate> for CertificateSummary {
    fn from(c: &GallaiCertificate) -> Self {
        CertificateSummary {
            ground_size: c.ground.len(),
            points: c.points.len(),
            copies: c.copies.len(),
            k: c.k,
            g: c.g,
            flags: c.flags.clone(),
        }
    }
}

/// How a family came to be; scenes carry this so a verifier can re-check the
/// last recursion step from raw coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
#[allow(clippy::large_enum_variant)]
pub enum Provenance {
    Single,
    Pair,
    OddCycle {
        n: usize,
    },
    Step {
        level: usize,
        parent_size: usize,
        certificate: CertificateSummary,
        layout: RecursionLayout,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frame: Option<crate::lineworld::TransversalFrame>,
        parent: Box<Provenance>,
    },
}

impl Provenance {
    /// Number of recursion steps above the base.
    pub fn depth(&self) -> usize {
        match self {
            Provenance::Step { parent, .. } => 1 + parent.depth(),
            _ => 0,
        }
    }

    /// The graph a base family must realize, if this is a base.
    pub fn expected_base_graph(&self) -> Option<GeoGraph> {
        match self {
            Provenance::Single => Some(GeoGraph::unlabeled(1)),
            Provenance::Pair => Some(GeoGraph::from_edges(GeoGraph::unlabeled(2).labels().to_vec(), [(0, 1)])),
            Provenance::OddCycle { n } => Some(GeoGraph::cycle(*n)),
            Provenance::Step { .. } => None,
        }
    }
}

/// Vertex labels derived from the last recursion layout, or plain indices.
pub fn vertex_labels(p: &Provenance, n: usize) -> Vec<String> {
    let mut labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    if let Provenance::Step { layout, .. } = p {
        for (pos, &v) in layout.ground.iter().enumerate() {
            if v < n {
                labels[v] = format!("ground{pos}");
            }
        }
        for (b, block) in layout.blocks.iter().enumerate() {
            for (i, &v) in block.members.iter().enumerate() {
                if v < n {
                    labels[v] = format!("copy{b}.{i}");
                }
            }
        }
    }
    labels
}

/// Parent checks made before a step is allowed to run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParentCheck {
    pub girth: Option<usize>,
    /// Whether a (k-1)-colouring was refuted; `None` when the budget ran out.
    pub chromatic_refuted: Option<bool>,
}

/// Verifies `girth >= g` exactly and refutes (k-1)-colourings within `budget`.
/// Returns the reason when the parent is definitely not a valid input.
pub fn check_parent(g_graph: &GeoGraph, k: usize, g: usize, budget: u64) -> Result<ParentCheck, String> {
    let gi = girth(g_graph);
    if let Some(actual) = gi {
        if actual < g {
            return Err(format!("parent girth {actual} is below {g}"));
        }
    }
    let chromatic_refuted = if k <= 1 {
        Some(true)
    } else {
        match crate::graph::is_k_colorable(g_graph, k - 1, budget) {
            Ok(c) if c.is_colorable() => {
                return Err(format!("parent has a proper {}-colouring", k - 1));
            }
            Ok(_) => Some(true),
            Err(_) => None,
        }
    };
    Ok(ParentCheck {
        girth: gi,
        chromatic_refuted,
    })
}
