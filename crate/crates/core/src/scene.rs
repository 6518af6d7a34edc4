//! Scene files and their re-verification from raw coordinates.
//!
//! A scene stores the objects together with the parameters they were built
//! for and how they were built. Verification recomputes everything from the
//! coordinates; stored claims are only compared against, never trusted.

use serde::{Deserialize, Serialize};

use crate::boxworld::{BoxFamily, GroundedSquareBox};
use crate::gallai::Check;
use crate::geom::{line_line_relation, line_plane_meet, Box3, Line3, LineRelation, PlaneRelation};
use crate::graph::{
    box_intersection_graph, chromatic_number, girth, graph_equals_expected, line_intersection_graph, shortest_cycle,
    ChromaticOutcome, GeoGraph, GraphMatch,
};
use crate::lineworld::{double_shift_graph, shift_line, LineFamily, ShiftSystem, TransversalFrame};
use crate::structure::{check_structure, girth_lift_holds, vertex_labels, Provenance, RecursionLayout};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scene {
    GroundedBoxFamily {
        g: usize,
        k: usize,
        boxes: Vec<Box3>,
        provenance: Provenance,
    },
    LineFamily {
        g: usize,
        k: usize,
        lines: Vec<Line3>,
        provenance: Provenance,
    },
    ShiftSystem {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(flatten)]
        system: ShiftSystem,
    },
}

impl Scene {
    pub fn from_boxes(fam: &BoxFamily, g: usize, k: usize) -> Scene {
        Scene::GroundedBoxFamily {
            g,
            k,
            boxes: fam.raw_boxes(),
            provenance: fam.provenance.clone(),
        }
    }

    pub fn from_lines(fam: &LineFamily, g: usize, k: usize) -> Scene {
        Scene::LineFamily {
            g,
            k,
            lines: fam.lines.clone(),
            provenance: fam.provenance.clone(),
        }
    }

    pub fn from_shift(sys: &ShiftSystem, seed: Option<u64>) -> Scene {
        Scene::ShiftSystem {
            n: sys.n(),
            seed,
            system: sys.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Scene::GroundedBoxFamily { .. } => "grounded-box-family",
            Scene::LineFamily { .. } => "line-family",
            Scene::ShiftSystem { .. } => "shift-system",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Scene::GroundedBoxFamily { boxes, .. } => boxes.len(),
            Scene::LineFamily { lines, .. } => lines.len(),
            Scene::ShiftSystem { system, .. } => system.lines.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            Scene::GroundedBoxFamily { provenance, .. } | Scene::LineFamily { provenance, .. } => {
                vertex_labels(provenance, self.len())
            }
            Scene::ShiftSystem { system, .. } => system.labels(),
        }
    }

    /// The exact intersection graph, or a description of why there is none.
    pub fn graph(&self) -> Result<GeoGraph, String> {
        match self {
            Scene::GroundedBoxFamily { boxes, .. } => Ok(box_intersection_graph(boxes, self.labels())),
            Scene::LineFamily { lines, .. } => line_intersection_graph(lines, self.labels()).map_err(|e| e.to_string()),
            Scene::ShiftSystem { system, .. } => {
                line_intersection_graph(&system.lines, self.labels()).map_err(|e| e.to_string())
            }
        }
    }

    /// Girth and chromatic number the scene is meant to reach, if it claims any.
    pub fn claims(&self) -> (Option<usize>, Option<usize>) {
        match self {
            Scene::GroundedBoxFamily { g, k, .. } | Scene::LineFamily { g, k, .. } => (Some(*g), Some(*k)),
            Scene::ShiftSystem { .. } => (None, None),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenes serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Scene, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Which properties to recompute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checks {
    pub geometry: bool,
    pub girth: bool,
    pub chroma: bool,
}

impl Checks {
    pub const ALL: Checks = Checks {
        geometry: true,
        girth: true,
        chroma: true,
    };
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub ok: bool,
    pub edges: usize,
    /// What was compared: the expected base graph, a recursion layout, or `G_n`.
    pub basis: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GirthReport {
    /// `None` means the graph is a forest.
    pub girth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed: Option<usize>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChromaReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<usize>,
    pub lower: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<usize>>,
    pub nodes: u64,
    pub budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed: Option<usize>,
    pub status: Check,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub kind: String,
    pub objects: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub girth: Option<GirthReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chroma: Option<ChromaReport>,
}

impl VerifyReport {
    pub fn failed(&self) -> bool {
        self.geometry.as_ref().is_some_and(|g| !g.ok)
            || self.girth.as_ref().is_some_and(|g| !g.ok)
            || self.chroma.as_ref().is_some_and(|c| c.status == Check::Failed)
    }

    pub fn inconclusive(&self) -> bool {
        self.chroma.as_ref().is_some_and(|c| c.status == Check::Inconclusive)
    }
}

/// Recomputes the requested checks from the scene's coordinates.
pub fn verify_scene(scene: &Scene, checks: Checks, chroma_budget: u64) -> VerifyReport {
    let mut report = VerifyReport {
        kind: scene.kind().to_string(),
        objects: scene.len(),
        geometry: None,
        girth: None,
        chroma: None,
    };
    let graph = match scene.graph() {
        Ok(g) => g,
        Err(e) => {
            report.geometry = Some(GeometryReport {
                ok: false,
                edges: 0,
                basis: "intersection graph".into(),
                violations: vec![e],
            });
            return report;
        }
    };
    let (claimed_girth, claimed_chi) = scene.claims();
    if checks.geometry {
        report.geometry = Some(check_geometry(scene, &graph));
    }
    if checks.girth {
        let gi = girth(&graph);
        let mut ok = claimed_girth.is_none_or(|c| gi.is_none_or(|v| v >= c));
        if let (Some(g), Some(block)) = (claimed_girth, first_block_graph(scene, &graph)) {
            ok &= girth_lift_holds(girth(&block), gi, g);
        }
        report.girth = Some(GirthReport {
            girth: gi,
            witness: shortest_cycle(&graph),
            claimed: claimed_girth,
            ok,
        });
    }
    if checks.chroma {
        let outcome = chromatic_number(&graph, chroma_budget);
        let lower = outcome.lower();
        let (chi, upper, coloring, nodes) = match &outcome {
            ChromaticOutcome::Exact(c) => (Some(c.chi), Some(c.chi), Some(c.coloring.clone()), c.nodes),
            ChromaticOutcome::Inconclusive { upper, nodes, .. } => (None, Some(*upper), None, *nodes),
        };
        let status = match claimed_chi {
            None => {
                if chi.is_some() {
                    Check::Passed
                } else {
                    Check::Inconclusive
                }
            }
            Some(c) if lower >= c => Check::Passed,
            Some(_) if chi.is_some() => Check::Failed,
            Some(_) => Check::Inconclusive,
        };
        report.chroma = Some(ChromaReport {
            chi,
            lower,
            upper,
            coloring,
            nodes,
            budget: chroma_budget,
            claimed: claimed_chi,
            status,
        });
    }
    report
}

fn first_block_graph(scene: &Scene, graph: &GeoGraph) -> Option<GeoGraph> {
    match scene {
        Scene::GroundedBoxFamily {
            provenance: Provenance::Step { layout, .. },
            ..
        }
        | Scene::LineFamily {
            provenance: Provenance::Step { layout, .. },
            ..
        } => layout.blocks.first().map(|b| graph.induced(&b.members)),
        _ => None,
    }
}

fn check_geometry(scene: &Scene, graph: &GeoGraph) -> GeometryReport {
    let mut violations = Vec::new();
    let basis;
    match scene {
        Scene::GroundedBoxFamily { boxes, provenance, .. } => {
            for (i, b) in boxes.iter().enumerate() {
                if GroundedSquareBox::new(b.clone()).is_err() {
                    violations.push(format!("box {i} is not a grounded square box"));
                }
            }
            basis = check_provenance(provenance, graph, &mut violations);
        }
        Scene::LineFamily { lines, provenance, .. } => {
            basis = check_provenance(provenance, graph, &mut violations);
            if let Provenance::Step {
                layout,
                frame: Some(frame),
                ..
            } = provenance
            {
                check_frame_layout(lines, layout, frame, &mut violations);
            }
        }
        Scene::ShiftSystem { system, .. } => {
            basis = format!("double shift graph G_{}", system.n());
            check_shift(system, graph, &mut violations);
        }
    }
    GeometryReport {
        ok: violations.is_empty(),
        edges: graph.edge_count(),
        basis,
        violations,
    }
}

fn describe(m: &GraphMatch, labels: &[String]) -> String {
    match m {
        GraphMatch::Equal => "equal".into(),
        GraphMatch::Missing { u, v } => format!("missing edge {} - {}", labels[*u], labels[*v]),
        GraphMatch::Spurious { u, v } => format!("spurious edge {} - {}", labels[*u], labels[*v]),
    }
}

fn check_provenance(p: &Provenance, graph: &GeoGraph, violations: &mut Vec<String>) -> String {
    match p {
        Provenance::Step {
            layout, parent_size, ..
        } => {
            if layout.blocks.iter().any(|b| b.members.len() != *parent_size) {
                violations.push(format!("a copy block does not have {parent_size} members"));
            }
            if let Err(v) = check_structure(graph, layout, None) {
                violations.push(v.to_string());
            }
            "recursion layout".into()
        }
        base => {
            let expected = base.expected_base_graph().expect("base provenance");
            if expected.n() != graph.n() {
                violations.push(format!("expected {} objects, found {}", expected.n(), graph.n()));
            } else {
                let id: Vec<usize> = (0..graph.n()).collect();
                let m = graph_equals_expected(graph, &expected, &id).expect("same size");
                if m != GraphMatch::Equal {
                    violations.push(describe(&m, graph.labels()));
                }
            }
            "base graph".into()
        }
    }
}

/// Ground lines lie in the plane along `u`; each copy line crosses the plane
/// on the perpendicular of its own ground line.
fn check_frame_layout(lines: &[Line3], layout: &RecursionLayout, frame: &TransversalFrame, out: &mut Vec<String>) {
    let ground_param = |i: usize| -> Option<crate::rat::Rat> {
        let l = lines.get(i)?;
        (line_plane_meet(l, &frame.plane) == PlaneRelation::Contained && l.dir == frame.u).then(|| frame.param(&l.base))
    };
    let xs: Vec<_> = layout.ground.iter().map(|&i| ground_param(i)).collect();
    for (pos, x) in xs.iter().enumerate() {
        if x.is_none() {
            out.push(format!(
                "ground line {} is not in the frame plane along u",
                layout.ground[pos]
            ));
        }
    }
    for block in &layout.blocks {
        for (&v, &target) in block.members.iter().zip(&block.targets) {
            let want = xs.get(target).cloned().flatten();
            let got = match lines.get(v).map(|l| line_plane_meet(l, &frame.plane)) {
                Some(PlaneRelation::Meet(p)) => Some(frame.param(&p)),
                _ => None,
            };
            if got.is_none() || got != want {
                out.push(format!("copy line {v} does not cross the plane at its ground line"));
            }
        }
    }
}

fn check_shift(sys: &ShiftSystem, graph: &GeoGraph, out: &mut Vec<String>) {
    let mut sorted = sys.s.clone();
    sorted.sort();
    sorted.dedup();
    if sorted != sys.s || sys.s.iter().any(|v| !v.is_positive()) {
        out.push("S is not strictly increasing and positive".into());
        return;
    }
    let n = sys.n();
    let expected_triples = crate::lineworld::index_triples(n);
    if sys.triples != expected_triples || sys.lines.len() != expected_triples.len() {
        out.push("triples are not the increasing triples of S".into());
        return;
    }
    for (t, l) in sys.triples.iter().zip(&sys.lines) {
        let want = shift_line(&sys.s[t[0]], &sys.s[t[1]], &sys.s[t[2]]).expect("increasing");
        if !want.same_set(l) {
            out.push(format!(
                "line ({},{},{}) does not follow the shift formula",
                t[0] + 1,
                t[1] + 1,
                t[2] + 1
            ));
        }
    }
    let expected = double_shift_graph(n);
    let id: Vec<usize> = (0..graph.n()).collect();
    let m = graph_equals_expected(graph, &expected, &id).expect("same size");
    if m != GraphMatch::Equal {
        out.push(describe(&m, graph.labels()));
    }
    for (u, v) in expected.edges() {
        let [a, b, c] = sys.triples[u];
        let d = sys.triples[v][2];
        let p = sys.lines[u].at(&(&sys.s[c] * &sys.s[d]));
        let q = sys.lines[v].at(&(&sys.s[a] * &sys.s[b]));
        if p != q || line_line_relation(&sys.lines[u], &sys.lines[v]) != LineRelation::Meet(p) {
            out.push(format!(
                "{} and {} do not meet at the shift point",
                graph.labels()[u],
                graph.labels()[v]
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxworld::{pair_boxes, realize_odd_cycle_boxes, recursion_step_boxes, StepOptions};
    use crate::gallai::ProviderPolicy;
    use crate::geom::Interval;
    use crate::lineworld::{build_shift_system, pair_lines, recursion_step_lines, LineStepOptions};
    use crate::rat::Rat;

    #[test]
    fn box_scene_round_trip() {
        let fam =
            recursion_step_boxes(&pair_boxes(), 2, 6, &ProviderPolicy::Pigeonhole, StepOptions::default()).unwrap();
        let scene = Scene::from_boxes(&fam, 6, 3);
        let text = scene.to_json();
        assert!(text.contains("\"kind\": \"grounded-box-family\""));
        let back = Scene::from_json(&text).unwrap();
        assert_eq!(back, scene);
        let r = verify_scene(&back, Checks::ALL, 100_000);
        assert!(!r.failed(), "{r:?}");
        assert_eq!(r.girth.unwrap().girth, Some(9));
        assert_eq!(r.chroma.unwrap().chi, Some(3));
    }

    #[test]
    fn corrupted_box_scene_fails_geometry() {
        let fam = realize_odd_cycle_boxes(5).unwrap();
        let mut scene = Scene::from_boxes(&fam, 5, 3);
        if let Scene::GroundedBoxFamily { boxes, .. } = &mut scene {
            // stretch box 1 upward so it reaches the closing box
            boxes[1].z = Interval::ints(0, 16);
        }
        let r = verify_scene(&scene, Checks::ALL, 100_000);
        let geo = r.geometry.unwrap();
        assert!(!geo.ok);
        assert!(geo.violations[0].contains("spurious edge"), "{:?}", geo.violations);
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let fam =
            recursion_step_boxes(&pair_boxes(), 2, 6, &ProviderPolicy::Pigeonhole, StepOptions::default()).unwrap();
        let r = verify_scene(&Scene::from_boxes(&fam, 6, 3), Checks::ALL, 1);
        assert_eq!(r.girth.as_ref().unwrap().girth, Some(9));
        assert_eq!(r.chroma.as_ref().unwrap().status, Check::Inconclusive);
        assert!(r.inconclusive() && !r.failed());
    }

    #[test]
    fn line_and_shift_scenes() {
        let fam = recursion_step_lines(
            &pair_lines(),
            2,
            6,
            &ProviderPolicy::Pigeonhole,
            LineStepOptions::default(),
        )
        .unwrap();
        let scene = Scene::from_lines(&fam, 6, 3);
        let back = Scene::from_json(&scene.to_json()).unwrap();
        assert_eq!(back, scene);
        assert!(!verify_scene(&back, Checks::ALL, 100_000).failed());

        let sys = build_shift_system(5, 1).unwrap();
        let scene = Scene::from_shift(&sys, Some(1));
        let text = scene.to_json();
        assert!(text.contains("\"S\""));
        let back = Scene::from_json(&text).unwrap();
        let r = verify_scene(&back, Checks::ALL, 100_000);
        assert!(!r.failed(), "{r:?}");
        assert_eq!(r.chroma.unwrap().chi, Some(2));
        assert_eq!(r.girth.unwrap().girth, None);

        let mut bad = back.clone();
        if let Scene::ShiftSystem { system, .. } = &mut bad {
            system.s[0] = Rat::zero();
        }
        assert!(verify_scene(&bad, Checks::ALL, 1000).failed());
    }

    #[test]
    fn point_arrays_in_json() {
        let scene = Scene::from_lines(&pair_lines(), 3, 2);
        let v: serde_json::Value = serde_json::from_str(&scene.to_json()).unwrap();
        assert_eq!(v["lines"][1]["base"], serde_json::json!(["0", "0", "0"]));
        assert_eq!(v["lines"][1]["dir"], serde_json::json!(["0", "1", "0"]));
    }
}
