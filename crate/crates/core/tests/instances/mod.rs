//! Large recursion-step instances built from the pentagon base with every
//! copy of its traces inside a long progression. The certificates are not
//! Ramsey certificates; these instances only exercise layout and geometry.
#![allow(dead_code)]

use geogirth::boxworld::{assemble_boxes, prepare_parent_boxes, realize_odd_cycle_boxes};
use geogirth::gallai::{assess_points, normalize_ground_set};
use geogirth::lineworld::{assemble_lines, prepare_parent_lines, realize_odd_cycle_lines, DEFAULT_FRAME_BUDGET};
use geogirth::{BoxFamily, GallaiCertificate, GroundSet, LineFamily, Rat};
use num_traits::ToPrimitive;

const ASSESS_BUDGET: u64 = 20_000;

/// Number of objects a step produces for a parent of size `m` whose traces
/// have normalized span `span`, over a progression of `len` points.
pub fn predicted_size(m: usize, span: usize, len: usize) -> usize {
    let copies: usize = (1..).map(|s| span * s).take_while(|&w| w < len).map(|w| len - w).sum();
    len + m * copies
}

/// Smallest progression length whose step output reaches `target` objects.
pub fn length_for(m: usize, span: usize, target: usize) -> usize {
    (span + 1..)
        .find(|&len| predicted_size(m, span, len) >= target)
        .unwrap()
}

fn progression(t: &GroundSet, target: usize, m: usize) -> Vec<Rat> {
    let norm = normalize_ground_set(t);
    let span = norm.span().to_usize().expect("small span");
    let len = length_for(m, span, target);
    (0..len as i64).map(|i| norm.map.apply(&Rat::from_int(i))).collect()
}

pub fn box_stress(target: usize) -> (BoxFamily, BoxFamily, GallaiCertificate) {
    let parent = realize_odd_cycle_boxes(5).unwrap();
    let sorted = prepare_parent_boxes(&parent).unwrap();
    let t = GroundSet::new(sorted.traces()).unwrap();
    let x = progression(&t, target, sorted.len());
    let (cert, _) = assess_points(&t, x, 3, 5, ASSESS_BUDGET);
    let out = assemble_boxes(&sorted, &cert).unwrap();
    (sorted, out, cert)
}

pub fn line_stress(target: usize) -> (LineFamily, LineFamily, GallaiCertificate) {
    let parent = realize_odd_cycle_lines(5).unwrap();
    let (sorted, frame) = prepare_parent_lines(&parent, DEFAULT_FRAME_BUDGET).unwrap();
    let t = GroundSet::new(frame.trace_params(&sorted.lines).unwrap()).unwrap();
    let x = progression(&t, target, sorted.len());
    let (cert, _) = assess_points(&t, x, 3, 5, ASSESS_BUDGET);
    let out = assemble_lines(&sorted, &frame, &cert, 1_000_000).unwrap();
    (sorted, out, cert)
}
