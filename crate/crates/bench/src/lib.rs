//! Benchmarks live in `benches/`. Run them with `cargo bench -p geogirth-bench`.

use geogirth::gallai::{assess_points, normalize_ground_set};
use geogirth::{GallaiCertificate, GroundSet, Rat};

/// Every copy of `t` in the first `len` points of its own normalizing
/// progression. Flags are computed within `budget` and may be failed.
pub fn progression_points(t: &GroundSet, len: i64, k: usize, g: usize, budget: u64) -> GallaiCertificate {
    let norm = normalize_ground_set(t);
    let x = (0..len).map(|i| norm.map.apply(&Rat::from_int(i))).collect();
    assess_points(t, x, k, g, budget).0
}
