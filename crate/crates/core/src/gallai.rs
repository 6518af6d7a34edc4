//! Finite Gallai-type sets: a set `X` of reals such that every k-colouring of
//! `X` has a monochromatic homothetic copy of a ground set `T`, while few
//! copies of `T` inside `X` ever form a cycle.
//!
//! Certificates are produced by pluggable providers and checked by an
//! exhaustive verifier. Nothing here trusts a provider: every flag on a
//! certificate comes from [`verify_certificate`].

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::BudgetExhausted;
use crate::geom::Homothety1D;
use crate::graph::{shortest_cycle, GeoGraph};
use crate::rat::{rational_gcd, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GallaiError {
    #[error("ground set needs at least two distinct points, got {0}")]
    GroundSetTooSmall(usize),
    #[error("ground set is not strictly increasing")]
    GroundSetUnsorted,
    #[error("pigeonhole provider needs a two-point ground set, got {0} points")]
    NotAPair(usize),
    #[error("refused: girth parameter {g} needs a sparse certificate this provider cannot give")]
    RefusedGirth { g: usize },
    #[error("no built-in Van der Waerden value W({colors}, {length}) and no length hint")]
    NoTableEntry { colors: usize, length: usize },
    #[error("candidate set is not a certificate: {0}")]
    NotACertificate(String),
    #[error(transparent)]
    Budget(#[from] BudgetExhausted),
}

/// Sorted distinct reals, at least two of them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rat>", into = "Vec<Rat>")]
pub struct GroundSet(Vec<Rat>);

impl GroundSet {
    pub fn new(points: Vec<Rat>) -> Result<Self, GallaiError> {
        if points.len() < 2 {
            return Err(GallaiError::GroundSetTooSmall(points.len()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GallaiError::GroundSetUnsorted);
        }
        Ok(GroundSet(points))
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut points: Vec<Rat>) -> Result<Self, GallaiError> {
        points.sort();
        points.dedup();
        GroundSet::new(points)
    }

    pub fn ints(v: &[i64]) -> Result<Self, GallaiError> {
        GroundSet::from_unsorted(v.iter().map(|&x| Rat::from_int(x)).collect())
    }

    pub fn points(&self) -> &[Rat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<Rat>> for GroundSet {
    type Error = GallaiError;
    fn try_from(v: Vec<Rat>) -> Result<Self, GallaiError> {
        GroundSet::new(v)
    }
}

impl From<GroundSet> for Vec<Rat> {
    fn from(t: GroundSet) -> Vec<Rat> {
        t.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedGroundSet {
    /// Starts at 0, consecutive differences have gcd 1.
    pub integers: Vec<BigInt>,
    /// Sends `integers` onto the original ground set.
    pub map: Homothety1D,
}

impl NormalizedGroundSet {
    /// Largest integer, i.e. the length of the shortest progression holding the set, minus one.
    pub fn span(&self) -> &BigInt {
        self.integers.last().expect("non-empty")
    }
}

pub fn normalize_ground_set(t: &GroundSet) -> NormalizedGroundSet {
    let pts = t.points();
    let min = pts[0].clone();
    let diffs: Vec<Rat> = pts.iter().map(|p| p - &min).collect();
    let unit = rational_gcd(diffs.iter()).expect("two distinct points");
    let integers = diffs
        .iter()
        .map(|d| {
            let q = d / &unit;
            debug_assert!(q.is_integer());
            q.numer().clone()
        })
        .collect();
    NormalizedGroundSet {
        integers,
        map: Homothety1D::new(unit, min).expect("gcd is positive"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomotheticCopy {
    pub map: Homothety1D,
    pub image: Vec<Rat>,
}

/// Every homothetic copy of `t` inside the sorted set `x`, ordered by image.
pub fn enumerate_copies(t: &GroundSet, x: &[Rat]) -> Vec<HomotheticCopy> {
    let pts = t.points();
    let base_gap = &pts[1] - &pts[0];
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, xi) in x.iter().enumerate() {
        for xj in &x[i + 1..] {
            let scale = (xj - xi) / &base_gap;
            let shift = xi - &scale * &pts[0];
            let map = Homothety1D::new(scale, shift).expect("sorted input gives positive scale");
            let image: Vec<Rat> = pts.iter().map(|p| map.apply(p)).collect();
            if image.iter().all(|v| x.binary_search(v).is_ok()) && seen.insert(image.clone()) {
                out.push(HomotheticCopy { map, image });
            }
        }
    }
    out
}

/// Distinct copies `copies[i]` and elements with `elements[i]` in both
/// `copies[i]` and `copies[i + 1]` (cyclically).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyCycleWitness {
    pub copies: Vec<HomotheticCopy>,
    pub elements: Vec<Rat>,
}

impl CopyCycleWitness {
    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    /// Checks the witness against the definition of a cycle of sets.
    pub fn is_valid(&self) -> bool {
        let n = self.copies.len();
        if n < 2 || self.elements.len() != n {
            return false;
        }
        let distinct_copies: BTreeSet<_> = self.copies.iter().map(|c| &c.image).collect();
        let distinct_elems: BTreeSet<_> = self.elements.iter().collect();
        distinct_copies.len() == n
            && distinct_elems.len() == n
            && (0..n).all(|i| {
                let e = &self.elements[i];
                self.copies[i].image.contains(e) && self.copies[(i + 1) % n].image.contains(e)
            })
    }
}

/// Finds a cycle formed by at most `max_len` distinct copies, if one exists.
///
/// Such cycles are exactly the cycles of the copy/element incidence graph, of
/// twice the length, so the search is a shortest-cycle scan of that graph.
pub fn short_copy_cycle_exists(copies: &[HomotheticCopy], max_len: usize) -> Option<CopyCycleWitness> {
    if max_len < 2 || copies.len() < 2 {
        return None;
    }
    let elements: Vec<Rat> = copies
        .iter()
        .flat_map(|c| c.image.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let nc = copies.len();
    let mut g = GeoGraph::unlabeled(nc + elements.len());
    for (i, c) in copies.iter().enumerate() {
        for e in &c.image {
            let j = elements.binary_search(e).expect("collected above");
            g.add_edge(i, nc + j);
        }
    }
    let cycle = shortest_cycle(&g)?;
    if cycle.len() > 2 * max_len {
        return None;
    }
    let start = cycle.iter().position(|&v| v < nc).expect("bipartite cycle");
    let rotated: Vec<usize> = cycle[start..].iter().chain(&cycle[..start]).copied().collect();
    let witness = CopyCycleWitness {
        copies: rotated.iter().step_by(2).map(|&v| copies[v].clone()).collect(),
        elements: rotated
            .iter()
            .skip(1)
            .step_by(2)
            .map(|&v| elements[v - nc].clone())
            .collect(),
    };
    debug_assert!(witness.is_valid());
    Some(witness)
}

/// Result of a colouring refutation search over `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringSearch {
    /// Every colouring has a monochromatic copy.
    Refuted { nodes: u64 },
    /// The lexicographically least colouring (colour per element of `X`) with no monochromatic copy.
    Avoiding { coloring: Vec<usize>, nodes: u64 },
}

/// Backtracking over `X` in sorted order, checking each copy as soon as its
/// largest element is coloured. The first element always gets colour 0 and a
/// fresh colour is only ever the next unused one.
///
/// `copies` are index sets into `X` (each sorted ascending).
pub fn refute_colorings(
    n: usize,
    copies: &[Vec<usize>],
    k: usize,
    budget: u64,
) -> Result<ColoringSearch, BudgetExhausted> {
    let mut by_last: Vec<Vec<&[usize]>> = vec![Vec::new(); n];
    for c in copies {
        if let Some((&last, rest)) = c.split_last() {
            by_last[last].push(rest);
        }
    }
    let mut colors = vec![0usize; n];
    let mut nodes = 0u64;

    fn go(
        i: usize,
        used: usize,
        k: usize,
        by_last: &[Vec<&[usize]>],
        colors: &mut [usize],
        nodes: &mut u64,
        budget: u64,
    ) -> Result<bool, BudgetExhausted> {
        if i == colors.len() {
            return Ok(true);
        }
        for c in 0..(used + 1).min(k) {
            *nodes += 1;
            if *nodes > budget {
                return Err(BudgetExhausted { budget });
            }
            let mono = by_last[i].iter().any(|rest| rest.iter().all(|&j| colors[j] == c));
            if mono {
                continue;
            }
            colors[i] = c;
            if go(i + 1, used.max(c + 1), k, by_last, colors, nodes, budget)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    if n == 0 {
        return Ok(ColoringSearch::Avoiding {
            coloring: Vec::new(),
            nodes: 0,
        });
    }
    if go(0, 0, k, &by_last, &mut colors, &mut nodes, budget)? {
        Ok(ColoringSearch::Avoiding {
            coloring: colors,
            nodes,
        })
    } else {
        Ok(ColoringSearch::Refuted { nodes })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Passed,
    Failed,
    Inconclusive,
}

impl Check {
    pub fn from_bool(b: bool) -> Check {
        if b {
            Check::Passed
        } else {
            Check::Failed
        }
    }

    pub fn passed(self) -> bool {
        self == Check::Passed
    }
}

/// Where the colouring property of a certificate comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColoringBasis {
    /// Established by exhaustive refutation search.
    Search,
    /// Not re-derived within budget; rests on a built-in Van der Waerden value.
    Table,
    /// Not re-derived within budget; rests on a caller-supplied length.
    Hint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFlags {
    pub coloring: Check,
    pub sparsity: Check,
    pub copies_complete: Check,
    pub coloring_basis: ColoringBasis,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GallaiCertificate {
    #[serde(rename = "T")]
    pub ground: GroundSet,
    #[serde(rename = "X")]
    pub points: Vec<Rat>,
    pub copies: Vec<HomotheticCopy>,
    pub k: usize,
    pub g: usize,
    pub flags: CertificateFlags,
}

impl GallaiCertificate {
    /// Copies may form no cycle of at most this many sets.
    pub fn cycle_bound(&self) -> usize {
        self.g / 3
    }

    /// Usable by a construction: nothing failed, only the colouring may be inconclusive.
    pub fn is_usable(&self) -> bool {
        self.flags.sparsity.passed() && self.flags.copies_complete.passed() && self.flags.coloring != Check::Failed
    }

    pub fn fully_verified(&self) -> bool {
        self.flags.coloring.passed() && self.is_usable()
    }

    /// Positions in `X` of each copy's image.
    pub fn copy_indices(&self) -> Vec<Vec<usize>> {
        index_copies(&self.points, &self.copies)
    }
}

fn index_copies(x: &[Rat], copies: &[HomotheticCopy]) -> Vec<Vec<usize>> {
    copies
        .iter()
        .map(|c| c.image.iter().filter_map(|v| x.binary_search(v).ok()).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub coloring: Check,
    pub sparsity: Check,
    pub copies_complete: Check,
    /// Colour of each element of `X` in the least colouring that avoids a monochromatic copy.
    pub counterexample: Option<Vec<usize>>,
    pub cycle: Option<CopyCycleWitness>,
    pub nodes: u64,
}

impl CertificateReport {
    pub fn all_passed(&self) -> bool {
        self.coloring.passed() && self.sparsity.passed() && self.copies_complete.passed()
    }
}

/// Recomputes every certificate property from `T`, `X`, `k` and `g` alone.
///
/// The colouring and sparsity checks run over the true copy set of `T` in `X`;
/// the stored copy list is only compared against it.
pub fn verify_certificate(cert: &GallaiCertificate, budget: u64) -> CertificateReport {
    let sorted = cert.points.windows(2).all(|w| w[0] < w[1]);
    let truth = if sorted {
        enumerate_copies(&cert.ground, &cert.points)
    } else {
        Vec::new()
    };
    let stored_ok = sorted
        && cert.copies.len() == truth.len()
        && cert.copies.iter().zip(&truth).all(|(c, t)| {
            c.image == t.image
                && cert
                    .ground
                    .points()
                    .iter()
                    .map(|p| c.map.apply(p))
                    .eq(c.image.iter().cloned())
        });
    let cycle = short_copy_cycle_exists(&truth, cert.cycle_bound());
    let (coloring, counterexample, nodes) = if !sorted {
        (Check::Failed, None, 0)
    } else {
        match refute_colorings(cert.points.len(), &index_copies(&cert.points, &truth), cert.k, budget) {
            Ok(ColoringSearch::Refuted { nodes }) => (Check::Passed, None, nodes),
            Ok(ColoringSearch::Avoiding { coloring, nodes }) => (Check::Failed, Some(coloring), nodes),
            Err(_) => (Check::Inconclusive, None, budget),
        }
    };
    CertificateReport {
        coloring,
        sparsity: Check::from_bool(sorted && cycle.is_none()),
        copies_complete: Check::from_bool(stored_ok),
        counterexample,
        cycle,
        nodes,
    }
}

/// Default node budget for verifying certificates inside providers.
pub const DEFAULT_VERIFY_BUDGET: u64 = 50_000_000;

/// Something that can hand out certificates for a ground set.
pub trait GallaiProvider {
    fn certificate(&self, t: &GroundSet, k: usize, g: usize) -> Result<GallaiCertificate, GallaiError>;
}

/// `X` with every copy of `t` inside it, flagged by what a fresh
/// verification within `budget` establishes. Never refuses.
pub fn assess_points(
    t: &GroundSet,
    points: Vec<Rat>,
    k: usize,
    g: usize,
    budget: u64,
) -> (GallaiCertificate, CertificateReport) {
    let copies = enumerate_copies(t, &points);
    let mut cert = GallaiCertificate {
        ground: t.clone(),
        points,
        copies,
        k,
        g,
        flags: CertificateFlags {
            coloring: Check::Inconclusive,
            sparsity: Check::Inconclusive,
            copies_complete: Check::Inconclusive,
            coloring_basis: ColoringBasis::Search,
        },
    };
    let report = verify_certificate(&cert, budget);
    cert.flags = CertificateFlags {
        coloring: report.coloring,
        sparsity: report.sparsity,
        copies_complete: report.copies_complete,
        coloring_basis: ColoringBasis::Search,
    };
    (cert, report)
}

fn finish(
    ground: &GroundSet,
    points: Vec<Rat>,
    k: usize,
    g: usize,
    verify_budget: u64,
    basis_if_inconclusive: ColoringBasis,
) -> Result<GallaiCertificate, GallaiError> {
    let (mut cert, report) = assess_points(ground, points, k, g, verify_budget);
    if let Some(c) = &report.cycle {
        return Err(GallaiError::NotACertificate(format!(
            "{} copies form a cycle, bound is {}",
            c.len(),
            cert.cycle_bound()
        )));
    }
    if report.coloring == Check::Failed {
        return Err(GallaiError::NotACertificate(format!(
            "{} points admit a {k}-colouring with no monochromatic copy",
            cert.points.len()
        )));
    }
    if report.coloring == Check::Inconclusive {
        cert.flags.coloring_basis = basis_if_inconclusive;
    }
    Ok(cert)
}

/// `X = {1, ..., k + 1}` for a two-point ground set: some pair is monochromatic.
pub fn provider_pigeonhole(t: &GroundSet, k: usize, g: usize) -> Result<GallaiCertificate, GallaiError> {
    if t.len() != 2 {
        return Err(GallaiError::NotAPair(t.len()));
    }
    // any three points give three pair-copies forming a 3-cycle
    if g >= 9 {
        return Err(GallaiError::RefusedGirth { g });
    }
    let points = (1..=k as i64 + 1).map(Rat::from_int).collect();
    finish(t, points, k, g, DEFAULT_VERIFY_BUDGET, ColoringBasis::Search)
}

/// Van der Waerden numbers `W(colors, length)` that the refutation search in
/// this module reproduces.
pub fn vdw_table(colors: usize, length: usize) -> Option<usize> {
    match (colors, length) {
        (0, _) => None,
        (1, m) => Some(m),
        (_, 1) => Some(1),
        (c, 2) => Some(c + 1),
        (2, 3) => Some(9),
        (3, 3) => Some(27),
        _ => None,
    }
}

/// `X = {1, ..., N}` with `N` a Van der Waerden number for progressions long
/// enough to hold the normalized ground set.
pub fn provider_vdw(
    t: &GroundSet,
    k: usize,
    g: usize,
    length_hint: Option<usize>,
    verify_budget: u64,
) -> Result<GallaiCertificate, GallaiError> {
    if g >= 9 {
        return Err(GallaiError::RefusedGirth { g });
    }
    let norm = normalize_ground_set(t);
    let length = usize::try_from(norm.span() + 1).unwrap_or(usize::MAX);
    let (n, basis) = match length_hint {
        Some(n) => (n, ColoringBasis::Hint),
        None => (
            vdw_table(k, length).ok_or(GallaiError::NoTableEntry { colors: k, length })?,
            ColoringBasis::Table,
        ),
    };
    let points = (1..=n as i64).map(Rat::from_int).collect();
    finish(t, points, k, g, verify_budget, basis)
}

/// Searches subsets of `{1, ..., N}` for growing `N`. Sparsity violations
/// prune a branch as soon as they appear, since every superset inherits them.
pub fn provider_search(t: &GroundSet, k: usize, g: usize, budget: u64) -> Result<GallaiCertificate, GallaiError> {
    let norm = normalize_ground_set(t);
    let pattern: Vec<i64> = norm
        .integers
        .iter()
        .map(|v| i64::try_from(v).map_err(|_| GallaiError::NotACertificate("ground set span too large".into())))
        .collect::<Result<_, _>>()?;
    let mut search = SubsetSearch {
        pattern,
        k,
        max_cycle: g / 3,
        budget,
        spent: 0,
    };
    for n in 1.. {
        if let Some(x) = search.with_max(n)? {
            let points: Vec<Rat> = x.iter().map(|&v| Rat::from_int(v)).collect();
            let remaining = budget.saturating_sub(search.spent).max(1);
            let cert = finish(t, points, k, g, remaining, ColoringBasis::Search)?;
            if cert.fully_verified() {
                return Ok(cert);
            }
            return Err(BudgetExhausted { budget }.into());
        }
    }
    unreachable!()
}

struct SubsetSearch {
    pattern: Vec<i64>,
    k: usize,
    max_cycle: usize,
    budget: u64,
    spent: u64,
}

impl SubsetSearch {
    fn tick(&mut self, n: u64) -> Result<(), BudgetExhausted> {
        self.spent += n;
        if self.spent > self.budget {
            Err(BudgetExhausted { budget: self.budget })
        } else {
            Ok(())
        }
    }

    /// Integer copies of the pattern inside `set` (sorted).
    fn copies(&self, set: &[i64]) -> Vec<Vec<usize>> {
        let span = *self.pattern.last().expect("non-empty");
        let mut out = Vec::new();
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                if (b - a) % span != 0 {
                    continue;
                }
                let d = (b - a) / span;
                let idx: Option<Vec<usize>> = self
                    .pattern
                    .iter()
                    .map(|p| set.binary_search(&(a + d * p)).ok())
                    .collect();
                if let Some(idx) = idx {
                    out.push(idx);
                }
            }
        }
        out
    }

    fn sparse(&self, set: &[i64]) -> bool {
        if self.max_cycle < 2 {
            return true;
        }
        let copies: Vec<HomotheticCopy> = self
            .copies(set)
            .into_iter()
            .map(|idx| HomotheticCopy {
                map: Homothety1D::identity(),
                image: idx.iter().map(|&i| Rat::from_int(set[i])).collect(),
            })
            .collect();
        short_copy_cycle_exists(&copies, self.max_cycle).is_none()
    }

    /// A valid set with minimum 1 and maximum `n`, if any.
    fn with_max(&mut self, n: i64) -> Result<Option<Vec<i64>>, BudgetExhausted> {
        if n < self.pattern.len() as i64 {
            return Ok(None);
        }
        let mut set = vec![1];
        self.extend(&mut set, 2, n)
    }

    fn extend(&mut self, set: &mut Vec<i64>, next: i64, n: i64) -> Result<Option<Vec<i64>>, BudgetExhausted> {
        self.tick(1)?;
        if next == n {
            set.push(n);
            let found = self.accept(set)?;
            let out = found.then(|| set.clone());
            set.pop();
            return Ok(out);
        }
        set.push(next);
        if self.sparse(set) {
            if let Some(x) = self.extend(set, next + 1, n)? {
                return Ok(Some(x));
            }
        }
        set.pop();
        self.extend(set, next + 1, n)
    }

    fn accept(&mut self, set: &[i64]) -> Result<bool, BudgetExhausted> {
        if set.len() < self.pattern.len() || !self.sparse(set) {
            return Ok(false);
        }
        let copies = self.copies(set);
        if copies.is_empty() {
            return Ok(false);
        }
        let remaining = self.budget.saturating_sub(self.spent);
        match refute_colorings(set.len(), &copies, self.k, remaining) {
            Ok(ColoringSearch::Refuted { nodes }) => {
                self.tick(nodes)?;
                Ok(true)
            }
            Ok(ColoringSearch::Avoiding { nodes, .. }) => {
                self.tick(nodes)?;
                Ok(false)
            }
            Err(_) => Err(BudgetExhausted { budget: self.budget }),
        }
    }
}

/// Provider selection as exposed to constructions and the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProviderPolicy {
    Pigeonhole,
    Vdw {
        length_hint: Option<usize>,
        verify_budget: u64,
    },
    Search {
        budget: u64,
    },
}

impl GallaiProvider for ProviderPolicy {
    fn certificate(&self, t: &GroundSet, k: usize, g: usize) -> Result<GallaiCertificate, GallaiError> {
        match self {
            ProviderPolicy::Pigeonhole => provider_pigeonhole(t, k, g),
            ProviderPolicy::Vdw {
                length_hint,
                verify_budget,
            } => provider_vdw(t, k, g, *length_hint, *verify_budget),
            ProviderPolicy::Search { budget } => provider_search(t, k, g, *budget),
        }
    }
}
