//! Exact geometric primitives in R³ and the predicates the constructions rely on.
//!
//! Every predicate is decided in exact rational arithmetic. Boxes and intervals
//! are closed, so boundary contact counts as intersection.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GeomError;
use crate::rat::Rat;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[Rat; 3]", into = "[Rat; 3]")]
pub struct Point3 {
    pub x: Rat,
    pub y: Rat,
    pub z: Rat,
}

impl Point3 {
    pub fn new(x: Rat, y: Rat, z: Rat) -> Self {
        Point3 { x, y, z }
    }

    pub fn origin() -> Self {
        Point3::new(Rat::zero(), Rat::zero(), Rat::zero())
    }

    pub fn ints(x: i64, y: i64, z: i64) -> Self {
        Point3::new(x.into(), y.into(), z.into())
    }

    pub fn coords(&self) -> [&Rat; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn add(&self, o: &Point3) -> Point3 {
        Point3::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }

    pub fn sub(&self, o: &Point3) -> Point3 {
        Point3::new(&self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }

    pub fn scale(&self, s: &Rat) -> Point3 {
        Point3::new(&self.x * s, &self.y * s, &self.z * s)
    }

    pub fn dot(&self, o: &Point3) -> Rat {
        &self.x * &o.x + &self.y * &o.y + &self.z * &o.z
    }

    pub fn cross(&self, o: &Point3) -> Point3 {
        Point3::new(
            &self.y * &o.z - &self.z * &o.y,
            &self.z * &o.x - &self.x * &o.z,
            &self.x * &o.y - &self.y * &o.x,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }
}

impl fmt::Debug for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A direction, normalized so its first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Point3", into = "Point3")]
pub struct Dir3(Point3);

impl Dir3 {
    pub fn new(v: Point3) -> Result<Self, GeomError> {
        let lead = [&v.x, &v.y, &v.z]
            .into_iter()
            .find(|c| !c.is_zero())
            .cloned()
            .ok_or(GeomError::ZeroDirection)?;
        let inv = lead.recip();
        Ok(Dir3(v.scale(&inv)))
    }

    pub fn ints(x: i64, y: i64, z: i64) -> Result<Self, GeomError> {
        Dir3::new(Point3::ints(x, y, z))
    }

    pub fn vector(&self) -> &Point3 {
        &self.0
    }
}

impl TryFrom<Point3> for Dir3 {
    type Error = GeomError;
    fn try_from(p: Point3) -> Result<Self, GeomError> {
        Dir3::new(p)
    }
}

impl From<[Rat; 3]> for Point3 {
    fn from([x, y, z]: [Rat; 3]) -> Point3 {
        Point3 { x, y, z }
    }
}

impl From<Point3> for [Rat; 3] {
    fn from(p: Point3) -> [Rat; 3] {
        [p.x, p.y, p.z]
    }
}

impl From<Dir3> for Point3 {
    fn from(d: Dir3) -> Point3 {
        d.0
    }
}

impl fmt::Debug for Dir3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dir{:?}", self.0)
    }
}

/// A non-empty closed interval. The empty interval is represented by `None`
/// wherever an operation can produce it.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[Rat; 2]", into = "[Rat; 2]")]
pub struct Interval {
    lo: Rat,
    hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Self, GeomError> {
        if lo > hi {
            return Err(GeomError::EmptyInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn ints(lo: i64, hi: i64) -> Self {
        Interval::new(lo.into(), hi.into()).expect("lo <= hi")
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rat) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_interval(&self, o: &Interval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn meets(&self, o: &Interval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Closed intersection; `None` is the empty interval.
    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let lo = Rat::max_of(&self.lo, &o.lo);
        let hi = Rat::min_of(&self.hi, &o.hi);
        (lo <= hi).then(|| Interval {
            lo: lo.clone(),
            hi: hi.clone(),
        })
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: Rat::min_of(&self.lo, &o.lo).clone(),
            hi: Rat::max_of(&self.hi, &o.hi).clone(),
        }
    }
}

impl TryFrom<[Rat; 2]> for Interval {
    type Error = GeomError;
    fn try_from([lo, hi]: [Rat; 2]) -> Result<Self, GeomError> {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for [Rat; 2] {
    fn from(i: Interval) -> [Rat; 2] {
        [i.lo, i.hi]
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

pub fn interval_intersect(a: &Interval, b: &Interval) -> Option<Interval> {
    a.intersect(b)
}

/// Closed axis-aligned box.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Box3 {
    pub x: Interval,
    pub y: Interval,
    pub z: Interval,
}

impl Box3 {
    pub fn new(x: Interval, y: Interval, z: Interval) -> Self {
        Box3 { x, y, z }
    }

    pub fn intersects(&self, o: &Box3) -> bool {
        self.x.meets(&o.x) && self.y.meets(&o.y) && self.z.meets(&o.z)
    }
}

impl fmt::Debug for Box3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}x{:?}x{:?}", self.x, self.y, self.z)
    }
}

pub fn box_intersects(a: &Box3, b: &Box3) -> bool {
    a.intersects(b)
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Line3 {
    pub base: Point3,
    pub dir: Dir3,
}

impl Line3 {
    pub fn new(base: Point3, dir: Dir3) -> Self {
        Line3 { base, dir }
    }

    pub fn through(p: &Point3, q: &Point3) -> Result<Self, GeomError> {
        Ok(Line3::new(p.clone(), Dir3::new(q.sub(p))?))
    }

    /// `base + t * dir`.
    pub fn at(&self, t: &Rat) -> Point3 {
        self.base.add(&self.dir.vector().scale(t))
    }

    pub fn contains_point(&self, p: &Point3) -> bool {
        p.sub(&self.base).cross(self.dir.vector()).is_zero()
    }

    /// Set equality: same direction and the bases differ along it.
    pub fn same_set(&self, o: &Line3) -> bool {
        self.dir == o.dir && self.contains_point(&o.base)
    }
}

impl fmt::Debug for Line3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line[{:?} + t{:?}]", self.base, self.dir.vector())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineRelation {
    Identical,
    Meet(Point3),
    ParallelDisjoint,
    Skew,
}

impl LineRelation {
    pub fn is_meet(&self) -> bool {
        matches!(self, LineRelation::Meet(_))
    }
}

pub fn line_line_relation(l1: &Line3, l2: &Line3) -> LineRelation {
    let w = l2.base.sub(&l1.base);
    if l1.dir == l2.dir {
        return if w.cross(l1.dir.vector()).is_zero() {
            LineRelation::Identical
        } else {
            LineRelation::ParallelDisjoint
        };
    }
    let d1 = l1.dir.vector();
    let d2 = l2.dir.vector();
    let n = d1.cross(d2);
    if !w.dot(&n).is_zero() {
        return LineRelation::Skew;
    }
    // base1 + s d1 = base2 + t d2  =>  s = ((w x d2) . n) / |n|^2
    let s = w.cross(d2).dot(&n) / n.dot(&n);
    LineRelation::Meet(l1.at(&s))
}

/// Plane `{ p : normal . p = offset }` with a canonical normal.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plane3 {
    pub normal: Dir3,
    pub offset: Rat,
}

impl Plane3 {
    /// Plane with (not necessarily canonical) normal `n` and offset `c`.
    pub fn new(n: Point3, c: Rat) -> Result<Self, GeomError> {
        let lead = [&n.x, &n.y, &n.z]
            .into_iter()
            .find(|v| !v.is_zero())
            .cloned()
            .ok_or(GeomError::ZeroDirection)?;
        Ok(Plane3 {
            normal: Dir3::new(n)?,
            offset: c / lead,
        })
    }

    pub fn through(normal: Dir3, p: &Point3) -> Self {
        let offset = normal.vector().dot(p);
        Plane3 { normal, offset }
    }

    pub fn contains(&self, p: &Point3) -> bool {
        self.normal.vector().dot(p) == self.offset
    }

    /// Some point of the plane.
    pub fn anchor(&self) -> Point3 {
        let n = self.normal.vector();
        n.scale(&(&self.offset / n.dot(n)))
    }

    /// Two integer-friendly vectors spanning the plane's direction space.
    pub fn basis(&self) -> (Point3, Point3) {
        let n = self.normal.vector();
        let zero = Rat::zero();
        let one = Rat::one();
        // lead coordinate of a canonical normal is 1
        if !n.x.is_zero() {
            (
                Point3::new(-&n.y, one.clone(), zero.clone()),
                Point3::new(-&n.z, zero, one),
            )
        } else if !n.y.is_zero() {
            (
                Point3::new(one.clone(), zero.clone(), zero.clone()),
                Point3::new(zero, -&n.z, one),
            )
        } else {
            (
                Point3::new(one.clone(), zero.clone(), zero.clone()),
                Point3::new(zero, one, Rat::zero()),
            )
        }
    }
}

impl fmt::Debug for Plane3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "plane[{:?} . p = {}]", self.normal.vector(), self.offset)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaneRelation {
    Meet(Point3),
    Contained,
    ParallelDisjoint,
}

pub fn line_plane_meet(l: &Line3, p: &Plane3) -> PlaneRelation {
    let n = p.normal.vector();
    let denom = n.dot(l.dir.vector());
    let gap = &p.offset - n.dot(&l.base);
    if denom.is_zero() {
        if gap.is_zero() {
            PlaneRelation::Contained
        } else {
            PlaneRelation::ParallelDisjoint
        }
    } else {
        PlaneRelation::Meet(l.at(&(gap / denom)))
    }
}

/// Direction inside `plane` perpendicular to `line`.
pub fn perp_in_plane(plane: &Plane3, line: &Line3) -> Result<Dir3, GeomError> {
    if line_plane_meet(line, plane) != PlaneRelation::Contained {
        return Err(GeomError::LineNotInPlane);
    }
    Dir3::new(plane.normal.vector().cross(line.dir.vector()))
}

/// `x -> scale * x + shift` with `scale > 0`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Homothety1D {
    pub scale: Rat,
    pub shift: Rat,
}

impl Homothety1D {
    pub fn new(scale: Rat, shift: Rat) -> Result<Self, GeomError> {
        if !scale.is_positive() {
            return Err(GeomError::NonPositiveScale(scale));
        }
        Ok(Homothety1D { scale, shift })
    }

    pub fn identity() -> Self {
        Homothety1D {
            scale: Rat::one(),
            shift: Rat::zero(),
        }
    }

    /// The map sending `[a_lo, a_hi]` onto `[b_lo, b_hi]`; needs `a_lo < a_hi`, `b_lo < b_hi`.
    pub fn between(a_lo: &Rat, a_hi: &Rat, b_lo: &Rat, b_hi: &Rat) -> Result<Self, GeomError> {
        let scale = (b_hi - b_lo) / (a_hi - a_lo);
        let shift = b_lo - &scale * a_lo;
        Homothety1D::new(scale, shift)
    }

    pub fn apply(&self, v: &Rat) -> Rat {
        &self.scale * v + &self.shift
    }

    pub fn apply_interval(&self, i: &Interval) -> Interval {
        Interval {
            lo: self.apply(&i.lo),
            hi: self.apply(&i.hi),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Homothety1D) -> Homothety1D {
        Homothety1D {
            scale: &self.scale * &inner.scale,
            shift: self.apply(&inner.shift),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.scale == 1 && self.shift.is_zero()
    }

    /// Fixed point, when the map is not a pure translation.
    pub fn fixed_point(&self) -> Option<Rat> {
        (self.scale != 1).then(|| &self.shift / (Rat::one() - &self.scale))
    }
}

impl fmt::Debug for Homothety1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x -> {}x + {}", self.scale, self.shift)
    }
}

/// `p -> scale * p + shift` in R³.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homothety3D {
    pub scale: Rat,
    pub shift: Point3,
}

impl Homothety3D {
    pub fn new(scale: Rat, shift: Point3) -> Result<Self, GeomError> {
        if !scale.is_positive() {
            return Err(GeomError::NonPositiveScale(scale));
        }
        Ok(Homothety3D { scale, shift })
    }

    pub fn translation(v: Point3) -> Self {
        Homothety3D {
            scale: Rat::one(),
            shift: v,
        }
    }

    /// Scaling by `scale` about `center`.
    pub fn about(center: &Point3, scale: Rat) -> Result<Self, GeomError> {
        let shift = center.sub(&center.scale(&scale));
        Homothety3D::new(scale, shift)
    }

    pub fn apply_point(&self, p: &Point3) -> Point3 {
        p.scale(&self.scale).add(&self.shift)
    }

    pub fn apply_line(&self, l: &Line3) -> Line3 {
        Line3::new(self.apply_point(&l.base), l.dir.clone())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Homothety3D) -> Homothety3D {
        Homothety3D {
            scale: &self.scale * &inner.scale,
            shift: self.apply_point(&inner.shift),
        }
    }
}

/// `(x, y, z) -> (f(x), f(y), g(z))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisMap3 {
    pub horizontal: Homothety1D,
    pub vertical: Homothety1D,
}

impl AxisMap3 {
    pub fn new(horizontal: Homothety1D, vertical: Homothety1D) -> Self {
        AxisMap3 { horizontal, vertical }
    }

    pub fn apply_point(&self, p: &Point3) -> Point3 {
        Point3::new(
            self.horizontal.apply(&p.x),
            self.horizontal.apply(&p.y),
            self.vertical.apply(&p.z),
        )
    }

    pub fn apply_box(&self, b: &Box3) -> Box3 {
        Box3::new(
            self.horizontal.apply_interval(&b.x),
            self.horizontal.apply_interval(&b.y),
            self.vertical.apply_interval(&b.z),
        )
    }
}

/// Uniform access to the homothety family: `map.apply(&object)`.
pub trait Apply<T> {
    fn apply_to(&self, obj: &T) -> T;
}

impl Apply<Rat> for Homothety1D {
    fn apply_to(&self, v: &Rat) -> Rat {
        self.apply(v)
    }
}

impl Apply<Interval> for Homothety1D {
    fn apply_to(&self, i: &Interval) -> Interval {
        self.apply_interval(i)
    }
}

impl Apply<Point3> for Homothety3D {
    fn apply_to(&self, p: &Point3) -> Point3 {
        self.apply_point(p)
    }
}

impl Apply<Line3> for Homothety3D {
    fn apply_to(&self, l: &Line3) -> Line3 {
        self.apply_line(l)
    }
}

impl Apply<Point3> for AxisMap3 {
    fn apply_to(&self, p: &Point3) -> Point3 {
        self.apply_point(p)
    }
}

impl Apply<Box3> for AxisMap3 {
    fn apply_to(&self, b: &Box3) -> Box3 {
        self.apply_box(b)
    }
}

pub fn apply_homothety<M: Apply<T>, T>(map: &M, obj: &T) -> T {
    map.apply_to(obj)
}
