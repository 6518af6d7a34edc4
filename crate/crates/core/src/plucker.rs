//! Integer Plücker coordinates for fast exact line sweeps.
//!
//! A line with direction `d` through `p` has homogeneous coordinates
//! `(d : p × d)`. Clearing denominators and dividing out the content gives a
//! unique primitive integer 6-vector per line, so identical lines compare
//! equal, and two lines are coplanar iff their reciprocal product vanishes.
//! The sweep never allocates when every coordinate fits in 62 bits.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::geom::Line3;

/// Classification without the meeting point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Incidence {
    Identical,
    Meet,
    ParallelDisjoint,
    Skew,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerLine {
    coords: [BigInt; 6],
    small: Option<[i64; 6]>,
}

const SMALL_LIMIT: i64 = 1 << 62;

impl PluckerLine {
    pub fn new(line: &Line3) -> Self {
        let d = line.dir.vector();
        let m = line.base.cross(d);
        let rats = [&d.x, &d.y, &d.z, &m.x, &m.y, &m.z];
        let lcm = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let mut ints: Vec<BigInt> = rats.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
        let content = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        if !content.is_zero() && !content.is_one() {
            for v in ints.iter_mut() {
                *v = &*v / &content;
            }
        }
        // canonical directions have a positive leading coordinate already
        let coords: [BigInt; 6] = ints.try_into().expect("six coordinates");
        let small = coords
            .iter()
            .map(|v| v.to_i64().filter(|x| x.abs() < SMALL_LIMIT))
            .collect::<Option<Vec<_>>>()
            .map(|v| v.try_into().expect("six coordinates"));
        PluckerLine { coords, small }
    }

    pub fn direction(&self) -> &[BigInt] {
        &self.coords[..3]
    }

    pub fn classify(&self, o: &PluckerLine) -> Incidence {
        match (&self.small, &o.small) {
            (Some(a), Some(b)) => classify_small(a, b),
            _ => classify_big(&self.coords, &o.coords),
        }
    }
}

fn classify_small(a: &[i64; 6], b: &[i64; 6]) -> Incidence {
    let w = |x: i64| x as i128;
    let side = w(a[0]) * w(b[3])
        + w(a[1]) * w(b[4])
        + w(a[2]) * w(b[5])
        + w(b[0]) * w(a[3])
        + w(b[1]) * w(a[4])
        + w(b[2]) * w(a[5]);
    if side != 0 {
        return Incidence::Skew;
    }
    let parallel = w(a[1]) * w(b[2]) == w(a[2]) * w(b[1])
        && w(a[2]) * w(b[0]) == w(a[0]) * w(b[2])
        && w(a[0]) * w(b[1]) == w(a[1]) * w(b[0]);
    if !parallel {
        Incidence::Meet
    } else if a == b {
        Incidence::Identical
    } else {
        Incidence::ParallelDisjoint
    }
}

fn classify_big(a: &[BigInt; 6], b: &[BigInt; 6]) -> Incidence {
    let side = &a[0] * &b[3] + &a[1] * &b[4] + &a[2] * &b[5] + &b[0] * &a[3] + &b[1] * &a[4] + &b[2] * &a[5];
    if !side.is_zero() {
        return Incidence::Skew;
    }
    let parallel = &a[1] * &b[2] == &a[2] * &b[1] && &a[2] * &b[0] == &a[0] * &b[2] && &a[0] * &b[1] == &a[1] * &b[0];
    if !parallel {
        Incidence::Meet
    } else if a == b {
        Incidence::Identical
    } else {
        Incidence::ParallelDisjoint
    }
}
