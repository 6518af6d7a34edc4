//! Exact rational scalars.
//!
//! [`Rat`] wraps an arbitrary-precision fraction that is always kept in lowest
//! terms with a positive denominator. It serializes as the string `"p/q"`, or
//! `"p"` when the denominator is one.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseRatError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`, reduced. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num, den))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Rat {
        Rat(self.0.recip())
    }

    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// The integer value, if this is an integer that fits in an `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn min_of<'a>(a: &'a Rat, b: &'a Rat) -> &'a Rat {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max_of<'a>(a: &'a Rat, b: &'a Rat) -> &'a Rat {
        if a >= b {
            a
        } else {
            b
        }
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

/// Greatest common divisor of a list of non-zero rationals, i.e. the largest
/// positive rational `r` such that every input is an integer multiple of `r`.
pub fn rational_gcd<'a>(values: impl IntoIterator<Item = &'a Rat>) -> Option<Rat> {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    let mut any = false;
    for v in values {
        if v.is_zero() {
            continue;
        }
        any = true;
        // gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d), reduced afterwards
        let a = v.numer().abs();
        let b = v.denom().clone();
        if num.is_zero() {
            num = a;
            den = b;
        } else {
            let g = (&num * &b).gcd(&(&a * &den));
            let d = &den * &b;
            let r = BigRational::new(g, d);
            num = r.numer().clone();
            den = r.denom().clone();
        }
    }
    any.then(|| Rat::from_big(num, den))
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = ParseRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ParseRatError(s.to_string());
        match s.split_once('/') {
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Rat::from_bigint(n))
            }
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Rat::from_big(p, q))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat(r)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl PartialEq<i64> for Rat {
    fn eq(&self, other: &i64) -> bool {
        self.0.is_integer() && self.0.numer() == &BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rat {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}

/// Shorthand for building rationals in tests and tables: `rat(3)`, `rat((1, 2))`.
pub fn rat<T: IntoRat>(v: T) -> Rat {
    v.into_rat()
}

pub trait IntoRat {
    fn into_rat(self) -> Rat;
}

impl IntoRat for i64 {
    fn into_rat(self) -> Rat {
        Rat::from_int(self)
    }
}

impl IntoRat for i32 {
    fn into_rat(self) -> Rat {
        Rat::from_int(self as i64)
    }
}

impl IntoRat for (i64, i64) {
    fn into_rat(self) -> Rat {
        Rat::new(self.0, self.1)
    }
}

impl IntoRat for Rat {
    fn into_rat(self) -> Rat {
        self
    }
}

impl IntoRat for &Rat {
    fn into_rat(self) -> Rat {
        self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_on_construction() {
        let r = Rat::new(6, -4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("7".parse::<Rat>().unwrap(), rat(7));
        assert_eq!("-10/4".parse::<Rat>().unwrap(), rat((-5, 2)));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
        assert_eq!(rat((4, 2)).to_string(), "2");
    }

    #[test]
    fn serde_string_form() {
        let v = vec![rat((1, 3)), rat(-2)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["1/3","-2"]"#);
        let back: Vec<Rat> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn gcd_of_rationals() {
        let vals = [rat(15), rat(30), rat(45)];
        assert_eq!(rational_gcd(vals.iter()), Some(rat(15)));
        let vals = [rat((1, 2)), rat((1, 3))];
        assert_eq!(rational_gcd(vals.iter()), Some(rat((1, 6))));
        assert_eq!(rational_gcd([rat(0)].iter()), None);
    }
}
