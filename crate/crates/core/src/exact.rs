//! Exact rational arithmetic for circle and torus coordinates, plus
//! directed rounding to `f64` so that reported bounds stay certified.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, written as `"p/q"` in configs and reports.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn new(num: i64, den: i64) -> Rat {
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    /// `2^{-k}`.
    pub fn dyadic(k: u32) -> Rat {
        Rat(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Result<Rat> {
        BigRational::from_float(x)
            .map(Rat)
            .ok_or_else(|| Error::InvalidParameter(format!("non-finite number {x}")))
    }

    /// Reduction modulo 1 into `[0, 1)`.
    pub fn frac(&self) -> Rat {
        let floor = self.0.floor();
        Rat(&self.0 - floor)
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_in_unit_interval(&self) -> bool {
        !self.0.is_negative() && self.0 < BigRational::one()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    /// Largest `f64` not exceeding the value.
    pub fn down(&self) -> f64 {
        let f = self.0.to_f64().unwrap_or(f64::NAN);
        match BigRational::from_float(f) {
            Some(back) if back > self.0 => f.next_down(),
            _ => f,
        }
    }

    /// Smallest `f64` not below the value.
    pub fn up(&self) -> f64 {
        let f = self.0.to_f64().unwrap_or(f64::NAN);
        match BigRational::from_float(f) {
            Some(back) if back < self.0 => f.next_up(),
            _ => f,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Index `k` of the dyadic interval `[k/2^r, (k+1)/2^r)` containing the value.
    pub fn dyadic_index(&self, resolution: u32) -> BigInt {
        let scaled = &self.0 * BigRational::from_integer(BigInt::one() << resolution);
        scaled.floor().to_integer()
    }
}

/// Circle metric on `R/Z`.
pub fn circle_distance(a: &Rat, b: &Rat) -> Rat {
    let diff = Rat(&a.0 - &b.0).frac();
    let other = Rat(BigRational::one() - &diff.0);
    if diff <= other {
        diff
    } else {
        other
    }
}

impl std::ops::Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        Rat(&self.0 - &rhs.0)
    }
}

impl std::ops::Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

impl std::ops::Mul<u64> for &Rat {
    type Output = Rat;
    fn mul(self, rhs: u64) -> Rat {
        Rat(&self.0 * BigRational::from_integer(BigInt::from(rhs)))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rat> {
        let s = s.trim();
        let parse = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad rational `{s}`")))
        };
        match s.split_once('/') {
            Some((p, q)) => {
                let den = parse(q)?;
                if den.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in `{s}`")));
                }
                Ok(Rat(BigRational::new(parse(p)?, den)))
            }
            None => Ok(Rat(BigRational::from_integer(parse(s)?))),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rat::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// `n (n - 1) / 2` as an exact integer.
pub fn triangular(n: u64) -> BigInt {
    let n = BigInt::from(n);
    let m: BigInt = &n - 1;
    (n * m).div_floor(&BigInt::from(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_wraparound() {
        let a: Rat = "1/10".parse().unwrap();
        let b: Rat = "9/10".parse().unwrap();
        assert_eq!(circle_distance(&a, &b), Rat::new(1, 5));
        assert_eq!(circle_distance(&a, &b).to_f64(), 0.2);
    }

    #[test]
    fn directed_rounding_brackets_value() {
        let third = Rat::new(1, 3);
        assert!(third.down() < third.up());
        assert!(Rat::from_f64(third.down()).unwrap() <= third);
        assert!(Rat::from_f64(third.up()).unwrap() >= third);
        let eighth = Rat::new(1, 8);
        assert_eq!(eighth.down(), 0.125);
        assert_eq!(eighth.up(), 0.125);
    }

    #[test]
    fn parse_and_display() {
        let r: Rat = "610/987".parse().unwrap();
        assert_eq!(r.to_string(), "610/987");
        assert_eq!("4/8".parse::<Rat>().unwrap().to_string(), "1/2");
        assert!("1/0".parse::<Rat>().is_err());
        assert_eq!(Rat::new(-1, 4).frac(), Rat::new(3, 4));
    }
}
