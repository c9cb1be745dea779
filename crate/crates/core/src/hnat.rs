//! Naturals in hereditary base-`B` normal form.
//!
//! `n = Σ c_i · B^{e_i}` with `1 ≤ c_i < B`, strictly decreasing exponents,
//! and every exponent written the same way. Towers like `10^(10^23 + 35)`
//! stay tiny, and addition, comparison and small subtractions are exact.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HNat {
    base: u32,
    /// `(exponent, coefficient)`, exponents strictly decreasing.
    terms: Vec<(HNat, u32)>,
}

/// Most terms a borrow may expand into before `checked_sub_small` gives up.
const BORROW_CAP: u64 = 4096;

impl HNat {
    pub fn zero(base: u32) -> HNat {
        assert!(base >= 2, "base must be at least 2");
        HNat { base, terms: Vec::new() }
    }

    pub fn from_u64(base: u32, n: u64) -> HNat {
        HNat::from_biguint(base, &BigUint::from(n))
    }

    pub fn from_biguint(base: u32, n: &BigUint) -> HNat {
        let mut out = HNat::zero(base);
        for (i, d) in n.to_radix_le(base).into_iter().enumerate() {
            if d != 0 {
                out.terms.push((HNat::from_u64(base, i as u64), d as u32));
            }
        }
        out.terms.reverse();
        out
    }

    /// `B^e`.
    pub fn power(e: &HNat) -> HNat {
        HNat {
            base: e.base,
            terms: vec![(e.clone(), 1)],
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponent of the leading term: the unique `m` with `B^m ≤ n < B^{m+1}`.
    pub fn leading_exponent(&self) -> Option<&HNat> {
        self.terms.first().map(|(e, _)| e)
    }

    /// Nesting depth of the exponent tower.
    pub fn height(&self) -> usize {
        self.terms.iter().map(|(e, _)| 1 + e.height()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &HNat) -> HNat {
        assert_eq!(self.base, other.base, "mixed bases");
        // ascending exponents
        let mut acc: Vec<(HNat, u64)> = Vec::new();
        let (mut a, mut b) = (self.terms.iter().rev().peekable(), other.terms.iter().rev().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => a.next().map(|(e, c)| (e.clone(), *c as u64)),
                (None, Some(_)) => b.next().map(|(e, c)| (e.clone(), *c as u64)),
                (Some((ea, _)), Some((eb, _))) => match ea.cmp(eb) {
                    Ordering::Less => a.next().map(|(e, c)| (e.clone(), *c as u64)),
                    Ordering::Greater => b.next().map(|(e, c)| (e.clone(), *c as u64)),
                    Ordering::Equal => {
                        let (e, ca) = a.next().expect("peeked");
                        let (_, cb) = b.next().expect("peeked");
                        Some((e.clone(), (*ca + *cb) as u64))
                    }
                },
            };
            acc.extend(next);
        }
        let base = self.base as u64;
        let mut i = 0;
        while i < acc.len() {
            if acc[i].1 >= base {
                acc[i].1 -= base;
                let up = acc[i].0.add(&HNat::from_u64(self.base, 1));
                match acc.get_mut(i + 1) {
                    Some(next) if next.0 == up => next.1 += 1,
                    _ => acc.insert(i + 1, (up, 1)),
                }
            }
            i += 1;
        }
        HNat {
            base: self.base,
            terms: acc
                .into_iter()
                .rev()
                .filter(|(_, c)| *c > 0)
                .map(|(e, c)| (e, c as u32))
                .collect(),
        }
    }

    pub fn add_u64(&self, k: u64) -> HNat {
        self.add(&HNat::from_u64(self.base, k))
    }

    /// `self − k`, or `None` when `self < k`.
    pub fn checked_sub_small(&self, k: u64) -> Result<Option<HNat>> {
        let mut cur = self.clone();
        for _ in 0..k {
            match cur.pred()? {
                Some(p) => cur = p,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    fn pred(&self) -> Result<Option<HNat>> {
        let Some((e, c)) = self.terms.last().cloned() else {
            return Ok(None);
        };
        let mut terms = self.terms[..self.terms.len() - 1].to_vec();
        if c > 1 {
            terms.push((e.clone(), c - 1));
        }
        // c·B^e − 1 = (c−1)·B^e + Σ_{i<e} (B−1)·B^i
        let width = e.to_u64().filter(|&w| w <= BORROW_CAP).ok_or(Error::BudgetExceeded {
            what: "borrow expansion",
            needed: u128::MAX,
            cap: BORROW_CAP as u128,
        })?;
        for i in (0..width).rev() {
            terms.push((HNat::from_u64(self.base, i), self.base - 1));
        }
        Ok(Some(HNat { base: self.base, terms }))
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.to_biguint(64).and_then(|v| v.to_u64())
    }

    /// The value, if it has at most `max_bits` bits.
    pub fn to_biguint(&self, max_bits: u64) -> Option<BigUint> {
        let bits_per_digit = (self.base as f64).log2();
        let mut out = BigUint::zero();
        for (e, c) in &self.terms {
            let e = e.to_biguint(64)?.to_u64()?;
            if (e as f64) * bits_per_digit > max_bits as f64 + 1.0 {
                return None;
            }
            out += BigUint::from(*c) * BigUint::from(self.base).pow(u32::try_from(e).ok()?);
        }
        (out.bits() <= max_bits).then_some(out)
    }

    /// Decimal digits when the value has at most `max_bits` bits.
    pub fn decimal(&self, max_bits: u64) -> Option<String> {
        self.to_biguint(max_bits).map(|v| v.to_str_radix(10))
    }
}

impl Ord for HNat {
    fn cmp(&self, other: &HNat) -> Ordering {
        for (x, y) in self.terms.iter().zip(&other.terms) {
            let o = x.0.cmp(&y.0).then(x.1.cmp(&y.1));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for HNat {
    fn partial_cmp(&self, other: &HNat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HNat {
    /// Values below `B^6` print as decimals; larger terms as `c*B^e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.to_u64().filter(|&v| v < (self.base as u64).pow(6)) {
            return write!(f, "{v}");
        }
        let mut small = 0u64;
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            match e.to_u64() {
                Some(k) if k < 6 => small += *c as u64 * (self.base as u64).pow(k as u32),
                _ => {
                    let e = e.to_string();
                    let exp = if e.contains(' ') { format!("({e})") } else { e };
                    let coef = if *c == 1 { String::new() } else { format!("{c}*") };
                    parts.push(format!("{coef}{}^{exp}", self.base));
                }
            }
        }
        if small > 0 {
            parts.push(small.to_string());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_add() {
        for base in [2, 3, 10] {
            for a in [0u64, 1, 9, 10, 11, 99, 12345, 1 << 40] {
                for b in [0u64, 1, 7, 10, 991, 1 << 33] {
                    let s = HNat::from_u64(base, a).add(&HNat::from_u64(base, b));
                    assert_eq!(s.to_u64(), Some(a + b), "{base} {a} {b}");
                    assert_eq!(s, HNat::from_u64(base, a + b));
                }
            }
        }
    }

    #[test]
    fn order_matches_values() {
        let xs: Vec<u64> = (0..200).chain([1000, 1023, 1024, 1025, 99999]).collect();
        for &a in &xs {
            for &b in &xs {
                assert_eq!(HNat::from_u64(2, a).cmp(&HNat::from_u64(2, b)), a.cmp(&b));
            }
        }
    }

    #[test]
    fn small_subtraction() {
        let x = HNat::from_u64(10, 1000);
        assert_eq!(x.checked_sub_small(1).unwrap().unwrap().to_u64(), Some(999));
        assert_eq!(HNat::from_u64(10, 3).checked_sub_small(4).unwrap(), None);
    }

    #[test]
    fn towers() {
        let e = HNat::from_u64(10, 23);
        let big = HNat::power(&e).add_u64(12);
        assert_eq!(big.decimal(128).unwrap(), format!("1{}12", "0".repeat(21)));
        let tower = HNat::power(&big.add_u64(23));
        assert_eq!(tower.to_string(), "10^(10^23 + 35)");
        assert!(tower > big);
        assert_eq!(tower.leading_exponent().unwrap(), &big.add_u64(23));
        assert_eq!(tower.height(), 4);
    }
}
