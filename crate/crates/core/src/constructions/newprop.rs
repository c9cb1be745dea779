//! The newprop point `x = W 0^{a_1} W 0^{a_2} W …` in `Λ_P` for
//! `P = {B^m + s : m ≥ 1, 1 ≤ s ≤ m}`, with `W = 1 0^10 1`.
//!
//! Indexing: `b_0 = 11` is the last position of the first `W`,
//! `a_n = B^{b_{n-1} + 12}`, the `n`-th later copy of `W` starts at
//! `V(n) = a_n + b_{n-1} + 1`, and it ends at `b_n = V(n) + 11`.
//!
//! Return intervals are taken as given, `I(m) = [B^m + 11, B^m + m − 12]`.
//! Equivalently, `k ∈ I(m)` iff `k − 10`, `k + 1` and `k + 12` all lie in
//! the `m`-th block of `P`. Only the length of `W` enters, so the constants
//! are the same for every base.

use std::time::Instant;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hnat::HNat;
use crate::report::{DiagnosticVerdict, Verdict};
use crate::systems::stream::{newprop_ones, MARKER_LEN};
use crate::systems::{Limits, PSet, PointSpec, StreamSource};

/// Largest `n_max` accepted by `verify_newprop`.
pub const MAX_BLOCKS: u32 = 64;

const DECIMAL_BITS: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewpropBundle {
    base: u32,
}

/// One block of the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub n: u32,
    pub b_prev: HNat,
    pub a: HNat,
    pub v: HNat,
    pub b: HNat,
}

/// Which visit-time formula `verify_with` checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisitFormula {
    /// `V(n) = a_n + b_{n-1} + 1`.
    Construction,
    /// `a_n + 11`, a negative control that lands inside `I(b_{n-1} + 12)`.
    Mutated,
}

fn num(x: &HNat) -> Value {
    json!({ "expr": x.to_string(), "decimal": x.decimal(DECIMAL_BITS) })
}

impl NewpropBundle {
    pub fn new(base: u32) -> Result<NewpropBundle> {
        if base < 2 {
            return Err(Error::InvalidParameter(format!("base must be at least 2, got {base}")));
        }
        Ok(NewpropBundle { base })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn p(&self) -> PSet {
        PSet::PowerBlocks { base: self.base }
    }

    pub fn b0(&self) -> HNat {
        HNat::from_u64(self.base, MARKER_LEN as u64 - 1)
    }

    /// Blocks `1..=n_max`.
    pub fn blocks(&self, n_max: u32) -> Result<Vec<Block>> {
        if n_max > MAX_BLOCKS {
            return Err(Error::BudgetExceeded {
                what: "newprop blocks",
                needed: n_max as u128,
                cap: MAX_BLOCKS as u128,
            });
        }
        let mut b_prev = self.b0();
        let mut out = Vec::new();
        for n in 1..=n_max {
            let a = HNat::power(&b_prev.add_u64(MARKER_LEN as u64));
            let v = a.add(&b_prev).add_u64(1);
            let b = v.add_u64(MARKER_LEN as u64 - 1);
            out.push(Block {
                n,
                b_prev: b_prev.clone(),
                a,
                v,
                b: b.clone(),
            });
            b_prev = b;
        }
        Ok(out)
    }

    /// `I(m) = [B^m + 11, B^m + m − 12]`, `None` when empty.
    pub fn interval(&self, m: &HNat) -> Result<Option<(HNat, HNat)>> {
        let power = HNat::power(m);
        let lo = power.add_u64(11);
        let Some(width) = m.checked_sub_small(12)? else {
            return Ok(None);
        };
        let hi = power.add(&width);
        Ok((lo <= hi).then_some((lo, hi)))
    }

    /// Prefix length that can be materialized: `min(prefix_limit, b_1 + 1)`.
    pub fn feasible_len(&self, limits: &Limits) -> u64 {
        let b1 = newprop_ones(self.base)
            .get(3)
            .and_then(|&b| u64::try_from(b + 1).ok())
            .unwrap_or(u64::MAX);
        b1.min(limits.prefix_limit)
    }

    pub fn point(&self, limits: &Limits) -> PointSpec {
        PointSpec::PrefixStream {
            source: StreamSource::Newprop { base: self.base },
            offset: 0,
            available: self.feasible_len(limits),
        }
    }

    pub fn prefix(&self, len: u64, limits: &Limits) -> Result<Vec<u8>> {
        let limit = self.feasible_len(limits);
        if len > limit {
            return Err(Error::PrefixLimit { requested: len, limit });
        }
        let mut out = vec![0u8; len as usize];
        for &i in &newprop_ones(self.base) {
            if i < len as u128 {
                out[i as usize] = 1;
            }
        }
        Ok(out)
    }

    /// Materializes the feasible prefix and checks it by a direct scan: every
    /// pair of 1-positions differs by an element of `P`, and the 1-positions
    /// are exactly `{0, b_0} ∪ {V(n), V(n) + 11}` for the blocks that fit.
    pub fn verify_prefix(&self, limits: &Limits) -> Result<Value> {
        let len = self.feasible_len(limits);
        let prefix = self.prefix(len, limits)?;
        let ones: Vec<u64> = (0..len).filter(|&i| prefix[i as usize] == 1).collect();
        let p = self.p();
        let mut bad_pair = None;
        'scan: for (i, &x) in ones.iter().enumerate() {
            for &y in &ones[i + 1..] {
                if !p.contains(y - x) {
                    bad_pair = Some((x, y));
                    break 'scan;
                }
            }
        }
        let mut expected = vec![0u64, MARKER_LEN as u64 - 1];
        for block in self.blocks(8)? {
            let Some(v) = block.v.to_u64() else { break };
            for pos in [v, v + MARKER_LEN as u64 - 1] {
                if pos < len {
                    expected.push(pos);
                }
            }
            if v >= len {
                break;
            }
        }
        Ok(json!({
            "len": len,
            "ones": ones,
            "admissible": bad_pair.is_none(),
            "bad_pair": bad_pair,
            "structure_matches": ones == expected,
        }))
    }

    pub fn verify_with(&self, n_max: u32, formula: VisitFormula) -> Result<DiagnosticVerdict> {
        let start = Instant::now();
        let one = HNat::from_u64(self.base, 1);
        let mut trace = Vec::new();
        let mut hit = None;
        for block in self.blocks(n_max)? {
            let v = match formula {
                VisitFormula::Construction => block.v.clone(),
                VisitFormula::Mutated => block.a.add_u64(11),
            };
            let m = v.leading_exponent().cloned().unwrap_or_else(|| HNat::zero(self.base));
            let mut candidates = Vec::new();
            if let Some(below) = m.checked_sub_small(1)? {
                candidates.push(below);
            }
            candidates.push(m.clone());
            candidates.push(m.add(&one));
            let mut checks = Vec::new();
            for cand in candidates {
                let iv = self.interval(&cand)?;
                let inside = iv.as_ref().is_some_and(|(lo, hi)| lo <= &v && &v <= hi);
                if inside && hit.is_none() {
                    hit = Some(json!({ "n": block.n, "v": num(&v), "m": num(&cand) }));
                }
                checks.push(json!({
                    "m": num(&cand),
                    "interval": iv.as_ref().map(|(lo, hi)| json!([num(lo), num(hi)])),
                    "contains": inside,
                }));
            }
            let growth = block.a > block.b_prev.add(&block.b_prev);
            trace.push(json!({
                "n": block.n,
                "b_prev": num(&block.b_prev),
                "a": num(&block.a),
                "v": num(&v),
                "b": num(&block.b),
                "a_exceeds_twice_b_prev": growth,
                "candidate_m": num(&m),
                "checks": checks,
            }));
        }
        let verdict = if hit.is_some() {
            Verdict::FailsAtHorizon
        } else {
            Verdict::HoldsAtHorizon
        };
        let formula_name = match formula {
            VisitFormula::Construction => "a_n + b_{n-1} + 1",
            VisitFormula::Mutated => "a_n + 11",
        };
        Ok(DiagnosticVerdict::new(
            "newprop-visits-avoid-return-intervals",
            verdict,
            json!({ "trace": trace, "counterexample": hit }),
            json!({ "base": self.base, "n_max": n_max, "visit_formula": formula_name }),
        )
        .timed(start))
    }
}

/// Checks that no visit time `V(n)`, `n ≤ n_max`, lies in any return interval `I(m)`.
pub fn verify_newprop(base: u32, n_max: u32) -> Result<DiagnosticVerdict> {
    NewpropBundle::new(base)?.verify_with(n_max, VisitFormula::Construction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn pow10(e: u32) -> BigUint {
        BigUint::from(10u32).pow(e)
    }

    #[test]
    fn base_ten_first_block() {
        let bundle = NewpropBundle::new(10).unwrap();
        let blocks = bundle.blocks(2).unwrap();
        assert_eq!(blocks[0].b_prev.to_u64(), Some(11));
        assert_eq!(blocks[0].a.to_biguint(128), Some(pow10(23)));
        assert_eq!(blocks[0].v.to_biguint(128), Some(pow10(23) + 12u32));
        assert_eq!(blocks[1].a.to_string(), "10^(10^23 + 35)");
        let (lo, hi) = bundle.interval(&HNat::from_u64(10, 23)).unwrap().unwrap();
        assert_eq!(lo, hi);
        assert_eq!(lo.to_biguint(128), Some(pow10(23) + 11u32));
    }

    #[test]
    fn intervals_match_power_blocks() {
        // brute force over [B^m, B^m + m]: k-10, k+1 and k+12 all in P
        for base in [2u32, 3, 10] {
            let bundle = NewpropBundle::new(base).unwrap();
            let p = bundle.p();
            for m in 1..14u64 {
                let power = (base as u64).pow(m as u32);
                let from_formula: Vec<u64> = match bundle.interval(&HNat::from_u64(base, m)).unwrap() {
                    Some((lo, hi)) => (lo.to_u64().unwrap()..=hi.to_u64().unwrap()).collect(),
                    None => vec![],
                };
                let brute: Vec<u64> = (power..=power + m)
                    .filter(|&k| k > 10 && p.contains(k - 10) && p.contains(k + 1) && p.contains(k + 12))
                                        .collect();
                assert_eq!(from_formula, brute, "base {base}, m {m}");
            }
        }
    }

    #[test]
    fn verification_and_control() {
        let ok = verify_newprop(10, 5).unwrap();
        assert_eq!(ok.verdict, Verdict::HoldsAtHorizon);
        let trace = &ok.witness["trace"];
        assert_eq!(trace[0]["v"]["decimal"], format!("1{}12", "0".repeat(21)));
        let bad = NewpropBundle::new(10).unwrap().verify_with(5, VisitFormula::Mutated).unwrap();
        assert_eq!(bad.verdict, Verdict::FailsAtHorizon);
        assert!(verify_newprop(2, 4).unwrap().verdict.holds());
    }

    #[test]
    fn base_two_prefix() {
        let bundle = NewpropBundle::new(2).unwrap();
        let limits = Limits::default();
        assert_eq!(bundle.feasible_len(&limits), (1 << 23) + 24);
        let report = bundle.verify_prefix(&limits).unwrap();
        assert_eq!(report["admissible"], true);
        assert_eq!(report["structure_matches"], true);
        assert_eq!(report["ones"].as_array().unwrap().len(), 4);
        assert!(matches!(
            bundle.prefix((1 << 23) + 25, &limits),
            Err(Error::PrefixLimit { .. })
        ));
    }
}
