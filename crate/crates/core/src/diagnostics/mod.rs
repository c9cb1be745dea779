//! Finite-horizon tests for the transitivity hierarchy and sensitivity.

pub mod lyapunov;
pub mod search;

use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::families::{FamilyParams, FamilyPredicate, WindowSet};
use crate::hitting::{cell_pairs, hitting_set, sensitivity_set, TaggedWindowSet};
use crate::report::{DiagnosticVerdict, Verdict};
use crate::systems::{cell_family, Cell, PointSpec, System};

pub use lyapunov::{lyapunov_numbers, LyapunovParams, LyapunovReport};
pub use search::{li_yorke_search, proximal_partner_search, LiYorkeWitness, ProximalReport};

fn pair_json(u: &Cell, v: &Cell) -> Value {
    json!({ "U": u.to_string(), "V": v.to_string() })
}

type PairSets = Vec<(Cell, Cell, TaggedWindowSet)>;

fn all_hitting_sets(sys: &System, depth: u32, horizon: u64) -> Result<(Vec<Cell>, PairSets)> {
    let cells = cell_family(sys, depth)?;
    let sets = cell_pairs(&cells, None)
        .into_par_iter()
        .map(|(u, v)| hitting_set(sys, &u, &v, horizon).map(|t| (u, v, t)))
        .collect::<Result<Vec<_>>>()?;
    Ok((cells, sets))
}

/// Applies `pred` to the certain set, and to the possible set when the
/// certain one does not hold; only a failure on both counts as failure.
fn judge(pred: &dyn FamilyPredicate, t: &TaggedWindowSet) -> (Verdict, Value) {
    let on_certain = pred.evaluate(&t.certain);
    if on_certain.verdict.holds() {
        return (Verdict::HoldsAtHorizon, on_certain.statistic);
    }
    let on_possible = pred.evaluate(&t.possible);
    let v = if on_certain.verdict.fails() && on_possible.verdict.fails() {
        Verdict::FailsAtHorizon
    } else {
        Verdict::Inconclusive
    };
    (v, on_certain.statistic)
}

/// Worst verdict over ordered cell pairs; the witness is the first pair
/// attaining it.
fn aggregate(rows: Vec<(Cell, Cell, Verdict, Value)>) -> (Verdict, Value) {
    let worst = rows.iter().fold(Verdict::HoldsAtHorizon, |acc, r| acc.worst(r.2));
    let witness = rows
        .iter()
        .find(|r| r.2 == worst && !worst.holds())
        .map(|(u, v, _, stat)| {
            let mut w = pair_json(u, v);
            w["statistic"] = stat.clone();
            w
        })
        .unwrap_or(Value::Null);
    (worst, witness)
}

pub fn family_transitivity(
    sys: &System,
    pred: &dyn FamilyPredicate,
    depth: u32,
    horizon: u64,
) -> Result<DiagnosticVerdict> {
    let start = Instant::now();
    let (_, sets) = all_hitting_sets(sys, depth, horizon)?;
    let rows = sets
        .iter()
        .map(|(u, v, t)| {
            let (verdict, stat) = judge(pred, t);
            (u.clone(), v.clone(), verdict, stat)
        })
        .collect();
    let (verdict, witness) = aggregate(rows);
    Ok(DiagnosticVerdict::new(
        &format!("{}-transitivity", pred.name()),
        verdict,
        witness,
        json!({ "depth": depth, "horizon": horizon, "family": pred.name() }),
    )
    .timed(start))
}

pub fn transitivity_test(sys: &System, depth: u32, horizon: u64) -> Result<DiagnosticVerdict> {
    let start = Instant::now();
    let (_, sets) = all_hitting_sets(sys, depth, horizon)?;
    let rows = sets
        .iter()
        .map(|(u, v, t)| {
            let verdict = if !t.certain.is_empty() {
                Verdict::HoldsAtHorizon
            } else if !t.possible.is_empty() {
                Verdict::Inconclusive
            } else {
                Verdict::FailsAtHorizon
            };
            (u.clone(), v.clone(), verdict, json!({ "first_hit": t.certain.min() }))
        })
        .collect();
    let (verdict, witness) = aggregate(rows);
    Ok(DiagnosticVerdict::new(
        "transitivity",
        verdict,
        witness,
        json!({ "depth": depth, "horizon": horizon }),
    )
    .timed(start))
}

/// Tests `N(U,U) ∩ N(U,V) ≠ ∅` for every pair of cells.
pub fn weak_mixing_test(sys: &System, depth: u32, horizon: u64) -> Result<DiagnosticVerdict> {
    let start = Instant::now();
    let (_, sets) = all_hitting_sets(sys, depth, horizon)?;
    let returns = |u: &Cell| {
        sets.iter()
            .find(|(a, b, _)| a == u && b == u)
            .map(|(_, _, t)| t)
            .expect("diagonal pair present")
    };
    let rows = sets
        .iter()
        .map(|(u, v, t)| {
            let back = returns(u);
            let certain = back.certain.intersect(&t.certain);
            let possible = back.possible.intersect(&t.possible);
            let verdict = if !certain.is_empty() {
                Verdict::HoldsAtHorizon
            } else if !possible.is_empty() {
                Verdict::Inconclusive
            } else {
                Verdict::FailsAtHorizon
            };
            (u.clone(), v.clone(), verdict, json!({ "first_common": certain.min() }))
        })
        .collect();
    let (verdict, witness) = aggregate(rows);
    Ok(DiagnosticVerdict::new(
        "weak-mixing",
        verdict,
        witness,
        json!({ "depth": depth, "horizon": horizon }),
    )
    .timed(start))
}

/// Cofinite verdict on every hitting set, with tails required by `tail_by`
/// (default `⌊H/2⌋`).
pub fn mixing_test(sys: &System, depth: u32, horizon: u64, tail_by: Option<u64>) -> Result<DiagnosticVerdict> {
    let start = Instant::now();
    let params = FamilyParams {
        tail_by,
        ..FamilyParams::default()
    };
    let pred = crate::families::Cofinite(params);
    let mut v = family_transitivity(sys, &pred, depth, horizon)?;
    v.property = "mixing".into();
    v.params = json!({ "depth": depth, "horizon": horizon, "tail_by": tail_by.unwrap_or(horizon / 2) });
    Ok(v.timed(start))
}

/// Net value: counts only when it exceeds the cell's own diameter bound.
pub(crate) fn net(value: f64, own_diameter: f64) -> f64 {
    if value > own_diameter {
        value
    } else {
        0.0
    }
}

/// `v(U, n)`: certified lower bounds on `diam T^n U`, net of `diam U`, for `n ≤ H`.
pub(crate) fn diameter_table(sys: &System, cells: &[Cell], horizon: u64) -> Result<Vec<Vec<f64>>> {
    cells
        .par_iter()
        .map(|c| {
            let own = sys.image_diameter(c, 0)?.upper;
            (0..=horizon)
                .map(|n| Ok(net(sys.image_diameter(c, n)?.lower, own)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

/// Finite-horizon `L_d`: `min_U max_{n ≤ H} v(U, n)`.
pub fn sensitivity_constant(sys: &System, depth: u32, horizon: u64) -> Result<f64> {
    crate::systems::horizon_ok(sys, horizon)?;
    let cells = cell_family(sys, depth)?;
    let table = diameter_table(sys, &cells, horizon)?;
    Ok(table
        .iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min))
}

/// Fixed-width bitset over `0..=H`.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn from_set(s: &WindowSet) -> Bits {
        let mut words = vec![0u64; (s.horizon() as usize + 64) / 64];
        for &n in s.members() {
            words[n as usize / 64] |= 1 << (n % 64);
        }
        Bits(words)
    }

    fn and_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    fn first(&self) -> Option<u64> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i as u64 * 64 + w.trailing_zeros() as u64)
    }
}

/// Number of `k`-multisets from `n` items.
pub(crate) fn multiset_count(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.saturating_mul(n as u128 + i) / (i + 1);
    }
    acc
}

/// Calls `f` on every nondecreasing index tuple of length `k` over `0..n`.
pub(crate) fn for_each_multiset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if n == 0 || k == 0 {
        return;
    }
    let mut idx = vec![0usize; k];
    loop {
        f(&idx);
        let Some(pos) = (0..k).rev().find(|&i| idx[i] + 1 < n) else {
            return;
        };
        idx[pos] += 1;
        let v = idx[pos];
        for slot in &mut idx[pos + 1..] {
            *slot = v;
        }
    }
}

pub(crate) fn check_tuple_budget(sys: &System, cells: usize, k: usize) -> Result<()> {
    let needed = multiset_count(cells, k);
    if needed > sys.limits().max_tuples {
        return Err(Error::BudgetExceeded {
            what: "tuples",
            needed,
            cap: sys.limits().max_tuples,
        });
    }
    Ok(())
}

pub fn multi_sensitivity_test(sys: &System, k: usize, depth: u32, delta: f64, horizon: u64) -> Result<DiagnosticVerdict> {
    let start = Instant::now();
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let cells = cell_family(sys, depth)?;
    check_tuple_budget(sys, cells.len(), k)?;
    let sets = cells
        .par_iter()
        .map(|c| sensitivity_set(sys, c, delta, horizon))
        .collect::<Result<Vec<_>>>()?;
    let certain: Vec<Bits> = sets.iter().map(|t| Bits::from_set(&t.certain)).collect();
    let possible: Vec<Bits> = sets.iter().map(|t| Bits::from_set(&t.possible)).collect();
    let mut verdict = Verdict::HoldsAtHorizon;
    let mut witness = Value::Null;
    let mut latest_common = 0u64;
    for_each_multiset(cells.len(), k, |idx| {
        if verdict.fails() {
            return;
        }
        let mut c = certain[idx[0]].clone();
        let mut p = possible[idx[0]].clone();
        for &i in &idx[1..] {
            c.and_assign(&certain[i]);
            p.and_assign(&possible[i]);
        }
        let tuple = || json!(idx.iter().map(|&i| cells[i].to_string()).collect::<Vec<_>>());
        match (c.first(), p.first()) {
            (Some(n), _) => latest_common = latest_common.max(n),
            (None, Some(_)) => {
                if verdict.holds() {
                    verdict = Verdict::Inconclusive;
                    witness = json!({ "tuple": tuple(), "certain_common": null });
                }
            }
            (None, None) => {
                verdict = Verdict::FailsAtHorizon;
                witness = json!({ "tuple": tuple(), "common": null });
            }
        }
    });
    if verdict.holds() {
        witness = json!({ "latest_first_common_time": latest_common });
    }
    Ok(DiagnosticVerdict::new(
        "multi-sensitivity",
        verdict,
        witness,
        json!({ "K": k, "depth": depth, "delta": delta, "horizon": horizon }),
    )
    .timed(start))
}

/// Per-cell longest run of the certain sensitivity set.
pub fn thick_sensitivity_profile(sys: &System, depth: u32, delta: f64, horizon: u64) -> Result<Value> {
    let cells = cell_family(sys, depth)?;
    let runs = cells
        .par_iter()
        .map(|c| sensitivity_set(sys, c, delta, horizon).map(|t| t.certain.max_run()))
        .collect::<Result<Vec<u64>>>()?;
    let rows: Vec<Value> = cells
        .iter()
        .zip(&runs)
        .enumerate()
        .map(|(i, (c, r))| json!({ "index": i, "cell": c.to_string(), "max_run": r }))
        .collect();
    Ok(json!({
        "cells": rows,
        "min_max_run": runs.iter().copied().min(),
        "params": { "depth": depth, "delta": delta, "horizon": horizon },
    }))
}

/// Gap bound of `{n ≤ H : diam T^n(cell(x)) ≤ ε}`, absent when that set is
/// empty or its censored tail exceeds every gap seen inside the window.
pub fn syndetic_equicontinuity(sys: &System, x: &PointSpec, eps: f64, depth: u32, horizon: u64) -> Result<Option<u64>> {
    crate::systems::horizon_ok(sys, horizon)?;
    sys.check_point(x)?;
    let cell = sys.cell_of(x, depth)?;
    let bounds = (0..=horizon)
        .map(|n| sys.image_diameter(&cell, n))
        .collect::<Result<Vec<_>>>()?;
    let set = WindowSet::from_predicate(horizon, |n| bounds[n as usize].upper <= eps);
    let Ok(gap) = set.max_gap() else {
        return Ok(None);
    };
    if set.trailing_gap().unwrap_or(0) > gap {
        return Ok(None);
    }
    Ok(Some(gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rat;
    use crate::systems::{Word, SystemSpec};

    fn full2() -> System {
        System::build(&SystemSpec::FullShift { alphabet: 2 }).unwrap()
    }

    fn rotation() -> System {
        System::build(&SystemSpec::Rotation { alpha: Rat::new(610, 987) }).unwrap()
    }

    #[test]
    fn multisets() {
        let mut seen = Vec::new();
        for_each_multiset(3, 2, |i| seen.push(i.to_vec()));
        assert_eq!(seen.len() as u128, multiset_count(3, 2));
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[5], vec![2, 2]);
    }

    #[test]
    fn hierarchy_on_full_shift() {
        let s = full2();
        assert!(transitivity_test(&s, 3, 16).unwrap().verdict.holds());
        assert!(weak_mixing_test(&s, 2, 16).unwrap().verdict.holds());
        assert!(mixing_test(&s, 2, 16, None).unwrap().verdict.holds());
    }

    #[test]
    fn two_fixed_points_not_transitive() {
        let s = System::build(&SystemSpec::Sft {
            alphabet: 2,
            forbidden: vec![Word(vec![0, 1]), Word(vec![1, 0])],
        })
        .unwrap();
        let v = transitivity_test(&s, 1, 10).unwrap();
        assert!(v.verdict.fails());
        assert_eq!(v.witness["U"], "C[0]");
        assert_eq!(v.witness["V"], "C[1]");
    }

    #[test]
    fn rotation_is_transitive_not_weakly_mixing() {
        let r = rotation();
        assert!(transitivity_test(&r, 3, 1000).unwrap().verdict.holds());
        assert!(weak_mixing_test(&r, 3, 1000).unwrap().verdict.fails());
        assert!(mixing_test(&r, 3, 1000, None).unwrap().verdict.fails());
    }

    #[test]
    fn sensitivity_constants() {
        assert_eq!(sensitivity_constant(&full2(), 3, 5).unwrap(), 1.0);
        assert_eq!(sensitivity_constant(&rotation(), 3, 100).unwrap(), 0.0);
    }

    #[test]
    fn multi_sensitivity() {
        assert!(multi_sensitivity_test(&full2(), 3, 2, 0.5, 16).unwrap().verdict.holds());
        assert!(multi_sensitivity_test(&rotation(), 1, 3, 0.3, 50).unwrap().verdict.fails());
    }

    #[test]
    fn thick_profile() {
        let p = thick_sensitivity_profile(&full2(), 2, 0.5, 20).unwrap();
        assert!(p["min_max_run"].as_u64().unwrap() >= 19);
        let p = thick_sensitivity_profile(&rotation(), 3, 0.3, 50).unwrap();
        assert_eq!(p["min_max_run"], 0);
    }

    #[test]
    fn equicontinuity_gaps() {
        let x = PointSpec::torus(&[Rat::new(1, 7)]);
        assert_eq!(syndetic_equicontinuity(&rotation(), &x, 0.2, 3, 100).unwrap(), Some(1));
        let zero = PointSpec::periodic("", "0");
        assert_eq!(syndetic_equicontinuity(&full2(), &zero, 0.1, 6, 100).unwrap(), None);
    }
}
