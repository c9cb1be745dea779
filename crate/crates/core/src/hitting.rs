//! Hitting, visit and sensitivity sets, and outer approximations of
//! `ω_T(x)` and `ω_{N_T}(x)`.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::families::WindowSet;
use crate::systems::{cell_family, horizon_ok, Cell, PointSpec, System};

/// Default shortest window checked by [`omega_nt_approx`].
pub const DEFAULT_MIN_WINDOW: u64 = 8;

/// Exact members (`certain`) and an enclosure (`possible`).
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedWindowSet {
    pub certain: WindowSet,
    pub possible: WindowSet,
    pub params: Value,
}

impl TaggedWindowSet {
    pub fn to_json(&self) -> Value {
        json!({
            "params": self.params,
            "certain": self.certain.members_json(),
            "possible": self.possible.members_json(),
        })
    }
}

/// A finite set of cells approximating a limit set from outside.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSetApprox {
    pub cells: Vec<Cell>,
    pub depth: u32,
    pub horizon: u64,
    pub pair_budget: Option<usize>,
    pub min_window: Option<u64>,
}

impl CellSetApprox {
    pub fn to_json(&self) -> Value {
        json!({
            "params": {
                "depth": self.depth,
                "horizon": self.horizon,
                "pair_budget": self.pair_budget,
                "min_window": self.min_window,
                "direction": "outer",
            },
            "cells": self.cells.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn is_subset(&self, other: &CellSetApprox) -> bool {
        self.cells.iter().all(|c| other.cells.contains(c))
    }
}

pub fn hitting_set(sys: &System, u: &Cell, v: &Cell, horizon: u64) -> Result<TaggedWindowSet> {
    horizon_ok(sys, horizon)?;
    sys.check_cell(u)?;
    sys.check_cell(v)?;
    let hits = (0..=horizon).map(|n| sys.hits(u, v, n)).collect::<Result<Vec<_>>>()?;
    Ok(TaggedWindowSet {
        certain: WindowSet::from_predicate(horizon, |n| hits[n as usize].certain),
        possible: WindowSet::from_predicate(horizon, |n| hits[n as usize].possible),
        params: json!({ "U": u.to_string(), "V": v.to_string(), "horizon": horizon }),
    })
}

/// Orbit `x, Tx, …, T^H x`.
pub fn orbit(sys: &System, x: &PointSpec, horizon: u64) -> Result<Vec<PointSpec>> {
    horizon_ok(sys, horizon)?;
    sys.check_point(x)?;
    let mut out = Vec::with_capacity(horizon as usize + 1);
    let mut cur = x.clone();
    for n in 0..=horizon {
        if n > 0 {
            cur = sys.evaluate(&cur, 1)?;
        }
        out.push(cur.clone());
    }
    Ok(out)
}

pub fn visit_set(sys: &System, x: &PointSpec, g: &Cell, horizon: u64) -> Result<WindowSet> {
    sys.check_cell(g)?;
    let orbit = orbit(sys, x, horizon)?;
    let flags = orbit.iter().map(|p| sys.contains(g, p)).collect::<Result<Vec<_>>>()?;
    Ok(WindowSet::from_predicate(horizon, |n| flags[n as usize]))
}

fn check_delta(sys: &System, delta: f64) -> Result<()> {
    let diameter = sys.metric().diameter;
    if !(delta > 0.0 && delta < diameter) {
        return Err(Error::BadDelta { delta, diameter });
    }
    Ok(())
}

/// `S_T(U, δ)`: times at which two points of `U` are more than `δ` apart.
pub fn sensitivity_set(sys: &System, u: &Cell, delta: f64, horizon: u64) -> Result<TaggedWindowSet> {
    check_delta(sys, delta)?;
    horizon_ok(sys, horizon)?;
    sys.check_cell(u)?;
    let bounds = (0..=horizon)
        .map(|n| sys.image_diameter(u, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(TaggedWindowSet {
        certain: WindowSet::from_predicate(horizon, |n| bounds[n as usize].lower > delta),
        possible: WindowSet::from_predicate(horizon, |n| bounds[n as usize].upper > delta),
        params: json!({ "U": u.to_string(), "delta": delta, "horizon": horizon }),
    })
}

/// Cells visited by the orbit of `x` at some time in `[⌊H/2⌋, H]`.
pub fn omega_limit_approx(sys: &System, x: &PointSpec, depth: u32, horizon: u64) -> Result<CellSetApprox> {
    let family = cell_family(sys, depth)?;
    let orbit = orbit(sys, x, horizon)?;
    let mut seen = Vec::new();
    for p in &orbit[(horizon / 2) as usize..] {
        let c = sys.cell_of(p, depth)?;
        if !seen.contains(&c) {
            seen.push(c);
        }
    }
    Ok(CellSetApprox {
        cells: family.into_iter().filter(|c| seen.contains(c)).collect(),
        depth,
        horizon,
        pair_budget: None,
        min_window: None,
    })
}

/// Ordered pairs of cells in lexicographic order, truncated to `budget`.
pub fn cell_pairs(cells: &[Cell], budget: Option<usize>) -> Vec<(Cell, Cell)> {
    let all = cells
        .iter()
        .flat_map(|u| cells.iter().map(move |v| (u.clone(), v.clone())));
    match budget {
        Some(b) => all.take(b).collect(),
        None => all.collect(),
    }
}

/// Whether `s` meets `[⌊h/2⌋, h]` for every `h` in `[lo, hi]`.
fn meets_all_windows(s: &WindowSet, lo: u64, hi: u64) -> bool {
    (lo..=hi).all(|h| s.meets(h / 2, h))
}

/// Outer approximation of `ω_{N_T}(x)`.
///
/// A cell `G` is kept when, for the trivial pair and each of the first
/// `pair_budget` pairs `(U, V)`, the times `N_T(x, G) ∩ N_T(U, V)` meet
/// `[⌊h/2⌋, h]` for every `h` in `[min_window, H]`. Larger `H` or budget
/// only adds constraints.
pub fn omega_nt_approx(
    sys: &System,
    x: &PointSpec,
    depth: u32,
    horizon: u64,
    pair_budget: Option<usize>,
    min_window: u64,
) -> Result<CellSetApprox> {
    if horizon < min_window {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is below the minimum window {min_window}"
        )));
    }
    let family = cell_family(sys, depth)?;
    let pairs = cell_pairs(&family, pair_budget);
    let hitting: Vec<WindowSet> = pairs
        .par_iter()
        .map(|(u, v)| hitting_set(sys, u, v, horizon).map(|t| t.certain))
        .collect::<Result<Vec<_>>>()?;
    let orbit = orbit(sys, x, horizon)?;
    let mut kept = Vec::new();
    for g in &family {
        let flags = orbit.iter().map(|p| sys.contains(g, p)).collect::<Result<Vec<_>>>()?;
        let visits = WindowSet::from_predicate(horizon, |n| flags[n as usize]);
        if !meets_all_windows(&visits, min_window, horizon) {
            continue;
        }
        if hitting
            .iter()
            .all(|n| meets_all_windows(&visits.intersect(n), min_window, horizon))
        {
            kept.push(g.clone());
        }
    }
    Ok(CellSetApprox {
        cells: kept,
        depth,
        horizon,
        pair_budget,
        min_window: Some(min_window),
    })
}

/// Per-point emptiness of the `ω_{N_T}` approximation.
pub fn transitive_compact_evidence(
    sys: &System,
    sample: &[PointSpec],
    depth: u32,
    horizon: u64,
    pair_budget: Option<usize>,
    min_window: u64,
) -> Result<Value> {
    let mut points = Vec::new();
    let mut refuted = false;
    for x in sample {
        let approx = omega_nt_approx(sys, x, depth, horizon, pair_budget, min_window)?;
        refuted |= approx.cells.is_empty();
        points.push(json!({
            "point": serde_json::to_value(x).unwrap_or(Value::Null),
            "nonempty": !approx.cells.is_empty(),
            "cells": approx.to_json()["cells"],
        }));
    }
    Ok(json!({
        "verdict": if refuted { "refuted-at-parameters" } else { "consistent-with-transitive-compact" },
        "evidence_only": true,
        "points": points,
        "params": {
            "depth": depth,
            "horizon": horizon,
            "pair_budget": pair_budget,
            "min_window": min_window,
        },
    }))
}

/// One-sided evidence that the `ω_{N_T}` approximation is positively
/// invariant, for subshifts: every kept depth-`D` word, with its first
/// symbol dropped, is kept at depth `D − 1`, horizon `H − 1` and minimum
/// window `h0 + 1`. All pairs are tested at both depths.
pub fn invariance_evidence(sys: &System, x: &PointSpec, depth: u32, horizon: u64, min_window: u64) -> Result<Value> {
    if sys.as_subshift().is_none() {
        return Err(Error::NotASubshift);
    }
    if depth < 2 || horizon < 1 {
        return Err(Error::InvalidParameter("invariance evidence needs depth >= 2 and horizon >= 1".into()));
    }
    let fine = omega_nt_approx(sys, x, depth, horizon, None, min_window)?;
    let coarse = omega_nt_approx(sys, x, depth - 1, horizon - 1, None, min_window + 1)?;
    let missing: Vec<String> = fine
        .cells
        .iter()
        .filter_map(|c| match c {
            Cell::Cylinder { word } => {
                let shifted = Cell::Cylinder {
                    word: crate::systems::Word(word.as_slice()[1..].to_vec()),
                };
                (!coarse.cells.contains(&shifted)).then(|| format!("{c} -> {shifted}"))
            }
            other => Some(format!("{other} is not a cylinder")),
        })
        .collect();
    Ok(json!({
        "holds": missing.is_empty(),
        "missing": missing,
        "fine": fine.to_json(),
        "coarse": coarse.to_json(),
    }))
}
