//! Topological sequence entropy from `(k, ε)`-separated sets.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::systems::shift::Pattern;
use crate::systems::{cell_family, window_len, PointSpec, System};

/// Time sequence `0 = n_0 < n_1 < n_2 < …`; the variants give `n_j` for `j ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceSpec {
    /// `n_j = j`.
    Full,
    /// `n_j = a·j + b`.
    Arithmetic { a: u64, b: u64 },
    /// `n_j = c^j`.
    Geometric { c: u64 },
    Explicit { terms: Vec<u64> },
}

impl SequenceSpec {
    /// `n_0, …, n_{k-1}`.
    pub fn times(&self, k: usize, cap: u64) -> Result<Vec<u64>> {
        let mut out = vec![0u64];
        for j in 1..k as u64 {
            let n = match self {
                SequenceSpec::Full => Some(j),
                SequenceSpec::Arithmetic { a, b } => a.checked_mul(j).and_then(|x| x.checked_add(*b)),
                SequenceSpec::Geometric { c } => u32::try_from(j).ok().and_then(|e| c.checked_pow(e)),
                SequenceSpec::Explicit { terms } => Some(*terms.get(j as usize - 1).ok_or_else(|| {
                    Error::InvalidParameter(format!("explicit sequence has {} terms, {} needed", terms.len(), k - 1))
                })?),
            };
            let n = n.filter(|&n| n <= cap).ok_or(Error::BudgetExceeded {
                what: "sequence time",
                needed: u128::MAX,
                cap: cap as u128,
            })?;
            if n <= *out.last().expect("nonempty") {
                return Err(Error::InvalidParameter(format!(
                    "sequence is not strictly increasing at index {j} (after prepending 0)"
                )));
            }
            out.push(n);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SepProfile {
    pub eps: f64,
    /// `(k, sep(k))` for `k = 1..=k_max`.
    pub counts: Vec<(usize, u128)>,
    pub slope: f64,
    pub method: Method,
}

impl SepProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sep,log_sep\n");
        for (k, s) in &self.counts {
            let _ = writeln!(out, "{k},{s},{}", (*s as f64).ln());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub estimate: f64,
    pub method: Method,
    pub profiles: Vec<SepProfile>,
}

impl EntropyEstimate {
    pub fn to_json(&self) -> Value {
        json!({
            "estimate": self.estimate,
            "method": self.method,
            "tag": match self.method { Method::Exact => "exact", Method::Greedy => "lower-bound" },
            "profiles": self.profiles,
        })
    }
}

/// Sorted union of the windows `[n_j, n_j + L]`.
fn window_union(times: &[u64], l: u64) -> Vec<u64> {
    let mut pos: Vec<u64> = times.iter().flat_map(|&n| n..=n + l).collect();
    pos.sort_unstable();
    pos.dedup();
    pos
}

/// Exact `sep(k, ε)` on a subshift: the number of realizable fillings of the
/// window union.
pub fn sep_count_exact(sys: &System, seq: &SequenceSpec, k: usize, eps: f64) -> Result<u128> {
    let shift = sys.as_subshift().ok_or(Error::NotASubshift)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let l = window_len(eps)?;
    let limits = sys.limits();
    let times = seq.times(k, limits.max_window)?;
    let end = times.last().copied().unwrap_or(0) + l;
    if end > limits.max_window {
        return Err(Error::WindowOverflow {
            end,
            limit: limits.max_window,
        });
    }
    let positions = window_union(&times, l);
    let rule = shift.rule();
    let mut count: u128 = 0;
    let mut stack: Vec<(usize, Pattern)> = vec![(0, Pattern::new())];
    while let Some((depth, pattern)) = stack.pop() {
        if depth == positions.len() {
            count += 1;
            if count > limits.max_tuples {
                return Err(Error::BudgetExceeded {
                    what: "separated tuples",
                    needed: count,
                    cap: limits.max_tuples,
                });
            }
            continue;
        }
        for c in 0..rule.alphabet() {
            let mut next = pattern.clone();
            if next.force(positions[depth] as usize, c) && rule.realizable(&next) {
                stack.push((depth + 1, next));
            }
        }
    }
    Ok(count)
}

fn sequence_orbits(sys: &System, sample: &[PointSpec], times: &[u64]) -> Result<Vec<Vec<PointSpec>>> {
    sample
        .iter()
        .map(|x| times.iter().map(|&n| sys.evaluate(x, n)).collect())
        .collect()
}

fn certified_separated(sys: &System, a: &[PointSpec], b: &[PointSpec], eps: f64) -> Result<bool> {
    for (p, q) in a.iter().zip(b) {
        if sys.distance_bounds(p, q)?.lower > eps {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Greedy `(k, ε)`-separated subset of the sample, inserting in sorted order.
pub fn sep_greedy(sys: &System, sample: &[PointSpec], seq: &SequenceSpec, k: usize, eps: f64) -> Result<usize> {
    let mut sorted = sample.to_vec();
    sorted.sort();
    sorted.dedup();
    for x in &sorted {
        sys.check_point(x)?;
    }
    let times = seq.times(k, sys.limits().max_horizon)?;
    let orbits = sequence_orbits(sys, &sorted, &times)?;
    let mut accepted: Vec<usize> = Vec::new();
    for i in 0..orbits.len() {
        let mut ok = true;
        for &j in &accepted {
            if !certified_separated(sys, &orbits[i], &orbits[j], eps)? {
                ok = false;
                break;
            }
        }
        if ok {
            accepted.push(i);
        }
    }
    Ok(accepted.len())
}

/// Cell representatives at the finest depth with at most `max_points` cells.
pub fn default_grid_sample(sys: &System, max_points: usize) -> Result<Vec<PointSpec>> {
    for depth in (1..=10).rev() {
        if let Ok(cells) = cell_family(sys, depth) {
            if cells.len() <= max_points {
                return cells.iter().map(|c| sys.representative(c)).collect();
            }
        }
    }
    Err(Error::SampleTooSmall("no cell family small enough for a grid sample".into()))
}

/// Least-squares slope of `ln sep(k)` against `k` over `k ∈ [k_max/2, k_max]`.
pub fn upper_half_slope(counts: &[(usize, u128)], k_max: usize) -> f64 {
    let lo = (k_max / 2).max(1);
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .filter(|(k, _)| *k >= lo && *k <= k_max)
        .map(|&(k, s)| (k as f64, (s as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Max over `eps_list` of the fitted growth rate of `ln sep(k)`.
pub fn seq_entropy_estimate(
    sys: &System,
    seq: &SequenceSpec,
    eps_list: &[f64],
    k_max: usize,
    sample: Option<&[PointSpec]>,
) -> Result<EntropyEstimate> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("eps list is empty".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("eps list must be strictly decreasing".into()));
    }
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be positive".into()));
    }
    let exact = sys.as_subshift().is_some() && sample.is_none();
    let grid;
    let sample = match sample {
        Some(s) => s,
        None if exact => &[][..],
        None => {
            grid = default_grid_sample(sys, 256)?;
            &grid[..]
        }
    };
    let method = if exact { Method::Exact } else { Method::Greedy };
    let mut profiles = Vec::new();
    for &eps in eps_list {
        let counts = (1..=k_max)
            .map(|k| {
                let c = if exact {
                    sep_count_exact(sys, seq, k, eps)?
                } else {
                    sep_greedy(sys, sample, seq, k, eps)? as u128
                };
                Ok((k, c))
            })
            .collect::<Result<Vec<_>>>()?;
        profiles.push(SepProfile {
            eps,
            slope: upper_half_slope(&counts, k_max),
            counts,
            method,
        });
    }
    let estimate = profiles.iter().map(|p| p.slope).fold(f64::NEG_INFINITY, f64::max);
    Ok(EntropyEstimate {
        estimate,
        method,
        profiles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rat;
    use crate::systems::{SystemSpec, Word};

    fn full2() -> System {
        System::build(&SystemSpec::FullShift { alphabet: 2 }).unwrap()
    }

    #[test]
    fn times_prepend_zero() {
        assert_eq!(SequenceSpec::Full.times(4, 100).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(SequenceSpec::Geometric { c: 2 }.times(4, 100).unwrap(), vec![0, 2, 4, 8]);
        assert!(SequenceSpec::Explicit { terms: vec![3, 3] }.times(3, 100).is_err());
    }

    #[test]
    fn exact_counts() {
        assert_eq!(sep_count_exact(&full2(), &SequenceSpec::Full, 8, 0.3).unwrap(), 512);
        assert_eq!(sep_count_exact(&full2(), &SequenceSpec::Geometric { c: 2 }, 4, 0.3).unwrap(), 256);
        let golden = System::build(&SystemSpec::Sft { alphabet: 2, forbidden: vec![Word(vec![1, 1])] }).unwrap();
        assert_eq!(sep_count_exact(&golden, &SequenceSpec::Full, 1, 0.9).unwrap(), 2);
        let rot = System::build(&SystemSpec::Rotation { alpha: Rat::new(610, 987) }).unwrap();
        assert_eq!(sep_count_exact(&rot, &SequenceSpec::Full, 1, 0.3), Err(Error::NotASubshift));
    }

    #[test]
    fn full_shift_slope_is_log_two() {
        let e = seq_entropy_estimate(&full2(), &SequenceSpec::Full, &[0.3], 10, None).unwrap();
        assert!((e.estimate - 2f64.ln()).abs() < 1e-9);
        assert!(e.profiles[0].to_csv().starts_with("k,sep,log_sep\n1,4,"));
    }

    #[test]
    fn rotation_slope_is_zero() {
        let rot = System::build(&SystemSpec::Rotation { alpha: Rat::new(610, 987) }).unwrap();
        let e = seq_entropy_estimate(&rot, &SequenceSpec::Full, &[0.1], 8, None).unwrap();
        assert!(e.estimate.abs() < 1e-12);
        assert_eq!(e.method, Method::Greedy);
    }

    #[test]
    fn singleton_greedy() {
        let one = [PointSpec::periodic("", "0")];
        assert_eq!(sep_greedy(&full2(), &one, &SequenceSpec::Full, 5, 0.3).unwrap(), 1);
    }
}
