//! Window sets and finite-horizon verdicts for Furstenberg families.
//!
//! Gaps count the non-members between consecutive members plus one, with
//! virtual members at `-1` and `H + 1`. So the leading gap is `min(S) + 1`
//! and the censored trailing gap is `H + 1 - max(S)`; the trailing gap is
//! never mixed into [`WindowSet::max_gap`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::report::Verdict;

/// Integer lists longer than this are written run-length encoded in JSON.
pub const RLE_THRESHOLD: usize = 10_000;

/// A subset of `{0, …, H}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WindowSet {
    horizon: u64,
    members: Vec<u64>,
}

impl WindowSet {
    pub fn new(horizon: u64, members: impl IntoIterator<Item = u64>) -> Result<WindowSet> {
        let mut members: Vec<u64> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&last) = members.last() {
            if last > horizon {
                return Err(Error::InvalidParameter(format!(
                    "member {last} exceeds horizon {horizon}"
                )));
            }
        }
        Ok(WindowSet { horizon, members })
    }

    pub fn from_predicate(horizon: u64, mut f: impl FnMut(u64) -> bool) -> WindowSet {
        WindowSet {
            horizon,
            members: (0..=horizon).filter(|&n| f(n)).collect(),
        }
    }

    pub fn full(horizon: u64) -> WindowSet {
        WindowSet::from_predicate(horizon, |_| true)
    }

    pub fn empty(horizon: u64) -> WindowSet {
        WindowSet {
            horizon,
            members: Vec::new(),
        }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    pub fn min(&self) -> Option<u64> {
        self.members.first().copied()
    }

    pub fn is_subset(&self, other: &WindowSet) -> bool {
        self.members.iter().all(|&n| other.contains(n))
    }

    pub fn intersect(&self, other: &WindowSet) -> WindowSet {
        WindowSet {
            horizon: self.horizon.min(other.horizon),
            members: self.members.iter().copied().filter(|&n| other.contains(n)).collect(),
        }
    }

    /// Restriction to `[lo, hi]`, keeping the horizon.
    pub fn restrict(&self, lo: u64, hi: u64) -> WindowSet {
        WindowSet {
            horizon: self.horizon,
            members: self.members.iter().copied().filter(|&n| lo <= n && n <= hi).collect(),
        }
    }

    /// Whether some member lies in `[lo, hi]`.
    pub fn meets(&self, lo: u64, hi: u64) -> bool {
        let i = self.members.partition_point(|&n| n < lo);
        self.members.get(i).is_some_and(|&n| n <= hi)
    }

    /// Maximal runs as `(start, length)`.
    pub fn runs(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = Vec::new();
        for &n in &self.members {
            match out.last_mut() {
                Some((s, l)) if *s + *l == n => *l += 1,
                _ => out.push((n, 1)),
            }
        }
        out
    }

    pub fn max_run(&self) -> u64 {
        self.runs().iter().map(|r| r.1).max().unwrap_or(0)
    }

    pub fn max_gap(&self) -> Result<u64> {
        let first = self.min().ok_or(Error::EmptySet)?;
        let internal = self.members.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        Ok(internal.max(first + 1))
    }

    /// `H + 1 - max(S)`, the gap cut off by the window edge.
    pub fn trailing_gap(&self) -> Option<u64> {
        self.members.last().map(|&m| self.horizon + 1 - m)
    }

    /// Starts of length-`n` runs: `{i : i, …, i+n-1 ∈ S}`, on the window `[0, H-n+1]`.
    pub fn run_starts(&self, n: u64) -> WindowSet {
        let horizon = (self.horizon + 1).saturating_sub(n);
        let mut members = Vec::new();
        for (s, l) in self.runs() {
            if l >= n {
                members.extend(s..=s + l - n);
            }
        }
        WindowSet { horizon, members }
    }

    pub fn thickly_syndetic_gap(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::InvalidParameter("run length must be positive".into()));
        }
        let starts = self.run_starts(n);
        if starts.is_empty() {
            return Err(Error::NoRuns(n));
        }
        starts.max_gap()
    }

    /// Smallest `m` with `{m, …, H} ⊆ S`. A lone final member `H` after a
    /// gap is not taken as the start of a tail.
    pub fn cofinite_from(&self) -> Option<u64> {
        let (s, l) = *self.runs().last()?;
        (s + l - 1 == self.horizon && (l >= 2 || s == 0)).then_some(s)
    }

    /// Lexicographically first basis `p_1 < … < p_depth` whose nonempty
    /// subset sums all lie in `S`, with every `p_i ≤ bound`.
    pub fn ip_witness(&self, depth: u32, bound: u64) -> Option<Vec<u64>> {
        self.ip_search(depth, bound, u64::MAX).0
    }

    /// As [`WindowSet::ip_witness`]; the flag reports whether the search
    /// finished within `node_cap` visited nodes.
    pub fn ip_search(&self, depth: u32, bound: u64, node_cap: u64) -> (Option<Vec<u64>>, bool) {
        let mut nodes = 0u64;
        let mut basis = Vec::new();
        let mut sums = Vec::new();
        let found = self.ip_dfs(depth as usize, bound, &mut basis, &mut sums, &mut nodes, node_cap);
        let complete = nodes <= node_cap;
        (found.then(|| basis.clone()), complete)
    }

    fn ip_dfs(
        &self,
        depth: usize,
        bound: u64,
        basis: &mut Vec<u64>,
        sums: &mut Vec<u64>,
        nodes: &mut u64,
        cap: u64,
    ) -> bool {
        if basis.len() == depth {
            return true;
        }
        let after = basis.last().map_or(1, |&p| p + 1);
        let i = self.members.partition_point(|&n| n < after);
        for &p in &self.members[i..] {
            if p > bound {
                break;
            }
            *nodes += 1;
            if *nodes > cap {
                return false;
            }
            let new: Vec<u64> = std::iter::once(p).chain(sums.iter().map(|s| s + p)).collect();
            if new.iter().all(|&s| self.contains(s)) {
                let old = sums.len();
                basis.push(p);
                sums.extend(new);
                if self.ip_dfs(depth, bound, basis, sums, nodes, cap) {
                    return true;
                }
                basis.pop();
                sums.truncate(old);
            }
        }
        false
    }

    /// Integer list for JSON, run-length encoded above [`RLE_THRESHOLD`] entries.
    pub fn members_json(&self) -> Value {
        encode_list(&self.members)
    }

    pub fn to_json(&self) -> Value {
        json!({ "horizon": self.horizon, "members": self.members_json() })
    }

    pub fn from_json(v: &Value) -> Result<WindowSet> {
        let horizon = v["horizon"]
            .as_u64()
            .ok_or_else(|| Error::Parse("window set needs an integer `horizon`".into()))?;
        WindowSet::new(horizon, decode_list(&v["members"])?)
    }

    /// CSV form: header `horizon,H` then one member per line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("horizon,{}\n", self.horizon);
        for n in &self.members {
            let _ = writeln!(out, "{n}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<WindowSet> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty window set CSV".into()))?;
        let horizon = header
            .trim()
            .strip_prefix("horizon,")
            .and_then(|h| h.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?;
        let members = lines
            .map(|l| l.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad member `{l}`"))))
            .collect::<Result<Vec<_>>>()?;
        WindowSet::new(horizon, members)
    }

    /// Run-length text form: `horizon H` then `start length` per run.
    pub fn to_rle(&self) -> String {
        let mut out = format!("horizon {}\n", self.horizon);
        for (s, l) in self.runs() {
            let _ = writeln!(out, "{s} {l}");
        }
        out
    }

    pub fn from_rle(text: &str) -> Result<WindowSet> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty run-length text".into()))?;
        let horizon = header
            .trim()
            .strip_prefix("horizon ")
            .and_then(|h| h.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?;
        let mut members = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace().map(str::parse::<u64>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(s)), Some(Ok(l)), None) => members.extend(s..s + l),
                _ => return Err(Error::Parse(format!("bad run `{line}`"))),
            }
        }
        WindowSet::new(horizon, members)
    }
}

pub fn encode_list(items: &[u64]) -> Value {
    if items.len() <= RLE_THRESHOLD {
        return json!(items);
    }
    let mut runs: Vec<[u64; 2]> = Vec::new();
    for &n in items {
        match runs.last_mut() {
            Some([s, l]) if *s + *l == n => *l += 1,
            _ => runs.push([n, 1]),
        }
    }
    json!({ "rle": runs })
}

pub fn decode_list(v: &Value) -> Result<Vec<u64>> {
    let bad = || Error::Parse("expected an integer list or {\"rle\": [[start, length], …]}".into());
    if let Some(items) = v.as_array() {
        return items.iter().map(|x| x.as_u64().ok_or_else(bad)).collect();
    }
    let runs = v.get("rle").and_then(Value::as_array).ok_or_else(bad)?;
    let mut out = Vec::new();
    for run in runs {
        match (run.get(0).and_then(Value::as_u64), run.get(1).and_then(Value::as_u64)) {
            (Some(s), Some(l)) => out.extend(s..s + l),
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

/// The statistic behind a family verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyVerdict {
    pub family: String,
    pub verdict: Verdict,
    pub statistic: Value,
    pub params: Value,
}

/// Optional thresholds; unset ones default from the horizon.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyParams {
    /// Required run length for thickness (default `⌊H/4⌋`).
    pub run: Option<u64>,
    /// Allowed gap for syndeticity (default `⌊H/8⌋`).
    pub gap: Option<u64>,
    /// Latest admissible tail start for cofiniteness (default `⌊H/2⌋`).
    pub tail_by: Option<u64>,
    /// Basis size for IP search (default 3).
    pub depth: Option<u32>,
}

impl FamilyParams {
    fn run(&self, h: u64) -> u64 {
        self.run.unwrap_or(h / 4).max(1)
    }

    fn gap(&self, h: u64) -> u64 {
        self.gap.unwrap_or(h / 8).max(1)
    }

    fn tail_by(&self, h: u64) -> u64 {
        self.tail_by.unwrap_or(h / 2)
    }
}

/// A family membership test at finite horizon.
pub trait FamilyPredicate: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, s: &WindowSet) -> FamilyVerdict;
}

fn verdict(family: &str, verdict: Verdict, statistic: Value, params: Value) -> FamilyVerdict {
    FamilyVerdict {
        family: family.to_string(),
        verdict,
        statistic,
        params,
    }
}

/// Syndetic verdict on a set with allowed gap `gap`.
fn syndetic_verdict(s: &WindowSet, gap: u64) -> (Verdict, Value) {
    match s.max_gap() {
        Err(_) => {
            let v = if s.horizon() + 1 > gap {
                Verdict::FailsAtHorizon
            } else {
                Verdict::Inconclusive
            };
            (v, json!({ "max_gap": null, "trailing_gap": null }))
        }
        Ok(g) => {
            let trailing = s.trailing_gap().unwrap_or(0);
            let v = if g > gap {
                Verdict::FailsAtHorizon
            } else if trailing > gap {
                Verdict::Inconclusive
            } else {
                Verdict::HoldsAtHorizon
            };
            (v, json!({ "max_gap": g, "trailing_gap": trailing }))
        }
    }
}

pub struct Nonempty;

impl FamilyPredicate for Nonempty {
    fn name(&self) -> &'static str {
        "nonempty"
    }

    fn evaluate(&self, s: &WindowSet) -> FamilyVerdict {
        let v = if s.is_empty() {
            Verdict::FailsAtHorizon
        } else {
            Verdict::HoldsAtHorizon
        };
        verdict(self.name(), v, json!({ "first": s.min() }), json!({ "horizon": s.horizon() }))
    }
}

pub struct Thick(pub FamilyParams);

impl FamilyPredicate for Thick {
    fn name(&self) -> &'static str {
        "thick"
    }

    fn evaluate(&self, s: &WindowSet) -> FamilyVerdict {
        let run = self.0.run(s.horizon());
        let max_run = s.max_run();
        let v = if max_run >= run {
            Verdict::HoldsAtHorizon
        } else if s.contains(s.horizon()) {
            // The last run may continue past the window.
            Verdict::Inconclusive
        } else {
            Verdict::FailsAtHorizon
        };
        verdict(
            self.name(),
            v,
            json!({ "max_run": max_run }),
            json!({ "horizon": s.horizon(), "run": run }),
        )
    }
}

pub struct Syndetic(pub FamilyParams);

impl FamilyPredicate for Syndetic {
    fn name(&self) -> &'static str {
        "syndetic"
    }

    fn evaluate(&self, s: &WindowSet) -> FamilyVerdict {
        let gap = self.0.gap(s.horizon());
        let (v, stat) = syndetic_verdict(s, gap);
        verdict(self.name(), v, stat, json!({ "horizon": s.horizon(), "gap": gap }))
    }
}

pub struct ThicklySyndetic(pub FamilyParams);

impl FamilyPredicate for ThicklySyndetic {
    fn name(&self) -> &'static str {
        "thickly-syndetic"
    }

    fn evaluate(&self, s: &WindowSet) -> FamilyVerdict {
        let h = s.horizon();
        let run = self.0.run.unwrap_or(4).max(1);
        let gap = self.0.gap(h);
        let params = json!({ "horizon": h, "run": run, "gap": gap });
        let starts = s.run_starts(run);
        if starts.is_empty() {
            return verdict(self.name(), Verdict::FailsAtHorizon, json!({ "max_gap": null }), params);
        }
        let (v, stat) = syndetic_verdict(&starts, gap);
        verdict(self.name(), v, stat, params)
    }
}

pub struct Cofinite(pub FamilyParams);

impl FamilyPredicate for Cofinite {
    fn name(&self) -> &'static str {
        "cofinite"
    }

    fn evaluate(&self, s: &WindowSet) -> FamilyVerdict {
        let h = s.horizon();
        let tail_by = self.0.tail_by(h);
        let missing = (tail_by..=h).find(|&n| !s.contains(n));
        let v = match (s.cofinite_from(), missing) {
            (_, Some(_)) => Verdict::FailsAtHorizon,
            (Some(m), None) if m <= tail_by => Verdict::HoldsAtHorizon,
            _ => Verdict::Inconclusive,
        };
        verdict(
            self.name(),
            v,
            json!({ "tail_from": s.cofinite_from(), "missing": missing }),
            json!({ "horizon": h, "tail_by": tail_by }),
        )
    }
}

pub struct Ip(pub FamilyParams);

/// Node budget for the IP basis search.
pub const IP_NODE_CAP: u64 = 2_000_000;

impl FamilyPredicate for Ip {
    fn name(&self) -> &'static str {
        "ip"
    }

    fn evaluate(&self, s: &WindowSet) -> FamilyVerdict {
        let depth = self.0.depth.unwrap_or(3);
        let (basis, complete) = s.ip_search(depth, s.horizon(), IP_NODE_CAP);
        let v = if basis.is_some() {
            Verdict::HoldsAtHorizon
        } else {
            Verdict::Inconclusive
        };
        verdict(
            self.name(),
            v,
            json!({ "basis": basis, "search_complete": complete }),
            json!({ "horizon": s.horizon(), "depth": depth, "bound": s.horizon(), "node_cap": IP_NODE_CAP }),
        )
    }
}

type Factory = fn(FamilyParams) -> Box<dyn FamilyPredicate>;

fn registry() -> BTreeMap<&'static str, Factory> {
    let mut m: BTreeMap<&'static str, Factory> = BTreeMap::new();
    m.insert("nonempty", |_| Box::new(Nonempty));
    m.insert("thick", |p| Box::new(Thick(p)));
    m.insert("syndetic", |p| Box::new(Syndetic(p)));
    m.insert("thickly-syndetic", |p| Box::new(ThicklySyndetic(p)));
    m.insert("cofinite", |p| Box::new(Cofinite(p)));
    m.insert("ip", |p| Box::new(Ip(p)));
    m
}

pub fn predicate(name: &str, params: FamilyParams) -> Result<Box<dyn FamilyPredicate>> {
    registry()
        .get(name)
        .map(|f| f(params))
        .ok_or_else(|| Error::InvalidParameter(format!("unknown family `{name}`")))
}

pub fn family_names() -> Vec<&'static str> {
    registry().keys().copied().collect()
}

/// A set with a run of length `run_len` meets every set whose gaps, including
/// the censored trailing one, are at most `run_len`.
pub fn dual_consistent(thick: &WindowSet, run_len: u64, syndetic: &WindowSet) -> Option<bool> {
    let certified_thick = thick.max_run() >= run_len;
    let certified_syndetic = syndetic
        .max_gap()
        .is_ok_and(|g| g <= run_len && syndetic.trailing_gap().unwrap_or(u64::MAX) <= run_len);
    if !(certified_thick && certified_syndetic && thick.horizon() <= syndetic.horizon()) {
        return None;
    }
    Some(!thick.intersect(syndetic).is_empty())
}
