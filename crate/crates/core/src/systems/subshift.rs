use num_integer::Integer;

use crate::error::{Error, Result};
use crate::systems::shift::{DiffSetRule, FullShiftRule, Pattern, SftRule, ShiftRule};
use crate::systems::spec::{normalize_periodic, Cell, Limits, PointSpec, StreamSource, SystemSpec, Word};
use crate::systems::stream::stream_symbol;
use crate::systems::{Bounds, Candidate, DynamicalSystem, Hit};

/// One-sided subshift with the first-disagreement metric `2^{-j}`.
#[derive(Debug)]
pub struct Subshift {
    spec: SystemSpec,
    rule: Box<dyn ShiftRule>,
    limits: Limits,
}

/// `2^{-j}`.
pub fn dyadic(j: u64) -> f64 {
    if j > 1074 {
        0.0
    } else {
        (-(j as f64)).exp2()
    }
}

/// Window length `L(ε) = ⌈log2(1/ε)⌉ − 1`: two points are more than `ε`
/// apart iff they disagree somewhere in `[0, L(ε)]`.
pub fn window_len(eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "subshift scale must lie in (0, 1), got {eps}"
        )));
    }
    let mut j = 0u64;
    // Smallest j with 2^{-j} <= eps is ⌈log2(1/eps)⌉.
    while dyadic(j) > eps {
        j += 1;
    }
    Ok(j - 1)
}

impl Subshift {
    pub fn new(spec: SystemSpec, limits: Limits) -> Result<Subshift> {
        let rule: Box<dyn ShiftRule> = match &spec {
            SystemSpec::FullShift { alphabet } => Box::new(FullShiftRule::new(*alphabet)?),
            SystemSpec::Sft { alphabet, forbidden } => Box::new(SftRule::new(*alphabet, forbidden)?),
            SystemSpec::DiffSet { p } => {
                if !DiffSetRule::new(p.clone()).admissible(&[1]) {
                    return Err(Error::InvalidSystem("difference set subshift is degenerate".into()));
                }
                Box::new(DiffSetRule::new(p.clone()))
            }
            other => {
                return Err(Error::InvalidSystem(format!("{other:?} is not a subshift")));
            }
        };
        Ok(Subshift { spec, rule, limits })
    }

    pub fn rule(&self) -> &dyn ShiftRule {
        self.rule.as_ref()
    }

    pub fn alphabet(&self) -> u8 {
        self.rule.alphabet()
    }

    /// Symbols `x_from, …, x_{from+len-1}`.
    pub fn symbols(&self, x: &PointSpec, from: u64, len: u64) -> Result<Vec<u8>> {
        match x {
            PointSpec::EventuallyPeriodic { preperiod, period } => {
                let pre = preperiod.as_slice();
                let per = period.as_slice();
                if per.is_empty() {
                    return Err(Error::InvalidPoint("empty period".into()));
                }
                Ok((from..from + len)
                    .map(|i| {
                        let i = i as usize;
                        if i < pre.len() {
                            pre[i]
                        } else {
                            per[(i - pre.len()) % per.len()]
                        }
                    })
                    .collect())
            }
            PointSpec::PrefixStream { source, offset, available } => {
                let end = offset + from + len;
                if end > *available {
                    return Err(Error::PrefixExhausted {
                        needed: end,
                        available: *available,
                    });
                }
                Ok((offset + from..end).map(|i| stream_symbol(source, i)).collect())
            }
            other => Err(Error::InvalidPoint(format!("{other:?} is not a symbol sequence"))),
        }
    }

    /// Number of symbols known from position 0 of the point, `None` if unbounded.
    fn known_len(x: &PointSpec) -> Option<u64> {
        match x {
            PointSpec::PrefixStream { offset, available, .. } => Some(available.saturating_sub(*offset)),
            _ => None,
        }
    }

    fn word_of(&self, c: &Cell) -> Result<Vec<u8>> {
        match c {
            Cell::Cylinder { word } => {
                if !self.rule.admissible(word.as_slice()) {
                    return Err(Error::InadmissibleCell(format!("C[{word}]")));
                }
                Ok(word.0.clone())
            }
            other => Err(Error::InadmissibleCell(format!("{other} is not a cylinder"))),
        }
    }

    /// First index `j` of disagreement of two points, `None` if equal.
    /// `Err` when the comparison needs more symbols than are known or allowed.
    fn first_disagreement(&self, p: &PointSpec, q: &PointSpec) -> Result<Option<u64>> {
        let p = p.normalized();
        let q = q.normalized();
        if p == q {
            return Ok(None);
        }
        let exact_span = match (&p, &q) {
            (
                PointSpec::EventuallyPeriodic { preperiod: a, period: pa },
                PointSpec::EventuallyPeriodic { preperiod: b, period: pb },
            ) => Some(a.len().max(b.len()) as u64 + pa.len().lcm(&pb.len()) as u64),
            _ => None,
        };
        let cap = self.limits.search_cap.max(64) * 16;
        let mut span = exact_span.unwrap_or(cap).min(cap.max(exact_span.unwrap_or(0)));
        for known in [Self::known_len(&p), Self::known_len(&q)].into_iter().flatten() {
            span = span.min(known);
        }
        let a = self.symbols(&p, 0, span)?;
        let b = self.symbols(&q, 0, span)?;
        if let Some(j) = a.iter().zip(&b).position(|(x, y)| x != y) {
            return Ok(Some(j as u64));
        }
        if exact_span.is_some_and(|e| e <= span) {
            // Structurally different representations of one point cannot survive normalization.
            return Ok(None);
        }
        Err(Error::Undecidable(span))
    }

    /// Point equal to `prefix` followed by the symbols of `x` from position `|prefix|` on.
    pub fn splice(&self, x: &PointSpec, prefix: &[u8]) -> Result<PointSpec> {
        match x {
            PointSpec::EventuallyPeriodic { preperiod, period } => {
                let pre = preperiod.as_slice();
                let per = period.as_slice();
                let (new_pre, new_per) = if prefix.len() <= pre.len() {
                    let mut p = prefix.to_vec();
                    p.extend_from_slice(&pre[prefix.len()..]);
                    (p, per.to_vec())
                } else {
                    let mut rotated = per.to_vec();
                    rotated.rotate_left((prefix.len() - pre.len()) % per.len());
                    (prefix.to_vec(), rotated)
                };
                let (a, b) = normalize_periodic(&new_pre, &new_per);
                Ok(PointSpec::EventuallyPeriodic {
                    preperiod: Word(a),
                    period: Word(b),
                })
            }
            PointSpec::PrefixStream { offset, available, .. } => {
                let known = available - offset;
                if (prefix.len() as u64) > known {
                    return Err(Error::PrefixExhausted {
                        needed: prefix.len() as u64,
                        available: known,
                    });
                }
                let mut symbols = prefix.to_vec();
                symbols.extend(self.symbols(x, prefix.len() as u64, known - prefix.len() as u64)?);
                Ok(PointSpec::PrefixStream {
                    source: StreamSource::Word { symbols: Word(symbols) },
                    offset: 0,
                    available: known,
                })
            }
            other => Err(Error::InvalidPoint(format!("{other:?} is not a symbol sequence"))),
        }
    }

    /// First `j` such that two points of the cylinder of `word` agree on
    /// `[n, n + j)` and differ at `n + j`, searched up to `limit`.
    pub fn branch_index(&self, word: &[u8], n: u64, limit: u64) -> Result<Option<u64>> {
        let mut pattern = Pattern::from_word(word);
        for j in 0..=limit {
            let pos = (n + j) as usize;
            let options: Vec<u8> = (0..self.alphabet())
                .filter(|&c| {
                    let mut p = pattern.clone();
                    p.force(pos, c) && self.rule.realizable(&p)
                })
                .collect();
            match options.as_slice() {
                [] => return Err(Error::InadmissibleCell(format!("C[{}]", Word(word.to_vec())))),
                [only] => {
                    pattern.force(pos, *only);
                }
                _ => return Ok(Some(j)),
            }
        }
        Ok(None)
    }

    /// First `j` such that some `y` in the cylinder of `word` agrees with `x`
    /// on `[n, n + j)` and differs at `n + j`.
    fn spread_index(&self, x: &PointSpec, word: &[u8], n: u64, limit: u64) -> Result<(Option<u64>, u64)> {
        let mut pattern = Pattern::from_word(word);
        let mut span = limit + 1;
        if let Some(known) = Self::known_len(x) {
            span = span.min(known.saturating_sub(n));
        }
        let xs = self.symbols(x, n, span)?;
        for (j, &xc) in xs.iter().enumerate() {
            let pos = n as usize + j;
            let differs = (0..self.alphabet()).filter(|&c| c != xc).any(|c| {
                let mut p = pattern.clone();
                p.force(pos, c) && self.rule.realizable(&p)
            });
            if differs {
                return Ok((Some(j as u64), span));
            }
            if !pattern.force(pos, xc) {
                return Err(Error::InvalidPoint("point lies outside the cell".into()));
            }
        }
        Ok((None, span))
    }

    fn bounds_from_index(found: Option<u64>, searched: u64) -> Bounds {
        match found {
            Some(j) => Bounds::exact(dyadic(j)),
            None => Bounds {
                lower: 0.0,
                upper: dyadic(searched),
            },
        }
    }

    fn all_words(&self, len: usize) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..self.alphabet()).map(move |c| {
                        let mut v = w.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
        out
    }

    fn is_point(&self, y: &PointSpec) -> bool {
        self.check_point(y).is_ok()
    }
}

impl DynamicalSystem for Subshift {
    fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    fn limits(&self) -> &Limits {
        &self.limits
    }

    fn check_point(&self, x: &PointSpec) -> Result<()> {
        match x {
            PointSpec::EventuallyPeriodic { preperiod, period } => {
                if period.is_empty() {
                    return Err(Error::InvalidPoint("period word must be nonempty".into()));
                }
                let depth = (preperiod.len() + 2 * period.len()) as u64;
                let word = self.symbols(x, 0, depth)?;
                if word.iter().any(|&s| s >= self.alphabet()) || !self.rule.admissible(&word) {
                    return Err(Error::InvalidPoint(format!(
                        "{}({})^∞ is not admissible",
                        preperiod, period
                    )));
                }
                Ok(())
            }
            PointSpec::PrefixStream { offset, available, .. } => {
                if offset > available {
                    return Err(Error::InvalidPoint("stream offset beyond available prefix".into()));
                }
                let depth = (available - offset).min(self.limits.search_cap * 4);
                let word = self.symbols(x, 0, depth)?;
                if !self.rule.admissible(&word) {
                    return Err(Error::InvalidPoint("stream prefix is not admissible".into()));
                }
                Ok(())
            }
            other => Err(Error::InvalidPoint(format!("{other:?} is not a symbol sequence"))),
        }
    }

    fn evaluate(&self, x: &PointSpec, n: u64) -> Result<PointSpec> {
        match x {
            PointSpec::EventuallyPeriodic { preperiod, period } => {
                if period.is_empty() {
                    return Err(Error::InvalidPoint("period word must be nonempty".into()));
                }
                let pre = preperiod.as_slice();
                let per = period.as_slice();
                let (a, b) = if (n as usize) <= pre.len() {
                    (pre[n as usize..].to_vec(), per.to_vec())
                } else {
                    let mut rotated = per.to_vec();
                    rotated.rotate_left(((n - pre.len() as u64) % per.len() as u64) as usize);
                    (Vec::new(), rotated)
                };
                let (a, b) = normalize_periodic(&a, &b);
                Ok(PointSpec::EventuallyPeriodic {
                    preperiod: Word(a),
                    period: Word(b),
                })
            }
            PointSpec::PrefixStream { source, offset, available } => {
                let new_offset = offset + n;
                if new_offset > *available {
                    return Err(Error::PrefixExhausted {
                        needed: new_offset,
                        available: *available,
                    });
                }
                Ok(PointSpec::PrefixStream {
                    source: source.clone(),
                    offset: new_offset,
                    available: *available,
                })
            }
            other => Err(Error::InvalidPoint(format!("{other:?} is not a symbol sequence"))),
        }
    }

    fn distance(&self, p: &PointSpec, q: &PointSpec) -> Result<f64> {
        Ok(match self.first_disagreement(p, q)? {
            None => 0.0,
            Some(j) => dyadic(j),
        })
    }

    fn distance_bounds(&self, p: &PointSpec, q: &PointSpec) -> Result<Bounds> {
        match self.first_disagreement(p, q) {
            Ok(None) => Ok(Bounds::exact(0.0)),
            Ok(Some(j)) => Ok(Bounds::exact(dyadic(j))),
            Err(Error::Undecidable(span)) => Ok(Bounds {
                lower: 0.0,
                upper: dyadic(span),
            }),
            Err(e) => Err(e),
        }
    }

    fn cells(&self, depth: u32) -> Result<Vec<Cell>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<u8>> = vec![Vec::new()];
        // Depth-first in reverse symbol order so that output is lexicographic.
        while let Some(w) = stack.pop() {
            if w.len() == depth as usize {
                out.push(Cell::Cylinder { word: Word(w) });
                if out.len() as u64 > self.limits.max_cells {
                    return Err(Error::BudgetExceeded {
                        what: "cells",
                        needed: out.len() as u128,
                        cap: self.limits.max_cells as u128,
                    });
                }
                continue;
            }
            for c in (0..self.alphabet()).rev() {
                let mut next = w.clone();
                next.push(c);
                if self.rule.admissible(&next) {
                    stack.push(next);
                }
            }
        }
        Ok(out)
    }

    fn check_cell(&self, c: &Cell) -> Result<()> {
        self.word_of(c).map(|_| ())
    }

    fn cell_of(&self, x: &PointSpec, depth: u32) -> Result<Cell> {
        Ok(Cell::Cylinder {
            word: Word(self.symbols(x, 0, depth as u64)?),
        })
    }

    fn contains(&self, c: &Cell, x: &PointSpec) -> Result<bool> {
        let word = self.word_of(c)?;
        Ok(self.symbols(x, 0, word.len() as u64)? == word)
    }

    fn hits(&self, u: &Cell, v: &Cell, n: u64) -> Result<Hit> {
        let u = self.word_of(u)?;
        let v = self.word_of(v)?;
        let mut pattern = Pattern::from_word(&u);
        let hit = pattern.place(n as usize, &v) && self.rule.realizable(&pattern);
        Ok(Hit::exact(hit))
    }

    fn image_diameter(&self, c: &Cell, n: u64) -> Result<Bounds> {
        let word = self.word_of(c)?;
        let limit = self.limits.search_cap;
        let found = self.branch_index(&word, n, limit)?;
        Ok(Self::bounds_from_index(found, limit + 1))
    }

    fn point_spread(&self, x: &PointSpec, c: &Cell, n: u64) -> Result<Bounds> {
        let word = self.word_of(c)?;
        let (found, searched) = self.spread_index(x, &word, n, self.limits.search_cap)?;
        Ok(Self::bounds_from_index(found, searched))
    }

    fn representative(&self, c: &Cell) -> Result<PointSpec> {
        let word = self.word_of(c)?;
        let (pre, per) = self
            .rule
            .completion(&word)
            .ok_or_else(|| Error::InadmissibleCell(format!("C[{}]", Word(word.clone()))))?;
        Ok(PointSpec::EventuallyPeriodic {
            preperiod: Word(pre),
            period: Word(per),
        })
    }

    fn li_yorke_candidates(&self, x: &PointSpec, depth: u32, horizon: u64) -> Result<Vec<Candidate>> {
        let word = self.symbols(x, 0, depth as u64)?;
        let x_norm = x.normalized();
        let mut out = Vec::new();

        // Eventually periodic points w u^∞ with short periods.
        for len in 1..=4 {
            for u in self.all_words(len) {
                let (a, b) = normalize_periodic(&word, &u);
                let y = PointSpec::EventuallyPeriodic {
                    preperiod: Word(a),
                    period: Word(b),
                };
                if y != x_norm && self.is_point(&y) && !out.iter().any(|c: &Candidate| c.point == y) {
                    out.push(Candidate::new("eventually-periodic", y));
                }
            }
        }

        // Doubling-gap perturbations: edits at positions at least doubling each time.
        let limit = horizon + 64;
        let mut span = limit + 1;
        if let Some(known) = Self::known_len(x) {
            span = span.min(known);
        }
        let xs = self.symbols(x, 0, span)?;
        for start in depth as u64..depth as u64 + 8 {
            for shift in 1..self.alphabet() {
                let mut ys = xs.clone();
                let mut p = start.max(1);
                let mut last_edit = None;
                while p < span {
                    let mut edited = None;
                    for q in p..span {
                        let mut trial = ys.clone();
                        trial[q as usize] = (xs[q as usize] + shift) % self.alphabet();
                        if self.rule.admissible(&trial) {
                            edited = Some((q, trial));
                            break;
                        }
                    }
                    match edited {
                        Some((q, trial)) => {
                            ys = trial;
                            last_edit = Some(q);
                            p = 2 * q.max(1);
                        }
                        None => break,
                    }
                }
                if let Some(last) = last_edit {
                    let y = self.splice(x, &ys[..=last as usize])?;
                    if y != x_norm && self.is_point(&y) {
                        out.push(Candidate::new("doubling-gap", y));
                    }
                }
            }
        }
        Ok(out)
    }

    fn proximal_candidates(&self, x: &PointSpec, c: &Cell, _horizon: u64) -> Result<Vec<Candidate>> {
        let word = self.word_of(c)?;
        let x_norm = x.normalized();
        let mut out = Vec::new();
        let mut connectors = vec![Vec::new()];
        for len in 1..=3 {
            connectors.extend(self.all_words(len));
        }
        for u in connectors {
            let mut prefix = word.clone();
            prefix.extend(&u);
            let y = match self.splice(x, &prefix) {
                Ok(y) => y,
                Err(Error::PrefixExhausted { .. }) => continue,
                Err(e) => return Err(e),
            };
            if y != x_norm && self.is_point(&y) {
                out.push(Candidate::new(if u.is_empty() { "tail-graft" } else { "connector-graft" }, y));
            }
        }
        Ok(out)
    }

    fn as_subshift(&self) -> Option<&Subshift> {
        Some(self)
    }
}
