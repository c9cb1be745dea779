//! Admissibility strategies for one-sided subshifts.
//!
//! Every symbolic computation in the crate reduces to one question: is there a
//! point of the subshift that matches a partial pattern (some positions forced,
//! the rest free)? Each presentation answers it in its own way.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::systems::spec::{normalize_periodic, PSet, Word};

/// Partially specified symbol sequence. Positions past the end are free.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pattern(pub Vec<Option<u8>>);

impl Pattern {
    pub fn new() -> Pattern {
        Pattern(Vec::new())
    }

    pub fn from_word(word: &[u8]) -> Pattern {
        Pattern(word.iter().map(|&s| Some(s)).collect())
    }

    /// Forces `symbol` at `pos`; `false` if it contradicts an earlier force.
    pub fn force(&mut self, pos: usize, symbol: u8) -> bool {
        if pos >= self.0.len() {
            self.0.resize(pos + 1, None);
        }
        match self.0[pos] {
            Some(existing) => existing == symbol,
            None => {
                self.0[pos] = Some(symbol);
                true
            }
        }
    }

    pub fn place(&mut self, offset: usize, word: &[u8]) -> bool {
        word.iter()
            .enumerate()
            .all(|(i, &s)| self.force(offset + i, s))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub trait ShiftRule: Send + Sync + Debug {
    fn name(&self) -> &'static str;

    fn alphabet(&self) -> u8;

    /// Whether some point of the shift agrees with every forced position.
    fn realizable(&self, pattern: &Pattern) -> bool;

    fn admissible(&self, word: &[u8]) -> bool {
        self.realizable(&Pattern::from_word(word))
    }

    /// An eventually periodic point `(preperiod, period)` in the cylinder of `word`.
    fn completion(&self, word: &[u8]) -> Option<(Vec<u8>, Vec<u8>)>;
}

#[derive(Debug)]
pub struct FullShiftRule {
    alphabet: u8,
}

impl FullShiftRule {
    pub fn new(alphabet: u8) -> Result<FullShiftRule> {
        if !(2..=10).contains(&alphabet) {
            return Err(Error::InvalidSystem(format!(
                "full shift alphabet must be in 2..=10, got {alphabet}"
            )));
        }
        Ok(FullShiftRule { alphabet })
    }
}

impl ShiftRule for FullShiftRule {
    fn name(&self) -> &'static str {
        "full-shift"
    }

    fn alphabet(&self) -> u8 {
        self.alphabet
    }

    fn realizable(&self, pattern: &Pattern) -> bool {
        pattern.0.iter().flatten().all(|&s| s < self.alphabet)
    }

    fn completion(&self, word: &[u8]) -> Option<(Vec<u8>, Vec<u8>)> {
        self.admissible(word).then(|| (word.to_vec(), vec![0]))
    }
}

/// Shift of finite type, decided on its transfer graph.
///
/// States are the last `s` symbols emitted, `s = max(longest forbidden − 1, 1)`.
/// Only live states (those starting an infinite path) are kept.
#[derive(Debug)]
pub struct SftRule {
    alphabet: u8,
    forbidden: Vec<Vec<u8>>,
    state_len: usize,
    live: HashSet<Vec<u8>>,
    live_prefixes: HashSet<Vec<u8>>,
}

impl SftRule {
    pub fn new(alphabet: u8, forbidden: &[Word]) -> Result<SftRule> {
        if !(2..=10).contains(&alphabet) {
            return Err(Error::InvalidSystem(format!(
                "SFT alphabet must be in 2..=10, got {alphabet}"
            )));
        }
        if forbidden.is_empty() {
            return Err(Error::InvalidSystem(
                "SFT needs at least one forbidden word".into(),
            ));
        }
        for w in forbidden {
            if w.is_empty() || w.0.iter().any(|&s| s >= alphabet) {
                return Err(Error::InvalidSystem(format!(
                    "forbidden word `{w}` is empty or uses symbols outside the alphabet"
                )));
            }
        }
        let forbidden: Vec<Vec<u8>> = forbidden.iter().map(|w| w.0.clone()).collect();
        let longest = forbidden.iter().map(Vec::len).max().unwrap_or(1);
        let state_len = longest.saturating_sub(1).max(1);
        if (alphabet as f64).powi(state_len as i32) > 1e6 {
            return Err(Error::InvalidSystem(
                "transfer graph too large; shorten the forbidden words".into(),
            ));
        }

        let mut rule = SftRule {
            alphabet,
            forbidden,
            state_len,
            live: HashSet::new(),
            live_prefixes: HashSet::new(),
        };

        let mut states: HashSet<Vec<u8>> = HashSet::new();
        let mut stack = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            if w.len() == state_len {
                states.insert(w);
                continue;
            }
            for c in 0..alphabet {
                let mut next = w.clone();
                next.push(c);
                if !rule.ends_forbidden(&next) {
                    stack.push(next);
                }
            }
        }
        // Prune states without a successor until stable.
        loop {
            let before = states.len();
            let snapshot = states.clone();
            states.retain(|q| (0..alphabet).any(|c| rule.step(q, c).is_some_and(|n| snapshot.contains(&n))));
            if states.len() == before {
                break;
            }
        }
        if states.is_empty() {
            return Err(Error::InvalidSystem(
                "forbidden words leave no infinite sequence".into(),
            ));
        }
        for q in &states {
            for k in 0..=q.len() {
                rule.live_prefixes.insert(q[..k].to_vec());
            }
        }
        rule.live = states;
        Ok(rule)
    }

    fn ends_forbidden(&self, history: &[u8]) -> bool {
        self.forbidden.iter().any(|f| history.ends_with(f))
    }

    /// Appends `c` to state `q`; `None` when a forbidden word is completed.
    fn step(&self, q: &[u8], c: u8) -> Option<Vec<u8>> {
        let mut history = q.to_vec();
        history.push(c);
        if self.ends_forbidden(&history) {
            return None;
        }
        let start = history.len().saturating_sub(self.state_len);
        Some(history[start..].to_vec())
    }

    fn is_live(&self, q: &[u8]) -> bool {
        if q.len() == self.state_len {
            self.live.contains(q)
        } else {
            self.live_prefixes.contains(q)
        }
    }

    fn successors(&self, q: &[u8], forced: Option<u8>) -> Vec<Vec<u8>> {
        let symbols: Vec<u8> = match forced {
            Some(c) if c < self.alphabet => vec![c],
            Some(_) => Vec::new(),
            None => (0..self.alphabet).collect(),
        };
        symbols
            .into_iter()
            .filter_map(|c| self.step(q, c))
            .filter(|n| self.is_live(n))
            .collect()
    }
}

impl ShiftRule for SftRule {
    fn name(&self) -> &'static str {
        "sft"
    }

    fn alphabet(&self) -> u8 {
        self.alphabet
    }

    fn realizable(&self, pattern: &Pattern) -> bool {
        let mut current: BTreeSet<Vec<u8>> = BTreeSet::new();
        current.insert(Vec::new());
        for &forced in &pattern.0 {
            let mut next = BTreeSet::new();
            for q in &current {
                next.extend(self.successors(q, forced));
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        true
    }

    fn completion(&self, word: &[u8]) -> Option<(Vec<u8>, Vec<u8>)> {
        if !self.admissible(word) {
            return None;
        }
        // Greedy smallest-symbol walk; the first repeated state closes the cycle.
        let mut symbols = word.to_vec();
        let mut q: Vec<u8> = Vec::new();
        for &c in word {
            q = self.step(&q, c)?;
        }
        let mut seen: Vec<(Vec<u8>, usize)> = Vec::new();
        loop {
            if q.len() == self.state_len {
                if let Some(&(_, at)) = seen.iter().find(|(s, _)| *s == q) {
                    let period = symbols[at..].to_vec();
                    symbols.truncate(at);
                    return Some(normalize_periodic(&symbols, &period));
                }
                seen.push((q.clone(), symbols.len()));
            }
            let next = (0..self.alphabet)
                .find_map(|c| self.step(&q, c).filter(|n| self.is_live(n)).map(|n| (c, n)))?;
            symbols.push(next.0);
            q = next.1;
        }
    }
}

/// `Λ_P`: a binary sequence is admissible when every two 1-positions differ
/// by an element of `P`. Filling free positions with 0 never adds
/// constraints, so a pattern is realizable iff its forced 1s are pairwise
/// compatible.
#[derive(Debug)]
pub struct DiffSetRule {
    p: PSet,
}

impl DiffSetRule {
    pub fn new(p: PSet) -> DiffSetRule {
        DiffSetRule { p }
    }

    pub fn p(&self) -> &PSet {
        &self.p
    }

    /// Pairwise difference check on 1-positions.
    pub fn ones_compatible(&self, ones: &[u64]) -> bool {
        for (i, &a) in ones.iter().enumerate() {
            for &b in &ones[i + 1..] {
                if !self.p.contains(a.abs_diff(b)) {
                    return false;
                }
            }
        }
        true
    }
}

impl ShiftRule for DiffSetRule {
    fn name(&self) -> &'static str {
        "diff-set"
    }

    fn alphabet(&self) -> u8 {
        2
    }

    fn realizable(&self, pattern: &Pattern) -> bool {
        let mut ones = Vec::new();
        for (i, s) in pattern.0.iter().enumerate() {
            match s {
                Some(0) | None => {}
                Some(1) => ones.push(i as u64),
                Some(_) => return false,
            }
        }
        self.ones_compatible(&ones)
    }

    fn completion(&self, word: &[u8]) -> Option<(Vec<u8>, Vec<u8>)> {
        self.admissible(word).then(|| (word.to_vec(), vec![0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(list: &[&str]) -> Vec<Word> {
        list.iter().map(|w| w.parse().unwrap()).collect()
    }

    #[test]
    fn sft_rejects_dead_ends() {
        // Forbidding 10 and 11 means a 1 can never be followed: only 0^∞ and 0…01 prefixes
        // that never complete; `01` is locally fine but has no infinite extension.
        let rule = SftRule::new(2, &words(&["10", "11"])).unwrap();
        assert!(rule.admissible(&[0, 0, 0]));
        assert!(!rule.admissible(&[0, 1]));
        assert!(!rule.admissible(&[1]));
    }

    #[test]
    fn sft_two_fixed_points() {
        let rule = SftRule::new(2, &words(&["01", "10"])).unwrap();
        assert!(rule.admissible(&[1, 1, 1]));
        assert!(!rule.admissible(&[0, 1]));
        let mut p = Pattern::from_word(&[0]);
        assert!(p.place(5, &[0]));
        assert!(rule.realizable(&p));
        let mut q = Pattern::from_word(&[0]);
        q.place(5, &[1]);
        assert!(!rule.realizable(&q));
        assert_eq!(rule.completion(&[1]), Some((vec![], vec![1])));
    }

    #[test]
    fn sft_completion_is_admissible() {
        let rule = SftRule::new(2, &words(&["11"])).unwrap();
        let (pre, per) = rule.completion(&[1, 0, 1]).unwrap();
        let mut long = pre.clone();
        for _ in 0..4 {
            long.extend(&per);
        }
        assert!(long.starts_with(&[1, 0, 1]));
        assert!(rule.admissible(&long));
    }

    #[test]
    fn sft_rejects_degenerate_inputs() {
        assert!(SftRule::new(2, &[]).is_err());
        assert!(SftRule::new(2, &words(&["2"])).is_err());
        assert!(SftRule::new(2, &words(&["0", "1"])).is_err());
    }

    #[test]
    fn diff_set_odds() {
        let rule = DiffSetRule::new(PSet::Odds);
        assert!(!rule.admissible(&[1, 0, 1]));
        assert!(rule.admissible(&[1, 1]));
        assert!(!rule.admissible(&[2]));
    }

    #[test]
    fn diff_set_all_is_full_shift() {
        let rule = DiffSetRule::new(PSet::All);
        for w in 0u32..64 {
            let word: Vec<u8> = (0..6).map(|i| ((w >> i) & 1) as u8).collect();
            assert!(rule.admissible(&word));
        }
    }
}
