use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::Rat;

/// A finite block over a small alphabet. Written as a string of decimal
/// digits, so alphabets are limited to at most ten symbols.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn new(symbols: impl Into<Vec<u8>>) -> Word {
        Word(symbols.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            write!(f, "{}", char::from(b'0' + s))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        s.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Parse(format!("bad symbol `{c}` in word `{s}`")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(deserializer)?;
        Word::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Decidable subsets `P` of the positive integers used by difference-set subshifts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PSet {
    /// All of `N`.
    All,
    Evens,
    Odds,
    /// `⋃_{m≥1} [m² + 1, m² + m]`, thick with infinite complement.
    SquareBlocks,
    /// `{base^m + s : m ≥ 1, 1 ≤ s ≤ m}`.
    PowerBlocks { base: u32 },
    /// An explicit finite set.
    Finite { members: Vec<u64> },
}

impl PSet {
    pub fn contains(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            PSet::All => true,
            PSet::Evens => n.is_multiple_of(2),
            PSet::Odds => n % 2 == 1,
            PSet::SquareBlocks => {
                let m = isqrt(n - 1);
                n > m * m && n <= m * m + m && m >= 1
            }
            PSet::PowerBlocks { base } => {
                let base = *base as u128;
                let n = n as u128;
                let mut power = base;
                let mut m = 1u128;
                while power < n {
                    if n - power <= m {
                        return true;
                    }
                    power = match power.checked_mul(base) {
                        Some(p) => p,
                        None => return false,
                    };
                    m += 1;
                }
                false
            }
            PSet::Finite { members } => members.contains(&n),
        }
    }

    /// Membership for arbitrarily large integers.
    pub fn contains_big(&self, n: &BigUint) -> bool {
        if let Some(small) = n.to_u64() {
            return self.contains(small);
        }
        match self {
            PSet::All => true,
            PSet::Evens => !n.bit(0),
            PSet::Odds => n.bit(0),
            PSet::SquareBlocks => {
                let m = (n - BigUint::one()).sqrt();
                let sq = &m * &m;
                n > &sq && n <= &(&sq + &m)
            }
            PSet::PowerBlocks { base } => {
                let base = BigUint::from(*base);
                let mut power = base.clone();
                let mut m = BigUint::one();
                while &power < n {
                    let rest = n - &power;
                    if rest <= m && !rest.is_zero() {
                        return true;
                    }
                    power *= &base;
                    m += 1u32;
                }
                false
            }
            PSet::Finite { .. } => false,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PSet::All => "all positive integers".into(),
            PSet::Evens => "even positive integers".into(),
            PSet::Odds => "odd positive integers".into(),
            PSet::SquareBlocks => "union of [m^2+1, m^2+m] over m >= 1".into(),
            PSet::PowerBlocks { base } => format!("{{{base}^m + s : m >= 1, 1 <= s <= m}}"),
            PSet::Finite { members } => format!("finite set {members:?}"),
        }
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// A finitely presented dynamical system.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    FullShift {
        alphabet: u8,
    },
    /// Shift of finite type given by forbidden words.
    Sft {
        alphabet: u8,
        forbidden: Vec<Word>,
    },
    /// `Λ_P`: binary sequences whose 1-positions pairwise differ by elements of `P`.
    DiffSet {
        p: PSet,
    },
    Rotation {
        alpha: Rat,
    },
    /// `(x, y) ↦ (x + α, x + y)` on the 2-torus.
    SkewProduct {
        alpha: Rat,
    },
    /// `x ↦ factor · x` on `[0, 1]`; proximal with the unique fixed point 0.
    Contraction {
        factor: Rat,
    },
    /// Two copies glued at a fixed point, with the map swapping sides.
    Wedge {
        left: Box<SystemSpec>,
        left_fixed: PointSpec,
        right: Box<SystemSpec>,
        right_fixed: PointSpec,
    },
    Product {
        left: Box<SystemSpec>,
        right: Box<SystemSpec>,
    },
}

impl SystemSpec {
    pub fn is_subshift(&self) -> bool {
        matches!(
            self,
            SystemSpec::FullShift { .. } | SystemSpec::Sft { .. } | SystemSpec::DiffSet { .. }
        )
    }

    pub fn metric_profile(&self) -> MetricProfile {
        match self {
            SystemSpec::FullShift { .. } | SystemSpec::Sft { .. } | SystemSpec::DiffSet { .. } => {
                MetricProfile {
                    metric: MetricKind::FirstDisagreement,
                    diameter: 1.0,
                }
            }
            SystemSpec::Rotation { .. } => MetricProfile {
                metric: MetricKind::Circle,
                diameter: 0.5,
            },
            SystemSpec::SkewProduct { .. } => MetricProfile {
                metric: MetricKind::TorusMax,
                diameter: 0.5,
            },
            SystemSpec::Contraction { .. } => MetricProfile {
                metric: MetricKind::Interval,
                diameter: 1.0,
            },
            SystemSpec::Wedge { left, .. } => MetricProfile {
                metric: MetricKind::GluedPath,
                diameter: 2.0 * left.metric_profile().diameter,
            },
            SystemSpec::Product { left, right } => MetricProfile {
                metric: MetricKind::ProductMax,
                diameter: left
                    .metric_profile()
                    .diameter
                    .max(right.metric_profile().diameter),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// `2^{-j}` with `j` the first index of disagreement.
    FirstDisagreement,
    Circle,
    /// Maximum of the two coordinate circle metrics.
    TorusMax,
    Interval,
    /// Intra-side distance, or the path through the glue point across sides.
    GluedPath,
    ProductMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricProfile {
    pub metric: MetricKind,
    pub diameter: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// Side reached after `n` applications of the wedge map.
    pub fn after(self, n: u64) -> Side {
        if n.is_multiple_of(2) {
            self
        } else {
            self.flip()
        }
    }
}

/// Symbol streams known only through a generator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StreamSource {
    /// An explicit finite prefix.
    Word { symbols: Word },
    /// The point `W 0^{a_1} W 0^{a_2} W …` with `W = 1 0^{10} 1` and
    /// gaps `a_n = base^{b_{n-1} + 12}`.
    Newprop { base: u32 },
}

/// An exactly evaluable point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PointSpec {
    EventuallyPeriodic {
        preperiod: Word,
        period: Word,
    },
    /// `offset` symbols of the source have been consumed; symbols at
    /// absolute positions `>= available` are unknown.
    PrefixStream {
        source: StreamSource,
        offset: u64,
        available: u64,
    },
    Torus {
        coords: Vec<Rat>,
    },
    Wedge {
        side: Side,
        inner: Box<PointSpec>,
    },
    Pair {
        left: Box<PointSpec>,
        right: Box<PointSpec>,
    },
}

impl PointSpec {
    pub fn periodic(preperiod: &str, period: &str) -> PointSpec {
        PointSpec::EventuallyPeriodic {
            preperiod: preperiod.parse().expect("digit word"),
            period: period.parse().expect("digit word"),
        }
    }

    pub fn torus(coords: &[Rat]) -> PointSpec {
        PointSpec::Torus {
            coords: coords.to_vec(),
        }
    }

    pub fn pair(left: PointSpec, right: PointSpec) -> PointSpec {
        PointSpec::Pair {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn wedge(side: Side, inner: PointSpec) -> PointSpec {
        PointSpec::Wedge {
            side,
            inner: Box::new(inner),
        }
    }

    /// Canonical form of an eventually periodic point: primitive period and
    /// shortest preperiod. Other variants are returned unchanged.
    pub fn normalized(&self) -> PointSpec {
        match self {
            PointSpec::EventuallyPeriodic { preperiod, period } => {
                let (pre, per) = normalize_periodic(&preperiod.0, &period.0);
                PointSpec::EventuallyPeriodic {
                    preperiod: Word(pre),
                    period: Word(per),
                }
            }
            PointSpec::Wedge { side, inner } => PointSpec::wedge(*side, inner.normalized()),
            PointSpec::Pair { left, right } => PointSpec::pair(left.normalized(), right.normalized()),
            other => other.clone(),
        }
    }
}

pub(crate) fn normalize_periodic(pre: &[u8], period: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let p = period.len();
    let mut root = p;
    for d in 1..=p {
        if p.is_multiple_of(d) && (0..p).all(|i| period[i] == period[i % d]) {
            root = d;
            break;
        }
    }
    let mut per: Vec<u8> = period[..root].to_vec();
    let mut pre = pre.to_vec();
    while let (Some(&last_pre), Some(&last_per)) = (pre.last(), per.last()) {
        if last_pre != last_per {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
    (pre, per)
}

/// A basic open set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Cell {
    /// The position-0 cylinder `C[word]`.
    Cylinder { word: Word },
    /// Open dyadic box `∏ (c_i / 2^r, (c_i + 1) / 2^r)`.
    Dyadic { resolution: u32, corner: Vec<u64> },
    /// A cell on one side of a wedge, with the glue point removed.
    Side { side: Side, inner: Box<Cell> },
    Pair { left: Box<Cell>, right: Box<Cell> },
}

impl Cell {
    pub fn cylinder(word: &str) -> Cell {
        Cell::Cylinder {
            word: word.parse().expect("digit word"),
        }
    }

    pub fn arc(resolution: u32, index: u64) -> Cell {
        Cell::Dyadic {
            resolution,
            corner: vec![index],
        }
    }

    pub fn pair(left: Cell, right: Cell) -> Cell {
        Cell::Pair {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn side(side: Side, inner: Cell) -> Cell {
        Cell::Side {
            side,
            inner: Box::new(inner),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Cylinder { word } => write!(f, "C[{word}]"),
            Cell::Dyadic { resolution, corner } => {
                let parts: Vec<String> = corner.iter().map(|c| c.to_string()).collect();
                write!(f, "D{resolution}({})", parts.join(","))
            }
            Cell::Side { side, inner } => write!(f, "{side:?}:{inner}"),
            Cell::Pair { left, right } => write!(f, "({left})x({right})"),
        }
    }
}

/// Hard caps; exceeding one is an error, never a silent truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub max_depth: u32,
    pub max_horizon: u64,
    pub max_cells: u64,
    pub max_tuples: u128,
    /// Bit length cap for denominators of rational parameters.
    pub max_denominator_bits: u64,
    /// How far symbol comparisons and branch searches look before giving up.
    pub search_cap: u64,
    /// Longest prefix a stream may materialize.
    pub prefix_limit: u64,
    /// Largest admissible end position of a sequence-entropy window.
    pub max_window: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_depth: 24,
            max_horizon: 1_000_000,
            max_cells: 1 << 16,
            max_tuples: 5_000_000,
            max_denominator_bits: 64,
            search_cap: 256,
            prefix_limit: 1 << 24,
            max_window: 4096,
        }
    }
}
