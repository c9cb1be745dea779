//! Finitely presented dynamical systems with exact or certified evaluation.
//!
//! Every backend implements [`DynamicalSystem`]; [`System::build`] picks the
//! backend from the spec's `kind`.

pub mod compose;
pub mod config;
pub mod metric;
pub mod shift;
pub mod spec;
pub mod stream;
pub mod subshift;

use std::fmt::Debug;
use std::ops::Deref;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
pub use spec::{Cell, Limits, MetricKind, MetricProfile, PSet, PointSpec, Side, StreamSource, SystemSpec, Word};
pub use subshift::{dyadic, window_len, Subshift};

/// Certified enclosure `lower ≤ value ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn exact(v: f64) -> Bounds {
        Bounds { lower: v, upper: v }
    }

    pub fn max(self, other: Bounds) -> Bounds {
        Bounds {
            lower: self.lower.max(other.lower),
            upper: self.upper.max(other.upper),
        }
    }

    /// Sum, rounded outward.
    pub fn add(self, other: Bounds) -> Bounds {
        let lower = self.lower + other.lower;
        let upper = self.upper + other.upper;
        Bounds {
            lower: if lower == 0.0 { 0.0 } else { lower.next_down() },
            upper: upper.next_up(),
        }
    }

    pub fn scale2(self) -> Bounds {
        Bounds {
            lower: 2.0 * self.lower,
            upper: 2.0 * self.upper,
        }
    }
}

/// Three-way hit information: `certain` implies `possible`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hit {
    pub certain: bool,
    pub possible: bool,
}

impl Hit {
    pub fn exact(hit: bool) -> Hit {
        Hit {
            certain: hit,
            possible: hit,
        }
    }

    pub fn and(self, other: Hit) -> Hit {
        Hit {
            certain: self.certain && other.certain,
            possible: self.possible && other.possible,
        }
    }
}

/// A point proposed by a structured search, tagged with its family.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub family: &'static str,
    pub point: PointSpec,
}

impl Candidate {
    pub fn new(family: &'static str, point: PointSpec) -> Candidate {
        Candidate { family, point }
    }
}

pub trait DynamicalSystem: Send + Sync + Debug {
    fn spec(&self) -> &SystemSpec;

    fn limits(&self) -> &Limits;

    fn metric(&self) -> MetricProfile {
        self.spec().metric_profile()
    }

    fn check_point(&self, x: &PointSpec) -> Result<()>;

    /// `T^n x`.
    fn evaluate(&self, x: &PointSpec, n: u64) -> Result<PointSpec>;

    fn distance(&self, p: &PointSpec, q: &PointSpec) -> Result<f64>;

    /// Never fails for lack of information; widens instead.
    fn distance_bounds(&self, p: &PointSpec, q: &PointSpec) -> Result<Bounds>;

    /// All cells at `depth`, in lexicographic order.
    fn cells(&self, depth: u32) -> Result<Vec<Cell>>;

    fn check_cell(&self, c: &Cell) -> Result<()>;

    fn cell_of(&self, x: &PointSpec, depth: u32) -> Result<Cell>;

    fn contains(&self, c: &Cell, x: &PointSpec) -> Result<bool>;

    /// Whether `U ∩ T^{-n} V` is nonempty.
    fn hits(&self, u: &Cell, v: &Cell, n: u64) -> Result<Hit>;

    /// Enclosure of `diam T^n(c)`.
    fn image_diameter(&self, c: &Cell, n: u64) -> Result<Bounds>;

    /// Enclosure of `sup_{y ∈ c} d(T^n x, T^n y)`.
    fn point_spread(&self, x: &PointSpec, c: &Cell, n: u64) -> Result<Bounds>;

    /// A canonical point of the cell.
    fn representative(&self, c: &Cell) -> Result<PointSpec>;

    /// Candidate partners for a Li-Yorke pair with `x`, in search order.
    fn li_yorke_candidates(&self, x: &PointSpec, depth: u32, horizon: u64) -> Result<Vec<Candidate>>;

    /// Candidate proximal partners of `x` lying in `c`.
    fn proximal_candidates(&self, x: &PointSpec, c: &Cell, horizon: u64) -> Result<Vec<Candidate>>;

    fn as_subshift(&self) -> Option<&Subshift> {
        None
    }
}

/// Shared handle to a validated system.
#[derive(Debug, Clone)]
pub struct System(Arc<dyn DynamicalSystem>);

impl System {
    pub fn build(spec: &SystemSpec) -> Result<System> {
        System::with_limits(spec, Limits::default())
    }

    pub fn with_limits(spec: &SystemSpec, limits: Limits) -> Result<System> {
        let inner: Arc<dyn DynamicalSystem> = match spec {
            SystemSpec::FullShift { .. } | SystemSpec::Sft { .. } | SystemSpec::DiffSet { .. } => {
                Arc::new(Subshift::new(spec.clone(), limits)?)
            }
            SystemSpec::Rotation { .. } | SystemSpec::SkewProduct { .. } | SystemSpec::Contraction { .. } => {
                Arc::new(metric::MetricSystem::new(spec.clone(), limits)?)
            }
            SystemSpec::Wedge { .. } => Arc::new(compose::Wedge::new(spec.clone(), limits)?),
            SystemSpec::Product { .. } => Arc::new(compose::Product::new(spec.clone(), limits)?),
        };
        Ok(System(inner))
    }
}

impl Deref for System {
    type Target = dyn DynamicalSystem;

    fn deref(&self) -> &Self::Target {
        self.0.as_ref()
    }
}

fn check_horizon(sys: &System, n: u64) -> Result<()> {
    let cap = sys.limits().max_horizon;
    if n > cap {
        return Err(Error::BudgetExceeded {
            what: "horizon",
            needed: n as u128,
            cap: cap as u128,
        });
    }
    Ok(())
}

pub fn evaluate(sys: &System, x: &PointSpec, n: u64) -> Result<PointSpec> {
    sys.check_point(x)?;
    sys.evaluate(x, n)
}

pub fn distance(sys: &System, p: &PointSpec, q: &PointSpec) -> Result<f64> {
    sys.check_point(p)?;
    sys.check_point(q)?;
    sys.distance(p, q)
}

pub fn cell_family(sys: &System, depth: u32) -> Result<Vec<Cell>> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be positive".into()));
    }
    if depth > sys.limits().max_depth {
        return Err(Error::BudgetExceeded {
            what: "depth",
            needed: depth as u128,
            cap: sys.limits().max_depth as u128,
        });
    }
    sys.cells(depth)
}

pub fn image_diameter_bounds(sys: &System, c: &Cell, n: u64) -> Result<Bounds> {
    check_horizon(sys, n)?;
    sys.check_cell(c)?;
    sys.image_diameter(c, n)
}

/// Validates that `n` is within the configured horizon cap.
pub fn horizon_ok(sys: &System, n: u64) -> Result<()> {
    check_horizon(sys, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rat;

    #[test]
    fn cell_family_full_shift() {
        let sys = System::build(&SystemSpec::FullShift { alphabet: 2 }).unwrap();
        let cells = cell_family(&sys, 2).unwrap();
        let names: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
        assert_eq!(names, ["C[00]", "C[01]", "C[10]", "C[11]"]);
        assert!(cell_family(&sys, 0).is_err());
    }

    #[test]
    fn rotation_identity_and_arcs() {
        let sys = System::build(&SystemSpec::Rotation { alpha: Rat::new(610, 987) }).unwrap();
        let x = PointSpec::torus(&[Rat::new(1, 3)]);
        assert_eq!(evaluate(&sys, &x, 0).unwrap(), x);
        assert_eq!(cell_family(&sys, 3).unwrap().len(), 8);
    }

    #[test]
    fn skew_closed_form() {
        let sys = System::build(&SystemSpec::SkewProduct { alpha: Rat::new(1, 8) }).unwrap();
        let x = PointSpec::torus(&[Rat::zero(), Rat::zero()]);
        assert_eq!(
            evaluate(&sys, &x, 4).unwrap(),
            PointSpec::torus(&[Rat::new(1, 2), Rat::new(3, 4)])
        );
    }

    #[test]
    fn circle_distance_wraps() {
        let sys = System::build(&SystemSpec::Rotation { alpha: Rat::new(610, 987) }).unwrap();
        let p = PointSpec::torus(&[Rat::new(1, 10)]);
        let q = PointSpec::torus(&[Rat::new(9, 10)]);
        assert!((distance(&sys, &p, &q).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn full_shift_distance() {
        let sys = System::build(&SystemSpec::FullShift { alphabet: 2 }).unwrap();
        let a = PointSpec::periodic("", "0");
        let b = PointSpec::periodic("1", "0");
        assert_eq!(distance(&sys, &a, &b).unwrap(), 1.0);
        assert_eq!(distance(&sys, &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn image_diameter_examples() {
        let rot = System::build(&SystemSpec::Rotation { alpha: Rat::new(610, 987) }).unwrap();
        let b = image_diameter_bounds(&rot, &Cell::arc(3, 5), 77).unwrap();
        assert_eq!((b.lower, b.upper), (0.125, 0.125));
        let skew = System::build(&SystemSpec::SkewProduct { alpha: Rat::new(610, 987) }).unwrap();
        let boxed = Cell::Dyadic {
            resolution: 5,
            corner: vec![3, 7],
        };
        assert!(image_diameter_bounds(&skew, &boxed, 32).unwrap().lower >= 0.5);
    }
}
