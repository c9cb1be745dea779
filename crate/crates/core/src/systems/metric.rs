//! Circle rotation, torus skew product and interval contraction, all with
//! exact rational orbits and dyadic boxes as cells.

use num_traits::Pow;

use crate::error::{Error, Result};
use crate::exact::{circle_distance, triangular, Rat};
use crate::systems::spec::{Cell, Limits, PointSpec, SystemSpec};
use crate::systems::{Bounds, Candidate, DynamicalSystem, Hit};

#[derive(Debug, Clone)]
enum Map {
    Rotation(Rat),
    Skew(Rat),
    Contraction(Rat),
}

#[derive(Debug)]
pub struct MetricSystem {
    spec: SystemSpec,
    map: Map,
    limits: Limits,
}

/// Open dyadic box `∏ (lo_i, lo_i + side)`.
#[derive(Debug, Clone)]
struct DyBox {
    lo: Vec<Rat>,
    side: Rat,
}

fn half() -> Rat {
    Rat::new(1, 2)
}

fn bounds_of(r: &Rat) -> Bounds {
    Bounds {
        lower: r.down(),
        upper: r.up(),
    }
}

/// `sup |t|` over the open interval `(lo, hi)` with `|·|` the distance to the nearest integer.
pub(crate) fn sup_circle_norm(lo: &Rat, hi: &Rat) -> Rat {
    if (hi - lo) >= Rat::one() {
        return half();
    }
    let shifted = lo - &half();
    let m = Rat(shifted.0.floor() + num_rational::BigRational::from_integer(1.into()));
    if &(&half() + &m) < hi {
        return half();
    }
    let a = circle_distance(lo, &Rat::zero());
    let b = circle_distance(hi, &Rat::zero());
    a.max(b)
}

/// Whether the open arcs `(a, a + la)` and `(b, b + lb)` of `R/Z` meet.
pub(crate) fn arcs_overlap(a: &Rat, la: &Rat, b: &Rat, lb: &Rat) -> bool {
    let one = Rat::one();
    if la >= &one || lb >= &one {
        return true;
    }
    let d = (b - a).frac();
    &d < la || (&d + lb) > one
}

impl MetricSystem {
    pub fn new(spec: SystemSpec, limits: Limits) -> Result<MetricSystem> {
        let map = match &spec {
            SystemSpec::Rotation { alpha } => Map::Rotation(alpha.clone()),
            SystemSpec::SkewProduct { alpha } => Map::Skew(alpha.clone()),
            SystemSpec::Contraction { factor } => {
                if factor <= &Rat::zero() || factor >= &Rat::one() {
                    return Err(Error::InvalidSystem("contraction factor must lie in (0, 1)".into()));
                }
                Map::Contraction(factor.clone())
            }
            other => return Err(Error::InvalidSystem(format!("{other:?} is not a metric system"))),
        };
        let sys = MetricSystem { spec, map, limits };
        match &sys.map {
            Map::Rotation(a) | Map::Skew(a) => {
                if !a.is_in_unit_interval() {
                    return Err(Error::InvalidSystem(format!("angle {a} must lie in [0, 1)")));
                }
                sys.check_denominator(a)?;
            }
            Map::Contraction(f) => sys.check_denominator(f)?,
        }
        Ok(sys)
    }

    fn check_denominator(&self, r: &Rat) -> Result<()> {
        let bits = r.denom().bits();
        if bits > self.limits.max_denominator_bits {
            return Err(Error::BudgetExceeded {
                what: "denominator bits",
                needed: bits as u128,
                cap: self.limits.max_denominator_bits as u128,
            });
        }
        Ok(())
    }

    fn dims(&self) -> usize {
        match self.map {
            Map::Skew(_) => 2,
            _ => 1,
        }
    }

    fn is_circle(&self) -> bool {
        !matches!(self.map, Map::Contraction(_))
    }

    fn coords<'a>(&self, x: &'a PointSpec) -> Result<&'a [Rat]> {
        match x {
            PointSpec::Torus { coords } if coords.len() == self.dims() => Ok(coords),
            other => Err(Error::InvalidPoint(format!(
                "expected a point with {} coordinate(s), got {other:?}",
                self.dims()
            ))),
        }
    }

    fn dybox(&self, c: &Cell) -> Result<DyBox> {
        match c {
            Cell::Dyadic { resolution, corner } => {
                if *resolution > 62 || corner.len() != self.dims() || corner.iter().any(|&k| k >> resolution != 0) {
                    return Err(Error::InadmissibleCell(c.to_string()));
                }
                let side = Rat::dyadic(*resolution);
                Ok(DyBox {
                    lo: corner.iter().map(|&k| &side * k).collect(),
                    side,
                })
            }
            other => Err(Error::InadmissibleCell(format!("{other} is not a dyadic box"))),
        }
    }

    fn coord_distance(&self, a: &Rat, b: &Rat) -> Rat {
        if self.is_circle() {
            circle_distance(a, b)
        } else {
            (a - b).abs()
        }
    }

    fn exact_distance(&self, p: &PointSpec, q: &PointSpec) -> Result<Rat> {
        let a = self.coords(p)?;
        let b = self.coords(q)?;
        Ok(a.iter()
            .zip(b)
            .map(|(x, y)| self.coord_distance(x, y))
            .max()
            .unwrap_or_else(Rat::zero))
    }

    fn power(&self, f: &Rat, n: u64) -> Result<Rat> {
        let e = i32::try_from(n).map_err(|_| Error::InvalidParameter(format!("exponent {n} too large")))?;
        Ok(Rat(f.0.clone().pow(e)))
    }

    fn exact_diameter(&self, b: &DyBox, n: u64) -> Result<Rat> {
        Ok(match &self.map {
            Map::Rotation(_) => sup_circle_norm(&Rat(-b.side.0.clone()), &b.side),
            Map::Skew(_) => {
                let spread = &b.side * (n + 1);
                sup_circle_norm(&Rat(-spread.0.clone()), &spread)
            }
            Map::Contraction(f) => &self.power(f, n)? * &b.side,
        })
    }

    fn exact_spread(&self, x: &[Rat], b: &DyBox, n: u64) -> Result<Rat> {
        let hi = |i: usize| &b.lo[i] + &b.side;
        Ok(match &self.map {
            Map::Rotation(_) => sup_circle_norm(&(&b.lo[0] - &x[0]), &(&hi(0) - &x[0])),
            Map::Skew(_) => {
                let (p, q) = (&b.lo[0] - &x[0], &hi(0) - &x[0]);
                let (r, s) = (&b.lo[1] - &x[1], &hi(1) - &x[1]);
                let first = sup_circle_norm(&p, &q);
                let second = sup_circle_norm(&(&(&p * n) + &r), &(&(&q * n) + &s));
                first.max(second)
            }
            Map::Contraction(f) => {
                let lam = self.power(f, n)?;
                let left = (&x[0] - &b.lo[0]).abs();
                let right = (&hi(0) - &x[0]).abs();
                &lam * &left.max(right)
            }
        })
    }

    fn skew_hits(&self, alpha: &Rat, u: &DyBox, v: &DyBox, n: u64) -> bool {
        let shift = (alpha * n).frac();
        let c = &v.lo[0] - &shift;
        let tri = Rat(num_rational::BigRational::from_integer(triangular(n))) ;
        let y_shift = &tri * alpha;
        let a_hi = &u.lo[0] + &u.side;
        let first = Rat((&u.lo[0] - &c).0.floor()) ;
        let first = &first - &Rat::int(1);
        for j in 0..4i64 {
            let off = &first + &Rat::int(j);
            let lo = (&c + &off).max(u.lo[0].clone());
            let hi = (&(&c + &off) + &v.side).min(a_hi.clone());
            if lo >= hi {
                continue;
            }
            let start = &(&(&lo * n) + &u.lo[1]) + &y_shift;
            let len = &(&(&hi - &lo) * n) + &u.side;
            if arcs_overlap(&start, &len, &v.lo[1], &v.side) {
                return true;
            }
        }
        false
    }

    fn subgrid(&self, b: &DyBox, resolution: u32, exclude: Option<&PointSpec>) -> Vec<PointSpec> {
        let fine = resolution + 3;
        let step = Rat::dyadic(fine);
        let offsets: Vec<Rat> = (0..8u64).map(|k| &(&step * k) + &Rat(&step.0 / num_rational::BigRational::from_integer(2.into()))).collect();
        let mut points: Vec<Vec<Rat>> = vec![Vec::new()];
        for lo in &b.lo {
            points = points
                .into_iter()
                .flat_map(|p| {
                    offsets.iter().map(move |o| {
                        let mut q = p.clone();
                        q.push(lo + o);
                        q
                    })
                })
                .collect();
        }
        points
            .into_iter()
            .map(|c| PointSpec::Torus { coords: c })
            .filter(|p| Some(p) != exclude)
            .collect()
    }
}

impl DynamicalSystem for MetricSystem {
    fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    fn limits(&self) -> &Limits {
        &self.limits
    }

    fn check_point(&self, x: &PointSpec) -> Result<()> {
        for c in self.coords(x)? {
            if !c.is_in_unit_interval() {
                return Err(Error::InvalidPoint(format!("coordinate {c} outside [0, 1)")));
            }
            if c.denom().bits() > self.limits.max_denominator_bits {
                return Err(Error::InvalidPoint(format!("coordinate {c} exceeds the denominator cap")));
            }
        }
        Ok(())
    }

    fn evaluate(&self, x: &PointSpec, n: u64) -> Result<PointSpec> {
        let c = self.coords(x)?;
        let coords = match &self.map {
            Map::Rotation(a) => vec![(&c[0] + &(a * n)).frac()],
            Map::Skew(a) => {
                let tri = Rat(num_rational::BigRational::from_integer(triangular(n)));
                let y = &(&c[1] + &(&c[0] * n)) + &(&tri * a);
                vec![(&c[0] + &(a * n)).frac(), y.frac()]
            }
            Map::Contraction(f) => vec![&self.power(f, n)? * &c[0]],
        };
        Ok(PointSpec::Torus { coords })
    }

    fn distance(&self, p: &PointSpec, q: &PointSpec) -> Result<f64> {
        Ok(self.exact_distance(p, q)?.to_f64())
    }

    fn distance_bounds(&self, p: &PointSpec, q: &PointSpec) -> Result<Bounds> {
        Ok(bounds_of(&self.exact_distance(p, q)?))
    }

    fn cells(&self, depth: u32) -> Result<Vec<Cell>> {
        let per_axis = 1u64.checked_shl(depth).filter(|_| depth <= 62).ok_or(Error::BudgetExceeded {
            what: "cells",
            needed: u128::MAX,
            cap: self.limits.max_cells as u128,
        })?;
        let total = (per_axis as u128).pow(self.dims() as u32);
        if total > self.limits.max_cells as u128 {
            return Err(Error::BudgetExceeded {
                what: "cells",
                needed: total,
                cap: self.limits.max_cells as u128,
            });
        }
        let mut corners: Vec<Vec<u64>> = vec![Vec::new()];
        for _ in 0..self.dims() {
            corners = corners
                .into_iter()
                .flat_map(|c| {
                    (0..per_axis).map(move |k| {
                        let mut v = c.clone();
                        v.push(k);
                        v
                    })
                })
                .collect();
        }
        Ok(corners
            .into_iter()
            .map(|corner| Cell::Dyadic {
                resolution: depth,
                corner,
            })
            .collect())
    }

    fn check_cell(&self, c: &Cell) -> Result<()> {
        self.dybox(c).map(|_| ())
    }

    fn cell_of(&self, x: &PointSpec, depth: u32) -> Result<Cell> {
        let corner = self
            .coords(x)?
            .iter()
            .map(|c| {
                let k = c.dyadic_index(depth);
                u64::try_from(k).map_err(|_| Error::InvalidPoint(format!("coordinate {c} outside [0, 1)")))
            })
            .collect::<Result<Vec<u64>>>()?;
        Ok(Cell::Dyadic {
            resolution: depth,
            corner,
        })
    }

    fn contains(&self, c: &Cell, x: &PointSpec) -> Result<bool> {
        self.dybox(c)?;
        let Cell::Dyadic { resolution, .. } = c else { unreachable!() };
        Ok(&self.cell_of(x, *resolution)? == c)
    }

    fn hits(&self, u: &Cell, v: &Cell, n: u64) -> Result<Hit> {
        let a = self.dybox(u)?;
        let b = self.dybox(v)?;
        let hit = match &self.map {
            Map::Rotation(alpha) => {
                let start = &a.lo[0] + &(alpha * n);
                arcs_overlap(&start, &a.side, &b.lo[0], &b.side)
            }
            Map::Skew(alpha) => self.skew_hits(alpha, &a, &b, n),
            Map::Contraction(f) => {
                let lam = self.power(f, n)?;
                let lo = &lam * &a.lo[0];
                let hi = &lam * &(&a.lo[0] + &a.side);
                lo < &b.lo[0] + &b.side && b.lo[0] < hi
            }
        };
        Ok(Hit::exact(hit))
    }

    fn image_diameter(&self, c: &Cell, n: u64) -> Result<Bounds> {
        let b = self.dybox(c)?;
        Ok(bounds_of(&self.exact_diameter(&b, n)?))
    }

    fn point_spread(&self, x: &PointSpec, c: &Cell, n: u64) -> Result<Bounds> {
        let b = self.dybox(c)?;
        Ok(bounds_of(&self.exact_spread(self.coords(x)?, &b, n)?))
    }

    fn representative(&self, c: &Cell) -> Result<PointSpec> {
        let b = self.dybox(c)?;
        let mid = Rat(&b.side.0 / num_rational::BigRational::from_integer(2.into()));
        Ok(PointSpec::Torus {
            coords: b.lo.iter().map(|lo| lo + &mid).collect(),
        })
    }

    fn li_yorke_candidates(&self, x: &PointSpec, depth: u32, _horizon: u64) -> Result<Vec<Candidate>> {
        let cell = self.cell_of(x, depth)?;
        let b = self.dybox(&cell)?;
        Ok(self
            .subgrid(&b, depth, Some(x))
            .into_iter()
            .map(|p| Candidate::new("grid", p))
            .collect())
    }

    fn proximal_candidates(&self, x: &PointSpec, c: &Cell, _horizon: u64) -> Result<Vec<Candidate>> {
        let b = self.dybox(c)?;
        let Cell::Dyadic { resolution, .. } = c else { unreachable!() };
        Ok(self
            .subgrid(&b, *resolution, Some(x))
            .into_iter()
            .map(|p| Candidate::new("grid", p))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn sup_norm_cases() {
        assert_eq!(sup_circle_norm(&rat("-1/8"), &rat("1/8")), rat("1/8"));
        assert_eq!(sup_circle_norm(&rat("-3/4"), &rat("3/4")), rat("1/2"));
        assert_eq!(sup_circle_norm(&rat("1/10"), &rat("3/10")), rat("3/10"));
        assert_eq!(sup_circle_norm(&rat("7/10"), &rat("9/10")), rat("3/10"));
        assert_eq!(sup_circle_norm(&rat("2/5"), &rat("3/5")), rat("1/2"));
    }

    #[test]
    fn arc_overlap_is_open() {
        assert!(!arcs_overlap(&rat("0"), &rat("1/2"), &rat("1/2"), &rat("1/2")));
        assert!(arcs_overlap(&rat("0"), &rat("1/2"), &rat("1/4"), &rat("1/2")));
        assert!(arcs_overlap(&rat("7/8"), &rat("1/4"), &rat("0"), &rat("1/16")));
    }

    /// Sampling oracle: an observed hit among sample points is a real hit.
    #[test]
    fn skew_hits_contain_sampled_hits() {
        let sys = MetricSystem::new(SystemSpec::SkewProduct { alpha: rat("610/987") }, Limits::default()).unwrap();
        let cells = sys.cells(2).unwrap();
        for u in &cells {
            let b = sys.dybox(u).unwrap();
            let pts = sys.subgrid(&b, 2, None);
            for n in 0..12 {
                for p in &pts {
                    let image = sys.evaluate(p, n).unwrap();
                    let v = sys.cell_of(&image, 2).unwrap();
                    assert!(sys.hits(u, &v, n).unwrap().certain, "{u} -> {v} at {n}");
                }
            }
        }
    }

    #[test]
    fn contraction_shrinks() {
        let sys = MetricSystem::new(SystemSpec::Contraction { factor: rat("1/2") }, Limits::default()).unwrap();
        let x = PointSpec::Torus { coords: vec![rat("3/4")] };
        assert_eq!(sys.evaluate(&x, 2).unwrap(), PointSpec::Torus { coords: vec![rat("3/16")] });
        let b = sys.image_diameter(&Cell::arc(2, 1), 3).unwrap();
        assert_eq!(b.lower, 1.0 / 32.0);
    }
}
