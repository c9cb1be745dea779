//! Wedge sums and products of systems.

use crate::error::{Error, Result};
use crate::systems::spec::{Cell, Limits, PointSpec, Side, SystemSpec};
use crate::systems::{Bounds, Candidate, DynamicalSystem, Hit, System};

/// Two copies of one system glued at a fixed point `q`; each step applies
/// the inner map and swaps sides. Cells are punctured at `q`.
#[derive(Debug)]
pub struct Wedge {
    spec: SystemSpec,
    inner: System,
    glue: PointSpec,
    limits: Limits,
}

impl Wedge {
    pub fn new(spec: SystemSpec, limits: Limits) -> Result<Wedge> {
        let SystemSpec::Wedge {
            left,
            left_fixed,
            right,
            right_fixed,
        } = &spec
        else {
            return Err(Error::InvalidSystem("not a wedge".into()));
        };
        if left != right || left_fixed.normalized() != right_fixed.normalized() {
            return Err(Error::InvalidSystem(
                "wedge sides must be copies of one system glued at the same point".into(),
            ));
        }
        let inner = System::with_limits(left, limits.clone())?;
        inner.check_point(left_fixed)?;
        let image = inner.evaluate(left_fixed, 1)?;
        if inner.distance(&image, left_fixed)? != 0.0 {
            return Err(Error::InvalidSystem("glue point is not fixed by the map".into()));
        }
        Ok(Wedge {
            glue: left_fixed.normalized(),
            spec,
            inner,
            limits,
        })
    }

    fn split<'a>(&self, x: &'a PointSpec) -> Result<(Side, &'a PointSpec)> {
        match x {
            PointSpec::Wedge { side, inner } => Ok((*side, inner)),
            other => Err(Error::SideMismatch(format!("{other:?} carries no side tag"))),
        }
    }

    fn split_cell<'a>(&self, c: &'a Cell) -> Result<(Side, &'a Cell)> {
        match c {
            Cell::Side { side, inner } => Ok((*side, inner)),
            other => Err(Error::InadmissibleCell(format!("{other} carries no side tag"))),
        }
    }

    fn tag(side: Side, cands: Vec<Candidate>) -> Vec<Candidate> {
        cands
            .into_iter()
            .map(|c| Candidate::new(c.family, PointSpec::wedge(side, c.point)))
            .collect()
    }
}

impl DynamicalSystem for Wedge {
    fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    fn limits(&self) -> &Limits {
        &self.limits
    }

    fn check_point(&self, x: &PointSpec) -> Result<()> {
        let (_, inner) = self.split(x)?;
        self.inner.check_point(inner)
    }

    fn evaluate(&self, x: &PointSpec, n: u64) -> Result<PointSpec> {
        let (side, inner) = self.split(x)?;
        Ok(PointSpec::wedge(side.after(n), self.inner.evaluate(inner, n)?))
    }

    fn distance(&self, p: &PointSpec, q: &PointSpec) -> Result<f64> {
        let (sp, ip) = self.split(p)?;
        let (sq, iq) = self.split(q)?;
        if sp == sq {
            return self.inner.distance(ip, iq);
        }
        let a = self.inner.distance_bounds(ip, &self.glue)?;
        let b = self.inner.distance_bounds(&self.glue, iq)?;
        if a.lower == a.upper && b.lower == b.upper {
            Ok(a.lower + b.lower)
        } else {
            Err(Error::Undecidable(self.limits.search_cap))
        }
    }

    fn distance_bounds(&self, p: &PointSpec, q: &PointSpec) -> Result<Bounds> {
        let (sp, ip) = self.split(p)?;
        let (sq, iq) = self.split(q)?;
        if sp == sq {
            return self.inner.distance_bounds(ip, iq);
        }
        let a = self.inner.distance_bounds(ip, &self.glue)?;
        let b = self.inner.distance_bounds(&self.glue, iq)?;
        Ok(a.add(b))
    }

    fn cells(&self, depth: u32) -> Result<Vec<Cell>> {
        let inner = self.inner.cells(depth)?;
        let total = 2 * inner.len() as u64;
        if total > self.limits.max_cells {
            return Err(Error::BudgetExceeded {
                what: "cells",
                needed: total as u128,
                cap: self.limits.max_cells as u128,
            });
        }
        Ok([Side::Left, Side::Right]
            .into_iter()
            .flat_map(|s| inner.iter().map(move |c| Cell::side(s, c.clone())))
            .collect())
    }

    fn check_cell(&self, c: &Cell) -> Result<()> {
        let (_, inner) = self.split_cell(c)?;
        self.inner.check_cell(inner)
    }

    fn cell_of(&self, x: &PointSpec, depth: u32) -> Result<Cell> {
        let (side, inner) = self.split(x)?;
        Ok(Cell::side(side, self.inner.cell_of(inner, depth)?))
    }

    fn contains(&self, c: &Cell, x: &PointSpec) -> Result<bool> {
        let (cs, ci) = self.split_cell(c)?;
        let (xs, xi) = self.split(x)?;
        Ok(cs == xs && self.inner.contains(ci, xi)?)
    }

    fn hits(&self, u: &Cell, v: &Cell, n: u64) -> Result<Hit> {
        let (us, ui) = self.split_cell(u)?;
        let (vs, vi) = self.split_cell(v)?;
        if us.after(n) != vs {
            self.inner.check_cell(ui)?;
            self.inner.check_cell(vi)?;
            return Ok(Hit::exact(false));
        }
        self.inner.hits(ui, vi, n)
    }

    fn image_diameter(&self, c: &Cell, n: u64) -> Result<Bounds> {
        let (_, inner) = self.split_cell(c)?;
        self.inner.image_diameter(inner, n)
    }

    fn point_spread(&self, x: &PointSpec, c: &Cell, n: u64) -> Result<Bounds> {
        let (xs, xi) = self.split(x)?;
        let (cs, ci) = self.split_cell(c)?;
        if xs != cs {
            return Err(Error::SideMismatch(format!("point on {xs:?} side, cell on {cs:?} side")));
        }
        self.inner.point_spread(xi, ci, n)
    }

    fn representative(&self, c: &Cell) -> Result<PointSpec> {
        let (side, inner) = self.split_cell(c)?;
        Ok(PointSpec::wedge(side, self.inner.representative(inner)?))
    }

    fn li_yorke_candidates(&self, x: &PointSpec, depth: u32, horizon: u64) -> Result<Vec<Candidate>> {
        let (side, inner) = self.split(x)?;
        Ok(Self::tag(side, self.inner.li_yorke_candidates(inner, depth, horizon)?))
    }

    fn proximal_candidates(&self, x: &PointSpec, c: &Cell, horizon: u64) -> Result<Vec<Candidate>> {
        let (_, xi) = self.split(x)?;
        let (side, ci) = self.split_cell(c)?;
        Ok(Self::tag(side, self.inner.proximal_candidates(xi, ci, horizon)?))
    }
}

/// Direct product with the max metric.
#[derive(Debug)]
pub struct Product {
    spec: SystemSpec,
    left: System,
    right: System,
    limits: Limits,
}

impl Product {
    pub fn new(spec: SystemSpec, limits: Limits) -> Result<Product> {
        let SystemSpec::Product { left, right } = &spec else {
            return Err(Error::InvalidSystem("not a product".into()));
        };
        Ok(Product {
            left: System::with_limits(left, limits.clone())?,
            right: System::with_limits(right, limits.clone())?,
            spec,
            limits,
        })
    }

    fn split(x: &PointSpec) -> Result<(&PointSpec, &PointSpec)> {
        match x {
            PointSpec::Pair { left, right } => Ok((left, right)),
            other => Err(Error::InvalidPoint(format!("{other:?} is not a pair"))),
        }
    }

    fn split_cell(c: &Cell) -> Result<(&Cell, &Cell)> {
        match c {
            Cell::Pair { left, right } => Ok((left, right)),
            other => Err(Error::InadmissibleCell(format!("{other} is not a pair"))),
        }
    }
}

impl DynamicalSystem for Product {
    fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    fn limits(&self) -> &Limits {
        &self.limits
    }

    fn check_point(&self, x: &PointSpec) -> Result<()> {
        let (l, r) = Self::split(x)?;
        self.left.check_point(l)?;
        self.right.check_point(r)
    }

    fn evaluate(&self, x: &PointSpec, n: u64) -> Result<PointSpec> {
        let (l, r) = Self::split(x)?;
        Ok(PointSpec::pair(self.left.evaluate(l, n)?, self.right.evaluate(r, n)?))
    }

    fn distance(&self, p: &PointSpec, q: &PointSpec) -> Result<f64> {
        let (pl, pr) = Self::split(p)?;
        let (ql, qr) = Self::split(q)?;
        Ok(self.left.distance(pl, ql)?.max(self.right.distance(pr, qr)?))
    }

    fn distance_bounds(&self, p: &PointSpec, q: &PointSpec) -> Result<Bounds> {
        let (pl, pr) = Self::split(p)?;
        let (ql, qr) = Self::split(q)?;
        Ok(self.left.distance_bounds(pl, ql)?.max(self.right.distance_bounds(pr, qr)?))
    }

    fn cells(&self, depth: u32) -> Result<Vec<Cell>> {
        let left = self.left.cells(depth)?;
        let right = self.right.cells(depth)?;
        let total = left.len() as u128 * right.len() as u128;
        if total > self.limits.max_cells as u128 {
            return Err(Error::BudgetExceeded {
                what: "cells",
                needed: total,
                cap: self.limits.max_cells as u128,
            });
        }
        Ok(left
            .iter()
            .flat_map(|l| right.iter().map(move |r| Cell::pair(l.clone(), r.clone())))
            .collect())
    }

    fn check_cell(&self, c: &Cell) -> Result<()> {
        let (l, r) = Self::split_cell(c)?;
        self.left.check_cell(l)?;
        self.right.check_cell(r)
    }

    fn cell_of(&self, x: &PointSpec, depth: u32) -> Result<Cell> {
        let (l, r) = Self::split(x)?;
        Ok(Cell::pair(self.left.cell_of(l, depth)?, self.right.cell_of(r, depth)?))
    }

    fn contains(&self, c: &Cell, x: &PointSpec) -> Result<bool> {
        let (cl, cr) = Self::split_cell(c)?;
        let (l, r) = Self::split(x)?;
        Ok(self.left.contains(cl, l)? && self.right.contains(cr, r)?)
    }

    fn hits(&self, u: &Cell, v: &Cell, n: u64) -> Result<Hit> {
        let (ul, ur) = Self::split_cell(u)?;
        let (vl, vr) = Self::split_cell(v)?;
        Ok(self.left.hits(ul, vl, n)?.and(self.right.hits(ur, vr, n)?))
    }

    fn image_diameter(&self, c: &Cell, n: u64) -> Result<Bounds> {
        let (l, r) = Self::split_cell(c)?;
        Ok(self.left.image_diameter(l, n)?.max(self.right.image_diameter(r, n)?))
    }

    fn point_spread(&self, x: &PointSpec, c: &Cell, n: u64) -> Result<Bounds> {
        let (xl, xr) = Self::split(x)?;
        let (cl, cr) = Self::split_cell(c)?;
        Ok(self
            .left
            .point_spread(xl, cl, n)?
            .max(self.right.point_spread(xr, cr, n)?))
    }

    fn representative(&self, c: &Cell) -> Result<PointSpec> {
        let (l, r) = Self::split_cell(c)?;
        Ok(PointSpec::pair(self.left.representative(l)?, self.right.representative(r)?))
    }

    fn li_yorke_candidates(&self, x: &PointSpec, depth: u32, horizon: u64) -> Result<Vec<Candidate>> {
        let (l, r) = Self::split(x)?;
        let mut out: Vec<Candidate> = self
            .left
            .li_yorke_candidates(l, depth, horizon)?
            .into_iter()
            .map(|c| Candidate::new(c.family, PointSpec::pair(c.point, r.clone())))
            .collect();
        out.extend(
            self.right
                .li_yorke_candidates(r, depth, horizon)?
                .into_iter()
                .map(|c| Candidate::new(c.family, PointSpec::pair(l.clone(), c.point))),
        );
        Ok(out)
    }

    fn proximal_candidates(&self, x: &PointSpec, c: &Cell, horizon: u64) -> Result<Vec<Candidate>> {
        let (xl, xr) = Self::split(x)?;
        let (cl, cr) = Self::split_cell(c)?;
        let side = |sys: &System, xi: &PointSpec, ci: &Cell| -> Result<Vec<PointSpec>> {
            let mut pts: Vec<PointSpec> = sys
                .proximal_candidates(xi, ci, horizon)?
                .into_iter()
                .map(|c| c.point)
                .take(4)
                .collect();
            if sys.contains(ci, xi)? {
                pts.insert(0, xi.clone());
            }
            Ok(pts)
        };
        let lefts = side(&self.left, xl, cl)?;
        let rights = side(&self.right, xr, cr)?;
        Ok(lefts
            .iter()
            .flat_map(|l| rights.iter().map(move |r| PointSpec::pair(l.clone(), r.clone())))
            .filter(|p| p != x)
            .map(|p| Candidate::new("product-graft", p))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wedge_spec() -> SystemSpec {
        let full = Box::new(SystemSpec::FullShift { alphabet: 2 });
        SystemSpec::Wedge {
            left: full.clone(),
            left_fixed: PointSpec::periodic("", "0"),
            right: full,
            right_fixed: PointSpec::periodic("", "0"),
        }
    }

    #[test]
    fn wedge_alternates_sides() {
        let w = Wedge::new(wedge_spec(), Limits::default()).unwrap();
        let x = PointSpec::wedge(Side::Left, PointSpec::periodic("1", "0"));
        let y = w.evaluate(&x, 3).unwrap();
        assert!(matches!(y, PointSpec::Wedge { side: Side::Right, .. }));
    }

    #[test]
    fn wedge_cross_distance_goes_through_glue() {
        let w = Wedge::new(wedge_spec(), Limits::default()).unwrap();
        let a = PointSpec::wedge(Side::Left, PointSpec::periodic("01", "0"));
        let b = PointSpec::wedge(Side::Right, PointSpec::periodic("1", "0"));
        assert_eq!(w.distance(&a, &b).unwrap(), 1.5);
    }

    #[test]
    fn wedge_needs_fixed_glue() {
        let full = Box::new(SystemSpec::FullShift { alphabet: 2 });
        let spec = SystemSpec::Wedge {
            left: full.clone(),
            left_fixed: PointSpec::periodic("", "01"),
            right: full,
            right_fixed: PointSpec::periodic("", "01"),
        };
        assert!(Wedge::new(spec, Limits::default()).is_err());
    }

    #[test]
    fn cross_side_hits_single_parity() {
        let w = Wedge::new(wedge_spec(), Limits::default()).unwrap();
        let u = Cell::side(Side::Left, Cell::cylinder("1"));
        let v = Cell::side(Side::Right, Cell::cylinder("1"));
        for n in 0..40 {
            assert_eq!(w.hits(&u, &v, n).unwrap().certain, n % 2 == 1);
        }
    }
}
