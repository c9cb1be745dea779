//! The eight horizon-limited Lyapunov estimates.
//!
//! Every estimate is a min over witnesses of a max over times of a
//! separation value. Separation values are certified lower bounds, net of
//! the cell's own diameter: a value that does not exceed `diam U` counts as 0.
//!
//! * `d` variants: witnesses are cells, value `v(U, n)` is a lower bound on `diam T^n U`.
//! * `r` variants: witnesses are sample points, value `δ(x, n)` is a lower bound on
//!   `sup_{y ∈ cell(x)} d(T^n x, T^n y)`.
//! * overline variants restrict times to `[H_0, H]`.
//! * `m` variants take `K`-multisets and the min of the values at a common time.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagnostics::{check_tuple_budget, diameter_table, for_each_multiset, net};
use crate::error::{Error, Result};
use crate::systems::{cell_family, horizon_ok, Cell, PointSpec, System};

#[derive(Debug, Clone)]
pub struct LyapunovParams {
    pub depth: u32,
    pub horizon: u64,
    /// `H_0`, default `⌊H/2⌋`.
    pub burn_in: Option<u64>,
    pub k: usize,
    /// Defaults to one representative per cell.
    pub sample: Option<Vec<PointSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Relation {
    pub relation: String,
    pub holds: bool,
    /// `certified` relations hold by construction of the estimators.
    pub kind: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub l_r: f64,
    pub l_r_bar: f64,
    pub l_d: f64,
    pub l_d_bar: f64,
    pub l_mr: f64,
    pub l_mr_bar: f64,
    pub l_md: f64,
    pub l_md_bar: f64,
    pub params: Value,
    pub relations: Vec<Relation>,
    pub runtime_ms: u64,
}

impl LyapunovReport {
    pub fn estimates(&self) -> [(&'static str, f64); 8] {
        [
            ("L_r", self.l_r),
            ("L_r_bar", self.l_r_bar),
            ("L_d", self.l_d),
            ("L_d_bar", self.l_d_bar),
            ("L_mr", self.l_mr),
            ("L_mr_bar", self.l_mr_bar),
            ("L_md", self.l_md),
            ("L_md_bar", self.l_md_bar),
        ]
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }
}

fn max_over(row: &[f64], from: u64) -> f64 {
    row[from as usize..].iter().copied().fold(0.0, f64::max)
}

fn single(rows: &[Vec<f64>], from: u64) -> f64 {
    rows.iter().map(|r| max_over(r, from)).fold(f64::INFINITY, f64::min)
}

/// `(min over K-multisets of max_{n ≥ from_a} min_i, same with from_b)`.
fn multi(rows: &[Vec<f64>], k: usize, from_a: u64, from_b: u64) -> (f64, f64) {
    let (mut a, mut b) = (f64::INFINITY, f64::INFINITY);
    let len = rows[0].len();
    let mut joint = vec![0.0; len];
    for_each_multiset(rows.len(), k, |idx| {
        for (n, slot) in joint.iter_mut().enumerate() {
            *slot = idx.iter().map(|&i| rows[i][n]).fold(f64::INFINITY, f64::min);
        }
        a = a.min(max_over(&joint, from_a));
        b = b.min(max_over(&joint, from_b));
    });
    (a, b)
}

/// Per-point spread table, net of the diameter of the point's cell.
fn spread_table(sys: &System, sample: &[PointSpec], depth: u32, horizon: u64) -> Result<Vec<Vec<f64>>> {
    sample
        .par_iter()
        .map(|x| {
            let cell = sys.cell_of(x, depth)?;
            let own = sys.image_diameter(&cell, 0)?.upper;
            (0..=horizon)
                .map(|n| Ok(net(sys.point_spread(x, &cell, n)?.lower, own)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

pub fn default_sample(sys: &System, cells: &[Cell]) -> Result<Vec<PointSpec>> {
    cells.iter().map(|c| sys.representative(c)).collect()
}

pub fn lyapunov_numbers(sys: &System, p: &LyapunovParams) -> Result<LyapunovReport> {
    let start = Instant::now();
    horizon_ok(sys, p.horizon)?;
    if p.k < 2 {
        return Err(Error::InvalidParameter("multi estimates need K >= 2".into()));
    }
    let burn_in = p.burn_in.unwrap_or(p.horizon / 2);
    if burn_in > p.horizon {
        return Err(Error::InvalidParameter(format!(
            "burn-in {burn_in} exceeds horizon {}",
            p.horizon
        )));
    }
    let cells = cell_family(sys, p.depth)?;
    let sample = match &p.sample {
        Some(s) => s.clone(),
        None => default_sample(sys, &cells)?,
    };
    for x in &sample {
        sys.check_point(x)?;
    }
    let covered: Vec<Cell> = sample.iter().map(|x| sys.cell_of(x, p.depth)).collect::<Result<_>>()?;
    if let Some(missing) = cells.iter().find(|c| !covered.contains(c)) {
        return Err(Error::SampleTooSmall(format!(
            "no sample point in {missing}; every depth-{} cell needs one",
            p.depth
        )));
    }
    check_tuple_budget(sys, cells.len().max(sample.len()), p.k)?;

    let v = diameter_table(sys, &cells, p.horizon)?;
    let delta = spread_table(sys, &sample, p.depth, p.horizon)?;

    let l_d = single(&v, 0);
    let l_d_bar = single(&v, burn_in);
    let l_r = single(&delta, 0);
    let l_r_bar = single(&delta, burn_in);
    let (l_md, l_md_bar) = multi(&v, p.k, 0, burn_in);
    let (l_mr, l_mr_bar) = multi(&delta, p.k, 0, burn_in);

    let certified = [
        ("L_md >= L_mr", l_md >= l_mr),
        ("L_mr >= L_mr_bar", l_mr >= l_mr_bar),
        ("L_md >= L_md_bar", l_md >= l_md_bar),
        ("L_md_bar >= L_mr_bar", l_md_bar >= l_mr_bar),
        ("L_d >= L_md", l_d >= l_md),
        ("L_r >= L_mr", l_r >= l_mr),
        ("L_d >= L_r", l_d >= l_r),
        ("L_d >= L_d_bar", l_d >= l_d_bar),
        ("L_r >= L_r_bar", l_r >= l_r_bar),
    ];
    let mut relations: Vec<Relation> = certified
        .iter()
        .map(|(r, h)| Relation {
            relation: r.to_string(),
            holds: *h,
            kind: "certified",
        })
        .collect();
    relations.push(Relation {
        relation: "L_md <= 2 L_mr_bar".into(),
        holds: l_md <= 2.0 * l_mr_bar,
        kind: "informational",
    });

    Ok(LyapunovReport {
        l_r,
        l_r_bar,
        l_d,
        l_d_bar,
        l_mr,
        l_mr_bar,
        l_md,
        l_md_bar,
        params: json!({
            "depth": p.depth,
            "horizon": p.horizon,
            "burn_in": burn_in,
            "K": p.k,
            "sample_size": sample.len(),
        }),
        relations,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rat;
    use crate::systems::SystemSpec;

    fn params(depth: u32, horizon: u64) -> LyapunovParams {
        LyapunovParams {
            depth,
            horizon,
            burn_in: Some(horizon / 2),
            k: 3,
            sample: None,
        }
    }

    #[test]
    fn full_shift_all_one() {
        let sys = System::build(&SystemSpec::FullShift { alphabet: 2 }).unwrap();
        let r = lyapunov_numbers(&sys, &params(3, 16)).unwrap();
        for (name, v) in r.estimates() {
            assert_eq!(v, 1.0, "{name}");
        }
        assert!(r.relations.iter().all(|x| x.holds));
    }

    #[test]
    fn rotation_all_zero() {
        let sys = System::build(&SystemSpec::Rotation { alpha: Rat::new(610, 987) }).unwrap();
        let r = lyapunov_numbers(&sys, &params(3, 64)).unwrap();
        for (name, v) in r.estimates() {
            assert_eq!(v, 0.0, "{name}");
        }
    }

    #[test]
    fn sample_must_cover_cells() {
        let sys = System::build(&SystemSpec::FullShift { alphabet: 2 }).unwrap();
        let mut p = params(2, 8);
        p.sample = Some(vec![PointSpec::periodic("", "0")]);
        assert!(matches!(lyapunov_numbers(&sys, &p), Err(Error::SampleTooSmall(_))));
    }
}
