//! Structured searches for Li-Yorke and proximal partners.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::hitting::orbit;
use crate::systems::{cell_family, Bounds, PointSpec, System};

/// Default proximity threshold `2^{-10}`.
pub const DEFAULT_PROXIMITY: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiYorkeWitness {
    pub point: PointSpec,
    pub family: &'static str,
    /// Time and certified upper bound of the closest approach in `[H_0, H]`.
    pub closest_at: u64,
    pub closest_upper: f64,
    /// Time and certified lower bound of the widest separation in `[H_0, H]`.
    pub farthest_at: u64,
    pub farthest_lower: f64,
}

fn distance_profile(sys: &System, x_orbit: &[PointSpec], y: &PointSpec, from: u64) -> Result<Vec<(u64, Bounds)>> {
    let horizon = x_orbit.len() as u64 - 1;
    let y_orbit = orbit(sys, y, horizon)?;
    (from..=horizon)
        .map(|n| Ok((n, sys.distance_bounds(&x_orbit[n as usize], &y_orbit[n as usize])?)))
        .collect()
}

/// Re-derives both threshold conditions with one evaluation per time.
fn revalidate(sys: &System, x: &PointSpec, w: &LiYorkeWitness, eps: f64, delta: f64) -> Result<bool> {
    let near = sys.distance_bounds(&sys.evaluate(x, w.closest_at)?, &sys.evaluate(&w.point, w.closest_at)?)?;
    let far = sys.distance_bounds(&sys.evaluate(x, w.farthest_at)?, &sys.evaluate(&w.point, w.farthest_at)?)?;
    Ok(near.upper < eps && far.lower > delta)
}

/// First candidate `y` in the depth-cell of `x` whose orbit distance to
/// `x` drops below `eps` and exceeds `delta`, both inside `[H_0, H]`.
#[allow(clippy::too_many_arguments)]
pub fn li_yorke_search(
    sys: &System,
    x: &PointSpec,
    depth: u32,
    delta: f64,
    horizon: u64,
    burn_in: Option<u64>,
    eps: Option<f64>,
) -> Result<Option<LiYorkeWitness>> {
    let from = burn_in.unwrap_or(horizon / 2).min(horizon);
    let eps = eps.unwrap_or(DEFAULT_PROXIMITY);
    let x_orbit = orbit(sys, x, horizon)?;
    let cell = sys.cell_of(x, depth)?;
    for cand in sys.li_yorke_candidates(x, depth, horizon)? {
        if !sys.contains(&cell, &cand.point)? {
            continue;
        }
        let profile = match distance_profile(sys, &x_orbit, &cand.point, from) {
            Ok(p) => p,
            Err(crate::Error::PrefixExhausted { .. }) => continue,
            Err(e) => return Err(e),
        };
        let closest = profile
            .iter()
            .min_by(|a, b| a.1.upper.total_cmp(&b.1.upper))
            .copied();
        let farthest = profile
            .iter()
            .max_by(|a, b| a.1.lower.total_cmp(&b.1.lower).then(b.0.cmp(&a.0)))
            .copied();
        let (Some((ca, cb)), Some((fa, fb))) = (closest, farthest) else {
            continue;
        };
        if cb.upper < eps && fb.lower > delta {
            let w = LiYorkeWitness {
                point: cand.point,
                family: cand.family,
                closest_at: ca,
                closest_upper: cb.upper,
                farthest_at: fa,
                farthest_lower: fb.lower,
            };
            if revalidate(sys, x, &w, eps, delta)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProximalReport {
    pub fraction: f64,
    pub cells: usize,
    pub found: usize,
    pub witnesses: Vec<Value>,
    pub params: Value,
}

/// For every depth-cell, looks for `y` in the cell with `min_{n ≤ H} d(T^n x, T^n y) < ε`.
pub fn proximal_partner_search(sys: &System, x: &PointSpec, depth: u32, eps: f64, horizon: u64) -> Result<ProximalReport> {
    let cells = cell_family(sys, depth)?;
    let x_orbit = orbit(sys, x, horizon)?;
    let mut witnesses = Vec::new();
    let mut found = 0;
    for cell in &cells {
        let mut hit = None;
        for cand in sys.proximal_candidates(x, cell, horizon)? {
            if !sys.contains(cell, &cand.point)? {
                continue;
            }
            let profile = match distance_profile(sys, &x_orbit, &cand.point, 0) {
                Ok(p) => p,
                Err(crate::Error::PrefixExhausted { .. }) => continue,
                Err(e) => return Err(e),
            };
            if let Some((n, b)) = profile.iter().find(|(_, b)| b.upper < eps) {
                hit = Some(json!({
                    "cell": cell.to_string(),
                    "point": serde_json::to_value(&cand.point).unwrap_or(Value::Null),
                    "family": cand.family,
                    "at": n,
                    "distance_upper": b.upper,
                }));
                break;
            }
        }
        if let Some(w) = hit {
            found += 1;
            witnesses.push(w);
        }
    }
    Ok(ProximalReport {
        fraction: found as f64 / cells.len() as f64,
        cells: cells.len(),
        found,
        witnesses,
        params: json!({ "depth": depth, "eps": eps, "horizon": horizon }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rat;
    use crate::systems::SystemSpec;

    #[test]
    fn full_shift_li_yorke_from_zero() {
        let sys = System::build(&SystemSpec::FullShift { alphabet: 2 }).unwrap();
        let zero = PointSpec::periodic("", "0");
        let w = li_yorke_search(&sys, &zero, 4, 0.4, 300, None, None).unwrap().unwrap();
        assert_eq!(w.family, "doubling-gap");
        assert!(w.closest_upper < DEFAULT_PROXIMITY && w.farthest_lower > 0.4);
    }

    #[test]
    fn rotation_has_no_li_yorke_pairs() {
        let sys = System::build(&SystemSpec::Rotation { alpha: Rat::new(610, 987) }).unwrap();
        let x = PointSpec::torus(&[Rat::new(1, 5)]);
        for delta in [0.01, 0.1, 0.3] {
            assert!(li_yorke_search(&sys, &x, 3, delta, 200, None, None).unwrap().is_none());
        }
    }

    #[test]
    fn proximal_fractions() {
        let sys = System::build(&SystemSpec::FullShift { alphabet: 2 }).unwrap();
        let zero = PointSpec::periodic("", "0");
        assert_eq!(proximal_partner_search(&sys, &zero, 3, 1.0 / 256.0, 200).unwrap().fraction, 1.0);
        let rot = System::build(&SystemSpec::Rotation { alpha: Rat::new(610, 987) }).unwrap();
        let x = PointSpec::torus(&[Rat::new(1, 5)]);
        assert_eq!(proximal_partner_search(&rot, &x, 3, 1.0 / 256.0, 200).unwrap().fraction, 0.0);
    }
}
