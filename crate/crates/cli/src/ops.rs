//! Operations selectable by name from a config.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, Context, Result};
use famdyn::constructions::{NewpropBundle, VisitFormula};
use famdyn::diagnostics::lyapunov::{lyapunov_numbers, LyapunovParams};
use famdyn::diagnostics::search::{li_yorke_search, proximal_partner_search, DEFAULT_PROXIMITY};
use famdyn::diagnostics::{
    family_transitivity, mixing_test, multi_sensitivity_test, sensitivity_constant, syndetic_equicontinuity,
    thick_sensitivity_profile, transitivity_test, weak_mixing_test,
};
use famdyn::entropy::{sep_count_exact, seq_entropy_estimate, SequenceSpec};
use famdyn::families::predicate;
use famdyn::hitting::{
    hitting_set, omega_limit_approx, omega_nt_approx, sensitivity_set, transitive_compact_evidence, visit_set,
    DEFAULT_MIN_WINDOW,
};
use famdyn::report::{DiagnosticVerdict, Verdict};
use famdyn::{Cell, PointSpec, System};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Params;

pub struct Ctx<'a> {
    pub sys: System,
    pub point: Option<PointSpec>,
    pub params: &'a Params,
}

impl Ctx<'_> {
    fn depth(&self) -> u32 {
        self.params.depth.unwrap_or(3)
    }

    fn horizon(&self) -> u64 {
        self.params.horizon.unwrap_or(100)
    }

    fn delta(&self) -> f64 {
        self.params.delta.unwrap_or(0.25)
    }

    fn point(&self) -> Result<PointSpec> {
        self.params
            .point
            .clone()
            .or_else(|| self.point.clone())
            .ok_or_else(|| anyhow!("this operation needs params.point (the system has no distinguished point)"))
    }

    fn cell(&self, which: &str) -> Result<Cell> {
        let c = match which {
            "u" => &self.params.u,
            _ => &self.params.v,
        };
        c.clone().ok_or_else(|| anyhow!("this operation needs params.{which}"))
    }
}

/// A named two-column series for `plot`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Series {
    pub columns: [String; 2],
    pub rows: Vec<[Value; 2]>,
}

impl Series {
    fn new(x: &str, y: &str) -> Series {
        Series {
            columns: [x.to_string(), y.to_string()],
            rows: Vec::new(),
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Value,
    /// `None` for operations that only compute.
    pub verdict: Option<Verdict>,
    pub series: BTreeMap<String, Series>,
    /// `(file name, CSV text)` side files.
    pub files: Vec<(String, String)>,
}

impl Outcome {
    fn computed(result: Value) -> Outcome {
        Outcome {
            result,
            ..Outcome::default()
        }
    }

    fn verdict(v: DiagnosticVerdict) -> Outcome {
        Outcome {
            verdict: Some(v.verdict),
            result: v.to_json(),
            ..Outcome::default()
        }
    }
}

pub trait Operation: Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn run(&self, ctx: &Ctx) -> Result<Outcome>;
}

struct FnOp {
    name: &'static str,
    summary: &'static str,
    run: fn(&Ctx) -> Result<Outcome>,
}

impl Operation for FnOp {
    fn name(&self) -> &'static str {
        self.name
    }

    fn summary(&self) -> &'static str {
        self.summary
    }

    fn run(&self, ctx: &Ctx) -> Result<Outcome> {
        (self.run)(ctx)
    }
}

static OPERATIONS: &[FnOp] = &[
    FnOp { name: "transitivity", summary: "every hitting set of depth cells nonempty", run: op_transitivity },
    FnOp { name: "weak-mixing", summary: "N(U, U) meets N(U, V) for every pair of depth cells", run: op_weak_mixing },
    FnOp { name: "mixing", summary: "every hitting set contains [tail_by, H]", run: op_mixing },
    FnOp { name: "family-transitivity", summary: "every hitting set in params.family", run: op_family },
    FnOp { name: "hitting-set", summary: "N(u, v) up to H", run: op_hitting },
    FnOp { name: "visit-set", summary: "N(point, u) up to H", run: op_visit },
    FnOp { name: "sensitivity-set", summary: "S(u, delta) up to H", run: op_sensitivity_set },
    FnOp { name: "sensitivity-constant", summary: "largest delta with all S(U, delta) nonempty", run: op_sens_constant },
    FnOp { name: "multi-sensitivity", summary: "k-fold intersections of sensitivity sets", run: op_multi },
    FnOp { name: "thick-sensitivity-profile", summary: "longest run of each S(U, delta)", run: op_thick_profile },
    FnOp { name: "syndetic-equicontinuity", summary: "gap bound of eps-small image times", run: op_syndetic_eq },
    FnOp { name: "lyapunov", summary: "the eight Lyapunov estimates, optionally over params.horizons", run: op_lyapunov },
    FnOp { name: "li-yorke", summary: "search for a Li-Yorke partner of the point", run: op_li_yorke },
    FnOp { name: "proximal-partners", summary: "fraction of cells with a proximal partner", run: op_proximal },
    FnOp { name: "omega-limit", summary: "cells visited in [H/2, H]", run: op_omega },
    FnOp { name: "omega-nt", summary: "cells kept by the hitting-family omega approximation", run: op_omega_nt },
    FnOp { name: "transitive-compact", summary: "omega-nt nonemptiness over a sample", run: op_transitive_compact },
    FnOp { name: "sep-count", summary: "exact (k, eps)-separated count on a subshift", run: op_sep_count },
    FnOp { name: "sequence-entropy", summary: "sequence entropy estimate with sep profiles", run: op_entropy },
    FnOp { name: "verify-newprop", summary: "newprop visit times avoid the return intervals", run: op_newprop },
    FnOp { name: "newprop-prefix", summary: "materialize and scan the newprop prefix", run: op_newprop_prefix },
];

pub fn operations() -> impl Iterator<Item = &'static dyn Operation> {
    OPERATIONS.iter().map(|op| op as &dyn Operation)
}

pub fn find(name: &str) -> Result<&'static dyn Operation> {
    operations().find(|op| op.name() == name).ok_or_else(|| {
        let names: Vec<&str> = operations().map(|op| op.name()).collect();
        anyhow!("unknown operation `{name}`; known: {}", names.join(", "))
    })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn op_transitivity(c: &Ctx) -> Result<Outcome> {
    Ok(Outcome::verdict(transitivity_test(&c.sys, c.depth(), c.horizon())?))
}

fn op_weak_mixing(c: &Ctx) -> Result<Outcome> {
    Ok(Outcome::verdict(weak_mixing_test(&c.sys, c.depth(), c.horizon())?))
}

fn op_mixing(c: &Ctx) -> Result<Outcome> {
    Ok(Outcome::verdict(mixing_test(&c.sys, c.depth(), c.horizon(), c.params.tail_by)?))
}

fn op_family(c: &Ctx) -> Result<Outcome> {
    let name = c.params.family.as_deref().context("family-transitivity needs params.family")?;
    let pred = predicate(name, c.params.family_params.clone().unwrap_or_default())?;
    Ok(Outcome::verdict(family_transitivity(&c.sys, pred.as_ref(), c.depth(), c.horizon())?))
}

fn op_hitting(c: &Ctx) -> Result<Outcome> {
    let set = hitting_set(&c.sys, &c.cell("u")?, &c.cell("v")?, c.horizon())?;
    Ok(Outcome::computed(set.to_json()))
}

fn op_visit(c: &Ctx) -> Result<Outcome> {
    let set = visit_set(&c.sys, &c.point()?, &c.cell("u")?, c.horizon())?;
    Ok(Outcome::computed(set.to_json()))
}

fn op_sensitivity_set(c: &Ctx) -> Result<Outcome> {
    let set = sensitivity_set(&c.sys, &c.cell("u")?, c.delta(), c.horizon())?;
    Ok(Outcome::computed(set.to_json()))
}

fn op_sens_constant(c: &Ctx) -> Result<Outcome> {
    let value = sensitivity_constant(&c.sys, c.depth(), c.horizon())?;
    Ok(Outcome::computed(json!({
        "sensitivity_constant": value,
        "params": { "depth": c.depth(), "horizon": c.horizon() },
    })))
}

fn op_multi(c: &Ctx) -> Result<Outcome> {
    let k = c.params.k.unwrap_or(2);
    Ok(Outcome::verdict(multi_sensitivity_test(&c.sys, k, c.depth(), c.delta(), c.horizon())?))
}

fn op_thick_profile(c: &Ctx) -> Result<Outcome> {
    let profile = thick_sensitivity_profile(&c.sys, c.depth(), c.delta(), c.horizon())?;
    let mut series = Series::new("cell_index", "max_run");
    let mut csv = String::from("index,cell,max_run\n");
    for row in profile["cells"].as_array().into_iter().flatten() {
        series.rows.push([row["index"].clone(), row["max_run"].clone()]);
        let _ = writeln!(csv, "{},{},{}", row["index"], row["cell"].as_str().unwrap_or(""), row["max_run"]);
    }
    Ok(Outcome {
        result: profile,
        series: BTreeMap::from([("max_run".to_string(), series)]),
        files: vec![("thick_profile.csv".into(), csv)],
        ..Outcome::default()
    })
}

fn op_syndetic_eq(c: &Ctx) -> Result<Outcome> {
    let eps = c.params.eps.unwrap_or(0.25);
    let gap = syndetic_equicontinuity(&c.sys, &c.point()?, eps, c.depth(), c.horizon())?;
    Ok(Outcome::computed(json!({
        "gap_bound": gap,
        "params": { "eps": eps, "depth": c.depth(), "horizon": c.horizon() },
    })))
}

fn op_lyapunov(c: &Ctx) -> Result<Outcome> {
    let horizons = c.params.horizons.clone().unwrap_or_else(|| vec![c.horizon()]);
    let mut reports = Vec::new();
    let mut series: BTreeMap<String, Series> = BTreeMap::new();
    let mut csv = String::from("horizon,L_r,L_r_bar,L_d,L_d_bar,L_mr,L_mr_bar,L_md,L_md_bar\n");
    for h in horizons {
        let p = LyapunovParams {
            depth: c.depth(),
            horizon: h,
            burn_in: c.params.burn_in,
            k: c.params.k.unwrap_or(3),
            sample: c.params.sample.clone(),
        };
        let report = lyapunov_numbers(&c.sys, &p)?;
        let estimates = report.estimates();
        let _ = writeln!(
            csv,
            "{h},{}",
            estimates.iter().map(|(_, v)| v.to_string()).collect::<Vec<_>>().join(",")
        );
        for (name, v) in estimates {
            series
                .entry(name.to_string())
                .or_insert_with(|| Series::new("horizon", name))
                .rows
                .push([json!(h), json!(v)]);
        }
        reports.push(report.to_json());
    }
    let result = if reports.len() == 1 {
        reports.pop().unwrap_or(Value::Null)
    } else {
        Value::Array(reports)
    };
    Ok(Outcome {
        result,
        series,
        files: vec![("lyapunov.csv".into(), csv)],
        ..Outcome::default()
    })
}

fn op_li_yorke(c: &Ctx) -> Result<Outcome> {
    let x = c.point()?;
    let found = li_yorke_search(&c.sys, &x, c.depth(), c.delta(), c.horizon(), c.params.burn_in, c.params.eps)?;
    let verdict = if found.is_some() {
        Verdict::HoldsAtHorizon
    } else {
        Verdict::Inconclusive
    };
    Ok(Outcome {
        verdict: Some(verdict),
        result: json!({
            "property": "li-yorke-partner",
            "verdict": verdict,
            "witness": to_value(&found),
            "params": {
                "depth": c.depth(),
                "delta": c.delta(),
                "horizon": c.horizon(),
                "eps": c.params.eps.unwrap_or(DEFAULT_PROXIMITY),
            },
        }),
        ..Outcome::default()
    })
}

fn op_proximal(c: &Ctx) -> Result<Outcome> {
    let eps = c.params.eps.unwrap_or(DEFAULT_PROXIMITY);
    let report = proximal_partner_search(&c.sys, &c.point()?, c.depth(), eps, c.horizon())?;
    Ok(Outcome::computed(to_value(&report)))
}

fn op_omega(c: &Ctx) -> Result<Outcome> {
    Ok(Outcome::computed(
        omega_limit_approx(&c.sys, &c.point()?, c.depth(), c.horizon())?.to_json(),
    ))
}

fn op_omega_nt(c: &Ctx) -> Result<Outcome> {
    let approx = omega_nt_approx(
        &c.sys,
        &c.point()?,
        c.depth(),
        c.horizon(),
        c.params.pair_budget,
        c.params.min_window.unwrap_or(DEFAULT_MIN_WINDOW),
    )?;
    Ok(Outcome::computed(approx.to_json()))
}

fn op_transitive_compact(c: &Ctx) -> Result<Outcome> {
    let sample = match &c.params.sample {
        Some(s) => s.clone(),
        None => vec![c.point()?],
    };
    let evidence = transitive_compact_evidence(
        &c.sys,
        &sample,
        c.depth(),
        c.horizon(),
        c.params.pair_budget,
        c.params.min_window.unwrap_or(DEFAULT_MIN_WINDOW),
    )?;
    Ok(Outcome::computed(evidence))
}

fn sequence(c: &Ctx) -> SequenceSpec {
    c.params.sequence.clone().unwrap_or(SequenceSpec::Full)
}

fn op_sep_count(c: &Ctx) -> Result<Outcome> {
    let k = c.params.k.unwrap_or(8);
    let eps = c.params.eps.unwrap_or(0.3);
    let count = sep_count_exact(&c.sys, &sequence(c), k, eps)?;
    Ok(Outcome::computed(json!({
        "sep": count.to_string(),
        "params": { "k": k, "eps": eps, "sequence": to_value(&sequence(c)) },
    })))
}

fn op_entropy(c: &Ctx) -> Result<Outcome> {
    let eps_list = c.params.eps_list.clone().unwrap_or_else(|| vec![0.3]);
    let k_max = c.params.k_max.unwrap_or(10);
    let est = seq_entropy_estimate(&c.sys, &sequence(c), &eps_list, k_max, c.params.sample.as_deref())?;
    let mut series = BTreeMap::new();
    let mut files = Vec::new();
    let best = est
        .profiles
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.slope.total_cmp(&b.1.slope).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i);
    for (i, profile) in est.profiles.iter().enumerate() {
        let mut s = Series::new("k", "log_sep");
        for (k, sep) in &profile.counts {
            s.rows.push([json!(k), json!((*sep as f64).ln())]);
        }
        if Some(i) == best {
            series.insert("log_sep".to_string(), s.clone());
        }
        series.insert(format!("log_sep_{i}"), s);
        files.push((format!("sep_profile_{i}.csv"), profile.to_csv()));
    }
    Ok(Outcome {
        result: est.to_json(),
        series,
        files,
        ..Outcome::default()
    })
}

fn op_newprop(c: &Ctx) -> Result<Outcome> {
    let bundle = NewpropBundle::new(c.params.base.unwrap_or(10))?;
    let formula = if c.params.mutated.unwrap_or(false) {
        VisitFormula::Mutated
    } else {
        VisitFormula::Construction
    };
    Ok(Outcome::verdict(bundle.verify_with(c.params.n_max.unwrap_or(5), formula)?))
}

fn op_newprop_prefix(c: &Ctx) -> Result<Outcome> {
    let bundle = NewpropBundle::new(c.params.base.unwrap_or(2))?;
    let report = bundle.verify_prefix(c.sys.limits())?;
    let ok = report["admissible"] == true && report["structure_matches"] == true;
    Ok(Outcome {
        verdict: Some(if ok { Verdict::HoldsAtHorizon } else { Verdict::FailsAtHorizon }),
        result: report,
        ..Outcome::default()
    })
}
