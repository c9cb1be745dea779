//! Property suites shared by `properties.rs` and `acceptance.rs`.
//!
//! Each suite runs [`CASES`] generated cases with a fixed-seed runner and
//! returns the first failure as text.

#![allow(dead_code)]

use famdyn::constructions::fixture;
use famdyn::exact::Rat;
use famdyn::families::{dual_consistent, WindowSet};
use famdyn::hitting::{hitting_set, invariance_evidence, omega_limit_approx, omega_nt_approx};
use famdyn::hnat::HNat;
use famdyn::systems::config::{point_from_toml, point_to_toml, system_from_toml, system_to_toml};
use famdyn::systems::shift::{DiffSetRule, ShiftRule};
use famdyn::systems::{PSet, Side, Word};
use famdyn::{Cell, PointSpec, System, SystemSpec};
use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const CASES: u32 = 1000;

pub fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

fn sys(name: &str) -> System {
    System::build(&fixture(name).expect("fixture").spec).expect("fixture builds")
}

fn word(symbols: Vec<u8>) -> Word {
    Word(symbols)
}

fn ep(alphabet: u8) -> impl Strategy<Value = PointSpec> {
    (
        prop::collection::vec(0..alphabet, 0..6),
        prop::collection::vec(0..alphabet, 1..5),
    )
        .prop_map(|(pre, per)| {
            PointSpec::EventuallyPeriodic {
                preperiod: word(pre),
                period: word(per),
            }
            .normalized()
        })
}

/// Golden-mean points: concatenations of the blocks `0` and `10`.
fn golden_point() -> impl Strategy<Value = PointSpec> {
    let blocks = |lo, hi| {
        prop::collection::vec(prop::bool::ANY, lo..hi)
            .prop_map(|bs| bs.into_iter().flat_map(|b| if b { vec![1u8, 0] } else { vec![0] }).collect::<Vec<u8>>())
    };
    (blocks(0, 5), blocks(1, 4)).prop_map(|(pre, per)| {
        PointSpec::EventuallyPeriodic {
            preperiod: word(pre),
            period: word(per),
        }
        .normalized()
    })
}

/// `Λ_P` points with finitely many 1s, built greedily from random gaps.
fn lambda_point(p: PSet) -> impl Strategy<Value = PointSpec> {
    prop::collection::vec(1u64..20, 0..5).prop_map(move |gaps| {
        let mut ones: Vec<u64> = Vec::new();
        let mut pos = 0;
        for g in gaps {
            pos += g;
            if ones.iter().all(|&o| p.contains(pos - o)) {
                ones.push(pos);
            }
        }
        let len = ones.last().map_or(0, |&l| l + 1);
        let pre: Vec<u8> = (0..len).map(|i| u8::from(ones.contains(&i))).collect();
        PointSpec::EventuallyPeriodic {
            preperiod: word(pre),
            period: word(vec![0]),
        }
        .normalized()
    })
}

fn unit_rat() -> impl Strategy<Value = Rat> {
    (1u64..1000).prop_flat_map(|q| (0..q).prop_map(move |p| Rat::new(p as i64, q as i64)))
}

fn torus(dims: usize) -> impl Strategy<Value = PointSpec> {
    prop::collection::vec(unit_rat(), dims).prop_map(|c| PointSpec::torus(&c))
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Left), Just(Side::Right)]
}

/// Fixture names whose distance is total on the generated points.
const METRIC_FIXTURES: [&str; 8] = [
    "full-2-shift",
    "golden-mean-shift",
    "lambda-squares",
    "golden-rotation",
    "skew-product",
    "proximal-contraction",
    "wedge-fullshift",
    "product-fullshift",
];

fn point_for(kind: usize) -> BoxedStrategy<PointSpec> {
    match kind {
        0 => ep(2).boxed(),
        1 => golden_point().boxed(),
        2 => lambda_point(PSet::SquareBlocks).boxed(),
        3 => torus(1).boxed(),
        4 => torus(2).boxed(),
        5 => torus(1).boxed(),
        6 => (side(), ep(2)).prop_map(|(s, p)| PointSpec::wedge(s, p)).boxed(),
        _ => (ep(2), ep(2)).prop_map(|(a, b)| PointSpec::pair(a, b)).boxed(),
    }
}

fn systems() -> Vec<System> {
    METRIC_FIXTURES.iter().map(|n| sys(n)).collect()
}

pub fn semigroup_law() -> Result<(), String> {
    let all = systems();
    let strategy = (0..all.len()).prop_flat_map(|k| (Just(k), point_for(k), 0u64..60, 0u64..60));
    run(strategy, |(k, x, m, n)| {
        let s = &all[k];
        let lhs = s.evaluate(&s.evaluate(&x, m).unwrap(), n).unwrap();
        let rhs = s.evaluate(&x, m + n).unwrap();
        prop_assert_eq!(lhs, rhs, "{} m={} n={}", METRIC_FIXTURES[k], m, n);
        Ok(())
    })
}

pub fn metric_axioms() -> Result<(), String> {
    let all = systems();
    let strategy = (0..all.len()).prop_flat_map(|k| (Just(k), point_for(k), point_for(k), point_for(k)));
    run(strategy, |(k, x, y, z)| {
        let s = &all[k];
        let d = |a: &PointSpec, b: &PointSpec| s.distance(a, b).unwrap();
        let diameter = s.spec().metric_profile().diameter;
        prop_assert_eq!(d(&x, &x), 0.0);
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &y) >= 0.0 && d(&x, &y) <= diameter);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12, "triangle in {}", METRIC_FIXTURES[k]);
        if k <= 2 && x != y {
            prop_assert!(d(&x, &y) > 0.0);
        }
        Ok(())
    })
}

const OMEGA_FIXTURES: [&str; 4] = ["full-2-shift", "golden-mean-shift", "lambda-squares", "golden-rotation"];

fn omega_case() -> impl Strategy<Value = (usize, PointSpec, u64, u64, usize, usize)> {
    (0..OMEGA_FIXTURES.len()).prop_flat_map(|k| (Just(k), point_for(k), 8u64..20, 0u64..10, 0usize..16, 0usize..8))
}

pub fn omega_nt_monotone() -> Result<(), String> {
    let all: Vec<System> = OMEGA_FIXTURES.iter().map(|n| sys(n)).collect();
    run(omega_case(), |(k, x, h, dh, b, db)| {
        let s = &all[k];
        let approx = |h, budget| omega_nt_approx(s, &x, 2, h, budget, 8).unwrap();
        let full = approx(h, None);
        let small = approx(h, Some(b));
        prop_assert!(approx(h + dh, None).is_subset(&full), "horizon");
        prop_assert!(approx(h, Some(b + db)).is_subset(&small), "budget");
        prop_assert!(full.is_subset(&small), "full budget");
        Ok(())
    })
}

pub fn omega_nt_within_omega_t() -> Result<(), String> {
    let all: Vec<System> = OMEGA_FIXTURES.iter().map(|n| sys(n)).collect();
    run(omega_case(), |(k, x, h, _, b, _)| {
        let s = &all[k];
        let t = omega_limit_approx(s, &x, 2, h).unwrap();
        prop_assert!(omega_nt_approx(s, &x, 2, h, Some(b), 8).unwrap().is_subset(&t));
        prop_assert!(omega_nt_approx(s, &x, 2, h, None, 8).unwrap().is_subset(&t));
        Ok(())
    })
}

fn pset() -> impl Strategy<Value = PSet> {
    prop_oneof![
        Just(PSet::All),
        Just(PSet::Evens),
        Just(PSet::Odds),
        Just(PSet::SquareBlocks),
        (2u32..11).prop_map(|base| PSet::PowerBlocks { base }),
        prop::collection::vec(1u64..30, 0..10).prop_map(|members| PSet::Finite { members }),
    ]
}

pub fn lambda_p_hereditary() -> Result<(), String> {
    let strategy = (pset(), prop::collection::vec(prop::bool::weighted(0.25), 0..24));
    run(strategy, |(p, bits)| {
        let w: Vec<u8> = bits.into_iter().map(u8::from).collect();
        let rule = DiffSetRule::new(p.clone());
        let ones: Vec<usize> = (0..w.len()).filter(|&i| w[i] == 1).collect();
        let pairs_ok = ones
            .iter()
            .enumerate()
            .all(|(i, &a)| ones[i + 1..].iter().all(|&b| p.contains((b - a) as u64)));
        prop_assert_eq!(rule.admissible(&w), pairs_ok, "pair scan disagrees on {:?}", w);
        if pairs_ok {
            for i in 0..w.len() {
                for j in i..=w.len() {
                    prop_assert!(rule.admissible(&w[i..j]), "subword {}..{} of {:?}", i, j, w);
                }
            }
        }
        Ok(())
    })
}

pub fn dual_consistency() -> Result<(), String> {
    // a set with a run of length L against a set whose gaps are all at most L
    let strategy = (1u64..12, 0u64..60, prop::collection::vec(1u64..12, 1..40), prop::collection::vec(0u64..80, 0..20));
    run(strategy, |(run_len, run_at, gaps, extra)| {
        let mut syn = Vec::new();
        let mut pos = 0;
        for g in gaps {
            pos += g.min(run_len);
            syn.push(pos - 1);
        }
        let horizon = syn.last().copied().unwrap_or(0) + run_len.saturating_sub(1);
        let syndetic = WindowSet::new(horizon, syn.iter().copied().filter(|&n| n <= horizon)).unwrap();
        let start = run_at.min(horizon.saturating_sub(run_len - 1));
        let thick = WindowSet::new(
            horizon,
            (start..start + run_len).chain(extra.into_iter().filter(|&n| n <= horizon)),
        )
        .unwrap();
        prop_assert_eq!(
            dual_consistent(&thick, run_len, &syndetic),
            Some(true),
            "thick {:?}, syndetic {:?}",
            thick.members(),
            syndetic.members()
        );
        Ok(())
    })
}

fn leaf_spec() -> impl Strategy<Value = SystemSpec> {
    prop_oneof![
        (2u8..5).prop_map(|alphabet| SystemSpec::FullShift { alphabet }),
        prop::collection::vec(prop::collection::vec(0u8..2, 1..4), 0..4).prop_map(|ws| SystemSpec::Sft {
            alphabet: 2,
            forbidden: ws.into_iter().map(Word).collect(),
        }),
        pset().prop_map(|p| SystemSpec::DiffSet { p }),
        unit_rat().prop_map(|alpha| SystemSpec::Rotation { alpha }),
        unit_rat().prop_map(|alpha| SystemSpec::SkewProduct { alpha }),
        unit_rat().prop_map(|factor| SystemSpec::Contraction { factor }),
    ]
}

fn any_spec() -> impl Strategy<Value = SystemSpec> {
    prop_oneof![
        leaf_spec(),
        (leaf_spec(), ep(2)).prop_map(|(s, p)| SystemSpec::Wedge {
            left: Box::new(s.clone()),
            left_fixed: p.clone(),
            right: Box::new(s),
            right_fixed: p,
        }),
        (leaf_spec(), leaf_spec()).prop_map(|(a, b)| SystemSpec::Product {
            left: Box::new(a),
            right: Box::new(b),
        }),
    ]
}

fn any_point() -> impl Strategy<Value = PointSpec> {
    prop_oneof![
        ep(3),
        torus(2),
        (side(), ep(2)).prop_map(|(s, p)| PointSpec::wedge(s, p)),
        (ep(2), torus(1)).prop_map(|(a, b)| PointSpec::pair(a, b)),
    ]
}

pub fn toml_round_trip() -> Result<(), String> {
    run((any_spec(), any_point()), |(spec, point)| {
        let text = system_to_toml(&spec).unwrap();
        prop_assert_eq!(&system_from_toml(&text).unwrap(), &spec);
        prop_assert_eq!(system_to_toml(&system_from_toml(&text).unwrap()).unwrap(), text);
        let text = point_to_toml(&point).unwrap();
        prop_assert_eq!(point_from_toml(&text).unwrap(), point);
        Ok(())
    })
}

pub fn window_set_round_trip() -> Result<(), String> {
    run((0u64..300, prop::collection::vec(0u64..300, 0..80)), |(h, members)| {
        let s = WindowSet::new(h, members.into_iter().filter(|&n| n <= h)).unwrap();
        prop_assert_eq!(&WindowSet::from_json(&s.to_json()).unwrap(), &s);
        prop_assert_eq!(&WindowSet::from_csv(&s.to_csv()).unwrap(), &s);
        prop_assert_eq!(&WindowSet::from_rle(&s.to_rle()).unwrap(), &s);
        Ok(())
    })
}

const SHIFT_FIXTURES: [&str; 3] = ["full-2-shift", "golden-mean-shift", "lambda-squares"];

pub fn invariance_check() -> Result<(), String> {
    let all: Vec<System> = SHIFT_FIXTURES.iter().map(|n| sys(n)).collect();
    let strategy = (0..SHIFT_FIXTURES.len()).prop_flat_map(|k| (Just(k), point_for(k), 2u32..4, 12u64..22));
    run(strategy, |(k, x, depth, h)| {
        let evidence = invariance_evidence(&all[k], &x, depth, h, 8).unwrap();
        prop_assert_eq!(&evidence["holds"], &serde_json::Value::Bool(true), "{}", evidence["missing"]);
        Ok(())
    })
}

fn cylinder_word(alphabet: u8) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..alphabet, 1..4)
}

/// `n ∈ N(U, ∪_a C[a·v])` iff `n + 1 ∈ N(U, C[v])`, and `0 ∈ N(U, U)`.
pub fn hitting_shift_compatibility() -> Result<(), String> {
    let all: Vec<System> = SHIFT_FIXTURES.iter().map(|n| sys(n)).collect();
    let strategy = (0..SHIFT_FIXTURES.len(), cylinder_word(2), cylinder_word(2), 0u64..30);
    run(strategy, |(k, u, v, h)| {
        let s = &all[k];
        let cu = Cell::Cylinder { word: Word(u) };
        let cv = Cell::Cylinder { word: Word(v.clone()) };
        if s.check_cell(&cu).is_err() || s.check_cell(&cv).is_err() {
            return Ok(());
        }
        prop_assert!(hitting_set(s, &cu, &cu, h).unwrap().certain.contains(0));
        let direct = hitting_set(s, &cu, &cv, h + 1).unwrap().certain;
        let mut preimage = vec![false; h as usize + 1];
        for a in 0..2u8 {
            let mut av = vec![a];
            av.extend(&v);
            let c = Cell::Cylinder { word: Word(av) };
            if s.check_cell(&c).is_ok() {
                for &n in hitting_set(s, &cu, &c, h).unwrap().certain.members() {
                    preimage[n as usize] = true;
                }
            }
        }
        for n in 0..=h {
            prop_assert_eq!(preimage[n as usize], direct.contains(n + 1), "n = {}", n);
        }
        Ok(())
    })
}

pub fn hnat_arithmetic() -> Result<(), String> {
    let strategy = (2u32..17, any::<u64>(), any::<u64>(), 0u64..40);
    run(strategy, |(base, a, b, k)| {
        let (x, y) = (HNat::from_u64(base, a), HNat::from_u64(base, b));
        let sum = BigUint::from(a) + BigUint::from(b);
        prop_assert_eq!(x.add(&y).to_biguint(128), Some(sum.clone()));
        prop_assert_eq!(x.add(&y), HNat::from_biguint(base, &sum));
        prop_assert_eq!(x.cmp(&y), a.cmp(&b));
        let diff = x.checked_sub_small(k).unwrap().map(|d| d.to_u64().unwrap());
        prop_assert_eq!(diff, a.checked_sub(k));
        Ok(())
    })
}

/// Every suite with its name.
pub type Suite = fn() -> Result<(), String>;

pub fn suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("semigroup law", semigroup_law),
        ("metric axioms", metric_axioms),
        ("omega_NT monotone in H and budget", omega_nt_monotone),
        ("omega_NT within omega_T", omega_nt_within_omega_t),
        ("Lambda_P hereditary admissibility", lambda_p_hereditary),
        ("families dual consistency", dual_consistency),
        ("TOML round trip", toml_round_trip),
        ("window set round trip", window_set_round_trip),
        ("positive-invariance evidence", invariance_check),
        ("hitting shift compatibility", hitting_shift_compatibility),
        ("hereditary naturals", hnat_arithmetic),
    ]
}
