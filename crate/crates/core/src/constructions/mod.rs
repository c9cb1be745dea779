//! Explicit systems and points: `Λ_P`, the newprop bundle and the fixture registry.

pub mod newprop;

use crate::error::{Error, Result};
use crate::exact::Rat;
use crate::systems::{Limits, PSet, PointSpec, Side, SystemSpec, Word};

pub use newprop::{verify_newprop, NewpropBundle, VisitFormula};

/// `Λ_P`: binary sequences whose 1-positions pairwise differ by elements of `P`.
pub fn lambda_p(p: PSet) -> SystemSpec {
    SystemSpec::DiffSet { p }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: SystemSpec,
    /// Distinguished point, if the fixture has one.
    pub point: Option<PointSpec>,
}

pub const FIXTURE_NAMES: &[&str] = &[
    "full-2-shift",
    "full-3-shift",
    "golden-mean-shift",
    "two-fixed-points",
    "golden-rotation",
    "skew-product",
    "lambda-squares",
    "newprop-10",
    "newprop-2",
    "wedge-fullshift",
    "proximal-contraction",
    "product-fullshift",
];

fn golden() -> Rat {
    Rat::new(610, 987)
}

fn full(alphabet: u8) -> SystemSpec {
    SystemSpec::FullShift { alphabet }
}

fn newprop_fixture(name: &'static str, description: &'static str, base: u32) -> Result<Fixture> {
    let bundle = NewpropBundle::new(base)?;
    Ok(Fixture {
        name,
        description,
        spec: lambda_p(bundle.p()),
        point: Some(bundle.point(&Limits::default())),
    })
}

pub fn fixture(name: &str) -> Result<Fixture> {
    let zero = PointSpec::periodic("", "0");
    let f = |name, description, spec, point| Fixture {
        name,
        description,
        spec,
        point,
    };
    Ok(match name {
        "full-2-shift" => f("full-2-shift", "full shift on {0,1}", full(2), Some(zero)),
        "full-3-shift" => f("full-3-shift", "full shift on {0,1,2}", full(3), Some(zero)),
        "golden-mean-shift" => f(
            "golden-mean-shift",
            "SFT on {0,1} forbidding 11",
            SystemSpec::Sft {
                alphabet: 2,
                forbidden: vec![Word(vec![1, 1])],
            },
            Some(zero),
        ),
        "two-fixed-points" => f(
            "two-fixed-points",
            "SFT forbidding 01 and 10; only 0^inf and 1^inf",
            SystemSpec::Sft {
                alphabet: 2,
                forbidden: vec![Word(vec![0, 1]), Word(vec![1, 0])],
            },
            Some(zero),
        ),
        "golden-rotation" => f(
            "golden-rotation",
            "circle rotation by 610/987",
            SystemSpec::Rotation { alpha: golden() },
            Some(PointSpec::torus(&[Rat::new(1, 5)])),
        ),
        "skew-product" => f(
            "skew-product",
            "(x, y) -> (x + 610/987, x + y) on the 2-torus",
            SystemSpec::SkewProduct { alpha: golden() },
            Some(PointSpec::torus(&[Rat::new(1, 5), Rat::new(1, 7)])),
        ),
        "lambda-squares" => f(
            "lambda-squares",
            "Lambda_P with thick P = union of [m^2+1, m^2+m]",
            lambda_p(PSet::SquareBlocks),
            Some(zero),
        ),
        "newprop-10" => newprop_fixture(
            "newprop-10",
            "Lambda_P, P = {10^m + s : 1 <= s <= m}, with the newprop point",
            10,
        )?,
        "newprop-2" => newprop_fixture(
            "newprop-2",
            "Lambda_P, P = {2^m + s : 1 <= s <= m}, with the newprop point",
            2,
        )?,
        "wedge-fullshift" => f(
            "wedge-fullshift",
            "two full 2-shifts glued at 0^inf, map swaps sides",
            SystemSpec::Wedge {
                left: Box::new(full(2)),
                left_fixed: PointSpec::periodic("", "0"),
                right: Box::new(full(2)),
                right_fixed: PointSpec::periodic("", "0"),
            },
            Some(PointSpec::wedge(Side::Left, PointSpec::periodic("", "01"))),
        ),
        "proximal-contraction" => f(
            "proximal-contraction",
            "x -> x/2 on [0, 1], fixed point 0",
            SystemSpec::Contraction {
                factor: Rat::new(1, 2),
            },
            Some(PointSpec::torus(&[Rat::new(2, 3)])),
        ),
        "product-fullshift" => f(
            "product-fullshift",
            "full 2-shift times itself",
            SystemSpec::Product {
                left: Box::new(full(2)),
                right: Box::new(full(2)),
            },
            Some(PointSpec::pair(zero.clone(), PointSpec::periodic("", "1"))),
        ),
        other => return Err(Error::UnknownFixture(other.to_string())),
    })
}

pub fn fixtures() -> Vec<Fixture> {
    FIXTURE_NAMES
        .iter()
        .map(|n| fixture(n).expect("registered fixture builds"))
        .collect()
}
