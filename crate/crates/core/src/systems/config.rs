//! TOML form of system and point specs.
//!
//! ```toml
//! kind = "wedge"
//! [left]
//! kind = "full-shift"
//! alphabet = 2
//! [left_fixed]
//! kind = "eventually-periodic"
//! preperiod = ""
//! period = "0"
//! ```

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::systems::spec::{PointSpec, SystemSpec};

fn to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::Parse(e.to_string()))
}

fn from_toml<T: DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn system_to_toml(spec: &SystemSpec) -> Result<String> {
    to_toml(spec)
}

pub fn system_from_toml(text: &str) -> Result<SystemSpec> {
    from_toml(text)
}

pub fn point_to_toml(point: &PointSpec) -> Result<String> {
    to_toml(point)
}

pub fn point_from_toml(text: &str) -> Result<PointSpec> {
    from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rat;
    use crate::systems::spec::{PSet, Side};

    #[test]
    fn wedge_round_trip() {
        let full = Box::new(SystemSpec::FullShift { alphabet: 2 });
        let spec = SystemSpec::Wedge {
            left: full.clone(),
            left_fixed: PointSpec::periodic("", "0"),
            right: full,
            right_fixed: PointSpec::periodic("", "0"),
        };
        let text = system_to_toml(&spec).unwrap();
        assert_eq!(system_from_toml(&text).unwrap(), spec);
        assert_eq!(system_to_toml(&system_from_toml(&text).unwrap()).unwrap(), text);
    }

    #[test]
    fn readable_forms() {
        let spec = system_from_toml("kind = \"rotation\"\nalpha = \"610/987\"\n").unwrap();
        assert_eq!(spec, SystemSpec::Rotation { alpha: Rat::new(610, 987) });
        let spec = system_from_toml("kind = \"diff-set\"\n[p]\nfamily = \"power-blocks\"\nbase = 10\n").unwrap();
        assert_eq!(spec, SystemSpec::DiffSet { p: PSet::PowerBlocks { base: 10 } });
        let p = PointSpec::wedge(Side::Right, PointSpec::torus(&[Rat::new(1, 3)]));
        assert_eq!(point_from_toml(&point_to_toml(&p).unwrap()).unwrap(), p);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(system_from_toml("kind = \"full-shift\"\nalphabet = 2\ncolour = 1\n").is_err());
    }
}
