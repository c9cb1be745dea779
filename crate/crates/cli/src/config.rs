//! Experiment configuration.
//!
//! ```toml
//! operation = "weak-mixing"
//! output = "out"            # relative to the config file
//!
//! [system]
//! fixture = "full-2-shift"  # or an inline [system.spec] table
//!
//! [params]
//! depth = 2
//! horizon = 200
//!
//! [limits]
//! max_horizon = 100000
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use famdyn::constructions::fixture;
use famdyn::entropy::SequenceSpec;
use famdyn::families::FamilyParams;
use famdyn::{Cell, Limits, PointSpec, SystemSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operation: String,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub system: SystemRef,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub limits: Limits,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Exactly one of `fixture` and `spec`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemRef {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<SystemSpec>,
}

/// Operation parameters; each operation reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_by: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_window: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family_params: Option<FamilyParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<PointSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<Vec<PointSpec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Cell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Cell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutated: Option<bool>,
    /// Runs are always deterministic; `false` is rejected.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deterministic: Option<bool>,
}

/// The resolved system and its distinguished point, if any.
pub struct Resolved {
    pub spec: SystemSpec,
    pub point: Option<PointSpec>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.params.deterministic == Some(false) {
            bail!("deterministic = false is not supported; every run is deterministic");
        }
        match (&self.system.fixture, &self.system.spec) {
            (Some(_), Some(_)) => bail!("[system] takes either `fixture` or `spec`, not both"),
            (None, None) => bail!("[system] needs `fixture` or `spec`"),
            _ => Ok(()),
        }
    }

    pub fn resolve(&self) -> Result<Resolved> {
        match (&self.system.fixture, &self.system.spec) {
            (Some(name), None) => {
                let fx = fixture(name)?;
                Ok(Resolved {
                    spec: fx.spec,
                    point: fx.point,
                })
            }
            (None, Some(spec)) => Ok(Resolved {
                spec: spec.clone(),
                point: None,
            }),
            _ => bail!("[system] needs exactly one of `fixture` and `spec`"),
        }
    }

    /// Output directory, relative paths taken from the config file's directory.
    pub fn output_dir(&self, config_path: &Path) -> PathBuf {
        if self.output.is_absolute() {
            self.output.clone()
        } else {
            config_path
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .join(&self.output)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fixture_and_inline() {
        let c: ExperimentConfig = toml::from_str(
            "operation = \"transitivity\"\n[system]\nfixture = \"full-2-shift\"\n[params]\ndepth = 2\n",
        )
        .unwrap();
        assert_eq!(c.params.depth, Some(2));
        assert_eq!(c.output, PathBuf::from("out"));
        let c: ExperimentConfig = toml::from_str(
            "operation = \"transitivity\"\n[system.spec]\nkind = \"full-shift\"\nalphabet = 3\n",
        )
        .unwrap();
        assert_eq!(c.resolve().unwrap().spec, SystemSpec::FullShift { alphabet: 3 });
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = "operation = \"transitivity\"\ncolour = 1\n[system]\nfixture = \"full-2-shift\"\n";
        assert!(toml::from_str::<ExperimentConfig>(bad).is_err());
        let bad = "operation = \"transitivity\"\n[system]\nfixture = \"full-2-shift\"\n[params]\ndepht = 2\n";
        assert!(toml::from_str::<ExperimentConfig>(bad).is_err());
    }
}
