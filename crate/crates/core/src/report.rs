//! Verdicts and the JSON shape shared by all reports.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Three-valued outcome of a finite-horizon test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HoldsAtHorizon,
    Inconclusive,
    FailsAtHorizon,
}

impl Verdict {
    fn rank(self) -> u8 {
        match self {
            Verdict::HoldsAtHorizon => 0,
            Verdict::Inconclusive => 1,
            Verdict::FailsAtHorizon => 2,
        }
    }

    /// The less favourable of two verdicts.
    pub fn worst(self, other: Verdict) -> Verdict {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::HoldsAtHorizon
    }

    pub fn fails(self) -> bool {
        self == Verdict::FailsAtHorizon
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::HoldsAtHorizon => "holds-at-horizon",
            Verdict::Inconclusive => "inconclusive",
            Verdict::FailsAtHorizon => "fails-at-horizon",
        }
    }
}

/// Outcome of a diagnostic: verdict plus witness and the parameters it was reached at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticVerdict {
    pub property: String,
    pub verdict: Verdict,
    pub witness: Value,
    pub params: Value,
    pub runtime_ms: u64,
}

impl DiagnosticVerdict {
    pub fn new(property: &str, verdict: Verdict, witness: Value, params: Value) -> DiagnosticVerdict {
        DiagnosticVerdict {
            property: property.to_string(),
            verdict,
            witness,
            params,
            runtime_ms: 0,
        }
    }

    pub fn timed(mut self, start: Instant) -> DiagnosticVerdict {
        self.runtime_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "property": self.property,
            "verdict": self.verdict,
            "witness": self.witness,
            "params": self.params,
            "runtime_ms": self.runtime_ms,
        })
    }
}
