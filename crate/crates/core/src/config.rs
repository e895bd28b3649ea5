//! Scenario configuration: file format (TOML or JSON) and validation.
//! Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Theorem1,
    Lemma1,
    Theorem2,
    Appendix,
    StrengthenEq,
    StrengthenIp,
    DisjTightness,
    QcoreSelftest,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Theorem1 => "theorem1",
            Scenario::Lemma1 => "lemma1",
            Scenario::Theorem2 => "theorem2",
            Scenario::Appendix => "appendix",
            Scenario::StrengthenEq => "strengthen-eq",
            Scenario::StrengthenIp => "strengthen-ip",
            Scenario::DisjTightness => "disj-tightness",
            Scenario::QcoreSelftest => "qcore-selftest",
        }
    }

    pub fn all() -> &'static [Scenario] {
        &[
            Scenario::Theorem1,
            Scenario::Lemma1,
            Scenario::Theorem2,
            Scenario::Appendix,
            Scenario::StrengthenEq,
            Scenario::StrengthenIp,
            Scenario::DisjTightness,
            Scenario::QcoreSelftest,
        ]
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::all()
            .iter()
            .copied()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s}")))
    }
}

fn default_net_cap() -> u128 {
    100_000
}

fn default_seed() -> u64 {
    1
}

/// Scenario configuration. Every field has a scenario-appropriate default;
/// unknown keys in a config file are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Base fixture id; scenarios with a fixed default may omit it.
    #[serde(default)]
    pub fixture: Option<String>,
    /// Depolarizing rates for noise sweeps.
    #[serde(default)]
    pub deltas: Vec<f64>,
    /// Net resolution; when omitted the scenario matches it to the measured
    /// security distance, coarsening only if the cell cap forces it.
    #[serde(default)]
    pub net_eps: Option<f64>,
    #[serde(default = "default_net_cap")]
    pub net_cap: u128,
    /// Alice's fixed input for the combined-attack checks.
    #[serde(default)]
    pub u0: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Output directory for report files (CLI side); not part of the
    /// experiment's identity, so never echoed into reports.
    #[serde(default, skip_serializing)]
    pub out: Option<String>,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        ScenarioConfig {
            scenario,
            fixture: None,
            deltas: Vec::new(),
            net_eps: None,
            net_cap: default_net_cap(),
            u0: 0,
            seed: default_seed(),
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for &d in &self.deltas {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::Config(format!(
                    "depolarizing rate {d} outside [0,1]"
                )));
            }
        }
        if let Some(e) = self.net_eps {
            if e <= 0.0 {
                return Err(Error::Config(format!("net resolution {e} must be positive")));
            }
        }
        if self.net_cap == 0 {
            return Err(Error::Config("net cap must be positive".into()));
        }
        Ok(())
    }

    /// Loads from TOML or JSON, deciding by extension (`.json` → JSON,
    /// anything else → TOML).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ScenarioConfig = if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        {
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
