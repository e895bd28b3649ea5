//! Custom fixtures from config files: a truth table as nested arrays, an
//! optional input distribution as a weight map, and an optional depolarizing
//! rate. The protocol built for a custom function is the classical reveal
//! with its forward-and-keep simulator.

use serde::Deserialize;
use std::path::Path;

use crate::proto::{ClassicalFunction, JointDistribution};
use crate::{Error, Result};

use super::noise::depolarize_fixture;
use super::reveal::classical_reveal_protocol;
use super::Fixture;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionSpec {
    table: Vec<Vec<usize>>,
    out_size: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionSpec {
    weights: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomFixtureSpec {
    id: String,
    function: FunctionSpec,
    #[serde(default)]
    distribution: Option<DistributionSpec>,
    #[serde(default)]
    noise: Option<f64>,
}

/// A loaded custom fixture with its optional evaluation distribution.
#[derive(Debug, Clone)]
pub struct CustomFixture {
    pub fixture: Fixture,
    pub distribution: Option<JointDistribution>,
}

/// Loads a fixture description from TOML (or JSON when the extension is
/// `.json`); unknown keys are rejected.
pub fn load_custom_fixture(path: &Path) -> Result<CustomFixture> {
    let text = std::fs::read_to_string(path)?;
    let spec: CustomFixtureSpec = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
    } else {
        toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
    };
    let function = ClassicalFunction::new(spec.function.table, spec.function.out_size)?;
    let mut fixture = classical_reveal_protocol(&function)?.with_id(&spec.id);
    if let Some(delta) = spec.noise {
        fixture = depolarize_fixture(&fixture, delta)?;
        fixture.id = spec.id.clone();
    }
    let distribution = spec
        .distribution
        .map(|d| JointDistribution::new(d.weights))
        .transpose()?;
    if let Some(p) = &distribution {
        if p.u_size() != function.u_size() || p.v_size() != function.v_size() {
            return Err(Error::Config(
                "distribution shape differs from the truth table".into(),
            ));
        }
    }
    Ok(CustomFixture {
        fixture,
        distribution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proto::{correctness_epsilon, security_epsilon};

    fn write_tmp(name: &str, text: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!("{}-{}", std::process::id(), name));
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn loads_toml_fixture_with_distribution_and_noise() {
        let path = write_tmp(
            "fixture.toml",
            r#"
id = "custom-xor"
noise = 0.0

[function]
table = [[0, 1], [1, 0]]
out_size = 2

[distribution]
weights = [[0.5, 0.0], [0.25, 0.25]]
"#,
        );
        let loaded = load_custom_fixture(&path).unwrap();
        assert_eq!(loaded.fixture.id, "custom-xor");
        let p = loaded.distribution.unwrap();
        let eps = correctness_epsilon(&loaded.fixture.protocol, &loaded.fixture.function, &p)
            .unwrap();
        assert!(eps < 1e-9);
        let sec = security_epsilon(
            &loaded.fixture.protocol,
            &loaded.fixture.function,
            &p,
            &loaded.fixture.ideal_adversary,
        )
        .unwrap();
        assert!(sec < 1e-9);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn rejects_unknown_keys_and_bad_shapes() {
        let path = write_tmp("bad1.toml", "id = \"x\"\nwhatever = 1\n[function]\ntable = [[0]]\nout_size = 1\n");
        assert!(load_custom_fixture(&path).is_err());
        std::fs::remove_file(&path).ok();

        let path = write_tmp(
            "bad2.toml",
            r#"
id = "x"
[function]
table = [[0, 1], [1, 0]]
out_size = 2
[distribution]
weights = [[1.0]]
"#,
        );
        assert!(load_custom_fixture(&path).is_err());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn json_fixture_loads() {
        let path = write_tmp(
            "fixture.json",
            r#"{"id": "custom-and", "function": {"table": [[0,0],[0,1]], "out_size": 2}}"#,
        );
        let loaded = load_custom_fixture(&path).unwrap();
        assert_eq!(loaded.fixture.function.eval(1, 1), 1);
        std::fs::remove_file(&path).ok();
    }
}
