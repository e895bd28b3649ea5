//! The cheating-Alice pipeline: secure-state purification, Uhlmann cheat
//! isometry, attack execution, extracted conditional distributions, and the
//! average-success / independence bound checks with the perfect-case row
//! extractor.

pub mod lemma;
pub mod pipeline;

use serde::ser::SerializeMap;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::qcore::QuantumChannel;
use crate::proto::JointDistribution;
use crate::{Error, Result};

pub use lemma::{lemma1_check, theorem1_extract, Lemma1Report, Theorem1Extraction};
pub use pipeline::{
    attack_joint_distribution, build_secure_purification, construct_cheat_isometry,
    execute_attack, execute_attack_on, extract_q_tilde, AttackJoint, CheatBuild,
};

/// Conditional probability table: conditioning tuple → outcome → probability.
/// Rows with zero conditioning probability are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    table: BTreeMap<Vec<usize>, BTreeMap<usize, f64>>,
}

impl ConditionalDistribution {
    pub fn new(table: BTreeMap<Vec<usize>, BTreeMap<usize, f64>>) -> Result<Self> {
        for (cond, row) in &table {
            let total: f64 = row.values().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidDistribution(format!(
                    "conditional row {cond:?} sums to {total}"
                )));
            }
            if row.values().any(|&w| w < -1e-12) {
                return Err(Error::InvalidDistribution(format!(
                    "conditional row {cond:?} has a negative probability"
                )));
            }
        }
        Ok(ConditionalDistribution { table })
    }

    pub fn row(&self, cond: &[usize]) -> Option<&BTreeMap<usize, f64>> {
        self.table.get(cond)
    }

    pub fn require_row(&self, cond: &[usize]) -> Result<&BTreeMap<usize, f64>> {
        self.row(cond)
            .ok_or_else(|| Error::MissingRow(format!("{cond:?}")))
    }

    pub fn prob(&self, cond: &[usize], outcome: usize) -> f64 {
        self.table
            .get(cond)
            .and_then(|row| row.get(&outcome))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn conditioners(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.table.keys()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&Vec<usize>, &BTreeMap<usize, f64>)> {
        self.table.iter()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Convex mixture `Σ_k w_k · dists_k`, restricted to conditioners present
    /// in every component.
    pub fn mix(components: &[(f64, &ConditionalDistribution)]) -> Result<ConditionalDistribution> {
        if components.is_empty() {
            return Err(Error::InvalidDistribution("empty mixture".into()));
        }
        let mut table: BTreeMap<Vec<usize>, BTreeMap<usize, f64>> = BTreeMap::new();
        let first = components[0].1;
        for cond in first.conditioners() {
            if !components.iter().all(|(_, d)| d.row(cond).is_some()) {
                continue;
            }
            let mut row: BTreeMap<usize, f64> = BTreeMap::new();
            for (w, dist) in components {
                for (&outcome, &prob) in dist.row(cond).expect("checked above") {
                    *row.entry(outcome).or_insert(0.0) += w * prob;
                }
            }
            table.insert(cond.clone(), row);
        }
        ConditionalDistribution::new(table)
    }
}

impl Serialize for ConditionalDistribution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.table.len()))?;
        for (cond, row) in &self.table {
            let key = cond
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let row_str: BTreeMap<String, f64> =
                row.iter().map(|(k, v)| (k.to_string(), *v)).collect();
            map.serialize_entry(&key, &row_str)?;
        }
        map.end()
    }
}

/// The cheating map extracted from one pair of purifications.
#[derive(Debug, Clone)]
pub struct CheatIsometry {
    /// Isometry from Alice's purification registers into the ideal world's
    /// purifying registers plus the measured-input register.
    pub map: QuantumChannel,
    /// Input distribution the isometry was built under.
    pub source_distribution: JointDistribution,
    /// Overlap achieved against the secure purification.
    pub achieved_overlap: f64,
}

/// Summary of one full attack evaluation, serializable for reports.
#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub fixture_id: String,
    pub eps_corr: f64,
    pub eps_sec: f64,
    pub achieved_overlap: f64,
    pub avg_success: f64,
    pub independence_defect: f64,
    pub success_threshold: f64,
    pub defect_threshold: f64,
    pub success_pass: bool,
    pub defect_pass: bool,
    pub q: ConditionalDistribution,
    pub q_tilde: ConditionalDistribution,
}
