//! Constructing and executing the cheating strategy.

use std::collections::BTreeMap;

use crate::proto::{
    decode_reference, run_ideal_purified, run_ideal_purified_as, run_purified, ClassicalFunction,
    IdealAdversary, IdealRun, JointDistribution, TwoPartyProtocol, REG_R, REG_VT,
};
use crate::qcore::measure::outcome_distribution;
use crate::qcore::metrics::purified_distance;
use crate::qcore::uhlmann::uhlmann_isometry;
use crate::{Error, Result};

use super::{CheatIsometry, ConditionalDistribution};

/// Purification `|Ψ>` of the secure state, built by running the ideal world
/// isometrically: every CPTP stage is Stinespring-dilated and the dilation
/// environments (plus the functionality's measurement register) form the
/// purifying system `P`. Tracing them out reproduces `σ_{R X Ṽ Y′}` exactly.
pub fn build_secure_purification(
    f: &ClassicalFunction,
    p: &JointDistribution,
    adversary: &IdealAdversary,
) -> Result<IdealRun> {
    run_ideal_purified(f, p, adversary, true)
}

/// A cheat isometry together with the security level of the run it was
/// extracted from.
#[derive(Debug, Clone)]
pub struct CheatBuild {
    pub isometry: CheatIsometry,
    pub eps_sec: f64,
}

/// Runs both worlds under `p`, measures the security distance, and extracts
/// the Uhlmann isometry mapping Alice's purification registers into the
/// ideal world's purifiers and measured-input register.
pub fn construct_cheat_isometry(
    protocol: &TwoPartyProtocol,
    f: &ClassicalFunction,
    p: &JointDistribution,
    adversary: &IdealAdversary,
) -> Result<CheatBuild> {
    let run = run_purified(protocol, p)?;
    let phi = &run.state;

    let ideal = run_ideal_purified_as(f, p, adversary, true, protocol.alice_output())?;
    let psi = ideal.state.clone();

    // Security distance between the shared-system reductions.
    let mut shared: Vec<&str> = vec![REG_R, protocol.alice_output()];
    shared.extend(run.y_prime_labels());
    let rho = phi.partial_trace(&shared)?;
    let sigma = psi.partial_trace(&shared)?;
    let eps_sec = purified_distance(&rho, &sigma)?;

    let env_phi = run.x1_labels();
    let mut env_psi: Vec<&str> = ideal
        .purifier_labels
        .iter()
        .map(|s| s.as_str())
        .collect();
    env_psi.push(REG_VT);

    let uhlmann = uhlmann_isometry(phi, &psi, &env_phi, &env_psi)?;

    Ok(CheatBuild {
        isometry: CheatIsometry {
            map: uhlmann.isometry,
            source_distribution: p.clone(),
            achieved_overlap: uhlmann.achieved_overlap,
        },
        eps_sec,
    })
}

/// Runs the purified protocol under `p` (not necessarily the isometry's
/// source distribution), applies the cheat isometry to Alice's purification
/// registers, and measures `(R, Ṽ)`; returns `q(ṽ|u,v)` on the support
/// of `p`.
pub fn execute_attack(
    protocol: &TwoPartyProtocol,
    p: &JointDistribution,
    cheat: &CheatIsometry,
) -> Result<ConditionalDistribution> {
    let run = run_purified(protocol, p)?;
    execute_attack_on(&run, p, cheat)
}

/// As `execute_attack`, against an already-executed purified run (the run is
/// map-independent, so sweeps over many cheat isometries share it).
pub fn execute_attack_on(
    run: &crate::proto::PurifiedRun,
    p: &JointDistribution,
    cheat: &CheatIsometry,
) -> Result<ConditionalDistribution> {
    let attacked = cheat.map.apply_to_pure(&run.state)?;
    let joint = outcome_distribution(&attacked, &[REG_R, REG_VT])?;
    let v_size = p.v_size();
    let mut table: BTreeMap<Vec<usize>, BTreeMap<usize, f64>> = BTreeMap::new();
    for (digits, prob) in joint {
        let (u, v) = decode_reference(digits[0], v_size);
        let weight = p.prob(u, v);
        if weight <= 0.0 {
            return Err(Error::Numerics(format!(
                "outcome mass {prob:.3e} on zero-probability input ({u},{v})"
            )));
        }
        *table
            .entry(vec![u, v])
            .or_default()
            .entry(digits[1])
            .or_insert(0.0) += prob / weight;
    }
    ConditionalDistribution::new(table)
}

/// Joint distribution over `(u, v, ṽ, x)` from the attacked run, for the
/// end-to-end chain checks and the `r(x|u,v,ṽ)` diagnostics.
#[derive(Debug, Clone)]
pub struct AttackJoint {
    pub weights: BTreeMap<(usize, usize, usize, usize), f64>,
}

impl AttackJoint {
    /// Diagnostic conditional `r(x|u,v,ṽ)`.
    pub fn r_conditional(&self) -> ConditionalDistribution {
        let mut totals: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (&(u, v, vt, _), &w) in &self.weights {
            *totals.entry(vec![u, v, vt]).or_insert(0.0) += w;
        }
        let mut table: BTreeMap<Vec<usize>, BTreeMap<usize, f64>> = BTreeMap::new();
        for (&(u, v, vt, x), &w) in &self.weights {
            let key = vec![u, v, vt];
            let total = totals[&key];
            if total > 1e-12 {
                *table.entry(key).or_default().entry(x).or_insert(0.0) += w / total;
            }
        }
        ConditionalDistribution::new(table).expect("normalized by construction")
    }
}

pub fn attack_joint_distribution(
    protocol: &TwoPartyProtocol,
    p: &JointDistribution,
    cheat: &CheatIsometry,
) -> Result<AttackJoint> {
    let run = run_purified(protocol, p)?;
    let attacked = cheat.map.apply_to_pure(&run.state)?;
    let x_label = protocol.alice_output();
    let joint = outcome_distribution(&attacked, &[REG_R, REG_VT, x_label])?;
    let mut weights = BTreeMap::new();
    for (digits, prob) in joint {
        let (u, v) = decode_reference(digits[0], p.v_size());
        *weights.entry((u, v, digits[1], digits[2])).or_insert(0.0) += prob;
    }
    Ok(AttackJoint { weights })
}

/// Reads `q̃(ṽ|v)` from the secure state's classical `(R, Ṽ)` joint,
/// marginalizing Alice's input (the ideal preprocessing acts on `v` alone, so
/// the conditional is structurally independent of `u`).
pub fn extract_q_tilde(
    f: &ClassicalFunction,
    p: &JointDistribution,
    adversary: &IdealAdversary,
) -> Result<ConditionalDistribution> {
    let ideal = build_secure_purification(f, p, adversary)?;
    let joint = outcome_distribution(&ideal.state, &[REG_R, REG_VT])?;
    let v_size = p.v_size();
    let mut mass: BTreeMap<usize, f64> = BTreeMap::new();
    let mut rows: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
    for (digits, prob) in joint {
        let (_, v) = decode_reference(digits[0], v_size);
        *mass.entry(v).or_insert(0.0) += prob;
        *rows.entry(v).or_default().entry(digits[1]).or_insert(0.0) += prob;
    }
    let mut table: BTreeMap<Vec<usize>, BTreeMap<usize, f64>> = BTreeMap::new();
    for (v, row) in rows {
        let total = mass[&v];
        if total <= 1e-12 {
            continue;
        }
        table.insert(
            vec![v],
            row.into_iter().map(|(k, w)| (k, w / total)).collect(),
        );
    }
    ConditionalDistribution::new(table)
}
