//! Depolarized fixture variants: each sent message register passes through a
//! depolarizing channel, realized as a Stinespring isometry whose environment
//! stays on Alice's side. The ideal adversary is unchanged; the ε values are
//! simply recomputed on the noisy protocol.

use std::collections::BTreeMap;

use crate::proto::{Party, ProtocolRound, TwoPartyProtocol, REG_R, REG_U, REG_V};
use crate::qcore::{QuantumChannel, RegisterSystem};
use crate::{Error, Result};

use super::Fixture;

/// Applies depolarizing noise of rate `delta` to every message register.
pub fn depolarize_fixture(base: &Fixture, delta: f64) -> Result<Fixture> {
    depolarize_fixture_on(base, delta, None)
}

/// As `depolarize_fixture`, but restricted to the listed message registers
/// when `only` is given (used to keep game-pipeline dimensions small).
pub fn depolarize_fixture_on(
    base: &Fixture,
    delta: f64,
    only: Option<&[&str]>,
) -> Result<Fixture> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidDistribution(format!(
            "depolarizing rate {delta} outside [0,1]"
        )));
    }
    let suffix = match only {
        None => format!("dep{delta}"),
        Some(regs) => format!("dep{delta}-{}", regs.join("+")),
    };
    let id = format!("{}-{}", base.id, suffix);
    if delta == 0.0 {
        let mut fx = base.clone();
        fx.id = id;
        fx.noise = Some(0.0);
        return Ok(fx);
    }

    let mut dims: BTreeMap<String, usize> = BTreeMap::new();
    dims.insert(REG_R.into(), base.protocol.u_dim() * base.protocol.v_dim());
    dims.insert(REG_U.into(), base.protocol.u_dim());
    dims.insert(REG_V.into(), base.protocol.v_dim());
    for reg in base
        .protocol
        .alice_work()
        .iter()
        .chain(base.protocol.bob_work())
    {
        dims.insert(reg.label.clone(), reg.dim);
    }

    let selected = |label: &str| only.is_none_or(|regs| regs.contains(&label));
    let mut env_counter = 0usize;
    let mut rounds: Vec<ProtocolRound> = Vec::new();
    for round in base.protocol.rounds() {
        for reg in round.isometry.input_system().registers() {
            dims.remove(&reg.label);
        }
        for reg in round.isometry.output_system().registers() {
            dims.insert(reg.label.clone(), reg.dim);
        }
        let noisy: Vec<String> = round
            .send
            .iter()
            .filter(|label| selected(label))
            .cloned()
            .collect();
        if noisy.is_empty() {
            rounds.push(round.clone());
            continue;
        }
        let make_noise = |label: &str, env: usize| -> Result<QuantumChannel> {
            let dim = *dims
                .get(label)
                .ok_or_else(|| Error::UnknownRegister(label.to_string()))?;
            QuantumChannel::depolarizing(RegisterSystem::single(label, dim), delta)?
                .stinespring_isometry(&format!("E{env}"))
        };
        match round.party {
            // Alice noises her outgoing message before handing it over, so
            // the environment stays with her.
            Party::Alice => {
                let mut stripped = round.clone();
                let send = std::mem::take(&mut stripped.send);
                rounds.push(stripped);
                for (i, label) in noisy.iter().enumerate() {
                    rounds.push(ProtocolRound::new(
                        Party::Alice,
                        make_noise(label, env_counter + i)?,
                        &[],
                    )?);
                }
                env_counter += noisy.len();
                // Hand-off after the noise, carried by an identity round.
                let first = &send[0];
                let dim = *dims.get(first).expect("sent register known");
                rounds.push(ProtocolRound::new(
                    Party::Alice,
                    QuantumChannel::identity(RegisterSystem::single(first, dim)),
                    &send.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                )?);
            }
            // Bob's message is noised by Alice on receipt.
            Party::Bob => {
                rounds.push(round.clone());
                for (i, label) in noisy.iter().enumerate() {
                    rounds.push(ProtocolRound::new(
                        Party::Alice,
                        make_noise(label, env_counter + i)?,
                        &[],
                    )?);
                }
                env_counter += noisy.len();
            }
        }
    }

    let protocol = TwoPartyProtocol::new(
        base.protocol.u_dim(),
        base.protocol.v_dim(),
        base.protocol.alice_work().to_vec(),
        base.protocol.bob_work().to_vec(),
        rounds,
        base.protocol.alice_output(),
        base.protocol.bob_output(),
    )?;

    Ok(Fixture {
        id,
        function: base.function.clone(),
        protocol,
        ideal_adversary: base.ideal_adversary.clone(),
        noise: Some(delta),
        notes: format!("{}; depolarized at {delta}", base.notes),
    })
}
