//! Two-party protocol model: alternating rounds of local isometries with
//! explicit register hand-offs, executed either fully purified (all
//! measurements deferred) or honestly (inputs and outputs measured).

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::qcore::{DensityOperator, PureState, QuantumChannel, Register, RegisterSystem};
use crate::{Error, Result};

use super::dist::{input_state, JointDistribution};
use super::{REG_R, REG_U, REG_V};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

/// One protocol round: the acting party applies a local isometry to registers
/// it holds, then hands the `send` registers to the other party.
#[derive(Debug, Clone)]
pub struct ProtocolRound {
    pub party: Party,
    pub isometry: QuantumChannel,
    pub send: Vec<String>,
}

impl ProtocolRound {
    pub fn new(party: Party, isometry: QuantumChannel, send: &[&str]) -> Result<Self> {
        if !isometry.is_isometry() {
            return Err(Error::NotIsometry("protocol round map".into()));
        }
        Ok(ProtocolRound {
            party,
            isometry,
            send: send.iter().map(|s| s.to_string()).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Owner {
    Reference,
    Alice,
    Bob,
}

/// Register ownership at the end of the protocol.
#[derive(Debug, Clone)]
pub struct FinalLayout {
    pub alice: Vec<String>,
    pub bob: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TwoPartyProtocol {
    u_dim: usize,
    v_dim: usize,
    alice_work: Vec<Register>,
    bob_work: Vec<Register>,
    rounds: Vec<ProtocolRound>,
    alice_output: String,
    bob_output: String,
}

impl TwoPartyProtocol {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        u_dim: usize,
        v_dim: usize,
        alice_work: Vec<Register>,
        bob_work: Vec<Register>,
        rounds: Vec<ProtocolRound>,
        alice_output: &str,
        bob_output: &str,
    ) -> Result<Self> {
        let proto = TwoPartyProtocol {
            u_dim,
            v_dim,
            alice_work,
            bob_work,
            rounds,
            alice_output: alice_output.to_string(),
            bob_output: bob_output.to_string(),
        };
        proto.final_layout()?;
        Ok(proto)
    }

    pub fn u_dim(&self) -> usize {
        self.u_dim
    }

    pub fn v_dim(&self) -> usize {
        self.v_dim
    }

    pub fn rounds(&self) -> &[ProtocolRound] {
        &self.rounds
    }

    pub fn alice_output(&self) -> &str {
        &self.alice_output
    }

    pub fn bob_output(&self) -> &str {
        &self.bob_output
    }

    pub fn alice_work(&self) -> &[Register] {
        &self.alice_work
    }

    pub fn bob_work(&self) -> &[Register] {
        &self.bob_work
    }

    /// Walks the rounds checking ownership, dimensions and hand-off
    /// consistency; returns who holds what at the end.
    pub fn final_layout(&self) -> Result<FinalLayout> {
        let mut layout: BTreeMap<String, (usize, Owner)> = BTreeMap::new();
        layout.insert(
            REG_R.to_string(),
            (self.u_dim * self.v_dim, Owner::Reference),
        );
        layout.insert(REG_U.to_string(), (self.u_dim, Owner::Alice));
        layout.insert(REG_V.to_string(), (self.v_dim, Owner::Bob));
        for (regs, owner) in [(&self.alice_work, Owner::Alice), (&self.bob_work, Owner::Bob)] {
            for reg in regs.iter() {
                if layout.contains_key(&reg.label) {
                    return Err(Error::LabelCollision(reg.label.clone()));
                }
                layout.insert(reg.label.clone(), (reg.dim, owner));
            }
        }
        for (i, round) in self.rounds.iter().enumerate() {
            let owner = match round.party {
                Party::Alice => Owner::Alice,
                Party::Bob => Owner::Bob,
            };
            for reg in round.isometry.input_system().registers() {
                match layout.get(&reg.label) {
                    None => {
                        return Err(Error::Protocol(format!(
                            "round {i}: unknown register {}",
                            reg.label
                        )))
                    }
                    Some(&(dim, have_owner)) => {
                        if dim != reg.dim {
                            return Err(Error::Protocol(format!(
                                "round {i}: register {} has dim {} but the map expects {}",
                                reg.label, dim, reg.dim
                            )));
                        }
                        if have_owner != owner {
                            return Err(Error::Protocol(format!(
                                "round {i}: {:?} does not hold register {}",
                                round.party, reg.label
                            )));
                        }
                    }
                }
            }
            for reg in round.isometry.input_system().registers() {
                layout.remove(&reg.label);
            }
            for reg in round.isometry.output_system().registers() {
                if layout.contains_key(&reg.label) {
                    return Err(Error::Protocol(format!(
                        "round {i}: output register {} collides",
                        reg.label
                    )));
                }
                layout.insert(reg.label.clone(), (reg.dim, owner));
            }
            for sent in &round.send {
                match layout.get_mut(sent) {
                    None => {
                        return Err(Error::Protocol(format!(
                            "round {i}: cannot send unknown register {sent}"
                        )))
                    }
                    Some(entry) => {
                        if entry.1 != owner {
                            return Err(Error::Protocol(format!(
                                "round {i}: {:?} cannot send register {sent} it does not hold",
                                round.party
                            )));
                        }
                        entry.1 = match owner {
                            Owner::Alice => Owner::Bob,
                            Owner::Bob => Owner::Alice,
                            Owner::Reference => unreachable!(),
                        };
                    }
                }
            }
        }
        let check_output = |label: &str, owner: Owner, who: &str| -> Result<()> {
            match layout.get(label) {
                Some(&(_, have)) if have == owner => Ok(()),
                Some(_) => Err(Error::Protocol(format!(
                    "{who} output register {label} not held by {who} at the end"
                ))),
                None => Err(Error::Protocol(format!(
                    "{who} output register {label} missing at the end"
                ))),
            }
        };
        check_output(&self.alice_output, Owner::Alice, "alice")?;
        check_output(&self.bob_output, Owner::Bob, "bob")?;
        let mut alice = Vec::new();
        let mut bob = Vec::new();
        for (label, (_, owner)) in &layout {
            match owner {
                Owner::Alice => alice.push(label.clone()),
                Owner::Bob => bob.push(label.clone()),
                Owner::Reference => {}
            }
        }
        Ok(FinalLayout { alice, bob })
    }

    /// Role-swapped protocol: parties exchanged, `U`/`V` relabeled into each
    /// other. Evaluating it against the transposed function and distribution
    /// yields the dishonest-Alice side of the original protocol.
    pub fn swap_roles(&self) -> Result<TwoPartyProtocol> {
        let rename = |label: &str| -> String {
            if label == REG_U {
                REG_V.to_string()
            } else if label == REG_V {
                REG_U.to_string()
            } else {
                label.to_string()
            }
        };
        let rename_system = |sys: &RegisterSystem| -> Result<RegisterSystem> {
            RegisterSystem::new(
                sys.registers()
                    .iter()
                    .map(|r| Register::new(rename(&r.label), r.dim))
                    .collect(),
            )
        };
        let rounds = self
            .rounds
            .iter()
            .map(|round| {
                let input = rename_system(round.isometry.input_system())?;
                let output = rename_system(round.isometry.output_system())?;
                let kraus = round.isometry.kraus().to_vec();
                Ok(ProtocolRound {
                    party: round.party.other(),
                    isometry: QuantumChannel::new(input, output, kraus)?,
                    send: round.send.iter().map(|s| rename(s)).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TwoPartyProtocol::new(
            self.v_dim,
            self.u_dim,
            self.bob_work.clone(),
            self.alice_work.clone(),
            rounds,
            &self.bob_output,
            &self.alice_output,
        )
    }

    fn initial_state(&self, p: &JointDistribution) -> Result<PureState> {
        if p.u_size() != self.u_dim || p.v_size() != self.v_dim {
            return Err(Error::DimensionMismatch(
                "distribution domain differs from protocol input dims".into(),
            ));
        }
        let mut psi = input_state(p)?;
        for reg in self.alice_work.iter().chain(self.bob_work.iter()) {
            let blank = PureState::basis(RegisterSystem::single(&reg.label, reg.dim), &[0])?;
            psi = psi.tensor(&blank)?;
        }
        Ok(psi)
    }
}

/// A fully purified protocol execution: the joint pure state at the end,
/// together with each party's purification registers (everything that party
/// holds except its declared output).
#[derive(Debug, Clone)]
pub struct PurifiedRun {
    pub state: PureState,
    alice_regs: Vec<String>,
    bob_regs: Vec<String>,
    alice_output: String,
    bob_output: String,
}

impl PurifiedRun {
    /// Alice's purification registers `X′₁`.
    pub fn x1_labels(&self) -> Vec<&str> {
        self.alice_regs
            .iter()
            .filter(|l| **l != self.alice_output)
            .map(|s| s.as_str())
            .collect()
    }

    /// Bob's purification registers `Y′₁`.
    pub fn y1_labels(&self) -> Vec<&str> {
        self.bob_regs
            .iter()
            .filter(|l| **l != self.bob_output)
            .map(|s| s.as_str())
            .collect()
    }

    /// Bob's combined dishonest register `Y′ = Y′₁ Y`.
    pub fn y_prime_labels(&self) -> Vec<&str> {
        self.bob_regs.iter().map(|s| s.as_str()).collect()
    }

    /// Alice's combined dishonest register `X′ = X′₁ X`.
    pub fn x_prime_labels(&self) -> Vec<&str> {
        self.alice_regs.iter().map(|s| s.as_str()).collect()
    }

    pub fn alice_output(&self) -> &str {
        &self.alice_output
    }

    pub fn bob_output(&self) -> &str {
        &self.bob_output
    }

    /// The honest-Alice / dishonest-Bob output `ρ_{R X Y′}`.
    pub fn real_state_against_bob(&self) -> Result<DensityOperator> {
        let mut keep: Vec<&str> = vec![REG_R, &self.alice_output];
        keep.extend(self.y_prime_labels());
        self.state.partial_trace(&keep)
    }

    /// The dishonest-Alice / honest-Bob output `ρ_{R X′ Y}`.
    pub fn real_state_against_alice(&self) -> Result<DensityOperator> {
        let mut keep: Vec<&str> = vec![REG_R, &self.bob_output];
        keep.extend(self.x_prime_labels());
        self.state.partial_trace(&keep)
    }
}

/// Executes all rounds with every measurement deferred; the returned state is
/// the purification `|Φ>` serving both the dishonest-Bob and dishonest-Alice
/// analyses.
pub fn run_purified(protocol: &TwoPartyProtocol, p: &JointDistribution) -> Result<PurifiedRun> {
    let layout = protocol.final_layout()?;
    let mut psi = protocol.initial_state(p)?;
    for round in protocol.rounds() {
        psi = round.isometry.apply_to_pure(&psi)?;
    }
    Ok(PurifiedRun {
        state: psi,
        alice_regs: layout.alice,
        bob_regs: layout.bob,
        alice_output: protocol.alice_output.clone(),
        bob_output: protocol.bob_output.clone(),
    })
}

/// Honest execution: both parties measure their inputs, run the rounds, and
/// measure their outputs; returns `ρ_{R X Y}`. Computed on the purified path
/// (tracing both purifications implements the input measurements, dephasing
/// implements the output measurements).
pub fn run_honest(protocol: &TwoPartyProtocol, p: &JointDistribution) -> Result<DensityOperator> {
    let run = run_purified(protocol, p)?;
    let keep = [REG_R, &protocol.alice_output, &protocol.bob_output];
    let rho = run.state.partial_trace(&keep)?;
    rho.dephase(&[&protocol.alice_output, &protocol.bob_output])
}

/// Density-matrix reference path for `run_honest`: inputs dephased up front,
/// rounds applied as Kraus channels, outputs dephased at the end. An
/// independent oracle for the deferred-measurement equivalence tests.
pub fn run_honest_dense(
    protocol: &TwoPartyProtocol,
    p: &JointDistribution,
) -> Result<DensityOperator> {
    let mut rho = protocol.initial_state(p)?.to_density();
    rho = rho.dephase(&[REG_U, REG_V])?;
    for round in protocol.rounds() {
        rho = round.isometry.apply(&rho)?;
    }
    rho = rho.dephase(&[&protocol.alice_output, &protocol.bob_output])?;
    rho.partial_trace(&[REG_R, &protocol.alice_output, &protocol.bob_output])
}
