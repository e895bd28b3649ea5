//! Correctness and security figures of merit: purified distance between the
//! real execution and the ideal-world reference.

use crate::qcore::metrics::purified_distance;
use crate::qcore::DensityOperator;
use crate::{Error, Result};

use super::dist::JointDistribution;
use super::function::ClassicalFunction;
use super::ideal::{run_ideal_purified_as, IdealAdversary};
use super::protocol::{run_honest, run_purified, TwoPartyProtocol};
use super::{REG_R, REG_VT};

/// Distance between the honest execution and the ideal evaluation of `f`,
/// for the given input distribution.
pub fn correctness_epsilon(
    protocol: &TwoPartyProtocol,
    f: &ClassicalFunction,
    p: &JointDistribution,
) -> Result<f64> {
    let real = run_honest(protocol, p)?;
    let honest = IdealAdversary::forwarding(f.v_size(), f.out_size(), protocol.bob_output())?;
    let run = run_ideal_purified_as(f, p, &honest, false, protocol.alice_output())?;
    let ideal = run.secure_state()?;
    purified_distance(&real, &ideal)
}

/// Distance between the real output against honest-but-purified Bob and the
/// ideal adversary's secure state, both reduced to `R, X, Y′`.
pub fn security_epsilon(
    protocol: &TwoPartyProtocol,
    f: &ClassicalFunction,
    p: &JointDistribution,
    adversary: &IdealAdversary,
) -> Result<f64> {
    let pair = real_and_secure_states(protocol, f, p, adversary)?;
    purified_distance(&pair.0, &pair.1)
}

/// The pair `(ρ_{RXY′}, σ_{RXY′})` entering the security definition; exposed
/// so the attack pipeline can reuse the computation.
pub fn real_and_secure_states(
    protocol: &TwoPartyProtocol,
    f: &ClassicalFunction,
    p: &JointDistribution,
    adversary: &IdealAdversary,
) -> Result<(DensityOperator, DensityOperator)> {
    let run = run_purified(protocol, p)?;
    let rho = run.real_state_against_bob()?;

    // The ideal adversary must reproduce Bob's real register shape.
    let mut wanted: Vec<&str> = run.y_prime_labels();
    wanted.sort_unstable();
    let mut produced: Vec<&str> = adversary.output_labels();
    produced.sort_unstable();
    if wanted != produced {
        return Err(Error::DimensionMismatch(format!(
            "ideal adversary produces registers {produced:?} but the real Bob holds {wanted:?}"
        )));
    }

    let ideal = run_ideal_purified_as(f, p, adversary, true, protocol.alice_output())?;
    let keep: Vec<&str> = ideal
        .state
        .system()
        .labels()
        .into_iter()
        .filter(|l| *l != REG_VT && !ideal.purifier_labels.iter().any(|q| q == l))
        .collect();
    let sigma = ideal.state.partial_trace(&keep)?;
    debug_assert!(sigma.system().contains(REG_R));
    Ok((rho, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    
    use crate::qcore::{QuantumChannel, Register, RegisterSystem};

    /// Constant-zero outputs for both parties, no communication.
    fn constant_protocol() -> TwoPartyProtocol {
        TwoPartyProtocol::new(
            2,
            2,
            vec![Register::new("X", 2)],
            vec![Register::new("Y", 2)],
            vec![],
            "X",
            "Y",
        )
        .unwrap()
    }

    #[test]
    fn constant_zero_protocol_for_eq_has_known_correctness_gap() {
        // EQ on one bit under the uniform distribution: the ideal output is
        // classical, the real output is the constant (0,0). Both states are
        // diagonal, so F = Σ_{uv} p(u,v)·δ_{f(u,v),0} = 1/2 and
        // ε = sqrt(1 - 1/4).
        let f = ClassicalFunction::new(vec![vec![1, 0], vec![0, 1]], 2).unwrap();
        let p = JointDistribution::uniform(2, 2);
        let eps = correctness_epsilon(&constant_protocol(), &f, &p).unwrap();
        let expect = (1.0f64 - 0.25).sqrt();
        assert!((eps - expect).abs() < 1e-9, "eps {eps} vs {expect}");
    }

    #[test]
    fn round_free_protocol_insecure_against_forwarding_slightly() {
        // Sanity: the security evaluation runs and yields a value in [0,1].
        let f = ClassicalFunction::new(vec![vec![1, 0], vec![0, 1]], 2).unwrap();
        let p = JointDistribution::uniform(2, 2);
        let adv = IdealAdversary::new(
            QuantumChannel::relabel(
                RegisterSystem::single(super::super::REG_V, 2),
                RegisterSystem::single(REG_VT, 2),
            )
            .unwrap(),
            QuantumChannel::classical_isometry(
                RegisterSystem::single(super::super::REG_YT, 2),
                RegisterSystem::from_pairs(&[(super::super::REG_V, 2), ("Y", 2)]).unwrap(),
                |d| vec![0, d[0]],
            )
            .unwrap(),
        )
        .unwrap();
        let eps = security_epsilon(&constant_protocol(), &f, &p, &adv).unwrap();
        assert!((0.0..=1.0).contains(&eps));
    }
}
