//! The per-cell payoff: success mass minus independence defect for one
//! cheating map at one input pair.

use crate::attack::{execute_attack, extract_q_tilde, CheatIsometry, ConditionalDistribution};
use crate::proto::{ClassicalFunction, IdealAdversary, JointDistribution, TwoPartyProtocol};
use crate::qcore::linalg::kahan_sum;
use crate::Result;

/// `g(u,v,T) = Σ_ṽ q(ṽ|u,v,T)·δ_{f(u,v),f(u,ṽ)} − Σ_ṽ |q(ṽ|u,v,T) − q̃(ṽ|v,T)|`,
/// always in `[-1, 1]`.
pub fn payoff_from_conditionals(
    u: usize,
    v: usize,
    q: &ConditionalDistribution,
    q_tilde: &ConditionalDistribution,
    f: &ClassicalFunction,
) -> Result<f64> {
    let q_row = q.require_row(&[u, v])?;
    let qt_row = q_tilde.require_row(&[v])?;
    let success = kahan_sum(q_row.iter().filter_map(|(&vt, &prob)| {
        if f.same_output(u, v, vt) {
            Some(prob)
        } else {
            None
        }
    }));
    let mut outcomes: Vec<usize> = q_row.keys().copied().collect();
    for &vt in qt_row.keys() {
        if !q_row.contains_key(&vt) {
            outcomes.push(vt);
        }
    }
    let defect = kahan_sum(outcomes.into_iter().map(|vt| {
        let a = q_row.get(&vt).copied().unwrap_or(0.0);
        let b = qt_row.get(&vt).copied().unwrap_or(0.0);
        (a - b).abs()
    }));
    Ok(success - defect)
}

/// Spec-surface variant that derives the conditionals itself: the attack is
/// executed under the uniform distribution (the conditionals do not depend on
/// the ambient distribution) and `q̃` is read from the secure state.
pub fn payoff(
    u: usize,
    v: usize,
    cheat: &CheatIsometry,
    protocol: &TwoPartyProtocol,
    f: &ClassicalFunction,
    adversary: &IdealAdversary,
) -> Result<f64> {
    let uniform = JointDistribution::uniform(f.u_size(), f.v_size());
    let q = execute_attack(protocol, &uniform, cheat)?;
    let q_tilde = extract_q_tilde(f, &uniform, adversary)?;
    payoff_from_conditionals(u, v, &q, &q_tilde, f)
}
