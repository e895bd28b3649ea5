//! The classical reveal protocol: Bob sends his input, Alice evaluates the
//! function and sends the value back. Bob-secure and trivially Alice-broken,
//! the canonical testbed for the perfect-case attack.

use crate::proto::{
    ClassicalFunction, IdealAdversary, Party, ProtocolRound, TwoPartyProtocol, REG_V, REG_VT,
    REG_U, REG_X, REG_Y, REG_YT,
};
use crate::qcore::{QuantumChannel, Register, RegisterSystem};
use crate::Result;

use super::Fixture;

pub const MSG_V: &str = "M1";

/// Builds the reveal protocol for `f` along with the forward-and-keep ideal
/// adversary that simulates the honest-but-purified Bob exactly.
pub fn classical_reveal_protocol(f: &ClassicalFunction) -> Result<Fixture> {
    let (us, vs, os) = (f.u_size(), f.v_size(), f.out_size());

    // Round 1: Bob copies his input into the message register.
    let copy_sys = RegisterSystem::from_pairs(&[(REG_V, vs), (MSG_V, vs)])?;
    let copy_v = QuantumChannel::classical_isometry(copy_sys.clone(), copy_sys, move |d| {
        vec![d[0], (d[1] + d[0]) % vs]
    })?;

    // Round 2: Alice evaluates f on (U, M1) into her output and the reply.
    let f_table: Vec<Vec<usize>> = (0..us)
        .map(|u| (0..vs).map(|v| f.eval(u, v)).collect())
        .collect();
    let eval_sys =
        RegisterSystem::from_pairs(&[(REG_U, us), (MSG_V, vs), (REG_X, os), (REG_Y, os)])?;
    let eval_f = QuantumChannel::classical_isometry(eval_sys.clone(), eval_sys, move |d| {
        let val = f_table[d[0]][d[1]];
        vec![d[0], d[1], (d[2] + val) % os, (d[3] + val) % os]
    })?;

    let protocol = TwoPartyProtocol::new(
        us,
        vs,
        vec![Register::new(REG_X, os), Register::new(REG_Y, os)],
        vec![Register::new(MSG_V, vs)],
        vec![
            ProtocolRound::new(Party::Bob, copy_v, &[MSG_V])?,
            ProtocolRound::new(Party::Alice, eval_f, &[REG_Y])?,
        ],
        REG_X,
        REG_Y,
    )?;

    // Ideal Bob forwards v (keeping a copy that stands in for his input
    // register) and relabels the received output.
    let pre = QuantumChannel::classical_isometry(
        RegisterSystem::single(REG_V, vs),
        RegisterSystem::from_pairs(&[(REG_VT, vs), ("K", vs)])?,
        |d| vec![d[0], d[0]],
    )?;
    let post = QuantumChannel::relabel(
        RegisterSystem::from_pairs(&[("K", vs), (REG_YT, os)])?,
        RegisterSystem::from_pairs(&[(REG_V, vs), (REG_Y, os)])?,
    )?;
    let ideal_adversary = IdealAdversary::new(pre, post)?;

    Ok(Fixture {
        id: String::new(),
        function: f.clone(),
        protocol,
        ideal_adversary,
        noise: None,
        notes: "reveal: Bob sends v, Alice returns f(u,v)".into(),
    })
}
