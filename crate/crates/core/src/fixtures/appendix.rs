//! The transfer-style protocol from the referee example: Bob sends his choice
//! bit, Alice replies with the chosen string, both output the pair. Includes
//! the two-copies simulator comparison showing why the entangled reference
//! register matters.

use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::proto::{
    IdealAdversary, Party, ProtocolRound, TwoPartyProtocol, REG_U, REG_V, REG_VT, REG_X, REG_Y,
    REG_YT,
};
use crate::qcore::linalg::{CMatrix, CVector, C_ZERO};
use crate::qcore::measure::measure_computational_pure;
use crate::qcore::metrics::{purified_distance, total_variation};
use crate::qcore::{DensityOperator, PureState, QuantumChannel, Register, RegisterSystem};
use crate::{Error, Result};

use super::functions::{make_function, FunctionKind};
use super::Fixture;

const MSG_B: &str = "M1";
const MSG_S: &str = "M2";

/// Protocol for `f((s0,s1), b) = (b, s_b)`: one message each way.
pub fn appendix_protocol(n: usize) -> Result<Fixture> {
    if n == 0 || n > 2 {
        return Err(Error::CapExceeded(format!(
            "appendix protocol capped at n ∈ {{1, 2}}, requested {n}"
        )));
    }
    let f = make_function(FunctionKind::OtLike, n)?;
    let size = 1usize << n;
    let (us, vs, os) = (f.u_size(), f.v_size(), f.out_size());

    let copy_sys = RegisterSystem::from_pairs(&[(REG_V, vs), (MSG_B, vs)])?;
    let copy_b = QuantumChannel::classical_isometry(copy_sys.clone(), copy_sys, move |d| {
        vec![d[0], (d[1] + d[0]) % vs]
    })?;

    let reply_sys =
        RegisterSystem::from_pairs(&[(REG_U, us), (MSG_B, vs), (REG_X, os), (MSG_S, size)])?;
    let reply = QuantumChannel::classical_isometry(reply_sys.clone(), reply_sys, move |d| {
        let (s0, s1) = (d[0] >> n, d[0] & (size - 1));
        let b = d[1];
        let chosen = if b == 0 { s0 } else { s1 };
        vec![
            d[0],
            b,
            (d[2] + b * size + chosen) % os,
            (d[3] + chosen) % size,
        ]
    })?;

    let assemble_sys =
        RegisterSystem::from_pairs(&[(REG_V, vs), (MSG_S, size), (REG_Y, os)])?;
    let assemble = QuantumChannel::classical_isometry(assemble_sys.clone(), assemble_sys, move |d| {
        vec![d[0], d[1], (d[2] + d[0] * size + d[1]) % os]
    })?;

    let protocol = TwoPartyProtocol::new(
        us,
        vs,
        vec![Register::new(REG_X, os), Register::new(MSG_S, size)],
        vec![Register::new(MSG_B, vs), Register::new(REG_Y, os)],
        vec![
            ProtocolRound::new(Party::Bob, copy_b, &[MSG_B])?,
            ProtocolRound::new(Party::Alice, reply, &[MSG_S])?,
            ProtocolRound::new(Party::Bob, assemble, &[])?,
        ],
        REG_X,
        REG_Y,
    )?;

    // Natural simulator: forward b, decode the chosen string from the
    // functionality's output, rebuild Bob's registers.
    let pre = QuantumChannel::classical_isometry(
        RegisterSystem::single(REG_V, vs),
        RegisterSystem::from_pairs(&[(REG_VT, vs), ("K", vs)])?,
        |d| vec![d[0], d[0]],
    )?;
    let post = QuantumChannel::classical_isometry(
        RegisterSystem::from_pairs(&[("K", vs), (REG_YT, os)])?,
        RegisterSystem::from_pairs(&[(REG_V, vs), (MSG_S, size), (REG_Y, os)])?,
        move |d| vec![d[0], d[1] % size, d[1]],
    )?;
    let ideal_adversary = IdealAdversary::new(pre, post)?;

    Ok(Fixture {
        id: String::new(),
        function: f,
        protocol,
        ideal_adversary,
        noise: None,
        notes: "transfer-style: Bob sends b, Alice replies with s_b".into(),
    })
}

/// Outcome of the two-copies simulator comparison at `n = 1`.
#[derive(Debug, Clone, Serialize)]
pub struct TwoCopiesReport {
    /// Total variation between real and simulated output distributions when
    /// the inputs are classical (no reference register).
    pub tv_without_r: f64,
    /// Purified distance between real and simulated outputs on `R ⊗ outputs`
    /// for the basis-switching adversary.
    pub distance_with_r: f64,
    /// Same comparison with the Hadamard branch replaced by a computational
    /// measurement; the simulator then matches exactly.
    pub distance_with_r_computational: f64,
}

fn hadamard_channel() -> QuantumChannel {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(inv, 0.0),
            Complex64::new(inv, 0.0),
            Complex64::new(inv, 0.0),
            Complex64::new(-inv, 0.0),
        ],
    );
    QuantumChannel::isometry(
        RegisterSystem::single("U0", 2),
        RegisterSystem::single("U0", 2),
        h,
    )
    .expect("Hadamard is unitary")
}

/// Input conditioned on Bob's bit: `(1/2) Σ_{s0 s1} |u·2+b>_R |s0>_{U0} |s1>_{U1}`.
fn conditional_input(b: usize) -> PureState {
    let sys = RegisterSystem::from_pairs(&[("R", 8), ("U0", 2), ("U1", 2)]).unwrap();
    let mut amps = CVector::from_element(sys.total_dim(), C_ZERO);
    for s0 in 0..2usize {
        for s1 in 0..2usize {
            let r = (s0 * 2 + s1) * 2 + b;
            amps[sys.index_of(&[r, s0, s1])] = Complex64::new(0.5, 0.0);
        }
    }
    PureState::new(sys, amps).unwrap()
}

fn output_projector(out: usize) -> DensityOperator {
    let sys = RegisterSystem::from_pairs(&[("XO", 4), ("YO", 4)]).unwrap();
    PureState::basis(sys, &[out, out]).unwrap().to_density()
}

/// Real basis-switching adversary: measures the first string qubit in the
/// computational basis when `b = 0`, in the Hadamard basis when `b = 1`.
fn real_output_state(hadamard: bool) -> Result<DensityOperator> {
    let mut total: Option<DensityOperator> = None;
    for b in 0..2usize {
        let mut state = conditional_input(b);
        if b == 1 && hadamard {
            state = hadamard_channel().apply_to_pure(&state)?;
        }
        for outcome in measure_computational_pure(&state, &["U0"])? {
            let r_state = outcome.post_state.partial_trace(&["R"])?;
            let out = b * 2 + outcome.digits[0];
            let block = r_state.tensor(&output_projector(out))?;
            let weighted = scale(&block, 0.5 * outcome.probability);
            total = Some(match total {
                None => weighted,
                Some(acc) => add(&acc, &weighted),
            });
        }
    }
    Ok(total.expect("nonempty"))
}

/// Two-copies simulator acting on the one available input register: first a
/// computational measurement (the `b = 0` copy), then the `b = 1` copy's
/// measurement on the post-measurement state.
fn ideal_output_state(hadamard: bool) -> Result<DensityOperator> {
    let mut total: Option<DensityOperator> = None;
    for b in 0..2usize {
        let state = conditional_input(b);
        for first in measure_computational_pure(&state, &["U0"])? {
            let s0_sim = first.digits[0];
            let mut mid = first.post_state.clone();
            if hadamard {
                mid = hadamard_channel().apply_to_pure(&mid)?;
            }
            for second in measure_computational_pure(&mid, &["U0"])? {
                let s1_sim = second.digits[0];
                let chosen = if b == 0 { s0_sim } else { s1_sim };
                let out = b * 2 + chosen;
                let r_state = second.post_state.partial_trace(&["R"])?;
                let block = r_state.tensor(&output_projector(out))?;
                let weighted = scale(&block, 0.5 * first.probability * second.probability);
                total = Some(match total {
                    None => weighted,
                    Some(acc) => add(&acc, &weighted),
                });
            }
        }
    }
    Ok(total.expect("nonempty"))
}

fn scale(rho: &DensityOperator, w: f64) -> DensityOperator {
    DensityOperator::new_unchecked(rho.system().clone(), rho.matrix().scale(w))
}

fn add(a: &DensityOperator, b: &DensityOperator) -> DensityOperator {
    DensityOperator::new_unchecked(a.system().clone(), a.matrix() + b.matrix())
}

/// Classical-input comparison: joint distribution over `(s0, s1, b, out)`.
fn classical_distributions(hadamard: bool) -> (Vec<f64>, Vec<f64>) {
    let mut real = BTreeMap::new();
    let mut ideal = BTreeMap::new();
    let w = 1.0 / 8.0;
    for s0 in 0..2usize {
        for s1 in 0..2usize {
            for b in 0..2usize {
                // Real: b=0 reads s0; b=1 measures in the switched basis.
                if b == 0 || !hadamard {
                    *real.entry((s0, s1, b, b * 2 + s0)).or_insert(0.0) += w;
                } else {
                    for a in 0..2usize {
                        *real.entry((s0, s1, b, b * 2 + a)).or_insert(0.0) += w * 0.5;
                    }
                }
                // Ideal: comp measurement yields s0 exactly; the second
                // measurement yields uniform under Hadamard, s0 otherwise.
                if b == 0 {
                    *ideal.entry((s0, s1, b, s0)).or_insert(0.0) += w;
                } else if hadamard {
                    for a in 0..2usize {
                        *ideal.entry((s0, s1, b, 2 + a)).or_insert(0.0) += w * 0.5;
                    }
                } else {
                    *ideal.entry((s0, s1, b, 2 + s0)).or_insert(0.0) += w;
                }
            }
        }
    }
    let keys: Vec<_> = real.keys().chain(ideal.keys()).cloned().collect();
    let mut p = Vec::new();
    let mut q = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for k in keys {
        if seen.insert(k) {
            p.push(real.get(&k).copied().unwrap_or(0.0));
            q.push(ideal.get(&k).copied().unwrap_or(0.0));
        }
    }
    (p, q)
}

/// Runs the appendix comparison at `n = 1`.
pub fn two_copies_simulator_check(n: usize) -> Result<TwoCopiesReport> {
    if n != 1 {
        return Err(Error::CapExceeded(format!(
            "two-copies check implemented for n = 1, requested {n}"
        )));
    }
    let (p, q) = classical_distributions(true);
    let tv_without_r = total_variation(&p, &q);

    let real = real_output_state(true)?;
    let ideal = ideal_output_state(true)?;
    let distance_with_r = purified_distance(&real, &ideal)?;

    let real_c = real_output_state(false)?;
    let ideal_c = ideal_output_state(false)?;
    let distance_with_r_computational = purified_distance(&real_c, &ideal_c)?;

    Ok(TwoCopiesReport {
        tv_without_r,
        distance_with_r,
        distance_with_r_computational,
    })
}
