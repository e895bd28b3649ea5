//! Disjointness with Bob's high-weight bit-flip wrapper: on inputs with
//! Hamming weight above n/2 Bob flips ⌊√n⌋ random 1-bits before engaging the
//! reveal protocol. Security is untouched (the wrapper is honest-local and
//! the simulator absorbs it) while correctness degrades, and exact input
//! recovery on high-weight strings becomes impossible.
//!
//! The n ∈ {4, 9} studies run on an exact classical enumeration; the n = 2
//! quantum fixture cross-validates that enumeration against the dense
//! pipeline.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::proto::{
    ClassicalFunction, IdealAdversary, JointDistribution, Party, ProtocolRound, TwoPartyProtocol,
    REG_U, REG_V, REG_VT, REG_X, REG_Y, REG_YT,
};
use crate::qcore::linalg::kahan_sum;
use crate::qcore::metrics::purified_distance_classical;
use crate::qcore::{QuantumChannel, Register, RegisterSystem};
use crate::{Error, Result};

use super::functions::{make_function, FunctionKind};
use super::Fixture;

const MSG_V: &str = "M1";
const REG_WR: &str = "Wr";

/// Flip-pattern table: for each `v`, the branches `(r, v', weight)` of Bob's
/// wrapper, with `r = 0` the identity branch.
#[derive(Debug, Clone)]
pub struct FlipWrapper {
    pub n: usize,
    pub flips: usize,
    branches: Vec<Vec<(usize, usize, f64)>>,
    /// Dimension needed for the pattern register.
    pub r_dim: usize,
}

impl FlipWrapper {
    pub fn new(n: usize) -> Self {
        let flips = (n as f64).sqrt().floor() as usize;
        let size = 1usize << n;
        let mut branches = Vec::with_capacity(size);
        let mut r_dim = 1usize;
        for v in 0..size {
            let weight = (v as u32).count_ones() as usize;
            if weight * 2 <= n {
                branches.push(vec![(0, v, 1.0)]);
                continue;
            }
            let ones: Vec<usize> = (0..n).filter(|i| (v >> i) & 1 == 1).collect();
            let subsets = k_subsets(&ones, flips.min(ones.len()));
            let w = 1.0 / subsets.len() as f64;
            let row: Vec<(usize, usize, f64)> = subsets
                .iter()
                .enumerate()
                .map(|(i, subset)| {
                    let mut flipped = v;
                    for &bit in subset {
                        flipped &= !(1usize << bit);
                    }
                    (i + 1, flipped, w)
                })
                .collect();
            r_dim = r_dim.max(row.len() + 1);
            branches.push(row);
        }
        FlipWrapper {
            n,
            flips,
            branches,
            r_dim,
        }
    }

    pub fn branches(&self, v: usize) -> &[(usize, usize, f64)] {
        &self.branches[v]
    }

    /// The perturbed input for pattern index `r` (identity for indices not in
    /// the branch list, keeping basis maps injective).
    pub fn apply(&self, v: usize, r: usize) -> usize {
        self.branches[v]
            .iter()
            .find(|(idx, _, _)| *idx == r)
            .map(|(_, flipped, _)| *flipped)
            .unwrap_or(v)
    }
}

fn k_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in k_subsets(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Exact classical study of the perturbed reveal protocol.
#[derive(Debug, Clone)]
pub struct DisjTightnessStudy {
    pub n: usize,
    pub function: ClassicalFunction,
    pub wrapper: FlipWrapper,
    /// Recorded for report reproducibility; the enumeration itself is exact.
    pub seed: u64,
    pub notes: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DisjTightnessReport {
    pub n: usize,
    pub flips: usize,
    pub eps_corr_base: f64,
    pub eps_corr_perturbed: f64,
    /// `Pr[f(u, W(v)) ≠ f(u,v)]` under the uniform distribution.
    pub error_mass: f64,
    pub eps_sec_base: f64,
    pub eps_sec_perturbed: f64,
    /// Bayes-optimal `Pr[ṽ-based guess equals v]` on high-weight inputs.
    pub recovery_high_weight: f64,
    /// Same quantity for the unperturbed reveal (ṽ = v): the EQ-style rate.
    pub recovery_unperturbed: f64,
}

/// Builds the study for `n ∈ {4, 9}`. The quantum protocol object is not
/// materialized at these sizes; all quantities come from the exact
/// enumeration, which the n = 2 fixture cross-validates.
pub fn disj_perturbed_fixture(n: usize, seed: u64) -> Result<DisjTightnessStudy> {
    if n != 4 && n != 9 {
        return Err(Error::CapExceeded(format!(
            "perturbed study defined for n ∈ {{4, 9}}, requested {n}"
        )));
    }
    Ok(DisjTightnessStudy {
        n,
        function: make_function(FunctionKind::Disj, n)?,
        wrapper: FlipWrapper::new(n),
        seed,
        notes: "reveal base; Bob flips ⌊√n⌋ one-bits on high-weight inputs".into(),
    })
}

impl DisjTightnessStudy {
    pub fn analyze(&self) -> Result<DisjTightnessReport> {
        let size = 1usize << self.n;
        let p = JointDistribution::uniform(size, size);
        let identity = FlipWrapper {
            n: self.n,
            flips: 0,
            branches: (0..size).map(|v| vec![(0usize, v, 1.0)]).collect(),
            r_dim: 1,
        };
        let eps_corr_base = classical_correctness(&self.function, &p, &identity);
        let eps_corr_perturbed = classical_correctness(&self.function, &p, &self.wrapper);
        let error_mass = classical_error_mass(&self.function, &p, &self.wrapper);
        let eps_sec_base = classical_security(&self.function, &p, &identity);
        let eps_sec_perturbed = classical_security(&self.function, &p, &self.wrapper);
        let recovery_high_weight = bayes_recovery_high_weight(self.n, &self.wrapper);
        let recovery_unperturbed = bayes_recovery_high_weight(self.n, &identity);
        Ok(DisjTightnessReport {
            n: self.n,
            flips: self.wrapper.flips,
            eps_corr_base,
            eps_corr_perturbed,
            error_mass,
            eps_sec_base,
            eps_sec_perturbed,
            recovery_high_weight,
            recovery_unperturbed,
        })
    }
}

/// `C(real, ideal)` for the honest run: both sides classical over
/// `(u, v, x, y)`.
fn classical_correctness(
    f: &ClassicalFunction,
    p: &JointDistribution,
    wrapper: &FlipWrapper,
) -> f64 {
    let mut keys: BTreeMap<(usize, usize, usize, usize), (f64, f64)> = BTreeMap::new();
    for (u, v) in p.support() {
        let weight = p.prob(u, v);
        for &(_, flipped, w) in wrapper.branches(v) {
            let x = f.eval(u, flipped);
            keys.entry((u, v, x, x)).or_insert((0.0, 0.0)).0 += weight * w;
        }
        let ideal = f.eval(u, v);
        keys.entry((u, v, ideal, ideal)).or_insert((0.0, 0.0)).1 += weight;
    }
    let (real, ideal): (Vec<f64>, Vec<f64>) = keys.values().copied().unzip();
    purified_distance_classical(&real, &ideal)
}

/// Raw probability that the perturbed evaluation disagrees with `f`.
fn classical_error_mass(
    f: &ClassicalFunction,
    p: &JointDistribution,
    wrapper: &FlipWrapper,
) -> f64 {
    kahan_sum(p.support().into_iter().map(|(u, v)| {
        let weight = p.prob(u, v);
        wrapper
            .branches(v)
            .iter()
            .map(|&(_, flipped, w)| {
                if f.eval(u, flipped) != f.eval(u, v) {
                    weight * w
                } else {
                    0.0
                }
            })
            .sum::<f64>()
    }))
}

/// `C(ρ_{RXY′}, σ_{RXY′})` with both sides enumerated classically: the real
/// route follows the protocol flow, the ideal route follows the simulator
/// composition. Outcome tuples are `(u, v, x, bobV, bobR, y)`.
fn classical_security(
    f: &ClassicalFunction,
    p: &JointDistribution,
    wrapper: &FlipWrapper,
) -> f64 {
    type Key = (usize, usize, usize, usize, usize, usize);
    let mut keys: BTreeMap<Key, (f64, f64)> = BTreeMap::new();
    for (u, v) in p.support() {
        let weight = p.prob(u, v);
        // Real: Bob perturbs, sends v', Alice computes and replies.
        for &(r, flipped, w) in wrapper.branches(v) {
            let x = f.eval(u, flipped);
            keys.entry((u, v, x, v, r, x)).or_insert((0.0, 0.0)).0 += weight * w;
        }
        // Ideal: the simulator perturbs inside the preprocessing, the
        // functionality measures ṽ and hands out f(u, ṽ), the postprocessing
        // rebuilds Bob's registers from its memory (v, r).
        for &(r, v_tilde, w) in wrapper.branches(v) {
            let x_tilde = f.eval(u, v_tilde);
            keys.entry((u, v, x_tilde, v, r, x_tilde))
                .or_insert((0.0, 0.0))
                .1 += weight * w;
        }
    }
    let (real, ideal): (Vec<f64>, Vec<f64>) = keys.values().copied().unzip();
    purified_distance_classical(&real, &ideal)
}

/// Bayes-optimal recovery of `v` from the ideal-world view `ṽ`, conditioned
/// on high-weight inputs under the uniform prior.
fn bayes_recovery_high_weight(n: usize, wrapper: &FlipWrapper) -> f64 {
    let size = 1usize << n;
    let high: Vec<usize> = (0..size)
        .filter(|v| (*v as u32).count_ones() as usize * 2 > n)
        .collect();
    if high.is_empty() {
        return 1.0;
    }
    let prior = 1.0 / high.len() as f64;
    // posterior mass per observed ṽ
    let mut per_vt: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
    for &v in &high {
        for &(_, flipped, w) in wrapper.branches(v) {
            *per_vt.entry(flipped).or_default().entry(v).or_insert(0.0) += prior * w;
        }
    }
    per_vt
        .values()
        .map(|posterior| posterior.values().copied().fold(0.0, f64::max))
        .sum()
}

/// Quantum fixture for the perturbed protocol at n ≤ 2, used to validate the
/// classical enumeration against the dense pipeline.
pub fn disj_quantum_fixture(n: usize) -> Result<Fixture> {
    if n > 2 {
        return Err(Error::CapExceeded(
            "quantum perturbed fixture capped at n = 2".into(),
        ));
    }
    let f = make_function(FunctionKind::Disj, n)?;
    let wrapper = FlipWrapper::new(n);
    let (us, vs, os) = (f.u_size(), f.v_size(), f.out_size());
    let r_dim = wrapper.r_dim;

    // Bob branch 1: create the pattern register in superposition.
    let wrapper_cl = wrapper.clone();
    let branch = QuantumChannel::stochastic_isometry(
        RegisterSystem::single(REG_V, vs),
        RegisterSystem::from_pairs(&[(REG_V, vs), (REG_WR, r_dim)])?,
        move |d| {
            wrapper_cl
                .branches(d[0])
                .iter()
                .map(|&(r, _, w)| (vec![d[0], r], w))
                .collect()
        },
    )?;

    // Bob branch 2: write the perturbed input into the message register.
    let wrapper_cl = wrapper.clone();
    let write_sys = RegisterSystem::from_pairs(&[(REG_V, vs), (REG_WR, r_dim), (MSG_V, vs)])?;
    let write = QuantumChannel::classical_isometry(write_sys.clone(), write_sys, move |d| {
        vec![d[0], d[1], (d[2] + wrapper_cl.apply(d[0], d[1])) % vs]
    })?;

    // Alice: evaluate f on (U, M1) into X and the reply Y.
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
            ProtocolRound::new(Party::Bob, branch, &[])?,
            ProtocolRound::new(Party::Bob, write, &[MSG_V])?,
            ProtocolRound::new(Party::Alice, eval_f, &[REG_Y])?,
        ],
        REG_X,
        REG_Y,
    )?;

    // Simulator: perturb inside the preprocessing, remember (v, r).
    let wrapper_cl = wrapper.clone();
    let pre = QuantumChannel::stochastic_isometry(
        RegisterSystem::single(REG_V, vs),
        RegisterSystem::from_pairs(&[(REG_VT, vs), ("Kv", vs), ("Kr", r_dim)])?,
        move |d| {
            wrapper_cl
                .branches(d[0])
                .iter()
                .map(|&(r, flipped, w)| (vec![flipped, d[0], r], w))
                .collect()
        },
    )?;
    let post = QuantumChannel::relabel(
        RegisterSystem::from_pairs(&[("Kv", vs), ("Kr", r_dim), (REG_YT, os)])?,
        RegisterSystem::from_pairs(&[(REG_V, vs), (REG_WR, r_dim), (REG_Y, os)])?,
    )?;
    let ideal_adversary = IdealAdversary::new(pre, post)?;

    Ok(Fixture {
        id: format!("disj-perturbed-n{n}"),
        function: f,
        protocol,
        ideal_adversary,
        noise: None,
        notes: "perturbed reveal for disjointness (cross-validation size)".into(),
    })
}

/// Classical quantities for an arbitrary function/wrapper at small n; used by
/// the cross-validation tests.
pub fn classical_reference(
    f: &ClassicalFunction,
    p: &JointDistribution,
    wrapper: &FlipWrapper,
) -> (f64, f64) {
    (
        classical_correctness(f, p, wrapper),
        classical_security(f, p, wrapper),
    )
}
