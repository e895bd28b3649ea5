//! The quantifier-swap machinery: one cheating map per net point, the
//! zero-sum game over (input pair) × (cheating map), the optimal mixture, and
//! the recovery checks it implies.

use serde::Serialize;

use crate::attack::{
    construct_cheat_isometry, execute_attack_on, extract_q_tilde, lemma1_check, CheatIsometry,
    ConditionalDistribution,
};
use crate::attack::lemma::BOUND_SLACK;
use crate::proto::{ClassicalFunction, IdealAdversary, JointDistribution, TwoPartyProtocol};
use crate::qcore::linalg::kahan_sum;
use crate::{Error, Result};

use super::lp::{solve_zero_sum, ZeroSumGame};
use super::net::{build_simplex_net, SimplexNet};

/// The mixed attack `Q(ṽ|u,v) = Σ_T p″(T)·q(ṽ|u,v,T)` and its reference
/// distribution, with the proof's slack budget `ε₁+ε₂ ≤ 1 − value`.
#[derive(Debug, Clone, Serialize)]
pub struct CombinedAttack {
    pub q: ConditionalDistribution,
    pub q_tilde: ConditionalDistribution,
    pub eps1_eps2_budget: f64,
}

/// Mixes the per-map conditionals by the game's optimal column strategy.
pub fn combined_attack(
    weights: &[f64],
    per_map: &[ConditionalDistribution],
    q_tilde: &ConditionalDistribution,
    game_value: f64,
) -> Result<CombinedAttack> {
    if weights.len() != per_map.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} conditionals",
            weights.len(),
            per_map.len()
        )));
    }
    let components: Vec<(f64, &ConditionalDistribution)> = weights
        .iter()
        .copied()
        .zip(per_map.iter())
        .filter(|(w, _)| *w > 0.0)
        .collect();
    let q = ConditionalDistribution::mix(&components)?;
    Ok(CombinedAttack {
        q,
        q_tilde: q_tilde.clone(),
        eps1_eps2_budget: (1.0 - game_value).max(0.0),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Check {
    pub u0: usize,
    pub eps: f64,
    pub min_success: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// `min_{(u,v)} Σ_ṽ Q(ṽ|u₀,v)·δ_{f(u,v),f(u,ṽ)} ≥ 1 − 28ε`.
pub fn theorem2_check(
    q: &ConditionalDistribution,
    f: &ClassicalFunction,
    u0: usize,
    eps: f64,
) -> Result<Theorem2Check> {
    let mut min_success = f64::INFINITY;
    for v in 0..f.v_size() {
        let row = q.require_row(&[u0, v])?;
        for u in 0..f.u_size() {
            let success = kahan_sum(row.iter().filter_map(|(&vt, &prob)| {
                if f.same_output(u, v, vt) {
                    Some(prob)
                } else {
                    None
                }
            }));
            min_success = min_success.min(success);
        }
    }
    let threshold = 1.0 - 28.0 * eps;
    Ok(Theorem2Check {
        u0,
        eps,
        min_success,
        threshold,
        pass: min_success >= threshold - BOUND_SLACK,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryCheck {
    pub u0: usize,
    pub eps: f64,
    pub min_recovery: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Equality strengthening: `Q(v|u₀,v) ≥ 1 − 28ε` for every `v` (the success
/// test at `u = v` counts only `ṽ = v`).
pub fn strengthen_eq(q: &ConditionalDistribution, u0: usize, eps: f64, v_size: usize) -> Result<RecoveryCheck> {
    let mut min_recovery = f64::INFINITY;
    for v in 0..v_size {
        q.require_row(&[u0, v])?;
        min_recovery = min_recovery.min(q.prob(&[u0, v], v));
    }
    let threshold = 1.0 - 28.0 * eps;
    Ok(RecoveryCheck {
        u0,
        eps,
        min_recovery,
        threshold,
        pass: min_recovery >= threshold - BOUND_SLACK,
    })
}

/// Inner-product strengthening: averaging the success test over uniform `u`
/// gives collision factor 1 at `ṽ = v` and ½ otherwise, so
/// `Q(v|u₀,v) ≥ 1 − 56ε`.
pub fn strengthen_ip(
    q: &ConditionalDistribution,
    u0: usize,
    eps: f64,
    v_size: usize,
) -> Result<RecoveryCheck> {
    let mut min_recovery = f64::INFINITY;
    for v in 0..v_size {
        q.require_row(&[u0, v])?;
        min_recovery = min_recovery.min(q.prob(&[u0, v], v));
    }
    let threshold = 1.0 - 56.0 * eps;
    Ok(RecoveryCheck {
        u0,
        eps,
        min_recovery,
        threshold,
        pass: min_recovery >= threshold - BOUND_SLACK,
    })
}

/// Exhaustive verification of the inner-product collision identity
/// `2^{-n} Σ_u δ_{IP(u,v),IP(u,ṽ)} = 1` if `ṽ = v` and `½` otherwise.
pub fn ip_collision_identity(n: usize) -> Result<bool> {
    if n == 0 || n > 3 {
        return Err(Error::CapExceeded(
            "identity check is exhaustive for n ∈ 1..=3".into(),
        ));
    }
    let size = 1usize << n;
    let ip = |a: usize, b: usize| (a & b).count_ones() as usize % 2;
    for v in 0..size {
        for vt in 0..size {
            let matches = (0..size).filter(|&u| ip(u, v) == ip(u, vt)).count();
            let avg = matches as f64 / size as f64;
            let expect = if v == vt { 1.0 } else { 0.5 };
            if (avg - expect).abs() > 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainCheck {
    /// `min_{p ∈ net} max_T Σ_{u,v} p(u,v)·g(u,v,T)`.
    pub min_net_max_payoff: f64,
    /// Lower side `1 − 12ε` with the measured ε.
    pub lower: f64,
    /// Upper side `2·ε_net + value` with the net's nominal resolution.
    pub upper: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Theorem2Config {
    pub u0: usize,
    pub net_eps: f64,
    pub net_cap: u128,
}

impl Default for Theorem2Config {
    fn default() -> Self {
        Theorem2Config {
            u0: 0,
            net_eps: 4.0,
            net_cap: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Theorem2Run {
    pub net: SimplexNet,
    /// Per net point: measured security distance of that point's run.
    pub per_point_eps: Vec<f64>,
    /// `max_i ε_i`: the ε entering every threshold.
    pub eps_used: f64,
    pub cheat_maps: Vec<CheatIsometry>,
    pub game: ZeroSumGame,
    pub combined: CombinedAttack,
    pub check: Theorem2Check,
    pub chain: ChainCheck,
}

/// Full quantifier-swap pipeline: net → per-point cheat maps → payoff tensor
/// → LP → mixed attack → `1 − 28ε` check and the value-chain inequality.
pub fn run_theorem2(
    protocol: &TwoPartyProtocol,
    f: &ClassicalFunction,
    adversary: &IdealAdversary,
    cfg: &Theorem2Config,
) -> Result<Theorem2Run> {
    let (us, vs) = (f.u_size(), f.v_size());
    if cfg.u0 >= us {
        return Err(Error::Config(format!("u0 = {} outside domain", cfg.u0)));
    }
    let w = us * vs;
    let net = build_simplex_net(w, cfg.net_eps, cfg.net_cap)?;
    let uniform = JointDistribution::uniform(us, vs);
    let q_tilde = extract_q_tilde(f, &uniform, adversary)?;
    // One purified run under the uniform distribution serves every
    // attack execution below.
    let uniform_run = crate::proto::run_purified(protocol, &uniform)?;

    // Each cheating map is built under its net point mixed with a vanishing
    // uniform component: boundary points have empty sectors on which the
    // Uhlmann completion would otherwise be arbitrary, and the smoothing pins
    // the map's behavior everywhere. The perturbation is far below the bound
    // slack.
    const SMOOTHING: f64 = 1e-7;
    let mut cheat_maps = Vec::with_capacity(net.len());
    let mut per_point_eps = Vec::with_capacity(net.len());
    let mut per_map_q = Vec::with_capacity(net.len());
    for point in &net.points {
        let smoothed: Vec<f64> = point
            .iter()
            .map(|&x| (1.0 - SMOOTHING) * x + SMOOTHING / w as f64)
            .collect();
        let p = JointDistribution::from_flat(us, vs, &smoothed)?;
        let build = construct_cheat_isometry(protocol, f, &p, adversary)?;
        per_point_eps.push(build.eps_sec);
        let q = execute_attack_on(&uniform_run, &uniform, &build.isometry)?;
        // Per-point sanity: the bounds of the average-case lemma hold at this
        // point's own distribution.
        let point_report = lemma1_check(&q, &q_tilde, &p, f, build.eps_sec)?;
        if !point_report.pass {
            return Err(Error::Numerics(format!(
                "per-point bound violated: success {} defect {} at eps {}",
                point_report.avg_success, point_report.independence_defect, build.eps_sec
            )));
        }
        per_map_q.push(q);
        cheat_maps.push(build.isometry);
    }
    let eps_used = per_point_eps.iter().copied().fold(0.0, f64::max);

    // Payoff tensor over (u,v) rows × T columns.
    let mut payoff = vec![vec![0.0; net.len()]; w];
    for (row, cell) in payoff.iter_mut().enumerate() {
        let (u, v) = (row / vs, row % vs);
        for (j, q) in per_map_q.iter().enumerate() {
            let g = super::payoff::payoff_from_conditionals(u, v, q, &q_tilde, f)?;
            if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&g) {
                return Err(Error::Numerics(format!(
                    "payoff {g} outside [-1,1] at ({u},{v}), map {j}"
                )));
            }
            cell[j] = g;
        }
    }

    let game = solve_zero_sum(&payoff)?;
    let combined = combined_attack(&game.col_strategy, &per_map_q, &q_tilde, game.value)?;
    let check = theorem2_check(&combined.q, f, cfg.u0, eps_used)?;

    // Chain inequality: 1 − 12ε ≤ min_net max_T Σ p·g ≤ 2·ε_net + value.
    let min_net_max_payoff = net
        .points
        .iter()
        .map(|p| {
            (0..net.len())
                .map(|j| {
                    kahan_sum(
                        (0..w).map(|row| p[row] * payoff[row][j]),
                    )
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    let lower = 1.0 - 12.0 * eps_used;
    let upper = 2.0 * cfg.net_eps + game.value;
    let chain = ChainCheck {
        min_net_max_payoff,
        lower,
        upper,
        pass: lower <= min_net_max_payoff + BOUND_SLACK
            && min_net_max_payoff <= upper + BOUND_SLACK,
    };

    Ok(Theorem2Run {
        net,
        per_point_eps,
        eps_used,
        cheat_maps,
        game,
        combined,
        check,
        chain,
    })
}
