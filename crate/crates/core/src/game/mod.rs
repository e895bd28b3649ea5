//! Zero-sum game machinery for the universal (distribution-independent)
//! cheating strategy: simplex nets, exact LP solve, payoff assembly, and the
//! combined-attack checks.

pub mod lp;
pub mod net;
pub mod payoff;
pub mod theorem2;

pub use lp::{solve_zero_sum, ZeroSumGame};
pub use net::{build_simplex_net, SimplexNet};
pub use payoff::{payoff, payoff_from_conditionals};
pub use theorem2::{
    combined_attack, ip_collision_identity, run_theorem2, strengthen_eq, strengthen_ip,
    theorem2_check, ChainCheck, CombinedAttack, RecoveryCheck, Theorem2Check, Theorem2Config,
    Theorem2Run,
};
