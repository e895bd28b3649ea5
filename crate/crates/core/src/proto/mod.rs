//! Two-party protocol model: classical functions, purified inputs, the ideal
//! functionality with adversary composition, honest/purified execution, and
//! the ε-correctness / ε-security figures of merit.

pub mod dist;
pub mod eval;
pub mod function;
pub mod ideal;
pub mod protocol;

pub use dist::{decode_reference, input_state, JointDistribution};
pub use eval::{correctness_epsilon, real_and_secure_states, security_epsilon};
pub use function::ClassicalFunction;
pub use ideal::{
    apply_augmented_functionality, apply_ideal_functionality, functionality_channel, run_ideal,
    run_ideal_dense, run_ideal_purified, run_ideal_purified_as, IdealAdversary, IdealRun,
};
pub use protocol::{
    run_honest, run_honest_dense, run_purified, Party, ProtocolRound, PurifiedRun,
    TwoPartyProtocol,
};

/// Reference register holding the canonical purification of both inputs.
pub const REG_R: &str = "R";
/// Alice's input register.
pub const REG_U: &str = "U";
/// Bob's input register.
pub const REG_V: &str = "V";
/// Alice's output register in the ideal world (fixtures reuse the name for
/// the real protocol's output).
pub const REG_X: &str = "X";
/// Bob's honest output register.
pub const REG_Y: &str = "Y";
/// The functionality's measured copy of Bob's input.
pub const REG_VT: &str = "Vt";
/// The functionality's output register on Bob's side, before postprocessing.
pub const REG_YT: &str = "Yt";
/// Stinespring environment of the functionality's measurement.
pub const REG_PF: &str = "Pf";
